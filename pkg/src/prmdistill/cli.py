"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 bad arguments or parameters
outside the code family, 3 I/O error, 4 unparsable code file, 5 an
enumeration was refused for exceeding the budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time

import numpy as np

from . import codefile, css, distill, rm
from .errors import BudgetExceeded, ConstraintError, ThresholdError

log = logging.getLogger("prmdistill")

EXIT_OK, EXIT_FAIL, EXIT_ARGS, EXIT_IO, EXIT_PARSE, EXIT_BUDGET = range(6)
DEFAULT_SEED = 0
CHECKS = ("commutation", "distance", "transversal", "overlap", "divisibility")


class CliExit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def exact(value) -> dict:
    return {"value": str(value) if isinstance(value, int) and not isinstance(value, bool) else value, "exact": True}


def approx(value: float, stderr: float | None = None) -> dict:
    out = {"value": value, "exact": False}
    if stderr is not None:
        out["stderr"] = stderr
    return out


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


# --- commands ---------------------------------------------------------------


def cmd_params(args) -> tuple[dict, list[dict] | None, int]:
    p = css.params_formula(args.m, args.r, args.w)
    results = {"n": exact(p.n), "k": exact(p.k), "d": exact(p.d), "nu": exact(p.nu), "gamma": approx(p.gamma)}
    return results, None, EXIT_OK


def cmd_construct(args):
    code = css.build_code(args.m, args.r, args.w)
    try:
        codefile.save(code, args.out)
        reread = codefile.load(args.out)
    except OSError as exc:
        raise CliExit(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    ok = css.commutation_check(reread) and codefile.to_dict(reread) == codefile.to_dict(code)
    results = {
        "path": {"value": str(args.out), "exact": True},
        "n": exact(code.n),
        "k": exact(code.k),
        "x_stabilizers": exact(code.x_stabilizers.rows),
        "z_stabilizers": exact(code.z_stabilizers.rows),
        "commutation": exact("pass" if ok else "fail"),
    }
    return results, None, EXIT_OK if ok else EXIT_FAIL


def _load_code(path) -> css.CssCode:
    try:
        return codefile.load(path)
    except codefile.CodeFileError as exc:
        raise CliExit(EXIT_PARSE, f"cannot parse {path}: {exc}") from exc
    except OSError as exc:
        raise CliExit(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _run_check(name: str, code: css.CssCode, args) -> dict:
    p = code.params
    forced = args.nu is not None
    nu = args.nu if forced else p.nu
    if name == "commutation":
        return {"passed": css.commutation_check(code), "mode": "exhaustive"}
    if name == "distance":
        d_z, d_x = css.distance_brute(code, args.budget)
        passed = (d_z, d_x) == (p.d, p.d_x)
        return {"passed": passed, "mode": "exhaustive", "d_z": d_z, "d_x": d_x, "d": min(d_z, d_x)}
    if name == "transversal":
        res = css.transversal_phase_check(code, nu, args.budget, args.trials, args.seed, force=forced)
        return {"passed": res.passed, "mode": res.mode, "evaluated": res.evaluated, "nu": nu}
    if name == "overlap":
        res = css.overlap_divisibility_check(code, nu, None, args.budget, force=forced)
        return {"passed": res.passed, "mode": res.mode, "evaluated": res.evaluated, "nu": nu}
    if name == "divisibility":
        passed = rm.weight_divisibility_check(p.r, p.m, nu, args.budget, force=forced)
        return {"passed": passed, "mode": "exhaustive", "nu": nu}
    raise CliExit(EXIT_ARGS, f"unknown check {name!r}")


def cmd_verify(args):
    code = _load_code(args.code)
    checks = args.checks.split(",") if args.checks else list(CHECKS)
    for name in checks:
        if name not in CHECKS:
            raise CliExit(EXIT_ARGS, f"unknown check {name!r}; choose from {','.join(CHECKS)}")
    results = {}
    failed = refused = False
    for name in checks:
        try:
            out = _run_check(name, code, args)
        except BudgetExceeded as exc:
            refused = True
            results[name] = {"value": "refused", "exact": True, "mode": "refused", "detail": str(exc)}
            continue
        failed |= not out["passed"]
        entry = {"value": "pass" if out.pop("passed") else "fail", "exact": True}
        entry.update(out)
        results[name] = entry
    status = EXIT_FAIL if failed else EXIT_BUDGET if refused else EXIT_OK
    return results, None, status


def cmd_scan(args):
    rows = distill.scan(args.r_max, args.constraint, args.nu_min, args.m_max)
    if args.gamma_below is not None:
        rows = [row for row in rows if row.gamma < args.gamma_below]
    table = [
        {"m": row.m, "r": row.r, "w": row.w, "nu": row.nu, "n": str(row.n), "k": str(row.k), "d": str(row.d), "gamma": row.gamma}
        for row in rows
    ]
    return {"rows": exact(len(table))}, table, EXIT_OK


def cmd_asymptotic(args):
    if args.optimize:
        point = distill.optimize_p(args.tol)
        return {"p": approx(point.p), "gamma": approx(point.gamma)}, None, EXIT_OK
    if args.p is None:
        raise CliExit(EXIT_ARGS, "give --optimize or --p")
    if not distill.P_LOW <= args.p < distill.P_HIGH:
        raise CliExit(EXIT_ARGS, "p must lie in (1/6, 1/3)")
    return {"p": exact(args.p), "gamma": approx(distill.asymptotic_gamma(args.p))}, None, EXIT_OK


def cmd_distill(args):
    code = _load_code(args.code)
    table = []
    for eps in args.eps:
        if args.method == "exact":
            try:
                res = distill.exact_output_error(code, eps, args.budget)
            except BudgetExceeded as exc:
                raise CliExit(EXIT_BUDGET, f"{exc}; use --method mc") from exc
            table.append({"eps": eps, "p_accept": res.p_accept, "eps_block": res.eps_block})
        else:
            res = distill.mc_output_error(code, eps, args.trials, args.seed)
            table.append(
                {
                    "eps": eps,
                    "p_accept": res.p_accept,
                    "p_accept_stderr": res.p_accept_err,
                    "eps_block": res.eps_block,
                    "eps_block_stderr": res.eps_block_err,
                }
            )
    results = {}
    if len(table) == 1:
        row = table[0]
        if args.method == "exact":
            results = {"p_accept": approx(row["p_accept"]), "eps_block": approx(row["eps_block"])}
        else:
            results = {
                "p_accept": approx(row["p_accept"], row["p_accept_stderr"]),
                "eps_block": approx(row["eps_block"], row["eps_block_stderr"]),
            }
    elif len(table) > 1:
        pts = [(r["eps"], r["eps_block"]) for r in table if r["eps"] > 0 and r["eps_block"] > 0]
        if len(pts) >= 2:
            x, y = np.log([p[0] for p in pts]), np.log([p[1] for p in pts])
            results["loglog_slope"] = approx(float(np.polyfit(x, y, 1)[0]))
    if args.targets:
        p = code.params
        model = distill.OverheadModel(p.n, p.k, p.d, args.prefactor)
        eps_in = args.eps[0]
        table = []
        for target in args.targets:
            trace = distill.concat_trace(model, eps_in, target)
            table.append(
                {"target": target, "z": trace.z_final, "eps_out": trace.eps_out, "ratio": str(trace.input_count // trace.output_count)}
            )
        results["gamma"] = approx(model.gamma)
        if len(args.targets) >= 3:
            results["scaling_exponent"] = approx(distill.overhead_scaling_exponent(model, eps_in, args.targets))
    return results, table, EXIT_OK


# --- output ------------------------------------------------------------------


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _text_table(rows: list[dict]) -> str:
    if not rows:
        return "(no rows)\n"
    cols = list(rows[0])
    cells = [cols] + [[_fmt(r[c]) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    return "".join("  ".join(v.rjust(wd) for v, wd in zip(row, widths)) + "\n" for row in cells)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def render(record: dict, table: list[dict] | None, fmt: str) -> str:
    if fmt == "json":
        if table is not None:
            record = dict(record, table=table)
        return json.dumps(record, indent=1) + "\n"
    flat = [
        {"key": key, "value": _fmt(entry["value"]), "exact": str(entry["exact"]).lower()}
        for key, entry in record["results"].items()
    ]
    if fmt == "csv":
        return _csv(table) if table is not None else _csv(flat)
    out = _text_table(flat)
    if table is not None:
        out += "\n" + _text_table(table)
    return out


# --- argument parsing ----------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="table")
    common.add_argument("--budget", type=int, default=css.EXHAUSTIVE_LIMIT, help="max elements to enumerate")
    common.add_argument("--trials", type=int, default=css.DEFAULT_TRIALS)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--quiet", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="prmdistill", description="Punctured Reed-Muller distillation codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", parents=[common], help="code parameters [[n,k,d]], nu and gamma")
    for name in ("m", "r", "w"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("construct", parents=[common], help="build a code and write it as JSON")
    for name in ("m", "r", "w"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="run oracle checks on a code file")
    p.add_argument("code")
    p.add_argument("--checks", default="", help=f"comma-separated subset of {','.join(CHECKS)}")
    p.add_argument("--nu", type=int, default=None, help="force a Clifford-hierarchy level")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="tabulate gamma over the code family")
    p.add_argument("--r-max", type=int, required=True)
    p.add_argument("--constraint", choices=("general", "m3r1"), default="general")
    p.add_argument("--nu-min", type=int, default=3)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--gamma-below", type=float, default=None)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("asymptotic", parents=[common], help="large-code limit of gamma")
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_asymptotic)

    p = sub.add_parser("distill", parents=[common], help="output error and concatenation overhead")
    p.add_argument("code")
    p.add_argument("--eps", type=_float_list, required=True, help="comma-separated input error rates")
    p.add_argument("--method", choices=("exact", "mc"), default="exact")
    p.add_argument("--targets", type=_float_list, default=None, help="comma-separated target error rates")
    p.add_argument("--prefactor", type=float, default=1.0)
    p.set_defaults(func=cmd_distill)
    return parser


RANDOMIZED = {"verify", "distill"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(name)s: %(message)s")
    if args.seed is None:
        args.seed = DEFAULT_SEED
        if args.command in RANDOMIZED:
            log.info("using default seed %d", DEFAULT_SEED)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "format", "quiet")}
    start = time.perf_counter()
    try:
        results, table, status = args.func(args)
    except CliExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConstraintError, ThresholdError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    modes = {e.get("mode") for e in results.values() if isinstance(e, dict) and e.get("mode")}
    record = {
        "schema_version": codefile.SCHEMA_VERSION,
        "command": args.command,
        "parameters": params,
        "results": results,
        "mode": ",".join(sorted(modes)) if modes else "analytic",
        "seed": args.seed,
        "elapsed_s": round(time.perf_counter() - start, 6),
    }
    sys.stdout.write(render(record, table, args.format))
    return status


def run() -> None:
    sys.exit(main())
