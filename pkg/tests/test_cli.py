import json
import subprocess
import sys

import numpy as np
import pytest

from prmdistill import codefile, css
from prmdistill.cli import main


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def results(out):
    return {k: v["value"] for k, v in json.loads(out)["results"].items()}


@pytest.fixture
def file15(tmp_path, code15):
    path = tmp_path / "c15.json"
    codefile.save(code15, path)
    return path


@pytest.fixture
def file26(tmp_path, code26):
    path = tmp_path / "c26.json"
    codefile.save(code26, path)
    return path


@pytest.mark.parametrize("mrw", [(4, 1, 0), (5, 2, 1), (5, 1, 0), (7, 3, 2), (9, 4, 1), (10, 2, 1)])
def test_codefile_roundtrip(mrw):
    code = css.build_code(*mrw)
    again = codefile.loads(codefile.dumps(code))
    for name in codefile.MATRICES:
        assert getattr(again, name) == getattr(code, name)
    assert again.params == code.params
    assert css.commutation_check(again)


def test_codefile_hex_layout(code15):
    data = codefile.to_dict(code15)
    assert data["n"] == "15" and data["k"] == "1"
    for name in codefile.MATRICES:
        M = getattr(code15, name)
        for text, bits in zip(data[name], M.to_bits()):
            raw = bytes.fromhex(text)
            assert len(raw) == 2
            decoded = [(raw[j // 8] >> (j % 8)) & 1 for j in range(15)]
            assert decoded == bits.tolist()


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("logical_x"),
        lambda d: d.__setitem__("schema_version", 99),
        lambda d: d["x_stabilizers"].__setitem__(0, "zz00"),
        lambda d: d["x_stabilizers"].__setitem__(0, "ffff"),  # padding bit set
        lambda d: d["x_stabilizers"].__setitem__(0, "ff"),
        lambda d: d.__setitem__("r", 2),
    ],
)
def test_codefile_parse_errors(code15, mutate):
    data = codefile.to_dict(code15)
    mutate(data)
    with pytest.raises(codefile.CodeFileError):
        codefile.from_dict(data)


def test_params_headline(capsys):
    status, out, _ = run(capsys, "params", "--m", "58", "--r", "19", "--w", "14", "--format", "json")
    assert status == 0
    r = results(out)
    assert (r["n"], r["k"], r["d"], r["nu"]) == ("288215893050995568", "14483100716176", "21700", "3")
    assert r["gamma"] < 1
    record = json.loads(out)
    assert record["results"]["n"]["exact"] is True and record["results"]["gamma"]["exact"] is False


def test_params_small_and_guard(capsys):
    status, out, _ = run(capsys, "params", "--m", "4", "--r", "1", "--w", "0", "--format", "json")
    assert status == 0 and results(out)["n"] == "15" and results(out)["nu"] == "3"
    status, out, err = run(capsys, "params", "--m", "4", "--r", "2", "--w", "1")
    assert status == 2 and "2r < m violated" in err


def test_params_csv_and_table(capsys):
    _, out, _ = run(capsys, "params", "--m", "4", "--r", "1", "--w", "0", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "key,value,exact" and "n,15,true" in lines
    _, out, _ = run(capsys, "params", "--m", "4", "--r", "1", "--w", "0")
    assert "gamma" in out


@pytest.mark.parametrize("mrw,counts", [((4, 1, 0), (4, 10, 1)), ((5, 2, 1), (10, 10, 6))])
def test_construct(capsys, tmp_path, mrw, counts):
    path = tmp_path / "code.json"
    m, r, w = map(str, mrw)
    status, _, _ = run(capsys, "construct", "--m", m, "--r", r, "--w", w, "--out", str(path))
    assert status == 0
    data = json.loads(path.read_text())
    assert (len(data["x_stabilizers"]), len(data["z_stabilizers"]), len(data["logical_x"])) == counts


def test_construct_unwritable(capsys, tmp_path):
    status, _, _ = run(capsys, "construct", "--m", "4", "--r", "1", "--w", "0", "--out", str(tmp_path / "no" / "x.json"))
    assert status == 3
    status, _, _ = run(capsys, "construct", "--m", "4", "--r", "2", "--w", "0", "--out", str(tmp_path / "x.json"))
    assert status == 2


def test_verify_all_pass(capsys, file15):
    status, out, _ = run(capsys, "verify", str(file15), "--format", "json")
    assert status == 0
    record = json.loads(out)
    assert set(record["results"]) == {"commutation", "distance", "transversal", "overlap", "divisibility"}
    for entry in record["results"].values():
        assert entry["value"] == "pass" and entry["mode"] == "exhaustive"
    assert record["results"]["distance"]["d_z"] == 3 and record["results"]["distance"]["d_x"] == 7


def test_verify_forced_level_fails(capsys, file26):
    status, out, _ = run(capsys, "verify", str(file26), "--checks", "transversal", "--nu", "3", "--format", "json")
    assert status == 1
    assert json.loads(out)["results"]["transversal"]["value"] == "fail"


def test_verify_corrupted_file(capsys, tmp_path, code15):
    data = codefile.to_dict(code15)
    raw = bytearray(bytes.fromhex(data["logical_x"][0]))
    raw[0] ^= 1
    data["logical_x"][0] = raw.hex()
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    status, out, _ = run(capsys, "verify", str(path), "--checks", "commutation", "--format", "json")
    assert status == 1 and results(out)["commutation"] == "fail"


def test_verify_parse_failure_and_budget(capsys, tmp_path, file26):
    bad = tmp_path / "junk.json"
    bad.write_text("{not json")
    status, _, _ = run(capsys, "verify", str(bad))
    assert status == 4
    status, out, _ = run(capsys, "verify", str(file26), "--checks", "commutation,distance", "--budget", "100", "--format", "json")
    assert status == 5
    assert results(out) == {"commutation": "pass", "distance": "refused"}


def test_verify_sampled_mode(capsys, file26):
    status, out, _ = run(
        capsys, "verify", str(file26), "--checks", "transversal", "--budget", "1000", "--trials", "2000", "--seed", "5", "--format", "json"
    )
    record = json.loads(out)
    assert status == 0 and record["results"]["transversal"]["mode"] == "sampled" and record["seed"] == 5


def test_scan_minimal(capsys):
    status, out, _ = run(capsys, "scan", "--constraint", "m3r1", "--nu-min", "3", "--r-max", "19", "--gamma-below", "1", "--format", "csv")
    assert status == 0
    lines = out.strip().splitlines()
    assert lines[0] == "m,r,w,nu,n,k,d,gamma"
    assert len(lines) == 2 and lines[1].startswith("58,19,14,3,288215893050995568,14483100716176,21700,")


def test_scan_small(capsys):
    _, out, _ = run(capsys, "scan", "--r-max", "2", "--nu-min", "3", "--format", "json")
    rows = {(row["m"], row["r"], row["w"]) for row in json.loads(out)["table"]}
    assert {(4, 1, 0), (7, 2, 1)} <= rows
    _, out, _ = run(capsys, "scan", "--r-max", "0", "--format", "csv")
    assert out == ""


def test_asymptotic(capsys):
    status, out, _ = run(capsys, "asymptotic", "--optimize", "--tol", "1e-6", "--format", "json")
    r = results(out)
    assert status == 0 and r["p"] == pytest.approx(0.270629, abs=1e-5) and r["gamma"] == pytest.approx(0.67799, abs=1e-5)
    status, out, _ = run(capsys, "asymptotic", "--p", "0.25", "--format", "json")
    assert status == 0 and results(out)["gamma"] > 0.678
    status, _, _ = run(capsys, "asymptotic", "--p", "0.4")
    assert status == 2


def test_distill_exact_sweep(capsys, file15):
    eps = ",".join(f"{e:g}" for e in np.logspace(-4, -3, 5))
    status, out, _ = run(capsys, "distill", str(file15), "--eps", eps, "--format", "json")
    assert status == 0
    assert results(out)["loglog_slope"] == pytest.approx(3.0, abs=0.05)


def test_distill_mc_reproducible(capsys, file15):
    args = ("distill", str(file15), "--eps", "0.05", "--method", "mc", "--trials", "20000", "--seed", "42", "--format", "json")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    strip = lambda text: {k: v for k, v in json.loads(text).items() if k != "elapsed_s"}
    assert strip(first) == strip(second)


def test_distill_targets_staircase(capsys, file15):
    targets = ",".join(f"1e-{e}" for e in (8, 20, 60, 150))
    status, out, _ = run(capsys, "distill", str(file15), "--eps", "1e-4", "--targets", targets, "--format", "json")
    assert status == 0
    ratios = [row["ratio"] for row in json.loads(out)["table"]]
    assert ratios == ["15", "225", "3375", "50625"]


def test_distill_budget_refusal(capsys, file26):
    status, _, err = run(capsys, "distill", str(file26), "--eps", "0.01", "--budget", "10")
    assert status == 5 and "mc" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "prmdistill", "params", "--m", "4", "--r", "1", "--w", "0", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "n,15,true" in proc.stdout
