"""JSON serialization of :class:`~prmdistill.css.CssCode`.

Each matrix row is a lowercase hex string of ceil(n/8) bytes; coordinate j
is bit ``j % 8`` (least significant first) of byte ``j // 8``.  Coordinates
follow the canonical weight-then-value order of the unpunctured points.
Wide integers are written as decimal strings.
"""

from __future__ import annotations

import json

import numpy as np

from .css import CodeFamilyParams, CssCode
from .gf2 import BitMatrix, n_words

SCHEMA_VERSION = 1
MATRICES = ("x_stabilizers", "z_stabilizers", "logical_x", "logical_z")


class CodeFileError(ValueError):
    """The file does not describe a well-formed code."""


def row_to_hex(words: np.ndarray, length: int) -> str:
    return words.astype("<u8").tobytes()[: (length + 7) // 8].hex()


def hex_to_row(text: str, length: int) -> np.ndarray:
    nbytes = (length + 7) // 8
    try:
        raw = bytes.fromhex(text)
    except ValueError as exc:
        raise CodeFileError(f"bad hex row {text[:16]!r}") from exc
    if len(raw) != nbytes:
        raise CodeFileError(f"row has {len(raw)} bytes, expected {nbytes}")
    padded = raw + bytes(n_words(length) * 8 - nbytes)
    words = np.frombuffer(padded, dtype="<u8").astype(np.uint64)
    tail = length % 64
    if tail and int(words[-1]) >> tail:
        raise CodeFileError("padding bits are set")
    return words


def to_dict(code: CssCode) -> dict:
    p = code.params
    out = {
        "schema_version": SCHEMA_VERSION,
        "m": p.m,
        "r": p.r,
        "w": p.w,
        "nu": p.nu,
        "n": str(code.n),
        "k": str(code.k),
        "coordinate_order": "hamming-weight-then-value",
    }
    for name in MATRICES:
        M: BitMatrix = getattr(code, name)
        out[name] = [row_to_hex(row, M.cols) for row in M.data]
    return out


def from_dict(data: dict) -> CssCode:
    try:
        if data["schema_version"] != SCHEMA_VERSION:
            raise CodeFileError(f"unsupported schema_version {data['schema_version']}")
        params = CodeFamilyParams(int(data["m"]), int(data["r"]), int(data["w"]))
        n, k = int(data["n"]), int(data["k"])
        matrices = {}
        for name in MATRICES:
            rows = [hex_to_row(h, n) for h in data[name]]
            block = np.stack(rows) if rows else np.zeros((0, n_words(n)), dtype=np.uint64)
            matrices[name] = BitMatrix(n, block)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CodeFileError):
            raise
        raise CodeFileError(str(exc)) from exc
    if n != params.n or k != matrices["logical_x"].rows:
        raise CodeFileError("n or k inconsistent with the stored matrices")
    return CssCode(params, **matrices)


def dumps(code: CssCode) -> str:
    return json.dumps(to_dict(code), indent=1)


def loads(text: str) -> CssCode:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodeFileError(str(exc)) from exc
    if not isinstance(data, dict):
        raise CodeFileError("top level must be an object")
    return from_dict(data)


def save(code: CssCode, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(code))
        fh.write("\n")


def load(path) -> CssCode:
    with open(path) as fh:
        return loads(fh.read())
