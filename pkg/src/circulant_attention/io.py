"""Plain-text file formats: matrix CSV, token sequences, ASCII PGM.

Matrix CSV
    line 1 ``rows,cols``; then ``rows`` lines of comma-separated decimals.
Sequence
    line 1 ``H W d``; then ``H*W`` lines of ``d`` comma-separated decimals,
    tokens in row-major grid order.
PGM
    ``P2`` header, ``W H``, maxval 255, one text row per grid row.
"""

from __future__ import annotations

import os
from typing import Union

import numpy as np

from .errors import FormatError

PathLike = Union[str, "os.PathLike[str]"]


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _parse_floats(line: str, lineno: int) -> list[float]:
    try:
        return [float(tok) for tok in line.split(",")]
    except ValueError as exc:
        raise FormatError(f"line {lineno}: {exc}") from None


def _parse_ints(tokens: list[str], what: str) -> list[int]:
    try:
        vals = [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"bad {what} header: {tokens!r}") from None
    if any(v < 0 for v in vals):
        raise FormatError(f"negative size in {what} header: {tokens!r}")
    return vals


def format_matrix_csv(M) -> str:
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    lines = [f"{M.shape[0]},{M.shape[1]}"]
    lines += [",".join(_fmt(v) for v in row) for row in M]
    return "\n".join(lines) + "\n"


def parse_matrix_csv(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty matrix file")
    header = _parse_ints(lines[0].split(","), "matrix")
    if len(header) != 2:
        raise FormatError(f"matrix header needs rows,cols: {lines[0]!r}")
    rows, cols = header
    body = lines[1:]
    if len(body) != rows:
        raise FormatError(f"header says {rows} rows, found {len(body)}")
    out = np.empty((rows, cols))
    for i, line in enumerate(body):
        vals = _parse_floats(line, i + 2)
        if len(vals) != cols:
            raise FormatError(f"line {i + 2}: expected {cols} values, found {len(vals)}")
        out[i] = vals
    return out


def read_matrix_csv(path: PathLike) -> np.ndarray:
    with open(path) as fh:
        return parse_matrix_csv(fh.read())


def write_matrix_csv(path: PathLike, M) -> None:
    with open(path, "w") as fh:
        fh.write(format_matrix_csv(M))


def format_sequence(X) -> str:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 3:
        raise FormatError(f"sequence must be (H, W, d), got {X.shape}")
    H, W, d = X.shape
    lines = [f"{H} {W} {d}"]
    lines += [",".join(_fmt(v) for v in tok) for tok in X.reshape(H * W, d)]
    return "\n".join(lines) + "\n"


def parse_sequence(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty sequence file")
    header = _parse_ints(lines[0].split(), "sequence")
    if len(header) != 3 or min(header) < 1:
        raise FormatError(f"sequence header needs positive H W d: {lines[0]!r}")
    H, W, d = header
    if len(lines) - 1 != H * W:
        raise FormatError(f"expected {H * W} token lines, found {len(lines) - 1}")
    out = np.empty((H * W, d))
    for i, line in enumerate(lines[1:]):
        vals = _parse_floats(line, i + 2)
        if len(vals) != d:
            raise FormatError(f"line {i + 2}: expected {d} values, found {len(vals)}")
        out[i] = vals
    return out.reshape(H, W, d)


def read_sequence(path: PathLike) -> np.ndarray:
    with open(path) as fh:
        return parse_sequence(fh.read())


def write_sequence(path: PathLike, X) -> None:
    with open(path, "w") as fh:
        fh.write(format_sequence(X))


def format_pgm(pixels) -> str:
    pixels = np.asarray(pixels)
    H, W = pixels.shape
    rows = [" ".join(str(int(p)) for p in row) for row in pixels]
    return f"P2\n{W} {H}\n255\n" + "\n".join(rows) + "\n"


def parse_pgm(text: str) -> np.ndarray:
    tokens = [t for ln in text.splitlines() for t in ln.split("#", 1)[0].split()]
    if not tokens or tokens[0] != "P2":
        raise FormatError("not an ASCII (P2) PGM file")
    W, H, maxval = _parse_ints(tokens[1:4], "PGM")
    data = _parse_ints(tokens[4:], "PGM pixel")
    if len(data) != H * W or any(p > maxval for p in data):
        raise FormatError(f"PGM body has {len(data)} pixels, expected {H * W} within maxval {maxval}")
    return np.array(data, dtype=np.int64).reshape(H, W)


def read_pgm(path: PathLike) -> np.ndarray:
    with open(path) as fh:
        return parse_pgm(fh.read())


def write_pgm(path: PathLike, pixels) -> None:
    with open(path, "w") as fh:
        fh.write(format_pgm(pixels))
