"""Minimal MatrixMarket reader/writer for dense real data.

Supports ``matrix array`` and ``matrix coordinate`` files with ``real`` or
``integer`` fields and ``general`` symmetry. Coordinate entries that are not
listed are zero.
"""

from __future__ import annotations

import numpy as np


class MatrixMarketError(ValueError):
    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


def _data_lines(text):
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("%"):
            yield lineno, stripped.split()


def parse_matrix_market(text, path=None):
    lines = text.splitlines()
    if not lines:
        raise MatrixMarketError("empty file", 1, path)
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket":
        raise MatrixMarketError("malformed header, expected "
                                "'%%MatrixMarket matrix <format> <field> <symmetry>'", 1, path)
    obj, fmt, fld, sym = (h.lower() for h in header[1:])
    if obj != "matrix":
        raise MatrixMarketError(f"unsupported object {obj!r}", 1, path)
    if fmt not in ("array", "coordinate"):
        raise MatrixMarketError(f"unknown format {fmt!r}", 1, path)
    if fld not in ("real", "integer", "double"):
        raise MatrixMarketError(f"non-real field {fld!r}", 1, path)
    if sym != "general":
        raise MatrixMarketError(f"unsupported symmetry {sym!r}", 1, path)

    body = _data_lines("\n".join([""] + lines[1:]))
    try:
        lineno, size = next(body)
    except StopIteration:
        raise MatrixMarketError("missing size line", len(lines), path) from None
    expected = 2 if fmt == "array" else 3
    if len(size) != expected:
        raise MatrixMarketError(f"size line needs {expected} integers", lineno, path)
    try:
        dims = [int(s) for s in size]
    except ValueError:
        raise MatrixMarketError("size line is not integer", lineno, path) from None
    if min(dims) < 0:
        raise MatrixMarketError("negative size", lineno, path)
    rows, cols = dims[:2]

    def number(token, lineno):
        try:
            value = float(token)
        except ValueError:
            raise MatrixMarketError(f"bad number {token!r}", lineno, path) from None
        if not np.isfinite(value):
            raise MatrixMarketError(f"non-finite entry {token!r}", lineno, path)
        return value

    M = np.zeros((rows, cols))
    if fmt == "array":
        values = []
        for lineno, tokens in body:
            if len(tokens) != 1:
                raise MatrixMarketError("array entries must be one per line", lineno, path)
            if len(values) == rows * cols:
                raise MatrixMarketError("more entries than declared", lineno, path)
            values.append(number(tokens[0], lineno))
        if len(values) != rows * cols:
            raise MatrixMarketError(f"expected {rows * cols} entries, found {len(values)}",
                                    len(lines), path)
        return np.array(values).reshape((rows, cols), order="F")

    nnz = dims[2]
    count = 0
    for lineno, tokens in body:
        if len(tokens) != 3:
            raise MatrixMarketError("coordinate entries need 'row col value'", lineno, path)
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise MatrixMarketError("non-integer index", lineno, path) from None
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise MatrixMarketError(f"index ({i}, {j}) out of bounds for {rows}x{cols}",
                                    lineno, path)
        count += 1
        if count > nnz:
            raise MatrixMarketError("more entries than declared", lineno, path)
        M[i - 1, j - 1] = number(tokens[2], lineno)
    if count != nnz:
        raise MatrixMarketError(f"expected {nnz} entries, found {count}", len(lines), path)
    return M


def read_matrix(path):
    with open(path) as fh:
        return parse_matrix_market(fh.read(), path=str(path))


def read_vector(path):
    """Read a single-row or single-column matrix as a 1-D array."""
    M = read_matrix(path)
    if 1 not in M.shape and M.size:
        raise MatrixMarketError(f"expected a vector, got shape {M.shape}", None, str(path))
    return M.ravel()


def format_matrix_market(M, coordinate=False, comment=None):
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    rows, cols = M.shape
    out = [f"%%MatrixMarket matrix {'coordinate' if coordinate else 'array'} real general"]
    if comment:
        out.extend(f"% {line}" for line in comment.splitlines())
    if coordinate:
        nz = [(i, j) for j in range(cols) for i in range(rows) if M[i, j] != 0.0]
        out.append(f"{rows} {cols} {len(nz)}")
        out.extend(f"{i + 1} {j + 1} {M[i, j]:.17g}" for i, j in nz)
    else:
        out.append(f"{rows} {cols}")
        out.extend(f"{v:.17g}" for v in M.ravel(order="F"))
    return "\n".join(out) + "\n"


def write_matrix(path, M, coordinate=False, comment=None):
    """Write ``M`` (vectors become single columns)."""
    with open(path, "w") as fh:
        fh.write(format_matrix_market(M, coordinate=coordinate, comment=comment))
