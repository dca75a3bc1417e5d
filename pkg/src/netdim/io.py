"""File formats.

* Weighted / dissimilarity matrices: MatrixMarket ``coordinate`` files
  (1-based, ``symmetric`` or ``general``) or dense CSV whose first line is
  ``n=<N>``.  In a sparse file an absent entry is weight 0, or
  dissimilarity ``inf``.
* Unweighted graphs: whitespace-separated ``i j`` edge list, 0-based,
  ``#`` comments.  :func:`save_edges` writes an ``# n=<N>`` comment so
  isolated nodes survive a round trip.
* Point clouds: CSV, one point per row; an optional non-numeric header line
  (as written by ``netdim embed``) is skipped.

Floats are written with 17 significant digits, which round-trips IEEE doubles.
"""

from __future__ import annotations

import io as _io
import math
import os
import re

import numpy as np
import scipy.sparse as sp

from .errors import ParseError, ValidationError
from .graph import DissimilarityMatrix, PointCloud, UnweightedGraph, WeightedGraph

__all__ = [
    "fmt",
    "load_points",
    "save_points",
    "load_edges",
    "save_edges",
    "load_weighted",
    "save_weighted",
    "load_dissimilarity",
    "save_dissimilarity",
    "matrix_format",
    "write_csv",
    "write_keyvalue",
    "read_keyvalue",
]

_N_COMMENT = re.compile(r"#\s*n\s*=\s*(\d+)\s*$")


def fmt(x) -> str:
    """17-significant-digit text for a float (``inf``/``nan`` spelt out)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _parse_float(tok, line, path):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", line, path) from None


def _parse_int(tok, line, path):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"not an integer: {tok!r}", line, path) from None


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _write(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


# -- point clouds ---------------------------------------------------------------


def load_points(path) -> PointCloud:
    """Read a point CSV; a first line with no numeric field is taken as a header."""
    rows = []
    width = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if lineno == 1 and not any(_is_number(t) for t in line.split(",")):
                continue
            vals = [_parse_float(t, lineno, path) for t in line.split(",")]
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(f"expected {width} columns, got {len(vals)}", lineno, path)
            rows.append(vals)
    if not rows:
        raise ParseError("no points in file", None, path)
    return PointCloud(np.array(rows))


def save_points(path, p: PointCloud) -> None:
    _write(path, "".join(",".join(fmt(v) for v in row) + "\n" for row in p.points))


# -- edge lists ------------------------------------------------------------------


def load_edges(path, n: int | None = None) -> UnweightedGraph:
    """Read an edge list; ``n`` defaults to an ``# n=`` comment or max index + 1."""
    pairs = []
    declared = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if line.startswith("#"):
                m = _N_COMMENT.match(line)
                if m:
                    declared = int(m.group(1))
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if len(toks) != 2:
                raise ParseError(f"expected 'i j', got {line!r}", lineno, path)
            i, j = (_parse_int(t, lineno, path) for t in toks)
            if i < 0 or j < 0:
                raise ParseError(f"negative node index in {line!r}", lineno, path)
            if i == j:
                raise ParseError(f"self-loop at node {i}", lineno, path)
            pairs.append((i, j))
    top = max((max(p) for p in pairs), default=-1) + 1
    if n is None:
        n = declared if declared is not None else top
    if n < top:
        raise ValidationError(f"edge list references node {top - 1} but n={n}")
    if n < 1:
        raise ParseError("empty edge list and no '# n=' declaration", None, path)
    return UnweightedGraph.from_pairs(n, pairs)


def save_edges(path, g: UnweightedGraph) -> None:
    buf = _io.StringIO()
    buf.write(f"# n={g.n}\n")
    for i, j in g.edges:
        buf.write(f"{i} {j}\n")
    _write(path, buf.getvalue())


# -- matrices ---------------------------------------------------------------------


def matrix_format(path) -> str:
    """``"mtx"`` for MatrixMarket, ``"csv"`` for an ``n=`` dense CSV."""
    with open(path) as fh:
        first = fh.readline().strip()
    if first.lower().startswith("%%matrixmarket"):
        return "mtx"
    if first.replace(" ", "").lower().startswith("n="):
        return "csv"
    raise ParseError("neither a MatrixMarket header nor an 'n=<N>' CSV header", 1, path)


def _read_mtx(path):
    """Return ``(n, rows, cols, vals)`` with 0-based indices, both triangles present."""
    with open(path) as fh:
        lines = fh.readlines()
    if not lines:
        raise ParseError("empty file", None, path)
    header = lines[0].split()
    if len(header) < 5 or header[0].lower() != "%%matrixmarket":
        raise ParseError("missing '%%MatrixMarket' banner", 1, path)
    obj, layout, field, symmetry = (h.lower() for h in header[1:5])
    if obj != "matrix" or layout != "coordinate":
        raise ParseError(f"only 'matrix coordinate' files are supported, got {obj} {layout}", 1, path)
    if field not in ("real", "integer", "double", "pattern"):
        raise ParseError(f"unsupported field {field!r}", 1, path)
    if symmetry not in ("symmetric", "general"):
        raise ParseError(f"unsupported symmetry {symmetry!r}", 1, path)

    size = None
    entries = {}
    for lineno, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        toks = line.split()
        if size is None:
            if len(toks) != 3:
                raise ParseError(f"expected 'rows cols nnz', got {line!r}", lineno, path)
            nr, nc, nnz = (_parse_int(t, lineno, path) for t in toks)
            if nr != nc:
                raise ValidationError(f"matrix must be square, got {nr} x {nc}")
            size = (nr, nnz)
            continue
        want = 2 if field == "pattern" else 3
        if len(toks) != want:
            raise ParseError(f"expected {want} fields, got {len(toks)}", lineno, path)
        i = _parse_int(toks[0], lineno, path) - 1
        j = _parse_int(toks[1], lineno, path) - 1
        if not (0 <= i < size[0] and 0 <= j < size[0]):
            raise ParseError(f"index ({i + 1}, {j + 1}) out of range 1..{size[0]}", lineno, path)
        v = 1.0 if field == "pattern" else _parse_float(toks[2], lineno, path)
        if (i, j) in entries and entries[(i, j)] != v:
            raise ParseError(f"conflicting duplicate entry ({i + 1}, {j + 1})", lineno, path)
        entries[(i, j)] = v
    if size is None:
        raise ParseError("missing size line", None, path)
    n = size[0]
    for (i, j), v in list(entries.items()):
        if i == j:
            continue
        w = entries.get((j, i))
        if w is None and symmetry == "symmetric":
            entries[(j, i)] = v
        elif w != v:
            raise ValidationError(
                f"matrix is not symmetric: entry ({i}, {j}) = {v!r} but ({j}, {i}) = "
                f"{'absent' if w is None else repr(w)}"
            )
    keys = sorted(entries)
    rows = np.array([k[0] for k in keys], dtype=np.int64)
    cols = np.array([k[1] for k in keys], dtype=np.int64)
    vals = np.array([entries[k] for k in keys], dtype=float)
    return n, rows, cols, vals


def _read_dense_csv(path):
    with open(path) as fh:
        lines = fh.readlines()
    head = lines[0].replace(" ", "").strip().lower() if lines else ""
    if not head.startswith("n="):
        raise ParseError("first line must be 'n=<N>'", 1, path)
    n = _parse_int(head[2:], 1, path)
    rows = []
    for lineno, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if not line:
            continue
        vals = [_parse_float(t, lineno, path) for t in line.split(",")]
        if len(vals) != n:
            raise ParseError(f"expected {n} columns, got {len(vals)}", lineno, path)
        rows.append(vals)
    if len(rows) != n:
        raise ParseError(f"expected {n} rows, got {len(rows)}", None, path)
    return np.array(rows).reshape(n, n)


def _write_dense_csv(path, A):
    buf = _io.StringIO()
    buf.write(f"n={A.shape[0]}\n")
    for row in A:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    _write(path, buf.getvalue())


def _write_mtx(path, n, rows, cols, vals):
    buf = _io.StringIO()
    buf.write("%%MatrixMarket matrix coordinate real symmetric\n")
    buf.write(f"{n} {n} {len(vals)}\n")
    for i, j, v in zip(rows, cols, vals):
        buf.write(f"{i + 1} {j + 1} {fmt(v)}\n")
    _write(path, buf.getvalue())


def _lower(A):
    i, j = np.tril_indices(A.shape[0], k=-1)
    return i, j, A[i, j]


def load_weighted(path) -> WeightedGraph:
    if matrix_format(path) == "csv":
        return WeightedGraph(_read_dense_csv(path))
    n, r, c, v = _read_mtx(path)
    return WeightedGraph(sp.csr_matrix((v, (r, c)), shape=(n, n)))


def save_weighted(path, w: WeightedGraph, format: str | None = None) -> None:
    format = format or _format_from_suffix(path)
    if format == "csv":
        _write_dense_csv(path, w.dense())
        return
    lower = sp.tril(sp.csr_matrix(w.weights), k=-1).tocoo()
    order = np.lexsort((lower.col, lower.row))
    _write_mtx(path, w.n, lower.row[order], lower.col[order], lower.data[order])


def load_dissimilarity(path) -> DissimilarityMatrix:
    if matrix_format(path) == "csv":
        return DissimilarityMatrix(_read_dense_csv(path))
    n, r, c, v = _read_mtx(path)
    M = np.full((n, n), np.inf)
    M[r, c] = v
    np.fill_diagonal(M, 0.0)
    return DissimilarityMatrix(M)


def save_dissimilarity(path, m: DissimilarityMatrix, format: str | None = None) -> None:
    format = format or _format_from_suffix(path)
    if format == "csv":
        _write_dense_csv(path, m.values)
        return
    i, j, v = _lower(m.values)
    keep = np.isfinite(v)
    _write_mtx(path, m.n, i[keep], j[keep], v[keep])


def _format_from_suffix(path):
    return "mtx" if os.fspath(path).lower().endswith(".mtx") else "csv"


# -- tabular outputs --------------------------------------------------------------


def write_csv(path, header, rows) -> None:
    """Write a header line and rows; floats use :func:`fmt`, ints stay integral."""
    buf = _io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    _write(path, buf.getvalue())


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return "" if v is None else str(v)


def write_keyvalue(path, mapping) -> None:
    """Flat ``key=value`` text, one per line, keys sorted.  ``path`` may be a text stream."""
    text = "".join(f"{k}={_cell(mapping[k])}\n" for k in sorted(mapping))
    if hasattr(path, "write"):
        path.write(text)
    else:
        _write(path, text)


def read_keyvalue(path) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if "=" not in line:
                raise ParseError(f"expected key=value, got {line!r}", lineno, path)
            k, v = line.split("=", 1)
            out[k] = v
    return out
