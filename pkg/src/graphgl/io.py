"""Readers and writers for graphs, grid functions, configs and reports.

Formats
-------
Edge list::

    graph m=<int>
    <i> <j> <w>        # 1-based, w > 0, each undirected edge once

PGM: ``P2`` (ASCII) or ``P5`` (binary); pixel ``p`` maps to ``p / maxval``.
Row ``i`` of the image is grid index ``i`` (the first array axis).

Grid CSV: a header ``# N=<int>`` then ``N`` comma-separated rows.
Floats are written with 17 significant digits so they round-trip exactly.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .graph import WeightedGraph
from .grid import as_grid

__all__ = [
    "FormatError",
    "fmt",
    "read_graph",
    "write_graph",
    "format_graph",
    "parse_graph",
    "read_vertex_csv",
    "write_vertex_csv",
    "read_grid_csv",
    "write_grid_csv",
    "read_pgm",
    "write_pgm",
    "read_grid",
    "parse_config",
    "read_config",
    "write_report_csv",
]


class FormatError(ValueError):
    """Malformed input file."""


def fmt(x):
    """17 significant digits: enough to round-trip any double."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


_HEADER = re.compile(r"^graph\s+m=(\d+)\s*$")


def parse_graph(text):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty graph file")
    head = _HEADER.match(lines[0])
    if not head:
        raise FormatError(f"bad header {lines[0]!r}; expected 'graph m=<int>'")
    m = int(head.group(1))
    if m < 1:
        raise FormatError("graph must have at least one vertex")
    seen = set()
    edges = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected 'i j w', got {ln!r}")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        if not (1 <= i <= m and 1 <= j <= m):
            raise FormatError(f"line {lineno}: vertex index out of range 1..{m}")
        if i == j:
            raise FormatError(f"line {lineno}: self-loop")
        if not (w > 0 and np.isfinite(w)):
            raise FormatError(f"line {lineno}: weight must be positive and finite")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise FormatError(f"line {lineno}: duplicate or reversed edge {i} {j}")
        seen.add(key)
        edges.append((i - 1, j - 1, w))
    return WeightedGraph.from_edges(m, edges)


def format_graph(g):
    out = [f"graph m={g.m}"]
    out += [f"{i + 1} {j + 1} {fmt(w)}" for i, j, w in g.edges()]
    return "\n".join(out) + "\n"


def read_graph(path):
    return parse_graph(Path(path).read_text())


def write_graph(path, g):
    Path(path).write_text(format_graph(g))


def read_vertex_csv(path):
    text = Path(path).read_text().replace("\n", ",")
    vals = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return np.array([float(v) for v in vals])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_vertex_csv(path, u):
    Path(path).write_text("\n".join(fmt(v) for v in np.asarray(u, dtype=float)) + "\n")


def read_grid_csv(path):
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty file")
    head = re.match(r"^#\s*N=(\d+)\s*$", lines[0])
    if not head:
        raise FormatError(f"{path}: expected header '# N=<int>'")
    N = int(head.group(1))
    rows = lines[1:]
    if len(rows) != N:
        raise FormatError(f"{path}: header says N={N} but found {len(rows)} rows")
    try:
        u = np.array([[float(v) for v in row.split(",")] for row in rows])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if u.shape != (N, N):
        raise FormatError(f"{path}: expected {N}x{N} values, got {u.shape}")
    return u


def write_grid_csv(path, u):
    u = as_grid(u)
    lines = [f"# N={u.shape[0]}"] + [",".join(fmt(v) for v in row) for row in u]
    Path(path).write_text("\n".join(lines) + "\n")


def _pgm_tokens(data, count, pos):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(path, return_maxval=False):
    """Read a square PGM as a grid function with values ``pixel / maxval``."""
    data = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _pgm_tokens(data, 4, 0)
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise FormatError(f"{path}: bad PGM header") from None
    if not 0 < maxval < 65536:
        raise FormatError(f"{path}: maxval {maxval} out of range")
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[pos:pos + w * h * dtype.itemsize]
        if len(raw) != w * h * dtype.itemsize:
            raise FormatError(f"{path}: truncated P5 raster")
        pix = np.frombuffer(raw, dtype=dtype).astype(np.int64)
    elif magic == b"P2":
        vals = data[pos:].split()
        if len(vals) != w * h:
            raise FormatError(f"{path}: expected {w * h} P2 values, found {len(vals)}")
        pix = np.array([int(v) for v in vals], dtype=np.int64)
    else:
        raise FormatError(f"{path}: unsupported PGM magic {magic!r}")
    if w != h:
        raise FormatError(f"{path}: grid functions must be square, got {w}x{h}")
    if np.any(pix > maxval):
        raise FormatError(f"{path}: pixel above maxval")
    u = pix.reshape(h, w) / maxval
    return (u, maxval) if return_maxval else u


def write_pgm(path, u, maxval=255, binary=True):
    """Write ``u`` clamped to [0, 1] and scaled by ``maxval``."""
    u = as_grid(u)
    N = u.shape[0]
    pix = np.rint(np.clip(u, 0.0, 1.0) * maxval).astype(np.int64)
    header = f"{'P5' if binary else 'P2'}\n{N} {N}\n{maxval}\n".encode()
    if binary:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        body = pix.astype(dtype).tobytes()
    else:
        body = ("\n".join(" ".join(str(p) for p in row) for row in pix) + "\n").encode()
    Path(path).write_bytes(header + body)


def read_grid(path):
    """Grid function from ``.pgm`` or ``.csv`` by extension."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pgm":
        return read_pgm(path)
    if suffix == ".csv":
        return read_grid_csv(path)
    raise FormatError(f"{path}: unknown grid format {suffix!r} (use .pgm or .csv)")


def parse_config(text, allowed=None):
    """``key = value`` lines; ``#`` starts a comment.  Values stay strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise FormatError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in ln.split("=", 1))
        if allowed is not None and key not in allowed:
            raise FormatError(f"config line {lineno}: unknown key {key!r}")
        if key in out:
            raise FormatError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_config(path, allowed=None):
    return parse_config(Path(path).read_text(), allowed)


def write_report_csv(path, columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
