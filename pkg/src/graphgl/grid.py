"""Periodic N x N grids on the unit flat torus.

A grid function is an ``(N, N)`` float array ``u`` with ``u[i, j]`` the value
at node ``(i/N, j/N)``.  It doubles as the piecewise-constant function equal
to ``u[i, j]`` on the half-open cell ``[i/N, (i+1)/N) x [j/N, (j+1)/N)``.
Index arithmetic always wraps mod ``N``.
"""
from __future__ import annotations

import math

import numpy as np

from .graph import WeightedGraph

__all__ = [
    "LCM_CAP",
    "as_grid",
    "sample",
    "mass",
    "lp_norm",
    "lp_distance",
    "diff_quotient",
    "bilinear_interpolate",
    "indicator_square",
    "indicator_band",
    "checkerboard",
    "grid_graph",
]

#: Largest common refinement ``lcm(N1, N2)`` that :func:`lp_distance` accepts.
LCM_CAP = 10_000


def as_grid(u):
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] == 0:
        raise ValueError(f"grid function must be a nonempty square array, got shape {u.shape}")
    return u


def sample(f, N):
    """Evaluate ``f(x, y)`` at the nodes ``(i/N, j/N)``.

    ``f`` is called once on broadcast coordinate arrays; a scalar result is
    broadcast to the full grid.
    """
    t = np.arange(N) / N
    x, y = np.meshgrid(t, t, indexing="ij")
    return np.array(np.broadcast_to(f(x, y), (N, N)), dtype=float)


def mass(u):
    """Integral of the piecewise-constant representative over the torus."""
    return float(np.mean(as_grid(u)))


def lp_norm(u, p=2.0):
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    u = as_grid(u)
    if math.isinf(p):
        return float(np.max(np.abs(u)))
    return float(np.mean(np.abs(u) ** p) ** (1.0 / p))


def _overlaps(n1, n2):
    """Cells of the common refinement of two 1-d periodic partitions.

    Returns index arrays into each partition and the cell lengths.
    """
    lcm = n1 * n2 // math.gcd(n1, n2)
    cuts = np.union1d(np.arange(n1) * (lcm // n1), np.arange(n2) * (lcm // n2))
    lengths = np.diff(np.append(cuts, lcm)) / lcm
    return cuts // (lcm // n1), cuts // (lcm // n2), lengths


def lp_distance(u, v, p=1.0, lcm_cap=LCM_CAP):
    """L^p distance between piecewise-constant grid functions of any sizes.

    Exact up to rounding: the integral is taken over the common refinement
    of both grids, so no quadrature error enters.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    u, v = as_grid(u), as_grid(v)
    n1, n2 = u.shape[0], v.shape[0]
    lcm = n1 * n2 // math.gcd(n1, n2)
    if lcm > lcm_cap:
        raise ValueError(
            f"common refinement lcm({n1}, {n2}) = {lcm} exceeds the cap {lcm_cap}; "
            "compare grids whose sizes share more factors or raise lcm_cap"
        )
    a, b, length = _overlaps(n1, n2)
    diff = np.abs(u[np.ix_(a, a)] - v[np.ix_(b, b)])
    area = length[:, None] * length[None, :]
    if math.isinf(p):
        return float(np.max(diff))
    return float(np.sum(area * diff ** p) ** (1.0 / p))


def diff_quotient(u, k):
    """Scaled forward difference ``N (u(z + e_k/N) - u(z))``, ``k`` in {1, 2}."""
    u = as_grid(u)
    if k not in (1, 2):
        raise ValueError(f"direction must be 1 or 2, got {k!r}")
    N = u.shape[0]
    return N * (np.roll(u, -1, axis=k - 1) - u)


def bilinear_interpolate(u, x, y):
    """Bilinear interpolant of the nodal values at torus points ``(x, y)``.

    Accepts scalars or broadcastable arrays.
    """
    u = as_grid(u)
    N = u.shape[0]
    x = np.mod(np.asarray(x, dtype=float), 1.0)
    y = np.mod(np.asarray(y, dtype=float), 1.0)
    i = np.floor(x * N).astype(int) % N
    j = np.floor(y * N).astype(int) % N
    # local coordinates in [0, 1) within the containing cell
    s = x * N - i
    t = y * N - j
    i1, j1 = (i + 1) % N, (j + 1) % N
    val = (u[i, j] * (1 - s) * (1 - t) + u[i1, j] * s * (1 - t)
           + u[i, j1] * (1 - s) * t + u[i1, j1] * s * t)
    return float(val) if np.ndim(val) == 0 else val


def indicator_square(N, i0, j0, K):
    """Indicator of the ``K x K`` block of cells starting at ``(i0, j0)`` (wrapping)."""
    if not 0 <= K <= N:
        raise ValueError(f"square side K={K} out of range [0, {N}]")
    u = np.zeros((N, N))
    idx_i = (i0 + np.arange(K)) % N
    idx_j = (j0 + np.arange(K)) % N
    u[np.ix_(idx_i, idx_j)] = 1.0
    return u


def indicator_band(N, i0, K):
    """Indicator of ``K`` full rows ``i0, ..., i0+K-1`` (wrapping): a vertical band."""
    if not 0 <= K <= N:
        raise ValueError(f"band width K={K} out of range [0, {N}]")
    u = np.zeros((N, N))
    u[(i0 + np.arange(K)) % N, :] = 1.0
    return u


def checkerboard(N):
    if N % 2:
        raise ValueError(f"checkerboard needs even N to alternate on the torus, got {N}")
    i, j = np.indices((N, N))
    return ((i + j) % 2).astype(float)


def grid_graph(N, weight=1.0):
    """The 4-regular periodic grid as a :class:`WeightedGraph` (vertex ``i*N + j``).

    ``N`` must be at least 3 so that the four neighbours are distinct.
    """
    if N < 3:
        raise ValueError("grid_graph needs N >= 3")
    w = np.zeros((N * N, N * N))
    idx = np.arange(N * N).reshape(N, N)
    for axis in (0, 1):
        nb = np.roll(idx, -1, axis=axis)
        w[idx.ravel(), nb.ravel()] = weight
        w[nb.ravel(), idx.ravel()] = weight
    return WeightedGraph(w)
