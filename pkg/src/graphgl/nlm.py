"""Nonlocal-means patch weights on the periodic grid and their continuum limits.

The weight between nodes ``(i, j)`` and ``(k, l)`` is
``exp(-d2 / sigma**2)`` where ``d2`` sums squared differences of the
``(2L+1)**2`` patch values ``phi[(i-r) % N, (j-s) % N]``, ``r, s = -L..L``.
Weights are never stored as an ``N**2 x N**2`` matrix; energies stream over
the first node.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import is_binary
from .grid import as_grid, sample

__all__ = [
    "PatchWeightSpec",
    "patch_distance_sq",
    "weight",
    "row_weights",
    "g_energy",
    "limit_weight_L",
    "limit_weight_ell",
    "g_inf",
    "weight_sup_error",
]

#: Patch tensors larger than this many floats are not precomputed.
PATCH_BUDGET = 50_000_000


@dataclass(frozen=True, eq=False)
class PatchWeightSpec:
    """Sampled image ``phi`` (an ``N x N`` grid), patch half-width ``L`` and scale ``sigma``."""

    phi: np.ndarray
    L: int
    sigma: float
    patch_budget: int = PATCH_BUDGET
    _patches: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        phi = as_grid(self.phi).copy()
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        if self.L < 0 or int(self.L) != self.L:
            raise ValueError(f"L must be a nonnegative integer, got {self.L}")
        if not 2 * self.L < self.N:
            raise ValueError(f"need L < N/2, got L={self.L}, N={self.N}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.N * self.N * (2 * self.L + 1) ** 2 <= self.patch_budget:
            object.__setattr__(self, "_patches", self._build_patches())

    @classmethod
    def from_field(cls, f, N, L, sigma, **kw):
        return cls(sample(f, N), L, sigma, **kw)

    @classmethod
    def from_scaling(cls, f, N, ell, c, **kw):
        """``sigma = N / c`` and ``L = round(ell * N)``."""
        return cls(sample(f, N), int(round(ell * N)), N / c, **kw)

    @property
    def N(self):
        return self.phi.shape[0]

    def _offsets(self):
        r = np.arange(-self.L, self.L + 1)
        return np.repeat(r, r.size), np.tile(r, r.size)

    def _build_patches(self):
        # patches[i, j, t] = phi[(i - r_t) % N, (j - s_t) % N]
        rs, ss = self._offsets()
        return np.stack([np.roll(self.phi, (r, s), axis=(0, 1)) for r, s in zip(rs, ss)], axis=-1)

    def patch(self, i, j):
        if self._patches is not None:
            return self._patches[i % self.N, j % self.N]
        rs, ss = self._offsets()
        return self.phi[(i - rs) % self.N, (j - ss) % self.N]

    def row_distance_sq(self, i, j):
        """``d2`` from node ``(i, j)`` to every node, as an ``N x N`` array."""
        if self._patches is not None:
            diff = self._patches - self._patches[i % self.N, j % self.N]
            return np.sum(diff * diff, axis=-1)
        p = self.patch(i, j)
        out = np.zeros((self.N, self.N))
        for t, (r, s) in enumerate(zip(*self._offsets())):
            out += (np.roll(self.phi, (r, s), axis=(0, 1)) - p[t]) ** 2
        return out


def patch_distance_sq(spec, i, j, k, l):
    diff = spec.patch(i, j) - spec.patch(k, l)
    return float(np.sum(diff * diff))


def weight(spec, i, j, k, l):
    return float(np.exp(-patch_distance_sq(spec, i, j, k, l) / spec.sigma ** 2))


def row_weights(spec, i, j):
    """Weights from node ``(i, j)`` to all nodes."""
    return np.exp(-spec.row_distance_sq(i, j) / spec.sigma ** 2)


def g_energy(u, spec):
    """``N^-4 sum_{ijkl} w_ijkl |u_ij - u_kl|`` for binary ``u``; ``inf`` otherwise.

    Rows are summed in row-major order of the first node, then reduced
    pairwise, so the value does not depend on how the loop is scheduled.
    """
    u = as_grid(u)
    N = u.shape[0]
    if N != spec.N:
        raise ValueError(f"u has N={N} but the weight spec has N={spec.N}")
    if not is_binary(u):
        return np.inf
    rows = np.empty(N * N)
    for i in range(N):
        for j in range(N):
            rows[i * N + j] = np.sum(row_weights(spec, i, j) * np.abs(u - u[i, j]))
    return float(np.sum(rows)) / N ** 4


def _points(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError("points must have a trailing axis of length 2")
    return x


def limit_weight_L(phi, x, y, L, sigma, factor=None):
    """Fixed-patch limit weight ``exp(-(factor/sigma^2) (phi(x) - phi(y))^2)``.

    ``factor`` defaults to ``4 L^2``.  The patch sum of :class:`PatchWeightSpec`
    has ``(2L+1)^2`` terms, each tending to ``(phi(x) - phi(y))^2``, so
    ``factor=(2L+1)**2`` is the value the sampled weights actually converge to.
    """
    x, y = _points(x), _points(y)
    if factor is None:
        factor = 4 * L * L
    d = phi(x[..., 0], x[..., 1]) - phi(y[..., 0], y[..., 1])
    out = np.exp(-(factor / sigma ** 2) * d * d)
    return float(out) if np.ndim(out) == 0 else out


def _region_nodes(ell, M, region):
    h = 2 * ell / M
    mid = -ell + h * (np.arange(M) + 0.5)
    a, b = np.meshgrid(mid, mid, indexing="ij")
    if region == "diamond":
        # |z1| + |z2| <= ell is the square |a|, |b| <= ell in a = z1 + z2, b = z1 - z2
        return (a + b).ravel() / 2, (a - b).ravel() / 2, h * h / 2
    if region == "square":
        return a.ravel(), b.ravel(), h * h
    raise ValueError(f"region must be 'diamond' or 'square', got {region!r}")


def _ell_integral(phi, x, y, ell, M, region, chunk=4096):
    z1, z2, wq = _region_nodes(ell, M, region)
    xf = x.reshape(-1, 2)
    yf = y.reshape(-1, 2)
    out = np.empty(xf.shape[0])
    step = max(1, chunk * 64 // z1.size)
    for s in range(0, xf.shape[0], step):
        xa, ya = xf[s:s + step], yf[s:s + step]
        d = (phi(xa[:, :1] + z1, xa[:, 1:] + z2) - phi(ya[:, :1] + z1, ya[:, 1:] + z2))
        out[s:s + step] = wq * np.sum(d * d, axis=1)
    return out.reshape(x.shape[:-1])


def limit_weight_ell(phi, x, y, ell, c, M=64, region="diamond", return_error=False):
    """Growing-patch limit weight ``exp(-c^2 int_S (phi(x+z) - phi(y+z))^2 dz)``.

    ``S`` is the diamond ``|z1| + |z2| <= ell`` (default) or the square
    ``max(|z1|, |z2|) <= ell``.  The integral uses the midpoint rule with
    ``M x M`` nodes on coordinates aligned with ``S``.  With
    ``return_error=True`` also returns the change against an ``M/2`` rule.
    """
    if not 0 < ell < 0.5:
        raise ValueError(f"ell must lie in (0, 1/2), got {ell}")
    if M < 32:
        raise ValueError(f"need at least 32 quadrature nodes per axis, got {M}")
    x, y = _points(x), _points(y)
    val = np.exp(-c * c * _ell_integral(phi, x, y, ell, M, region))
    if return_error:
        coarse = np.exp(-c * c * _ell_integral(phi, x, y, ell, M // 2, region))
        err = np.abs(val - coarse)
        if np.ndim(val) == 0:
            return float(val), float(err)
        return val, err
    return float(val) if np.ndim(val) == 0 else val


def g_inf(u, omega, Q=2):
    """``int int omega(x, y) |u(x) - u(y)| dx dy`` for piecewise-constant binary ``u``.

    Each cell is split into ``Q x Q`` midpoint subcells, so the only
    quadrature error is in the weight; ``|u(x) - u(y)|`` is exact per cell
    pair.  ``omega`` maps point arrays of shape ``(..., 2)`` to weights.
    """
    u = as_grid(u)
    if not is_binary(u):
        return np.inf
    N = u.shape[0]
    n = N * Q
    t = (np.arange(n) + 0.5) / n
    px, py = np.meshgrid(t, t, indexing="ij")
    pts = np.stack([px.ravel(), py.ravel()], axis=-1)
    vals = np.repeat(np.repeat(u, Q, axis=0), Q, axis=1).ravel()
    rows = np.empty(pts.shape[0])
    for a in range(pts.shape[0]):
        jump = np.abs(vals - vals[a])
        if not np.any(jump):
            rows[a] = 0.0
            continue
        w = omega(np.broadcast_to(pts[a], pts.shape), pts)
        rows[a] = np.sum(w * jump)
    return float(np.sum(rows)) / n ** 4


def _all_pairs(N):
    idx = np.arange(N * N)
    a, b = np.meshgrid(idx, idx, indexing="ij")
    return a.ravel(), b.ravel()


def weight_sup_error(phi, N, kind="L", L=1, sigma=1.0, ell=None, c=None,
                     limit="consistent", n_samples=100_000, seed=0, M=64):
    """Largest deviation of sampled weights from their continuum limit.

    ``phi`` is a smooth field ``phi(x, y)``.  ``kind='L'`` keeps ``L`` and
    ``sigma`` fixed; ``kind='ell'`` uses ``sigma = N / c`` and
    ``L = round(ell * N)``.  ``limit='consistent'`` compares against the
    limit the patch sum converges to (``(2L+1)^2`` prefactor, square patch
    region); ``limit='written'`` uses the ``4 L^2`` prefactor and the diamond.

    All node pairs are checked for ``N <= 16``; otherwise ``n_samples`` pairs
    drawn with a fixed seed.
    """
    if kind == "L":
        spec = PatchWeightSpec.from_field(phi, N, L, sigma)
    elif kind == "ell":
        if ell is None or c is None:
            raise ValueError("kind='ell' needs ell and c")
        spec = PatchWeightSpec.from_scaling(phi, N, ell, c)
    else:
        raise ValueError(f"kind must be 'L' or 'ell', got {kind!r}")
    if limit not in ("consistent", "written"):
        raise ValueError(f"limit must be 'consistent' or 'written', got {limit!r}")

    if N <= 16:
        a, b = _all_pairs(N)
    else:
        rng = np.random.default_rng(seed)
        a = rng.integers(0, N * N, size=n_samples)
        b = rng.integers(0, N * N, size=n_samples)
    ia, ja = np.divmod(a, N)
    ib, jb = np.divmod(b, N)

    P = spec._patches if spec._patches is not None else spec._build_patches()
    sampled = np.empty(a.size)
    chunk = 65536
    for s in range(0, a.size, chunk):
        d = P[ia[s:s + chunk], ja[s:s + chunk]] - P[ib[s:s + chunk], jb[s:s + chunk]]
        sampled[s:s + chunk] = np.exp(-np.sum(d * d, axis=-1) / spec.sigma ** 2)

    x = np.stack([ia / N, ja / N], axis=-1)
    y = np.stack([ib / N, jb / N], axis=-1)
    if kind == "L":
        factor = (2 * L + 1) ** 2 if limit == "consistent" else None
        ref = limit_weight_L(phi, x, y, L, sigma, factor=factor)
    else:
        region = "square" if limit == "consistent" else "diamond"
        ref = limit_weight_ell(phi, x, y, ell, c, M=M, region=region)
    return float(np.max(np.abs(sampled - ref)))
