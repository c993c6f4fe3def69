"""Refinement sweeps, minimizer checks and brute-force oracles.

Each experiment returns plain data (a :class:`SweepReport` or a small
record) so that the CLI and the test-suite consume the same numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .flows import FlowConfig, grad_f_graph
from .functionals import f_zero, h_zero, k_alpha, k_energy, continuum_gl_oracle
from .graph import WeightedGraph
from .grid import checkerboard, indicator_band, indicator_square, lp_distance, sample
from .nlm import PatchWeightSpec, g_energy
from .potentials import sigma_W, standard_well

__all__ = [
    "SweepReport",
    "sweep_k_pointwise",
    "alpha_counterexample",
    "ShapeRecord",
    "minimizer_shape_check",
    "realizable_square_masses",
    "logistic_band_profile",
    "recovery_profile_check",
    "brute_force_min_cut",
    "barbell_graph",
    "AnnealResult",
    "anneal_f_eps",
    "noncompactness_demo",
]

MAX_BRUTE_FORCE_VERTICES = 20


@dataclass
class SweepReport:
    """Tabular experiment output.

    ``columns`` names the entries of every row.  :meth:`fit` regresses
    ``log(y)`` on ``log(x)`` by ordinary least squares.
    """

    columns: tuple
    rows: list = field(default_factory=list)

    def column(self, name):
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows], dtype=float)

    def fit(self, x="N", y="error"):
        """Return ``(slope, residual)``; residual is the RMS log-space misfit."""
        if len(self.rows) < 3:
            raise ValueError("need at least 3 rows to fit a slope")
        lx = np.log(self.column(x))
        yv = self.column(y)
        if np.any(yv <= 0):
            raise ValueError(f"column {y!r} has nonpositive entries; no log-log fit")
        ly = np.log(yv)
        A = np.stack([lx, np.ones_like(lx)], axis=1)
        coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
        resid = float(np.sqrt(np.mean((A @ coef - ly) ** 2)))
        return float(coef[0]), resid


def sweep_k_pointwise(f, eps, Ns, grad=None, well=None, nq=None):
    """Error of ``k_energy`` on samples of a smooth ``f`` against the continuum oracle."""
    Ns = list(Ns)
    if len(Ns) < 3:
        raise ValueError("need at least 3 grid sizes")
    nq = nq if nq is not None else max(256, 4 * max(Ns))
    ref = continuum_gl_oracle(f, eps, well, nq=nq, grad=grad)
    report = SweepReport(("N", "eps", "value", "reference", "error"))
    for N in Ns:
        val = k_energy(sample(f, N), eps, well)
        report.rows.append((N, eps, val, ref, abs(val - ref)))
    return report


def alpha_counterexample(Ns, alpha, well=None):
    """``k_alpha`` of the half-band indicator against the exact value ``2 N^(1-alpha)``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    report = SweepReport(("N", "alpha", "value", "reference", "ratio"))
    for N in Ns:
        if N % 2:
            raise ValueError(f"half-band needs even N, got {N}")
        val = k_alpha(indicator_band(N, 0, N // 2), alpha, well)
        ref = 2.0 * N ** (1 - alpha)
        report.rows.append((N, alpha, val, ref, val / ref))
    return report


@dataclass(frozen=True)
class ShapeRecord:
    N: int
    M: Fraction
    K: int
    square_energy: float
    band_energy: float
    winner: str
    band_exact_mass: bool


def _as_fraction(M, N):
    frac = Fraction(M).limit_denominator(N * N)
    if abs(float(frac) - float(M)) > 1e-12:
        raise ValueError(f"mass {M} is not a multiple of 1/N^2 for N={N}")
    return frac


def minimizer_shape_check(N, M):
    """Compare the grid perimeter of a square and of a full-height band of mass ``M``.

    The square needs ``N^2 M = K^2``.  The band energy is 2 for every width
    strictly between 0 and N; when ``N M`` is not an integer the band is built
    at the nearest realisable width and ``band_exact_mass`` is False.
    """
    frac = _as_fraction(M, N)
    cells = frac * N * N
    K = math.isqrt(int(cells)) if cells.denominator == 1 else -1
    if K < 0 or K * K != cells or not 0 < K < N:
        raise ValueError(f"M={M} is not the mass of a square of grid cells with 0 < K < {N}")
    square = h_zero(indicator_square(N, 0, 0, K))
    width = frac * N
    exact = width.denominator == 1
    kb = min(max(int(round(float(width))), 1), N - 1)
    band = h_zero(indicator_band(N, 0, kb))
    if square < band:
        winner = "square"
    elif square > band:
        winner = "band"
    else:
        winner = "tie"
    return ShapeRecord(N, frac, K, square, band, winner, exact)


def realizable_square_masses(N):
    """Masses ``K^2 / N^2`` for ``K = 1, ..., N-1``."""
    return [Fraction(K * K, N * N) for K in range(1, N)]


def logistic_band_profile(N, eps):
    """Optimal standard-well profile across the band ``1/4 <= x < 3/4``.

    ``u = 1 / (1 + exp(-d / eps))`` with ``d`` the signed distance to the band
    edge (positive inside).
    """
    x = np.arange(N) / N
    d = 0.25 - np.abs(x - 0.5)
    prof = 0.5 * (1.0 + np.tanh(d / (2 * eps)))
    return np.repeat(prof[:, None], N, axis=1)


def recovery_profile_check(eps_list, Ns, well=None):
    """Energy of the sampled interface profile against ``k_inf_zero`` of the band."""
    w = standard_well() if well is None else well
    target = 2.0 * sigma_W(w)
    report = SweepReport(("N", "eps", "value", "reference", "gap"))
    for eps, N in zip(eps_list, Ns):
        if N * eps < 10:
            raise ValueError(f"N={N} does not resolve the interface at eps={eps}; need N >= 10/eps")
        val = k_energy(logistic_band_profile(N, eps), eps, w)
        report.rows.append((N, eps, val, target, abs(val - target) / target))
    return report


def barbell_graph(bridge=0.1):
    """Two unit-weight triangles {0,1,2}, {3,4,5} joined by edge (2, 3)."""
    edges = [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (3, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0),
             (2, 3, bridge)]
    return WeightedGraph.from_edges(6, edges)


def _mass_count(m, M):
    target = m * M
    count = round(target)
    if abs(target - count) > 1e-9 or not 0 <= count <= m:
        raise ValueError(f"mass M={M} is infeasible on {m} vertices")
    return count


def brute_force_min_cut(g, M=None, chi=0.5, chunk=1 << 15):
    """Exhaustive minimiser of ``f_zero`` over binary labelings.

    Optionally restricted to ``sum(u) = m M``.  Ties go to the
    lexicographically smallest labeling (vertex 0 most significant).
    Returns ``(labeling, energy)``.
    """
    m = g.m
    if m > MAX_BRUTE_FORCE_VERTICES:
        raise ValueError(f"m={m} is too large to enumerate (max {MAX_BRUTE_FORCE_VERTICES})")
    count = None if M is None else _mass_count(m, M)
    shifts = np.arange(m - 1, -1, -1)
    best_val, best_idx = math.inf, None
    total = 1 << m
    W = g.weights
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        U = ((idx[:, None] >> shifts) & 1).astype(float)
        cut = np.einsum("ki,ij,kj->k", 1 - U, W, U)
        vals = 2 * chi * cut
        if count is not None:
            vals[U.sum(axis=1) != count] = math.inf
        low = float(np.min(vals))
        if low == math.inf:
            continue
        tol = 1e-12 * max(1.0, abs(low))
        # first index within rounding of the chunk minimum
        k = int(np.flatnonzero(vals <= low + tol)[0])
        # strict improvement only, so earlier (lexicographically smaller) ties win
        if best_idx is None or low < best_val - tol:
            best_val, best_idx = float(vals[k]), int(idx[k])
    if best_idx is None:
        raise ValueError(f"no labeling satisfies the mass constraint M={M}")
    labeling = ((best_idx >> shifts) & 1).astype(float)
    return labeling, f_zero(g, labeling, chi)


@dataclass
class AnnealResult:
    labeling: np.ndarray
    energy: float
    oracle_labeling: np.ndarray
    oracle_energy: float
    relaxed: np.ndarray
    degenerate: bool
    match: bool


def _same_partition(a, b):
    return bool(np.array_equal(a, b) or np.array_equal(a, 1 - b))


def anneal_f_eps(g, eps_list, M, chi=0.5, steps=2000, seed=0, noise=0.1, well=None):
    """Mass-constrained gradient descent on ``f_eps`` over a decreasing ``eps`` schedule.

    The final state is thresholded at 1/2 (ties to 0) and compared with
    :func:`brute_force_min_cut`.  Partitions are compared as unordered
    pairs, since ``f_zero`` and a mass-1/2 constraint are invariant under
    ``u -> 1 - u``.  A relaxed state with any entry farther than 1/4 from
    {0, 1} is degenerate and never counts as a match.
    """
    w = standard_well() if well is None else well
    oracle, oracle_energy = brute_force_min_cut(g, M, chi)
    rng = np.random.default_rng(seed)
    u = M + noise * rng.uniform(-1.0, 1.0, size=g.m)
    u += M - np.mean(u)
    d_max = float(np.max(g.degrees)) if g.m else 0.0
    d2 = w.d2W_bound if w.d2W_bound is not None else 11.0
    for eps in eps_list:
        dt = 0.5 / (8 * chi * d_max + d2 / eps)
        cfg = FlowConfig(eps=eps, dt=dt, steps=steps, constraint="mass", chi=chi)
        for _ in range(steps):
            u = u + cfg.dt * grad_f_graph(g, u, None, eps, chi, 0.0, 0.0, w)
            u += M - np.mean(u)
        if not np.all(np.isfinite(u)):
            raise FloatingPointError(f"annealing diverged at eps={eps}")
    labeling = (u > 0.5).astype(float)
    energy = f_zero(g, labeling, chi)
    degenerate = bool(np.any(np.abs(u - np.round(u)) > 0.25))
    match = (not degenerate) and _same_partition(labeling, oracle)
    return AnnealResult(labeling, energy, oracle, oracle_energy, u, degenerate, match)


def noncompactness_demo(Ns):
    """Checkerboards have ``g = 1/2`` (unit weights) but stay ``1/2`` apart in ``L^1``."""
    report = SweepReport(("N", "g", "l1_to_4N", "l1_to_self"))
    for N in Ns:
        if N % 2:
            raise ValueError(f"checkerboard needs even N, got {N}")
        cb = checkerboard(N)
        spec = PatchWeightSpec(np.zeros((N, N)), 0, 1.0)
        report.rows.append((N, g_energy(cb, spec), lp_distance(cb, checkerboard(4 * N), 1),
                            lp_distance(cb, cb, 1)))
    return report
