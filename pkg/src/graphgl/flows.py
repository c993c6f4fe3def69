"""Explicit-Euler gradient flows for the grid and graph Ginzburg-Landau energies.

On the grid the flow is the discrete Allen-Cahn equation with either a
fidelity term ``lam * |u - f|^2`` or a mass constraint enforced through the
Lagrange multiplier ``kappa``.  On a general graph it is the vertex-space
gradient of ``f_eps + lam * |u - f|^2``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .functionals import f_eps, f_eps_fidelity, k_energy, k_fidelity_energy
from .graph import WeightedGraph, laplacian
from .grid import as_grid
from .potentials import standard_well

__all__ = [
    "FlowConfig",
    "FlowTrace",
    "FlowDivergence",
    "CONSTRAINTS",
    "random_initial",
    "grad_k_fidelity",
    "grad_k_mass",
    "lagrange_kappa",
    "grad_f_graph",
    "stability_bound",
    "step_euler",
    "run_flow",
]

CONSTRAINTS = ("fidelity", "mass", "none")


class FlowDivergence(FloatingPointError):
    """Raised when an Euler step produces non-finite values."""

    def __init__(self, step):
        super().__init__(f"non-finite state after step {step}")
        self.step = step


@dataclass(frozen=True)
class FlowConfig:
    eps: float
    dt: float
    steps: int
    lam: float = 0.0
    r: float = 0.0
    constraint: str = "fidelity"
    seed: int = 0
    snapshot_every: int = 0
    record_every: int = 1
    chi: float = 0.5

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.lam < 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        if not 0 <= self.r <= 1:
            raise ValueError(f"r must lie in [0, 1], got {self.r}")
        if self.constraint not in CONSTRAINTS:
            raise ValueError(f"constraint must be one of {CONSTRAINTS}, got {self.constraint!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        if self.snapshot_every < 0 or self.record_every < 1:
            raise ValueError("snapshot_every must be >= 0 and record_every >= 1")

    @property
    def effective_lam(self):
        return self.lam if self.constraint == "fidelity" else 0.0


@dataclass
class FlowTrace:
    """Recorded history of a flow run.

    ``records`` rows are ``(step, time, energy, mass, max_update)``; step 0 is
    the initial state with ``max_update = 0``.
    """

    records: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final: Optional[np.ndarray] = None

    @property
    def energies(self):
        return np.array([rec[2] for rec in self.records])

    @property
    def masses(self):
        return np.array([rec[3] for rec in self.records])


def random_initial(shape, seed):
    """I.i.d. uniform values on [0, 1] from a seeded generator."""
    return np.random.default_rng(seed).uniform(0.0, 1.0, size=shape)


def _well(well):
    return standard_well() if well is None else well


def _neighbour_sum(u):
    return (4 * u - np.roll(u, 1, 0) - np.roll(u, -1, 0)
            - np.roll(u, 1, 1) - np.roll(u, -1, 1))


def grad_k_fidelity(u, f, cfg, well=None):
    """Time derivative ``du/dt`` of the fidelity flow.

    ``-4^-r [2 eps sum_nbr (u - u_nbr) + eps^-1 N^-2 W'(u) + 2 lam (u - f)]``.
    """
    u = as_grid(u)
    N = u.shape[0]
    w = _well(well)
    bracket = 2 * cfg.eps * _neighbour_sum(u) + w.dW(u) / (cfg.eps * N * N)
    lam = cfg.effective_lam
    if lam:
        f = as_grid(f)
        if f.shape != u.shape:
            raise ValueError(f"f has shape {f.shape}, u has shape {u.shape}")
        bracket = bracket + 2 * lam * (u - f)
    return -(4.0 ** -cfg.r) * bracket


def lagrange_kappa(u, eps, well=None):
    """``kappa = eps^-1 N^-4 sum W'(u)``, the mean of the potential force."""
    u = as_grid(u)
    N = u.shape[0]
    return float(np.sum(_well(well).dW(u))) / (eps * N ** 4)


def grad_k_mass(u, cfg, well=None):
    """Mass-conserving flow: the potential force minus its mean ``kappa``."""
    u = as_grid(u)
    N = u.shape[0]
    w = _well(well)
    kappa = lagrange_kappa(u, cfg.eps, w)
    bracket = 2 * cfg.eps * _neighbour_sum(u) + w.dW(u) / (cfg.eps * N * N) - kappa
    return -(4.0 ** -cfg.r) * bracket


def grad_f_graph(g, u, f, eps, chi=0.5, lam=0.0, r=0.0, well=None):
    """``du/dt`` for ``f_eps + lam |u - f|^2`` in the ``d^r``-weighted vertex metric.

    Isolated vertices (``d_i = 0``) use unit metric weight.
    """
    u = np.asarray(u, dtype=float)
    w = _well(well)
    lap = laplacian(g, u, 0.0)
    bracket = 4 * chi * lap + w.dW(u) / eps
    if lam:
        bracket = bracket + 2 * lam * (u - np.asarray(f, dtype=float))
    metric = np.ones(g.m)
    if r:
        nz = g.degrees > 0
        metric[nz] = g.degrees[nz] ** (-r)
    return -metric * bracket


def stability_bound(cfg, N, well=None):
    """Advisory linearised step bound for the grid flow."""
    w = _well(well)
    scale = 4.0 ** -cfg.r
    d2 = w.d2W_bound if w.d2W_bound is not None else 11.0
    return min(1.0 / (16 * cfg.eps * scale), cfg.eps * N * N / (scale * d2))


def _grid_rate(u, f, cfg, well):
    if cfg.constraint == "mass":
        return grad_k_mass(u, cfg, well)
    return grad_k_fidelity(u, f, cfg, well)


def step_euler(u, f, cfg, graph=None, well=None, step_index=0):
    """One explicit Euler step of the grid flow, or of the graph flow if ``graph`` is given.

    On a graph the mass constraint shifts the state by a constant after the
    step so its mean is unchanged.
    """
    u = np.asarray(u, dtype=float)
    if graph is None:
        nxt = u + cfg.dt * _grid_rate(u, f, cfg, well)
    else:
        rate = grad_f_graph(graph, u, f, cfg.eps, cfg.chi, cfg.effective_lam, cfg.r, well)
        nxt = u + cfg.dt * rate
        if cfg.constraint == "mass":
            nxt = nxt + (np.mean(u) - np.mean(nxt))
    if not np.all(np.isfinite(nxt)):
        raise FlowDivergence(step_index)
    return nxt


def _energy(u, f, cfg, graph, well):
    lam = cfg.effective_lam
    if graph is None:
        if lam:
            return k_fidelity_energy(u, f, cfg.eps, lam, well)
        return k_energy(u, cfg.eps, well)
    if lam:
        return f_eps_fidelity(graph, u, f, cfg.eps, cfg.chi, lam, well)
    return f_eps(graph, u, cfg.eps, cfg.chi, well)


def run_flow(u0, f, cfg, graph: Optional[WeightedGraph] = None, well=None):
    """Iterate :func:`step_euler` and record energy, mass and snapshots.

    If ``u0`` is None a seeded uniform random start is drawn with the shape
    of ``f`` (grid) or ``(graph.m,)``.
    """
    if u0 is None:
        shape = (graph.m,) if graph is not None else as_grid(f).shape
        u0 = random_initial(shape, cfg.seed)
    u = np.array(u0, dtype=float)
    if cfg.constraint == "fidelity" and f is None:
        raise ValueError("fidelity flow needs data f")
    if graph is None:
        as_grid(u)
        bound = stability_bound(cfg, u.shape[0], well)
        if cfg.dt > bound:
            warnings.warn(f"dt={cfg.dt} exceeds the advisory stability bound {bound:.3g}",
                          RuntimeWarning, stacklevel=2)
    with np.errstate(over="ignore", invalid="ignore"):
        trace = FlowTrace()
        trace.records.append((0, 0.0, _energy(u, f, cfg, graph, well), float(np.mean(u)), 0.0))
        if cfg.snapshot_every:
            trace.snapshots.append((0, u.copy()))
        for n in range(1, cfg.steps + 1):
            nxt = step_euler(u, f, cfg, graph, well, step_index=n)
            change = float(np.max(np.abs(nxt - u)))
            u = nxt
            if n % cfg.record_every == 0 or n == cfg.steps:
                trace.records.append((n, n * cfg.dt, _energy(u, f, cfg, graph, well),
                                      float(np.mean(u)), change))
            if cfg.snapshot_every and n % cfg.snapshot_every == 0:
                trace.snapshots.append((n, u.copy()))
    trace.final = u
    return trace
