"""Ginzburg-Landau type energies on graphs, on the periodic grid and on the torus.

Domain-restricted energies (those only finite on binary functions) return
``math.inf`` outside their domain instead of raising.
"""
from __future__ import annotations

import math

import numpy as np

from . import graph as gr
from .grid import as_grid, diff_quotient
from .potentials import sigma_W, standard_well

__all__ = [
    "INF",
    "f_eps",
    "f_eps_fidelity",
    "f_zero",
    "grid_jumps_sq",
    "h_energy",
    "h_zero",
    "h_alpha",
    "k_energy",
    "k_energy_integral",
    "k_fidelity_energy",
    "k_alpha",
    "continuum_gl_oracle",
    "k_inf_zero",
    "validate_alpha",
]

INF = math.inf


def _well(well):
    return standard_well() if well is None else well


def f_eps(g, u, eps, chi=0.5, well=None):
    """``chi * sum_ij w_ij (u_i - u_j)^2 + eps^-1 sum_i W(u_i)``."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    u = np.asarray(u, dtype=float)
    w = _well(well)
    diff = u[:, None] - u[None, :]
    return float(chi * np.sum(g.weights * diff ** 2) + np.sum(w.W(u)) / eps)


def f_eps_fidelity(g, u, f, eps, chi=0.5, lam=0.0, well=None):
    u = np.asarray(u, dtype=float)
    return f_eps(g, u, eps, chi, well) + lam * float(np.sum((u - np.asarray(f)) ** 2))


def f_zero(g, u, chi=0.5):
    """Sharp-interface limit ``chi * sum_ij w_ij |u_i - u_j|`` on binary ``u``.

    Equals ``2 * chi * graph_cut(u)``.
    """
    u = np.asarray(u, dtype=float)
    if not gr.is_binary(u):
        return INF
    return float(chi * np.sum(g.weights * np.abs(u[:, None] - u[None, :])))


def grid_jumps_sq(u):
    """``sum_ij (u_{i+1,j} - u_ij)^2 + (u_{i,j+1} - u_ij)^2`` with periodic wrap."""
    u = as_grid(u)
    dx = np.roll(u, -1, axis=0) - u
    dy = np.roll(u, -1, axis=1) - u
    return float(np.sum(dx * dx + dy * dy))


def _potential_sum(u, well):
    return float(np.sum(_well(well).W(u)))


def h_energy(u, eps, well=None):
    """Graph-scaled grid energy: ``N^-1 * jumps^2 + eps^-1 * sum W``."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    u = as_grid(u)
    N = u.shape[0]
    return grid_jumps_sq(u) / N + _potential_sum(u, well) / eps


def h_zero(u):
    """Anisotropic grid perimeter of a binary ``u``; ``inf`` otherwise."""
    u = as_grid(u)
    if not gr.is_binary(u):
        return INF
    N = u.shape[0]
    jumps = np.abs(np.roll(u, -1, axis=0) - u) + np.abs(np.roll(u, -1, axis=1) - u)
    return float(np.sum(jumps)) / N


def h_alpha(u, alpha, well=None):
    """:func:`h_energy` at ``eps = N**-alpha``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    u = as_grid(u)
    N = u.shape[0]
    return grid_jumps_sq(u) / N + N ** alpha * _potential_sum(u, well)


def k_energy(u, eps, well=None):
    """Finite-difference energy: ``eps * jumps^2 + eps^-1 N^-2 sum W``."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    u = as_grid(u)
    N = u.shape[0]
    return eps * grid_jumps_sq(u) + _potential_sum(u, well) / (eps * N * N)


def k_energy_integral(u, eps, well=None):
    """:func:`k_energy` written as integrals of difference quotients over the torus.

    Independent evaluation path used for cross-checking.
    """
    u = as_grid(u)
    d1 = diff_quotient(u, 1)
    d2 = diff_quotient(u, 2)
    grad_term = np.mean(d1 ** 2 + d2 ** 2)
    pot_term = np.mean(_well(well).W(u))
    return float(eps * grad_term + pot_term / eps)


def k_fidelity_energy(u, f, eps, lam=0.0, well=None):
    """``k_energy(u) + lam * |u - f|_2^2`` (Euclidean norm over the nodes)."""
    u = as_grid(u)
    return k_energy(u, eps, well) + lam * float(np.sum((u - np.asarray(f)) ** 2))


def k_alpha(u, alpha, well=None):
    """:func:`k_energy` at ``eps = N**-alpha``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    u = as_grid(u)
    N = u.shape[0]
    return N ** (-alpha) * grid_jumps_sq(u) + N ** (alpha - 2) * _potential_sum(u, well)


def _spectral_gradient(values):
    n = values.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n) * 2 * np.pi
    if n % 2 == 0:
        # the Nyquist mode has no well-defined real derivative
        k[n // 2] = 0.0
    vh = np.fft.fft2(values)
    gx = np.real(np.fft.ifft2(1j * k[:, None] * vh))
    gy = np.real(np.fft.ifft2(1j * k[None, :] * vh))
    return gx, gy


def continuum_gl_oracle(f, eps, well=None, nq=256, grad=None, parts=False):
    """Continuum energy ``eps * int |grad f|^2 + eps^-1 int W(f)`` on the torus.

    Uses the periodic rectangle rule on an ``nq x nq`` node grid, which is
    spectrally accurate for smooth periodic ``f``.  ``grad(x, y)`` should
    return ``(df/dx, df/dy)``; without it a spectral derivative is used.
    With ``parts=True`` the two terms are returned separately.
    """
    if nq < 16:
        raise ValueError(f"quadrature grid nq={nq} is too small (need >= 16)")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    t = np.arange(nq) / nq
    x, y = np.meshgrid(t, t, indexing="ij")
    vals = np.array(np.broadcast_to(f(x, y), (nq, nq)), dtype=float)
    if grad is None:
        gx, gy = _spectral_gradient(vals)
    else:
        gx, gy = (np.broadcast_to(a, (nq, nq)) for a in grad(x, y))
    grad_term = eps * float(np.mean(gx ** 2 + gy ** 2))
    pot_term = float(np.mean(_well(well).W(vals))) / eps
    if parts:
        return grad_term, pot_term
    return grad_term + pot_term


def k_inf_zero(u, well=None):
    """``sigma(W) * perimeter`` of a grid-aligned binary set.

    For unions of grid cells the Euclidean perimeter equals the axis-aligned
    edge count, i.e. :func:`h_zero`.
    """
    u = as_grid(u)
    if not gr.is_binary(u):
        raise ValueError("k_inf_zero requires a binary grid function")
    return sigma_W(_well(well)) * h_zero(u)


def validate_alpha(well, mode, alpha):
    """Classify an exponent ``alpha`` against the proven scaling regimes.

    ``mode='h'``: in-regime iff ``alpha > beta``.  ``mode='k'``: in-regime
    iff ``0 < alpha < 2/(q+3)``; conjectural on ``[2/(q+3), 2/(q+2))``.
    Returns ``'in-regime'``, ``'conjectural'`` or ``'out-of-regime'``.
    """
    if mode == "h":
        if well.beta is None:
            raise ValueError("well has no recorded beta exponent")
        return "in-regime" if alpha > well.beta else "out-of-regime"
    if mode == "k":
        q = well.q_growth
        if q is None:
            raise ValueError("well has no recorded growth exponent for W'")
        if 0 < alpha < 2 / (q + 3):
            return "in-regime"
        if 2 / (q + 3) <= alpha < 2 / (q + 2):
            return "conjectural"
        return "out-of-regime"
    raise ValueError(f"mode must be 'h' or 'k', got {mode!r}")
