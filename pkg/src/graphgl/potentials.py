"""Double-well potentials with wells at 0 and 1."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

__all__ = ["DoubleWell", "standard_well", "scaled_well", "sigma_W", "SIGMA_TOL"]

SIGMA_TOL = 1e-10


@dataclass(frozen=True)
class DoubleWell:
    """A potential ``W >= 0`` vanishing exactly at 0 and 1, plus its derivative.

    ``beta`` is the power of the lower bound near the wells, ``p`` the tail
    growth of ``W`` and ``q_growth`` the tail growth of ``W'``.  ``constants``
    holds whatever bound constants are known; nothing reads them.
    """

    W: Callable[[np.ndarray], np.ndarray]
    dW: Callable[[np.ndarray], np.ndarray]
    beta: Optional[float] = None
    p: Optional[float] = None
    q_growth: Optional[float] = None
    d2W_bound: Optional[float] = None
    constants: dict = field(default_factory=dict)
    name: str = "custom"

    wells = (0.0, 1.0)


def _w_std(s):
    return s ** 2 * (s - 1) ** 2


def _dw_std(s):
    return 2 * s * (s - 1) * (2 * s - 1)


def standard_well():
    """``W(s) = s^2 (s-1)^2``."""
    return DoubleWell(
        W=_w_std,
        dW=_dw_std,
        beta=2.0,
        p=4.0,
        q_growth=3.0,
        # max |W''| = 11 on [-1/2, 3/2]
        d2W_bound=11.0,
        name="standard",
    )


def scaled_well(well, factor):
    """``factor * W`` with the same growth metadata."""
    W, dW = well.W, well.dW
    return DoubleWell(
        W=lambda s: factor * W(s),
        dW=lambda s: factor * dW(s),
        beta=well.beta,
        p=well.p,
        q_growth=well.q_growth,
        d2W_bound=None if well.d2W_bound is None else factor * well.d2W_bound,
        constants=dict(well.constants),
        name=f"{factor}*{well.name}",
    )


def sigma_W(well, tol=SIGMA_TOL):
    """Surface tension ``2 * int_0^1 sqrt(W(s)) ds``."""

    def integrand(s):
        w = float(well.W(s))
        if w < 0:
            raise ValueError(f"W({s}) = {w} is negative")
        return np.sqrt(w)

    # cheap guard against negative values quad might step over
    grid = np.linspace(0.0, 1.0, 1025)
    if np.any(np.asarray(well.W(grid)) < 0):
        raise ValueError("W takes negative values on [0, 1]")
    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=tol, epsrel=0.0, limit=200)
    return 2.0 * val
