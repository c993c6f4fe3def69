"""Function-space calculus on a finite weighted graph.

Vertex functions are length-``m`` arrays, edge functions are skew-symmetric
``m x m`` arrays that vanish off the edge set.  Every operator here is
parametrised by the inner-product exponents ``r`` (vertex measure ``d_i**r``)
and ``q`` (edge measure ``w_ij**(2q-1)``).

Zero bases raised to zero exponents are taken as 1, but only on
edge-supported entries; off-edge entries are dropped before exponentiation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "WeightedGraph",
    "MAX_DENSE_VERTICES",
    "edge_function",
    "skew_edge_function",
    "degree",
    "v_inner",
    "e_inner",
    "edge_dot",
    "edge_node_norm",
    "gradient",
    "divergence",
    "laplacian",
    "laplacian_matrix",
    "dirichlet_energy",
    "tv_isotropic",
    "tv_anisotropic",
    "tv_maximizer_field",
    "tv_anisotropic_maximizer_field",
    "graph_cut",
    "is_binary",
]

#: Dense edge functions are refused above this many vertices.
MAX_DENSE_VERTICES = 4096


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph on ``m`` vertices with symmetric nonnegative weights.

    ``weights[i, j]`` is the weight of edge ``{i, j}`` (0 where there is no
    edge).  Vertices are 0-based internally; the file format is 1-based.
    """

    weights: np.ndarray
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] == 0:
            raise ValueError(f"weights must be a nonempty square matrix, got shape {w.shape}")
        if w.shape[0] > MAX_DENSE_VERTICES:
            raise ValueError(f"m={w.shape[0]} exceeds the dense cap {MAX_DENSE_VERTICES}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        if np.any(np.diag(w) != 0):
            raise ValueError("weights must have a zero diagonal")
        if not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric")
        w.setflags(write=False)
        d = w.sum(axis=1)
        d.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "degrees", d)

    @property
    def m(self) -> int:
        return self.weights.shape[0]

    @property
    def edge_mask(self) -> np.ndarray:
        return self.weights > 0

    @classmethod
    def from_edges(cls, m, edges):
        """Build from ``(i, j, w)`` triples with 0-based indices."""
        w = np.zeros((m, m))
        for i, j, wij in edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            w[i, j] = w[j, i] = wij
        return cls(w)

    def edges(self):
        """Yield ``(i, j, w)`` for ``i < j`` with positive weight."""
        iu, ju = np.nonzero(np.triu(self.weights, 1))
        for i, j in zip(iu, ju):
            yield int(i), int(j), float(self.weights[i, j])


def _check_vertex(g, u, name="u"):
    u = np.asarray(u, dtype=float)
    if u.shape != (g.m,):
        raise ValueError(f"{name} has shape {u.shape}, expected ({g.m},)")
    return u


def _check_edge(g, phi, name="phi"):
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (g.m, g.m):
        raise ValueError(f"{name} has shape {phi.shape}, expected ({g.m}, {g.m})")
    return phi


def _edge_power(g, exponent):
    """``w_ij**exponent`` on edges, 0 elsewhere (so 0**0 never arises)."""
    mask = g.edge_mask
    out = np.zeros_like(g.weights)
    out[mask] = g.weights[mask] ** exponent
    return out


def _degree_power(g, r):
    """``d_i**r`` with ``0**0 = 1``."""
    if r == 0:
        return np.ones(g.m)
    return g.degrees ** r


def _inv_degree_power(g, r):
    """``d_i**(-r)``, with 0 at isolated vertices when ``r > 0``."""
    if r == 0:
        return np.ones(g.m)
    out = np.zeros(g.m)
    nz = g.degrees > 0
    out[nz] = g.degrees[nz] ** (-r)
    return out


def edge_function(g, values):
    """Validate ``values`` as an edge function on ``g`` and return a copy.

    Raises if ``values`` is not skew-symmetric or is nonzero off the edges.
    """
    phi = _check_edge(g, values).copy()
    if not np.array_equal(phi, -phi.T):
        raise ValueError("edge function must be skew-symmetric")
    if np.any(phi[~g.edge_mask] != 0):
        raise ValueError("edge function must vanish where the weight is zero")
    return phi


def skew_edge_function(g, values):
    """Project an arbitrary ``m x m`` array onto the edge functions of ``g``."""
    a = _check_edge(g, values)
    phi = 0.5 * (a - a.T)
    phi[~g.edge_mask] = 0.0
    return phi


def degree(g, i):
    if not 0 <= i < g.m:
        raise IndexError(f"vertex {i} out of range for m={g.m}")
    return float(g.degrees[i])


def v_inner(g, u, v, r=0.0):
    """Vertex inner product ``sum_i u_i v_i d_i**r``."""
    u = _check_vertex(g, u)
    v = _check_vertex(g, v, "v")
    return float(np.sum(u * v * _degree_power(g, r)))


def e_inner(g, phi, psi, q=1.0):
    """Edge form ``1/2 sum_ij phi_ij psi_ij w_ij**(2q-1)``."""
    phi = _check_edge(g, phi)
    psi = _check_edge(g, psi, "psi")
    return float(0.5 * np.sum(phi * psi * _edge_power(g, 2 * q - 1)))


def edge_dot(g, phi, psi, q=1.0):
    """Vertex-valued dot product ``(phi . psi)_i``."""
    phi = _check_edge(g, phi)
    psi = _check_edge(g, psi, "psi")
    return 0.5 * np.sum(phi * psi * _edge_power(g, 2 * q - 1), axis=1)


def edge_node_norm(g, phi, q=1.0):
    """Local norms ``||phi||_i = sqrt((phi . phi)_i)``."""
    return np.sqrt(edge_dot(g, phi, phi, q))


def gradient(g, u, q=1.0):
    """``(grad u)_ij = w_ij**(1-q) (u_j - u_i)``."""
    u = _check_vertex(g, u)
    return _edge_power(g, 1 - q) * (u[None, :] - u[:, None])


def divergence(g, phi, r=0.0, q=1.0):
    """Adjoint of :func:`gradient`; zero at isolated vertices."""
    phi = _check_edge(g, phi)
    s = np.sum(_edge_power(g, q) * (phi.T - phi), axis=1)
    return 0.5 * _inv_degree_power(g, r) * s


def laplacian(g, u, r=0.0):
    """``(Delta_r u)_i = sum_j w_ij / d_i**r (u_i - u_j)``."""
    u = _check_vertex(g, u)
    # pairwise differences keep constants in the kernel exactly
    s = np.sum(g.weights * (u[:, None] - u[None, :]), axis=1)
    return _inv_degree_power(g, r) * s


def laplacian_matrix(g, r=0.0):
    """Matrix ``D**(1-r) - D**(-r) W``; rows of isolated vertices are zero."""
    inv = _inv_degree_power(g, r)
    return inv[:, None] * (np.diag(g.degrees) - g.weights)


def dirichlet_energy(g, u):
    """``1/4 sum_ij w_ij (u_i - u_j)**2``; independent of ``r`` and ``q``."""
    u = _check_vertex(g, u)
    diff = u[:, None] - u[None, :]
    return float(0.25 * np.sum(g.weights * diff ** 2))


def tv_isotropic(g, u):
    u = _check_vertex(g, u)
    diff = u[:, None] - u[None, :]
    local = np.sqrt(np.sum(g.weights * diff ** 2, axis=1))
    return float(np.sqrt(2) / 2 * np.sum(local))


def tv_anisotropic(g, u, q=1.0):
    """``1/2 sum_ij w_ij**q |u_i - u_j|``."""
    u = _check_vertex(g, u)
    diff = np.abs(u[:, None] - u[None, :])
    return float(0.5 * np.sum(_edge_power(g, q) * diff))


def tv_maximizer_field(g, u, q=1.0):
    """Edge field attaining the isotropic TV maximum.

    ``grad u / ||grad u||_i`` row-wise, and 0 on rows where the local norm
    vanishes.
    """
    grad = gradient(g, u, q)
    norms = edge_node_norm(g, grad, q)
    out = np.zeros_like(grad)
    nz = norms > 0
    out[nz] = grad[nz] / norms[nz, None]
    return out


def tv_anisotropic_maximizer_field(g, u, q=1.0):
    """``sgn(grad u)`` on the edges; attains the anisotropic TV maximum."""
    u = _check_vertex(g, u)
    out = np.sign(u[None, :] - u[:, None])
    out[~g.edge_mask] = 0.0
    return out


def is_binary(u):
    u = np.asarray(u)
    return bool(np.all((u == 0) | (u == 1)))


def graph_cut(g, u):
    """Total weight of edges from the 0-set to the 1-set."""
    u = _check_vertex(g, u)
    if not is_binary(u):
        raise ValueError("graph_cut requires a binary labeling")
    return float((1 - u) @ g.weights @ u)
