import numpy as np
import pytest
from hypothesis import strategies as st

from graphgl import WeightedGraph


def random_graph(rng, m, density=0.6, isolated=False):
    w = rng.uniform(0.1, 3.0, size=(m, m)) * (rng.uniform(size=(m, m)) < density)
    w = np.triu(w, 1)
    w = w + w.T
    if isolated and m > 1:
        k = rng.integers(m)
        w[k, :] = 0
        w[:, k] = 0
    return WeightedGraph(w)


@st.composite
def graphs(draw, max_m=12):
    m = draw(st.integers(1, max_m))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    density = draw(st.floats(0.0, 1.0))
    return random_graph(rng, m, density, isolated=draw(st.booleans()))


def path3():
    return WeightedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])


def pair(w=1.0):
    return WeightedGraph.from_edges(2, [(0, 1, w)])


# --- loop-based reference formulas, kept independent of the vectorised code ---

def ref_divergence(g, phi, r, q):
    m = g.m
    out = np.zeros(m)
    for i in range(m):
        d = g.weights[i].sum()
        if d == 0:
            continue
        s = 0.0
        for j in range(m):
            if g.weights[i, j] > 0:
                s += g.weights[i, j] ** q * (phi[j, i] - phi[i, j])
        out[i] = s / (2 * d ** r)
    return out


def ref_laplacian(g, u, r):
    m = g.m
    out = np.zeros(m)
    for i in range(m):
        d = g.weights[i].sum()
        if d == 0:
            continue
        out[i] = sum(g.weights[i, j] / d ** r * (u[i] - u[j]) for j in range(m))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
