import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphgl import grid as gd


def test_sample_examples():
    np.testing.assert_array_equal(gd.sample(lambda x, y: 3.0, 5), np.full((5, 5), 3.0))
    u = gd.sample(lambda x, y: np.sin(2 * np.pi * x), 4)
    np.testing.assert_allclose(u[:, 0], [0, 1, 0, -1], atol=1e-15)
    band = gd.sample(lambda x, y: (x < 0.5).astype(float), 4)
    np.testing.assert_array_equal(band[:, 2], [1, 1, 0, 0])


def test_lp_norm_examples():
    assert gd.lp_norm(np.ones((7, 7)), 1) == 1
    assert gd.lp_norm(gd.indicator_band(8, 0, 4), 1) == 0.5
    assert gd.lp_norm(np.full((3, 3), 2.0), 2) == 2
    with pytest.raises(ValueError):
        gd.lp_norm(np.ones((2, 2)), 0.5)


def test_lp_distance_examples():
    u = gd.indicator_square(6, 1, 2, 3)
    assert gd.lp_distance(u, u, 1) == 0
    assert gd.lp_distance(gd.checkerboard(4), gd.checkerboard(8), 1) == 0.5
    assert gd.lp_distance(u, 1 - u, 1) == 1


def test_lp_distance_cap():
    with pytest.raises(ValueError, match="lcm"):
        gd.lp_distance(np.zeros((101, 101)), np.zeros((103, 103)))


def _refine(u, factor):
    return np.kron(u, np.ones((factor, factor)))


@settings(max_examples=40, deadline=None)
@given(n1=st.integers(1, 8), n2=st.integers(1, 8), seed=st.integers(0, 2**32 - 1),
       p=st.sampled_from([1.0, 2.0, 3.0, math.inf]))
def test_lp_distance_matches_refinement(n1, n2, seed, p):
    rng = np.random.default_rng(seed)
    u, v = rng.normal(size=(n1, n1)), rng.normal(size=(n2, n2))
    lcm = n1 * n2 // math.gcd(n1, n2)
    diff = np.abs(_refine(u, lcm // n1) - _refine(v, lcm // n2))
    ref = np.max(diff) if math.isinf(p) else np.mean(diff ** p) ** (1 / p)
    assert gd.lp_distance(u, v, p) == pytest.approx(ref, rel=1e-12, abs=1e-14)


def test_diff_quotient_examples():
    assert not np.any(gd.diff_quotient(np.full((5, 5), 2.0), 1))
    u = gd.sample(lambda x, y: np.sin(2 * np.pi * x), 64)
    assert gd.diff_quotient(u, 1)[0, 0] == pytest.approx(64 * math.sin(2 * math.pi / 64), rel=1e-14)
    assert gd.diff_quotient(u, 1)[0, 0] == pytest.approx(6.2730, abs=1e-4)
    band = gd.indicator_band(4, 0, 2)
    d = gd.diff_quotient(band, 1)
    np.testing.assert_array_equal(d[:, 0], [0, -4, 0, 4])
    assert not np.any(gd.diff_quotient(band, 2))
    with pytest.raises(ValueError):
        gd.diff_quotient(band, 3)


def test_diff_quotient_first_order():
    errs = []
    for N in (16, 32, 64):
        u = gd.sample(lambda x, y: np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y), N)
        exact = gd.sample(lambda x, y: 2 * np.pi * np.cos(2 * np.pi * x) * np.cos(2 * np.pi * y), N)
        errs.append(np.max(np.abs(gd.diff_quotient(u, 1) - exact)))
    assert errs[0] / errs[1] == pytest.approx(2, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(2, rel=0.05)


def test_bilinear_examples(rng):
    u = rng.normal(size=(6, 6))
    assert gd.bilinear_interpolate(u, 2 / 6, 5 / 6) == pytest.approx(u[2, 5], abs=1e-14)
    center = gd.bilinear_interpolate(u, 5.5 / 6, 0.5 / 6)
    assert center == pytest.approx(np.mean([u[5, 0], u[0, 0], u[5, 1], u[0, 1]]), abs=1e-14)
    assert gd.bilinear_interpolate(np.full((4, 4), 0.3), 0.123, 0.77) == pytest.approx(0.3)


def test_bilinear_reproduces_bilinear_within_cell():
    N = 8
    # nodal values of a bilinear function; exact on the interior of one cell
    f = lambda x, y: 1 + 2 * x - 3 * y + 5 * x * y
    u = gd.sample(f, N)
    xs = np.linspace(0.01, 0.99, 7) / N + 2 / N
    ys = np.linspace(0.01, 0.99, 7) / N + 3 / N
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    np.testing.assert_allclose(gd.bilinear_interpolate(u, X, Y), f(X, Y), atol=1e-13)


def test_indicators():
    assert gd.mass(gd.indicator_square(8, 0, 0, 2)) == 1 / 16
    assert gd.mass(gd.indicator_band(4, 0, 2)) == 0.5
    np.testing.assert_array_equal(gd.checkerboard(2), [[0, 1], [1, 0]])
    assert gd.mass(gd.indicator_square(5, 4, 4, 2)) == 4 / 25  # wraps
    with pytest.raises(ValueError):
        gd.checkerboard(3)
    with pytest.raises(ValueError):
        gd.indicator_square(4, 0, 0, 5)


def test_grid_graph_regular():
    g = gd.grid_graph(5)
    np.testing.assert_array_equal(g.degrees, np.full(25, 4.0))
    with pytest.raises(ValueError):
        gd.grid_graph(2)
