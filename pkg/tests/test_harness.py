import itertools
from fractions import Fraction

import numpy as np
import pytest

from graphgl import harness as hn
from graphgl import graph as gr
from graphgl.functionals import f_zero
from conftest import path3, random_graph


def test_fit_recovers_power_law():
    rep = hn.SweepReport(("N", "error"), [(n, 3.0 * n ** -2.0) for n in (4, 8, 16, 32)])
    slope, resid = rep.fit()
    assert slope == pytest.approx(-2.0, abs=1e-12) and resid < 1e-12
    with pytest.raises(ValueError):
        hn.SweepReport(("N", "error"), [(1, 1.0), (2, 0.5)]).fit()


def test_alpha_counterexample_exact():
    rep = hn.alpha_counterexample([4, 8, 16], 0.5)
    np.testing.assert_allclose(rep.column("ratio"), 1.0, rtol=1e-15)


def test_shape_check_examples():
    assert hn.minimizer_shape_check(8, Fraction(1, 16)).winner == "square"
    assert hn.minimizer_shape_check(4, Fraction(1, 4)).winner == "tie"
    rec = hn.minimizer_shape_check(10, 0.36)
    assert rec.winner == "band" and rec.K == 6
    with pytest.raises(ValueError):
        hn.minimizer_shape_check(8, 0.2)


def test_logistic_profile_shape():
    u = hn.logistic_band_profile(40, 0.02)
    assert u.shape == (40, 40) and np.all(u[:, 0] == u[:, 7])
    assert u[20, 0] > 0.99 and u[0, 0] < 0.01


def test_recovery_requires_resolution():
    with pytest.raises(ValueError):
        hn.recovery_profile_check([0.05], [100])


def _enumerate_min(g, M=None, chi=0.5):
    best = None
    for bits in itertools.product((0.0, 1.0), repeat=g.m):
        u = np.array(bits)
        if M is not None and u.sum() != g.m * M:
            continue
        val = 2 * chi * gr.graph_cut(g, u)
        if best is None or val < best[1] - 1e-12:
            best = (u, val)
    return best


def test_brute_force_hand_counts():
    g = hn.barbell_graph(0.1)
    lab, energy = hn.brute_force_min_cut(g, 0.5)
    np.testing.assert_array_equal(lab, [0, 0, 0, 1, 1, 1])
    assert energy == pytest.approx(2 * 0.5 * 0.1, abs=1e-15)  # only the bridge is cut
    lab, energy = hn.brute_force_min_cut(path3())
    np.testing.assert_array_equal(lab, [0, 0, 0])
    assert energy == 0


def test_brute_force_matches_enumeration(rng):
    for _ in range(10):
        g = random_graph(rng, 8)
        lab, val = hn.brute_force_min_cut(g, 0.5, chunk=17)
        ref_lab, ref_val = _enumerate_min(g, 0.5)
        assert val == pytest.approx(ref_val, abs=1e-12)
        np.testing.assert_array_equal(lab, ref_lab)
        assert f_zero(g, lab) == val


def test_brute_force_limits():
    with pytest.raises(ValueError):
        hn.brute_force_min_cut(gr.WeightedGraph(np.zeros((21, 21))))
    with pytest.raises(ValueError):
        hn.brute_force_min_cut(path3(), 0.5)


def test_anneal_barbell():
    res = hn.anneal_f_eps(hn.barbell_graph(), [1.0, 0.3, 0.1], 0.5)
    assert res.match and not res.degenerate
    assert res.energy == res.oracle_energy


def test_anneal_flags_degenerate_state():
    res = hn.anneal_f_eps(hn.barbell_graph(), [100.0], 0.5)
    assert res.degenerate and not res.match


def test_noncompactness_rows():
    rep = hn.noncompactness_demo([4, 8])
    np.testing.assert_array_equal(rep.column("g"), [0.5, 0.5])
    np.testing.assert_array_equal(rep.column("l1_to_4N"), [0.5, 0.5])
    np.testing.assert_array_equal(rep.column("l1_to_self"), [0, 0])
