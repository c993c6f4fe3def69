import numpy as np
import pytest

from graphgl import functionals as fn
from graphgl import flows as fl
from graphgl.grid import indicator_square
from conftest import pair, random_graph

H = 1e-6


def _fd_gradient(energy, u):
    """Central differences, one coordinate at a time."""
    grad = np.zeros_like(u)
    flat, out = u.ravel(), grad.ravel()
    for k in range(flat.size):
        up, dn = flat.copy(), flat.copy()
        up[k] += H
        dn[k] -= H
        out[k] = (energy(up.reshape(u.shape)) - energy(dn.reshape(u.shape))) / (2 * H)
    return grad


def _close(a, b, rel=1e-5):
    return np.max(np.abs(a - b)) <= rel * max(1.0, np.max(np.abs(b)))


def test_config_validation():
    with pytest.raises(ValueError):
        fl.FlowConfig(eps=0, dt=0.1, steps=1)
    with pytest.raises(ValueError):
        fl.FlowConfig(eps=1, dt=0.1, steps=1, r=2)
    with pytest.raises(ValueError):
        fl.FlowConfig(eps=1, dt=0.1, steps=1, constraint="nope")
    with pytest.raises(ValueError):
        fl.FlowConfig(eps=1, dt=0.1, steps=0)
    assert fl.FlowConfig(eps=1, dt=0.1, steps=1, lam=2, constraint="mass").effective_lam == 0


def test_grad_k_fidelity_examples():
    cfg = fl.FlowConfig(eps=1.0, dt=0.1, steps=1, lam=3.0)
    assert not np.any(fl.grad_k_fidelity(np.ones((4, 4)), np.ones((4, 4)), cfg))
    assert not np.any(fl.grad_k_fidelity(np.full((3, 3), 0.5), np.full((3, 3), 0.5), cfg))
    cfg0 = fl.FlowConfig(eps=1.0, dt=0.1, steps=1)
    np.testing.assert_array_equal(fl.grad_k_fidelity(np.full((2, 2), 0.25), None, cfg0),
                                  np.full((2, 2), -3 / 64))


def test_lagrange_kappa_examples():
    assert fl.lagrange_kappa(np.full((4, 4), 0.5), 1.0) == 0
    for N in (2, 5, 8):
        assert fl.lagrange_kappa(np.full((N, N), 0.25), 1.0) == pytest.approx(3 / (16 * N * N), rel=1e-15)
    wells = (np.arange(16).reshape(4, 4) % 2).astype(float)
    assert fl.lagrange_kappa(wells, 0.7) == 0


def test_grad_f_graph_examples():
    np.testing.assert_array_equal(fl.grad_f_graph(pair(), [1, 1], [1, 1], 1.0, lam=2.0), [0, 0])
    np.testing.assert_allclose(fl.grad_f_graph(pair(), [0, 1], None, 1e300), [2, -2])


@pytest.mark.parametrize("r", [0.0, 0.5, 1.0])
def test_grad_k_fidelity_matches_finite_differences(rng, r):
    N = 5
    u = rng.uniform(-0.3, 1.3, size=(N, N))
    f = rng.uniform(size=(N, N))
    cfg = fl.FlowConfig(eps=0.3, dt=0.01, steps=1, lam=0.7, r=r)
    fd = _fd_gradient(lambda v: fn.k_fidelity_energy(v, f, 0.3, 0.7), u)
    assert _close(fl.grad_k_fidelity(u, f, cfg), -(4.0 ** -r) * fd)


def test_grad_k_mass_is_projected_gradient(rng):
    N = 6
    u = rng.uniform(-0.3, 1.3, size=(N, N))
    cfg = fl.FlowConfig(eps=0.4, dt=0.01, steps=1, constraint="mass")
    fd = _fd_gradient(lambda v: fn.k_energy(v, 0.4), u)
    rate = fl.grad_k_mass(u, cfg)
    assert _close(rate, -(fd - fd.mean()))
    assert abs(rate.sum()) < 1e-12 * np.abs(rate).sum()


@pytest.mark.parametrize("r", [0.0, 0.5, 1.0])
def test_grad_f_graph_matches_finite_differences(rng, r):
    g = random_graph(rng, 7, isolated=True)
    u = rng.uniform(-0.3, 1.3, size=7)
    f = rng.uniform(size=7)
    fd = _fd_gradient(lambda v: fn.f_eps_fidelity(g, v, f, 0.5, 0.5, 0.3), u)
    metric = np.where(g.degrees > 0, np.where(g.degrees > 0, g.degrees, 1.0) ** -r, 1.0)
    assert _close(fl.grad_f_graph(g, u, f, 0.5, 0.5, 0.3, r), -metric * fd)


def test_mass_flow_conserves_mass(rng):
    u0 = rng.uniform(size=(16, 16))
    cfg = fl.FlowConfig(eps=0.5, dt=1e-3, steps=1000, constraint="mass")
    trace = fl.run_flow(u0, None, cfg)
    m = trace.masses
    assert np.max(np.abs(np.diff(m))) <= 1e-12 * abs(m[0])
    assert np.all(np.diff(trace.energies) <= 1e-12)


def test_graph_mass_flow_conserves_mean(rng):
    g = random_graph(rng, 9)
    cfg = fl.FlowConfig(eps=0.5, dt=1e-3, steps=300, constraint="mass")
    trace = fl.run_flow(rng.uniform(size=9), None, cfg, graph=g)
    assert np.max(np.abs(np.diff(trace.masses))) <= 1e-12


def test_r_rescaling_is_exact(rng):
    u0 = rng.uniform(size=(8, 8))
    f = indicator_square(8, 2, 2, 4)
    a = fl.run_flow(u0, f, fl.FlowConfig(eps=1.0, dt=0.002, steps=50, lam=0.5, snapshot_every=1))
    b = fl.run_flow(u0, f, fl.FlowConfig(eps=1.0, dt=0.008, steps=50, lam=0.5, r=1.0, snapshot_every=1))
    for (na, ua), (nb, ub) in zip(a.snapshots, b.snapshots):
        assert na == nb
        assert np.max(np.abs(ua - ub)) <= 1e-12


def test_fidelity_flow_energy_decreases(rng):
    f = indicator_square(12, 3, 3, 6)
    cfg = fl.FlowConfig(eps=1.0, dt=0.005, steps=200, lam=0.3, seed=4)
    trace = fl.run_flow(None, f, cfg)
    assert np.all(np.diff(trace.energies) <= 1e-12)
    assert trace.records[0][4] == 0 and len(trace.records) == 201


def test_seeded_start_is_reproducible():
    f = indicator_square(6, 0, 0, 3)
    cfg = fl.FlowConfig(eps=1.0, dt=0.01, steps=5, lam=0.1, seed=11)
    np.testing.assert_array_equal(fl.run_flow(None, f, cfg).final, fl.run_flow(None, f, cfg).final)


def test_blow_up_raises():
    f = np.zeros((6, 6))
    cfg = fl.FlowConfig(eps=1e-3, dt=50.0, steps=200, lam=0.0)
    with pytest.warns(RuntimeWarning):
        with pytest.raises(fl.FlowDivergence) as info:
            fl.run_flow(np.full((6, 6), 2.0), f, cfg)
    assert 1 <= info.value.step <= 200


def test_fidelity_flow_needs_data():
    with pytest.raises(ValueError):
        fl.run_flow(np.zeros((4, 4)), None, fl.FlowConfig(eps=1, dt=0.01, steps=1))
