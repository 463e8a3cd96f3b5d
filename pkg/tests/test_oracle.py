import numpy as np
import pytest
from numpy.testing import assert_allclose

from optoforce import gaussian as g
from optoforce import oracle


def rotation_generator(w):
    a = np.array([[0.0, w], [-w, 0.0]])
    c = np.zeros(2)
    return lambda t: (a, c)


def test_ode_spec_validation():
    gen = rotation_generator(1.0)
    with pytest.raises(ValueError):
        oracle.OdeSpec(3, gen, 1.0, 1000)  # odd dim
    with pytest.raises(ValueError):
        oracle.OdeSpec(2, gen, 1.0, 50)  # too few steps
    with pytest.raises(ValueError):
        oracle.OdeSpec(4, gen, 1.0, 1000)  # shape mismatch


def test_step_size_guard_names_required_steps():
    spec = oracle.OdeSpec(2, rotation_generator(50.0), 10.0, 100)
    with pytest.raises(ValueError, match="n_steps >="):
        oracle.integrate_propagator(spec)


def test_propagator_rotation_period():
    # one full rotation returns to the identity
    w = 2.0 * np.pi
    spec = oracle.OdeSpec(2, rotation_generator(w), 1.0, 2000)
    mat, disp = oracle.integrate_propagator(spec)
    assert_allclose(mat, np.eye(2), atol=1e-10)
    assert_allclose(disp, 0.0, atol=1e-15)


def test_propagator_matches_expm():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(4, 4))
    a = a - a.T  # skew keeps the norm tame
    spec = oracle.OdeSpec(4, lambda t: (a, np.zeros(4)), 2.0, 4000)
    mat, _ = oracle.integrate_propagator(spec)
    assert_allclose(mat, oracle.expm_propagator(a, 2.0), atol=1e-10)


def test_moments_constant_drive():
    # dm/dt = c with A = 0: mean grows linearly, covariance frozen
    c = np.array([0.5, -1.0])
    spec = oracle.OdeSpec(2, lambda t: (np.zeros((2, 2)), c), 3.0, 300)
    v0 = np.array([[0.25, 0.1], [0.1, 0.5]])
    m, v = oracle.integrate_moments(spec, np.zeros(2), v0)
    assert_allclose(m, 3.0 * c, atol=1e-12)
    assert_allclose(v, v0, atol=1e-14)


def test_moments_rotation_preserves_isotropic_cov():
    spec = oracle.OdeSpec(2, rotation_generator(1.3), 5.0, 2000)
    m, v = oracle.integrate_moments(spec, np.array([1.0, 0.0]), 0.25 * np.eye(2))
    assert_allclose(v, 0.25 * np.eye(2), atol=1e-10)
    assert_allclose(np.linalg.norm(m), 1.0, atol=1e-10)


def test_time_dependent_drive():
    # dm/dt = (cos t, 0): exact mean is (sin t, 0)
    gen = lambda t: (np.zeros((2, 2)), np.array([np.cos(t), 0.0]))
    spec = oracle.OdeSpec(2, gen, 2.0, 1000)
    m, _ = oracle.integrate_moments(spec, np.zeros(2), np.zeros((2, 2)))
    assert_allclose(m, [np.sin(2.0), 0.0], atol=1e-12)


def test_convergence_report_fourth_order():
    spec = oracle.OdeSpec(2, rotation_generator(1.0), 4.0, 200)
    rep = oracle.convergence_report(spec, np.array([1.0, 0.0]), 0.25 * np.eye(2))
    assert rep["diff_2n_4n"] < rep["diff_n_2n"]
    assert 3.5 < rep["observed_order"] < 4.5
    assert rep["expm_deviation"] < 1e-8


# --- Fock oracle ---------------------------------------------------------


def test_fock_spec_validation():
    with pytest.raises(ValueError):
        oracle.FockSpec("coherent", 1.0)
    with pytest.raises(ValueError):
        oracle.FockSpec("thermal", -1.0).cutoff()
    with pytest.raises(ValueError, match="cutoff"):
        oracle.FockSpec("thermal", 1e6).cutoff()


def test_fock_vacuum_limits():
    for family in ("thermal", "tmsv", "squeezed"):
        spec = oracle.FockSpec(family, 0.0)
        mean, cov = oracle.fock_moments(spec)
        assert_allclose(mean, 0.0, atol=1e-14)
        assert_allclose(cov, 0.25 * np.eye(len(mean)), atol=1e-14)


def test_fock_thermal():
    mean, cov = oracle.fock_moments(oracle.FockSpec("thermal", 0.5))
    # Var(X) = (2 n_bar + 1)/4 = 1/2; frozen oracle value
    assert_allclose(cov[0, 0], 0.4999999999987542, rtol=1e-14)
    assert_allclose(cov, 0.5 * np.eye(2), atol=1e-11)
    assert_allclose(mean, 0.0, atol=1e-14)


def test_fock_tmsv_negative_s_flips_correlations():
    _, cp = oracle.fock_moments(oracle.FockSpec("tmsv", 0.5))
    _, cm = oracle.fock_moments(oracle.FockSpec("tmsv", -0.5))
    assert cp[0, 2] > 0 > cm[0, 2]
    assert_allclose(cp[0, 2], -cm[0, 2], atol=1e-11)
    assert_allclose(cp[1, 3], -cp[0, 2], atol=1e-11)


def test_fock_tmsv_squeezed_combination():
    _, cov = oracle.fock_moments(oracle.FockSpec("tmsv", 0.5))
    z = np.array([0.0, 1.0, 0.0, 1.0])
    # frozen oracle value; analytic e^{-2s}/2 = 0.18393972058572117
    assert_allclose(z @ cov @ z, 0.18393972058518704, rtol=1e-12)
    assert abs(z @ cov @ z - np.exp(-1.0) / 2.0) < 1e-10


def test_fock_squeezed_axes_and_purity():
    _, cov = oracle.fock_moments(oracle.FockSpec("squeezed", 1.0, 0.0))
    assert_allclose(cov[0, 0], np.exp(-2.0) / 4.0, atol=1e-11)
    assert_allclose(cov[1, 1], np.exp(2.0) / 4.0, atol=1e-11)
    assert_allclose(np.linalg.det(cov), 1.0 / 16.0, atol=1e-11)


def test_fock_squeezed_tail_guard():
    with pytest.raises(ValueError):
        oracle.fock_moments(oracle.FockSpec("squeezed", 6.0))


@pytest.mark.parametrize("family,param", [("thermal", 2.0), ("tmsv", 1.0),
                                          ("squeezed", 1.0)])
def test_fock_agrees_with_constructors(family, param):
    mean, cov = oracle.fock_moments(oracle.FockSpec(family, param, phi=0.3))
    if family == "thermal":
        ref = g.thermal_state(param)
    elif family == "tmsv":
        ref = g.two_mode_squeezed(param)
    else:
        ref = g.single_mode_squeezed(param, 0.3)
    assert_allclose(mean, ref.mean, atol=1e-10)
    assert_allclose(cov, ref.cov, atol=1e-10)
