import numpy as np
import pytest

from nlgs.model import (
    ModelParams,
    classify_stability_homogeneous,
    discriminant,
    positivity_shift,
    reaction_jacobian,
    reaction_values,
    steady_states,
)


def test_params_must_be_positive():
    with pytest.raises(ValueError):
        ModelParams(d1=0.0, d2=1.0, f=0.04, kappa=0.01)
    with pytest.raises(ValueError):
        ModelParams(d1=1.0, d2=1.0, f=-0.04, kappa=0.01)


def test_regimes_at_known_parameters():
    # f = 0.04, kappa = 0.06 puts the discriminant exactly at zero:
    # 0.04^2 - 4 * 0.04 * 0.1^2 = 0.
    assert steady_states(ModelParams(1, 1, 0.04, 0.01)).regime == "s3"
    assert steady_states(ModelParams(1, 1, 0.04, 0.06)).regime == "s2"
    assert steady_states(ModelParams(1, 1, 0.02, 0.06)).regime == "s1"


def test_semi_trivial_state_always_present():
    for f, kappa in [(0.04, 0.01), (0.02, 0.06), (0.04, 0.06)]:
        report = steady_states(ModelParams(1, 1, f, kappa))
        assert report.states[0] == (1.0, 0.0)
        f1, f2 = reaction_values(np.array(1.0), np.array(0.0), ModelParams(1, 1, f, kappa))
        assert f1 == 0.0 and f2 == 0.0


def test_nontrivial_states_are_roots():
    params = ModelParams(1, 1, 0.04, 0.01)
    report = steady_states(params)
    assert len(report.states) == 3
    for u, v in report.states:
        f1, f2 = reaction_values(np.array(u), np.array(v), params)
        assert abs(float(f1)) < 1e-14
        assert abs(float(f2)) < 1e-14
    # on the nontrivial branch, u v = f + kappa
    for u, v in report.states[1:]:
        assert u * v == pytest.approx(params.f + params.kappa, abs=1e-14)


def test_discriminant_sign_convention():
    assert discriminant(ModelParams(1, 1, 0.04, 0.01)) > 0
    assert discriminant(ModelParams(1, 1, 0.02, 0.06)) < 0


def test_jacobian_against_finite_differences():
    params = ModelParams(1, 1, 0.04, 0.01)
    state = (0.7, 0.3)
    J = reaction_jacobian(params, state)
    eps = 1e-7
    for col, delta in enumerate([(eps, 0.0), (0.0, eps)]):
        up = reaction_values(np.array(state[0] + delta[0]), np.array(state[1] + delta[1]), params)
        dn = reaction_values(np.array(state[0] - delta[0]), np.array(state[1] - delta[1]), params)
        fd = [(float(a) - float(b)) / (2 * eps) for a, b in zip(up, dn)]
        assert np.allclose(J[:, col], fd, atol=1e-6)


def _ode_growth_factor(params, state, t_end=50.0, dt=1e-3, amp=1e-6):
    """Refined-step RK4 on the kinetics only: ratio of final to initial
    perturbation norm for a random small perturbation of the state."""
    rng = np.random.default_rng(17)
    d0 = rng.standard_normal(2)
    d0 *= amp / np.linalg.norm(d0)
    z = np.array(state) + d0

    def rhs(z):
        f1, f2 = reaction_values(np.array(z[0]), np.array(z[1]), params)
        return np.array([float(f1), float(f2)])

    steps = int(round(t_end / dt))
    for _ in range(steps):
        k1 = rhs(z)
        k2 = rhs(z + 0.5 * dt * k1)
        k3 = rhs(z + 0.5 * dt * k2)
        k4 = rhs(z + dt * k3)
        z = z + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return float(np.linalg.norm(z - np.array(state)) / amp)


def test_stability_labels_match_ode_oracle():
    params = ModelParams(1, 1, 0.04, 0.01)
    report = steady_states(params)
    for state in report.states:
        label = classify_stability_homogeneous(params, state)
        factor = _ode_growth_factor(params, state)
        if label == "stable":
            assert factor < 0.5
        elif label == "unstable":
            assert factor > 2.0


def test_semi_trivial_is_always_stable():
    for f, kappa in [(0.04, 0.01), (0.1, 0.05), (0.02, 0.06)]:
        assert classify_stability_homogeneous(ModelParams(1, 1, f, kappa), (1.0, 0.0)) == "stable"


def test_positivity_shift_makes_kinetics_nonnegative():
    params = ModelParams(1, 1, 0.04, 0.01)
    R = 2.0
    xi = positivity_shift(params, R)
    rng = np.random.default_rng(21)
    u = rng.uniform(0.0, R, size=200)
    v = rng.uniform(0.0, R, size=200)
    f1, f2 = reaction_values(u, v, params)
    assert np.min(f1 + xi * u) >= -1e-14
    assert np.min(f2 + xi * v) >= -1e-14
