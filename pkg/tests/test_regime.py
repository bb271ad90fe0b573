from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilayer_gn.errors import NonPositiveNu
from bilayer_gn.regime import RegimeParams, compute_coefficients, validate_regime

from conftest import random_ch_params


def exact_coefficients(gamma, delta, bo_inv):
    """Closed forms in rational arithmetic (independent of float rounding)."""
    g, d, bi = Fraction(gamma), Fraction(delta), Fraction(bo_inv)
    s = g + d
    lam = (1 + g * d) / (3 * d * s)
    alpha = (1 - g) / s**2
    theta = (1 + g * d) * (d**2 - g) / (d * s**3)
    a1 = 1 / s**2
    t1 = d * (1 + g * d) / s**3
    nu = lam - bi
    return {
        "lambda": lam, "alpha": alpha, "theta": theta, "alpha1": a1, "theta1": t1, "nu": nu,
        "kappa1": s * (2 * theta - alpha) / 3 / nu,
        "kappa2": s * theta / nu,
        "omega1": -t1 * s / 3 / nu,
        "omega2": -s * (a1 + 2 * t1) / 3 / nu,
        "varsigma": ((2 * alpha - theta) / 3 - bi * (d**2 - g) / s**2) / nu,
        "kappa": 2 * alpha / 3,
        "omega": s**2 * (a1 / 2 + t1) / 3,
    }


def test_reference_table_gamma0_delta1():
    c = compute_coefficients(RegimeParams(mu=0.04, eps=0.2, delta=1.0, gamma=0.0, beta=0.2))
    expected = dict(lambda_=1 / 3, nu=1 / 3, alpha=1, theta=1, alpha1=1, theta1=1, kappa1=1,
                    kappa2=3, omega1=-1, omega2=-3, varsigma=1, kappa=2 / 3, omega=0.5)
    got = c.as_dict()
    got["lambda_"] = got.pop("lambda")
    for name, value in expected.items():
        assert got[name] == pytest.approx(value, abs=1e-14), name


def test_reference_gamma09():
    c = compute_coefficients(RegimeParams(mu=0.04, eps=0.2, delta=1.0, gamma=0.9, beta=0.2))
    assert c.lam == pytest.approx(1 / 3, abs=1e-15)
    assert c.alpha == pytest.approx(0.0277008, abs=5e-8)
    assert c.theta == pytest.approx(c.alpha, rel=1e-14)
    assert c.kappa1 == pytest.approx(0.0526316, abs=5e-8)
    assert c.omega == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("gamma,delta,bo_inv", [(0.0, 1.0, 0.0), (0.5, 1.5, 0.0), (0.9, 0.7, 0.1), (0.25, 3.0, 0.05)])
def test_matches_rational_evaluation(gamma, delta, bo_inv):
    c = compute_coefficients(RegimeParams(mu=0.1, eps=0.1, delta=delta, gamma=gamma, beta=0.1, bo_inv=bo_inv)).as_dict()
    for name, value in exact_coefficients(gamma, delta, bo_inv).items():
        assert c[name] == pytest.approx(float(value), rel=1e-13, abs=1e-15), name


def test_infinite_bond_number_gives_nu_equal_lambda():
    c = compute_coefficients(RegimeParams(mu=0.04, eps=0.1, delta=2.0, gamma=0.3, beta=0.0))
    assert c.nu == c.lam


def test_identities_on_random_ch_tuples():
    for p in random_ch_params(np.random.default_rng(7), 100):
        c = compute_coefficients(p)
        s, bi = p.gamma + p.delta, p.bo_inv
        pairs = [
            (c.nu * c.kappa1, s * (2 * c.theta - c.alpha) / 3),
            (c.nu * c.kappa2, s * c.theta),
            (c.nu * c.omega1, -c.theta1 * s / 3),
            (c.nu * c.omega2, -s * (c.alpha1 + 2 * c.theta1) / 3),
            (c.nu * c.varsigma, (2 * c.alpha - c.theta) / 3 - bi * (p.delta**2 - p.gamma) / s**2),
        ]
        for lhs, rhs in pairs:
            assert abs(lhs - rhs) <= 1e-13 * abs(rhs) + 1e-300


@settings(max_examples=50, deadline=None)
@given(
    gamma=st.floats(0, 0.99),
    delta=st.floats(0.11, 9.9),
)
def test_deterministic_and_delta_one_identities(gamma, delta):
    p = RegimeParams(mu=0.04, eps=0.1, delta=delta, gamma=gamma, beta=0.1)
    a, b = compute_coefficients(p), compute_coefficients(p)
    assert a == b
    q = p.replace(delta=1.0)
    c = compute_coefficients(q)
    assert c.alpha == pytest.approx(c.theta, rel=1e-12, abs=1e-15)
    assert c.omega == pytest.approx(0.5, rel=1e-14)


def test_non_positive_nu_raises():
    p = RegimeParams(mu=0.04, eps=0.1, delta=1.0, gamma=0.0, beta=0.0, bo_inv=0.34)
    with pytest.raises(NonPositiveNu):
        compute_coefficients(p)


def test_ch_equality_case_is_member():
    r = validate_regime(RegimeParams(mu=0.04, eps=0.2, delta=1.0, gamma=0.0, beta=0.2, M=1.0))
    assert r.in_ch and r.in_sw and r.violations == ()


def test_eps_too_large_leaves_ch():
    r = validate_regime(RegimeParams(mu=0.04, eps=0.5, delta=1.0, gamma=0.0, beta=0.0, M=1.0))
    assert r.in_sw and not r.in_ch
    assert "eps <= M*sqrt(mu)" in r.violations


def test_gamma_one_leaves_sw():
    r = validate_regime(RegimeParams(mu=0.04, eps=0.1, delta=1.0, gamma=1.0, beta=0.0))
    assert not r.in_sw and not r.in_ch
    assert "gamma < 1" in r.violations


@settings(max_examples=100, deadline=None)
@given(
    mu=st.floats(-0.5, 2), eps=st.floats(-0.2, 1.5), delta=st.floats(0.05, 12),
    gamma=st.floats(-0.1, 1.2), beta=st.floats(-0.2, 1.5), bo_inv=st.floats(-1, 12),
)
def test_ch_implies_sw(mu, eps, delta, gamma, beta, bo_inv):
    r = validate_regime(RegimeParams(mu=mu, eps=eps, delta=delta, gamma=gamma, beta=beta, bo_inv=bo_inv))
    if r.in_ch:
        assert r.in_sw
    assert r.in_sw == (not any(v in r.violations for v in (
        "mu > 0", "mu <= mu_max", "eps >= 0", "eps <= 1", "delta > delta_min", "delta < delta_max",
        "gamma >= 0", "gamma < 1", "beta >= 0", "beta <= beta_max", "bo_inv >= 0", "bo_inv <= 1/bo_min")))
