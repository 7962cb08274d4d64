from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hecke_lowzeros.density import TestFunction, WeightFunction, family
from hecke_lowzeros.errors import DomainError, RangeError
from hecke_lowzeros.ratios import (
    EPS0,
    A,
    A_alpha_diag,
    J,
    J_direct,
    J_integrand,
    JContext,
    RatiosPrediction,
    predicted_density,
    prime_sum_identity_check,
)
from hecke_lowzeros.special import zeta_K_logderiv

FEJER = TestFunction("fejer", 0.8)
BUMP = TestFunction("bump", 0.5)
cplx = st.builds(complex, st.floats(-0.4, 1.0), st.floats(-5.0, 5.0))


@given(cplx)
def test_A_special_values(r):
    assert abs(A(r, r) - 1) < 1e-12
    assert abs(A(-r, r) - (2 - 2 ** (2 * r))) < 1e-12


@given(cplx)
def test_A_alpha_matches_finite_difference(r):
    h = 1e-6
    fd = (A(r + h, r) - A(r - h, r)) / (2 * h)
    assert abs(fd - A_alpha_diag(r)) < 1e-6


def test_A_poles():
    with pytest.raises(DomainError):
        A(-0.5, -0.5)
    with pytest.raises(DomainError):
        A_alpha_diag(-0.5)


def test_two_adic_factor_is_the_even_prime_term():
    # A_alpha(r, r) is exactly the norm-2 summand of the prime-sum identity
    for r in (0.1, 0.3 + 2j):
        assert abs(A_alpha_diag(r) - math.log(2) / (2 ** (1 + 2 * r) - 1)) < 1e-14


@pytest.fixture(scope="module")
def identity_runs():
    return {r: prime_sum_identity_check(r) for r in (0.07, 0.1, 0.15, 0.2, 0.25 - 1e-9)}


def test_prime_sum_identity_at_tenth(identity_runs):
    c = identity_runs[0.1]
    assert c.defect <= 1e-4
    assert c.lhs == pytest.approx(float((A_alpha_diag(0.1) + zeta_K_logderiv(1.2)).real))


def test_identity_defect_decreases_with_r(identity_runs):
    d = [identity_runs[r].defect for r in sorted(identity_runs)]
    assert all(a > b for a, b in zip(d, d[1:]))


def test_identity_complex_argument():
    c = prime_sum_identity_check(0.15 + 1j, cap=2_000_000)
    assert abs(c.lhs - c.rhs) < 1e-3


def test_identity_domain():
    for r in (0.05, 0.3, -0.1):
        with pytest.raises(DomainError):
            prime_sum_identity_check(r)


def test_integrand_is_even_and_continuous_at_origin():
    t = np.array([0.0, EPS0 / 2, EPS0 * (1 - 1e-9), EPS0 * (1 + 1e-9), 0.3])
    v = J_integrand(1000, t, 1e4, FEJER)
    assert np.allclose(J_integrand(1000, -t, 1e4, FEJER), v)
    assert abs(v[2] - v[3]) < 1e-6
    assert np.all(np.isfinite(v))


def test_decomposition_matches_direct_quadrature():
    X, n = 1e4, 15013
    ctx = JContext(BUMP, X, t_cut=150.0)
    assert J(n, BUMP, X, ctx) == pytest.approx(J_direct(n, BUMP, X, 150.0), abs=1e-9)


def test_prediction_moves_toward_symplectic_limit():
    vals = [J(int(1.5 * X), FEJER, X, JContext(FEJER, X, 150.0)) for X in (1e3, 1e4, 1e5)]
    assert vals[0] > vals[1] > vals[2] > FEJER.usp_limit


def test_predicted_density_round_trip():
    X = 1e3
    w = WeightFunction()
    pred = predicted_density(family(X, w), w, FEJER, X, ctx=JContext(FEJER, X, 150.0), config_hash="h")
    assert pred.recompute() == pytest.approx(pred.weighted_average, abs=1e-15)
    assert pred.quadrature_error_estimate < 1e-5
    back = RatiosPrediction.from_json(pred.to_json())
    assert back == pred
    with pytest.raises(RangeError):
        predicted_density([], w, FEJER, X)


def test_context_memoises_by_norm():
    ctx = JContext(FEJER, 1e3, 150.0)
    a, _ = ctx.values([1009, 1013, 1009])
    assert a[0] == a[2] and len(ctx._memo) == 2
    with pytest.raises(DomainError):
        JContext(FEJER, 1.0)
