import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from noisyagg.probcore import DomainError, rho_of_rate
from noisyagg.ratefunction import (
    alpha,
    bernoulli_rate_function,
    decay_rate,
    decay_rate_exact,
    decay_rate_gaussian,
    decay_rate_level0,
    gaussian_tail_params,
    scaled_rate_function,
)

KL_HALF_TENTH = float(oracles.kl("0.5", "0.1"))
RHO_HALF = 0.1 + 0.8 * float(oracles.distortion_rate("0.5"))
# 2 * KL(1/2 || rho_0.1(0.5)); 0.493182781829...
SCALED_HALF = 2 * float(oracles.kl("0.5", RHO_HALF))


def test_bernoulli_rate_function_zero_at_mean():
    assert bernoulli_rate_function(0.3, 0.3) == 0.0
    assert bernoulli_rate_function(0.5, 0.5) == 0.0


def test_bernoulli_rate_function_value():
    assert KL_HALF_TENTH == pytest.approx(0.510826, abs=1e-6)
    assert bernoulli_rate_function(0.5, 0.1) == pytest.approx(KL_HALF_TENTH, abs=1e-14)


@pytest.mark.parametrize("z,rho", [(0.5, 0.1), (0.7, 0.2), (0.2, 0.45), (0.9, 0.6)])
def test_bernoulli_rate_function_is_legendre_transform(z, rho):
    assert bernoulli_rate_function(z, rho) == pytest.approx(
        float(oracles.legendre_rate(z, rho)), abs=1e-12)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0, 1))
def test_bernoulli_rate_function_convex(a, b, rho, t):
    mid = t * a + (1 - t) * b
    lhs = bernoulli_rate_function(mid, rho)
    rhs = t * bernoulli_rate_function(a, rho) + (1 - t) * bernoulli_rate_function(b, rho)
    assert lhs <= rhs + 1e-12


@pytest.mark.parametrize("z,rho", [(0.0, 0.1), (1.0, 0.1), (0.5, 0.0), (0.5, 1.0)])
def test_bernoulli_rate_function_domain(z, rho):
    with pytest.raises(DomainError):
        bernoulli_rate_function(z, rho)


def test_scaled_rate_function():
    assert scaled_rate_function(rho_of_rate(0.2, 0.4), 0.2, 0.4) == 0.0
    assert scaled_rate_function(0.5, 0.1, 1.0) == pytest.approx(KL_HALF_TENTH, abs=1e-14)
    assert SCALED_HALF == pytest.approx(0.493183, abs=1e-6)
    assert scaled_rate_function(0.5, 0.1, 0.5) == pytest.approx(SCALED_HALF, abs=1e-12)


def test_decay_rate_exact_examples():
    assert decay_rate_exact(0.1, 1.0) == pytest.approx(-(math.log(2) + 0.5 * math.log(0.09)), abs=1e-14)
    assert decay_rate_exact(0.1, 1.0) == pytest.approx(0.510826, abs=1e-6)
    assert decay_rate_exact(0.0, 1.0) == math.inf
    assert decay_rate_exact(0.1, 0.5) == pytest.approx(SCALED_HALF, abs=1e-12)
    assert abs(decay_rate_exact(0.1, 0.5) - scaled_rate_function(0.5, 0.1, 0.5)) <= 1e-12


def test_decay_rate_exact_matches_log_form():
    for p in (0.0, 0.1, 0.3, 0.45):
        for r in (0.05, 0.3, 0.8):
            rho = rho_of_rate(p, r)
            direct = -(math.log(2) + 0.5 * math.log(rho) + 0.5 * math.log(1 - rho)) / r
            assert decay_rate_exact(p, r) == pytest.approx(direct, rel=1e-12)


def test_decay_rate_exact_positive_and_finite():
    for p in np.linspace(0.01, 0.49, 30):
        for r in np.linspace(0.01, 1.0, 30):
            v = decay_rate_exact(p, r)
            assert 0 < v < math.inf


def test_decay_rate_exact_rejects_zero_rate():
    with pytest.raises(DomainError):
        decay_rate_exact(0.1, 0.0)


def test_level0():
    assert decay_rate_level0(0.0) == pytest.approx(0.693147, abs=1e-6)
    assert decay_rate_level0(0.4999999) == pytest.approx(0.0, abs=1e-12)
    assert decay_rate_level0(0.1) == pytest.approx(0.443614, abs=1e-6)
    assert decay_rate_exact(0.1, 1e-6) == pytest.approx(decay_rate_level0(0.1), rel=1e-3)


@pytest.mark.parametrize("p", [0.0, 0.1, 0.2, 0.3, 0.4])
def test_level0_is_small_rate_limit(p):
    errs = [abs(decay_rate_exact(p, r) / decay_rate_level0(p) - 1) for r in (1e-2, 1e-4, 1e-6)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-3


def test_gaussian_examples():
    assert decay_rate_gaussian(0.1, 1.0) == pytest.approx(0.64 / (2 * 0.2 * 1.8), abs=1e-12)
    assert decay_rate_gaussian(0.1, 0.0) == decay_rate_level0(0.1)
    a = 1 - 2 * float(oracles.distortion_rate("0.5"))
    assert alpha(0.0, 0.5) == pytest.approx(a, abs=1e-12)
    assert a == pytest.approx(0.779944, abs=1e-6)
    assert decay_rate_gaussian(0.0, 0.5) == pytest.approx(a * a / ((1 - a) * (1 + a)), abs=1e-10)
    assert decay_rate_gaussian(0.0, 1.0) == math.inf


def test_gaussian_optimistic_at_full_rate():
    for p in np.linspace(0.01, 0.49, 40):
        assert decay_rate_gaussian(p, 1.0) >= decay_rate_exact(p, 1.0)


def test_gaussian_tail_params():
    g = gaussian_tail_params(0.1, 1.0, 1)
    assert g.lambda1 == pytest.approx(4 / 3, abs=1e-12)
    assert g.lambda2 == pytest.approx(3.0, abs=1e-12)
    assert gaussian_tail_params(0.1, 1.0, 4).lambda1 == pytest.approx(8 / 3, abs=1e-12)
    assert gaussian_tail_params(0.45, 1e-6, 10).lambda1 < 1e-3


@given(st.floats(0.0, 0.49), st.floats(0.01, 1.0), st.integers(1, 10_000))
def test_gaussian_tail_params_invariants(p, r, l):
    rho = rho_of_rate(p, r)
    if not 0 < rho < 0.5:
        return
    g = gaussian_tail_params(p, r, l)
    assert g.lambda1 < g.lambda2
    assert g.alpha ** 2 == pytest.approx(1 - 4 * rho * (1 - rho), abs=1e-12)


def test_gaussian_tail_params_domain():
    with pytest.raises(DomainError):
        gaussian_tail_params(0.1, 1.0, 0)
    with pytest.raises(DomainError):
        gaussian_tail_params(0.0, 1.0, 3)  # rho = 0


def test_decay_rate_dispatch():
    assert decay_rate(0.2, 0.0) == decay_rate_level0(0.2)
    assert decay_rate(0.2, 0.5, "gaussian") == decay_rate_gaussian(0.2, 0.5)
    with pytest.raises(ValueError):
        decay_rate(0.2, 0.5, "bogus")


def test_legendre_oracle_small_grid():
    # the full 9 x 20 grid lives in the acceptance suite
    for p in (0.0, 0.2, 0.4):
        for r in (0.1, 0.6, 1.0):
            if p == 0.0 and r == 1.0:
                continue  # rho = 0, infinite rate
            brute = oracles.golden_min(lambda z: scaled_rate_function(z, p, r), 0.5, 1 - 1e-12)
            assert abs(brute - decay_rate_exact(p, r)) <= 1e-9
