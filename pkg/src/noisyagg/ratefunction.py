"""Decay rates of the majority-vote error probability in the capacity C.

All rates are in nats per unit capacity.  ``math.inf`` stands for an error
probability that is exactly zero (noiseless, uncompressed sensors).
"""
import math
from dataclasses import dataclass

from .probcore import (
    LN2,
    DomainError,
    check_noise,
    check_rate,
    distortion_gap,
    rho_gap,
    rho_of_rate,
)


@dataclass(frozen=True)
class GaussianApproxParams:
    alpha: float
    lambda1: float
    lambda2: float


def bernoulli_rate_function(z, rho):
    """KL divergence of Bernoulli(z) from Bernoulli(rho), in nats.

    This is the Cramer rate function of the sample mean of i.i.d.
    Bernoulli(rho) variables.
    """
    z, rho = float(z), float(rho)
    if not 0.0 < z < 1.0:
        raise DomainError(f"z={z!r} must satisfy 0 < z < 1")
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho={rho!r} must satisfy 0 < rho < 1")
    if z == rho:
        return 0.0
    return z * math.log(z / rho) + (1.0 - z) * math.log((1.0 - z) / (1.0 - rho))


def scaled_rate_function(z, p, r):
    """Rate function per unit capacity: L = C / r sensors share the capacity."""
    r = check_rate(r, allow_zero=False)
    return bernoulli_rate_function(z, rho_of_rate(p, r)) / r


def decay_rate_exact(p, r):
    """-(1/r) {ln 2 + ln(rho)/2 + ln(1 - rho)/2} with rho = rho_p(r).

    Evaluated as -log1p(-4 g^2) / (2r), g = 1/2 - rho, which equals the
    expression above and stays accurate as r -> 0.
    """
    p = check_noise(p)
    r = check_rate(r, allow_zero=False)
    g = rho_gap(p, r)
    if g >= 0.5:
        return math.inf
    return -0.5 * math.log1p(-4.0 * g * g) / r


def decay_rate_level0(p):
    p = check_noise(p)
    return (1.0 - 2.0 * p) ** 2 * LN2


def alpha(p, r):
    """(1 - 2p)(1 - 2D(r)), i.e. twice the gap 1/2 - rho."""
    return 2.0 * rho_gap(p, r)


def decay_rate_gaussian(p, r):
    """Decay rate predicted by the normal approximation of the binomial."""
    p = check_noise(p)
    r = check_rate(r)
    if r == 0.0:
        return decay_rate_level0(p)
    a = alpha(p, r)
    if a >= 1.0:
        return math.inf
    return a * a / (2.0 * r * (1.0 - a) * (1.0 + a))


def decay_rate(p, r, arm="exact"):
    """Dispatch on the arm; r = 0 always maps to the level-0 value."""
    if arm == "level0":
        return decay_rate_level0(p)
    if arm == "gaussian":
        return decay_rate_gaussian(p, r)
    if arm != "exact":
        raise ValueError(f"unknown arm {arm!r}")
    if check_rate(r) == 0.0:
        return decay_rate_level0(p)
    return decay_rate_exact(p, r)


def gaussian_tail_params(p, r, l):
    """Standardized endpoints of the normal approximation to P(errors >= L/2)."""
    if int(l) != l or l < 1:
        raise DomainError(f"sensor count l={l!r} must be a positive integer")
    rho = rho_of_rate(p, r)
    if not 0.0 < rho < 0.5:
        raise DomainError(f"combined error rho={rho!r} must satisfy 0 < rho < 1/2")
    sd = math.sqrt(rho * (1.0 - rho))
    root_l = math.sqrt(l)
    return GaussianApproxParams(
        alpha=alpha(p, r),
        lambda1=(0.5 - rho) / sd * root_l,
        lambda2=(1.0 - rho) / sd * root_l,
    )

