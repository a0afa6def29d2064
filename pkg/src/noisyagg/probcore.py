"""Binary entropy, the distortion-rate inverse and the combined error probability.

Entropies here are in bits.  Noise levels live in [0, 1/2), code rates in
[0, 1] and distortions in [0, 1/2].
"""
import math
from functools import lru_cache

LN2 = math.log(2.0)

_MAX_BISECTIONS = 400


class DomainError(ValueError):
    """An argument lies outside the domain of the quantity being computed."""


def check_noise(p):
    p = float(p)
    if not 0.0 <= p < 0.5:
        raise DomainError(f"noise level p={p!r} must satisfy 0 <= p < 1/2")
    return p


def check_rate(r, allow_zero=True):
    r = float(r)
    lo_ok = r >= 0.0 if allow_zero else r > 0.0
    if not (lo_ok and r <= 1.0):
        bound = "0 <= r <= 1" if allow_zero else "0 < r <= 1"
        raise DomainError(f"code rate r={r!r} must satisfy {bound}")
    return r


def check_distortion(d):
    d = float(d)
    if not 0.0 <= d <= 0.5:
        raise DomainError(f"distortion d={d!r} must satisfy 0 <= d <= 1/2")
    return d


def binary_entropy(d):
    """Entropy in bits of a Bernoulli(d) variable, with 0 log 0 = 0."""
    d = float(d)
    if not 0.0 <= d <= 1.0:
        raise DomainError(f"probability d={d!r} must lie in [0, 1]")
    if d == 0.0 or d == 1.0:
        return 0.0
    return -(d * math.log(d) + (1.0 - d) * math.log1p(-d)) / LN2


def _rate_of_gap(u):
    # 1 - H2(1/2 - u), written around the symmetry point so that small u
    # (distortion close to 1/2) keeps full relative precision
    if u >= 0.5:
        return 1.0
    a = 2.0 * u
    return ((1.0 + a) * math.log1p(a) + (1.0 - a) * math.log1p(-a)) / (2.0 * LN2)


def rate_distortion(d):
    """R(D) = 1 - H2(D) for the uniform binary source under Hamming distortion."""
    d = check_distortion(d)
    return _rate_of_gap(0.5 - d)


@lru_cache(maxsize=65536)
def distortion_gap(r):
    """Return 1/2 - D(r), found by bisection on the gap.

    Working with the gap instead of D itself keeps precision when r is
    small and D sits next to 1/2, where H2 is flat.
    """
    r = check_rate(r)
    if r == 0.0:
        return 0.0
    if r == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        # run to machine resolution: the gap shrinks like sqrt(r) near r = 0
        if mid in (lo, hi):
            break
        if _rate_of_gap(mid) < r:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def distortion_rate(r):
    """D(R): the unique d in [0, 1/2] with 1 - H2(d) = r."""
    return 0.5 - distortion_gap(r)


def combined_error(p, d):
    """Probability that a reproduced symbol disagrees with the source.

    Observation noise p and reproduction distortion d act as two
    independent flips, so rho = p(1 - d) + (1 - p) d.
    """
    p = check_noise(p)
    d = check_distortion(d)
    return p * (1.0 - d) + (1.0 - p) * d


def rho_gap(p, r):
    """1/2 - rho_p(r), via the identity 1/2 - rho = (1 - 2p)(1/2 - D)."""
    p = check_noise(p)
    return (1.0 - 2.0 * p) * distortion_gap(r)


def rho_of_rate(p, r):
    p = check_noise(p)
    r = check_rate(r, allow_zero=False)
    return combined_error(p, distortion_rate(r))
