"""Exact finite-capacity error probabilities of the majority vote.

Tails are accumulated in log space: at C ~ 2000 the error probability is
far below the smallest positive double.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .probcore import DomainError, check_rate, rho_of_rate

SNAP_TOL = 1e-9


def _check_capacity(c):
    if isinstance(c, bool) or int(c) != c or c < 1:
        raise DomainError(f"capacity c={c!r} must be a positive integer")
    return int(c)


def _check_rho(rho):
    rho = float(rho)
    if not 0.0 <= rho <= 0.5:
        raise DomainError(f"combined error rho={rho!r} must satisfy 0 <= rho <= 1/2")
    return rho


def sensor_count(c, r):
    """Largest L with L * r <= c; c / r within SNAP_TOL of an integer snaps to it."""
    c = _check_capacity(c)
    r = check_rate(r, allow_zero=False)
    q = c / r
    n = round(q)
    if abs(q - n) <= SNAP_TOL:
        return int(n)
    return int(math.floor(q))


def log_binomial_pmf(n, k, rho):
    """log of C(n, k) rho^k (1 - rho)^(n - k); vectorized over k."""
    k = np.asarray(k, dtype=float)
    return (
        gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
        + xlogy(k, rho) + xlog1py(n - k, -rho)
    )


def binomial_pmf(l_trials, k, rho):
    if int(l_trials) != l_trials or l_trials < 0:
        raise DomainError(f"trial count {l_trials!r} must be a nonnegative integer")
    if int(k) != k or not 0 <= k <= l_trials:
        raise DomainError(f"k={k!r} must satisfy 0 <= k <= {l_trials}")
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho={rho!r} must lie in [0, 1]")
    return float(np.exp(log_binomial_pmf(l_trials, k, rho)))


def _log_sum(log_terms):
    # smallest terms first; fsum keeps the accumulation exact to rounding
    log_terms = np.sort(np.asarray(log_terms, dtype=float))
    top = log_terms[-1]
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(np.exp(log_terms - top)))


def _majority_terms(l, rho, wrong_side):
    # log-weights of the events that decide an error (wrong_side) or a
    # success; a tie at L/2 enters both with weight 1/2
    if wrong_side:
        ks = np.arange(l // 2 + 1, l + 1)
    else:
        ks = np.arange(0, (l + 1) // 2)
    terms = [log_binomial_pmf(l, ks, rho)]
    if l % 2 == 0:
        terms.append(np.atleast_1d(log_binomial_pmf(l, l // 2, rho) - math.log(2.0)))
    return np.concatenate(terms)


def log_error_probability(l, rho):
    """Natural log of the majority-vote error probability with fair tie-breaks."""
    if int(l) != l or l < 1:
        raise DomainError(f"sensor count l={l!r} must be a positive integer")
    rho = _check_rho(rho)
    return _log_sum(_majority_terms(int(l), rho, wrong_side=True))


def exact_error_probability(l, rho):
    """P(more than L/2 of L Bernoulli(rho) votes are wrong), ties split evenly."""
    return math.exp(log_error_probability(l, rho))


def exact_success_probability(l, rho):
    """Complement of the error, summed from the lower tail."""
    if int(l) != l or l < 1:
        raise DomainError(f"sensor count l={l!r} must be a positive integer")
    rho = _check_rho(rho)
    return math.exp(_log_sum(_majority_terms(int(l), rho, wrong_side=False)))


@dataclass(frozen=True)
class FiniteSystem:
    c: int
    r: float
    p: float
    l: int
    rho: float

    @classmethod
    def build(cls, c, r, p):
        return cls(c=_check_capacity(c), r=float(r), p=float(p),
                   l=sensor_count(c, r), rho=rho_of_rate(p, r))

    @property
    def error_probability(self):
        return exact_error_probability(self.l, self.rho)


def finite_optimal_rate(c, p, r_grid):
    """Grid rate with the smallest exact error at capacity c (ties to larger R).

    Returns ``(r, error)``.
    """
    c = _check_capacity(c)
    r_grid = [check_rate(r, allow_zero=False) for r in r_grid]
    if not r_grid:
        raise DomainError("rate grid must be nonempty")
    best = None
    for r in r_grid:
        err = FiniteSystem.build(c, r, p).error_probability
        if best is None or err < best[1] or (err == best[1] and r > best[0]):
            best = (r, err)
    return best


def empirical_decay_rate(p, r, c_list):
    """Least-squares slope of -ln P(error) against the capacity."""
    c_list = [_check_capacity(c) for c in c_list]
    if len(c_list) < 2 or any(b <= a for a, b in zip(c_list, c_list[1:])):
        raise DomainError("capacities must be an increasing list of length >= 2")
    rho = rho_of_rate(p, r)
    logs = [log_error_probability(sensor_count(c, r), rho) for c in c_list]
    if any(math.isinf(v) for v in logs):
        return math.inf
    slope, _ = np.polyfit(np.asarray(c_list, float), -np.asarray(logs), 1)
    return float(slope)
