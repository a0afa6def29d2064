"""Optimal and pessimistic aggregation levels and the critical noise levels.

The objective over R in [0, 1] is a decay-rate arm with the R = 0 endpoint
taken from the level-0 closed form.  Unimodality is not assumed: a coarse
grid brackets the optimum, golden-section search refines it, and both
endpoints are always compared explicitly.
"""
import math
from dataclasses import dataclass

from .probcore import check_noise
from .ratefunction import decay_rate

GRID_POINTS = 1000
REFINE_TOL = 1e-9
# relative slack under which two objective values count as a tie
TIE_RTOL = 1e-13

AT_ZERO_TOL = 1e-4
# Near R = 1 the slope of D(R) vanishes only logarithmically, so for every
# p > 0 the exact maximizer sits strictly inside (0, 1); "level-1 optimal"
# therefore means "within this resolution of R = 1".
AT_ONE_TOL = 2e-4

INTERIOR, AT_ZERO, AT_ONE = "interior", "at-zero", "at-one"

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimalLevel:
    p: float
    r_star: float
    i_star: float
    boundary: str
    arm: str = "exact"


@dataclass(frozen=True)
class CriticalPoints:
    p0: float
    p1: float
    tol: float
    # p1 located independently from the sign of dI/dR at R = 1 - AT_ONE_TOL
    p1_slope: float

    @property
    def detectors_agree(self):
        return abs(self.p1 - self.p1_slope) <= 2 * self.tol


def _better(a, b, maximize):
    """True when a beats b strictly (beyond the tie slack)."""
    if a == b:
        return False
    if math.isinf(a) or math.isinf(b):
        return a > b if maximize else a < b
    slack = TIE_RTOL * max(abs(a), abs(b))
    return a > b + slack if maximize else a < b - slack


def _pick(candidates, maximize, prefer_larger):
    # candidates: (r, value); ties resolved by position in R
    ordered = sorted(candidates, key=lambda c: c[0], reverse=prefer_larger)
    best = ordered[0]
    for cand in ordered[1:]:
        if _better(cand[1], best[1], maximize):
            best = cand
    return best


def golden_section(f, lo, hi, maximize=True, tol=REFINE_TOL):
    """Golden-section search on [lo, hi]; returns (x, f(x)) of the best probe."""
    sign = -1.0 if maximize else 1.0
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = sign * f(d)
    if fc < fd:
        return c, sign * fc
    return d, sign * fd


def optimize_unit_interval(f, maximize=True, prefer_larger=None, grid_points=GRID_POINTS):
    """Global optimum of f over [0, 1] as (r, f(r)).

    Ties go to larger r when maximizing and smaller r when minimizing
    unless ``prefer_larger`` says otherwise.
    """
    if prefer_larger is None:
        prefer_larger = maximize
    grid = [k / grid_points for k in range(grid_points + 1)]
    values = [f(r) for r in grid]
    i, _ = _pick(list(enumerate(values)), maximize, prefer_larger)
    best = (grid[i], values[i])
    if math.isinf(best[1]):
        return best
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid_points)]
    candidates = [best, (0.0, values[0]), (1.0, values[-1])]
    if i > 0:
        candidates.append(golden_section(f, lo, grid[i], maximize))
    if i < grid_points:
        candidates.append(golden_section(f, grid[i], hi, maximize))
    return _pick(candidates, maximize, prefer_larger)


def classify(r):
    if r < AT_ZERO_TOL:
        return AT_ZERO
    if r > 1.0 - AT_ONE_TOL:
        return AT_ONE
    return INTERIOR


def optimal_level(p, which="exact"):
    """R* = argmax of the selected decay-rate arm over [0, 1]."""
    p = check_noise(p)
    if which not in ("exact", "gaussian"):
        raise ValueError(f"unknown arm {which!r}")
    r, i = optimize_unit_interval(lambda r: decay_rate(p, r, which), maximize=True)
    return OptimalLevel(p, r, i, classify(r), which)


def pessimistic_level(p):
    """R-dagger = argmin of the exact decay rate over [0, 1], R = 0 included."""
    p = check_noise(p)
    r, i = optimize_unit_interval(lambda r: decay_rate(p, r), maximize=False)
    return OptimalLevel(p, r, i, classify(r), "exact")


def level_one_slope(p, at=None, h=1e-7):
    """Central finite difference of the exact decay rate at R = ``at``.

    A rising curve at 1 - AT_ONE_TOL puts the maximizer inside the level-1
    window (given a single hump near R = 1).
    """
    if at is None:
        at = 1.0 - AT_ONE_TOL
    return (decay_rate(p, at + h) - decay_rate(p, at - h)) / (2.0 * h)


def _bisect(pred, lo, hi, tol):
    # pred(lo) is False, pred(hi) is True
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def critical_points(tol=1e-6):
    """Noise thresholds p1 < p0 separating the three optimal regimes.

    p0 is where the level-0 endpoint starts winning, p1 where the optimum
    leaves the level-1 window.  Both come from bisection in p.
    """
    p0 = _bisect(lambda p: optimal_level(p).boundary == AT_ZERO, 0.05, 0.45, tol)
    p1 = _bisect(lambda p: optimal_level(p).boundary != AT_ONE, 1e-4, 0.2, tol)
    p1_slope = _bisect(lambda p: level_one_slope(p) < 0.0, 1e-4, 0.2, tol)
    return CriticalPoints(p0=p0, p1=p1, tol=tol, p1_slope=p1_slope)


def sweep_noise(p_grid, arms=("exact", "gaussian")):
    """Rows of R*, R-dagger and the decay rates at them, one per noise level."""
    p_grid = [check_noise(p) for p in p_grid]
    if any(b <= a for a, b in zip(p_grid, p_grid[1:])):
        raise ValueError("noise grid must be strictly increasing")
    rows = []
    for p in p_grid:
        row = {"p": p}
        if "exact" in arms:
            best = optimal_level(p)
            worst = pessimistic_level(p)
            row.update(
                r_star=best.r_star,
                r_dagger=worst.r_star,
                i_star=best.i_star,
                i_dagger=worst.i_star,
                boundary=best.boundary,
            )
        if "gaussian" in arms:
            gauss = optimal_level(p, "gaussian")
            row.update(r_star_gauss=gauss.r_star, i_star_gauss=gauss.i_star)
        rows.append(row)
    return rows
