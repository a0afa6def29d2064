"""Monte Carlo simulation of noisy sensing, idealized lossy coding and majority vote.

Lossy coding is replaced by its rate-distortion test channel: every
reproduced symbol is the observation flipped independently with
probability D(R).  Each trial is one source symbol.

Randomness contract (part of the output format):

* a scan point ``i`` of a run seeded with ``seed`` uses
  ``point_seed = mix_seed(seed, i)`` (a single estimate uses ``seed`` as is);
* trials are cut into chunks of ``CHUNK`` consecutive trials, and chunk
  ``k`` draws from ``PCG64(SeedSequence(point_seed, spawn_key=(k,)))``.

Results therefore do not depend on how chunks are scheduled.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .finite import exact_error_probability, sensor_count
from .probcore import DomainError, check_noise, check_rate, distortion_rate, rho_of_rate

CHUNK = 1 << 16
Z95 = 1.959963984540054
MIN_USABLE_TRIALS = 30

_MASK64 = (1 << 64) - 1


def mix_seed(seed, index):
    """SplitMix64 finalizer applied to seed + (index + 1) * golden gamma."""
    z = (int(seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def chunk_rng(point_seed, k):
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(int(point_seed), spawn_key=(k,))))


@dataclass(frozen=True)
class SimConfig:
    c: int
    r: float
    p: float
    trials: int
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.c, bool) or int(self.c) != self.c or self.c < 1:
            raise DomainError(f"capacity c={self.c!r} must be a positive integer")
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials={self.trials!r} must be a positive integer")
        if not 0 <= int(self.seed) <= _MASK64:
            raise DomainError(f"seed={self.seed!r} must be a 64-bit unsigned integer")
        check_rate(self.r, allow_zero=False)
        check_noise(self.p)


@dataclass(frozen=True)
class SimResult:
    error_count: int
    trials: int
    p_hat: float
    ci_halfwidth: float
    l_used: int
    # (errors, trials) split by the transmitted symbol: x = +1, then x = -1
    by_symbol: tuple = field(default=((0, 0), (0, 0)), compare=True)

    @property
    def usable(self):
        return self.trials >= MIN_USABLE_TRIALS


def ci95_halfwidth(errors, trials):
    """Normal-approximation 95% half-width.

    The plug-in proportion is (k + 1/2) / (n + 1) so that all-zero or
    all-one counts still report a nonzero width.
    """
    q = (errors + 0.5) / (trials + 1.0)
    return Z95 * math.sqrt(q * (1.0 - q) / trials)


def sensor_reproductions(x, l, p, d, rng):
    """Reproduced symbols of ``l`` sensors: source flipped by noise, then by coding."""
    y = np.where(rng.random(l) < p, -x, x)
    return np.where(rng.random(l) < d, -y, y)


def majority(votes, rng):
    s = int(np.sum(votes))
    if s == 0:
        return 1 if rng.random() < 0.5 else -1
    return 1 if s > 0 else -1


def simulate_trial(x, l, p, d, rng):
    """Estimate of source symbol ``x`` from ``l`` independently coded sensors."""
    if l < 1:
        raise DomainError(f"sensor count l={l!r} must be positive")
    return majority(sensor_reproductions(x, l, p, d, rng), rng)


def _run_chunk(point_seed, k, n, l, p, d):
    rng = chunk_rng(point_seed, k)
    x = 2 * rng.integers(0, 2, size=n) - 1
    # exchangeable sensors: only how many of the L votes are wrong matters.
    # Noise flips ~ Bin(L, p); a noisy reading stays wrong unless the coder
    # flips it back, a clean one becomes wrong if the coder flips it.
    noisy = rng.binomial(l, p, size=n)
    wrong = rng.binomial(noisy, 1.0 - d) + rng.binomial(l - noisy, d)
    coin = rng.integers(0, 2, size=n)
    margin = l - 2 * wrong
    err = (margin < 0) | ((margin == 0) & (coin == 1))
    pos = x == 1
    return (int(np.count_nonzero(err & pos)), int(np.count_nonzero(pos)),
            int(np.count_nonzero(err & ~pos)), n - int(np.count_nonzero(pos)))


def _run_chunk_per_sensor(point_seed, k, n, l, p, d):
    rng = chunk_rng(point_seed, k)
    counts = [0, 0, 0, 0]
    for _ in range(n):
        x = 1 if rng.random() < 0.5 else -1
        wrong = simulate_trial(x, l, p, d, rng) != x
        slot = 0 if x == 1 else 2
        counts[slot] += wrong
        counts[slot + 1] += 1
    return tuple(counts)


def estimate_error(cfg, workers=1, per_sensor=False, point_seed=None):
    """Empirical majority-vote error rate for a configuration.

    ``per_sensor`` draws every sensor's two flips explicitly (slow,
    reference path); the default samples the wrong-vote count directly,
    which has the same distribution.
    """
    l = sensor_count(cfg.c, cfg.r)
    d = distortion_rate(cfg.r)
    seed = cfg.seed if point_seed is None else point_seed
    sizes = [min(CHUNK, cfg.trials - s) for s in range(0, cfg.trials, CHUNK)]
    run = _run_chunk_per_sensor if per_sensor else _run_chunk
    jobs = [(seed, k, n, l, cfg.p, d) for k, n in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: run(*a), jobs))
    else:
        parts = [run(*a) for a in jobs]
    e_pos, n_pos, e_neg, n_neg = (sum(col) for col in zip(*parts))
    errors = e_pos + e_neg
    return SimResult(
        error_count=errors,
        trials=cfg.trials,
        p_hat=errors / cfg.trials,
        ci_halfwidth=ci95_halfwidth(errors, cfg.trials),
        l_used=l,
        by_symbol=((e_pos, n_pos), (e_neg, n_neg)),
    )


@dataclass(frozen=True)
class RateScan:
    rows: list
    r_best: float
    # grid rates whose error rate cannot be told apart from the best one
    indistinguishable: list


def empirical_rate_scan(c, p, r_grid, trials, seed, workers=1):
    """Simulated error rate over a rate grid, with the exact value alongside."""
    r_grid = [check_rate(r, allow_zero=False) for r in r_grid]
    if not r_grid:
        raise DomainError("rate grid must be nonempty")
    rows = []
    for i, r in enumerate(r_grid):
        cfg = SimConfig(c=c, r=r, p=p, trials=trials, seed=seed)
        res = estimate_error(cfg, workers=workers, point_seed=mix_seed(seed, i))
        rows.append({
            "r": r,
            "l": res.l_used,
            "rho": rho_of_rate(p, r),
            "p_hat": res.p_hat,
            "ci95": res.ci_halfwidth,
            "p_exact": exact_error_probability(res.l_used, rho_of_rate(p, r)),
            "usable": res.usable,
        })
    best = min(rows, key=lambda row: (row["p_hat"], -row["r"]))
    close = [
        row["r"] for row in rows
        if row is not best and abs(row["p_hat"] - best["p_hat"])
        <= math.hypot(row["ci95"], best["ci95"])
    ]
    return RateScan(rows=rows, r_best=best["r"], indistinguishable=close)
