"""Deterministic Monte Carlo estimation of false-alarm and detection rates.

Random streams
--------------
Trial ``t`` of an experiment seeded with ``seed`` draws from a Philox4x64
counter-based generator keyed with the 128-bit value

    key = (splitmix64(seed) << 64) | t

where ``splitmix64`` is the standard 64-bit finaliser (Steele, Lea & Flood).
The trial index occupies the low key word, so no two trials of an experiment
share a stream, and every trial's draws are independent of how trials are
partitioned across workers.  Tallies are plain sums, so results do not depend
on worker count or execution order.

Statistic samples kept for the KS diagnostic are capped by bottom-k sampling
on a per-trial priority ``splitmix64(splitmix64(seed ^ SALT) ^ t)``; the
retained set is again independent of the partition.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np
from scipy import stats

from .detector import (
    POLICY_ERROR,
    DegenerateStatisticError,
    DetectorConfig,
    WaldBatch,
    wald_statistic_batch,
)
from .disturbance import ArSpec, CgSpec, clutter_autocovariance, clutter_power, generate_clutter
from .geometry import ArrayConfig, SteeringVector, identifiable_steering, ula_steering
from .theory import AsymptoticPrediction, chi2_2_cdf, noncentrality

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_PRIORITY_SALT = 0xD1B54A32D192ED03

SAMPLE_CAP = 100_000
CHUNK = 128


def splitmix64(x):
    """SplitMix64 finaliser on Python ints (mod 2**64)."""
    z = (int(x) + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _splitmix64_array(x):
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = x + np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def trial_stream(seed, trial):
    """Independent generator for trial ``trial`` of experiment ``seed``."""
    key = (splitmix64(seed) << 64) | (int(trial) & MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed, label):
    """Child experiment seed, e.g. one per grid point of a sweep."""
    return splitmix64(splitmix64(seed) ^ (int(label) & MASK64))


def trial_priorities(seed, trials):
    base = np.uint64(splitmix64(int(seed) ^ _PRIORITY_SALT))
    return _splitmix64_array(base ^ np.asarray(trials, dtype=np.uint64))


@dataclass(frozen=True)
class Scenario:
    """One experimental condition.

    ``snr_db=None`` means H0 (clutter only).  Otherwise the target amplitude
    is real positive with ``|alpha|^2 = 10^(snr_db/10)``, which requires unit
    power clutter.  ``array=None`` selects the identifiable ULA geometry with
    orthonormal waveforms, whose signature depends on ``N`` only.
    """

    name: str
    clutter: Union[ArSpec, CgSpec]
    nu: float = 0.0
    array: Optional[ArrayConfig] = None
    snr_db: Optional[float] = None
    detector: DetectorConfig = field(default_factory=DetectorConfig)

    def __post_init__(self):
        if self.snr_db is not None and abs(clutter_power(self.clutter) - 1.0) > 1e-9:
            raise ValueError("SNR is defined for unit-power clutter; normalise the clutter")

    @property
    def alpha(self):
        return 0.0 if self.snr_db is None else 10.0 ** (self.snr_db / 20.0)

    def steering(self, n):
        if self.array is None:
            return SteeringVector(ula_steering(self.nu, n), float(self.nu))
        if self.array.n != n:
            raise ValueError(f"array has {self.array.n} virtual channels, asked for {n}")
        return identifiable_steering(self.nu, self.array)

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class ExperimentResult:
    scenario: str
    nu: float
    snr_db: Optional[float]
    n: int
    trials: int
    detections: int
    degenerates: int
    p_hat: float
    ci_low: float
    ci_high: float
    ks_to_chi2: Optional[float]
    predicted: Optional[AsymptoticPrediction]
    seed: int
    samples: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


def wilson_interval(successes, trials, confidence=0.95):
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError("need 0 <= successes <= trials and trials >= 1")
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials))
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return float(low), float(high)


def ks_distance(samples, reference_cdf):
    """Sup-norm distance between the empirical CDF of ``samples`` and
    ``reference_cdf`` (a vectorised callable)."""
    x = np.sort(np.asarray(samples, dtype=float))
    m = x.shape[0]
    if m == 0:
        raise ValueError("ks_distance needs at least one sample")
    f = np.asarray(reference_cdf(x), dtype=float)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - f), np.max(f - (i - 1) / m)))


def _simulate_chunk(scenario, n, seed, lo, hi):
    v = scenario.steering(n)
    lag = scenario.detector.resolve_lag(n)
    x = np.empty((hi - lo, n), dtype=complex)
    for row, t in enumerate(range(lo, hi)):
        x[row] = generate_clutter(scenario.clutter, n, trial_stream(seed, t))
    if scenario.snr_db is not None:
        x += scenario.alpha * v.values
    return wald_statistic_batch(x, v, lag)


def _tally_chunk(args):
    scenario, n, seed, lo, hi, keep = args
    batch = _simulate_chunk(scenario, n, seed, lo, hi)
    threshold = scenario.detector.threshold
    ok = ~batch.degenerate
    detections = int(np.count_nonzero(batch.statistic[ok] > threshold))
    degenerates = int(np.count_nonzero(batch.degenerate))
    if not keep:
        return detections, degenerates, None, None
    idx = np.arange(lo, hi)[ok]
    prio = trial_priorities(seed, idx)
    stat = batch.statistic[ok]
    if prio.shape[0] > SAMPLE_CAP:
        sel = np.argpartition(prio, SAMPLE_CAP)[:SAMPLE_CAP]
        prio, stat = prio[sel], stat[sel]
    return detections, degenerates, prio, stat


def _chunks(trials, chunk=CHUNK):
    return [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]


def _check_degenerate_policy(scenario, degenerates):
    if degenerates and scenario.detector.degenerate_policy == POLICY_ERROR:
        raise DegenerateStatisticError(f"{degenerates} degenerate trial(s)")


def simulate(scenario, n, trials, seed):
    """All per-trial detector outputs (statistic, LS amplitude, denominator,
    degenerate flag) for trials ``0..trials-1``, concatenated in trial order."""
    parts = [_simulate_chunk(scenario, n, seed, lo, hi) for lo, hi in _chunks(trials)]
    return WaldBatch(*(np.concatenate(col) for col in zip(*parts)))


def predict(scenario, n):
    """Asymptotic Pfa/Pd for the scenario at ``N = n``."""
    pfa = scenario.detector.pfa_nominal
    if scenario.snr_db is None:
        return AsymptoticPrediction.for_pfa(pfa, 0.0)
    acov = clutter_autocovariance(scenario.clutter, n - 1)
    varsigma = noncentrality(scenario.alpha, scenario.steering(n), acov)
    return AsymptoticPrediction.for_pfa(pfa, varsigma)


def run_trials(scenario, n, trials, seed, workers=1, retain_samples=False):
    """Monte Carlo estimate of the decision probability for one condition.

    Parameters
    ----------
    scenario : Scenario
    n : int
        Number of virtual channels (>= 2).
    trials : int
    seed : int
        64-bit experiment seed.
    workers : int
        Worker processes; results are identical for any value.
    retain_samples : bool
        Attach the (capped) statistic samples to the result.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    seed = int(seed) & MASK64
    keep = scenario.snr_db is None or retain_samples
    tasks = [(scenario, n, seed, lo, hi, keep) for lo, hi in _chunks(trials)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_tally_chunk, tasks))
    else:
        parts = [_tally_chunk(t) for t in tasks]

    detections = sum(p[0] for p in parts)
    degenerates = sum(p[1] for p in parts)
    _check_degenerate_policy(scenario, degenerates)

    samples = None
    if keep:
        prio = np.concatenate([p[2] for p in parts])
        stat = np.concatenate([p[3] for p in parts])
        if prio.shape[0] > SAMPLE_CAP:
            sel = np.argpartition(prio, SAMPLE_CAP)[:SAMPLE_CAP]
            prio, stat = prio[sel], stat[sel]
        # canonical order so retained samples are partition independent
        samples = stat[np.argsort(prio, kind="stable")]

    ks = None
    if scenario.snr_db is None and samples is not None and samples.size:
        ks = ks_distance(samples, chi2_2_cdf)

    low, high = wilson_interval(detections, trials)
    return ExperimentResult(
        scenario=scenario.name,
        nu=float(scenario.nu),
        snr_db=scenario.snr_db,
        n=int(n),
        trials=int(trials),
        detections=detections,
        degenerates=degenerates,
        p_hat=detections / trials,
        ci_low=low,
        ci_high=high,
        ks_to_chi2=ks,
        predicted=predict(scenario, n),
        seed=seed,
        samples=samples if retain_samples else None,
    )


def sweep(scenario, n_grid, trials, seed, workers=1, retain_samples=False):
    """One :func:`run_trials` per grid point, each with a seed derived from
    ``(seed, n)``.  Results are ordered by ``n``."""
    n_grid = [int(n) for n in n_grid]
    if not n_grid:
        raise ValueError("n_grid must not be empty")
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be strictly ascending")
    return [
        run_trials(scenario, n, trials, derive_seed(seed, n), workers, retain_samples)
        for n in n_grid
    ]
