"""Single-snapshot robust Wald detector.

Given data ``x`` and a signature ``v`` the detector forms the LS amplitude
``alpha_hat = v^H x / ||v||^2``, the residuals ``c_hat = x - alpha_hat v`` and
the truncated-lag (rectangular kernel) quadratic form

    q = sum_{|i-j| <= l} conj(v_i) c_hat_i conj(c_hat_j) v_j,

i.e. ``v^H Gamma_l v`` with ``Gamma_l[i, j] = c_hat_i conj(c_hat_j)`` inside
the band and zero outside.  The statistic is ``2 |v^H x|^2 / q`` and is
compared with ``-2 ln(pfa)``.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

DEGENERATE_EPS = 1e-12

POLICY_ERROR = "error"
POLICY_COUNT_AS_REJECT = "count_as_reject"


class DegenerateStatisticError(ArithmeticError):
    """The covariance quadratic form collapsed to (numerically) zero."""


def default_truncation_lag(n):
    """``floor(n ** 0.25)``, clamped below ``n``."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    return min(math.isqrt(math.isqrt(n)), n - 1)


def threshold_for_pfa(pfa):
    """Asymptotic threshold ``-2 ln(pfa)`` of the chi-squared(2) null law."""
    if not 0.0 < pfa < 1.0:
        raise ValueError(f"pfa must lie in (0, 1), got {pfa!r}")
    return -2.0 * math.log(pfa)


@dataclass(frozen=True)
class DetectorConfig:
    """Detector settings.

    ``truncation_lag`` is a nonnegative int or ``"auto"`` (``floor(N^(1/4))``).
    ``degenerate_policy`` is ``"error"`` (raise) or ``"count_as_reject"``
    (decide H0 and flag the outcome).
    """

    truncation_lag: Union[int, str] = "auto"
    pfa_nominal: float = 1e-2
    degenerate_policy: str = POLICY_COUNT_AS_REJECT

    def __post_init__(self):
        if not 0.0 < self.pfa_nominal < 1.0:
            raise ValueError(f"pfa_nominal must lie in (0, 1), got {self.pfa_nominal!r}")
        if self.degenerate_policy not in (POLICY_ERROR, POLICY_COUNT_AS_REJECT):
            raise ValueError(f"unknown degenerate_policy {self.degenerate_policy!r}")
        lag = self.truncation_lag
        if lag != "auto" and (isinstance(lag, bool) or int(lag) != lag or lag < 0):
            raise ValueError(f"truncation_lag must be 'auto' or an int >= 0, got {lag!r}")

    @property
    def threshold(self):
        return threshold_for_pfa(self.pfa_nominal)

    def resolve_lag(self, n):
        """Truncation lag used for a snapshot of length ``n``."""
        if self.truncation_lag == "auto":
            return default_truncation_lag(n)
        lag = int(self.truncation_lag)
        if lag >= n:
            raise ValueError(f"truncation lag {lag} must be smaller than N={n}")
        if lag > n ** (1.0 / 3.0):
            warnings.warn(
                f"truncation lag {lag} exceeds N^(1/3) = {n ** (1 / 3):.2f}; "
                "the covariance estimate may not be consistent",
                RuntimeWarning,
                stacklevel=3,
            )
        return lag


@dataclass(frozen=True)
class DetectionOutcome:
    statistic: float
    alpha_hat: complex
    denominator: float
    threshold: float
    decide_h1: bool
    degenerate: bool


def _values(v):
    return np.asarray(getattr(v, "values", v), dtype=complex)


def _check_pair(x, v):
    if x.shape[-1] != v.shape[0]:
        raise ValueError(f"length mismatch: x has {x.shape[-1]}, v has {v.shape[0]}")


def ls_estimate(x, v):
    """Least-squares amplitude ``v^H x / ||v||^2``."""
    x = np.asarray(x, dtype=complex)
    v = _values(v)
    _check_pair(x, v)
    norm2 = np.vdot(v, v).real
    if norm2 <= 0:
        raise ValueError("steering vector is zero")
    return complex(np.vdot(v, x) / norm2)


def residuals(x, v, alpha_hat):
    """``x - alpha_hat * v``."""
    x = np.asarray(x, dtype=complex)
    v = _values(v)
    _check_pair(x, v)
    return x - alpha_hat * v


def hac_quadratic_form(v, c_hat, lag):
    """``v^H Gamma_l v`` for the banded residual covariance estimate.

    Runs in ``O(N * lag)`` without forming any ``N x N`` matrix.
    """
    v = _values(v)
    c_hat = np.asarray(c_hat, dtype=complex)
    _check_pair(c_hat, v)
    n = v.shape[0]
    lag = int(lag)
    if lag < 0 or lag >= n:
        raise ValueError(f"truncation lag must satisfy 0 <= l < N={n}, got {lag}")
    u = v.conj() * c_hat
    total = np.vdot(u, u).real
    for m in range(1, lag + 1):
        total += 2.0 * np.vdot(u[:-m], u[m:]).real
    return float(total)


class WaldBatch(NamedTuple):
    """Per-row results of :func:`wald_statistic_batch`."""

    statistic: np.ndarray
    alpha_hat: np.ndarray
    denominator: np.ndarray
    degenerate: np.ndarray


def wald_statistic_batch(x, v, lag):
    """Vectorised statistic for a stack of snapshots (one per row).

    Degenerate rows get ``statistic = nan``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    v = _values(v)
    _check_pair(x, v)
    n = v.shape[0]
    if lag < 0 or lag >= n:
        raise ValueError(f"truncation lag must satisfy 0 <= l < N={n}, got {lag}")
    norm2 = np.vdot(v, v).real
    if norm2 <= 0:
        raise ValueError("steering vector is zero")
    vc = v.conj()
    proj = x @ vc
    alpha = proj / norm2
    u = (x - alpha[:, None] * v) * vc
    uc = u.conj()
    denom = np.einsum("ij,ij->i", u, uc).real
    for m in range(1, lag + 1):
        denom += 2.0 * np.einsum("ij,ij->i", u[:, m:], uc[:, :-m]).real
    xpow = np.einsum("ij,ij->i", x, x.conj()).real
    degenerate = denom <= DEGENERATE_EPS * norm2 * (xpow / n)
    with np.errstate(divide="ignore", invalid="ignore"):
        stat = np.where(degenerate, np.nan, 2.0 * np.abs(proj) ** 2 / denom)
    return WaldBatch(stat, alpha, denom, degenerate)


def wald_statistic(x, v, cfg=None):
    """Robust Wald statistic of one snapshot.

    Parameters
    ----------
    x : array_like of complex, shape (N,)
    v : SteeringVector or array_like, shape (N,)
    cfg : DetectorConfig, optional

    Returns
    -------
    DetectionOutcome
    """
    cfg = cfg if cfg is not None else DetectorConfig()
    x = np.asarray(x, dtype=complex)
    v = _values(v)
    _check_pair(x, v)
    n = v.shape[0]
    lag = cfg.resolve_lag(n)
    alpha = ls_estimate(x, v)
    denom = hac_quadratic_form(v, residuals(x, v, alpha), lag)
    norm2 = np.vdot(v, v).real
    threshold = cfg.threshold
    floor = DEGENERATE_EPS * norm2 * (np.vdot(x, x).real / n)
    if denom <= floor:
        if cfg.degenerate_policy == POLICY_ERROR:
            raise DegenerateStatisticError(
                f"covariance quadratic form {denom:g} is below the floor {floor:g}"
            )
        return DetectionOutcome(float("nan"), alpha, denom, threshold, False, True)
    stat = 2.0 * abs(np.vdot(v, x)) ** 2 / denom
    return DetectionOutcome(float(stat), alpha, denom, threshold, bool(stat > threshold), False)
