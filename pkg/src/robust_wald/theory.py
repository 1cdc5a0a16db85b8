"""Asymptotic reference curves.

Under H0 the statistic tends to a central chi-squared law with two degrees of
freedom; under H1 to a noncentral one with noncentrality
``2 |alpha|^2 ||v||^4 / (v^H Gamma v)``, whose tail is the Marcum Q function
of order one.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .detector import threshold_for_pfa

# Poisson window half-width in standard deviations; mass outside < 1e-20
_POISSON_SPAN = 12.0


def chi2_2_sf(t):
    """Survival function ``exp(-t/2)`` of chi-squared with 2 dof."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("chi-squared argument must be nonnegative")
    out = np.exp(-0.5 * t)
    return out if out.ndim else float(out)


def chi2_2_cdf(t):
    """CDF ``1 - exp(-t/2)``; clips negative arguments to 0."""
    t = np.maximum(np.asarray(t, dtype=float), 0.0)
    out = -np.expm1(-0.5 * t)
    return out if out.ndim else float(out)


def marcum_q1(a, b):
    """Marcum Q function of order one, ``Q_1(a, b)``.

    Evaluated as a Poisson(``a^2/2``) mixture of regularised upper incomplete
    gamma functions ``Q(k + 1, b^2/2)``.  The mixture is truncated to the
    Poisson window carrying all but ~1e-20 of the mass; when the result
    exceeds one half the complementary sum is used so values near 1 keep
    full absolute accuracy.
    """
    a = float(a)
    b = float(b)
    if a < 0 or b < 0:
        raise ValueError("Marcum Q arguments must be nonnegative")
    mu = 0.5 * a * a
    y = 0.5 * b * b
    if b == 0.0:
        return 1.0
    if mu == 0.0:
        return math.exp(-y)
    half = _POISSON_SPAN * math.sqrt(mu) + 30.0
    k = np.arange(max(0, int(mu - half)), int(mu + half) + 1, dtype=float)
    weights = np.exp(k * math.log(mu) - mu - special.gammaln(k + 1.0))
    upper = special.gammaincc(k + 1.0, y)
    q = float(np.sum(weights * upper))
    if q > 0.5:
        lower = special.gammainc(k + 1.0, y)
        q = 1.0 - float(np.sum(weights * lower))
    return min(max(q, 0.0), 1.0)


def toeplitz_quadratic_form(v, acov):
    """``v^H Gamma v`` with ``Gamma[i, j] = r[i - j]`` (lags beyond the
    autocovariance horizon treated as zero), in ``O(N L)``."""
    v = np.asarray(getattr(v, "values", v), dtype=complex)
    r = acov.values
    n = v.shape[0]
    total = r[0].real * np.vdot(v, v).real
    for m in range(1, min(acov.max_lag, n - 1) + 1):
        # sum_n conj(v_n) v_{n-m} r[m]
        total += 2.0 * (r[m] * np.vdot(v[m:], v[:-m])).real
    return float(total)


def noncentrality(alpha, v, gamma):
    """``2 |alpha|^2 ||v||^4 / (v^H Gamma v)``.

    ``gamma`` is either an :class:`~robust_wald.disturbance.Autocovariance`
    (Toeplitz path) or an explicit Hermitian matrix.
    """
    v = np.asarray(getattr(v, "values", v), dtype=complex)
    if hasattr(gamma, "values") and hasattr(gamma, "max_lag"):
        quad = toeplitz_quadratic_form(v, gamma)
    else:
        gamma = np.asarray(gamma, dtype=complex)
        if gamma.shape != (v.shape[0], v.shape[0]):
            raise ValueError("covariance matrix does not match steering vector")
        quad = float(np.vdot(v, gamma @ v).real)
    if not quad > 0:
        raise ValueError(f"v^H Gamma v must be positive, got {quad:g}")
    norm2 = np.vdot(v, v).real
    return 2.0 * abs(alpha) ** 2 * norm2 ** 2 / quad


def asymptotic_pd(varsigma, threshold):
    """Limiting detection probability ``Q_1(sqrt(varsigma), sqrt(threshold))``."""
    if varsigma < 0 or threshold < 0:
        raise ValueError("noncentrality and threshold must be nonnegative")
    return marcum_q1(math.sqrt(varsigma), math.sqrt(threshold))


@dataclass(frozen=True)
class AsymptoticPrediction:
    pfa: float
    pd: float
    varsigma: float
    threshold: float

    @classmethod
    def for_pfa(cls, pfa, varsigma=0.0):
        threshold = threshold_for_pfa(pfa)
        return cls(chi2_2_sf(threshold), asymptotic_pd(varsigma, threshold), varsigma, threshold)
