"""Correlated, possibly heavy-tailed clutter.

Two families are provided:

* circular stable AR(p) processes ``c_k = sum_i rho_i c_{k-i} + w_k`` driven
  by i.i.d. complex Gaussian or complex-t innovations;
* compound-Gaussian vectors ``sqrt(tau) * s`` with Gaussian AR speckle and an
  inverse-gamma texture of unit mean.

Alongside the generators the module exposes the exact second-order
analytics of the AR model (power spectral density, autocovariance) which the
detector and theory modules use as ground truth.

Autocovariance convention: ``r[m] = E{c_n conj(c_{n-m})}``, so
``r[-m] = conj(r[m])`` and the covariance matrix is ``Gamma[i, j] = r[i - j]``.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.signal import lfilter

STABILITY_MARGIN = 1e-9
MIN_BURN_IN = 1000

COMPLEX_GAUSSIAN = "complex_gaussian"
COMPLEX_T = "complex_t"


class StabilityReport(NamedTuple):
    stable: bool
    root_moduli: np.ndarray


def _as_rho(rho):
    rho = np.atleast_1d(np.asarray(rho, dtype=complex))
    if rho.ndim != 1:
        raise ValueError("AR coefficients must be a vector")
    return rho


def check_stability(rho):
    """Check that all roots of ``z^p - rho_1 z^{p-1} - ... - rho_p`` are inside
    the unit disk by at least ``STABILITY_MARGIN``.

    Returns
    -------
    StabilityReport
        ``(stable, root_moduli)``; ``root_moduli`` is sorted descending and
        empty for ``p = 0``.
    """
    rho = _as_rho(rho)
    if rho.size == 0:
        return StabilityReport(True, np.empty(0))
    mods = np.sort(np.abs(np.roots(np.concatenate(([1.0], -rho)))))[::-1]
    return StabilityReport(bool(np.all(mods < 1.0 - STABILITY_MARGIN)), mods)


def coefficients_from_poles(poles):
    """AR coefficients whose characteristic polynomial has the given roots."""
    poles = _as_rho(poles)
    if poles.size == 0:
        return np.empty(0, dtype=complex)
    return -np.poly(poles)[1:].astype(complex)


@dataclass(frozen=True)
class InnovationSpec:
    """Distribution of the i.i.d. circular driving noise.

    ``kind`` is ``"complex_gaussian"`` or ``"complex_t"``.  ``sigma_w2`` is
    ``E|w|^2``; ``shape_lambda`` (> 1) controls the tails of the complex-t law.
    """

    kind: str = COMPLEX_GAUSSIAN
    sigma_w2: float = 1.0
    shape_lambda: float = None

    def __post_init__(self):
        if self.kind not in (COMPLEX_GAUSSIAN, COMPLEX_T):
            raise ValueError(f"unknown innovation kind {self.kind!r}")
        if not self.sigma_w2 > 0:
            raise ValueError(f"sigma_w2 must be positive, got {self.sigma_w2!r}")
        if self.kind == COMPLEX_T:
            if self.shape_lambda is None or not self.shape_lambda > 1:
                raise ValueError("complex_t innovations need shape_lambda > 1")


@dataclass(frozen=True)
class ArSpec:
    """Stable circular AR(p) clutter.

    Parameters
    ----------
    rho : array_like of complex
        Coefficients ``rho_1..rho_p``.  Empty for white clutter.
    innovation : InnovationSpec
    normalize_unit_power : bool
        Scale the process (and every analytic quantity reported with it) so
        that ``r[0] = 1``.
    """

    rho: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    innovation: InnovationSpec = field(default_factory=InnovationSpec)
    normalize_unit_power: bool = False

    def __post_init__(self):
        rho = _as_rho(self.rho)
        rep = check_stability(rho)
        if not rep.stable:
            raise ValueError(
                f"AR coefficients are not stable: largest root modulus "
                f"{rep.root_moduli[0]:.6g}"
            )
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_poles(cls, poles, innovation=None, normalize_unit_power=False):
        """Build the spec from the roots of the characteristic polynomial."""
        return cls(
            coefficients_from_poles(poles),
            innovation if innovation is not None else InnovationSpec(),
            normalize_unit_power,
        )

    @property
    def order(self):
        return self.rho.shape[0]

    @property
    def poles(self):
        if self.order == 0:
            return np.empty(0, dtype=complex)
        return np.roots(np.concatenate(([1.0], -self.rho)))

    @cached_property
    def max_root_modulus(self):
        rep = check_stability(self.rho)
        return float(rep.root_moduli[0]) if self.order else 0.0

    @cached_property
    def burn_in(self):
        """Transient discarded before the returned samples."""
        if self.order == 0:
            return MIN_BURN_IN
        need = math.ceil(10 * self.order / (1.0 - self.max_root_modulus))
        return max(MIN_BURN_IN, need)

    @cached_property
    def raw_power(self):
        """``r[0]`` of the un-normalised process."""
        return float(_yule_walker(self.rho, self.innovation.sigma_w2)[0].real)

    @cached_property
    def scale(self):
        """Amplitude factor applied to the raw process."""
        if self.normalize_unit_power:
            return 1.0 / math.sqrt(self.raw_power)
        return 1.0


@dataclass(frozen=True)
class CgSpec:
    """Compound-Gaussian clutter ``sqrt(tau) * s``.

    The speckle ``s`` is a Gaussian AR process with ``CN(0, 1)`` innovations
    and coefficients ``speckle_rho``; the texture ``tau`` is inverse-gamma
    with shape ``texture_shape`` (> 1) and unit mean, drawn once per vector.
    """

    speckle_rho: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    texture_shape: float = 3.0
    normalize_unit_power: bool = False

    def __post_init__(self):
        if not self.texture_shape > 1:
            raise ValueError("inverse-gamma texture needs shape > 1 for unit mean")
        # validates stability
        object.__setattr__(self, "speckle_rho", self.speckle.rho)

    @cached_property
    def speckle(self):
        return ArSpec(
            self.speckle_rho,
            InnovationSpec(COMPLEX_GAUSSIAN, 1.0),
            self.normalize_unit_power,
        )


@dataclass(frozen=True)
class Autocovariance:
    """Lags ``r[0..L]`` of a circular stationary process."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.atleast_1d(np.asarray(self.values, dtype=complex))
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("autocovariance needs at least lag 0")
        if not vals[0].real > 0 or abs(vals[0].imag) > 1e-12 * abs(vals[0]):
            raise ValueError("r[0] must be real and positive")
        vals = vals.copy()
        vals[0] = vals[0].real
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def max_lag(self):
        return self.values.shape[0] - 1

    @property
    def power(self):
        return float(self.values[0].real)

    def toeplitz(self, size=None):
        """Dense Hermitian Toeplitz matrix ``Gamma[i, j] = r[i - j]``.

        Lags beyond ``max_lag`` are zero.
        """
        size = self.max_lag + 1 if size is None else int(size)
        col = np.zeros(size, dtype=complex)
        k = min(size, self.max_lag + 1)
        col[:k] = self.values[:k]
        i, j = np.indices((size, size))
        d = i - j
        return np.where(d >= 0, col[np.abs(d)], col[np.abs(d)].conj())


def _yule_walker(rho, sigma_w2):
    """Solve for ``r[0..p]`` from ``r[k] = sum_i rho_i r[k-i] + sigma_w2 delta_k``.

    ``r[-m] = conj(r[m])`` makes the system real-linear rather than
    complex-linear, so it is solved over the real and imaginary parts.
    """
    p = rho.shape[0]
    m = p + 1
    # unknown vector [Re r_0..r_p, Im r_0..r_p]
    a = np.zeros((2 * m, 2 * m))
    b = np.zeros(2 * m)
    for k in range(m):
        # real-linear map: r[k] - sum_i rho_i r[k-i]
        coef = np.zeros(m, dtype=complex)   # multiplies r[j]
        ccoef = np.zeros(m, dtype=complex)  # multiplies conj(r[j])
        coef[k] += 1.0
        for i in range(1, p + 1):
            lag = k - i
            if lag >= 0:
                coef[lag] -= rho[i - 1]
            else:
                ccoef[-lag] -= rho[i - 1]
        # coef*(x+jy) + ccoef*(x-jy)
        re_x = (coef + ccoef).real
        re_y = (-coef.imag + ccoef.imag)
        im_x = (coef + ccoef).imag
        im_y = (coef.real - ccoef.real)
        a[k, :m], a[k, m:] = re_x, re_y
        a[m + k, :m], a[m + k, m:] = im_x, im_y
        b[k] = sigma_w2 if k == 0 else 0.0
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > 1e12:
        raise np.linalg.LinAlgError("Yule-Walker system is singular (near-unstable AR)")
    sol = np.linalg.solve(a, b)
    return sol[:m] + 1j * sol[m:]


def ar_autocovariance(spec, max_lag):
    """Exact autocovariance ``r[0..max_lag]`` of the stationary AR process.

    Lags up to ``p`` come from the Yule-Walker equations; later lags follow
    the recursion ``r[m] = sum_i rho_i r[m-i]``.  Normalised specs return
    ``r / r[0]``.
    """
    if int(max_lag) != max_lag or max_lag < 0:
        raise ValueError("max_lag must be a nonnegative integer")
    max_lag = int(max_lag)
    rho = spec.rho
    p = rho.shape[0]
    head = _yule_walker(rho, spec.innovation.sigma_w2)
    r = np.zeros(max(max_lag, p) + 1, dtype=complex)
    r[: p + 1] = head
    for m in range(p + 1, max_lag + 1):
        r[m] = np.dot(rho, r[m - 1 : m - p - 1 : -1])
    r = r[: max_lag + 1]
    if spec.normalize_unit_power:
        r = r / head[0].real
    return Autocovariance(r)


def ar_psd(spec, nu):
    """Power spectral density ``sigma_w2 / |1 - sum_n rho_n e^{-j 2 pi n nu}|^2``.

    Divided by the raw ``r[0]`` for normalised specs.  Accepts scalar or
    array ``nu``.
    """
    nu = np.asarray(nu, dtype=float)
    n = np.arange(1, spec.order + 1)
    resp = 1.0 - np.exp(-2j * np.pi * np.multiply.outer(nu, n)) @ spec.rho
    psd = spec.innovation.sigma_w2 / np.abs(resp) ** 2
    if spec.normalize_unit_power:
        psd = psd / spec.raw_power
    return psd if psd.ndim else float(psd)


def _circular_normal(rng, n):
    # interleaved (re, im) pairs viewed as complex, each part with variance 1/2
    z = rng.standard_normal(2 * n)
    z *= math.sqrt(0.5)
    return z.view(np.complex128)


def sample_innovations(spec, n, rng):
    """Draw ``n`` i.i.d. circular innovations.

    Complex-t draws are ``sqrt(v) * g`` with ``g ~ CN(0, 1)`` and ``v``
    inverse-gamma with shape ``lambda`` and scale ``sigma_w2 (lambda - 1)``,
    so ``E|w|^2 = sigma_w2`` and ``|w|^2`` is Lomax distributed.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if spec.kind == COMPLEX_GAUSSIAN:
        w = _circular_normal(rng, n)
        if spec.sigma_w2 != 1.0:
            w *= math.sqrt(spec.sigma_w2)
        return w
    lam = spec.shape_lambda
    mix = rng.standard_gamma(lam, n)
    np.divide(spec.sigma_w2 * (lam - 1.0), mix, out=mix)
    np.sqrt(mix, out=mix)
    w = _circular_normal(rng, n)
    w *= mix
    return w


def innovation_power_cdf(spec, t):
    """CDF of ``|w|^2``."""
    t = np.maximum(np.asarray(t, dtype=float), 0.0)
    if spec.kind == COMPLEX_GAUSSIAN:
        return -np.expm1(-t / spec.sigma_w2)
    lam = spec.shape_lambda
    return 1.0 - (1.0 + t / (spec.sigma_w2 * (lam - 1.0))) ** (-lam)


def _ar_filter(spec, w):
    a = np.concatenate(([1.0], -spec.rho))
    return lfilter([1.0], a, w, axis=-1)


def generate_ar(spec, n, rng):
    """Length-``n`` sample path of the AR process.

    The recursion starts from a zero state and runs through ``spec.burn_in``
    samples that are discarded.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    w = sample_innovations(spec.innovation, n + spec.burn_in, rng)
    c = _ar_filter(spec, w)[-n:]
    scale = spec.scale
    return c * scale if scale != 1.0 else c


def sample_texture(spec, rng, size=None):
    """Inverse-gamma texture with unit mean."""
    a = spec.texture_shape
    return (a - 1.0) / rng.standard_gamma(a, size)


def generate_cg(spec, n, rng):
    """One compound-Gaussian vector: a single texture scales a speckle path."""
    tau = sample_texture(spec, rng)
    return math.sqrt(tau) * generate_ar(spec.speckle, n, rng)


def generate_clutter(spec, n, rng):
    """Dispatch on the clutter family."""
    if isinstance(spec, ArSpec):
        return generate_ar(spec, n, rng)
    if isinstance(spec, CgSpec):
        return generate_cg(spec, n, rng)
    raise TypeError(f"unsupported clutter spec {type(spec).__name__}")


def clutter_autocovariance(spec, max_lag):
    """Autocovariance of either clutter family (unit-mean texture leaves it
    equal to the speckle's)."""
    if isinstance(spec, CgSpec):
        return ar_autocovariance(spec.speckle, max_lag)
    return ar_autocovariance(spec, max_lag)


def clutter_power(spec):
    return clutter_autocovariance(spec, 0).power
