"""Fast self-checks run by ``robust-wald check``.

Each check returns ``(name, passed, detail)``; together they take well under
a second.
"""

import math

import numpy as np

from .config import SCENARIOS, build_scenario
from .detector import DetectorConfig, hac_quadratic_form, threshold_for_pfa, wald_statistic
from .disturbance import ar_autocovariance, ar_psd, check_stability
from .geometry import ArrayConfig, build_virtual_vector, ula_steering, virtual_steering
from .theory import asymptotic_pd, chi2_2_sf, marcum_q1, noncentrality


def dense_band_form(v, c_hat, lag):
    """Brute-force ``v^H Gamma_l v`` with the band matrix built entry by entry."""
    n = len(v)
    gamma = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if abs(i - j) <= lag:
                gamma[i, j] = c_hat[i] * np.conj(c_hat[j])
    return float(np.vdot(v, gamma @ v).real)


def _threshold_roundtrip():
    err = max(abs(chi2_2_sf(threshold_for_pfa(p)) - p) for p in (1e-1, 1e-2, 1e-4))
    return err < 1e-12, f"max error {err:.2e}"


def _hac_oracle():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 17))
        lag = int(rng.integers(0, n))
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        fast = hac_quadratic_form(v, c, lag)
        slow = dense_band_form(v, c, lag)
        worst = max(worst, abs(fast - slow) / max(abs(slow), 1e-300))
    return worst < 1e-10, f"max relative error {worst:.2e}"


def _psd_integral():
    worst = 0.0
    for name in ("scenario1", "scenario2"):
        spec = build_scenario(SCENARIOS[name], 0.5).clutter
        nu = np.arange(2048) / 2048
        integral = float(np.mean(ar_psd(spec, nu)))
        r0 = ar_autocovariance(spec, 0).power
        worst = max(worst, abs(integral - r0) / r0)
    return worst < 1e-6, f"max relative error {worst:.2e}"


def _stability():
    ok = True
    for name in ("scenario1", "scenario2"):
        rho = build_scenario(SCENARIOS[name], 0.5).clutter.rho
        p = rho.shape[0]
        companion = np.zeros((p, p), dtype=complex)
        companion[0] = rho
        companion[1:, :-1] = np.eye(p - 1)
        oracle = bool(np.max(np.abs(np.linalg.eigvals(companion))) < 1 - 1e-9)
        verdict = check_stability(rho).stable
        ok = ok and verdict and verdict == oracle
    return ok, "scenario presets stable, companion matrix agrees"


def _virtual_vector():
    worst = 0.0
    for m_t in (1, 2, 4):
        for m_r in (1, 2, 4):
            cfg = ArrayConfig(m_t, m_r)
            for nu in np.linspace(-0.5, 0.5, 21, endpoint=False):
                a = build_virtual_vector(cfg, ula_steering(nu, m_t, m_r), ula_steering(nu, m_r))
                b = virtual_steering(nu, cfg)
                worst = max(worst, float(np.max(np.abs(a.values - b.values))))
    return worst < 1e-12, f"max deviation {worst:.2e}"


def _marcum():
    errs = [abs(marcum_q1(0.0, b) - math.exp(-b * b / 2)) for b in (0.5, 1.0, 3.0)]
    errs.append(abs(marcum_q1(2.0, 0.0) - 1.0))
    errs.append(abs(asymptotic_pd(0.0, threshold_for_pfa(1e-4)) - 1e-4))
    return max(errs) < 1e-12, f"max error {max(errs):.2e}"


def _scale_invariance():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    v = ula_steering(0.1, 64)
    base = wald_statistic(x, v, DetectorConfig()).statistic
    worst = max(
        abs(wald_statistic(k * x, v, DetectorConfig()).statistic - base) / base
        for k in (2.0, 1j, -0.5 + 0.5j)
    )
    return worst < 1e-9, f"max relative change {worst:.2e}"


def _white_noncentrality():
    v = ula_steering(0.2, 32)
    val = noncentrality(0.3, v, np.eye(32))
    return abs(val - 2 * 0.09 * 32) < 1e-12, f"{val:.12g}"


CHECKS = [
    ("threshold/chi2 round trip", _threshold_roundtrip),
    ("banded quadratic form vs dense oracle", _hac_oracle),
    ("PSD integral equals r[0]", _psd_integral),
    ("preset stability verdicts", _stability),
    ("virtual vector Kronecker form", _virtual_vector),
    ("Marcum Q reductions", _marcum),
    ("statistic scale invariance", _scale_invariance),
    ("white-clutter noncentrality", _white_noncentrality),
]


def run_checks():
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, don't abort the suite
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
