"""
One snapshot, one decision
==========================

The robust Wald detector needs no secondary data: it estimates the target
amplitude by least squares and the clutter spectrum at the target frequency
from the residuals of the same snapshot, using lags up to l = floor(N^(1/4)).
"""

import numpy as np

from robust_wald import DetectorConfig, ula_steering, wald_statistic
from robust_wald.config import build_scenario
from robust_wald.disturbance import ar_psd, generate_ar

rng = np.random.default_rng(1)
scenario = build_scenario("scenario1", 1e-2)
n, nu = 4096, 0.2
v = ula_steering(nu, n)
cfg = DetectorConfig(pfa_nominal=1e-2)

c = generate_ar(scenario.clutter, n, rng)
for label, x in (("clutter only", c), ("target at -20 dB", 0.1 * v + c)):
    out = wald_statistic(x, v, cfg)
    print(f"{label:18s} stat = {out.statistic:8.2f}  threshold = {out.threshold:.2f}  "
          f"H1: {out.decide_h1}  alpha_hat = {out.alpha_hat:.3f}")

# the denominator over ||v||^2 estimates the clutter PSD at the look direction
out = wald_statistic(c, v, cfg)
print(f"\nq / ||v||^2 = {out.denominator / n:.3f}   S(nu) = {float(ar_psd(scenario.clutter, nu)):.3f}")
