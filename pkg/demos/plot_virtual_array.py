"""
Virtual array signatures
========================

A colocated MIMO radar with M_T transmitters and M_R receivers behaves like a
virtual array of N = M_T * M_R channels.  With a half-wavelength receive ULA
and a transmit spacing of M_R half-wavelengths, the virtual array is a filled
ULA of length N.
"""

import numpy as np

from robust_wald import ArrayConfig, beampattern, build_virtual_vector, ula_steering, virtual_steering

cfg = ArrayConfig(m_t=4, m_r=8)
nu = 0.12

# build the signature the long way: transmit and receive steering, then the
# Kronecker product through the waveform (W) and selection (S) matrices
a_t = ula_steering(nu, cfg.m_t, cfg.m_r)
a_r = ula_steering(nu, cfg.m_r)
v = build_virtual_vector(cfg, a_t, a_r)

# and the short way, valid for W = S = I
u = virtual_steering(nu, cfg)
print("channels:", cfg.n, " max |difference|:", np.max(np.abs(v.values - u.values)))

# matched-filter response |v(nu)^H v(probe)| / N: unit at the look direction,
# nulls every 1/N in spatial frequency
for probe in (nu, nu + 1 / cfg.n, nu + 0.5 / cfg.n):
    gain = abs(np.vdot(u.values, virtual_steering(probe, cfg).values)) / cfg.n
    print(f"nu = {probe:+.4f}  gain = {gain:.4f}")

# orthogonal waveforms (W = I) radiate the same power in every direction
for probe in (-0.3, 0.0, 0.3):
    print(f"transmit beampattern at nu = {probe:+.1f}: "
          f"{beampattern(np.eye(cfg.m_t), ula_steering(probe, cfg.m_t, cfg.m_r)):.3f}")
