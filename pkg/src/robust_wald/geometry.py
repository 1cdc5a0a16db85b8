"""Steering vectors for colocated MIMO arrays.

Data are vectorised by stacking the columns of the ``M_R x M_T`` matched
filter output, so the virtual channel index is ``t * M_R + r`` for transmit
element ``t`` and receive element ``r``.  With that convention the virtual
signature is ``(S^T kron I) (W^T a_T kron a_R)``.

The angular coordinate is the spatial frequency ``nu`` (cycles per element);
mapping physical angles to ``nu`` is left to the caller.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ArrayConfig:
    """Transmit/receive element counts plus waveform matrices.

    Parameters
    ----------
    m_t, m_r : int
        Number of transmit and receive elements.
    w : ndarray, optional
        ``m_t x m_t`` waveform weighting matrix, identity by default.
    s : ndarray, optional
        ``m_t x m_t`` waveform cross-correlation (straddling) matrix,
        identity by default.
    """

    m_t: int
    m_r: int
    w: np.ndarray = field(default=None, repr=False)
    s: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if int(self.m_t) != self.m_t or self.m_t < 1:
            raise ValueError(f"m_t must be a positive integer, got {self.m_t!r}")
        if int(self.m_r) != self.m_r or self.m_r < 1:
            raise ValueError(f"m_r must be a positive integer, got {self.m_r!r}")
        for name in ("w", "s"):
            mat = getattr(self, name)
            if mat is None:
                mat = np.eye(self.m_t, dtype=complex)
            else:
                mat = np.array(mat, dtype=complex)
            if mat.shape != (self.m_t, self.m_t):
                raise ValueError(
                    f"{name} must be {self.m_t}x{self.m_t}, got shape {mat.shape}"
                )
            mat.setflags(write=False)
            object.__setattr__(self, name, mat)

    @property
    def n(self):
        """Number of virtual channels ``m_t * m_r``."""
        return self.m_t * self.m_r

    @property
    def is_orthonormal_identity(self):
        eye = np.eye(self.m_t)
        return np.array_equal(self.w, eye) and np.array_equal(self.s, eye)


@dataclass(frozen=True)
class SteeringVector:
    """Virtual-array signature ``v(nu)`` of length ``N``."""

    values: np.ndarray
    nu: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1:
            raise ValueError("steering vector must be one-dimensional")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    @property
    def norm2(self):
        """Squared Euclidean norm."""
        return float(np.vdot(self.values, self.values).real)


def ula_steering(nu, count, spacing_multiplier=1):
    """Uniform linear array response ``exp(j 2 pi i k nu)``, ``i = 0..count-1``.

    Receive arrays use ``spacing_multiplier=1``.  In the identifiable geometry
    the transmit array is spaced ``M_R`` times wider, so it uses
    ``spacing_multiplier=M_R``.
    """
    if int(count) != count or count < 1:
        raise ValueError(f"count must be a positive integer, got {count!r}")
    if int(spacing_multiplier) != spacing_multiplier or spacing_multiplier < 1:
        raise ValueError("spacing_multiplier must be a positive integer")
    idx = np.arange(int(count)) * int(spacing_multiplier)
    # reduce the phase modulo one cycle before scaling by 2*pi
    phase = np.mod(idx * float(nu), 1.0)
    return np.exp(2j * np.pi * phase)


def build_virtual_vector(cfg, a_t, a_r, nu=float("nan")):
    """Return ``(S^T kron I_{M_R}) (W^T a_t kron a_r)`` as a SteeringVector."""
    a_t = np.asarray(a_t, dtype=complex)
    a_r = np.asarray(a_r, dtype=complex)
    if a_t.shape != (cfg.m_t,):
        raise ValueError(f"a_t must have length {cfg.m_t}, got shape {a_t.shape}")
    if a_r.shape != (cfg.m_r,):
        raise ValueError(f"a_r must have length {cfg.m_r}, got shape {a_r.shape}")
    inner = np.kron(cfg.w.T @ a_t, a_r)
    outer = np.kron(cfg.s.T, np.eye(cfg.m_r))
    return SteeringVector(outer @ inner, nu)


def virtual_steering(nu, cfg):
    """Phased-array equivalent signature of the identifiable geometry.

    Only valid for ``W = S = I``; entry ``i`` is ``exp(j 2 pi i nu)``.
    """
    if not cfg.is_orthonormal_identity:
        raise ValueError(
            "virtual_steering requires identity W and S; use build_virtual_vector"
        )
    return SteeringVector(ula_steering(nu, cfg.n, 1), float(nu))


def identifiable_steering(nu, cfg):
    """Signature of the identifiable geometry for arbitrary ``W`` and ``S``.

    The receive ULA has unit spacing and the transmit ULA spacing ``M_R``.
    """
    a_r = ula_steering(nu, cfg.m_r, 1)
    a_t = ula_steering(nu, cfg.m_t, cfg.m_r)
    return build_virtual_vector(cfg, a_t, a_r, float(nu))


def beampattern(w, a_t, tol=1e-10):
    """Transmit beampattern ``a_t^H W^* W^T a_t``.

    Returns a nonnegative float.  Raises if the imaginary residue exceeds
    ``tol`` relative to the magnitude.
    """
    w = np.atleast_2d(np.asarray(w, dtype=complex))
    a_t = np.asarray(a_t, dtype=complex)
    if w.shape != (a_t.shape[0], a_t.shape[0]):
        raise ValueError(
            f"W shape {w.shape} does not match a_t of length {a_t.shape[0]}"
        )
    val = a_t.conj() @ w.conj() @ w.T @ a_t
    if abs(val.imag) > tol * max(abs(val), 1.0):
        raise ArithmeticError(f"beampattern has imaginary residue {val.imag:g}")
    return max(float(val.real), 0.0)
