"""Truncated Fourier representation of 2D velocity fields on [0, 2pi]^2.

Conventions, used throughout the package:

* the domain is the square torus [0, 2pi]^2, so admissible wave vectors are
  integer pairs in numpy fft layout;
* the forward transform divides by n^2, so a stored coefficient equals the
  analytic Fourier coefficient of exp(i k.x). A field u(x) = cos(y) has the
  two coefficients 1/2 at k = (0, +-1) and nothing else;
* with this normalization Parseval reads  mean_grid |u|^2 = sum_k |uhat_k|^2,
  and the L2 integral over the torus is (2pi)^2 times the grid mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["GridSpec", "SpectralField2D", "to_physical", "to_spectral"]


def _wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers -n/2..n/2-1 in numpy fft ordering."""
    return np.fft.fftfreq(n, d=1.0 / n)


def wavenumber_mesh(n: int):
    """(KX, KY) integer meshes in fft layout, indexed [iy, ix] like the grid."""
    k = _wavenumbers(n)
    KX, KY = np.meshgrid(k, k, indexing="xy")
    return KX, KY


@dataclass(frozen=True)
class GridSpec:
    """Resolution and dealiasing cutoff for a square spectral grid.

    n must be a power of two >= 16; the retained band is |kx|,|ky| <= cutoff
    with cutoff = floor(dealias_fraction * n/2). Powers of two guarantee
    3*cutoff < n, so cubic inner products of retained modes are alias-exact.
    """

    n: int
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ValueError("n must be a power of two >= 16")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ValueError("dealias_fraction must be in (0, 1]")

    @property
    def cutoff(self) -> int:
        return int(np.floor(self.dealias_fraction * self.n / 2))

    def wavenumbers(self):
        return wavenumber_mesh(self.n)

    def dealias_mask(self) -> np.ndarray:
        KX, KY = self.wavenumbers()
        return (np.abs(KX) <= self.cutoff) & (np.abs(KY) <= self.cutoff)

    def coordinates(self):
        """Physical grid (X, Y) with X[iy, ix] = 2pi ix / n."""
        x = np.linspace(0.0, 2.0 * np.pi, self.n, endpoint=False)
        return np.meshgrid(x, x, indexing="xy")


def to_spectral(u: np.ndarray) -> np.ndarray:
    """Forward transform, coefficient-normalized (divides by n^2)."""
    n = u.shape[0]
    if u.shape != (n, n):
        raise ValueError(f"expected a square array, got shape {u.shape}")
    return np.fft.fft2(u) / (n * n)

def to_physical(uhat: np.ndarray) -> np.ndarray:
    """Inverse of to_spectral; returns the real part of the grid samples."""
    n = uhat.shape[0]
    if uhat.shape != (n, n):
        raise ValueError(f"expected a square array, got shape {uhat.shape}")
    return np.real(np.fft.ifft2(uhat) * (n * n))


def project_divergence_free(uhat, vhat, KX=None, KY=None):
    """Mode-wise Leray projection  Id - k k^T / |k|^2  (k = 0 untouched)."""
    n = uhat.shape[0]
    if KX is None or KY is None:
        KX, KY = wavenumber_mesh(n)
    K2 = KX * KX + KY * KY
    K2safe = np.where(K2 == 0, 1.0, K2)
    div = (KX * uhat + KY * vhat) / K2safe
    pu = uhat - KX * div
    pv = vhat - KY * div
    zero = K2 == 0
    pu[zero] = uhat[zero]
    pv[zero] = vhat[zero]
    return pu, pv


def _symmetrize(ahat: np.ndarray) -> np.ndarray:
    """Enforce the conjugate symmetry of a real field's coefficients."""
    n = ahat.shape[0]
    flipped = np.conj(np.roll(ahat[::-1, ::-1], (1, 1), axis=(0, 1)))
    sym = 0.5 * (ahat + flipped)
    # Nyquist rows/columns pair with themselves; keep them real.
    sym[n // 2, :] = sym[n // 2, :].real
    sym[:, n // 2] = sym[:, n // 2].real
    return sym


@dataclass(frozen=True)
class SpectralField2D:
    """Divergence-free 2D velocity field stored as Fourier coefficients.

    uhat, vhat are (n, n) complex arrays in fft layout with the coefficient
    normalization of this module. Constructors enforce conjugate symmetry
    (real field), the divergence-free condition mode-wise, and, when
    zero_mean is set, a vanishing k = 0 coefficient.
    """

    uhat: np.ndarray = field(repr=False)
    vhat: np.ndarray = field(repr=False)
    zero_mean: bool = True

    def __post_init__(self):
        if self.uhat.shape != self.vhat.shape or self.uhat.ndim != 2:
            raise ValueError("uhat and vhat must be equal-shape square arrays")
        if self.uhat.shape[0] != self.uhat.shape[1]:
            raise ValueError("coefficient arrays must be square")

    @property
    def n(self) -> int:
        return self.uhat.shape[0]

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_physical(cls, u, v, zero_mean=True, project=True) -> "SpectralField2D":
        if u.shape != v.shape:
            raise ValueError("u and v must have the same shape")
        uhat = _symmetrize(to_spectral(np.asarray(u, dtype=float)))
        vhat = _symmetrize(to_spectral(np.asarray(v, dtype=float)))
        if project:
            uhat, vhat = project_divergence_free(uhat, vhat)
        if zero_mean:
            uhat[0, 0] = 0.0
            vhat[0, 0] = 0.0
        return cls(uhat, vhat, zero_mean)

    @classmethod
    def from_coefficients(cls, uhat, vhat, zero_mean=True, project=True) -> "SpectralField2D":
        uhat = _symmetrize(np.array(uhat, dtype=complex))
        vhat = _symmetrize(np.array(vhat, dtype=complex))
        if project:
            uhat, vhat = project_divergence_free(uhat, vhat)
        if zero_mean:
            uhat[0, 0] = 0.0
            vhat[0, 0] = 0.0
        return cls(uhat, vhat, zero_mean)

    @classmethod
    def zero(cls, n: int) -> "SpectralField2D":
        z = np.zeros((n, n), dtype=complex)
        return cls(z, z.copy())

    # -- evaluation and diagnostics ---------------------------------------

    def to_physical(self):
        return to_physical(self.uhat), to_physical(self.vhat)

    def max_divergence(self) -> float:
        """Largest |k.uhat(k)| over retained modes, relative to the field size."""
        KX, KY = wavenumber_mesh(self.n)
        div = np.abs(KX * self.uhat + KY * self.vhat)
        scale = max(np.abs(self.uhat).max(), np.abs(self.vhat).max(), 1e-300)
        return float(div.max() / scale)

    def coefficient_norm_sq(self) -> float:
        """sum_k |uhat|^2 + |vhat|^2 (= grid mean of |u|^2 by Parseval)."""
        return float(np.sum(np.abs(self.uhat) ** 2 + np.abs(self.vhat) ** 2))

    def l2_norm(self) -> float:
        """L2([0,2pi]^2) norm of the velocity field."""
        return 2.0 * np.pi * np.sqrt(self.coefficient_norm_sq())

    def sobolev_norm(self, order: int) -> float:
        """Spectral H^s norm (sum of (1+|k|^2)^s weighted coefficients)."""
        KX, KY = wavenumber_mesh(self.n)
        w = (1.0 + KX * KX + KY * KY) ** order
        total = np.sum(w * (np.abs(self.uhat) ** 2 + np.abs(self.vhat) ** 2))
        return 2.0 * np.pi * float(np.sqrt(total))

    def scaled(self, factor: float) -> "SpectralField2D":
        return SpectralField2D(self.uhat * factor, self.vhat * factor, self.zero_mean)

    def __add__(self, other: "SpectralField2D") -> "SpectralField2D":
        if self.n != other.n:
            raise ValueError("grid size mismatch")
        return SpectralField2D(self.uhat + other.uhat, self.vhat + other.vhat,
                               self.zero_mean and other.zero_mean)
