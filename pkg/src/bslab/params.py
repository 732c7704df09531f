"""Shared parameter and wave-vector types.

All model coefficients live here: the backscatter operator coefficients
(negative viscosity b, hyperviscosity d, per horizontal component) and the
physical constants of the rotating shallow water / Boussinesq / primitive
models. Everything is an immutable value type; operations elsewhere are pure
functions of these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BackscatterParams",
    "PhysicalParams",
    "WaveVector",
    "perp",
    "as_wavevector",
]


def perp(v):
    """Rotate a 2-vector by +90 degrees: (a1, a2) -> (-a2, a1)."""
    a1, a2 = v
    return np.array([-a2, a1], dtype=float)


@dataclass(frozen=True)
class BackscatterParams:
    """Backscatter operator coefficients -diag(d1*L^2 + b1*L, d2*L^2 + b2*L).

    b1, b2 are negative-viscosity coefficients (length^2/time), d1, d2
    hyperviscosity coefficients (length^4/time). The standard backscatter
    regime has d1, d2 > 0 and b1, b2 >= 0; d = 0 and b < 0 are admitted so
    the purely viscous and inviscid comparison limits of the linear spectrum
    can be evaluated with the same code paths.
    """

    b1: float
    b2: float
    d1: float
    d2: float

    def __post_init__(self):
        for name in ("b1", "b2", "d1", "d2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.d1 < 0 or self.d2 < 0:
            raise ValueError("hyperviscosity coefficients d1, d2 must be >= 0")

    @classmethod
    def isotropic(cls, b: float, d: float) -> "BackscatterParams":
        return cls(b1=b, b2=b, d1=d, d2=d)

    @property
    def is_isotropic(self) -> bool:
        return self.b1 == self.b2 and self.d1 == self.d2

    @property
    def b(self) -> float:
        """Isotropic b; raises if anisotropic."""
        if self.b1 != self.b2:
            raise ValueError("b is only defined for isotropic parameters")
        return self.b1

    @property
    def d(self) -> float:
        """Isotropic d; raises if anisotropic."""
        if self.d1 != self.d2:
            raise ValueError("d is only defined for isotropic parameters")
        return self.d1


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants: Coriolis f, gravity g, mean depth H0, linear and
    quadratic bottom drag C and Q, vertical viscosity nu_v, buoyancy
    diffusivity mu, squared Brunt-Vaisala frequency N2."""

    f: float = 0.0
    g: float = 9.8
    H0: float = 0.1
    C: float = 0.0
    Q: float = 0.0
    nu_v: float = 0.0
    mu: float = 0.0
    N2: float = 0.0

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("g must be > 0")
        if self.H0 <= 0:
            raise ValueError("H0 must be > 0")
        for name in ("C", "Q", "nu_v", "mu"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class WaveVector:
    """A real 2D wave vector (kx, ky) with k = |k| and k_perp = (-ky, kx)."""

    kx: float
    ky: float

    @property
    def k(self) -> float:
        return math.hypot(self.kx, self.ky)

    @property
    def k2(self) -> float:
        return self.kx * self.kx + self.ky * self.ky

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.kx, self.ky], dtype=float)

    @property
    def perp(self) -> np.ndarray:
        return np.array([-self.ky, self.kx], dtype=float)

    def __iter__(self):
        yield self.kx
        yield self.ky


def as_wavevector(k) -> WaveVector:
    """Coerce a WaveVector, 2-tuple, or length-2 array to WaveVector."""
    if isinstance(k, WaveVector):
        return k
    kx, ky = k
    return WaveVector(float(kx), float(ky))
