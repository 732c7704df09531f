"""Closed-form bifurcation theory for bottom drag + backscatter.

Near the isotropic criticality (C_c = b^2 H0/(4d), k_c = sqrt(b/(2d))) the
onset is parameterized by the drag offset alpha (C = C_c - alpha H0) and the
wavenumber offset kappa (|k| = k_c + kappa). The zero eigenvalue expands as

    lambda = M (alpha - 2 b kappa^2) + O(|kappa|^3),  M = g k_c^2 H0/omega_c^2,

and the geostrophic equilibria bifurcate supercritically with leading-order
amplitudes

    Q = 0:   |A1| = (6 g H0 / (b |f|)) sqrt(2 d (alpha - 2 b kappa^2) / 17),
    Q != 0:  |A1| = (3 pi H0 sqrt(2d) / (16 Q sqrt(b))) (alpha - 2 b kappa^2),

in the convention phi = 2 A1 cos(xi) + ... . Gravity waves (Q != 0) travel
with speed correction s = kappa f^2 / omega_c and amplitude set by the two
circle quadratures I1, I2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dispersion import critical_point
from .errors import VerticalBranch
from .params import BackscatterParams, PhysicalParams

__all__ = [
    "BifParams",
    "ReducedProfile",
    "GWQuadratures",
    "lambda_expansion",
    "ge_amplitude",
    "ge_profile",
    "gw_quadratures",
    "gw_amplitude_and_speed",
    "gw_leading_profile",
]


@dataclass(frozen=True)
class BifParams:
    """Offsets from criticality: C = C_c - alpha H0, |k| = k_c + kappa."""

    alpha: float
    kappa: float
    Q: float
    bp: BackscatterParams
    pp: PhysicalParams

    @property
    def critical(self):
        return critical_point(self.bp, self.pp)

    @property
    def C(self) -> float:
        return self.critical.C_c - self.alpha * self.pp.H0

    @property
    def k(self) -> float:
        return self.critical.k_c + self.kappa

    @property
    def M(self) -> float:
        cp = self.critical
        return self.pp.g * cp.k_c**2 * self.pp.H0 / cp.omega_c**2


@dataclass(frozen=True)
class ReducedProfile:
    """2pi-periodic mean-zero wave shape phi(xi), stored as Fourier
    coefficients (coefficient normalization: phi = sum phi_hat[m] e^{i m xi}).

    The flow is reconstructed as vh = phi'(k.x) k_perp, eta = (f/g) phi(k.x);
    A1 is the signed cos(xi) half-amplitude of the theorem convention
    phi = 2 A1 cos(xi) + ... .
    """

    phi_hat: np.ndarray
    k: float
    C: float

    @property
    def n(self) -> int:
        return self.phi_hat.size

    @property
    def A1(self) -> float:
        return float(self.phi_hat[1].real)

    def phi_values(self) -> np.ndarray:
        return np.real(np.fft.ifft(self.phi_hat) * self.n)

    def psi_values(self) -> np.ndarray:
        m = np.fft.fftfreq(self.n, d=1.0 / self.n)
        return np.real(np.fft.ifft(1j * m * self.phi_hat) * self.n)

    @classmethod
    def from_psi_values(cls, psi, k, C) -> "ReducedProfile":
        n = len(psi)
        m = np.fft.fftfreq(n, d=1.0 / n)
        psi_hat = np.fft.fft(np.asarray(psi, float)) / n
        with np.errstate(divide="ignore", invalid="ignore"):
            phi_hat = np.where(m != 0, psi_hat / (1j * m), 0.0)
        phi_hat[0] = 0.0
        return cls(phi_hat, float(k), float(C))


@dataclass(frozen=True)
class GWQuadratures:
    """I1 = avg sqrt(f^2 + k_c^2 g H0 cos^2 chi), I2 = same against cos 2chi."""

    I1: float
    I2: float


def lambda_expansion(alpha, kappa, bp: BackscatterParams, pp: PhysicalParams) -> float:
    """Leading-order growth rate of the near-critical zero mode:
    M (alpha - 2 b kappa^2); the trivial state destabilizes across
    alpha = 2 b kappa^2."""
    par = BifParams(alpha, kappa, 0.0, bp, pp)
    return par.M * (alpha - 2.0 * bp.b * kappa**2)


def ge_amplitude(alpha, kappa, Q, bp: BackscatterParams, pp: PhysicalParams) -> float:
    """Leading-order |A1| of the bifurcating geostrophic equilibrium;
    0 when alpha <= 2 b kappa^2 (no branch)."""
    b, d = bp.b, bp.d
    drive = alpha - 2.0 * b * kappa**2
    if drive <= 0:
        return 0.0
    if Q == 0:
        if pp.f == 0:
            raise VerticalBranch(
                "Q = 0, f = 0: the leading-order amplitude is undetermined "
                "(vertical branch at alpha = 2 b kappa^2)")
        return (6.0 * pp.g * pp.H0 / (b * abs(pp.f))) * math.sqrt(2.0 * d * drive / 17.0)
    return (3.0 * math.pi * pp.H0 * math.sqrt(2.0 * d)
            / (16.0 * Q * math.sqrt(b))) * drive


def ge_profile(A1, alpha, kappa, Q, bp: BackscatterParams,
               pp: PhysicalParams, n: int = 64) -> ReducedProfile:
    """Leading-order GE wave shape: 2 A1 cos(xi) plus, for Q = 0, the second
    harmonic (f/(9 g H0)) A1^2 cos(2 xi)."""
    par = BifParams(alpha, kappa, Q, bp, pp)
    phi_hat = np.zeros(n, dtype=complex)
    phi_hat[1] = A1
    phi_hat[-1] = A1
    if Q == 0:
        c2 = pp.f * A1 * A1 / (18.0 * pp.g * pp.H0)  # half of the cos 2xi amplitude
        phi_hat[2] = c2
        phi_hat[-2] = c2
    return ReducedProfile(phi_hat, par.k, par.C)


def gw_quadratures(bp: BackscatterParams, pp: PhysicalParams) -> GWQuadratures:
    """The two circle integrals of the GW amplitude equation, by adaptive
    quadrature to 1e-12 absolute."""
    cp = critical_point(bp, pp)
    s2 = cp.k_c**2 * pp.g * pp.H0
    integrand = lambda chi: math.sqrt(pp.f**2 + s2 * math.cos(chi) ** 2)
    val1, _ = quad(integrand, 0.0, 2.0 * math.pi, epsabs=1e-12, limit=200)
    val2, _ = quad(lambda chi: integrand(chi) * math.cos(2.0 * chi),
                   0.0, 2.0 * math.pi, epsabs=1e-12, limit=200)
    return GWQuadratures(val1 / (2.0 * math.pi), val2 / (2.0 * math.pi))


def gw_amplitude_and_speed(alpha, kappa, Q, bp: BackscatterParams,
                           pp: PhysicalParams):
    """Leading-order gravity-wave branch for Q != 0: speed correction
    s = kappa f^2 / omega_c and amplitude
    |A1| = alpha / [(2 Q k_c / H0)(I1 + k_c^2 g H0 I2 / (2 f^2 + k_c^2 g H0))].
    """
    if Q == 0:
        raise ValueError("the gravity-wave branch is derived for Q != 0 only")
    cp = critical_point(bp, pp)
    s = kappa * pp.f**2 / cp.omega_c
    if alpha <= 0:
        return 0.0, s
    quads = gw_quadratures(bp, pp)
    s2 = cp.k_c**2 * pp.g * pp.H0
    coeff = (2.0 * Q * cp.k_c / pp.H0) * (quads.I1 + s2 * quads.I2 / (2.0 * pp.f**2 + s2))
    return alpha / coeff, s


def gw_leading_profile(A1, bp: BackscatterParams, pp: PhysicalParams,
                       direction=(1.0, 0.0), n: int = 64):
    """Leading-order GW fields on the comoving phase grid: 2 A1 times the
    real kernel mode (omega_c kx' cos - f ky' sin, omega_c ky' cos +
    f kx' sin, k_c^2 H0 cos). Returns (U, V, H) sampled on n points."""
    cp = critical_point(bp, pp)
    norm = math.hypot(*direction)
    kxp, kyp = cp.k_c * direction[0] / norm, cp.k_c * direction[1] / norm
    zeta = 2.0 * np.pi * np.arange(n) / n
    U = 2.0 * A1 * (cp.omega_c * kxp * np.cos(zeta) - pp.f * kyp * np.sin(zeta))
    V = 2.0 * A1 * (cp.omega_c * kyp * np.cos(zeta) + pp.f * kxp * np.sin(zeta))
    H = 2.0 * A1 * cp.k_c**2 * pp.H0 * np.cos(zeta)
    return U, V, H
