"""Linear spectra of backscatter-augmented models.

The scalar growth symbol b k^2 - d k^4, the projected linear operator of the
rotating 2D Euler equations, and the full linearization of the rotating
shallow water equations about the trivial flow: its dispersion cubic

    lambda^3 + a1 lambda^2 + a2 lambda + a3 = 0,

Routh-Hurwitz stability classification, the critical drag / wave number /
frequency of the isotropic instability onset, comoving-frame shifts, kernel
eigenmodes at criticality, and the small-magnitude root that prevents a
spectral gap at large wave numbers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .params import BackscatterParams, PhysicalParams, WaveVector, as_wavevector

__all__ = [
    "StabilityClass",
    "DispersionCoeffs",
    "DispersionResult",
    "CriticalPoint",
    "KernelMode",
    "backscatter_symbol",
    "euler_linear_eigs",
    "sw_dispersion_coeffs",
    "sw_dispersion_roots",
    "classify_coeffs",
    "classification_sweep",
    "critical_point",
    "comoving_roots",
    "kernel_modes",
    "tail_root",
    "sw_linear_matrix",
]

#: Relative tolerance used to call a Routh-Hurwitz quantity "zero".
ZERO_TOL = 1e-12


def backscatter_symbol(k, b, d):
    """Growth rate of the backscatter operator at scalar wavenumber k:
    b k^2 - d k^4. Vectorized in k."""
    k = np.asarray(k, dtype=float)
    out = b * k**2 - d * k**4
    return float(out) if out.ndim == 0 else out


class StabilityClass(enum.Flag):
    """Spectral classification of one wave vector; ZERO_ROOT and HOPF can
    occur simultaneously (they do at the isotropic criticality)."""

    STABLE = enum.auto()
    ZERO_ROOT = enum.auto()
    HOPF = enum.auto()
    UNSTABLE = enum.auto()

    def short(self) -> str:
        names = {
            StabilityClass.STABLE: "S",
            StabilityClass.ZERO_ROOT: "Z",
            StabilityClass.HOPF: "H",
            StabilityClass.UNSTABLE: "U",
        }
        return "".join(v for f, v in names.items() if f in self)


@dataclass(frozen=True)
class DispersionCoeffs:
    """Real coefficients of lambda^3 + a1 lambda^2 + a2 lambda + a3."""

    a1: float
    a2: float
    a3: float

    def as_poly(self) -> np.ndarray:
        return np.array([1.0, self.a1, self.a2, self.a3])

    def residual(self, lam: complex) -> float:
        return abs(np.polyval(self.as_poly(), lam))


@dataclass(frozen=True)
class DispersionResult:
    roots: np.ndarray
    stability: StabilityClass
    k: WaveVector

    @property
    def max_real_part(self) -> float:
        return float(np.max(self.roots.real))


@dataclass(frozen=True)
class CriticalPoint:
    """Instability onset of the isotropic model: C_c = b^2 H0 / (4d),
    k_c = sqrt(b / (2d)), omega_c = sqrt(g H0 k_c^2 + f^2)."""

    C_c: float
    k_c: float
    omega_c: float


@dataclass(frozen=True)
class KernelMode:
    """One (u, v, eta) eigenvector in the kernel of the critical operator."""

    E: np.ndarray
    k: WaveVector
    omega: float
    kind: str  # "geostrophic" | "gravity" | "mass"
    j: int = 0  # harmonic index: the mode is E exp(i j (k.x + omega t))


# ---------------------------------------------------------------------------
# 2D Euler linear operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EulerSpectrum:
    eigenvalues: np.ndarray  # both equal the backscatter symbol
    eigenvectors: np.ndarray  # columns; first is always k_perp / |k|
    defective: bool  # True for f != 0 off-axis (single eigendirection)


def euler_linear_eigs(k, b, d, f) -> EulerSpectrum:
    """Eigenpairs of the Fourier-transformed, Leray-projected linear operator
    of rotating 2D Euler with backscatter.

    The rotation part has zero trace and determinant, so both eigenvalues
    equal b|k|^2 - d|k|^4 independently of f; f only tilts eigenvectors,
    and the shear direction k_perp is an eigenvector for every f.
    """
    kv = as_wavevector(k)
    if kv.k == 0:
        raise ValueError("euler_linear_eigs requires k != 0")
    lam = backscatter_symbol(kv.k, b, d)
    e1 = kv.perp / kv.k
    # Deterministic sign: first nonzero component positive.
    lead = e1[0] if e1[0] != 0 else e1[1]
    if lead < 0:
        e1 = -e1
    if f == 0:
        e2 = kv.vec / kv.k
        defective = False
    else:
        # Single eigendirection (Jordan block); report the generalized
        # direction k/|k| alongside it.
        e2 = kv.vec / kv.k
        defective = True
    vecs = np.column_stack([e1, e2])
    return EulerSpectrum(np.array([lam, lam]), vecs, defective)


# ---------------------------------------------------------------------------
# Shallow water dispersion
# ---------------------------------------------------------------------------

def sw_dispersion_coeffs(k, bp: BackscatterParams, pp: PhysicalParams) -> DispersionCoeffs:
    """Coefficients of the shallow water dispersion cubic at wave vector k."""
    kv = as_wavevector(k)
    K = kv.k2
    coh = pp.C / pp.H0
    F1 = bp.d1 * K * K - bp.b1 * K + coh
    F2 = bp.d2 * K * K - bp.b2 * K + coh
    a1 = F1 + F2
    a2 = F1 * F2 + pp.g * pp.H0 * K + pp.f * pp.f
    a3 = pp.g * pp.H0 * K * ((bp.d1 * K - bp.b1) * kv.ky**2
                             + (bp.d2 * K - bp.b2) * kv.kx**2 + coh)
    return DispersionCoeffs(a1, a2, a3)


def classify_coeffs(a1, a2, a3) -> StabilityClass:
    """Routh-Hurwitz classification from the cubic coefficients.

    Stable iff a1 > 0, a3 > 0, a1 a2 - a3 > 0; a zero root iff a3 = 0; a
    purely imaginary pair iff a1 a2 - a3 = 0 and a2 > 0. Floating-point
    "zero" means small against max(1, |a1|, |a2|).
    """
    scale = max(1.0, abs(a1), abs(a2))
    zero_root = abs(a3) <= ZERO_TOL * scale
    hopf = abs(a1 * a2 - a3) <= ZERO_TOL * scale * scale and a2 > 0
    if zero_root or hopf:
        flags = StabilityClass(0)
        if zero_root:
            flags |= StabilityClass.ZERO_ROOT
        if hopf:
            flags |= StabilityClass.HOPF
        return flags
    if a1 > 0 and a3 > 0 and a1 * a2 - a3 > 0:
        return StabilityClass.STABLE
    return StabilityClass.UNSTABLE


def _cubic_roots(coeffs: DispersionCoeffs) -> np.ndarray:
    """Roots via companion-matrix eigenvalues plus one Newton polish step.

    The companion route stays well-conditioned near the triple-root
    degeneracy at criticality where closed-form discriminants cancel badly.
    """
    p = coeffs.as_poly()
    comp = np.array([[-p[1], -p[2], -p[3]],
                     [1.0, 0.0, 0.0],
                     [0.0, 1.0, 0.0]])
    roots = np.linalg.eigvals(comp)
    dp = np.polyder(p)
    for i, r in enumerate(roots):
        deriv = np.polyval(dp, r)
        if abs(deriv) > 1e-30:
            step = np.polyval(p, r) / deriv
            if abs(step) < 0.5 * (1.0 + abs(r)):
                roots[i] = r - step
    # Real coefficients: snap conjugate-pair structure and tidy tiny parts.
    scale = 1.0 + np.abs(roots).max()
    roots = np.where(np.abs(roots.imag) < 1e-14 * scale, roots.real + 0j, roots)
    return np.sort_complex(roots)


def sw_dispersion_roots(k, bp: BackscatterParams, pp: PhysicalParams) -> DispersionResult:
    kv = as_wavevector(k)
    coeffs = sw_dispersion_coeffs(kv, bp, pp)
    roots = _cubic_roots(coeffs)
    return DispersionResult(roots, classify_coeffs(coeffs.a1, coeffs.a2, coeffs.a3), kv)


def classification_sweep(kx, ky, bp: BackscatterParams, pp: PhysicalParams):
    """Vectorized Routh-Hurwitz classification over a wave-vector grid.

    Returns (a1, a2, a3, class_code) arrays of shape (len(ky), len(kx)).
    Class codes: 0 stable, 1 unstable, 2 zero-root, 3 hopf, 4 zero+hopf.
    """
    KX, KY = np.meshgrid(np.asarray(kx, float), np.asarray(ky, float), indexing="xy")
    K = KX * KX + KY * KY
    coh = pp.C / pp.H0
    F1 = bp.d1 * K * K - bp.b1 * K + coh
    F2 = bp.d2 * K * K - bp.b2 * K + coh
    a1 = F1 + F2
    a2 = F1 * F2 + pp.g * pp.H0 * K + pp.f * pp.f
    a3 = pp.g * pp.H0 * K * ((bp.d1 * K - bp.b1) * KY**2 + (bp.d2 * K - bp.b2) * KX**2 + coh)
    scale = np.maximum(1.0, np.maximum(np.abs(a1), np.abs(a2)))
    zero = np.abs(a3) <= ZERO_TOL * scale
    hopf = (np.abs(a1 * a2 - a3) <= ZERO_TOL * scale * scale) & (a2 > 0)
    stable = (a1 > 0) & (a3 > 0) & (a1 * a2 - a3 > 0) & ~zero & ~hopf
    code = np.ones_like(a1, dtype=int)  # default: unstable
    code[stable] = 0
    code[zero & ~hopf] = 2
    code[hopf & ~zero] = 3
    code[zero & hopf] = 4
    return a1, a2, a3, code


def critical_point(bp: BackscatterParams, pp: PhysicalParams) -> CriticalPoint:
    """Instability threshold of the isotropic model in closed form."""
    if not bp.is_isotropic:
        raise ValueError("critical_point requires isotropic backscatter "
                         "(the anisotropic onset has no closed form here; "
                         "use classification sweeps)")
    b, d = bp.b, bp.d
    if b <= 0 or d <= 0:
        raise ValueError("critical_point requires b > 0 and d > 0")
    C_c = b * b * pp.H0 / (4.0 * d)
    k_c = math.sqrt(b / (2.0 * d))
    omega_c = math.sqrt(pp.g * pp.H0 * k_c * k_c + pp.f * pp.f)
    return CriticalPoint(C_c, k_c, omega_c)


def comoving_roots(k, c, bp: BackscatterParams, pp: PhysicalParams) -> DispersionResult:
    """Dispersion roots in a frame moving with velocity c.

    The comoving relation is disp(lambda - i c.k, k) = 0, so the roots are
    the stationary ones shifted by +i c.k; real parts are unchanged. The
    classification is recomputed from the shifted roots so a gravity-wave
    root moved onto the origin reports as a zero root.
    """
    kv = as_wavevector(k)
    cx, cy = float(c[0]), float(c[1])
    base = sw_dispersion_roots(kv, bp, pp)
    shift = 1j * (cx * kv.kx + cy * kv.ky)
    roots = base.roots + shift
    flags = StabilityClass(0)
    scale = 1.0 + np.abs(roots).max()
    for r in roots:
        if abs(r) <= 10 * ZERO_TOL * scale:
            flags |= StabilityClass.ZERO_ROOT
        elif abs(r.real) <= 10 * ZERO_TOL * scale:
            flags |= StabilityClass.HOPF
    if not flags:
        flags = (StabilityClass.STABLE if np.max(roots.real) < 0
                 else StabilityClass.UNSTABLE)
    return DispersionResult(roots, flags, kv)


def sw_linear_matrix(k, bp: BackscatterParams, pp: PhysicalParams) -> np.ndarray:
    """Fourier symbol of the shallow water linearization at wave vector k."""
    kv = as_wavevector(k)
    K = kv.k2
    coh = pp.C / pp.H0
    F1 = bp.d1 * K * K - bp.b1 * K + coh
    F2 = bp.d2 * K * K - bp.b2 * K + coh
    return np.array([
        [-F1, pp.f, -1j * pp.g * kv.kx],
        [-pp.f, -F2, -1j * pp.g * kv.ky],
        [-1j * pp.H0 * kv.kx, -1j * pp.H0 * kv.ky, 0.0],
    ])


def kernel_modes(kind, k, bp: BackscatterParams, pp: PhysicalParams,
                 tol: float = 1e-9) -> list[KernelMode]:
    """Kernel eigenvectors of the critical operator at |k| = k_c.

    kind "geostrophic": steady modes E_j = (k_perp-aligned velocity,
    -i j f/(g k_c) surface) for j = +-1, plus the k = 0 mass mode (0, 0, 1)
    which is in the kernel for every drag. kind "gravity": the comoving
    kernel E_j = (omega_c kx' + j i f ky', omega_c ky' - j i f kx',
    k_c^2 H0) for omega = -omega_c, plus the conjugate family at +omega_c.
    """
    kv = as_wavevector(k)
    cp = critical_point(bp, pp)
    if abs(kv.k - cp.k_c) > tol * max(1.0, cp.k_c):
        raise ValueError(f"|k| = {kv.k} does not lie on the critical circle "
                         f"k_c = {cp.k_c}")
    if kind == "mass":
        return [KernelMode(np.array([0.0, 0.0, 1.0], dtype=complex),
                           WaveVector(0.0, 0.0), 0.0, "mass", 0)]
    if kind == "geostrophic":
        nperp = kv.perp / kv.k
        modes = []
        for j in (+1, -1):
            E = np.array([nperp[0], nperp[1], -1j * j * pp.f / (pp.g * cp.k_c)],
                         dtype=complex)
            modes.append(KernelMode(E, kv, 0.0, "geostrophic", j))
        modes.append(KernelMode(np.array([0.0, 0.0, 1.0], dtype=complex),
                                WaveVector(0.0, 0.0), 0.0, "mass", 0))
        return modes
    if kind == "gravity":
        kxp, kyp = kv.kx, kv.ky
        modes = []
        for omega in (-cp.omega_c, +cp.omega_c):
            for j in (+1, -1):
                E = np.array([cp.omega_c * kxp + j * 1j * pp.f * kyp,
                              cp.omega_c * kyp - j * 1j * pp.f * kxp,
                              cp.k_c**2 * pp.H0], dtype=complex)
                if omega > 0:
                    E = np.conj(E)
                modes.append(KernelMode(E, kv, omega, "gravity", j))
        return modes
    raise ValueError(f"unknown kernel kind {kind!r}")


def tail_root(k, bp: BackscatterParams, pp: PhysicalParams) -> complex:
    """The root of smallest magnitude, continuing the large-|k| branch
    lambda_inf whose real part tends to zero from below when d1 d2 > 0
    (the no-spectral-gap branch)."""
    kv = as_wavevector(k)
    if bp.d1 > 0 and bp.d2 > 0 and bp.is_isotropic and bp.b > 0:
        k_c = math.sqrt(bp.b / (2.0 * bp.d))
        if kv.k < 10.0 * k_c:
            raise ValueError(f"tail_root expects |k| >= 10 k_c = {10 * k_c}")
    res = sw_dispersion_roots(kv, bp, pp)
    return complex(res.roots[np.argmin(np.abs(res.roots))])
