"""Catalog of explicit plane-wave type solutions across the four models.

Every constructor enforces the algebraic existence conditions of the flow it
builds (tolerance 1e-12) and returns an immutable flow object that can sample
its fields, knows its analytic time derivative, and carries the parameters it
was built with so the PDE residual can be evaluated independently
(see residual.verify_residual).

Amplitude conventions follow the source displays:

* rotating 2D Euler:       u = A exp(lam t) cos(k.x + tau) (ky, -kx)/|k|,
                           p = -f A exp(lam t) sin(k.x + tau)/|k|;
* shallow water:           v = a1 exp(lam t) cos(k.x + tau) k_perp,
                           eta = a2 (f/g) sin(k.x + tau) + s;
* Boussinesq circle sums:  v = sum_i a_i exp(lam_i t) sin(k_i.x + tau_i) k_i_perp
  with the quadratic pair pressure and the Coriolis pressure -f gamma_i cos.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm, null_space
from scipy.optimize import brentq

from .dispersion import backscatter_symbol
from .errors import ComplianceError
from .params import BackscatterParams, PhysicalParams, WaveVector, as_wavevector

__all__ = [
    "PlaneWaveFlow",
    "SuperposedFlow",
    "KolmogorovMode",
    "IGWMode",
    "ParallelFlow",
    "PrimitiveMode",
    "euler_plane_wave",
    "primitive_mode",
    "sw_monochromatic",
    "sw_growth_rate",
    "sw_amplitude_mismatch",
    "sw_loci_map",
    "radial_superpose",
    "angular_superpose",
    "kolmogorov_matrix",
    "kolmogorov_det_poly",
    "kolmogorov_solve",
    "igw_special",
    "igw_assemble",
    "igw_modes",
    "parallel_flow",
    "CombinedXYFlow",
    "superpose_parallel_with_horizontal",
]

COND_TOL = 1e-12


# ---------------------------------------------------------------------------
# Monochromatic flows (Euler, shallow water, Boussinesq-horizontal)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneWaveFlow:
    """A single-mode explicit solution of one of the 2D models.

    model is one of "euler2d", "shallow_water", "boussinesq_horizontal".
    pressure_coeff stores the amplitude of the recorded pressure profile
    (coefficient of sin for Euler, of cos for the Boussinesq sin-mode);
    it is set consistently by the constructors, so corrupting alpha1
    afterwards breaks the Coriolis/pressure balance detectably.
    """

    model: str
    k: WaveVector
    alpha1: float
    lam: float
    alpha2: float = 0.0
    tau: float = 0.0
    s: float = 0.0
    pressure_coeff: float = 0.0
    bp: BackscatterParams = BackscatterParams.isotropic(0.0, 0.0)
    pp: PhysicalParams = PhysicalParams()

    def wavevectors(self):
        return [self.k]

    def phase(self, X, Y):
        return self.k.kx * X + self.k.ky * Y + self.tau

    def fields(self, t, X, Y):
        xi = self.phase(X, Y)
        growth = math.exp(self.lam * t)
        if self.model == "euler2d":
            amp = self.alpha1 * growth * np.cos(xi) / self.k.k
            out = {"u": amp * self.k.ky, "v": -amp * self.k.kx,
                   "p": self.pressure_coeff * growth * np.sin(xi)}
        elif self.model == "shallow_water":
            c = self.alpha1 * growth * np.cos(xi)
            out = {"u": -self.k.ky * c, "v": self.k.kx * c,
                   "eta": self.alpha2 * (self.pp.f / self.pp.g) * np.sin(xi) + self.s}
        elif self.model == "boussinesq_horizontal":
            sn = self.alpha1 * growth * np.sin(xi)
            out = {"u": -self.k.ky * sn, "v": self.k.kx * sn,
                   "p": self.pressure_coeff * growth * np.cos(xi)}
        else:
            raise ValueError(f"unknown model {self.model!r}")
        return out

    def dt_fields(self, t, X, Y):
        """Analytic time derivative (eta of the shallow water flow is static)."""
        out = {key: self.lam * val for key, val in self.fields(t, X, Y).items()}
        if self.model == "shallow_water":
            out["eta"] = np.zeros_like(out["eta"])
        return out


def euler_plane_wave(A, k, b, d, f=0.0, tau=0.0) -> PlaneWaveFlow:
    """Shear mode of rotating 2D Euler with backscatter; any amplitude A is
    admissible (the mode lies in the kernel of the transport nonlinearity).

    Growth rate b|k|^2 - d|k|^4; for f != 0 the Coriolis force is absorbed
    by the pressure -f A exp(lam t) sin(k.x + tau)/|k|.
    """
    kv = as_wavevector(k)
    if kv.k == 0:
        raise ValueError("euler_plane_wave requires k != 0")
    lam = backscatter_symbol(kv.k, b, d)
    return PlaneWaveFlow(
        model="euler2d", k=kv, alpha1=float(A), lam=lam, tau=float(tau),
        pressure_coeff=-f * float(A) / kv.k,
        bp=BackscatterParams.isotropic(b, d), pp=PhysicalParams(f=f),
    )


def sw_growth_rate(k, bp: BackscatterParams) -> float:
    """Dispersion of the monochromatic shallow water mode:
    lam = (b1 - d1|k|^2) ky^2 + (b2 - d2|k|^2) kx^2."""
    kv = as_wavevector(k)
    K = kv.k2
    return (bp.b1 - bp.d1 * K) * kv.ky**2 + (bp.b2 - bp.d2 * K) * kv.kx**2


def sw_amplitude_mismatch(k, alpha1, alpha2, bp: BackscatterParams,
                          pp: PhysicalParams) -> float:
    """Residual of the amplitude relation
    (alpha2 - alpha1) f = alpha1 kx ky ((d1 - d2)|k|^2 + b2 - b1)."""
    kv = as_wavevector(k)
    rho = kv.kx * kv.ky * ((bp.d1 - bp.d2) * kv.k2 + bp.b2 - bp.b1)
    return (alpha2 - alpha1) * pp.f - alpha1 * rho


def sw_monochromatic(k, alpha1, alpha2, tau, s, bp: BackscatterParams,
                     pp: PhysicalParams) -> PlaneWaveFlow:
    """Monochromatic shallow water solution with drag off (C = Q = 0).

    Accepted iff the amplitude relation and the compatibility condition
    alpha2 * lam = 0 hold to 1e-12; rejections name the failing condition.
    """
    kv = as_wavevector(k)
    if kv.k == 0:
        raise ValueError("sw_monochromatic requires k != 0")
    if pp.C != 0 or pp.Q != 0:
        raise ComplianceError("monochromatic shallow water flows require "
                              "zero bottom drag (C = Q = 0)")
    lam = sw_growth_rate(kv, bp)
    scale = max(1.0, abs(alpha1), abs(alpha2))
    mismatch = sw_amplitude_mismatch(kv, alpha1, alpha2, bp, pp)
    if abs(mismatch) > COND_TOL * scale:
        raise ComplianceError(
            f"amplitude relation fails: (alpha2-alpha1) f - alpha1 kx ky "
            f"((d1-d2)|k|^2 + b2-b1) = {mismatch:.3e}")
    if abs(alpha2 * lam) > COND_TOL * scale * max(1.0, abs(lam)):
        raise ComplianceError(
            f"compatibility alpha2 * lam = {alpha2 * lam:.3e} != 0: a flow "
            f"with nontrivial surface must be steady")
    return PlaneWaveFlow(model="shallow_water", k=kv, alpha1=float(alpha1),
                         alpha2=float(alpha2), tau=float(tau), s=float(s),
                         lam=lam, bp=bp, pp=pp)


def sw_loci_map(kx, ky, bp: BackscatterParams, pp: PhysicalParams,
                alpha1=1.0, alpha2=0.0, steady_tol=1e-9):
    """Classify the wave-vector plane for the monochromatic shallow water
    family at a fixed amplitude pair: growth rate sign, whether the
    amplitude relation holds, and the steady loci.

    Returns a dict of arrays over the (ky, kx) grid: "lam",
    "amplitude_ok" (bool), "steady" (bool), "admissible" (bool).
    """
    KX, KY = np.meshgrid(np.asarray(kx, float), np.asarray(ky, float), indexing="xy")
    K = KX * KX + KY * KY
    lam = (bp.b1 - bp.d1 * K) * KY**2 + (bp.b2 - bp.d2 * K) * KX**2
    rho = KX * KY * ((bp.d1 - bp.d2) * K + bp.b2 - bp.b1)
    mismatch = (alpha2 - alpha1) * pp.f - alpha1 * rho
    scale = max(1.0, abs(alpha1), abs(alpha2))
    amplitude_ok = np.abs(mismatch) <= steady_tol * scale
    steady = np.abs(lam) <= steady_tol
    compat = steady | (abs(alpha2) <= steady_tol * scale)
    return {
        "lam": lam,
        "amplitude_mismatch": mismatch,
        "amplitude_ok": amplitude_ok,
        "steady": steady,
        "admissible": amplitude_ok & compat,
    }


# ---------------------------------------------------------------------------
# Superpositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngularComponent:
    """One direction sample of a circle superposition: amplitude a (quadrature
    weight folded in), phase tau, growth lam, pressure coefficient gamma with
    f*(gamma - a) = a kx ky ((d1-d2)k^2 + b2 - b1)."""

    k: WaveVector
    a: float
    tau: float
    lam: float
    gamma: float


@dataclass(frozen=True)
class SuperposedFlow:
    """Finite radial or angular superposition of monochromatic flows."""

    kind: str  # "radial" | "angular"
    model: str
    components: tuple
    bp: BackscatterParams
    pp: PhysicalParams

    def wavevectors(self):
        return [c.k for c in self.components]

    def _angular_eval(self, t, X, Y, rate):
        """Fields of the circle superposition; with rate=True the analytic
        time derivative (the pair pressure carries the sum of the two rates)."""
        u = np.zeros_like(X)
        v = np.zeros_like(X)
        p = np.zeros_like(X)
        comps = self.components
        for c in comps:
            xi = c.k.kx * X + c.k.ky * Y + c.tau
            g = math.exp(c.lam * t) * (c.lam if rate else 1.0)
            sn = c.a * g * np.sin(xi)
            u += -c.k.ky * sn
            v += c.k.kx * sn
            p += -self.pp.f * c.gamma * g * np.cos(xi)
        k2 = comps[0].k.k2
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                ci, cj = comps[i], comps[j]
                xi_i = ci.k.kx * X + ci.k.ky * Y + ci.tau
                xi_j = cj.k.kx * X + cj.k.ky * Y + cj.tau
                ang = math.atan2(ci.k.ky, ci.k.kx) - math.atan2(cj.k.ky, cj.k.kx)
                lam2 = ci.lam + cj.lam
                g2 = math.exp(lam2 * t) * (lam2 if rate else 1.0)
                p += (-k2 * ci.a * cj.a * g2
                      * (np.cos(xi_i) * np.cos(xi_j)
                         + math.cos(ang) * np.sin(xi_i) * np.sin(xi_j)))
        return {"u": u, "v": v, "p": p}

    def fields(self, t, X, Y):
        if self.kind == "radial":
            out = None
            for c in self.components:
                f = c.fields(t, X, Y)
                out = f if out is None else {key: out[key] + f[key] for key in out}
            return out
        return self._angular_eval(t, X, Y, rate=False)

    def dt_fields(self, t, X, Y):
        if self.kind == "radial":
            out = None
            for c in self.components:
                f = c.dt_fields(t, X, Y)
                out = f if out is None else {key: out[key] + f[key] for key in out}
            return out
        return self._angular_eval(t, X, Y, rate=True)


def radial_superpose(components: Sequence[PlaneWaveFlow]) -> SuperposedFlow:
    """Superpose monochromatic flows whose wave vectors lie on one ray.

    On a common ray the transport nonlinearity vanishes pairwise, so the sum
    of admissible flows is again an explicit solution, mode rates untouched.
    """
    if not components:
        raise ValueError("need at least one component")
    model = components[0].model
    if any(c.model != model for c in components):
        raise ValueError("all components must come from the same model")
    ref = components[0].k
    for c in components:
        cross = ref.kx * c.k.ky - ref.ky * c.k.kx
        along = ref.kx * c.k.kx + ref.ky * c.k.ky
        if abs(cross) > 1e-12 * ref.k * c.k.k or along <= 0:
            raise ComplianceError(
                f"wave vector ({c.k.kx}, {c.k.ky}) is not a positive multiple "
                f"of the ray direction ({ref.kx}, {ref.ky})")
    return SuperposedFlow("radial", model, tuple(components),
                          components[0].bp, components[0].pp)


def angular_superpose(kvecs, alphas, taus, bp: BackscatterParams,
                      pp: PhysicalParams) -> SuperposedFlow:
    """Superpose Boussinesq horizontal-flow modes on one circle |k| = k.

    The amplitudes are the discrete coefficients of the circle quadrature
    (any summable discretization of the integral form is admissible). Each
    direction gets its rate from the dispersion relation and its pressure
    coefficient gamma from the amplitude relation; the quadratic interaction
    of different directions is a gradient, absorbed by the pair pressure.
    """
    kvs = [as_wavevector(k) for k in kvecs]
    if not kvs:
        raise ValueError("need at least one direction sample")
    if len(kvs) != len(alphas) or (taus is not None and len(taus) != len(kvs)):
        raise ValueError("kvecs, alphas, taus must have matching lengths")
    if taus is None:
        taus = [0.0] * len(kvs)
    radius = kvs[0].k
    comps = []
    for kv, a, tau in zip(kvs, alphas, taus):
        if abs(kv.k - radius) > 1e-12 * max(1.0, radius):
            raise ComplianceError(
                f"mixed radii: |({kv.kx}, {kv.ky})| = {kv.k} != {radius}")
        lam = sw_growth_rate(kv, bp)
        rho = kv.kx * kv.ky * ((bp.d1 - bp.d2) * kv.k2 + bp.b2 - bp.b1)
        if pp.f != 0:
            gamma = a + a * rho / pp.f
        else:
            if abs(a * rho) > COND_TOL * max(1.0, abs(a)):
                raise ComplianceError(
                    f"f = 0 requires alpha kx ky ((d1-d2)k^2 + b2-b1) = 0, "
                    f"got {a * rho:.3e} for direction ({kv.kx}, {kv.ky})")
            gamma = a
        comps.append(AngularComponent(kv, float(a), float(tau), lam, gamma))
    return SuperposedFlow("angular", "boussinesq_horizontal", tuple(comps), bp, pp)


# ---------------------------------------------------------------------------
# Primitive equations mode
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimitiveMode:
    """u = A exp(lam t) cos(omega z) cos(k y) (1, 0) on z in [-H, 0], f = 0.

    The vertical wavenumber omega solves the bottom-drag boundary condition
    beta = omega tan(omega H); lam = b k^2 - d k^4 - nu_v omega^2 (the source
    display is the unit-wavenumber case k = 1).
    """

    A: float
    k: float
    omega: float
    beta: float
    H: float
    lam: float
    bp: BackscatterParams
    pp: PhysicalParams
    model: str = "primitive"

    def wavevectors(self):
        # residual evaluation uses the rescaled vertical coordinate z' = omega z,
        # where the mode reads cos(z') cos(k y): grid wave content (k, 1)
        return [WaveVector(self.k, 1.0 if self.omega != 0 else 0.0)]

    def fields(self, t, Y, Zp):
        """Sample u on meshes of y and z' = omega z (both 2pi-periodic).

        For omega = 0 the vertical profile cos(omega z) is the constant 1.
        """
        vert = np.cos(Zp) if self.omega != 0 else np.ones_like(Zp)
        u = self.A * math.exp(self.lam * t) * vert * np.cos(self.k * Y)
        return {"u": u}

    def dt_fields(self, t, Y, Zp):
        return {"u": self.lam * self.fields(t, Y, Zp)["u"]}

    def boundary_residual(self) -> float:
        """|omega sin(omega H) - beta cos(omega H)| of the bottom condition."""
        return abs(self.omega * math.sin(self.omega * self.H)
                   - self.beta * math.cos(self.omega * self.H))


def primitive_mode(A, k, beta, H, b, d, nu_v) -> PrimitiveMode:
    """Explicit primitive-equations mode with bottom drag constant beta >= 0.

    Solves beta = omega tan(omega H) for omega in [0, min(pi/2, pi/(2H)))
    by bracketed root finding; steady when b k^2 = d k^4 + nu_v omega^2.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if H <= 0:
        raise ValueError("H must be > 0")
    if beta == 0:
        omega = 0.0
    else:
        upper = min(math.pi / 2, math.pi / (2 * H)) * (1 - 1e-12)
        g = lambda w: w * math.tan(w * H) - beta
        if g(upper) < 0:
            raise ComplianceError(
                f"no root of omega tan(omega H) = {beta} inside "
                f"(0, {upper:.6g}); beta exceeds the attainable range")
        omega = brentq(g, 0.0, upper, xtol=1e-15, rtol=8.9e-16)
    lam = backscatter_symbol(k, b, d) - nu_v * omega * omega
    return PrimitiveMode(A=float(A), k=float(k), omega=float(omega),
                         beta=float(beta), H=float(H), lam=lam,
                         bp=BackscatterParams.isotropic(b, d),
                         pp=PhysicalParams(nu_v=nu_v))


# ---------------------------------------------------------------------------
# Kolmogorov flows (Boussinesq, wave vector (k, 0, -m))
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KolmogorovMode:
    """v = exp(lam t) cos(k x - m z) (alpha (0,1,0) + beta (m,0,k)), coupled
    buoyancy c and pressure gamma, with the 4x4 coefficient matrix singular.

    Complex conjugate root pairs carry complex amplitudes; their physical
    flow is the real part, which the field evaluators return.
    """

    k: float
    m: float
    lam: complex
    alpha: complex
    beta: complex
    c: complex
    gamma: complex
    bp: BackscatterParams
    pp: PhysicalParams
    model: str = "boussinesq_xz"

    @property
    def is_real(self) -> bool:
        return abs(complex(self.lam).imag) == 0.0

    @property
    def deltas(self):
        K2 = self.k**2 + self.m**2
        return (self.bp.d1 * K2**2 - self.bp.b1 * K2,
                self.bp.d2 * K2**2 - self.bp.b2 * K2,
                self.pp.nu_v * K2,
                self.pp.mu * K2)

    def wavevectors(self):
        return [WaveVector(self.k, -self.m)]

    def _eval(self, t, X, Z, rate):
        xi = self.k * X - self.m * Z
        g = np.exp(self.lam * t) * (self.lam if rate else 1.0)
        cs = np.cos(xi)
        return {
            "u": np.real(self.beta * self.m * g) * cs,
            "v": np.real(self.alpha * g) * cs,
            "w": np.real(self.beta * self.k * g) * cs,
            "b": np.real(self.c * g) * cs,
            "p": np.real(self.gamma * g) * np.sin(xi),
        }

    def fields(self, t, X, Z):
        return self._eval(t, X, Z, rate=False)

    def dt_fields(self, t, X, Z):
        return self._eval(t, X, Z, rate=True)

    def matrix_residual(self) -> float:
        """Scaled norm of M(lam) (alpha, beta, c, gamma)."""
        M = kolmogorov_matrix(self.lam, self.k, self.m, self.bp, self.pp)
        vec = np.array([self.alpha, self.beta, self.c, self.gamma])
        denom = np.linalg.norm(M, ord="fro") * max(np.linalg.norm(vec), 1e-300)
        return float(np.linalg.norm(M @ vec) / denom)


def kolmogorov_matrix(lam, k, m, bp: BackscatterParams, pp: PhysicalParams) -> np.ndarray:
    K2 = k * k + m * m
    d1 = bp.d1 * K2**2 - bp.b1 * K2
    d2 = bp.d2 * K2**2 - bp.b2 * K2
    d3 = pp.nu_v * K2
    dmu = pp.mu * K2
    return np.array([
        [-pp.f, m * (lam + d1), 0.0, k],
        [lam + d2, pp.f * m, 0.0, 0.0],
        [0.0, k * (lam + d3), -1.0, -m],
        [0.0, pp.N2 * k, lam + dmu, 0.0],
    ])


def kolmogorov_det_poly(k, m, bp: BackscatterParams, pp: PhysicalParams) -> np.ndarray:
    """Coefficients (descending) of the cubic P with det M(lam) = -P(lam):

    P = (lam+dmu)[(lam+d2)(k^2(lam+d3) + m^2(lam+d1)) + f^2 m^2]
        + N^2 k^2 (lam+d2),

    leading coefficient k^2 + m^2, so the determinant is always exactly cubic.
    """
    K2 = k * k + m * m
    d1 = bp.d1 * K2**2 - bp.b1 * K2
    d2 = bp.d2 * K2**2 - bp.b2 * K2
    d3 = pp.nu_v * K2
    dmu = pp.mu * K2
    q = np.polymul([1.0, d2], [K2, k * k * d3 + m * m * d1])
    q = np.polyadd(q, [pp.f**2 * m * m])
    P = np.polymul([1.0, dmu], q)
    return np.polyadd(P, [pp.N2 * k * k, pp.N2 * k * k * d2])


def kolmogorov_solve(k, m, bp: BackscatterParams, pp: PhysicalParams) -> list[KolmogorovMode]:
    """All Kolmogorov modes at wave vector (k, 0, -m): the growth rates are
    the roots of the determinant cubic (all reported, complex pairs
    included), each paired with a null vector of the 4x4 matrix, sorted by
    descending real part."""
    if k == 0 and m == 0:
        raise ValueError("(k, m) must be nonzero")
    P = kolmogorov_det_poly(k, m, bp, pp)
    roots = np.roots(P)
    scale = 1.0 + np.abs(roots).max()
    modes = []
    for lam in roots:
        lam = complex(lam)
        if abs(lam.imag) <= 1e-12 * scale:
            lam = complex(lam.real)
        # smallest singular direction of M(lam) = the null vector
        M = kolmogorov_matrix(lam, k, m, bp, pp)
        _, _, vh = np.linalg.svd(M)
        vec = np.conj(vh[-1])
        lead = vec[np.argmax(np.abs(vec))]
        vec = vec / lead
        if lam.imag == 0:
            vec = vec.real + 0j
        modes.append(KolmogorovMode(k=float(k), m=float(m), lam=lam,
                                    alpha=vec[0], beta=vec[1],
                                    c=vec[2], gamma=vec[3], bp=bp, pp=pp))
    modes.sort(key=lambda md: -md.lam.real)
    return modes


# ---------------------------------------------------------------------------
# Internal gravity waves (Boussinesq, phase k x + m z - omega t)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IGWMode:
    """Travelling internal wave
    v = a1 e^{lam t} sin(xi) (0,1,0) + a2 omega e^{lam t} cos(xi) (-m, 0, k),
    buoyancy b1 sin + b2 omega cos, pressure g1 cos + g2 omega sin."""

    k: float
    m: float
    omega: float
    lam: float
    a1: float
    a2: float
    b1: float
    b2: float
    g1: float
    g2: float
    bp: BackscatterParams
    pp: PhysicalParams
    model: str = "boussinesq_xz"

    def wavevectors(self):
        return [WaveVector(self.k, self.m)]

    def amplitudes(self):
        return np.array([self.a1, self.a2, self.b1, self.b2, self.g1, self.g2])

    def fields(self, t, X, Z):
        xi = self.k * X + self.m * Z - self.omega * t
        g = math.exp(self.lam * t)
        sn, cs = np.sin(xi), np.cos(xi)
        return {
            "u": -self.a2 * self.omega * self.m * g * cs,
            "v": self.a1 * g * sn,
            "w": self.a2 * self.omega * self.k * g * cs,
            "b": self.b1 * g * sn + self.b2 * self.omega * g * cs,
            "p": self.g1 * g * cs + self.g2 * self.omega * g * sn,
        }

    def dt_fields(self, t, X, Z):
        """lam * field - omega * d(field)/dxi, both parts analytic."""
        xi = self.k * X + self.m * Z - self.omega * t
        g = math.exp(self.lam * t)
        sn, cs = np.sin(xi), np.cos(xi)
        om = self.omega
        base = self.fields(t, X, Z)
        dxi = {
            "u": self.a2 * om * self.m * g * sn,
            "v": self.a1 * g * cs,
            "w": -self.a2 * om * self.k * g * sn,
            "b": self.b1 * g * cs - self.b2 * om * g * sn,
            "p": -self.g1 * g * sn + self.g2 * om * g * cs,
        }
        return {key: self.lam * base[key] - om * dxi[key] for key in base}


def _igw_residual_components(amps, lam, omega, k, m,
                             bp: BackscatterParams, pp: PhysicalParams, xi):
    """Residual of the four Boussinesq equations for the IGW ansatz at phase
    values xi, time normalized so the e^{lam t} factor is one. The ansatz
    makes the transport terms vanish identically, so the residual is linear
    in the six amplitudes."""
    a1, a2, b1, b2, g1, g2 = amps
    K2 = k * k + m * m
    de1 = bp.d1 * K2**2 - bp.b1 * K2
    de2 = bp.d2 * K2**2 - bp.b2 * K2
    de3 = pp.nu_v * K2
    dmu = pp.mu * K2
    sn, cs = np.sin(xi), np.cos(xi)

    # fields and their xi-derivatives at t = 0 (growth factor stripped)
    v1, v1x = -a2 * omega * m * cs, a2 * omega * m * sn
    v2, v2x = a1 * sn, a1 * cs
    v3, v3x = a2 * omega * k * cs, -a2 * omega * k * sn
    bb, bbx = b1 * sn + b2 * omega * cs, b1 * cs - b2 * omega * sn
    px = -g1 * sn + g2 * omega * cs

    ddt = lambda field, fieldx: lam * field - omega * fieldx
    r_x = ddt(v1, v1x) - pp.f * v2 + k * px + de1 * v1
    r_y = ddt(v2, v2x) + pp.f * v1 + de2 * v2
    r_z = ddt(v3, v3x) + m * px - bb + de3 * v3
    r_b = ddt(bb, bbx) + pp.N2 * v3 + dmu * bb
    return np.stack([r_x, r_y, r_z, r_b])


def igw_assemble(k, m, omega, lam, bp: BackscatterParams,
                 pp: PhysicalParams) -> np.ndarray:
    """The 8x6 linear system for the IGW amplitudes, assembled numerically:
    substitute the ansatz for each unit amplitude and project the residual
    of every equation component onto {sin xi, cos xi} by discrete quadrature
    (exact for first-order trigonometric polynomials)."""
    if omega == 0:
        raise ValueError("igw_assemble requires omega != 0 "
                         "(omega = 0 is the Kolmogorov family)")
    nq = 8
    xi = 2.0 * np.pi * np.arange(nq) / nq
    sn, cs = np.sin(xi), np.cos(xi)
    cols = []
    for i in range(6):
        unit = np.zeros(6)
        unit[i] = 1.0
        res = _igw_residual_components(unit, lam, omega, k, m, bp, pp, xi)
        proj_sin = 2.0 / nq * res @ sn
        proj_cos = 2.0 / nq * res @ cs
        cols.append(np.concatenate([proj_sin, proj_cos]))
    return np.column_stack(cols)


def igw_modes(k, m, omega, lam, bp: BackscatterParams, pp: PhysicalParams,
              rcond=1e-9) -> list[IGWMode]:
    """Null-space modes of the assembled IGW system; empty when the wave
    numbers admit no travelling wave (the generic situation)."""
    A = igw_assemble(k, m, omega, lam, bp, pp)
    ns = null_space(A, rcond=rcond)
    modes = []
    for i in range(ns.shape[1]):
        vec = ns[:, i]
        lead = vec[np.argmax(np.abs(vec))]
        vec = vec / lead
        modes.append(IGWMode(k=float(k), m=float(m), omega=float(omega),
                             lam=float(lam), a1=vec[0], a2=vec[1], b1=vec[2],
                             b2=vec[3], g1=vec[4], g2=vec[5], bp=bp, pp=pp))
    return modes


def igw_special(m, sign, bp: BackscatterParams, pp: PhysicalParams,
                a2=1.0) -> IGWMode:
    """The closed-form IGW family: omega = sign*f, k = 0, a1 = -a2 m f,
    all buoyancy and pressure amplitudes zero, rate (b2 - d2 m^2) m^2.
    Requires horizontally isotropic backscatter (d1 = d2, b1 = b2)."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if bp.d1 != bp.d2 or bp.b1 != bp.b2:
        raise ComplianceError("the special IGW case requires d1 = d2 and b1 = b2")
    if pp.f == 0:
        raise ComplianceError("the special IGW case has omega = +-f, so f != 0")
    lam = (bp.b2 - bp.d2 * m * m) * m * m
    return IGWMode(k=0.0, m=float(m), omega=sign * pp.f, lam=lam,
                   a1=-a2 * m * pp.f, a2=a2, b1=0.0, b2=0.0, g1=0.0, g2=0.0,
                   bp=bp, pp=pp)


# ---------------------------------------------------------------------------
# Parallel flows (vertical velocity, coupled buoyancy)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParallelFlow:
    """v = w(t, x, y) e3 with buoyancy btilde(t, x, y), independent of
    horizontal backscatter. Per horizontal Fourier mode the pair (w, b)
    solves the linear 2x2 system

        d/dt (w, b) = [[-nu_v |k|^2, 1], [-N^2, -mu |k|^2]] (w, b),

    integrated by matrix exponential; a constant vertical pressure gradient
    ptilde enters the mean mode only. b_scale is a corruption hook for
    residual sensitivity tests (1.0 = intact).
    """

    modes: tuple  # ((kx, ky), w0, b0) triples, integer wavenumbers
    pp: PhysicalParams
    ptilde: float = 0.0
    b_scale: float = 1.0
    model: str = "boussinesq_xy"
    # parallel flows do not feel horizontal backscatter; zero coefficients
    # keep the generic residual evaluator honest about that
    bp: BackscatterParams = BackscatterParams.isotropic(0.0, 0.0)

    def wavevectors(self):
        return [WaveVector(float(kx), float(ky)) for (kx, ky), _, _ in self.modes]

    def coefficients(self, t):
        """Evolved (w, b) coefficient pairs at time t."""
        out = []
        for (kx, ky), w0, b0 in self.modes:
            K2 = kx * kx + ky * ky
            M = np.array([[-self.pp.nu_v * K2, 1.0], [-self.pp.N2, -self.pp.mu * K2]])
            state = expm(M * t) @ np.array([w0, b0], dtype=complex)
            out.append(((kx, ky), state[0], state[1]))
        return out

    def fields(self, t, X, Y):
        w = np.zeros_like(X, dtype=complex)
        b = np.zeros_like(X, dtype=complex)
        for (kx, ky), wc, bc in self.coefficients(t):
            phase = np.exp(1j * (kx * X + ky * Y))
            w += wc * phase
            b += bc * phase
        zero = np.zeros_like(X)
        return {"u": zero, "v": zero, "w": w.real, "b": self.b_scale * b.real,
                "p": zero}

    def dt_fields(self, t, X, Y):
        dw = np.zeros_like(X, dtype=complex)
        db = np.zeros_like(X, dtype=complex)
        for (kx, ky), wc, bc in self.coefficients(t):
            K2 = kx * kx + ky * ky
            M = np.array([[-self.pp.nu_v * K2, 1.0], [-self.pp.N2, -self.pp.mu * K2]])
            dstate = M @ np.array([wc, bc])
            phase = np.exp(1j * (kx * X + ky * Y))
            dw += dstate[0] * phase
            db += dstate[1] * phase
        zero = np.zeros_like(X)
        return {"u": zero, "v": zero, "w": dw.real, "b": self.b_scale * db.real,
                "p": zero}


def parallel_flow(w0_modes, b0_modes, pp: PhysicalParams, ptilde=0.0) -> ParallelFlow:
    """Build a parallel flow from horizontal Fourier data.

    w0_modes, b0_modes map integer (kx, ky) to complex coefficients of the
    initial vertical velocity and buoyancy. Coefficients of a real field
    (conjugate pairs) are the caller's responsibility; passing only one of
    a +-k pair is fine since only the real part is ever evaluated.
    """
    if ptilde != 0.0:
        raise NotImplementedError("nonzero mean pressure gradient not supported; "
                                  "the examples use ptilde = 0")
    keys = sorted(set(w0_modes) | set(b0_modes))
    modes = tuple(((kx, ky), complex(w0_modes.get((kx, ky), 0.0)),
                   complex(b0_modes.get((kx, ky), 0.0))) for kx, ky in keys)
    return ParallelFlow(modes=modes, pp=pp, ptilde=0.0)


@dataclass(frozen=True)
class CombinedXYFlow:
    """Parallel flow superposed with a barotropic horizontal flow whose wave
    vectors share the parallel flow's direction; the horizontal velocity then
    advects nothing, so the sum remains an explicit Boussinesq solution."""

    horizontal: object  # PlaneWaveFlow or SuperposedFlow, boussinesq_horizontal
    parallel: ParallelFlow
    model: str = "boussinesq_xy"

    @property
    def bp(self):
        return self.horizontal.bp

    @property
    def pp(self):
        return self.parallel.pp

    def wavevectors(self):
        return self.horizontal.wavevectors() + self.parallel.wavevectors()

    def fields(self, t, X, Y):
        h = self.horizontal.fields(t, X, Y)
        p = self.parallel.fields(t, X, Y)
        return {"u": h["u"], "v": h["v"], "w": p["w"], "b": p["b"], "p": h["p"]}

    def dt_fields(self, t, X, Y):
        h = self.horizontal.dt_fields(t, X, Y)
        p = self.parallel.dt_fields(t, X, Y)
        return {"u": h["u"], "v": h["v"], "w": p["w"], "b": p["b"], "p": h["p"]}


def superpose_parallel_with_horizontal(par: ParallelFlow, hor) -> CombinedXYFlow:
    """Superpose a parallel flow with a horizontal flow of the same wave
    vector direction (the paper's mixed superposition)."""
    if getattr(hor, "model", None) != "boussinesq_horizontal":
        raise ComplianceError("the horizontal factor must be a Boussinesq "
                              "horizontal flow")
    if par.pp != hor.pp:
        raise ComplianceError("parallel and horizontal flows must share the "
                              "same physical parameters")
    hks = hor.wavevectors()
    for pk in par.wavevectors():
        if pk.k == 0:
            continue
        for hk in hks:
            if abs(pk.kx * hk.ky - pk.ky * hk.kx) > 1e-12 * max(1.0, pk.k * hk.k):
                raise ComplianceError(
                    f"parallel-flow mode ({pk.kx}, {pk.ky}) is not aligned "
                    f"with the horizontal wave direction ({hk.kx}, {hk.ky})")
    if par.ptilde != 0:
        raise ComplianceError("superposition requires ptilde = 0")
    return CombinedXYFlow(horizontal=hor, parallel=par)
