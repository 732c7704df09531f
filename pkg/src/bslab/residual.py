"""Numerical verification of explicit solutions by direct substitution.

verify_residual samples a flow on a uniform torus grid, differentiates the
samples spectrally (FFT), forms the full right-hand side of the governing
model pointwise, and returns

    || d/dt(flow) - RHS(flow) ||_2 / || flow ||_2.

The time derivative is taken from the flow's analytic rate when it exposes
one, otherwise by a central difference with dt = 1e-6. Spatial exactness
requires the flow's wave vectors to be integers (grid-periodic); a flow that
is not is rejected rather than silently mis-differentiated.

This path shares no algebra with the constructors in flows.py: the
constructors enforce existence conditions, this module only knows the PDEs.
"""

from __future__ import annotations

import numpy as np

from .errors import GridCompatibilityError
from .params import BackscatterParams, PhysicalParams

__all__ = ["verify_residual"]


def _check_periodic(flow, n):
    cutoff = n // 3
    for kv in flow.wavevectors():
        for comp in (kv.kx, kv.ky):
            if abs(comp - round(comp)) > 1e-9:
                raise GridCompatibilityError(
                    f"wave vector ({kv.kx}, {kv.ky}) is not integer; the flow "
                    f"is not periodic on the verification torus")
            if abs(comp) > cutoff:
                raise GridCompatibilityError(
                    f"wave vector component {comp} exceeds the resolved band "
                    f"|k| <= {cutoff} of an n = {n} grid")


def _grid(n):
    x = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.meshgrid(x, x, indexing="xy")


class _Spectral:
    """FFT helpers bound to one grid size.

    All operators band-limit their input to |kx|,|ky| <= n/3 first: sampling
    roundoff leaks ~1e-16 into every mode and the biharmonic weight k^4 would
    amplify the Nyquist-corner junk to ~1e-10. The flows to verify are
    low-mode by construction (checked), so truncation loses nothing.
    """

    def __init__(self, n):
        k = np.fft.fftfreq(n, d=1.0 / n)
        self.KX, self.KY = np.meshgrid(k, k, indexing="xy")
        cutoff = n // 3
        self.mask = (np.abs(self.KX) <= cutoff) & (np.abs(self.KY) <= cutoff)

    def _apply(self, a, symbol):
        return np.real(np.fft.ifft2(self.mask * symbol * np.fft.fft2(a)))

    def dx(self, a):
        return self._apply(a, 1j * self.KX)

    def dy(self, a):
        return self._apply(a, 1j * self.KY)

    def lap(self, a):
        return self._apply(a, -(self.KX**2 + self.KY**2))

    def bilap(self, a):
        return self._apply(a, (self.KX**2 + self.KY**2) ** 2)

    def backscatter(self, a, b_coef, d_coef):
        """-(d lap + b) lap a  =  -(d bilap(a) + b lap(a))."""
        return -(d_coef * self.bilap(a) + b_coef * self.lap(a))


def _euler2d_residual(f, df, sp, bp: BackscatterParams, pp: PhysicalParams):
    u, v, p = f["u"], f["v"], f["p"]
    ru = (df["u"] + u * sp.dx(u) + v * sp.dy(u) - pp.f * v + sp.dx(p)
          - sp.backscatter(u, bp.b1, bp.d1))
    rv = (df["v"] + u * sp.dx(v) + v * sp.dy(v) + pp.f * u + sp.dy(p)
          - sp.backscatter(v, bp.b2, bp.d2))
    return [ru, rv], [u, v]


def _shallow_water_residual(f, df, sp, bp, pp):
    u, v, eta = f["u"], f["v"], f["eta"]
    depth = pp.H0 + eta
    speed = np.sqrt(u * u + v * v)
    drag = -(pp.C + pp.Q * speed) / depth
    ru = (df["u"] + u * sp.dx(u) + v * sp.dy(u) - pp.f * v + pp.g * sp.dx(eta)
          - sp.backscatter(u, bp.b1, bp.d1) - drag * u)
    rv = (df["v"] + u * sp.dx(v) + v * sp.dy(v) + pp.f * u + pp.g * sp.dy(eta)
          - sp.backscatter(v, bp.b2, bp.d2) - drag * v)
    reta = df["eta"] + u * sp.dx(eta) + v * sp.dy(eta) + depth * (sp.dx(u) + sp.dy(v))
    return [ru, rv, reta], [u, v, eta]


def _boussinesq_horizontal_residual(f, df, sp, bp, pp):
    u, v, p = f["u"], f["v"], f["p"]
    ru = (df["u"] + u * sp.dx(u) + v * sp.dy(u) - pp.f * v + sp.dx(p)
          - sp.backscatter(u, bp.b1, bp.d1))
    rv = (df["v"] + u * sp.dx(v) + v * sp.dy(v) + pp.f * u + sp.dy(p)
          - sp.backscatter(v, bp.b2, bp.d2))
    return [ru, rv], [u, v]


def _boussinesq_xz_residual(f, df, sp, bp, pp):
    # coordinates (x, z); all fields independent of y, so the advection is
    # u dx + w dz, and dy of everything vanishes (sp.dy is reused as d/dz).
    u, v, w, b, p = f["u"], f["v"], f["w"], f["b"], f["p"]
    adv = lambda a: u * sp.dx(a) + w * sp.dy(a)
    ru = (df["u"] + adv(u) - pp.f * v + sp.dx(p)
          - sp.backscatter(u, bp.b1, bp.d1))
    rv = df["v"] + adv(v) + pp.f * u - sp.backscatter(v, bp.b2, bp.d2)
    rw = df["w"] + adv(w) + sp.dy(p) - b - pp.nu_v * sp.lap(w)
    rb = df["b"] + adv(b) + pp.N2 * w - pp.mu * sp.lap(b)
    return [ru, rv, rw, rb], [u, v, w, b]


def _boussinesq_xy_residual(f, df, sp, bp, pp, p_z=0.0):
    # coordinates (x, y), fields independent of z; p_z is the constant
    # vertical pressure gradient of a parallel flow (zero here).
    u, v, w, b, p = f["u"], f["v"], f["w"], f["b"], f["p"]
    adv = lambda a: u * sp.dx(a) + v * sp.dy(a)
    ru = (df["u"] + adv(u) - pp.f * v + sp.dx(p)
          - sp.backscatter(u, bp.b1, bp.d1))
    rv = (df["v"] + adv(v) + pp.f * u + sp.dy(p)
          - sp.backscatter(v, bp.b2, bp.d2))
    rw = df["w"] + adv(w) + p_z - b - pp.nu_v * sp.lap(w)
    rb = df["b"] + adv(b) + pp.N2 * w - pp.mu * sp.lap(b)
    return [ru, rv, rw, rb], [u, v, w, b]


def _primitive_residual(f, df, sp, bp, pp, omega=0.0):
    # coordinates (y, z') with z' = omega z; horizontal Laplacian is d/dy^2
    # (the mode has no x-dependence), vertical viscosity nu_v (omega d/dz')^2.
    u = f["u"]
    uyy = sp._apply(u, -sp.KX**2)
    uyyyy = sp._apply(u, sp.KX**4)
    uzz = sp._apply(u, -sp.KY**2)
    ru = (df["u"] + bp.d1 * uyyyy + bp.b1 * uyy
          - pp.nu_v * omega * omega * uzz)
    return [ru], [u]


_MODELS = {
    "euler2d": _euler2d_residual,
    "shallow_water": _shallow_water_residual,
    "boussinesq_horizontal": _boussinesq_horizontal_residual,
    "boussinesq_xz": _boussinesq_xz_residual,
    "boussinesq_xy": _boussinesq_xy_residual,
    "primitive": _primitive_residual,
}


def verify_residual(flow, n=64, t=0.0, use_analytic_dt=True, dt=1e-6) -> float:
    """Relative PDE residual of an explicit flow on an n x n torus grid."""
    if flow.model not in _MODELS:
        raise ValueError(f"unknown model {flow.model!r}")
    _check_periodic(flow, n)
    X, Y = _grid(n)
    sp = _Spectral(n)
    f = flow.fields(t, X, Y)
    if use_analytic_dt and hasattr(flow, "dt_fields"):
        df = flow.dt_fields(t, X, Y)
    else:
        lo = flow.fields(t - dt, X, Y)
        hi = flow.fields(t + dt, X, Y)
        df = {key: (hi[key] - lo[key]) / (2.0 * dt) for key in f}
    kwargs = {}
    if flow.model == "primitive":
        kwargs = {"omega": flow.omega}
    elif flow.model == "boussinesq_xy":
        carrier = flow if hasattr(flow, "ptilde") else getattr(flow, "parallel", None)
        kwargs = {"p_z": getattr(carrier, "ptilde", 0.0)}
    residuals, fields = _MODELS[flow.model](f, df, sp, flow.bp, flow.pp, **kwargs)
    rnorm = np.sqrt(sum(np.mean(r * r) for r in residuals))
    fnorm = np.sqrt(sum(np.mean(a * a) for a in fields))
    return float(rnorm / max(fnorm, 1e-300))
