"""Command-line front end: config parsing, presets, result serialization.

Usage:
    bslab <command> [--config FILE] [--preset NAME] [--set key=value ...]
          --out DIR

Commands: spectrum, modes, flows, simulate, growth, bifurcate, verify.
Resolution order (later wins): command defaults < preset < config file <
--set overrides. The fully resolved config is echoed to
<out>/config.resolved.json, every artifact is listed with its sha256 in
<out>/manifest.json, and all CSV floats are written as %.17g so identical
configs produce byte-identical outputs.

Exit codes: 0 success, 1 numerical failure, 2 configuration error.
"""

from __future__ import annotations

import os

# honor the thread cap before any numerical library spins up its pools
_threads = os.environ.get("BSLAB_THREADS")
if _threads:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, _threads)

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import presets as presets_mod
from .bifurcation import ge_amplitude, ge_profile, gw_amplitude_and_speed, \
    gw_leading_profile, gw_quadratures
from .dispersion import backscatter_symbol, classification_sweep, \
    critical_point, kernel_modes, sw_dispersion_roots
from .errors import BslabError, VerticalBranch
from .flows import (euler_plane_wave, igw_special, kolmogorov_solve,
                    sw_loci_map, sw_monochromatic)
from .growth import verify_growth_theorem
from .params import BackscatterParams, PhysicalParams
from .reduced import continue_branch, gw_travelling_solve, \
    reduced_steady_solve, steady_residual_norm
from .residual import verify_residual
from .simulator import SimConfig, run

COMMANDS = ("spectrum", "modes", "flows", "simulate", "growth",
            "bifurcate", "verify")

FLOAT_FMT = "%.17g"


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def _parse_override(text: str):
    if "=" not in text:
        raise ConfigError(f"--set expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare strings are fine
    return key.strip(), value


def _set_dotted(tree: dict, dotted: str, value):
    parts = dotted.split(".")
    node = tree
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot override below non-mapping key {p!r} "
                              f"in {dotted!r}")
    node[parts[-1]] = value


def resolve_config(command: str | None, config_path: str | None,
                   preset_name: str | None, overrides) -> dict:
    """Merge preset, config file and overrides into one resolved mapping."""
    merged: dict = {"command": command, "params": {}}
    if preset_name:
        try:
            base = presets_mod.preset(preset_name)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        merged["preset"] = preset_name
        if command and base["command"] != command:
            raise ConfigError(
                f"preset {preset_name!r} belongs to command "
                f"{base['command']!r}, not {command!r}")
        merged["command"] = base["command"]
        merged["params"].update(base["params"])
    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"config file not found: {config_path}")
        try:
            file_cfg = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in file_cfg.items():
            if key == "params":
                if not isinstance(value, dict):
                    raise ConfigError("'params' must be a mapping")
                merged["params"].update(value)
            elif key in ("command", "preset", "output_dir"):
                merged[key] = value
            else:
                raise ConfigError(f"unknown top-level config key {key!r}")
    for text in overrides or ():
        key, value = _parse_override(text)
        if key in ("command", "preset", "output_dir"):
            merged[key] = value
        else:
            _set_dotted(merged["params"], key, value)
    if not merged.get("command"):
        raise ConfigError("no command given (positional argument, preset, "
                          "or config key 'command')")
    if merged["command"] not in COMMANDS:
        raise ConfigError(f"unknown command {merged['command']!r}; "
                          f"choose from {COMMANDS}")
    return merged


def _need(params: dict, key: str, kind=float):
    if key not in params:
        raise ConfigError(f"missing required key params.{key}")
    value = params[key]
    if kind in (float, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"params.{key} must be a number, got {value!r}")
        return kind(value)
    return value


def _get(params: dict, key: str, default, kind=float):
    if key not in params:
        return default
    return _need(params, key, kind)


def _backscatter(params) -> BackscatterParams:
    try:
        if "b" in params or "d" in params:
            return BackscatterParams.isotropic(_need(params, "b"), _need(params, "d"))
        return BackscatterParams(_need(params, "b1"), _need(params, "b2"),
                                 _need(params, "d1"), _need(params, "d2"))
    except ValueError as exc:
        raise ConfigError(f"invalid backscatter parameters: {exc}") from None


def _physical(params, **over) -> PhysicalParams:
    kw = {name: _get(params, name, default) for name, default in
          (("f", 0.0), ("g", 9.8), ("H0", 0.1), ("C", 0.0), ("Q", 0.0),
           ("nu_v", 0.0), ("mu", 0.0), ("N2", 0.0))}
    kw.update(over)
    try:
        return PhysicalParams(**kw)
    except ValueError as exc:
        raise ConfigError(f"invalid physical parameters: {exc}") from None


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

class OutputDir:
    def __init__(self, path: Path):
        self.path = path
        path.mkdir(parents=True, exist_ok=True)
        self.artifacts: list[Path] = []

    def csv(self, name: str, header: list[str], rows):
        target = self.path / name
        with open(target, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                cells = []
                for cell in row:
                    if isinstance(cell, (float, np.floating)):
                        cells.append(FLOAT_FMT % cell)
                    elif isinstance(cell, (complex, np.complexfloating)):
                        cells.append(FLOAT_FMT % cell.real)
                    else:
                        cells.append(str(cell))
                fh.write(",".join(cells) + "\n")
        self.artifacts.append(target)
        return target

    def json(self, name: str, payload):
        target = self.path / name
        target.write_text(json.dumps(payload, indent=2, sort_keys=True,
                                     default=_jsonify) + "\n")
        self.artifacts.append(target)
        return target

    def npz(self, name: str, **arrays):
        target = self.path / name
        np.savez_compressed(target, **arrays)
        self.artifacts.append(target)
        return target

    def manifest(self):
        entries = []
        for art in sorted(self.artifacts, key=lambda p: p.name):
            digest = hashlib.sha256(art.read_bytes()).hexdigest()
            entries.append({"file": art.name, "sha256": digest,
                            "bytes": art.stat().st_size})
        target = self.path / "manifest.json"
        target.write_text(json.dumps({"outputs": entries}, indent=2) + "\n")
        return target


def _jsonify(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"cannot serialize {type(obj)!r}")


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _cmd_spectrum(params: dict, out: OutputDir) -> None:
    kind = _get(params, "kind", "shallow_water", str)
    if kind == "symbol":
        d = _need(params, "d")
        bs = _need(params, "b_values", list)
        k = np.linspace(0.0, _need(params, "k_max"), int(_need(params, "n_k", int)))
        rows = [[kv] + [backscatter_symbol(kv, b, d) for b in bs] for kv in k]
        out.csv("symbol.csv", ["k"] + [f"lambda_b={b:g}" for b in bs], rows)
        return
    bp = _backscatter(params)
    base_pp = _physical(params)
    c_values = params.get("C_values", [base_pp.C])
    k_max = _need(params, "k_max")
    n_k = int(_need(params, "n_k", int))
    ks = np.linspace(0.0, k_max, n_k)
    summary = {}
    if bp.is_isotropic and bp.b > 0 and bp.d > 0:
        cp = critical_point(bp, base_pp)
        summary = {"C_c": cp.C_c, "k_c": cp.k_c, "omega_c": cp.omega_c}
    for C in c_values:
        pp = _physical(params, C=float(C))
        rows = []
        for kv in ks:
            res = sw_dispersion_roots((kv, 0.0), bp, pp)
            r = np.sort_complex(res.roots)
            rows.append([kv, 0.0,
                         r[0].real, r[1].real, r[2].real,
                         r[0].imag, r[1].imag, r[2].imag,
                         res.stability.short()])
        out.csv(f"spectrum_C={C:g}.csv",
                ["kx", "ky", "re_l1", "re_l2", "re_l3",
                 "im_l1", "im_l2", "im_l3", "class"], rows)
    out.json("summary.json", summary)


def _cmd_modes(params: dict, out: OutputDir) -> None:
    bp = _backscatter(params)
    pp = _physical(params)
    cp = critical_point(bp, pp)
    direction = params.get("direction", [1.0, 0.0])
    kc_vec = (cp.k_c * direction[0], cp.k_c * direction[1])
    payload = {"C_c": cp.C_c, "k_c": cp.k_c, "omega_c": cp.omega_c, "modes": []}
    for kind in ("geostrophic", "gravity", "mass"):
        for mode in kernel_modes(kind, kc_vec, bp, pp):
            payload["modes"].append({
                "kind": mode.kind, "j": mode.j, "omega": mode.omega,
                "k": [mode.k.kx, mode.k.ky],
                "E": [[z.real, z.imag] for z in mode.E],
            })
    out.json("modes.json", payload)


def _cmd_flows(params: dict, out: OutputDir) -> None:
    bp = _backscatter(params)
    k_max = _need(params, "k_max")
    n_k = int(_need(params, "n_k", int))
    alpha1 = _get(params, "alpha1", 1.0)
    alpha2 = _get(params, "alpha2", 0.0)
    kx = np.linspace(-k_max, k_max, n_k)
    ky = np.linspace(-k_max, k_max, n_k)
    c_values = params.get("C_values", [None])
    for C in c_values:
        pp = _physical(params) if C is None else _physical(params, C=float(C))
        loci = sw_loci_map(kx, ky, bp, pp, alpha1, alpha2)
        rows = []
        for iy in range(n_k):
            for ix in range(n_k):
                rows.append([kx[ix], ky[iy], loci["lam"][iy, ix],
                             loci["amplitude_mismatch"][iy, ix],
                             int(loci["amplitude_ok"][iy, ix]),
                             int(loci["steady"][iy, ix]),
                             int(loci["admissible"][iy, ix])])
        tag = "" if C is None else f"_C={C:g}"
        out.csv(f"loci{tag}.csv",
                ["kx", "ky", "lambda", "amplitude_mismatch",
                 "amplitude_ok", "steady", "admissible"], rows)
    if "panel_c_b1" in params:
        bp_c = BackscatterParams(_need(params, "panel_c_b1"), bp.b2, bp.d1, bp.d2)
        pp = _physical(params)
        loci = sw_loci_map(kx, ky, bp_c, pp, alpha1, alpha2)
        rows = [[kx[ix], ky[iy], loci["lam"][iy, ix], int(loci["steady"][iy, ix])]
                for iy in range(n_k) for ix in range(n_k)]
        out.csv("loci_panel_c.csv", ["kx", "ky", "lambda", "steady"], rows)


def _cmd_simulate(params: dict, out: OutputDir) -> None:
    try:
        cfg = SimConfig(
            n=int(_get(params, "n", 64, int)),
            dt=_need(params, "dt"),
            t_end=_need(params, "t_end"),
            b=_need(params, "b"),
            d=_need(params, "d"),
            f=_get(params, "f", 0.0),
            seed=int(_get(params, "seed", 0, int)),
            dealias_fraction=_get(params, "dealias_fraction", 2.0 / 3.0),
            output_stride=int(_get(params, "output_stride", 10, int)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid simulate parameters: {exc}") from None
    final, diag = run(cfg)
    rows = []
    for i, t in enumerate(diag.t):
        a = diag.amplitudes[i]
        m = diag.mean[i]
        rows.append([t, diag.energy[i], diag.grad_sq[i], diag.lap_sq[i],
                     diag.large_norm[i], diag.small_h1[i],
                     a[0], a[1], a[2], a[3], m[0], m[1]])
    out.csv("diagnostics.csv",
            ["t", "E", "gradE", "lapE", "large_norm", "small_H1",
             "a_e1", "a_e2", "a_e3", "a_e4", "mx", "my"], rows)
    out.npz("final_field.npz", uhat=final.uhat, vhat=final.vhat,
            n=np.array([final.n]))
    frac = (np.pi * np.sqrt(2.0) * np.linalg.norm(diag.amplitudes[-1])
            / max(np.sqrt(2.0 * diag.energy[-1]), 1e-300)) ** 2
    out.json("summary.json", {
        "t_end": diag.t[-1],
        "energy_final": diag.energy[-1],
        "large_scale_energy_fraction": float(frac),
    })


def _cmd_growth(params: dict, out: OutputDir) -> None:
    b = _need(params, "b")
    d = _need(params, "d")
    eps = _need(params, "eps")
    size = _need(params, "perturbation")
    seeds = params.get("seeds", [0])
    modes = params.get("modes", [1])
    reports = []
    rows = []
    for j in modes:
        coeffs = [0.0] * 4
        coeffs[int(j) - 1] = 1.0
        for seed in seeds:
            rep = verify_growth_theorem(
                b, d, coeffs, size, eps,
                n=int(_get(params, "n", 32, int)),
                dt=_get(params, "dt", 1e-3),
                t_end=_get(params, "t_end", 10.0),
                f=_get(params, "f", 0.0),
                seed=int(seed))
            reports.append({"mode": int(j), "seed": int(seed),
                            **{k: getattr(rep, k) for k in (
                                "fitted_rate_large", "fitted_rate_small",
                                "r_squared_large", "growth_bound_rate",
                                "decay_bound_rate", "lower_bound_ok",
                                "envelope_ok", "rate_ok")},
                            "passed": rep.passed})
            rows.append([int(j), int(seed), rep.fitted_rate_large,
                         rep.fitted_rate_small, rep.growth_bound_rate,
                         rep.decay_bound_rate, int(rep.passed)])
    out.json("growth_report.json", {"reports": reports,
                                    "all_passed": all(r["passed"] for r in reports)})
    out.csv("growth_summary.csv",
            ["mode", "seed", "rate_large", "rate_small", "bound_growth",
             "bound_decay", "passed"], rows)
    if not all(r["passed"] for r in reports):
        raise BslabError("growth verification failed for at least one run")


def _cmd_bifurcate(params: dict, out: OutputDir) -> None:
    bp = _backscatter(params)
    kind = _get(params, "kind", "branches", str)
    if kind == "amplitudes":
        pp = _physical(params)
        alphas = np.linspace(0.0, _need(params, "alpha_max"),
                             int(_need(params, "n_alpha", int)))
        qs = _need(params, "Q_smooth")
        qn = _need(params, "Q_nonsmooth")
        rows = []
        for a in alphas:
            try:
                amp_s = ge_amplitude(a, 0.0, qs, bp, pp)
            except VerticalBranch:
                amp_s = float("nan")
            amp_n = ge_amplitude(a, 0.0, qn, bp, pp)
            rows.append([a, amp_s, amp_n])
        out.csv("amplitude_vs_alpha.csv", ["alpha", "A1_smooth", "A1_nonsmooth"], rows)
        ka = _need(params, "kappa_alpha")
        kappas = np.linspace(-_need(params, "kappa_max"), _need(params, "kappa_max"),
                             int(_need(params, "n_kappa", int)))
        rows = [[kp, ge_amplitude(ka, kp, qs, bp, pp),
                 ge_amplitude(ka, kp, qn, bp, pp)] for kp in kappas]
        out.csv("amplitude_vs_kappa.csv", ["kappa", "A1_smooth", "A1_nonsmooth"], rows)
        return
    # numerical branches
    Q = _need(params, "Q")
    pp = _physical(params, Q=Q)
    cp = critical_point(bp, pp)
    alpha = _need(params, "alpha_start")
    n_col = int(_get(params, "n_collocation", 64, int))
    a1 = ge_amplitude(alpha, 0.0, Q, bp, pp)
    C0 = cp.C_c - alpha * pp.H0
    guess = ge_profile(a1, alpha, 0.0, Q, bp, pp, n=n_col)
    prof = reduced_steady_solve(guess, C0, guess.k, bp, pp)
    branch = continue_branch(prof, bp, pp,
                             n_steps=int(_get(params, "n_steps", 2000, int)))
    rows = []
    for pt in branch:
        psi = pt.profile.psi_values()
        rows.append([pt.C, pt.A1, float(np.sqrt(np.mean(psi**2))),
                     float(np.max(pt.eigenvalues.real)), pt.n_unstable])
    out.csv("branch_ge.csv",
            ["C", "A1", "psi_rms", "max_re_eig", "n_unstable"], rows)
    out.json("profiles_ge.json", {
        "k": branch[0].profile.k,
        "points": [{"C": pt.C, "A1": pt.A1,
                    "phi_hat": [[z.real, z.imag] for z in pt.profile.phi_hat]}
                   for pt in branch[:: max(1, len(branch) // 16)]],
    })
    # one gravity-wave point at the same alpha (travelling solve)
    amp, s0 = gw_amplitude_and_speed(alpha, 0.0, Q, bp, pp)
    U, V, H = gw_leading_profile(amp, bp, pp, (1.0, 0.0), n_col)
    sol = gw_travelling_solve(U, V, H, s0, cp.k_c, C0, bp, pp, cp.omega_c)
    quads = gw_quadratures(bp, pp)
    out.json("gw_point.json", {
        "alpha": alpha, "speed_correction": sol["s"], "residual": sol["residual"],
        "A1_leading": amp, "I1": quads.I1, "I2": quads.I2,
        "U": list(sol["U"]), "V": list(sol["V"]), "H": list(sol["H"]),
    })


def _cmd_verify(params: dict, out: OutputDir) -> None:
    """Residual checks of the explicit-solution catalog on a torus grid."""
    n = int(_get(params, "n", 64, int))
    rows = []

    def check(name, flow, t=0.5):
        rows.append([name, verify_residual(flow, n=n, t=t)])

    check("euler_k01", euler_plane_wave(1.0, (0, 1), 0.0015, 0.001, 0.3))
    check("euler_k02", euler_plane_wave(0.7, (0, 2), 0.0015, 0.001, 0.3))
    bp_iso = BackscatterParams.isotropic(2.0, 1.0)
    pp0 = PhysicalParams(f=0.0, g=9.8, H0=0.1)
    check("sw_growing", sw_monochromatic((1, 0), 1.0, 0.0, 0.3, 0.0, bp_iso, pp0))
    bp_an = BackscatterParams(b1=1.5, b2=2.2, d1=1.0, d2=1.04)
    pp_k = PhysicalParams(f=0.3, g=9.8, H0=0.1, N2=1.0, nu_v=0.25, mu=0.1)
    for i, mode in enumerate(kolmogorov_solve(1.0, 1.0, bp_an, pp_k)):
        check(f"kolmogorov_{i}", mode)
    check("igw_special", igw_special(1, +1, BackscatterParams.isotropic(2.2, 1.04), pp_k))
    out.csv("catalog_residuals.csv", ["flow", "residual"], rows)
    worst = max(r[1] for r in rows)
    out.json("summary.json", {"worst_residual": worst, "ok": worst <= 1e-8})
    if worst > 1e-8:
        raise BslabError(f"catalog residual {worst:.3e} exceeds 1e-8")


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "modes": _cmd_modes,
    "flows": _cmd_flows,
    "simulate": _cmd_simulate,
    "growth": _cmd_growth,
    "bifurcate": _cmd_bifurcate,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bslab",
        description="Backscatter laboratory: spectra, explicit flows, "
                    "simulation, growth verification, bifurcation.")
    parser.add_argument("command", nargs="?", choices=COMMANDS,
                        help="what to run (may come from preset/config instead)")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--preset", help="named preset (fig1..fig7, thm43)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key "
                        "(dotted paths address params)")
    parser.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)

    try:
        resolved = resolve_config(args.command, args.config, args.preset,
                                  args.overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = OutputDir(Path(args.out))
    resolved["output_dir"] = str(out.path)
    try:
        handler = _HANDLERS[resolved["command"]]
        out.json("config.resolved.json", resolved)
        handler(resolved["params"], out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BslabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        out.manifest()
        return 1
    out.manifest()
    return 0


if __name__ == "__main__":
    sys.exit(main())
