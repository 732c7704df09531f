"""Experiment presets reproducing the figure data sets.

Each preset fixes the command and every physical parameter; the CLI merges
presets with config files and --set overrides (overrides win).
"""

from __future__ import annotations

import copy

_ISO = {"b1": 2.0, "b2": 2.0, "d1": 1.0, "d2": 1.0}
_PHYS = {"f": 0.3, "g": 9.8, "H0": 0.1, "C": 0.0, "Q": 0.0,
         "nu_v": 0.0, "mu": 0.0, "N2": 0.0}

PRESETS: dict = {
    # scalar backscatter growth-rate curves, d = 1, three b samples
    "fig1": {
        "command": "spectrum",
        "params": {
            "kind": "symbol",
            "d": 1.0,
            "b_values": [0.6, 1.6, 3.0],
            "k_max": 2.2,
            "n_k": 441,
        },
    },
    # isotropic shallow water spectrum: critical, stable, unstable drag
    "fig2": {
        "command": "spectrum",
        "params": {
            "kind": "shallow_water",
            **_ISO,
            **{**_PHYS, "C": 0.1},
            "C_values": [0.12, 0.1, 0.08],
            "k_max": 12.0,
            "n_k": 601,
        },
    },
    # loci of monochromatic shallow water flows, anisotropic (panels a, b)
    # and the circle-superposition variant (panel c, b1 = 1.1)
    "fig3": {
        "command": "flows",
        "params": {
            "b1": 1.5, "b2": 2.2, "d1": 1.0, "d2": 1.04,
            **_PHYS,
            "alpha1": 1.0, "alpha2": -0.5,
            "panel_c_b1": 1.1,
            "k_max": 1.6, "n_k": 321,
        },
    },
    # long backscatter run concentrating energy in the |k| = 1 shear modes
    "fig4": {
        "command": "simulate",
        "params": {
            "n": 128, "dt": 0.1, "t_end": 8500.0,
            "b": 0.0015, "d": 0.001, "f": 0.0,
            "seed": 0, "output_stride": 50,
        },
    },
    # anisotropic growth loci with alpha2 = 0 at decreasing drag
    "fig5": {
        "command": "flows",
        "params": {
            "b1": 1.5, "b2": 2.2, "d1": 1.0, "d2": 1.04,
            **_PHYS,
            "alpha1": 1.0, "alpha2": 0.0,
            "C_values": [0.11, 0.08, 0.05, 0.0],
            "k_max": 1.6, "n_k": 321,
        },
    },
    # leading-order GE amplitude curves (smooth f = 10 vs non-smooth Q = 0.5)
    "fig6": {
        "command": "bifurcate",
        "params": {
            "kind": "amplitudes",
            **_ISO,
            **{**_PHYS, "f": 10.0},
            "Q_smooth": 0.0, "Q_nonsmooth": 0.5,
            "alpha_max": 0.2, "n_alpha": 201,
            "kappa_alpha": 0.1, "kappa_max": 0.25, "n_kappa": 201,
        },
    },
    # numerical GE/GW branches, isotropic, Q = 0.05
    "fig7": {
        "command": "bifurcate",
        "params": {
            "kind": "branches",
            **_ISO,
            **_PHYS,
            "Q": 0.05,
            "alpha_start": 0.01,
            "n_collocation": 64,
            "n_steps": 2000,
        },
    },
    # stable unbounded growth harness
    "thm43": {
        "command": "growth",
        "params": {
            "b": 1.5, "d": 1.0, "f": 0.0,
            "eps": 0.05,
            "perturbation": 1e-3,
            "n": 32, "dt": 1e-3, "t_end": 10.0,
            "seeds": list(range(5)),
            "modes": [1, 2, 3, 4],
        },
    },
}


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return copy.deepcopy(PRESETS[name])
