"""Bundled experiment presets.

One preset per scheme family and oscillator: the linear adaptive law on a
weighted small-world network, the nonlinear (tanh) variant, the
unknown-matrix variant adapting through a complete or a random symmetric
matrix, and the three-node time-varying demonstration.  Node count
defaults to 100 and is overridable from the command line.
"""

from __future__ import annotations

import copy

_OSCILLATORS = ("chua", "chen", "lorenz", "rossler")

_SMALL_WORLD = {
    "generator": "small-world",
    "n_nodes": 100,
    "mean_degree": 4,
    "rewire_prob": 0.1,
    "seed": 1,
}

_BASE = {
    "alpha": 1.0,
    "gamma": None,
    "nonlinearity": None,
    "adaptation": None,
    "integrator": {"step": 0.005, "t_end": 50.0, "record_stride": 20, "method": "rk4"},
    "initial_seed": 3,
    "initial_scale": 0.25,
    "threshold": 1e-3,
    "window": 10.0,
}


def _preset(name: str, model: str, scheme: str, **extra) -> dict:
    d = copy.deepcopy(_BASE)
    d["name"] = name
    d["model"] = {"name": model, "params": {}}
    d["scheme"] = scheme
    d["network"] = copy.deepcopy(_SMALL_WORLD)
    d.update(copy.deepcopy(extra))
    return d


def _build_all() -> dict[str, dict]:
    presets: dict[str, dict] = {}
    for osc in _OSCILLATORS:
        presets[f"linear-{osc}"] = _preset(f"linear-{osc}", osc, "linear-known")
        presets[f"nonlinear-{osc}"] = _preset(
            f"nonlinear-{osc}", osc, "nonlinear", nonlinearity="tanh"
        )
        presets[f"unknown-complete-{osc}"] = _preset(
            f"unknown-complete-{osc}",
            osc,
            "linear-unknown",
            adaptation={"generator": "complete"},
        )
        presets[f"unknown-random-{osc}"] = _preset(
            f"unknown-random-{osc}",
            osc,
            "linear-unknown",
            adaptation={"generator": "random-symmetric", "edge_prob": 0.5, "seed": 2},
        )
    for tag, weights in (("", (1.0, 1.0, 1.0)), ("-skew", (1.0, 1.0, 2.0))):
        name = f"timevarying-chua{tag}"
        presets[name] = _preset(
            name,
            "chua",
            "linear-time-varying",
            network={"generator": "three-node-rotating", "weights": list(weights)},
        )
    return presets


PRESETS: dict[str, dict] = _build_all()


def get_preset(name: str) -> dict:
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ValueError(f"unknown preset {name!r}; known presets: {known}")
