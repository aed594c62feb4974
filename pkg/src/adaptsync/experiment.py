"""Experiment configuration: JSON round-trip, validation, and assembly of
the runnable pieces (model, scheme, initial state, integrator settings)."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import coupling
from .analysis import DEFAULT_THRESHOLD, DEFAULT_WINDOW
from .coupling import CouplingMatrix, TimeVaryingCoupling
from .dynamics import (
    InnerCoupling,
    MonotoneCoupling,
    SchemeConfig,
    SchemeKind,
    identity_coupling,
    identity_inner,
    tanh_coupling,
)
from .integrate import IntegratorConfig
from .oscillators import OscillatorModel, get_model


class ConfigError(ValueError):
    """A configuration problem, annotated with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


_MISSING = object()


def _get(d: dict, key: str, path: str, default=_MISSING):
    if key in d:
        return d[key]
    if default is not _MISSING:
        return default
    raise ConfigError(f"{path}.{key}" if path else key, "missing required field")


DEFAULT_INTEGRATOR = {
    "step": 0.005,
    "t_end": 50.0,
    "record_stride": 20,
    "method": "rk4",
}

DEFAULT_INITIAL_SCALE = 0.25


@dataclass
class ExperimentConfig:
    """Parsed experiment description; ``raw`` keeps the normalized dict so
    a dumped config re-parses to an identical experiment."""

    name: str
    model_name: str
    model_params: dict
    scheme: str
    alpha: float
    gamma: list | None
    nonlinearity: str | None
    network: dict
    adaptation: dict | None
    integrator: dict
    initial_seed: int
    initial_scale: float
    threshold: float
    window: float

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("", "config must be a JSON object")
        model = _get(d, "model", "")
        if not isinstance(model, dict):
            raise ConfigError("model", "must be an object with a 'name'")
        network = _get(d, "network", "")
        if not isinstance(network, dict):
            raise ConfigError("network", "must be an object with a 'generator'")
        integrator = dict(DEFAULT_INTEGRATOR)
        integrator.update(d.get("integrator") or {})
        cfg = cls(
            name=str(d.get("name", "experiment")),
            model_name=str(_get(model, "name", "model")),
            model_params=dict(model.get("params") or {}),
            scheme=str(_get(d, "scheme", "")),
            alpha=float(d.get("alpha", 1.0)),
            gamma=list(d["gamma"]) if d.get("gamma") is not None else None,
            nonlinearity=d.get("nonlinearity"),
            network=copy.deepcopy(network),
            adaptation=copy.deepcopy(d.get("adaptation")),
            integrator=integrator,
            initial_seed=int(d.get("initial_seed", 0)),
            initial_scale=float(d.get("initial_scale", DEFAULT_INITIAL_SCALE)),
            threshold=float(d.get("threshold", DEFAULT_THRESHOLD)),
            window=float(d.get("window", DEFAULT_WINDOW)),
        )
        try:
            SchemeKind(cfg.scheme)
        except ValueError:
            known = ", ".join(k.value for k in SchemeKind)
            raise ConfigError("scheme", f"unknown scheme {cfg.scheme!r}; one of: {known}")
        return cfg

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "model": {"name": self.model_name, "params": dict(self.model_params)},
            "scheme": self.scheme,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "nonlinearity": self.nonlinearity,
            "network": copy.deepcopy(self.network),
            "adaptation": copy.deepcopy(self.adaptation),
            "integrator": dict(self.integrator),
            "initial_seed": self.initial_seed,
            "initial_scale": self.initial_scale,
            "threshold": self.threshold,
            "window": self.window,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("", f"invalid JSON in {path}: {exc}")
        return cls.from_dict(data)


def _build_constant_network(spec: dict, path: str) -> CouplingMatrix:
    gen = _get(spec, "generator", path)
    n = int(spec.get("n_nodes", 0))
    if gen == "small-world":
        return coupling.generate_small_world_weighted(
            n_nodes=_require_n(n, path),
            mean_degree=int(spec.get("mean_degree", 4)),
            rewire_prob=float(spec.get("rewire_prob", 0.1)),
            rng_seed=int(spec.get("seed", 0)),
        )
    if gen == "complete":
        return coupling.generate_complete(_require_n(n, path))
    if gen == "random-symmetric":
        return coupling.generate_random_symmetric(
            n_nodes=_require_n(n, path),
            edge_prob=float(spec.get("edge_prob", 0.5)),
            rng_seed=int(spec.get("seed", 0)),
        )
    if gen == "file":
        file_path = _get(spec, "path", path)
        arr = coupling.read_matrix(file_path)
        mat = coupling.as_coupling_matrix(arr)
        if mat.class_tag == coupling.TAG_INVALID:
            _, violations = coupling.validate_condition(arr)
            raise ConfigError(path, f"matrix file {file_path} is invalid: {violations}")
        return mat
    raise ConfigError(f"{path}.generator", f"unknown generator {gen!r}")


def _require_n(n: int, path: str) -> int:
    if n < 2:
        raise ConfigError(f"{path}.n_nodes", "need at least 2 nodes")
    return n


def build_network(spec: dict, path: str = "network") -> CouplingMatrix | TimeVaryingCoupling:
    gen = _get(spec, "generator", path)
    if gen == "three-node-rotating":
        weights = spec.get("weights", [1.0, 1.0, 1.0])
        if len(weights) != 3:
            raise ConfigError(f"{path}.weights", "need exactly three positive weights")
        return coupling.three_node_time_varying(*[float(w) for w in weights])
    return _build_constant_network(spec, path)


def build_nonlinearity(name: str | None, dim: int, path: str = "nonlinearity") -> MonotoneCoupling:
    if name in (None, "tanh"):
        return tanh_coupling(dim)
    if name == "identity":
        return identity_coupling(dim)
    raise ConfigError(path, f"unknown nonlinearity {name!r}; one of: tanh, identity")


@dataclass(eq=False)
class Experiment:
    """Everything needed to run one trajectory."""

    config: ExperimentConfig
    model: OscillatorModel
    scheme: SchemeConfig
    x0: np.ndarray
    int_config: IntegratorConfig


def build_experiment(cfg: ExperimentConfig) -> Experiment:
    try:
        model = get_model(cfg.model_name, **cfg.model_params)
    except (ValueError, TypeError) as exc:
        raise ConfigError("model", str(exc))

    network = build_network(cfg.network)
    kind = SchemeKind(cfg.scheme)

    gamma: InnerCoupling | None = None
    nonlinearity: MonotoneCoupling | None = None
    if kind in (SchemeKind.NONLINEAR_KNOWN, SchemeKind.NONLINEAR_TIME_VARYING):
        nonlinearity = build_nonlinearity(cfg.nonlinearity, model.dim)
    else:
        if cfg.gamma is not None:
            if len(cfg.gamma) != model.dim:
                raise ConfigError(
                    "gamma", f"need {model.dim} diagonal gains, got {len(cfg.gamma)}"
                )
            gamma = InnerCoupling(np.asarray(cfg.gamma, dtype=float))
        else:
            gamma = identity_inner(model.dim)

    adaptation = None
    if cfg.adaptation is not None:
        spec = dict(cfg.adaptation)
        spec.setdefault("n_nodes", network.n_nodes)
        adaptation = _build_constant_network(spec, "adaptation")
        if adaptation.n_nodes != network.n_nodes:
            raise ConfigError(
                "adaptation",
                f"adaptation matrix size {adaptation.n_nodes} does not match "
                f"the network size {network.n_nodes}",
            )

    if cfg.alpha <= 0:
        raise ConfigError("alpha", "adaptation gain must be positive")

    try:
        scheme = SchemeConfig(
            kind=kind,
            alpha=cfg.alpha,
            dynamics_matrix=network,
            gamma=gamma,
            adaptation_matrix=adaptation,
            nonlinearity=nonlinearity,
        )
    except (ValueError, coupling.StructuralError) as exc:
        raise ConfigError("scheme", str(exc))

    try:
        int_config = IntegratorConfig(
            step=float(cfg.integrator["step"]),
            t_end=float(cfg.integrator["t_end"]),
            record_stride=int(cfg.integrator["record_stride"]),
            method=str(cfg.integrator["method"]),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError("integrator", str(exc))

    x0 = initial_network_state(
        model, network.n_nodes, cfg.initial_seed, cfg.initial_scale
    )
    return Experiment(cfg, model, scheme, x0, int_config)


def initial_network_state(
    model: OscillatorModel, n_nodes: int, seed: int, scale: float = DEFAULT_INITIAL_SCALE
) -> np.ndarray:
    """Node states drawn i.i.d. uniformly over the model's attractor box,
    shrunk toward the box center by ``scale``.

    The default keeps the fast quadratic transients of the stiffer models
    inside the stability region of the default step size.
    """
    rng = np.random.default_rng(seed)
    box = model.default_box
    center = 0.5 * (box[:, 0] + box[:, 1])
    half = 0.5 * (box[:, 1] - box[:, 0]) * scale
    u = rng.uniform(-1.0, 1.0, size=(n_nodes, model.dim))
    return (center + u * half).ravel()
