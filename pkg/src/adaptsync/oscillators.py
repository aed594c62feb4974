"""Chaotic node vector fields and empirical one-sided quadratic bounds.

All four models are three-dimensional and autonomous; the field functions
broadcast over leading axes, so a whole network state of shape (N, 3) is
evaluated in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True, eq=False)
class OscillatorModel:
    """An n-dimensional autonomous vector field with named parameters.

    ``default_box`` is the axis-aligned sampling box covering the model's
    attractor; it seeds quadratic-bound probing and initial conditions.
    """

    name: str
    dim: int
    params: dict
    field: Callable[..., np.ndarray]
    default_box: np.ndarray

    def __post_init__(self):
        box = np.asarray(self.default_box, dtype=float).reshape(self.dim, 2)
        box.setflags(write=False)
        object.__setattr__(self, "default_box", box)


def chua_field(
    x: np.ndarray,
    t: float = 0.0,
    *,
    alpha: float = 9.0,
    beta: float = 100.0 / 7.0,
    m0: float = -1.0 / 7.0,
    m1: float = 2.0 / 7.0,
) -> np.ndarray:
    """Piecewise-linear double-scroll circuit.

    dx1 = alpha (x2 - h(x1)),  dx2 = x1 - x2 + x3,  dx3 = -beta x2,
    with h(u) = m1 u + (m0 - m1)(|u + 1| - |u - 1|) / 2.
    """
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    h = m1 * x1 + 0.5 * (m0 - m1) * (np.abs(x1 + 1.0) - np.abs(x1 - 1.0))
    return np.stack([alpha * (x2 - h), x1 - x2 + x3, -beta * x2], axis=-1)


def chen_field(
    x: np.ndarray,
    t: float = 0.0,
    *,
    a: float = 35.0,
    b: float = 3.0,
    c: float = 28.0,
) -> np.ndarray:
    """dx1 = a (x2 - x1),  dx2 = (c - a) x1 - x1 x3 + c x2,  dx3 = x1 x2 - b x3."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    return np.stack(
        [a * (x2 - x1), (c - a) * x1 - x1 * x3 + c * x2, x1 * x2 - b * x3], axis=-1
    )


def lorenz_field(
    x: np.ndarray,
    t: float = 0.0,
    *,
    sigma: float = 10.0,
    rho: float = 28.0,
    beta: float = 8.0 / 3.0,
) -> np.ndarray:
    """dx1 = sigma (x2 - x1),  dx2 = rho x1 - x1 x3 - x2,  dx3 = x1 x2 - beta x3."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    return np.stack(
        [sigma * (x2 - x1), rho * x1 - x1 * x3 - x2, x1 * x2 - beta * x3], axis=-1
    )


def rossler_field(
    x: np.ndarray,
    t: float = 0.0,
    *,
    a: float = 0.2,
    b: float = 0.2,
    c: float = 5.7,
) -> np.ndarray:
    """dx1 = -x2 - x3,  dx2 = x1 + a x2,  dx3 = b + x3 (x1 - c)."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    return np.stack([-x2 - x3, x1 + a * x2, b + x3 * (x1 - c)], axis=-1)


def chua(**overrides) -> OscillatorModel:
    params = {"alpha": 9.0, "beta": 100.0 / 7.0, "m0": -1.0 / 7.0, "m1": 2.0 / 7.0}
    params.update(overrides)
    return OscillatorModel(
        name="chua",
        dim=3,
        params=params,
        field=lambda x, t=0.0: chua_field(x, t, **params),
        default_box=[[-5.0, 5.0]] * 3,
    )


def chen(**overrides) -> OscillatorModel:
    params = {"a": 35.0, "b": 3.0, "c": 28.0}
    params.update(overrides)
    return OscillatorModel(
        name="chen",
        dim=3,
        params=params,
        field=lambda x, t=0.0: chen_field(x, t, **params),
        default_box=[[-30.0, 30.0]] * 3,
    )


def lorenz(**overrides) -> OscillatorModel:
    params = {"sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0}
    params.update(overrides)
    return OscillatorModel(
        name="lorenz",
        dim=3,
        params=params,
        field=lambda x, t=0.0: lorenz_field(x, t, **params),
        default_box=[[-30.0, 30.0]] * 3,
    )


def rossler(**overrides) -> OscillatorModel:
    params = {"a": 0.2, "b": 0.2, "c": 5.7}
    params.update(overrides)
    return OscillatorModel(
        name="rossler",
        dim=3,
        params=params,
        field=lambda x, t=0.0: rossler_field(x, t, **params),
        default_box=[[-15.0, 15.0], [-15.0, 15.0], [0.0, 30.0]],
    )


MODEL_FACTORIES: dict[str, Callable[..., OscillatorModel]] = {
    "chua": chua,
    "chen": chen,
    "lorenz": lorenz,
    "rossler": rossler,
}


def get_model(name: str, **overrides) -> OscillatorModel:
    """Look up a model by name with optional parameter overrides."""
    try:
        factory = MODEL_FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(MODEL_FACTORIES))
        raise ValueError(f"unknown model {name!r}; known models: {known}")
    return factory(**overrides)


@dataclass(frozen=True, eq=False)
class QuadCertificate:
    """Sampled evidence for a one-sided quadratic bound on a vector field.

    ``max_violation`` is the largest sampled value of
    (x-y)^T [f(x)-f(y)] - (x-y)^T Delta (x-y) + varpi (x-y)^T (x-y);
    a value <= 0 means the candidate (Delta, varpi) is consistent with the
    bound on the samples drawn (not a proof).
    """

    delta: np.ndarray
    varpi: float
    sample_box: np.ndarray
    n_samples: int
    max_violation: float
    worst_x: np.ndarray
    worst_y: np.ndarray

    @property
    def holds(self) -> bool:
        return self.max_violation <= 0.0


def quad_residual(
    model: OscillatorModel,
    x: np.ndarray,
    y: np.ndarray,
    delta: np.ndarray,
    varpi: float,
) -> np.ndarray:
    """Residual of the quadratic bound at one or more (x, y) pairs.

    Exactly zero at x = y; the inequality holds at a pair iff the residual
    is nonpositive there.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    df = model.field(x) - model.field(y)
    delta = np.asarray(delta, dtype=float)
    return (
        np.sum(d * df, axis=-1)
        - np.sum(d * delta * d, axis=-1)
        + varpi * np.sum(d * d, axis=-1)
    )


def quad_probe(
    model: OscillatorModel,
    delta,
    varpi: float,
    box=None,
    n_samples: int = 10_000,
    rng_seed: int = 0,
) -> QuadCertificate:
    """Probe a candidate (Delta, varpi) on uniform sample pairs from a box.

    ``delta`` is a scalar (isotropic) or a length-n sequence of diagonal
    entries.  ``box`` defaults to the model's attractor box.  Deterministic
    for a fixed seed.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    box = model.default_box if box is None else np.asarray(box, dtype=float)
    box = box.reshape(model.dim, 2)
    if (box[:, 1] < box[:, 0]).any():
        raise ValueError("box upper bounds must not be below lower bounds")
    delta = np.broadcast_to(np.asarray(delta, dtype=float), (model.dim,)).copy()

    rng = np.random.default_rng(rng_seed)
    xs = rng.uniform(box[:, 0], box[:, 1], size=(n_samples, model.dim))
    ys = rng.uniform(box[:, 0], box[:, 1], size=(n_samples, model.dim))
    residuals = quad_residual(model, xs, ys, delta, varpi)
    worst = int(np.argmax(residuals))
    return QuadCertificate(
        delta=delta,
        varpi=float(varpi),
        sample_box=box,
        n_samples=n_samples,
        max_violation=float(residuals[worst]),
        worst_x=xs[worst].copy(),
        worst_y=ys[worst].copy(),
    )
