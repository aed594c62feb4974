"""Deterministic fixed-step integration of the augmented network state.

The augmented vector stacks the N*n node coordinates and the scalar
coupling strength; both advance together through classical RK4 (or Euler)
steps.  Sampled trajectories record the coupling strength, the
root-mean-square synchronization error, the weighted disagreement energy,
and the diagnostic energy computed with a reference strength of twice the
terminal one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import sync_error
from .dynamics import (
    AugmentedState,
    SchemeConfig,
    SchemeKind,
    adaptation_rate,
    coupling_term,
    disagreement_energy,
    network_drift,
)
from .oscillators import OscillatorModel

DIVERGENCE_GUARD = 1e6


class DivergenceError(RuntimeError):
    """The state left the guard region; carries the finite prefix recorded
    so far in ``trajectory``."""

    def __init__(self, message: str, trajectory: "Trajectory"):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = 0.005
    t_end: float = 50.0
    record_stride: int = 20
    method: str = "rk4"

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")
        if self.method not in ("rk4", "euler"):
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def n_steps(self) -> int:
        return max(1, round(self.t_end / self.step))


@dataclass(eq=False)
class Trajectory:
    """Sampled time series of one run.

    ``q_series`` holds the disagreement energy (1/2) X^T (U kron I_n) X;
    ``v_series`` adds the strength mismatch term for the default reference
    strength (twice the terminal one).  Use :meth:`lyapunov_series` for a
    custom reference.
    """

    times: np.ndarray
    c_series: np.ndarray
    e_series: np.ndarray
    q_series: np.ndarray
    v_series: np.ndarray | None
    final_state: AugmentedState
    alpha: float
    snapshots: np.ndarray | None = None

    def lyapunov_series(self, c_ref: float) -> np.ndarray:
        if self.alpha <= 0:
            raise ValueError("the diagnostic needs a positive adaptation gain")
        return self.q_series + (c_ref - self.c_series) ** 2 / self.alpha

    @property
    def c_final(self) -> float:
        return float(self.c_series[-1])

    @property
    def e_final(self) -> float:
        return float(self.e_series[-1])


def step_rk4(rhs: Callable[[float, np.ndarray], np.ndarray], y: np.ndarray, t: float, h: float) -> np.ndarray:
    """One classical 4-stage step."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_euler(rhs: Callable[[float, np.ndarray], np.ndarray], y: np.ndarray, t: float, h: float) -> np.ndarray:
    return y + h * rhs(t, y)


def _check_domination(config: SchemeConfig, t: float) -> None:
    a_t = config.dynamics_matrix.generator(t).entries
    a_hat = config.adaptation_matrix.entries
    off = a_hat - a_t
    np.fill_diagonal(off, 0.0)
    if off.min() < -1e-12:
        raise ValueError(
            f"domination violated at t={t:.6g}: some coupling weight exceeds "
            "the constant adaptation matrix"
        )


def integrate(
    config: SchemeConfig,
    model: OscillatorModel,
    x0: np.ndarray,
    int_config: IntegratorConfig,
    c0: float = 0.0,
    record_snapshots: bool = False,
    divergence_guard: float = DIVERGENCE_GUARD,
) -> Trajectory:
    """Evolve (X, c) from t = 0 and record every ``record_stride`` steps.

    The adaptive laws all start from c(0) = 0; a positive ``c0`` is meant
    for fixed-strength diagnostics (alpha = 0).  Raises
    :class:`DivergenceError` when the state exceeds the guard or turns
    non-finite, carrying the trajectory prefix recorded so far.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    n_total = config.n_nodes * config.node_dim
    if x0.size != n_total:
        raise ValueError(f"x0 must have length {n_total}, got {x0.size}")
    if not np.isfinite(x0).all():
        raise ValueError("x0 must be finite")
    if c0 < 0:
        raise ValueError("initial coupling strength must be nonnegative")

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        x = y[:-1]
        out = np.empty_like(y)
        out[:-1] = network_drift(model, x, t) + y[-1] * coupling_term(config, x, t)
        out[-1] = adaptation_rate(config, x, t)
        return out

    stepper = step_rk4 if int_config.method == "rk4" else step_euler
    h = int_config.step
    n_steps = int_config.n_steps

    times: list[float] = []
    cs: list[float] = []
    es: list[float] = []
    qs: list[float] = []
    snaps: list[np.ndarray] = []

    dominated = config.kind == SchemeKind.LINEAR_DOMINATED

    def record(k: int, y: np.ndarray) -> None:
        t = k * h
        x = y[:-1]
        times.append(t)
        cs.append(float(y[-1]))
        es.append(sync_error(x, config.node_dim))
        qs.append(disagreement_energy(config, x))
        if record_snapshots:
            snaps.append(x.copy())
        if dominated:
            _check_domination(config, t)

    def build(final_y: np.ndarray) -> Trajectory:
        c_arr = np.array(cs)
        q_arr = np.array(qs)
        v_arr = None
        if config.alpha > 0:
            c_ref = 2.0 * float(c_arr[-1])
            v_arr = q_arr + (c_ref - c_arr) ** 2 / config.alpha
        return Trajectory(
            times=np.array(times),
            c_series=c_arr,
            e_series=np.array(es),
            q_series=q_arr,
            v_series=v_arr,
            final_state=AugmentedState(final_y[:-1], float(final_y[-1])),
            alpha=config.alpha,
            snapshots=np.array(snaps) if record_snapshots else None,
        )

    y = np.concatenate([x0, [c0]])
    last_recorded = y.copy()
    record(0, y)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n_steps + 1):
            y = stepper(rhs, y, (k - 1) * h, h)
            x = y[:-1]
            if not np.isfinite(y).all() or np.abs(x).max() > divergence_guard:
                raise DivergenceError(
                    f"state diverged at t={k * h:.6g}", build(last_recorded)
                )
            if k % int_config.record_stride == 0 or k == n_steps:
                record(k, y)
                last_recorded = y.copy()
    return build(y)
