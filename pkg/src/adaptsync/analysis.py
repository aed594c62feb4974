"""Synchronization diagnostics over states and recorded trajectories."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .integrate import Trajectory

DEFAULT_THRESHOLD = 1e-3
DEFAULT_WINDOW = 10.0
PLATEAU_TOL = 1e-2


def sync_error(x: np.ndarray, node_dim: int) -> float:
    """Root-mean-square distance of nodes 2..N from node 1:
    sqrt(sum_{j>=2} ||x_j - x_1||^2 / (N - 1))."""
    xm = np.asarray(x, dtype=float).reshape(-1, node_dim)
    if xm.shape[0] < 2:
        raise ValueError("need at least 2 nodes")
    d = xm[1:] - xm[0]
    return float(math.sqrt(np.sum(d * d) / (xm.shape[0] - 1)))


def sync_error_pairwise(x: np.ndarray, xi: np.ndarray) -> float:
    """Weighted disagreement X^T (U kron I_n) X evaluated as the pairwise
    sum (1/2) sum_ij xi_i xi_j ||x_i - x_j||^2; zero exactly on the
    synchronization manifold."""
    xi = np.asarray(xi, dtype=float)
    xm = np.asarray(x, dtype=float).reshape(xi.size, -1)
    d = xm[:, None, :] - xm[None, :, :]
    w = np.outer(xi, xi)
    return float(0.5 * np.sum(w * np.sum(d * d, axis=-1)))


@dataclass(frozen=True)
class SyncReport:
    """Summary of one run: terminal error and strength, whether the run
    synchronized, when the error first stayed below threshold, and how far
    the strength still moved over the trailing window."""

    e_initial: float
    e_final: float
    c_final: float
    synchronized: bool
    time_to_sync: float
    c_plateau_delta: float

    CSV_HEADER = "e_initial,e_final,c_final,synchronized,time_to_sync,c_plateau_delta"

    def to_csv_row(self) -> str:
        tts = "inf" if math.isinf(self.time_to_sync) else repr(self.time_to_sync)
        return ",".join(
            [
                repr(self.e_initial),
                repr(self.e_final),
                repr(self.c_final),
                "true" if self.synchronized else "false",
                tts,
                repr(self.c_plateau_delta),
            ]
        )

    def to_json_dict(self) -> dict:
        return {
            "e_initial": self.e_initial,
            "e_final": self.e_final,
            "c_final": self.c_final,
            "synchronized": self.synchronized,
            "time_to_sync": None if math.isinf(self.time_to_sync) else self.time_to_sync,
            "c_plateau_delta": self.c_plateau_delta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def summarize(
    traj: "Trajectory",
    threshold: float = DEFAULT_THRESHOLD,
    window: float = DEFAULT_WINDOW,
) -> SyncReport:
    """Reduce a trajectory to a :class:`SyncReport`.

    A run counts as synchronized when the terminal error is below the
    absolute threshold and, if it started above the threshold, has also
    dropped below ``threshold`` times the initial error.  ``time_to_sync``
    is the first sample time from which the error stays below threshold;
    infinity when that never happens.
    """
    times = np.asarray(traj.times)
    es = np.asarray(traj.e_series)
    cs = np.asarray(traj.c_series)
    if times.size == 0:
        raise ValueError("empty trajectory")

    e0 = float(es[0])
    e_final = float(es[-1])
    synchronized = e_final < threshold
    if e0 > threshold:
        synchronized = synchronized and e_final < threshold * e0

    above = es >= threshold
    if above.any():
        last_above = int(np.flatnonzero(above)[-1])
        time_to_sync = (
            float(times[last_above + 1]) if last_above + 1 < times.size else math.inf
        )
    else:
        time_to_sync = float(times[0])

    t_end = float(times[-1])
    idx = int(np.searchsorted(times, t_end - window, side="right")) - 1
    idx = max(idx, 0)
    c_plateau_delta = abs(float(cs[-1]) - float(cs[idx]))

    return SyncReport(
        e_initial=e0,
        e_final=e_final,
        c_final=float(cs[-1]),
        synchronized=synchronized,
        time_to_sync=time_to_sync,
        c_plateau_delta=c_plateau_delta,
    )
