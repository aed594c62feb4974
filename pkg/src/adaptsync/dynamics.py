"""Network right-hand sides: coupled drift plus the coupling-strength
adaptation law, assembled per scheme kind.

Six kinds are supported.  The linear ones differ in which matrix drives
the adaptation quadratic form: the coupling matrix itself weighted by its
left null vector ("linear-known", "linear-time-varying"), a freely chosen
symmetric matrix when the true coupling is unknown ("linear-unknown"), or
a constant symmetric matrix dominating a time-varying coupling entrywise
("linear-dominated").  The nonlinear kinds couple through componentwise
monotone maps and adapt with the symmetrized coupling matrix.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .coupling import (
    TAG_A2,
    TAG_INVALID,
    CouplingMatrix,
    LeftEigenvector,
    StructuralError,
    TimeVaryingCoupling,
    build_projection,
    left_eigenvector,
    validate_condition,
)
from .oscillators import OscillatorModel


class SchemeKind(str, enum.Enum):
    LINEAR_KNOWN = "linear-known"
    LINEAR_UNKNOWN = "linear-unknown"
    LINEAR_TIME_VARYING = "linear-time-varying"
    LINEAR_DOMINATED = "linear-dominated"
    NONLINEAR_KNOWN = "nonlinear"
    NONLINEAR_TIME_VARYING = "nonlinear-time-varying"


LINEAR_KINDS = frozenset(
    {
        SchemeKind.LINEAR_KNOWN,
        SchemeKind.LINEAR_UNKNOWN,
        SchemeKind.LINEAR_TIME_VARYING,
        SchemeKind.LINEAR_DOMINATED,
    }
)
TIME_VARYING_KINDS = frozenset(
    {
        SchemeKind.LINEAR_TIME_VARYING,
        SchemeKind.LINEAR_DOMINATED,
        SchemeKind.NONLINEAR_TIME_VARYING,
    }
)


@dataclass(frozen=True, eq=False)
class InnerCoupling:
    """Positive diagonal gains selecting how node coordinates couple."""

    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float).ravel().copy()
        if (g <= 0).any():
            raise ValueError("inner coupling gains must be positive")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @property
    def dim(self) -> int:
        return self.gamma.size


def identity_inner(dim: int) -> InnerCoupling:
    return InnerCoupling(np.ones(dim))


@dataclass(frozen=True, eq=False)
class MonotoneCoupling:
    """Componentwise monotone coupling maps with slope at least ``beta``."""

    components: tuple
    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("slope lower bound must be positive")
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def dim(self) -> int:
        return len(self.components)

    def apply(self, xm: np.ndarray) -> np.ndarray:
        """Apply g_k to column k of an (N, n) node-state matrix."""
        return np.stack(
            [g(xm[..., k]) for k, g in enumerate(self.components)], axis=-1
        )

    def sampled_slope_min(
        self, lo: float, hi: float, n_samples: int = 1000, rng_seed: int = 0
    ) -> float:
        """Smallest difference quotient over random pairs in [lo, hi]."""
        rng = np.random.default_rng(rng_seed)
        u = rng.uniform(lo, hi, n_samples)
        v = rng.uniform(lo, hi, n_samples)
        keep = np.abs(u - v) > 1e-9
        u, v = u[keep], v[keep]
        slopes = [
            float(((g(u) - g(v)) / (u - v)).min()) for g in self.components
        ]
        return min(slopes)


def identity_coupling(dim: int) -> MonotoneCoupling:
    return MonotoneCoupling(tuple([lambda u: u] * dim), beta=1.0)


def tanh_coupling(dim: int) -> MonotoneCoupling:
    """g(u) = u + tanh(u); slope between 1 and 2, so beta = 1."""
    return MonotoneCoupling(tuple([lambda u: u + np.tanh(u)] * dim), beta=1.0)


@dataclass(frozen=True, eq=False)
class AugmentedState:
    """Stacked node states together with the scalar coupling strength."""

    x_stacked: np.ndarray
    c: float

    def __post_init__(self):
        x = np.asarray(self.x_stacked, dtype=float).ravel()
        object.__setattr__(self, "x_stacked", x)
        object.__setattr__(self, "c", float(self.c))


@dataclass(eq=False)
class SchemeConfig:
    """Which adaptive law runs, with its matrices and gains.

    Validation happens at construction: class tags are checked against the
    chosen kind, the left null vector and disagreement projection of the
    dynamics matrix are computed once, and the adaptation matrix is
    derived where the kind calls for it.
    """

    kind: SchemeKind
    alpha: float
    dynamics_matrix: CouplingMatrix | TimeVaryingCoupling
    gamma: InnerCoupling | None = None
    adaptation_matrix: CouplingMatrix | None = None
    nonlinearity: MonotoneCoupling | None = None

    # derived at validation time
    xi: np.ndarray = field(init=False, repr=False)
    u: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.kind = SchemeKind(self.kind)
        if self.alpha < 0:
            raise ValueError("adaptation gain must be nonnegative")

        time_varying = isinstance(self.dynamics_matrix, TimeVaryingCoupling)
        if (self.kind in TIME_VARYING_KINDS) != time_varying:
            raise ValueError(
                f"scheme {self.kind.value!r} requires a "
                f"{'time-varying' if self.kind in TIME_VARYING_KINDS else 'constant'} "
                "dynamics matrix"
            )

        if time_varying:
            xi = self.dynamics_matrix.shared_xi.xi
        else:
            if self.dynamics_matrix.class_tag == TAG_INVALID:
                raise StructuralError("dynamics matrix is invalid")
            xi = left_eigenvector(self.dynamics_matrix).xi
        self.xi = xi
        self.u = build_projection(LeftEigenvector(xi)).u

        if self.kind in LINEAR_KINDS:
            if self.gamma is None:
                raise ValueError("linear schemes need an inner coupling")
        if self.kind in (SchemeKind.NONLINEAR_KNOWN, SchemeKind.NONLINEAR_TIME_VARYING):
            if self.nonlinearity is None:
                raise ValueError("nonlinear schemes need a monotone coupling")

        if self.kind == SchemeKind.LINEAR_UNKNOWN:
            self._require_a2_adaptation()
        elif self.kind == SchemeKind.LINEAR_DOMINATED:
            self._require_a2_adaptation()
            self._check_a2_family()
        elif self.kind == SchemeKind.NONLINEAR_KNOWN:
            if self.adaptation_matrix is not None:
                raise ValueError(
                    "the nonlinear scheme derives its adaptation matrix; "
                    "do not supply one"
                )
            self._adaptation_entries = balanced_symmetrization(
                self.dynamics_matrix.entries
            )
        elif self.kind == SchemeKind.NONLINEAR_TIME_VARYING:
            self._check_a2_family()
        if self.kind in (SchemeKind.LINEAR_UNKNOWN, SchemeKind.LINEAR_DOMINATED):
            self._adaptation_entries = self.adaptation_matrix.entries

    def _require_a2_adaptation(self):
        if self.adaptation_matrix is None:
            raise ValueError(f"scheme {self.kind.value!r} needs an adaptation matrix")
        if self.adaptation_matrix.class_tag != TAG_A2:
            raise StructuralError(
                f"adaptation matrix must be symmetric (class A2), "
                f"got {self.adaptation_matrix.class_tag!r}"
            )

    def _check_a2_family(self):
        """Sample-check that a time-varying family is symmetric (class A2)."""
        for t in np.linspace(0.0, 2.0 * np.pi, 9):
            mat = self.dynamics_matrix.generator(float(t))
            tag, _ = validate_condition(mat.entries)
            if tag != TAG_A2:
                raise StructuralError(
                    f"scheme {self.kind.value!r} requires a symmetric coupling "
                    f"matrix for all t; sampled class {tag!r} at t={t:.3f}"
                )

    @property
    def n_nodes(self) -> int:
        return self.dynamics_matrix.n_nodes

    @property
    def node_dim(self) -> int:
        if self.gamma is not None:
            return self.gamma.dim
        return self.nonlinearity.dim

    def dynamics_entries(self, t: float) -> np.ndarray:
        if isinstance(self.dynamics_matrix, TimeVaryingCoupling):
            return self.dynamics_matrix.generator(t).entries
        return self.dynamics_matrix.entries


def balanced_symmetrization(a: np.ndarray) -> np.ndarray:
    """Symmetrize the off-diagonal couplings and rebalance the diagonal so
    row sums stay zero.  Coincides with (A + A^T)/2 whenever the column
    sums of A vanish, in particular for symmetric A."""
    b = 0.5 * (a + a.T)
    np.fill_diagonal(b, 0.0)
    np.fill_diagonal(b, -b.sum(axis=1))
    return b


def network_drift(model: OscillatorModel, x: np.ndarray, t: float = 0.0) -> np.ndarray:
    """Blockwise application of the node field to a stacked state."""
    x = np.asarray(x, dtype=float)
    if x.size % model.dim != 0:
        raise ValueError(
            f"stacked state length {x.size} is not a multiple of dim {model.dim}"
        )
    xm = x.reshape(-1, model.dim)
    return model.field(xm, t).ravel()


def linear_coupling_term(
    a: CouplingMatrix | np.ndarray, gamma: InnerCoupling, x: np.ndarray
) -> np.ndarray:
    """(A kron Gamma) x without materializing the Kronecker product."""
    entries = a.entries if isinstance(a, CouplingMatrix) else np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    n_nodes = entries.shape[0]
    if x.size != n_nodes * gamma.dim:
        raise ValueError(
            f"stacked state length {x.size} does not match "
            f"{n_nodes} nodes of dimension {gamma.dim}"
        )
    xm = x.reshape(n_nodes, gamma.dim)
    return ((entries @ xm) * gamma.gamma).ravel()


def nonlinear_coupling_term(
    a: CouplingMatrix | np.ndarray, g: MonotoneCoupling, x: np.ndarray
) -> np.ndarray:
    """(A kron I_n) G(x) with the monotone maps applied componentwise."""
    entries = a.entries if isinstance(a, CouplingMatrix) else np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    n_nodes = entries.shape[0]
    if x.size != n_nodes * g.dim:
        raise ValueError(
            f"stacked state length {x.size} does not match "
            f"{n_nodes} nodes of dimension {g.dim}"
        )
    xm = x.reshape(n_nodes, g.dim)
    return (entries @ g.apply(xm)).ravel()


def adaptation_rate(config: SchemeConfig, x: np.ndarray, t: float = 0.0) -> float:
    """The coupling-strength derivative for the configured scheme.

    All kinds evaluate -(alpha/2) times a quadratic form that is
    nonnegative-definite in the node disagreements, so the returned value
    is nonnegative up to roundoff; a materially negative value raises.
    """
    x = np.asarray(x, dtype=float)
    n = config.node_dim
    xm = x.reshape(config.n_nodes, n)

    if config.kind in (SchemeKind.LINEAR_KNOWN, SchemeKind.LINEAR_TIME_VARYING):
        entries = config.dynamics_entries(t)
        ym = (entries @ xm) * config.gamma.gamma
        q = float(np.sum(config.xi[:, None] * xm * ym))
    elif config.kind in (SchemeKind.LINEAR_UNKNOWN, SchemeKind.LINEAR_DOMINATED):
        m = config._adaptation_entries
        q = float(np.sum(xm * (m @ xm)))
    elif config.kind == SchemeKind.NONLINEAR_KNOWN:
        gm = config.nonlinearity.apply(xm)
        q = float(np.sum(xm * (config._adaptation_entries @ gm)))
    else:  # NONLINEAR_TIME_VARYING adapts with the coupling matrix itself
        entries = config.dynamics_entries(t)
        gm = config.nonlinearity.apply(xm)
        q = float(np.sum(xm * (entries @ gm)))

    rate = -0.5 * config.alpha * q
    guard = 1e-9 * max(1.0, float(np.dot(x, x)))
    if np.isfinite(rate) and rate < -guard:
        raise ArithmeticError(
            f"adaptation rate {rate:.3e} is negative beyond roundoff; "
            "the configured matrices do not satisfy the scheme's hypotheses"
        )
    return rate


def coupling_term(config: SchemeConfig, x: np.ndarray, t: float = 0.0) -> np.ndarray:
    """The network coupling direction (before scaling by the strength c)."""
    entries = config.dynamics_entries(t)
    if config.kind in LINEAR_KINDS:
        return linear_coupling_term(entries, config.gamma, x)
    return nonlinear_coupling_term(entries, config.nonlinearity, x)


def augmented_rhs(
    config: SchemeConfig,
    model: OscillatorModel,
    state: AugmentedState,
    t: float = 0.0,
) -> AugmentedState:
    """Time derivative of (X, c) for the configured scheme."""
    if model.dim != config.node_dim:
        raise ValueError(
            f"model dimension {model.dim} does not match scheme dimension "
            f"{config.node_dim}"
        )
    x = state.x_stacked
    dx = network_drift(model, x, t) + state.c * coupling_term(config, x, t)
    dc = adaptation_rate(config, x, t)
    return AugmentedState(dx, dc)


def lyapunov_value(config: SchemeConfig, state: AugmentedState, c_ref: float) -> float:
    """Diagnostic energy (1/2) X^T (U kron I_n) X + (c_ref - c)^2 / alpha.

    ``c_ref`` plays the role of the sufficiently large constant strength
    the convergence argument posits; it is user-supplied because no run
    computes it.
    """
    if config.alpha <= 0:
        raise ValueError("the diagnostic needs a positive adaptation gain")
    xm = state.x_stacked.reshape(config.n_nodes, config.node_dim)
    quad = 0.5 * float(np.sum(xm * (config.u @ xm)))
    return quad + (c_ref - state.c) ** 2 / config.alpha


def disagreement_energy(config: SchemeConfig, x: np.ndarray) -> float:
    """(1/2) X^T (U kron I_n) X, the state-dependent part of the diagnostic."""
    xm = np.asarray(x, dtype=float).reshape(config.n_nodes, config.node_dim)
    return 0.5 * float(np.sum(xm * (config.u @ xm)))
