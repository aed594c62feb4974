"""Outer coupling matrices: construction, validation, spectral analysis.

A usable coupling matrix has nonnegative off-diagonal weights, zero row
sums, a simple zero eigenvalue with every other eigenvalue in the open
left half plane, and a strongly connected interaction graph.  Symmetric
matrices of this kind are tagged "A2", asymmetric ones "A1".  The
normalized left null vector ``xi`` of such a matrix weights the nodes in
every synchronization diagnostic; the projection ``U = diag(xi) - xi xi^T``
built from it measures pairwise disagreement between node states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

ROW_SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-12
EIG_RESIDUAL_TOL = 1e-10
MAX_REGEN_RETRIES = 100

TAG_A1 = "A1"
TAG_A2 = "A2"
TAG_INVALID = "invalid"


class StructuralError(ValueError):
    """The matrix violates a structural requirement (connectivity, class)."""


class DegenerateSpectrumError(StructuralError):
    """The numerical null space is not one-dimensional."""


class MatrixParseError(ValueError):
    """A matrix file does not follow the plain-text format."""


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Dense N x N coupling matrix with its validated class tag."""

    n_nodes: int
    entries: np.ndarray
    class_tag: str

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.shape != (self.n_nodes, self.n_nodes):
            raise ValueError(
                f"entries shape {arr.shape} does not match n_nodes={self.n_nodes}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)


@dataclass(frozen=True, eq=False)
class LeftEigenvector:
    """Normalized left null vector of a coupling matrix (sums to one)."""

    xi: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.xi, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "xi", arr)

    @property
    def n_nodes(self) -> int:
        return self.xi.size


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """U = diag(xi) - xi xi^T; its quadratic form vanishes exactly on the
    synchronization manifold."""

    u: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.u, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "u", arr)

    @property
    def n_nodes(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True, eq=False)
class TimeVaryingCoupling:
    """A family t -> CouplingMatrix sharing one left null vector for all t.

    ``lambda_bound`` is a declared negative upper bound on lambda2 of
    ``generator(t)`` over all t; it is checked by sampling, not proven.
    """

    n_nodes: int
    generator: Callable[[float], CouplingMatrix]
    shared_xi: LeftEigenvector
    lambda_bound: float


def _as_array(matrix) -> np.ndarray:
    if isinstance(matrix, CouplingMatrix):
        return matrix.entries
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _strongly_connected(positive_mask: np.ndarray) -> bool:
    """Two reachability sweeps: forward from node 0 and on the transpose."""

    def reaches_all(mask: np.ndarray) -> bool:
        n = mask.shape[0]
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(mask[i] & ~seen):
                seen[j] = True
                stack.append(j)
        return bool(seen.all())

    return reaches_all(positive_mask) and reaches_all(positive_mask.T)


def is_irreducible(matrix) -> bool:
    """True iff the interaction graph of the matrix is strongly connected."""
    a = _as_array(matrix)
    mask = a > 0.0
    np.fill_diagonal(mask, False)
    return _strongly_connected(mask)


def validate_condition(matrix) -> tuple[str, list[str]]:
    """Classify a square matrix as "A1", "A2" or "invalid".

    Checks, in order: finite entries, nonnegative off-diagonal, zero row
    sums (tolerance ``ROW_SUM_TOL`` per row, scaled by N), a simple zero
    eigenvalue with all other eigenvalues having negative real part, and
    strong connectivity of the interaction graph.  "A2" additionally
    requires symmetry within ``SYMMETRY_TOL``.

    Returns the tag and the list of failed checks (empty when valid).
    """
    a = _as_array(matrix)
    n = a.shape[0]
    if n < 2:
        raise ValueError("need at least 2 nodes")

    violations: list[str] = []
    if not np.isfinite(a).all():
        return TAG_INVALID, ["entries are not all finite"]

    off = a.copy()
    np.fill_diagonal(off, 0.0)
    if off.min() < 0.0:
        violations.append("negative off-diagonal entry")

    row_sums = a.sum(axis=1)
    if np.abs(row_sums).max() > ROW_SUM_TOL * n:
        violations.append("row sums are not zero")

    eigs = np.linalg.eigvals(a)
    zero_tol = 1e-8 * max(1.0, float(np.abs(a).sum(axis=1).max()))
    near_zero = np.abs(eigs) <= zero_tol
    if near_zero.sum() != 1:
        violations.append("zero eigenvalue is not simple")
    if (eigs.real[~near_zero] >= 0.0).any():
        violations.append("eigenvalue with nonnegative real part")

    mask = a > 0.0
    np.fill_diagonal(mask, False)
    if not _strongly_connected(mask):
        violations.append("interaction graph is not strongly connected (reducible)")

    if violations:
        return TAG_INVALID, violations
    if np.abs(a - a.T).max() <= SYMMETRY_TOL:
        return TAG_A2, []
    return TAG_A1, []


def as_coupling_matrix(matrix) -> CouplingMatrix:
    """Wrap a raw array with its validated class tag."""
    a = _as_array(matrix)
    tag, _ = validate_condition(a)
    return CouplingMatrix(a.shape[0], a, tag)


def left_eigenvector(matrix) -> LeftEigenvector:
    """Normalized positive left null vector of an irreducible "A1" matrix.

    Dense smallest-singular-vector solve of the transpose, sign-fixed and
    scaled to sum one.  The residual ``||xi^T A||_inf`` is guaranteed to be
    at most ``EIG_RESIDUAL_TOL * ||A||_inf``.
    """
    a = _as_array(matrix)
    if not is_irreducible(a):
        raise StructuralError("matrix is reducible; left null vector is not positive")

    _, s, vt = np.linalg.svd(a.T)
    if s[0] > 0 and s[-2] <= 1e-10 * s[0]:
        raise DegenerateSpectrumError("null space of the transpose has rank > 1")
    xi = vt[-1]
    if xi.sum() < 0:
        xi = -xi
    xi = xi / xi.sum()
    if xi.min() <= 0:
        raise StructuralError("left null vector has non-positive components")

    norm_inf = float(np.abs(a).sum(axis=1).max())
    residual = float(np.abs(xi @ a).max())
    if residual > EIG_RESIDUAL_TOL * norm_inf:
        raise DegenerateSpectrumError(
            f"left null vector residual {residual:.3e} exceeds tolerance"
        )
    return LeftEigenvector(xi)


def build_projection(xi: LeftEigenvector | np.ndarray) -> ProjectionMatrix:
    """U = diag(xi) - xi xi^T, verified so that -U passes as "A2"."""
    v = xi.xi if isinstance(xi, LeftEigenvector) else np.asarray(xi, dtype=float)
    u = np.diag(v) - np.outer(v, v)
    tag, violations = validate_condition(-u)
    if tag != TAG_A2:
        raise StructuralError(f"-U failed the A2 check: {violations}")
    return ProjectionMatrix(u)


def bilinear_form(u: ProjectionMatrix, x: np.ndarray, y: np.ndarray, node_dim: int) -> float:
    """x^T (U kron I_n) y, evaluated blockwise without the Kronecker product."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n_nodes = u.n_nodes
    if x.size != n_nodes * node_dim or y.size != n_nodes * node_dim:
        raise ValueError(
            f"stacked states must have length {n_nodes * node_dim}, "
            f"got {x.size} and {y.size}"
        )
    xm = x.reshape(n_nodes, node_dim)
    ym = y.reshape(n_nodes, node_dim)
    return float(np.sum(xm * (u.u @ ym)))


def pairwise_form(xi: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """The same bilinear form written as the weighted pairwise sum
    (1/2) sum_ij xi_i xi_j (x_i - x_j)^T (y_i - y_j).

    Kept as an independent evaluation route; tests pit it against
    :func:`bilinear_form`.
    """
    xi = np.asarray(xi, dtype=float)
    n_nodes = xi.size
    xm = np.asarray(x, dtype=float).reshape(n_nodes, -1)
    ym = np.asarray(y, dtype=float).reshape(n_nodes, -1)
    dx = xm[:, None, :] - xm[None, :, :]
    dy = ym[:, None, :] - ym[None, :, :]
    w = np.outer(xi, xi)
    return float(0.5 * np.sum(w * np.sum(dx * dy, axis=-1)))


def lambda2(matrix, xi: LeftEigenvector | None = None) -> float:
    """Largest nonzero eigenvalue of Xi A + A^T Xi (Xi = diag(xi)).

    Negative for every valid irreducible matrix; a nonnegative value means
    the matrix cannot serve the time-varying synchronization argument and
    raises :class:`StructuralError`.
    """
    a = _as_array(matrix)
    v = xi.xi if isinstance(xi, LeftEigenvector) else None
    if v is None:
        v = left_eigenvector(a).xi
    s = v[:, None] * a + a.T * v[:, None].T
    s = 0.5 * (s + s.T)  # symmetric up to roundoff by construction
    eigs = np.linalg.eigvalsh(s)
    zero_idx = int(np.argmin(np.abs(eigs)))
    rest = np.delete(eigs, zero_idx)
    lam = float(rest.max())
    if lam >= 0.0:
        raise StructuralError(
            f"largest nonzero eigenvalue {lam:.3e} is not negative"
        )
    return lam


def _ring_edges(n_nodes: int, mean_degree: int) -> set[tuple[int, int]]:
    edges = set()
    for i in range(n_nodes):
        for j in range(1, mean_degree // 2 + 1):
            a, b = i, (i + j) % n_nodes
            edges.add((min(a, b), max(a, b)))
    return edges


def _undirected_connected(edges: set[tuple[int, int]], n_nodes: int) -> bool:
    adj: list[list[int]] = [[] for _ in range(n_nodes)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * n_nodes
    seen[0] = True
    stack = [0]
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                stack.append(j)
    return all(seen)


def _weighted_from_edges(
    edges: set[tuple[int, int]],
    n_nodes: int,
    rng: np.random.Generator,
    symmetric: bool,
) -> np.ndarray:
    a = np.zeros((n_nodes, n_nodes))
    for i, j in sorted(edges):
        if symmetric:
            w = rng.uniform(0.0, 1.0)
            a[i, j] = a[j, i] = w
        else:
            a[i, j] = rng.uniform(0.0, 1.0)
            a[j, i] = rng.uniform(0.0, 1.0)
    np.fill_diagonal(a, 0.0)
    np.fill_diagonal(a, -a.sum(axis=1))
    return a


def generate_small_world_weighted(
    n_nodes: int,
    mean_degree: int = 4,
    rewire_prob: float = 0.1,
    rng_seed: int = 0,
) -> CouplingMatrix:
    """Weighted small-world coupling matrix.

    Ring substrate with ``mean_degree`` neighbors per node, each forward
    edge rewired with probability ``rewire_prob``, then every directed
    off-diagonal entry of a surviving edge replaced by an independent
    Uniform(0, 1) draw; diagonal entries balance the rows.  The result is
    asymmetric in general.  Disconnected draws are regenerated with an
    incremented seed, up to ``MAX_REGEN_RETRIES`` attempts.
    """
    if mean_degree % 2 != 0:
        raise ValueError("mean_degree must be even")
    if not 2 <= mean_degree < n_nodes:
        raise ValueError("need 2 <= mean_degree < n_nodes")
    if not 0.0 <= rewire_prob <= 1.0:
        raise ValueError("rewire_prob must lie in [0, 1]")

    for attempt in range(MAX_REGEN_RETRIES):
        rng = np.random.default_rng(rng_seed + attempt)
        edges = _ring_edges(n_nodes, mean_degree)
        for i in range(n_nodes):
            for j in range(1, mean_degree // 2 + 1):
                b = (i + j) % n_nodes
                key = (min(i, b), max(i, b))
                if key not in edges:
                    continue
                if rng.random() < rewire_prob:
                    neighbors = {a if b == i else b for a, b in edges if i in (a, b)}
                    candidates = [
                        k for k in range(n_nodes) if k != i and k not in neighbors
                    ]
                    if not candidates:
                        continue
                    new_j = candidates[rng.integers(len(candidates))]
                    edges.remove(key)
                    edges.add((min(i, new_j), max(i, new_j)))
        if not _undirected_connected(edges, n_nodes):
            continue
        a = _weighted_from_edges(edges, n_nodes, rng, symmetric=False)
        tag, violations = validate_condition(a)
        if tag == TAG_INVALID:
            continue
        return CouplingMatrix(n_nodes, a, tag)
    raise StructuralError(
        f"no connected small-world graph in {MAX_REGEN_RETRIES} attempts"
    )


def generate_complete(n_nodes: int) -> CouplingMatrix:
    """Complete coupling: unit off-diagonal weights, -(N-1) on the diagonal."""
    if n_nodes < 2:
        raise ValueError("need at least 2 nodes")
    a = np.ones((n_nodes, n_nodes))
    np.fill_diagonal(a, -(n_nodes - 1))
    return CouplingMatrix(n_nodes, a, TAG_A2)


def generate_random_symmetric(
    n_nodes: int,
    edge_prob: float = 0.5,
    rng_seed: int = 0,
) -> CouplingMatrix:
    """Erdos-Renyi topology with symmetric Uniform(0, 1) weights.

    Disconnected draws are regenerated with an incremented seed, up to
    ``MAX_REGEN_RETRIES`` attempts.
    """
    if n_nodes < 2:
        raise ValueError("need at least 2 nodes")
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError("edge_prob must lie in [0, 1]")

    for attempt in range(MAX_REGEN_RETRIES):
        rng = np.random.default_rng(rng_seed + attempt)
        edges = {
            (i, j)
            for i in range(n_nodes)
            for j in range(i + 1, n_nodes)
            if rng.random() < edge_prob
        }
        if not _undirected_connected(edges, n_nodes):
            continue
        a = _weighted_from_edges(edges, n_nodes, rng, symmetric=True)
        tag, violations = validate_condition(a)
        if tag != TAG_A2:
            continue
        return CouplingMatrix(n_nodes, a, tag)
    raise StructuralError(
        f"no connected random graph in {MAX_REGEN_RETRIES} attempts"
    )


def three_node_time_varying(p1: float, p2: float, p3: float) -> TimeVaryingCoupling:
    """Three-node rotating coupling family with a time-independent left
    null vector.

    ``generator(t) = diag(p1, p2, p3) @ M(t)`` where M(t) has diagonal
    -(5 + sin t + cos t) and cyclically rotating off-diagonal weights
    3 + sin t and 2 + cos t.  M(t) has zero row and column sums for all t,
    so the family shares the left null vector proportional to
    (1/(3 p1), 1/(3 p2), 1/(3 p3)).  For equal weights the family is
    node-balanced and lambda2(t) = -(5 + sin t + cos t).
    """
    p = np.array([p1, p2, p3], dtype=float)
    if (p <= 0).any():
        raise ValueError("weights must be positive")

    def generator(t: float) -> CouplingMatrix:
        s, c = math.sin(t), math.cos(t)
        d = -5.0 - s - c
        m = np.array(
            [
                [d, 3.0 + s, 2.0 + c],
                [2.0 + c, d, 3.0 + s],
                [3.0 + s, 2.0 + c, d],
            ]
        )
        return CouplingMatrix(3, p[:, None] * m, TAG_A1)

    xi = (1.0 / (3.0 * p))
    xi = xi / xi.sum()
    # lambda2(t) = -3 (5 + sin t + cos t) / sum(1/p); worst case at
    # sin t + cos t = -sqrt(2).
    bound = -3.0 * (5.0 - math.sqrt(2.0)) / float((1.0 / p).sum())
    return TimeVaryingCoupling(3, generator, LeftEigenvector(xi), bound)


def scaled_time_varying(
    base: CouplingMatrix,
    modulation: Callable[[float], float],
    modulation_min: float,
) -> TimeVaryingCoupling:
    """Time-varying family ``modulation(t) * base`` with ``modulation`` bounded
    below by ``modulation_min > 0``; keeps the base matrix's left null vector."""
    if modulation_min <= 0:
        raise ValueError("modulation_min must be positive")
    xi = left_eigenvector(base)
    bound = modulation_min * lambda2(base, xi)

    def generator(t: float) -> CouplingMatrix:
        return CouplingMatrix(base.n_nodes, modulation(t) * base.entries, base.class_tag)

    return TimeVaryingCoupling(base.n_nodes, generator, xi, bound)


def check_time_varying(tv: TimeVaryingCoupling, times: Sequence[float]) -> None:
    """Sample-check the family: class validity and the shared null vector."""
    xi = tv.shared_xi.xi
    for t in times:
        mat = tv.generator(float(t))
        tag, violations = validate_condition(mat.entries)
        if tag == TAG_INVALID:
            raise StructuralError(f"generator({t}) is invalid: {violations}")
        norm_inf = float(np.abs(mat.entries).sum(axis=1).max())
        residual = float(np.abs(xi @ mat.entries).max())
        if residual > EIG_RESIDUAL_TOL * max(1.0, norm_inf):
            raise StructuralError(
                f"shared left null vector fails at t={t}: residual {residual:.3e}"
            )


def matrix_to_text(matrix: CouplingMatrix | np.ndarray) -> str:
    """Plain-text format: first line N, then N rows of N space-separated
    values printed with shortest round-trip representation."""
    a = _as_array(matrix)
    lines = [str(a.shape[0])]
    lines.extend(" ".join(repr(v) for v in row) for row in a.tolist())
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines:
        raise MatrixParseError("line 1: empty input")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise MatrixParseError(f"line 1: expected the matrix size, got {lines[0]!r}")
    if n < 1:
        raise MatrixParseError("line 1: matrix size must be positive")
    rows = []
    for k in range(n):
        lineno = k + 2
        if k + 1 >= len(lines):
            raise MatrixParseError(f"line {lineno}: missing row {k + 1} of {n}")
        parts = lines[k + 1].split()
        if len(parts) != n:
            raise MatrixParseError(
                f"line {lineno}: expected {n} values, got {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise MatrixParseError(f"line {lineno}: {exc}")
    return np.array(rows)


def write_matrix(path, matrix: CouplingMatrix | np.ndarray) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(matrix_to_text(matrix))


def read_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        return matrix_from_text(fh.read())
