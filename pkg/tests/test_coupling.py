import math

import numpy as np
import pytest

from adaptsync import coupling
from adaptsync.coupling import (
    DegenerateSpectrumError,
    LeftEigenvector,
    MatrixParseError,
    StructuralError,
    as_coupling_matrix,
    bilinear_form,
    build_projection,
    generate_complete,
    generate_random_symmetric,
    generate_small_world_weighted,
    is_irreducible,
    lambda2,
    left_eigenvector,
    matrix_from_text,
    matrix_to_text,
    pairwise_form,
    read_matrix,
    scaled_time_varying,
    three_node_time_varying,
    validate_condition,
    write_matrix,
)
from conftest import random_a1, random_a2


class TestValidateCondition:
    def test_smallest_symmetric_case(self):
        tag, violations = validate_condition([[-1.0, 1.0], [1.0, -1.0]])
        assert tag == "A2"
        assert violations == []

    def test_three_node_rotating_is_symmetric_at_zero(self):
        # at t=0 both off-diagonal weights equal 3, so the matrix is symmetric
        mat = three_node_time_varying(1, 1, 1).generator(0.0)
        tag, _ = validate_condition(mat.entries)
        assert tag == "A2"

    def test_three_node_rotating_asymmetric_off_phase(self):
        mat = three_node_time_varying(1, 1, 1).generator(math.pi / 2)
        tag, violations = validate_condition(mat.entries)
        assert tag == "A1"
        assert violations == []

    def test_reducible_with_simple_zero_eigenvalue_is_invalid(self):
        # eigenvalues are {-1, 0} but node 1 never feeds node 2
        tag, violations = validate_condition([[-1.0, 1.0], [0.0, 0.0]])
        assert tag == "invalid"
        assert any("reducible" in v or "connected" in v for v in violations)

    def test_block_diagonal_is_invalid(self, rng):
        block = random_a2(rng, 3)
        a = np.zeros((6, 6))
        a[:3, :3] = block
        a[3:, 3:] = block
        tag, violations = validate_condition(a)
        assert tag == "invalid"
        assert any("simple" in v for v in violations)

    def test_negative_off_diagonal(self):
        tag, violations = validate_condition([[1.0, -1.0], [-1.0, 1.0]])
        assert tag == "invalid"
        assert any("off-diagonal" in v for v in violations)

    def test_nonzero_row_sums(self):
        tag, violations = validate_condition([[-1.0, 2.0], [1.0, -1.0]])
        assert tag == "invalid"
        assert any("row sums" in v for v in violations)

    def test_all_zeros_is_invalid(self):
        tag, _ = validate_condition(np.zeros((3, 3)))
        assert tag == "invalid"

    def test_non_square_raises(self):
        with pytest.raises(ValueError, match="square"):
            validate_condition(np.zeros((2, 3)))

    def test_generated_matrices_keep_their_declared_class(self, rng):
        for n in (3, 7, 15):
            a1 = random_a1(rng, n)
            assert validate_condition(a1)[0] == "A1" or np.allclose(a1, a1.T)
            a2 = random_a2(rng, n)
            assert validate_condition(a2)[0] == "A2"
            assert abs(a2.sum(axis=1)).max() <= 1e-12 * n


class TestIrreducibility:
    def test_pair(self, pair_matrix):
        assert is_irreducible(pair_matrix)

    def test_block_diagonal_disconnected(self, rng):
        block = random_a2(rng, 4)
        a = np.zeros((8, 8))
        a[:4, :4] = block
        a[4:, 4:] = block
        assert not is_irreducible(a)

    def test_small_world_matches_transitive_closure_oracle(self):
        mat = generate_small_world_weighted(30, 4, 0.1, rng_seed=5)
        mask = mat.entries > 0
        np.fill_diagonal(mask, False)
        # oracle: boolean transitive closure via repeated squaring
        reach = mask | np.eye(30, dtype=bool)
        for _ in range(6):
            reach = reach @ reach
        assert bool(reach.all()) == is_irreducible(mat)
        assert is_irreducible(mat)


class TestLeftEigenvector:
    def test_symmetric_gives_uniform_weights(self, rng):
        for n in (2, 5, 11):
            xi = left_eigenvector(random_a2(rng, n))
            np.testing.assert_allclose(xi.xi, np.full(n, 1.0 / n), atol=1e-12)

    def test_three_node_closed_form(self):
        for p in [(1.0, 1.0, 1.0), (1.0, 1.0, 2.0), (0.3, 2.0, 5.0)]:
            tv = three_node_time_varying(*p)
            expected = np.array([1 / (3 * w) for w in p])
            expected /= expected.sum()
            for t in (0.0, 1.0, 4.0):
                xi = left_eigenvector(tv.generator(t))
                np.testing.assert_allclose(xi.xi, expected, atol=1e-12)

    def test_matches_dense_eigendecomposition_oracle(self, rng):
        a = random_a1(rng, 5)
        xi = left_eigenvector(a).xi
        w, v = np.linalg.eig(a.T)
        idx = int(np.argmin(np.abs(w)))
        oracle = np.real(v[:, idx])
        oracle = oracle / oracle.sum()
        np.testing.assert_allclose(xi, oracle, atol=1e-10)

    def test_residual_bound_over_many_random_matrices(self, rng):
        # 1000 random irreducible matrices, sizes 3..30
        for _ in range(1000):
            n = int(rng.integers(3, 31))
            a = random_a1(rng, n)
            xi = left_eigenvector(a).xi
            norm_inf = np.abs(a).sum(axis=1).max()
            assert np.abs(xi @ a).max() <= 1e-10 * norm_inf
            assert xi.min() > 0
            assert abs(xi.sum() - 1.0) < 1e-12

    def test_reducible_raises(self):
        with pytest.raises(StructuralError):
            left_eigenvector(np.array([[-1.0, 1.0], [0.0, 0.0]]))

    def test_degenerate_spectrum_raises(self, rng):
        block = random_a2(rng, 3)
        a = np.zeros((6, 6))
        a[:3, :3] = block
        a[3:, 3:] = block
        with pytest.raises(StructuralError):
            left_eigenvector(a)


class TestProjection:
    def test_pair_by_hand(self):
        u = build_projection(LeftEigenvector(np.array([0.5, 0.5])))
        np.testing.assert_allclose(
            u.u, np.array([[0.25, -0.25], [-0.25, 0.25]]), atol=0
        )

    def test_uniform_weights_formula(self):
        n = 6
        u = build_projection(LeftEigenvector(np.full(n, 1.0 / n)))
        expected = (np.eye(n) - np.ones((n, n)) / n) / n
        np.testing.assert_allclose(u.u, expected, atol=1e-15)

    def test_three_node_skewed_weights(self):
        tv = three_node_time_varying(1.0, 1.0, 2.0)
        u = build_projection(tv.shared_xi)
        tag, _ = validate_condition(-u.u)
        assert tag == "A2"

    def test_negated_projection_is_a2_for_random_weights(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 12))
            xi = rng.uniform(0.05, 1.0, n)
            xi /= xi.sum()
            u = build_projection(LeftEigenvector(xi))
            tag, _ = validate_condition(-u.u)
            assert tag == "A2"
            assert np.abs(u.u @ np.ones(n)).max() <= 1e-12


class TestBilinearForm:
    def test_manifold_gives_zero(self, rng):
        xi = rng.uniform(0.1, 1.0, 5)
        xi /= xi.sum()
        u = build_projection(LeftEigenvector(xi))
        x = np.tile(rng.normal(size=3), 5)
        assert abs(bilinear_form(u, x, x, 3)) < 1e-14

    def test_two_node_scalar_value(self):
        u = build_projection(LeftEigenvector(np.array([0.5, 0.5])))
        x = np.array([1.0, 0.0])
        assert bilinear_form(u, x, x, 1) == pytest.approx(0.25, abs=1e-15)
        assert pairwise_form(np.array([0.5, 0.5]), x, x) == pytest.approx(0.25)

    def test_matches_pairwise_sum_on_random_inputs(self, rng):
        n_nodes, node_dim = 7, 3
        xi = rng.uniform(0.05, 1.0, n_nodes)
        xi /= xi.sum()
        u = build_projection(LeftEigenvector(xi))
        for _ in range(50):
            x = rng.normal(size=n_nodes * node_dim)
            y = rng.normal(size=n_nodes * node_dim)
            lhs = bilinear_form(u, x, y, node_dim)
            rhs = pairwise_form(xi, x, y)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs), abs(rhs))

    def test_length_mismatch_raises(self):
        u = build_projection(LeftEigenvector(np.array([0.5, 0.5])))
        with pytest.raises(ValueError, match="length"):
            bilinear_form(u, np.zeros(3), np.zeros(4), 2)

    def test_zero_value_iff_all_nodes_equal(self, rng):
        # both directions of the manifold characterization at test scale;
        # the pairwise route is exactly zero on the manifold, the matrix
        # route only up to roundoff
        xi = rng.uniform(0.1, 1.0, 4)
        xi /= xi.sum()
        u = build_projection(LeftEigenvector(xi))
        base = rng.normal(size=2)
        x = np.tile(base, 4)
        assert pairwise_form(xi, x, x) == 0.0
        assert abs(bilinear_form(u, x, x, 2)) < 1e-14
        for _ in range(25):
            y = x.copy()
            i = int(rng.integers(4))
            y[2 * i] += rng.choice([-1.0, 1.0]) * rng.uniform(1e-6, 1.0)
            assert pairwise_form(xi, y, y) > 0.0


class TestLambda2:
    def test_three_node_rotating_at_zero(self):
        tv = three_node_time_varying(1, 1, 1)
        lam = lambda2(tv.generator(0.0), tv.shared_xi)
        assert lam == pytest.approx(-6.0, abs=1e-12)

    def test_three_node_rotating_closed_form_and_bound(self):
        tv = three_node_time_varying(1, 1, 1)
        for t in np.linspace(0.0, 2 * math.pi, 25):
            lam = lambda2(tv.generator(t), tv.shared_xi)
            assert lam == pytest.approx(-(5 + math.sin(t) + math.cos(t)), abs=1e-9)
            assert lam <= -(5 - math.sqrt(2)) + 1e-9
            assert lam <= tv.lambda_bound + 1e-9

    def test_symmetric_pair(self, pair_matrix):
        # Xi = I/2, so Xi A + A^T Xi = A and the nonzero eigenvalue is -2
        xi = left_eigenvector(pair_matrix)
        assert lambda2(pair_matrix, xi) == pytest.approx(-2.0, abs=1e-12)

    def test_symmetric_matrices_reduce_to_scaled_spectrum(self, rng):
        # for a symmetric matrix, Xi = I/N gives lambda2 = (2/N) * (largest
        # nonzero eigenvalue of the matrix itself)
        for n in (3, 6, 12):
            a = random_a2(rng, n)
            eigs = np.sort(np.linalg.eigvalsh(a))
            direct = (2.0 / n) * eigs[-2]
            assert lambda2(a, left_eigenvector(a)) == pytest.approx(direct, rel=1e-10)

    def test_negative_for_random_irreducible_matrices(self, rng):
        for _ in range(50):
            n = int(rng.integers(3, 15))
            a = random_a1(rng, n)
            assert lambda2(a, left_eigenvector(a)) < 0


class TestGenerators:
    def test_unrewired_ring_structure(self):
        mat = generate_small_world_weighted(10, 4, 0.0, rng_seed=7)
        mask = mat.entries > 0
        np.fill_diagonal(mask, False)
        # every node keeps exactly its 4 lattice neighbors
        assert (mask.sum(axis=1) == 4).all()
        for i in range(10):
            for d in (1, 2):
                assert mask[i, (i + d) % 10] and mask[i, (i - d) % 10]

    def test_small_world_is_valid_and_irreducible(self):
        mat = generate_small_world_weighted(100, 4, 0.1, rng_seed=3)
        assert mat.class_tag == "A1"
        assert is_irreducible(mat)
        assert np.abs(mat.entries.sum(axis=1)).max() <= 1e-12 * 100

    def test_small_world_determinism(self):
        a = generate_small_world_weighted(20, 4, 0.2, rng_seed=11)
        b = generate_small_world_weighted(20, 4, 0.2, rng_seed=11)
        assert np.array_equal(a.entries, b.entries)

    def test_small_world_rejects_bad_degree(self):
        with pytest.raises(ValueError):
            generate_small_world_weighted(10, 3, 0.1, rng_seed=0)
        with pytest.raises(ValueError):
            generate_small_world_weighted(4, 4, 0.1, rng_seed=0)

    def test_complete_small_cases(self):
        np.testing.assert_array_equal(
            generate_complete(2).entries, [[-1.0, 1.0], [1.0, -1.0]]
        )
        m3 = generate_complete(3).entries
        assert (np.diag(m3) == -2).all()
        off = m3[~np.eye(3, dtype=bool)]
        assert (off == 1).all()

    def test_complete_spectrum(self):
        # the nonzero eigenvalues all equal -N
        n = 100
        eigs = np.sort(np.linalg.eigvalsh(generate_complete(n).entries))
        assert eigs[-1] == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(eigs[:-1], -float(n), atol=1e-9)

    def test_random_symmetric_full_density_is_weighted_complete(self):
        mat = generate_random_symmetric(6, 1.0, rng_seed=9)
        assert mat.class_tag == "A2"
        off = mat.entries[~np.eye(6, dtype=bool)]
        assert (off > 0).all()

    def test_random_symmetric_properties_and_determinism(self):
        a = generate_random_symmetric(10, 0.5, rng_seed=13)
        b = generate_random_symmetric(10, 0.5, rng_seed=13)
        assert a.class_tag == "A2"
        assert is_irreducible(a)
        assert np.array_equal(a.entries, b.entries)

    def test_retry_cap_exhausted(self):
        with pytest.raises(StructuralError, match="attempts"):
            generate_random_symmetric(8, 0.0, rng_seed=0)


class TestThreeNodeTimeVarying:
    def test_rows_at_zero(self):
        m = three_node_time_varying(1, 1, 1).generator(0.0).entries
        np.testing.assert_allclose(m[0], [-6.0, 3.0, 3.0], atol=0)
        np.testing.assert_allclose(m[1], [3.0, -6.0, 3.0], atol=0)

    def test_node_balanced_for_equal_weights(self):
        tv = three_node_time_varying(1, 1, 1)
        for t in np.linspace(0, 2 * math.pi, 17):
            m = tv.generator(t).entries
            assert np.abs(m.sum(axis=0)).max() < 1e-12
            assert np.abs(m.sum(axis=1)).max() < 1e-12

    def test_shared_null_vector_for_skewed_weights(self):
        tv = three_node_time_varying(1, 1, 2)
        np.testing.assert_allclose(tv.shared_xi.xi, [0.4, 0.4, 0.2], atol=1e-15)
        for t in np.linspace(0, 2 * math.pi, 29):
            m = tv.generator(t).entries
            assert np.abs(tv.shared_xi.xi @ m).max() < 1e-10
        coupling.check_time_varying(tv, np.linspace(0, 2 * math.pi, 15))

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ValueError):
            three_node_time_varying(1.0, 0.0, 1.0)


class TestScaledTimeVarying:
    def test_keeps_base_null_vector_and_bound(self, rng):
        base = as_coupling_matrix(random_a2(rng, 5))
        tv = scaled_time_varying(base, lambda t: 2.0 + math.sin(t), 1.0)
        coupling.check_time_varying(tv, np.linspace(0, 7, 12))
        for t in (0.0, 1.7, 5.2):
            lam = lambda2(tv.generator(t), tv.shared_xi)
            assert lam <= tv.lambda_bound + 1e-9


class TestSerialization:
    def test_round_trip_is_exact(self, rng, tmp_path):
        mat = generate_small_world_weighted(12, 4, 0.3, rng_seed=2)
        path = tmp_path / "matrix.txt"
        write_matrix(path, mat)
        back = read_matrix(path)
        assert np.array_equal(back, mat.entries)

    def test_text_format_shape(self):
        text = matrix_to_text(np.array([[-1.0, 1.0], [1.0, -1.0]]))
        lines = text.strip().split("\n")
        assert lines[0] == "2"
        assert len(lines) == 3

    def test_parse_error_reports_line_numbers(self):
        with pytest.raises(MatrixParseError, match="line 3"):
            matrix_from_text("2\n-1.0 1.0\n1.0\n")
        with pytest.raises(MatrixParseError, match="line 1"):
            matrix_from_text("zebra\n")
        with pytest.raises(MatrixParseError, match="line 2"):
            matrix_from_text("2\n-1.0 apple\n1.0 -1.0\n")
