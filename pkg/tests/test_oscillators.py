import math

import numpy as np
import pytest

from adaptsync.oscillators import (
    OscillatorModel,
    chen,
    chen_field,
    chua,
    chua_field,
    get_model,
    lorenz,
    lorenz_field,
    quad_probe,
    quad_residual,
    rossler,
    rossler_field,
)

ALL_MODELS = [chua, chen, lorenz, rossler]


class TestFieldValues:
    def test_chua_pointwise(self):
        np.testing.assert_allclose(chua_field([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0])
        # h(1) = 2/7 - 3/7 = -1/7, so the first component is 9/7
        np.testing.assert_allclose(
            chua_field([1.0, 0.0, 0.0]), [9.0 / 7.0, 1.0, 0.0], atol=1e-15
        )
        # h(2) = 4/7 - 3/7 = 1/7
        np.testing.assert_allclose(
            chua_field([2.0, 0.0, 0.0]), [-9.0 / 7.0, 2.0, 0.0], atol=1e-15
        )

    def test_chen_pointwise(self):
        np.testing.assert_allclose(chen_field([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0])
        np.testing.assert_allclose(chen_field([1.0, 1.0, 1.0]), [0.0, 20.0, -2.0])

    def test_lorenz_pointwise(self):
        np.testing.assert_allclose(lorenz_field([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0])
        np.testing.assert_allclose(
            lorenz_field([1.0, 1.0, 1.0]), [0.0, 26.0, 1.0 - 8.0 / 3.0]
        )

    def test_rossler_pointwise(self):
        # the origin is not an equilibrium: the third component is 0.2
        np.testing.assert_allclose(rossler_field([0.0, 0.0, 0.0]), [0.0, 0.0, 0.2])
        np.testing.assert_allclose(rossler_field([0.0, 0.0, 1.0]), [-1.0, 0.0, -5.5])
        np.testing.assert_allclose(rossler_field([0.0, 1.0, 0.0]), [-1.0, 0.2, 0.2])

    @pytest.mark.parametrize(
        "factory,point",
        [
            (chen, [math.sqrt(63.0), math.sqrt(63.0), 21.0]),
            (lorenz, [math.sqrt(72.0), math.sqrt(72.0), 27.0]),
            (chua, [0.0, 0.0, 0.0]),
        ],
    )
    def test_equilibrium_residuals(self, factory, point):
        model = factory()
        assert np.linalg.norm(model.field(np.asarray(point))) <= 1e-9

    def test_fields_are_autonomous(self, rng):
        for factory in ALL_MODELS:
            model = factory()
            x = rng.normal(size=3)
            np.testing.assert_array_equal(model.field(x, 0.0), model.field(x, 17.3))

    def test_batched_evaluation_matches_per_node_loop(self, rng):
        for factory in ALL_MODELS:
            model = factory()
            xs = rng.normal(size=(8, 3)) * 5
            batched = model.field(xs)
            looped = np.stack([model.field(x) for x in xs])
            np.testing.assert_array_equal(batched, looped)

    def test_parameter_overrides(self):
        model = lorenz(rho=99.0)
        assert model.params["rho"] == 99.0
        np.testing.assert_allclose(model.field([1.0, 0.0, 0.0])[1], 99.0)

    def test_get_model_unknown_name(self):
        with pytest.raises(ValueError, match="unknown model"):
            get_model("vanderpol")


class TestChuaLipschitz:
    def test_global_bound_from_parameters(self, rng):
        # Jacobian rows are bounded entrywise: |row1| <= (alpha*max|h'|, alpha, 0),
        # row2 = (1, -1, 1), row3 = (0, -beta, 0); the Frobenius norm of those
        # bounds is a global Lipschitz constant.
        alpha, beta, slope = 9.0, 100.0 / 7.0, 2.0 / 7.0
        lip = math.sqrt((alpha * slope) ** 2 + alpha**2 + 3.0 + beta**2)
        for _ in range(500):
            x = rng.uniform(-50, 50, 3)
            y = rng.uniform(-50, 50, 3)
            dist = np.linalg.norm(chua_field(x) - chua_field(y))
            assert dist <= lip * np.linalg.norm(x - y) + 1e-12


def _linear_model(sign: float) -> OscillatorModel:
    return OscillatorModel(
        name="linear",
        dim=3,
        params={},
        field=lambda x, t=0.0: sign * np.asarray(x, dtype=float),
        default_box=[[-1.0, 1.0]] * 3,
    )


class TestQuadProbe:
    def test_contracting_field_holds_with_zero_slack(self):
        # f(x) = -x with delta = 0, varpi = 1 makes the residual identically 0
        cert = quad_probe(_linear_model(-1.0), 0.0, 1.0, n_samples=500, rng_seed=1)
        assert cert.max_violation == pytest.approx(0.0, abs=1e-12)
        assert cert.holds

    def test_expanding_field_violates(self):
        # f(x) = +x gives residual 2 ||x - y||^2 > 0
        cert = quad_probe(_linear_model(1.0), 0.0, 1.0, n_samples=500, rng_seed=1)
        assert cert.max_violation > 0
        assert not cert.holds

    def test_residual_is_exactly_zero_at_equal_arguments(self, rng):
        for factory in ALL_MODELS:
            model = factory()
            x = rng.uniform(-5, 5, size=(20, 3))
            r = quad_residual(model, x, x, np.full(3, 10.0), 1.0)
            np.testing.assert_array_equal(r, np.zeros(20))

    def test_residual_is_symmetric_under_argument_swap(self, rng):
        # both factors of the first term flip sign together
        for factory in ALL_MODELS:
            model = factory()
            x = rng.uniform(-5, 5, size=(50, 3))
            y = rng.uniform(-5, 5, size=(50, 3))
            delta = np.array([3.0, 1.0, 2.0])
            np.testing.assert_allclose(
                quad_residual(model, x, y, delta, 0.7),
                quad_residual(model, y, x, delta, 0.7),
                rtol=1e-12,
            )

    def test_lorenz_grid_search_over_isotropic_delta(self):
        # the grid search is its own oracle: violations decrease as the
        # diagonal grows, and the reported candidate is the smallest that
        # holds on the sampled pairs
        model = lorenz()
        violations = {}
        for d in (10.0, 20.0, 40.0):
            cert = quad_probe(
                model, d, 1.0, box=[[-30, 30]] * 3, n_samples=20_000, rng_seed=5
            )
            violations[d] = cert.max_violation
        assert violations[10.0] > violations[20.0] > violations[40.0]
        consistent = [d for d in (10.0, 20.0, 40.0) if violations[d] <= 0]
        assert consistent, "some candidate must hold on samples"
        assert violations[10.0] > 0, "d = 10 is too small for this box"
        assert consistent[0] == min(consistent)

    def test_determinism(self):
        a = quad_probe(lorenz(), 20.0, 1.0, n_samples=2000, rng_seed=3)
        b = quad_probe(lorenz(), 20.0, 1.0, n_samples=2000, rng_seed=3)
        assert a.max_violation == b.max_violation
        np.testing.assert_array_equal(a.worst_x, b.worst_x)

    def test_default_box_comes_from_model(self):
        cert = quad_probe(rossler(), 5.0, 1.0, n_samples=100, rng_seed=0)
        np.testing.assert_array_equal(
            cert.sample_box, [[-15.0, 15.0], [-15.0, 15.0], [0.0, 30.0]]
        )

    def test_rejects_empty_sampling(self):
        with pytest.raises(ValueError):
            quad_probe(lorenz(), 5.0, 1.0, n_samples=0)
