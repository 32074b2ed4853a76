"""Oracle tests: enumeration and quadrature against independent arithmetic.

The key cross-check is route independence: the oracle computes each
integral as overlap-mass-over-marginal, while the tests recompute it as
a posterior-weighted sum of truncated ratios.  The two must agree to
rounding on every instance.
"""

import math

import numpy as np
import pytest

from truncratio import (
    DegenerateSupportError,
    EnumerationCapError,
    GaussianMixtureModel,
    RandomEffectsModel,
    TableModel,
    WrongOracleError,
    exact_integrals,
    make_table_model,
    quadrature_integrals,
    simulate_mixture_data,
    verify_theorem,
)
from truncratio.oracle import check_instance

from conftest import flat_target_model


def posterior_weighted_integral(table_a, table_b):
    """Independent route: sum_w min(1, b_w/a_w) * a_w / sum(a)."""
    table_a = np.asarray(table_a, dtype=float)
    table_b = np.asarray(table_b, dtype=float)
    posterior = table_a / table_a.sum()
    return float((np.minimum(1.0, table_b / table_a) * posterior).sum())


class TestExactIntegralsOnTables:
    def test_reference_pair_hand_values(self):
        model = make_table_model([0.2, 0.3])
        res = exact_integrals(model, [0.2, 0.3], [0.4, 0.3])
        # L1 = 0.5, L2 = 0.7, M = min(.2,.4)+min(.3,.3) = 0.5
        assert math.exp(res.log_l1) == pytest.approx(0.5, rel=1e-14)
        assert math.exp(res.log_l2) == pytest.approx(0.7, rel=1e-14)
        assert math.exp(res.log_m) == pytest.approx(0.5, rel=1e-14)
        assert res.i1 == pytest.approx(1.0, abs=1e-14)
        assert res.i2 == pytest.approx(5.0 / 7.0, rel=1e-13)

    def test_second_reference_pair(self):
        model = make_table_model([0.2, 0.3])
        res = exact_integrals(model, [0.2, 0.3], [0.1, 0.2])
        assert math.exp(res.log_m) == pytest.approx(0.3, rel=1e-14)
        assert res.i1 == pytest.approx(0.6, rel=1e-13)
        assert res.i2 == pytest.approx(1.0, abs=1e-14)
        # i1 < i2 goes with L1 > L2
        assert res.log_l1 > res.log_l2

    def test_identical_parameters_give_unit_integrals(self):
        model = make_table_model([0.5, 0.5])
        res = exact_integrals(model, [0.5, 0.5], [0.5, 0.5])
        assert res.i1 == 1.0
        assert res.i2 == 1.0

    def test_matches_posterior_weighted_route(self):
        rng = np.random.default_rng(123)
        for _ in range(50):
            k = int(rng.integers(2, 20))
            t1 = rng.uniform(0.05, 3.0, k)
            t2 = rng.uniform(0.05, 3.0, k)
            res = exact_integrals(TableModel(t1), t1, t2)
            assert res.i1 == pytest.approx(posterior_weighted_integral(t1, t2),
                                           rel=1e-12)
            assert res.i2 == pytest.approx(posterior_weighted_integral(t2, t1),
                                           rel=1e-12)

    def test_integrals_within_unit_interval(self):
        rng = np.random.default_rng(321)
        for _ in range(100):
            k = int(rng.integers(2, 30))
            t1 = rng.uniform(0.01, 5.0, k)
            t2 = rng.uniform(0.01, 5.0, k)
            res = exact_integrals(TableModel(t1), t1, t2)
            assert 0.0 < res.i1 <= 1.0
            assert 0.0 < res.i2 <= 1.0

    def test_swap_symmetry_is_bitwise(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            k = int(rng.integers(2, 16))
            t1 = rng.uniform(0.05, 3.0, k)
            t2 = rng.uniform(0.05, 3.0, k)
            model = TableModel(t1)
            forward = exact_integrals(model, t1, t2)
            backward = exact_integrals(model, t2, t1)
            assert forward.i1 == backward.i2
            assert forward.i2 == backward.i1
            assert forward.log_m == backward.log_m

    def test_product_identity(self):
        rng = np.random.default_rng(777)
        for _ in range(50):
            k = int(rng.integers(2, 40))
            t1 = rng.uniform(0.05, 4.0, k)
            t2 = rng.uniform(0.05, 4.0, k)
            res = exact_integrals(TableModel(t1), t1, t2)
            l1, l2, m = (math.exp(res.log_l1), math.exp(res.log_l2),
                         math.exp(res.log_m))
            assert abs(res.i1 * l1 - res.i2 * l2) <= 1e-12 * m
            assert abs(res.i1 * l1 - m) <= 1e-12 * m

    def test_enumeration_cap_refusal_names_the_cap(self):
        data = simulate_mixture_data(25, 0.5, -1.0, 1.0, 1.0, seed=0)
        model = GaussianMixtureModel(data)
        theta = [0.5, -1.0, 1.0, 1.0]
        with pytest.raises(EnumerationCapError, match=str(2 ** 20)):
            exact_integrals(model, theta, theta)

    def test_cap_override(self):
        data = simulate_mixture_data(21, 0.5, -1.0, 1.0, 1.0, seed=0)
        model = GaussianMixtureModel(data)
        theta = np.array([0.5, -1.0, 1.0, 1.0])
        res = exact_integrals(model, theta, theta, enumeration_cap=2 ** 21)
        assert res.i1 == 1.0

    def test_wrong_space_rejected(self):
        continuous = RandomEffectsModel([0.0])
        with pytest.raises(WrongOracleError):
            exact_integrals(continuous, [0.0, 1.0, 1.0], [0.0, 1.0, 1.0])
        discrete = make_table_model([0.2, 0.3])
        with pytest.raises(WrongOracleError):
            quadrature_integrals(discrete, [0.2, 0.3], [0.2, 0.3])

    def test_disjoint_supports_raise(self):
        model = make_table_model([0.5, 0.5])
        with pytest.raises(DegenerateSupportError):
            exact_integrals(model, [0.5, 0.0], [0.0, 0.5])


class TestMixtureEnumeration:
    def test_enumerated_marginal_matches_analytic(self):
        data = simulate_mixture_data(10, 0.4, -1.2, 1.6, 0.9, seed=8)
        model = GaussianMixtureModel(data)
        rng = np.random.default_rng(15)
        for _ in range(10):
            t1 = np.array([rng.uniform(0.1, 0.9), rng.normal(-1, 0.5),
                           rng.normal(1, 0.5), rng.uniform(0.5, 1.5)])
            t2 = np.array([rng.uniform(0.1, 0.9), rng.normal(-1, 0.5),
                           rng.normal(1, 0.5), rng.uniform(0.5, 1.5)])
            res = exact_integrals(model, t1, t2)
            assert res.log_l1 == pytest.approx(model.log_marginal_analytic(t1),
                                               abs=1e-10)
            assert res.log_l2 == pytest.approx(model.log_marginal_analytic(t2),
                                               abs=1e-10)

    def test_sign_equivalence_against_analytic_marginals(self):
        data = simulate_mixture_data(8, 0.3, -1.0, 1.0, 1.0, seed=4)
        model = GaussianMixtureModel(data)
        rng = np.random.default_rng(44)
        for _ in range(20):
            t1 = np.array([rng.uniform(0.1, 0.9), rng.normal(-1, 1),
                           rng.normal(1, 1), rng.uniform(0.5, 2.0)])
            t2 = np.array([rng.uniform(0.1, 0.9), rng.normal(-1, 1),
                           rng.normal(1, 1), rng.uniform(0.5, 2.0)])
            res = exact_integrals(model, t1, t2)
            delta = model.log_marginal_analytic(t2) - model.log_marginal_analytic(t1)
            assert (res.i1 > res.i2) == (delta > 0)


class TestQuadrature:
    def test_identical_parameters_give_unit_integrals(self):
        model = RandomEffectsModel([0.0])
        res = quadrature_integrals(model, [0.0, 1.0, 1.0], [0.0, 1.0, 1.0])
        assert res.i1 == 1.0
        assert res.i2 == 1.0

    def test_marginal_matches_analytic_reference_point(self):
        model = RandomEffectsModel([0.0])
        res = quadrature_integrals(model, [0.0, 1.0, 1.0], [1.0, 1.0, 1.0])
        analytic = model.log_marginal_analytic([0.0, 1.0, 1.0])
        assert math.exp(res.log_l1) == pytest.approx(math.exp(analytic), rel=1e-8)

    def test_sign_matches_analytic_ordering(self):
        model = RandomEffectsModel([0.0])
        res = quadrature_integrals(model, [0.0, 1.0, 1.0], [1.0, 1.0, 1.0])
        delta = (model.log_marginal_analytic([1.0, 1.0, 1.0])
                 - model.log_marginal_analytic([0.0, 1.0, 1.0]))
        assert np.sign(res.i1 - res.i2) == np.sign(delta)

    def test_marginal_matches_analytic_on_random_parameters(self):
        rng = np.random.default_rng(2024)
        data = rng.normal(0.5, 1.0, 6)
        model = RandomEffectsModel(data)
        for _ in range(10):
            t1 = np.array([rng.normal(0, 1), rng.uniform(0.3, 2.0),
                           rng.uniform(0.3, 2.0)])
            t2 = np.array([rng.normal(0, 1), rng.uniform(0.3, 2.0),
                           rng.uniform(0.3, 2.0)])
            res = quadrature_integrals(model, t1, t2)
            for log_l, theta in [(res.log_l1, t1), (res.log_l2, t2)]:
                assert log_l == pytest.approx(model.log_marginal_analytic(theta),
                                              abs=1e-8)

    def test_product_identity_holds(self):
        model = RandomEffectsModel([0.4, -0.1, 0.8])
        res = quadrature_integrals(model, [0.0, 0.8, 1.1], [0.4, 1.2, 0.9])
        lhs = res.i1 * math.exp(res.log_l1)
        rhs = res.i2 * math.exp(res.log_l2)
        m = math.exp(res.log_m)
        assert abs(lhs - rhs) <= 1e-10 * m

    def test_sign_equivalence_on_random_pairs(self):
        rng = np.random.default_rng(606)
        model = RandomEffectsModel(rng.normal(0.2, 1.0, 4))
        for _ in range(6):
            t1 = np.array([rng.normal(0, 1), rng.uniform(0.4, 1.6),
                           rng.uniform(0.4, 1.6)])
            t2 = np.array([rng.normal(0, 1), rng.uniform(0.4, 1.6),
                           rng.uniform(0.4, 1.6)])
            res = quadrature_integrals(model, t1, t2)
            delta = (model.log_marginal_analytic(t2)
                     - model.log_marginal_analytic(t1))
            assert (res.i1 > res.i2) == (delta > 0)
            assert 0.0 < res.i1 <= 1.0
            assert 0.0 < res.i2 <= 1.0

    def test_node_floor_respected_and_converges(self):
        model = RandomEffectsModel([0.0])
        coarse = quadrature_integrals(model, [0.0, 1.0, 1.0], [0.5, 1.0, 1.0],
                                      nodes=64)
        fine = quadrature_integrals(model, [0.0, 1.0, 1.0], [0.5, 1.0, 1.0],
                                    nodes=4096)
        assert coarse.i1 == pytest.approx(fine.i1, rel=1e-9)

    def test_flat_target_is_non_integrable(self):
        from truncratio.errors import NonIntegrableError

        model = flat_target_model()
        with pytest.raises(NonIntegrableError):
            quadrature_integrals(model, [0.0], [0.0])


class TestVerifyTheorem:
    def test_thousand_random_instances_all_pass(self):
        report = verify_theorem(1000, seed=42)
        assert report.instances == 1000
        assert report.passes == 1000
        assert report.failures == 0
        assert report.all_passed

    def test_zero_instances_vacuous(self):
        report = verify_theorem(0, seed=1)
        assert report.instances == 0
        assert report.passes == 0
        assert report.failures == 0

    def test_deterministic_given_seed(self):
        a = verify_theorem(50, seed=7)
        b = verify_theorem(50, seed=7)
        assert (a.passes, a.failures) == (b.passes, b.failures)

    def test_corrupted_comparison_detects_failures(self):
        # Sanity of the harness: inverting the sign comparison must fail.
        rng = np.random.default_rng(42)
        failures = 0
        for _ in range(50):
            k = int(rng.integers(2, 65))
            t1 = rng.uniform(0.05, 4.0, k)
            t2 = rng.uniform(0.05, 4.0, k)
            res = exact_integrals(TableModel(t1), t1, t2)
            inverted_claim = (res.i1 < res.i2) == (res.log_l2 > res.log_l1)
            failures += not inverted_claim
        assert failures > 0

    def test_failing_instance_carries_reproduction_payload(self):
        model = make_table_model([0.2, 0.3])
        ok, detail = check_instance(model, [0.2, 0.3], [0.4, 0.3])
        assert ok
        assert detail["theta1"] == [0.2, 0.3]
        assert set(detail) >= {"i1", "i2", "log_m", "identity_gap"}
