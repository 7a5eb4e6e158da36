"""Tests for symmetry gaps, distance estimates and uniformity checks."""

import math
import unittest

import numpy as np

from copmix.copulas import (
    ClaytonCopula,
    CorrelationMatrix,
    ExampleCopula,
    GaussianCopula,
    IndependenceCopula,
)
from copmix.core.errors import DimensionError, DomainError, ValidationError
from copmix.core.unit import UnitPoint, interior_grid
from copmix.diagnostics import (
    EXCHANGE_WITNESS,
    RADIAL_WITNESS,
    GapKind,
    Norm,
    default_exchange_pairs,
    default_radial_points,
    exchangeability_gap,
    gmm_l1_distance,
    gmm_marginal_l1_distance,
    ks_uniformity,
    l1_distance,
    linf_distance,
    marginal_uniformity,
    radial_symmetry_gap,
)
from copmix.mixture import GaussianMixtureModel


def amh_density(theta):
    def density(u):
        a, b = u[:, 0], u[:, 1]
        numerator = 1 + theta * ((1 + a) * (1 + b) - 3) + theta**2 * (1 - a) * (1 - b)
        return numerator / (1 - theta * (1 - a) * (1 - b)) ** 3

    return density


class TestSymmetryGaps(unittest.TestCase):
    def test_example_copula_is_not_exchangeable(self):
        copula = ExampleCopula(0.25, 0.5, 20.0)
        pairs = [(UnitPoint(EXCHANGE_WITNESS), (1, 0))]
        density_gap = exchangeability_gap(copula, pairs)
        self.assertIs(density_gap.kind, GapKind.EXCHANGEABILITY)
        self.assertGreater(density_gap.eta, 0.3)
        self.assertEqual(density_gap.counterpart.coords, (2 / 3, 1 / 3))

        cdf_gap = exchangeability_gap(copula.cdf, pairs)
        self.assertGreater(cdf_gap.eta, 0.02)
        self.assertLess(cdf_gap.eta, 0.03)

    def test_clayton_radial_gap_closed_form(self):
        gap = radial_symmetry_gap(ClaytonCopula(1.0), [RADIAL_WITNESS])
        expected = 0.9 / 0.95**3 - 0.1 / 0.55**3
        self.assertAlmostEqual(gap.eta, expected, delta=1e-9)
        self.assertAlmostEqual(gap.epsilon, expected / 2.0, delta=1e-9)
        self.assertIs(gap.kind, GapKind.RADIAL_SYMMETRY)

    def test_grid_search_finds_the_largest_gap(self):
        copula = ExampleCopula(0.75, 0.5, 20.0)
        pairs = default_exchange_pairs(2, 17)
        report = exchangeability_gap(copula, pairs)
        self.assertEqual(report.pairs_searched, len(pairs))
        left = np.array([u.coords for u, _ in pairs])
        brute = np.max(np.abs(copula.density(left) - copula.density(left[:, ::-1])))
        self.assertAlmostEqual(report.eta, float(brute), places=12)

    def test_symmetric_copulas_have_no_gap(self):
        gaussian = GaussianCopula(CorrelationMatrix.bivariate(0.4))
        self.assertLess(radial_symmetry_gap(gaussian, default_radial_points(2, 21)).eta, 1e-10)
        self.assertLess(exchangeability_gap(gaussian, default_exchange_pairs(2, 21)).eta, 1e-12)

    def test_plain_functions_are_accepted(self):
        report = radial_symmetry_gap(lambda u: u[:, 0], [[0.2, 0.5]])
        self.assertAlmostEqual(report.eta, 0.6)
        with self.assertRaises(ValidationError):
            radial_symmetry_gap(object(), [[0.2, 0.5]])

    def test_empty_searches_are_rejected(self):
        with self.assertRaises(ValidationError):
            exchangeability_gap(IndependenceCopula(2), [])

    def test_default_pair_counts(self):
        self.assertEqual(len(default_exchange_pairs(2, 8)), 64 + 1)
        self.assertEqual(len(default_exchange_pairs(3, 8)), 512 * 5)
        self.assertEqual(len(default_exchange_pairs(4, 8, [(0.1, 0.2, 0.3, 0.4)])), 1 + 4096)
        self.assertEqual(len(default_exchange_pairs(1, 8)), 8)
        self.assertEqual(default_radial_points(2, 8).shape, (65, 2))
        self.assertEqual(default_radial_points(4, 8, [(0.1, 0.2, 0.3, 0.4)]).shape, (4097, 4))
        self.assertEqual(default_radial_points(1, 8).shape, (8, 1))

    def test_random_search_above_three_dimensions(self):
        pairs = default_exchange_pairs(5, 8, seed=3)
        identity = tuple(range(5))
        self.assertTrue(all(sorted(perm) == list(identity) and perm != identity for _, perm in pairs))
        again = default_exchange_pairs(5, 8, seed=3)
        self.assertEqual([(u.coords, p) for u, p in pairs], [(u.coords, p) for u, p in again])
        np.testing.assert_array_equal(default_radial_points(5, 8, seed=3), default_radial_points(5, 8, seed=3))

        clayton = ClaytonCopula(2.0, dimension=4)
        self.assertLess(exchangeability_gap(clayton, default_exchange_pairs(4, 8)).eta, 1e-9)
        self.assertGreater(radial_symmetry_gap(clayton, default_radial_points(4, 8)).eta, 0.1)

    def test_one_dimensional_gap_is_zero(self):
        independence = IndependenceCopula(1)
        report = exchangeability_gap(independence, default_exchange_pairs(1, 8))
        self.assertEqual(report.eta, 0.0)
        self.assertEqual(report.witness, report.counterpart)

    def test_export_dict(self):
        exported = radial_symmetry_gap(ClaytonCopula(1.0), [RADIAL_WITNESS]).to_export_dict()
        self.assertEqual(exported["kind"], "radial_symmetry")
        self.assertEqual(exported["witness"], [0.1, 0.5])
        self.assertEqual(exported["counterpart"], [0.9, 0.5])
        self.assertAlmostEqual(exported["epsilon"], exported["eta"] / 2.0)


class TestDistances(unittest.TestCase):
    def test_l1_of_identical_densities_is_zero(self):
        copula = ClaytonCopula(2.0)
        estimate = l1_distance(copula, copula, 1000, seed=1)
        self.assertEqual(estimate.estimate, 0.0)
        self.assertEqual(estimate.standard_error, 0.0)
        self.assertIs(estimate.norm, Norm.L1)

    def test_l1_matches_grid_oracle(self):
        gaussian = GaussianCopula(CorrelationMatrix.bivariate(0.5))
        independence = IndependenceCopula(2)
        estimate = l1_distance(gaussian, independence, 200_000, seed=3)
        oracle = float(np.mean(np.abs(gaussian.density(interior_grid(400, 2)) - 1.0)))
        self.assertAlmostEqual(estimate.estimate, oracle, delta=4.0 * estimate.standard_error + 2e-3)

    def test_l1_is_unbiased_across_seeds(self):
        # AMH at 0.5 is bounded, so the midpoint oracle converges at the grid rate.
        amh, independence = amh_density(0.5), IndependenceCopula(2)
        oracle = float(np.mean(np.abs(amh(interior_grid(1000, 2)) - 1.0)))
        estimates = [l1_distance(amh, independence, 20_000, seed=s) for s in range(50)]
        mean = np.mean([e.estimate for e in estimates])
        pooled_se = math.sqrt(np.mean([e.standard_error**2 for e in estimates]) / len(estimates))
        self.assertLess(abs(mean - oracle), 3.0 * pooled_se)

    def test_l1_is_deterministic_in_seed(self):
        f, g = ClaytonCopula(1.0), IndependenceCopula(2)
        self.assertEqual(l1_distance(f, g, 5000, seed=4), l1_distance(f, g, 5000, seed=4))
        self.assertNotEqual(
            l1_distance(f, g, 5000, seed=4).estimate, l1_distance(f, g, 5000, seed=5).estimate
        )

    def test_l1_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            l1_distance(IndependenceCopula(2), IndependenceCopula(3), 100)

    def test_linf_of_identical_densities_is_zero(self):
        copula = ExampleCopula(0.75, 0.5, 20.0)
        estimate = linf_distance(copula, copula, 16)
        self.assertEqual(estimate.estimate, 0.0)
        self.assertEqual(estimate.resolution, 1 / 16)
        self.assertEqual(estimate.size, 256)

    def test_linf_is_at_least_half_the_exchangeability_gap(self):
        target = ExampleCopula(0.25, 0.5, 20.0)
        gap = exchangeability_gap(target, default_exchange_pairs(2, 17))
        witnesses = [gap.witness.coords, gap.counterpart.coords]
        for symmetric in (IndependenceCopula(2), GaussianCopula(CorrelationMatrix.bivariate(0.3))):
            estimate = linf_distance(target, symmetric, 8, witnesses)
            self.assertGreaterEqual(estimate.estimate, gap.epsilon - 1e-12)

    def test_linf_refinement_converges_for_bounded_density(self):
        independence = IndependenceCopula(2)
        coarse = linf_distance(amh_density(0.5), independence, 100)
        fine = linf_distance(amh_density(0.5), independence, 1000)
        self.assertLess(abs(fine.estimate - coarse.estimate) / fine.estimate, 0.05)
        self.assertLess(fine.estimate, 1.0)

    def test_linf_input_checks(self):
        with self.assertRaises(ValidationError):
            linf_distance(IndependenceCopula(2), IndependenceCopula(2), 4)
        with self.assertRaises(DimensionError):
            linf_distance(IndependenceCopula(4), IndependenceCopula(4), 8)

    def test_latent_l1_of_identical_mixtures_is_zero(self):
        model = GaussianMixtureModel.identity(2)
        estimate = gmm_l1_distance(model, model, 1000)
        self.assertEqual(estimate.estimate, 0.0)

    def test_latent_l1_of_disjoint_mixtures_is_two(self):
        a = GaussianMixtureModel.spherical(np.ones(1), np.array([[-20.0, 0.0]]), np.ones(1))
        b = GaussianMixtureModel.spherical(np.ones(1), np.array([[20.0, 0.0]]), np.ones(1))
        self.assertAlmostEqual(gmm_l1_distance(a, b, 1000).estimate, 2.0, places=9)
        marginal = gmm_marginal_l1_distance(a, b, 1, 1000)
        self.assertEqual(marginal.estimate, 0.0)

    def test_latent_l1_of_shifted_normals(self):
        a = GaussianMixtureModel.spherical(np.ones(1), np.zeros((1, 1)), np.ones(1))
        b = GaussianMixtureModel.spherical(np.ones(1), np.ones((1, 1)), np.ones(1))
        exact = 2.0 * (2.0 * 0.5 * (1 + math.erf(0.5 / math.sqrt(2.0))) - 1.0)
        estimate = gmm_l1_distance(a, b, 100_000, seed=1)
        self.assertAlmostEqual(estimate.estimate, exact, delta=4.0 * estimate.standard_error)


class TestUniformity(unittest.TestCase):
    def test_equispaced_statistic(self):
        n = 99
        result = ks_uniformity(np.arange(1, n + 1) / (n + 1))
        self.assertAlmostEqual(result.statistic, 1.0 / (n + 1), places=12)
        self.assertFalse(result.reject_5)

    def test_thresholds(self):
        result = ks_uniformity(np.arange(1, 101) / 101)
        self.assertAlmostEqual(result.threshold_1, 0.163)
        self.assertAlmostEqual(result.threshold_5, 0.136)

    def test_skewed_sample_is_rejected(self):
        sample = np.random.default_rng(0).beta(5.0, 1.0, size=1000)
        result = ks_uniformity(sample)
        self.assertTrue(result.reject_1)
        self.assertTrue(result.to_export_dict()["reject_5"])

    def test_input_checks(self):
        with self.assertRaises(ValidationError):
            ks_uniformity(np.full(10, 0.5))
        with self.assertRaises(DomainError):
            ks_uniformity(np.append(np.linspace(0.1, 0.9, 30), 1.0))

    def test_copula_samples_have_uniform_margins(self):
        results = marginal_uniformity(ClaytonCopula(2.0, dimension=3), 4000, seed=6)
        self.assertEqual(len(results), 3)
        for result in results:
            self.assertLess(result.statistic, 2.5 / math.sqrt(4000))

    def test_scheffe_bound_on_random_boxes(self):
        gaussian = GaussianCopula(CorrelationMatrix.bivariate(0.7))
        independence = IndependenceCopula(2)
        l1 = l1_distance(gaussian, independence, 100_000, seed=2)
        rng = np.random.default_rng(10)
        points = interior_grid(200, 2)
        diff = gaussian.density(points) - 1.0
        for _ in range(20):
            lo, hi = np.sort(rng.uniform(0.0, 1.0, size=(2, 2)), axis=0)
            inside = np.all((points > lo) & (points < hi), axis=1)
            mass_gap = abs(float(np.sum(diff[inside])) / len(points))
            self.assertLessEqual(mass_gap, 0.5 * l1.estimate + 4.0 * l1.standard_error + 1e-2)


if __name__ == "__main__":
    unittest.main()
