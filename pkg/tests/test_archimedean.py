"""Tests for Archimedean generators, CDF assembly and Kimberling sampling."""

import itertools
import math
import unittest

import numpy as np
import pytest

from copmix.copulas import (
    ArchimedeanFamily,
    ArchimedeanGenerator,
    ClaytonCopula,
    LatentSampler,
    archimedean_cdf,
    kimberling_sample,
    sample_latent,
)
from copmix.core.errors import DomainError, ValidationError
from copmix.core.unit import interior_grid
from copmix.diagnostics import ks_uniformity

FAMILY_THETAS = {
    ArchimedeanFamily.CLAYTON: 2.0,
    ArchimedeanFamily.AMH: 0.6,
    ArchimedeanFamily.GUMBEL: 1.8,
    ArchimedeanFamily.FRANK: 5.0,
}


def empirical_cdf_at(sample, points):
    return np.array([np.mean(np.all(sample <= p, axis=1)) for p in points])


class TestGenerators(unittest.TestCase):
    def test_family_names_parse_case_insensitively(self):
        self.assertIs(ArchimedeanFamily.parse("Clayton"), ArchimedeanFamily.CLAYTON)
        self.assertIs(ArchimedeanFamily.parse("ali-mikhail-haq"), ArchimedeanFamily.AMH)
        with self.assertRaises(ValidationError):
            ArchimedeanFamily.parse("joe")

    def test_theta_ranges(self):
        bad = [("clayton", 0.0), ("amh", 1.0), ("amh", -0.1), ("gumbel", 0.9), ("frank", 0.0)]
        for family, theta in bad:
            with self.subTest(family=family, theta=theta):
                with self.assertRaises(DomainError):
                    ArchimedeanGenerator(family, theta)

    def test_phi_inverse_round_trip(self):
        u = np.array([1e-6, 0.01, 0.3, 0.7, 0.999])
        for family, theta in FAMILY_THETAS.items():
            with self.subTest(family=family):
                g = ArchimedeanGenerator(family, theta)
                np.testing.assert_allclose(g.phi(g.phi_inverse(u)), u, rtol=1e-10)
                self.assertAlmostEqual(float(g.phi(np.array(0.0))), 1.0, places=14)

    def test_phi_vanishes_and_strictly_decreases(self):
        t = np.linspace(0.0, 30.0, 301)
        cases = dict(FAMILY_THETAS)
        cases[ArchimedeanFamily.CLAYTON] = 1.0
        for family, theta in cases.items():
            with self.subTest(family=family):
                g = ArchimedeanGenerator(family, theta)
                self.assertLess(float(g.phi(np.array(1e8))), 1e-6)
                self.assertTrue(np.all(np.diff(g.phi(t)) < 0.0))

    def test_large_theta_frank_phi_near_zero(self):
        g = ArchimedeanGenerator("frank", 40.0)
        values = g.phi(np.array([0.0, 1e-20, 1e-12, 1e-3]))
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertAlmostEqual(float(values[0]), 1.0, places=14)
        self.assertTrue(np.all(np.diff(values) < 0.0))
        direct = -math.log(1.0 - math.exp(-1e-3) * (1.0 - math.exp(-40.0))) / 40.0
        self.assertAlmostEqual(float(values[3]), direct, places=12)

    def test_cdf_has_uniform_margins(self):
        for family, theta in FAMILY_THETAS.items():
            g = ArchimedeanGenerator(family, theta, dimension=3)
            for w in (0.2, 0.65):
                self.assertAlmostEqual(archimedean_cdf(g, _point_with_ones(w, 3)), w, places=9)

    def test_clayton_generator_matches_closed_form(self):
        g = ArchimedeanGenerator("clayton", 1.5, dimension=3)
        closed = ClaytonCopula(1.5, dimension=3)
        points = interior_grid(6, 3)
        np.testing.assert_allclose(g.cdf(points), closed.cdf(points), rtol=1e-10)

    def test_cdf_is_exactly_permutation_invariant(self):
        rng = np.random.default_rng(11)
        points = rng.uniform(0.001, 0.999, size=(500, 3))
        for family, theta in FAMILY_THETAS.items():
            g = ArchimedeanGenerator(family, theta, dimension=3)
            base = g.cdf(points)
            for perm in itertools.permutations(range(3)):
                np.testing.assert_array_equal(g.cdf(points[:, perm]), base)

    def test_bivariate_density_via_finite_differences(self):
        g = ArchimedeanGenerator("clayton", 1.0)
        closed = ClaytonCopula(1.0)
        points = np.array([[0.1, 0.5], [0.9, 0.5], [0.4, 0.4]])
        np.testing.assert_allclose(g.density(points), closed.density(points), rtol=1e-4)

    def test_amh_density_matches_closed_form(self):
        theta = 0.5
        g = ArchimedeanGenerator("amh", theta)
        u, v = 0.3, 0.6
        closed = (
            1 + theta * ((1 + u) * (1 + v) - 3) + theta**2 * (1 - u) * (1 - v)
        ) / (1 - theta * (1 - u) * (1 - v)) ** 3
        self.assertAlmostEqual(float(g.density(np.array([[u, v]]))[0]), closed, delta=1e-5)

    def test_higher_dimensional_density_needs_opt_in(self):
        g = ArchimedeanGenerator("gumbel", 2.0, dimension=3)
        with self.assertRaises(ValidationError):
            g.density(np.array([[0.3, 0.4, 0.5]]))
        enabled = ArchimedeanGenerator("gumbel", 2.0, dimension=3, finite_difference=True)
        self.assertGreater(float(enabled.density(np.array([[0.3, 0.4, 0.5]]))[0]), 0.0)


def _point_with_ones(w, dimension):
    # CDF arguments may sit on the upper face.
    return np.array([[w] + [1.0] * (dimension - 1)])


class TestLatentSampling(unittest.TestCase):
    def test_latent_draws_are_positive_and_deterministic(self):
        for family, theta in FAMILY_THETAS.items():
            first = sample_latent(LatentSampler(family, theta, seed=5), 1000)
            second = sample_latent(LatentSampler(family, theta, seed=5), 1000)
            np.testing.assert_array_equal(first, second)
            self.assertTrue(np.all(first > 0.0))

    def test_discrete_latent_laws_take_integer_values(self):
        for family in (ArchimedeanFamily.AMH, ArchimedeanFamily.FRANK):
            draws = LatentSampler(family, FAMILY_THETAS[family], seed=1).sample_latent(2000)
            np.testing.assert_array_equal(draws, np.round(draws))
            self.assertGreaterEqual(draws.min(), 1.0)

    def test_gamma_latent_mean(self):
        draws = LatentSampler("clayton", 0.5, seed=2).sample_latent(50_000)
        self.assertAlmostEqual(float(draws.mean()), 2.0, delta=0.05)

    def test_positive_stable_laplace_transform(self):
        theta = 2.0
        draws = LatentSampler("gumbel", theta, seed=4).sample_latent(100_000)
        for t in (0.5, 1.0, 2.0):
            empirical = float(np.mean(np.exp(-t * draws)))
            self.assertAlmostEqual(empirical, np.exp(-(t ** (1 / theta))), delta=0.01)

    def test_laplace_transform_matches_generator(self):
        # Frank at 5 reads the cached table; 12 and 40 take the log-space path.
        cases = [
            ("clayton", 2.0),
            ("clayton", 0.5),
            ("amh", 0.6),
            ("frank", 5.0),
            ("frank", 12.0),
            ("frank", 40.0),
        ]
        for family, theta in cases:
            with self.subTest(family=family, theta=theta):
                g = ArchimedeanGenerator(family, theta)
                draws = sample_latent(LatentSampler(family, theta, seed=7), 100_000)
                self.assertTrue(np.all(draws > 0.0))
                for t in (0.5, 1.0, 2.0):
                    empirical = float(np.mean(np.exp(-t * draws)))
                    self.assertAlmostEqual(empirical, float(g.phi(np.array(t))), delta=0.01)

    def test_large_theta_frank_point_mass_at_one(self):
        theta = 40.0
        draws = LatentSampler("frank", theta, seed=3).sample_latent(200_000)
        np.testing.assert_array_equal(draws, np.floor(draws))
        # Pr[D = 1] = (1 - e^-theta) / theta
        self.assertAlmostEqual(float(np.mean(draws == 1.0)), -np.expm1(-theta) / theta, delta=0.002)

    def test_large_theta_frank_samples_stay_interior(self):
        sample = ArchimedeanGenerator("frank", 40.0).sample(5000, seed=1)
        self.assertTrue(np.all((sample > 0.0) & (sample < 1.0)))
        self.assertGreater(np.corrcoef(sample.T)[0, 1], 0.8)

    def test_range_endpoints_have_unit_latent(self):
        for family, theta in (("amh", 0.0), ("gumbel", 1.0)):
            with self.subTest(family=family):
                draws = LatentSampler(family, theta, seed=0).sample_latent(1000)
                np.testing.assert_array_equal(draws, np.ones(1000))

    def test_sampler_must_match_generator(self):
        g = ArchimedeanGenerator("clayton", 2.0)
        with self.assertRaises(ValidationError):
            kimberling_sample(g, LatentSampler("clayton", 3.0), 10)
        with self.assertRaises(ValidationError):
            kimberling_sample(g, LatentSampler("frank", 2.0), 10)

    def test_samples_match_cdf_for_every_family(self):
        points = np.array([[0.3, 0.3], [0.5, 0.8], [0.7, 0.4]])
        for family, theta in FAMILY_THETAS.items():
            with self.subTest(family=family):
                g = ArchimedeanGenerator(family, theta)
                sample = g.sample(20_000, seed=9)
                self.assertTrue(np.all((sample > 0.0) & (sample < 1.0)))
                np.testing.assert_allclose(
                    empirical_cdf_at(sample, points), g.cdf(points), atol=0.02
                )

    def test_samples_are_exchangeable(self):
        points = np.array([[0.3, 0.7], [0.2, 0.5], [0.6, 0.9]])
        for family, theta in FAMILY_THETAS.items():
            with self.subTest(family=family):
                sample = ArchimedeanGenerator(family, theta).sample(100_000, seed=13)
                np.testing.assert_allclose(
                    empirical_cdf_at(sample[:, ::-1], points),
                    empirical_cdf_at(sample, points),
                    atol=0.01,
                )

    @pytest.mark.slow
    def test_clayton_kimberling_sample_matches_analytic_cdf(self):
        g = ArchimedeanGenerator("clayton", 1.0)
        sample = g.sample(100_000, seed=2024)
        grid = interior_grid(20, 2)
        gap = np.max(np.abs(empirical_cdf_at(sample, grid) - g.cdf(grid)))
        self.assertLess(gap, 0.01)
        for i in range(2):
            self.assertLess(ks_uniformity(sample[:, i]).statistic, 0.006)


if __name__ == "__main__":
    unittest.main()
