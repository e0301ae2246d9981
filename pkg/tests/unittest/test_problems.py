import math
import os
import tempfile
import unittest

import numpy as np

from engine_utils.random_streams import SampleStream
from mixmatch.common.mixmatch_errors import (DimensionMismatchError, InvalidMixtureError, SuiteConfigError,
                                             UntrainedModelError)
from mixmatch.data_models.samples import Sample
from mixmatch.data_models.suite_config_data import LossConfigModel, SourceConfigModel
from mixmatch.problems.conditionals import LinearGaussianConditional
from mixmatch.problems.sample_oracle import CountingSampleOracle, MixtureSampleOracle
from mixmatch.problems.sample_sources import FiniteSource, GaussianSource
from mixmatch.problems.suite_builder import SUITE_MANIFEST_HEADER, make_synthetic_suite, write_suite_manifest
from mixmatch.problems.suite_operations import (averaged_loss, draw_sample, mixture_mean, mixture_trace_covariance,
                                                optimal_model, sample_grad, validation_loss)
from mixmatch.problems.trained_model import TrainedModel
from tests.unittest.suite_fixtures import latent_config, latent_suite, logistic_suite, scalar_config, scalar_suite


def _scalar_conditional():
    return LinearGaussianConditional(np.zeros(1), np.zeros(0), noise_std=1.0)


class TestSources(unittest.TestCase):

    def test_rejects_indefinite_covariance(self):
        with self.assertRaises(SuiteConfigError):
            GaussianSource(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]), 2,
                           LinearGaussianConditional(np.zeros(2), np.zeros(0)))

    def test_rejects_shape_mismatch(self):
        with self.assertRaises(SuiteConfigError):
            GaussianSource(np.zeros(2), np.eye(3), 2, LinearGaussianConditional(np.zeros(2), np.zeros(0)))

    def test_degenerate_source_is_constant(self):
        source = GaussianSource(np.array([1.0]), np.array([[0.0]]), 1, _scalar_conditional())
        batch = source.draw(10, np.random.default_rng(0))
        np.testing.assert_array_equal(batch.x, np.ones((10, 1)))

    def test_xy_moments(self):
        conditional = LinearGaussianConditional(np.array([1.0]), np.array([2.0]), intercept=0.5, noise_std=0.5)
        source = GaussianSource(np.array([1.0, -1.0]), np.array([[1.0, 0.0], [0.0, 0.5]]), 1, conditional)
        mean, covariance = source.embedding_moments("xy")
        np.testing.assert_allclose(mean, [1.0, 1.0 - 2.0 + 0.5])
        # var(y) = 1 + 4 * 0.5 + 0.25
        np.testing.assert_allclose(covariance, [[1.0, 1.0], [1.0, 3.25]])

    def test_finite_source_moments(self):
        source = FiniteSource(np.array([[0.0], [2.0]]), np.array([1.0, -1.0]))
        mean, covariance = source.embedding_moments("x")
        np.testing.assert_allclose(mean, [1.0])
        np.testing.assert_allclose(covariance, [[1.0]])
        self.assertEqual(len(source), 2)


class TestSampleOracle(unittest.TestCase):

    def setUp(self):
        self.sources = [GaussianSource(np.array([m]), np.eye(1), 1, _scalar_conditional()) for m in (0.0, 10.0)]

    def test_vertex_mixture_draws_one_source(self):
        batch = MixtureSampleOracle(self.sources).draw_latent_batch([0.0, 1.0], 100, SampleStream.from_seed(1))
        self.assertTrue(np.all(batch.source == 1))

    def test_vertex_mixture_replays_source_stream(self):
        pair = MixtureSampleOracle(self.sources).draw_batch([1.0, 0.0], 50, SampleStream.from_seed(4))
        alone = MixtureSampleOracle(self.sources[:1]).draw_batch([1.0], 50, SampleStream.from_seed(4))
        np.testing.assert_array_equal(pair.x, alone.x)
        np.testing.assert_array_equal(pair.y, alone.y)

    def test_latent_is_stripped(self):
        batch = MixtureSampleOracle(self.sources).draw_batch([0.5, 0.5], 5, SampleStream.from_seed(0))
        self.assertIsNone(batch.u)

    def test_mixture_proportions(self):
        batch = MixtureSampleOracle(self.sources).draw_latent_batch([0.3, 0.7], 20000, SampleStream.from_seed(2))
        self.assertAlmostEqual(float(np.mean(batch.source == 1)), 0.7, delta=0.02)

    def test_wrong_length_mixture(self):
        with self.assertRaises(InvalidMixtureError):
            MixtureSampleOracle(self.sources).draw_batch([1.0], 5, SampleStream.from_seed(0))

    def test_counting(self):
        oracle = CountingSampleOracle(MixtureSampleOracle(self.sources))
        oracle.draw_batch([0.5, 0.5], 7, SampleStream.from_seed(0))
        oracle.draw_batch([0.5, 0.5], 3, SampleStream.from_seed(1))
        self.assertEqual(oracle.count, 10)
        oracle.reset()
        self.assertEqual(oracle.count, 0)


class TestQuadraticSuite(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.suite = scalar_suite()

    def test_closed_forms(self):
        alpha = [0.5, 0.5]
        np.testing.assert_allclose(mixture_mean(self.suite, alpha), [0.5])
        self.assertAlmostEqual(mixture_trace_covariance(self.suite, alpha), 1.25)
        self.assertAlmostEqual(averaged_loss(self.suite, alpha, [0.5]), 0.625)
        np.testing.assert_allclose(optimal_model(self.suite, [1.0, 0.0]), [0.0])

    def test_constants(self):
        c = self.suite.constants
        self.assertEqual((c.mu, c.beta, c.kappa), (1.0, 1.0, 1.0))
        self.assertAlmostEqual(c.Gcal, 1.25, places=6)
        self.assertAlmostEqual(c.sigma, 1.5, places=6)
        self.assertAlmostEqual(c.L, 1.0 + math.sqrt(1.25), places=6)
        self.assertAlmostEqual(c.nu1, 48.0, places=4)
        self.assertAlmostEqual(c.rho, 0.75)
        self.assertAlmostEqual(c.rho2, math.sqrt(0.75))

    def test_validation_set(self):
        self.assertEqual(len(self.suite.validation), 200)
        self.assertIsNone(self.suite.validation.u)
        self.assertEqual(self.suite.validation_features.shape, (200, 1))

    def test_suite_is_reproducible(self):
        again = scalar_suite()
        np.testing.assert_array_equal(again.validation.x, self.suite.validation.x)

    def test_draw_sample_hides_latent(self):
        sample = draw_sample(self.suite, [0.5, 0.5], SampleStream.from_seed(0))
        self.assertIsNone(sample.u)
        self.assertEqual(sample.x.shape, (1,))

    def test_sample_grad(self):
        grad = sample_grad(self.suite.loss, [2.0], Sample(x=np.array([0.5]), y=0.0))
        np.testing.assert_allclose(grad, [1.5])
        with self.assertRaises(DimensionMismatchError):
            sample_grad(self.suite.loss, [2.0], Sample(x=np.array([0.5, 1.0]), y=0.0))
        with self.assertRaises(DimensionMismatchError):
            sample_grad(self.suite.loss, [2.0, 1.0], Sample(x=np.array([0.5]), y=0.0))

    def test_validation_oracle_boundary(self):
        with self.assertRaises(UntrainedModelError):
            validation_loss(self.suite, np.zeros(1))
        with self.assertRaises(UntrainedModelError):
            validation_loss(self.suite, TrainedModel(weights=np.zeros(1), steps=0))
        features = self.suite.validation_features
        expected = float(np.mean(0.5 * (features[:, 0] - 1.0) ** 2))
        self.assertAlmostEqual(validation_loss(self.suite, TrainedModel(weights=np.ones(1), steps=3)), expected)
        self.assertAlmostEqual(validation_loss(self.suite, np.ones(1), unsafe=True), expected)

    def test_manifest(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "suite-manifest.csv")
            write_suite_manifest(self.suite, path)
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
        self.assertEqual(lines[0], ",".join(SUITE_MANIFEST_HEADER))
        self.assertTrue(lines[1].startswith("scalar,2,1.0,1.0,"))


class TestLatentSuite(unittest.TestCase):

    def test_latent_shifts_label_means(self):
        suite = make_synthetic_suite(latent_config())
        self.assertEqual(suite.model_dim, 2)
        np.testing.assert_allclose(optimal_model(suite, [1.0, 0.0, 0.0]), [0.0, -2.0])
        np.testing.assert_allclose(optimal_model(suite, [0.0, 1.0, 0.0]), [0.0, 2.0])
        np.testing.assert_allclose(optimal_model(suite, [0.0, 0.0, 1.0]), [1.0, 1.0])


class TestSuiteGuarantees(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.suite = latent_suite(validation_size=100_000)

    def test_gradient_variance_is_certified(self):
        rng = np.random.default_rng(17)
        n = 4000
        for trial, weights in enumerate(rng.dirichlet(np.ones(self.suite.K), size=100)):
            w_star = optimal_model(self.suite, weights)
            batch = MixtureSampleOracle(self.suite.sources).draw_batch(weights, n, SampleStream.from_seed(trial))
            gradients = self.suite.loss.gradient(w_star[None, :], self.suite.loss.features(batch))
            np.testing.assert_allclose(gradients[0], sample_grad(self.suite.loss, w_star, batch.sample(0)))
            squared = np.sum(gradients ** 2, axis=1)
            slack = 3.0 * squared.std(ddof=1) / math.sqrt(n)
            self.assertLessEqual(squared.mean(), self.suite.constants.Gcal + slack, trial)

    def test_validation_loss_matches_true_mixture_loss(self):
        n = len(self.suite.validation)
        for w in (np.array([0.5, -0.5]), optimal_model(self.suite, self.suite.true_mixture)):
            losses = self.suite.loss.losses(w, self.suite.validation_features)
            standard_error = losses.std(ddof=1) / math.sqrt(n)
            gap = validation_loss(self.suite, w, unsafe=True) - averaged_loss(self.suite, self.suite.true_mixture, w)
            self.assertLessEqual(abs(gap), 5.0 * standard_error)

    def test_sources_share_one_conditional(self):
        self.assertIsNotNone(self.suite.conditional)
        for source in self.suite.sources:
            self.assertIs(source.conditional, self.suite.conditional)


class TestSuiteBuilderErrors(unittest.TestCase):

    def test_true_mixture_required(self):
        with self.assertRaises(SuiteConfigError):
            make_synthetic_suite(scalar_config(true_mixture=None))

    def test_single_source_defaults_to_its_vertex(self):
        suite = make_synthetic_suite(scalar_config(means=(0.0,), true_mixture=None))
        self.assertEqual(suite.true_mixture.weights, (1.0,))

    def test_mean_length(self):
        config = scalar_config()
        config.sources.append(SourceConfigModel(mean=[0.0, 1.0]))
        with self.assertRaises(SuiteConfigError):
            make_synthetic_suite(config)

    def test_true_mixture_length(self):
        with self.assertRaises(SuiteConfigError):
            make_synthetic_suite(scalar_config(true_mixture=(0.2, 0.3, 0.5)))

    def test_logistic_loss_needs_logistic_labels(self):
        config = scalar_config()
        config.loss = LossConfigModel(kind="ridge-logistic")
        with self.assertRaises(SuiteConfigError):
            make_synthetic_suite(config)


class TestLogisticSuite(unittest.TestCase):

    def test_labels_and_constants(self):
        suite = logistic_suite()
        self.assertTrue(set(np.unique(suite.validation.y)) <= {-1.0, 1.0})
        self.assertFalse(suite.is_quadratic)
        self.assertAlmostEqual(suite.constants.mu, 0.1)
        self.assertGreater(suite.constants.beta, suite.constants.mu)

    def test_optimal_model_is_cached(self):
        suite = logistic_suite()
        first = optimal_model(suite, [0.7, 0.3])
        second = optimal_model(suite, [0.7, 0.3])
        np.testing.assert_array_equal(first, second)
        self.assertEqual(first.shape, (2,))
        self.assertTrue(np.all(np.isfinite(first)))


if __name__ == '__main__':
    unittest.main()
