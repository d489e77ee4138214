import math
from unittest import TestCase

import numpy as np

from law.JointLaw import JointLaw
from law.StandardLaws import StandardLaws
from montecarlo.PathSimulator import PathSimulator
from tilt.Tilting import Tilting


class TestPathSimulator(TestCase):

    def setUp(self):
        self.simulator = PathSimulator()

    def test_simulate_S__before_first_renewal(self):
        rng = np.random.default_rng(1)
        for law, t in ((StandardLaws.rademacher(), 0.5), (StandardLaws.uniform12(), 0.99),
                       (StandardLaws.scaled_sqrt_exponential(), 0.0)):
            for _ in range(20):
                self.assertEqual(0.0, self.simulator.simulate_S(law, t, rng))

    def test_simulate_S__first_renewal_at_t(self):
        rng = np.random.default_rng(2)
        values = {self.simulator.simulate_S(StandardLaws.rademacher(), 1, rng) for _ in range(50)}
        self.assertEqual({-1.0, 1.0}, values)

    def test_sample_paths__rademacher_variance(self):
        s = self.simulator.sample_paths(StandardLaws.rademacher(), 50, 20_000, seed=3).s
        self.assertAlmostEqual(1.0, np.var(s) / 50, delta=0.05)
        # Sum of 50 signs is even
        self.assertTrue(np.all(s % 2 == 0))

    def test_sample_paths__constant_tau_counts(self):
        law = JointLaw.discrete([(2, 1, "1/2"), (2, -1, "1/2")])
        s = self.simulator.sample_paths(law, 9, 2000, seed=4).s
        self.assertTrue(np.all(np.abs(s) <= 4))
        self.assertTrue(np.all(s % 2 == 0))

    def test_sample_paths__renewal_count_of_uniform12(self):
        # E S(t)^2 = E N(t) = sum_{n=1..30} (2/3 + (-1/2)^n / 3)
        expected = math.fsum(2 / 3 + (-0.5) ** n / 3 for n in range(1, 31))
        s = self.simulator.sample_paths(StandardLaws.uniform12(), 30, 20_000, seed=5).s
        self.assertAlmostEqual(expected, np.mean(s ** 2), delta=0.8)

    def test_sample_paths__centered(self):
        n = 20_000
        s = self.simulator.sample_paths(StandardLaws.uniform12(), 100, n, seed=6).s
        self.assertLessEqual(abs(np.mean(s) / 10), 4 / math.sqrt(n))

    def test_sample_paths__parametric_straddle_bias(self):
        # Only the straddling reward is missing: E S(t) -> -E[tau X] / E tau for large t
        n, t = 500, 100
        a = 1.0 / math.sqrt(1.0 - math.pi / 4.0)
        bias = -(a * math.gamma(2.5) - a * math.sqrt(math.pi) / 2.0)
        s = PathSimulator(chunk_size=128).sample_paths(StandardLaws.scaled_sqrt_exponential(), t, n, seed=7).s
        self.assertEqual(n, len(s))
        self.assertLessEqual(abs(np.mean(s) - bias), 4 * math.sqrt(t) / math.sqrt(n))

    def test_sample_paths__independent_of_thread_count(self):
        law = StandardLaws.geometric()
        tilt = Tilting().solve_eta(law, 0.3)
        single = PathSimulator(chunk_size=500, threads=1).sample_paths(law, 200, 3000, seed=8, tilt=tilt)
        pooled = PathSimulator(chunk_size=500, threads=4).sample_paths(law, 200, 3000, seed=8, tilt=tilt)
        np.testing.assert_array_equal(single.s, pooled.s)
        np.testing.assert_array_equal(single.log_weight, pooled.log_weight)

    def test_sample_paths__seed_and_stream(self):
        law = StandardLaws.uniform12()
        first = self.simulator.sample_paths(law, 40, 1000, seed=9).s
        np.testing.assert_array_equal(first, self.simulator.sample_paths(law, 40, 1000, seed=9).s)
        self.assertFalse(np.array_equal(first, self.simulator.sample_paths(law, 40, 1000, seed=10).s))
        self.assertFalse(np.array_equal(first, self.simulator.sample_paths(law, 40, 1000, seed=9, stream=1).s))

    def test_sample_paths__tilted_weights_finite(self):
        law = StandardLaws.three_point()
        tilt = Tilting().solve_eta(law, 0.8)
        batch = self.simulator.sample_paths(law, 300, 2000, seed=11, tilt=tilt)
        self.assertTrue(np.all(np.isfinite(batch.log_weight)))

    def test_sample_paths__untilted_weights_zero(self):
        batch = self.simulator.sample_paths(StandardLaws.lazy(), 20, 100, seed=12)
        np.testing.assert_array_equal(np.zeros(100), batch.log_weight)

    def test_sample_paths__negative_t(self):
        with self.assertRaises(ValueError):
            self.simulator.sample_paths(StandardLaws.lazy(), -1, 10, seed=1)
