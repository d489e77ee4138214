import math
from unittest import TestCase

import numpy as np

from law.JointLaw import JointLaw
from law.SamplerFamily import SamplerFamily
from law.StandardLaws import StandardLaws
from montecarlo.ExactTails import ExactTails
from montecarlo.PathSimulator import PathSimulator
from montecarlo.TailEstimate import TailEstimate, TailMethod
from montecarlo.TailEstimator import TailEstimator
from tilt.TiltError import TiltError


class TestTailEstimator(TestCase):

    def setUp(self):
        self.estimator = TailEstimator()
        self.rademacher = StandardLaws.rademacher()

    @staticmethod
    def naive_std_err(p: float, n: int) -> float:
        return math.sqrt(p * (1 - p) / n)

    def test_tail_naive__sure_event(self):
        estimate = self.estimator.tail_naive(self.rademacher, 100, -10, 2000, seed=1)
        self.assertEqual(1.0, estimate.p_hat)
        self.assertEqual(0.0, estimate.std_err)
        self.assertEqual(TailMethod.naive, estimate.method)

    def test_tail_naive__exact_binomial(self):
        exact = ExactTails.rademacher_tail(400, 2)
        estimate = self.estimator.tail_naive(self.rademacher, 400, 2, 20_000, seed=2)
        self.assertLessEqual(abs(estimate.p_hat - exact), 4 * estimate.std_err)

    def test_tail_naive__std_err_scaling(self):
        small = self.estimator.tail_naive(self.rademacher, 400, 1, 20_000, seed=3)
        large = self.estimator.tail_naive(self.rademacher, 400, 1, 40_000, seed=3)
        self.assertAlmostEqual(1 / math.sqrt(2), large.std_err / small.std_err, delta=0.07)

    def test_tail_naive__no_samples(self):
        with self.assertRaises(ValueError):
            self.estimator.tail_naive(self.rademacher, 100, 1, 0, seed=1)

    def test_tail_naive__sampler_law(self):
        def sampler(rng, size):
            return np.ones(size), 2.0 * rng.integers(0, 2, size) - 1.0
        law = JointLaw.parametric(SamplerFamily(sampler, mean_tau=1.0, mean_x=0.0, mean_x2=1.0))
        exact = ExactTails.rademacher_tail(100, 1)
        estimate = self.estimator.tail_naive(law, 100, 1, 2000, seed=12)
        self.assertLessEqual(abs(estimate.p_hat - exact), 4 * estimate.std_err)
        self.assertEqual(estimate, self.estimator.tail_naive(law, 100, 1, 2000, seed=12))

    def test_tail_tilted__rademacher_tilt(self):
        estimate = self.estimator.tail_tilted(self.rademacher, 400, 2, 100, seed=4)
        self.assertAlmostEqual(math.atanh(0.1), estimate.lam, places=10)

    def test_tail_tilted__exact_binomial_400(self):
        n = 20_000
        exact = ExactTails.rademacher_tail(400, 2)
        estimate = self.estimator.tail_tilted(self.rademacher, 400, 2, n, seed=5)
        self.assertLessEqual(abs(estimate.p_hat - exact), 4 * estimate.std_err)
        self.assertLessEqual(3 * estimate.std_err, self.naive_std_err(exact, n))

    def test_tail_tilted__tenfold_std_err_reduction(self):
        n = 20_000
        exact = ExactTails.rademacher_tail(10_000, 3)
        estimate = self.estimator.tail_tilted(self.rademacher, 10_000, 3, n, seed=6)
        self.assertLessEqual(abs(estimate.p_hat - exact), 4 * estimate.std_err)
        self.assertLessEqual(10 * estimate.std_err, self.naive_std_err(exact, n))

    def test_tail_tilted__far_tail(self):
        exact = ExactTails.rademacher_tail(10 ** 6, 8)
        estimate = self.estimator.tail_tilted(self.rademacher, 10 ** 6, 8, 5000, seed=7)
        self.assertLess(exact, 1e-14)
        self.assertLessEqual(abs(estimate.p_hat - exact), 4 * estimate.std_err)
        self.assertLessEqual(estimate.relative_std_err, 0.1)

    def test_tail_tilted__agrees_with_naive(self):
        law = StandardLaws.uniform12()
        naive = self.estimator.tail_naive(law, 100, 1, 5000, seed=8)
        tilted = self.estimator.tail_tilted(law, 100, 1, 5000, seed=8)
        self.assertGreaterEqual(naive.p_hat * 5000, 100)
        self.assertLessEqual(abs(naive.p_hat - tilted.p_hat), 4 * math.hypot(naive.std_err, tilted.std_err))
        self.assertLess(tilted.std_err, naive.std_err)

    def test_tail_tilted__nonpositive_x(self):
        with self.assertRaises(TiltError):
            self.estimator.tail_tilted(self.rademacher, 100, 0, 10, seed=1)

    def test_tail_tilted__drift_out_of_reach(self):
        with self.assertRaises(TiltError):
            self.estimator.tail_tilted(self.rademacher, 4, 3, 10, seed=1)

    def test_tail_tilted__parametric_law(self):
        with self.assertRaises(TiltError):
            self.estimator.tail_tilted(StandardLaws.scaled_sqrt_exponential(), 100, 1, 10, seed=1)

    def test_tail_tilted__independent_of_thread_count(self):
        single = TailEstimator(PathSimulator(chunk_size=700, threads=1)).tail_tilted(self.rademacher, 900, 2, 3000, 9)
        pooled = TailEstimator(PathSimulator(chunk_size=700, threads=3)).tail_tilted(self.rademacher, 900, 2, 3000, 9)
        self.assertEqual(single, pooled)

    def test_mdp_rate_scan__trend(self):
        schedule = [(10_000, 3), (100_000, 5), (10 ** 6, 8)]
        scan = self.estimator.mdp_rate_scan(self.rademacher, schedule, 4000, seed=10)
        self.assertEqual(["t", "x", "method", "p_hat", "std_err", "rate", "reference"], scan.columns.tolist()[:7])
        rates = scan["rate"].tolist()
        self.assertTrue(rates[0] > rates[1] > rates[2] > 0.5, rates)
        for row in scan.itertuples():
            exact = ExactTails.rademacher_rate(row.t, row.x)
            self.assertLessEqual(abs(row.rate - exact), 4 * row.rate_std_err)
            self.assertLessEqual(abs(row.rate - row.reference), 0.03)

    def test_mdp_rate_scan__both_methods(self):
        scan = self.estimator.mdp_rate_scan(self.rademacher, [(400, 1), (1600, 1.5)], 2000, seed=11,
                                            methods=("naive", "tilted"))
        self.assertEqual(["naive", "tilted", "naive", "tilted"], scan["method"].tolist())

    def test_check_schedule(self):
        logger = self.estimator._logger
        self.assertTrue(TailEstimator.check_schedule([(100, 1), (10_000, 2)], logger))
        self.assertFalse(TailEstimator.check_schedule([(100, 2), (10_000, 1)], logger))

    def test_tail_estimate__rate(self):
        estimate = TailEstimate(t=100, x=2, p_hat=0.0, std_err=0.0, n_samples=10, method=TailMethod.naive)
        self.assertEqual(math.inf, estimate.rate)
        estimate = TailEstimate(t=100, x=2, p_hat=math.exp(-2), std_err=0.01, n_samples=10, method=TailMethod.naive)
        self.assertAlmostEqual(0.5, estimate.rate, places=15)
        self.assertEqual("naive", estimate.to_dict()["method"])
