import math
from fractions import Fraction
from unittest import TestCase

import numpy as np

from law.JointLaw import JointLaw
from law.StandardLaws import StandardLaws
from tilt.TiltError import TiltError
from tilt.Tilting import Tilting


class TestTilting(TestCase):
    lambda_grid = np.round(np.arange(-3.0, 3.0 + 1e-9, 0.25), 10)

    def setUp(self):
        self.tilting = Tilting(tol=1e-12)

    @staticmethod
    def random_law(rng: np.random.Generator) -> JointLaw:
        n = int(rng.integers(2, 7))
        taus = rng.integers(1, 6, size=n)
        xs = rng.normal(size=n)
        ps = rng.dirichlet(np.ones(n))
        return JointLaw.discrete((int(tau), float(x), float(p)) for tau, x, p in zip(taus, xs, ps))

    def test_psi__zero_point(self):
        self.assertEqual(1.0, Tilting.psi(StandardLaws.rademacher(), 0.0, 0.0))

    def test_psi__rademacher_closed_form(self):
        law = StandardLaws.rademacher()
        self.assertAlmostEqual(math.cosh(1.0), Tilting.psi(law, 1.0, 0.0), places=14)
        self.assertAlmostEqual(math.exp(-0.3) * math.cosh(2.0), Tilting.psi(law, 2.0, 0.3), places=14)

    def test_psi__strictly_decreasing_in_eta(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            law = self.random_law(rng)
            lam = float(rng.uniform(-3, 3))
            etas = np.sort(rng.uniform(0, 5, size=10))
            values = [Tilting.psi(law, lam, eta) for eta in etas]
            self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

    def test_psi__large_exponents_do_not_raise(self):
        law = StandardLaws.rademacher()
        self.assertEqual(math.inf, Tilting.psi(law, 2000.0, 0.0))
        self.assertAlmostEqual(1000.0 - math.log(2.0), Tilting.log_psi(law, 1000.0, 0.0), places=9)
        self.assertAlmostEqual(0.0, Tilting.psi_minus_one(law, 1000.0, 1000.0 - math.log(2.0)), places=9)

    def test_psi_minus_one__resolves_small_lambda(self):
        law = StandardLaws.rademacher()
        lam = 1e-6
        self.assertAlmostEqual(math.cosh(lam) - 1, Tilting.psi_minus_one(law, lam, 0.0), delta=1e-25)

    def test_psi__parametric_matches_sampling_free_identity(self):
        law = StandardLaws.scaled_sqrt_exponential()
        self.assertAlmostEqual(1.0, Tilting.psi(law, 0.0, 0.0), places=10)
        # E exp(-eta tau) = 1/(1+eta) for tau ~ exponential(1)
        self.assertAlmostEqual(1.0 / 1.5, Tilting.psi(law, 0.0, 0.5), places=10)

    def test_solve_eta__zero_lambda(self):
        law = StandardLaws.skewed()
        tilt = self.tilting.solve_eta(law, 0.0)
        self.assertEqual(0.0, tilt.eta)
        self.assertEqual(law, tilt.tilted_pair)

    def test_solve_eta__rademacher_log_cosh(self):
        law = StandardLaws.rademacher()
        self.assertAlmostEqual(0.0049917, self.tilting.solve_eta(law, 0.1).eta, places=7)
        self.assertAlmostEqual(0.4337808305, self.tilting.solve_eta(law, 1.0).eta, places=9)
        for lam in self.lambda_grid:
            eta = self.tilting.solve_eta(law, lam).eta
            self.assertAlmostEqual(math.log(math.cosh(lam)), eta, delta=1e-12)

    def test_solve_eta__normalization_and_positivity_on_suite(self):
        for name, law in StandardLaws.suite().items():
            if name == "sqrt_lattice":
                continue
            for lam in self.lambda_grid:
                tilt = self.tilting.solve_eta(law, lam)
                self.assertLessEqual(abs(tilt.residual), 1e-12, f"{name} lam={lam}")
                raw = law.ps * np.exp(lam * law.xs - tilt.eta * law.taus)
                self.assertLessEqual(abs(math.fsum(raw) - 1), 1e-12, f"{name} lam={lam}")
                self.assertEqual(Fraction(1), sum((atom.p for atom in tilt.tilted_pair.atoms), Fraction(0)))
                if lam != 0:
                    self.assertGreater(tilt.eta, 0, f"{name} lam={lam}")

    def test_solve_eta__nonzero_mean_has_no_root(self):
        law = JointLaw.discrete([(1, 1, "1/2"), (1, 2, "1/2")])
        with self.assertRaises(TiltError):
            self.tilting.solve_eta(law, -1.0)

    def test_solve_eta__parametric(self):
        law = StandardLaws.scaled_sqrt_exponential()
        tilt = self.tilting.solve_eta(law, 0.5)
        self.assertGreater(tilt.eta, 0)
        self.assertAlmostEqual(1.0, Tilting.psi(law, 0.5, tilt.eta), places=11)
        self.assertIsNone(tilt.tilted_pair)

    def test_tilted_pair_law__zero_tilt_is_base_law(self):
        law = StandardLaws.three_point()
        self.assertEqual(law, Tilting.tilted_pair_law(self.tilting.solve_eta(law, 0.0)))

    def test_tilted_pair_law__rademacher_weights(self):
        lam = 0.7
        tilted = Tilting.tilted_pair_law(self.tilting.solve_eta(StandardLaws.rademacher(), lam))
        by_x = {float(atom.x): float(atom.p) for atom in tilted.atoms}
        self.assertAlmostEqual(math.exp(lam) / (2 * math.cosh(lam)), by_x[1.0], places=14)
        self.assertAlmostEqual(math.exp(-lam) / (2 * math.cosh(lam)), by_x[-1.0], places=14)

    def test_tilted_pair_law__positive_tilt_positive_mean(self):
        for name, law in StandardLaws.standardized_suite().items():
            tilted = Tilting.tilted_pair_law(self.tilting.solve_eta(law, 0.5))
            self.assertGreater(math.fsum(tilted.ps * tilted.xs), 0, name)

    def test_tilted_pair_law__same_tau_support(self):
        for name, law in StandardLaws.suite().items():
            if name == "sqrt_lattice":
                continue
            tilt = self.tilting.solve_eta(law, 1.5)
            self.assertEqual(law.tau_marginal().locations, tilt.tau_marginal.locations, name)
            self.assertTrue(all(mass > 0 for mass in tilt.tau_marginal.masses), name)

    def test_tilted_pair_law__parametric_unavailable(self):
        tilt = self.tilting.solve_eta(StandardLaws.scaled_sqrt_exponential(), 0.0)
        with self.assertRaises(TiltError):
            Tilting.tilted_pair_law(tilt)

    def test_h_function__unit_tau(self):
        h = Tilting.h_function(self.tilting.solve_eta(StandardLaws.rademacher(), 0.8), 5)
        np.testing.assert_array_equal([1.0, 0, 0, 0, 0, 0], h.values)
        self.assertEqual(1.0, h.at(0.0))
        self.assertEqual(0.0, h.at(17.0))

    def test_h_function__zero_lambda_is_tail(self):
        law = StandardLaws.uniform12()
        h = Tilting.h_function(self.tilting.solve_eta(law, 0.0), 3)
        np.testing.assert_array_equal([1.0, 0.5, 0.0, 0.0], h.values)

    def test_h_function__geometric_halves(self):
        h = Tilting.h_function(self.tilting.solve_eta(StandardLaws.geometric(), 0.0), 30)
        np.testing.assert_allclose([2.0 ** -k for k in range(31)], h.values, rtol=1e-15, atol=0)

    def test_h_function__grid_of_times(self):
        h = Tilting.h_function(self.tilting.solve_eta(StandardLaws.half_lattice(), 0.0), [0.0, 0.75, 1.25])
        self.assertEqual(Fraction(1, 2), h.delta)
        np.testing.assert_array_equal([1.0, 0.5, 0.5], h.values)
        self.assertEqual(0.5, h.at(1.25))

    def test_h_function__invariants_on_suite(self):
        for name, law in StandardLaws.suite().items():
            if name == "sqrt_lattice":
                continue
            h = Tilting.h_function(self.tilting.solve_eta(law, -1.25), 80)
            self.assertEqual(1.0, h.values[0], name)
            self.assertTrue(np.all(h.values >= 0), name)
            self.assertTrue(np.all(np.diff(h.tails) <= 0), name)

    def test_h_function__parametric_evaluator(self):
        law = StandardLaws.scaled_sqrt_exponential()
        h = Tilting.h_function(self.tilting.solve_eta(law, 0.0), [0.0, 1.0])
        self.assertFalse(h.is_lattice)
        self.assertAlmostEqual(1.0, h.at(0.0), places=10)
        self.assertAlmostEqual(math.exp(-1.0), h.at(1.0), places=10)

    def test_eta_curve__small_lambda_ratio(self):
        tilts = self.tilting.eta_curve(StandardLaws.rademacher(), [0.0, 0.01])
        self.assertEqual(0.0, tilts[0].eta)
        self.assertTrue(math.isnan(tilts[0].ratio))
        self.assertAlmostEqual(math.log(math.cosh(0.01)) / 0.00005, tilts[1].ratio, places=9)
        self.assertAlmostEqual(0.99998, tilts[1].ratio, places=5)

    def test_eta_curve__ratio_approaches_one_monotonically(self):
        lams = [0.2, 0.1, 0.05, 0.025]
        laws = dict(StandardLaws.standardized_suite())
        laws["scaled_sqrt_exponential"] = StandardLaws.scaled_sqrt_exponential()
        for name, law in laws.items():
            gaps = [abs(tilt.ratio - 1) for tilt in self.tilting.eta_curve(law, lams)]
            self.assertTrue(all(a > b for a, b in zip(gaps, gaps[1:])), f"{name}: {gaps}")
            self.assertLessEqual(gaps[-1], 0.05, name)

    def test_eta_curve__ratio_band_for_small_lambda(self):
        for name, law in StandardLaws.standardized_suite().items():
            for tilt in self.tilting.eta_curve(law, [-0.05, -0.02, 0.02, 0.05]):
                self.assertTrue(0.95 <= tilt.ratio <= 1.05, f"{name} lam={tilt.lam}: {tilt.ratio}")

    def test_eta_table__columns(self):
        table = self.tilting.eta_table(StandardLaws.rademacher(), [0.5, 1.0])
        self.assertEqual(["lambda", "eta", "ratio", "drift", "residual"], table.columns.tolist())
        self.assertAlmostEqual(math.tanh(1.0), table["drift"].iloc[1], places=12)

    def test_small_lambda_limit_check__limits(self):
        law = StandardLaws.rademacher()
        for a, limit in [(0.5, 0.0), (1.0, -0.5), (0.25, 0.25)]:
            table = self.tilting.small_lambda_limit_check(law, a, [0.1, 0.01, 0.001])
            self.assertEqual([limit] * 3, table["limit"].tolist())
            self.assertAlmostEqual(limit, table["value"].iloc[-1], delta=1e-5)
            errors = np.abs(table["value"] - limit).tolist()
            self.assertTrue(errors[0] > errors[1] > errors[2], errors)

    def test_small_lambda_limit_check__rademacher_value(self):
        table = self.tilting.small_lambda_limit_check(StandardLaws.rademacher(), 1.0, [0.01])
        expected = (math.exp(-1e-4) * math.cosh(0.01) - 1) / 1e-4
        self.assertAlmostEqual(expected, table["value"].iloc[0], places=9)
        self.assertAlmostEqual(-0.49997, table["value"].iloc[0], delta=5e-5)

    def test_small_lambda_limit_check__standardized_suite(self):
        symmetric = ["rademacher", "uniform12", "geometric", "half_lattice", "even_lattice", "lazy"]
        for name, law in StandardLaws.standardized_suite().items():
            for a in (0.25, 0.5, 1.0):
                # Odd moments enter at first order in lam, so asymmetric laws need a smaller lam
                lam = 0.01 if name in symmetric else 0.001
                value = self.tilting.small_lambda_limit_check(law, a, [lam])["value"].iloc[0]
                self.assertAlmostEqual(0.5 - a, value, delta=1e-3, msg=f"{name} a={a}")

    def test_small_lambda_limit_check__eta_sandwich(self):
        law = StandardLaws.standardized_suite()["uniform12"]
        for lam in (0.05, 0.01):
            eta = self.tilting.solve_eta(law, lam).eta
            self.assertLess(eta, 1.0 * lam ** 2)
            self.assertGreater(eta, 0.25 * lam ** 2)

    def test_tilted_drift__zero_lambda(self):
        tilt = self.tilting.solve_eta(StandardLaws.rademacher(), 0.0)
        self.assertEqual(0.0, Tilting.tilted_drift(tilt))

    def test_tilted_drift__rademacher_tanh(self):
        for lam in (-2.0, 0.3, 1.0):
            tilt = self.tilting.solve_eta(StandardLaws.rademacher(), lam)
            self.assertAlmostEqual(math.tanh(lam), Tilting.tilted_drift(tilt), places=13)

    def test_tilted_drift__equals_eta_derivative(self):
        step = 1e-5
        for name, law in StandardLaws.suite().items():
            if name == "sqrt_lattice":
                continue
            for lam in (-2.0, -0.5, 0.5, 2.0):
                derivative = (self.tilting.solve_eta(law, lam + step).eta
                              - self.tilting.solve_eta(law, lam - step).eta) / (2 * step)
                drift = Tilting.tilted_drift(self.tilting.solve_eta(law, lam))
                self.assertAlmostEqual(derivative, drift, delta=1e-6, msg=f"{name} lam={lam}")

    def test_tilted_drift__parametric_equals_eta_derivative(self):
        law = StandardLaws.scaled_sqrt_exponential()
        step = 1e-4
        derivative = (self.tilting.solve_eta(law, 0.5 + step).eta
                      - self.tilting.solve_eta(law, 0.5 - step).eta) / (2 * step)
        self.assertAlmostEqual(derivative, Tilting.tilted_drift(self.tilting.solve_eta(law, 0.5)), delta=1e-6)

    def test_solve_drift__rademacher_atanh(self):
        tilt = self.tilting.solve_drift(StandardLaws.rademacher(), 0.1)
        self.assertAlmostEqual(math.atanh(0.1), tilt.lam, places=12)
        tilt = self.tilting.solve_drift(StandardLaws.rademacher(), -0.3)
        self.assertAlmostEqual(math.atanh(-0.3), tilt.lam, places=12)

    def test_solve_drift__out_of_reach(self):
        with self.assertRaises(TiltError):
            self.tilting.solve_drift(StandardLaws.rademacher(), 1.5)
