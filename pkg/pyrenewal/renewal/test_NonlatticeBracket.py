from fractions import Fraction
from unittest import TestCase

from scipy import stats

from law.StandardLaws import StandardLaws
from renewal.NonlatticeBracket import NonlatticeBracket
from renewal.RenewalError import RenewalError


class TestNonlatticeBracket(TestCase):

    def setUp(self):
        self.bracket = NonlatticeBracket()

    def test_nonlattice_bracket__lattice_tau_is_exact(self):
        marginal = StandardLaws.rademacher().tau_marginal()
        pair = self.bracket.nonlattice_bracket(marginal, Fraction(1, 2), 12)
        for n in range(10):
            lower, upper = NonlatticeBracket.interval_bracket(pair, n, 1)
            self.assertEqual(1.0, lower)
            self.assertEqual(1.0, upper)

    def test_nonlattice_bracket__exponential_contains_poisson_measure(self):
        pair = self.bracket.nonlattice_bracket(stats.expon(), Fraction(1, 64), 12)
        for u in range(1, 11):
            lower, upper = NonlatticeBracket.interval_bracket(pair, u, 1)
            self.assertLessEqual(lower, 1.0)
            self.assertGreaterEqual(upper, 1.0)

    def test_nonlattice_bracket__down_dominates_up(self):
        pair = self.bracket.nonlattice_bracket(stats.gamma(2.0, scale=0.5), Fraction(1, 16), 10)
        for s in range(1, 10):
            self.assertGreaterEqual(pair.down.measure_below(s), pair.up.measure_below(s))

    def test_nonlattice_bracket__origin_atom_of_rounded_down_law(self):
        pair = self.bracket.nonlattice_bracket(stats.expon(), Fraction(1, 8), 4)
        mass_at_zero = 1 - stats.expon().sf(1 / 8)
        self.assertAlmostEqual(1 / (1 - mass_at_zero), pair.down.masses[0], places=14)
        self.assertEqual(1.0, pair.up.masses[0])

    def test_nonlattice_bracket__width_halves_with_delta(self):
        widths = []
        for delta in (Fraction(1, 32), Fraction(1, 64)):
            pair = self.bracket.nonlattice_bracket(stats.expon(), delta, 4)
            lower, upper = NonlatticeBracket.interval_bracket(pair, 1, 1)
            widths.append(upper - lower)
        self.assertAlmostEqual(0.5, widths[1] / widths[0], delta=0.1)

    def test_nonlattice_bracket__distribution_unavailable(self):
        with self.assertRaises(RenewalError):
            self.bracket.nonlattice_bracket(None, Fraction(1, 8), 4)

    def test_bracket_gap__exponential(self):
        pair = self.bracket.nonlattice_bracket(stats.expon(), Fraction(1, 64), 8)
        gaps = NonlatticeBracket.bracket_gap(pair, 1, [1, 2, 4])
        self.assertEqual(["u", "lower", "upper", "width", "gap_bound"], gaps.columns.tolist())
        self.assertTrue((gaps["gap_bound"] < 0.2).all())
