import logging
import math
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from law.JointLaw import JointLaw, LawKind
from law.LawError import LawError
from law.MomentReport import MomentReport


class LawTools:
    """ Validate, standardize, measure the span of and sample joint laws of (tau, X) """

    tolerance = 1e-12
    _logger = logging.getLogger("LawTools")

    @staticmethod
    def validate(law: JointLaw) -> MomentReport:
        """ Moments of the law: exact rationals for discrete laws, closed form or quadrature for parametric """
        if law.is_discrete:
            return LawTools._validate_discrete(law)
        return LawTools._validate_parametric(law)

    @staticmethod
    def _validate_discrete(law: JointLaw) -> MomentReport:
        bad_taus = [atom.tau for atom in law.atoms if atom.tau <= 0]
        if bad_taus:
            raise LawError(f"Non-positive tau atoms: {[str(tau) for tau in bad_taus]}")
        bad_ps = [atom.p for atom in law.atoms if atom.p < 0]
        if bad_ps:
            raise LawError(f"Negative probabilities: {[float(p) for p in bad_ps]}")
        total = sum((atom.p for atom in law.atoms), Fraction(0))
        if abs(total - 1) > LawTools.tolerance:
            raise LawError(f"Probabilities sum to {float(total)!r}, not 1")

        mean_tau, mean_x, mean_x2 = LawTools._exact_moments(law)
        var_x = mean_x2 - mean_x ** 2
        return MomentReport(mean_tau=float(mean_tau),
                            mean_x=float(mean_x),
                            var_x=float(var_x),
                            mean_x2=float(mean_x2),
                            standardized=LawTools._is_standardized(mean_tau, mean_x, mean_x2),
                            finite_mean_tau=True,
                            exp_square_moment=True,
                            exp_linear_moment=True,
                            exact=True,
                            epsilon_note="finite support: every eps > 0 works")

    @staticmethod
    def _exact_moments(law: JointLaw) -> Tuple[Fraction, Fraction, Fraction]:
        mean_tau = sum((atom.p * atom.tau for atom in law.atoms), Fraction(0))
        mean_x = sum((atom.p * atom.x for atom in law.atoms), Fraction(0))
        mean_x2 = sum((atom.p * atom.x * atom.x for atom in law.atoms), Fraction(0))
        return mean_tau, mean_x, mean_x2

    @staticmethod
    def _validate_parametric(law: JointLaw) -> MomentReport:
        family = law.family
        mean_tau, mean_x, mean_x2 = family.moments()
        if not mean_tau > 0:
            raise LawError(f"Mean of tau must be positive, got {mean_tau}")
        holds = bool(getattr(family, "conditions_hold", False))
        note = "eps < 1/(2a^2) for X = a*sqrt(tau) + b" if family.name == "scaled-sqrt" \
            else "declared by the sampler author"
        return MomentReport(mean_tau=float(mean_tau),
                            mean_x=float(mean_x),
                            var_x=float(mean_x2 - mean_x ** 2),
                            mean_x2=float(mean_x2),
                            standardized=LawTools._is_standardized(mean_tau, mean_x, mean_x2),
                            finite_mean_tau=bool(np.isfinite(mean_tau)),
                            exp_square_moment=holds,
                            exp_linear_moment=holds,
                            exact=False,
                            epsilon_note=note)

    @staticmethod
    def _is_standardized(mean_tau, mean_x, mean_x2) -> bool:
        tol = LawTools.tolerance
        return bool(abs(mean_x) <= tol and abs(mean_x2 - 1) <= tol and abs(mean_tau - 1) <= tol)

    @staticmethod
    def standardize(law: JointLaw) -> JointLaw:
        """
        Rescale tau by 1/E tau and map X affinely to zero mean, unit second moment.
        Exact for discrete laws whose variance is a rational square.
        """
        report = LawTools.validate(law)
        if report.standardized:
            return law
        if law.is_discrete:
            mean_tau, mean_x, mean_x2 = LawTools._exact_moments(law)
            var_x = mean_x2 - mean_x ** 2
            if var_x <= 0:
                raise LawError("Cannot standardize a law with var(X) = 0")
            sd = LawTools._exact_sqrt(var_x)
            if sd is None:
                sd = Fraction(math.sqrt(var_x))
            LawTools._logger.debug(f"Standardizing: tau / {mean_tau}, (x - {float(mean_x)}) / {float(sd)}")
            return JointLaw.discrete((atom.tau / mean_tau, (atom.x - mean_x) / sd, atom.p) for atom in law.atoms)

        if not report.var_x > 0:
            raise LawError("Cannot standardize a law with var(X) = 0")
        family = law.family
        if not hasattr(family, "rescaled"):
            raise LawError(f"Family {family.name} cannot be rescaled")
        # X = a sqrt(tau) + b, tau = c tau'  =>  (X - m)/sd = (a sqrt(c)/sd) sqrt(tau') + (b - m)/sd
        c, m, sd = report.mean_tau, report.mean_x, math.sqrt(report.var_x)
        return JointLaw.parametric(family.rescaled(c, family.a * math.sqrt(c) / sd, (family.b - m) / sd))

    @staticmethod
    def _exact_sqrt(value: Fraction) -> Optional[Fraction]:
        num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
        if num * num == value.numerator and den * den == value.denominator:
            return Fraction(num, den)
        return None

    @staticmethod
    def span(law: JointLaw) -> Fraction:
        """ Max delta with P(tau in {delta, 2delta, ...}) = 1; 0 for continuous parametric laws """
        if law.kind == LawKind.parametric:
            return Fraction(0)
        return law.tau_marginal().span

    @staticmethod
    def sample_pair(law: JointLaw, rng: np.random.Generator) -> Tuple[float, float]:
        taus, xs = LawTools.sample_pairs(law, rng, 1)
        return float(taus[0]), float(xs[0])

    @staticmethod
    def sample_pairs(law: JointLaw, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        """ size i.i.d. pairs, deterministic given the generator state """
        if law.is_discrete:
            idx = rng.choice(len(law.atoms), size=size, p=law.ps / law.ps.sum())
            return law.taus[idx], law.xs[idx]
        return law.family.sample(rng, size)
