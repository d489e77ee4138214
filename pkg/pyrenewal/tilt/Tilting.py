import logging
import math
from fractions import Fraction
from typing import Iterable, List, Sequence, Union

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from scipy.special import logsumexp

from law.JointLaw import JointLaw
from law.LawTools import LawTools
from law.TauMarginal import TauMarginal
from tilt.HFunction import HFunction
from tilt.TiltError import TiltError
from tilt.TiltResult import TiltResult


class Tilting:
    """
    Exponential tilting of the pair (tau, X): psi(lam, eta) = E exp(lam*X - eta*tau),
    the unique eta_lam >= 0 with psi(lam, eta_lam) = 1, the tilted pair law and h_lam.
    """

    # Exponents above this are summed in log space
    log_space_exponent = 50.0

    def __init__(self, tol: float = 1e-12, max_iter: int = 200):
        self._logger = logging.getLogger(self.__class__.__name__)
        if not tol > 0:
            raise TiltError(f"Tolerance must be positive, got {tol}")
        self.tol = tol
        self.max_iter = max_iter

    @staticmethod
    def of_config(config: dict) -> "Tilting":
        return Tilting(tol=float(config.get("pyrenewal.tilt.tol", 1e-12)),
                       max_iter=int(config.get("pyrenewal.tilt.max_iter", 200)))

    @staticmethod
    def _exponents(law: JointLaw, lam: float, eta: float) -> np.ndarray:
        return lam * law.xs - eta * law.taus

    @staticmethod
    def _require_expectation(law: JointLaw):
        if not law.is_discrete and not hasattr(law.family, "expect"):
            raise TiltError(f"Family {law.family.name} has no evaluator for E exp(lam*X - eta*tau)")

    @staticmethod
    def log_psi(law: JointLaw, lam: float, eta: float) -> float:
        """ ln psi(lam, eta), never overflows for discrete laws """
        if law.is_discrete:
            return float(logsumexp(Tilting._exponents(law, lam, eta), b=law.ps))
        return math.log(Tilting.psi(law, lam, eta))

    @staticmethod
    def psi(law: JointLaw, lam: float, eta: float) -> float:
        """ E exp(lam*X - eta*tau); +inf when the value exceeds the float range """
        if law.is_discrete:
            with np.errstate(over="ignore"):
                return float(np.exp(Tilting.log_psi(law, lam, eta)))
        Tilting._require_expectation(law)
        return law.family.expect(lambda tau, x: math.exp(lam * x - eta * tau))

    @staticmethod
    def psi_minus_one(law: JointLaw, lam: float, eta: float) -> float:
        """ psi(lam, eta) - 1 without cancellation near lam = 0 """
        if law.is_discrete:
            exponents = Tilting._exponents(law, lam, eta)
            if np.max(np.abs(exponents)) > Tilting.log_space_exponent:
                return float(np.expm1(Tilting.log_psi(law, lam, eta)))
            return math.fsum(law.ps * np.expm1(exponents))
        Tilting._require_expectation(law)
        return law.family.expect(lambda tau, x: math.expm1(lam * x - eta * tau))

    @staticmethod
    def psi_eta_derivative(law: JointLaw, lam: float, eta: float) -> float:
        """ d psi / d eta = -E[tau exp(lam*X - eta*tau)] """
        if law.is_discrete:
            exponents = Tilting._exponents(law, lam, eta)
            return -float(np.exp(logsumexp(exponents, b=law.ps * law.taus)))
        return -law.family.expect(lambda tau, x: tau * math.exp(lam * x - eta * tau))

    def solve_eta(self, law: JointLaw, lam: float) -> TiltResult:
        """ Root of the strictly decreasing eta -> psi(lam, eta) - 1 on [0, inf) """
        lam = float(lam)
        if lam == 0:
            return self._result_of(law, 0.0, 0.0, 0.0)
        Tilting._require_expectation(law)

        def f(eta):
            return Tilting.psi_minus_one(law, lam, eta)

        at_zero = f(0.0)
        if not at_zero > 0:
            raise TiltError(f"psi({lam}, 0) - 1 = {at_zero} <= 0, no positive root. "
                            f"Is E X = 0 and X non-degenerate?")

        # Bracket by doubling
        hi, doublings = 1.0, 0
        while f(hi) >= 0:
            hi *= 2.0
            doublings += 1
            if doublings > self.max_iter:
                raise TiltError(f"Cannot bracket eta for lam={lam}, upper end reached {hi}")
        self._logger.debug(f"lam={lam}: eta bracket [0, {hi}] after {doublings} doublings")

        try:
            eta = brentq(f, 0.0, hi, xtol=1e-300, maxiter=self.max_iter)
        except RuntimeError as e:
            raise TiltError(f"Root finder did not converge for lam={lam}: {e}") from e

        eta, residual = self._newton_polish(law, lam, eta, f(eta))
        if abs(residual) > self.tol:
            raise TiltError(f"lam={lam}: |psi - 1| = {abs(residual)} exceeds tolerance {self.tol}")
        return self._result_of(law, lam, eta, residual)

    def _newton_polish(self, law: JointLaw, lam: float, eta: float, residual: float):
        for _ in range(2):
            if residual == 0:
                break
            candidate = eta - residual / Tilting.psi_eta_derivative(law, lam, eta)
            if candidate <= 0:
                break
            candidate_residual = Tilting.psi_minus_one(law, lam, candidate)
            if abs(candidate_residual) >= abs(residual):
                break
            eta, residual = candidate, candidate_residual
        return eta, residual

    def _result_of(self, law: JointLaw, lam: float, eta: float, residual: float) -> TiltResult:
        if not law.is_discrete:
            return TiltResult(lam=lam, eta=eta, law=law, residual=residual)
        tilted = law if lam == 0 else Tilting._tilted_atoms(law, lam, eta)
        return TiltResult(lam=lam, eta=eta, law=law, residual=residual,
                          tilted_pair=tilted, tau_marginal=tilted.tau_marginal())

    @staticmethod
    def _tilted_atoms(law: JointLaw, lam: float, eta: float) -> JointLaw:
        weights = law.ps * np.exp(Tilting._exponents(law, lam, eta))
        masses = [Fraction(float(q)) for q in weights]
        # Largest atom absorbs the rounding remainder so that the masses sum to 1 exactly
        largest = int(np.argmax(weights))
        masses[largest] = 1 - sum((m for i, m in enumerate(masses) if i != largest), Fraction(0))
        return JointLaw.discrete((atom.tau, atom.x, mass) for atom, mass in zip(law.atoms, masses))

    @staticmethod
    def tilted_pair_law(tilt: TiltResult) -> JointLaw:
        """ Atoms (tau_i, x_i, p_i*exp(lam*x_i - eta*tau_i)) """
        if tilt.tilted_pair is None:
            raise TiltError("Tilted pair law is available for discrete laws only")
        return tilt.tilted_pair

    @staticmethod
    def tilted_drift(tilt: TiltResult) -> float:
        """ E_lam X / E_lam tau, equals d eta / d lam """
        if tilt.tilted_pair is not None:
            law = tilt.tilted_pair
            return math.fsum(law.ps * law.xs) / math.fsum(law.ps * law.taus)
        family, lam, eta = tilt.law.family, tilt.lam, tilt.eta
        mean_x = family.expect(lambda tau, x: x * math.exp(lam * x - eta * tau))
        mean_tau = family.expect(lambda tau, x: tau * math.exp(lam * x - eta * tau))
        return mean_x / mean_tau

    @staticmethod
    def h_function(tilt: TiltResult, grid: Union[int, Sequence[float]]) -> HFunction:
        """
        h_lam on the span lattice of a discrete law (grid = K lattice steps, or t values up to the last one),
        or as a quadrature evaluator for parametric laws.
        """
        if tilt.tau_marginal is not None:
            marginal: TauMarginal = tilt.tau_marginal
            delta = marginal.span
            k_max = grid if isinstance(grid, (int, np.integer)) \
                else math.floor(Fraction(max(grid)) / delta)
            return HFunction(lam=tilt.lam, eta=tilt.eta, delta=delta,
                             tails=marginal.tail_on_lattice(delta, int(k_max)))

        family, lam, eta = tilt.law.family, tilt.lam, tilt.eta

        def evaluate(t: float) -> float:
            if t < 0:
                return 0.0
            return math.exp(-eta * t) * family.expect(lambda tau, x: math.exp(lam * x - eta * tau), lower_tau=t)

        return HFunction(lam=lam, eta=eta, evaluator=evaluate)

    def eta_curve(self, law: JointLaw, lambda_grid: Iterable[float]) -> List[TiltResult]:
        tilts = [self.solve_eta(law, lam) for lam in lambda_grid]
        self._logger.info(f"Solved {len(tilts)} tilts")
        return tilts

    def eta_table(self, law: JointLaw, lambda_grid: Iterable[float]) -> pd.DataFrame:
        """ lambda, eta, eta/(lambda^2/2), drift and psi - 1 residual per grid point """
        tilts = self.eta_curve(law, lambda_grid)
        return pd.DataFrame({"lambda": [tilt.lam for tilt in tilts],
                             "eta": [tilt.eta for tilt in tilts],
                             "ratio": [tilt.ratio for tilt in tilts],
                             "drift": [Tilting.tilted_drift(tilt) for tilt in tilts],
                             "residual": [tilt.residual for tilt in tilts]})

    def small_lambda_limit_check(self, law: JointLaw, a: float, lambda_grid: Iterable[float]) -> pd.DataFrame:
        """ (psi(lam, a*lam^2) - 1) / lam^2 against its small lam limit 1/2 - a """
        if not LawTools.validate(law).standardized:
            self._logger.warning("Law is not standardized, the limit 1/2 - a does not apply")
        lams = [float(lam) for lam in lambda_grid]
        values = [Tilting.psi_minus_one(law, lam, a * lam * lam) / (lam * lam) if lam != 0 else math.nan
                  for lam in lams]
        return pd.DataFrame({"lambda": lams, "value": values, "limit": [0.5 - a] * len(lams)})

    def solve_drift(self, law: JointLaw, drift: float, lam_max: float = 50.0) -> TiltResult:
        """ Tilt whose drift E_lam X / E_lam tau equals the target, drift is increasing in lam """
        if drift == 0:
            return self.solve_eta(law, 0.0)
        sign = 1.0 if drift > 0 else -1.0

        def g(lam):
            return Tilting.tilted_drift(self.solve_eta(law, sign * lam)) - drift

        if sign * g(lam_max) <= 0:
            raise TiltError(f"Drift {drift} is out of reach: drift at lam={sign * lam_max} "
                            f"is {g(lam_max) + drift}")
        try:
            lam = brentq(g, 0.0, lam_max, xtol=1e-14, maxiter=self.max_iter)
        except RuntimeError as e:
            raise TiltError(f"Drift equation did not converge for drift={drift}: {e}") from e
        return self.solve_eta(law, sign * lam)
