import math
from fractions import Fraction
from typing import Dict, List

from law.JointLaw import JointLaw
from law.LawError import LawError
from law.LawTools import LawTools
from law.ScaledSqrtFamily import ScaledSqrtFamily


class StandardLaws:
    """ Named laws used by run configs (builtin:<name>) and by the test suites """

    @staticmethod
    def rademacher() -> JointLaw:
        """ tau = 1, X = +-1 fair """
        return JointLaw.discrete([(1, 1, "1/2"), (1, -1, "1/2")])

    @staticmethod
    def uniform12() -> JointLaw:
        """ tau uniform on {1, 2}, X = +-1 fair and independent of tau """
        return JointLaw.discrete([(tau, x, "1/4") for tau in (1, 2) for x in (1, -1)])

    @staticmethod
    def geometric(kmax: int = 64) -> JointLaw:
        """ tau geometric(1/2) on {1, 2, ...} truncated at kmax (remainder mass on kmax), X = +-1 fair """
        masses = [Fraction(1, 2 ** k) for k in range(1, kmax)]
        masses.append(1 - sum(masses, Fraction(0)))
        return JointLaw.discrete([(k, x, mass / 2) for k, mass in enumerate(masses, start=1) for x in (1, -1)])

    @staticmethod
    def correlated() -> JointLaw:
        """ X = tau - 2 with tau uniform on {1, 3} """
        return JointLaw.discrete([(1, -1, "1/2"), (3, 1, "1/2")])

    @staticmethod
    def sqrt_lattice() -> JointLaw:
        """ X = sqrt(tau), tau uniform on {1, 4}; not standardized """
        return JointLaw.discrete([(1, 1, "1/2"), (4, 2, "1/2")])

    @staticmethod
    def skewed() -> JointLaw:
        """ tau = 1, X = 2 w.p. 1/5 and -1/2 w.p. 4/5 """
        return JointLaw.discrete([(1, 2, "1/5"), (1, "-1/2", "4/5")])

    @staticmethod
    def half_lattice() -> JointLaw:
        """ tau uniform on {1/2, 3/2}, span 1/2 """
        return JointLaw.discrete([(tau, x, "1/4") for tau in ("1/2", "3/2") for x in (1, -1)])

    @staticmethod
    def even_lattice() -> JointLaw:
        """ tau uniform on {2, 4, 6}, span 2 """
        return JointLaw.discrete([(tau, x, "1/6") for tau in (2, 4, 6) for x in (1, -1)])

    @staticmethod
    def lazy() -> JointLaw:
        """ No reward on short intervals, +-1 on long ones """
        return JointLaw.discrete([(1, 0, "1/2"), (2, 1, "1/4"), (2, -1, "1/4")])

    @staticmethod
    def three_point() -> JointLaw:
        """ X = tau - 2 with tau uniform on {1, 2, 3} """
        return JointLaw.discrete([(1, -1, "1/3"), (2, 0, "1/3"), (3, 1, "1/3")])

    @staticmethod
    def scaled_sqrt_exponential() -> JointLaw:
        """ Standardized X = a*sqrt(tau) + b with tau ~ exponential(1) """
        a = 1.0 / math.sqrt(1.0 - math.pi / 4.0)
        return JointLaw.parametric(ScaledSqrtFamily.of(a, -a * math.sqrt(math.pi) / 2.0, "exponential", rate=1.0))

    @staticmethod
    def suite() -> Dict[str, JointLaw]:
        """ Lattice laws with var X > 0, not all standardized """
        return {name: StandardLaws.by_name(name) for name in StandardLaws.lattice_names()}

    @staticmethod
    def standardized_suite() -> Dict[str, JointLaw]:
        return {name: LawTools.standardize(law) for name, law in StandardLaws.suite().items()}

    @staticmethod
    def lattice_names() -> List[str]:
        return ["rademacher", "uniform12", "geometric", "correlated", "sqrt_lattice", "skewed",
                "half_lattice", "even_lattice", "lazy", "three_point"]

    @staticmethod
    def by_name(name: str) -> JointLaw:
        factories = {"rademacher": StandardLaws.rademacher,
                     "uniform12": StandardLaws.uniform12,
                     "geometric": StandardLaws.geometric,
                     "correlated": StandardLaws.correlated,
                     "sqrt_lattice": StandardLaws.sqrt_lattice,
                     "skewed": StandardLaws.skewed,
                     "half_lattice": StandardLaws.half_lattice,
                     "even_lattice": StandardLaws.even_lattice,
                     "lazy": StandardLaws.lazy,
                     "three_point": StandardLaws.three_point,
                     "scaled_sqrt_exponential": StandardLaws.scaled_sqrt_exponential}
        if name not in factories:
            raise LawError(f"Unknown builtin law {name!r}, expected one of {sorted(factories)}")
        return factories[name]()
