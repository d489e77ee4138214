import math
from dataclasses import dataclass
from typing import Optional

from law.JointLaw import JointLaw
from law.TauMarginal import TauMarginal


@dataclass(frozen=True)
class TiltResult:
    """
    Solution eta of E exp(lam*X - eta*tau) = 1 for one lam.
    tilted_pair and tau_marginal are filled for discrete laws only.
    """
    lam: float
    eta: float
    law: JointLaw
    residual: float = 0.0
    tilted_pair: Optional[JointLaw] = None
    tau_marginal: Optional[TauMarginal] = None

    @property
    def ratio(self) -> float:
        """ eta / (lam^2 / 2), undefined at lam = 0 """
        return self.eta / (self.lam ** 2 / 2.0) if self.lam != 0 else math.nan
