import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class HFunction:
    """
    h(t) = exp(-eta*t) * P(tau_lam > t).
    Lattice laws: tails[k] = P(tau_lam > k*delta) for k = 0..K, exact tail sums of the tilted marginal.
    Other laws: evaluator t -> h(t).
    """
    lam: float
    eta: float
    delta: Optional[Fraction] = None
    tails: Optional[np.ndarray] = None
    evaluator: Optional[Callable[[float], float]] = None

    @property
    def is_lattice(self) -> bool:
        return self.tails is not None

    @property
    def values(self) -> np.ndarray:
        """ h(k*delta), k = 0..K """
        return np.exp(-self.eta * float(self.delta) * np.arange(len(self.tails))) * self.tails

    @property
    def log_values(self) -> np.ndarray:
        """ ln h(k*delta), -inf where the tail vanishes """
        with np.errstate(divide="ignore"):
            return -self.eta * float(self.delta) * np.arange(len(self.tails)) + np.log(self.tails)

    def at(self, t: float) -> float:
        if not self.is_lattice:
            return self.evaluator(t)
        if t < 0:
            return 0.0
        # The tilted tail is constant between lattice points
        k = math.floor(Fraction(t) / self.delta)
        if k >= len(self.tails):
            if self.tails[-1] == 0:
                return 0.0
            raise IndexError(f"t={t} is beyond the tabulated lattice range {len(self.tails) - 1}")
        return float(math.exp(-self.eta * t) * self.tails[k])
