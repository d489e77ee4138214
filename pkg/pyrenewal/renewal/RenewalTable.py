import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
import pandas as pd

from renewal.RenewalError import RenewalError


@dataclass(frozen=True, eq=False)
class RenewalTable:
    """
    Renewal measure of a lattice law: masses[n] = U({n*delta}) for n = 0..N.
    masses[0] is 1, or 1/(1 - mu({0})) for a law with an atom at the origin.
    inv_mean is 1/E tau.
    """
    delta: Fraction
    masses: np.ndarray
    inv_mean: float

    @property
    def n_max(self) -> int:
        return len(self.masses) - 1

    @cached_property
    def cumulative(self) -> np.ndarray:
        """ cumulative[n] = U([0, n*delta)) = sum of masses[:n], n = 0..N+1 """
        return np.concatenate(([0.0], np.cumsum(self.masses)))

    def index_sum(self, lo: int, hi: int) -> float:
        """ Sum of masses[lo:hi] """
        if lo < 0 or hi > len(self.masses) or lo > hi:
            raise RenewalError(f"Index range [{lo}, {hi}) is outside the table 0..{self.n_max}")
        return math.fsum(self.masses[lo:hi])

    def measure_below(self, s) -> float:
        """ U([0, s)) """
        if s <= 0:
            return 0.0
        count = math.ceil(Fraction(s) / self.delta)
        if count > len(self.masses):
            raise RenewalError(f"s={s} is beyond the table horizon {self.n_max * self.delta}")
        return float(self.cumulative[count])

    def interval_measure(self, u, v) -> float:
        """ U([u, u+v)) """
        u, v = Fraction(u), Fraction(v)
        lo = max(0, math.ceil(u / self.delta))
        hi = math.ceil((u + v) / self.delta)
        return self.index_sum(lo, max(lo, hi))

    def to_frame(self) -> pd.DataFrame:
        n = np.arange(len(self.masses))
        return pd.DataFrame({"n": n, "t": n * float(self.delta), "mass": self.masses})
