import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple

import numpy as np
import pandas as pd

from law.TauMarginal import TauMarginal
from renewal.RenewalError import RenewalError
from renewal.RenewalMeasure import RenewalMeasure
from renewal.RenewalTable import RenewalTable


@dataclass(frozen=True, eq=False)
class BracketPair:
    """
    Renewal tables of tau rounded down and rounded up to the delta grid.
    Rounded-down epochs come first, so U_up([0, s)) <= U([0, s)) <= U_down([0, s)).
    """
    down: RenewalTable
    up: RenewalTable
    inv_mean: float


class NonlatticeBracket:
    """ Lattice sandwich of the renewal measure of a tau law given by its distribution function """

    def __init__(self, renewal_measure: RenewalMeasure = None):
        self._logger = logging.getLogger(self.__class__.__name__)
        self._renewal_measure = renewal_measure or RenewalMeasure()

    @staticmethod
    def _rounded_masses(tau_distribution, delta: Fraction, n_max: int) -> Tuple[np.ndarray, np.ndarray]:
        """ P(k*delta <= tau < (k+1)*delta) and P((k-1)*delta < tau <= k*delta), k = 0..n_max """
        if isinstance(tau_distribution, TauMarginal):
            points = [k * delta for k in range(n_max + 2)]
            left = np.array([tau_distribution.cdf_left(t) for t in points])
            right = np.array([tau_distribution.cdf(t) for t in points])
            down = np.diff(left)
            up = np.concatenate(([0.0], np.diff(right[:-1])))
            return down, up
        if tau_distribution is None or not hasattr(tau_distribution, "sf"):
            raise RenewalError("Tau distribution function is unavailable, cannot bracket the renewal measure")
        # Differences of the survival function keep the far tail accurate
        survival = np.asarray(tau_distribution.sf(np.arange(n_max + 2) * float(delta)), dtype=float)
        down = survival[:-1] - survival[1:]
        up = np.concatenate(([0.0], down[:-1]))
        return down, up

    def nonlattice_bracket(self, tau_distribution, delta, horizon) -> BracketPair:
        """
        Round tau down (origin atom allowed) and up to the delta grid and tabulate both renewal measures
        up to the horizon. Mass beyond the horizon does not enter the tabulated range.
        """
        delta = Fraction(delta)
        if delta <= 0:
            raise RenewalError(f"delta must be positive, got {delta}")
        n_max = max(1, math.ceil(Fraction(horizon) / delta))
        down, up = NonlatticeBracket._rounded_masses(tau_distribution, delta, n_max)
        mean = NonlatticeBracket._mean(tau_distribution)
        self._logger.debug(f"Bracket delta={delta}, n_max={n_max}, origin mass={down[0]}")
        tables = []
        for masses in (down, up):
            marginal = TauMarginal(tuple(k * delta for k in range(len(masses))), tuple(float(m) for m in masses))
            table = self._renewal_measure.renewal_table(marginal, delta, n_max)
            tables.append(RenewalTable(delta, table.masses, 1.0 / mean))
        return BracketPair(down=tables[0], up=tables[1], inv_mean=1.0 / mean)

    @staticmethod
    def _mean(tau_distribution) -> float:
        if isinstance(tau_distribution, TauMarginal):
            return tau_distribution.mean
        return float(tau_distribution.mean())

    @staticmethod
    def interval_bracket(pair: BracketPair, u, v) -> Tuple[float, float]:
        """ Rigorous lower and upper bounds of U([u, u+v)) """
        end = Fraction(u) + Fraction(v)
        lower = pair.up.measure_below(end) - pair.down.measure_below(u)
        upper = pair.down.measure_below(end) - pair.up.measure_below(u)
        return max(lower, 0.0), upper

    @staticmethod
    def bracket_gap(pair: BracketPair, v, u_grid: Iterable) -> pd.DataFrame:
        """ Bracket of U([u, u+v)) and the resulting bound of |U([u, u+v)) - v/E tau| """
        rows = []
        target = float(v) * pair.inv_mean
        for u in u_grid:
            lower, upper = NonlatticeBracket.interval_bracket(pair, u, v)
            rows.append({"u": float(u), "lower": lower, "upper": upper, "width": upper - lower,
                         "gap_bound": max(abs(lower - target), abs(upper - target))})
        return pd.DataFrame(rows, columns=["u", "lower", "upper", "width", "gap_bound"])
