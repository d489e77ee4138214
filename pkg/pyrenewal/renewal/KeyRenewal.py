import logging
import math
from typing import Callable, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import integrate

from renewal.DRIReport import DRIReport
from renewal.RenewalError import RenewalError
from renewal.RenewalTable import RenewalTable
from tilt.HFunction import HFunction

HLike = Union[HFunction, Callable[[float], float]]


class KeyRenewal:
    """ Lattice key renewal convolutions (U*h)(n*delta) and direct Riemann integrability diagnostics """

    def __init__(self):
        self._logger = logging.getLogger(self.__class__.__name__)

    @staticmethod
    def _lattice_values(table: RenewalTable, h: Union[HFunction, np.ndarray, Sequence[float]]) -> np.ndarray:
        if isinstance(h, HFunction):
            if not h.is_lattice or h.delta != table.delta:
                raise RenewalError(f"h is not given on the {table.delta} lattice of the renewal table")
            return h.values
        return np.asarray(h, dtype=float)

    @staticmethod
    def key_renewal_convolve(table: RenewalTable, h, n: int) -> Tuple[float, float]:
        """
        (U*h)(n*delta) = sum_k U({k*delta}) h((n-k)*delta) and its limit delta/E tau * sum_k h(k*delta).
        h: lattice HFunction or array of h(k*delta); values past the array end are taken as 0.
        """
        values = KeyRenewal._lattice_values(table, h)
        if n > table.n_max:
            raise RenewalError(f"n={n} is beyond the renewal table 0..{table.n_max}")
        k_lo = max(0, n - len(values) + 1)
        ks = np.arange(k_lo, n + 1)
        conv = math.fsum(table.masses[ks] * values[n - ks])
        limit = float(table.delta) * table.inv_mean * math.fsum(values)
        return conv, limit

    @staticmethod
    def convolution_limit_gap(table: RenewalTable, h, n_grid: Iterable[int]) -> pd.DataFrame:
        """ |(U*h)(n*delta) - limit| along n """
        rows = []
        for n in n_grid:
            conv, limit = KeyRenewal.key_renewal_convolve(table, h, int(n))
            rows.append({"n": int(n), "value": conv, "limit": limit, "gap": abs(conv - limit)})
        return pd.DataFrame(rows, columns=["n", "value", "limit", "gap"])

    @staticmethod
    def _evaluator(h: HLike) -> Callable[[float], float]:
        return h.at if isinstance(h, HFunction) else h

    @staticmethod
    def _integral_from(h: HLike, start: float) -> float:
        """ Integral of h over [start, inf) """
        if isinstance(h, HFunction) and h.is_lattice:
            return KeyRenewal._lattice_integral_from(h, start)
        value, _ = integrate.quad(KeyRenewal._evaluator(h), start, np.inf, limit=200, epsabs=1e-13, epsrel=1e-12)
        return value

    @staticmethod
    def _lattice_integral_from(h: HFunction, start: float) -> float:
        # exp(-eta t) * tails[k] on [k*delta, (k+1)*delta), integrated piecewise in closed form
        delta, eta = float(h.delta), h.eta
        if h.tails[-1] != 0:
            raise RenewalError("Lattice h does not vanish at the end of its table, the integral is unknown")
        total = []
        for k, tail in enumerate(h.tails):
            lo, hi = max(k * delta, start), (k + 1) * delta
            if tail == 0 or hi <= lo:
                continue
            piece = (hi - lo) if eta == 0 else (math.exp(-eta * lo) - math.exp(-eta * hi)) / eta
            total.append(tail * piece)
        return math.fsum(total)

    def dri_check(self, h_family: Sequence[HLike], delta_grid: Iterable[float], n_grid: Iterable[int],
                  horizon: Optional[float] = None, subgrid: int = 8) -> DRIReport:
        """
        Block sums, tail sums over [N, inf) and Riemann gaps of a family of functions on [0, inf).
        Nonnegative nonincreasing families use the bounds h(0) + integral and delta*h(0);
        others are sampled on a subgrid of each block up to the horizon.
        """
        deltas = sorted((float(d) for d in delta_grid), reverse=True)
        ns = sorted(int(n) for n in n_grid)
        horizon = float(horizon) if horizon is not None else 2.0 * max(ns + [1])
        fns = [KeyRenewal._evaluator(h) for h in h_family]
        step = min(deltas) / subgrid
        grid = np.arange(0.0, horizon + step / 2, step)
        samples = [np.array([fn(t) for t in grid]) for fn in fns]
        monotone = all(np.all(s >= 0) and np.all(np.diff(s) <= 1e-15) for s in samples)
        self._logger.info(f"DRI check of {len(fns)} functions, monotone={monotone}")

        if monotone:
            blocks = [math.fsum(fn(float(n)) for n in range(int(math.ceil(horizon)))) for fn in fns]
            bound = max(fn(0.0) + KeyRenewal._integral_from(h, 0.0) for fn, h in zip(fns, h_family))
            tails = [max(fn(float(n)) + KeyRenewal._integral_from(h, float(n)) for fn, h in zip(fns, h_family))
                     for n in ns]
            gaps = [d * max(fn(0.0) for fn in fns) for d in deltas]
        else:
            per_block = [KeyRenewal._block_sups(fn, 1.0, horizon, subgrid) for fn in fns]
            blocks = [math.fsum(sups) for sups in per_block]
            bound = math.nan
            tails = [max(math.fsum(sups[n:]) for sups in per_block) for n in ns]
            gaps = [max(KeyRenewal._riemann_gap(fn, d, horizon, subgrid) for fn in fns) for d in deltas]

        return DRIReport(sup_block_sum=max(blocks),
                         block_sum_bound=bound,
                         tail_index_curve=pd.DataFrame({"N": ns, "tail": tails}),
                         riemann_gap_curve=pd.DataFrame({"delta": deltas, "gap": gaps}),
                         monotone=monotone)

    @staticmethod
    def _block_values(fn, lo: float, width: float, subgrid: int) -> np.ndarray:
        return np.abs([fn(t) for t in lo + width * np.arange(subgrid) / subgrid])

    @staticmethod
    def _block_sups(fn, width: float, horizon: float, subgrid: int) -> list:
        count = int(math.ceil(horizon / width))
        return [float(np.max(KeyRenewal._block_values(fn, n * width, width, subgrid))) for n in range(count)]

    @staticmethod
    def _riemann_gap(fn, delta: float, horizon: float, subgrid: int) -> float:
        count = int(math.ceil(horizon / delta))
        spreads = []
        for k in range(count):
            values = KeyRenewal._block_values(fn, k * delta, delta, subgrid)
            spreads.append(float(np.max(values) - np.min(values)))
        return delta * math.fsum(spreads)
