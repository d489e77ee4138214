import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from law.TauMarginal import TauMarginal
from renewal.LawFamily import LawFamily
from renewal.RenewalError import RenewalError
from renewal.RenewalTable import RenewalTable


@dataclass(frozen=True)
class InequalityReport:
    """ Outcome of U((u, u+v]) <= U([0, v)) on random lattice (u, v); witness is (u, v, lhs, rhs) """
    passed: bool
    trials: int
    witness: Optional[Tuple[int, int, float, float]] = None

    def __bool__(self):
        return self.passed


class RenewalMeasure:
    """ Renewal measure U = sum of all convolution powers of a lattice tau law """

    def __init__(self, fft_threshold: int = 100_000):
        self._logger = logging.getLogger(self.__class__.__name__)
        self.fft_threshold = fft_threshold

    @staticmethod
    def of_config(config: dict) -> "RenewalMeasure":
        return RenewalMeasure(fft_threshold=int(config.get("pyrenewal.renewal.fft.threshold", 100_000)))

    def renewal_table(self, tau_marginal: TauMarginal, delta: Optional[Fraction] = None, n_max: int = 100,
                      method: str = "auto") -> RenewalTable:
        """
        U({n*delta}) for n = 0..n_max, by the forward recursion u_n = sum_k mu({k*delta}) u_{n-k}
        or by FFT power series inversion of 1/(1 - M(z)) for long grids.
        """
        if n_max < 1:
            raise RenewalError(f"n_max must be at least 1, got {n_max}")
        delta = Fraction(delta) if delta is not None else tau_marginal.span
        if delta <= 0:
            raise RenewalError("Renewal table needs a lattice marginal, span is 0")
        masses = tau_marginal.masses_on_lattice(delta, n_max)
        if masses is None:
            raise RenewalError(f"Tau marginal is not supported on the {delta} lattice")
        if masses[0] >= 1:
            raise RenewalError("Tau marginal is concentrated at 0")
        use_fft = method == "fft" or (method == "auto" and n_max > self.fft_threshold)
        self._logger.debug(f"Renewal table delta={delta}, n_max={n_max}, fft={use_fft}")
        values = RenewalMeasure._by_fft(masses) if use_fft else RenewalMeasure._by_recursion(masses)
        return RenewalTable(delta=delta, masses=values, inv_mean=1.0 / tau_marginal.mean)

    @staticmethod
    def _by_recursion(masses: np.ndarray) -> np.ndarray:
        scale = 1.0 / (1.0 - masses[0])
        ks = np.flatnonzero(masses[1:]) + 1
        vals = masses[ks]
        u = np.zeros(len(masses))
        u[0] = scale
        for n in range(1, len(masses)):
            count = np.searchsorted(ks, n, side="right")
            u[n] = scale * math.fsum(vals[:count] * u[n - ks[:count]])
        return u

    @staticmethod
    def _by_fft(masses: np.ndarray) -> np.ndarray:
        f = -masses.copy()
        f[0] = 1.0 - masses[0]
        return np.maximum(RenewalMeasure._series_inverse(f, len(masses)), 0.0)

    @staticmethod
    def _series_inverse(f: np.ndarray, n: int) -> np.ndarray:
        """ g with f*g = 1 mod z^n, Newton iteration g <- g(2 - f g) doubling the precision """
        g = np.array([1.0 / f[0]])
        size = 1
        while size < n:
            size = min(2 * size, n)
            fg = RenewalMeasure._convolve(f[:size], g)[:size]
            correction = RenewalMeasure._convolve(g, fg)[:size]
            doubled = np.zeros(size)
            doubled[:len(g)] = 2.0 * g
            g = doubled - correction
        return g[:n]

    @staticmethod
    def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        length = len(a) + len(b) - 1
        nfft = 1 << (length - 1).bit_length()
        return np.fft.irfft(np.fft.rfft(a, nfft) * np.fft.rfft(b, nfft), nfft)[:length]

    def renewal_inequality_check(self, table: RenewalTable, trials: int = 10_000,
                                 rng: Optional[np.random.Generator] = None,
                                 slack: float = 1e-12) -> InequalityReport:
        """ U((u, u+v]) <= U([0, v)) on random lattice u >= 0, v >= 1 inside the table """
        rng = rng if rng is not None else np.random.default_rng(0)
        n = table.n_max
        cumulative = table.cumulative
        u = rng.integers(0, n, size=trials)
        v = rng.integers(1, n - u + 1)
        # (u, u+v] on the lattice is indices u+1..u+v, [0, v) is 0..v-1
        lhs = cumulative[u + v + 1] - cumulative[u + 1]
        rhs = cumulative[v]
        violated = np.flatnonzero(lhs > rhs + slack * np.maximum(1.0, rhs))
        if violated.size:
            i = violated[0]
            witness = (int(u[i]), int(v[i]), float(lhs[i]), float(rhs[i]))
            self._logger.warning(f"Renewal inequality violated at u={witness[0]}, v={witness[1]}")
            return InequalityReport(False, trials, witness)
        return InequalityReport(True, trials)

    def family_tables(self, family: LawFamily, n_max: int) -> dict:
        return {key: self.renewal_table(marginal, family.constant_span, n_max)
                for key, marginal in family.members.items()}

    def blackwell_gap(self, family: LawFamily, v, u_grid: Iterable) -> pd.DataFrame:
        """ sup over the family of |U([u, u+v)) - v/E tau| for each u """
        v = Fraction(v)
        delta = family.constant_span
        if (v / delta).denominator != 1:
            raise RenewalError(f"Window v={v} is not a multiple of the span {delta}")
        u_values = [Fraction(u) for u in u_grid]
        n_max = max(1, math.ceil((max(u_values) + v) / delta))
        tables = self.family_tables(family, n_max)
        rows = []
        for u in u_values:
            gaps = {key: abs(table.interval_measure(u, v) - float(v) * table.inv_mean) for key, table in tables.items()}
            worst = max(gaps, key=gaps.get)
            rows.append({"u": float(u), "gap": gaps[worst], "member": worst})
        return pd.DataFrame(rows, columns=["u", "gap", "member"])
