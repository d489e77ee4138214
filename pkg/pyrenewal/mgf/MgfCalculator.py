import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from scipy.special import logsumexp

from law.JointLaw import JointLaw
from mgf.MGFSeries import MGFSeries
from mgf.MgfError import MgfError
from renewal.KeyRenewal import KeyRenewal
from renewal.RenewalMeasure import RenewalMeasure
from tilt.TiltResult import TiltResult
from tilt.Tilting import Tilting


class MgfCalculator:
    """
    E exp(lam*S(t)) of a lattice renewal-reward process, by two independent routes:
    the first-renewal recursion m(t) = P(tau > t) + sum_s w_lam(s) m(t - s)
    and the tilted representation exp(eta_lam*t) (U_lam * h_lam)(t).
    Real t is evaluated at the lattice point floor(t/delta)*delta, S(t) being constant in between.
    """

    def __init__(self, tilting: Tilting = None, renewal_measure: RenewalMeasure = None,
                 max_points: int = 1_000_000, threads: int = 1):
        self._logger = logging.getLogger(self.__class__.__name__)
        self.tilting = tilting or Tilting()
        self.renewal_measure = renewal_measure or RenewalMeasure()
        self.max_points = max_points
        self.threads = max(1, threads)

    @staticmethod
    def of_config(config: dict) -> "MgfCalculator":
        return MgfCalculator(tilting=Tilting.of_config(config),
                             renewal_measure=RenewalMeasure.of_config(config),
                             max_points=int(config.get("pyrenewal.mgf.max.points", 1_000_000)),
                             threads=int(config.get("pyrenewal.threads", 1)))

    @staticmethod
    def _span(law: JointLaw) -> Fraction:
        if not law.is_discrete:
            raise MgfError("Lattice MGF needs a discrete law, use Monte Carlo for nonlattice laws")
        return law.tau_marginal().span

    @staticmethod
    def lattice_indices(t_grid: Iterable, delta: Fraction) -> np.ndarray:
        """ floor(t/delta) per grid point """
        indices = []
        for t in t_grid:
            t = Fraction(str(t)) if isinstance(t, (float, np.floating)) else Fraction(t)
            if t < 0:
                raise MgfError(f"t must be nonnegative, got {t}")
            indices.append(math.floor(t / delta))
        return np.array(indices, dtype=np.int64)

    def _check_size(self, n_max: int):
        if n_max + 1 > self.max_points:
            raise MgfError(f"Lattice grid of {n_max + 1} points exceeds the cap of {self.max_points} points")

    @staticmethod
    def recursion_scale(log_w: np.ndarray, ks: np.ndarray) -> float:
        """
        Root c of sum_k w(k) exp(-c*k) = 1, which is eta_lam*delta whenever the tilt exists.
        The root exists for every lattice law, centered or not, and keeps the scaled recursion of order one.
        """
        lo = float(np.max(log_w / ks))
        hi = float(logsumexp(log_w)) / float(ks.min())

        def f(c):
            return logsumexp(log_w - c * ks)

        # f(lo) >= 0 >= f(hi) up to rounding
        if f(lo) <= 0:
            return lo
        if f(hi) >= 0:
            return hi
        return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def log_mgf_direct(self, law: JointLaw, lam: float, t_grid: Iterable, scale: float = None) -> np.ndarray:
        """
        ln E exp(lam*S(t)) by the exact dynamic program on the span lattice.
        The recursion runs on g(n) = exp(-c*n) m(n*delta), c = recursion_scale unless given,
        so that g stays of order one; the scale cancels exactly in the result.
        """
        delta = MgfCalculator._span(law)
        indices = MgfCalculator.lattice_indices(t_grid, delta)
        if len(indices) == 0:
            return np.array([])
        n_max = int(indices.max())
        self._check_size(n_max)
        # log w(k) = ln sum over atoms with tau = k*delta of p*exp(lam*x)
        steps = np.array([int(atom.tau / delta) for atom in law.atoms], dtype=np.int64)
        ks = np.unique(steps)
        log_w = np.array([logsumexp(lam * law.xs[steps == k], b=law.ps[steps == k]) for k in ks])
        if scale is None:
            scale = MgfCalculator.recursion_scale(log_w, ks)
        v = np.exp(log_w - scale * ks)
        tails = law.tau_marginal().tail_on_lattice(delta, n_max)

        g = np.zeros(n_max + 1)
        for n in range(n_max + 1):
            count = np.searchsorted(ks, n, side="right")
            source = math.exp(-scale * n) * tails[n] if tails[n] > 0 else 0.0
            g[n] = math.fsum(np.concatenate(([source], v[:count] * g[n - ks[:count]])))
        return np.log(g[indices]) + scale * indices

    def mgf_direct(self, law: JointLaw, lam: float, t_grid: Iterable) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_mgf_direct(law, lam, t_grid))

    def log_mgf_tilted(self, law: JointLaw, tilt: TiltResult, t_grid: Iterable) -> np.ndarray:
        """ eta*t + ln (U_lam * h_lam)(t), the renewal table built on the tilted tau marginal """
        delta = MgfCalculator._span(law)
        if tilt.tau_marginal is None:
            raise MgfError("Tilted tau marginal is missing, tilt a discrete law")
        indices = MgfCalculator.lattice_indices(t_grid, delta)
        if len(indices) == 0:
            return np.array([])
        n_max = max(1, int(indices.max()))
        table = self.renewal_measure.renewal_table(tilt.tau_marginal, delta=delta, n_max=n_max)
        h = Tilting.h_function(tilt, n_max)
        convs = np.array([KeyRenewal.key_renewal_convolve(table, h, int(n))[0] for n in indices])
        return np.log(convs) + tilt.eta * float(delta) * indices

    def mgf_tilted(self, law: JointLaw, tilt: TiltResult, t_grid: Iterable) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_mgf_tilted(law, tilt, t_grid))

    @staticmethod
    def asymptotic_constant(law: JointLaw, tilt: TiltResult) -> float:
        """ delta / E tau_lam * sum_k h_lam(k*delta), the limit of exp(-eta*t) E exp(lam*S(t)) """
        MgfCalculator._span(law)
        if tilt.tau_marginal is None:
            raise MgfError("Tilted tau marginal is missing, tilt a discrete law")
        k_max = math.ceil(tilt.tau_marginal.max_location / tilt.tau_marginal.span)
        h = Tilting.h_function(tilt, k_max)
        return float(h.delta) / tilt.tau_marginal.mean * math.fsum(h.values)

    def series(self, law: JointLaw, lam: float, t_grid: Sequence) -> MGFSeries:
        """ Both routes, normalization and asymptotic constant for one lam """
        delta = MgfCalculator._span(law)
        tilt = self.tilting.solve_eta(law, lam)
        indices = MgfCalculator.lattice_indices(t_grid, delta)
        log_direct = self.log_mgf_direct(law, lam, t_grid, scale=tilt.eta * float(delta))
        log_tilted = self.log_mgf_tilted(law, tilt, t_grid)
        return MGFSeries(lam=float(lam), eta=tilt.eta, t=indices * float(delta),
                         log_direct=log_direct, log_tilted=log_tilted,
                         limit=MgfCalculator.asymptotic_constant(law, tilt))

    def series_list(self, law: JointLaw, lambda_grid: Iterable[float], t_grid: Sequence) -> List[MGFSeries]:
        """ One series per lam, independent lams computed on the worker pool """
        lams = [float(lam) for lam in lambda_grid]
        t_grid = list(t_grid)
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            result = list(executor.map(lambda lam: self.series(law, lam, t_grid), lams))
        self._logger.info(f"Computed {len(result)} MGF series on {len(t_grid)} grid points")
        return result

    @staticmethod
    def series_frame(series: Iterable[MGFSeries]) -> pd.DataFrame:
        frames = [s.to_frame() for s in series]
        return pd.concat(frames, ignore_index=True) if frames else \
            pd.DataFrame(columns=["lambda", "t", "direct", "tilted", "normalized", "limit"])

    @staticmethod
    def identity_gap(series: MGFSeries) -> float:
        """ Max relative gap between the two routes """
        return float(np.max(series.relative_gaps)) if len(series.t) else 0.0

    @staticmethod
    def rate_fit(series: MGFSeries) -> float:
        """ Slope c of |ln(normalized/limit)| ~ c/t, t > 0 """
        positive = series.t > 0
        if np.count_nonzero(positive) < 2:
            raise MgfError("Rate fit needs at least two positive grid points")
        x = 1.0 / series.t[positive]
        y = np.abs(series.log_normalized[positive] - math.log(series.limit))
        slope, _ = np.polyfit(x, y, 1)
        return float(slope)

    def uniformity_curve(self, law: JointLaw, lambda_grid: Iterable[float], t_grid: Sequence) -> pd.DataFrame:
        """ Per t: sup over lam of |-eta_lam*t + ln E exp(lam*S(t))| and the lam attaining it """
        delta = MgfCalculator._span(law)
        t_grid = list(t_grid)
        lams = [float(lam) for lam in lambda_grid]

        def normalized(lam):
            tilt = self.tilting.solve_eta(law, lam)
            return np.abs(self.log_mgf_direct(law, lam, t_grid, scale=tilt.eta * float(delta))
                          - tilt.eta * float(delta) * MgfCalculator.lattice_indices(t_grid, delta))

        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            stats = np.array(list(executor.map(normalized, lams)))
        best = np.argmax(stats, axis=0)
        return pd.DataFrame({"t": MgfCalculator.lattice_indices(t_grid, delta) * float(delta),
                             "statistic": stats[best, np.arange(len(t_grid))],
                             "lambda": np.array(lams)[best]})

    def uniformity_statistic(self, law: JointLaw, lambda_grid: Iterable[float],
                             t_grid: Sequence) -> Tuple[float, Tuple[float, float]]:
        """ sup over the grids of |-eta_lam*t + ln E exp(lam*S(t))| and its (lam, t) """
        curve = self.uniformity_curve(law, lambda_grid, t_grid)
        row = curve.loc[curve["statistic"].idxmax()]
        return float(row["statistic"]), (float(row["lambda"]), float(row["t"]))
