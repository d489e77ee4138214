import logging
import math
from typing import Iterable, Sequence, Tuple

import numpy as np
import pandas as pd

from law.JointLaw import JointLaw
from law.LawTools import LawTools
from montecarlo.ExactTails import ExactTails
from montecarlo.PathSimulator import PathSimulator
from montecarlo.TailEstimate import TailEstimate, TailMethod
from tilt.TiltError import TiltError
from tilt.Tilting import Tilting


class TailEstimator:
    """
    Estimators of P(S(t) > x*sqrt(t)): the empirical frequency, and importance sampling
    under the pair law tilted to drift x/sqrt(t). Every estimate is reproducible from its seed.
    """

    columns = ["t", "x", "method", "p_hat", "std_err", "rate", "reference", "rate_std_err",
               "gaussian_reference", "n_samples", "lambda"]

    def __init__(self, simulator: PathSimulator = None, tilting: Tilting = None):
        self._logger = logging.getLogger(self.__class__.__name__)
        self.simulator = simulator or PathSimulator()
        self.tilting = tilting or Tilting()

    @staticmethod
    def of_config(config: dict) -> "TailEstimator":
        return TailEstimator(simulator=PathSimulator.of_config(config), tilting=Tilting.of_config(config))

    @staticmethod
    def _require_samples(n_samples: int):
        if n_samples < 1:
            raise ValueError(f"n_samples must be at least 1, got {n_samples}")

    def tail_naive(self, law: JointLaw, t: float, x: float, n_samples: int, seed: int,
                   stream: int = 0) -> TailEstimate:
        """ Frequency of S(t) > x*sqrt(t) with the binomial standard error """
        TailEstimator._require_samples(n_samples)
        batch = self.simulator.sample_paths(law, t, n_samples, seed, stream)
        p_hat = float(np.mean(batch.s > x * math.sqrt(t)))
        std_err = math.sqrt(p_hat * (1.0 - p_hat) / n_samples)
        self._logger.info(f"Naive t={t}, x={x}: p_hat={p_hat}, std_err={std_err}")
        return TailEstimate(t=float(t), x=float(x), p_hat=p_hat, std_err=std_err, n_samples=n_samples,
                            method=TailMethod.naive)

    def tail_tilted(self, law: JointLaw, t: float, x: float, n_samples: int, seed: int,
                    stream: int = 1) -> TailEstimate:
        """
        Importance sampling: every pair, the one straddling t included, is drawn from the tilted law
        with tilted drift x/sqrt(t) and weighted by exp(-lam*X + eta*tau). Needs a discrete law and x > 0.
        """
        TailEstimator._require_samples(n_samples)
        if not x > 0:
            raise TiltError(f"Tilted estimator needs x > 0, got {x}")
        if not law.is_discrete:
            raise TiltError("Tilted estimator needs a discrete law")
        if not LawTools.validate(law).standardized:
            self._logger.warning("Law is not standardized, the tilted estimator targets a shifted threshold")
        tilt = self.tilting.solve_drift(law, x / math.sqrt(t))
        batch = self.simulator.sample_paths(law, t, n_samples, seed, stream, tilt=tilt)
        values = np.where(batch.s > x * math.sqrt(t), np.exp(batch.log_weight), 0.0)
        p_hat = float(np.mean(values))
        std_err = float(np.std(values, ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
        self._logger.info(f"Tilted t={t}, x={x}, lam={tilt.lam}: p_hat={p_hat}, std_err={std_err}")
        return TailEstimate(t=float(t), x=float(x), p_hat=p_hat, std_err=std_err, n_samples=n_samples,
                            method=TailMethod.tilted, lam=tilt.lam)

    def mdp_rate_scan(self, law: JointLaw, schedule: Sequence[Tuple[float, float]], n_samples: int, seed: int,
                      methods: Iterable[str] = ("tilted",)) -> pd.DataFrame:
        """ Rate -ln(p_hat)/x^2 along a schedule of (t, x) with x growing and x/sqrt(t) shrinking """
        schedule = [(float(t), float(x)) for t, x in schedule]
        TailEstimator.check_schedule(schedule, self._logger)
        methods = [TailMethod(method) for method in methods]
        rows = []
        for i, (t, x) in enumerate(schedule):
            for method in methods:
                if method == TailMethod.naive:
                    estimate = self.tail_naive(law, t, x, n_samples, seed, stream=2 * i)
                else:
                    estimate = self.tail_tilted(law, t, x, n_samples, seed, stream=2 * i + 1)
                rows.append(TailEstimator.row_of(estimate))
        return pd.DataFrame(rows, columns=TailEstimator.columns)

    @staticmethod
    def check_schedule(schedule: Sequence[Tuple[float, float]], logger: logging.Logger) -> bool:
        xs = [x for _, x in schedule]
        drifts = [x / math.sqrt(t) for t, x in schedule]
        ok = all(a < b for a, b in zip(xs, xs[1:])) and all(a > b for a, b in zip(drifts, drifts[1:]))
        if not ok:
            logger.warning(f"Schedule {schedule} does not have x increasing and x/sqrt(t) decreasing")
        return ok

    @staticmethod
    def row_of(estimate: TailEstimate) -> dict:
        return {"t": estimate.t, "x": estimate.x, "method": estimate.method.value,
                "p_hat": estimate.p_hat, "std_err": estimate.std_err, "rate": estimate.rate,
                "reference": ExactTails.corrected_reference(estimate.x),
                "rate_std_err": estimate.rate_std_err,
                "gaussian_reference": ExactTails.gaussian_rate(estimate.x),
                "n_samples": estimate.n_samples, "lambda": estimate.lam}
