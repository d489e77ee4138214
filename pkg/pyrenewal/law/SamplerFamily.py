from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class SamplerFamily:
    """
    Parametric pair known only through a sampler. Moments and the integrability conditions
    are declared by the author of the sampler, they are not derived.
    sampler(rng, size) -> (taus, xs)
    """
    sampler: Callable[[np.random.Generator, int], Tuple[np.ndarray, np.ndarray]]
    mean_tau: float
    mean_x: float
    mean_x2: float
    conditions_hold: bool = False
    tau_dist: Optional[object] = None

    name = "custom-sampler"

    def moments(self) -> Tuple[float, float, float]:
        return self.mean_tau, self.mean_x, self.mean_x2

    def tau_distribution(self):
        return self.tau_dist

    def sample(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        taus, xs = self.sampler(rng, size)
        return np.asarray(taus, dtype=float), np.asarray(xs, dtype=float)

    def to_params(self) -> dict:
        return {"mean_tau": self.mean_tau, "mean_x": self.mean_x, "mean_x2": self.mean_x2}
