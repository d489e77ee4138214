from dataclasses import dataclass

import numpy as np
import pandas as pd


@dataclass(frozen=True, eq=False)
class MGFSeries:
    """
    E exp(lam*S(t)) on lattice points t, computed by the renewal recursion (direct)
    and by exp(eta*t) (U_lam * h_lam)(t) (tilted). Values are kept as logarithms.
    """
    lam: float
    eta: float
    t: np.ndarray
    log_direct: np.ndarray
    log_tilted: np.ndarray
    limit: float

    @property
    def direct(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_direct)

    @property
    def tilted(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_tilted)

    @property
    def log_normalized(self) -> np.ndarray:
        """ -eta*t + ln E exp(lam*S(t)) """
        return self.log_direct - self.eta * self.t

    @property
    def normalized(self) -> np.ndarray:
        return np.exp(self.log_normalized)

    @property
    def relative_gaps(self) -> np.ndarray:
        """ |direct - tilted| / direct """
        return np.abs(np.expm1(self.log_tilted - self.log_direct))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"lambda": np.full(len(self.t), self.lam),
                             "t": self.t,
                             "direct": self.direct,
                             "tilted": self.tilted,
                             "normalized": self.normalized,
                             "limit": np.full(len(self.t), self.limit)})
