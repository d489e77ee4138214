import math
from dataclasses import asdict, dataclass
from enum import Enum


class TailMethod(str, Enum):
    naive = "naive"
    tilted = "tilted"


@dataclass(frozen=True)
class TailEstimate:
    """ Estimate of P(S(t) > x*sqrt(t)) and the rate -ln(p_hat)/x^2 """
    t: float
    x: float
    p_hat: float
    std_err: float
    n_samples: int
    method: TailMethod
    lam: float = 0.0

    @property
    def rate(self) -> float:
        if self.p_hat <= 0:
            return math.inf
        return -math.log(self.p_hat) / (self.x * self.x)

    @property
    def rate_std_err(self) -> float:
        """ Delta method: std_err / (p_hat * x^2) """
        if self.p_hat <= 0:
            return math.inf
        return self.std_err / (self.p_hat * self.x * self.x)

    @property
    def relative_std_err(self) -> float:
        return self.std_err / self.p_hat if self.p_hat > 0 else math.inf

    def to_dict(self) -> dict:
        out = asdict(self)
        out["method"] = self.method.value
        out["rate"] = self.rate
        return out
