import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, Tuple

import numpy as np
from scipy import integrate, stats
from scipy.special import gammaln

from law.LawError import LawError


@dataclass(frozen=True)
class ScaledSqrtFamily:
    """
    Parametric pair X = a*sqrt(tau) + b with tau drawn from a named positive law.
    Supported tau laws and their parameters:
        exponential: rate
        gamma: shape, scale
        uniform: low, high
        lognormal: sigma, scale
    """
    a: float
    b: float
    tau_law: str
    tau_params: Tuple[Tuple[str, float], ...]

    name = "scaled-sqrt"
    required_params = {"exponential": ("rate",),
                       "gamma": ("shape", "scale"),
                       "uniform": ("low", "high"),
                       "lognormal": ("sigma", "scale")}

    # Conditions E tau < inf and E exp(eps X^2 - tau) < inf hold for every member:
    # X^2 <= 2a^2 tau + 2b^2, so any eps < 1/(2a^2) works.
    conditions_hold = True

    def __post_init__(self):
        if self.tau_law not in self.required_params:
            raise LawError(f"Unknown tau law {self.tau_law}, expected one of {list(self.required_params)}")
        missing = [key for key in self.required_params[self.tau_law] if key not in self.params]
        if missing:
            raise LawError(f"Tau law {self.tau_law} misses parameters {missing}")
        if any(self.params[key] <= 0 for key in self.required_params[self.tau_law] if key != "low"):
            raise LawError(f"Tau law {self.tau_law} parameters must be positive: {self.params}")
        if self.tau_law == "uniform" and not 0 <= self.params["low"] < self.params["high"]:
            raise LawError(f"Uniform tau law needs 0 <= low < high: {self.params}")

    @staticmethod
    def of(a: float, b: float, tau_law: str, **tau_params) -> "ScaledSqrtFamily":
        return ScaledSqrtFamily(float(a), float(b), tau_law,
                                tuple(sorted((key, float(val)) for key, val in tau_params.items())))

    @property
    def params(self) -> Dict[str, float]:
        return dict(self.tau_params)

    def tau_distribution(self):
        """ Frozen scipy distribution of tau, provides cdf/sf/rvs """
        p = self.params
        if self.tau_law == "exponential":
            return stats.expon(scale=1.0 / p["rate"])
        if self.tau_law == "gamma":
            return stats.gamma(p["shape"], scale=p["scale"])
        if self.tau_law == "uniform":
            return stats.uniform(loc=p["low"], scale=p["high"] - p["low"])
        return stats.lognorm(p["sigma"], scale=p["scale"])

    def tau_pdf(self, tau: float) -> float:
        """ Density of tau at a scalar point, plain math to keep quadrature cheap """
        p = self.params
        if tau <= 0:
            return 0.0
        if self.tau_law == "exponential":
            return p["rate"] * math.exp(-p["rate"] * tau)
        if self.tau_law == "gamma":
            shape, scale = p["shape"], p["scale"]
            return math.exp((shape - 1) * math.log(tau) - tau / scale - gammaln(shape) - shape * math.log(scale))
        if self.tau_law == "uniform":
            return 1.0 / (p["high"] - p["low"]) if p["low"] <= tau <= p["high"] else 0.0
        sigma = p["sigma"]
        return math.exp(-math.log(tau / p["scale"]) ** 2 / (2 * sigma ** 2)) / (tau * sigma * math.sqrt(2 * math.pi))

    def tau_moment(self, power: float) -> float:
        """ E tau^power, closed form where the law has one """
        p = self.params
        if self.tau_law in ("exponential", "gamma"):
            shape = p.get("shape", 1.0)
            scale = p["scale"] if "scale" in p else 1.0 / p["rate"]
            return scale ** power * math.exp(gammaln(shape + power) - gammaln(shape))
        if self.tau_law == "uniform":
            low, high = p["low"], p["high"]
            return (high ** (power + 1) - low ** (power + 1)) / ((power + 1) * (high - low))
        return p["scale"] ** power * math.exp(0.5 * (power * p["sigma"]) ** 2)

    def moments(self) -> Tuple[float, float, float]:
        """ E tau, E X, E X^2 """
        mean_tau, mean_sqrt = self.tau_moment(1.0), self.tau_moment(0.5)
        mean_x = self.a * mean_sqrt + self.b
        mean_x2 = self.a ** 2 * mean_tau + 2 * self.a * self.b * mean_sqrt + self.b ** 2
        return mean_tau, mean_x, mean_x2

    def rescaled(self, tau_divisor: float, a: float, b: float) -> "ScaledSqrtFamily":
        """ Same family with tau replaced by tau/tau_divisor and new reward coefficients """
        p = self.params
        if self.tau_law == "exponential":
            p["rate"] *= tau_divisor
        elif self.tau_law == "uniform":
            p["low"] /= tau_divisor
            p["high"] /= tau_divisor
        else:
            p["scale"] /= tau_divisor
        return replace(self, a=float(a), b=float(b), tau_params=tuple(sorted(p.items())))

    def expect(self, fn: Callable[[float, float], float], lower_tau: float = 0.0) -> float:
        """
        E[fn(tau, X); tau > lower_tau] by quadrature in s = sqrt(tau), where X = a*s + b is linear.
        """
        dist = self.tau_distribution()
        lo, hi = dist.support()
        s_lo = math.sqrt(max(lo, lower_tau, 0.0))
        s_hi = math.sqrt(hi) if np.isfinite(hi) else np.inf
        if s_lo >= s_hi:
            return 0.0

        def integrand(s):
            tau = s * s
            density = self.tau_pdf(tau)
            return fn(tau, self.a * s + self.b) * density * 2.0 * s if density > 0 else 0.0

        value, _ = integrate.quad(integrand, s_lo, s_hi, epsabs=1e-15, epsrel=1e-13, limit=500)
        return value

    def sample(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        taus = np.asarray(self.tau_distribution().rvs(size=size, random_state=rng), dtype=float)
        return taus, self.a * np.sqrt(taus) + self.b

    def to_params(self) -> dict:
        return {"a": self.a, "b": self.b, "tau_law": self.tau_law, **self.params}
