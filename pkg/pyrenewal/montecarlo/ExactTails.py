import math

import numpy as np
from scipy import stats
from scipy.special import gammaln, logsumexp


class ExactTails:
    """ Reference values for tail probabilities of S(t) """

    @staticmethod
    def log_rademacher_tail(t: float, x: float) -> float:
        """
        ln P(S(t) > x*sqrt(t)) for tau = 1 and fair +-1 rewards: S(t) = 2H - n with H ~ binomial(n, 1/2),
        n = floor(t), summed in log space over the binomial coefficients.
        """
        n = int(math.floor(t))
        threshold = x * math.sqrt(t)
        h_min = max(0, int(math.floor((n + threshold) / 2.0)) + 1)
        if h_min > n:
            return -math.inf
        h = np.arange(h_min, n + 1)
        log_terms = gammaln(n + 1) - gammaln(h + 1) - gammaln(n - h + 1) - n * math.log(2.0)
        return float(logsumexp(log_terms))

    @staticmethod
    def rademacher_tail(t: float, x: float) -> float:
        return math.exp(ExactTails.log_rademacher_tail(t, x))

    @staticmethod
    def rademacher_rate(t: float, x: float) -> float:
        return -ExactTails.log_rademacher_tail(t, x) / (x * x)

    @staticmethod
    def gaussian_rate(x: float) -> float:
        """ -ln P(Z > x) / x^2 for standard normal Z """
        if x == 0:
            return math.nan
        return float(-stats.norm.logsf(x) / (x * x))

    @staticmethod
    def corrected_reference(x: float) -> float:
        """ 1/2 + ln(x*sqrt(2*pi))/x^2, Mills-ratio correction of the limit rate 1/2 """
        if not x > 0:
            return math.nan
        return 0.5 + math.log(x * math.sqrt(2.0 * math.pi)) / (x * x)
