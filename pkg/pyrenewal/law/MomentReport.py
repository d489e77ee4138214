from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class MomentReport:
    """
    Moments of a joint law and the integrability flags the deviation estimates rely on.
    finite_mean_tau: E tau < inf
    exp_square_moment: E exp(eps X^2 - tau) < inf for some eps > 0
    exp_linear_moment: E exp(lambda X - eps tau) < inf for all lambda, eps > 0
    The last two are analytic flags, automatically true for finite support.
    """
    mean_tau: float
    mean_x: float
    var_x: float
    mean_x2: float
    standardized: bool
    finite_mean_tau: bool
    exp_square_moment: bool
    exp_linear_moment: bool
    exact: bool
    epsilon_note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)
