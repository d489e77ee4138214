from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable

from law.TauMarginal import TauMarginal
from renewal.RenewalError import RenewalError
from tilt.TiltResult import TiltResult


@dataclass(frozen=True)
class LawFamily:
    """ Tau marginals sharing one span, keyed by a parameter such as the tilt lam """
    members: Dict[float, TauMarginal]
    constant_span: Fraction

    @staticmethod
    def of_marginals(members: Dict[float, TauMarginal]) -> "LawFamily":
        if not members:
            raise RenewalError("Family needs at least one member")
        spans = {key: marginal.span for key, marginal in members.items()}
        if len(set(spans.values())) != 1:
            raise RenewalError(f"Family members have mixed spans: {({k: str(s) for k, s in spans.items()})}")
        span = next(iter(spans.values()))
        if span == 0:
            raise RenewalError("Family of non-lattice marginals")
        return LawFamily(dict(members), span)

    @staticmethod
    def of_tilts(tilts: Iterable[TiltResult]) -> "LawFamily":
        """ {mu_lam} for the solved tilts; tilting keeps the tau support, so the span is shared """
        members = {}
        for tilt in tilts:
            if tilt.tau_marginal is None:
                raise RenewalError(f"Tilt lam={tilt.lam} has no lattice tau marginal")
            members[tilt.lam] = tilt.tau_marginal
        return LawFamily.of_marginals(members)
