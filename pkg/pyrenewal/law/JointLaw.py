from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from law.LawError import LawError
from law.TauMarginal import TauMarginal


class LawKind(str, Enum):
    discrete = "discrete"
    parametric = "parametric"


@dataclass(frozen=True)
class Atom:
    """ One point (tau, x) of a discrete joint law with its probability p """
    tau: Fraction
    x: Fraction
    p: Fraction


@dataclass(frozen=True)
class JointLaw:
    """
    Joint law of the inter-arrival/reward pair (tau, X).
    Discrete kind: finite atom list with rational tau locations.
    Parametric kind: a family descriptor (ScaledSqrtFamily or SamplerFamily).
    Immutable, safe to share between threads.
    """
    kind: LawKind
    atoms: Tuple[Atom, ...] = ()
    family: Optional[object] = None

    def __post_init__(self):
        if self.kind == LawKind.discrete and not self.atoms:
            raise LawError("Discrete law needs at least one atom")
        if self.kind == LawKind.parametric and self.family is None:
            raise LawError("Parametric law needs a family")

    @staticmethod
    def discrete(atoms: Iterable[Tuple[Union[Fraction, int, str, float], ...]]) -> "JointLaw":
        """ Build from (tau, x, p) triples. Rationals stay exact, floats are taken at their binary value. """
        return JointLaw(LawKind.discrete, tuple(Atom(JointLaw.rational(tau), JointLaw.rational(x),
                                                     JointLaw.rational(p)) for tau, x, p in atoms))

    @staticmethod
    def parametric(family) -> "JointLaw":
        return JointLaw(LawKind.parametric, family=family)

    @staticmethod
    def rational(value) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, str):
            try:
                return Fraction(value.strip())
            except (ValueError, ZeroDivisionError) as e:
                raise LawError(f"Malformed rational {value!r}") from e
        if isinstance(value, (float, np.floating)) and not np.isfinite(value):
            raise LawError(f"Non-finite number {value!r}")
        return Fraction(value)

    @property
    def is_discrete(self) -> bool:
        return self.kind == LawKind.discrete

    @cached_property
    def taus(self) -> np.ndarray:
        return np.array([float(atom.tau) for atom in self.atoms])

    @cached_property
    def xs(self) -> np.ndarray:
        return np.array([float(atom.x) for atom in self.atoms])

    @cached_property
    def ps(self) -> np.ndarray:
        return np.array([float(atom.p) for atom in self.atoms])

    def tau_marginal(self) -> TauMarginal:
        if not self.is_discrete:
            raise LawError("Tau marginal as atom list exists only for discrete laws")
        return TauMarginal.of((atom.tau, atom.p) for atom in self.atoms)

    def to_dict(self) -> dict:
        """ Law file representation, the inverse of LawReader.from_dict """
        if self.is_discrete:
            return {"kind": self.kind.value,
                    "atoms": [{"tau": str(atom.tau), "x": JointLaw._number(atom.x), "p": JointLaw._number(atom.p)}
                              for atom in self.atoms]}
        return {"kind": self.kind.value, "family": self.family.name, "params": self.family.to_params()}

    @staticmethod
    def _number(value: Fraction):
        # Keep exact rationals exact, binary floats as floats
        if value.denominator & (value.denominator - 1) == 0 and value.denominator > 2 ** 20:
            return float(value)
        return str(value) if value.denominator != 1 else int(value)

    def __str__(self):
        if self.is_discrete:
            atoms = ", ".join(f"(tau={atom.tau}, x={float(atom.x):.6g}, p={float(atom.p):.6g})" for atom in self.atoms)
            return f"discrete law [{atoms}]"
        return f"parametric law {self.family.name} {self.family.to_params()}"
