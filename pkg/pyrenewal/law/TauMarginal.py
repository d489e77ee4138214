import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class TauMarginal:
    """
    Discrete law of the inter-arrival time tau: distinct rational locations with masses summing to 1.
    """
    locations: Tuple[Fraction, ...]
    masses: Tuple[float, ...]

    @staticmethod
    def of(pairs) -> "TauMarginal":
        """ Aggregate (location, mass) pairs by location, sorted ascending """
        by_location = {}
        for location, mass in pairs:
            by_location.setdefault(Fraction(location), []).append(mass)
        locations = tuple(sorted(by_location))
        masses = tuple(TauMarginal._total(by_location[loc]) for loc in locations)
        return TauMarginal(locations, masses)

    @staticmethod
    def _total(masses) -> float:
        if all(isinstance(m, Fraction) for m in masses):
            return float(sum(masses, Fraction(0)))
        return math.fsum(float(m) for m in masses)

    @cached_property
    def span(self) -> Fraction:
        """ Largest delta with all locations on {delta, 2delta, ...} """
        positive = [loc for loc, mass in zip(self.locations, self.masses) if mass > 0]
        return reduce(TauMarginal.rational_gcd, positive, Fraction(0))

    @staticmethod
    def rational_gcd(a: Fraction, b: Fraction) -> Fraction:
        a, b = Fraction(a), Fraction(b)
        if a == 0:
            return abs(b)
        if b == 0:
            return abs(a)
        return Fraction(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
                        a.denominator * b.denominator)

    @cached_property
    def mean(self) -> float:
        return math.fsum(float(loc) * mass for loc, mass in zip(self.locations, self.masses))

    def lattice_indices(self, delta: Fraction) -> Optional[np.ndarray]:
        """ Integer multiples k with location = k*delta, None if some location is off the delta grid """
        delta = Fraction(delta)
        if delta <= 0:
            return None
        ratios = [loc / delta for loc in self.locations]
        if any(r.denominator != 1 for r in ratios):
            return None
        return np.array([int(r) for r in ratios], dtype=np.int64)

    def masses_on_lattice(self, delta: Fraction, n_max: int) -> Optional[np.ndarray]:
        """ Dense mass vector m[k] = mu({k*delta}), k = 0..n_max. Mass beyond n_max is dropped. """
        indices = self.lattice_indices(delta)
        if indices is None:
            return None
        dense = np.zeros(n_max + 1)
        for k, mass in zip(indices, self.masses):
            if k <= n_max:
                dense[k] += mass
        return dense

    def cdf(self, t) -> float:
        """ mu([0, t]), locations compared exactly """
        t = Fraction(t)
        return math.fsum(mass for loc, mass in zip(self.locations, self.masses) if loc <= t)

    def cdf_left(self, t) -> float:
        """ mu([0, t)) """
        t = Fraction(t)
        return math.fsum(mass for loc, mass in zip(self.locations, self.masses) if loc < t)

    def tail(self, t: float) -> float:
        """ mu((t, inf)) """
        return math.fsum(mass for loc, mass in zip(self.locations, self.masses) if float(loc) > t)

    def tail_on_lattice(self, delta: Fraction, k_max: int) -> np.ndarray:
        """ Exact lattice tails mu((k*delta, inf)) for k = 0..k_max, compared in rationals """
        delta = Fraction(delta)
        tails = np.zeros(k_max + 1)
        # Zero from the last location on
        last = min(k_max, math.floor(self.max_location / delta))
        for k in range(last + 1):
            if k * delta < self.min_location:
                # Whole probability lies beyond k*delta
                tails[k] = 1.0
                continue
            tails[k] = math.fsum(mass for loc, mass in zip(self.locations, self.masses) if loc > k * delta)
        return tails

    @cached_property
    def max_location(self) -> Fraction:
        return max(self.locations)

    @cached_property
    def min_location(self) -> Fraction:
        return min(self.locations)
