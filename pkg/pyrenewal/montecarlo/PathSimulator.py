import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from law.JointLaw import JointLaw
from law.LawTools import LawTools
from tilt.TiltResult import TiltResult


@dataclass(frozen=True, eq=False)
class PathBatch:
    """ S(t) per simulated path and the log likelihood ratio of the path (0 for untilted paths) """
    s: np.ndarray
    log_weight: np.ndarray

    @staticmethod
    def concat(batches) -> "PathBatch":
        batches = list(batches)
        return PathBatch(s=np.concatenate([b.s for b in batches]),
                         log_weight=np.concatenate([b.log_weight for b in batches]))


class PathSimulator:
    """
    Simulation of S(t) = X_1 + ... + X_N(t), N(t) = number of renewals tau_1 + ... + tau_n <= t.
    Samples are split into fixed-size chunks, chunk c drawing from its own Philox substream,
    so the result depends on the seed only and never on the number of workers.
    """

    max_block = 1 << 16

    def __init__(self, chunk_size: int = 4096, threads: int = 1):
        self._logger = logging.getLogger(self.__class__.__name__)
        self.chunk_size = chunk_size
        self.threads = max(1, threads)

    @staticmethod
    def of_config(config: dict) -> "PathSimulator":
        return PathSimulator(chunk_size=int(config.get("pyrenewal.montecarlo.chunk.size", 4096)),
                             threads=int(config.get("pyrenewal.threads", 1)))

    @staticmethod
    def chunk_generator(seed: int, stream: int, chunk: int) -> np.random.Generator:
        """ Independent substream per (seed, stream, chunk), chunks jumped 2^128 draws apart """
        key = np.random.SeedSequence([seed, stream]).generate_state(2, dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key).jumped(chunk))

    def simulate_S(self, law: JointLaw, t: float, rng: np.random.Generator) -> float:
        return float(self._batch(law, t, 1, rng).s[0])

    def sample_paths(self, law: JointLaw, t: float, n_samples: int, seed: int, stream: int = 0,
                     tilt: Optional[TiltResult] = None) -> PathBatch:
        """ n_samples paths, under the tilted pair law when a tilt is given """
        n_chunks = math.ceil(n_samples / self.chunk_size)
        sizes = [min(self.chunk_size, n_samples - c * self.chunk_size) for c in range(n_chunks)]

        def run_chunk(chunk: int) -> PathBatch:
            rng = PathSimulator.chunk_generator(seed, stream, chunk)
            return self._batch(law, t, sizes[chunk], rng, tilt)

        self._logger.debug(f"Simulating {n_samples} paths to t={t} in {n_chunks} chunks on {self.threads} threads")
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            return PathBatch.concat(executor.map(run_chunk, range(n_chunks)))

    def _batch(self, law: JointLaw, t: float, size: int, rng: np.random.Generator,
               tilt: Optional[TiltResult] = None) -> PathBatch:
        if t < 0:
            raise ValueError(f"t must be nonnegative, got {t}")
        if law.is_discrete:
            return PathSimulator._discrete_batch(law, t, size, rng, tilt)
        if tilt is not None and tilt.lam != 0:
            raise ValueError("Tilted path sampling needs a discrete law")
        return PathSimulator._parametric_batch(law, t, size, rng)

    @staticmethod
    def _discrete_batch(law: JointLaw, t: float, size: int, rng: np.random.Generator,
                        tilt: Optional[TiltResult]) -> PathBatch:
        """
        Exact paths on the integer lattice of tau/span. While the remaining time allows k more
        pairs even at the largest tau, those k pairs are drawn at once as multinomial atom counts;
        the last few pairs are drawn one by one until the renewal epoch passes t.
        """
        delta = law.tau_marginal().span
        t = Fraction(str(t)) if isinstance(t, (float, np.floating)) else Fraction(t)
        horizon = math.floor(t / delta)
        units = np.array([int(atom.tau / delta) for atom in law.atoms], dtype=np.int64)
        if tilt is not None and tilt.lam != 0:
            pair_law = tilt.tilted_pair
            log_step = -tilt.lam * law.xs + tilt.eta * law.taus
        else:
            pair_law = law
            log_step = np.zeros(len(law.atoms))
        probs = pair_law.ps / pair_law.ps.sum()
        unit_max = int(units.max())

        counts = np.zeros((size, len(units)), dtype=np.int64)
        elapsed = np.zeros(size, dtype=np.int64)
        straddler = np.zeros(size, dtype=np.int64)
        active = np.ones(size, dtype=bool)
        while active.any():
            idx = np.flatnonzero(active)
            blocks = (horizon - elapsed[idx]) // unit_max
            bulk = blocks > 0
            if bulk.any():
                drawn = rng.multinomial(blocks[bulk], probs)
                counts[idx[bulk]] += drawn
                elapsed[idx[bulk]] += drawn @ units
            single = idx[~bulk]
            if len(single):
                picks = rng.choice(len(units), size=len(single), p=probs)
                crossed = elapsed[single] + units[picks] > horizon
                kept = single[~crossed]
                np.add.at(counts, (kept, picks[~crossed]), 1)
                elapsed[kept] += units[picks[~crossed]]
                straddler[single[crossed]] = picks[crossed]
                active[single[crossed]] = False

        s = counts @ law.xs
        log_weight = counts @ log_step + log_step[straddler]
        return PathBatch(s=s, log_weight=log_weight)

    @staticmethod
    def _parametric_batch(law: JointLaw, t: float, size: int, rng: np.random.Generator) -> PathBatch:
        mean_tau = LawTools.validate(law).mean_tau
        t = float(t)
        s = np.zeros(size)
        for i in range(size):
            elapsed, total = 0.0, 0.0
            while True:
                block = min(PathSimulator.max_block, int(1.25 * (t - elapsed) / mean_tau) + 16)
                taus, xs = LawTools.sample_pairs(law, rng, block)
                ends = elapsed + np.cumsum(taus)
                # First epoch strictly after t
                cross = int(np.searchsorted(ends, t, side="right"))
                if cross < block:
                    total += math.fsum(xs[:cross])
                    break
                total += math.fsum(xs)
                elapsed = float(ends[-1])
            s[i] = total
        return PathBatch(s=s, log_weight=np.zeros(size))
