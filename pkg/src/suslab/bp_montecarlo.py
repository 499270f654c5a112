"""Monte Carlo simulation of the exploration branching process.

The root draws its number of children from the degree law; every later
individual draws from the shifted size-biased law.  Only generation sizes
are tracked.  Nothing here touches the closed-form predictions, so the
estimates serve as an independent check on them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from suslab.config_sampler import SeededRng, as_generator
from suslab.degree_model import Criticality, DegreeDistribution
from suslab.parallel import run_tasks

DEFAULT_CAP = 100_000
BLOCK = 4096
_MULTINOMIAL_SUPPORT = 64
# keeps branching-process streams disjoint from graph-replicate streams
_STREAM_DOMAIN = 0xB7


@dataclass(frozen=True)
class Finite:
    total: int


@dataclass(frozen=True)
class Escaped:
    cap: int


ProgenyOutcome = Finite | Escaped


class OffspringTable:
    """Exact sampler for a law on finitely many non-negative integers."""

    def __init__(self, weights: np.ndarray):
        w = np.asarray(weights, dtype=float)
        support = np.flatnonzero(w)
        if support.size == 0:
            raise ValueError("law has no mass")
        self.values = support.astype(np.int64)
        probs = w[support] / math.fsum(w[support])
        self.probs = probs
        self.cdf = np.cumsum(probs)
        self.cdf[-1] = 1.0

    @property
    def mean(self) -> float:
        return math.fsum(self.values * self.probs)

    def sample(self, gen: np.random.Generator, size=None):
        u = gen.random(size)
        return self.values[np.searchsorted(self.cdf, u, side="right")]

    def sum_of(self, gen: np.random.Generator, counts: np.ndarray) -> np.ndarray:
        """For each entry ``c`` of ``counts``, the sum of ``c`` independent draws."""
        counts = np.asarray(counts, dtype=np.int64)
        if self.values.size == 1:
            return counts * self.values[0]
        if self.values.size <= _MULTINOMIAL_SUPPORT:
            return gen.multinomial(counts, self.probs) @ self.values
        draws = self.sample(gen, int(counts.sum()))
        out = np.zeros(counts.size, dtype=np.int64)
        owner = np.repeat(np.arange(counts.size), counts)
        np.add.at(out, owner, draws)
        return out


def root_table(dist: DegreeDistribution) -> OffspringTable:
    return OffspringTable(dist.p)


def general_table(dist: DegreeDistribution) -> OffspringTable:
    """Sampler for ``P(D* = k) = (k+1) p_{k+1} / mu``."""
    k = np.arange(1, dist.p.size, dtype=float)
    w = k * dist.p[1:]
    if not w.sum() > 0:
        raise ValueError("size-biased law needs positive mean degree")
    return OffspringTable(w)


def sample_root_offspring(dist: DegreeDistribution, rng) -> int:
    return int(root_table(dist).sample(as_generator(rng)))


def sample_general_offspring(dist: DegreeDistribution, rng) -> int:
    return int(general_table(dist).sample(as_generator(rng)))


def progeny_batch(
    root: OffspringTable, general: OffspringTable, reps: int, gen: np.random.Generator, cap: int = DEFAULT_CAP
) -> np.ndarray:
    """Total progeny of ``reps`` independent processes; ``-1`` marks an escape past ``cap``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    z = root.sample(gen, reps).astype(np.int64)
    total = 1 + z
    escaped = total > cap
    active = np.flatnonzero((z > 0) & ~escaped)
    while active.size:
        kids = general.sum_of(gen, z[active])
        z[active] = kids
        total[active] += kids
        escaped[active] = total[active] > cap
        active = active[(kids > 0) & ~escaped[active]]
    total[escaped] = -1
    return total


def total_progeny(dist: DegreeDistribution, rng, cap: int = DEFAULT_CAP) -> ProgenyOutcome:
    """One run of the process: ``Finite(size)`` on extinction, ``Escaped(cap)`` otherwise."""
    t = int(progeny_batch(root_table(dist), general_table(dist), 1, as_generator(rng), cap)[0])
    return Escaped(cap) if t < 0 else Finite(t)


def _block(task):
    dist, seed, index, size, cap = task
    gen = SeededRng(seed, (_STREAM_DOMAIN, index)).generator()
    return progeny_batch(root_table(dist), general_table(dist), size, gen, cap)


def simulate_progeny(
    dist: DegreeDistribution, reps: int, seed: int, cap: int = DEFAULT_CAP, workers: int | None = None
) -> np.ndarray:
    """``reps`` totals (``-1`` = escaped), identical for any worker count.

    Replicates are cut into fixed blocks, each with its own derived stream.
    """
    if reps < 1:
        raise ValueError("reps must be positive")
    tasks = [(dist, seed, i, min(BLOCK, reps - start), cap) for i, start in enumerate(range(0, reps, BLOCK))]
    return np.concatenate(run_tasks(_block, tasks, workers))


@dataclass(frozen=True)
class ChiHatEstimate:
    estimate: float
    stderr: float
    reps: int
    cap: int
    escaped_fraction: float

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "reps": self.reps,
            "cap": self.cap,
            "escaped_fraction": self.escaped_fraction,
        }


def estimate_chi_hat(
    dist: DegreeDistribution, reps: int, seed: int, cap: int = DEFAULT_CAP, workers: int | None = None
) -> ChiHatEstimate:
    """Mean of the total progeny over runs that die out (escapes count as 0)."""
    crit = dist.criticality
    if crit is Criticality.CRITICAL:
        raise ValueError("Monte Carlo modified susceptibility diverges with the cap at criticality")
    totals = simulate_progeny(dist, reps, seed, cap, workers)
    finite = np.where(totals > 0, totals, 0).astype(float)
    esc = float(np.mean(totals < 0))
    if crit is Criticality.SUBCRITICAL and esc > 0:
        warnings.warn(f"{esc:.3g} of subcritical runs escaped cap={cap}; raise the cap", RuntimeWarning)
    se = float(finite.std(ddof=1) / math.sqrt(reps)) if reps > 1 else math.nan
    return ChiHatEstimate(math.fsum(finite) / reps, se, reps, cap, esc)


@dataclass(frozen=True)
class RhoEstimate:
    """Empirical ``P(|X| = k)`` for small ``k`` and the escape (survival) frequency."""

    ks: tuple[int, ...]
    rho: tuple[float, ...]
    stderr: tuple[float, ...]
    rho_inf: float
    rho_inf_stderr: float
    reps: int
    cap: int

    def to_dict(self) -> dict:
        return {
            "rho": {str(k): r for k, r in zip(self.ks, self.rho)},
            "stderr": {str(k): s for k, s in zip(self.ks, self.stderr)},
            "rho_inf": self.rho_inf,
            "rho_inf_stderr": self.rho_inf_stderr,
            "reps": self.reps,
            "cap": self.cap,
        }


def _freq(hits: np.ndarray) -> tuple[float, float]:
    p = float(hits.mean())
    return p, math.sqrt(p * (1 - p) / hits.size)


def estimate_rho(
    dist: DegreeDistribution,
    reps: int,
    seed: int,
    kmax: int = 6,
    cap: int = DEFAULT_CAP,
    workers: int | None = None,
) -> RhoEstimate:
    totals = simulate_progeny(dist, reps, seed, cap, workers)
    ks = tuple(range(1, kmax + 1))
    pairs = [_freq(totals == k) for k in ks]
    r_inf, se_inf = _freq(totals < 0)
    return RhoEstimate(ks, tuple(p for p, _ in pairs), tuple(s for _, s in pairs), r_inf, se_inf, reps, cap)
