"""Configuration-model sampling: uniform half-edge matchings and simple graphs by rejection."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from suslab.degree_model import DegreeSequence
from suslab.errors import SamplingExhausted


@dataclass(frozen=True)
class SeededRng:
    """Seed plus replicate stream; the pair fixes the random stream on any worker.

    ``stream_id`` may be a tuple when an experiment nests replicate indices
    (for example one index per ``n`` and one per replicate).
    """

    seed: int
    stream_id: int | tuple[int, ...] = 0

    def generator(self) -> np.random.Generator:
        key = self.stream_id if isinstance(self.stream_id, tuple) else (self.stream_id,)
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key)))

    def child(self, index: int) -> SeededRng:
        key = self.stream_id if isinstance(self.stream_id, tuple) else (self.stream_id,)
        return SeededRng(self.seed, key + (index,))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected SeededRng or numpy Generator, got {type(rng).__name__}")


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Vertices ``0..n-1`` and an edge list with rows ``(u, v)``, ``u <= v``.

    Loops are rows with ``u == v``; parallel edges are repeated rows.
    """

    n: int
    edges: np.ndarray

    def __post_init__(self):
        e = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        e.sort(axis=1)
        if e.size and (e.min() < 0 or e.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def loops(self) -> int:
        return int(np.count_nonzero(self.edges[:, 0] == self.edges[:, 1]))

    @cached_property
    def multi_pairs(self) -> int:
        if self.m == 0:
            return 0
        codes = self.edges[:, 0] * self.n + self.edges[:, 1]
        return self.m - int(np.unique(codes).size)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)

    def __repr__(self):
        return f"MultiGraph(n={self.n}, m={self.m}, loops={self.loops}, multi_pairs={self.multi_pairs})"


@dataclass(frozen=True)
class Simplicity:
    simple: bool
    loops: int
    multi_pairs: int

    def __bool__(self):
        return self.simple


def half_edge_owners(seq: DegreeSequence) -> np.ndarray:
    """Owner vertex of each half-edge, vertex-major."""
    return np.repeat(np.arange(seq.n, dtype=np.int64), seq.degrees)


def sample_matching(seq: DegreeSequence, rng) -> np.ndarray:
    """A uniform perfect matching of the half-edges, as an ``(m, 2)`` array of half-edge indices."""
    gen = as_generator(rng)
    return gen.permutation(2 * seq.m).reshape(-1, 2)


def sample_multigraph(seq: DegreeSequence, rng) -> MultiGraph:
    """One draw of the configuration-model multigraph ``G*(n, d)``."""
    owners = half_edge_owners(seq)
    pairs = sample_matching(seq, rng)
    return MultiGraph(seq.n, owners[pairs])


def is_simple(g: MultiGraph) -> Simplicity:
    return Simplicity(g.loops == 0 and g.multi_pairs == 0, g.loops, g.multi_pairs)


def sample_simple(seq: DegreeSequence, rng, max_attempts: int = 1000) -> tuple[MultiGraph, int]:
    """Uniform simple graph with degrees ``seq`` and the number of attempts used.

    Draws configuration-model multigraphs until one is simple.
    """
    gen = as_generator(rng)
    loops = multi = 0
    for attempt in range(1, max_attempts + 1):
        g = sample_multigraph(seq, gen)
        if g.loops == 0 and g.multi_pairs == 0:
            return g, attempt
        loops += g.loops
        multi += g.multi_pairs
    raise SamplingExhausted(max_attempts, loops, multi)
