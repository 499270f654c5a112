"""Component structure of a multigraph and the susceptibility family of statistics."""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from suslab.config_sampler import MultiGraph
from suslab.degree_model import DegreeSequence

MAX_PATH_VERTICES = 1000
MAX_PATH_LENGTH = 6


@dataclass(frozen=True, eq=False)
class ComponentSummary:
    """Components of a graph on ``n`` vertices.

    ``membership[v]`` is the component id of vertex ``v``; ``id_sizes[c]`` is
    the order of component ``c``.  ``largest_id`` is the largest component,
    ties going to the one that holds the highest vertex label.
    """

    n: int
    membership: np.ndarray
    id_sizes: np.ndarray
    largest_id: int

    @property
    def sizes(self) -> np.ndarray:
        return np.sort(self.id_sizes)[::-1]

    @property
    def largest_size(self) -> int:
        return int(self.id_sizes[self.largest_id]) if self.n else 0

    @property
    def spectrum(self) -> dict[int, int]:
        """``k -> N_k``, the number of vertices lying in components of order ``k``."""
        counts = np.bincount(self.id_sizes)
        return {int(k): int(k * counts[k]) for k in np.flatnonzero(counts)}

    def second_size(self) -> int:
        s = self.sizes
        return int(s[1]) if s.size > 1 else 0

    def to_csv(self) -> tuple[str, str]:
        """``component_id,size`` and ``k,N_k`` tables."""
        a = io.StringIO()
        w = csv.writer(a, lineterminator="\n")
        w.writerow(["component_id", "size"])
        w.writerows((i, int(s)) for i, s in enumerate(self.id_sizes))
        b = io.StringIO()
        w = csv.writer(b, lineterminator="\n")
        w.writerow(["k", "N_k"])
        w.writerows(sorted(self.spectrum.items()))
        return a.getvalue(), b.getvalue()


def components(g: MultiGraph) -> ComponentSummary:
    n = g.n
    if n == 0:
        return ComponentSummary(0, np.zeros(0, np.int64), np.zeros(0, np.int64), -1)
    e = g.edges
    adj = coo_matrix((np.ones(e.shape[0], dtype=np.int8), (e[:, 0], e[:, 1])), shape=(n, n))
    ncomp, labels = connected_components(adj, directed=False)
    labels = labels.astype(np.int64)
    id_sizes = np.bincount(labels, minlength=ncomp)
    top_label = np.zeros(ncomp, dtype=np.int64)
    np.maximum.at(top_label, labels, np.arange(n, dtype=np.int64))
    largest = int(np.lexsort((top_label, id_sizes))[-1])
    return ComponentSummary(n, labels, id_sizes, largest)


def _sum_squares(s: ComponentSummary) -> int:
    return sum(int(x) * int(x) for x in s.id_sizes.tolist())


def susceptibility(s: ComponentSummary) -> float:
    """Mean order of the component containing a uniform vertex, ``sum |C_i|^2 / n``."""
    if s.n < 1:
        raise ValueError("empty graph")
    return _sum_squares(s) / s.n


def susceptibility_from_spectrum(s: ComponentSummary) -> float:
    """Same quantity written as ``sum_k k N_k / n``."""
    if s.n < 1:
        raise ValueError("empty graph")
    return sum(k * nk for k, nk in s.spectrum.items()) / s.n


def modified_susceptibility(s: ComponentSummary) -> float:
    """``sum_{i >= 2} |C_i|^2 / n``: the largest component left out."""
    if s.n < 1:
        raise ValueError("empty graph")
    return (_sum_squares(s) - s.largest_size**2) / s.n


def giant_degree_profile(g: MultiGraph, s: ComponentSummary) -> dict[int, int]:
    """Degree census of the largest component, ``k -> v_k(C_1)``."""
    deg = g.degrees()[s.membership == s.largest_id]
    c = np.bincount(deg)
    return {int(k): int(c[k]) for k in np.flatnonzero(c)}


def remove_largest(g: MultiGraph, s: ComponentSummary) -> tuple[MultiGraph, DegreeSequence]:
    """Graph induced on the vertices outside the largest component, relabelled in order."""
    keep = s.membership != s.largest_id
    newlab = np.cumsum(keep) - 1
    e = g.edges[keep[g.edges[:, 0]]]
    residual = MultiGraph(int(keep.sum()), newlab[e])
    return residual, DegreeSequence(g.degrees()[keep])


def _adjacency(g: MultiGraph) -> list[dict[int, int]]:
    adj: list[dict[int, int]] = [defaultdict(int) for _ in range(g.n)]
    for u, v in g.edges.tolist():
        if u != v:
            adj[u][v] += 1
            adj[v][u] += 1
    return adj


def path_counts(g: MultiGraph, ell_max: int) -> list[int]:
    """``[P_0, ..., P_ell_max]``: directed paths by length.

    A path visits distinct vertices along distinct edges, so loops never
    appear and each of ``k`` parallel edges gives its own path.
    """
    if g.n > MAX_PATH_VERTICES or ell_max > MAX_PATH_LENGTH:
        raise ValueError(
            f"exact path counting is limited to n <= {MAX_PATH_VERTICES} and length <= {MAX_PATH_LENGTH}"
        )
    if ell_max < 0:
        raise ValueError("length must be non-negative")
    adj = _adjacency(g)
    counts = [0] * (ell_max + 1)
    counts[0] = g.n
    on_path = [False] * g.n

    def extend(v: int, depth: int, weight: int):
        for w, mult in adj[v].items():
            if on_path[w]:
                continue
            wt = weight * mult
            counts[depth + 1] += wt
            if depth + 1 < ell_max:
                on_path[w] = True
                extend(w, depth + 1, wt)
                on_path[w] = False

    if ell_max >= 1:
        for v in range(g.n):
            on_path[v] = True
            extend(v, 0, 1)
            on_path[v] = False
    return counts


def count_paths(g: MultiGraph, ell: int) -> int:
    return path_counts(g, ell)[ell]
