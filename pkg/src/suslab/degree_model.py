"""Degree distributions, finite degree sequences and criticality classes."""

from __future__ import annotations

import enum
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from suslab.errors import ParityError, TruncationError

NORMALIZATION_TOL = 1e-12
CRITICAL_TOL = 1e-12
TAIL_TOL = 1e-10
AUTO_KMAX_LIMIT = 10**7

_BLOCK = 4096


def compensated_sum(terms) -> float:
    """Sum an array accurately, largest index first.

    Small arrays go straight through ``math.fsum``.  Long arrays are reduced
    blockwise (pairwise summation inside each block) and the block totals
    are then combined with ``math.fsum``.
    """
    a = np.asarray(terms, dtype=float)[::-1]
    if a.size <= 8 * _BLOCK:
        return math.fsum(a)
    pad = (-a.size) % _BLOCK
    if pad:
        a = np.concatenate([a, np.zeros(pad)])
    return math.fsum(a.reshape(-1, _BLOCK).sum(axis=1))


class Criticality(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


def classify(mu: float, nu: float, tol: float = CRITICAL_TOL) -> Criticality:
    """Criticality from the sign of ``nu - mu``."""
    if not mu > 0:
        raise ValueError(f"mean degree must be positive, got {mu}")
    diff = nu - mu
    if abs(diff) <= tol:
        return Criticality.CRITICAL
    return Criticality.SUPERCRITICAL if diff > 0 else Criticality.SUBCRITICAL


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """A probability law on degrees 0..kmax stored densely.

    ``p[k]`` is the probability of degree ``k``.  Laws with infinite support
    are held in truncated form; ``discarded_k2_mass`` records the part of
    ``sum k^2 p_k`` that the truncation dropped (before renormalization).
    """

    p: np.ndarray
    tail_spec: dict = field(default_factory=lambda: {"type": "explicit"})
    renormalized: bool = False
    discarded_k2_mass: float = 0.0

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must be a non-empty 1-d array")
        if np.any(~np.isfinite(p)) or np.any(p < 0):
            raise ValueError("probabilities must be finite and non-negative")
        total = compensated_sum(p)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        nz = np.flatnonzero(p)
        p = p[: nz[-1] + 1]
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def explicit(cls, probs: Mapping[int, float], normalize: bool = False) -> DegreeDistribution:
        if not probs:
            raise ValueError("empty distribution")
        kmax = max(int(k) for k in probs)
        if min(int(k) for k in probs) < 0:
            raise ValueError("degrees must be non-negative")
        p = np.zeros(kmax + 1)
        for k, v in probs.items():
            p[int(k)] += float(v)
        if normalize:
            p = p / compensated_sum(p)
        return cls(p, {"type": "explicit"})

    @property
    def kmax(self) -> int:
        return self.p.size - 1

    @property
    def probs(self) -> dict[int, float]:
        return {int(k): float(self.p[k]) for k in np.flatnonzero(self.p)}

    def __getitem__(self, k: int) -> float:
        return float(self.p[k]) if 0 <= k < self.p.size else 0.0

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.arange(self.p.size, dtype=float)

    @cached_property
    def mu(self) -> float:
        return compensated_sum(self.degrees * self.p)

    @cached_property
    def nu(self) -> float:
        k = self.degrees
        return compensated_sum(k * (k - 1) * self.p)

    @property
    def criticality(self) -> Criticality:
        return classify(self.mu, self.nu)

    def __repr__(self):
        kind = self.tail_spec.get("type", "explicit")
        if self.p.size <= 12:
            return f"DegreeDistribution({self.probs}, type={kind!r})"
        return f"DegreeDistribution(type={kind!r}, kmax={self.kmax}, mu={self.mu:.6g}, nu={self.nu:.6g})"


def _tail_law(weight, kmin, kmax, p1_floor, spec):
    """Build a law with weights ``weight(k)`` on kmin..kmax plus a degree-1 atom."""
    if not 0 <= p1_floor < 1:
        raise ValueError("p1_floor must lie in [0, 1)")
    if kmin < 1:
        raise ValueError("kmin must be at least 1")
    if kmax is None:
        kmax, discarded = _auto_kmax(weight, kmin)
    else:
        if kmax < kmin:
            raise ValueError("kmax must be >= kmin")
        discarded = _tail_k2_estimate(weight, kmax)
    k = np.arange(kmin, kmax + 1, dtype=float)
    w = weight(k)
    norm = compensated_sum(w)
    p = np.zeros(kmax + 1)
    p[kmin:] = (1.0 - p1_floor) * w / norm
    p[1] += p1_floor
    p /= compensated_sum(p)
    spec = dict(spec, kmin=kmin, kmax=kmax, p1_floor=p1_floor)
    return DegreeDistribution(
        p, spec, renormalized=True, discarded_k2_mass=(1.0 - p1_floor) * discarded / norm
    )


def _tail_k2_estimate(weight, kmax):
    # integral estimate of sum_{k > kmax} k^2 w(k), integrand decays at least like 1/k
    upper = float(kmax) * 1e6
    x = np.geomspace(kmax + 0.5, upper, 4001)
    y = x**2 * weight(x)
    return float(np.trapezoid(y, x)) if hasattr(np, "trapezoid") else float(np.trapz(y, x))


def _auto_kmax(weight, kmin):
    kmax = max(64, 2 * kmin)
    while kmax <= AUTO_KMAX_LIMIT:
        head = compensated_sum(weight(np.arange(kmin, kmax + 1, dtype=float)))
        discarded = _tail_k2_estimate(weight, kmax)
        if discarded / head < TAIL_TOL:
            return kmax, discarded
        kmax *= 4
    raise TruncationError(
        f"k^2 p_k tail mass does not drop below {TAIL_TOL:g} before kmax={AUTO_KMAX_LIMIT}; "
        "pass an explicit kmax to use the truncated law"
    )


def power_tail(alpha: float, kmin: int = 2, kmax: int | None = 10**6, p1_floor: float = 0.1) -> DegreeDistribution:
    """Weights ``k^(-3-alpha)`` for ``k >= kmin`` plus a degree-1 atom."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return _tail_law(lambda k: k ** (-3.0 - alpha), kmin, kmax, p1_floor, {"type": "power_tail", "alpha": alpha})


def power_log_tail(alpha: float, kmin: int = 2, kmax: int | None = 10**6, p1_floor: float = 0.1) -> DegreeDistribution:
    """Weights ``k^-3 (log k)^-alpha`` for ``k >= kmin`` plus a degree-1 atom."""
    if kmin < 2:
        raise ValueError("log tail needs kmin >= 2")
    return _tail_law(
        lambda k: k**-3.0 * np.log(k) ** -alpha, kmin, kmax, p1_floor, {"type": "power_log_tail", "alpha": alpha}
    )


def power_loglog_tail(kmin: int = 16, kmax: int | None = 10**6, p1_floor: float = 0.1) -> DegreeDistribution:
    """Weights ``k^-3 (log k)^-1 (log log k)^-2`` for ``k >= kmin``."""
    if kmin < 3:
        raise ValueError("log-log tail needs kmin >= 3")
    return _tail_law(
        lambda k: k**-3.0 / np.log(k) / np.log(np.log(k)) ** 2,
        kmin,
        kmax,
        p1_floor,
        {"type": "power_loglog_tail"},
    )


def dist_moments(dist: DegreeDistribution, tol: float | None = TAIL_TOL) -> tuple[float, float]:
    """``(mu, nu)`` of a law.

    Raises TruncationError when the law was cut at kmax and the discarded
    ``k^2 p_k`` mass exceeds ``tol``; pass ``tol=None`` to accept the
    truncated law as it stands.
    """
    if tol is not None and dist.discarded_k2_mass > tol:
        raise TruncationError(
            f"discarded k^2 p_k mass {dist.discarded_k2_mass:.3g} beyond kmax={dist.kmax} exceeds {tol:g}"
        )
    return dist.mu, dist.nu


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    """Degrees ``d_1..d_n`` of a concrete vertex set (index ``i`` is label ``i+1``)."""

    degrees: np.ndarray

    def __post_init__(self):
        d = np.array(self.degrees, dtype=np.int64).ravel()
        if np.any(d < 0):
            raise ValueError("degrees must be non-negative")
        total = int(d.sum())
        if total % 2:
            raise ParityError(f"total degree {total} is odd")
        d.setflags(write=False)
        object.__setattr__(self, "degrees", d)

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> DegreeSequence:
        """Vertices in nondecreasing degree order, ``counts[k]`` of degree ``k``."""
        if any(int(c) < 0 for c in counts.values()):
            raise ValueError("counts must be non-negative")
        if sum(int(c) for c in counts.values()) <= 0:
            raise ValueError("sequence must contain at least one vertex")
        ks = sorted(int(k) for k in counts)
        return cls(np.repeat(np.array(ks, dtype=np.int64), [int(counts[k]) for k in ks]))

    @property
    def n(self) -> int:
        return int(self.degrees.size)

    @property
    def m(self) -> int:
        return int(self.degrees.sum()) // 2

    @property
    def counts(self) -> dict[int, int]:
        c = np.bincount(self.degrees) if self.n else np.zeros(0, dtype=np.int64)
        return {int(k): int(c[k]) for k in np.flatnonzero(c)}

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"DegreeSequence(n={self.n}, m={self.m}, counts={self.counts})"


def moments(seq: DegreeSequence) -> tuple[float, float]:
    """``(mu_n, nu_n)``: mean degree and mean of ``d(d-1)``, from exact integer sums."""
    if seq.n < 1:
        raise ValueError("empty degree sequence")
    d = seq.degrees.astype(object) if seq.degrees.max(initial=0) > 2**31 else seq.degrees
    s1 = int(d.sum())
    s2 = int((d * (d - 1)).sum())
    return s1 / seq.n, s2 / seq.n


def realize_sequence(dist: DegreeDistribution, n: int) -> DegreeSequence:
    """A degree sequence of length ``n`` whose empirical law tracks ``dist``.

    Counts are ``round(n p_k)`` with a largest-remainder correction so they
    total ``n``; an odd degree sum is repaired by adding one to the degree
    of the highest-labelled vertex.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    target = n * np.asarray(dist.p)
    counts = np.floor(target).astype(np.int64)
    short = n - int(counts.sum())
    if short > 0:
        rem = target - counts
        order = np.lexsort((np.arange(rem.size), -rem))
        counts[order[:short]] += 1
    d = np.repeat(np.arange(counts.size, dtype=np.int64), counts)
    if int(d.sum()) % 2:
        d[-1] += 1
    return DegreeSequence(d)
