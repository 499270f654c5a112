"""Closed-form branching-process predictions from probability generating functions.

Everything here is deterministic numerics on a :class:`DegreeDistribution`:
PGF derivatives, the extinction fixed point ``kappa``, survival probability,
limiting susceptibility and modified susceptibility, and the dual law seen
after the giant component is removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from suslab.degree_model import (
    Criticality,
    DegreeDistribution,
    classify,
    compensated_sum,
)
from suslab.errors import ConvergenceError, CriticalityError

KAPPA_TOL = 1e-12
MAX_ITER = 200
NEAR_CRITICAL = 1e-9
FORM_TOL = 1e-9


def _falling(k: np.ndarray, order: int) -> np.ndarray:
    out = np.ones_like(k)
    for j in range(order):
        out = out * (k - j)
    return out


def pgf(dist: DegreeDistribution, x: float, order: int = 0) -> float:
    """``g(x)``, ``g'(x)`` or ``g''(x)`` (any ``order >= 0``) for ``0 <= x <= 1``."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if order < 0:
        raise ValueError("order must be non-negative")
    p = dist.p
    if order >= p.size:
        return 0.0
    k = dist.degrees[order:]
    coeff = p[order:] * _falling(k, order)
    if x == 1.0:
        return compensated_sum(coeff)
    if x == 0.0:
        return float(coeff[0])
    return compensated_sum(coeff * np.exp((k - order) * math.log(x)))


def _smallest_root(phi, dphi) -> float:
    """Smallest root in (0, 1) of a convex ``phi`` with ``phi(0) > 0``, ``phi(1) = 0``, ``phi'(1) > 0``."""
    delta = 1e-3
    while phi(1.0 - delta) >= 0.0:
        delta /= 2.0
        if delta < 1e-15:
            raise ConvergenceError("no interior sign change below 1; law is numerically critical")
    lo, hi = 0.0, 1.0 - delta
    x = lo
    for _ in range(MAX_ITER):
        fx = phi(x)
        if fx == 0.0:
            return x
        if fx > 0:
            lo = x
        else:
            hi = x
        if hi - lo <= KAPPA_TOL:
            return 0.5 * (lo + hi)
        slope = dphi(x)
        step = fx / slope if slope != 0.0 else math.inf
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        elif abs(step) < 1e-2 * KAPPA_TOL:
            return nxt
        x = nxt
    raise ConvergenceError(f"fixed-point iteration did not converge in {MAX_ITER} steps")


def solve_kappa(dist: DegreeDistribution) -> float:
    """Smallest ``kappa`` in ``[0, 1]`` with ``g'(kappa) = mu * kappa``."""
    mu = dist.mu
    if not mu > 0:
        raise ValueError("mean degree must be positive")
    if dist[1] == 0.0:
        return 0.0
    if classify(mu, dist.nu) is not Criticality.SUPERCRITICAL:
        return 1.0
    return _smallest_root(
        lambda s: pgf(dist, s, 1) - mu * s,
        lambda s: pgf(dist, s, 2) - mu,
    )


def survival(dist: DegreeDistribution) -> float:
    """Survival probability ``1 - g(kappa)``; also the limiting giant-component fraction."""
    kappa = solve_kappa(dist)
    if kappa == 1.0:
        return 0.0
    return 1.0 - pgf(dist, kappa, 0)


def size_biased(dist: DegreeDistribution) -> DegreeDistribution:
    """The shifted size-biased law ``P(D* = k) = (k+1) p_{k+1} / mu``."""
    mu = dist.mu
    if not mu > 0:
        raise ValueError("size-biased law needs a positive mean")
    if dist.p.size < 2:
        raise ValueError("size-biased law needs mass above degree 0")
    q = dist.degrees[1:] * dist.p[1:] / mu
    q = q / compensated_sum(q)
    return DegreeDistribution(q, {"type": "size_biased"})


@dataclass(frozen=True)
class BranchingSpec:
    """A Galton-Watson process whose root has its own offspring law."""

    root_law: DegreeDistribution
    general_law: DegreeDistribution

    @classmethod
    def for_graph(cls, dist: DegreeDistribution) -> BranchingSpec:
        return cls(dist, size_biased(dist))


def _extinction_point(law: DegreeDistribution) -> float:
    """Smallest non-negative fixed point of the PGF of ``law``."""
    if law[0] == 0.0:
        return 0.0
    if law.mu <= 1.0:
        return 1.0
    return _smallest_root(lambda s: pgf(law, s, 0) - s, lambda s: pgf(law, s, 1) - 1.0)


def chi_general(spec: BranchingSpec) -> float:
    """Expected total progeny ``1 + E xi0 / (1 - E xi)_+`` (``math.inf`` when ``E xi >= 1``)."""
    m0, m = spec.root_law.mu, spec.general_law.mu
    if m0 == 0.0:
        return 1.0
    if m >= 1.0:
        return math.inf
    return 1.0 + m0 / (1.0 - m)


def chi_hat_general(spec: BranchingSpec) -> float:
    """Expected progeny restricted to finite outcomes, ``G0(k) + k G0'(k) / (1 - G'(k))``.

    When the general law is a point mass at 1 the process is either a single
    individual or infinite, and the value is ``G0(0)``.
    """
    general, root = spec.general_law, spec.root_law
    if general[1] == 1.0:
        return pgf(root, 0.0, 0)
    if abs(general.mu - 1.0) <= 1e-12:
        return math.inf
    kappa = _extinction_point(general)
    if kappa == 1.0:
        return chi_general(spec)
    if kappa == 0.0:
        return pgf(root, 0.0, 0)
    return pgf(root, kappa, 0) + kappa * pgf(root, kappa, 1) / (1.0 - pgf(general, kappa, 1))


def chi_graph_limit(dist: DegreeDistribution) -> float:
    """Limiting susceptibility ``1 + mu^2 / (mu - nu)_+``."""
    mu, nu = dist.mu, dist.nu
    if not mu > 0:
        raise ValueError("mean degree must be positive")
    if classify(mu, nu) is not Criticality.SUBCRITICAL:
        return math.inf
    return 1.0 + mu * mu / (mu - nu)


def _chi_hat_forms(dist: DegreeDistribution, kappa: float) -> tuple[float, float]:
    g0, g1, g2 = (pgf(dist, kappa, j) for j in range(3))
    via_kappa = g0 + kappa * g1 * g1 / (g1 - kappa * g2)
    via_mu = g0 + kappa * g1 / (1.0 - g2 / dist.mu)
    return via_kappa, via_mu


def chi_hat_graph_limit(dist: DegreeDistribution) -> float:
    """Limiting modified susceptibility; ``math.inf`` only at criticality.

    Evaluated as ``g(k) + k g'(k)^2 / (g'(k) - k g''(k))`` and cross-checked
    against ``g(k) + k g'(k) / (1 - g''(k)/mu)``.
    """
    crit = classify(dist.mu, dist.nu)
    if crit is Criticality.CRITICAL:
        return math.inf
    kappa = solve_kappa(dist)
    if kappa == 1.0:
        return chi_graph_limit(dist)
    if kappa == 0.0:
        return pgf(dist, 0.0, 0)
    via_kappa, via_mu = _chi_hat_forms(dist, kappa)
    if not math.isclose(via_kappa, via_mu, rel_tol=FORM_TOL, abs_tol=FORM_TOL):
        raise ConvergenceError(f"modified susceptibility forms disagree: {via_kappa!r} vs {via_mu!r}")
    return via_kappa


def dual_distribution(dist: DegreeDistribution) -> DegreeDistribution:
    """Degree law left after deleting the giant: ``p_k kappa^k / g(kappa)``."""
    kappa = solve_kappa(dist)
    if kappa == 1.0:
        return dist
    if kappa == 0.0:
        if dist[0] == 0.0:
            raise CriticalityError("g(kappa) = 0: every vertex lies in the giant component")
        return DegreeDistribution.explicit({0: 1.0})
    k = dist.degrees
    w = dist.p * np.exp(k * math.log(kappa))
    gk = compensated_sum(w)
    if gk == 0.0:
        raise CriticalityError("g(kappa) = 0: every vertex lies in the giant component")
    q = w / gk
    q = q / compensated_sum(q)
    return DegreeDistribution(q, {"type": "dual", "kappa": kappa, "of": dist.tail_spec})


def dual_moments(dist: DegreeDistribution) -> tuple[float, float]:
    """``(mu_hat, nu_hat) = (kappa^2 mu / g(kappa), kappa^2 g''(kappa) / g(kappa))``."""
    kappa = solve_kappa(dist)
    if kappa == 1.0:
        return dist.mu, dist.nu
    gk = pgf(dist, kappa, 0)
    if gk == 0.0:
        raise CriticalityError("g(kappa) = 0: no finite components survive")
    return kappa * kappa * dist.mu / gk, kappa * kappa * pgf(dist, kappa, 2) / gk


def finite_n_prediction(mu_n: float, nu_n: float) -> float:
    """``1 + mu_n^2 / (mu_n - nu_n)_+`` for a concrete sequence; 1 for an edgeless graph."""
    if mu_n < 0:
        raise ValueError("mean degree cannot be negative")
    if mu_n == 0.0:
        return 1.0
    if nu_n >= mu_n:
        return math.inf
    return 1.0 + mu_n * mu_n / (mu_n - nu_n)


def delta_metric(x: float, y: float) -> float:
    """``|1/x - 1/y|`` on ``[1, inf]``."""
    for v in (x, y):
        if not v >= 1.0:
            raise ValueError(f"{v} is outside [1, inf]")
    return abs(1.0 / x - 1.0 / y)


@dataclass(frozen=True)
class AnalyticsReport:
    criticality: Criticality
    mu: float
    nu: float
    kappa: float
    rho_inf: float
    chi_inf: float
    chi_hat_inf: float
    dual: DegreeDistribution
    mu_hat: float
    nu_hat: float
    flags: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "criticality": self.criticality.value,
            "mu": self.mu,
            "nu": self.nu,
            "kappa": self.kappa,
            "rho_inf": self.rho_inf,
            "chi_inf": self.chi_inf,
            "chi_hat_inf": self.chi_hat_inf,
            "mu_hat": self.mu_hat,
            "nu_hat": self.nu_hat,
            "dual": {str(k): v for k, v in self.dual.probs.items()},
            "flags": list(self.flags),
        }


def analytics_report(dist: DegreeDistribution) -> AnalyticsReport:
    """All limiting predictions for ``dist`` in one record."""
    mu, nu = dist.mu, dist.nu
    crit = classify(mu, nu)
    flags = []
    if crit is not Criticality.CRITICAL and abs(mu - nu) < NEAR_CRITICAL:
        flags.append("numerically critical")
        crit_like = True
    else:
        crit_like = crit is Criticality.CRITICAL
    if crit is Criticality.CRITICAL:
        flags.append("critical")
    if crit_like:
        kappa = 1.0 if dist[1] > 0 else 0.0
        rho = 0.0 if kappa == 1.0 else 1.0 - dist[0]
        return AnalyticsReport(crit, mu, nu, kappa, rho, math.inf, math.inf, dist, mu, nu, tuple(flags))
    kappa = solve_kappa(dist)
    dual = dual_distribution(dist)
    mu_hat, nu_hat = dual_moments(dist)
    return AnalyticsReport(
        crit,
        mu,
        nu,
        kappa,
        survival(dist),
        chi_graph_limit(dist),
        chi_hat_graph_limit(dist),
        dual,
        mu_hat,
        nu_hat,
        tuple(flags),
    )
