"""Experiments: convergence of the susceptibilities, duality, path-count audits,
near-critical sweeps with exponent fits, and the counterexample regressions.

Every experiment is a pure function of its inputs and seed.  Replicates are
identified by integer stream ids and reduced in replicate order, so reports
do not depend on the number of worker processes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from suslab import gf_analytics as gf
from suslab.component_stats import (
    components,
    giant_degree_profile,
    modified_susceptibility,
    path_counts,
    remove_largest,
    susceptibility,
)
from suslab.config_sampler import SeededRng, sample_matching, sample_multigraph, sample_simple
from suslab.degree_model import (
    Criticality,
    DegreeDistribution,
    DegreeSequence,
    classify,
    moments,
    realize_sequence,
)
from suslab.parallel import run_tasks

SPECTRUM_KMAX = 6
# leading stream index per experiment, so replicate streams never collide
_CONVERGENCE, _DUALITY, _PATHS, _ESTAR, _E2STAR, _E0, _CUBIC, _MATCHING = range(1, 9)
CENSUS_BLOCK = 10_000


def _mean_se(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return math.nan, math.nan
    mean = math.fsum(a) / a.size
    if a.size < 2:
        return mean, math.nan
    return mean, float(np.std(a, ddof=1) / math.sqrt(a.size))


def _delta_or_nan(x: float, y: float) -> float:
    try:
        return gf.delta_metric(x, y)
    except ValueError:
        return math.nan


# ---------------------------------------------------------------- lambda family


def _check_supercritical_base(h: DegreeDistribution) -> None:
    if not h.nu > h.mu:
        raise ValueError(f"base law must have nu > mu (got mu={h.mu!r}, nu={h.nu!r})")


def lambda_family(h: DegreeDistribution, lam: float) -> DegreeDistribution:
    """Law with generating function ``(1 - lam) x + lam h(x)``.

    Extra degree-1 vertices are mixed into a supercritical base law ``h``.
    """
    _check_supercritical_base(h)
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    if lam == 1:
        return h
    p = lam * np.asarray(h.p, dtype=float)
    if p.size < 2:
        p = np.concatenate([p, np.zeros(2 - p.size)])
    p[1] += 1.0 - lam
    spec = {"type": "lambda_mix", "lambda": lam, "h": h.tail_spec}
    return DegreeDistribution(p, spec, renormalized=h.renormalized, discarded_k2_mass=lam * h.discarded_k2_mass)


def lambda_critical(h: DegreeDistribution) -> float:
    """The mixing weight at which the family turns critical, ``1 / (1 - h'(1) + h''(1))``."""
    _check_supercritical_base(h)
    return 1.0 / (1.0 - h.mu + h.nu)


@dataclass(frozen=True)
class SweepPoint:
    lam: float
    distance: float
    mu: float
    nu: float
    kappa: float
    chi_inf: float
    chi_hat_inf: float

    @property
    def side(self) -> str:
        return "sub" if self.mu > self.nu else "super"

    @property
    def value(self) -> float:
        """The diverging quantity on this side: ``chi_inf`` below, ``chi_hat_inf`` above."""
        return self.chi_inf if self.side == "sub" else self.chi_hat_inf

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "side": self.side,
            "distance": self.distance,
            "mu_lambda": self.mu,
            "nu_lambda": self.nu,
            "kappa_lambda": self.kappa,
            "chi_inf": self.chi_inf,
            "chi_hat_inf": self.chi_hat_inf,
        }


def sweep_grid(h: DegreeDistribution, lo: float = 1e-4, hi: float = 1e-2, num: int = 9, side: str = "both") -> list[float]:
    """Mixing weights at geometric distances ``lo..hi`` from the critical one."""
    if side not in ("sub", "super", "both"):
        raise ValueError("side must be 'sub', 'super' or 'both'")
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    lam_c = lambda_critical(h)
    d = np.geomspace(lo, hi, num)
    out = []
    if side in ("sub", "both"):
        if lam_c - hi <= 0:
            raise ValueError("window reaches below lambda = 0")
        out.extend(lam_c - d)
    if side in ("super", "both"):
        if lam_c + hi > 1:
            raise ValueError("window reaches above lambda = 1")
        out.extend(lam_c + d)
    return sorted(float(x) for x in out)


def critical_sweep(h: DegreeDistribution, lambdas) -> list[SweepPoint]:
    """Limiting susceptibilities along the family, computed analytically."""
    lam_c = lambda_critical(h)
    points = []
    for lam in lambdas:
        lam = float(lam)
        if math.isclose(lam, lam_c, rel_tol=0, abs_tol=1e-15):
            raise ValueError("sweep grid must exclude the critical point")
        dist = lambda_family(h, lam)
        kappa = gf.solve_kappa(dist)
        points.append(
            SweepPoint(
                lam, abs(lam - lam_c), dist.mu, dist.nu, kappa, gf.chi_graph_limit(dist), gf.chi_hat_graph_limit(dist)
            )
        )
    return points


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit of ``log value = intercept - exponent * log x``.

    ``prefactor`` is ``x * value`` at the smallest ``x`` of the window, the
    finite-window estimate of the leading constant when the exponent is 1.
    """

    exponent: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    prefactor: float
    points: int

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "prefactor": self.prefactor,
            "points": self.points,
        }


def fit_exponent(xs, values) -> ExponentFit:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and values must be 1-d and of equal length")
    if x.size < 4:
        raise ValueError("need at least 4 points")
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)) or np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("points must be positive and finite")
    if x.max() / x.min() < 10 * (1 - 1e-9):
        raise ValueError("window must span at least one decade")
    res = stats.linregress(np.log(x), np.log(y))
    i = int(np.argmin(x))
    return ExponentFit(
        -float(res.slope), float(res.intercept), float(res.rvalue**2), (float(x.min()), float(x.max())),
        float(x[i] * y[i]), int(x.size),
    )


def fit_sweep(points: list[SweepPoint], side: str) -> ExponentFit:
    sel = [p for p in points if p.side == side]
    return fit_exponent([p.distance for p in sel], [p.value for p in sel])


def exponent_trend(h: DegreeDistribution, windows, num: int = 9, side: str = "super") -> list[ExponentFit]:
    """Fitted exponents over a sequence of windows, to watch them grow as the window shrinks."""
    return [fit_sweep(critical_sweep(h, sweep_grid(h, lo, hi, num, side)), side) for lo, hi in windows]


# ---------------------------------------------------------------- graph replicates


@dataclass(frozen=True)
class GraphMeasurement:
    n: int
    chi: float
    chi_hat: float
    giant_fraction: float
    second_fraction: float
    spectrum: tuple[float, ...]  # N_k / n for k = 1..SPECTRUM_KMAX
    attempts: int = 1


def _draw(seq: DegreeSequence, rng: SeededRng, simple: bool, max_attempts: int):
    if simple:
        return sample_simple(seq, rng, max_attempts)
    return sample_multigraph(seq, rng), 1


def _measure(task) -> GraphMeasurement:
    seq, rng, simple, max_attempts = task
    g, attempts = _draw(seq, rng, simple, max_attempts)
    s = components(g)
    spec = s.spectrum
    n = s.n
    return GraphMeasurement(
        n,
        susceptibility(s),
        modified_susceptibility(s),
        s.largest_size / n,
        s.second_size() / n,
        tuple(spec.get(k, 0) / n for k in range(1, SPECTRUM_KMAX + 1)),
        attempts,
    )


@dataclass
class ConvergenceResult:
    rows: list[dict]
    replicates: dict[int, list[GraphMeasurement]] = field(repr=False)
    predictions: dict

    def to_dict(self) -> dict:
        return {"predictions": self.predictions, "rows": self.rows}


def convergence_experiment(
    dist: DegreeDistribution,
    n_grid,
    reps: int,
    seed: int,
    simple: bool = False,
    workers: int | None = None,
    max_attempts: int = 1000,
) -> ConvergenceResult:
    """Mean susceptibilities over ``reps`` random graphs per ``n``, set against the limits."""
    if reps < 1:
        raise ValueError("reps must be positive")
    chi_inf = gf.chi_graph_limit(dist)
    chi_hat_inf = gf.chi_hat_graph_limit(dist)
    rows, reps_by_n = [], {}
    for j, n in enumerate(n_grid):
        seq = realize_sequence(dist, int(n))
        mu_n, nu_n = moments(seq)
        tasks = [(seq, SeededRng(seed, (_CONVERGENCE, j, r)), simple, max_attempts) for r in range(reps)]
        ms = run_tasks(_measure, tasks, workers)
        reps_by_n[int(n)] = ms
        chi, chi_se = _mean_se([m.chi for m in ms])
        chi_hat, chi_hat_se = _mean_se([m.chi_hat for m in ms])
        giant, giant_se = _mean_se([m.giant_fraction for m in ms])
        pred = gf.finite_n_prediction(mu_n, nu_n)
        rows.append(
            {
                "n": int(n),
                "reps": reps,
                "mu_n": mu_n,
                "nu_n": nu_n,
                "chi_mean": chi,
                "chi_stderr": chi_se,
                "chi_hat_mean": chi_hat,
                "chi_hat_stderr": chi_hat_se,
                "giant_fraction_mean": giant,
                "giant_fraction_stderr": giant_se,
                "chi_inf": chi_inf,
                "chi_hat_inf": chi_hat_inf,
                "finite_n_prediction": pred,
                "delta_chi_limit": _delta_or_nan(chi, chi_inf),
                "delta_chi_hat_limit": _delta_or_nan(chi_hat, chi_hat_inf),
                "delta_chi_prediction": _delta_or_nan(chi, pred),
                "mean_attempts": _mean_se([m.attempts for m in ms])[0],
            }
        )
    predictions = {"chi_inf": chi_inf, "chi_hat_inf": chi_hat_inf, "criticality": dist.criticality.value}
    return ConvergenceResult(rows, reps_by_n, predictions)


# ---------------------------------------------------------------- duality

DUALITY_KMAX = 10


def _tv_distance(emp: dict[int, float], law: DegreeDistribution) -> float:
    keys = set(emp) | set(law.probs)
    return 0.5 * math.fsum(abs(emp.get(k, 0.0) - law[k]) for k in keys)


def _duality_replicate(task) -> dict:
    seq, rng, dual, g_kappa = task
    g = sample_multigraph(seq, rng)
    s = components(g)
    n = s.n
    profile = giant_degree_profile(g, s)
    residual, rseq = remove_largest(g, s)
    rs = components(residual)
    r_chi = susceptibility(rs) if rs.n else math.nan
    r_mu, r_nu = moments(rseq) if rseq.n else (math.nan, math.nan)
    emp = {k: c / rseq.n for k, c in rseq.counts.items()} if rseq.n else {}
    return {
        "giant_fraction": s.largest_size / n,
        "second_over_largest": s.second_size() / s.largest_size,
        "giant_degree_fraction": {k: profile.get(k, 0) / n for k in range(DUALITY_KMAX + 1)},
        "residual_n": rseq.n,
        "residual_tv": _tv_distance(emp, dual),
        "residual_chi": r_chi,
        "residual_mu": r_mu,
        "residual_nu": r_nu,
        "residual_class": classify(r_mu, r_nu).value if r_mu > 0 else "empty",
        "chi_hat": modified_susceptibility(s),
        "scaled_residual_chi": g_kappa * r_chi,
    }


@dataclass
class DualityReport:
    n: int
    reps: int
    predictions: dict
    summary: dict
    replicates: list[dict] = field(repr=False)

    def to_dict(self) -> dict:
        return {"n": self.n, "reps": self.reps, "predictions": self.predictions, "summary": self.summary}

    def rows(self) -> list[dict]:
        out = []
        for i, r in enumerate(self.replicates):
            row = {"replicate": i}
            row.update({k: v for k, v in r.items() if k != "giant_degree_fraction"})
            row.update({f"v{k}_giant": v for k, v in r["giant_degree_fraction"].items()})
            out.append(row)
        return out


def duality_experiment(
    dist: DegreeDistribution, n: int, reps: int, seed: int, workers: int | None = None
) -> DualityReport:
    """Compare the graph left after deleting the giant with the dual subcritical law."""
    if dist.criticality is not Criticality.SUPERCRITICAL:
        raise ValueError("duality needs a supercritical law")
    kappa = gf.solve_kappa(dist)
    dual = gf.dual_distribution(dist)
    mu_hat, nu_hat = gf.dual_moments(dist)
    g_kappa = gf.pgf(dist, kappa)
    seq = realize_sequence(dist, n)
    tasks = [(seq, SeededRng(seed, (_DUALITY, r)), dual, g_kappa) for r in range(reps)]
    reps_out = run_tasks(_duality_replicate, tasks, workers)
    crowded = sum(r["second_over_largest"] > 0.5 for r in reps_out)
    if crowded:
        warnings.warn(
            f"{crowded} replicate(s) have a second component over half the largest; "
            "the giant is not well separated",
            RuntimeWarning,
        )
    summary = {}
    for key in ("giant_fraction", "residual_tv", "residual_chi", "chi_hat", "scaled_residual_chi"):
        summary[key] = dict(zip(("mean", "stderr"), _mean_se([r[key] for r in reps_out])))
    summary["giant_degree_fraction"] = {
        k: dict(zip(("mean", "stderr"), _mean_se([r["giant_degree_fraction"][k] for r in reps_out])))
        for k in range(DUALITY_KMAX + 1)
    }
    summary["all_residual_subcritical"] = all(r["residual_class"] == "subcritical" for r in reps_out)
    summary["crowded_replicates"] = crowded
    predictions = {
        "kappa": kappa,
        "g_kappa": g_kappa,
        "rho_inf": gf.survival(dist),
        "giant_degree_fraction": {k: dist[k] * (1.0 - kappa**k) for k in range(DUALITY_KMAX + 1)},
        "dual": dual.probs,
        "dual_class": classify(mu_hat, nu_hat).value,
        "mu_hat": mu_hat,
        "nu_hat": nu_hat,
        "residual_chi": gf.finite_n_prediction(mu_hat, nu_hat),
        "chi_hat_inf": gf.chi_hat_graph_limit(dist),
    }
    return DualityReport(n, reps, predictions, summary, reps_out)


# ---------------------------------------------------------------- matching census


def _census_block(task) -> dict[tuple, int]:
    seq, rng, size = task
    gen = rng.generator()
    out: dict[tuple, int] = {}
    for _ in range(size):
        pairs = np.sort(sample_matching(seq, gen), axis=1)
        key = tuple(map(tuple, pairs[np.lexsort(pairs.T[::-1])].tolist()))
        out[key] = out.get(key, 0) + 1
    return out


def matching_census(seq: DegreeSequence, samples: int, seed: int, workers: int | None = None) -> dict[tuple, int]:
    """How often each half-edge matching comes up in ``samples`` draws.

    Keys are sorted tuples of half-edge index pairs.
    """
    starts = range(0, samples, CENSUS_BLOCK)
    tasks = [(seq, SeededRng(seed, (_MATCHING, i)), min(CENSUS_BLOCK, samples - s)) for i, s in enumerate(starts)]
    total: dict[tuple, int] = {}
    for block in run_tasks(_census_block, tasks, workers):
        for k, c in block.items():
            total[k] = total.get(k, 0) + c
    return dict(sorted(total.items()))


# ---------------------------------------------------------------- path bounds


def path_bound(n: int, mu: float, nu: float, ell: int) -> float:
    """Upper bound ``n nu^(l-1) / mu^(l-2)`` on the expected number of paths of length ``l``."""
    if ell < 1:
        raise ValueError("length must be at least 1")
    return n * nu ** (ell - 1) / mu ** (ell - 2)


def _path_replicate(task):
    seq, rng, ell_max = task
    g = sample_multigraph(seq, rng)
    return path_counts(g, ell_max), susceptibility(components(g))


@dataclass
class PathAudit:
    n: int
    reps: int
    mu: float
    nu: float
    rows: list[dict]
    chi: dict

    def to_dict(self) -> dict:
        return {"n": self.n, "reps": self.reps, "mu_n": self.mu, "nu_n": self.nu, "rows": self.rows, "chi": self.chi}


def path_bound_audit(
    seq: DegreeSequence, reps: int, ell_max: int, seed: int, workers: int | None = None
) -> PathAudit:
    """Sample means of path counts against their expectation bounds, plus the bound on the mean of chi."""
    mu, nu = moments(seq)
    tasks = [(seq, SeededRng(seed, (_PATHS, r)), ell_max) for r in range(reps)]
    out = run_tasks(_path_replicate, tasks, workers)
    counts = np.array([c for c, _ in out], dtype=float)
    rows = []
    for ell in range(1, ell_max + 1):
        mean, se = _mean_se(counts[:, ell])
        bound = path_bound(seq.n, mu, nu, ell)
        rows.append({"ell": ell, "mean": mean, "stderr": se, "bound": bound, "slack": bound - mean})
    chi_mean, chi_se = _mean_se([c for _, c in out])
    bound = gf.finite_n_prediction(mu, nu)
    chi = {"mean": chi_mean, "stderr": chi_se, "bound": bound, "slack": bound - chi_mean}
    return PathAudit(seq.n, reps, mu, nu, rows, chi)


# ---------------------------------------------------------------- counterexamples


def star_sequence(n: int, hubs: int, hub_degree: int) -> DegreeSequence:
    """``hubs`` vertices of degree ``hub_degree`` (labels 1..hubs), the rest leaves.

    When the degree sum is odd the last hub gets one extra edge.
    """
    d = np.ones(n, dtype=np.int64)
    d[:hubs] = hub_degree
    if int(d.sum()) % 2:
        d[hubs - 1] += 1
    return DegreeSequence(d)


def star_chi(n: int, hub_degree: int) -> float:
    """``((d + 1)^2 + 2 (n - 1 - d)) / n``: one star plus isolated edges."""
    return ((hub_degree + 1) ** 2 + 2 * (n - 1 - hub_degree)) / n


def _simple_components(task):
    seq, rng, max_attempts = task
    g, attempts = sample_simple(seq, rng, max_attempts)
    return g, components(g), attempts


def _e2star_replicate(task):
    g, s, attempts = _simple_components(task)
    e = g.edges
    joined = bool(np.any((e[:, 0] == 0) & (e[:, 1] == 1)))
    return joined, susceptibility(s), modified_susceptibility(s), attempts


def _e0_replicate(task):
    seq, rng, max_attempts, n3 = task
    g, s, attempts = _simple_components(task[:3])
    connected = int(np.unique(s.membership[:n3]).size) == 1
    return connected, susceptibility(s), attempts


def _cubic_replicate(task):
    _, s, _ = _simple_components(task)
    return susceptibility(s), modified_susceptibility(s)


def counterexample_suite(
    seed: int,
    a: float = 1.0,
    n: int = 10**4,
    e2star_reps: int = 10**4,
    e0_reps: int = 200,
    cubic_n: int = 0,
    cubic_reps: int = 0,
    workers: int | None = None,
    max_attempts: int = 1000,
) -> dict:
    """Degree sequences that break the square-integrability and degree-one conditions.

    ``cubic_n``/``cubic_reps`` switch on an exploratory run of random cubic
    graphs, whose modified susceptibility is reported without a target.
    """
    root = math.sqrt(n)
    report: dict = {"a": a, "n": n}

    # one hub: the component structure is fixed, so chi is deterministic
    d1 = round(a * root)
    seq = star_sequence(n, 1, d1)
    g, s, attempts = _simple_components((seq, SeededRng(seed, (_ESTAR,)), max_attempts))
    mu_n, nu_n = moments(seq)
    report["star"] = {
        "nominal_hub_degree": d1,
        "hub_degree": int(seq.degrees[0]),
        "chi": susceptibility(s),
        "chi_closed_form": star_chi(n, int(seq.degrees[0])),
        "chi_closed_form_nominal": star_chi(n, d1),
        "limit": a * a + 2,
        "limit_if_square_integrable": 2.0,
        "finite_n_prediction": gf.finite_n_prediction(mu_n, nu_n),
        "wrong_formula": (2 - a * a) / (1 - a * a) if a < 1 else math.inf,
        "attempts": attempts,
    }

    # two hubs: chi settles on one of two values depending on the hub-hub edge
    seq = star_sequence(n, 2, d1)
    tasks = [(seq, SeededRng(seed, (_E2STAR, r)), max_attempts) for r in range(e2star_reps)]
    out = run_tasks(_e2star_replicate, tasks, workers)
    joined = np.array([j for j, *_ in out], dtype=float)
    chis = np.array([c for _, c, _, _ in out])
    freq = float(joined.mean()) if joined.size else math.nan
    dd = int(seq.degrees[0])
    leaves = n - 2
    # exact count ratio of graphs with and without the hub-hub edge
    exact = dd * dd / (dd * dd + leaves - 2 * dd + 2)
    report["two_star"] = {
        "reps": e2star_reps,
        "hub_degree": dd,
        "edge_frequency": freq,
        "edge_frequency_stderr": math.sqrt(freq * (1 - freq) / joined.size) if joined.size else math.nan,
        "edge_probability_exact": exact,
        "edge_probability_limit_stated": a * a / (a * a + 2),
        "edge_probability_limit_counted": a * a / (a * a + 1),
        "chi_joined_mean": _mean_se(chis[joined == 1])[0],
        "chi_split_mean": _mean_se(chis[joined == 0])[0],
        "chi_joined_limit": 4 * a * a + 2,
        "chi_split_limit": 2 * a * a + 2,
        "mean_attempts": _mean_se([t for *_, t in out])[0],
    }

    # cubic graph plus isolated vertices
    n3 = 2 * math.floor(a * root)
    seq = DegreeSequence(np.concatenate([np.full(n3, 3, np.int64), np.zeros(n - n3, np.int64)]))
    tasks = [(seq, SeededRng(seed, (_E0, r)), max_attempts, n3) for r in range(e0_reps)]
    out = run_tasks(_e0_replicate, tasks, workers)
    conn = [c for ok, c, _ in out if ok]
    report["cubic_plus_isolated"] = {
        "reps": e0_reps,
        "cubic_vertices": n3,
        "connected_reps": len(conn),
        "chi_connected_mean": _mean_se(conn)[0],
        "chi_connected_exact": (n - n3 + n3 * n3) / n,
        "limit": 1 + 4 * a * a,
        "limit_if_degree_one_condition": 1.0,
    }

    if cubic_n and cubic_reps:
        seq = DegreeSequence(np.full(cubic_n, 3, np.int64))
        tasks = [(seq, SeededRng(seed, (_CUBIC, r)), max_attempts) for r in range(cubic_reps)]
        out = run_tasks(_cubic_replicate, tasks, workers)
        report["cubic_exploration"] = {
            "n": cubic_n,
            "reps": cubic_reps,
            "chi_hat_mean": _mean_se([h for _, h in out])[0],
            "chi_hat_max": max(h for _, h in out),
        }
    return report
