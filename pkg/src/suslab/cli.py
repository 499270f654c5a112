"""Command-line entry point: sampling, measurement, prediction and experiments."""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from suslab import formats, harness
from suslab.bp_montecarlo import DEFAULT_CAP, estimate_chi_hat, estimate_rho
from suslab.component_stats import components, modified_susceptibility, susceptibility
from suslab.config_sampler import SeededRng, sample_multigraph, sample_simple
from suslab.degree_model import Criticality, realize_sequence
from suslab.errors import SamplingExhausted, SuslabError
from suslab.gf_analytics import analytics_report
from suslab.parallel import ENV_WORKERS

EXIT_DOMAIN = 1
EXIT_EXHAUSTED = 2
EXIT_CHECK_FAILED = 3


def _fail(exc: Exception, code: int):
    envelope = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    attempts = getattr(exc, "attempts", None)
    if attempts is not None:
        envelope["error"]["attempts"] = attempts
    click.echo(json.dumps(envelope, sort_keys=True), err=True)
    sys.exit(code)


def domain_errors(fn):
    """Turn library errors into a JSON envelope on stderr and a nonzero exit."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SamplingExhausted as exc:
            _fail(exc, EXIT_EXHAUSTED)
        except (SuslabError, ValueError, ArithmeticError, OSError, KeyError) as exc:
            _fail(exc, EXIT_DOMAIN)

    return wrapper


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _report(summary, rows: list[dict], fmt: str, output: str | None):
    _emit(formats.rows_to_csv(rows) if fmt == "csv" else formats.dumps(summary), output)


def _finish_checks(checks: dict[str, bool]):
    if checks and not all(checks.values()):
        failed = sorted(k for k, ok in checks.items() if not ok)
        click.echo(json.dumps({"checks_failed": failed}), err=True)
        sys.exit(EXIT_CHECK_FAILED)


def _load_spec(path: str | None) -> dict:
    return json.loads(Path(path).read_text()) if path else {}


def _need(value, name: str):
    if value is None:
        raise click.UsageError(f"missing {name} (give it as an option or in the experiment file)")
    return value


workers_option = click.option(
    "--workers", type=click.IntRange(min=1), envvar=ENV_WORKERS, default=None, show_envvar=True,
    help="Worker processes for replicates; results do not depend on it.",
)
format_option = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
output_option = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout.")


@click.group()
def main():
    """Susceptibility of random graphs with given vertex degrees."""


@main.command()
@click.option("--dist", "dist_path", type=click.Path(exists=True, dir_okay=False), help="Degree law JSON.")
@click.option("--seq", "seq_path", type=click.Path(exists=True, dir_okay=False), help="Degree sequence file.")
@click.option("--n", type=click.IntRange(min=1), help="Vertices, with --dist.")
@click.option("--simple", is_flag=True, help="Uniform simple graph by rejection.")
@click.option("--seed", type=int, required=True)
@click.option("--stream", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--max-attempts", type=click.IntRange(min=1), default=1000, show_default=True)
@output_option
@domain_errors
def sample(dist_path, seq_path, n, simple, seed, stream, max_attempts, output):
    """Sample one graph and write it as an edge list."""
    if bool(dist_path) == bool(seq_path):
        raise click.UsageError("give exactly one of --dist and --seq")
    if dist_path:
        seq = realize_sequence(formats.load_dist(dist_path), _need(n, "--n"))
    else:
        seq = formats.read_sequence(seq_path)
    rng = SeededRng(seed, stream)
    if simple:
        g, attempts = sample_simple(seq, rng, max_attempts)
    else:
        g, attempts = sample_multigraph(seq, rng), 1
    header = {
        "seed": seed,
        "stream": stream,
        "simple": int(simple),
        "attempts": attempts,
        "degrees_sha256": formats.sequence_digest(seq),
    }
    _emit(formats.format_edge_list(g, header), output)


@main.command()
@click.option("--edges", "edges_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--spectrum", "spectrum_path", type=click.Path(dir_okay=False), help="Also write the k,N_k table here.")
@format_option
@output_option
@domain_errors
def measure(edges_path, spectrum_path, fmt, output):
    """Susceptibility, modified susceptibility and component spectrum of an edge list."""
    g = formats.read_edge_list(edges_path)
    s = components(g)
    spectrum_csv = s.to_csv()[1]
    if spectrum_path:
        Path(spectrum_path).write_text(spectrum_csv)
    if fmt == "csv":
        _emit(spectrum_csv, output)
        return
    summary = {
        "n": g.n,
        "m": g.m,
        "loops": g.loops,
        "multi_pairs": g.multi_pairs,
        "components": int(s.id_sizes.size),
        "largest": s.largest_size,
        "second": s.second_size(),
        "chi": susceptibility(s),
        "chi_hat": modified_susceptibility(s),
        "spectrum": s.spectrum,
    }
    _emit(formats.dumps(summary), output)


@main.command()
@click.option("--dist", "dist_path", type=click.Path(exists=True, dir_okay=False), required=True)
@output_option
@domain_errors
def predict(dist_path, output):
    """Limiting quantities from the degree law alone."""
    _emit(formats.dumps(analytics_report(formats.load_dist(dist_path))), output)


@main.command()
@click.option("--dist", "dist_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--reps", type=click.IntRange(min=2), default=100_000, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--cap", type=click.IntRange(min=1), default=DEFAULT_CAP, show_default=True)
@click.option("--kmax", type=click.IntRange(min=1), default=6, show_default=True)
@workers_option
@output_option
@domain_errors
def bp(dist_path, reps, seed, cap, kmax, workers, output):
    """Monte Carlo of the exploration branching process."""
    dist = formats.load_dist(dist_path)
    out = {"rho": estimate_rho(dist, reps, seed, kmax, cap, workers)}
    if dist.criticality is not Criticality.CRITICAL:
        out["chi_hat"] = estimate_chi_hat(dist, reps, seed, cap, workers)
    _emit(formats.dumps(out), output)


@main.group()
def experiment():
    """Replicated experiments; CSV rows or a JSON summary."""


def _spec_option(fn):
    return click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False), help="Experiment spec JSON.")(fn)


@experiment.command()
@_spec_option
@click.option("--dist", "dist_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", "n_grid", type=click.IntRange(min=2), multiple=True, help="Repeat for several sizes.")
@click.option("--reps", type=click.IntRange(min=1))
@click.option("--seed", type=int)
@click.option("--simple", is_flag=True, default=None)
@click.option("--check", is_flag=True, help="Fail unless the largest-n mean chi is within --tol of its limit.")
@click.option("--tol", type=float, default=0.05, show_default=True)
@workers_option
@format_option
@output_option
@domain_errors
def convergence(spec_path, dist_path, n_grid, reps, seed, simple, check, tol, workers, fmt, output):
    """Mean chi and modified chi across a grid of sizes."""
    spec = _load_spec(spec_path)
    dist = formats.load_dist(dist_path or _need(spec.get("dist"), "--dist"))
    n_grid = list(n_grid) or _need(spec.get("n_grid"), "--n")
    reps = reps or _need(spec.get("reps"), "--reps")
    seed = seed if seed is not None else _need(spec.get("seed"), "--seed")
    simple = bool(spec.get("simple", False)) if simple is None else simple
    output = output or spec.get("output")
    res = harness.convergence_experiment(dist, n_grid, reps, seed, simple, workers)
    summary = res.to_dict()
    checks = {}
    if check:
        last = res.rows[-1]
        limit = last["chi_inf"]
        checks["chi_within_tol"] = bool(np.isfinite(limit) and abs(last["chi_mean"] - limit) <= tol * limit)
        summary["checks"] = checks
    _report(summary, res.rows, fmt, output)
    _finish_checks(checks)


@experiment.command()
@_spec_option
@click.option("--dist", "dist_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", type=click.IntRange(min=2))
@click.option("--reps", type=click.IntRange(min=1))
@click.option("--seed", type=int)
@click.option("--check", is_flag=True, help="Fail unless every residual is subcritical and its mean TV distance is below --tol.")
@click.option("--tol", type=float, default=0.02, show_default=True)
@workers_option
@format_option
@output_option
@domain_errors
def duality(spec_path, dist_path, n, reps, seed, check, tol, workers, fmt, output):
    """Residual graph after deleting the giant against the dual law."""
    spec = _load_spec(spec_path)
    dist = formats.load_dist(dist_path or _need(spec.get("dist"), "--dist"))
    n = n or _need(spec.get("n", (spec.get("n_grid") or [None])[-1]), "--n")
    reps = reps or _need(spec.get("reps"), "--reps")
    seed = seed if seed is not None else _need(spec.get("seed"), "--seed")
    output = output or spec.get("output")
    rep = harness.duality_experiment(dist, n, reps, seed, workers)
    summary = rep.to_dict()
    checks = {}
    if check:
        checks["residual_subcritical"] = bool(rep.summary["all_residual_subcritical"])
        checks["residual_tv_within_tol"] = rep.summary["residual_tv"]["mean"] < tol
        summary["checks"] = checks
    _report(summary, rep.rows(), fmt, output)
    _finish_checks(checks)


@experiment.command()
@click.option("--h", "h_path", type=click.Path(exists=True, dir_okay=False), required=True, help="Base law JSON.")
@click.option("--side", type=click.Choice(["sub", "super", "both"]), default="both", show_default=True)
@click.option("--lo", type=float, default=1e-4, show_default=True)
@click.option("--hi", type=float, default=1e-2, show_default=True)
@click.option("--num", type=click.IntRange(min=4), default=9, show_default=True)
@click.option("--expect-exponent", type=float, default=None, help="With --check: the exponent every side should fit.")
@click.option("--check", is_flag=True)
@click.option("--tol", type=float, default=0.05, show_default=True)
@format_option
@output_option
@domain_errors
def sweep(h_path, side, lo, hi, num, expect_exponent, check, tol, fmt, output):
    """Analytic limits along the degree-one mixing family, with exponent fits."""
    h = formats.load_dist(h_path)
    points = harness.critical_sweep(h, harness.sweep_grid(h, lo, hi, num, side))
    sides = ["sub", "super"] if side == "both" else [side]
    fits = {s: harness.fit_sweep(points, s) for s in sides}
    lam_c = harness.lambda_critical(h)
    summary = {"lambda_c": lam_c, "mu_c": 1 - lam_c + lam_c * h.mu, "points": points, "fits": fits}
    checks = {}
    if check:
        if expect_exponent is None:
            raise click.UsageError("--check needs --expect-exponent")
        checks = {f"{s}_exponent": abs(f.exponent - expect_exponent) <= tol for s, f in fits.items()}
        summary["checks"] = checks
    _report(summary, [p.to_dict() for p in points], fmt, output)
    _finish_checks(checks)


@experiment.command()
@click.option("--seq", "seq_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--reps", type=click.IntRange(min=2), default=200, show_default=True)
@click.option("--ell-max", type=click.IntRange(min=1, max=6), default=4, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--check", is_flag=True, help="Fail if any mean exceeds its bound by more than 3 standard errors.")
@workers_option
@format_option
@output_option
@domain_errors
def pathbound(seq_path, reps, ell_max, seed, check, workers, fmt, output):
    """Mean path counts against their expectation bounds."""
    audit = harness.path_bound_audit(formats.read_sequence(seq_path), reps, ell_max, seed, workers)
    summary = audit.to_dict()
    checks = {}
    if check:
        for r in audit.rows:
            checks[f"paths_{r['ell']}"] = r["mean"] <= r["bound"] + 3 * r["stderr"]
        c = audit.chi
        checks["chi"] = c["mean"] <= c["bound"] + 3 * c["stderr"]
        summary["checks"] = checks
    _report(summary, audit.rows, fmt, output)
    _finish_checks(checks)


@experiment.command()
@click.option("--seed", type=int, required=True)
@click.option("--a", type=float, default=1.0, show_default=True)
@click.option("--n", type=click.IntRange(min=16), default=10**4, show_default=True)
@click.option("--two-star-reps", type=click.IntRange(min=1), default=10**4, show_default=True)
@click.option("--cubic-reps", type=click.IntRange(min=1), default=200, show_default=True)
@click.option("--explore-n", type=click.IntRange(min=0), default=0, help="Also run pure cubic graphs of this order.")
@click.option("--explore-reps", type=click.IntRange(min=0), default=0)
@workers_option
@output_option
@domain_errors
def counterexamples(seed, a, n, two_star_reps, cubic_reps, explore_n, explore_reps, workers, output):
    """Star, two-star and cubic-plus-isolated degree sequences."""
    rep = harness.counterexample_suite(
        seed, a, n, two_star_reps, cubic_reps, explore_n, explore_reps, workers
    )
    _emit(formats.dumps(rep), output)


if __name__ == "__main__":
    main()
