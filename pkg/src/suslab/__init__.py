"""Susceptibility of random graphs with a given degree sequence.

Sampling from the configuration model, component statistics, limits from
generating functions, and a branching-process Monte Carlo that checks them.
"""

from suslab.bp_montecarlo import estimate_chi_hat, estimate_rho, total_progeny
from suslab.component_stats import components, modified_susceptibility, susceptibility
from suslab.config_sampler import MultiGraph, SeededRng, sample_multigraph, sample_simple
from suslab.degree_model import (
    Criticality,
    DegreeDistribution,
    DegreeSequence,
    classify,
    power_log_tail,
    power_loglog_tail,
    power_tail,
    realize_sequence,
)
from suslab.errors import (
    ConvergenceError,
    CriticalityError,
    ParityError,
    SamplingExhausted,
    SuslabError,
    TruncationError,
)
from suslab.gf_analytics import (
    analytics_report,
    chi_graph_limit,
    chi_hat_graph_limit,
    dual_distribution,
    solve_kappa,
    survival,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "Criticality",
    "CriticalityError",
    "DegreeDistribution",
    "DegreeSequence",
    "MultiGraph",
    "ParityError",
    "SamplingExhausted",
    "SeededRng",
    "SuslabError",
    "TruncationError",
    "analytics_report",
    "chi_graph_limit",
    "chi_hat_graph_limit",
    "classify",
    "components",
    "dual_distribution",
    "estimate_chi_hat",
    "estimate_rho",
    "modified_susceptibility",
    "power_log_tail",
    "power_loglog_tail",
    "power_tail",
    "realize_sequence",
    "sample_multigraph",
    "sample_simple",
    "solve_kappa",
    "survival",
    "susceptibility",
    "total_progeny",
]
