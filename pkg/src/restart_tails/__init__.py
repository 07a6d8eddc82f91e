"""Total-time analysis for tasks that restart from scratch after failures.

A task needing T units of work on a machine that fails after U units of
uptime restarts from the beginning on every failure; the library computes
the distribution of the total completion time by exact simulation, by
geometric-sum analytics with deterministic error envelopes, and by
closed-form tail asymptotics, and cross-validates the three against each
other.
"""

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticMode,
    IntegralCheck,
    IntegralKind,
    MomentVerdict,
    Regime,
    RegimeCase,
    Verdict,
    asymptote_bounded,
    asymptote_diagonal,
    asymptote_fixed,
    asymptote_gamma_class,
    asymptote_regvar,
    asymptote_weibull_class,
    classify,
    evaluate_regime,
    evaluate_regime_with,
    integral_oracle,
    log_asymptote,
    moment_classify,
    saddle_constants_power_exp,
)
from .config import COMMANDS, ESTIMATORS, ConfigError, RunConfig, parse_config, render_config
from .distributions import (
    Distribution,
    Exponential,
    Gamma,
    LogNormal,
    Pareto,
    PointMass,
    PolyEndpoint,
    TailClassKind,
    TailClassTag,
    Uniform,
    Weibull,
    parse_distribution,
)
from .lundberg import (
    LundbergSolution,
    RootError,
    TailEstimate,
    cl_tail,
    gamma_tail_approximation,
    importance_tail,
    lundberg_bounds,
    lundberg_root,
    renyi_ks_distance,
    truncated_mgf,
)
from .process import (
    EmpiricalSummary,
    QuadratureParams,
    RestartSample,
    SimulationGuardError,
    bracketing_integrals,
    coupled_order_check,
    crude_tail,
    n_pmf_diagonal,
    parallel_makespan,
    run_once,
    semi_analytic_tail,
    simulate,
    stratified_tail,
    worker_generators,
)

__all__ = [name for name in dir() if not name.startswith("_")]
