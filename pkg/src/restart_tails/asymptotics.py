"""Closed-form tail asymptotics for the total completion time.

The tail of the total time is driven by how the task density decays against
the failure tail.  Matched exponential-type pairs give regularly varying
total-time tails with computable constants; mismatched pairs give only
logarithmic-scale predictions.  This module classifies a (task, failure)
pair into its regime, evaluates every sharp formula, decides moment
finiteness, and provides quadrature oracles for the integral estimates the
log-scale results rest on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .distributions import (
    Distribution,
    Exponential,
    Gamma,
    Pareto,
    PointMass,
    PolyEndpoint,
    TailClassKind,
    Uniform,
    Weibull,
    require_failure_role,
)
from .lundberg import cl_tail, lundberg_root
from .numerics import quad_piecewise


class Regime(Enum):
    DIAGONAL = "diagonal"            # identical task and failure laws
    GAMMA_CLASS = "gamma-class"      # both densities ~ c e^{-lam t} t^{a-1}
    WEIBULL_CLASS = "weibull-class"  # both densities ~ e^{-lam t^eta} t^a L(t)
    REG_VAR = "regularly-varying"    # both laws power-tailed, sharp constants
    EXP_EXP = "exp-density/exp-tail"        # log-scale: exp(-c log^theta x)
    POWER_POWER = "power-density/power-tail"  # log-scale: x^(-theta)
    POWER_EXP = "power-density/exp-tail"      # log-scale: log^(-theta) x
    EXP_POWER = "exp-density/power-tail"      # loglog-scale: exp(-x^theta)
    BOUNDED_SUPPORT = "bounded-task"
    FIXED_TASK = "fixed-task"


class AsymptoticMode(Enum):
    SHARP = "sharp"
    LOGARITHMIC = "logarithmic"
    LOGLOG = "log-logarithmic"


_MODE = {
    Regime.DIAGONAL: AsymptoticMode.SHARP,
    Regime.GAMMA_CLASS: AsymptoticMode.SHARP,
    Regime.WEIBULL_CLASS: AsymptoticMode.SHARP,
    Regime.REG_VAR: AsymptoticMode.SHARP,
    Regime.BOUNDED_SUPPORT: AsymptoticMode.SHARP,
    Regime.FIXED_TASK: AsymptoticMode.SHARP,
    Regime.EXP_EXP: AsymptoticMode.LOGARITHMIC,
    Regime.POWER_POWER: AsymptoticMode.LOGARITHMIC,
    Regime.POWER_EXP: AsymptoticMode.LOGARITHMIC,
    Regime.EXP_POWER: AsymptoticMode.LOGLOG,
}


@dataclass(frozen=True)
class RegimeCase:
    """Classified regime with its exponent and named constants."""

    case: Regime
    theta: float
    constants: dict
    mode: AsymptoticMode

    def __post_init__(self):
        if not (self.theta > 0.0):
            raise ValueError("theta must be positive")
        if _MODE[self.case] is not self.mode:
            raise ValueError(f"mode {self.mode} does not match case {self.case}")


class Verdict(Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class MomentVerdict:
    alpha: float
    verdict: Verdict

    def __post_init__(self):
        if not (self.alpha > 0.0):
            raise ValueError("alpha must be positive")


# ---------------------------------------------------------------------------
# sharp evaluators


def asymptote_diagonal(mu: float, x: float) -> float:
    """Tail when task and failure laws coincide: 1 / (mu * x), clamped."""
    if x <= 0.0:
        raise ValueError("x must be positive")
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    return min(1.0, 1.0 / (mu * x))


def asymptote_gamma_class(lam_f: float, alpha_f: float, c_f: float,
                          lam_g: float, alpha_g: float, c_g: float,
                          mu: float, x: float) -> float:
    """Sharp tail for densities of the form c * exp(-lam*t) * t^(alpha-1).

    The tail is c_H * log^omega(x) / x^(alpha_h) with alpha_h the rate ratio
    and omega = alpha_f - alpha_h*alpha_g + alpha_h - 1.  The constant is
    c_H = c_f * Gamma(alpha_h) * lam_g^(alpha_h - 1 - omega)
          / (mu^alpha_h * c_g^alpha_h).
    """
    for name, v in (("lam_f", lam_f), ("alpha_f", alpha_f), ("c_f", c_f),
                    ("lam_g", lam_g), ("alpha_g", alpha_g), ("c_g", c_g), ("mu", mu)):
        if v <= 0.0:
            raise ValueError(f"{name} must be positive")
    if x <= math.e:
        raise ValueError("x must exceed e so the logarithmic factor is positive")
    alpha_h = lam_f / lam_g
    omega = alpha_f - alpha_h * alpha_g + alpha_h - 1.0
    log_val = (
        math.log(c_f)
        + math.lgamma(alpha_h)
        + (alpha_h - 1.0 - omega) * math.log(lam_g)
        - alpha_h * (math.log(mu) + math.log(c_g))
        + omega * math.log(math.log(x))
        - alpha_h * math.log(x)
    )
    return math.exp(log_val)


def asymptote_weibull_class(lam_f: float, alpha_f: float, l_f: tuple,
                            lam_g: float, alpha_g: float, l_g: tuple,
                            eta: float, mu: float, x: float) -> float:
    """Sharp tail for densities exp(-lam * t^eta) * t^alpha * L(t) with a
    common stretch exponent eta and parametric slow factors L = (c, p)
    meaning c * log^p(t).

    The tail is L_H(x) / x^(alpha_h) with

        L_H(x) = Gamma(alpha_h) * lam_g^(alpha_h - 1 - omega) * eta^(alpha_h-1)
                 / mu^alpha_h * log^omega(x)
                 * L_f(log^(1/eta) x) / L_g^(alpha_h)(log^(1/eta) x),

        omega = alpha_f/eta + alpha_h*(eta - alpha_g - 1)/eta + 1/eta - 1.
    """
    if eta <= 0.0 or lam_f <= 0.0 or lam_g <= 0.0 or mu <= 0.0:
        raise ValueError("eta, rates, and mu must be positive")
    if x <= math.e:
        raise ValueError("x must exceed e so inner logarithms are positive")
    c_f, p_f = float(l_f[0]), float(l_f[1])
    c_g, p_g = float(l_g[0]), float(l_g[1])
    if c_f <= 0.0 or c_g <= 0.0:
        raise ValueError("slow-factor coefficients must be positive")
    alpha_h = lam_f / lam_g
    omega = alpha_f / eta + alpha_h * (eta - alpha_g - 1.0) / eta + 1.0 / eta - 1.0
    lx = math.log(x)
    log_arg = math.log(lx) / eta      # log of log^(1/eta) x
    log_lf = math.log(c_f) + (p_f * math.log(log_arg) if p_f != 0.0 else 0.0)
    log_lg = math.log(c_g) + (p_g * math.log(log_arg) if p_g != 0.0 else 0.0)
    log_val = (
        math.lgamma(alpha_h)
        + (alpha_h - 1.0 - omega) * math.log(lam_g)
        + (alpha_h - 1.0) * math.log(eta)
        - alpha_h * math.log(mu)
        + omega * math.log(lx)
        + log_lf
        - alpha_h * log_lg
        - alpha_h * lx
    )
    return math.exp(log_val)


def asymptote_regvar(alpha_f: float, l_f: tuple, alpha_g: float, l_g: tuple,
                     mu: float, x: float) -> float:
    """Sharp tail for power-law densities L(t) / t^(1+alpha) with parametric
    slow factors L = (c, p) meaning c * log^p(t).

    The tail is L_H(x) / x^(alpha_h), alpha_h = alpha_f / alpha_g, with

        L_H(x) = Gamma(alpha_h) * alpha_g^(alpha_h - 1) / mu^alpha_h
                 * L_f(x^(1/alpha_g)) / L_g^(alpha_h)(x^(1/alpha_g)).
    """
    if alpha_f <= 0.0 or alpha_g <= 0.0 or mu <= 0.0:
        raise ValueError("tail indices and mu must be positive")
    if x <= 1.0:
        raise ValueError("x must exceed 1")
    c_f, p_f = float(l_f[0]), float(l_f[1])
    c_g, p_g = float(l_g[0]), float(l_g[1])
    if c_f <= 0.0 or c_g <= 0.0:
        raise ValueError("slow-factor coefficients must be positive")
    alpha_h = alpha_f / alpha_g
    lx = math.log(x)
    log_arg = lx / alpha_g            # log of x^(1/alpha_g)
    if (p_f != 0.0 or p_g != 0.0) and log_arg <= 0.0:
        raise ValueError("x too small for the logarithmic slow factor")
    log_lf = math.log(c_f) + (p_f * math.log(log_arg) if p_f != 0.0 else 0.0)
    log_lg = math.log(c_g) + (p_g * math.log(log_arg) if p_g != 0.0 else 0.0)
    log_val = (
        math.lgamma(alpha_h)
        + (alpha_h - 1.0) * math.log(alpha_g)
        - alpha_h * math.log(mu)
        + log_lf
        - alpha_h * log_lg
        - alpha_h * lx
    )
    return math.exp(log_val)


def asymptote_bounded(task: Distribution, failure: Distribution, x: float) -> float:
    """Sharp tail when the task density behaves like A*(t0 - t)^a at a finite
    endpoint t0 with failure mass remaining beyond it:

        A * B^a * tail_G(t0) * Gamma(a+1)
        / (gamma * exp(a*gamma*t0) * g(t0)^(a+1)) * exp(-gamma*x) / x^(a+1),

    with gamma, B solved at t0.
    """
    if isinstance(task, Uniform):
        amp = 1.0 / (task.upper - task.lower)
        expo = 0.0
        t0 = task.upper
    elif isinstance(task, PolyEndpoint):
        amp, expo, t0 = task.amplitude, task.exponent, task.endpoint
    else:
        raise ValueError("bounded-endpoint asymptote needs a Uniform or PolyEndpoint task law")
    if x <= t0:
        raise ValueError("x must exceed the task endpoint")
    if float(failure.tail(t0)) <= 0.0:
        raise ValueError("failure tail vanishes at the task endpoint; no geometric regime")
    sol = lundberg_root(failure, t0)
    g_t0 = float(failure.density(t0))
    log_val = (
        math.log(amp)
        + expo * math.log(sol.tilted_mean)
        + float(failure.log_tail(t0))
        + math.lgamma(expo + 1.0)
        - sol.log_gamma
        - expo * sol.gamma * t0
        - (expo + 1.0) * math.log(g_t0)
        - sol.gamma * x
        - (expo + 1.0) * math.log(x)
    )
    return math.exp(log_val)


def asymptote_fixed(t0: float, failure: Distribution, x: float) -> float:
    """Sharp tail for a deterministic task length t0:
    C(t0) * exp(gamma(t0) * (t0 - x))."""
    if t0 <= 0.0:
        raise ValueError("t0 must be positive")
    if x < t0:
        raise ValueError("x must be at least t0")
    if float(failure.tail(t0)) <= 0.0:
        raise ValueError("failure tail vanishes at t0")
    sol = lundberg_root(failure, t0)
    return math.exp(sol.log_cl_constant + sol.gamma * (t0 - x))


# ---------------------------------------------------------------------------
# classification


def _sharp_exp_params(dist: Distribution):
    """(rate, alpha, c) of a density c * exp(-rate*t) * t^(alpha-1), else None."""
    if isinstance(dist, Exponential):
        return (dist.rate, 1.0, dist.rate)
    if isinstance(dist, Gamma):
        return (dist.rate, dist.shape, dist.rate**dist.shape / math.gamma(dist.shape))
    if isinstance(dist, Weibull) and dist.shape == 1.0:
        return (1.0 / dist.scale, 1.0, 1.0 / dist.scale)
    return None


def _sharp_weibull_params(dist: Distribution):
    """(rate, tpow, (c, 0), eta) of a density c * t^tpow * exp(-rate*t^eta)."""
    if isinstance(dist, Weibull):
        c, s = dist.shape, dist.scale
        return (s**-c, c - 1.0, (c / s**c, 0.0), c)
    p = _sharp_exp_params(dist)
    if p is not None:
        rate, alpha, c = p
        return (rate, alpha - 1.0, (c, 0.0), 1.0)
    return None


def classify(task: Distribution, failure: Distribution) -> RegimeCase:
    """Classify a (task, failure) pair into its tail regime.

    Precedence: identical laws with finite mean; degenerate task; bounded
    task support; matched sharp families; otherwise the coarse class table.
    Log-normal laws fall outside the taxonomy and are rejected.
    """
    require_failure_role(failure)
    if task == failure:
        try:
            mu = 1.0 / failure.mean()
        except ValueError:
            mu = None
        if mu is not None:
            return RegimeCase(Regime.DIAGONAL, theta=1.0, constants={"mu": mu},
                              mode=AsymptoticMode.SHARP)

    if isinstance(task, PointMass):
        sol = lundberg_root(failure, task.location)
        return RegimeCase(
            Regime.FIXED_TASK,
            theta=sol.gamma,
            constants={"t0": task.location, "gamma": sol.gamma,
                       "cl_constant": sol.cl_constant},
            mode=AsymptoticMode.SHARP,
        )

    tag_f = task.tail_class("task")
    tag_g = failure.tail_class("failure")
    if tag_f.kind is TailClassKind.UNCLASSIFIED or tag_g.kind is TailClassKind.UNCLASSIFIED:
        raise ValueError("distribution outside the supported tail taxonomy (log-normal)")
    if tag_g.kind is TailClassKind.BOUNDED:
        raise ValueError(
            "bounded failure support with an unbounded or wider task law has no tail regime"
        )

    if tag_f.kind is TailClassKind.BOUNDED:
        if isinstance(task, Uniform):
            amp, expo, t0 = 1.0 / (task.upper - task.lower), 0.0, task.upper
        elif isinstance(task, PolyEndpoint):
            amp, expo, t0 = task.amplitude, task.exponent, task.endpoint
        else:  # pragma: no cover - no other bounded family
            raise ValueError("unsupported bounded task family")
        sol = lundberg_root(failure, t0)
        return RegimeCase(
            Regime.BOUNDED_SUPPORT,
            theta=expo + 1.0,
            constants={"amplitude": amp, "exponent": expo, "t0": t0, "gamma": sol.gamma},
            mode=AsymptoticMode.SHARP,
        )

    # matched sharp pairs
    if tag_f.kind is TailClassKind.EXP_DENSITY and tag_g.kind is TailClassKind.EXP_TAIL \
            and tag_f.power == tag_g.power:
        try:
            mu = 1.0 / failure.mean()
        except ValueError:
            mu = None
        if mu is not None:
            if tag_f.power == 1.0:
                pf = _sharp_exp_params(task)
                pg = _sharp_exp_params(failure)
                if pf is not None and pg is not None:
                    lam_f, alpha_f, c_f = pf
                    lam_g, alpha_g, c_g = pg
                    alpha_h = lam_f / lam_g
                    omega = alpha_f - alpha_h * alpha_g + alpha_h - 1.0
                    return RegimeCase(
                        Regime.GAMMA_CLASS,
                        theta=alpha_h,
                        constants={"lam_f": lam_f, "alpha_f": alpha_f, "c_f": c_f,
                                   "lam_g": lam_g, "alpha_g": alpha_g, "c_g": c_g,
                                   "mu": mu, "omega": omega},
                        mode=AsymptoticMode.SHARP,
                    )
            else:
                pf = _sharp_weibull_params(task)
                pg = _sharp_weibull_params(failure)
                if pf is not None and pg is not None:
                    lam_f, a_f, l_f, eta = pf
                    lam_g, a_g, l_g, _ = pg
                    alpha_h = lam_f / lam_g
                    omega = a_f / eta + alpha_h * (eta - a_g - 1.0) / eta + 1.0 / eta - 1.0
                    return RegimeCase(
                        Regime.WEIBULL_CLASS,
                        theta=alpha_h,
                        constants={"lam_f": lam_f, "alpha_f": a_f, "l_f": l_f,
                                   "lam_g": lam_g, "alpha_g": a_g, "l_g": l_g,
                                   "eta": eta, "mu": mu, "omega": omega},
                        mode=AsymptoticMode.SHARP,
                    )

    if tag_f.kind is TailClassKind.POWER_DENSITY and tag_g.kind is TailClassKind.POWER_TAIL \
            and isinstance(task, Pareto) and isinstance(failure, Pareto):
        try:
            mu = 1.0 / failure.mean()
        except ValueError:
            mu = None
        if mu is not None:
            return RegimeCase(
                Regime.REG_VAR,
                theta=tag_f.decay / tag_g.decay,
                constants={"alpha_f": tag_f.decay, "l_f": task.slow_factor(),
                           "alpha_g": tag_g.decay, "l_g": failure.slow_factor(),
                           "mu": mu},
                mode=AsymptoticMode.SHARP,
            )

    # coarse class table
    if tag_f.kind is TailClassKind.EXP_DENSITY and tag_g.kind is TailClassKind.EXP_TAIL:
        theta = tag_f.power / tag_g.power
        c11 = tag_f.decay / tag_g.decay**theta
        return RegimeCase(Regime.EXP_EXP, theta=theta, constants={"c11": c11},
                          mode=AsymptoticMode.LOGARITHMIC)
    if tag_f.kind is TailClassKind.POWER_DENSITY and tag_g.kind is TailClassKind.POWER_TAIL:
        return RegimeCase(Regime.POWER_POWER, theta=tag_f.decay / tag_g.decay,
                          constants={}, mode=AsymptoticMode.LOGARITHMIC)
    if tag_f.kind is TailClassKind.POWER_DENSITY and tag_g.kind is TailClassKind.EXP_TAIL:
        return RegimeCase(Regime.POWER_EXP, theta=tag_f.decay / tag_g.power,
                          constants={}, mode=AsymptoticMode.LOGARITHMIC)
    if tag_f.kind is TailClassKind.EXP_DENSITY and tag_g.kind is TailClassKind.POWER_TAIL:
        theta = tag_f.power / (tag_g.decay + tag_f.power)
        return RegimeCase(Regime.EXP_POWER, theta=theta, constants={},
                          mode=AsymptoticMode.LOGLOG)
    raise ValueError(f"no regime for tags {tag_f.kind} / {tag_g.kind}")  # pragma: no cover


def evaluate_regime(case: RegimeCase, x: float) -> float:
    """Tail value predicted by a classified regime at threshold x.

    Sharp modes return the calibrated formula; logarithmic modes return the
    bare scale exp(-predicted log), meaningful only for log-ratio trends.
    """
    c = case.constants
    if case.case is Regime.DIAGONAL:
        return asymptote_diagonal(c["mu"], x)
    if case.case is Regime.GAMMA_CLASS:
        return asymptote_gamma_class(c["lam_f"], c["alpha_f"], c["c_f"],
                                     c["lam_g"], c["alpha_g"], c["c_g"], c["mu"], x)
    if case.case is Regime.WEIBULL_CLASS:
        return asymptote_weibull_class(c["lam_f"], c["alpha_f"], c["l_f"],
                                       c["lam_g"], c["alpha_g"], c["l_g"],
                                       c["eta"], c["mu"], x)
    if case.case is Regime.REG_VAR:
        return asymptote_regvar(c["alpha_f"], c["l_f"], c["alpha_g"], c["l_g"], c["mu"], x)
    if case.case in (Regime.EXP_EXP, Regime.POWER_POWER, Regime.POWER_EXP):
        return math.exp(-log_asymptote(case, x))
    if case.case is Regime.EXP_POWER:
        return math.exp(-math.exp(log_asymptote(case, x)))
    raise ValueError(f"evaluate_regime does not apply to {case.case}")


def evaluate_regime_with(case: RegimeCase, task: Distribution,
                         failure: Distribution, x: float) -> float:
    """Like evaluate_regime but resolves the endpoint cases, which need the
    distributions themselves."""
    if case.case is Regime.BOUNDED_SUPPORT:
        return asymptote_bounded(task, failure, x)
    if case.case is Regime.FIXED_TASK:
        return asymptote_fixed(case.constants["t0"], failure, x)
    return evaluate_regime(case, x)


def log_asymptote(case: RegimeCase, x: float) -> float:
    """Predicted -log tail (logarithmic modes) or log(-log tail) (loglog).

    The caller must compare at the matching scale: ratios of -log tails for
    logarithmic cases, ratios of log(-log tail) for the loglog case.
    """
    if case.case is Regime.EXP_EXP:
        if x <= 1.0:
            raise ValueError("x must exceed 1")
        return case.constants["c11"] * math.log(x) ** case.theta
    if case.case is Regime.POWER_POWER:
        if x <= math.e:
            raise ValueError("x must exceed e")
        return case.theta * math.log(x)
    if case.case is Regime.POWER_EXP:
        if x <= math.exp(math.e):
            raise ValueError("x must exceed e^e")
        return case.theta * math.log(math.log(x))
    if case.case is Regime.EXP_POWER:
        if x <= 1.0:
            raise ValueError("x must exceed 1")
        return case.theta * math.log(x)
    raise ValueError(f"log_asymptote only applies to logarithmic-scale cases, not {case.case}")


# ---------------------------------------------------------------------------
# moment finiteness


# asymptotic expansion of log density: -lam * t^eta - qlog2 * log(t)^2
# + tpow * log(t) + O(1).  Bounded support handled separately.
def _log_density_shape(dist: Distribution):
    if isinstance(dist, Exponential):
        return {"eta": 1.0, "lam": dist.rate, "qlog2": 0.0, "tpow": 0.0}
    if isinstance(dist, Gamma):
        return {"eta": 1.0, "lam": dist.rate, "qlog2": 0.0, "tpow": dist.shape - 1.0}
    if isinstance(dist, Weibull):
        return {"eta": dist.shape, "lam": dist.scale**-dist.shape, "qlog2": 0.0,
                "tpow": dist.shape - 1.0}
    if isinstance(dist, Pareto):
        return {"eta": 0.0, "lam": 0.0, "qlog2": 0.0, "tpow": -(dist.index + 1.0),
                "loglog": dist.log_power}
    from .distributions import LogNormal

    if isinstance(dist, LogNormal):
        sg = dist.log_scale
        return {"eta": 0.0, "lam": 0.0, "qlog2": 1.0 / (2.0 * sg * sg),
                "tpow": dist.log_location / (sg * sg) - 1.0}
    return None  # bounded support


def _scale_terms(shape_f, shape_g, r: float):
    """Signed coefficient differences of log g - r * log f at each asymptotic
    scale, largest scale first, paired with the log-f coefficient: decreasing
    r by an infinitesimal eps shifts each difference by eps times that
    coefficient."""
    etas = sorted({shape_f["eta"], shape_g["eta"]} - {0.0}, reverse=True)
    terms = []
    for eta in etas:
        cf = -shape_f["lam"] if shape_f["eta"] == eta else 0.0
        cg = -shape_g["lam"] if shape_g["eta"] == eta else 0.0
        terms.append((cg - r * cf, cf))
    cf = -shape_f.get("qlog2", 0.0)
    cg = -shape_g.get("qlog2", 0.0)
    terms.append((cg - r * cf, cf))
    cf = shape_f["tpow"]
    cg = shape_g["tpow"]
    terms.append((cg - r * cf, cf))
    cf = shape_f.get("loglog", 0.0)
    cg = shape_g.get("loglog", 0.0)
    terms.append((cg - r * cf, cf))
    return terms


def _limit_sign(terms, perturbed: bool) -> int:
    """Sign of lim (log g - r log f): +1 (to +inf), -1 (to -inf), 0 (finite)."""
    for value, f_coeff in terms:
        v = value
        if perturbed and v == 0.0 and f_coeff != 0.0:
            v = f_coeff  # effect of an infinitesimal decrease of r
        if v > 0.0:
            return 1
        if v < 0.0:
            return -1
    return 0


def moment_classify(task: Distribution, failure: Distribution, alpha: float) -> MomentVerdict:
    """Decide finiteness of the alpha-th moment of the total time.

    The sufficient conditions compare the failure density against powers of
    the task density at infinity: the moment is finite when g dominates
    f^(1/alpha - eps) for some eps > 0, infinite when g is dominated by
    f^(1/alpha).  The comparison is resolved exactly from the families'
    asymptotic log-density expansions; bounded supports reduce to whether
    completion is guaranteed.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    require_failure_role(failure)
    shape_f = _log_density_shape(task)
    shape_g = _log_density_shape(failure)

    if shape_f is None:  # bounded task support
        f_hi = task.support()[1]
        if float(failure.tail(f_hi)) > 0.0 or (shape_g is not None):
            # failures can always outlast the longest task
            return MomentVerdict(alpha, Verdict.FINITE)
        return MomentVerdict(alpha, Verdict.INFINITE)
    if shape_g is None:  # bounded failures, unbounded tasks: completion may stall
        return MomentVerdict(alpha, Verdict.INFINITE)

    r = 1.0 / alpha
    terms = _scale_terms(shape_f, shape_g, r)
    if _limit_sign(terms, perturbed=False) <= 0:
        return MomentVerdict(alpha, Verdict.INFINITE)
    if _limit_sign(terms, perturbed=True) >= 0:
        return MomentVerdict(alpha, Verdict.FINITE)
    return MomentVerdict(alpha, Verdict.UNDETERMINED)


# ---------------------------------------------------------------------------
# integral oracles


class IntegralKind(Enum):
    EXP_TAIL_EXP_DENSITY = "exp-tail-exp-density"      # -> exp(-a b^(-eta/gam) log^(eta/gam) z)
    POWER_POWER_KERNEL = "power-power"                 # -> z^(-alpha/beta)
    EXP_TAIL_POWER_DENSITY = "exp-tail-power-density"  # -> log^(-a/gam) z
    POWER_TAIL_EXP_DENSITY = "power-tail-exp-density"  # -> exp(-c z^(eta/(b+eta)))


@dataclass(frozen=True)
class IntegralCheck:
    """Quadrature value of a kernel integral and its predicted asymptote,
    both in log form to survive extreme ranges."""

    kind: IntegralKind
    z: float
    log_value: float
    log_predicted: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    @property
    def predicted(self) -> float:
        return math.exp(self.log_predicted)


def saddle_constants_power_exp(a: float, b: float, eta: float) -> tuple[float, float]:
    """Constant of the power-tail/exp-density kernel, two ways.

    Returns (grouped, direct): the grouped closed form
    a^(1-theta) * ((eta/b)^(1-theta) + (b/eta)^theta) and the direct value of
    the exponent function at its minimizer t1 = (b z / (a eta))^(1/(b+eta)),
    divided by z^theta.  The two agree; both are reported for transparency.
    """
    theta = eta / (b + eta)
    grouped = a ** (1.0 - theta) * ((eta / b) ** (1.0 - theta) + (b / eta) ** theta)
    t1_unit = (b / (a * eta)) ** (1.0 / (b + eta))   # minimizer at z = 1
    direct = t1_unit ** (-b) + a * t1_unit**eta
    return (grouped, direct)


def _log_integral(neg_exponent, t0: float, landmarks) -> float:
    """log of integral exp(-phi(t)) dt with phi >= 0 potentially huge."""
    base = np.asarray(landmarks, dtype=float)
    # geometric ladder so slowly decaying integrands are resolved far out
    ladder = base.max() * 4.0 ** np.arange(1, 31)
    probe = np.unique(np.concatenate([[t0], base, ladder]))
    probe = probe[probe >= t0]
    values = []
    for t in probe:
        try:
            v = float(neg_exponent(t))
        except (ZeroDivisionError, OverflowError):
            v = math.inf
        if math.isfinite(v):
            values.append(v)
    shift = min(values)

    def fn(t):
        return math.exp(-(neg_exponent(t) - shift))

    # the ladder top vastly exceeds every relevant scale; cut there rather
    # than handing quadpack an unbounded slowly decaying tail
    val = quad_piecewise(fn, t0, float(probe[-1]), landmarks=probe[1:-1], epsrel=1e-10)
    return math.log(val) - shift


def integral_oracle(kind: IntegralKind, params: dict, z: float) -> IntegralCheck:
    """Evaluate one of the kernel integrals behind the log-scale tail results
    by adaptive quadrature, together with its claimed asymptote.

    Kinds and parameter records:
      EXP_TAIL_EXP_DENSITY:   {a, b, gam, eta, t0}   integrand
          exp(-exp(-b t^gam) z - a t^eta)
      POWER_POWER_KERNEL:     {alpha, beta, t0}      integrand
          exp(-t^-beta z) / t^(alpha+1)
      EXP_TAIL_POWER_DENSITY: {a, b, gam, t0}        integrand
          exp(-exp(-b t^gam) z - (a+1) log t)
      POWER_TAIL_EXP_DENSITY: {a, b, eta, t0}        integrand
          exp(-t^-b z - a t^eta)
    """
    if z <= math.e:
        raise ValueError("z must exceed e")
    t0 = float(params.get("t0", 1.0))
    singular_at_zero = kind in (IntegralKind.POWER_POWER_KERNEL,
                                IntegralKind.EXP_TAIL_POWER_DENSITY)
    if t0 < 0.0 or (singular_at_zero and t0 <= 0.0):
        raise ValueError("t0 must be positive")

    if kind is IntegralKind.EXP_TAIL_EXP_DENSITY:
        a, b, gam, eta = (float(params[k]) for k in ("a", "b", "gam", "eta"))
        t1 = (math.log(z) / b) ** (1.0 / gam)

        def phi(t):
            return math.exp(-b * t**gam) * z + a * t**eta

        log_val = _log_integral(phi, t0, [t1, 2.0 * t1, 4.0 * t1])
        log_pred = -a * b ** (-eta / gam) * math.log(z) ** (eta / gam)
    elif kind is IntegralKind.POWER_POWER_KERNEL:
        alpha, beta = float(params["alpha"]), float(params["beta"])
        t1 = (z / max(alpha / beta, 1.0)) ** (1.0 / beta)

        def phi(t):
            return t**-beta * z + (alpha + 1.0) * math.log(t)

        log_val = _log_integral(phi, t0, [t1, 2.0 * t1, 8.0 * t1])
        log_pred = -(alpha / beta) * math.log(z)
    elif kind is IntegralKind.EXP_TAIL_POWER_DENSITY:
        a, b, gam = (float(params[k]) for k in ("a", "b", "gam"))
        t1 = (math.log(z) / b) ** (1.0 / gam)

        def phi(t):
            return math.exp(-b * t**gam) * z + (a + 1.0) * math.log(t)

        log_val = _log_integral(phi, t0, [t1, 2.0 * t1, 8.0 * t1])
        log_pred = -(a / gam) * math.log(math.log(z))
    elif kind is IntegralKind.POWER_TAIL_EXP_DENSITY:
        a, b, eta = (float(params[k]) for k in ("a", "b", "eta"))
        theta = eta / (b + eta)
        t1 = (b * z / (a * eta)) ** (1.0 / (b + eta))

        def phi(t):
            return t**-b * z + a * t**eta

        log_val = _log_integral(phi, t0, [t1, 2.0 * t1, 4.0 * t1])
        _, direct = saddle_constants_power_exp(a, b, eta)
        log_pred = -direct * z**theta
    else:  # pragma: no cover
        raise ValueError(f"unknown kind {kind}")
    return IntegralCheck(kind=kind, z=float(z), log_value=log_val, log_predicted=log_pred)
