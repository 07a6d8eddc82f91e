"""Geometric-sum tail machinery.

Conditioned on a task length t, the lost time is a compound geometric sum of
failure durations truncated below t.  Its tail is governed by the positive
root gamma(t) of the truncated exponential-moment equation

    integral_0^t exp(gamma * y) g(y) dy = 1,

with the classical constant C(t) = tail_G(t) / (gamma(t) * B(t)) where B(t)
is the tilted first moment.  This module solves for the root, evaluates the
point approximation C(t) * exp(-gamma(t) * u) and its two-sided deterministic
bounds, and provides an exponentially tilted importance-sampling estimator
for the exact tail probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    Distribution,
    Exponential,
    Uniform,
    require_failure_role,
    require_finite_failure_mean,
    sum_truncated_samples,
)
from .numerics import BracketingError, increasing_root, quad_piecewise

# Below this failure-tail mass the root equation is solved by series expansion
# instead of bracketed iteration: the residual of the moment equation falls
# under floating-point resolution there.
SMALL_TAIL_THRESHOLD = 1e-8


class RootError(RuntimeError):
    """Raised when the truncated moment equation has no usable root."""


@dataclass(frozen=True)
class LundbergSolution:
    """Root and constants of the truncated moment equation at task length t.

    ``gamma`` may underflow to zero extremely far into the failure tail;
    ``log_gamma`` stays finite and is the value to interpolate.
    """

    t: float
    gamma: float
    log_gamma: float
    tilted_mean: float        # B(t): first moment under the tilted increment law
    cl_constant: float        # C(t): prefactor of the exponential tail estimate
    log_cl_constant: float
    residual: float           # |moment equation at the root - 1|


@dataclass(frozen=True)
class TailEstimate:
    """Tail probability estimate with error information.

    ``stderr`` is zero for deterministic methods.  ``lower``/``upper`` are
    deterministic envelopes when available, else the trivial [0, 1].
    ``trunc_mass`` reports probability mass omitted by truncation policies.
    """

    x: float
    point: float
    stderr: float
    lower: float
    upper: float
    n_used: int
    trunc_mass: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0 + 1e-12):
            raise ValueError("bounds must satisfy 0 <= lower <= upper <= 1")
        if not (0.0 <= self.point <= 1.0) or self.stderr < 0.0:
            raise ValueError("point must be in [0,1] and stderr >= 0")


# ---------------------------------------------------------------------------
# truncated exponential moments


_HUGE = 1e300


def _exp_mgf_mean(rate: float, t: float, gamma: float) -> tuple[float, float]:
    # closed forms for exponential failure times
    d = gamma - rate
    if d * t > 690.0:
        return _HUGE, _HUGE
    if abs(d * t) < 1e-8:
        z = d * t
        mgf = rate * t * (1.0 + z / 2.0 + z * z / 6.0)
        mean = rate * t * t / 2.0 * (1.0 + 2.0 * z / 3.0 + z * z / 4.0)
        return mgf, mean
    e = math.expm1(d * t)
    mgf = rate * e / d
    mean = rate * (t * (e + 1.0) / d - e / (d * d))
    return mgf, mean


def _uniform_mgf_mean(lo: float, hi: float, t: float, gamma: float) -> tuple[float, float]:
    c = min(t, hi)
    width = hi - lo
    if c <= lo:
        return 0.0, 0.0
    if gamma * c > 690.0:
        return _HUGE, _HUGE
    if abs(gamma) * max(abs(c), abs(lo)) < 1e-8:
        mgf = (c - lo) / width
        mean = (c * c - lo * lo) / (2.0 * width)
        return mgf, mean
    g = gamma
    mgf = (math.exp(g * c) - math.exp(g * lo)) / (g * width)
    mean = ((g * c - 1.0) * math.exp(g * c) - (g * lo - 1.0) * math.exp(g * lo)) / (g * g * width)
    return mgf, mean


def _quad_mgf(failure: Distribution, t: float, gamma: float) -> float:
    if gamma * t > 690.0:
        return _HUGE
    lo, _ = failure.support()
    return quad_piecewise(
        lambda y: math.exp(gamma * y) * float(failure.density(y)),
        max(lo, 0.0),
        t,
        landmarks=(0.5 * (max(lo, 0.0) + t),),
        epsrel=1e-12,
    )


def _quad_tilted_mean(failure: Distribution, t: float, gamma: float) -> float:
    if gamma * t > 690.0:
        return _HUGE
    lo, _ = failure.support()
    return quad_piecewise(
        lambda y: y * math.exp(gamma * y) * float(failure.density(y)),
        max(lo, 0.0),
        t,
        landmarks=(0.5 * (max(lo, 0.0) + t),),
        epsrel=1e-12,
    )


def truncated_mgf(failure: Distribution, t: float, gamma: float) -> float:
    """Exponential moment of the failure law restricted to [0, t]."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    require_failure_role(failure)
    if float(failure.cdf(t)) <= 0.0:
        raise RootError(f"failure distribution has no mass below t={t:g}")
    if isinstance(failure, Exponential):
        return _exp_mgf_mean(failure.rate, t, gamma)[0]
    if isinstance(failure, Uniform):
        return _uniform_mgf_mean(failure.lower, failure.upper, t, gamma)[0]
    return _quad_mgf(failure, t, gamma)


def _tilted_mean(failure: Distribution, t: float, gamma: float) -> float:
    if isinstance(failure, Exponential):
        return _exp_mgf_mean(failure.rate, t, gamma)[1]
    if isinstance(failure, Uniform):
        return _uniform_mgf_mean(failure.lower, failure.upper, t, gamma)[1]
    return _quad_tilted_mean(failure, t, gamma)


# ---------------------------------------------------------------------------
# the root


def _small_tail_solution(failure: Distribution, t: float) -> LundbergSolution:
    # Series solve of the moment equation when tail_G(t) is negligible:
    # gamma * m1 + gamma^2 * m2 / 2 ~= tail_G(t).
    log_bar = float(failure.log_tail(t))
    m1 = failure.partial_mean(t)
    m2 = failure.partial_second_moment(t)
    bar = math.exp(log_bar)
    corr = min(bar * m2 / (2.0 * m1 * m1), 0.5)
    log_gamma = log_bar - math.log(m1) + math.log1p(-corr)
    gamma = math.exp(log_gamma)
    tilted = m1 + gamma * m2
    log_c = log_bar - log_gamma - math.log(tilted)
    mgf = truncated_mgf(failure, t, gamma)
    return LundbergSolution(
        t=float(t),
        gamma=gamma,
        log_gamma=log_gamma,
        tilted_mean=tilted,
        cl_constant=math.exp(log_c),
        log_cl_constant=log_c,
        residual=abs(mgf - 1.0),
    )


def lundberg_root(failure: Distribution, t: float) -> LundbergSolution:
    """Solve the truncated moment equation at task length t.

    Requires 0 < G(t) < 1: with no failure mass below t the lost time is
    identically zero, and with no mass above t the attempt count is improper.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    require_failure_role(failure)
    mass = float(failure.cdf(t))
    if mass <= 0.0:
        raise RootError(f"failure distribution has no mass below t={t:g}")
    log_bar = float(failure.log_tail(t))
    if log_bar == -math.inf:
        raise RootError(
            f"failure tail vanishes at t={t:g}; geometric attempt count is improper "
            "(bounded-support machinery applies instead)"
        )
    if log_bar < math.log(SMALL_TAIL_THRESHOLD):
        return _small_tail_solution(failure, t)

    if mass < 1e-300:
        raise RootError(f"failure mass below t={t:g} is too small to resolve a root")
    m1 = failure.partial_mean(t)
    bar = math.exp(log_bar)

    def objective(g: float) -> float:
        return truncated_mgf(failure, t, g) - 1.0

    # the root satisfies gamma * t >= log(1/G(t)); the linearized estimate
    # 2*tail/m1 is sharp for large t but overshoots wildly for small t
    hi0 = min(2.0 * bar / m1, max(math.log(1.0 / mass), 1.0) / t)
    hi0 = max(hi0, 1e-3 / t)
    try:
        gamma = increasing_root(objective, hi0)
    except BracketingError as exc:
        raise RootError(f"bracket expansion failed at t={t:g}: {exc}") from exc
    tilted = _tilted_mean(failure, t, gamma)
    log_gamma = math.log(gamma)
    log_c = log_bar - log_gamma - math.log(tilted)
    return LundbergSolution(
        t=float(t),
        gamma=gamma,
        log_gamma=log_gamma,
        tilted_mean=tilted,
        cl_constant=math.exp(log_c),
        log_cl_constant=log_c,
        residual=abs(objective(gamma)),
    )


# ---------------------------------------------------------------------------
# tail evaluations


def lundberg_bounds(sol: LundbergSolution, u: float) -> tuple[float, float]:
    """Deterministic envelope for the lost-time tail beyond u."""
    if u < 0.0:
        raise ValueError("u must be nonnegative")
    lower = math.exp(-sol.gamma * (sol.t + u))
    upper = min(1.0, math.exp(-sol.gamma * u))
    return (min(lower, upper), upper)


def cl_tail(sol: LundbergSolution, u: float) -> float:
    """Exponential point approximation of the lost-time tail beyond u."""
    if u < 0.0:
        raise ValueError("u must be nonnegative")
    return min(1.0, math.exp(sol.log_cl_constant - sol.gamma * u))


def gamma_tail_approximation(failure: Distribution, t: float) -> float:
    """Large-t closed form for the root: failure tail divided by its mean."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    mean = require_finite_failure_mean(failure)
    return float(failure.tail(t)) / mean


# ---------------------------------------------------------------------------
# tilted increment sampling


def _tilted_increments(failure: Distribution, sol: LundbergSolution, k: int,
                       rng: np.random.Generator) -> np.ndarray:
    """k draws from the density exp(gamma*y) g(y) on [0, t]."""
    t, gamma = sol.t, sol.gamma
    if isinstance(failure, Exponential):
        d = gamma - failure.rate
        u = rng.random(k)
        if abs(d * t) < 1e-10:
            return u * t
        # inverse of the tilted cdf (1 - e^{d y}) / (1 - e^{d t})
        return np.log1p(u * math.expm1(d * t)) / d
    # exact rejection against the truncated law with envelope e^{gamma t}
    mass = float(failure.cdf(t))
    out = np.empty(k)
    filled = 0
    while filled < k:
        need = k - filled
        batch = max(256, int(need * math.exp(gamma * t) * 1.2))
        batch = min(batch, 4 * need + 4096, 1 << 22)
        y = failure._ppf(mass * (1.0 - rng.random(batch)))
        accept = rng.random(batch) < np.exp(-gamma * (t - y))
        y = y[accept]
        take = min(need, y.size)
        out[filled:filled + take] = y[:take]
        filled += take
    return out


def importance_tail(failure: Distribution, t: float, u: float, n: int,
                    rng: np.random.Generator) -> TailEstimate:
    """Importance-sampling estimate of the lost-time tail beyond u.

    Runs the random walk under the tilted increment law until it first
    crosses u; each path contributes exp(-gamma * overshoot sum), which makes
    the estimator unbiased for the geometric-sum tail.  Deterministic bounds
    from the same root fill the envelope fields.
    """
    if u < 0.0:
        raise ValueError("u must be nonnegative")
    if n < 1:
        raise ValueError("n must be at least 1")
    sol = lundberg_root(failure, t)
    gamma = sol.gamma
    totals = np.zeros(n)
    weights = np.empty(n)
    active = np.arange(n)
    while active.size:
        inc = _tilted_increments(failure, sol, active.size, rng)
        totals[active] += inc
        done = totals[active] > u
        idx = active[done]
        weights[idx] = np.exp(-gamma * totals[idx])
        active = active[~done]
    point = float(weights.mean())
    stderr = float(weights.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    lower, upper = lundberg_bounds(sol, u)
    return TailEstimate(
        x=float(u),
        point=min(point, 1.0),
        stderr=stderr,
        lower=lower,
        upper=upper,
        n_used=int(n),
    )


# ---------------------------------------------------------------------------
# weak-convergence diagnostic


def renyi_ks_distance(failure: Distribution, t: float, n: int,
                      rng: np.random.Generator) -> float:
    """Kolmogorov-Smirnov distance of the rescaled lost time from Exp(1).

    Samples the geometric sum directly (failure count geometric in the tail
    mass at t, increments truncated below t), rescales by tail_G(t) / mean,
    and compares against the standard exponential cdf.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    mean = require_finite_failure_mean(failure)
    mass = float(failure.cdf(t))
    bar = float(failure.tail(t))
    if bar <= 0.0 or mass <= 0.0:
        raise ValueError("need 0 < G(t) < 1 for a proper geometric sum")
    counts = rng.geometric(bar, size=n) - 1
    sums = sum_truncated_samples(failure, counts, np.full(n, mass), rng)
    z = np.sort(sums * (bar / mean))
    cdf = -np.expm1(-z)
    grid = np.arange(1, n + 1, dtype=float) / n
    d_plus = float(np.max(grid - cdf))
    d_minus = float(np.max(cdf - (grid - 1.0 / n)))
    return max(d_plus, d_minus)
