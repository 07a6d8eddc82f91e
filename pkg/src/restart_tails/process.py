"""The restart process itself.

A task needs T units of uninterrupted work (T ~ task law).  Failures arrive
after U units of uptime (U ~ failure law, independent); a failure before
completion discards all progress and the attempt starts over with the same T.
The total time is X = T + S where S sums the durations of all failed
attempts and the attempt count is geometric given T.

The module provides exact simulation (scalar and vectorized/parallel), the
mixture-identity tail estimators built on the geometric-sum engine, the
two-sided comparison integrals used for tail analysis, coupling-based
stochastic-order checks, and the parallel makespan experiment.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.interpolate import PchipInterpolator

from .distributions import (
    Distribution,
    PointMass,
    require_failure_role,
    require_finite_failure_mean,
    sum_truncated_samples,
)
from .lundberg import (
    LundbergSolution,
    RootError,
    TailEstimate,
    cl_tail,
    importance_tail,
    lundberg_bounds,
    lundberg_root,
)
from .numerics import quad_piecewise

MAX_FAILURES_PER_RUN = 10**9
_BATCH = 1 << 19


class SimulationGuardError(RuntimeError):
    """A single run exceeded the failure-draw budget (failure tail ~ 0 at T)."""


@dataclass(frozen=True)
class RestartSample:
    """One realization of the restart process."""

    task_time: float
    n_failures: int
    lost_time: float
    total_time: float

    def __post_init__(self):
        if self.total_time != self.task_time + self.lost_time:
            raise ValueError("total_time must equal task_time + lost_time")
        if self.n_failures < 0 or (self.n_failures == 0) != (self.lost_time == 0.0):
            raise ValueError("lost_time must be zero exactly when no failures occurred")


@dataclass(frozen=True)
class EmpiricalSummary:
    """Aggregates of a simulation batch over a fixed threshold grid."""

    n: int
    x_grid: tuple
    tail_at: np.ndarray
    tail_stderr: np.ndarray
    n_histogram: np.ndarray   # counts of 0..n_max failures plus an overflow bucket
    mean_total: float
    mean_task: float

    def __eq__(self, other):
        if not isinstance(other, EmpiricalSummary):
            return NotImplemented
        return (
            self.n == other.n
            and self.x_grid == other.x_grid
            and np.array_equal(self.tail_at, other.tail_at)
            and np.array_equal(self.tail_stderr, other.tail_stderr)
            and np.array_equal(self.n_histogram, other.n_histogram)
            and self.mean_total == other.mean_total
            and self.mean_task == other.mean_task
        )


@dataclass(frozen=True)
class QuadratureParams:
    """Knobs for the semi-analytic mixture integrals."""

    eps_trunc: float = 1e-12    # omitted task-law tail mass; always reported
    grid_nodes: int = 256       # root-cache nodes, geometric in task-tail space
    gauss_points: int = 16      # Gauss-Legendre nodes per cache segment
    failure_mass_floor: float = 1e-8  # skip t with less failure mass than this


def n_pmf_diagonal(n: int) -> float:
    """Failure-count pmf when task and failure laws coincide: 1/((n+2)(n+1))."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return 1.0 / ((n + 2.0) * (n + 1.0))


# ---------------------------------------------------------------------------
# exact simulation


def run_once(task: Distribution, failure: Distribution,
             rng: np.random.Generator) -> RestartSample:
    """Simulate one task to completion, drawing failures until one exceeds T."""
    require_failure_role(failure)
    t = float(task.sample(rng))
    lost = 0.0
    n = 0
    block = 64
    while True:
        u = failure.sample(rng, block)
        beyond = np.nonzero(u > t)[0]
        if beyond.size:
            k = int(beyond[0])
            lost += float(u[:k].sum())
            n += k
            break
        lost += float(u.sum())
        n += block
        if n > MAX_FAILURES_PER_RUN:
            raise SimulationGuardError(
                f"aborted a run after {n} failures at task time T={t:g}; "
                "the failure tail is numerically zero there"
            )
        block = min(block * 4, 1 << 16)
    return RestartSample(task_time=t, n_failures=n, lost_time=lost, total_time=t + lost)


def _batch_totals(task, failure, size, rng):
    """Vectorized batch using the geometric attempt-count representation."""
    t = np.asarray(task.sample(rng, size), dtype=float)
    mass = np.asarray(failure.cdf(t), dtype=float)
    bar = 1.0 - mass
    if np.any(bar <= 0.0):
        raise SimulationGuardError(
            "drawn task time has numerically zero failure tail; total time diverges"
        )
    counts = np.where(mass > 0.0, rng.geometric(np.maximum(bar, 1e-300), size=size) - 1, 0)
    if np.any(counts > MAX_FAILURES_PER_RUN):
        raise SimulationGuardError(
            f"failure count exceeded {MAX_FAILURES_PER_RUN} in a single run"
        )
    lost = sum_truncated_samples(failure, counts, mass, rng)
    return t, counts, lost


def worker_generators(seed: int, workers: int) -> list[np.random.Generator]:
    """Independent deterministic substreams for a fixed worker count."""
    if workers < 1:
        raise ValueError("workers must be at least 1")
    seq = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.PCG64(child)) for child in seq.spawn(workers)]


def _split_counts(n: int, workers: int) -> list[int]:
    base, extra = divmod(n, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _simulate_worker(task, failure, count, rng, x_grid, n_max):
    exceed = np.zeros(len(x_grid), dtype=np.int64)
    hist = np.zeros(n_max + 2, dtype=np.int64)
    sum_total = 0.0
    sum_task = 0.0
    done = 0
    while done < count:
        size = min(_BATCH, count - done)
        t, counts, lost = _batch_totals(task, failure, size, rng)
        total = t + lost
        for i, x in enumerate(x_grid):
            exceed[i] += int((total > x).sum())
        clipped = np.minimum(counts, n_max + 1)
        hist += np.bincount(clipped, minlength=n_max + 2)
        sum_total += float(total.sum())
        sum_task += float(t.sum())
        done += size
    return exceed, hist, sum_total, sum_task


def simulate(cfg) -> EmpiricalSummary:
    """Run cfg.n independent restarts split across cfg.workers substreams.

    Output is bit-reproducible for a fixed (seed, workers, n): worker partials
    are merged in worker order regardless of scheduling.
    """
    task, failure = cfg.task, cfg.failure
    require_failure_role(failure)
    if cfg.n < 1:
        raise ValueError("n must be at least 1")
    gens = worker_generators(cfg.seed, cfg.workers)
    shares = _split_counts(cfg.n, cfg.workers)
    x_grid = tuple(cfg.x_grid)
    n_max = cfg.histogram_max

    if cfg.workers == 1:
        partials = [_simulate_worker(task, failure, shares[0], gens[0], x_grid, n_max)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [
                pool.submit(_simulate_worker, task, failure, shares[w], gens[w], x_grid, n_max)
                for w in range(cfg.workers) if shares[w] > 0
            ]
            partials = [f.result() for f in futures]

    exceed = np.zeros(len(x_grid), dtype=np.int64)
    hist = np.zeros(n_max + 2, dtype=np.int64)
    sum_total = 0.0
    sum_task = 0.0
    for e, h, st, stask in partials:
        exceed += e
        hist += h
        sum_total += st
        sum_task += stask
    n = cfg.n
    phat = exceed / n
    stderr = np.sqrt(phat * (1.0 - phat) / n)
    return EmpiricalSummary(
        n=n,
        x_grid=x_grid,
        tail_at=phat,
        tail_stderr=stderr,
        n_histogram=hist,
        mean_total=sum_total / n,
        mean_task=sum_task / n,
    )


def crude_tail(cfg, x: float) -> TailEstimate:
    """Direct Monte Carlo estimate of P(total time > x) with exact-binomial
    99% envelope."""
    task, failure = cfg.task, cfg.failure
    require_failure_role(failure)
    gens = worker_generators(cfg.seed, cfg.workers)
    shares = _split_counts(cfg.n, cfg.workers)

    def worker(count, rng):
        hits = 0
        done = 0
        while done < count:
            size = min(_BATCH, count - done)
            t, _, lost = _batch_totals(task, failure, size, rng)
            hits += int(((t + lost) > x).sum())
            done += size
        return hits

    if cfg.workers == 1:
        hit_list = [worker(shares[0], gens[0])]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(worker, shares[w], gens[w])
                       for w in range(cfg.workers) if shares[w] > 0]
            hit_list = [f.result() for f in futures]
    k = sum(hit_list)
    n = cfg.n
    phat = k / n
    stderr = math.sqrt(phat * (1.0 - phat) / n)
    lower = 0.0 if k == 0 else float(stats.beta.ppf(0.005, k, n - k + 1))
    upper = 1.0 if k == n else float(stats.beta.ppf(0.995, k + 1, n - k))
    return TailEstimate(x=float(x), point=phat, stderr=stderr,
                        lower=lower, upper=upper, n_used=n)


# ---------------------------------------------------------------------------
# semi-analytic mixture tail


class _RootCurve:
    """Monotone interpolants of log gamma(t) and log C(t) on a task grid."""

    def __init__(self, failure, t_nodes):
        sols = [lundberg_root(failure, float(t)) for t in t_nodes]
        t = np.array([s.t for s in sols])
        lg = np.array([s.log_gamma for s in sols])
        lc = np.array([s.log_cl_constant for s in sols])
        t, keep = np.unique(t, return_index=True)
        self.t = t
        self._lg = PchipInterpolator(t, lg[keep], extrapolate=False)
        self._lc = PchipInterpolator(t, lc[keep], extrapolate=False)
        self.solutions = sols

    def log_gamma(self, t):
        return self._lg(t)

    def log_cl(self, t):
        return self._lc(t)


def _gauss_segments(edges: np.ndarray, points: int):
    nodes, weights = np.polynomial.legendre.leggauss(points)
    lo = edges[:-1][:, None]
    hi = edges[1:][:, None]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return (mid + half * nodes[None, :]).ravel(), (half * weights[None, :]).ravel()


def semi_analytic_tail(task: Distribution, failure: Distribution, x: float,
                       quad: QuadratureParams = QuadratureParams()) -> TailEstimate:
    """Tail of the total time via the conditional mixture identity.

    P(X > x) integrates the conditional lost-time tail P(S(t) > x - t)
    against the task density, with the exact shortcut P(...) = 1 for t >= x.
    The inner tail is the exponential point approximation clamped between its
    deterministic envelope; the returned lower/upper integrate the envelope
    itself, so approximation error stays visible.  Task mass beyond the
    (1 - eps_trunc) quantile is omitted from the point estimate and reported.
    """
    if x <= 0.0:
        raise ValueError("x must be positive")
    require_failure_role(failure)

    if isinstance(task, PointMass):
        t0 = task.location
        if t0 >= x:
            return TailEstimate(x=x, point=1.0, stderr=0.0, lower=1.0, upper=1.0, n_used=0)
        if t0 <= 0.0:
            return TailEstimate(x=x, point=0.0, stderr=0.0, lower=0.0, upper=0.0, n_used=0)
        sol = lundberg_root(failure, t0)
        u = x - t0
        lo, hi = lundberg_bounds(sol, u)
        point = min(max(cl_tail(sol, u), lo), hi)
        return TailEstimate(x=x, point=point, stderr=0.0, lower=lo, upper=hi, n_used=0)

    f_lo, f_hi = task.support()
    g_lo, g_hi = failure.support()
    exact_mass = float(task.tail(x))          # region t >= x contributes exactly 1
    t_star = float(task.inverse_tail(quad.eps_trunc)) if f_hi == math.inf else f_hi
    b = min(x, t_star, f_hi)
    if math.isfinite(g_hi) and float(task.tail(g_hi)) > 0.0 and b > g_hi:
        raise RootError(
            "task law has mass beyond the failure support endpoint; "
            "completion is not guaranteed and the total-time tail degenerates"
        )

    # start the grid where the failure law has workable mass
    a = max(f_lo, g_lo)
    skipped_bound = 0.0
    if float(failure.cdf(a)) < quad.failure_mass_floor:
        a_eff = float(failure.quantile(quad.failure_mass_floor))
        if a_eff > a:
            skipped_mass = max(float(task.cdf(a_eff)) - float(task.cdf(a)), 0.0)
            if skipped_mass > 0.0 and a_eff < x:
                # with failure mass <= floor, exceeding x - t needs many attempts
                need = max(1.0, math.ceil((x - a_eff) / max(a_eff, 1e-300)))
                skipped_bound = skipped_mass * quad.failure_mass_floor ** min(need, 30.0)
            a = a_eff

    trunc_mass = max(float(task.tail(b)) - exact_mass, 0.0) if b < x else 0.0

    if a >= b or float(task.tail(a)) <= float(task.tail(b)):
        point = exact_mass
        lower = exact_mass
        upper = min(1.0, exact_mass + trunc_mass + skipped_bound)
        return TailEstimate(x=x, point=min(point, 1.0), stderr=0.0, lower=min(lower, 1.0),
                            upper=upper, n_used=0, trunc_mass=trunc_mass)

    s_a = min(float(task.tail(a)), 1.0 - 1e-16)
    s_b = max(float(task.tail(b)), 1e-300)
    m = max(quad.grid_nodes, 8)
    s_nodes = np.exp(np.linspace(math.log(s_a), math.log(s_b), m))
    t_nodes = np.asarray(task.inverse_tail(np.clip(s_nodes, 1e-300, 1.0 - 1e-16)), dtype=float)
    t_nodes[0] = a
    t_nodes[-1] = b
    t_nodes = np.unique(np.clip(t_nodes, a, b))
    if t_nodes.size < 2:
        t_nodes = np.array([a, b])
    curve = _RootCurve(failure, t_nodes)

    tt, ww = _gauss_segments(t_nodes, quad.gauss_points)
    log_gamma = np.asarray(curve.log_gamma(tt), dtype=float)
    gamma = np.exp(log_gamma)
    log_c = np.asarray(curve.log_cl(tt), dtype=float)
    u = x - tt
    with np.errstate(under="ignore"):
        cl = np.exp(log_c - gamma * u)
        env_hi = np.minimum(1.0, np.exp(-gamma * u))
        env_lo = np.exp(-gamma * x)
    inner = np.minimum(np.maximum(cl, env_lo), env_hi)
    dens = np.asarray(task.density(tt), dtype=float)
    point = float(np.sum(ww * dens * inner)) + exact_mass
    lower = float(np.sum(ww * dens * env_lo)) + exact_mass
    upper = float(np.sum(ww * dens * env_hi)) + exact_mass + trunc_mass + skipped_bound

    point = min(max(point, 0.0), 1.0)
    lower = min(max(lower, 0.0), point)
    upper = min(max(upper, point), 1.0)
    return TailEstimate(x=x, point=point, stderr=0.0, lower=lower, upper=upper,
                        n_used=0, trunc_mass=trunc_mass)


def bracketing_integrals(task: Distribution, failure: Distribution, x: float,
                         eps: float, t0: float = 0.0,
                         eps_trunc: float = 1e-12) -> tuple[float, float]:
    """Two-sided comparison integrals for the total-time tail.

    Integrates exp(-tail_G(t) * x * (1 +/- eps) / mean_G) against the task
    density over [t0, inf); the (1+eps) version lower-brackets and the
    (1-eps) version upper-brackets the tail at large x.  Returns
    (i_minus, i_plus) with i_plus <= i_minus.
    """
    if x <= 0.0:
        raise ValueError("x must be positive")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    mu = 1.0 / require_finite_failure_mean(failure)
    f_lo, f_hi = task.support()
    lo = max(t0, f_lo)
    hi = float(task.inverse_tail(eps_trunc)) if f_hi == math.inf else f_hi
    if hi <= lo:
        return (0.0, 0.0)

    def make_integrand(factor):
        def fn(t):
            return math.exp(-mu * float(failure.tail(t)) * x * factor) * float(task.density(t))
        return fn

    # landmark near the knee where the exponent is O(1)
    knee_tail = min(1.0 / (mu * x), 1.0 - 1e-12)
    landmarks = []
    if knee_tail < float(failure.tail(lo)):
        landmarks.append(float(failure.inverse_tail(knee_tail)))
    i_minus = quad_piecewise(make_integrand(1.0 - eps), lo, hi, landmarks, epsrel=1e-10)
    i_plus = quad_piecewise(make_integrand(1.0 + eps), lo, hi, landmarks, epsrel=1e-10)
    return (i_minus, i_plus)


# ---------------------------------------------------------------------------
# makespan and stochastic-order coupling


def parallel_makespan(task: Distribution, failure: Distribution, n_subjobs: int,
                      reps: int, rng: np.random.Generator) -> np.ndarray:
    """Makespans of n_subjobs independent restarts, for reps replications."""
    if n_subjobs < 1 or reps < 1:
        raise ValueError("n_subjobs and reps must be at least 1")
    require_failure_role(failure)
    out = np.empty(reps)
    per_batch = max(1, _BATCH // n_subjobs)
    done = 0
    while done < reps:
        take = min(per_batch, reps - done)
        t, _, lost = _batch_totals(task, failure, take * n_subjobs, rng)
        totals = (t + lost).reshape(take, n_subjobs)
        out[done:done + take] = totals.max(axis=1)
        done += take
    return out


def coupled_order_check(task_small: Distribution, task_large: Distribution,
                        failure: Distribution, n: int,
                        rng: np.random.Generator) -> int:
    """Count violations of the pathwise order X_small <= X_large under a
    shared-uniform coupling.

    Both processes consume the same uniforms: the task quantile shares one
    draw, every failure shares the rest.  With task_small below task_large in
    stochastic order the coupled totals are ordered pathwise, so the returned
    count is exactly zero unless the engine is broken.
    """
    require_failure_role(failure)
    check = np.linspace(0.01, 0.99, 41)
    qs = np.asarray(task_small.quantile(check), dtype=float)
    ql = np.asarray(task_large.quantile(check), dtype=float)
    if np.any(qs > ql + 1e-12):
        raise ValueError("stochastic-order hypothesis fails on the quantile grid")
    v0 = rng.random(n)
    t1 = np.asarray(task_small._ppf(v0), dtype=float)
    t2 = np.asarray(task_large._ppf(v0), dtype=float)
    x1 = t1.copy()
    x2 = t2.copy()
    alive_small = np.ones(n, dtype=bool)   # first process not yet past its own crossing
    active = np.arange(n)                  # second process still accumulating
    while active.size:
        u = np.asarray(failure._ppf(rng.random(active.size)), dtype=float)
        grows_small = alive_small[active] & (u <= t1[active])
        np.add.at(x1, active[grows_small], u[grows_small])
        alive_small[active[u > t1[active]]] = False
        grows_large = u <= t2[active]
        np.add.at(x2, active[grows_large], u[grows_large])
        active = active[grows_large]
    return int((x1 > x2).sum())


# ---------------------------------------------------------------------------
# stratified rare-event oracle for bounded task laws


def stratified_tail(task: Distribution, failure: Distribution, x: float,
                    n_strata: int, n_per_stratum: int,
                    rng: np.random.Generator) -> TailEstimate:
    """Importance-sampling estimate of P(X > x) for bounded task support.

    Stratifies the task law over equal-probability cells, estimates the
    conditional lost-time tail at each cell midpoint with the tilted
    estimator, and recombines.  Intended as a simulation oracle for far-tail
    checks where crude sampling sees no exceedances.
    """
    f_lo, f_hi = task.support()
    if not math.isfinite(f_hi):
        raise ValueError("stratified_tail requires a bounded task law")
    if x <= f_hi:
        raise ValueError("threshold must exceed the task support endpoint")
    probs = np.linspace(0.0, 1.0, n_strata + 1)
    mids = np.asarray(task.quantile((probs[:-1] + probs[1:]) / 2.0), dtype=float)
    weight = 1.0 / n_strata
    total = 0.0
    var = 0.0
    for t_mid in mids:
        est = importance_tail(failure, float(t_mid), x - float(t_mid), n_per_stratum, rng)
        total += weight * est.point
        var += (weight * est.stderr) ** 2
    return TailEstimate(x=float(x), point=min(total, 1.0), stderr=math.sqrt(var),
                        lower=0.0, upper=1.0, n_used=n_strata * n_per_stratum)
