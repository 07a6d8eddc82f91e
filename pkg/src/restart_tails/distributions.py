"""Parametric distributions for task lengths and failure times.

Every family exposes the same scalar/vector surface: density, cdf, tail,
log-tail, quantile, mean, partial moments, sampling, and a coarse tail-class
tag describing asymptotic decay.  Instances are frozen dataclasses, so they
hash, compare, and share safely across worker threads.

Sampling is inverse-transform through the quantile except for Gamma and
LogNormal, which use the generator's exact methods.
"""
from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields
from enum import Enum
from typing import Union

import numpy as np
from scipy import special as sc
from scipy import stats

from .numerics import log_upper_gamma, quad_piecewise

ArrayLike = Union[float, np.ndarray]

_ROLES = ("task", "failure")


class TailClassKind(Enum):
    """Coarse asymptotic decay class of a density or tail."""

    EXP_DENSITY = "exp-density"      # density ~ exp(-decay * t^power), up to slow factors
    POWER_DENSITY = "power-density"  # density ~ t^(-decay - 1)
    EXP_TAIL = "exp-tail"            # tail ~ exp(-decay * t^power)
    POWER_TAIL = "power-tail"        # tail ~ t^(-decay)
    BOUNDED = "bounded"              # support ends at a finite endpoint
    UNCLASSIFIED = "unclassified"    # outside the supported taxonomy


@dataclass(frozen=True)
class TailClassTag:
    """Decay class with its parameters.

    ``decay`` is the leading coefficient (rate for exponential-type classes,
    tail index for power-type ones), ``power`` the stretch exponent of t for
    exponential-type classes, ``endpoint`` the support endpoint for bounded
    distributions.
    """

    kind: TailClassKind
    decay: float = math.nan
    power: float = math.nan
    endpoint: float = math.nan


def _asarray(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


def _maybe_scalar(value: np.ndarray, like) -> ArrayLike:
    if np.isscalar(like) or (isinstance(like, np.ndarray) and like.ndim == 0):
        return float(value)
    return value


class Distribution(ABC):
    """Common surface of all supported families."""

    # ---- core functionals -------------------------------------------------

    @abstractmethod
    def density(self, t: ArrayLike) -> ArrayLike:
        """Density at t; zero outside the support."""

    @abstractmethod
    def cdf(self, t: ArrayLike) -> ArrayLike:
        """P(value <= t)."""

    def tail(self, t: ArrayLike) -> ArrayLike:
        """P(value > t)."""
        arr = _asarray(t)
        return _maybe_scalar(1.0 - _asarray(self.cdf(arr)), t)

    def log_tail(self, t: ArrayLike) -> ArrayLike:
        """log P(value > t), stable far into the tail."""
        arr = _asarray(t)
        with np.errstate(divide="ignore"):
            out = np.log(_asarray(self.tail(arr)))
        return _maybe_scalar(out, t)

    @abstractmethod
    def _ppf(self, q: np.ndarray) -> np.ndarray:
        """Quantile without argument checks; q in [0, 1)."""

    def quantile(self, p: ArrayLike) -> ArrayLike:
        """Smallest t with cdf(t) >= p, for p strictly inside (0, 1)."""
        q = _asarray(p)
        if np.any(q <= 0.0) or np.any(q >= 1.0):
            raise ValueError("quantile requires p in (0, 1)")
        return _maybe_scalar(self._ppf(q), p)

    def _isf(self, s: np.ndarray) -> np.ndarray:
        return self._ppf(1.0 - s)

    def inverse_tail(self, s: ArrayLike) -> ArrayLike:
        """Smallest t with tail(t) <= s; keeps resolution for tiny s."""
        arr = _asarray(s)
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise ValueError("inverse_tail requires s in (0, 1)")
        return _maybe_scalar(self._isf(arr), s)

    # ---- moments ----------------------------------------------------------

    @abstractmethod
    def mean(self) -> float:
        """Expected value; raises ValueError when not finite."""

    @abstractmethod
    def partial_mean(self, t: float) -> float:
        """Integral of y * density(y) over the support up to t."""

    @abstractmethod
    def partial_second_moment(self, t: float) -> float:
        """Integral of y^2 * density(y) over the support up to t."""

    # ---- sampling ---------------------------------------------------------

    def sample(self, rng: np.random.Generator, size=None) -> ArrayLike:
        u = rng.random(size)
        out = self._ppf(np.asarray(u, dtype=float))
        return float(out) if size is None else out

    # ---- structure --------------------------------------------------------

    @abstractmethod
    def support(self) -> tuple[float, float]:
        """(inf, sup) of the support."""

    @abstractmethod
    def tail_class(self, role: str) -> TailClassTag:
        """Decay class of the density (role 'task') or tail (role 'failure')."""

    @abstractmethod
    def spec_string(self) -> str:
        """Canonical text form, re-parseable by parse_distribution."""

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.spec_string()


def _check_role(role: str) -> None:
    if role not in _ROLES:
        raise ValueError(f"role must be one of {_ROLES}, got {role!r}")


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0.0) or not math.isfinite(value):
        raise ValueError(f"{name} must be a positive finite real, got {value}")
    return value


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def density(self, t):
        arr = _asarray(t)
        out = np.where(arr >= 0.0, self.rate * np.exp(-self.rate * arr), 0.0)
        return _maybe_scalar(out, t)

    def cdf(self, t):
        arr = _asarray(t)
        out = np.where(arr >= 0.0, -np.expm1(-self.rate * arr), 0.0)
        return _maybe_scalar(out, t)

    def tail(self, t):
        arr = _asarray(t)
        out = np.where(arr >= 0.0, np.exp(-self.rate * arr), 1.0)
        return _maybe_scalar(out, t)

    def log_tail(self, t):
        arr = _asarray(t)
        out = np.where(arr >= 0.0, -self.rate * arr, 0.0)
        return _maybe_scalar(out, t)

    def _ppf(self, q):
        return -np.log1p(-q) / self.rate

    def _isf(self, s):
        return -np.log(s) / self.rate

    def mean(self):
        return 1.0 / self.rate

    def partial_mean(self, t):
        x = self.rate * t
        if x <= 0.0:
            return 0.0
        if x < 1e-4:
            return (x * x / 2.0 - x**3 / 3.0 + x**4 / 8.0) / self.rate
        return (1.0 - math.exp(-x) * (1.0 + x)) / self.rate

    def partial_second_moment(self, t):
        x = self.rate * t
        if x <= 0.0:
            return 0.0
        if x < 1e-3:
            return (x**3 / 3.0 - x**4 / 4.0) / self.rate**2
        return (2.0 - math.exp(-x) * (x * x + 2.0 * x + 2.0)) / self.rate**2

    def support(self):
        return (0.0, math.inf)

    def tail_class(self, role):
        _check_role(role)
        if role == "task":
            return TailClassTag(TailClassKind.EXP_DENSITY, decay=self.rate, power=1.0)
        return TailClassTag(TailClassKind.EXP_TAIL, decay=self.rate, power=1.0)

    def spec_string(self):
        return f"exponential(rate={self.rate!r})"


@dataclass(frozen=True)
class Gamma(Distribution):
    shape: float
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("shape", self.shape))
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def _frozen(self):
        return stats.gamma(a=self.shape, scale=1.0 / self.rate)

    def density(self, t):
        arr = _asarray(t)
        out = np.where(arr >= 0.0, self._frozen().pdf(np.maximum(arr, 0.0)), 0.0)
        return _maybe_scalar(out, t)

    def cdf(self, t):
        arr = _asarray(t)
        out = self._frozen().cdf(np.maximum(arr, 0.0))
        return _maybe_scalar(out, t)

    def tail(self, t):
        arr = _asarray(t)
        out = self._frozen().sf(np.maximum(arr, 0.0))
        return _maybe_scalar(out, t)

    def log_tail(self, t):
        arr = _asarray(t)
        out = self._frozen().logsf(np.maximum(arr, 0.0))
        return _maybe_scalar(out, t)

    def _ppf(self, q):
        return self._frozen().ppf(q)

    def _isf(self, s):
        return self._frozen().isf(s)

    def mean(self):
        return self.shape / self.rate

    def partial_mean(self, t):
        if t <= 0.0:
            return 0.0
        return (self.shape / self.rate) * float(sc.gammainc(self.shape + 1.0, self.rate * t))

    def partial_second_moment(self, t):
        if t <= 0.0:
            return 0.0
        k, lam = self.shape, self.rate
        return (k * (k + 1.0) / lam**2) * float(sc.gammainc(k + 2.0, lam * t))

    def sample(self, rng, size=None):
        out = rng.gamma(self.shape, 1.0 / self.rate, size)
        return float(out) if size is None else out

    def support(self):
        return (0.0, math.inf)

    def tail_class(self, role):
        _check_role(role)
        if role == "task":
            return TailClassTag(TailClassKind.EXP_DENSITY, decay=self.rate, power=1.0)
        return TailClassTag(TailClassKind.EXP_TAIL, decay=self.rate, power=1.0)

    def spec_string(self):
        return f"gamma(shape={self.shape!r}, rate={self.rate!r})"


@dataclass(frozen=True)
class Weibull(Distribution):
    shape: float
    scale: float

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("shape", self.shape))
        object.__setattr__(self, "scale", _positive("scale", self.scale))

    def density(self, t):
        arr = _asarray(t)
        c, s = self.shape, self.scale
        z = np.maximum(arr, 0.0) / s
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (c / s) * z ** (c - 1.0) * np.exp(-(z**c))
        val = np.where(arr > 0.0, val, 0.0 if c > 1.0 else val)
        if c == 1.0:
            val = np.where(arr == 0.0, c / s, val)
        elif c < 1.0:
            val = np.where(arr == 0.0, np.inf, val)
        out = np.where(arr < 0.0, 0.0, val)
        return _maybe_scalar(out, t)

    def cdf(self, t):
        arr = _asarray(t)
        z = np.maximum(arr, 0.0) / self.scale
        out = -np.expm1(-(z**self.shape))
        return _maybe_scalar(out, t)

    def tail(self, t):
        arr = _asarray(t)
        z = np.maximum(arr, 0.0) / self.scale
        out = np.exp(-(z**self.shape))
        return _maybe_scalar(out, t)

    def log_tail(self, t):
        arr = _asarray(t)
        z = np.maximum(arr, 0.0) / self.scale
        out = -(z**self.shape)
        return _maybe_scalar(out, t)

    def _ppf(self, q):
        return self.scale * (-np.log1p(-q)) ** (1.0 / self.shape)

    def _isf(self, s):
        return self.scale * (-np.log(s)) ** (1.0 / self.shape)

    def mean(self):
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)

    def partial_mean(self, t):
        if t <= 0.0:
            return 0.0
        c, s = self.shape, self.scale
        a = 1.0 + 1.0 / c
        return s * math.gamma(a) * float(sc.gammainc(a, (t / s) ** c))

    def partial_second_moment(self, t):
        if t <= 0.0:
            return 0.0
        c, s = self.shape, self.scale
        a = 1.0 + 2.0 / c
        return s * s * math.gamma(a) * float(sc.gammainc(a, (t / s) ** c))

    def support(self):
        return (0.0, math.inf)

    def tail_class(self, role):
        _check_role(role)
        decay = self.scale ** (-self.shape)
        if role == "task":
            return TailClassTag(TailClassKind.EXP_DENSITY, decay=decay, power=self.shape)
        return TailClassTag(TailClassKind.EXP_TAIL, decay=decay, power=self.shape)

    def spec_string(self):
        return f"weibull(shape={self.shape!r}, scale={self.scale!r})"


@dataclass(frozen=True)
class Pareto(Distribution):
    """Power-law family on [scale, inf) with an optional logarithmic factor.

    density(t) = K * (1 + log(t/scale))^log_power * (t/scale)^(-index-1),

    so the density is regularly varying with index -(index+1) and slowly
    varying factor proportional to log^log_power(t).  log_power = 0 recovers
    the classic power law with tail (scale/t)^index.

    The mean is finite only for index > 1 (or index == 1 with log_power < -1);
    construction succeeds regardless, and mean() raises when infinite so that
    rate-based operations can reject the instance explicitly.
    """

    index: float
    scale: float
    log_power: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "index", _positive("index", self.index))
        object.__setattr__(self, "scale", _positive("scale", self.scale))
        lp = float(self.log_power)
        if not math.isfinite(lp):
            raise ValueError("log_power must be a finite real")
        object.__setattr__(self, "log_power", lp)

    # ---- helpers ----

    @property
    def _plain(self) -> bool:
        return self.log_power == 0.0

    def _log_norm(self) -> float:
        # log of integral of (1+log(t/s))^p (t/s)^(-a-1) dt over [s, inf)
        a, p, s = self.index, self.log_power, self.scale
        return math.log(s) + a - (p + 1.0) * math.log(a) + log_upper_gamma(p + 1.0, a)

    def _upper_ratio(self, z) -> np.ndarray:
        # upper incomplete gamma ratio against the normalizing value at a
        a = self.index
        p1 = self.log_power + 1.0
        flat = np.atleast_1d(np.asarray(z, dtype=float))
        if p1 > 0.0:
            qa = float(sc.gammaincc(p1, a))
            qf = np.asarray(sc.gammaincc(p1, flat), dtype=float)
            out = qf / qa
            mask = qf <= 1e-280
            if mask.any():
                base = log_upper_gamma(p1, a)
                out[mask] = [
                    math.exp(log_upper_gamma(p1, float(zz)) - base) for zz in flat[mask]
                ]
        else:
            base = log_upper_gamma(p1, a)
            out = np.array(
                [math.exp(log_upper_gamma(p1, float(zz)) - base) for zz in flat]
            )
        return out.reshape(np.shape(z))

    # ---- surface ----

    def density(self, t):
        arr = _asarray(t)
        a, p, s = self.index, self.log_power, self.scale
        z = np.maximum(arr, s) / s
        lg = np.log(z)
        val = np.exp(-self._log_norm()) * (1.0 + lg) ** p * z ** (-(a + 1.0))
        out = np.where(arr >= s, val, 0.0)
        return _maybe_scalar(out, t)

    def tail(self, t):
        arr = _asarray(t)
        a, p, s = self.index, self.log_power, self.scale
        z = np.maximum(arr, s) / s
        if self._plain:
            val = z ** (-a)
        else:
            val = self._upper_ratio(a * (1.0 + np.log(z)))
        out = np.where(arr >= s, val, 1.0)
        return _maybe_scalar(out, t)

    def cdf(self, t):
        arr = _asarray(t)
        return _maybe_scalar(1.0 - _asarray(self.tail(arr)), t)

    def log_tail(self, t):
        arr = _asarray(t)
        a, p, s = self.index, self.log_power, self.scale
        z = np.maximum(arr, s) / s
        if self._plain:
            val = -a * np.log(z)
        else:
            p1 = p + 1.0
            base = log_upper_gamma(p1, a)
            flat = a * (1.0 + np.log(np.atleast_1d(z).astype(float)))
            vals = np.array([log_upper_gamma(p1, float(zz)) - base for zz in flat])
            val = vals.reshape(np.shape(z))
        out = np.where(arr >= s, val, 0.0)
        return _maybe_scalar(out, t)

    def _ppf(self, q):
        q = np.asarray(q, dtype=float)
        return self._isf_raw(1.0 - q)

    def _isf(self, s):
        return self._isf_raw(np.asarray(s, dtype=float))

    def _isf_raw(self, sv: np.ndarray) -> np.ndarray:
        a, p, s = self.index, self.log_power, self.scale
        if self._plain:
            return s * sv ** (-1.0 / a)
        p1 = p + 1.0
        if p1 > 0.0:
            qa = float(sc.gammaincc(p1, a))
            z = sc.gammainccinv(p1, sv * qa)
            return s * np.exp(z / a - 1.0)
        # rare branch: scalar monotone bisection in log-space
        from scipy import optimize

        def solve_one(tail_target):
            target = math.log(tail_target)

            def fn(logt):
                return float(self.log_tail(math.exp(logt))) - target

            lo = math.log(s)
            hi = lo + 1.0
            while fn(hi) > 0.0:
                hi += (hi - lo)
            return math.exp(optimize.brentq(fn, lo, hi, rtol=1e-13))

        return np.vectorize(solve_one)(sv)

    def mean(self):
        a, p, s = self.index, self.log_power, self.scale
        if a > 1.0:
            log_m = (
                math.log(s)
                + (p + 1.0) * (math.log(a) - math.log(a - 1.0))
                - 1.0
                + log_upper_gamma(p + 1.0, a - 1.0)
                - log_upper_gamma(p + 1.0, a)
            )
            return math.exp(log_m)
        if a == 1.0 and p < -1.0:
            # normalizer * s^2 * integral of (1+v)^p dv = normalizer * s^2 / (-p-1)
            log_m = (
                math.log(s)
                - a
                + (p + 1.0) * math.log(a)
                - log_upper_gamma(p + 1.0, a)
                + math.log(-1.0 / (p + 1.0))
            )
            return math.exp(log_m)
        raise ValueError(
            f"mean is not finite for {self.spec_string()}; "
            "rate-based operations require a failure distribution with finite mean"
        )

    def partial_mean(self, t):
        a, p, s = self.index, self.log_power, self.scale
        if t <= s:
            return 0.0
        if self._plain:
            if a != 1.0:
                return a * s**a * (t ** (1.0 - a) - s ** (1.0 - a)) / (1.0 - a)
            return s * math.log(t / s)
        k = math.exp(-self._log_norm())
        val = quad_piecewise(
            lambda v: (1.0 + v) ** p * math.exp(-(a - 1.0) * v),
            0.0,
            math.log(t / s),
            epsrel=1e-11,
        )
        return k * s * s * val

    def partial_second_moment(self, t):
        a, p, s = self.index, self.log_power, self.scale
        if t <= s:
            return 0.0
        if self._plain:
            if a != 2.0:
                return a * s**a * (t ** (2.0 - a) - s ** (2.0 - a)) / (2.0 - a)
            return 2.0 * s * s * math.log(t / s)
        k = math.exp(-self._log_norm())
        val = quad_piecewise(
            lambda v: (1.0 + v) ** p * math.exp(-(a - 2.0) * v),
            0.0,
            math.log(t / s),
            epsrel=1e-11,
        )
        return k * s**3 * val

    def support(self):
        return (self.scale, math.inf)

    def tail_class(self, role):
        _check_role(role)
        if role == "task":
            return TailClassTag(TailClassKind.POWER_DENSITY, decay=self.index)
        return TailClassTag(TailClassKind.POWER_TAIL, decay=self.index)

    def slow_factor(self) -> tuple[float, float]:
        """(c, p) of the asymptotic density factor c * log^p(t) / t^(index+1)."""
        a, p, s = self.index, self.log_power, self.scale
        c = math.exp((p + 1.0) * math.log(a) + a * math.log(s) - a - log_upper_gamma(p + 1.0, a))
        return (c, p)

    def spec_string(self):
        return f"pareto(index={self.index!r}, scale={self.scale!r}, log_power={self.log_power!r})"


@dataclass(frozen=True)
class LogNormal(Distribution):
    log_location: float
    log_scale: float

    def __post_init__(self):
        mu = float(self.log_location)
        if not math.isfinite(mu):
            raise ValueError("log_location must be finite")
        object.__setattr__(self, "log_location", mu)
        object.__setattr__(self, "log_scale", _positive("log_scale", self.log_scale))

    def _frozen(self):
        return stats.lognorm(s=self.log_scale, scale=math.exp(self.log_location))

    def density(self, t):
        arr = _asarray(t)
        out = np.where(arr > 0.0, self._frozen().pdf(np.maximum(arr, 1e-300)), 0.0)
        return _maybe_scalar(out, t)

    def cdf(self, t):
        arr = _asarray(t)
        out = np.where(arr > 0.0, self._frozen().cdf(np.maximum(arr, 1e-300)), 0.0)
        return _maybe_scalar(out, t)

    def tail(self, t):
        arr = _asarray(t)
        out = np.where(arr > 0.0, self._frozen().sf(np.maximum(arr, 1e-300)), 1.0)
        return _maybe_scalar(out, t)

    def log_tail(self, t):
        arr = _asarray(t)
        out = np.where(arr > 0.0, self._frozen().logsf(np.maximum(arr, 1e-300)), 0.0)
        return _maybe_scalar(out, t)

    def _ppf(self, q):
        return self._frozen().ppf(q)

    def _isf(self, s):
        return self._frozen().isf(s)

    def mean(self):
        return math.exp(self.log_location + 0.5 * self.log_scale**2)

    def partial_mean(self, t):
        if t <= 0.0:
            return 0.0
        mu, sg = self.log_location, self.log_scale
        return self.mean() * float(stats.norm.cdf((math.log(t) - mu - sg * sg) / sg))

    def partial_second_moment(self, t):
        if t <= 0.0:
            return 0.0
        mu, sg = self.log_location, self.log_scale
        m2 = math.exp(2.0 * mu + 2.0 * sg * sg)
        return m2 * float(stats.norm.cdf((math.log(t) - mu - 2.0 * sg * sg) / sg))

    def sample(self, rng, size=None):
        out = rng.lognormal(self.log_location, self.log_scale, size)
        return float(out) if size is None else out

    def support(self):
        return (0.0, math.inf)

    def tail_class(self, role):
        _check_role(role)
        return TailClassTag(TailClassKind.UNCLASSIFIED)

    def spec_string(self):
        return f"lognormal(log_location={self.log_location!r}, log_scale={self.log_scale!r})"


@dataclass(frozen=True)
class Uniform(Distribution):
    lower: float
    upper: float

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if not (0.0 <= lo < hi) or not math.isfinite(hi):
            raise ValueError("uniform requires 0 <= lower < upper < inf")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def density(self, t):
        arr = _asarray(t)
        out = np.where((arr >= self.lower) & (arr <= self.upper), 1.0 / (self.upper - self.lower), 0.0)
        return _maybe_scalar(out, t)

    def cdf(self, t):
        arr = _asarray(t)
        out = np.clip((arr - self.lower) / (self.upper - self.lower), 0.0, 1.0)
        return _maybe_scalar(out, t)

    def _ppf(self, q):
        return self.lower + q * (self.upper - self.lower)

    def mean(self):
        return 0.5 * (self.lower + self.upper)

    def partial_mean(self, t):
        a, b = self.lower, self.upper
        c = min(max(t, a), b)
        return (c * c - a * a) / (2.0 * (b - a)) if c > a else 0.0

    def partial_second_moment(self, t):
        a, b = self.lower, self.upper
        c = min(max(t, a), b)
        return (c**3 - a**3) / (3.0 * (b - a)) if c > a else 0.0

    def support(self):
        return (self.lower, self.upper)

    def tail_class(self, role):
        _check_role(role)
        return TailClassTag(TailClassKind.BOUNDED, endpoint=self.upper)

    def spec_string(self):
        return f"uniform(lower={self.lower!r}, upper={self.upper!r})"


@dataclass(frozen=True)
class PointMass(Distribution):
    """Degenerate distribution; allowed only as a task-time model."""

    location: float

    def __post_init__(self):
        loc = float(self.location)
        if loc < 0.0 or not math.isfinite(loc):
            raise ValueError("location must be a finite nonnegative real")
        object.__setattr__(self, "location", loc)

    def density(self, t):
        arr = _asarray(t)
        out = np.where(arr == self.location, np.inf, 0.0)
        return _maybe_scalar(out, t)

    def cdf(self, t):
        arr = _asarray(t)
        out = (arr >= self.location).astype(float)
        return _maybe_scalar(out, t)

    def _ppf(self, q):
        return np.full(np.shape(q), self.location)

    def mean(self):
        return self.location

    def partial_mean(self, t):
        return self.location if t >= self.location else 0.0

    def partial_second_moment(self, t):
        return self.location**2 if t >= self.location else 0.0

    def sample(self, rng, size=None):
        if size is None:
            return self.location
        return np.full(size, self.location)

    def support(self):
        return (self.location, self.location)

    def tail_class(self, role):
        _check_role(role)
        return TailClassTag(TailClassKind.BOUNDED, endpoint=self.location)

    def spec_string(self):
        return f"pointmass(location={self.location!r})"


@dataclass(frozen=True)
class PolyEndpoint(Distribution):
    """Density amplitude * (endpoint - t)^exponent near a finite endpoint.

    The support is [endpoint - width, endpoint] with the width fixed by
    normalization, so the stated amplitude is the exact local coefficient at
    the endpoint.  amplitude="auto" picks the value whose support starts at 0.
    """

    amplitude: object  # float or "auto"
    exponent: float
    endpoint: float

    def __post_init__(self):
        alpha = float(self.exponent)
        if alpha < 0.0 or not math.isfinite(alpha):
            raise ValueError("exponent must be a finite real >= 0")
        t0 = _positive("endpoint", self.endpoint)
        if isinstance(self.amplitude, str):
            if self.amplitude != "auto":
                raise ValueError("amplitude must be a positive real or 'auto'")
            amp = (alpha + 1.0) / t0 ** (alpha + 1.0)
        else:
            amp = _positive("amplitude", self.amplitude)
        min_amp = (alpha + 1.0) / t0 ** (alpha + 1.0)
        if amp < min_amp * (1.0 - 1e-12):
            raise ValueError(
                f"amplitude {amp:g} too small to normalize on [0, {t0:g}]; need >= {min_amp:g}"
            )
        object.__setattr__(self, "amplitude", float(amp))
        object.__setattr__(self, "exponent", alpha)
        object.__setattr__(self, "endpoint", t0)
        width = ((alpha + 1.0) / amp) ** (1.0 / (alpha + 1.0))
        object.__setattr__(self, "_width", min(width, t0))

    @property
    def width(self) -> float:
        return self._width

    def density(self, t):
        arr = _asarray(t)
        lo = self.endpoint - self._width
        inside = (arr >= lo) & (arr <= self.endpoint)
        gap = np.maximum(self.endpoint - arr, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.amplitude * gap**self.exponent
        if self.exponent == 0.0:
            val = np.where(inside, self.amplitude, 0.0)
        out = np.where(inside, val, 0.0)
        return _maybe_scalar(out, t)

    def tail(self, t):
        arr = _asarray(t)
        lo = self.endpoint - self._width
        gap = np.clip(self.endpoint - arr, 0.0, self._width)
        val = self.amplitude * gap ** (self.exponent + 1.0) / (self.exponent + 1.0)
        out = np.where(arr < lo, 1.0, np.where(arr >= self.endpoint, 0.0, val))
        return _maybe_scalar(out, t)

    def cdf(self, t):
        arr = _asarray(t)
        return _maybe_scalar(1.0 - _asarray(self.tail(arr)), t)

    def _ppf(self, q):
        gap = ((1.0 - q) * (self.exponent + 1.0) / self.amplitude) ** (1.0 / (self.exponent + 1.0))
        return self.endpoint - gap

    def mean(self):
        w, a = self._width, self.exponent
        return self.endpoint - w * (a + 1.0) / (a + 2.0)

    def partial_mean(self, t):
        a, t0, w, amp = self.exponent, self.endpoint, self._width, self.amplitude
        if t <= t0 - w:
            return 0.0
        z1 = max(t0 - t, 0.0)
        return amp * (
            t0 * (w ** (a + 1.0) - z1 ** (a + 1.0)) / (a + 1.0)
            - (w ** (a + 2.0) - z1 ** (a + 2.0)) / (a + 2.0)
        )

    def partial_second_moment(self, t):
        a, t0, w, amp = self.exponent, self.endpoint, self._width, self.amplitude
        if t <= t0 - w:
            return 0.0
        z1 = max(t0 - t, 0.0)
        return amp * (
            t0 * t0 * (w ** (a + 1.0) - z1 ** (a + 1.0)) / (a + 1.0)
            - 2.0 * t0 * (w ** (a + 2.0) - z1 ** (a + 2.0)) / (a + 2.0)
            + (w ** (a + 3.0) - z1 ** (a + 3.0)) / (a + 3.0)
        )

    def support(self):
        return (self.endpoint - self._width, self.endpoint)

    def tail_class(self, role):
        _check_role(role)
        return TailClassTag(TailClassKind.BOUNDED, endpoint=self.endpoint)

    def spec_string(self):
        return (
            f"polyendpoint(amplitude={self.amplitude!r}, exponent={self.exponent!r}, "
            f"endpoint={self.endpoint!r})"
        )


# ---------------------------------------------------------------------------
# role validation and text forms


def require_failure_role(dist: Distribution) -> None:
    """Reject distributions that cannot model failure times."""
    if isinstance(dist, PointMass):
        raise ValueError("PointMass not permitted in role failure")


def require_finite_failure_mean(dist: Distribution) -> float:
    """Mean of a failure-time distribution, rejecting infinite-mean models."""
    require_failure_role(dist)
    return dist.mean()


_FAMILIES = {
    "exponential": Exponential,
    "gamma": Gamma,
    "weibull": Weibull,
    "pareto": Pareto,
    "lognormal": LogNormal,
    "uniform": Uniform,
    "pointmass": PointMass,
    "polyendpoint": PolyEndpoint,
}

_SPEC_RE = re.compile(r"^\s*([a-zA-Z_]+)\s*\(\s*(.*?)\s*\)\s*$")


def parse_distribution(text: str) -> Distribution:
    """Parse the text form ``family(name=value, ...)``."""
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"malformed distribution spec: {text!r}")
    name = m.group(1).lower()
    cls = _FAMILIES.get(name)
    if cls is None:
        raise ValueError(f"unknown distribution family {name!r}")
    kwargs = {}
    body = m.group(2)
    if body:
        for part in body.split(","):
            if "=" not in part:
                raise ValueError(f"expected name=value in {part!r}")
            key, _, raw = part.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key in kwargs:
                raise ValueError(f"duplicate parameter {key!r}")
            if cls is PolyEndpoint and key == "amplitude" and raw == "auto":
                kwargs[key] = "auto"
            else:
                try:
                    kwargs[key] = float(raw)
                except ValueError:
                    raise ValueError(f"non-numeric value for {key!r}: {raw!r}") from None
    allowed = {f.name for f in fields(cls)}
    unknown = set(kwargs) - allowed
    if unknown:
        raise ValueError(f"unknown parameter(s) {sorted(unknown)} for family {name!r}")
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# bulk sampling support


def sum_truncated_samples(dist: Distribution, counts: np.ndarray, caps: np.ndarray,
                          rng: np.random.Generator, chunk: int = 1 << 23) -> np.ndarray:
    """Per-element sums of ``counts[i]`` draws from dist conditioned below its
    caps[i]-quantile.

    caps[i] must equal dist.cdf(bound_i); draws use inverse transform on
    uniforms scaled into (0, caps[i]].  Work is chunked so peak memory stays
    bounded regardless of the count distribution; the uniform stream order is
    deterministic for a fixed (counts, caps, chunk).
    """
    counts = np.asarray(counts, dtype=np.int64)
    caps = np.asarray(caps, dtype=float)
    out = np.zeros(counts.shape[0], dtype=float)
    remaining = counts.copy()
    pos = 0
    while pos < remaining.size:
        if remaining[pos] == 0:
            pos += 1
            continue
        idx_list = []
        take_list = []
        room = chunk
        j = pos
        while j < remaining.size and room > 0:
            c = int(remaining[j])
            if c == 0:
                j += 1
                continue
            take = min(c, room)
            idx_list.append(j)
            take_list.append(take)
            remaining[j] -= take
            room -= take
            if remaining[j] > 0:
                break
            j += 1
        idx = np.asarray(idx_list, dtype=np.int64)
        take = np.asarray(take_list, dtype=np.int64)
        total = int(take.sum())
        u = rng.random(total)
        scaled = np.repeat(caps[idx], take) * (1.0 - u)
        inc = dist._ppf(scaled)
        offsets = np.concatenate(([0], np.cumsum(take[:-1])))
        np.add.at(out, idx, np.add.reduceat(inc, offsets))
        pos = j if j < remaining.size and remaining[j] == 0 else j
    return out
