"""Shared numerical helpers.

Upper incomplete gamma for arbitrary real order (needed by the log-perturbed
Pareto family), a doubling-bracket root finder, and piecewise adaptive
quadrature for integrands with known interior landmarks.
"""
from __future__ import annotations

import math
from functools import lru_cache

from scipy import integrate, optimize
from scipy import special as sc


class BracketingError(RuntimeError):
    """Raised when bracket expansion fails to enclose a sign change."""


def log_upper_gamma(a: float, x: float) -> float:
    """log of the (unregularized) upper incomplete gamma integral at x > 0.

    Valid for any real order ``a``; the integrand s^{a-1} e^{-s} has no
    singularity on [x, inf) when x > 0.
    """
    if x <= 0.0:
        raise ValueError("x must be positive")
    a = float(a)
    x = float(x)
    if a > 0.0:
        q = float(sc.gammaincc(a, x))
        if q > 1e-280:
            return math.log(q) + float(sc.gammaln(a))
    if x >= 30.0 + 2.0 * abs(a):
        # Truncated divergent series; terms shrink fast in this x-range.
        term, series = 1.0, 1.0
        for k in range(1, 16):
            term *= (a - k) / x
            series += term
            if abs(term) < 1e-18:
                break
        return (a - 1.0) * math.log(x) - x + math.log(series)
    return _log_upper_gamma_mp(a, x)


@lru_cache(maxsize=4096)
def _log_upper_gamma_mp(a: float, x: float) -> float:
    import mpmath as mp

    return float(mp.log(mp.gammainc(a, x, mp.inf)))


def upper_gamma(a: float, x: float) -> float:
    """Unregularized upper incomplete gamma integral at x > 0, any real a."""
    return math.exp(log_upper_gamma(a, x))


def increasing_root(fn, hi0: float, max_doublings: int = 60, rtol: float = 1e-12) -> float:
    """Positive root of an increasing function with fn(0) < 0.

    The upper bracket starts at ``hi0`` and doubles until the sign flips;
    a cap keeps termination deterministic.
    """
    lo, f_lo = 0.0, None
    hi = float(hi0)
    f_hi = fn(hi)
    doublings = 0
    while f_hi < 0.0:
        lo, hi = hi, 2.0 * hi
        doublings += 1
        if doublings > max_doublings:
            raise BracketingError(
                f"no sign change after {max_doublings} bracket doublings (hi={hi:g})"
            )
        f_hi = fn(hi)
    if f_hi == 0.0:
        return hi
    # xtol must not dominate for roots many orders below 1
    return float(optimize.brentq(fn, lo, hi, rtol=rtol, xtol=1e-280, maxiter=300))


def quad_piecewise(fn, a: float, b: float, landmarks=(), epsrel: float = 1e-10,
                   limit: int = 200) -> float:
    """Adaptive quadrature of fn over [a, b], split at interior landmarks."""
    pts = [float(a)]
    for p in sorted(set(float(q) for q in landmarks)):
        if pts[-1] < p < b:
            pts.append(p)
    pts.append(float(b))
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(fn, lo, hi, epsabs=1e-300, epsrel=epsrel, limit=limit)
        total += val
    return total
