"""Two-sided bounds between a series of decreasing terms and its integral.

For f positive, continuous and decreasing on [1, inf) with a_k = f(k),
S = sum_{k>=1} a_k and I = ∫_1^inf f:

    S - f(1) <= I <= S <= I + f(1)
    S_n <= S <= S_n + I_n,   I_n = ∫_n^inf f

Every bound that uses a quadrature value is widened outward by that
value's error estimate. A tail that cannot be integrated to tolerance is
reported as divergence, never as a large finite number.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .catalog import CatalogEntry
from .errors import DomainError, EvalError, HypothesisViolation
from .expr import (CheckReport, Expr, _pointwise, check_positive_decreasing, parse_expr,
                   screen_samples)
from .quadrature import QuadConfig, as_vectorized, integrate_finite, integrate_tail

__all__ = [
    "SeriesBounds",
    "SandwichReport",
    "partial_sum",
    "triple_bounds",
    "refined_bounds",
    "adaptive_bounds",
    "integral_bounds_from_series",
    "verify_sandwich",
    "screen",
    "DEFAULT_SCREEN_SAMPLES",
]

DEFAULT_SCREEN_SAMPLES = 1000
_SUM_CHUNK = 1 << 20
# ulps of S_n + I_n added to the widening: term evaluation plus the final additions
_ROUNDING_ULPS = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class SeriesBounds:
    """Interval [lower, upper] for S with the quantities it was built from.

    ``quad_error`` is the outward widening of the upper end: the quadrature
    error estimate plus a few ulps of S_n + I_n for rounding in the terms
    and sums. Lower ends built from S_n are widened by the rounding part only. When ``diverged`` is set both ends are ``inf``.
    ``target_met`` is only
    meaningful for the adaptive method. ``hypotheses_verified`` is False
    when screening was skipped.
    """

    lower: float
    upper: float
    method: str
    n_terms: int
    partial_sum: float
    tail_integral: float
    quad_error: float
    f1: float
    diverged: bool = False
    target_met: bool = True
    hypotheses_verified: bool = True
    screening: Optional[CheckReport] = None

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class SandwichReport:
    n: int
    s_inf: float
    integral_1_to_n: float
    s_sup: float
    quad_error: float
    holds: bool
    slack_low: float
    slack_high: float


# ---------------------------------------------------------------------------
# Helpers


def _resolve(f):
    """Return (vectorized callable, Expr or None) for any accepted input."""
    if isinstance(f, str):
        f = parse_expr(f)
    if isinstance(f, Expr):
        return f, f
    if isinstance(f, CatalogEntry):
        return f, f.expr
    return as_vectorized(f), None


def _values(func, ks):
    out = np.asarray(func(ks), dtype=float)
    out = np.broadcast_to(out, ks.shape)
    if not np.all(np.isfinite(out)):
        i = int(np.argmin(np.isfinite(out)))
        raise EvalError(f"non-finite term at k={int(ks[i])}")
    return out


def _sum_range(func, start, stop):
    """Correctly rounded sum of f(k) for k = start..stop inclusive."""
    chunks = (_values(func, np.arange(lo, min(stop, lo + _SUM_CHUNK - 1) + 1, dtype=float))
              for lo in range(start, stop + 1, _SUM_CHUNK))
    return math.fsum(itertools.chain.from_iterable(chunks))


def screen(f, x_max: float = 1e4, samples: int = DEFAULT_SCREEN_SAMPLES) -> CheckReport:
    """Sample-based check that f is positive and decreasing on [1, x_max].

    Symbolic inputs are checked through their derivative; bare callables
    through successive differences on the grid.
    """
    func, expr = _resolve(f)
    if expr is not None:
        return check_positive_decreasing(expr, 1.0, x_max, samples)
    xs = np.linspace(1.0, x_max, samples)
    fx, errors = _pointwise(func, xs)
    steps = np.concatenate([[-math.inf], np.diff(fx)])
    return screen_samples(fx, steps, xs, errors, quantity="step")


def _screen_range(n):
    return max(1e4, 10.0 * n)


def _prepare(f, skip_screening, n_used):
    func, expr = _resolve(f)
    if skip_screening:
        return func, None
    report = screen(f, _screen_range(n_used))
    if not report.ok:
        w = report.counterexample
        raise HypothesisViolation(
            f"f failed the positive/decreasing screen at x={w.x!r} "
            f"({w.quantity}={w.value!r})", report)
    return func, report


def _diverged(method, n, s_n, f1, report, skip):
    return SeriesBounds(math.inf, math.inf, method, n, s_n, math.inf, math.inf, f1,
                        diverged=True, target_met=False,
                        hypotheses_verified=not skip, screening=report)


# ---------------------------------------------------------------------------
# Operations


def partial_sum(f, n: int) -> float:
    """Sum of f(k) for k = 1..n, accumulated without order-dependent drift."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    func, _ = _resolve(f)
    return _sum_range(func, 1, int(n))


def triple_bounds(f, cfg: Optional[QuadConfig] = None, *,
                  skip_screening: bool = False) -> SeriesBounds:
    """Bound S by the improper integral: I <= S <= I + f(1).

    The lower end is tightened to max(I, f(1)), both being valid lower bounds.
    """
    cfg = cfg or QuadConfig()
    func, report = _prepare(f, skip_screening, 1)
    f1 = float(_values(func, np.array([1.0]))[0])
    if f1 <= 0:
        raise HypothesisViolation(f"f(1) must be positive, got {f1!r}", report)
    quad = integrate_tail(func, 1.0, cfg)
    if not quad.converged:
        return _diverged("triple", 1, f1, f1, report, skip_screening)
    err = quad.abs_error_estimate + _ROUNDING_ULPS * (f1 + quad.value)
    return SeriesBounds(max(quad.value, f1) - err, quad.value + f1 + err, "triple", 1,
                        f1, quad.value, err, f1,
                        hypotheses_verified=not skip_screening, screening=report)


def _refined(func, n, s_n, f1, cfg, report, skip, method="refined"):
    quad = integrate_tail(func, float(n), cfg)
    if not quad.converged:
        return _diverged(method, n, s_n, f1, report, skip)
    rounding = _ROUNDING_ULPS * (s_n + quad.value)
    err = quad.abs_error_estimate + rounding
    # S_n carries no quadrature error, so the lower end needs only the rounding margin
    return SeriesBounds(s_n - rounding, s_n + quad.value + err, method, n, s_n, quad.value,
                        err, f1,
                        hypotheses_verified=not skip, screening=report)


def refined_bounds(f, n: int, cfg: Optional[QuadConfig] = None, *,
                   skip_screening: bool = False) -> SeriesBounds:
    """Bound S by a partial sum and its tail integral: S_n <= S <= S_n + I_n."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    n = int(n)
    cfg = cfg or QuadConfig()
    func, report = _prepare(f, skip_screening, n)
    f1 = float(_values(func, np.array([1.0]))[0])
    if f1 <= 0:
        raise HypothesisViolation(f"f(1) must be positive, got {f1!r}", report)
    s_n = _sum_range(func, 1, n)
    return _refined(func, n, s_n, f1, cfg, report, skip_screening)


def adaptive_bounds(f, target_width: float, cfg: Optional[QuadConfig] = None,
                    n_cap: int = 2**22, *, skip_screening: bool = False) -> SeriesBounds:
    """Double n from 1 until the refined interval is at most ``target_width`` wide.

    If the next doubling would pass ``n_cap`` the tightest interval so far is
    returned with ``target_met=False``.
    """
    if not target_width > 0:
        raise DomainError("target_width must be > 0")
    if int(n_cap) != n_cap or n_cap < 1:
        raise DomainError("n_cap must be an integer >= 1")
    cfg = cfg or QuadConfig()
    func, report = _prepare(f, skip_screening, n_cap)
    f1 = float(_values(func, np.array([1.0]))[0])
    if f1 <= 0:
        raise HypothesisViolation(f"f(1) must be positive, got {f1!r}", report)

    # terms are kept so every stage's S_n is rounded once, exactly as partial_sum
    n, terms = 1, [np.array([f1])]
    while True:
        s_n = math.fsum(itertools.chain.from_iterable(terms))
        bounds = _refined(func, n, s_n, f1, cfg, report, skip_screening, "adaptive")
        if bounds.diverged:
            return bounds
        if bounds.width <= target_width:
            return bounds
        if 2 * n > n_cap:
            return replace(bounds, target_met=False)
        for lo in range(n + 1, 2 * n + 1, _SUM_CHUNK):
            hi = min(2 * n, lo + _SUM_CHUNK - 1)
            terms.append(_values(func, np.arange(lo, hi + 1, dtype=float)))
        n *= 2


def integral_bounds_from_series(s_lower: float, s_upper: float, f1: float) -> tuple[float, float]:
    """Bound I from an interval for S: S - f(1) <= I <= S."""
    if not f1 > 0:
        raise DomainError(f"f(1) must be positive, got {f1!r}")
    if not s_lower <= s_upper:
        raise DomainError(f"need s_lower <= s_upper, got [{s_lower!r}, {s_upper!r}]")
    return s_lower - f1, s_upper


def verify_sandwich(f, n: int, cfg: Optional[QuadConfig] = None) -> SandwichReport:
    """Check S_n - f(1) <= ∫_1^n f <= S_{n-1} numerically.

    Both inequalities are allowed the quadrature error estimate as slack.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    cfg = cfg or QuadConfig()
    func, _ = _resolve(f)
    terms = _values(func, np.arange(1, n + 1, dtype=float))
    s_inf = math.fsum(terms[1:])
    s_sup = math.fsum(terms[:-1])
    quad = integrate_finite(func, 1.0, float(n), cfg, points=np.arange(2.0, n))
    err = quad.abs_error_estimate
    integral = quad.value
    holds = s_inf <= integral + err and integral <= s_sup + err
    return SandwichReport(n, s_inf, integral, s_sup, err, holds,
                          integral - s_inf, s_sup - integral)
