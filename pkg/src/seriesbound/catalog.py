"""Function families with closed-form tail integrals.

Each family is positive and decreasing on [1, inf) for every valid
parameter choice, so entries double as ready-made inputs and as oracles
for the quadrature and bounds engines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import DivergentSeries, ParamError, UnknownEntry
from .expr import Expr, parse_expr

__all__ = ["CatalogEntry", "lookup", "closed_tail", "closed_sum", "sum_bracket",
           "FAMILIES", "ORACLE_TERMS"]

FAMILIES = {
    "p_series": ("p",),
    "shifted_quadratic": ("a",),
    "exponential": ("a",),
    "harmonic": (),
}

# terms summed directly by the brute-force sum oracle
ORACLE_TERMS = 10**6


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: Mapping[str, float]
    f: Callable = field(repr=False, compare=False)
    expr: Expr = field(repr=False, compare=False)
    convergent: bool

    def __call__(self, x):
        return self.f(x)

    def closed_tail(self, n: float) -> float:
        return closed_tail(self, n)

    def closed_sum(self) -> float:
        return closed_sum(self)


def _param(name, params, key, *, positive=True):
    if key not in params:
        raise ParamError(f"{name} requires parameter {key!r}")
    try:
        value = float(params[key])
    except (TypeError, ValueError):
        raise ParamError(f"{name}: parameter {key!r} must be a real number") from None
    if not math.isfinite(value):
        raise ParamError(f"{name}: parameter {key!r} must be finite")
    if positive and value <= 0:
        raise ParamError(f"{name}: requires {key} > 0, got {value!r}")
    return value


def lookup(name: str, params: Optional[Mapping[str, float]] = None) -> CatalogEntry:
    """Return the catalog entry ``name`` with validated parameters."""
    params = dict(params or {})
    if name not in FAMILIES:
        raise UnknownEntry(f"unknown catalog entry {name!r}; "
                           f"choose from {', '.join(FAMILIES)}")
    extra = set(params) - set(FAMILIES[name])
    if extra:
        raise ParamError(f"{name}: unexpected parameter(s) {', '.join(sorted(extra))}")

    if name == "p_series":
        p = _param(name, params, "p")
        return CatalogEntry(name, {"p": p}, lambda x: np.power(x, -p),
                            parse_expr(f"x^(-({p!r}))"), p > 1)
    if name == "shifted_quadratic":
        a = _param(name, params, "a")
        a2 = a * a
        return CatalogEntry(name, {"a": a}, lambda x: 1.0 / (np.square(x) + a2),
                            parse_expr(f"1/(x^2 + {a!r}^2)"), True)
    if name == "exponential":
        a = _param(name, params, "a")
        return CatalogEntry(name, {"a": a}, lambda x: np.exp(-a * np.asarray(x)),
                            parse_expr(f"exp(-({a!r})*x)"), True)
    return CatalogEntry(name, {}, lambda x: 1.0 / np.asarray(x, dtype=float),
                        parse_expr("1/x"), False)


def closed_tail(entry: CatalogEntry, n: float) -> float:
    """Exact value of the tail integral of ``entry`` over [n, inf)."""
    if n < 1:
        raise ParamError(f"tail start must be >= 1, got {n!r}")
    if not entry.convergent:
        raise DivergentSeries(f"{entry.name} {dict(entry.params)} has a divergent tail")
    if entry.name == "p_series":
        p = entry.params["p"]
        return n ** (1.0 - p) / (p - 1.0)
    if entry.name == "shifted_quadratic":
        a = entry.params["a"]
        # pi/2 - atan(n/a) == atan(a/n) for n > 0, without cancellation
        return math.atan(a / n) / a
    a = entry.params["a"]
    return math.exp(-a * n) / a


@lru_cache(maxsize=256)
def _bracket(name, items):
    entry = lookup(name, dict(items))
    k = np.arange(1, ORACLE_TERMS + 1, dtype=float)
    head = math.fsum(entry.f(k))
    return (head + closed_tail(entry, ORACLE_TERMS + 1),
            head + closed_tail(entry, ORACLE_TERMS))


def sum_bracket(entry: CatalogEntry) -> tuple[float, float]:
    """Interval certainly containing the series sum.

    Exact families return a degenerate interval. Otherwise the first 10**6
    terms are summed directly and the remainder is bracketed by the tail
    integrals from 10**6 + 1 and from 10**6.
    """
    if not entry.convergent:
        raise DivergentSeries(f"{entry.name} {dict(entry.params)} diverges")
    if entry.name == "exponential":
        s = 1.0 / math.expm1(entry.params["a"])
        return s, s
    if entry.name == "p_series" and entry.params["p"] == 2.0:
        s = math.pi ** 2 / 6
        return s, s
    return _bracket(entry.name, tuple(sorted(entry.params.items())))


def closed_sum(entry: CatalogEntry) -> float:
    """Exact or oracle value of the full series sum (midpoint of the bracket)."""
    lo, hi = sum_bracket(entry)
    return 0.5 * (lo + hi)
