"""Certified two-sided bounds linking positive decreasing series and their integrals."""

from .bounds import (SandwichReport, SeriesBounds, adaptive_bounds, integral_bounds_from_series,
                     partial_sum, refined_bounds, screen, triple_bounds, verify_sandwich)
from .catalog import CatalogEntry, closed_sum, closed_tail, lookup, sum_bracket
from .errors import (DivergentSeries, DomainError, EvalError, HypothesisViolation, LexError,
                     ParamError, ParseError, SeriesBoundError, UnknownEntry)
from .expr import (CheckReport, Expr, Token, check_positive_decreasing, differentiate, evaluate,
                   parse, parse_expr, tokenize)
from .quadrature import QuadConfig, QuadResult, integrate_finite, integrate_tail

__version__ = "0.1.0"
