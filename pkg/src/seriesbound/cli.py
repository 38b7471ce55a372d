"""Command-line front end.

Usage::

    seriesbound --expr "1/(x^2+4)" --method triple
    seriesbound --catalog p_series --param p=2 --method adaptive --target-width 1e-4 --json
    seriesbound --batch requests.json

Exit codes: 0 all ok, 1 divergent or width not reached, 2 usage, parse or
validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Optional

from . import bounds as _bounds
from .catalog import lookup
from .errors import (DomainError, EvalError, HypothesisViolation, LexError, ParamError,
                     ParseError, SeriesBoundError, UnknownEntry)
from .expr import CheckReport, Witness, parse_expr
from .quadrature import QuadConfig

__all__ = ["RunRequest", "RunReport", "UsageError", "parse_args", "run", "run_batch",
           "load_batch", "format_text", "main", "EXIT_CODES"]

METHODS = ("triple", "refined", "adaptive")

EXIT_CODES = {
    "ok": 0,
    "hypothesis_unverified": 0,
    "divergent": 1,
    "width_not_reached": 1,
}
_ERROR_EXIT = {"usage": 2, "parse": 2, "validation": 2, "hypothesis_violation": 2,
               "numeric": 3}


class UsageError(SeriesBoundError):
    pass


@dataclass
class RunRequest:
    expr: Optional[str] = None
    catalog: Optional[str] = None
    params: dict = field(default_factory=dict)
    method: str = "triple"
    n: Optional[int] = None
    target_width: float = 1e-6
    quad_tol: float = 1e-10
    n_cap: int = 2**22
    skip_screening: bool = False
    also_integral: bool = False
    output_format: str = "text"

    def validate(self) -> "RunRequest":
        if (self.expr is None) == (self.catalog is None):
            raise UsageError("give exactly one of --expr or --catalog")
        if self.params and self.catalog is None:
            raise UsageError("--param only applies with --catalog")
        if self.method not in METHODS:
            raise UsageError(f"--method must be one of {', '.join(METHODS)}")
        if self.method == "refined" and self.n is None:
            raise UsageError("--method refined requires --n")
        if self.n is not None and (not isinstance(self.n, int) or self.n < 1):
            raise UsageError("--n must be an integer >= 1")
        if not _positive(self.target_width):
            raise UsageError("--target-width must be a positive real")
        if not _positive(self.quad_tol):
            raise UsageError("--quad-tol must be a positive real")
        if not isinstance(self.n_cap, int) or self.n_cap < 1:
            raise UsageError("--n-cap must be an integer >= 1")
        if self.output_format not in ("text", "structured"):
            raise UsageError("output format must be text or structured")
        return self

    def source(self):
        """The function to bound: a parsed expression or a catalog entry."""
        if self.expr is not None:
            return parse_expr(self.expr)
        return lookup(self.catalog, self.params)

    def to_record(self) -> dict:
        return asdict(self)

    @classmethod
    def from_record(cls, record: Any) -> "RunRequest":
        if not isinstance(record, dict):
            raise UsageError("batch records must be objects")
        known = {f.name for f in fields(cls)}
        unknown = set(record) - known
        if unknown:
            raise UsageError(f"unknown field(s) {', '.join(sorted(unknown))}")
        data = dict(record)
        for key in ("n", "n_cap"):
            if data.get(key) is not None and not _is_int(data[key]):
                raise UsageError(f"{key} must be an integer")
        for key in ("target_width", "quad_tol"):
            if key in data and not _is_real(data[key]):
                raise UsageError(f"{key} must be a real number")
            if key in data:
                data[key] = float(data[key])
        for key in ("skip_screening", "also_integral"):
            if key in data and not isinstance(data[key], bool):
                raise UsageError(f"{key} must be true or false")
        if "params" in data:
            if not isinstance(data["params"], dict) or not all(
                    _is_real(v) for v in data["params"].values()):
                raise UsageError("params must map names to real numbers")
            data["params"] = {k: float(v) for k, v in data["params"].items()}
        for key in ("expr", "catalog", "method", "output_format"):
            if data.get(key) is not None and not isinstance(data[key], str):
                raise UsageError(f"{key} must be a string")
        return cls(**data).validate()


def _positive(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) and v > 0


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_real(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class RunReport:
    request: RunRequest
    status: str
    bounds: Optional[_bounds.SeriesBounds] = None
    screening: Optional[CheckReport] = None
    integral_bounds: Optional[tuple] = None
    timing_ms: float = 0.0
    error_kind: Optional[str] = None
    error_message: Optional[str] = None

    @property
    def exit_code(self) -> int:
        if self.status == "error":
            return _ERROR_EXIT[self.error_kind]
        return EXIT_CODES[self.status]

    def to_dict(self) -> dict:
        b = self.bounds
        out = {
            "request": self.request.to_record(),
            "status": self.status,
            "exit_code": self.exit_code,
            "bounds": None,
            "screening": _screening_dict(self.screening),
            "integral_bounds": None,
            "timing_ms": self.timing_ms,
            "error": None,
        }
        if b is not None:
            out["bounds"] = {
                "lower": _num(b.lower),
                "upper": _num(b.upper),
                "method": b.method,
                "n_terms": b.n_terms,
                "partial_sum": _num(b.partial_sum),
                "tail_integral": _num(b.tail_integral),
                "quad_error": _num(b.quad_error),
                "f1": b.f1,
                "diverged": b.diverged,
                "target_met": b.target_met,
                "hypotheses_verified": b.hypotheses_verified,
            }
        if self.integral_bounds is not None:
            out["integral_bounds"] = {"lower": self.integral_bounds[0],
                                      "upper": self.integral_bounds[1]}
        if self.status == "error":
            out["error"] = {"kind": self.error_kind, "message": self.error_message}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        screening = _screening_from(data.get("screening"))
        b = data.get("bounds")
        series = None
        if b is not None:
            series = _bounds.SeriesBounds(
                _inf(b["lower"]), _inf(b["upper"]), b["method"], b["n_terms"],
                _inf(b["partial_sum"]), _inf(b["tail_integral"]), _inf(b["quad_error"]),
                b["f1"], b["diverged"], b["target_met"], b["hypotheses_verified"], screening)
        ib = data.get("integral_bounds")
        err = data.get("error") or {}
        return cls(RunRequest(**data["request"]), data["status"], series, screening,
                   (ib["lower"], ib["upper"]) if ib else None, data["timing_ms"],
                   err.get("kind"), err.get("message"))


def _num(v):
    # infinities only arise on divergence, which the status field carries
    return v if math.isfinite(v) else None


def _inf(v):
    return math.inf if v is None else v


def _screening_dict(report: Optional[CheckReport]):
    if report is None:
        return None
    out = asdict(report)
    w = out["counterexample"]
    if w is not None and not math.isfinite(w["value"]):
        w["value"] = None
    return out


def _screening_from(data):
    if data is None:
        return None
    data = dict(data)
    w = data.get("counterexample")
    if w is not None:
        w = dict(w)
        w["value"] = math.nan if w["value"] is None else w["value"]
        data["counterexample"] = Witness(**w)
    return CheckReport(**data)


# ---------------------------------------------------------------------------
# Execution


def run(request: RunRequest) -> RunReport:
    """Screen, bound and package one request. Failures become a status, not an exception."""
    start = time.perf_counter()

    def done(status, **kw):
        return RunReport(request, status, timing_ms=1e3 * (time.perf_counter() - start), **kw)

    try:
        request.validate()
        f = request.source()
    except UsageError as exc:
        return done("error", error_kind="usage", error_message=str(exc))
    except (LexError, ParseError) as exc:
        return done("error", error_kind="parse", error_message=str(exc))
    except (UnknownEntry, ParamError) as exc:
        return done("error", error_kind="validation", error_message=str(exc))

    cfg = QuadConfig(abs_tol=request.quad_tol)
    skip = request.skip_screening
    try:
        if request.method == "triple":
            result = _bounds.triple_bounds(f, cfg, skip_screening=skip)
        elif request.method == "refined":
            result = _bounds.refined_bounds(f, request.n, cfg, skip_screening=skip)
        else:
            result = _bounds.adaptive_bounds(f, request.target_width, cfg, request.n_cap,
                                             skip_screening=skip)
    except HypothesisViolation as exc:
        return done("error", screening=exc.report, error_kind="hypothesis_violation",
                    error_message=str(exc))
    except DomainError as exc:
        return done("error", error_kind="validation", error_message=str(exc))
    except (EvalError, FloatingPointError, OverflowError) as exc:
        return done("error", error_kind="numeric", error_message=str(exc))

    integral = None
    if result.diverged:
        status = "divergent"
    else:
        if request.also_integral:
            integral = _bounds.integral_bounds_from_series(result.lower, result.upper, result.f1)
        if not result.target_met:
            status = "width_not_reached"
        elif skip:
            status = "hypothesis_unverified"
        else:
            status = "ok"
    return done(status, bounds=result, screening=result.screening, integral_bounds=integral)


def format_text(report: RunReport) -> str:
    """Human-readable rendering: the interval at 6 decimals, then full precision."""
    if report.status == "error":
        return f"error ({report.error_kind}): {report.error_message}"
    b = report.bounds
    if b.diverged:
        return (f"S diverges: the tail integral from n = {b.n_terms} does not converge "
                "(the series and its integral diverge together)")
    lines = [f"{b.lower:.6f} <= S <= {b.upper:.6f}"]
    if report.integral_bounds is not None:
        lo, hi = report.integral_bounds
        lines.append(f"{lo:.6f} <= I <= {hi:.6f}")
    lines.append(f"  lower = {b.lower:.12g}")
    lines.append(f"  upper = {b.upper:.12g}")
    lines.append(f"  method = {b.method}, n = {b.n_terms}, S_n = {b.partial_sum:.12g}, "
                 f"I_n = {b.tail_integral:.12g}, quadrature error <= {b.quad_error:.3g}")
    if report.status == "width_not_reached":
        lines.append(f"  target width {report.request.target_width:g} not reached "
                     f"before n_cap = {report.request.n_cap}")
    if not b.hypotheses_verified:
        lines.append("  hypotheses unverified: screening was skipped")
    return "\n".join(lines)


def load_batch(path) -> list[RunRequest]:
    """Read and validate every record of a batch file before anything runs."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read batch file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed batch file: {exc}") from None
    if not isinstance(data, list):
        raise UsageError("batch file must hold a JSON array of request records")
    requests = []
    for i, record in enumerate(data):
        try:
            req = RunRequest.from_record(record)
            req.source()
        except (UsageError, LexError, ParseError, UnknownEntry, ParamError, TypeError) as exc:
            raise UsageError(f"record {i}: {exc}") from None
        requests.append(req)
    return requests


def run_batch(path, max_workers: Optional[int] = None) -> list[RunReport]:
    requests = load_batch(path)
    if not requests:
        return []
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run, requests))


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _param(text):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}")
    try:
        return key, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key!r} needs a real value") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="seriesbound",
                description="Two-sided bounds for series of positive decreasing terms.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--expr", help="f(x) in the expression language, e.g. '1/(x^2+4)'")
    src.add_argument("--catalog", help="built-in family: p_series, shifted_quadratic, "
                     "exponential, harmonic")
    src.add_argument("--batch", metavar="PATH", help="JSON array of request records")
    p.add_argument("--param", action="append", type=_param, default=[], metavar="K=V")
    p.add_argument("--method", choices=METHODS, default="triple")
    p.add_argument("--n", type=int)
    p.add_argument("--target-width", type=float, default=1e-6)
    p.add_argument("--quad-tol", type=float, default=1e-10)
    p.add_argument("--n-cap", type=int, default=2**22)
    p.add_argument("--skip-screening", action="store_true")
    p.add_argument("--json", action="store_true", help="emit a structured JSON report")
    p.add_argument("--also-integral", action="store_true",
                   help="also bound the improper integral from the series interval")
    return p


def _namespace_to_request(ns) -> RunRequest:
    return RunRequest(
        expr=ns.expr, catalog=ns.catalog, params=dict(ns.param), method=ns.method,
        n=ns.n, target_width=ns.target_width, quad_tol=ns.quad_tol, n_cap=ns.n_cap,
        skip_screening=ns.skip_screening, also_integral=ns.also_integral,
        output_format="structured" if ns.json else "text",
    ).validate()


def parse_args(argv) -> RunRequest:
    ns = build_parser().parse_args(list(argv))
    if ns.batch is not None:
        raise UsageError("--batch is handled by main(); use load_batch for the records")
    return _namespace_to_request(ns)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = build_parser().parse_args(argv)
        if ns.batch is not None:
            reports = run_batch(ns.batch)
        else:
            reports = None
            request = _namespace_to_request(ns)
    except UsageError as exc:
        print(f"seriesbound: error: {exc}", file=sys.stderr)
        return 2

    if reports is not None:
        for report in reports:
            print(json.dumps(report.to_dict()))
        return max((r.exit_code for r in reports), default=0)

    report = run(request)
    if request.output_format == "structured":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        stream = sys.stderr if report.status == "error" else sys.stdout
        print(format_text(report), file=stream)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
