"""
Divergent series and failed hypotheses
======================================

A series and its integral converge or diverge together. A tail that
cannot be integrated to tolerance is reported as divergence rather than as
a large number. Inputs that are not positive and decreasing are rejected
by a sampling screen unless the caller opts out.
"""

from seriesbound import (HypothesisViolation, check_positive_decreasing, integrate_tail,
                         lookup, parse_expr, refined_bounds, triple_bounds)

for name, params in [("harmonic", {}), ("p_series", {"p": 0.5}), ("p_series", {"p": 1.0}),
                     ("p_series", {"p": 1.5})]:
    entry = lookup(name, params)
    b = triple_bounds(entry)
    status = "diverges" if b.diverged else f"[{b.lower:.6f}, {b.upper:.6f}]"
    print(f"{name} {params}: {status}")

# The partial integral of a heavy tail is flagged when it runs past 1e12.
r = integrate_tail(parse_expr("x^-0.5"), 1)
print(f"x^-0.5 tail: converged={r.converged}, huge={r.huge}")

report = check_positive_decreasing(parse_expr("sin(x)"), 1, 10, 100)
print(report.positive_ok, report.decreasing_ok, report.counterexample)
print(report.caveat)

try:
    refined_bounds(parse_expr("1/x + sin(x)/x^2"), 10)
except HypothesisViolation as exc:
    print("rejected:", exc)

# Skipping the screen is allowed; the result says so.
b = refined_bounds(parse_expr("1/x^2"), 10, skip_screening=True)
print(f"unscreened: [{b.lower:.6f}, {b.upper:.6f}], verified={b.hypotheses_verified}")
