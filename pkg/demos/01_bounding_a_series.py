"""
Bounding sum 1/(k^2 + 4) from its integral
==========================================

The integral of f(x) = 1/(x^2 + 4) over [1, inf) brackets the series both
ways: I <= S <= I + f(1). A partial sum plus the tail integral from n
gives a much tighter interval.
"""

import math

from seriesbound import (integral_bounds_from_series, parse_expr, partial_sum, refined_bounds,
                         triple_bounds)

f = parse_expr("1/(x^2 + 4)")

# The improper integral has the closed form (pi/2 - atan(1/2)) / 2.
exact_integral = 0.5 * (math.pi / 2 - math.atan(0.5))

b = triple_bounds(f)
print(f"I = {b.tail_integral:.6f}   (closed form {exact_integral:.6f})")
print(f"{b.lower:.6f} <= S <= {b.upper:.6f}")

# Summing the first 1000 terms directly.
s1000 = partial_sum(f, 1000)
print(f"S_1000 = {s1000:.6f}")

# Adding the tail integral from n = 1000 closes the gap to about 1e-3.
r = refined_bounds(f, 1000)
print(f"{r.lower:.6f} <= S <= {r.upper:.6f}   (width {r.width:.2e})")

# The classical cotangent identity gives the true sum for comparison.
a = 2.0
true_sum = (math.pi * a / math.tanh(math.pi * a) - 1) / (2 * a * a)
print(f"true S = {true_sum:.9f}, inside: {r.lower <= true_sum <= r.upper}")

# And the reverse direction: the series interval bounds the integral.
lo, hi = integral_bounds_from_series(r.lower, r.upper, r.f1)
print(f"{lo:.6f} <= I <= {hi:.6f}")
