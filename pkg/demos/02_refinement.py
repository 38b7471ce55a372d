"""
Tightening the interval by taking more terms
============================================

The width of S_n <= S <= S_n + I_n is the tail integral I_n, so for
1/(x^2 + 4) it shrinks roughly like 1/n. The adaptive driver doubles n
until a target width is met.
"""

from seriesbound import adaptive_bounds, parse_expr, refined_bounds, verify_sandwich

f = parse_expr("1/(x^2 + 4)")

print(f"{'n':>6} {'lower':>12} {'upper':>12} {'width':>10}")
for k in range(0, 13, 2):
    n = 2 ** k
    b = refined_bounds(f, n)
    print(f"{n:>6} {b.lower:12.9f} {b.upper:12.9f} {b.width:10.3e}")

for target in (1e-1, 1e-3, 1e-6):
    b = adaptive_bounds(f, target)
    print(f"target {target:g}: n = {b.n_terms}, width = {b.width:.3e}")

# Each refined interval comes from the rectangle sandwich
# f(2) + ... + f(n) <= integral over [1, n] <= f(1) + ... + f(n-1).
for n in (2, 5, 20):
    r = verify_sandwich(f, n)
    print(f"n={n:>2}: {r.s_inf:.6f} <= {r.integral_1_to_n:.6f} <= {r.s_sup:.6f}  holds={r.holds}")
