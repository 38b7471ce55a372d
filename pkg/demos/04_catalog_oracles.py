"""
Catalog families as oracles
===========================

Each catalog family has an exact tail integral, and the exponential and
p = 2 families have exact sums. Other sums come from 10^6 direct terms
plus an integral bracket on the remainder.
"""

import math

from seriesbound import closed_sum, integrate_tail, lookup, refined_bounds, sum_bracket

entries = [
    lookup("p_series", {"p": 2}),
    lookup("p_series", {"p": 3}),
    lookup("shifted_quadratic", {"a": 2}),
    lookup("exponential", {"a": math.log(2)}),
]

for e in entries:
    q = integrate_tail(e, 10)
    lo, hi = sum_bracket(e)
    b = refined_bounds(e, 100)
    print(f"{e.name:18} {str(dict(e.params)):22}"
          f" tail(10): quad {q.value:.12f} exact {e.closed_tail(10):.12f} (+- {q.abs_error_estimate:.1e})")
    print(f"{'':41} S in [{lo:.12f}, {hi:.12f}], refined n=100: [{b.lower:.9f}, {b.upper:.9f}]"
          f" contains: {b.lower <= closed_sum(e) <= b.upper}")
