import math

import numpy as np
import pytest

from seriesbound import catalog
from seriesbound.errors import DivergentSeries, ParamError, UnknownEntry
from seriesbound.expr import check_positive_decreasing


def test_quad4_is_shifted_quadratic_with_a_2():
    entry = catalog.lookup("shifted_quadratic", {"a": 2})
    assert entry.f(1.0) == 0.2 and entry.expr(1.0) == 0.2
    assert entry.convergent


def test_p_equal_one_is_divergent():
    entry = catalog.lookup("p_series", {"p": 1})
    assert not entry.convergent
    with pytest.raises(DivergentSeries):
        entry.closed_tail(1)


@pytest.mark.parametrize("name, params", [
    ("p_series", {"p": -1}), ("p_series", {"p": 0}), ("p_series", {}),
    ("shifted_quadratic", {"a": 0}), ("exponential", {"a": -0.5}),
    ("exponential", {"a": "x"}), ("harmonic", {"p": 1}), ("p_series", {"p": math.nan}),
])
def test_param_errors(name, params):
    with pytest.raises(ParamError):
        catalog.lookup(name, params)


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        catalog.lookup("zeta", {})


def test_closed_tail_examples():
    sq = catalog.lookup("shifted_quadratic", {"a": 2})
    assert abs(sq.closed_tail(1) - 0.553574) < 5e-7
    assert catalog.lookup("p_series", {"p": 2}).closed_tail(10) == pytest.approx(0.1, rel=1e-15)
    assert catalog.lookup("exponential", {"a": 1}).closed_tail(1) == pytest.approx(
        math.exp(-1), rel=1e-15)
    with pytest.raises(DivergentSeries):
        catalog.lookup("harmonic").closed_tail(1)


def test_closed_sum_exact_families():
    assert catalog.closed_sum(catalog.lookup("exponential", {"a": math.log(2)})) == pytest.approx(
        1.0, rel=1e-15)
    assert catalog.closed_sum(catalog.lookup("p_series", {"p": 2})) == math.pi ** 2 / 6
    with pytest.raises(DivergentSeries):
        catalog.closed_sum(catalog.lookup("harmonic"))
    with pytest.raises(DivergentSeries):
        catalog.closed_sum(catalog.lookup("p_series", {"p": 0.5}))


def test_brute_force_oracle_recovers_zeta_2():
    # the bracket route used for p != 2, checked against the exact value
    lo, hi = catalog._bracket("p_series", (("p", 2.0),))
    assert lo <= math.pi ** 2 / 6 <= hi
    assert hi - lo < 1.1e-12
    assert abs(0.5 * (lo + hi) - 1.644934) < 5e-7


def test_shifted_quadratic_oracle_agrees_with_cotangent_identity():
    entry = catalog.lookup("shifted_quadratic", {"a": 2})
    lo, hi = catalog.sum_bracket(entry)
    a = 2.0
    identity = (math.pi * a / math.tanh(math.pi * a) - 1) / (2 * a * a)
    assert lo - 1e-14 <= identity <= hi + 1e-14
    assert abs(catalog.closed_sum(entry) - 0.660404) < 5e-7
    # cross-check against the partial sum of 1000 terms plus I_1000
    assert abs(catalog.closed_sum(entry) - (0.659404 + entry.closed_tail(1000))) < 1e-6


@pytest.mark.parametrize("entry", [
    catalog.lookup("p_series", {"p": 1.3}),
    catalog.lookup("p_series", {"p": 3}),
    catalog.lookup("shifted_quadratic", {"a": 0.5}),
    catalog.lookup("exponential", {"a": 0.2}),
], ids=str)
def test_closed_tail_decreases_to_zero(entry):
    ns = [2.0 ** k for k in range(21)]
    tails = [entry.closed_tail(n) for n in ns]
    assert all(b < a for a, b in zip(tails, tails[1:]) if a > 0)
    assert entry.closed_tail(1e200) < 1e-50


@pytest.mark.parametrize("name, params", [
    ("p_series", {"p": 0.5}), ("p_series", {"p": 2.5}), ("shifted_quadratic", {"a": 0.01}),
    ("shifted_quadratic", {"a": 50}), ("exponential", {"a": 3}), ("harmonic", {}),
])
def test_entries_screen_positive_decreasing(name, params):
    entry = catalog.lookup(name, params)
    assert check_positive_decreasing(entry.expr, 1, 1e4, 1000).ok
    xs = np.linspace(1, 100, 50)
    assert np.allclose(entry.f(xs), entry.expr(xs), rtol=1e-14, atol=0)
