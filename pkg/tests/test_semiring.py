import math
import sys

from hypothesis import given, strategies as st
import pytest

from maxitive.semiring import (
    ADDITIVE,
    MAXITIVE,
    SemiringMode,
    combine,
    combine_all,
    cost_combine,
    cost_scale,
    from_cost,
    scale,
    to_cost,
)

# keeps products clear of the subnormal range
weights = st.just(0.0) | st.floats(min_value=1e-100, max_value=1e6)
positive = st.floats(min_value=1e-300, max_value=1e6, allow_nan=False, allow_infinity=False)
modes = st.sampled_from([ADDITIVE, MAXITIVE])


def test_combine_examples():
    assert combine(0.3, 0.3, ADDITIVE) == 0.6
    assert combine(0.3, 0.4, MAXITIVE) == 0.4
    for mode in (ADDITIVE, MAXITIVE):
        assert combine(0.0, 0.7, mode) == 0.7


def test_scale_examples():
    assert scale(1.0, 0.37) == 0.37
    assert scale(0.0, 0.37) == 0.0
    assert scale(0.5, 0.4) == 0.2


def test_cost_examples():
    assert to_cost(1.0) == 0.0
    assert to_cost(0.0) == math.inf
    assert to_cost(math.exp(-2)) == pytest.approx(2.0, rel=1e-15)
    assert cost_combine(2.0, 5.0) == 2.0
    assert cost_combine(math.inf, 3.5) == 3.5
    assert cost_combine(to_cost(0.3), to_cost(0.4)) == to_cost(0.4)
    assert from_cost(math.inf) == 0.0


def test_mode_parse():
    assert SemiringMode.parse("Maxitive") is MAXITIVE
    assert SemiringMode.parse(ADDITIVE) is ADDITIVE
    with pytest.raises(ValueError):
        SemiringMode.parse("tropical")


def test_rejects_bad_weights():
    with pytest.raises(ValueError):
        combine(-1.0, 0.0, ADDITIVE)
    with pytest.raises(ValueError):
        to_cost(math.inf)


def test_empty_fold_is_zero():
    assert combine_all([], ADDITIVE) == 0.0
    assert combine_all([], MAXITIVE) == 0.0


@given(weights)
def test_idempotency_distinguishes_modes(w):
    assert combine(w, w, MAXITIVE) == w
    assert combine(w, w, ADDITIVE) == 2 * w


@given(weights, weights, weights, modes)
def test_commutative_associative(a, b, c, mode):
    assert combine(a, b, mode) == combine(b, a, mode)
    left = combine(combine(a, b, mode), c, mode)
    right = combine(a, combine(b, c, mode), mode)
    if mode is MAXITIVE:
        assert left == right
    else:
        assert left == pytest.approx(right, rel=1e-12, abs=0)


@given(weights, weights, weights)
def test_distributivity(a, b, c):
    assert scale(a, combine(b, c, MAXITIVE)) == combine(scale(a, b), scale(a, c), MAXITIVE)
    lhs = scale(a, combine(b, c, ADDITIVE))
    rhs = combine(scale(a, b), scale(a, c), ADDITIVE)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=0)


@given(positive, positive)
def test_cost_homomorphism(a, b):
    prod = scale(a, b)
    # a subnormal product has already lost relative precision in the multiply
    if prod >= sys.float_info.min:
        assert to_cost(prod) == pytest.approx(to_cost(a) + to_cost(b), rel=1e-12, abs=1e-12)
    assert to_cost(combine(a, b, MAXITIVE)) == cost_combine(to_cost(a), to_cost(b))
    assert cost_scale(to_cost(a), to_cost(b)) == to_cost(a) + to_cost(b)


@given(st.lists(st.tuples(positive, positive), min_size=1, max_size=20))
def test_cost_combine_matches_maxitive_combine(pairs):
    for a, b in pairs:
        assert cost_combine(to_cost(a), to_cost(b)) == to_cost(combine(a, b, MAXITIVE))
