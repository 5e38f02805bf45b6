import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from maxitive import fixtures
from maxitive.distance import Relation, compare, distance_table, likelihood_distance, log_likelihood_at
from maxitive.errors import DomainError, UndefinedDistanceError
from maxitive.plausibility import Axis, DiscreteDistribution, GridDensity
from maxitive.semiring import MAXITIVE


def test_compare_examples(suspects_max):
    assert compare(suspects_max, "s1", "s2").relation is Relation.PREFERRED
    assert compare(suspects_max, "s2", "s2").relation is Relation.EQUIVALENT
    L = DiscreteDistribution.from_dict({"a": math.exp(-5), "b": math.exp(-1)}, MAXITIVE)
    assert compare(L, "a", "b").relation is Relation.DISPREFERRED


def test_compare_zero_side():
    L = DiscreteDistribution.from_dict({"a": 0.0, "b": 0.2}, MAXITIVE)
    assert compare(L, "a", "b").relation is Relation.DISPREFERRED
    assert compare(L, "b", "a").relation is Relation.PREFERRED


def test_distance_examples(suspects_max):
    L = DiscreteDistribution.from_dict({"a": 1.0, "b": math.exp(-2)}, MAXITIVE)
    assert likelihood_distance(L, "a", "b") == pytest.approx(2.0, rel=1e-15)
    assert likelihood_distance(L, "a", "a") == 0.0
    d = likelihood_distance(suspects_max, "s1", "s2")
    assert d == pytest.approx(abs(math.log(0.3 / 0.4)), rel=1e-15)
    assert d == pytest.approx(math.log(4 / 3), rel=1e-14)


def test_zero_likelihoods():
    L = DiscreteDistribution.from_dict({"a": 0.0, "b": 0.0, "c": 0.5}, MAXITIVE)
    assert likelihood_distance(L, "a", "c") == math.inf
    with pytest.raises(UndefinedDistanceError):
        likelihood_distance(L, "a", "b")


def test_domain_errors(suspects_max):
    with pytest.raises(DomainError):
        compare(suspects_max, "s1", "nobody")
    with pytest.raises(DomainError):
        likelihood_distance(fixtures.normal(), [5.0, 1.0], [50.0, 1.0])
    g = GridDensity.flat([Axis(0, 1, 3)], MAXITIVE)
    assert log_likelihood_at(g, [0.5]) == 0.0
    with pytest.raises(DomainError):
        log_likelihood_at(g, [0.25])


def test_pseudometric(suspects_max):
    # distinct parameters, equal likelihood
    assert likelihood_distance(suspects_max, "s2", "s3") == 0.0


def test_model_and_callable():
    m = fixtures.normal()
    a, b = [5.0, 0.8], [4.0, 0.8]
    assert likelihood_distance(m, a, b) == pytest.approx(abs(m.evaluate(a) - m.evaluate(b)))
    f = lambda th: -th**2
    assert likelihood_distance(f, 1.0, 3.0) == 8.0


def test_distance_table_scale(suspects_max):
    rows = distance_table(suspects_max, suspects_max.labels, scale=2.0)
    assert len(rows) == 3
    assert rows[0]["distance"] == pytest.approx(2 * math.log(4 / 3))


finite_logs = st.floats(min_value=-700, max_value=50)


@given(st.lists(finite_logs, min_size=2, max_size=8), st.floats(min_value=-30, max_value=30))
def test_laws(logs, shift):
    # weights stay normal floats; subnormals lose the relative precision the laws need
    w = {f"p{i}": math.exp(v) for i, v in enumerate(logs)}
    L = DiscreteDistribution.from_dict(w, MAXITIVE) if max(w.values()) > 0 else None
    if L is None or min(w.values()) == 0:
        return
    shifted = DiscreteDistribution.from_dict({k: v * math.exp(shift) for k, v in w.items()}, MAXITIVE) if all(
        1e-300 < v * math.exp(shift) < 1e300 for v in w.values()
    ) else None
    keys = list(w)
    for a in keys:
        for b in keys:
            d = likelihood_distance(L, a, b)
            assert d == likelihood_distance(L, b, a)
            assert (d == 0) == (w[a] == w[b])
            if shifted is not None:
                assert likelihood_distance(shifted, a, b) == pytest.approx(d, abs=1e-12 * max(1.0, d) + 1e-12)
    ordered = sorted(keys, key=lambda k: -w[k])
    for i in range(len(ordered) - 2):
        a, b, c = ordered[i : i + 3]
        lhs = likelihood_distance(L, a, c)
        assert lhs == pytest.approx(likelihood_distance(L, a, b) + likelihood_distance(L, b, c), abs=1e-12 * max(1, lhs))
