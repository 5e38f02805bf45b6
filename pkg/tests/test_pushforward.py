import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from maxitive.errors import (
    DimensionError,
    EmptySetError,
    ImageOutsideBoxError,
    ModeError,
    UnknownLabelError,
    ValidationError,
)
from maxitive.plausibility import Axis, DiscreteDistribution, GridDensity, normalize
from maxitive.pushforward import (
    NumericMap,
    Projection,
    Relabel,
    compose,
    fiber_index,
    ignorance_audit,
    marginalize,
    pushforward,
    set_likelihood,
)
from maxitive.semiring import ADDITIVE, MAXITIVE

from oracles import exhaustive_pushforward

HATS = Relabel({"s1": "red", "s2": "blue", "s3": "blue"})


class TestDiscrete:
    def test_suspects_additive(self, suspects_add):
        assert pushforward(suspects_add, HATS).as_dict() == {"red": 0.4, "blue": 0.6}

    def test_suspects_maxitive(self, suspects_max):
        img = pushforward(suspects_max, HATS)
        assert img.as_dict() == {"red": 0.4, "blue": 0.3}
        assert img.argmax() == "red"

    @pytest.mark.parametrize("mode", [ADDITIVE, MAXITIVE])
    def test_identity(self, suspects_max, mode):
        d = suspects_max.with_mode(mode)
        img = pushforward(d, Relabel({x: x for x in d.labels}))
        assert img.as_dict() == d.as_dict()
        assert img.mode is mode

    def test_relabel_must_be_total(self, suspects_max):
        with pytest.raises(UnknownLabelError):
            pushforward(suspects_max, Relabel({"s1": "red"}))

    def test_product_projection(self):
        d = DiscreteDistribution((("a", 1), ("a", 2), ("b", 1)), (0.2, 0.5, 0.3), ADDITIVE)
        assert marginalize(d, 0).as_dict() == {"a": 0.7, "b": 0.3}
        assert marginalize(d.with_mode(MAXITIVE), [1]).as_dict() == {1: 0.3, 2: 0.5}
        swapped = pushforward(d, Projection((1, 0)))
        assert swapped.labels == ((1, "a"), (2, "a"), (1, "b"))

    def test_projection_validation(self):
        with pytest.raises(ValidationError):
            Projection((0, 0))
        d = DiscreteDistribution((("a", 1),), (1.0,), ADDITIVE)
        with pytest.raises(DimensionError):
            pushforward(d, Projection((3,)))

    def test_fiber_index_partitions(self, suspects_max):
        fib = fiber_index(suspects_max, HATS)
        assert fib.targets == ("red", "blue")
        assert sorted(i for f in fib.fibers for i in f) == [0, 1, 2]

    def test_numeric_map_rejects_discrete(self, suspects_max):
        with pytest.raises(ValidationError):
            pushforward(suspects_max, NumericMap(lambda p: p, [Axis(0, 1, 2)]))


class TestComposition:
    def test_relabel_chain(self, suspects_add):
        T2 = Relabel({"red": "warm", "blue": "cool"})
        T = compose(HATS, T2)
        assert pushforward(pushforward(suspects_add, HATS), T2).as_dict() == pushforward(suspects_add, T).as_dict()

    def test_projection_chain(self):
        d = DiscreteDistribution(((0, 1, 2), (1, 1, 2), (0, 2, 3)), (0.2, 0.3, 0.5), ADDITIVE)
        P = compose(Projection((2, 0)), Projection((1,)))
        assert P == Projection((0,))
        two = pushforward(pushforward(d, Projection((2, 0))), Projection((1,)))
        assert two.as_dict() == pushforward(d, P).as_dict()

    def test_mixed_needs_support(self, suspects_add):
        with pytest.raises(ValidationError):
            compose(HATS, Projection((0,)))


labels_st = st.integers(min_value=1, max_value=10)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_brute_force_equivalence(data):
    n = data.draw(labels_st)
    k = data.draw(st.integers(min_value=1, max_value=4))
    w = data.draw(st.lists(st.floats(min_value=0, max_value=5), min_size=n, max_size=n).filter(lambda v: max(v) > 0))
    targets = data.draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    mode = data.draw(st.sampled_from(["additive", "maxitive"]))
    weights = {f"x{i}": w[i] for i in range(n)}
    mapping = {f"x{i}": f"t{targets[i]}" for i in range(n)}
    img = pushforward(DiscreteDistribution.from_dict(weights, mode), Relabel(mapping)).as_dict()
    expect = exhaustive_pushforward(weights, mapping, mode)
    assert img.keys() == expect.keys()
    for t in expect:
        if mode == "maxitive":
            assert img[t] == expect[t]
        else:
            assert img[t] == pytest.approx(expect[t], rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_conservation_and_argmax(data):
    n = data.draw(labels_st)
    w = data.draw(st.lists(st.floats(min_value=0, max_value=5), min_size=n, max_size=n).filter(lambda v: max(v) > 0))
    targets = data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    d = DiscreteDistribution(tuple(range(n)), tuple(w), ADDITIVE)
    T = Relabel({i: targets[i] for i in range(n)})
    add = pushforward(d, T)
    assert add.total() == pytest.approx(d.total(), rel=1e-12)
    mx = pushforward(d.with_mode(MAXITIVE), T)
    assert mx.max_weight() == d.max_weight()
    src_arg = d.with_mode(MAXITIVE).argmax()
    assert mx[T.mapping[src_arg]] == d.max_weight()
    if w.count(max(w)) == 1:
        assert mx.argmax() == T.mapping[src_arg]


class TestGrid:
    def test_flat_additive_marginal(self):
        ax = Axis(0, 1, 21)
        g = GridDensity.flat([ax, ax], ADDITIVE)
        m = marginalize(g, 0)
        np.testing.assert_allclose(m.values, m.values[0], rtol=1e-12)
        assert m.values.sum() * ax.step == pytest.approx(1.0, abs=1e-12)
        assert m.normalized

    def test_maxitive_marginal_brute_force(self):
        ax = Axis(-2, 2, 41)
        g = GridDensity.from_function([ax, ax], lambda p: np.exp(-(p[:, 0] ** 2 + p[:, 1] ** 2)), MAXITIVE)
        m = normalize(marginalize(g, 0))
        vals = g.values
        expect = [max(vals[i, j] for j in range(41)) for i in range(41)]
        expect = np.array(expect) / max(expect)
        np.testing.assert_array_equal(m.values, expect)
        np.testing.assert_allclose(m.values, np.exp(-ax.nodes**2), rtol=1e-12)

    def test_axis_reorder(self):
        g = GridDensity([Axis(0, 1, 2), Axis(0, 2, 3)], np.arange(1.0, 7.0), MAXITIVE)
        p = pushforward(g, Projection((1, 0)))
        np.testing.assert_array_equal(p.values, g.values.T)

    def test_numeric_map_sum(self):
        ax = Axis(0, 1, 11)
        g = GridDensity.flat([ax, ax], MAXITIVE)
        T = NumericMap(lambda p: p.sum(axis=1), [Axis(0, 2, 21)], "sum")
        img = pushforward(g, T)
        np.testing.assert_array_equal(img.values, np.ones(21))
        ga = GridDensity.flat([ax, ax], ADDITIVE)
        imga = pushforward(ga, T)
        counts = np.array([min(k, 20 - k) + 1 for k in range(21)], dtype=float)
        np.testing.assert_allclose(imga.values / imga.values[0], counts, rtol=1e-12)
        assert imga.total() == pytest.approx(1.0, abs=1e-12)

    def test_numeric_map_empty_cells_zero(self):
        g = GridDensity.flat([Axis(0, 1, 3)], MAXITIVE)
        img = pushforward(g, NumericMap(lambda p: p[:, 0], [Axis(0, 1, 5)]))
        np.testing.assert_array_equal(img.values, [1, 0, 1, 0, 1])

    def test_image_outside_box(self):
        g = GridDensity.flat([Axis(0, 1, 3)], MAXITIVE)
        with pytest.raises(ImageOutsideBoxError):
            pushforward(g, NumericMap(lambda p: 2 * p[:, 0], [Axis(0, 1, 5)]))

    def test_relabel_rejects_grid(self):
        with pytest.raises(ValidationError):
            pushforward(GridDensity.flat([Axis(0, 1, 3)], MAXITIVE), HATS)


class TestSetLikelihood:
    def test_full_support(self, suspects_max):
        assert set_likelihood(suspects_max, suspects_max.labels) == 0.4

    def test_subset(self, suspects_max):
        assert set_likelihood(suspects_max, ["s2", "s3"]) == 0.3

    def test_grid_inequality(self):
        ax = Axis(-3, 3, 61)
        g = GridDensity.from_function([ax], lambda p: np.exp(-((p[:, 0] - 1) ** 2)), MAXITIVE)
        got = set_likelihood(g, lambda p: p[:, 0] <= 0)
        nodes = ax.nodes
        expect = max(math.exp(-((x - 1) ** 2)) for x in nodes if x <= 0)
        assert got == expect
        assert got == pytest.approx(math.exp(-1), rel=1e-12)

    def test_errors(self, suspects_max, suspects_add):
        with pytest.raises(ModeError):
            set_likelihood(suspects_add, ["s1"])
        with pytest.raises(EmptySetError):
            set_likelihood(suspects_max, [])
        g = GridDensity.flat([Axis(0, 1, 3)], MAXITIVE)
        with pytest.raises(EmptySetError):
            set_likelihood(g, lambda p: p[:, 0] > 2)


class TestIgnorance:
    def test_suspects(self):
        rep = ignorance_audit(HATS, ["s1", "s2", "s3"])
        assert rep.maxitive_flat
        assert rep.maxitive_image.as_dict() == {"red": 1.0, "blue": 1.0}
        assert not rep.additive_flat
        assert rep.additive_image["blue"] == pytest.approx(2 * rep.additive_image["red"], rel=1e-12)

    def test_bijection(self):
        rep = ignorance_audit(Relabel({"a": "x", "b": "y", "c": "z"}), "abc")
        assert rep.maxitive_flat and rep.additive_flat

    def test_ninety_nine_to_one(self):
        labels = [f"o{i}" for i in range(100)]
        T = Relabel({lab: ("rare" if i == 0 else "common") for i, lab in enumerate(labels)})
        rep = ignorance_audit(T, labels)
        assert rep.maxitive_flat
        assert sorted(rep.fiber_sizes) == [1, 99]
        assert rep.additive_ratio == pytest.approx(99.0, rel=1e-12)

    def test_grid_space(self):
        ax = Axis(0, 1, 5)
        rep = ignorance_audit(NumericMap(lambda p: p.sum(axis=1), [Axis(0, 2, 9)]), [ax, ax])
        assert rep.maxitive_flat
        assert rep.additive_ratio == pytest.approx(5.0, rel=1e-12)
        assert rep.fiber_size_ratio == 5.0
