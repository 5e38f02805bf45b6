"""Discrete and grid plausibility distributions under either semiring.

A distribution carries a :class:`~maxitive.semiring.SemiringMode` which decides
how set measures are formed: by summing member weights (probability) or by
taking their maximum (possibility / likelihood).
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .errors import (
    AllZeroError,
    DimensionError,
    EmptySetError,
    NotNormalizedError,
    UnknownLabelError,
    ValidationError,
)
from .semiring import ADDITIVE, MAXITIVE, SemiringMode, combine_all

__all__ = [
    "Axis",
    "DiscreteDistribution",
    "GridDensity",
    "LawResult",
    "AxiomReport",
    "measure_of",
    "normalize",
    "check_axioms",
    "select_nodes",
    "NORMALIZATION_TOL",
    "GRID_NORMALIZATION_TOL",
]

NORMALIZATION_TOL = 1e-12
GRID_NORMALIZATION_TOL = 1e-10
EXHAUSTIVE_MAX_SUPPORT = 8


def _as_label(label):
    if isinstance(label, list):
        return tuple(_as_label(x) for x in label)
    return label


def _is_normalized(total, tol):
    # total() already is the max (maxitive) or the sum (additive)
    return abs(total - 1.0) <= tol


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite outcome -> weight map.

    ``labels`` are any hashable values (strings for JSON input, tuples for
    product spaces).  ``normalized=None`` infers the flag from the weights;
    ``True`` is validated.
    """

    labels: tuple
    weights: tuple
    mode: SemiringMode
    normalized: bool = None

    def __post_init__(self):
        labels = tuple(_as_label(x) for x in self.labels)
        weights = tuple(float(w) for w in self.weights)
        mode = SemiringMode.parse(self.mode)
        if len(labels) != len(weights):
            raise ValidationError("labels and weights differ in length")
        if len(set(labels)) != len(labels):
            raise ValidationError("labels must be unique")
        for lab, w in zip(labels, weights):
            if not (w >= 0.0 and math.isfinite(w)):
                raise ValidationError(f"weight for {lab!r} must be finite and >= 0, got {w!r}")
        if not any(w > 0.0 for w in weights):
            raise AllZeroError("distribution needs at least one positive weight")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "mode", mode)
        actual = _is_normalized(self.total(), NORMALIZATION_TOL)
        if self.normalized is None:
            object.__setattr__(self, "normalized", actual)
        elif self.normalized and not actual:
            raise NotNormalizedError(
                f"flagged normalized but total measure is {self.total()!r} ({mode})"
            )
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def from_dict(cls, mapping, mode, normalized=None):
        return cls(tuple(mapping.keys()), tuple(mapping.values()), mode, normalized)

    @classmethod
    def flat(cls, labels, mode):
        """The ignorance distribution: equal weights, normalized in ``mode``."""
        labels = tuple(labels)
        mode = SemiringMode.parse(mode)
        w = 1.0 if mode is MAXITIVE else 1.0 / len(labels)
        return cls(labels, (w,) * len(labels), mode)

    def as_dict(self):
        return dict(zip(self.labels, self.weights))

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, label):
        return self.weights[self.index_of(label)]

    def __contains__(self, label):
        return label in self._index

    def index_of(self, label):
        try:
            return self._index[_as_label(label)]
        except KeyError:
            raise UnknownLabelError(f"label {label!r} not in support") from None
        except TypeError:
            raise UnknownLabelError(f"label {label!r} is not hashable") from None

    def total(self):
        """Measure of the whole support in this distribution's mode."""
        return combine_all(self.weights, self.mode)

    def max_weight(self):
        return max(self.weights)

    def argmax(self):
        """First label attaining the maximum weight (ties: support order)."""
        return self.labels[self.weights.index(self.max_weight())]

    def with_mode(self, mode):
        return DiscreteDistribution(self.labels, self.weights, mode)


@dataclass(frozen=True)
class Axis:
    """Uniform node grid ``linspace(lower, upper, points)`` on one axis."""

    lower: float
    upper: float
    points: int

    def __post_init__(self):
        lower, upper = float(self.lower), float(self.upper)
        if not (math.isfinite(lower) and math.isfinite(upper) and lower < upper):
            raise ValidationError(f"axis needs finite lower < upper, got [{lower}, {upper}]")
        if int(self.points) != self.points or self.points < 2:
            raise ValidationError(f"axis needs an integer number of points >= 2, got {self.points!r}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "points", int(self.points))

    @property
    def step(self):
        return (self.upper - self.lower) / (self.points - 1)

    @property
    def nodes(self):
        return np.linspace(self.lower, self.upper, self.points)

    def nearest_index(self, x):
        """Index of the node closest to ``x`` (array-friendly, unclipped)."""
        return np.rint((np.asarray(x, dtype=float) - self.lower) / self.step).astype(np.int64)


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Node values on an axis-aligned grid.

    Each node stands for a cell of volume ``cell_volume`` centred on it, so
    additive totals are the midpoint Riemann sum ``values.sum() * cell_volume``.
    ``values`` has shape ``tuple(ax.points for ax in axes)`` (row-major).
    """

    axes: tuple
    values: np.ndarray
    mode: SemiringMode
    normalized: bool = None

    def __post_init__(self):
        axes = tuple(ax if isinstance(ax, Axis) else Axis(*ax) for ax in self.axes)
        if not axes:
            raise DimensionError("grid needs at least one axis")
        shape = tuple(ax.points for ax in axes)
        values = np.array(self.values, dtype=float)
        if values.size != math.prod(shape):
            raise DimensionError(f"expected {math.prod(shape)} values for grid {shape}, got {values.size}")
        values = values.reshape(shape)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValidationError("grid values must be finite and >= 0")
        if not np.any(values > 0):
            raise AllZeroError("grid density needs at least one positive value")
        values.setflags(write=False)
        mode = SemiringMode.parse(self.mode)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mode", mode)
        actual = _is_normalized(self.total(), GRID_NORMALIZATION_TOL)
        if self.normalized is None:
            object.__setattr__(self, "normalized", actual)
        elif self.normalized and not actual:
            raise NotNormalizedError(f"flagged normalized but total is {self.total()!r} ({mode})")

    @classmethod
    def from_function(cls, axes, fn, mode, normalized=None):
        """Tabulate ``fn(points) -> weights`` where ``points`` is ``(N, ndim)``."""
        axes = tuple(ax if isinstance(ax, Axis) else Axis(*ax) for ax in axes)
        pts = grid_nodes(axes)
        vals = np.asarray(fn(pts), dtype=float).reshape(tuple(ax.points for ax in axes))
        return cls(axes, vals, mode, normalized)

    @classmethod
    def flat(cls, axes, mode):
        axes = tuple(ax if isinstance(ax, Axis) else Axis(*ax) for ax in axes)
        shape = tuple(ax.points for ax in axes)
        mode = SemiringMode.parse(mode)
        vol = math.prod(ax.step for ax in axes)
        fill = 1.0 if mode is MAXITIVE else 1.0 / (math.prod(shape) * vol)
        return cls(axes, np.full(shape, fill), mode)

    @property
    def ndim(self):
        return len(self.axes)

    @property
    def shape(self):
        return self.values.shape

    @property
    def cell_volume(self):
        return math.prod(ax.step for ax in self.axes)

    def nodes(self):
        """All node coordinates as an ``(N, ndim)`` array in row-major order."""
        return grid_nodes(self.axes)

    def total(self):
        if self.mode is MAXITIVE:
            return float(self.values.max())
        return math.fsum(self.values.ravel()) * self.cell_volume

    def max_weight(self):
        return float(self.values.max())

    def argmax(self):
        """Coordinates of the first (row-major) node attaining the maximum."""
        idx = np.unravel_index(int(np.argmax(self.values)), self.shape)
        return tuple(float(ax.nodes[i]) for ax, i in zip(self.axes, idx))


def grid_nodes(axes):
    mesh = np.meshgrid(*(ax.nodes for ax in axes), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _resolve_discrete(dist, members):
    idx = []
    seen = set()
    for m in members:
        i = dist.index_of(m)
        if i not in seen:
            seen.add(i)
            idx.append(i)
    return idx


def select_nodes(grid, members):
    """Boolean node mask (row-major, flat) for a predicate or mask."""
    if callable(members):
        mask = np.asarray(members(grid.nodes()), dtype=bool).ravel()
    else:
        mask = np.asarray(members, dtype=bool).ravel()
    if mask.size != grid.values.size:
        raise DimensionError(f"mask has {mask.size} entries, grid has {grid.values.size} nodes")
    return mask


def measure_of(dist, members):
    """Measure of a set of outcomes: max (maxitive) or sum (additive) of weights.

    For discrete distributions ``members`` is an iterable of labels; for grids
    it is a predicate on the ``(N, ndim)`` node array or a boolean mask.
    """
    if isinstance(dist, GridDensity):
        mask = select_nodes(dist, members)
        vals = dist.values.ravel()[mask]
        if vals.size == 0:
            return 0.0
        if dist.mode is MAXITIVE:
            return float(vals.max())
        return math.fsum(vals) * dist.cell_volume
    idx = _resolve_discrete(dist, members)
    return combine_all((dist.weights[i] for i in idx), dist.mode)


def normalize(dist):
    """Rescale so the whole space has measure one in the distribution's mode."""
    total = dist.total()
    if total <= 0:
        raise AllZeroError("cannot normalize an all-zero distribution")
    if isinstance(dist, GridDensity):
        return GridDensity(dist.axes, dist.values / total, dist.mode)
    weights = tuple(w / total for w in dist.weights)
    if dist.mode is MAXITIVE:
        # x / x is exactly 1 in IEEE arithmetic, so the maximum lands on 1.0
        return DiscreteDistribution(dist.labels, weights, dist.mode, True)
    return DiscreteDistribution(dist.labels, weights, dist.mode)


@dataclass
class LawResult:
    name: str
    passed: bool
    checked: int
    counterexamples: list = field(default_factory=list)

    def to_dict(self):
        return {
            "law": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "counterexamples": self.counterexamples,
        }


@dataclass
class AxiomReport:
    mode: SemiringMode
    exhaustive: bool
    laws: dict

    @property
    def passed(self):
        return all(law.passed for law in self.laws.values())

    def to_dict(self):
        return {
            "mode": str(self.mode),
            "exhaustive": self.exhaustive,
            "passed": self.passed,
            "laws": [law.to_dict() for law in self.laws.values()],
        }


def _label_list(dist, idx):
    return [dist.labels[i] for i in idx]


def check_axioms(dist, trials=1000, seed=0, exhaustive=None, max_counterexamples=5):
    """Check the empty-set, whole-space and union laws of ``dist``.

    Maxitive: ``m(A | B) == max(m(A), m(B))`` exactly for arbitrary pairs.
    Additive: ``m(A | B) == m(A) + m(B)`` within 1e-12 for disjoint pairs.
    Supports of at most eight outcomes are checked over every pair of subsets
    unless ``exhaustive=False``; larger ones draw ``trials`` random pairs.
    """
    if not isinstance(dist, DiscreteDistribution):
        raise ValidationError("check_axioms needs a DiscreteDistribution")
    if not dist.normalized:
        raise NotNormalizedError("check_axioms needs a normalized distribution")
    if trials < 1:
        raise ValidationError("trials must be positive")
    n = len(dist)
    if exhaustive is None:
        exhaustive = n <= EXHAUSTIVE_MAX_SUPPORT
    mode = dist.mode
    all_idx = list(range(n))
    laws = {}

    empty = measure_of(dist, [])
    laws["empty"] = LawResult("empty", empty == 0.0, 1, [] if empty == 0.0 else [{"measure": empty}])
    omega = measure_of(dist, dist.labels)
    ok = abs(omega - 1.0) <= NORMALIZATION_TOL
    laws["omega"] = LawResult("omega", ok, 1, [] if ok else [{"measure": omega}])

    union = LawResult("union", True, 0)
    if exhaustive:
        subsets = np.array(
            [measure_of(dist, [dist.labels[i] for i in all_idx if mask >> i & 1]) for mask in range(1 << n)]
        )
        masks = np.arange(1 << n)
        for a in masks:
            # row a of the pair table, one subset A against every B
            lhs = subsets[a | masks]
            if mode is MAXITIVE:
                bad = np.nonzero(lhs != np.maximum(subsets[a], subsets))[0]
                union.checked += masks.size
            else:
                disjoint = (a & masks) == 0
                err = np.abs(lhs - (subsets[a] + subsets))
                bad = np.nonzero(disjoint & (err > NORMALIZATION_TOL))[0]
                union.checked += int(disjoint.sum())
            if bad.size:
                union.passed = False
            for b in bad[: max(0, max_counterexamples - len(union.counterexamples))]:
                union.counterexamples.append(
                    {
                        "A": _label_list(dist, [k for k in all_idx if a >> k & 1]),
                        "B": _label_list(dist, [k for k in all_idx if b >> k & 1]),
                    }
                )
    else:
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            if mode is MAXITIVE:
                in_a = rng.random(n) < 0.5
                in_b = rng.random(n) < 0.5
            else:
                side = rng.integers(0, 3, size=n)
                in_a, in_b = side == 1, side == 2
            A = [dist.labels[i] for i in all_idx if in_a[i]]
            B = [dist.labels[i] for i in all_idx if in_b[i]]
            both = [dist.labels[i] for i in all_idx if in_a[i] or in_b[i]]
            lhs = measure_of(dist, both)
            ma, mb = measure_of(dist, A), measure_of(dist, B)
            if mode is MAXITIVE:
                good = lhs == max(ma, mb)
            else:
                good = abs(lhs - (ma + mb)) <= NORMALIZATION_TOL
            union.checked += 1
            if not good:
                union.passed = False
                if len(union.counterexamples) < max_counterexamples:
                    union.counterexamples.append({"A": A, "B": B})
    laws["union"] = union
    return AxiomReport(mode, bool(exhaustive), laws)


def all_subsets(labels):
    """Every subset of ``labels`` as a tuple (used by exhaustive oracles)."""
    labels = tuple(labels)
    return [c for r in range(len(labels) + 1) for c in itertools.combinations(labels, r)]
