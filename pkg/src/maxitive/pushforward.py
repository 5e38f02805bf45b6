"""Pushforwards of distributions under deterministic, generally non-1-1 maps.

The target weight of ``t`` combines the source weights over the fiber
``{x : T(x) = t}``: summing them gives the marginal (additive mode), taking
their maximum gives the profile (maxitive mode).  Grids are pushed by binning
source nodes into target cells.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import (
    DimensionError,
    EmptySetError,
    ImageOutsideBoxError,
    ModeError,
    UnknownLabelError,
    ValidationError,
)
from .plausibility import (
    Axis,
    DiscreteDistribution,
    GridDensity,
    _resolve_discrete,
    select_nodes,
)
from .semiring import ADDITIVE, MAXITIVE, combine_all

__all__ = [
    "Relabel",
    "Projection",
    "NumericMap",
    "FiberIndex",
    "AuditReport",
    "apply_label",
    "compose",
    "fiber_index",
    "label_fibers",
    "pushforward",
    "marginalize",
    "set_likelihood",
    "ignorance_audit",
]


@dataclass(frozen=True, eq=False)
class Relabel:
    """Discrete map given as an explicit ``{source: target}`` table."""

    mapping: dict

    def __post_init__(self):
        object.__setattr__(self, "mapping", dict(self.mapping))


@dataclass(frozen=True)
class Projection:
    """Keep the listed coordinates (in the listed order)."""

    axes: tuple

    def __post_init__(self):
        axes = tuple(int(a) for a in self.axes)
        if not axes:
            raise ValidationError("projection needs at least one axis")
        if len(set(axes)) != len(axes) or min(axes) < 0:
            raise ValidationError(f"projection axes must be distinct and >= 0, got {axes}")
        object.__setattr__(self, "axes", axes)


@dataclass(frozen=True, eq=False)
class NumericMap:
    """Vectorised map ``fn: (N, n) -> (N, m)`` onto a target grid.

    ``target_axes`` must cover the image of every source node.
    """

    fn: object
    target_axes: tuple
    name: str = "numeric"

    def __post_init__(self):
        axes = tuple(ax if isinstance(ax, Axis) else Axis(*ax) for ax in self.target_axes)
        object.__setattr__(self, "target_axes", axes)

    def __call__(self, points):
        out = np.asarray(self.fn(np.asarray(points, dtype=float)), dtype=float)
        if out.ndim == 1:
            out = out[:, None]
        return out


def apply_label(T, label):
    """Image of one discrete outcome."""
    if isinstance(T, Relabel):
        try:
            return T.mapping[label]
        except KeyError:
            raise UnknownLabelError(f"relabeling is not defined on {label!r}") from None
    if isinstance(T, Projection):
        if not isinstance(label, tuple) or max(T.axes) >= len(label):
            raise DimensionError(f"cannot project outcome {label!r} onto axes {T.axes}")
        if len(T.axes) == 1:
            return label[T.axes[0]]
        return tuple(label[i] for i in T.axes)
    raise ValidationError(f"{type(T).__name__} cannot act on discrete outcomes")


def compose(first, second, support=None):
    """Transform equal to ``second`` applied after ``first``.

    Relabel/Relabel and Projection/Projection compose symbolically; mixed
    chains need the source ``support`` and come back as a :class:`Relabel`.
    """
    if isinstance(first, Projection) and isinstance(second, Projection):
        if max(second.axes) >= len(first.axes):
            raise DimensionError("second projection exceeds the first one's output dimension")
        if len(first.axes) == 1:
            raise DimensionError("a one-axis projection yields scalars; project again via support")
        return Projection(tuple(first.axes[i] for i in second.axes))
    if isinstance(first, Relabel) and isinstance(second, Relabel):
        return Relabel({k: apply_label(second, v) for k, v in first.mapping.items()})
    if support is None:
        raise ValidationError("composing mixed transforms needs the source support")
    return Relabel({x: apply_label(second, apply_label(first, x)) for x in support})


@dataclass(frozen=True, eq=False)
class FiberIndex:
    """Which source elements land on which target.

    Discrete: ``targets`` are labels, ``fibers[k]`` the source indices mapped
    to ``targets[k]``.  Grids: ``assignment[i]`` is the flat target cell of
    source node ``i`` and ``target_axes`` describe the target grid.
    """

    targets: tuple = None
    fibers: tuple = None
    assignment: np.ndarray = None
    target_axes: tuple = None

    def sizes(self):
        if self.fibers is not None:
            return [len(f) for f in self.fibers]
        ncell = math.prod(ax.points for ax in self.target_axes)
        return np.bincount(self.assignment, minlength=ncell).tolist()


def label_fibers(labels, T):
    """Fiber index of ``T`` over a sequence of discrete outcomes."""
    order = {}
    fibers = []
    for i, lab in enumerate(labels):
        t = apply_label(T, lab)
        try:
            k = order[t]
        except KeyError:
            k = order[t] = len(fibers)
            fibers.append([])
        except TypeError:
            raise ValidationError(f"image {t!r} of {lab!r} is not hashable") from None
        fibers[k].append(i)
    return FiberIndex(targets=tuple(order), fibers=tuple(tuple(f) for f in fibers))


def _grid_fibers(grid, T):
    if isinstance(T, Projection):
        if max(T.axes) >= grid.ndim:
            raise DimensionError(f"projection axes {T.axes} exceed grid dimension {grid.ndim}")
        target_axes = tuple(grid.axes[i] for i in T.axes)
        multi = np.indices(grid.shape).reshape(grid.ndim, -1)
        assignment = np.ravel_multi_index(
            tuple(multi[i] for i in T.axes), tuple(ax.points for ax in target_axes)
        )
        return FiberIndex(assignment=assignment, target_axes=target_axes)
    if isinstance(T, NumericMap):
        target_axes = T.target_axes
        images = T(grid.nodes())
        if images.shape != (grid.values.size, len(target_axes)):
            raise DimensionError(
                f"map {T.name!r} returned shape {images.shape}, expected "
                f"({grid.values.size}, {len(target_axes)})"
            )
        if len(target_axes) > grid.ndim:
            raise DimensionError("numeric map target dimension exceeds source dimension")
        cells = []
        for k, ax in enumerate(target_axes):
            y = images[:, k]
            slack = 1e-9 * ax.step
            outside = ~((y >= ax.lower - slack) & (y <= ax.upper + slack))
            if outside.any():
                first = int(np.argmax(outside))
                raise ImageOutsideBoxError(
                    f"map {T.name!r} sends node {grid.nodes()[first].tolist()} to "
                    f"{images[first].tolist()}, outside target axis {k} [{ax.lower}, {ax.upper}]"
                )
            cells.append(np.clip(ax.nearest_index(y), 0, ax.points - 1))
        assignment = np.ravel_multi_index(tuple(cells), tuple(ax.points for ax in target_axes))
        return FiberIndex(assignment=assignment, target_axes=target_axes)
    raise ValidationError(f"{type(T).__name__} cannot act on grid densities")


def fiber_index(dist, T):
    if isinstance(dist, GridDensity):
        return _grid_fibers(dist, T)
    return label_fibers(dist.labels, T)


def pushforward(dist, T):
    """Image of ``dist`` under ``T``, combining over fibers in ``dist.mode``.

    Additive grids carry densities, so each source node contributes
    ``value * source_cell_volume / target_cell_volume``.  Target cells hit by
    no source node get weight 0.
    """
    fib = fiber_index(dist, T)
    if isinstance(dist, GridDensity):
        target_axes = fib.target_axes
        shape = tuple(ax.points for ax in target_axes)
        ncell = math.prod(shape)
        src = dist.values.ravel()
        if dist.mode is ADDITIVE:
            tvol = math.prod(ax.step for ax in target_axes)
            out = np.bincount(fib.assignment, weights=src * dist.cell_volume, minlength=ncell) / tvol
        else:
            out = np.zeros(ncell)
            np.maximum.at(out, fib.assignment, src)
        return GridDensity(target_axes, out.reshape(shape), dist.mode)
    weights = tuple(combine_all((dist.weights[i] for i in f), dist.mode) for f in fib.fibers)
    return DiscreteDistribution(fib.targets, weights, dist.mode)


def marginalize(dist, axes):
    """Pushforward under the coordinate projection onto ``axes``."""
    if isinstance(axes, int):
        axes = (axes,)
    return pushforward(dist, Projection(tuple(axes)))


def set_likelihood(dist, members):
    """Supremum of a maxitive distribution over a set of outcomes.

    ``members`` is an iterable of labels (discrete) or a node predicate /
    boolean mask (grid), so inequality sets like ``T(x) <= t`` are allowed.
    """
    if dist.mode is not MAXITIVE:
        raise ModeError("set likelihood is defined for maxitive distributions only")
    if isinstance(dist, GridDensity):
        mask = select_nodes(dist, members)
        if not mask.any():
            raise EmptySetError("no grid node satisfies the set predicate")
        return float(dist.values.ravel()[mask].max())
    idx = _resolve_discrete(dist, members)
    if not idx:
        raise EmptySetError("set is empty")
    return max(dist.weights[i] for i in idx)


@dataclass
class AuditReport:
    """Flatness of the images of the flat source distribution in both modes.

    Ratios are max/min over targets with a nonempty fiber.
    """

    fiber_sizes: list
    fiber_size_ratio: float
    maxitive_ratio: float
    additive_ratio: float
    maxitive_image: object
    additive_image: object

    @property
    def maxitive_flat(self):
        return self.maxitive_ratio == 1.0

    @property
    def additive_flat(self):
        return abs(self.additive_ratio - 1.0) <= 1e-12

    def to_dict(self):
        return {
            "fiber_sizes": self.fiber_sizes,
            "fiber_size_ratio": self.fiber_size_ratio,
            "maxitive_ratio": self.maxitive_ratio,
            "maxitive_flat": self.maxitive_flat,
            "additive_ratio": self.additive_ratio,
            "additive_flat": self.additive_flat,
        }


def _nonempty_ratio(image, sizes):
    if isinstance(image, GridDensity):
        vals = image.values.ravel()
    else:
        vals = np.asarray(image.weights)
    vals = vals[np.asarray(sizes) > 0]
    return float(vals.max() / vals.min())


def ignorance_audit(T, source_space):
    """Push the flat distribution on ``source_space`` through ``T`` in both modes.

    ``source_space`` is a sequence of labels or a sequence of :class:`Axis`.
    """
    space = list(source_space)
    if space and all(isinstance(ax, Axis) for ax in space):
        flat = {m: GridDensity.flat(space, m) for m in (MAXITIVE, ADDITIVE)}
    else:
        flat = {m: DiscreteDistribution.flat(space, m) for m in (MAXITIVE, ADDITIVE)}
    images = {m: pushforward(d, T) for m, d in flat.items()}
    sizes = fiber_index(flat[MAXITIVE], T).sizes()
    nonempty = [s for s in sizes if s > 0]
    return AuditReport(
        fiber_sizes=sizes,
        fiber_size_ratio=max(nonempty) / min(nonempty),
        maxitive_ratio=_nonempty_ratio(images[MAXITIVE], sizes),
        additive_ratio=_nonempty_ratio(images[ADDITIVE], sizes),
        maxitive_image=images[MAXITIVE],
        additive_image=images[ADDITIVE],
    )
