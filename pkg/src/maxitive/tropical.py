"""Min-plus cost measures, tropical Bayes updates and Bellman chains.

A cost is the negative log of a maxitive weight: max of weights becomes min of
costs and products become sums.  A normalized cost measure has minimum 0.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DimensionError, ModeError, SupportMismatchError, ValidationError
from .plausibility import DiscreteDistribution, GridDensity
from .pushforward import label_fibers
from .semiring import MAXITIVE, from_cost, to_cost

__all__ = [
    "CostMeasure",
    "TropicalMatrix",
    "from_weights",
    "to_weights",
    "tropical_normalize",
    "tropical_bayes",
    "bellman_step",
    "bellman_iterate",
    "profile_cost",
]


@dataclass(frozen=True)
class CostMeasure:
    labels: tuple
    costs: tuple
    normalized: bool = None

    def __post_init__(self):
        labels = tuple(tuple(x) if isinstance(x, list) else x for x in self.labels)
        costs = tuple(float(c) for c in self.costs)
        if len(labels) != len(costs):
            raise ValidationError("labels and costs differ in length")
        if len(set(labels)) != len(labels):
            raise ValidationError("labels must be unique")
        for lab, c in zip(labels, costs):
            if math.isnan(c) or c < 0:
                raise ValidationError(f"cost for {lab!r} must lie in [0, inf], got {c!r}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "costs", costs)
        actual = bool(costs) and min(costs) == 0.0
        if self.normalized is None:
            object.__setattr__(self, "normalized", actual)
        elif self.normalized and not actual:
            raise ValidationError("flagged normalized but the minimum cost is not 0")

    @classmethod
    def from_dict(cls, mapping, normalized=None):
        return cls(tuple(mapping), tuple(mapping.values()), normalized)

    @classmethod
    def flat(cls, labels):
        labels = tuple(labels)
        return cls(labels, (0.0,) * len(labels))

    def as_dict(self):
        return dict(zip(self.labels, self.costs))

    def __getitem__(self, label):
        return self.costs[self.labels.index(label)]

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class TropicalMatrix:
    """Transition costs ``M[i, j]`` in ``[0, inf]``; rows/columns share ``labels``."""

    entries: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        M = np.array(self.entries, dtype=float)
        if M.ndim != 2:
            raise DimensionError("tropical matrix must be two-dimensional")
        if np.any(np.isnan(M)) or np.any(M < 0):
            raise ValidationError("matrix entries must lie in [0, inf]")
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)
        labels = self.labels
        if labels is None and M.shape[0] == M.shape[1]:
            labels = tuple(str(i) for i in range(M.shape[0]))
        if labels is not None:
            labels = tuple(labels)
            if M.shape[0] != M.shape[1] or len(labels) != M.shape[0]:
                raise DimensionError("labels require a square matrix of matching size")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def identity(cls, labels):
        labels = tuple(labels)
        M = np.full((len(labels), len(labels)), np.inf)
        np.fill_diagonal(M, 0.0)
        return cls(M, labels)

    @property
    def shape(self):
        return self.entries.shape


def from_weights(dist):
    """Costs ``-log(w)`` of a maxitive distribution (grid nodes become coordinate labels)."""
    if dist.mode is not MAXITIVE:
        raise ModeError("cost measures come from maxitive distributions only")
    if isinstance(dist, GridDensity):
        labels = tuple(tuple(float(x) for x in p) for p in dist.nodes())
        weights = dist.values.ravel().tolist()
    else:
        labels, weights = dist.labels, dist.weights
    costs = tuple(to_cost(w) for w in weights)
    # a weight flagged normalized may sit just below 1, so infer the cost flag
    return CostMeasure(labels, costs)


def to_weights(cm):
    """Maxitive distribution with weights ``exp(-cost)``."""
    return DiscreteDistribution(cm.labels, tuple(from_cost(c) for c in cm.costs), MAXITIVE)


def tropical_normalize(cm):
    finite = [c for c in cm.costs if c != math.inf]
    if not finite:
        raise ValidationError("every cost is infinite; nothing to normalize")
    m = min(finite)
    return CostMeasure(cm.labels, tuple(c - m for c in cm.costs), True)


def tropical_bayes(prior, evidence):
    """Posterior cost ``prior + evidence``, shifted so its minimum is 0.

    ``evidence`` is matched to ``prior`` by label; both must share one support.
    """
    if set(prior.labels) != set(evidence.labels) or len(prior) != len(evidence):
        raise SupportMismatchError("prior and evidence have different supports")
    ev = evidence.as_dict()
    raw = tuple(c + ev[lab] for lab, c in zip(prior.labels, prior.costs))
    if all(c == math.inf for c in raw):
        raise ValidationError("posterior is impossible everywhere (all costs infinite)")
    return tropical_normalize(CostMeasure(prior.labels, raw))


def bellman_step(M, v):
    """Min-plus product ``(M v)_i = min_j (M[i, j] + v_j)``: one value-iteration step."""
    if M.shape[1] != len(v):
        raise DimensionError(f"matrix has {M.shape[1]} columns, vector has {len(v)} entries")
    if M.labels is not None and tuple(M.labels) != tuple(v.labels):
        raise SupportMismatchError("matrix labels and vector labels differ")
    out = np.min(M.entries + np.asarray(v.costs)[None, :], axis=1)
    labels = M.labels if M.labels is not None else tuple(str(i) for i in range(M.shape[0]))
    return CostMeasure(labels, tuple(out.tolist()))


def bellman_iterate(M, v, steps=None, max_steps=10_000):
    """Apply :func:`bellman_step` ``steps`` times, or until the costs stop changing.

    Returns ``(costs, steps_taken)``.
    """
    if steps is not None:
        for _ in range(steps):
            v = bellman_step(M, v)
        return v, steps
    for k in range(1, max_steps + 1):
        nxt = bellman_step(M, v)
        if nxt.costs == v.costs:
            return nxt, k
        v = nxt
    raise ValidationError(f"value iteration did not reach a fixed point in {max_steps} steps")


def profile_cost(cm, T):
    """Min of costs over each fiber of ``T`` (the cost image of a maxitive pushforward)."""
    fib = label_fibers(cm.labels, T)
    costs = tuple(min(cm.costs[i] for i in f) for f in fib.fibers)
    return CostMeasure(fib.targets, costs)
