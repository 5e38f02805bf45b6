"""Likelihood preference ordering and the log-likelihood-ratio distance.

``D(theta_1, theta_2) = |log L(theta_1) - log L(theta_2)|`` is a pseudometric:
distinct parameters with equal likelihood are at distance zero.
"""

from dataclasses import dataclass
import enum
import math

import numpy as np

from .errors import DomainError, UndefinedDistanceError, UnknownLabelError
from .plausibility import DiscreteDistribution, GridDensity
from .profiler import LikelihoodModel

__all__ = ["Relation", "PreferencePair", "log_likelihood_at", "compare", "likelihood_distance", "distance_table"]


class Relation(enum.Enum):
    PREFERRED = "preferred"
    DISPREFERRED = "dispreferred"
    EQUIVALENT = "equivalent"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PreferencePair:
    theta_1: object
    theta_2: object
    relation: Relation


def _grid_log(grid, theta):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.size != grid.ndim:
        raise DomainError(f"point {theta.tolist()} has wrong dimension for a {grid.ndim}-d grid")
    idx = []
    for ax, x in zip(grid.axes, theta):
        k = int(ax.nearest_index(x))
        if not 0 <= k < ax.points or abs(ax.nodes[k] - x) > 1e-9 * ax.step:
            raise DomainError(f"point {theta.tolist()} is not a grid node")
        idx.append(k)
    w = float(grid.values[tuple(idx)])
    return math.log(w) if w > 0 else -math.inf


def log_likelihood_at(source, theta):
    """Log-likelihood of ``theta`` under a model, distribution or log-likelihood callable.

    Discrete distributions take labels; grids take node coordinates.
    """
    if isinstance(source, DiscreteDistribution):
        try:
            w = source[theta]
        except UnknownLabelError as exc:
            raise DomainError(str(exc)) from None
        return math.log(w) if w > 0 else -math.inf
    if isinstance(source, GridDensity):
        return _grid_log(source, theta)
    if isinstance(source, LikelihoodModel):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (source.dim,) or not source.in_box(theta):
            raise DomainError(f"point {theta.tolist()} outside the parameter box of {source.name!r}")
        return source.evaluate(theta)
    if callable(source):
        v = float(source(theta))
        if math.isnan(v):
            raise DomainError(f"log-likelihood is NaN at {theta!r}")
        return v
    raise TypeError(f"cannot evaluate a likelihood from {type(source).__name__}")


def compare(source, theta_1, theta_2):
    """``PREFERRED`` iff ``L(theta_1) > L(theta_2)``, compared on the log scale."""
    a = log_likelihood_at(source, theta_1)
    b = log_likelihood_at(source, theta_2)
    if a > b:
        rel = Relation.PREFERRED
    elif a < b:
        rel = Relation.DISPREFERRED
    else:
        rel = Relation.EQUIVALENT
    return PreferencePair(theta_1, theta_2, rel)


def likelihood_distance(source, theta_1, theta_2):
    """``|log L(theta_1) - log L(theta_2)|``; ``inf`` if exactly one likelihood is zero."""
    a = log_likelihood_at(source, theta_1)
    b = log_likelihood_at(source, theta_2)
    if a == -math.inf and b == -math.inf:
        raise UndefinedDistanceError(f"both {theta_1!r} and {theta_2!r} have zero likelihood")
    if a == -math.inf or b == -math.inf:
        return math.inf
    return abs(a - b)


def distance_table(source, points, scale=1.0):
    """All ordered pairs ``(i, j)`` with ``i < j`` as dict rows.

    ``scale`` multiplies reported distances only.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    rows = []
    points = list(points)
    for i, p in enumerate(points):
        for q in points[i + 1 :]:
            rows.append(
                {
                    "theta_1": p,
                    "theta_2": q,
                    "relation": str(compare(source, p, q).relation),
                    "distance": scale * likelihood_distance(source, p, q),
                }
            )
    return rows
