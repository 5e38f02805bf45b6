"""Named fixtures shipped with the package."""

import math

import numpy as np

from .plausibility import DiscreteDistribution
from .pushforward import Relabel
from .semiring import ADDITIVE, MAXITIVE

SUSPECT_WEIGHTS = {"s1": 0.4, "s2": 0.3, "s3": 0.3}
HAT_COLOURS = {"s1": "red", "s2": "blue", "s3": "blue"}

# mean is exactly 5.0 in binary floating point
NORMAL_DATA = (
    4.25, 5.75, 3.75, 6.0, 5.25, 4.75, 5.5, 4.5, 6.5, 5.0,
    4.0, 5.75, 4.75, 5.25, 6.25, 4.0, 5.5, 4.5, 4.5, 4.25,
)
NORMAL_BOUNDS = ((2.0, 8.0), (0.05, 5.0))
NORMAL_T_GRID = "3:7:41"

# T = theta_1 + theta_2 on a 400-node grid with spacing 0.02 puts the
# t grid -1.2:1.2:41 exactly on node lattices of the fiber lines.
QUADRATIC_MEAN = (0.5, -0.5)
QUADRATIC_PRECISION = ((2.0, 0.6), (0.6, 1.0))
QUADRATIC_BOUNDS = ((-3.99, 3.99), (-3.99, 3.99))
QUADRATIC_COEFFICIENTS = (1.0, 1.0)
QUADRATIC_T_GRID = "-1.2:1.2:41"

LOGISTIC_X = tuple(np.linspace(-2.0, 2.0, 15).tolist())
LOGISTIC_Y = (
    0.063, 0.105, 0.126, 0.16, 0.254, 0.325, 0.47, 0.628,
    0.655, 0.736, 0.85, 0.897, 0.924, 0.909, 0.963,
)
LOGISTIC_T_GRID = "-1:1.5:26"

# shortest paths to node "c"; zero diagonal so k steps cover paths of length <= k
BELLMAN_LABELS = ("a", "b", "c")
BELLMAN_MATRIX = (
    (0.0, 1.0, 5.0),
    (math.inf, 0.0, 2.0),
    (3.0, math.inf, 0.0),
)
BELLMAN_TARGET = "c"


def suspects(mode=MAXITIVE):
    return DiscreteDistribution.from_dict(SUSPECT_WEIGHTS, mode)


def hats():
    return Relabel(HAT_COLOURS)


def normal():
    from .models import normal_model

    return normal_model(NORMAL_DATA, NORMAL_BOUNDS)


def quadratic():
    from .models import quadratic_model

    return quadratic_model(QUADRATIC_MEAN, QUADRATIC_PRECISION, QUADRATIC_BOUNDS)


def logistic():
    from .models import logistic_model

    return logistic_model(LOGISTIC_X, LOGISTIC_Y)


def bellman_graph():
    from .tropical import CostMeasure, TropicalMatrix

    M = TropicalMatrix(BELLMAN_MATRIX, BELLMAN_LABELS)
    v = CostMeasure(BELLMAN_LABELS, tuple(0.0 if lab == BELLMAN_TARGET else math.inf for lab in BELLMAN_LABELS))
    return M, v


__all__ = ["suspects", "hats", "normal", "quadratic", "logistic", "bellman_graph", "ADDITIVE", "MAXITIVE"]
