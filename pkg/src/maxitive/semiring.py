"""Sum-product, max-product and min-plus arithmetic on plausibility weights.

Weights are plain nonnegative floats; costs are their negative natural logs,
with ``math.inf`` standing for the cost of a zero weight.
"""

import enum
import math

__all__ = [
    "SemiringMode",
    "ADDITIVE",
    "MAXITIVE",
    "combine",
    "combine_all",
    "scale",
    "to_cost",
    "from_cost",
    "cost_combine",
    "cost_scale",
    "ADDITIVE_RTOL",
]

ADDITIVE_RTOL = 1e-12


class SemiringMode(enum.Enum):
    ADDITIVE = "additive"
    MAXITIVE = "maxitive"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown semiring mode {value!r}") from None

    def __str__(self):
        return self.value


ADDITIVE = SemiringMode.ADDITIVE
MAXITIVE = SemiringMode.MAXITIVE


def _check_weight(w):
    if not (w >= 0.0 and math.isfinite(w)):
        raise ValueError(f"weight must be finite and nonnegative, got {w!r}")


def combine(a, b, mode):
    """Semiring addition: ``a + b`` (additive) or ``max(a, b)`` (maxitive)."""
    _check_weight(a)
    _check_weight(b)
    if SemiringMode.parse(mode) is ADDITIVE:
        return a + b
    return max(a, b)


def combine_all(weights, mode):
    """Fold :func:`combine` over an iterable; the empty fold is 0.

    Additive folds use ``math.fsum`` so the result does not depend on
    summation order beyond correct rounding.
    """
    weights = [float(w) for w in weights]
    for w in weights:
        _check_weight(w)
    if not weights:
        return 0.0
    if SemiringMode.parse(mode) is ADDITIVE:
        return math.fsum(weights)
    return max(weights)


def scale(a, b):
    """Semiring multiplication in the linear domain (ordinary product)."""
    _check_weight(a)
    _check_weight(b)
    return a * b


def to_cost(w):
    """``-log(w)`` with ``to_cost(0) == inf``."""
    _check_weight(w)
    if w == 0.0:
        return math.inf
    return -math.log(w)


def from_cost(c):
    """Inverse of :func:`to_cost`."""
    if math.isnan(c):
        raise ValueError("cost must not be NaN")
    if c == math.inf:
        return 0.0
    return math.exp(-c)


def cost_combine(a, b):
    """Min-plus addition; image of maxitive ``combine`` under ``to_cost``."""
    return min(a, b)


def cost_scale(a, b):
    """Min-plus multiplication; image of ``scale`` under ``to_cost``."""
    return a + b
