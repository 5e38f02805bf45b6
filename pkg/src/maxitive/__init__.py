"""Likelihood as a maxitive measure: pushforwards, profiles, distances and
min-plus (tropical) cost measures, alongside ordinary additive probability."""

__version__ = "0.1.0"

from .semiring import ADDITIVE, MAXITIVE, SemiringMode, combine, cost_combine, from_cost, scale, to_cost
from .plausibility import Axis, DiscreteDistribution, GridDensity, check_axioms, measure_of, normalize
from .pushforward import (
    NumericMap,
    Projection,
    Relabel,
    compose,
    ignorance_audit,
    marginalize,
    pushforward,
    set_likelihood,
)
from .profiler import (
    Coordinate,
    GeneralMap,
    LikelihoodModel,
    LinearCombination,
    ProfileOptions,
    grid_profile_oracle,
    profile,
    profile_to_grid,
)
from .distance import compare, likelihood_distance
from .tropical import CostMeasure, TropicalMatrix, bellman_iterate, bellman_step, from_weights, profile_cost, tropical_bayes
