"""Optimized entropic measures of bipartite correlation.

Exact discovery of the monotone cones (``cones``, ``discovery``) and
variational estimation of the measures they contain (``states``,
``estimator``).
"""

__version__ = "0.1.0"

from .discovery import alpha_cone, dual_alpha, finiteness_check, named_alpha
from .entropy_space import AlphaVector, EntropyFunctional, PartySet
from .estimator import InfiniteMeasureError, estimate_measure, lower_bound
from .states import DensityMatrix, f_alpha, named_state, partial_trace, von_neumann_entropy

__all__ = [
    "AlphaVector",
    "DensityMatrix",
    "EntropyFunctional",
    "InfiniteMeasureError",
    "PartySet",
    "alpha_cone",
    "dual_alpha",
    "estimate_measure",
    "f_alpha",
    "finiteness_check",
    "lower_bound",
    "named_alpha",
    "named_state",
    "partial_trace",
    "von_neumann_entropy",
]
