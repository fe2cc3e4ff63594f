"""Compositional solver for monotone co-design problems under uncertainty.

Core pieces: posets and antichains (``codp.posets``), design problems and
their composition algebra including feedback (``codp.dp``), uncertainty as
intervals, samplers, and Markov kernels (``codp.uncertainty``), a small
diagram language with an elaborator (``codp.diagram``), and a worked
delivery-drone study (``codp.uav``).
"""

from .dp import (DesignProblem, ImplementationSet, QueryResult, dp_from_mdpi,
                 feasible, identity_dp, intersection, map_dp, parallel,
                 parallel_all, query_fix_fun_min_res, query_fix_res_max_fun,
                 series, trace, union)
from .errors import (CodpError, DiagramSyntaxError, DiagramTypeError,
                     DomainMismatchError, InfinitePosetError,
                     PosetMismatchError, SpaceMismatchError,
                     TraceDivergenceError, UnsupportedPosetError)
from .posets import (TOP, Antichain, Discrete, NonNegReal, Opposite, Poset,
                     Product, enumerate_elements, minimals, upper_intersection,
                     upper_union)
from .seeds import check_seed, derive, rng

__version__ = "0.1.0"

__all__ = [
    "DesignProblem", "ImplementationSet", "QueryResult", "dp_from_mdpi",
    "feasible", "identity_dp", "intersection", "map_dp", "parallel",
    "parallel_all", "query_fix_fun_min_res", "query_fix_res_max_fun",
    "series", "trace", "union",
    "CodpError", "DiagramSyntaxError", "DiagramTypeError",
    "DomainMismatchError", "InfinitePosetError", "PosetMismatchError",
    "SpaceMismatchError", "TraceDivergenceError", "UnsupportedPosetError",
    "TOP", "Antichain", "Discrete", "NonNegReal", "Opposite", "Poset",
    "Product", "enumerate_elements", "minimals", "upper_intersection",
    "upper_union",
    "check_seed", "derive", "rng",
    "__version__",
]
