"""Uncertainty layers over design problems.

Three complementary mechanisms, each composable with the deterministic
operator algebra:

- interval enclosures (pessimistic / optimistic endpoint problems),
- seeded samplers of design problems (operational distributions),
- parameterized families and Markov kernels (parameter-indexed
  distributions, composable along parameter chains).
"""

from .intervals import IntervalDP, check_containment, embed_dp, interval_lift, interval_trace
from .kernels import (
    BoxSpace,
    DPSpace,
    FiniteSpace,
    MarkovKernel,
    ParameterizedDP,
    ProductSpace,
    RecordSpace,
    Space,
    SuccessEstimate,
    UNIT_SPACE,
    condition,
    delta_kernel,
    finite_kernel,
    kernel_compose,
    kernel_lift_intersection,
    kernel_lift_parallel,
    kernel_lift_series,
    kernel_lift_trace,
    kernel_lift_union,
    kernel_product,
    param_lift_intersection,
    param_lift_parallel,
    param_lift_series,
    param_lift_trace,
    param_lift_union,
    reparam,
    reparam_kernel,
    success_probability,
    wilson_interval,
)
from .sampling import (
    DPSampler,
    delta_sampler,
    dist_lift_intersection,
    dist_lift_parallel,
    dist_lift_series,
    dist_lift_trace,
    dist_lift_union,
    finite_sampler,
    pushforward,
)

__all__ = [
    "IntervalDP", "check_containment", "embed_dp", "interval_lift",
    "interval_trace",
    "DPSampler", "delta_sampler", "finite_sampler", "pushforward",
    "dist_lift_series", "dist_lift_parallel", "dist_lift_union",
    "dist_lift_intersection", "dist_lift_trace",
    "Space", "FiniteSpace", "BoxSpace", "ProductSpace", "RecordSpace",
    "DPSpace", "UNIT_SPACE",
    "MarkovKernel", "finite_kernel", "delta_kernel", "kernel_product",
    "kernel_compose", "reparam_kernel", "condition",
    "ParameterizedDP", "reparam",
    "param_lift_series", "param_lift_parallel", "param_lift_union",
    "param_lift_intersection", "param_lift_trace",
    "kernel_lift_series", "kernel_lift_parallel", "kernel_lift_union",
    "kernel_lift_intersection", "kernel_lift_trace",
    "SuccessEstimate", "success_probability", "wilson_interval",
]
