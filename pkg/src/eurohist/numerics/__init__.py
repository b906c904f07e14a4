"""Numerical building blocks: distributions, exact rank nulls, OLS, random streams."""

from .distributions import (
    binomial_pmf,
    chi_square_cdf,
    chi_square_sf,
    normal_cdf,
    normal_sf,
    regularized_beta,
    regularized_gamma_p,
    regularized_gamma_q,
    student_t_cdf,
    student_t_sf,
)
from .exact import (
    mann_whitney_counts,
    mann_whitney_null_cdf,
    signed_rank_counts,
    signed_rank_null_cdf,
    spearman_counts,
    spearman_tail_prob,
    spearman_upper_prob,
)
from .linalg import LinearFit, ols_fit
from .rng import (
    RandomStream,
    counter_choices,
    counter_uniforms,
    next_choice,
    next_uniform,
    random_stream,
)

__all__ = [
    "LinearFit",
    "RandomStream",
    "binomial_pmf",
    "chi_square_cdf",
    "chi_square_sf",
    "counter_choices",
    "counter_uniforms",
    "mann_whitney_counts",
    "mann_whitney_null_cdf",
    "next_choice",
    "next_uniform",
    "normal_cdf",
    "normal_sf",
    "ols_fit",
    "random_stream",
    "regularized_beta",
    "regularized_gamma_p",
    "regularized_gamma_q",
    "signed_rank_counts",
    "signed_rank_null_cdf",
    "spearman_counts",
    "spearman_tail_prob",
    "spearman_upper_prob",
    "student_t_cdf",
    "student_t_sf",
]
