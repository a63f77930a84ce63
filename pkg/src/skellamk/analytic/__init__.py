"""Closed-form distributional objects for every process family."""

from .levy import LevyMeasure, levy_khintchine_residual, levy_measure, lk_bound
from .moments import correlation, covariance, jump_rates, lrd_limit, moments
from .pmf import (
    mixed_poisson_weights,
    ppok_pmf,
    ppok_pmf_enumerate,
    ppok_pmf_vector,
    sfpp_pmf,
    sfpp_pmf_vector,
    sfpp_tail_vector,
    sfsp_pmf,
    sfsp_pmf_series,
    skellam_pmf,
    spok_pmf_closedform,
    spok_pmf_conv,
    tcspok_pmf,
    tsfpp_pmf,
    tsfpp_pmf_double_series,
    tsfpp_pmf_vector,
    tsfsp_pmf,
)
from .tables import PmfTable, pmf_table
from .transforms import LEVY_FAMILIES, char_exponent, char_function, log_mgf, mgf, pgf

__all__ = [
    "LEVY_FAMILIES",
    "LevyMeasure",
    "PmfTable",
    "char_exponent",
    "char_function",
    "correlation",
    "covariance",
    "jump_rates",
    "levy_khintchine_residual",
    "levy_measure",
    "lk_bound",
    "log_mgf",
    "lrd_limit",
    "mgf",
    "mixed_poisson_weights",
    "moments",
    "pgf",
    "pmf_table",
    "ppok_pmf",
    "ppok_pmf_enumerate",
    "ppok_pmf_vector",
    "sfpp_pmf",
    "sfpp_pmf_vector",
    "sfpp_tail_vector",
    "sfsp_pmf",
    "sfsp_pmf_series",
    "skellam_pmf",
    "spok_pmf_closedform",
    "spok_pmf_conv",
    "tcspok_pmf",
    "tsfpp_pmf",
    "tsfpp_pmf_double_series",
    "tsfpp_pmf_vector",
    "tsfsp_pmf",
]
