"""Exact and approximate distributions of the radar cell under test.

The cell under test is ``Z = |S + C|**2``: a complex Gaussian target ``S``
added to compound-Gaussian clutter ``C`` with inverse-gamma texture, whose
intensity alone is Pareto Type II.  The package evaluates the exact law of
``Z`` by quadrature, implements the linearised Pareto approximation and its
large-``lam`` limit, provides a Monte Carlo oracle, and measures how far the
approximation is from the truth as the target power varies.
"""

from .analysis import ValidityReport, compare, scr_db, sup_distance, sweep
from .approximation import (
    GContext,
    approx_cdf_exp,
    approx_cdf_pareto,
    effective_pareto,
    g,
    g_derivative,
    limit_cdf,
    linearized_g,
    taylor_partial_sum,
    validity_ratio,
)
from .distributions import (
    ParetoParams,
    Scenario,
    make_stream,
    pareto_cdf,
    pareto_pdf,
    pareto_quantile,
    sample_clutter,
    sample_signal,
    sample_speckle,
)
from .errors import DomainError, InfiniteClutterMeanError, QuadratureError
from .exact_cut import CdfCurve, Estimate, GridSpec, QuadratureConfig, exact_cdf, exact_curve, exact_pdf
from .monte_carlo import EmpiricalCdf, SampleBatch, ks_distance, sample_cut

__version__ = "0.1.0"
