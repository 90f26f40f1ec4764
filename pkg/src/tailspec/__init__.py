"""Nonparametric estimation of the bivariate extremal spectral measure.

Empirical, maximum Euclidean likelihood and maximum empirical likelihood
estimators, Beta-kernel smoothing, logistic benchmark models, dependence
diagnostics and a Monte Carlo MISE harness.
"""
from .errors import (
    ConvergenceError,
    DegenerateSampleError,
    InfeasibleError,
    InputError,
    NumericalError,
    TailspecError,
)
from .estimators import (
    ElSolution,
    EstimatorKind,
    SpectralEstimate,
    el_estimate,
    el_weights,
    empirical_weights,
    estimate,
    euclidean_weights,
    mean_constraint_residual,
    negative_weight_fraction,
    phi_transform,
    qp_oracle,
    spectral_cdf,
)
from .margins import (
    AngleSample,
    BivariateSample,
    PseudoPolar,
    angles_from_sample,
    known_margin_transform,
    pseudo_polar,
    rank_transform,
    select_exceedances,
)
from .models import AsyLogisticModel, LogisticModel, logistic_sample
from .smoothing import SmoothedSpectral, bev_cdf, cv_concentration, pickands, smooth, smooth_cdf, smooth_density

__version__ = "0.1.0"
