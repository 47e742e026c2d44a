"""Higher-order multivariate statistics on flat Kronecker-layout tensors.

The package covers three layers:

* :mod:`kronstats.kron` — flat tensor algebra (products, powers,
  symmetrization, mode permutations, the multi-index codec);
* :mod:`kronstats.cumulants`, :mod:`kronstats.gauss` — moment/cumulant
  conversions and Gaussian derivative / vector Hermite machinery;
* :mod:`kronstats.series`, :mod:`kronstats.empirical`,
  :mod:`kronstats.quadcheck` — truncated density expansions around Gaussian
  or Gaussian-mixture references, sample-based fitting, and quadrature
  cross-checks of the underlying integral forms.
"""

from .errors import (
    AccuracyError,
    BudgetError,
    EstimationError,
    InputError,
    KronStatsError,
    NumericalError,
    ShapeError,
)
from .kron import (
    KronVector,
    ModePermutation,
    MultiIndex,
    apply_matrix_modewise,
    entry_budget,
    kron_power,
    kron_product,
    multi_index_to_position,
    permute_modes,
    position_to_multi_index,
    symmetrize,
)
from .cumulants import (
    CumulantDelta,
    CumulantSet,
    ExpansionCoefficients,
    MomentSet,
    alpha_from_delta,
    cumulant_delta,
    cumulants_from_moments,
    delta_from_alpha,
    evaluate_moment_table,
    gaussian_cumulants,
    load_moment_table,
    moments_from_cumulants,
    transform_cumulants,
)
from .gauss import (
    GaussianParams,
    gaussian_derivative,
    gaussian_pdf,
    hermite_general,
    hermite_identity,
)
from .series import (
    AffineMap,
    ExpansionModel,
    ReferenceDensity,
    char_fn_ggc,
    char_fn_series,
    gca_density,
    gca_model,
    ggc_density,
    model_char_fn,
    negative_mass_fraction,
    reference_derivative,
)
from .quadcheck import (
    QuadratureGrid,
    gaussian_derivative_quadrature,
    hermite_integral_quadrature,
    inverse_fourier_1d,
    pdf_from_cumulants_quadrature,
)
from .empirical import (
    fit_expansion,
    load_samples_csv,
    sample_moments,
    standardize,
    transform_reference,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "AffineMap",
    "BudgetError",
    "CumulantDelta",
    "CumulantSet",
    "EstimationError",
    "ExpansionCoefficients",
    "ExpansionModel",
    "GaussianParams",
    "InputError",
    "KronStatsError",
    "KronVector",
    "ModePermutation",
    "MomentSet",
    "MultiIndex",
    "NumericalError",
    "QuadratureGrid",
    "ReferenceDensity",
    "ShapeError",
    "alpha_from_delta",
    "apply_matrix_modewise",
    "char_fn_ggc",
    "char_fn_series",
    "cumulant_delta",
    "cumulants_from_moments",
    "delta_from_alpha",
    "entry_budget",
    "evaluate_moment_table",
    "fit_expansion",
    "gaussian_cumulants",
    "gaussian_derivative",
    "gaussian_derivative_quadrature",
    "gaussian_pdf",
    "gca_density",
    "gca_model",
    "ggc_density",
    "hermite_general",
    "hermite_identity",
    "hermite_integral_quadrature",
    "inverse_fourier_1d",
    "kron_power",
    "kron_product",
    "load_moment_table",
    "load_samples_csv",
    "model_char_fn",
    "moments_from_cumulants",
    "multi_index_to_position",
    "negative_mass_fraction",
    "pdf_from_cumulants_quadrature",
    "permute_modes",
    "position_to_multi_index",
    "reference_derivative",
    "sample_moments",
    "standardize",
    "symmetrize",
    "transform_cumulants",
    "transform_reference",
]
