"""asx: far-zone angular-spectrum integrals.

Leading-order saddle-point evaluation of plane-wave superposition
integrals over the upper half space, validated against a brute-force
adaptive quadrature oracle, with sweep tooling for convergence and
validity-boundary studies.
"""

from .asymptotics import (
    AsymptoticResult,
    QuadraticForm,
    gaussian_closed_form,
    leading_order,
    local_sdp_integral,
    quadratic_coeffs,
    truncated_phase,
    validity_threshold,
)
from .errors import (
    AsxError,
    BranchContinuationError,
    ConfigError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    InsufficientDataError,
    SpectrumEvaluationError,
    SpectrumParseError,
)
from .harness import (
    ComparisonRecord,
    SweepConfig,
    emit,
    fit_convergence_slope,
    point_from_parameters,
    read_csv_records,
    run_sweep,
    validity_map,
)
from .oracle import (
    OracleResult,
    QuadratureConfig,
    evanescent_integral,
    oracle_eval,
    propagating_integral,
)
from .spectra import (
    SpectrumFunction,
    builtin_spectrum,
    constant,
    evaluate,
    gaussian,
    parse_spectrum,
    weyl,
)
from .spectral import (
    ComplexWaveVector,
    ObservationPoint,
    SaddleData,
    kz_branch,
    local_half_width,
    phase_U,
    saddle_point,
    sdp_map,
)

__version__ = "0.1.0"

__all__ = [
    "AsxError",
    "AsymptoticResult",
    "BranchContinuationError",
    "ComparisonRecord",
    "ComplexWaveVector",
    "ConfigError",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "InsufficientDataError",
    "ObservationPoint",
    "OracleResult",
    "QuadratureConfig",
    "QuadraticForm",
    "SaddleData",
    "SpectrumEvaluationError",
    "SpectrumFunction",
    "SpectrumParseError",
    "SweepConfig",
    "builtin_spectrum",
    "constant",
    "emit",
    "evaluate",
    "evanescent_integral",
    "fit_convergence_slope",
    "gaussian",
    "gaussian_closed_form",
    "kz_branch",
    "leading_order",
    "local_half_width",
    "local_sdp_integral",
    "oracle_eval",
    "parse_spectrum",
    "phase_U",
    "point_from_parameters",
    "propagating_integral",
    "quadratic_coeffs",
    "read_csv_records",
    "run_sweep",
    "saddle_point",
    "sdp_map",
    "truncated_phase",
    "validity_map",
    "validity_threshold",
    "weyl",
]
