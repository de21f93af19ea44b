"""Anisotropic self-similar Gaussian fields with stationary rectangular increments.

The package builds the fractional Brownian sheet and its modulated
counterexample from stationary kernels, certifies positive definiteness
through three independent spectral routes, and simulates the exact field
law on finite grids with reproducible counter-based randomness.
"""

from ._backend import backend_name
from ._version import __version__
from .errors import (
    AnisoFieldError,
    BackendError,
    ConfigError,
    DegenerateWitnessError,
    DomainError,
    EigenFailure,
    FactorizationError,
    NotCertifiedError,
    OffGridError,
    QuadratureFailure,
    SpecialFunctionError,
    ToleranceNotReached,
)
from .kernels import (
    HurstPair,
    StationaryKernel,
    f_h,
    fbs_covariance,
    kernel_values,
    modulation,
    r0,
    r_theta,
)
from .lamperti import (
    FieldCovariance,
    RectIncrement,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_r1,
    field_cov,
    increment_covariance,
)
from .reports import CheckRecord, VerificationReport, canonical_json
from .sampler import (
    CovarianceFactor,
    GridSample,
    GridSpec,
    draw_values,
    factorize_covariance,
    rectangular_increments,
    sample,
    sample_to_csv,
    sample_to_json,
    save_samples,
)
from .spectral import (
    BinomialSeries,
    SpectralPair,
    ThetaCertificate,
    a_closed_form,
    a_quadrature,
    a_series,
    b_quadrature,
    b_series,
    binom_coeffs,
    certificate_for,
    fourier_inversion_scan,
    gamma_modulus_ratio,
    integrability_bound,
    lower_bound_a,
    lower_bound_b,
    theta_bound,
    upper_bound_b,
    verify_main_inequality,
    verify_psd_gram,
)
from .stats import (
    IncrementTestConfig,
    RectanglePair,
    TestOutcome,
    empirical_covariance,
    increment_variance,
    test_increment_stationarity,
    test_not_fbs,
    witness_gap,
    witness_points,
)

__all__ = [
    "__version__",
    "backend_name",
    "AnisoFieldError",
    "BackendError",
    "ConfigError",
    "DegenerateWitnessError",
    "DomainError",
    "EigenFailure",
    "FactorizationError",
    "NotCertifiedError",
    "OffGridError",
    "QuadratureFailure",
    "SpecialFunctionError",
    "ToleranceNotReached",
    "HurstPair",
    "StationaryKernel",
    "f_h",
    "fbs_covariance",
    "kernel_values",
    "modulation",
    "r0",
    "r_theta",
    "FieldCovariance",
    "RectIncrement",
    "check_lemma1",
    "check_lemma2",
    "check_lemma3",
    "check_r1",
    "field_cov",
    "increment_covariance",
    "CheckRecord",
    "VerificationReport",
    "canonical_json",
    "CovarianceFactor",
    "GridSample",
    "GridSpec",
    "draw_values",
    "factorize_covariance",
    "rectangular_increments",
    "sample",
    "sample_to_csv",
    "sample_to_json",
    "save_samples",
    "BinomialSeries",
    "SpectralPair",
    "ThetaCertificate",
    "a_closed_form",
    "a_quadrature",
    "a_series",
    "b_quadrature",
    "b_series",
    "binom_coeffs",
    "certificate_for",
    "fourier_inversion_scan",
    "gamma_modulus_ratio",
    "integrability_bound",
    "lower_bound_a",
    "lower_bound_b",
    "theta_bound",
    "upper_bound_b",
    "verify_main_inequality",
    "verify_psd_gram",
    "IncrementTestConfig",
    "RectanglePair",
    "TestOutcome",
    "empirical_covariance",
    "increment_variance",
    "test_increment_stationarity",
    "test_not_fbs",
    "witness_gap",
    "witness_points",
]
