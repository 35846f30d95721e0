"""Quantum calculus on the p-adic integers.

Locally constant functions on Z_p, their character expansions, the sign
symmetry acting on the dual group, commutator derivatives with exact and
floating-point spectra, smoothness seminorms, and a deterministic
verification harness behind the `pqcalc` command.
"""

from .version import __version__

from .padic_core import (
    Prime,
    PruferElement,
    enumerate_dual,
    legendre_symbol,
    parse_prufer,
    prufer_reduce,
    sgn,
)
from .function_space import (
    FourierSpectrum,
    LocallyConstantFn,
    builtin_function,
    character,
    conditional_expectation,
    fft_radix_p,
    fourier_forward,
    fourier_inverse,
    indicator,
    log_norm,
    random_spectrum,
    random_values,
)
from .operators import (
    DENSE_CAP,
    DerivativeOperator,
    calibrate_kernel_gamma,
    character_derivative,
    derivative_matrix,
    derivative_operator_matrix_free,
    exact_rank,
    hilbert_apply,
    hilbert_kernel_apply,
    hilbert_matrix,
    multiplication_matrix,
    numerical_rank,
)
from .spectral import (
    SingularSpectrum,
    approximation_number,
    operator_norm_power_iteration,
    schatten_norm,
    singular_values,
)
from .seminorms import (
    SeminormReport,
    besov_seminorm_discrete,
    besov_seminorm_integral,
    bmo_oscillation_sequence,
    bmo_seminorm,
    seminorm_report,
    sobolev_half_norm,
)
from .verify import (
    CHECK_NAMES,
    ExperimentConfig,
    VerificationReport,
    markdown_summary,
    run_all,
    suite_json,
)

__all__ = [
    "__version__",
    "Prime",
    "PruferElement",
    "enumerate_dual",
    "legendre_symbol",
    "parse_prufer",
    "prufer_reduce",
    "sgn",
    "FourierSpectrum",
    "LocallyConstantFn",
    "builtin_function",
    "character",
    "conditional_expectation",
    "fft_radix_p",
    "fourier_forward",
    "fourier_inverse",
    "indicator",
    "log_norm",
    "random_spectrum",
    "random_values",
    "DENSE_CAP",
    "DerivativeOperator",
    "calibrate_kernel_gamma",
    "character_derivative",
    "derivative_matrix",
    "derivative_operator_matrix_free",
    "exact_rank",
    "hilbert_apply",
    "hilbert_kernel_apply",
    "hilbert_matrix",
    "multiplication_matrix",
    "numerical_rank",
    "SingularSpectrum",
    "approximation_number",
    "operator_norm_power_iteration",
    "schatten_norm",
    "singular_values",
    "SeminormReport",
    "besov_seminorm_discrete",
    "besov_seminorm_integral",
    "bmo_oscillation_sequence",
    "bmo_seminorm",
    "seminorm_report",
    "sobolev_half_norm",
    "CHECK_NAMES",
    "ExperimentConfig",
    "VerificationReport",
    "markdown_summary",
    "run_all",
    "suite_json",
]
