"""lagsem: Laguerre-series approximation of C0-semigroups and resolvents.

The library evaluates the truncated expansions

    T(t) x  ~  sum_{n<=m} A^n (A+1)^{-n-alpha-1} x  L_n^(alpha)(t)

whose coefficients require nothing but shifted resolvent solves of A, together
with the special functions, quadrature oracles, concrete operators and
convergence studies used to validate them.
"""

from .laguerre import (
    GammaRatio,
    LaguerreIndex,
    ell,
    fractional_kernel,
    gamma_ratio,
    laguerre_poly,
    laguerre_poly_sequence,
    phi,
    phi_derivative,
    phi_p_norm,
    phi_sup_norm,
    script_ell,
)
from .operators import (
    BoundInfo,
    DenseOperator,
    DiagonalOperator,
    KernelFamily,
    LinearOperatorHandle,
    SemigroupOracle,
    ShiftOperator,
    convolution_kernel,
    dense_operator,
    expansion_weight_condition,
    expm_oracle,
    kernel_coefficient_a_n,
    kernel_coefficient_profile,
    kernel_fourier_residuals,
    multiplication_operator,
    multiplication_semigroup_oracle,
    read_matrix_file,
    shift_operator,
    shift_semigroup_oracle,
)
from .quadrature import (
    AccuracyError,
    AdaptiveConfig,
    Coefficient,
    QuadratureRule,
    WeightedFunction,
    adaptive_integral,
    coefficient,
    exponential_function,
    gauss_laguerre_rule,
    laguerre_function,
    numeric_convolution,
    numeric_laplace,
    numeric_lp_norm,
    numeric_sup_norm,
    orthonormal_laguerre_function,
    scalar_partial_sum,
    tail_cutoff,
)
from .semigroup import (
    CoefficientSequence,
    ConvergenceRecord,
    DecayReport,
    ShiftedOperator,
    coefficient_decay_check,
    compute_coefficients,
    compute_coefficients_cayley,
    exponentially_bounded_partial_sum,
    fractional_power_series,
    fractional_resolvent_power,
    fractional_resolvent_power_eig,
    partial_sum,
    rate_study,
    resolvent_from_semigroup_expansion,
    resolvent_series,
    vector_norm,
)

__version__ = "0.1.0"
