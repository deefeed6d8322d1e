"""Alternative q-Charlier polynomials, their duals on the q-quadratic
lattice, and the trace-class Jacobi operator whose spectrum is {q**n}."""

from .exceptions import (
    ConvergenceFailure,
    InvalidParameters,
    MatchAmbiguity,
    NonTerminating,
    QCharlierError,
    RangeOverflow,
    TailTooLarge,
)
from .jacobi import (
    DualityMatrix,
    TridiagonalSymmetric,
    beta_coeff,
    beta_vector,
    build_truncated_I1,
    duality_matrix,
    jacobi_coeffs,
    normalization_c,
    normalization_c_n,
    trace_class_check,
)
from .polynomials import (
    alt_q_charlier_lattice,
    alt_q_charlier_recur,
    alt_q_charlier_series,
    dual_function_F,
    dual_poly_lattice,
    dual_poly_qinv,
    dual_poly_recur,
    dual_poly_series,
    duality_residual,
    mu,
    qdiff_residual,
    recurrence_coeffs,
)
from .qcore import (
    QParams,
    SeriesValue,
    phi21_zero_c,
    phi30,
    phi32_zero_params,
    q_exponential_Eq,
    q_pochhammer,
    q_pochhammer_inf,
)
from .spectral import (
    SpectrumReport,
    VerificationReport,
    eigen_sym_tridiag,
    eigvec_vs_beta,
    orthogonality_dual,
    orthogonality_F,
    orthogonality_primal,
    row_col_orthogonality,
    spectrum_report,
)
from .verify import run_identity

__version__ = "0.1.0"
