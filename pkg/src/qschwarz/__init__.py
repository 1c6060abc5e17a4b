"""Truncated q-expansion engine for a family of meromorphic weight-2 forms.

The package solves the residue-vanishing system that places the poles of
the form f_n = eta^4 / prod_i (J - x_i)^2 on the J-arc, expands the forms
as exact or big-float q-series, and verifies the normalized Schwarzian
and second-order theta-ODE identities coefficient-by-coefficient, plus an
independent pointwise layer: contour residues at the poles, weight-2
transformation laws, periods and the triangular representation attached
to the primitive of f_n.
"""

from .series import (CoeffMode, EXACT, FLOAT64, EvalResult, GridMismatchError,
                     InversionError, LaurentSeries, ModeMismatchError,
                     PrimitiveError, SeriesError, TailBoundError, float_mode,
                     load_series)
from .forms import (EtaQuotientSpec, FormSpec, GEN_S, GEN_T, UnimodularMatrix,
                    character_chi, delta_series, eisenstein_series, eta_eval,
                    eta_multiplier, eta_multiplier_index, eta_quotient_series,
                    eta_series, j_series, ode_solution_series, random_words,
                    reduce_to_fundamental, theta_j_series, transform_check,
                    weight2_form_series, word_matrix)
from .system import (ResidueSystem, SolutionVector, SolveError,
                     certify_polynomial, compare_with_reported, jacobian,
                     polynomial_from_roots, rationalize_coefficients, refine,
                     residual, solve)
from .schwarz import (SchwarzTarget, frobenius_leading_check, recommended_bits,
                      schwarzian_normalized, verify_ode, verify_schwarzian)
from .analytic import (ArcPoint, FormEvaluator, PathError, QuadratureError,
                       RhoMatrix, antiderivative_value, contour_residue,
                       equivariance_check, integrate_polyline, invert_j_on_arc,
                       laurent_tail_coefficient, period_omega, pole_order_check,
                       predicted_residue, residue_bracket, rho_homomorphism_check,
                       rho_matrix, safe_polyline)
from .reporting import VerificationReport

__version__ = "0.1.0"

__all__ = [
    "ArcPoint", "CoeffMode", "EXACT", "EtaQuotientSpec", "EvalResult",
    "FLOAT64", "FormEvaluator", "FormSpec", "GEN_S", "GEN_T",
    "GridMismatchError", "InversionError", "LaurentSeries",
    "ModeMismatchError", "PathError", "PrimitiveError", "QuadratureError",
    "ResidueSystem", "RhoMatrix", "SchwarzTarget", "SeriesError",
    "SolutionVector", "SolveError", "TailBoundError", "UnimodularMatrix",
    "VerificationReport", "antiderivative_value", "certify_polynomial",
    "character_chi", "compare_with_reported", "contour_residue",
    "delta_series", "eisenstein_series", "equivariance_check", "eta_eval",
    "eta_multiplier", "eta_multiplier_index", "eta_quotient_series",
    "eta_series", "float_mode", "frobenius_leading_check",
    "integrate_polyline", "invert_j_on_arc", "j_series", "jacobian",
    "laurent_tail_coefficient", "load_series", "ode_solution_series",
    "period_omega", "pole_order_check", "polynomial_from_roots",
    "predicted_residue", "random_words", "rationalize_coefficients",
    "recommended_bits", "reduce_to_fundamental", "refine", "residual",
    "residue_bracket", "rho_homomorphism_check", "rho_matrix",
    "safe_polyline", "schwarzian_normalized", "solve", "theta_j_series",
    "transform_check", "verify_ode", "verify_schwarzian",
    "weight2_form_series", "word_matrix",
]
