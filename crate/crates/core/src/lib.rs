//! Arithmetic of the nine imaginary quadratic fields of class number one,
//! quadratic residue symbols and Gauss sums over them, and a numerical
//! harness for family moments of quadratic Hecke L-functions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod euler;
pub mod field;
pub mod gauss;
pub mod hecke;
pub mod ideal;
pub mod moment;
pub mod primary;
pub mod rational;
pub mod report;
pub mod special;
pub mod symbol;

pub use error::{Error, Result};
pub use field::{field_params, FieldId, FieldParams, QuadInt, QuadRat, TwoSplitting};
pub use ideal::{
    factor_element, ideal_gcd, ideal_of, prime_ideal_factorization, is_squarefree, principal_generator, residue_system, split_prime,
    ElemFactorization, IdealMatrix, PrimeElem, PrimeIdeal,
};
pub use primary::{is_primary, primary_normalize, primary_set, PrimarySet};
pub use symbol::{chi_eval, conductor_char, symbol, symbol_fast, symbol_mod_prime, ChiKind, SymbolValue};
pub use gauss::{additive_char, gauss_sum_bruteforce, gauss_sum_closed, root_number_check, Character, ComplexVal};
pub use special::{dedekind_zeta, dirichlet_l_rational, gamma_fn, hurwitz_zeta, mellin_weight, residue_rk, WeightKind, WeightSpec};
pub use hecke::{coeff_table, fe_residual, l_derivative, l_value, theta_value, CoeffTable, LFunction, LValue};
pub use euler::{a_factor, euler_p1, euler_p2, prime_log_sum, zeta_k2_logderiv, EulerValue, PrimeNormStream};
pub use moment::{
    central_value_poly, enumerate_c, error_exponent, family_sum, fit_exponent, main_terms, main_terms_logderiv_via_ratios, run, sweep, Budgets, CentralPoly, Mode,
    MomentReport, MomentRequest, SweepRow,
};
pub use report::{emit_csv, emit_report, parse_config, parse_csv, parse_report_json, Format, ModeKind, RunConfig};
