//! Exact symbolic engine: differential polynomials in field jets over
//! Gaussian rationals, 2x2/4x4 matrices over them, the two canonical bracket
//! rule tables, and the identity verifications they feed.

pub mod bracket;
pub mod expr;
pub mod gauss;
pub mod matrix;
pub mod verify;

pub use bracket::{bracket_expr, sym_bracket, BracketError, BracketRules};
pub use expr::{Field, JetVar, Monomial, SymExpr, TermKey};
pub use gauss::GaussRat;
pub use matrix::{
    permutation, sigma3, sigma_minus, sigma_plus, tensor, u_matrix, v_matrix, w_matrix,
    Spectral, SymMatrix,
};
pub use verify::{
    mutation_tests, verify_all, verify_proof_identities, verify_proposition_1,
    verify_proposition_1_intermediate, verify_ultralocal_u, zero_curvature_matrix,
    zero_curvature_symbolic, VerifyResult,
};
