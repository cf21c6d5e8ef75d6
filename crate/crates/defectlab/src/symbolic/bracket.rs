//! Exact Poisson brackets of jet expressions under the equal-time and
//! equal-space rule tables, extended by bilinearity and Leibniz.

use super::expr::{Field, JetVar, SymExpr};
use super::gauss::GaussRat;
use super::matrix::SymMatrix;
use std::ops::Neg;
use thiserror::Error;

/// Which canonical rule table a bracket uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketRules {
    /// Equal-time: `{q(x), q*(y)} = -i delta(x-y)`, everything else zero.
    Space,
    /// Equal-space: `{q(t), q*_x(tau)} = -delta(t-tau)`,
    /// `{q_x(t), q*(tau)} = +delta(t-tau)`, everything else zero.
    Time,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BracketError {
    #[error("bracket rule table has no entry for {0} vs {1} (non-canonical jet variable)")]
    MissingRule(String, String),
}

fn is_canonical(rules: BracketRules, v: JetVar) -> bool {
    match rules {
        BracketRules::Space => v.dx == 0 && v.dt == 0,
        BracketRules::Time => v.dx <= 1 && v.dt == 0,
    }
}

/// Base bracket of two jet variables; the result carries one delta marker.
/// Tilde fields bracket like untilded ones within their own pair and commute
/// with the other pair (independent canonical sets).
fn base_bracket(rules: BracketRules, a: JetVar, b: JetVar) -> Result<SymExpr, BracketError> {
    if !is_canonical(rules, a) || !is_canonical(rules, b) {
        return Err(BracketError::MissingRule(a.to_string(), b.to_string()));
    }
    let tilde = |f: Field| matches!(f, Field::QTilde | Field::QTildeStar);
    if tilde(a.field) != tilde(b.field) {
        return Ok(SymExpr::zero());
    }
    let star = |f: Field| matches!(f, Field::QStar | Field::QTildeStar);
    let coeff = match rules {
        BracketRules::Space => {
            // {q, q*} = -i, {q*, q} = +i
            match (star(a.field), star(b.field)) {
                (false, true) => GaussRat::i().neg(),
                (true, false) => GaussRat::i(),
                _ => return Ok(SymExpr::zero()),
            }
        }
        BracketRules::Time => {
            // pairs: {q, q*_x} = -1, {q_x, q*} = +1 (with antisymmetric images)
            match (star(a.field), a.dx, star(b.field), b.dx) {
                (false, 0, true, 1) => GaussRat::from_int(-1), // {q, q*_x}
                (true, 1, false, 0) => GaussRat::from_int(1),  // {q*_x, q}
                (false, 1, true, 0) => GaussRat::from_int(1),  // {q_x, q*}
                (true, 0, false, 1) => GaussRat::from_int(-1), // {q*, q_x}
                _ => return Ok(SymExpr::zero()),
            }
        }
    };
    Ok(SymExpr::delta().scale(&coeff))
}

/// Poisson bracket of two scalar expressions, `a` at tag 1 and `b` at tag 2,
/// extended over products by the Leibniz rule. The delta identifies the two
/// evaluation points, so all tags merge to 0 in the result.
pub fn bracket_expr(
    rules: BracketRules,
    a: &SymExpr,
    b: &SymExpr,
) -> Result<SymExpr, BracketError> {
    let mut out = SymExpr::zero();
    for va in a.variables() {
        let da = a.partial(va);
        if da.is_zero() {
            continue;
        }
        for vb in b.variables() {
            let db = b.partial(vb);
            if db.is_zero() {
                continue;
            }
            let base = base_bracket(rules, va, vb)?;
            if base.is_zero() {
                continue;
            }
            out = out.add(&da.mul(&db).mul(&base));
        }
    }
    Ok(out.map_tags(|_| 0))
}

/// Matrix Poisson bracket `{A_1, B_2}` on the tensor square:
/// entry `[(i,k),(j,l)] = {A[i,j], B[k,l]}`. `a` must use tag-1 jets and `b`
/// tag-2 jets.
pub fn sym_bracket(
    rules: BracketRules,
    a: &SymMatrix,
    b: &SymMatrix,
) -> Result<SymMatrix, BracketError> {
    assert_eq!(a.n, 2);
    assert_eq!(b.n, 2);
    let mut out = SymMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    *out.at_mut(2 * i + k, 2 * j + l) =
                        bracket_expr(rules, a.at(i, j), b.at(k, l))?;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::matrix::{u_matrix, Spectral};

    fn v(field: Field, dx: u8, tag: u8) -> SymExpr {
        SymExpr::var(JetVar::new(field, dx, 0, tag))
    }

    #[test]
    fn time_rule_q_qstarx() {
        let b = bracket_expr(
            BracketRules::Time,
            &v(Field::Q, 0, 1),
            &v(Field::QStar, 1, 2),
        )
        .unwrap();
        assert_eq!(b, SymExpr::delta().neg());
    }

    #[test]
    fn leibniz_on_square() {
        // {q^2, q*_x}_T = -2 q delta
        let q1 = v(Field::Q, 0, 1);
        let b = bracket_expr(BracketRules::Time, &q1.mul(&q1), &v(Field::QStar, 1, 2)).unwrap();
        let expect = SymExpr::field(Field::Q)
            .mul(&SymExpr::delta())
            .scale(&GaussRat::from_int(-2));
        assert_eq!(b, expect);
    }

    #[test]
    fn non_canonical_variable_errors() {
        let qxx = v(Field::Q, 2, 1);
        let err = bracket_expr(BracketRules::Time, &qxx, &v(Field::QStar, 0, 2));
        assert!(err.is_err());
    }

    #[test]
    fn ultralocal_u_bracket_support() {
        // {U_1, U_2}_S lands on sigma+ (x) sigma- and sigma- (x) sigma+ only:
        // two nonzero entries of the 4x4, one term each.
        for eps in [1i8, -1] {
            let u1 = u_matrix(eps, Spectral::Lambda, 1);
            let u2 = u_matrix(eps, Spectral::Mu, 2);
            let br = sym_bracket(BracketRules::Space, &u1, &u2).unwrap();
            assert_eq!(br.nonzero_entries(), 2);
            assert!(!br.at(1, 2).is_zero());
            assert!(!br.at(2, 1).is_zero());
        }
    }
}
