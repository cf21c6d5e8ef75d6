//! Exact verification of the algebraic backbone: the ultralocal relation for
//! U, the equal-space relation for V, the constant-matrix identities used in
//! its proof, and the zero-curvature reduction. All checks are exact (no
//! tolerances); a failed check returns the nonzero residual verbatim.

use super::bracket::{sym_bracket, BracketRules};
use super::expr::{Field, JetVar, SymExpr};
use super::gauss::GaussRat;
use super::matrix::{
    permutation, sigma3, sigma_minus, sigma_plus, tensor, u_matrix, v_matrix, w_matrix,
    Spectral, SymMatrix,
};
use serde::Serialize;

/// Outcome of one exact identity check.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyResult {
    pub identity: String,
    pub epsilon: i8,
    pub pass: bool,
    pub residual_terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl VerifyResult {
    fn from_matrix(name: &str, eps: i8, residual: &SymMatrix) -> Self {
        let pass = residual.is_zero();
        VerifyResult {
            identity: name.to_string(),
            epsilon: eps,
            pass,
            residual_terms: residual.num_terms(),
            residual: if pass {
                None
            } else {
                Some(format_matrix(residual))
            },
        }
    }
}

fn format_matrix(m: &SymMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.n {
        for j in 0..m.n {
            if !m.at(i, j).is_zero() {
                s.push_str(&format!("[{},{}]: {}; ", i, j, m.at(i, j)));
            }
        }
    }
    s
}

/// `[P, A_1 + A_2]` commutator helper against the permutation operator.
fn p_commutator(a_lambda: &SymMatrix, a_mu: &SymMatrix) -> SymMatrix {
    let id = SymMatrix::identity(2);
    let sum = tensor(a_lambda, &id).add(&tensor(&id, a_mu));
    permutation().commutator(&sum)
}

/// Ultralocal relation: `{U_1(x,l), U_2(y,m)}_S = delta [r(l-m), U_1 + U_2]`
/// with `r(l) = -eps P / (2 l)`. Verified after clearing the `(l-m)`
/// denominator:
/// `(l-m) {U_1,U_2}_S + (eps/2) delta [P, U_1+U_2] = 0`.
pub fn verify_ultralocal_u(eps: i8) -> VerifyResult {
    let u1 = u_matrix(eps, Spectral::Lambda, 1);
    let u2 = u_matrix(eps, Spectral::Mu, 2);
    let lhs = sym_bracket(BracketRules::Space, &u1, &u2).expect("U entries are canonical");
    let lm = SymExpr::lambda(1).sub(&SymExpr::mu(1));
    let cleared = lhs.scale(&lm);

    let u1m = u_matrix(eps, Spectral::Lambda, 0);
    let u2m = u_matrix(eps, Spectral::Mu, 0);
    // (l-m) delta [r, U1+U2] = (-eps/2) delta [P, U1+U2]
    let rhs = p_commutator(&u1m, &u2m)
        .scale(&SymExpr::delta().scale(&GaussRat::ratio(-(eps as i64), 2)));
    let residual = cleared.sub(&rhs);
    VerifyResult::from_matrix("ultralocal_U", eps, &residual)
}

/// Equal-space relation: `{V_1(t,l), V_2(tau,m)}_T = -delta [r(l-m), V_1 + V_2]`,
/// same r-matrix. Cleared form:
/// `(l-m) {V_1,V_2}_T - (eps/2) delta [P, V_1+V_2] = 0`.
pub fn verify_proposition_1(eps: i8) -> VerifyResult {
    let v1 = v_matrix(eps, Spectral::Lambda, 1);
    let v2 = v_matrix(eps, Spectral::Mu, 2);
    let lhs = sym_bracket(BracketRules::Time, &v1, &v2).expect("V entries are canonical");
    let lm = SymExpr::lambda(1).sub(&SymExpr::mu(1));
    let cleared = lhs.scale(&lm);

    let v1m = v_matrix(eps, Spectral::Lambda, 0);
    let v2m = v_matrix(eps, Spectral::Mu, 0);
    // -delta [r, V1+V2] * (l-m) = -delta * (-eps/2) [P, V1+V2] = (eps/2) delta [P, V1+V2]
    let rhs = p_commutator(&v1m, &v2m)
        .scale(&SymExpr::delta().scale(&GaussRat::ratio(eps as i64, 2)));
    let residual = cleared.sub(&rhs);
    VerifyResult::from_matrix("proposition_1", eps, &residual)
}

/// Intermediate identity from the proof:
/// `{V_1(t,l), V_2(tau,m)}_T = eps delta [ 2i(l+m)(s+ (x) s- - s- (x) s+)
///                                         + (1 (x) W - W (x) 1)(s3 (x) s3) ]`.
pub fn verify_proposition_1_intermediate(eps: i8) -> VerifyResult {
    let v1 = v_matrix(eps, Spectral::Lambda, 1);
    let v2 = v_matrix(eps, Spectral::Mu, 2);
    let lhs = sym_bracket(BracketRules::Time, &v1, &v2).expect("V entries are canonical");

    let id = SymMatrix::identity(2);
    let w = w_matrix(eps, 0);
    let pm = tensor(&sigma_plus(), &sigma_minus()).sub(&tensor(&sigma_minus(), &sigma_plus()));
    let lpm = SymExpr::lambda(1).add(&SymExpr::mu(1));
    let term1 = pm.scale(&SymExpr::i().scale(&GaussRat::from_int(2)).mul(&lpm));
    let term2 = tensor(&id, &w)
        .sub(&tensor(&w, &id))
        .mul(&tensor(&sigma3(), &sigma3()));
    let rhs = term1
        .add(&term2)
        .scale(&SymExpr::delta().scale(&GaussRat::from_int(eps as i64)));
    let residual = lhs.sub(&rhs);
    VerifyResult::from_matrix("proposition_1_intermediate", eps, &residual)
}

/// Constant-matrix identities used in the proof:
/// `(s3 (x) 1 - 1 (x) s3) P = 2 (s+ (x) s- - s- (x) s+)` and
/// `(1 (x) W - W (x) 1) P = (1 (x) W - W (x) 1)(s3 (x) s3)`, plus `P^2 = 1`.
pub fn verify_proof_identities(eps: i8) -> Vec<VerifyResult> {
    let id = SymMatrix::identity(2);
    let p = permutation();

    let lhs1 = tensor(&sigma3(), &id).sub(&tensor(&id, &sigma3())).mul(&p);
    let rhs1 = tensor(&sigma_plus(), &sigma_minus())
        .sub(&tensor(&sigma_minus(), &sigma_plus()))
        .scale(&SymExpr::constant(GaussRat::from_int(2)));
    let r1 = lhs1.sub(&rhs1);

    let w = w_matrix(eps, 0);
    let asym = tensor(&id, &w).sub(&tensor(&w, &id));
    let r2 = asym.mul(&p).sub(&asym.mul(&tensor(&sigma3(), &sigma3())));

    let r3 = p.mul(&p).sub(&SymMatrix::identity(4));

    vec![
        VerifyResult::from_matrix("proof_identity_sigma3_P", eps, &r1),
        VerifyResult::from_matrix("proof_identity_W_P", eps, &r2),
        VerifyResult::from_matrix("proof_identity_P_squared", eps, &r3),
    ]
}

/// NLS right-hand sides for the jet substitution
/// `q_t -> i q_xx - 2 i eps q^2 q*` and its conjugate.
fn nls_substitutions(eps: i8) -> [(JetVar, SymExpr); 2] {
    let e = GaussRat::from_int(eps as i64);
    let q = SymExpr::field(Field::Q);
    let qs = SymExpr::field(Field::QStar);
    let qxx = SymExpr::var(JetVar::new(Field::Q, 2, 0, 0));
    let qsxx = SymExpr::var(JetVar::new(Field::QStar, 2, 0, 0));
    let i = SymExpr::i();
    let two = GaussRat::from_int(2);

    let qt_rhs = i
        .mul(&qxx)
        .sub(&i.mul(&q).mul(&q).mul(&qs).scale(&two).scale(&e));
    let qst_rhs = i
        .mul(&qsxx)
        .neg()
        .add(&i.mul(&q).mul(&qs).mul(&qs).scale(&two).scale(&e));
    [
        (JetVar::new(Field::Q, 0, 1, 0), qt_rhs),
        (JetVar::new(Field::QStar, 0, 1, 0), qst_rhs),
    ]
}

/// Zero curvature: `U_t - V_x + [U, V]` reduces to the zero matrix exactly
/// once the NLS jet substitution is applied.
pub fn zero_curvature_symbolic(eps: i8) -> VerifyResult {
    let residual = zero_curvature_matrix(eps, true);
    VerifyResult::from_matrix("zero_curvature", eps, &residual)
}

/// The raw matrix `U_t - V_x + [U, V]`, optionally after NLS substitution.
pub fn zero_curvature_matrix(eps: i8, substitute_nls: bool) -> SymMatrix {
    let u = u_matrix(eps, Spectral::Lambda, 0);
    let v = v_matrix(eps, Spectral::Lambda, 0);
    let mut m = u.dt().sub(&v.dx()).add(&u.commutator(&v));
    if substitute_nls {
        for (var, rhs) in nls_substitutions(eps) {
            m = m.map(|e| e.substitute(var, &rhs));
        }
    }
    m
}

/// Mutation tests: three injected sign faults, each expected to break an
/// identity (nonzero residual). Returns results with `pass = true` when the
/// residual is nonzero as expected.
pub fn mutation_tests(eps: i8) -> Vec<VerifyResult> {
    let mut out = Vec::new();

    // 1. flip the sign of U^{21} (eps q* -> -eps q*): bracket relation must fail
    let mut u1 = u_matrix(eps, Spectral::Lambda, 1);
    *u1.at_mut(1, 0) = u1.at(1, 0).neg();
    let mut u1m = u_matrix(eps, Spectral::Lambda, 0);
    *u1m.at_mut(1, 0) = u1m.at(1, 0).neg();
    let u2 = u_matrix(eps, Spectral::Mu, 2);
    let u2m = u_matrix(eps, Spectral::Mu, 0);
    let lhs = sym_bracket(BracketRules::Space, &u1, &u2).unwrap();
    let lm = SymExpr::lambda(1).sub(&SymExpr::mu(1));
    let residual = lhs.scale(&lm).sub(
        &p_commutator(&u1m, &u2m).scale(&SymExpr::delta().scale(&GaussRat::ratio(-(eps as i64), 2))),
    );
    out.push(VerifyResult {
        identity: "mutation_flip_sign_U21".into(),
        epsilon: eps,
        pass: !residual.is_zero(),
        residual_terms: residual.num_terms(),
        residual: None,
    });

    // 2. flip the sign of the W^2 (|q|^2) term in V: proposition 1 must fail
    let mut v1 = v_matrix(eps, Spectral::Lambda, 1);
    flip_modulus_term(&mut v1, eps, 1);
    let mut v1m = v_matrix(eps, Spectral::Lambda, 0);
    flip_modulus_term(&mut v1m, eps, 0);
    let v2 = v_matrix(eps, Spectral::Mu, 2);
    let v2m = v_matrix(eps, Spectral::Mu, 0);
    let lhs = sym_bracket(BracketRules::Time, &v1, &v2).unwrap();
    let residual = lhs.scale(&lm).sub(
        &p_commutator(&v1m, &v2m).scale(&SymExpr::delta().scale(&GaussRat::ratio(eps as i64, 2))),
    );
    out.push(VerifyResult {
        identity: "mutation_flip_W2_in_V".into(),
        epsilon: eps,
        pass: !residual.is_zero(),
        residual_terms: residual.num_terms(),
        residual: None,
    });

    // 3. flip the sign of the i q_x part of V^{12}: zero curvature must fail
    let u = u_matrix(eps, Spectral::Lambda, 0);
    let mut v = v_matrix(eps, Spectral::Lambda, 0);
    let qx = SymExpr::var(JetVar::new(Field::Q, 1, 0, 0));
    *v.at_mut(0, 1) = SymExpr::lambda(1)
        .mul(&SymExpr::field(Field::Q))
        .scale(&GaussRat::from_int(2))
        .sub(&SymExpr::i().mul(&qx));
    let mut m = u.dt().sub(&v.dx()).add(&u.commutator(&v));
    for (var, rhs) in nls_substitutions(eps) {
        m = m.map(|e| e.substitute(var, &rhs));
    }
    out.push(VerifyResult {
        identity: "mutation_flip_iqx_in_V12".into(),
        epsilon: eps,
        pass: !m.is_zero(),
        residual_terms: m.num_terms(),
        residual: None,
    });

    out
}

fn flip_modulus_term(v: &mut SymMatrix, eps: i8, tag: u8) {
    // V^{11} = -2i l^2 - i eps |q|^2  ->  -2i l^2 + i eps |q|^2 (and V^{22} = -V^{11})
    let e = GaussRat::from_int(eps as i64);
    let qq = SymExpr::var(JetVar::new(Field::Q, 0, 0, tag))
        .mul(&SymExpr::var(JetVar::new(Field::QStar, 0, 0, tag)));
    let diag = SymExpr::i()
        .mul(&SymExpr::lambda(2))
        .scale(&GaussRat::from_int(2))
        .sub(&SymExpr::i().mul(&qq).scale(&e));
    *v.at_mut(0, 0) = diag.neg();
    *v.at_mut(1, 1) = diag;
}

/// Run the full verification battery for both signs of epsilon.
pub fn verify_all() -> Vec<VerifyResult> {
    let mut results = Vec::new();
    for eps in [1i8, -1] {
        results.push(verify_ultralocal_u(eps));
        results.push(verify_proposition_1(eps));
        results.push(verify_proposition_1_intermediate(eps));
        results.extend(verify_proof_identities(eps));
        results.push(zero_curvature_symbolic(eps));
        results.extend(mutation_tests(eps));
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ultralocal_holds_both_signs() {
        for eps in [1i8, -1] {
            let r = verify_ultralocal_u(eps);
            assert!(r.pass, "eps={}: residual {:?}", eps, r.residual);
        }
    }

    #[test]
    fn proposition_1_holds_both_signs() {
        for eps in [1i8, -1] {
            let r = verify_proposition_1(eps);
            assert!(r.pass, "eps={}: residual {:?}", eps, r.residual);
            let ri = verify_proposition_1_intermediate(eps);
            assert!(ri.pass, "intermediate eps={}: {:?}", eps, ri.residual);
        }
    }

    #[test]
    fn proof_identities_hold() {
        for eps in [1i8, -1] {
            for r in verify_proof_identities(eps) {
                assert!(r.pass, "{} eps={}: {:?}", r.identity, eps, r.residual);
            }
        }
    }

    #[test]
    fn zero_curvature_reduces_to_zero() {
        for eps in [1i8, -1] {
            let r = zero_curvature_symbolic(eps);
            assert!(r.pass, "eps={}: residual {:?}", eps, r.residual);
        }
    }

    #[test]
    fn unsubstituted_residual_is_off_diagonal_nls() {
        // Without the substitution the residual off-diagonals are
        // proportional to the NLS expression and its conjugate:
        // entry (0,1) = -i (i q_t + q_xx - 2 eps q^2 q*).
        for eps in [1i8, -1] {
            let m = zero_curvature_matrix(eps, false);
            assert!(m.at(0, 0).is_zero());
            assert!(m.at(1, 1).is_zero());
            let q = SymExpr::field(Field::Q);
            let qs = SymExpr::field(Field::QStar);
            let nls = SymExpr::i()
                .mul(&SymExpr::var(JetVar::new(Field::Q, 0, 1, 0)))
                .add(&SymExpr::var(JetVar::new(Field::Q, 2, 0, 0)))
                .sub(
                    &q.mul(&q)
                        .mul(&qs)
                        .scale(&GaussRat::from_int(2 * eps as i64)),
                );
            let expect01 = SymExpr::i().neg().mul(&nls);
            assert_eq!(m.at(0, 1), &expect01);
        }
    }

    #[test]
    fn mutations_produce_nonzero_residuals() {
        for eps in [1i8, -1] {
            for r in mutation_tests(eps) {
                assert!(r.pass, "mutation {} should break the identity", r.identity);
            }
        }
    }
}
