//! Differential polynomials in field jets with exact coefficients.
//!
//! A term is a Gaussian-rational coefficient times powers of the spectral
//! symbols `lambda`, `mu`, an inert delta marker, and a monomial in jet
//! variables. Canonical form is a sorted map from term keys to coefficients
//! with zero terms pruned, so equality of expressions is equality of maps.

use super::gauss::GaussRat;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Which field a jet variable refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Q,
    QStar,
    QTilde,
    QTildeStar,
}

impl Field {
    pub fn conjugate(self) -> Field {
        match self {
            Field::Q => Field::QStar,
            Field::QStar => Field::Q,
            Field::QTilde => Field::QTildeStar,
            Field::QTildeStar => Field::QTilde,
        }
    }
}

/// `d^a/dx^a d^b/dt^b` of a field, at evaluation point `tag`.
///
/// The tag marks which tensor factor of a two-point bracket the variable
/// belongs to; brackets merge tags once the delta identifies the points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub field: Field,
    pub dx: u8,
    pub dt: u8,
    pub tag: u8,
}

impl JetVar {
    pub fn new(field: Field, dx: u8, dt: u8, tag: u8) -> Self {
        JetVar { field, dx, dt, tag }
    }

    pub fn base(field: Field) -> Self {
        JetVar::new(field, 0, 0, 0)
    }

    fn d_dx(self) -> Self {
        JetVar { dx: self.dx + 1, ..self }
    }

    fn d_dt(self) -> Self {
        JetVar { dt: self.dt + 1, ..self }
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.field {
            Field::Q => "q",
            Field::QStar => "q*",
            Field::QTilde => "q~",
            Field::QTildeStar => "q~*",
        };
        write!(f, "{}", name)?;
        for _ in 0..self.dx {
            write!(f, "_x")?;
        }
        for _ in 0..self.dt {
            write!(f, "_t")?;
        }
        if self.tag != 0 {
            write!(f, "@{}", self.tag)?;
        }
        Ok(())
    }
}

/// A multiset of jet variables in canonical (sorted) order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Monomial(pub Vec<(JetVar, u8)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: JetVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<JetVar, u8> = BTreeMap::new();
        for &(v, p) in self.0.iter().chain(other.0.iter()) {
            *map.entry(v).or_insert(0) += p;
        }
        Monomial(map.into_iter().collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, p)| p as u32).sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, p)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", v)?;
            if *p > 1 {
                write!(f, "^{}", p)?;
            }
        }
        Ok(())
    }
}

/// Term key: monomial plus powers of the inert symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TermKey {
    pub monomial: Monomial,
    pub lambda_pow: i8,
    pub mu_pow: i8,
    pub delta_pow: u8,
}

impl TermKey {
    fn unit() -> Self {
        TermKey {
            monomial: Monomial::one(),
            lambda_pow: 0,
            mu_pow: 0,
            delta_pow: 0,
        }
    }
}

/// Exact differential polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymExpr {
    pub terms: BTreeMap<TermKey, GaussRat>,
}

impl SymExpr {
    pub fn zero() -> Self {
        SymExpr::default()
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut e = SymExpr::zero();
        if !c.is_zero() {
            e.terms.insert(TermKey::unit(), c);
        }
        e
    }

    pub fn one() -> Self {
        SymExpr::constant(GaussRat::one())
    }

    pub fn i() -> Self {
        SymExpr::constant(GaussRat::i())
    }

    pub fn var(v: JetVar) -> Self {
        let mut e = SymExpr::zero();
        e.terms.insert(
            TermKey {
                monomial: Monomial::var(v),
                lambda_pow: 0,
                mu_pow: 0,
                delta_pow: 0,
            },
            GaussRat::one(),
        );
        e
    }

    pub fn field(f: Field) -> Self {
        SymExpr::var(JetVar::base(f))
    }

    /// `lambda^p` as an expression.
    pub fn lambda(p: i8) -> Self {
        let mut e = SymExpr::zero();
        e.terms.insert(
            TermKey {
                monomial: Monomial::one(),
                lambda_pow: p,
                mu_pow: 0,
                delta_pow: 0,
            },
            GaussRat::one(),
        );
        e
    }

    pub fn mu(p: i8) -> Self {
        let mut e = SymExpr::zero();
        e.terms.insert(
            TermKey {
                monomial: Monomial::one(),
                lambda_pow: 0,
                mu_pow: p,
                delta_pow: 0,
            },
            GaussRat::one(),
        );
        e
    }

    pub fn delta() -> Self {
        let mut e = SymExpr::zero();
        e.terms.insert(
            TermKey {
                monomial: Monomial::one(),
                lambda_pow: 0,
                mu_pow: 0,
                delta_pow: 1,
            },
            GaussRat::one(),
        );
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, key: TermKey, coeff: GaussRat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            Some(old) => {
                let s = old + coeff;
                if !s.is_zero() {
                    self.terms.insert(key, s);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn add(&self, other: &SymExpr) -> SymExpr {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SymExpr) -> SymExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymExpr {
        let mut out = SymExpr::zero();
        for (k, c) in &self.terms {
            out.terms.insert(k.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &GaussRat) -> SymExpr {
        let mut out = SymExpr::zero();
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &SymExpr) -> SymExpr {
        let mut out = SymExpr::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = TermKey {
                    monomial: ka.monomial.mul(&kb.monomial),
                    lambda_pow: ka.lambda_pow + kb.lambda_pow,
                    mu_pow: ka.mu_pow + kb.mu_pow,
                    delta_pow: ka.delta_pow + kb.delta_pow,
                };
                out.insert(key, ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Total x-derivative (Leibniz over jet variables; inert symbols are constants).
    pub fn dx(&self) -> SymExpr {
        self.derive(|v| v.d_dx())
    }

    /// Total t-derivative.
    pub fn dt(&self) -> SymExpr {
        self.derive(|v| v.d_dt())
    }

    fn derive(&self, bump: impl Fn(JetVar) -> JetVar) -> SymExpr {
        let mut out = SymExpr::zero();
        for (k, c) in &self.terms {
            for (idx, &(v, p)) in k.monomial.0.iter().enumerate() {
                // d/dx of v^p -> p * v^(p-1) * v'
                let mut vars = k.monomial.0.clone();
                if p == 1 {
                    vars.remove(idx);
                } else {
                    vars[idx].1 = p - 1;
                }
                let rest = Monomial(vars);
                let new_mon = rest.mul(&Monomial::var(bump(v)));
                let key = TermKey {
                    monomial: new_mon,
                    lambda_pow: k.lambda_pow,
                    mu_pow: k.mu_pow,
                    delta_pow: k.delta_pow,
                };
                out.insert(key, c.clone() * GaussRat::from_int(p as i64));
            }
        }
        out
    }

    /// Partial derivative with respect to one jet variable.
    pub fn partial(&self, v: JetVar) -> SymExpr {
        let mut out = SymExpr::zero();
        for (k, c) in &self.terms {
            for (idx, &(w, p)) in k.monomial.0.iter().enumerate() {
                if w != v {
                    continue;
                }
                let mut vars = k.monomial.0.clone();
                if p == 1 {
                    vars.remove(idx);
                } else {
                    vars[idx].1 = p - 1;
                }
                let key = TermKey {
                    monomial: Monomial(vars),
                    lambda_pow: k.lambda_pow,
                    mu_pow: k.mu_pow,
                    delta_pow: k.delta_pow,
                };
                out.insert(key, c.clone() * GaussRat::from_int(p as i64));
            }
        }
        out
    }

    /// All distinct jet variables appearing in the expression.
    pub fn variables(&self) -> Vec<JetVar> {
        let mut vs: Vec<JetVar> = Vec::new();
        for k in self.terms.keys() {
            for &(v, _) in &k.monomial.0 {
                if !vs.contains(&v) {
                    vs.push(v);
                }
            }
        }
        vs
    }

    /// Substitute an expression for every occurrence of a jet variable.
    pub fn substitute(&self, target: JetVar, replacement: &SymExpr) -> SymExpr {
        let mut out = SymExpr::zero();
        for (k, c) in &self.terms {
            let mut base = SymExpr::zero();
            base.terms.insert(
                TermKey {
                    monomial: Monomial::one(),
                    lambda_pow: k.lambda_pow,
                    mu_pow: k.mu_pow,
                    delta_pow: k.delta_pow,
                },
                c.clone(),
            );
            let mut acc = base;
            for &(v, p) in &k.monomial.0 {
                let factor = if v == target {
                    replacement.clone()
                } else {
                    SymExpr::var(v)
                };
                for _ in 0..p {
                    acc = acc.mul(&factor);
                }
            }
            out = out.add(&acc);
        }
        out
    }

    /// Remap evaluation-point tags (used to merge coincident points after a bracket).
    pub fn map_tags(&self, f: impl Fn(u8) -> u8) -> SymExpr {
        let mut out = SymExpr::zero();
        for (k, c) in &self.terms {
            let mon = Monomial(
                k.monomial
                    .0
                    .iter()
                    .map(|&(v, p)| (JetVar { tag: f(v.tag), ..v }, p))
                    .collect::<BTreeMap<_, _>>()
                    .into_iter()
                    .collect(),
            );
            // re-merge powers of identical vars after tag collapse
            let mut map: BTreeMap<JetVar, u8> = BTreeMap::new();
            for (v, p) in mon.0 {
                *map.entry(v).or_insert(0) += p;
            }
            let key = TermKey {
                monomial: Monomial(map.into_iter().collect()),
                lambda_pow: k.lambda_pow,
                mu_pow: k.mu_pow,
                delta_pow: k.delta_pow,
            };
            out.insert(key, c.clone());
        }
        out
    }

    /// Numeric evaluation. `jet` supplies jet-variable values; `lambda`, `mu`,
    /// `delta` supply the inert symbols.
    pub fn eval(
        &self,
        jet: &impl Fn(JetVar) -> Complex64,
        lambda: Complex64,
        mu: Complex64,
        delta: Complex64,
    ) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mut term = Complex64::new(
                rational_to_f64(&c.re),
                rational_to_f64(&c.im),
            );
            term *= lambda.powi(k.lambda_pow as i32);
            term *= mu.powi(k.mu_pow as i32);
            term *= delta.powi(k.delta_pow as i32);
            for &(v, p) in &k.monomial.0 {
                term *= jet(v).powu(p as u32);
            }
            sum += term;
        }
        sum
    }
}

fn rational_to_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().expect("rational out of f64 range")
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", c)?;
            if k.lambda_pow != 0 {
                write!(f, "*L^{}", k.lambda_pow)?;
            }
            if k.mu_pow != 0 {
                write!(f, "*M^{}", k.mu_pow)?;
            }
            if k.delta_pow != 0 {
                write!(f, "*d^{}", k.delta_pow)?;
            }
            if !k.monomial.0.is_empty() {
                write!(f, "*{}", k.monomial)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leibniz_dx() {
        // d/dx (q^2) = 2 q q_x
        let q = SymExpr::field(Field::Q);
        let q2 = q.mul(&q);
        let expect = SymExpr::constant(GaussRat::from_int(2))
            .mul(&q)
            .mul(&SymExpr::var(JetVar::new(Field::Q, 1, 0, 0)));
        assert_eq!(q2.dx(), expect);
    }

    #[test]
    fn substitution_replaces_all_powers() {
        // (q_t)^2 with q_t -> q gives q^2
        let qt = SymExpr::var(JetVar::new(Field::Q, 0, 1, 0));
        let e = qt.mul(&qt);
        let got = e.substitute(JetVar::new(Field::Q, 0, 1, 0), &SymExpr::field(Field::Q));
        let q = SymExpr::field(Field::Q);
        assert_eq!(got, q.mul(&q));
    }

    #[test]
    fn canonical_zero() {
        let q = SymExpr::field(Field::Q);
        assert!(q.sub(&q).is_zero());
    }
}
