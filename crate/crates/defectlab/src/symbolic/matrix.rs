//! Matrices over exact differential polynomials: 2x2 Lax matrices, the
//! permutation operator, and Kronecker products.

use super::expr::{Field, JetVar, SymExpr};
use super::gauss::GaussRat;

/// Dense square matrix of `SymExpr` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<SymExpr>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![SymExpr::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            *m.at_mut(i, i) = SymExpr::one();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &SymExpr {
        &self.data[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut SymExpr {
        &mut self.data[i * self.n + j]
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = SymExpr::zero();
                for k in 0..n {
                    acc = acc.add(&self.at(i, k).mul(other.at(k, j)));
                }
                *out.at_mut(i, j) = acc;
            }
        }
        out
    }

    pub fn scale(&self, e: &SymExpr) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a.mul(e)).collect(),
        }
    }

    pub fn commutator(&self, other: &SymMatrix) -> SymMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> SymExpr {
        let mut acc = SymExpr::zero();
        for i in 0..self.n {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    pub fn dx(&self) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a.dx()).collect(),
        }
    }

    pub fn dt(&self) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a.dt()).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&SymExpr) -> SymExpr) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn num_terms(&self) -> usize {
        self.data.iter().map(|e| e.num_terms()).sum()
    }

    pub fn nonzero_entries(&self) -> usize {
        self.data.iter().filter(|e| !e.is_zero()).count()
    }
}

/// Kronecker product `A (x) B` with the row-major pair convention
/// `(A (x) B)[(i,k),(j,l)] = A[i,j] B[k,l]`.
pub fn tensor(a: &SymMatrix, b: &SymMatrix) -> SymMatrix {
    let n = a.n * b.n;
    let mut out = SymMatrix::zeros(n);
    for i in 0..a.n {
        for j in 0..a.n {
            for k in 0..b.n {
                for l in 0..b.n {
                    *out.at_mut(i * b.n + k, j * b.n + l) = a.at(i, j).mul(b.at(k, l));
                }
            }
        }
    }
    out
}

pub fn sigma3() -> SymMatrix {
    let mut m = SymMatrix::zeros(2);
    *m.at_mut(0, 0) = SymExpr::one();
    *m.at_mut(1, 1) = SymExpr::one().neg();
    m
}

pub fn sigma_plus() -> SymMatrix {
    let mut m = SymMatrix::zeros(2);
    *m.at_mut(0, 1) = SymExpr::one();
    m
}

pub fn sigma_minus() -> SymMatrix {
    let mut m = SymMatrix::zeros(2);
    *m.at_mut(1, 0) = SymExpr::one();
    m
}

/// Permutation operator on C^2 (x) C^2: `P (u (x) v) = v (x) u`.
pub fn permutation() -> SymMatrix {
    let mut p = SymMatrix::zeros(4);
    // basis ordering (e_i (x) e_k) -> index 2*i + k
    for i in 0..2 {
        for k in 0..2 {
            *p.at_mut(2 * i + k, 2 * k + i) = SymExpr::one();
        }
    }
    p
}

/// Field part `W = q sigma_+ + eps q* sigma_-` at the given tag.
pub fn w_matrix(eps: i8, tag: u8) -> SymMatrix {
    let mut m = SymMatrix::zeros(2);
    *m.at_mut(0, 1) = SymExpr::var(JetVar::new(Field::Q, 0, 0, tag));
    *m.at_mut(1, 0) = SymExpr::var(JetVar::new(Field::QStar, 0, 0, tag))
        .scale(&GaussRat::from_int(eps as i64));
    m
}

/// Spectral symbol selector for the two tensor slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spectral {
    Lambda,
    Mu,
}

fn spectral(sym: Spectral, p: i8) -> SymExpr {
    match sym {
        Spectral::Lambda => SymExpr::lambda(p),
        Spectral::Mu => SymExpr::mu(p),
    }
}

/// Space Lax matrix `U = [[-i s, q], [eps q*, i s]]` with spectral symbol `s`.
pub fn u_matrix(eps: i8, sym: Spectral, tag: u8) -> SymMatrix {
    let minus_i = SymExpr::i().neg();
    let s1 = spectral(sym, 1);
    let mut m = SymMatrix::zeros(2);
    *m.at_mut(0, 0) = minus_i.mul(&s1);
    *m.at_mut(0, 1) = SymExpr::var(JetVar::new(Field::Q, 0, 0, tag));
    *m.at_mut(1, 0) = SymExpr::var(JetVar::new(Field::QStar, 0, 0, tag))
        .scale(&GaussRat::from_int(eps as i64));
    *m.at_mut(1, 1) = SymExpr::i().mul(&s1);
    m
}

/// Time Lax matrix
/// `V = [[-2 i s^2 - i eps |q|^2, 2 s q + i q_x], [eps (2 s q* - i q*_x), 2 i s^2 + i eps |q|^2]]`.
pub fn v_matrix(eps: i8, sym: Spectral, tag: u8) -> SymMatrix {
    let e = GaussRat::from_int(eps as i64);
    let i = SymExpr::i();
    let s1 = spectral(sym, 1);
    let s2 = spectral(sym, 2);
    let q = SymExpr::var(JetVar::new(Field::Q, 0, 0, tag));
    let qs = SymExpr::var(JetVar::new(Field::QStar, 0, 0, tag));
    let qx = SymExpr::var(JetVar::new(Field::Q, 1, 0, tag));
    let qsx = SymExpr::var(JetVar::new(Field::QStar, 1, 0, tag));
    let qq = q.mul(&qs);

    let mut m = SymMatrix::zeros(2);
    let diag = i
        .mul(&s2)
        .scale(&GaussRat::from_int(2))
        .add(&i.mul(&qq).scale(&e));
    *m.at_mut(0, 0) = diag.neg();
    *m.at_mut(1, 1) = diag;
    *m.at_mut(0, 1) = s1.mul(&q).scale(&GaussRat::from_int(2)).add(&i.mul(&qx));
    *m.at_mut(1, 0) = s1
        .mul(&qs)
        .scale(&GaussRat::from_int(2))
        .sub(&i.mul(&qsx))
        .scale(&e);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_squares_to_identity() {
        let p = permutation();
        assert_eq!(p.mul(&p), SymMatrix::identity(4));
    }

    #[test]
    fn tensor_mixed_product() {
        // (s3 (x) 1)(1 (x) s3) = s3 (x) s3
        let a = tensor(&sigma3(), &SymMatrix::identity(2));
        let b = tensor(&SymMatrix::identity(2), &sigma3());
        assert_eq!(a.mul(&b), tensor(&sigma3(), &sigma3()));
    }

    #[test]
    fn lax_traces_vanish() {
        for eps in [1i8, -1] {
            assert!(u_matrix(eps, Spectral::Lambda, 0).trace().is_zero());
            assert!(v_matrix(eps, Spectral::Lambda, 0).trace().is_zero());
        }
    }

    #[test]
    fn u_decomposes_as_diagonal_plus_w() {
        for eps in [1i8, -1] {
            let u = u_matrix(eps, Spectral::Lambda, 0);
            let diag = sigma3().scale(&SymExpr::i().neg().mul(&SymExpr::lambda(1)));
            assert_eq!(u, diag.add(&w_matrix(eps, 0)));
        }
    }
}
