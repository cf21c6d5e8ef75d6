//! Numeric Lax matrices U, V and the zero-curvature residual.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::field::{ExactSolution, FieldJet};
use crate::Epsilon;

/// Dense complex 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub m: [[Complex64; 2]; 2],
}

impl Matrix2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Matrix2 { m: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        Matrix2 {
            m: [[Complex64::ZERO; 2]; 2],
        }
    }

    pub fn identity() -> Self {
        Matrix2::new(Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ONE)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Matrix2::new(a, Complex64::ZERO, Complex64::ZERO, d)
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Option<Matrix2> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(Matrix2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    pub fn scale(&self, s: Complex64) -> Matrix2 {
        Matrix2::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn commutator(&self, other: &Matrix2) -> Matrix2 {
        *self * *other - *other * *self
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        out
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        self.scale(-Complex64::ONE)
    }
}

/// Space Lax matrix `U = [[-i l, q], [eps q*, i l]]`.
pub fn build_u(jet: &FieldJet, lambda: Complex64, epsilon: Epsilon) -> Matrix2 {
    let i = Complex64::I;
    Matrix2::new(
        -i * lambda,
        jet.q,
        epsilon as f64 * jet.q_conj,
        i * lambda,
    )
}

/// Time Lax matrix
/// `V = [[-2i l^2 - i eps |q|^2, 2 l q + i q_x], [eps(2 l q* - i q*_x), 2i l^2 + i eps |q|^2]]`.
pub fn build_v(jet: &FieldJet, lambda: Complex64, epsilon: Epsilon) -> Matrix2 {
    let i = Complex64::I;
    let e = epsilon as f64;
    let qq = jet.q * jet.q_conj;
    let d = -2.0 * i * lambda * lambda - i * e * qq;
    Matrix2::new(
        d,
        2.0 * lambda * jet.q + i * jet.q_x,
        e * (2.0 * lambda * jet.q_conj - i * jet.q_conj_x),
        -d,
    )
}

/// Lambda sample set used when reporting zero-curvature residuals, to avoid
/// lambda-specific accidental cancellation.
pub const LAMBDA_SAMPLES: [Complex64; 5] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(0.0, -1.0),
    Complex64::new(2.0, 1.0),
];

/// Zero-curvature residual `U_t - V_x + [U, V]` at a point of an exact
/// solution, with all derivatives taken analytically except the t- and
/// x-derivatives of the Lax matrices themselves, which are centered
/// differences with step `h`.
pub fn zero_curvature_residual(
    sol: &ExactSolution,
    x: f64,
    t: f64,
    lambda: Complex64,
    h: f64,
) -> Matrix2 {
    let eps = sol.epsilon;
    let u_t = (build_u(&sol.jet(x, t + h), lambda, eps) - build_u(&sol.jet(x, t - h), lambda, eps))
        .scale(Complex64::new(1.0 / (2.0 * h), 0.0));
    let v_x = (build_v(&sol.jet(x + h, t), lambda, eps) - build_v(&sol.jet(x - h, t), lambda, eps))
        .scale(Complex64::new(1.0 / (2.0 * h), 0.0));
    let u = build_u(&sol.jet(x, t), lambda, eps);
    let v = build_v(&sol.jet(x, t), lambda, eps);
    u_t - v_x + u.commutator(&v)
}

/// Max residual norm over the standard lambda sample set.
pub fn zero_curvature_residual_max(sol: &ExactSolution, x: f64, t: f64, h: f64) -> f64 {
    LAMBDA_SAMPLES
        .iter()
        .map(|&l| zero_curvature_residual(sol, x, t, l, h).frobenius_norm())
        .fold(0.0, f64::max)
}
