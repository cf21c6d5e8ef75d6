//! Fundamental solutions of the auxiliary linear problems: the space
//! monodromy M_S, the time monodromy M_T, transfer functions, the arccos
//! large-lambda check, and the composite defect monodromy.

use num_complex::Complex64;
use thiserror::Error;

use crate::charges::{SpaceField, TimeField};
use crate::lax::Matrix2;
use crate::Epsilon;

#[derive(Debug, Error)]
pub enum MonodromyError {
    #[error("step count must be positive")]
    NoSteps,
    #[error("defect matrix singular at t = 0 for this lambda (det = 0)")]
    SingularDefectMatrix,
}

/// Matrix samples of a fundamental solution along the integration variable.
#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub lambda: Complex64,
    /// Sample abscissae (including both endpoints).
    pub s: Vec<f64>,
    /// M(s_k) with M(s_0) = identity.
    pub samples: Vec<Matrix2>,
}

impl MonodromyResult {
    pub fn final_matrix(&self) -> Matrix2 {
        *self.samples.last().expect("at least the identity sample")
    }

    pub fn transfer(&self) -> Complex64 {
        self.final_matrix().trace()
    }

    /// Max |det M - 1| over the samples (unimodularity diagnostic).
    pub fn max_det_deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(|m| (m.det() - Complex64::ONE).norm())
            .fold(0.0, f64::max)
    }
}

/// Integrate `dM/dx = U(x) M` on `[x0, x1]`, `M(x0) = I`, classical RK4 with
/// `n_steps` fixed steps, in the oscillation-factored form
/// `M = E(x - x0) Phi`, `E = exp(-i lambda sigma3 (x - x0))`, which keeps the
/// stiff vacuum rotation exact and lets RK4 act on the field part only.
pub fn integrate_m_s(
    field: &impl SpaceField,
    lambda: Complex64,
    epsilon: Epsilon,
    x0: f64,
    x1: f64,
    n_steps: usize,
    n_samples: usize,
) -> Result<MonodromyResult, MonodromyError> {
    if n_steps == 0 {
        return Err(MonodromyError::NoSteps);
    }
    let e = epsilon as f64;
    let i = Complex64::I;
    // Phi' = What(x) Phi with What = E^{-1} W E
    let what = |x: f64| -> Matrix2 {
        let ph = (2.0 * i * lambda * (x - x0)).exp();
        Matrix2::new(
            Complex64::ZERO,
            field.q(x) * ph,
            e * field.q_conj(x) / ph,
            Complex64::ZERO,
        )
    };
    let env = |x: f64| -> Matrix2 {
        let ph = (-i * lambda * (x - x0)).exp();
        Matrix2::diag(ph, 1.0 / ph)
    };
    let h = (x1 - x0) / n_steps as f64;
    let keep_every = (n_steps / n_samples.max(1)).max(1);
    let mut phi = Matrix2::identity();
    let mut s = vec![x0];
    let mut samples = vec![Matrix2::identity()];
    let mut x = x0;
    for k in 0..n_steps {
        let k1 = what(x) * phi;
        let k2 = what(x + 0.5 * h) * (phi + k1.scale(Complex64::new(0.5 * h, 0.0)));
        let k3 = what(x + 0.5 * h) * (phi + k2.scale(Complex64::new(0.5 * h, 0.0)));
        let k4 = what(x + h) * (phi + k3.scale(Complex64::new(h, 0.0)));
        phi = phi
            + (k1 + k2.scale(Complex64::new(2.0, 0.0)) + k3.scale(Complex64::new(2.0, 0.0)) + k4)
                .scale(Complex64::new(h / 6.0, 0.0));
        x = x0 + (k + 1) as f64 * h;
        if (k + 1) % keep_every == 0 || k + 1 == n_steps {
            s.push(x);
            samples.push(env(x) * phi);
        }
    }
    Ok(MonodromyResult { lambda, s, samples })
}

/// Integrate `dM/dt = V(t) M` on `[t0, t1]`, `M(t0) = I`, in the factored
/// form `M = E(t - t0) Phi`, `E = exp(-2 i lambda^2 sigma3 (t - t0))`.
pub fn integrate_m_t(
    field: &impl TimeField,
    lambda: Complex64,
    epsilon: Epsilon,
    t0: f64,
    t1: f64,
    n_steps: usize,
    n_samples: usize,
) -> Result<MonodromyResult, MonodromyError> {
    if n_steps == 0 {
        return Err(MonodromyError::NoSteps);
    }
    let e = epsilon as f64;
    let i = Complex64::I;
    let vred = |t: f64| -> Matrix2 {
        // V + 2 i lambda^2 sigma3, conjugated by E^{-1} ... E
        let q = field.q(t);
        let qs = field.q_conj(t);
        let qx = field.q_x(t);
        let qxs = field.q_x_conj(t);
        let ph = (4.0 * i * lambda * lambda * (t - t0)).exp();
        let d = -i * e * q * qs;
        Matrix2::new(
            d,
            (2.0 * lambda * q + i * qx) * ph,
            e * (2.0 * lambda * qs - i * qxs) / ph,
            -d,
        )
    };
    let env = |t: f64| -> Matrix2 {
        let ph = (-2.0 * i * lambda * lambda * (t - t0)).exp();
        Matrix2::diag(ph, 1.0 / ph)
    };
    let h = (t1 - t0) / n_steps as f64;
    let keep_every = (n_steps / n_samples.max(1)).max(1);
    let mut phi = Matrix2::identity();
    let mut s = vec![t0];
    let mut samples = vec![Matrix2::identity()];
    let mut t = t0;
    for k in 0..n_steps {
        let k1 = vred(t) * phi;
        let k2 = vred(t + 0.5 * h) * (phi + k1.scale(Complex64::new(0.5 * h, 0.0)));
        let k3 = vred(t + 0.5 * h) * (phi + k2.scale(Complex64::new(0.5 * h, 0.0)));
        let k4 = vred(t + h) * (phi + k3.scale(Complex64::new(h, 0.0)));
        phi = phi
            + (k1 + k2.scale(Complex64::new(2.0, 0.0)) + k3.scale(Complex64::new(2.0, 0.0)) + k4)
                .scale(Complex64::new(h / 6.0, 0.0));
        t = t0 + (k + 1) as f64 * h;
        if (k + 1) % keep_every == 0 || k + 1 == n_steps {
            s.push(t);
            samples.push(env(t) * phi);
        }
    }
    Ok(MonodromyResult { lambda, s, samples })
}

/// Multiplicativity check: `M(s2, s0) = M(s2, s1) M(s1, s0)` for an interior
/// split, returned as the norm of the difference.
pub fn multiplicativity_defect(
    field: &impl SpaceField,
    lambda: Complex64,
    epsilon: Epsilon,
    x0: f64,
    x_mid: f64,
    x1: f64,
    n_steps: usize,
) -> f64 {
    let frac = ((x_mid - x0) / (x1 - x0)).clamp(0.0, 1.0);
    let n_left = ((n_steps as f64 * frac) as usize).max(1);
    let n_right = (n_steps - n_left).max(1);
    let whole = integrate_m_s(field, lambda, epsilon, x0, x1, n_steps, 1).unwrap();
    let left = integrate_m_s(field, lambda, epsilon, x0, x_mid, n_left, 1).unwrap();
    let right = integrate_m_s(field, lambda, epsilon, x_mid, x1, n_right, 1).unwrap();
    (whole.final_matrix() - right.final_matrix() * left.final_matrix()).frobenius_norm()
}

/// Continuous-branch reconstruction of `arccos(T_S/2) + lambda L`: picks the
/// representative of `+-acos + 2 pi k` closest to `-lambda L`, which is the
/// branch on which the large-lambda asymptotics hold. The remainder after
/// subtracting the first three transfer-normalized charges decays like
/// `lambda^{-4}`.
pub fn arccos_remainder(
    transfer: Complex64,
    lambda: f64,
    box_length: f64,
    ihat: &[Complex64; 3],
    epsilon: Epsilon,
) -> f64 {
    let y = (transfer.re / 2.0).clamp(-1.0, 1.0);
    let theta = y.acos();
    let target = -lambda * box_length;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut best = f64::MAX;
    let mut phase = 0.0;
    for s in [1.0f64, -1.0] {
        let k = ((target - s * theta) / two_pi).round();
        let cand = s * theta + two_pi * k;
        if (cand - target).abs() < best {
            best = (cand - target).abs();
            phase = cand;
        }
    }
    let series: f64 = (1..=3)
        .map(|n| ihat[n - 1].re / lambda.powi(n as i32))
        .sum();
    phase + lambda * box_length - epsilon as f64 * series
}

/// Composite defect monodromy at the defect point: `L0(t) M_T(t) L0(0)^{-1}`,
/// with `M_T` from the right field line and `L0(t)` supplied by the caller.
/// Returns the composite samples together with the independently supplied
/// left monodromy for comparison.
pub struct DefectMonodromy {
    pub lambda: Complex64,
    pub t: Vec<f64>,
    /// `L0(t) M_T(t) L0(0)^{-1}` at the sample times.
    pub composite: Vec<Matrix2>,
    /// Right-field monodromy samples.
    pub right: Vec<Matrix2>,
    /// Trace of the composite at the final time (defect transfer).
    pub transfer_composite: Complex64,
}

pub fn defect_monodromy(
    right_monodromy: &MonodromyResult,
    l0_of_t: impl Fn(f64) -> Matrix2,
) -> Result<DefectMonodromy, MonodromyError> {
    let l0_inv = l0_of_t(right_monodromy.s[0])
        .inverse()
        .ok_or(MonodromyError::SingularDefectMatrix)?;
    let composite: Vec<Matrix2> = right_monodromy
        .s
        .iter()
        .zip(&right_monodromy.samples)
        .map(|(&t, m)| l0_of_t(t) * *m * l0_inv)
        .collect();
    let transfer_composite = composite.last().unwrap().trace();
    Ok(DefectMonodromy {
        lambda: right_monodromy.lambda,
        t: right_monodromy.s.clone(),
        composite,
        right: right_monodromy.samples.clone(),
        transfer_composite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charges::{SolutionAtPoint, SolutionAtTime};
    use crate::field::ExactSolution;

    #[test]
    fn vacuum_space_monodromy_is_exponential() {
        let sol = ExactSolution::vacuum(1);
        let field = SolutionAtTime { sol: &sol, t: 0.0 };
        let lam = Complex64::new(1.7, 0.3);
        let m = integrate_m_s(&field, lam, 1, 0.0, 2.0, 64, 4).unwrap();
        let expect = Matrix2::diag(
            (-Complex64::I * lam * 2.0).exp(),
            (Complex64::I * lam * 2.0).exp(),
        );
        assert!((m.final_matrix() - expect).frobenius_norm() < 1e-12);
    }

    #[test]
    fn vacuum_time_monodromy_is_exponential() {
        let sol = ExactSolution::vacuum(-1);
        let field = SolutionAtPoint { sol: &sol, x0: 0.0 };
        let lam = Complex64::new(1.1, -0.2);
        let m = integrate_m_t(&field, lam, -1, 0.0, 0.8, 64, 4).unwrap();
        let w = 2.0 * Complex64::I * lam * lam * 0.8;
        let expect = Matrix2::diag((-w).exp(), w.exp());
        assert!((m.final_matrix() - expect).frobenius_norm() < 1e-12);
    }

    #[test]
    fn unimodular_on_soliton() {
        let sol = ExactSolution::one_soliton(1.0, 0.3, 0.0, 0.0, -1).unwrap();
        let field = SolutionAtTime { sol: &sol, t: 0.0 };
        let m = integrate_m_s(&field, Complex64::new(2.0, 0.5), -1, -8.0, 8.0, 4000, 16).unwrap();
        assert!(m.max_det_deviation() < 1e-9, "{}", m.max_det_deviation());
    }

    #[test]
    fn multiplicativity() {
        let sol = ExactSolution::one_soliton(1.0, 0.0, 0.0, 0.0, -1).unwrap();
        let field = SolutionAtTime { sol: &sol, t: 0.0 };
        let d = multiplicativity_defect(
            &field,
            Complex64::new(1.4, 0.0),
            -1,
            -6.0,
            -1.5,
            6.0,
            4096,
        );
        assert!(d < 1e-8, "defect {d}");
    }

    #[test]
    fn refinement_is_fourth_order() {
        let sol = ExactSolution::one_soliton(1.0, 0.4, 0.0, 0.0, -1).unwrap();
        let field = SolutionAtTime { sol: &sol, t: 0.0 };
        let lam = Complex64::new(1.0, 0.2);
        let fine = integrate_m_s(&field, lam, -1, -6.0, 6.0, 16384, 1)
            .unwrap()
            .final_matrix();
        let mut errs = Vec::new();
        for n in [256usize, 512] {
            let m = integrate_m_s(&field, lam, -1, -6.0, 6.0, n, 1)
                .unwrap()
                .final_matrix();
            errs.push((m - fine).frobenius_norm());
        }
        let rate = (errs[0] / errs[1]).log2();
        assert!(rate > 3.5 && rate < 4.5, "rate {rate}");
    }

    #[test]
    fn time_transfer_origin_independent_on_periodic_series() {
        // T_T(lambda) unchanged under a shift of the time origin
        let a = 1.0;
        let sol = ExactSolution::one_soliton(a, 0.0, 0.0, 0.0, -1).unwrap();
        let tau = 2.0 * std::f64::consts::PI / (a * a);
        let field = SolutionAtPoint { sol: &sol, x0: 0.4 };
        let lam = Complex64::new(1.3, 0.0);
        let t1 = integrate_m_t(&field, lam, -1, 0.0, tau, 4096, 1)
            .unwrap()
            .transfer();
        let t2 = integrate_m_t(&field, lam, -1, 0.37, 0.37 + tau, 4096, 1)
            .unwrap()
            .transfer();
        assert!((t1 - t2).norm() < 1e-7, "diff {}", (t1 - t2).norm());
    }

    #[test]
    fn vacuum_defect_monodromy_reduces_to_m_t() {
        // constant diagonal L0 commutes with the vacuum monodromy
        let sol = ExactSolution::vacuum(-1);
        let field = SolutionAtPoint { sol: &sol, x0: 0.0 };
        let lam = Complex64::new(0.9, 0.1);
        let m = integrate_m_t(&field, lam, -1, 0.0, 1.0, 256, 8).unwrap();
        let l0 = Matrix2::diag(lam + Complex64::new(0.2, 0.45), lam + Complex64::new(0.2, -0.45));
        let dm = defect_monodromy(&m, |_| l0).unwrap();
        for (c, r) in dm.composite.iter().zip(&dm.right) {
            assert!((*c - *r).frobenius_norm() < 1e-12);
        }
    }
}
