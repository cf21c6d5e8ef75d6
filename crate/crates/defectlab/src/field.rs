//! Field jets, exact reference solutions, and the NLS residual used as the
//! oracle throughout the crate.

use num_complex::Complex64;
use thiserror::Error;

use crate::Epsilon;

/// Values of the field and its first derivatives at one spacetime point.
/// Conjugate entries are stored separately so that callers may treat them as
/// independent coordinates; [`FieldJet::from_value`]-style constructors keep
/// them honest conjugates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub q: Complex64,
    pub q_conj: Complex64,
    pub q_x: Complex64,
    pub q_conj_x: Complex64,
    pub q_t: Complex64,
    pub q_conj_t: Complex64,
}

impl FieldJet {
    /// Build a jet from the field value and derivatives of `q` alone,
    /// filling the conjugate entries with exact conjugates.
    pub fn conjugate_consistent(q: Complex64, q_x: Complex64, q_t: Complex64) -> Self {
        FieldJet {
            q,
            q_conj: q.conj(),
            q_x,
            q_conj_x: q_x.conj(),
            q_t,
            q_conj_t: q_t.conj(),
        }
    }

    pub fn zero() -> Self {
        Self::conjugate_consistent(Complex64::ZERO, Complex64::ZERO, Complex64::ZERO)
    }
}

/// NLS residual `i q_t + q_xx - 2 eps |q|^2 q`; zero exactly on solutions.
pub fn nls_residual(jet: &FieldJet, q_xx: Complex64, epsilon: Epsilon) -> Complex64 {
    let i = Complex64::I;
    i * jet.q_t + q_xx - 2.0 * epsilon as f64 * jet.q * jet.q_conj * jet.q
}

#[derive(Debug, Error, PartialEq)]
pub enum SolutionError {
    #[error("one-soliton solutions exist only for epsilon = -1 (got {0})")]
    SolitonNeedsFocusing(i8),
    #[error("one-soliton amplitude must be positive (got {0})")]
    NonPositiveAmplitude(f64),
}

/// Closed-form reference solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolutionKind {
    Vacuum,
    /// `A exp(i(kx - wt))` with `w = k^2 + 2 eps A^2`.
    PlaneWave { amplitude: f64, wavenumber: f64 },
    /// `a sech(a(x - vt - x_off)) exp(i((v/2)x + (a^2 - v^2/4)t + phase))`,
    /// focusing only.
    OneSoliton {
        amplitude: f64,
        velocity: f64,
        x_offset: f64,
        phase: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolution {
    pub kind: SolutionKind,
    pub epsilon: Epsilon,
}

impl ExactSolution {
    pub fn vacuum(epsilon: Epsilon) -> Self {
        ExactSolution {
            kind: SolutionKind::Vacuum,
            epsilon,
        }
    }

    pub fn plane_wave(amplitude: f64, wavenumber: f64, epsilon: Epsilon) -> Self {
        ExactSolution {
            kind: SolutionKind::PlaneWave {
                amplitude,
                wavenumber,
            },
            epsilon,
        }
    }

    pub fn one_soliton(
        amplitude: f64,
        velocity: f64,
        x_offset: f64,
        phase: f64,
        epsilon: Epsilon,
    ) -> Result<Self, SolutionError> {
        if epsilon != -1 {
            return Err(SolutionError::SolitonNeedsFocusing(epsilon));
        }
        if amplitude <= 0.0 {
            return Err(SolutionError::NonPositiveAmplitude(amplitude));
        }
        Ok(ExactSolution {
            kind: SolutionKind::OneSoliton {
                amplitude,
                velocity,
                x_offset,
                phase,
            },
            epsilon,
        })
    }

    /// Field value at `(x, t)`.
    pub fn eval(&self, x: f64, t: f64) -> Complex64 {
        match self.kind {
            SolutionKind::Vacuum => Complex64::ZERO,
            SolutionKind::PlaneWave {
                amplitude,
                wavenumber,
            } => {
                let w = wavenumber * wavenumber
                    + 2.0 * self.epsilon as f64 * amplitude * amplitude;
                amplitude * (Complex64::I * (wavenumber * x - w * t)).exp()
            }
            SolutionKind::OneSoliton {
                amplitude: a,
                velocity: v,
                x_offset,
                phase,
            } => {
                let xi = x - v * t - x_offset;
                let theta = 0.5 * v * x + (a * a - 0.25 * v * v) * t + phase;
                a / (a * xi).cosh() * (Complex64::I * theta).exp()
            }
        }
    }

    /// Analytic x-derivative.
    pub fn eval_dx(&self, x: f64, t: f64) -> Complex64 {
        match self.kind {
            SolutionKind::Vacuum => Complex64::ZERO,
            SolutionKind::PlaneWave { wavenumber, .. } => {
                Complex64::I * wavenumber * self.eval(x, t)
            }
            SolutionKind::OneSoliton {
                amplitude: a,
                velocity: v,
                x_offset,
                ..
            } => {
                let xi = x - v * t - x_offset;
                let mu = Complex64::new(-a * (a * xi).tanh(), 0.5 * v);
                mu * self.eval(x, t)
            }
        }
    }

    /// Analytic second x-derivative.
    pub fn eval_dxx(&self, x: f64, t: f64) -> Complex64 {
        match self.kind {
            SolutionKind::Vacuum => Complex64::ZERO,
            SolutionKind::PlaneWave { wavenumber, .. } => {
                -wavenumber * wavenumber * self.eval(x, t)
            }
            SolutionKind::OneSoliton {
                amplitude: a,
                velocity: v,
                x_offset,
                ..
            } => {
                let xi = x - v * t - x_offset;
                let sech2 = 1.0 / (a * xi).cosh().powi(2);
                let mu = Complex64::new(-a * (a * xi).tanh(), 0.5 * v);
                (mu * mu - a * a * sech2) * self.eval(x, t)
            }
        }
    }

    /// Analytic third x-derivative.
    pub fn eval_dxxx(&self, x: f64, t: f64) -> Complex64 {
        match self.kind {
            SolutionKind::Vacuum => Complex64::ZERO,
            SolutionKind::PlaneWave { wavenumber, .. } => {
                -Complex64::I * wavenumber.powi(3) * self.eval(x, t)
            }
            SolutionKind::OneSoliton {
                amplitude: a,
                velocity: v,
                x_offset,
                ..
            } => {
                // q_xxx = q * (mu^3 - 3 a^2 sech^2 mu + 2 a^3 sech^2 tanh)
                let xi = x - v * t - x_offset;
                let th = (a * xi).tanh();
                let sech2 = 1.0 / (a * xi).cosh().powi(2);
                let mu = Complex64::new(-a * th, 0.5 * v);
                (mu * mu * mu - 3.0 * a * a * sech2 * mu + 2.0 * a * a * a * sech2 * th)
                    * self.eval(x, t)
            }
        }
    }

    /// Analytic t-derivative.
    pub fn eval_dt(&self, x: f64, t: f64) -> Complex64 {
        match self.kind {
            SolutionKind::Vacuum => Complex64::ZERO,
            SolutionKind::PlaneWave {
                amplitude,
                wavenumber,
            } => {
                let w = wavenumber * wavenumber
                    + 2.0 * self.epsilon as f64 * amplitude * amplitude;
                -Complex64::I * w * self.eval(x, t)
            }
            SolutionKind::OneSoliton {
                amplitude: a,
                velocity: v,
                x_offset,
                ..
            } => {
                let xi = x - v * t - x_offset;
                let nu = Complex64::new(a * v * (a * xi).tanh(), a * a - 0.25 * v * v);
                nu * self.eval(x, t)
            }
        }
    }

    /// Analytic mixed derivative `q_xt`.
    pub fn eval_dxt(&self, x: f64, t: f64) -> Complex64 {
        match self.kind {
            SolutionKind::Vacuum => Complex64::ZERO,
            SolutionKind::PlaneWave {
                amplitude,
                wavenumber,
            } => {
                let w = wavenumber * wavenumber
                    + 2.0 * self.epsilon as f64 * amplitude * amplitude;
                Complex64::I * wavenumber * (-Complex64::I * w) * self.eval(x, t)
            }
            SolutionKind::OneSoliton {
                amplitude: a,
                velocity: v,
                x_offset,
                ..
            } => {
                // d/dt (mu q) = mu_t q + mu q_t
                let xi = x - v * t - x_offset;
                let sech2 = 1.0 / (a * xi).cosh().powi(2);
                let mu = Complex64::new(-a * (a * xi).tanh(), 0.5 * v);
                let mu_t = Complex64::new(a * a * v * sech2, 0.0);
                let nu = Complex64::new(a * v * (a * xi).tanh(), a * a - 0.25 * v * v);
                (mu_t + mu * nu) * self.eval(x, t)
            }
        }
    }

    /// Full analytic jet at `(x, t)`.
    pub fn jet(&self, x: f64, t: f64) -> FieldJet {
        FieldJet::conjugate_consistent(self.eval(x, t), self.eval_dx(x, t), self.eval_dt(x, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_residual_zero() {
        let jet = FieldJet::zero();
        assert_eq!(nls_residual(&jet, Complex64::ZERO, 1), Complex64::ZERO);
    }

    #[test]
    fn plane_wave_solves_nls_analytically() {
        for eps in [1i8, -1] {
            let sol = ExactSolution::plane_wave(0.5, 1.25, eps);
            for (x, t) in [(0.3, 0.2), (-1.0, 0.7)] {
                let r = nls_residual(&sol.jet(x, t), sol.eval_dxx(x, t), eps);
                assert!(r.norm() < 1e-12, "residual {}", r.norm());
            }
        }
    }

    #[test]
    fn soliton_family_solves_nls_analytically() {
        // the closed form is admitted only because it passes this oracle
        for (a, v) in [(1.0, 0.0), (0.7, 0.9), (1.4, -0.3)] {
            let sol = ExactSolution::one_soliton(a, v, 0.2, 0.5, -1).unwrap();
            for (x, t) in [(0.0, 0.0), (0.9, 0.4), (-1.3, 1.1)] {
                let r = nls_residual(&sol.jet(x, t), sol.eval_dxx(x, t), -1);
                assert!(r.norm() < 1e-12, "a={a} v={v}: residual {}", r.norm());
            }
        }
    }

    #[test]
    fn soliton_peak_value() {
        let sol = ExactSolution::one_soliton(1.0, 0.0, 0.0, 0.0, -1).unwrap();
        assert!((sol.eval(0.0, 0.0) - Complex64::ONE).norm() < 1e-15);
    }

    #[test]
    fn plane_wave_at_origin() {
        let sol = ExactSolution::plane_wave(0.5, 1.0, 1);
        assert!((sol.eval(0.0, 0.0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn soliton_rejects_defocusing() {
        assert_eq!(
            ExactSolution::one_soliton(1.0, 0.0, 0.0, 0.0, 1).unwrap_err(),
            SolutionError::SolitonNeedsFocusing(1)
        );
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let sol = ExactSolution::one_soliton(0.9, 0.6, 0.1, 0.3, -1).unwrap();
        let (x, t) = (0.37, 0.81);
        let h = 1e-5;
        let fd_x = (sol.eval(x + h, t) - sol.eval(x - h, t)) / (2.0 * h);
        let fd_t = (sol.eval(x, t + h) - sol.eval(x, t - h)) / (2.0 * h);
        let fd_xx = (sol.eval(x + h, t) - 2.0 * sol.eval(x, t) + sol.eval(x - h, t)) / (h * h);
        let fd_xxx = (sol.eval_dxx(x + h, t) - sol.eval_dxx(x - h, t)) / (2.0 * h);
        let fd_xt = (sol.eval_dx(x, t + h) - sol.eval_dx(x, t - h)) / (2.0 * h);
        assert!((fd_x - sol.eval_dx(x, t)).norm() < 1e-9);
        assert!((fd_t - sol.eval_dt(x, t)).norm() < 1e-9);
        assert!((fd_xx - sol.eval_dxx(x, t)).norm() < 1e-6);
        assert!((fd_xxx - sol.eval_dxxx(x, t)).norm() < 1e-8);
        assert!((fd_xt - sol.eval_dxt(x, t)).norm() < 1e-9);
    }
}
