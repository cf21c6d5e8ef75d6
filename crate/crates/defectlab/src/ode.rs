//! Small ODE integrators for complex state vectors: classical fixed-step RK4
//! and an adaptive Dormand-Prince 5(4) pair with a divergence guard.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("solution norm exceeded the divergence guard ({guard:e}) at s = {at}")]
    Diverged { at: f64, guard: f64 },
    #[error("step size underflow at s = {at} (h = {h:e})")]
    StepUnderflow { at: f64, h: f64 },
}

/// One classical RK4 step of `y' = f(s, y)`.
pub fn rk4_step<F>(f: &F, s: f64, y: &[Complex64], h: f64) -> Vec<Complex64>
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    let add = |a: &[Complex64], b: &[Complex64], c: f64| -> Vec<Complex64> {
        a.iter().zip(b).map(|(x, k)| x + c * k).collect()
    };
    let k1 = f(s, y);
    let k2 = f(s + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = f(s + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = f(s + h, &add(y, &k3, h));
    y.iter()
        .enumerate()
        .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive integration of `y' = f(s, y)` from `s0` to `s1` (either
/// direction), returning the state at a sorted list of output points
/// (which must lie between `s0` and `s1` inclusive, ordered along the
/// direction of integration).
pub struct AdaptiveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub guard: f64,
    pub h_init: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            rtol: 1e-12,
            atol: 1e-13,
            guard: 1e6,
            h_init: 1e-3,
        }
    }
}

pub fn integrate_adaptive<F>(
    f: &F,
    s0: f64,
    s1: f64,
    y0: &[Complex64],
    outputs: &[f64],
    opts: &AdaptiveOptions,
) -> Result<Vec<Vec<Complex64>>, OdeError>
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    let dir = if s1 >= s0 { 1.0 } else { -1.0 };
    let mut s = s0;
    let mut y = y0.to_vec();
    let mut h = opts.h_init.min((s1 - s0).abs().max(1e-14)) * dir;
    let mut results = Vec::with_capacity(outputs.len());
    let mut out_iter = outputs.iter().peekable();

    // emit any outputs at the start point
    while let Some(&&so) = out_iter.peek() {
        if (so - s0).abs() < 1e-14 {
            results.push(y.clone());
            out_iter.next();
        } else {
            break;
        }
    }

    let span = (s1 - s0).abs();
    let min_h = span * 1e-14 + 1e-300;
    while (s1 - s) * dir > 1e-14 * span.max(1.0) {
        // do not step past the next output point or the end
        let mut target = s1;
        if let Some(&&so) = out_iter.peek() {
            if (so - s) * dir < (target - s) * dir {
                target = so;
            }
        }
        if (h * dir) > (target - s) * dir {
            h = target - s;
        }
        let (y_new, err) = dp_step(f, s, &y, h);
        let tol = opts.atol
            + opts.rtol
                * y.iter()
                    .zip(&y_new)
                    .map(|(a, b)| a.norm().max(b.norm()))
                    .fold(0.0, f64::max);
        if err <= tol || h.abs() <= min_h * 10.0 {
            s += h;
            y = y_new;
            if y.iter().map(|v| v.norm()).fold(0.0, f64::max) > opts.guard {
                return Err(OdeError::Diverged { at: s, guard: opts.guard });
            }
            while let Some(&&so) = out_iter.peek() {
                if (so - s).abs() <= 1e-12 * span.max(1.0) {
                    results.push(y.clone());
                    out_iter.next();
                } else {
                    break;
                }
            }
        }
        // PI-style step update
        let scale = if err > 0.0 {
            0.9 * (tol / err).powf(0.2)
        } else {
            5.0
        };
        h *= scale.clamp(0.2, 5.0);
        if h.abs() < min_h {
            return Err(OdeError::StepUnderflow { at: s, h });
        }
    }
    // emit trailing outputs at the endpoint
    for _ in out_iter {
        results.push(y.clone());
    }
    Ok(results)
}

fn dp_step<F>(f: &F, s: f64, y: &[Complex64], h: f64) -> (Vec<Complex64>, f64)
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    let n = y.len();
    let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
    for stage in 0..7 {
        let mut ys = y.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = DP_A[stage][j];
            if a != 0.0 {
                for i in 0..n {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k.push(f(s + DP_C[stage] * h, &ys));
    }
    let mut y5 = y.to_vec();
    let mut err = 0.0f64;
    for i in 0..n {
        let mut acc5 = Complex64::ZERO;
        let mut acc4 = Complex64::ZERO;
        for stage in 0..7 {
            acc5 += DP_B5[stage] * k[stage][i];
            acc4 += DP_B4[stage] * k[stage][i];
        }
        y5[i] += h * acc5;
        err = err.max((h * (acc5 - acc4)).norm());
    }
    (y5, err)
}
