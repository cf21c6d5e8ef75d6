//! Sampled field states on grids: space slices, time series, stencils, and
//! jet extraction. Conjugate arrays are stored alongside the primal ones so
//! functionals can treat them as independent coordinates.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{ExactSolution, FieldJet};
use crate::grid::Grid1D;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("index {index} outside the usable stencil range {lo}..{hi}")]
    OutOfStencil { index: usize, lo: usize, hi: usize },
    #[error("operation requires a {expected} state")]
    KindMismatch { expected: &'static str },
    #[error("sample arrays must all have the grid length {expected} (got {got})")]
    LengthMismatch { expected: usize, got: usize },
}

/// Space slice `q(., t0)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSlice {
    pub grid: Grid1D,
    pub q: Vec<Complex64>,
    pub q_conj: Vec<Complex64>,
}

/// Time series `(q, q_x)(x0, .)` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub grid: Grid1D,
    pub x0: f64,
    pub q: Vec<Complex64>,
    pub q_conj: Vec<Complex64>,
    pub q_x: Vec<Complex64>,
    pub q_x_conj: Vec<Complex64>,
}

/// Sampled field state: either a space slice at fixed time or a time series
/// at fixed position.
#[derive(Debug, Clone, PartialEq)]
pub enum LatticeState {
    SpaceSlice(SpaceSlice),
    TimeSeries(TimeSeries),
}

impl SpaceSlice {
    pub fn new(grid: Grid1D, q: Vec<Complex64>) -> Result<Self, LatticeError> {
        if q.len() != grid.n_points {
            return Err(LatticeError::LengthMismatch {
                expected: grid.n_points,
                got: q.len(),
            });
        }
        let q_conj = q.iter().map(|v| v.conj()).collect();
        Ok(SpaceSlice { grid, q, q_conj })
    }

    pub fn sample(sol: &ExactSolution, grid: Grid1D, t: f64) -> Self {
        let q = grid.points().map(|x| sol.eval(x, t)).collect();
        SpaceSlice::new(grid, q).expect("length matches by construction")
    }

    /// Conjugated copy: q and q* arrays swapped.
    pub fn conjugated(&self) -> Self {
        SpaceSlice {
            grid: self.grid,
            q: self.q_conj.clone(),
            q_conj: self.q.clone(),
        }
    }

    pub fn derivative(&self, order: usize) -> Vec<Complex64> {
        stencil_derivative(&self.q, self.grid.spacing(), order, self.grid.periodic)
    }

    pub fn derivative_conj(&self, order: usize) -> Vec<Complex64> {
        stencil_derivative(&self.q_conj, self.grid.spacing(), order, self.grid.periodic)
    }
}

impl TimeSeries {
    pub fn new(
        grid: Grid1D,
        x0: f64,
        q: Vec<Complex64>,
        q_x: Vec<Complex64>,
    ) -> Result<Self, LatticeError> {
        if q.len() != grid.n_points {
            return Err(LatticeError::LengthMismatch {
                expected: grid.n_points,
                got: q.len(),
            });
        }
        if q_x.len() != grid.n_points {
            return Err(LatticeError::LengthMismatch {
                expected: grid.n_points,
                got: q_x.len(),
            });
        }
        let q_conj = q.iter().map(|v| v.conj()).collect();
        let q_x_conj = q_x.iter().map(|v| v.conj()).collect();
        Ok(TimeSeries {
            grid,
            x0,
            q,
            q_conj,
            q_x,
            q_x_conj,
        })
    }

    pub fn sample(sol: &ExactSolution, grid: Grid1D, x0: f64) -> Self {
        let q = grid.points().map(|t| sol.eval(x0, t)).collect();
        let q_x = grid.points().map(|t| sol.eval_dx(x0, t)).collect();
        TimeSeries::new(grid, x0, q, q_x).expect("length matches by construction")
    }

    /// Time derivative of one of the four stored arrays by 4th-order
    /// centered differences (periodic wrap or interior-shifted stencils).
    pub fn ddt(&self, arr: &[Complex64]) -> Vec<Complex64> {
        stencil_derivative(arr, self.grid.spacing(), 1, self.grid.periodic)
    }
}

/// Centered finite-difference derivative of `order` in {1, 2, 3} at 4th-order
/// accuracy. On open grids the outermost points reuse the nearest interior
/// stencil (shifted window), which keeps the order away from the margin; the
/// two-point margin should be excluded from diagnostics.
pub fn stencil_derivative(
    f: &[Complex64],
    h: f64,
    order: usize,
    periodic: bool,
) -> Vec<Complex64> {
    let n = f.len();
    let reach = stencil_reach(order);
    let mut out = vec![Complex64::ZERO; n];
    for i in 0..n {
        let centered = if periodic {
            true
        } else {
            i >= reach && i + reach < n
        };
        if centered {
            out[i] = apply_centered(f, i, h, order, periodic);
        } else {
            // shifted interior evaluation; accuracy degrades at the margin
            let j = i.clamp(reach, n - 1 - reach);
            out[i] = apply_centered(f, j, h, order, periodic);
        }
    }
    out
}

fn stencil_reach(order: usize) -> usize {
    match order {
        1 | 2 => 2,
        3 => 3,
        _ => panic!("stencil order {order} not supported"),
    }
}

fn apply_centered(f: &[Complex64], i: usize, h: f64, order: usize, periodic: bool) -> Complex64 {
    let n = f.len() as isize;
    let get = |off: isize| -> Complex64 {
        let mut j = i as isize + off;
        if periodic {
            j = j.rem_euclid(n);
        }
        f[j as usize]
    };
    match order {
        1 => (8.0 * (get(1) - get(-1)) - (get(2) - get(-2))) / (12.0 * h),
        2 => {
            (-get(2) + 16.0 * get(1) - 30.0 * get(0) + 16.0 * get(-1) - get(-2)) / (12.0 * h * h)
        }
        3 => {
            (-get(-3) + 8.0 * get(-2) - 13.0 * get(-1) + 13.0 * get(1) - 8.0 * get(2) + get(3))
                / (8.0 * h * h * h)
        }
        _ => unreachable!(),
    }
}

/// Jet at a grid index of a space slice. Spatial derivatives come from
/// 4th-order central differences; the conjugate entries are exact conjugates
/// of the primal stencil values. Time derivatives are absent (zero) unless a
/// neighbor pair of slices is supplied.
pub fn jet_from_lattice(
    state: &LatticeState,
    index: usize,
    dt_neighbors: Option<(&SpaceSlice, &SpaceSlice, f64)>,
) -> Result<FieldJet, LatticeError> {
    let slice = match state {
        LatticeState::SpaceSlice(s) => s,
        LatticeState::TimeSeries(_) => {
            return Err(LatticeError::KindMismatch {
                expected: "space-slice",
            })
        }
    };
    let n = slice.q.len();
    let reach = 2;
    if !slice.grid.periodic && (index < reach || index + reach >= n) {
        return Err(LatticeError::OutOfStencil {
            index,
            lo: reach,
            hi: n - reach - 1,
        });
    }
    let h = slice.grid.spacing();
    let q = slice.q[index];
    let q_x = apply_centered(&slice.q, index, h, 1, slice.grid.periodic);
    let q_t = match dt_neighbors {
        Some((before, after, dt)) => (after.q[index] - before.q[index]) / (2.0 * dt),
        None => Complex64::ZERO,
    };
    Ok(FieldJet::conjugate_consistent(q, q_x, q_t))
}

/// Jet values at a node of a time series, with x-derivatives taken from the
/// stored `q_x` array and t-derivatives (including the mixed `q_xt`) by
/// 4th-order differencing along the series. The conjugate entries mirror the
/// independently stored conjugate arrays.
#[derive(Debug, Clone, Copy)]
pub struct SeriesJet {
    pub q: Complex64,
    pub q_conj: Complex64,
    pub q_x: Complex64,
    pub q_conj_x: Complex64,
    pub q_t: Complex64,
    pub q_conj_t: Complex64,
    pub q_xt: Complex64,
    pub q_conj_xt: Complex64,
}

pub fn series_jets(series: &TimeSeries) -> Vec<SeriesJet> {
    let qt = series.ddt(&series.q);
    let qst = series.ddt(&series.q_conj);
    let qxt = series.ddt(&series.q_x);
    let qsxt = series.ddt(&series.q_x_conj);
    (0..series.grid.n_points)
        .map(|i| SeriesJet {
            q: series.q[i],
            q_conj: series.q_conj[i],
            q_x: series.q_x[i],
            q_conj_x: series.q_x_conj[i],
            q_t: qt[i],
            q_conj_t: qst[i],
            q_xt: qxt[i],
            q_conj_xt: qsxt[i],
        })
        .collect()
}

/// Random smooth periodic field: a short trigonometric polynomial with
/// seeded coefficients, scaled to the requested amplitude.
pub fn random_smooth_periodic(
    grid: Grid1D,
    max_mode: usize,
    amplitude: f64,
    seed: u64,
) -> SpaceSlice {
    assert!(grid.periodic, "random smooth fields live on periodic grids");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k1 = 2.0 * std::f64::consts::PI / grid.extent();
    let mut coeffs: Vec<(f64, Complex64)> = Vec::new();
    for m in -(max_mode as i64)..=(max_mode as i64) {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        // damp higher modes to keep the field gentle
        let damp = 1.0 / (1.0 + (m * m) as f64);
        coeffs.push((m as f64 * k1, c * damp));
    }
    let norm: f64 = coeffs.iter().map(|(_, c)| c.norm()).sum();
    let scale = amplitude / norm.max(1e-12);
    let q = grid
        .points()
        .map(|x| {
            coeffs
                .iter()
                .map(|&(k, c)| c * (Complex64::I * k * (x - grid.start)).exp())
                .sum::<Complex64>()
                * scale
        })
        .collect();
    SpaceSlice::new(grid, q).expect("length matches")
}

/// Analytic jets of the same random trig polynomial (exact derivatives),
/// for oracle comparisons against stencil jets.
pub struct TrigPolynomial {
    pub coeffs: Vec<(f64, Complex64)>,
    pub origin: f64,
}

impl TrigPolynomial {
    pub fn from_seed(grid: Grid1D, max_mode: usize, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k1 = 2.0 * std::f64::consts::PI / grid.extent();
        let mut coeffs: Vec<(f64, Complex64)> = Vec::new();
        for m in -(max_mode as i64)..=(max_mode as i64) {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let damp = 1.0 / (1.0 + (m * m) as f64);
            coeffs.push((m as f64 * k1, c * damp));
        }
        let norm: f64 = coeffs.iter().map(|(_, c)| c.norm()).sum();
        let scale = amplitude / norm.max(1e-12);
        TrigPolynomial {
            coeffs: coeffs.into_iter().map(|(k, c)| (k, c * scale)).collect(),
            origin: grid.start,
        }
    }

    pub fn eval_deriv(&self, x: f64, order: u32) -> Complex64 {
        self.coeffs
            .iter()
            .map(|&(k, c)| {
                c * (Complex64::I * k).powu(order) * (Complex64::I * k * (x - self.origin)).exp()
            })
            .sum()
    }
}
