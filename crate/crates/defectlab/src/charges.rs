//! Conserved-charge ladders and their oracles.
//!
//! Three ladders of densities are generated once, exactly, from their
//! recursions over the symbolic engine:
//!
//! * space Gamma-ladder: `G1 = q*`, `G_{n+1} = dx G_n - eps q sum G_k G_{n-k}`,
//!   paired with the expansion `Gamma ~ -eps sum G_n / (2 i l)^n` of the
//!   x-Riccati solution `Gamma_x = 2 i l Gamma + eps q* - q Gamma^2`;
//! * space w-ladder: `w1 = q`, `w_{n+1} = -i dx w_n + eps q* sum w_k w_{n-k}`,
//!   paired with `Psi^1/Psi^2 ~ sum (-i)^{n-1} w_n / (2 i l)^n`;
//! * time gamma-ladder: `g1 = -q*`, `g2 = -q*_x`,
//!   `g_{n+2} = i dt g_n + 2 eps |q|^2 g_n + eps q sum_{k<=n} g_k g_{n+1-k}
//!    - eps q_x sum_{k<n} g_k g_{n-k}`, paired with
//!   `Gamma ~ eps sum g_n / (2 i l)^n` of the t-Riccati.
//!
//! The sign of the quadratic term in the Gamma-recursion is fixed by three
//! independent requirements checked in the tests: the numeric Riccati
//! expansion, the pointwise identity `(q* w_n)* = i^{n-1} q G_n`, and
//! `H_S = -Re J_3`.

use num_complex::Complex64;

use crate::field::ExactSolution;
use crate::lattice::{stencil_derivative, SeriesJet, SpaceSlice, TimeSeries};
use crate::ode::{integrate_adaptive, AdaptiveOptions, OdeError};
use crate::symbolic::{Field, GaussRat, JetVar, SymExpr};
use crate::Epsilon;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChargeError {
    #[error("ladder kind {0:?} cannot be integrated against a {1} state")]
    KindMismatch(LadderKind, &'static str),
    #[error("ladder holds orders 1..={max} (asked for {got})")]
    OrderOutOfRange { max: usize, got: usize },
    #[error(transparent)]
    Ode(#[from] OdeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    SpaceGamma,
    SpaceW,
    TimeGamma,
}

/// Ordered list of charge densities generated from one recursion.
#[derive(Debug, Clone)]
pub struct ChargeLadder {
    pub kind: LadderKind,
    pub epsilon: Epsilon,
    /// `densities[n-1]` is the order-n density as an exact differential
    /// polynomial in the jets of q and q*.
    pub densities: Vec<SymExpr>,
}

#[derive(Debug, Clone, Copy)]
pub struct ChargeValue {
    pub order: usize,
    pub value: Complex64,
    pub kind: LadderKind,
}

fn qvar(dx: u8, dt: u8) -> SymExpr {
    SymExpr::var(JetVar::new(Field::Q, dx, dt, 0))
}

fn qsvar(dx: u8, dt: u8) -> SymExpr {
    SymExpr::var(JetVar::new(Field::QStar, dx, dt, 0))
}

/// Space Gamma-ladder to order `n_max`.
pub fn space_gamma_ladder(n_max: usize, epsilon: Epsilon) -> ChargeLadder {
    assert!(n_max >= 1);
    let e = GaussRat::from_int(epsilon as i64);
    let mut g: Vec<SymExpr> = vec![qsvar(0, 0)];
    while g.len() < n_max {
        let n = g.len();
        let mut quad = SymExpr::zero();
        for k in 1..n {
            quad = quad.add(&g[k - 1].mul(&g[n - k - 1]));
        }
        let next = g[n - 1].dx().sub(&qvar(0, 0).mul(&quad).scale(&e));
        g.push(next);
    }
    ChargeLadder {
        kind: LadderKind::SpaceGamma,
        epsilon,
        densities: g,
    }
}

/// Space w-ladder to order `n_max`.
pub fn space_w_ladder(n_max: usize, epsilon: Epsilon) -> ChargeLadder {
    assert!(n_max >= 1);
    let e = GaussRat::from_int(epsilon as i64);
    let mut w: Vec<SymExpr> = vec![qvar(0, 0)];
    while w.len() < n_max {
        let n = w.len();
        let mut quad = SymExpr::zero();
        for k in 1..n {
            quad = quad.add(&w[k - 1].mul(&w[n - k - 1]));
        }
        let next = w[n - 1]
            .dx()
            .scale(&GaussRat::i().neg())
            .add(&qsvar(0, 0).mul(&quad).scale(&e));
        w.push(next);
    }
    ChargeLadder {
        kind: LadderKind::SpaceW,
        epsilon,
        densities: w,
    }
}

/// Time gamma-ladder to order `n_max`.
pub fn time_gamma_ladder(n_max: usize, epsilon: Epsilon) -> ChargeLadder {
    assert!(n_max >= 1);
    let e = GaussRat::from_int(epsilon as i64);
    let two_e = GaussRat::from_int(2 * epsilon as i64);
    let mut g: Vec<SymExpr> = vec![qsvar(0, 0).neg()];
    if n_max >= 2 {
        g.push(qsvar(1, 0).neg());
    }
    while g.len() < n_max {
        let n = g.len() - 1; // producing g_{n+2} from g_n
        let qq = qvar(0, 0).mul(&qsvar(0, 0));
        let mut sum_a = SymExpr::zero(); // sum_{k=1}^{n} g_k g_{n+1-k}
        for k in 1..=n {
            sum_a = sum_a.add(&g[k - 1].mul(&g[n - k]));
        }
        let mut sum_b = SymExpr::zero(); // sum_{k=1}^{n-1} g_k g_{n-k}
        for k in 1..n {
            sum_b = sum_b.add(&g[k - 1].mul(&g[n - k - 1]));
        }
        let next = g[n - 1]
            .dt()
            .scale(&GaussRat::i())
            .add(&qq.mul(&g[n - 1]).scale(&two_e))
            .add(&qvar(0, 0).mul(&sum_a).scale(&e))
            .sub(&qvar(1, 0).mul(&sum_b).scale(&e));
        g.push(next);
    }
    ChargeLadder {
        kind: LadderKind::TimeGamma,
        epsilon,
        densities: g,
    }
}

impl ChargeLadder {
    pub fn density(&self, n: usize) -> Result<&SymExpr, ChargeError> {
        self.densities
            .get(n - 1)
            .ok_or(ChargeError::OrderOutOfRange {
                max: self.densities.len(),
                got: n,
            })
    }

    /// Evaluate the order-n density on a jet provider.
    pub fn eval(
        &self,
        n: usize,
        jets: &impl Fn(JetVar) -> Complex64,
    ) -> Result<Complex64, ChargeError> {
        let d = self.density(n)?;
        Ok(d.eval(jets, Complex64::ZERO, Complex64::ZERO, Complex64::ZERO))
    }

    /// Reduce all time derivatives using the NLS flow
    /// `q_t = i q_xx - 2 i eps q^2 q*` (and conjugate), leaving a polynomial
    /// in pure x-jets. Valid only when evaluating on solutions.
    pub fn on_shell(&self) -> ChargeLadder {
        ChargeLadder {
            kind: self.kind,
            epsilon: self.epsilon,
            densities: self
                .densities
                .iter()
                .map(|d| reduce_time_derivatives(d, self.epsilon))
                .collect(),
        }
    }
}

/// Substitute `q_t`, `q*_t` (and their x/t-derivatives) by the NLS right-hand
/// sides until only pure x-jets remain.
pub fn reduce_time_derivatives(expr: &SymExpr, epsilon: Epsilon) -> SymExpr {
    let e = GaussRat::from_int(epsilon as i64);
    let two = GaussRat::from_int(2);
    let qt_rhs = qvar(2, 0)
        .scale(&GaussRat::i())
        .sub(&qvar(0, 0).mul(&qvar(0, 0)).mul(&qsvar(0, 0)).scale(&GaussRat::i()).scale(&two).scale(&e));
    let qst_rhs = qsvar(2, 0)
        .scale(&GaussRat::i().neg())
        .add(&qvar(0, 0).mul(&qsvar(0, 0)).mul(&qsvar(0, 0)).scale(&GaussRat::i()).scale(&two).scale(&e));

    let mut out = expr.clone();
    loop {
        let target = out
            .variables()
            .into_iter()
            .find(|v| v.dt >= 1 && matches!(v.field, Field::Q | Field::QStar));
        let Some(v) = target else { break };
        // v = dx^a dt^b f with b >= 1: rewrite as dx^a dt^{b-1} (f_t)
        let base = match v.field {
            Field::Q => &qt_rhs,
            Field::QStar => &qst_rhs,
            _ => unreachable!(),
        };
        let mut replacement = base.clone();
        for _ in 0..v.dx {
            replacement = replacement.dx();
        }
        for _ in 0..(v.dt - 1) {
            replacement = replacement.dt();
        }
        out = out.substitute(v, &replacement);
    }
    out
}

/// Jet provider backed by a space slice: stencil derivatives of the primal
/// and conjugate arrays up to third order.
pub struct SliceJets {
    pub q: Vec<Vec<Complex64>>,      // q, q_x, q_xx, q_xxx
    pub q_conj: Vec<Vec<Complex64>>, // independent conjugate stack
}

impl SliceJets {
    pub fn build(slice: &SpaceSlice) -> Self {
        let h = slice.grid.spacing();
        let per = slice.grid.periodic;
        let stack = |f: &Vec<Complex64>| {
            vec![
                f.clone(),
                stencil_derivative(f, h, 1, per),
                stencil_derivative(f, h, 2, per),
                stencil_derivative(f, h, 3, per),
            ]
        };
        SliceJets {
            q: stack(&slice.q),
            q_conj: stack(&slice.q_conj),
        }
    }

    pub fn provider(&self, i: usize) -> impl Fn(JetVar) -> Complex64 + '_ {
        move |v: JetVar| {
            assert_eq!(v.dt, 0, "space slices carry no time derivatives");
            match v.field {
                Field::Q => self.q[v.dx as usize][i],
                Field::QStar => self.q_conj[v.dx as usize][i],
                _ => panic!("slice jets hold q and q* only"),
            }
        }
    }
}

/// Jet provider for a node of a time series (x-derivatives up to the stored
/// first order, time derivatives by differencing, including mixed `q_xt`).
pub fn series_jet_provider(jet: &SeriesJet) -> impl Fn(JetVar) -> Complex64 + '_ {
    let j = *jet;
    move |v: JetVar| match (v.field, v.dx, v.dt) {
        (Field::Q, 0, 0) => j.q,
        (Field::QStar, 0, 0) => j.q_conj,
        (Field::Q, 1, 0) => j.q_x,
        (Field::QStar, 1, 0) => j.q_conj_x,
        (Field::Q, 0, 1) => j.q_t,
        (Field::QStar, 0, 1) => j.q_conj_t,
        (Field::Q, 1, 1) => j.q_xt,
        (Field::QStar, 1, 1) => j.q_conj_xt,
        _ => panic!("series jets provide dx<=1, dt<=1 (asked {v:?})"),
    }
}

/// Quadrature of sampled values: exact-period trapezoid on periodic grids,
/// composite Simpson on open grids.
pub fn quadrature(values: &[Complex64], h: f64, periodic: bool) -> Complex64 {
    if periodic {
        values.iter().sum::<Complex64>() * h
    } else {
        let n = values.len();
        let mut acc = Complex64::ZERO;
        let mut i = 0;
        while i + 2 < n {
            acc += (values[i] + 4.0 * values[i + 1] + values[i + 2]) * (h / 3.0);
            i += 2;
        }
        if i + 1 < n {
            acc += (values[i] + values[i + 1]) * (0.5 * h);
        }
        acc
    }
}

/// `J_n = int q G_n dx` (Gamma-ladder) or `I_n = int q* w_n dx` (w-ladder)
/// over a space slice.
pub fn integrate_space_charge(
    ladder: &ChargeLadder,
    slice: &SpaceSlice,
    n: usize,
) -> Result<ChargeValue, ChargeError> {
    let weight_is_conj = match ladder.kind {
        LadderKind::SpaceGamma => false,
        LadderKind::SpaceW => true,
        LadderKind::TimeGamma => {
            return Err(ChargeError::KindMismatch(ladder.kind, "space-slice"))
        }
    };
    let jets = SliceJets::build(slice);
    let npts = slice.grid.n_points;
    let mut vals = Vec::with_capacity(npts);
    for i in 0..npts {
        let p = jets.provider(i);
        let dens = ladder.eval(n, &p)?;
        let w = if weight_is_conj { slice.q_conj[i] } else { slice.q[i] };
        vals.push(w * dens);
    }
    Ok(ChargeValue {
        order: n,
        value: quadrature(&vals, slice.grid.spacing(), slice.grid.periodic),
        kind: ladder.kind,
    })
}

/// `K_n = int i (q_x g_n - q g_{n+1}) dt` over a time series. The ladder must
/// hold at least `n+1` orders.
pub fn integrate_time_charge(
    ladder: &ChargeLadder,
    series: &TimeSeries,
    n: usize,
) -> Result<ChargeValue, ChargeError> {
    if ladder.kind != LadderKind::TimeGamma {
        return Err(ChargeError::KindMismatch(ladder.kind, "time-series"));
    }
    let jets = crate::lattice::series_jets(series);
    let mut vals = Vec::with_capacity(jets.len());
    for j in &jets {
        let p = series_jet_provider(j);
        let gn = ladder.eval(n, &p)?;
        let gn1 = ladder.eval(n + 1, &p)?;
        vals.push(Complex64::I * (j.q_x * gn - j.q * gn1));
    }
    Ok(ChargeValue {
        order: n,
        value: quadrature(&vals, series.grid.spacing(), series.grid.periodic),
        kind: ladder.kind,
    })
}

/// `H_S` density `|q_x|^2 + eps |q|^4`, written holomorphically in the
/// independent conjugates.
pub fn hamiltonian_s_density(jet: &crate::field::FieldJet, epsilon: Epsilon) -> Complex64 {
    let qq = jet.q * jet.q_conj;
    jet.q_x * jet.q_conj_x + epsilon as f64 * qq * qq
}

/// `H_T` density `-|q_x|^2 - (i/2)(q* q_t - q*_t q) + eps |q|^4`.
pub fn hamiltonian_t_density(jet: &crate::field::FieldJet, epsilon: Epsilon) -> Complex64 {
    let qq = jet.q * jet.q_conj;
    -jet.q_x * jet.q_conj_x - 0.5 * Complex64::I * (jet.q_conj * jet.q_t - jet.q_conj_t * jet.q)
        + epsilon as f64 * qq * qq
}

/// Continuous field access for Riccati integration in x at fixed time.
pub trait SpaceField {
    fn q(&self, x: f64) -> Complex64;
    fn q_conj(&self, x: f64) -> Complex64 {
        self.q(x).conj()
    }
}

/// Continuous access to `(q, q_x)` along a time line at fixed x0.
pub trait TimeField {
    fn q(&self, t: f64) -> Complex64;
    fn q_x(&self, t: f64) -> Complex64;
    fn q_conj(&self, t: f64) -> Complex64 {
        self.q(t).conj()
    }
    fn q_x_conj(&self, t: f64) -> Complex64 {
        self.q_x(t).conj()
    }
}

/// Exact solution restricted to a fixed time.
pub struct SolutionAtTime<'a> {
    pub sol: &'a ExactSolution,
    pub t: f64,
}

impl SpaceField for SolutionAtTime<'_> {
    fn q(&self, x: f64) -> Complex64 {
        self.sol.eval(x, self.t)
    }
}

/// Exact solution restricted to a fixed position.
pub struct SolutionAtPoint<'a> {
    pub sol: &'a ExactSolution,
    pub x0: f64,
}

impl TimeField for SolutionAtPoint<'_> {
    fn q(&self, t: f64) -> Complex64 {
        self.sol.eval(self.x0, t)
    }
    fn q_x(&self, t: f64) -> Complex64 {
        self.sol.eval_dx(self.x0, t)
    }
}

/// Cubic-interpolated sampled slice (periodic wrap or clamped window).
pub struct InterpolatedSlice<'a> {
    pub slice: &'a SpaceSlice,
}

impl SpaceField for InterpolatedSlice<'_> {
    fn q(&self, x: f64) -> Complex64 {
        interp_cubic(
            &self.slice.q,
            self.slice.grid.start,
            self.slice.grid.spacing(),
            self.slice.grid.periodic,
            x,
        )
    }
    fn q_conj(&self, x: f64) -> Complex64 {
        interp_cubic(
            &self.slice.q_conj,
            self.slice.grid.start,
            self.slice.grid.spacing(),
            self.slice.grid.periodic,
            x,
        )
    }
}

/// Cubic-interpolated time series.
pub struct InterpolatedSeries<'a> {
    pub series: &'a TimeSeries,
}

impl TimeField for InterpolatedSeries<'_> {
    fn q(&self, t: f64) -> Complex64 {
        let g = &self.series.grid;
        interp_cubic(&self.series.q, g.start, g.spacing(), g.periodic, t)
    }
    fn q_x(&self, t: f64) -> Complex64 {
        let g = &self.series.grid;
        interp_cubic(&self.series.q_x, g.start, g.spacing(), g.periodic, t)
    }
    fn q_conj(&self, t: f64) -> Complex64 {
        let g = &self.series.grid;
        interp_cubic(&self.series.q_conj, g.start, g.spacing(), g.periodic, t)
    }
    fn q_x_conj(&self, t: f64) -> Complex64 {
        let g = &self.series.grid;
        interp_cubic(&self.series.q_x_conj, g.start, g.spacing(), g.periodic, t)
    }
}

/// Four-point Lagrange interpolation on a uniform grid.
pub fn interp_cubic(
    f: &[Complex64],
    start: f64,
    h: f64,
    periodic: bool,
    x: f64,
) -> Complex64 {
    let n = f.len() as isize;
    let s = (x - start) / h;
    let j = s.floor() as isize;
    let u = s - j as f64;
    let get = |off: isize| -> Complex64 {
        let mut k = j + off;
        if periodic {
            k = k.rem_euclid(n);
        } else {
            k = k.clamp(0, n - 1);
        }
        f[k as usize]
    };
    // nodes at u = -1, 0, 1, 2
    let (fm1, f0, f1, f2) = (get(-1), get(0), get(1), get(2));
    let um1 = u + 1.0;
    let u0 = u;
    let u1 = u - 1.0;
    let u2 = u - 2.0;
    fm1 * (u0 * u1 * u2 / -6.0)
        + f0 * (um1 * u1 * u2 / 2.0)
        + f1 * (um1 * u0 * u2 / -2.0)
        + f2 * (um1 * u0 * u1 / 6.0)
}

/// Numeric solution of the x-Riccati `G_x = 2 i l G + eps q* - q G^2`,
/// reported at the requested output abscissae (ordered along the direction
/// of integration from `x_start`).
pub fn riccati_solve_x(
    field: &impl SpaceField,
    lambda: Complex64,
    gamma0: Complex64,
    x_start: f64,
    outputs: &[f64],
    epsilon: Epsilon,
    opts: &AdaptiveOptions,
) -> Result<Vec<Complex64>, ChargeError> {
    let e = epsilon as f64;
    let rhs = move |x: f64, y: &[Complex64]| {
        let g = y[0];
        vec![2.0 * Complex64::I * lambda * g + e * field.q_conj(x) - field.q(x) * g * g]
    };
    let x_end = *outputs.last().unwrap_or(&x_start);
    let res = integrate_adaptive(&rhs, x_start, x_end, &[gamma0], outputs, opts)?;
    Ok(res.into_iter().map(|v| v[0]).collect())
}

/// x-Riccati for the reciprocal variable `G' = Psi^1/Psi^2`:
/// `G'_x = -2 i l G' + q - eps q* G'^2` (w-ladder oracle).
pub fn riccati_solve_x_w(
    field: &impl SpaceField,
    lambda: Complex64,
    gamma0: Complex64,
    x_start: f64,
    outputs: &[f64],
    epsilon: Epsilon,
    opts: &AdaptiveOptions,
) -> Result<Vec<Complex64>, ChargeError> {
    let e = epsilon as f64;
    let rhs = move |x: f64, y: &[Complex64]| {
        let g = y[0];
        vec![-2.0 * Complex64::I * lambda * g + field.q(x) - e * field.q_conj(x) * g * g]
    };
    let x_end = *outputs.last().unwrap_or(&x_start);
    let res = integrate_adaptive(&rhs, x_start, x_end, &[gamma0], outputs, opts)?;
    Ok(res.into_iter().map(|v| v[0]).collect())
}

/// Numeric solution of the t-Riccati
/// `G_t = V21 + (V22 - V11) G - V12 G^2` with V entries from the field line.
pub fn riccati_solve_t(
    field: &impl TimeField,
    lambda: Complex64,
    gamma0: Complex64,
    t_start: f64,
    outputs: &[f64],
    epsilon: Epsilon,
    opts: &AdaptiveOptions,
) -> Result<Vec<Complex64>, ChargeError> {
    let e = epsilon as f64;
    let rhs = move |t: f64, y: &[Complex64]| {
        let g = y[0];
        let q = field.q(t);
        let qs = field.q_conj(t);
        let qx = field.q_x(t);
        let qxs = field.q_x_conj(t);
        let i = Complex64::I;
        let v11 = -2.0 * i * lambda * lambda - i * e * q * qs;
        let v12 = 2.0 * lambda * q + i * qx;
        let v21 = e * (2.0 * lambda * qs - i * qxs);
        let v22 = -v11;
        vec![v21 + (v22 - v11) * g - v12 * g * g]
    };
    let t_end = *outputs.last().unwrap_or(&t_start);
    let res = integrate_adaptive(&rhs, t_start, t_end, &[gamma0], outputs, opts)?;
    Ok(res.into_iter().map(|v| v[0]).collect())
}

/// Seed value on the asymptotic branch: `prefactor * sum d_n / (2 i l)^n`
/// where the `d_n` are ladder densities evaluated at the seed point.
pub fn series_seed(
    densities: &[Complex64],
    lambda: Complex64,
    prefactor: Complex64,
) -> Complex64 {
    let z = 2.0 * Complex64::I * lambda;
    let mut acc = Complex64::ZERO;
    let mut zn = Complex64::ONE;
    for d in densities {
        zn *= z;
        acc += d / zn;
    }
    prefactor * acc
}

/// Exact-solve a small complex Vandermonde system: given samples
/// `f(y_i) = sum_k c_k y_i^{k}` for k = 0..m-1, return the c_k.
pub fn fit_power_series(ys: &[Complex64], fs: &[Complex64], m: usize) -> Vec<Complex64> {
    assert_eq!(ys.len(), fs.len());
    assert!(ys.len() >= m);
    let n = ys.len();
    // normal equations are unnecessary at these sizes; build the Vandermonde
    // (least squares reduces to exact solve when n == m)
    let mut a = vec![vec![Complex64::ZERO; m]; n];
    for (i, &y) in ys.iter().enumerate() {
        let mut p = Complex64::ONE;
        for j in 0..m {
            a[i][j] = p;
            p *= y;
        }
    }
    // solve A^H A c = A^H f by Gaussian elimination
    let mut m_ata = vec![vec![Complex64::ZERO; m + 1]; m];
    for r in 0..m {
        for c in 0..m {
            let mut s = Complex64::ZERO;
            for i in 0..n {
                s += a[i][r].conj() * a[i][c];
            }
            m_ata[r][c] = s;
        }
        let mut s = Complex64::ZERO;
        for i in 0..n {
            s += a[i][r].conj() * fs[i];
        }
        m_ata[r][m] = s;
    }
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&r1, &r2| {
                m_ata[r1][col]
                    .norm()
                    .partial_cmp(&m_ata[r2][col].norm())
                    .unwrap()
            })
            .unwrap();
        m_ata.swap(col, piv);
        let p = m_ata[col][col];
        for c in col..=m {
            m_ata[col][c] /= p;
        }
        for r in 0..m {
            if r != col {
                let f = m_ata[r][col];
                for c in col..=m {
                    let v = m_ata[col][c];
                    m_ata[r][c] -= f * v;
                }
            }
        }
    }
    (0..m).map(|r| m_ata[r][m]).collect()
}

/// Sequential peel of asymptotic coefficients: given
/// `F(l) ~ prefactor * sum_n d_n / (2 i l)^n` sampled at `lams`, and the
/// exact lower-order densities `known` (d_1..d_{k-1}), estimate `d_k` by a
/// Richardson fit of the peeled remainder in `1/(2 i l)`.
pub fn peel_coefficient(
    lams: &[Complex64],
    samples: &[Complex64],
    prefactor: Complex64,
    known: &[Complex64],
    richardson_terms: usize,
) -> Complex64 {
    let k = known.len() + 1;
    let mut ys = Vec::with_capacity(lams.len());
    let mut fs = Vec::with_capacity(lams.len());
    for (i, &l) in lams.iter().enumerate() {
        let z = 2.0 * Complex64::I * l;
        let mut rem = samples[i] / prefactor;
        let mut zn = Complex64::ONE;
        for d in known {
            zn *= z;
            rem -= d / zn;
        }
        // rem ~ d_k / z^k + d_{k+1} / z^{k+1} + ...
        fs.push(rem * z.powu(k as u32));
        ys.push(1.0 / z);
    }
    let coeffs = fit_power_series(&ys, &fs, richardson_terms.min(ys.len()));
    coeffs[0]
}

/// Transfer-normalized space charge: the coefficient of `1/lambda^n` in the
/// large-lambda expansion of `arccos(T_S/2) + lambda L`, expressed through
/// `J_n`: `Ihat_n = i J_n / (2i)^n`.
pub fn transfer_charge(j_n: Complex64, n: usize) -> Complex64 {
    Complex64::I * j_n / (2.0 * Complex64::I).powu(n as u32)
}


/// Exact derivatives `d^n q/dx^n` at `(x, t)` for the closed-form solutions,
/// any order: plane waves and vacuum are trivial; solitons use the
/// tanh-polynomial recursion `g_{n+1} = a(1 - th^2) dg_n/dth + g_n mu(th)`
/// for `q^{(n)} = g_n(th) q`.
pub fn solution_x_derivatives(
    sol: &ExactSolution,
    x: f64,
    t: f64,
    max_order: usize,
) -> Vec<Complex64> {
    use crate::field::SolutionKind;
    let q0 = sol.eval(x, t);
    match sol.kind {
        SolutionKind::Vacuum => vec![Complex64::ZERO; max_order + 1],
        SolutionKind::PlaneWave { wavenumber, .. } => (0..=max_order)
            .map(|n| (Complex64::I * wavenumber).powu(n as u32) * q0)
            .collect(),
        SolutionKind::OneSoliton {
            amplitude: a,
            velocity: v,
            x_offset,
            ..
        } => {
            let th = (a * (x - v * t - x_offset)).tanh();
            // polynomials in th over C; g_1 = iv/2 - a th
            let mut polys: Vec<Vec<Complex64>> = Vec::with_capacity(max_order);
            polys.push(vec![Complex64::new(0.0, 0.5 * v), Complex64::new(-a, 0.0)]);
            for n in 1..max_order {
                let g = &polys[n - 1];
                // derivative w.r.t. th times a(1 - th^2)
                let mut dg = vec![Complex64::ZERO; g.len().max(2) + 1];
                for (p, &cp) in g.iter().enumerate().skip(1) {
                    let d = cp * p as f64 * a;
                    dg[p - 1] += d;
                    if p + 1 < dg.len() {
                        dg[p + 1] -= d;
                    } else {
                        dg.push(-d);
                    }
                }
                // plus g * (iv/2 - a th)
                let mut prod = vec![Complex64::ZERO; g.len() + 1];
                for (p, &cp) in g.iter().enumerate() {
                    prod[p] += cp * Complex64::new(0.0, 0.5 * v);
                    prod[p + 1] -= cp * a;
                }
                let len = dg.len().max(prod.len());
                let mut next = vec![Complex64::ZERO; len];
                for (p, item) in next.iter_mut().enumerate() {
                    if p < dg.len() {
                        *item += dg[p];
                    }
                    if p < prod.len() {
                        *item += prod[p];
                    }
                }
                while next.last().is_some_and(|c| c.norm() == 0.0) {
                    next.pop();
                }
                polys.push(next);
            }
            let mut out = vec![q0];
            for g in &polys {
                let mut val = Complex64::ZERO;
                let mut thp = Complex64::ONE;
                for &cp in g {
                    val += cp * thp;
                    thp *= th;
                }
                out.push(val * q0);
            }
            out.truncate(max_order + 1);
            out
        }
    }
}
