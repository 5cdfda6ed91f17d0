//! Duality upper bound on `I(x; Y)` for the rank-1 channel `Y = s·xᵀ + W`.
//!
//! For any output density `r`,
//!
//! ```text
//! I(x; Y) ≤ −E[log r(Y)] − h(Y | x).
//! ```
//!
//! The density used here lives on SVD coordinates `Y = U Σ Vᴴ` with
//! `P = min(M, N)` and `L = max(M, N)`:
//!
//! * `σ₁` has the law of the nonzero singular value of a noiseless `s·xᵀ`,
//!   `r(σ₁) = 2σ₁/(MNρ) · exp(−σ₁²/(MNρ))`;
//! * `σ₂ > … > σ_P` follow the ordered singular values of an `(M−1)×(N−1)`
//!   i.i.d. CN(0, 1) matrix;
//! * `V` is Haar on the Stiefel manifold `S(N, P)` and `U` is Haar on the
//!   submanifold of `S(M, P)` whose first row is real and nonnegative.
//!
//! The density of `Y` itself follows by dividing by the SVD Jacobian
//! `J = Π σ_i^{2(L−P)+1} · Π_{i<j} (σ_i² − σ_j²)²`.
//!
//! The Haar normalizers are `1/|S(N, P)|` for `V` and `(2π)^P/|S(M, P)|` for
//! `U`, the `(2π)^P` accounting for the `P` phases removed by the sign
//! convention. These constants only move the intercept of the bound, never its
//! growth rate in `log ρ`.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::channel::{sample_power_input, InputKind};
use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::matrix::{vec_norm, ComplexMatrix};
use crate::mc::{map_chunks, Execution, Moments, DEFAULT_CHUNK};
use crate::rng::{sample_cn_vec, sample_gaussian_matrix, RngStream};
use crate::svd::singular_values;

/// Relative collision threshold on `σ_i² − σ_j²`, scaled by `σ₁²`.
pub const COLLISION_EPS: f64 = 1e-12;
/// Largest tolerated fraction of samples rejected for collisions.
pub const MAX_REJECT_FRACTION: f64 = 1e-3;
pub const MIN_SAMPLES: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputDensityParams {
    pub m: usize,
    pub n: usize,
    pub rho: f64,
    pub p: usize,
    pub l: usize,
    /// Fault injection: added to the Jacobian's `σ_i` exponent. Always 0
    /// outside of mutation tests.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub jacobian_exponent_offset: i32,
}

fn is_zero(k: &i32) -> bool {
    *k == 0
}

impl OutputDensityParams {
    pub fn new(m: usize, n: usize, rho: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!("need m, n >= 1, got m={m}, n={n}")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        Ok(Self { m, n, rho, p: m.min(n), l: m.max(n), jacobian_exponent_offset: 0 })
    }

    #[doc(hidden)]
    pub fn with_jacobian_exponent_offset(mut self, k: i32) -> Self {
        self.jacobian_exponent_offset = k;
        self
    }

    fn sigma1_scale(&self) -> f64 {
        (self.m * self.n) as f64 * self.rho
    }

    /// Exponent `2(L − P) + 1` shared by the Jacobian and the tail density.
    fn radial_exponent(&self) -> f64 {
        (2 * (self.l - self.p) + 1) as f64
    }
}

/// `log r(σ₁)`.
pub fn log_r_sigma1(sigma1: f64, params: &OutputDensityParams) -> Result<f64> {
    if !(sigma1 > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma1 must be positive, got {sigma1}")));
    }
    let s = params.sigma1_scale();
    Ok(2f64.ln() + sigma1.ln() - s.ln() - sigma1 * sigma1 / s)
}

fn check_ordered(sigmas: &[f64]) -> Result<()> {
    if sigmas.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidParameter("singular values must be positive".into()));
    }
    if sigmas.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidParameter("singular values must be strictly decreasing".into()));
    }
    Ok(())
}

// Σ_{i<j} log (σ_i² − σ_j²)², computed from (σ_i − σ_j)(σ_i + σ_j).
fn log_vandermonde_sq(sigmas: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..sigmas.len() {
        for j in i + 1..sigmas.len() {
            acc += 2.0 * ((sigmas[i] - sigmas[j]) * (sigmas[i] + sigmas[j])).ln();
        }
    }
    acc
}

/// `log r(σ₂, …, σ_P)`; `sigmas` holds `σ₂ > … > σ_P`, empty when `P = 1`.
pub fn log_r_tail(sigmas: &[f64], params: &OutputDensityParams) -> Result<f64> {
    if sigmas.len() + 1 != params.p {
        return Err(Error::Dimension(format!("tail of length {} for P = {}", sigmas.len(), params.p)));
    }
    if sigmas.is_empty() {
        return Ok(0.0);
    }
    check_ordered(sigmas)?;
    let (p, l) = (params.p as u64, params.l as u64);
    let expo = params.radial_exponent();
    let mut acc = (params.p - 1) as f64 * 2f64.ln();
    for (k, &s) in sigmas.iter().enumerate() {
        let i = k as u64 + 2;
        acc += -s * s + expo * s.ln() - ln_factorial(l - i) - ln_factorial(p - i);
    }
    Ok(acc + log_vandermonde_sq(sigmas))
}

/// `log J(σ₁, …, σ_P)`.
pub fn log_jacobian(sigmas: &[f64], params: &OutputDensityParams) -> Result<f64> {
    if sigmas.len() != params.p {
        return Err(Error::Dimension(format!("{} singular values for P = {}", sigmas.len(), params.p)));
    }
    if sigmas.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::ZeroSingularValue);
    }
    let eps = COLLISION_EPS * sigmas[0] * sigmas[0];
    for w in sigmas.windows(2) {
        let gap = (w[0] - w[1]) * (w[0] + w[1]);
        if gap < eps {
            return Err(Error::SingularValueCollision { gap, eps });
        }
    }
    let expo = params.radial_exponent() + params.jacobian_exponent_offset as f64;
    Ok(expo * sigmas.iter().map(|s| s.ln()).sum::<f64>() + log_vandermonde_sq(sigmas))
}

/// `log |S(n, m)| = Σ_{i=n−m+1}^{n} log(2π^i/(i−1)!)`.
pub fn stiefel_log_volume(n_dim: usize, m_dim: usize) -> f64 {
    assert!(n_dim >= m_dim && m_dim >= 1, "stiefel_log_volume needs n >= m >= 1");
    (n_dim - m_dim + 1..=n_dim)
        .map(|i| 2f64.ln() + i as f64 * PI.ln() - ln_factorial(i as u64 - 1))
        .sum()
}

/// `log r(U) + log r(V)`.
pub fn log_haar_factors(params: &OutputDensityParams) -> f64 {
    let log_v = -stiefel_log_volume(params.n, params.p);
    let log_u = -(stiefel_log_volume(params.m, params.p) - params.p as f64 * (2.0 * PI).ln());
    log_u + log_v
}

/// `log r(Y)` from the singular values of `Y` (descending).
pub fn log_r_from_sigmas(sigmas: &[f64], params: &OutputDensityParams) -> Result<f64> {
    let log_j = log_jacobian(sigmas, params)?;
    Ok(log_haar_factors(params) + log_r_sigma1(sigmas[0], params)? + log_r_tail(&sigmas[1..], params)? - log_j)
}

/// `log r(Y)` for an `M × N` output block.
pub fn log_r_output(y: &ComplexMatrix, params: &OutputDensityParams) -> Result<f64> {
    if y.shape() != (params.m, params.n) {
        return Err(Error::Dimension(format!(
            "output is {}x{}, expected {}x{}",
            y.rows(),
            y.cols(),
            params.m,
            params.n
        )));
    }
    log_r_from_sigmas(&singular_values(y)?, params)
}

/// `h(Y | x) = M·E[log(‖x‖² + 1)] + MN·log(πe)`, nats per block.
pub fn h_y_given_x(expected_log_1_plus_norm2: f64, m: usize, n: usize) -> f64 {
    m as f64 * expected_log_1_plus_norm2 + (m * n) as f64 * (PI * std::f64::consts::E).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityEstimate {
    pub m: usize,
    pub n: usize,
    pub input: InputKind,
    pub rho: f64,
    /// `−E[log r(Y)] − h(Y|x)`, nats per block.
    pub mi_upper_block: f64,
    pub per_use: f64,
    pub std_err: f64,
    /// `E[σ₁²]/(MNρ) + E[Σ_{i≥2} σ_i²]`.
    pub c1: f64,
    pub c1_std_err: f64,
    /// `E[log σ₁²] − E[log(‖x‖² + 1)]`.
    pub c2: f64,
    pub c2_std_err: f64,
    pub mean_sigma1_sq: f64,
    pub sigma1_sq_std_err: f64,
    pub mean_tail_energy: f64,
    pub tail_energy_std_err: f64,
    pub mean_log_sigma1_sq: f64,
    pub log_sigma1_sq_std_err: f64,
    pub mean_log_1_plus_norm2: f64,
    /// Accepted samples.
    pub samples: u64,
    pub rejected_collisions: u64,
}

/// Per-sample statistics of `Y = s·xᵀ + W`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct BlockAcc {
    pub neg_log_r: Moments,
    pub bound: Moments,
    pub log1p_norm2: Moments,
    pub sigma1_sq: Moments,
    pub tail_energy: Moments,
    pub log_sigma1_sq: Moments,
    pub c1: Moments,
    pub c2: Moments,
    pub rejected: u64,
}

impl BlockAcc {
    fn merge(&mut self, o: &BlockAcc) {
        self.neg_log_r.merge(&o.neg_log_r);
        self.bound.merge(&o.bound);
        self.log1p_norm2.merge(&o.log1p_norm2);
        self.sigma1_sq.merge(&o.sigma1_sq);
        self.tail_energy.merge(&o.tail_energy);
        self.log_sigma1_sq.merge(&o.log_sigma1_sq);
        self.c1.merge(&o.c1);
        self.c2.merge(&o.c2);
        self.rejected += o.rejected;
    }
}

/// Monte Carlo over rank-1 blocks; shared by the bound estimate and the
/// singular-value checks.
pub(crate) fn accumulate_blocks(
    input: InputKind,
    params: &OutputDensityParams,
    samples: usize,
    stream: RngStream,
    exec: Execution,
    with_density: bool,
) -> Result<BlockAcc> {
    let (m, n, rho) = (params.m, params.n, params.rho);
    let h_const = (m * n) as f64 * (PI * std::f64::consts::E).ln();
    let scale = params.sigma1_scale();
    let parts = map_chunks(samples, DEFAULT_CHUNK, stream, exec, |chunk| {
        let mut rng = chunk.stream.rng();
        let mut acc = BlockAcc::default();
        for _ in 0..chunk.len {
            let x = sample_power_input(n, rho, input, &mut rng);
            let s = sample_cn_vec(m, &mut rng);
            let w = sample_gaussian_matrix(m, n, &mut rng);
            let y = ComplexMatrix::outer(&s, &x).add(&w)?;
            let sig = singular_values(&y)?;
            let log1p = vec_norm(&x).powi(2).ln_1p();
            let s1sq = sig[0] * sig[0];
            let tail: f64 = sig[1..].iter().map(|v| v * v).sum();
            if with_density {
                match log_r_from_sigmas(&sig, params) {
                    Ok(lr) => {
                        acc.neg_log_r.push(-lr);
                        acc.bound.push(-lr - m as f64 * log1p - h_const);
                    }
                    Err(Error::SingularValueCollision { .. } | Error::ZeroSingularValue) => {
                        acc.rejected += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                }
            }
            acc.log1p_norm2.push(log1p);
            acc.sigma1_sq.push(s1sq);
            acc.tail_energy.push(tail);
            acc.log_sigma1_sq.push(s1sq.ln());
            acc.c1.push(s1sq / scale + tail);
            acc.c2.push(s1sq.ln() - log1p);
        }
        Ok(acc)
    })?;
    let mut total = BlockAcc::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

/// Monte Carlo estimate of the duality bound for one input law and SNR.
pub fn estimate_duality_bound(
    input: InputKind,
    params: &OutputDensityParams,
    samples: usize,
    stream: RngStream,
    exec: Execution,
) -> Result<DualityEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let acc = accumulate_blocks(input, params, samples, stream, exec, true)?;
    if acc.rejected as f64 > MAX_REJECT_FRACTION * samples as f64 {
        return Err(Error::ExcessiveCollisions { rejected: acc.rejected, total: samples as u64 });
    }
    let mi = acc.neg_log_r.mean - h_y_given_x(acc.log1p_norm2.mean, params.m, params.n);
    Ok(DualityEstimate {
        m: params.m,
        n: params.n,
        input,
        rho: params.rho,
        mi_upper_block: mi,
        per_use: mi / params.n as f64,
        std_err: acc.bound.std_err(),
        c1: acc.c1.mean,
        c1_std_err: acc.c1.std_err(),
        c2: acc.c2.mean,
        c2_std_err: acc.c2.std_err(),
        mean_sigma1_sq: acc.sigma1_sq.mean,
        sigma1_sq_std_err: acc.sigma1_sq.std_err(),
        mean_tail_energy: acc.tail_energy.mean,
        tail_energy_std_err: acc.tail_energy.std_err(),
        mean_log_sigma1_sq: acc.log_sigma1_sq.mean,
        log_sigma1_sq_std_err: acc.log_sigma1_sq.std_err(),
        mean_log_1_plus_norm2: acc.log1p_norm2.mean,
        samples: acc.bound.count,
        rejected_collisions: acc.rejected,
    })
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub rho_db: f64,
    pub estimate: DualityEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub m: usize,
    pub n: usize,
    pub input: InputKind,
    pub grid: Vec<GridPoint>,
    /// Least-squares slope of `per_use` against `ln ρ`.
    pub fitted_slope: f64,
    pub fit_intercept: f64,
    /// RMS residual of the fit.
    pub fit_residual: f64,
}

impl BoundCurve {
    pub fn line(&self) -> LineFit {
        LineFit { slope: self.fitted_slope, intercept: self.fit_intercept, rms_residual: self.fit_residual }
    }

    /// Writes the per-point CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for g in &self.grid {
            let e = &g.estimate;
            w.serialize(CsvRow {
                rho_db: g.rho_db,
                rho_linear: e.rho,
                mi_upper_nats_per_block: e.mi_upper_block,
                per_use_nats: e.per_use,
                c1: e.c1,
                c2: e.c2,
                std_err: e.std_err,
                samples: e.samples,
                rejected_collisions: e.rejected_collisions,
            })
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct CsvRow {
    rho_db: f64,
    rho_linear: f64,
    mi_upper_nats_per_block: f64,
    per_use_nats: f64,
    c1: f64,
    c2: f64,
    std_err: f64,
    samples: u64,
    rejected_collisions: u64,
}

pub const MIN_GRID_POINTS: usize = 3;
pub const MIN_GRID_SPAN_DB: f64 = 20.0;
pub const MIN_GRID_DB: f64 = 30.0;

fn check_grid(rho_db: &[f64]) -> Result<()> {
    if rho_db.len() < MIN_GRID_POINTS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_GRID_POINTS} SNR points")));
    }
    if rho_db.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("SNR grid must be strictly increasing".into()));
    }
    if !(rho_db[0] > MIN_GRID_DB) {
        return Err(Error::InvalidParameter(format!("SNR grid must lie above {MIN_GRID_DB} dB")));
    }
    if rho_db[rho_db.len() - 1] - rho_db[0] < MIN_GRID_SPAN_DB {
        return Err(Error::InvalidParameter(format!("SNR grid must span at least {MIN_GRID_SPAN_DB} dB")));
    }
    Ok(())
}

/// Estimates the bound on an SNR grid (dB) and fits its slope in `ln ρ`.
///
/// Every grid point reuses the same chunk streams, so the points are
/// evaluated with common random numbers and the slope carries much less
/// Monte Carlo noise than the individual values.
pub fn sweep_and_fit(
    input: InputKind,
    m: usize,
    n: usize,
    rho_db: &[f64],
    samples: usize,
    stream: RngStream,
    exec: Execution,
) -> Result<BoundCurve> {
    sweep_and_fit_with(input, m, n, rho_db, samples, stream, exec, 0)
}

#[doc(hidden)]
#[allow(clippy::too_many_arguments)]
pub fn sweep_and_fit_with(
    input: InputKind,
    m: usize,
    n: usize,
    rho_db: &[f64],
    samples: usize,
    stream: RngStream,
    exec: Execution,
    jacobian_exponent_offset: i32,
) -> Result<BoundCurve> {
    check_grid(rho_db)?;
    let mut grid = Vec::with_capacity(rho_db.len());
    for &db in rho_db {
        let params = OutputDensityParams::new(m, n, db_to_linear(db))?
            .with_jacobian_exponent_offset(jacobian_exponent_offset);
        let estimate = estimate_duality_bound(input, &params, samples, stream, exec)?;
        grid.push(GridPoint { rho_db: db, estimate });
    }
    let xs: Vec<f64> = grid.iter().map(|g| g.estimate.rho.ln()).collect();
    let ys: Vec<f64> = grid.iter().map(|g| g.estimate.per_use).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(BoundCurve {
        m,
        n,
        input,
        grid,
        fitted_slope: fit.slope,
        fit_intercept: fit.intercept,
        fit_residual: fit.rms_residual,
    })
}
