//! Numerical verification of the inequalities and distributional identities
//! used by the pre-log bounds.
//!
//! Every check returns a [`CheckReport`] whose `worst_margin` is the smallest
//! slack seen; a trial is a violation when its slack is below `−abs_tol`.
//! Expectation inequalities are tested with a 3σ Monte Carlo allowance built
//! into the slack. Mutual-information identities are not checked: there is no
//! tractable estimator for `I(x; Y)` in this model.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::channel::{rank1_stack, recombine, simulate_block, CorrelationRoot, InputKind};
use crate::duality::{accumulate_blocks, BoundCurve, OutputDensityParams};
use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix, C64};
use crate::mc::{map_chunks, Execution, DEFAULT_CHUNK};
use crate::rng::{sample_gaussian_matrix, RngStream};
use crate::svd::singular_values;

pub const MC_SIGMAS: f64 = 3.0;
pub const MIN_BLOCK_SAMPLES: usize = 10_000;
pub const MIN_MOMENT_SAMPLES: usize = 100_000;
/// Largest relative Frobenius deviation of the noise covariance.
pub const NOISE_FROBENIUS_TOL: f64 = 0.02;
/// Largest relative deviation of each noise variance.
pub const NOISE_DIAGONAL_TOL: f64 = 0.02;
/// Two-sided tail mass of a 3σ normal interval.
const THREE_SIGMA_ALPHA: f64 = 0.0027;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: u64,
    pub violations: u64,
    /// Most negative slack observed (smallest slack if none is negative).
    pub worst_margin: f64,
    pub abs_tol: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Recorder {
    name: String,
    abs_tol: f64,
    trials: u64,
    violations: u64,
    worst: f64,
}

impl Recorder {
    fn new(name: impl Into<String>, abs_tol: f64) -> Self {
        Self { name: name.into(), abs_tol, trials: 0, violations: 0, worst: f64::INFINITY }
    }

    fn record(&mut self, slack: f64) {
        self.trials += 1;
        // NaN slack counts as a violation.
        if !(slack >= -self.abs_tol) {
            self.violations += 1;
        }
        if !(slack >= self.worst) {
            self.worst = slack;
        }
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            name: self.name,
            trials: self.trials,
            violations: self.violations,
            worst_margin: self.worst,
            abs_tol: self.abs_tol,
        }
    }
}

/// Merges reports of the same check, e.g. across random instances.
pub fn merge_reports(name: &str, reports: &[CheckReport]) -> CheckReport {
    CheckReport {
        name: name.to_string(),
        trials: reports.iter().map(|r| r.trials).sum(),
        violations: reports.iter().map(|r| r.violations).sum(),
        worst_margin: reports.iter().map(|r| r.worst_margin).fold(f64::INFINITY, f64::min),
        abs_tol: reports.iter().map(|r| r.abs_tol).fold(0.0, f64::max),
    }
}

/// `σ_{i+j−1}(A + B) ≤ σ_i(A) + σ_j(B)` for all `i + j ≤ p + 1`.
pub fn weyl_check(a: &ComplexMatrix, b: &ComplexMatrix, abs_tol: f64) -> Result<CheckReport> {
    let sum = a.add(b)?;
    let (sa, sb, ss) = (singular_values(a)?, singular_values(b)?, singular_values(&sum)?);
    let p = sa.len();
    let mut rec = Recorder::new("weyl", abs_tol);
    for i in 1..=p {
        for j in 1..=p + 1 - i {
            rec.record(sa[i - 1] + sb[j - 1] - ss[i + j - 2]);
        }
    }
    Ok(rec.finish())
}

/// Singular-value bounds for `Y = s·xᵀ + W`:
/// `σ₁(Y) ≤ ‖s‖‖x‖ + σ₁(W)` and `σ_i(Y) ≤ σ_{i−1}(W)` for `2 ≤ i ≤ P`.
pub fn sigma_bound_check(x: &[C64], s: &[C64], w: &ComplexMatrix, abs_tol: f64) -> Result<CheckReport> {
    if w.shape() != (s.len(), x.len()) {
        return Err(Error::Dimension(format!(
            "W is {}x{} but s has {} and x has {} entries",
            w.rows(),
            w.cols(),
            s.len(),
            x.len()
        )));
    }
    let y = ComplexMatrix::outer(s, x).add(w)?;
    let (sy, sw) = (singular_values(&y)?, singular_values(w)?);
    let mut rec = Recorder::new("sigma_bound", abs_tol);
    rec.record(vec_norm(s) * vec_norm(x) + sw[0] - sy[0]);
    for i in 1..sy.len() {
        rec.record(sw[i - 1] - sy[i]);
    }
    Ok(rec.finish())
}

/// Monte Carlo means of singular-value functionals of `Y = s·xᵀ + W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockStats {
    pub samples: u64,
    pub mean_sigma1_sq: f64,
    pub sigma1_sq_std_err: f64,
    pub mean_tail_energy: f64,
    pub tail_energy_std_err: f64,
    pub mean_log_sigma1_sq: f64,
    pub log_sigma1_sq_std_err: f64,
    pub mean_norm2: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn block_stats(
    input: InputKind,
    m: usize,
    n: usize,
    rho: f64,
    samples: usize,
    stream: RngStream,
    exec: Execution,
) -> Result<BlockStats> {
    let params = OutputDensityParams::new(m, n, rho)?;
    let acc = accumulate_blocks(input, &params, samples, stream, exec, false)?;
    let mean_norm2 = match input {
        InputKind::Zero => 0.0,
        _ => n as f64 * rho,
    };
    Ok(BlockStats {
        samples: acc.sigma1_sq.count,
        mean_sigma1_sq: acc.sigma1_sq.mean,
        sigma1_sq_std_err: acc.sigma1_sq.std_err(),
        mean_tail_energy: acc.tail_energy.mean,
        tail_energy_std_err: acc.tail_energy.std_err(),
        mean_log_sigma1_sq: acc.log_sigma1_sq.mean,
        log_sigma1_sq_std_err: acc.log_sigma1_sq.std_err(),
        mean_norm2,
    })
}

fn require_samples(samples: usize, min: usize) -> Result<()> {
    if samples < min {
        return Err(Error::InvalidParameter(format!("need at least {min} samples, got {samples}")));
    }
    Ok(())
}

/// `E[Σ_{i≥2} σ_i²] ≤ MN` and `E[σ₁²] ≤ MN(ρ + 1)` for sphere inputs.
pub fn tail_energy_check(
    m: usize,
    n: usize,
    rho: f64,
    samples: usize,
    stream: RngStream,
    exec: Execution,
) -> Result<CheckReport> {
    require_samples(samples, MIN_BLOCK_SAMPLES)?;
    let st = block_stats(InputKind::Sphere, m, n, rho, samples, stream, exec)?;
    let mn = (m * n) as f64;
    let mut rec = Recorder::new("tail_energy", 0.0);
    rec.record(mn + MC_SIGMAS * st.tail_energy_std_err - st.mean_tail_energy);
    rec.record(mn * (rho + 1.0) + MC_SIGMAS * st.sigma1_sq_std_err - st.mean_sigma1_sq);
    Ok(rec.finish())
}

/// `E[log σ₁²] ≤ log Σ_i E‖y_i‖² = log(M(N + E‖x‖²))`.
pub fn log_sigma1_check(
    m: usize,
    n: usize,
    rho: f64,
    input: InputKind,
    samples: usize,
    stream: RngStream,
    exec: Execution,
) -> Result<CheckReport> {
    require_samples(samples, MIN_BLOCK_SAMPLES)?;
    let st = block_stats(input, m, n, rho, samples, stream, exec)?;
    let cap = (m as f64 * (n as f64 + st.mean_norm2)).ln();
    let mut rec = Recorder::new("log_sigma1", 0.0);
    rec.record(cap + MC_SIGMAS * st.log_sigma1_sq_std_err - st.mean_log_sigma1_sq);
    Ok(rec.finish())
}

// [Re v; Im v] for a row-major vectorized matrix.
fn real_vec(y: &ComplexMatrix) -> Vec<f64> {
    let v = y.as_slice();
    v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect()
}

/// Sums of `r`, `r rᵀ` and `(r rᵀ)²` (elementwise) over samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSums {
    pub dim: usize,
    pub count: u64,
    pub sum: Vec<f64>,
    pub sum_sq: Vec<f64>,
    pub outer: Vec<f64>,
    pub outer_sq: Vec<f64>,
}

impl MomentSums {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            count: 0,
            sum: vec![0.0; dim],
            sum_sq: vec![0.0; dim],
            outer: vec![0.0; dim * dim],
            outer_sq: vec![0.0; dim * dim],
        }
    }

    fn push(&mut self, r: &[f64]) {
        self.count += 1;
        for a in 0..self.dim {
            self.sum[a] += r[a];
            self.sum_sq[a] += r[a] * r[a];
            for b in 0..self.dim {
                let p = r[a] * r[b];
                self.outer[a * self.dim + b] += p;
                self.outer_sq[a * self.dim + b] += p * p;
            }
        }
    }

    fn merge(&mut self, o: &MomentSums) {
        self.count += o.count;
        for (x, y) in [
            (&mut self.sum, &o.sum),
            (&mut self.sum_sq, &o.sum_sq),
            (&mut self.outer, &o.outer),
            (&mut self.outer_sq, &o.outer_sq),
        ] {
            x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
        }
    }

    /// Raw second-moment matrix `E[r rᵀ]`.
    pub fn second_moment(&self) -> Vec<f64> {
        self.outer.iter().map(|s| s / self.count as f64).collect()
    }
}

fn collect_moments<F>(dim: usize, samples: usize, stream: RngStream, exec: Execution, draw: F) -> Result<MomentSums>
where
    F: Fn(&mut crate::rng::StreamRng) -> Result<ComplexMatrix> + Sync + Send,
{
    let parts = map_chunks(samples, DEFAULT_CHUNK, stream, exec, |chunk| {
        let mut rng = chunk.stream.rng();
        let mut acc = MomentSums::new(dim);
        for _ in 0..chunk.len {
            acc.push(&real_vec(&draw(&mut rng)?));
        }
        Ok(acc)
    })?;
    let mut total = MomentSums::new(dim);
    parts.iter().for_each(|p| total.merge(p));
    Ok(total)
}

/// Second moments of `Σ_q W_q·diag(p_q)` with `W_q` i.i.d. CN(0, 1).
pub fn noise_mixture_moments(
    root: &CorrelationRoot,
    m: usize,
    samples: usize,
    stream: RngStream,
    exec: Execution,
) -> Result<MomentSums> {
    let (n, q) = (root.n(), root.q());
    collect_moments(2 * m * n, samples, stream, exec, |rng| {
        let ws: Vec<ComplexMatrix> = (0..q).map(|_| sample_gaussian_matrix(m, n, rng)).collect();
        recombine(&ws, root)
    })
}

/// `Σ_q W_q·diag(p_q)` has the law of `W`: its real-vectorized covariance is
/// `½·I`. Tests the relative Frobenius deviation and each variance.
pub fn noise_identity_check(
    root: &CorrelationRoot,
    m: usize,
    samples: usize,
    stream: RngStream,
    exec: Execution,
) -> Result<CheckReport> {
    require_samples(samples, MIN_MOMENT_SAMPLES)?;
    let mom = noise_mixture_moments(root, m, samples, stream, exec)?;
    let cov = mom.second_moment();
    let d = mom.dim;
    let mut fro = 0.0;
    for a in 0..d {
        for b in 0..d {
            let target = if a == b { 0.5 } else { 0.0 };
            fro += (cov[a * d + b] - target).powi(2);
        }
    }
    let rel = fro.sqrt() / (0.5 * (d as f64).sqrt());
    let mut rec = Recorder::new("noise_identity", 0.0);
    rec.record(NOISE_FROBENIUS_TOL - rel);
    for a in 0..d {
        rec.record(NOISE_DIAGONAL_TOL - (cov[a * d + a] / 0.5 - 1.0).abs());
    }
    Ok(rec.finish())
}

/// Moments of the direct channel output and of the recombined rank-1 stack.
pub fn pipeline_moments(
    root: &CorrelationRoot,
    m: usize,
    x: &[C64],
    samples: usize,
    stream: RngStream,
    exec: Execution,
) -> Result<(MomentSums, MomentSums)> {
    if x.len() != root.n() {
        return Err(Error::Dimension(format!("x has {} entries for N = {}", x.len(), root.n())));
    }
    let dim = 2 * m * root.n();
    let direct = collect_moments(dim, samples, stream.substream(0), exec, |rng| {
        Ok(simulate_block(root, x, m, rng)?.y)
    })?;
    let stacked = collect_moments(dim, samples, stream.substream(1), exec, |rng| {
        recombine(&rank1_stack(x, root.q(), m, rng), root)
    })?;
    Ok((direct, stacked))
}

/// z-scores of the differences in means and second moments between two
/// sample sets (upper triangle of the second-moment matrix).
pub fn moment_z_scores(a: &MomentSums, b: &MomentSums) -> Vec<f64> {
    let d = a.dim;
    let (na, nb) = (a.count as f64, b.count as f64);
    let z = |ma: f64, va: f64, mb: f64, vb: f64| {
        let se = (va / na + vb / nb).sqrt();
        if se > 0.0 {
            (ma - mb) / se
        } else if ma == mb {
            0.0
        } else {
            f64::INFINITY
        }
    };
    let mut out = Vec::with_capacity(d + d * (d + 1) / 2);
    for k in 0..d {
        let (ma, mb) = (a.sum[k] / na, b.sum[k] / nb);
        let va = a.sum_sq[k] / na - ma * ma;
        let vb = b.sum_sq[k] / nb - mb * mb;
        out.push(z(ma, va, mb, vb));
    }
    for i in 0..d {
        for j in i..d {
            let k = i * d + j;
            let (ma, mb) = (a.outer[k] / na, b.outer[k] / nb);
            let va = a.outer_sq[k] / na - ma * ma;
            let vb = b.outer_sq[k] / nb - mb * mb;
            out.push(z(ma, va, mb, vb));
        }
    }
    out
}

/// Two-sided per-entry threshold keeping the family-wise false-alarm rate of
/// `count` z-tests at that of a single 3σ test.
pub fn family_threshold(count: usize) -> f64 {
    let normal = Normal::standard();
    normal.inverse_cdf(1.0 - THREE_SIGMA_ALPHA / (2.0 * count as f64))
}

/// The recombined rank-1 stack reproduces the first and second moments of the
/// direct channel output.
pub fn data_processing_consistency(
    root: &CorrelationRoot,
    m: usize,
    x: &[C64],
    samples: usize,
    stream: RngStream,
    exec: Execution,
) -> Result<CheckReport> {
    require_samples(samples, MIN_MOMENT_SAMPLES)?;
    let (direct, stacked) = pipeline_moments(root, m, x, samples, stream, exec)?;
    let zs = moment_z_scores(&direct, &stacked);
    let thr = family_threshold(zs.len());
    let mut rec = Recorder::new("data_processing", 0.0);
    for z in zs {
        rec.record(thr - z.abs());
    }
    Ok(rec.finish())
}

/// Caps on the bookkeeping terms at every grid point of a bound sweep:
/// `c₂ ≤ log[M(N+1)]`, `E[Σ_{i≥2} σ_i²] ≤ MN`, `E[σ₁²] ≤ MN(ρ+1)`.
pub fn sweep_caps_check(curve: &BoundCurve) -> CheckReport {
    let mn = (curve.m * curve.n) as f64;
    let c2_cap = (curve.m as f64 * (curve.n as f64 + 1.0)).ln();
    let mut rec = Recorder::new("duality_caps", 0.0);
    for g in &curve.grid {
        let e = &g.estimate;
        rec.record(c2_cap + MC_SIGMAS * e.c2_std_err - e.c2);
        rec.record(mn + MC_SIGMAS * e.tail_energy_std_err - e.mean_tail_energy);
        rec.record(mn * (e.rho + 1.0) + MC_SIGMAS * e.sigma1_sq_std_err - e.mean_sigma1_sq);
    }
    rec.finish()
}

/// Fitted slope of a rank-1 sweep within `tol` of `1 − 1/N`; every point
/// nonnegative and within 3σ below the fitted line.
pub fn sweep_slope_check(curve: &BoundCurve, tol: f64) -> CheckReport {
    let target = 1.0 - 1.0 / curve.n as f64;
    let line = curve.line();
    let mut rec = Recorder::new("duality_slope", 0.0);
    rec.record(tol - (curve.fitted_slope - target).abs());
    for g in &curve.grid {
        let e = &g.estimate;
        rec.record(e.mi_upper_block);
        let se = e.std_err / curve.n as f64;
        rec.record(e.per_use - line.at(e.rho.ln()) + MC_SIGMAS * se);
    }
    rec.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_power_input;
    use crate::rng::{sample_cn_vec, RngStream};

    #[test]
    fn weyl_trivial_cases() {
        let mut rng = RngStream::new(31, 0).rng();
        let a = sample_gaussian_matrix(3, 4, &mut rng);
        let r = weyl_check(&a, &ComplexMatrix::zeros(3, 4), 1e-9).unwrap();
        assert!(r.passed());
        assert!(r.worst_margin.abs() < 1e-12, "equality at j = 1");
        let id = ComplexMatrix::identity(4);
        let r = weyl_check(&id, &id, 1e-9).unwrap();
        assert!(r.passed() && r.worst_margin.abs() < 1e-12);
        assert_eq!(r.trials, 10);
        assert!(weyl_check(&a, &id, 1e-9).is_err());
    }

    #[test]
    fn weyl_random_pairs() {
        let mut rng = RngStream::new(32, 0).rng();
        for k in 0..2000 {
            let (r, c) = (1 + k % 8, 1 + (k / 8) % 8);
            let a = sample_gaussian_matrix(r, c, &mut rng);
            let b = sample_gaussian_matrix(r, c, &mut rng);
            assert!(weyl_check(&a, &b, 1e-9).unwrap().passed());
        }
    }

    #[test]
    fn sigma_bounds() {
        let mut rng = RngStream::new(33, 0).rng();
        let x = sample_cn_vec(4, &mut rng);
        let s = sample_cn_vec(3, &mut rng);
        let zero = ComplexMatrix::zeros(3, 4);
        let r = sigma_bound_check(&x, &s, &zero, 1e-9).unwrap();
        assert!(r.passed());
        assert!(r.worst_margin.abs() < 1e-12);
        let w = sample_gaussian_matrix(3, 4, &mut rng);
        let r = sigma_bound_check(&[C64::new(0.0, 0.0); 4], &s, &w, 1e-9).unwrap();
        assert!(r.passed());
        for _ in 0..10_000 {
            let x = sample_power_input(4, 100.0, InputKind::Sphere, &mut rng);
            let s = sample_cn_vec(4, &mut rng);
            let w = sample_gaussian_matrix(4, 4, &mut rng);
            assert!(sigma_bound_check(&x, &s, &w, 1e-9).unwrap().passed());
        }
    }

    #[test]
    fn energy_and_log_checks() {
        let s = RngStream::new(34, 0);
        let ex = Execution::default();
        assert!(tail_energy_check(2, 3, 100.0, 10_000, s, ex).unwrap().passed());
        let r = tail_energy_check(1, 2, 100.0, 10_000, s, ex).unwrap();
        assert!(r.passed());
        let st = block_stats(InputKind::Sphere, 1, 2, 100.0, 10_000, s, ex).unwrap();
        assert_eq!(st.mean_tail_energy, 0.0);
        let st = block_stats(InputKind::Sphere, 2, 2, 1e4, 10_000, s, ex).unwrap();
        let cap = 4.0 * (1e4 + 1.0);
        assert!(st.mean_sigma1_sq <= cap + 3.0 * st.sigma1_sq_std_err);
        assert!(st.mean_sigma1_sq > 0.9 * cap);

        assert!(log_sigma1_check(1, 1, 1e3, InputKind::Sphere, 10_000, s, ex).unwrap().passed());
        assert!(log_sigma1_check(3, 2, 1e3, InputKind::Zero, 10_000, s, ex).unwrap().passed());
        assert!(log_sigma1_check(2, 3, 1e3, InputKind::Gaussian, 10_000, s, ex).unwrap().passed());
        assert!(tail_energy_check(2, 3, 100.0, 9_999, s, ex).is_err());
    }

    #[test]
    fn log_sigma1_grows_like_log_rho() {
        let s = RngStream::new(35, 0);
        let dbs = [40.0, 45.0, 50.0, 55.0, 60.0];
        let (mut xs, mut ys) = (vec![], vec![]);
        for db in dbs {
            let rho = crate::duality::db_to_linear(db);
            let st = block_stats(InputKind::Sphere, 2, 3, rho, 10_000, s, Execution::default()).unwrap();
            xs.push(rho.ln());
            ys.push(st.mean_log_sigma1_sq);
        }
        let fit = crate::fit::fit_line(&xs, &ys).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05, "slope {}", fit.slope);
    }

    #[test]
    fn noise_identity_examples() {
        let ex = Execution::default();
        let r = noise_identity_check(&CorrelationRoot::constant(3), 2, 100_000, RngStream::new(36, 0), ex).unwrap();
        assert!(r.passed(), "{r:?}");
        let root = CorrelationRoot::from_angles(&[0.0, 0.4, 0.8, 1.2]).unwrap();
        let r = noise_identity_check(&root, 2, 100_000, RngStream::new(36, 1), ex).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.trials, 1 + 16);
        assert!(noise_identity_check(&root, 2, 1000, RngStream::new(36, 1), ex).is_err());
    }

    #[test]
    fn data_processing_examples() {
        let ex = Execution::default();
        let root = CorrelationRoot::from_angles(&[0.0, 0.4, 0.8, 1.2]).unwrap();
        let zero = vec![C64::new(0.0, 0.0); 4];
        let (a, b) = pipeline_moments(&root, 2, &zero, 100_000, RngStream::new(37, 0), ex).unwrap();
        for mom in [&a, &b] {
            let c = mom.second_moment();
            for i in 0..16 {
                assert!((c[i * 16 + i] - 0.5).abs() < 0.02);
            }
        }
        let x = sample_power_input(4, 2.0, InputKind::Sphere, &mut RngStream::new(37, 1).rng());
        let r = data_processing_consistency(&root, 2, &x, 100_000, RngStream::new(37, 2), ex).unwrap();
        assert!(r.passed(), "{r:?}");
        let (a, b) = pipeline_moments(&root, 2, &x, 100_000, RngStream::new(37, 3), ex).unwrap();
        let (ca, cb) = (a.second_moment(), b.second_moment());
        let diff: f64 = ca.iter().zip(&cb).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = ca.iter().map(|p| p * p).sum::<f64>().sqrt();
        assert!(diff / norm < 0.02, "relative difference {}", diff / norm);
    }

    #[test]
    fn data_processing_detects_wrong_root() {
        // Stacking against a different root must not match the direct output.
        let root = CorrelationRoot::from_angles(&[0.0, 0.4, 0.8, 1.2]).unwrap();
        let other = CorrelationRoot::from_angles(&[0.0, 0.3, 1.0, 1.5]).unwrap();
        let x = sample_power_input(4, 2.0, InputKind::Sphere, &mut RngStream::new(38, 1).rng());
        let ex = Execution::default();
        let s = RngStream::new(38, 2);
        let dim = 16;
        let direct = collect_moments(dim, 100_000, s.substream(0), ex, |rng| Ok(simulate_block(&root, &x, 2, rng)?.y))
            .unwrap();
        let stacked =
            collect_moments(dim, 100_000, s.substream(1), ex, |rng| recombine(&rank1_stack(&x, 2, 2, rng), &other))
                .unwrap();
        let zs = moment_z_scores(&direct, &stacked);
        let thr = family_threshold(zs.len());
        assert!(zs.iter().any(|z| z.abs() > thr));
    }

    #[test]
    fn bonferroni_threshold() {
        assert!((family_threshold(1) - 3.0).abs() < 1e-3);
        assert!(family_threshold(152) > 4.0);
    }
}
