//! One-sided Jacobi SVD for small complex matrices.
//!
//! The rotations run on the columns of `A` when `rows >= cols` and on the
//! columns of `Aᴴ` otherwise, so the Gram matrix being diagonalized is always
//! the smaller `p × p` one. After convergence the singular triplets are sorted
//! descending and every column pair `(u_j, v_j)` is rotated by a common phase
//! so that the first row of `U` is real and nonnegative. Entries of that row
//! with magnitude below [`PHASE_EPS`] keep their computed phase.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

pub const MAX_SWEEPS: usize = 60;
/// Relative off-diagonal threshold `|a_iᴴa_j| ≤ tol·‖a_i‖‖a_j‖`.
pub const CONVERGENCE_TOL: f64 = 1e-14;
pub const PHASE_EPS: f64 = 1e-14;

/// `a = u · diag(sigma) · vᴴ` with `sigma` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdTriple {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdTriple {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.sigma.iter().map(|&s| C64::new(s, 0.0)).collect();
        self.u
            .mul_diag_right(&d)
            .and_then(|us| us.matmul(&self.v.conj_transpose()))
            .expect("svd factors have consistent shapes")
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<SvdTriple> {
    let (m, n) = a.shape();
    let (u, sigma, v) = if m >= n {
        jacobi_tall(a)?
    } else {
        let (u, s, v) = jacobi_tall(&a.conj_transpose())?;
        (v, s, u)
    };
    Ok(canonicalize(u, sigma, v))
}

/// Singular values only, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.sigma)
}

/// Number of singular values above `rel_tol · σ₁`; 0 for the zero matrix.
pub fn rank_estimate(a: &ComplexMatrix, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidParameter(format!("rel_tol {rel_tol} not in (0, 1)")));
    }
    let s = singular_values(a)?;
    if s[0] == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x > rel_tol * s[0]).count())
}

type Columns = Vec<Vec<C64>>;

fn col_dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn col_norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

// Returns (U m×n, sigma unsorted, V n×n) for m >= n, as columns.
fn jacobi_tall(a: &ComplexMatrix) -> Result<(Columns, Vec<f64>, Columns)> {
    let (m, n) = a.shape();
    let mut w: Columns = (0..n).map(|j| a.column(j)).collect();
    let mut v: Columns = (0..n)
        .map(|j| (0..n).map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();

    let fro = a.frobenius_norm();
    // Columns this small are numerically null and take no part in rotations.
    let null_tol = fro * f64::EPSILON * m as f64;

    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = col_norm_sqr(&w[i]);
                let beta = col_norm_sqr(&w[j]);
                if alpha.sqrt() <= null_tol || beta.sqrt() <= null_tol {
                    continue;
                }
                let gamma = col_dot(&w[i], &w[j]);
                let g = gamma.norm();
                if g <= CONVERGENCE_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(&mut w, i, j, phase, c, s);
                rotate(&mut v, i, j, phase, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::SvdNoConvergence { sweeps: MAX_SWEEPS });
    }

    let sigma: Vec<f64> = w.iter().map(|c| col_norm_sqr(c).sqrt()).collect();
    let mut u: Columns = Vec::with_capacity(n);
    let mut null_cols = Vec::new();
    for (j, col) in w.into_iter().enumerate() {
        if sigma[j] > null_tol && sigma[j] > 0.0 {
            let inv = 1.0 / sigma[j];
            u.push(col.into_iter().map(|z| z * inv).collect());
        } else {
            null_cols.push(j);
            u.push(vec![C64::new(0.0, 0.0); m]);
        }
    }
    for j in null_cols {
        u[j] = complete_basis(&u, j, m);
    }
    Ok((u, sigma, v))
}

fn rotate(cols: &mut Columns, i: usize, j: usize, phase: C64, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(j);
    let ci = &mut left[i];
    let cj = &mut right[0];
    for k in 0..ci.len() {
        let a = ci[k];
        let b = cj[k] * phase;
        ci[k] = a * c - b * s;
        cj[k] = a * s + b * c;
    }
}

// A unit vector orthogonal to every nonzero column except `skip`.
fn complete_basis(u: &Columns, skip: usize, m: usize) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for k in 0..m {
        let mut e = vec![C64::new(0.0, 0.0); m];
        e[k] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for (idx, col) in u.iter().enumerate() {
                if idx == skip || col_norm_sqr(col) == 0.0 {
                    continue;
                }
                let proj = col_dot(col, &e);
                for (x, c) in e.iter_mut().zip(col) {
                    *x -= proj * c;
                }
            }
        }
        let nrm = col_norm_sqr(&e).sqrt();
        if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
            best = Some((nrm, e));
        }
        if nrm > 0.5 {
            break;
        }
    }
    let (nrm, e) = best.expect("m >= 1");
    e.into_iter().map(|z| z / nrm).collect()
}

fn canonicalize(u: Columns, sigma: Vec<f64>, v: Columns) -> SvdTriple {
    let p = sigma.len();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));

    let m = u[0].len();
    let n = v[0].len();
    let mut um = ComplexMatrix::zeros(m, p);
    let mut vm = ComplexMatrix::zeros(n, p);
    let mut s = Vec::with_capacity(p);
    for (dst, &src) in order.iter().enumerate() {
        s.push(sigma[src]);
        let lead = u[src][0];
        let mag = lead.norm();
        let phase = if mag >= PHASE_EPS { lead.conj() / mag } else { C64::new(1.0, 0.0) };
        for i in 0..m {
            um[(i, dst)] = u[src][i] * phase;
        }
        for i in 0..n {
            vm[(i, dst)] = v[src][i] * phase;
        }
        if mag >= PHASE_EPS {
            um[(0, dst)] = C64::new(mag, 0.0);
        }
    }
    SvdTriple { u: um, sigma: s, v: vm }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sample_gaussian_matrix, RngStream};

    fn max_dev_from_identity(q: &ComplexMatrix) -> f64 {
        let g = q.conj_transpose().matmul(q).unwrap();
        let id = ComplexMatrix::identity(g.rows());
        g.sub(&id).unwrap().as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn assert_invariants(a: &ComplexMatrix, t: &SvdTriple) {
        let p = a.rows().min(a.cols());
        assert_eq!(t.sigma.len(), p);
        assert_eq!(t.u.shape(), (a.rows(), p));
        assert_eq!(t.v.shape(), (a.cols(), p));
        assert!(t.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(t.sigma.iter().all(|&s| s >= 0.0));
        assert!(max_dev_from_identity(&t.u) < 1e-10, "u not orthonormal");
        assert!(max_dev_from_identity(&t.v) < 1e-10, "v not orthonormal");
        for j in 0..p {
            let z = t.u[(0, j)];
            assert!(z.im.abs() <= 1e-10 && z.re >= -1e-12, "sign convention {z}");
        }
        let fro = a.frobenius_norm();
        let err = t.reconstruct().sub(a).unwrap().frobenius_norm();
        assert!(err <= 1e-10 * fro.max(f64::MIN_POSITIVE), "reconstruction {err} vs {fro}");
    }

    #[test]
    fn identity_2x2() {
        let t = svd(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(t.sigma, vec![1.0, 1.0]);
        assert_eq!(t.u, ComplexMatrix::identity(2));
        assert_eq!(t.v, ComplexMatrix::identity(2));
    }

    #[test]
    fn diagonal_with_zero() {
        let a = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, 0.0]]).unwrap();
        let t = svd(&a).unwrap();
        assert_eq!(t.sigma, vec![3.0, 0.0]);
        assert_invariants(&a, &t);
    }

    #[test]
    fn zero_matrix() {
        let a = ComplexMatrix::zeros(3, 2);
        let t = svd(&a).unwrap();
        assert_eq!(t.sigma, vec![0.0, 0.0]);
        assert_invariants(&a, &t);
        assert_eq!(rank_estimate(&a, 1e-10).unwrap(), 0);
    }

    #[test]
    fn random_4x3_reconstructs() {
        let mut rng = RngStream::new(7, 0).rng();
        let a = sample_gaussian_matrix(4, 3, &mut rng);
        let t = svd(&a).unwrap();
        assert_invariants(&a, &t);
    }

    #[test]
    fn wide_matrix() {
        let mut rng = RngStream::new(8, 0).rng();
        let a = sample_gaussian_matrix(2, 5, &mut rng);
        assert_invariants(&a, &svd(&a).unwrap());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_estimate(&ComplexMatrix::identity(3), 1e-10).unwrap(), 3);
        let dup = ComplexMatrix::from_real_rows(&[&[0.6, 0.8], &[0.6, 0.8]]).unwrap();
        assert_eq!(rank_estimate(&dup, 1e-10).unwrap(), 1);
        let mut rng = RngStream::new(9, 0).rng();
        let g = sample_gaussian_matrix(4, 2, &mut rng);
        assert_eq!(rank_estimate(&g, 1e-10).unwrap(), 2);
        assert!(rank_estimate(&g, 0.0).is_err());
    }

    #[test]
    fn rank_one_complex_duplicate() {
        let r = [C64::new(0.3, 0.4), C64::new(-0.5, 0.2), C64::new(0.1, -0.7)];
        let a = ComplexMatrix::outer(&[C64::new(1.0, 0.0), C64::new(0.0, 2.0)], &r);
        let t = svd(&a).unwrap();
        assert_invariants(&a, &t);
        assert!(t.sigma[1] < 1e-14 * t.sigma[0]);
    }

    #[test]
    fn many_random_shapes() {
        let stream = RngStream::new(0xABCD, 1);
        let mut rng = stream.rng();
        for k in 0..10_000 {
            let r = 1 + k % 8;
            let c = 1 + (k / 8) % 8;
            let a = sample_gaussian_matrix(r, c, &mut rng);
            assert_invariants(&a, &svd(&a).unwrap());
        }
    }

    #[test]
    fn deterministic_bits() {
        let mut rng = RngStream::new(3, 3).rng();
        let a = sample_gaussian_matrix(5, 4, &mut rng);
        assert_eq!(svd(&a).unwrap(), svd(&a).unwrap());
    }

    #[test]
    fn badly_scaled_columns() {
        let a = ComplexMatrix::from_fn(4, 3, |i, j| {
            C64::new(10f64.powi(-(4 * j as i32)) * (i as f64 + 1.0), (i * j) as f64 * 1e-9)
        });
        assert_invariants(&a, &svd(&a).unwrap());
    }
}
