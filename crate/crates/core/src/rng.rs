//! Reproducible random streams and the Gaussian/sphere samplers.
//!
//! A [`RngStream`] names a ChaCha8 keystream: the master seed fixes the key
//! and the stream id selects one of the 2⁶⁴ independent keystreams under that
//! key. Monte Carlo chunks derive their own ids with [`RngStream::substream`],
//! so results do not depend on how chunks are scheduled across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::matrix::{vec_norm, ComplexMatrix, C64};

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut r = ChaCha8Rng::seed_from_u64(self.master_seed);
        r.set_stream(self.stream_id);
        r
    }

    /// Child stream `index` of this stream, same master seed.
    pub fn substream(&self, index: u64) -> Self {
        Self {
            master_seed: self.master_seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(0x9E37_79B9))),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One CN(0, 1) draw: real and imaginary parts each N(0, 1/2).
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn sample_cn_vec<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<C64> {
    (0..len).map(|_| sample_cn(rng)).collect()
}

/// `rows × cols` matrix with i.i.d. CN(0, 1) entries, drawn row-major.
pub fn sample_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| sample_cn(rng))
}

/// Uniform point on the complex sphere of the given radius in `C^dim`.
pub fn sample_sphere<R: Rng + ?Sized>(dim: usize, radius: f64, rng: &mut R) -> Vec<C64> {
    assert!(dim >= 1 && radius > 0.0, "sample_sphere needs dim >= 1 and radius > 0");
    loop {
        let g = sample_cn_vec(dim, rng);
        let nrm = vec_norm(&g);
        if nrm > 0.0 {
            let k = radius / nrm;
            return g.into_iter().map(|z| z * k).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_stream_same_matrix() {
        let s = RngStream::new(42, 5);
        let a = sample_gaussian_matrix(2, 2, &mut s.rng());
        let b = sample_gaussian_matrix(2, 2, &mut s.rng());
        assert_eq!(a, b);
        let c = sample_gaussian_matrix(2, 2, &mut RngStream::new(42, 6).rng());
        assert_ne!(a, c);
    }

    #[test]
    fn substreams_are_distinct() {
        let s = RngStream::new(1, 0);
        let ids: std::collections::HashSet<u64> = (0..10_000).map(|i| s.substream(i).stream_id).collect();
        assert_eq!(ids.len(), 10_000);
    }

    #[test]
    fn cn_moments() {
        let mut rng = RngStream::new(11, 0).rng();
        let n = 100_000;
        let mut pow = 0.0;
        let mut mean = C64::new(0.0, 0.0);
        let mut re2 = 0.0;
        for _ in 0..n {
            let w = sample_cn(&mut rng);
            pow += w.norm_sqr();
            mean += w;
            re2 += w.re * w.re;
        }
        let pow = pow / n as f64;
        assert!((0.98..=1.02).contains(&pow), "E|w|^2 = {pow}");
        assert!((mean / n as f64).norm() < 0.02);
        assert!((re2 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn sphere_norms() {
        let mut rng = RngStream::new(12, 0).rng();
        let x = sample_sphere(1, 2.0, &mut rng);
        assert!((x[0].norm() - 2.0).abs() < 1e-14);
        let r = (4.0f64 * 100.0).sqrt();
        let x = sample_sphere(4, r, &mut rng);
        assert!((vec_norm(&x).powi(2) - 400.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_components_uncorrelated() {
        let mut rng = RngStream::new(13, 0).rng();
        let radius = 3.0;
        let n = 100_000;
        let mut acc = C64::new(0.0, 0.0);
        for _ in 0..n {
            let x = sample_sphere(2, radius, &mut rng);
            acc += x[0] * x[1].conj();
        }
        assert!((acc / n as f64).norm() < 0.02 * radius * radius);
    }
}
