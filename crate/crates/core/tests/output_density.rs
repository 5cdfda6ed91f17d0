//! Oracles for the output density: normalization by quadrature and importance
//! sampling, and agreement of the tail law with sampled Gaussian matrices.

use prelog_core::duality::{log_r_sigma1, log_r_tail, OutputDensityParams};
use prelog_core::rng::sample_gaussian_matrix;
use prelog_core::svd::singular_values;
use prelog_core::RngStream;
use rand::Rng;

const UPPER: f64 = 12.0;

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (simpson(f, a, m), simpson(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
        return l + r + (l + r - whole) / 15.0;
    }
    adaptive(f, a, m, l, tol / 2.0, depth - 1) + adaptive(f, m, b, r, tol / 2.0, depth - 1)
}

fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // Split first so narrow peaks are not missed by the initial estimate.
    let pieces = 24;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            adaptive(f, lo, hi, simpson(f, lo, hi), tol / pieces as f64, 40)
        })
        .sum()
}

fn tail_density(params: &OutputDensityParams) -> impl Fn(&[f64]) -> f64 + '_ {
    move |s: &[f64]| log_r_tail(s, params).map_or(0.0, f64::exp)
}

#[test]
fn sigma1_density_integrates_to_one() {
    for (m, n, rho) in [(1, 1, 1.0), (2, 3, 10.0), (4, 4, 0.5)] {
        let p = OutputDensityParams::new(m, n, rho).unwrap();
        let scale = ((m * n) as f64 * rho).sqrt();
        let f = |s: f64| if s > 0.0 { log_r_sigma1(s, &p).unwrap().exp() } else { 0.0 };
        let total = integrate(&f, 0.0, 12.0 * scale, 1e-11);
        assert!((total - 1.0).abs() < 1e-8, "({m},{n}) {total}");
    }
}

#[test]
fn single_tail_value_integrates_to_one() {
    for (m, n) in [(2, 2), (2, 3), (3, 2), (2, 6), (5, 2)] {
        let p = OutputDensityParams::new(m, n, 1.0).unwrap();
        let r = tail_density(&p);
        let total = integrate(&|s| if s > 0.0 { r(&[s]) } else { 0.0 }, 0.0, UPPER, 1e-11);
        assert!((total - 1.0).abs() < 1e-8, "({m},{n}) {total}");
    }
}

fn double_integral(f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let outer = |a: f64| {
        if a <= 0.0 {
            return 0.0;
        }
        integrate(&|b| if b > 0.0 && b < a { f(a, b) } else { 0.0 }, 0.0, a, 1e-10)
    };
    integrate(&outer, 0.0, UPPER, 1e-9)
}

#[test]
fn two_tail_values_integrate_to_one() {
    for (m, n) in [(3, 3), (3, 4), (4, 3), (3, 5)] {
        let p = OutputDensityParams::new(m, n, 1.0).unwrap();
        let r = tail_density(&p);
        let total = double_integral(&|a, b| r(&[a, b]));
        assert!((total - 1.0).abs() < 1e-6, "({m},{n}) {total}");
    }
}

#[test]
fn three_tail_values_integrate_to_one() {
    // Uniform proposal on the ordered simplex of [0, A]^3.
    let a = 6.0;
    let vol = a * a * a / 6.0;
    let mut rng = RngStream::new(101, 0).rng();
    for (m, n) in [(4, 4), (4, 5)] {
        let p = OutputDensityParams::new(m, n, 1.0).unwrap();
        let r = tail_density(&p);
        let count = 400_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..count {
            let mut s: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * a).collect();
            s.sort_by(|x, y| y.total_cmp(x));
            let w = r(&s) * vol;
            sum += w;
            sum2 += w * w;
        }
        let mean = sum / count as f64;
        let se = ((sum2 / count as f64 - mean * mean) / count as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * se + 1e-3, "({m},{n}) {mean} ± {se}");
    }
}

// The tail law is that of the singular values of an (M−1)×(N−1) CN(0,1)
// matrix; compare its moments with sampled matrices.
#[test]
fn tail_moments_match_sampled_matrices() {
    let mut rng = RngStream::new(102, 0).rng();
    for (m, n) in [(3, 4), (4, 3), (3, 3)] {
        let p = OutputDensityParams::new(m, n, 1.0).unwrap();
        let r = tail_density(&p);
        let e_top = double_integral(&|a, b| a * a * r(&[a, b]));
        let e_all = double_integral(&|a, b| (a * a + b * b) * r(&[a, b]));
        assert!((e_all - ((m - 1) * (n - 1)) as f64).abs() < 1e-5, "trace {e_all}");

        let count = 200_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..count {
            let g = sample_gaussian_matrix(m - 1, n - 1, &mut rng);
            let s = singular_values(&g).unwrap()[0].powi(2);
            sum += s;
            sum2 += s * s;
        }
        let mean = sum / count as f64;
        let se = ((sum2 / count as f64 - mean * mean) / count as f64).sqrt();
        assert!((mean - e_top).abs() < 4.0 * se, "({m},{n}) quadrature {e_top} sampled {mean} ± {se}");
    }
}

#[test]
fn single_tail_value_passes_ks() {
    // P = 2: the tail is the norm of an (L−1)-vector of CN(0,1) entries.
    let mut rng = RngStream::new(103, 0).rng();
    for (m, n) in [(2, 2), (2, 4), (3, 2)] {
        let p = OutputDensityParams::new(m, n, 1.0).unwrap();
        let r = tail_density(&p);
        let count = 20_000;
        let mut draws: Vec<f64> = (0..count)
            .map(|_| singular_values(&sample_gaussian_matrix(m - 1, n - 1, &mut rng)).unwrap()[0])
            .collect();
        draws.sort_by(f64::total_cmp);

        // Tabulated CDF by cumulative Simpson on a fine grid.
        let steps = 24_000;
        let h = UPPER / steps as f64;
        let f = |s: f64| if s > 0.0 { r(&[s]) } else { 0.0 };
        let mut cdf = vec![0.0; steps + 1];
        for k in 0..steps {
            let a = k as f64 * h;
            cdf[k + 1] = cdf[k] + simpson(&f, a, a + h);
        }
        let at = |x: f64| {
            let t = (x / h).min(steps as f64 - 1.0);
            let k = t as usize;
            cdf[k] + (t - k as f64) * (cdf[k + 1] - cdf[k])
        };
        let d = draws
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = at(x);
                (c - i as f64 / count as f64).abs().max(((i + 1) as f64 / count as f64 - c).abs())
            })
            .fold(0.0, f64::max);
        // 0.1% critical value.
        let crit = 1.95 / (count as f64).sqrt();
        assert!(d < crit, "({m},{n}) KS distance {d} vs {crit}");
    }
}
