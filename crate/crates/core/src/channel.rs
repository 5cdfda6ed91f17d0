//! Correlated block-fading SIMO channel `Y = S·Pᵀ·diag(x) + W` and the
//! rank-1 stacking used to reduce a rank-Q channel to Q rank-1 channels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix, MatrixJson, C64};
use crate::rng::{sample_cn_vec, sample_gaussian_matrix, sample_sphere};
use crate::svd::rank_estimate;

pub const ROW_NORM_TOL: f64 = 1e-10;
pub const ROOT_RANK_TOL: f64 = 1e-10;

/// Validated `N × Q` correlation square root with unit-norm rows and full
/// column rank.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRoot {
    mat: ComplexMatrix,
}

impl CorrelationRoot {
    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn q(&self) -> usize {
        self.mat.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Column `q` of the root, `p_q`.
    pub fn column(&self, q: usize) -> Vec<C64> {
        self.mat.column(q)
    }

    /// The all-ones `N × 1` root (constant block fading).
    pub fn constant(n: usize) -> Self {
        Self { mat: ComplexMatrix::from_fn(n, 1, |_, _| C64::new(1.0, 0.0)) }
    }

    /// Real root with rows `(cos θ_k, sin θ_k)`.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        let rows: Vec<[f64; 2]> = angles.iter().map(|t| [t.cos(), t.sin()]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        validate_correlation_root(ComplexMatrix::from_real_rows(&refs)?)
    }

    /// Gaussian `N × Q` matrix with rows normalized; redrawn until valid.
    pub fn random<R: Rng + ?Sized>(n: usize, q: usize, rng: &mut R) -> Result<Self> {
        if q == 0 || q > n {
            return Err(Error::InvalidParameter(format!("need 1 <= q <= n, got n={n}, q={q}")));
        }
        loop {
            let g = sample_gaussian_matrix(n, q, rng);
            let rows: Vec<C64> = (0..n)
                .flat_map(|i| {
                    let r = g.row(i);
                    let k = 1.0 / vec_norm(r);
                    r.iter().map(move |z| z * k).collect::<Vec<_>>()
                })
                .collect();
            if let Ok(root) = validate_correlation_root(ComplexMatrix::new(n, q, rows)?) {
                return Ok(root);
            }
        }
    }

    pub fn to_json(&self) -> MatrixJson {
        let mut j = MatrixJson::from(&self.mat);
        j.n = Some(self.n());
        j.q = Some(self.q());
        j
    }

    pub fn from_json(j: MatrixJson) -> Result<Self> {
        let (n, q) = (j.n, j.q);
        let root = validate_correlation_root(ComplexMatrix::try_from(j)?)?;
        if n.is_some_and(|n| n != root.n()) || q.is_some_and(|q| q != root.q()) {
            return Err(Error::Parse(format!(
                "declared n/q ({n:?}, {q:?}) disagree with a {}x{} matrix",
                root.n(),
                root.q()
            )));
        }
        Ok(root)
    }
}

pub fn validate_correlation_root(mat: ComplexMatrix) -> Result<CorrelationRoot> {
    let (n, q) = mat.shape();
    if q > n {
        return Err(Error::Dimension(format!("correlation root must have N >= Q, got {n}x{q}")));
    }
    let (worst_row, worst_norm) = (0..n)
        .map(|i| (i, vec_norm(mat.row(i))))
        .max_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
        .expect("n >= 1");
    if (worst_norm - 1.0).abs() > ROW_NORM_TOL {
        return Err(Error::RowNorm { row: worst_row, norm: worst_norm });
    }
    let rank = rank_estimate(&mat, ROOT_RANK_TOL)?;
    if rank != q {
        return Err(Error::RankDeficient { rank, expected: q });
    }
    Ok(CorrelationRoot { mat })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub n: usize,
    pub q: usize,
    pub m: usize,
    pub rho: f64,
}

impl ChannelConfig {
    pub fn new(n: usize, q: usize, m: usize, rho: f64) -> Result<Self> {
        if n == 0 || q == 0 || q > n || m == 0 {
            return Err(Error::InvalidParameter(format!(
                "need n >= 1, 1 <= q <= n, m >= 1; got n={n}, q={q}, m={m}"
            )));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        Ok(Self { n, q, m, rho })
    }
}

/// Input law used for Monte Carlo blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    /// Uniform on the sphere of radius `√(Nρ)`.
    Sphere,
    /// i.i.d. CN(0, ρ) symbols.
    Gaussian,
    /// `x = 0`; noise-only diagnostic.
    Zero,
}

impl std::str::FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(Self::Sphere),
            "gaussian" => Ok(Self::Gaussian),
            "zero" => Ok(Self::Zero),
            other => Err(Error::Parse(format!("unknown input kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for InputKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Sphere => "sphere",
            Self::Gaussian => "gaussian",
            Self::Zero => "zero",
        })
    }
}

/// Draws an input block satisfying `E‖x‖² ≤ Nρ`.
pub fn sample_power_input<R: Rng + ?Sized>(n: usize, rho: f64, kind: InputKind, rng: &mut R) -> Vec<C64> {
    assert!(n >= 1 && rho > 0.0, "sample_power_input needs n >= 1 and rho > 0");
    match kind {
        InputKind::Sphere => sample_sphere(n, (n as f64 * rho).sqrt(), rng),
        InputKind::Gaussian => {
            let a = rho.sqrt();
            sample_cn_vec(n, rng).into_iter().map(|z| z * a).collect()
        }
        InputKind::Zero => vec![C64::new(0.0, 0.0); n],
    }
}

/// One block of the channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSample {
    #[serde(with = "complex_vec")]
    pub x: Vec<C64>,
    pub s: ComplexMatrix,
    pub w: ComplexMatrix,
    pub y: ComplexMatrix,
}

impl BlockSample {
    /// Forms `y = s·Pᵀ·diag(x) + w` from given fading and noise.
    pub fn assemble(root: &CorrelationRoot, x: Vec<C64>, s: ComplexMatrix, w: ComplexMatrix) -> Result<Self> {
        if x.len() != root.n() || s.cols() != root.q() || w.shape() != (s.rows(), root.n()) {
            return Err(Error::Dimension(format!(
                "block with N={}, Q={}: x has {}, s is {}x{}, w is {}x{}",
                root.n(),
                root.q(),
                x.len(),
                s.rows(),
                s.cols(),
                w.rows(),
                w.cols()
            )));
        }
        let y = s.matmul(&root.matrix().transpose())?.mul_diag_right(&x)?.add(&w)?;
        Ok(Self { x, s, w, y })
    }
}

/// Draws `S` then `W` from `rng` and forms the received block.
pub fn simulate_block<R: Rng + ?Sized>(root: &CorrelationRoot, x: &[C64], m: usize, rng: &mut R) -> Result<BlockSample> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    let s = sample_gaussian_matrix(m, root.q(), rng);
    let w = sample_gaussian_matrix(m, root.n(), rng);
    BlockSample::assemble(root, x.to_vec(), s, w)
}

/// `Y_q = s_q·xᵀ + W_q` for `q = 1..Q`, each `M × N`, drawn independently.
pub fn rank1_stack<R: Rng + ?Sized>(x: &[C64], q: usize, m: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    assert!(q >= 1 && m >= 1 && !x.is_empty());
    (0..q)
        .map(|_| {
            let s = sample_cn_vec(m, rng);
            let w = sample_gaussian_matrix(m, x.len(), rng);
            ComplexMatrix::outer(&s, x).add(&w).expect("shapes agree")
        })
        .collect()
}

/// `Σ_q Y_q · diag(p_q)`.
pub fn recombine(y_list: &[ComplexMatrix], root: &CorrelationRoot) -> Result<ComplexMatrix> {
    if y_list.len() != root.q() {
        return Err(Error::Dimension(format!("{} matrices for rank {}", y_list.len(), root.q())));
    }
    let (m, n) = y_list[0].shape();
    if n != root.n() || y_list.iter().any(|y| y.shape() != (m, n)) {
        return Err(Error::Dimension("stack matrices must all be M x N with N = root.n".into()));
    }
    let mut acc = ComplexMatrix::zeros(m, n);
    for (q, y) in y_list.iter().enumerate() {
        acc = acc.add(&y.mul_diag_right(&root.column(q))?)?;
    }
    Ok(acc)
}

pub(crate) mod complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}
