//! Correlation matrices, Gram vectors and Schur product channels X ↦ X ∘ C.
//!
//! With Gram vectors w_1..w_n ∈ C^p (⟨w_i, w_j⟩ = c_ij) the Kraus operators are
//! the diagonal matrices D_{v_l}, where v_l ∈ C^n has entries v_lj = conj(w_jl).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::KrausSet;
use crate::error::{mismatch, Error, Result};
use crate::numerics::{check_psd, psd_factor, rank_tol, ComplexMatrix, ToleranceConfig, ZERO};

/// A PSD matrix with unit diagonal, i.e. a point of the elliptope.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    matrix: ComplexMatrix,
    rank: usize,
}

impl CorrelationMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

pub fn validate_correlation(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<CorrelationMatrix> {
    if !m.is_square() || m.rows() == 0 {
        return Err(mismatch(format!(
            "correlation matrix must be square and nonempty, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    check_psd(m, tol)?;
    let deviation = (0..m.rows())
        .map(|i| (m[(i, i)] - 1.0).norm())
        .fold(0.0, f64::max);
    if deviation > tol.abs_tol {
        return Err(Error::DiagonalNotOne { deviation });
    }
    Ok(CorrelationMatrix {
        rank: rank_tol(m, tol)?,
        matrix: m.clone(),
    })
}

/// Unit vectors w_1..w_n in C^p.
#[derive(Debug, Clone, PartialEq)]
pub struct GramVectors {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
}

impl GramVectors {
    pub fn new(vectors: Vec<Vec<Complex64>>, tol: &ToleranceConfig) -> Result<Self> {
        let dim = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidArgument("at least one Gram vector is required".into()))?;
        if dim == 0 || vectors.iter().any(|w| w.len() != dim) {
            return Err(mismatch("Gram vectors must share a positive dimension"));
        }
        for (i, w) in vectors.iter().enumerate() {
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > tol.abs_tol {
                return Err(Error::InvalidArgument(format!("Gram vector {i} has norm {norm}, expected 1")));
            }
        }
        Ok(Self { dim, vectors })
    }

    /// Number of vectors n.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Ambient dimension p.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    /// [⟨w_i, w_j⟩]
    pub fn gram_matrix(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            self.vectors[i]
                .iter()
                .zip(&self.vectors[j])
                .map(|(a, b)| a.conj() * b)
                .sum()
        })
    }
}

/// w_i is the i-th column of the factor B with B*B = C, so p = rank(C).
pub fn gram_from_correlation(c: &CorrelationMatrix, tol: &ToleranceConfig) -> Result<GramVectors> {
    let b = psd_factor(&c.matrix, tol)?;
    let vectors = (0..b.cols()).map(|j| b.col(j)).collect();
    GramVectors::new(vectors, tol)
}

pub fn correlation_from_gram(w: &GramVectors, tol: &ToleranceConfig) -> Result<CorrelationMatrix> {
    validate_correlation(&w.gram_matrix(), tol)
}

/// Diagonal Kraus operators D_{v_l}, l = 1..p, built from the given Gram vectors.
pub fn schur_channel_from_gram(w: &GramVectors) -> KrausSet {
    let n = w.len();
    let ops = (0..w.dim())
        .map(|l| {
            let v: Vec<Complex64> = w.vectors.iter().map(|wj| wj[l].conj()).collect();
            ComplexMatrix::diag(&v)
        })
        .collect();
    KrausSet::new(n, n, ops).expect("diagonal Kraus operators share a shape")
}

pub fn schur_channel(c: &CorrelationMatrix, tol: &ToleranceConfig) -> Result<KrausSet> {
    Ok(schur_channel_from_gram(&gram_from_correlation(c, tol)?))
}

/// Φ^C(X) = Σ_i x_ii (w_i w_i*)^T
pub fn schur_complement_apply(w: &GramVectors, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = w.len();
    if x.shape() != (n, n) {
        return Err(mismatch(format!("input must be {n}x{n}, got {}x{}", x.rows(), x.cols())));
    }
    let p = w.dim();
    let mut out = ComplexMatrix::zeros(p, p);
    for (i, wi) in w.vectors.iter().enumerate() {
        let xi = x[(i, i)];
        if xi == ZERO {
            continue;
        }
        for a in 0..p {
            for b in 0..p {
                // (w w*)^T has (a, b) entry conj(w_a) w_b
                out[(a, b)] += xi * wi[a].conj() * wi[b];
            }
        }
    }
    Ok(out)
}

/// Φ^{C†}(Y) = Σ_i (w_i^T Y conj(w_i)) E_ii
pub fn schur_complement_adjoint_apply(w: &GramVectors, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = w.dim();
    if y.shape() != (p, p) {
        return Err(mismatch(format!("input must be {p}x{p}, got {}x{}", y.rows(), y.cols())));
    }
    let diag: Vec<Complex64> = w
        .vectors
        .iter()
        .map(|wi| {
            let mut acc = ZERO;
            for a in 0..p {
                for b in 0..p {
                    acc += wi[a] * y[(a, b)] * wi[b].conj();
                }
            }
            acc
        })
        .collect();
    Ok(ComplexMatrix::diag(&diag))
}

/// The 6×6 correlation matrix with off-diagonal entries ±1/√5, its Gram
/// vectors in C^3 built from fifth roots of unity, and a Hermitian basis of
/// the kernel of its complement's adjoint.
#[derive(Debug, Clone)]
pub struct HmExample {
    pub correlation: CorrelationMatrix,
    pub gram: GramVectors,
    pub z: [ComplexMatrix; 3],
    pub beta: f64,
}

// Rows 2..6 are circulant: c = β when the indices differ by ±1 mod 5, −β for ±2.
// In particular c_26 = c_62 = +β, as forced by the Gram vectors below.
const HM_SIGNS: [[i8; 6]; 6] = [
    [0, 1, 1, 1, 1, 1],
    [1, 0, 1, -1, -1, 1],
    [1, 1, 0, 1, -1, -1],
    [1, -1, 1, 0, 1, -1],
    [1, -1, -1, 1, 0, 1],
    [1, 1, -1, -1, 1, 0],
];

pub fn hm_correlation_matrix() -> ComplexMatrix {
    let beta = 1.0 / 5f64.sqrt();
    ComplexMatrix::from_fn(6, 6, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(beta * HM_SIGNS[i][j] as f64, 0.0)
        }
    })
}

pub fn hm_gram_vectors() -> Vec<Vec<Complex64>> {
    // principal primitive fifth root of unity
    let omega = |k: u32| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 5.0);
    let s = 1.0 / 5f64.sqrt();
    let r2 = 2f64.sqrt();
    let mut out = vec![vec![Complex64::new(1.0, 0.0), ZERO, ZERO]];
    for (a, b) in [(0, 0), (1, 4), (2, 3), (3, 2), (4, 1)] {
        out.push(vec![
            Complex64::new(s, 0.0),
            omega(a) * (r2 * s),
            omega(b) * (r2 * s),
        ]);
    }
    out
}

pub fn hm_kernel_basis() -> [ComplexMatrix; 3] {
    let r2 = 2f64.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let z1 = ComplexMatrix::diag_real(&[0.0, r2, -r2]);
    let z2 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, -1.0], &[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]]);
    let z3 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 1.0], &[-1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]]).scale(i);
    [z1, z2, z3]
}

pub fn hm_example() -> HmExample {
    let tol = ToleranceConfig::default();
    HmExample {
        correlation: validate_correlation(&hm_correlation_matrix(), &tol).expect("six-point matrix is a correlation matrix"),
        gram: GramVectors::new(hm_gram_vectors(), &tol).expect("six-point Gram vectors are unit vectors"),
        z: hm_kernel_basis(),
        beta: 1.0 / 5f64.sqrt(),
    }
}

impl HmExample {
    /// The Schur channel built from the printed Gram vectors, so that its
    /// complement kernel is spanned by `z`.
    pub fn channel(&self) -> KrausSet {
        schur_channel_from_gram(&self.gram)
    }
}
