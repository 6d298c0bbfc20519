//! Complementary channels Φ^C(X) = Σ_ij Tr(K_i* K_j X) E_ji and their adjoints
//! Φ^{C†}(E_ij) = K_i* K_j.
//!
//! Factorizability of Φ depends only on range(Φ^C), equivalently on its
//! orthogonal complement kernel(Φ^{C†}) ⊂ M_p.

use num_complex::Complex64;

use crate::channel::{require_trace_preserving, KrausSet};
use crate::error::{mismatch, Result};
use crate::numerics::{kernel_basis, range_basis, svd, vec, ComplexMatrix, ToleranceConfig, I};

pub fn apply_complement(k: &KrausSet, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = k.dim_in();
    if x.shape() != (n, n) {
        return Err(mismatch(format!("input must be {n}x{n}, got {}x{}", x.rows(), x.cols())));
    }
    let ops = k.operators();
    let p = ops.len();
    let kx: Vec<ComplexMatrix> = ops.iter().map(|kj| kj * x).collect();
    Ok(ComplexMatrix::from_fn(p, p, |j, i| ops[i].hs_inner(&kx[j])))
}

pub fn apply_complement_adjoint(k: &KrausSet, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = k.len();
    if y.shape() != (p, p) {
        return Err(mismatch(format!("input must be {p}x{p}, got {}x{}", y.rows(), y.cols())));
    }
    let ops = k.operators();
    let mut acc = ComplexMatrix::zeros(k.dim_in(), k.dim_in());
    for i in 0..p {
        let ki_adj = ops[i].adjoint();
        for j in 0..p {
            let c = y[(i, j)];
            if c != Complex64::new(0.0, 0.0) {
                acc += &(&ki_adj * &ops[j]).scale(c);
            }
        }
    }
    Ok(acc)
}

/// Φ^{C†} as an n²×p² matrix together with its kernel dimension.
#[derive(Debug, Clone)]
pub struct ComplementData {
    pub source: KrausSet,
    /// Column i·p + j is vec(K_i* K_j); the input coordinate i·p + j is y_ij.
    pub adjoint_operator_matrix: ComplexMatrix,
    pub kernel_dim: usize,
}

impl ComplementData {
    pub fn new(k: &KrausSet, tol: &ToleranceConfig) -> Result<Self> {
        let matrix = adjoint_operator_matrix(k);
        let rank = svd(&matrix)?.rank(tol);
        Ok(Self {
            source: k.clone(),
            kernel_dim: matrix.cols() - rank,
            adjoint_operator_matrix: matrix,
        })
    }
}

fn adjoint_operator_matrix(k: &KrausSet) -> ComplexMatrix {
    let ops = k.operators();
    let p = ops.len();
    let n = k.dim_in();
    let mut m = ComplexMatrix::zeros(n * n, p * p);
    for (i, ki) in ops.iter().enumerate() {
        let ki_adj = ki.adjoint();
        for (j, kj) in ops.iter().enumerate() {
            m.set_col(i * p + j, &vec(&(&ki_adj * kj)));
        }
    }
    m
}

/// Hilbert-Schmidt-orthonormal Hermitian basis {Z_1..Z_d} of kernel(Φ^{C†}).
///
/// The kernel is *-closed, so the Hermitian parts (B + B*)/2 and
/// (B − B*)/(2i) of a complex kernel basis span it over the reals. Candidates
/// are picked greedily by largest residual against those already chosen.
pub fn selfadjoint_kernel_basis(k: &KrausSet, tol: &ToleranceConfig) -> Result<Vec<ComplexMatrix>> {
    require_trace_preserving(k, tol)?;
    let p = k.len();
    let matrix = adjoint_operator_matrix(k);
    let complex_basis = kernel_basis(&matrix, tol)?;
    let d = complex_basis.len();

    let half = Complex64::new(0.5, 0.0);
    let mut candidates = Vec::with_capacity(2 * d);
    for b in complex_basis {
        let b = ComplexMatrix::from_vec(p, p, b)?;
        let b_adj = b.adjoint();
        candidates.push((&b + &b_adj).scale(half));
        candidates.push((&b - &b_adj).scale(half / I));
    }
    Ok(greedy_orthonormalize(candidates, d))
}

/// Real Gram-Schmidt on Hermitian matrices, always taking the candidate with
/// the largest remaining component next.
fn greedy_orthonormalize(mut candidates: Vec<ComplexMatrix>, want: usize) -> Vec<ComplexMatrix> {
    let mut chosen: Vec<ComplexMatrix> = Vec::with_capacity(want);
    while chosen.len() < want && !candidates.is_empty() {
        let (best, norm) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.frobenius_norm()))
            .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if norm <= 0.0 {
            break;
        }
        let mut z = candidates.swap_remove(best).scale_real(1.0 / norm);
        // re-orthogonalize once more against the chosen set
        for q in &chosen {
            let c = q.hs_inner(&z).re;
            z = &z - &q.scale_real(c);
        }
        let z = z.hermitian_part();
        let z = z.scale_real(1.0 / z.frobenius_norm());
        for c in candidates.iter_mut() {
            let proj = z.hs_inner(c).re;
            *c = &*c - &z.scale_real(proj);
        }
        chosen.push(z);
    }
    chosen
}

/// Orthonormal basis of span{Φ^C(E_kl)} ⊂ M_p.
pub fn complement_range_basis(k: &KrausSet, tol: &ToleranceConfig) -> Result<Vec<ComplexMatrix>> {
    let n = k.dim_in();
    let p = k.len();
    let mut images = ComplexMatrix::zeros(p * p, n * n);
    for a in 0..n {
        for b in 0..n {
            let img = apply_complement(k, &ComplexMatrix::unit(n, n, a, b))?;
            images.set_col(a * n + b, img.as_slice());
        }
    }
    range_basis(&images, tol)?
        .into_iter()
        .map(|v| ComplexMatrix::from_vec(p, p, v))
        .collect()
}

/// Extreme point of the quantum channels iff Φ^{C†} is injective.
pub fn is_extreme_channel(k: &KrausSet, tol: &ToleranceConfig) -> Result<bool> {
    require_trace_preserving(k, tol)?;
    let data = ComplementData::new(k, tol)?;
    let n = k.dim_in();
    let p = k.len();
    Ok(data.kernel_dim == 0 && n * n >= p * p)
}
