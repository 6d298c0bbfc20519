//! Dense complex linear algebra with a single tolerance policy.
//!
//! Approximate equalities are measured in the Frobenius norm relative to
//! `max(1, scale)`; rank decisions are relative to the largest singular value.

mod eigen;
mod matrix;
mod svd;

pub use eigen::{check_psd, eigh, pinv_hermitian, psd_factor, HermitianEigen};
pub(crate) use eigen::factor_from_eigen;
pub use matrix::{kron, partial_trace, unvec, vec, ComplexMatrix, Side, I, ONE, ZERO};
pub use svd::{kernel_basis, range_basis, rank_tol, svd, Svd};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_rank_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_rank_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_rank_tol: f64) -> Result<Self> {
        for (name, v) in [("abs_tol", abs_tol), ("rel_rank_tol", rel_rank_tol)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(Self { abs_tol, rel_rank_tol })
    }

    /// abs_tol · max(1, scale)
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs_tol * scale.max(1.0)
    }
}

/// Extends an isometry V (m×c, V*V = I) to an m×m unitary whose first c
/// columns are V.
///
/// The extra columns come from Gram-Schmidt over e_1, e_2, ... in index order,
/// skipping vectors already (numerically) in the span.
pub fn complete_isometry(v: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let (m, c) = v.shape();
    if c > m {
        return Err(Error::NotIsometry { residual: f64::INFINITY });
    }
    let residual = (&(&v.adjoint() * v) - &ComplexMatrix::identity(c)).frobenius_norm();
    if residual > tol.bound((c as f64).sqrt()) {
        return Err(Error::NotIsometry { residual });
    }

    let mut basis: Vec<Vec<Complex64>> = (0..c).map(|j| v.col(j)).collect();
    for e in 0..m {
        if basis.len() == m {
            break;
        }
        let mut cand = vec![ZERO; m];
        cand[e] = ONE;
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&cand).map(|(x, y)| x.conj() * y).sum();
                for (y, x) in cand.iter_mut().zip(b) {
                    *y -= proj * x;
                }
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(cand.iter().map(|z| z / norm).collect());
        }
    }
    let mut u = ComplexMatrix::zeros(m, m);
    for (j, b) in basis.iter().enumerate() {
        u.set_col(j, b);
    }
    Ok(u)
}

/// ‖M − P(M)‖_F for P the Hilbert-Schmidt projection onto span(basis) over C.
pub fn span_residual(basis: &[ComplexMatrix], m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    if basis.iter().any(|b| b.shape() != m.shape()) {
        return Err(crate::error::mismatch("span members and target must share a shape"));
    }
    let d = basis.len();
    let gram = ComplexMatrix::from_fn(d, d, |a, b| basis[a].hs_inner(&basis[b]));
    let rhs: Vec<Complex64> = basis.iter().map(|b| b.hs_inner(m)).collect();
    let inv = pinv_hermitian(&gram, tol)?;
    let mut r = m.clone();
    for a in 0..d {
        let c: Complex64 = (0..d).map(|b| inv[(a, b)] * rhs[b]).sum();
        r = &r - &basis[a].scale(c);
    }
    Ok(r.frobenius_norm())
}
