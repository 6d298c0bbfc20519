//! The linear matrix inequality L_Z(A) = I_p ⊗ I_k + Σ Z_i ⊗ A_i ⪰ 0 attached
//! to a channel, membership tests for its solution sets, and the passage
//! between solution points and factor elements V_i ∈ M_k.
//!
//! Block (i, j) of L_Z(A), of size k×k, is δ_ij I_k + Σ_a (Z_a)_ij A_a. A point
//! with rank(L_Z(A)) ≤ k factors as V*V with V = [V_1 … V_p] of shape k×(p·k),
//! so that block (i, j) equals V_i* V_j.

use num_complex::Complex64;

use crate::channel::{require_trace_preserving, KrausSet};
use crate::complement::selfadjoint_kernel_basis;
use crate::error::{mismatch, Error, Result};
use crate::numerics::{
    check_psd, eigh, factor_from_eigen, kron, pinv_hermitian, psd_factor, rank_tol, ComplexMatrix,
    ToleranceConfig, ZERO,
};
use crate::schur::{hm_example, hm_kernel_basis};

/// Coefficients Z_1..Z_d ∈ M_p of the inequality.
///
/// The Z_i must be Hermitian and linearly independent; they need not be
/// Hilbert-Schmidt orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiSystem {
    p: usize,
    z: Vec<ComplexMatrix>,
    source: Option<KrausSet>,
}

impl LmiSystem {
    pub fn new(p: usize, z: Vec<ComplexMatrix>, tol: &ToleranceConfig) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("LMI needs p >= 1".into()));
        }
        for (i, zi) in z.iter().enumerate() {
            if zi.shape() != (p, p) {
                return Err(mismatch(format!("Z_{i} must be {p}x{p}, got {}x{}", zi.rows(), zi.cols())));
            }
            let bound = tol.bound(zi.frobenius_norm());
            let asymmetry = zi.hermitian_defect();
            if asymmetry > bound {
                return Err(Error::NotHermitian { asymmetry, bound });
            }
        }
        let z: Vec<ComplexMatrix> = z.iter().map(ComplexMatrix::hermitian_part).collect();
        let gram = coefficient_gram(&z);
        if !z.is_empty() && rank_tol(&gram, tol)? < z.len() {
            return Err(Error::InvalidArgument("coefficient matrices are linearly dependent".into()));
        }
        Ok(Self { p, z, source: None })
    }

    pub fn with_source(mut self, k: KrausSet) -> Result<Self> {
        if k.len() != self.p {
            return Err(mismatch(format!("source channel has {} Kraus operators, system has p = {}", k.len(), self.p)));
        }
        self.source = Some(k);
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[ComplexMatrix] {
        &self.z
    }

    pub fn source(&self) -> Option<&KrausSet> {
        self.source.as_ref()
    }

    /// L_Z(x) = I_p + Σ x_i Z_i, the level-one pencil.
    pub fn scalar_pencil(&self, x: &[f64]) -> Result<ComplexMatrix> {
        if x.len() != self.d() {
            return Err(mismatch(format!("expected {} coefficients, got {}", self.d(), x.len())));
        }
        let mut l = ComplexMatrix::identity(self.p);
        for (zi, &xi) in self.z.iter().zip(x) {
            l += &zi.scale_real(xi);
        }
        Ok(l)
    }

    pub fn face_channel(&self, x: &[f64], tol: &ToleranceConfig) -> Result<KrausSet> {
        let k = self
            .source
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("system has no source channel".into()))?;
        face_channel_for(k, self, x, tol)
    }
}

/// [Tr(Z_a Z_b)], real symmetric for Hermitian Z.
fn coefficient_gram(z: &[ComplexMatrix]) -> ComplexMatrix {
    let d = z.len();
    ComplexMatrix::from_fn(d, d, |a, b| Complex64::new(z[a].hs_inner(&z[b]).re, 0.0))
}

/// A tuple A = (A_1..A_d) of Hermitian k×k matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiPoint {
    k: usize,
    a: Vec<ComplexMatrix>,
}

impl LmiPoint {
    pub fn new(k: usize, a: Vec<ComplexMatrix>, tol: &ToleranceConfig) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("point needs k >= 1".into()));
        }
        for (i, ai) in a.iter().enumerate() {
            if ai.shape() != (k, k) {
                return Err(mismatch(format!("A_{i} must be {k}x{k}, got {}x{}", ai.rows(), ai.cols())));
            }
            let bound = tol.bound(ai.frobenius_norm());
            let asymmetry = ai.hermitian_defect();
            if asymmetry > bound {
                return Err(Error::NotHermitian { asymmetry, bound });
            }
        }
        Ok(Self { k, a })
    }

    /// The zero point of S_k^d.
    pub fn zero(k: usize, d: usize) -> Self {
        Self {
            k,
            a: vec![ComplexMatrix::zeros(k, k); d],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[ComplexMatrix] {
        &self.a
    }

    pub fn traces(&self) -> Vec<f64> {
        self.a.iter().map(|ai| ai.trace().re).collect()
    }

    /// (A_i ⊕ B_i)
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.d() != other.d() {
            return Err(mismatch(format!("points have d = {} and {}", self.d(), other.d())));
        }
        Ok(Self {
            k: self.k + other.k,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x.direct_sum(y)).collect(),
        })
    }

    /// (W* A_i W) for W of shape k×k'.
    pub fn compress(&self, w: &ComplexMatrix) -> Result<Self> {
        if w.rows() != self.k {
            return Err(mismatch(format!("compression needs {} rows, got {}", self.k, w.rows())));
        }
        let wa = w.adjoint();
        let a = self
            .a
            .iter()
            .map(|ai| Ok(wa.matmul(ai)?.matmul(w)?.hermitian_part()))
            .collect::<Result<_>>()?;
        Ok(Self { k: w.cols(), a })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            k: self.k,
            a: self.a.iter().map(|ai| ai.scale_real(s)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub psd: bool,
    pub rank: usize,
    pub min_eigenvalue: f64,
    pub traces: Vec<f64>,
}

impl Membership {
    pub fn max_abs_trace(&self) -> f64 {
        self.traces.iter().fold(0.0, |m, t| f64::max(m, t.abs()))
    }
}

/// The system of a trace-preserving channel: Z spans the Hermitian kernel of
/// the adjoint complement.
pub fn build_lmi(k: &KrausSet, tol: &ToleranceConfig) -> Result<LmiSystem> {
    require_trace_preserving(k, tol)?;
    let z = selfadjoint_kernel_basis(k, tol)?;
    LmiSystem::new(k.len(), z, tol)?.with_source(k.clone())
}

/// The six-point Schur channel with its fixed three-element basis.
pub fn hm_system() -> LmiSystem {
    let tol = ToleranceConfig::default();
    LmiSystem::new(3, hm_kernel_basis().to_vec(), &tol)
        .and_then(|s| s.with_source(hm_example().channel()))
        .expect("fixed basis is Hermitian and independent")
}

fn check_point(s: &LmiSystem, pt: &LmiPoint) -> Result<()> {
    if s.d() != pt.d() {
        return Err(mismatch(format!("system has d = {}, point has d = {}", s.d(), pt.d())));
    }
    Ok(())
}

pub fn lmi_eval(s: &LmiSystem, pt: &LmiPoint) -> Result<ComplexMatrix> {
    check_point(s, pt)?;
    let mut l = ComplexMatrix::identity(s.p * pt.k);
    for (zi, ai) in s.z.iter().zip(&pt.a) {
        l += &kron(zi, ai);
    }
    Ok(l)
}

pub fn lmi_membership(s: &LmiSystem, pt: &LmiPoint, tol: &ToleranceConfig) -> Result<Membership> {
    let l = lmi_eval(s, pt)?;
    let eig = eigh(&l, tol)?;
    let min_eigenvalue = eig.min_value();
    Ok(Membership {
        psd: min_eigenvalue >= -tol.bound(l.frobenius_norm()),
        rank: rank_tol(&l, tol)?,
        min_eigenvalue,
        traces: pt.traces(),
    })
}

/// Column blocks V_1..V_p ∈ M_k of a k-row factor of L_Z(A).
///
/// The factor is fixed up to a common left unitary; rows are zero-padded when
/// rank(L_Z(A)) < k.
pub fn extract_blocks(s: &LmiSystem, pt: &LmiPoint, tol: &ToleranceConfig) -> Result<Vec<ComplexMatrix>> {
    let l = lmi_eval(s, pt)?;
    let eig = check_psd(&l, tol)?;
    let f = factor_from_eigen(&eig, tol);
    let k = pt.k;
    if f.rows() > k {
        return Err(Error::RankTooHigh { rank: f.rows(), k });
    }
    let mut v = ComplexMatrix::zeros(k, s.p * k);
    v.set_submatrix(0, 0, &f);
    Ok((0..s.p).map(|i| v.submatrix(0, i * k, k, k)).collect())
}

/// Block Gram matrix G = [V_i* V_j].
pub fn block_gram(v: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let Some(first) = v.first() else {
        return Ok(ComplexMatrix::zeros(0, 0));
    };
    let k = first.cols();
    if v.iter().any(|vi| vi.cols() != k || vi.rows() != first.rows()) {
        return Err(mismatch("blocks must share one shape"));
    }
    let mut g = ComplexMatrix::zeros(v.len() * k, v.len() * k);
    for (i, vi) in v.iter().enumerate() {
        let vi_adj = vi.adjoint();
        for (j, vj) in v.iter().enumerate() {
            g.set_submatrix(i * k, j * k, &vi_adj.matmul(vj)?);
        }
    }
    Ok(g)
}

/// Recovers A from blocks with [V_i* V_j] = L_Z(A) by least squares.
pub fn point_from_blocks(s: &LmiSystem, v: &[ComplexMatrix], tol: &ToleranceConfig) -> Result<LmiPoint> {
    if v.len() != s.p {
        return Err(mismatch(format!("expected {} blocks, got {}", s.p, v.len())));
    }
    let k = v[0].cols();
    if v.iter().any(|vi| !vi.is_square() || vi.cols() != k) {
        return Err(mismatch("blocks must be square of a common size"));
    }
    let g = block_gram(v)?;
    let d = &g - &ComplexMatrix::identity(s.p * k);
    let block = |i: usize, j: usize| d.submatrix(i * k, j * k, k, k);

    // normal equations Σ_b Tr(Z_a Z_b) A_b = Σ_ij conj((Z_a)_ij) D_ij
    let rhs: Vec<ComplexMatrix> = s
        .z
        .iter()
        .map(|za| {
            let mut acc = ComplexMatrix::zeros(k, k);
            for i in 0..s.p {
                for j in 0..s.p {
                    let c = za[(i, j)].conj();
                    if c != ZERO {
                        acc += &block(i, j).scale(c);
                    }
                }
            }
            acc
        })
        .collect();
    let m_inv = pinv_hermitian(&coefficient_gram(&s.z), tol)?;
    let a: Vec<ComplexMatrix> = (0..s.d())
        .map(|a| {
            let mut acc = ComplexMatrix::zeros(k, k);
            for (b, rb) in rhs.iter().enumerate() {
                acc += &rb.scale(m_inv[(a, b)]);
            }
            acc.hermitian_part()
        })
        .collect();

    let pt = LmiPoint { k, a };
    let residual = (&lmi_eval(s, &pt)? - &g).frobenius_norm();
    if residual > tol.bound(g.frobenius_norm()) {
        return Err(Error::NotInSpan { residual });
    }
    Ok(pt)
}

/// Channel on the face through K parametrized by a level-one point x:
/// K̂_m = Σ_j q_mj K_j where Q*Q = L_Z(x).
pub fn face_channel(k: &KrausSet, x: &[f64], tol: &ToleranceConfig) -> Result<KrausSet> {
    let s = build_lmi(k, tol)?;
    face_channel_for(k, &s, x, tol)
}

fn face_channel_for(k: &KrausSet, s: &LmiSystem, x: &[f64], tol: &ToleranceConfig) -> Result<KrausSet> {
    if k.len() != s.p {
        return Err(mismatch(format!("channel has {} Kraus operators, system has p = {}", k.len(), s.p)));
    }
    let l = s.scalar_pencil(x)?;
    let q = psd_factor(&l, tol).map_err(|e| match e {
        Error::NotPsd { min_eigenvalue, .. } => Error::NotInSpectrahedron { min_eigenvalue },
        other => other,
    })?;
    Ok(k.recombine(&q)?.drop_negligible(tol.abs_tol))
}
