//! Factorizations of channels through finite direct sums of matrix algebras
//! ⊕_k M_{i_k} carrying the tracial state τ(⊕B_k) = Σ q_k Tr(B_k)/i_k.
//!
//! A certificate assigns to every Kraus operator K_i an element
//! V_i = ⊕_k V_i^{(k)}; it is valid when the V_i are τ-orthonormal and every
//! U_k = Σ_i K_i ⊗ V_i^{(k)} is unitary.

use crate::channel::{dilation_blocks, KrausSet};
use crate::complement::apply_complement;
use crate::error::{mismatch, Error, Result};
use crate::lmi::{extract_blocks, lmi_membership, LmiPoint, LmiSystem};
use crate::numerics::{kron, pinv_hermitian, psd_factor, ComplexMatrix, ToleranceConfig, ZERO};

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorAlgebra {
    factors: Vec<Factor>,
}

impl FactorAlgebra {
    /// Weights must be positive and sum to 1 within 1e-12.
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidAlgebra("at least one factor is required".into()));
        }
        for (k, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(Error::InvalidAlgebra(format!("factor {k} has dimension 0")));
            }
            if !f.weight.is_finite() || f.weight <= 0.0 {
                return Err(Error::InvalidAlgebra(format!("factor {k} has weight {}", f.weight)));
            }
        }
        let total: f64 = factors.iter().map(|f| f.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidAlgebra(format!("weights sum to {total}")));
        }
        Ok(Self { factors })
    }

    /// M_k with its normalized trace.
    pub fn matrix(dim: usize) -> Result<Self> {
        Self::new(vec![Factor { dim, weight: 1.0 }])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationCertificate {
    algebra: FactorAlgebra,
    elements: Vec<Vec<ComplexMatrix>>,
}

impl FactorizationCertificate {
    /// `elements[i][k]` is the M_{i_k} block of the element paired with K_i.
    pub fn new(algebra: FactorAlgebra, elements: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(mismatch("certificate needs at least one element"));
        }
        for (i, v) in elements.iter().enumerate() {
            if v.len() != algebra.len() {
                return Err(mismatch(format!(
                    "element {i} has {} blocks for {} factors",
                    v.len(),
                    algebra.len()
                )));
            }
            for (block, f) in v.iter().zip(&algebra.factors) {
                if block.shape() != (f.dim, f.dim) {
                    return Err(mismatch(format!(
                        "element {i} has a {}x{} block in an M_{} factor",
                        block.rows(),
                        block.cols(),
                        f.dim
                    )));
                }
            }
        }
        Ok(Self { algebra, elements })
    }

    pub fn algebra(&self) -> &FactorAlgebra {
        &self.algebra
    }

    pub fn elements(&self) -> &[Vec<ComplexMatrix>] {
        &self.elements
    }

    /// Number of elements p.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The blocks (V_i^{(k)})_i living in factor k.
    pub fn factor_blocks(&self, k: usize) -> Vec<&ComplexMatrix> {
        self.elements.iter().map(|v| &v[k]).collect()
    }

    /// [τ(V_i* V_j)]
    pub fn tau_gram(&self) -> ComplexMatrix {
        let p = self.len();
        let mut g = ComplexMatrix::zeros(p, p);
        for (k, f) in self.algebra.factors.iter().enumerate() {
            g += &factor_gram(&self.factor_blocks(k)).scale_real(f.weight);
        }
        g
    }
}

/// [Tr(V_i* V_j) / dim] for the blocks of one factor.
fn factor_gram(blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let p = blocks.len();
    let dim = blocks.first().map_or(1, |b| b.rows()) as f64;
    ComplexMatrix::from_fn(p, p, |i, j| blocks[i].hs_inner(blocks[j]) / dim)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    pub orthonormality_residual: f64,
    pub complement_residual: f64,
    pub unitarity_residual: f64,
    /// The common acceptance bound abs_tol·max(1, √(n·Σ i_k)).
    pub bound: f64,
    pub pass: bool,
}

fn check_shapes(k: &KrausSet, cert: &FactorizationCertificate) -> Result<()> {
    if k.len() != cert.len() {
        return Err(mismatch(format!(
            "channel has {} Kraus operators, certificate has {} elements",
            k.len(),
            cert.len()
        )));
    }
    Ok(())
}

pub fn verify_certificate(
    k: &KrausSet,
    cert: &FactorizationCertificate,
    tol: &ToleranceConfig,
) -> Result<VerificationReport> {
    check_shapes(k, cert)?;
    let p = k.len();
    let n = k.dim_in();

    let tau = cert.tau_gram();
    let orthonormality_residual = (0..p)
        .flat_map(|i| (0..p).map(move |j| (i, j)))
        .map(|(i, j)| (tau[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);

    // images of the matrix units under the complement
    let mut images = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            images.push(apply_complement(k, &ComplexMatrix::unit(n, n, a, b))?);
        }
    }

    let mut complement_residual: f64 = 0.0;
    let mut unitarity_sq = 0.0;
    for (idx, f) in cert.algebra.factors.iter().enumerate() {
        let blocks = cert.factor_blocks(idx);
        let products: Vec<Vec<ComplexMatrix>> = blocks
            .iter()
            .map(|vi| blocks.iter().map(|vj| &vj.adjoint() * vi).collect())
            .collect();
        for x in &images {
            // Σ x_ij V_j* V_i − Tr(X) I
            let mut acc = ComplexMatrix::identity(f.dim).scale(-x.trace());
            for (i, row) in products.iter().enumerate() {
                for (j, prod) in row.iter().enumerate() {
                    let c = x[(i, j)];
                    if c != ZERO {
                        acc += &prod.scale(c);
                    }
                }
            }
            complement_residual = complement_residual.max(acc.frobenius_norm());
        }

        let u = assemble_unitary(k, &blocks);
        let d = &(&u.adjoint() * &u) - &ComplexMatrix::identity(u.cols());
        unitarity_sq += d.frobenius_norm().powi(2);
    }
    let unitarity_residual = unitarity_sq.sqrt();

    let total_dim: usize = cert.algebra.factors.iter().map(|f| f.dim).sum();
    let bound = tol.bound(((n * total_dim) as f64).sqrt());
    let pass = orthonormality_residual <= bound && complement_residual <= bound && unitarity_residual <= bound;
    Ok(VerificationReport {
        orthonormality_residual,
        complement_residual,
        unitarity_residual,
        bound,
        pass,
    })
}

/// Σ_i K_i ⊗ V_i
fn assemble_unitary(k: &KrausSet, blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let dim = blocks[0].rows();
    let mut u = ComplexMatrix::zeros(k.dim_out() * dim, k.dim_in() * dim);
    for (ki, vi) in k.operators().iter().zip(blocks) {
        u += &kron(ki, vi);
    }
    u
}

fn require_pass(k: &KrausSet, cert: &FactorizationCertificate, tol: &ToleranceConfig, what: &str) -> Result<()> {
    let r = verify_certificate(k, cert, tol)?;
    if !r.pass {
        return Err(Error::CertificateInvalid(format!(
            "{what}: orthonormality {:.3e}, complement {:.3e}, unitarity {:.3e} (bound {:.3e})",
            r.orthonormality_residual, r.complement_residual, r.unitarity_residual, r.bound
        )));
    }
    Ok(())
}

/// Certificate over M_k from a solution point with traceless coefficients.
///
/// The blocks of a k-row factor of L_Z(A) already satisfy Tr(V_i* V_j) = k·δ_ij
/// when Tr(A) = 0, so they are τ_k-orthonormal without rescaling.
pub fn certificate_from_point(
    k: &KrausSet,
    s: &LmiSystem,
    pt: &LmiPoint,
    tol: &ToleranceConfig,
) -> Result<FactorizationCertificate> {
    if k.len() != s.p() {
        return Err(mismatch(format!("channel has {} Kraus operators, system has p = {}", k.len(), s.p())));
    }
    let m = lmi_membership(s, pt, tol)?;
    if m.psd && m.rank > pt.k() {
        return Err(Error::RankTooHigh { rank: m.rank, k: pt.k() });
    }
    let max_trace = m.max_abs_trace();
    if max_trace > tol.abs_tol {
        return Err(Error::TraceNotZero { max_trace });
    }
    let blocks = extract_blocks(s, pt, tol)?;
    let cert = FactorizationCertificate::new(
        FactorAlgebra::matrix(pt.k())?,
        blocks.into_iter().map(|v| vec![v]).collect(),
    )?;
    require_pass(k, &cert, tol, "extracted blocks")?;
    Ok(cert)
}

/// The channel X ↦ (id ⊗ τ_k)(W (X ⊗ I) W*) together with its certificate
/// V_ab = √k E_ab, for which Σ K_ab ⊗ V_ab = W.
pub fn certificate_from_dilation(
    w: &ComplexMatrix,
    n: usize,
    k: usize,
    tol: &ToleranceConfig,
) -> Result<(KrausSet, FactorizationCertificate)> {
    let blocks = dilation_blocks(w, n, k, tol)?;
    let s = (k as f64).sqrt();
    let mut ops = Vec::with_capacity(blocks.len());
    let mut elements = Vec::with_capacity(blocks.len());
    for (a, b, block) in blocks {
        ops.push(block.scale_real(1.0 / s));
        elements.push(vec![ComplexMatrix::unit(k, k, a, b).scale_real(s)]);
    }
    let channel = KrausSet::new(n, n, ops)?;
    let cert = FactorizationCertificate::new(FactorAlgebra::matrix(k)?, elements)?;
    Ok((channel, cert))
}

/// Certificate for t·Φ_1 + (1−t)·Φ_2 over the direct sum of both algebras.
pub fn combine_certificates(
    k1: &KrausSet,
    c1: &FactorizationCertificate,
    k2: &KrausSet,
    c2: &FactorizationCertificate,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<(KrausSet, FactorizationCertificate)> {
    require_pass(k1, c1, tol, "first certificate")?;
    require_pass(k2, c2, tol, "second certificate")?;
    let k = crate::channel::convex_combine_channels(k1, k2, t)?;

    let factors = c1
        .algebra
        .factors
        .iter()
        .map(|f| Factor { dim: f.dim, weight: t * f.weight })
        .chain(c2.algebra.factors.iter().map(|f| Factor {
            dim: f.dim,
            weight: (1.0 - t) * f.weight,
        }))
        .collect();
    let algebra = FactorAlgebra::new(factors)?;

    let zeros = |c: &FactorizationCertificate| -> Vec<ComplexMatrix> {
        c.algebra.factors.iter().map(|f| ComplexMatrix::zeros(f.dim, f.dim)).collect()
    };
    let (s1, s2) = (1.0 / t.sqrt(), 1.0 / (1.0 - t).sqrt());
    let mut elements = Vec::with_capacity(c1.len() + c2.len());
    for v in &c1.elements {
        let mut e: Vec<ComplexMatrix> = v.iter().map(|b| b.scale_real(s1)).collect();
        e.extend(zeros(c2));
        elements.push(e);
    }
    for w in &c2.elements {
        let mut e = zeros(c1);
        e.extend(w.iter().map(|b| b.scale_real(s2)));
        elements.push(e);
    }
    Ok((k, FactorizationCertificate::new(algebra, elements)?))
}

#[derive(Debug, Clone)]
pub struct Component {
    pub weight: f64,
    pub channel: KrausSet,
    pub certificate: FactorizationCertificate,
    /// G = Q*Q = [τ_{i_k}(V_i^{(k)*} V_j^{(k)})]
    pub gram: ComplexMatrix,
}

/// Splits a certified channel into Σ q_k Φ_k, one channel per factor.
pub fn decompose_by_factors(
    k: &KrausSet,
    cert: &FactorizationCertificate,
    tol: &ToleranceConfig,
) -> Result<Vec<Component>> {
    require_pass(k, cert, tol, "input certificate")?;
    if cert.algebra.len() == 1 {
        return Ok(vec![Component {
            weight: 1.0,
            channel: k.clone(),
            certificate: cert.clone(),
            gram: factor_gram(&cert.factor_blocks(0)),
        }]);
    }
    cert.algebra
        .factors
        .iter()
        .enumerate()
        .map(|(idx, f)| {
            let blocks = cert.factor_blocks(idx);
            let gram = factor_gram(&blocks);
            let q = psd_factor(&gram, tol)?;
            let channel = k.recombine(&q)?;
            // W_m = Σ_j (Q⁺)_jm V_j with Q⁺ = Q*(QQ*)⁻¹; Σ K̂_m ⊗ W_m = Σ K_j ⊗ V_j
            let q_adj = q.adjoint();
            let q_plus = q_adj.matmul(&pinv_hermitian(&q.matmul(&q_adj)?, tol)?)?;
            let elements = (0..q.rows())
                .map(|m| {
                    let mut w = ComplexMatrix::zeros(f.dim, f.dim);
                    for (j, vj) in blocks.iter().enumerate() {
                        w += &vj.scale(q_plus[(j, m)]);
                    }
                    vec![w]
                })
                .collect();
            let certificate = FactorizationCertificate::new(FactorAlgebra::matrix(f.dim)?, elements)?;
            Ok(Component {
                weight: f.weight,
                channel,
                certificate,
                gram,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    pub in_dk: bool,
    pub rank: usize,
    pub trace_norm: f64,
    pub consistent_with_extremality: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalityReport {
    pub candidates: Vec<CandidateReport>,
    pub all_consistent: bool,
}

/// Checks supplied candidates against the extremality criterion: every point
/// of D_Z(k) with rank(L_Z(A)) ≤ k must have Tr(A) = 0.
///
/// A candidate outside D_Z(k) is vacuously consistent. This inspects only the
/// given points and does not decide extremality.
pub fn extremality_check(s: &LmiSystem, candidates: &[LmiPoint], tol: &ToleranceConfig) -> Result<ExtremalityReport> {
    let candidates = candidates
        .iter()
        .map(|pt| {
            let m = lmi_membership(s, pt, tol)?;
            let in_dk = m.psd;
            let trace_norm = m.max_abs_trace();
            Ok(CandidateReport {
                in_dk,
                rank: m.rank,
                trace_norm,
                consistent_with_extremality: !in_dk || m.rank > pt.k() || trace_norm <= tol.abs_tol,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_consistent = candidates.iter().all(|c| c.consistent_with_extremality);
    Ok(ExtremalityReport {
        candidates,
        all_consistent,
    })
}

/// With A = A_2 + i A_3: (‖A*A − I − √2 A_1‖_F, ‖AA* − I + √2 A_1‖_F, ‖A²‖_F).
pub fn hm_equation_residuals(a1: &ComplexMatrix, a2: &ComplexMatrix, a3: &ComplexMatrix) -> Result<[f64; 3]> {
    let k = a1.rows();
    if [a1, a2, a3].iter().any(|m| m.shape() != (k, k)) {
        return Err(mismatch("the three coefficients must be square of one size"));
    }
    let a = a2 + &a3.scale(crate::numerics::I);
    let a_adj = a.adjoint();
    let id = ComplexMatrix::identity(k);
    let s = a1.scale_real(std::f64::consts::SQRT_2);
    let r1 = &(&(&a_adj * &a) - &id) - &s;
    let r2 = &(&(&a * &a_adj) - &id) + &s;
    let r3 = &a * &a;
    Ok([r1.frobenius_norm(), r2.frobenius_norm(), r3.frobenius_norm()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{choi_from_kraus, stinespring_dilation};
    use crate::lmi::hm_system;
    use crate::numerics::I;
    use crate::schur::hm_example;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn hm_point() -> LmiPoint {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        LmiPoint::new(
            2,
            vec![
                ComplexMatrix::diag_real(&[-h, h]),
                ComplexMatrix::from_real_rows(&[&[0.0, h], &[h, 0.0]]),
                ComplexMatrix::from_rows(&[vec![ZERO, -I * h], vec![I * h, ZERO]]),
            ],
            &tol(),
        )
        .unwrap()
    }

    fn hm_certificate() -> FactorizationCertificate {
        let s = hm_system();
        certificate_from_point(s.source().unwrap(), &s, &hm_point(), &tol()).unwrap()
    }

    fn scalar_cert(p: usize) -> FactorizationCertificate {
        let elements = (0..p).map(|_| vec![ComplexMatrix::identity(1)]).collect();
        FactorizationCertificate::new(FactorAlgebra::matrix(1).unwrap(), elements).unwrap()
    }

    fn swap() -> KrausSet {
        KrausSet::unitary(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap()
    }

    #[test]
    fn algebra_validation() {
        assert!(FactorAlgebra::new(vec![]).is_err());
        assert!(FactorAlgebra::new(vec![Factor { dim: 2, weight: 0.5 }]).is_err());
        assert!(FactorAlgebra::new(vec![Factor { dim: 0, weight: 1.0 }]).is_err());
        assert!(FactorAlgebra::new(vec![Factor { dim: 1, weight: 1.5 }, Factor { dim: 1, weight: -0.5 }]).is_err());
        assert!(FactorAlgebra::new(vec![Factor { dim: 1, weight: 0.3 }, Factor { dim: 2, weight: 0.7 }]).is_ok());
    }

    #[test]
    fn unitary_over_scalars() {
        let r = verify_certificate(&swap(), &scalar_cert(1), &tol()).unwrap();
        assert!(r.pass);
        assert_eq!(r.unitarity_residual, 0.0);
    }

    #[test]
    fn hm_certificate_passes() {
        let cert = hm_certificate();
        let r = verify_certificate(&hm_example().channel(), &cert, &tol()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.unitarity_residual < 1e-12);
        assert!(r.complement_residual < 1e-12);
    }

    #[test]
    fn hm_identity_elements_fail() {
        let elements = (0..3).map(|_| vec![ComplexMatrix::identity(2)]).collect();
        let cert = FactorizationCertificate::new(FactorAlgebra::matrix(2).unwrap(), elements).unwrap();
        let r = verify_certificate(&hm_example().channel(), &cert, &tol()).unwrap();
        assert!(!r.pass);
        assert!((r.orthonormality_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn traced_point_rejected() {
        let s = hm_system();
        let mut a = hm_point().a().to_vec();
        a[0] = &a[0] + &ComplexMatrix::diag_real(&[0.5, 0.0]);
        let pt = LmiPoint::new(2, a, &tol()).unwrap();
        let e = certificate_from_point(s.source().unwrap(), &s, &pt, &tol());
        assert!(matches!(e, Err(Error::TraceNotZero { .. }) | Err(Error::RankTooHigh { .. })));
    }

    #[test]
    fn trivial_point_over_scalars() {
        let k = swap();
        let s = crate::lmi::build_lmi(&k, &tol()).unwrap();
        let cert = certificate_from_point(&k, &s, &LmiPoint::zero(1, 0), &tol()).unwrap();
        assert_eq!(cert.elements()[0][0], ComplexMatrix::identity(1));
    }

    #[test]
    fn dilation_certificate_passes() {
        let k = hm_example().channel();
        let w = stinespring_dilation(&k, &tol()).unwrap().unitary;
        let (ch, cert) = certificate_from_dilation(&w, 6, 3, &tol()).unwrap();
        assert!(verify_certificate(&ch, &cert, &tol()).unwrap().pass);
    }

    #[test]
    fn combine_then_decompose() {
        let hm = hm_example().channel();
        let id = KrausSet::identity(6);
        let (k, cert) = combine_certificates(&hm, &hm_certificate(), &id, &scalar_cert(1), 0.3, &tol()).unwrap();
        let weights: Vec<f64> = cert.algebra().factors().iter().map(|f| f.weight).collect();
        assert_eq!(weights, vec![0.3, 0.7]);
        assert!(verify_certificate(&k, &cert, &tol()).unwrap().pass);

        let parts = decompose_by_factors(&k, &cert, &tol()).unwrap();
        assert_eq!(parts.len(), 2);
        for (part, orig) in parts.iter().zip([&hm, &id]) {
            let diff = choi_from_kraus(&part.channel).matrix() - choi_from_kraus(orig).matrix();
            assert!(diff.frobenius_norm() < 1e-10);
            assert!(verify_certificate(&part.channel, &part.certificate, &tol()).unwrap().pass);
        }
        let mut total = ComplexMatrix::zeros(4, 4);
        for part in &parts {
            total += &part.gram.scale_real(part.weight);
        }
        assert!((&total - &ComplexMatrix::identity(4)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn combine_rejects_endpoints() {
        let c = scalar_cert(1);
        for t in [0.0, 1.0] {
            assert!(combine_certificates(&swap(), &c, &swap(), &c, t, &tol()).is_err());
        }
        let (_, cert) = combine_certificates(&swap(), &c, &swap(), &c, 0.5, &tol()).unwrap();
        assert_eq!(cert.algebra().len(), 2);
    }

    #[test]
    fn single_factor_decomposes_to_itself() {
        let cert = hm_certificate();
        let k = hm_example().channel();
        let parts = decompose_by_factors(&k, &cert, &tol()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].weight, 1.0);
        assert_eq!(parts[0].certificate, cert);
    }

    #[test]
    fn extremality_of_hm_point() {
        let s = hm_system();
        let mut shifted = hm_point().a().to_vec();
        shifted[0] = &shifted[0] + &ComplexMatrix::identity(2).scale_real(0.1);
        let shifted = LmiPoint::new(2, shifted, &tol()).unwrap();
        let r = extremality_check(&s, &[hm_point(), shifted], &tol()).unwrap();
        assert!(r.all_consistent);
        assert_eq!(r.candidates[0].rank, 2);
        assert!(r.candidates[0].trace_norm < 1e-15);
        assert!(r.candidates[1].rank > 2);
    }

    #[test]
    fn hm_equations() {
        let pt = hm_point();
        let [a1, a2, a3] = [&pt.a()[0], &pt.a()[1], &pt.a()[2]];
        for r in hm_equation_residuals(a1, a2, a3).unwrap() {
            assert!(r < 1e-12);
        }
        let z = ComplexMatrix::zeros(2, 2);
        let r = hm_equation_residuals(&z, &z, &z).unwrap();
        assert!((r[0] - 2f64.sqrt()).abs() < 1e-15 && (r[1] - 2f64.sqrt()).abs() < 1e-15 && r[2] == 0.0);
        let neg = a1.scale_real(-1.0);
        let r = hm_equation_residuals(&neg, a2, a3).unwrap();
        let expect = a1.scale_real(2.0 * 2f64.sqrt()).frobenius_norm();
        assert!((r[0] - expect).abs() < 1e-12 && (r[1] - expect).abs() < 1e-12);
    }
}
