//! The `qfact` command line: one subcommand per library operation, JSON
//! documents in and out.
//!
//! Exit status is 0 on success, 1 when the input is well formed but a check
//! fails, and 2 when the input itself is malformed. Errors are reported on
//! stderr as `{"error": code, "detail": text}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::{apply, apply_adjoint, channel_checks, choi_from_kraus, kraus_from_choi, stinespring_dilation};
use crate::channel::{ChoiMatrix, KrausSet};
use crate::complement::{
    apply_complement, apply_complement_adjoint, complement_range_basis, is_extreme_channel, selfadjoint_kernel_basis,
};
use crate::error::{Error, Result};
use crate::factorization::{
    certificate_from_point, combine_certificates, decompose_by_factors, extremality_check, hm_equation_residuals,
    verify_certificate, FactorizationCertificate,
};
use crate::io::{
    from_json, to_json, CertificateDoc, ChannelDoc, ChoiDoc, CorrelationDoc, LmiDoc, MatrixDoc, PointDoc,
};
use crate::lmi::{build_lmi, extract_blocks, hm_system, lmi_membership, LmiPoint};
use crate::numerics::{span_residual, ComplexMatrix, ToleranceConfig, I, ZERO};
use crate::schur::{gram_from_correlation, hm_example, schur_channel, validate_correlation};

#[derive(Debug, Parser)]
#[command(name = "qfact", version, about = "Quantum channel factorization toolkit")]
pub struct JobRequest {
    /// Absolute tolerance for approximate equalities
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Relative tolerance for rank decisions
    #[arg(long = "rank-tol", global = true)]
    pub rank_tol: Option<f64>,

    /// Input document; repeat for subcommands taking several
    #[arg(short = 'i', long = "input", global = true)]
    pub inputs: Vec<PathBuf>,

    /// Write the result here instead of stdout
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,

    /// Suppress the human-readable summary on stderr
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Choi matrix of a channel
    Choi,
    /// Kraus operators of a Choi matrix
    Kraus,
    /// Trace preservation, unitality and complete positivity (channel or Choi input)
    Check,
    /// Apply a channel (or its adjoint) to a matrix: -i channel -i matrix
    Apply {
        #[arg(long)]
        adjoint: bool,
    },
    /// Stinespring unitary of a trace-preserving channel
    Dilate,
    /// Complementary channel: with a matrix input apply it, otherwise print a basis of its range
    Complement {
        #[arg(long)]
        adjoint: bool,
    },
    /// Hermitian basis of the kernel of the adjoint complement
    KernelBasis,
    /// Schur product channel of a correlation matrix
    Schur,
    /// Gram vectors of a correlation matrix
    Gram,
    /// Linear matrix inequality of a trace-preserving channel
    LmiBuild,
    /// Membership of a point: -i lmi -i point
    LmiCheck,
    /// Factor elements of a point: -i lmi -i point [-i channel with --certificate]
    Extract {
        #[arg(long)]
        certificate: bool,
    },
    /// Check a certificate: -i channel -i certificate
    Verify,
    /// Mix two certified channels: -i ch1 -i cert1 -i ch2 -i cert2
    Combine {
        #[arg(long)]
        weight: f64,
    },
    /// Split a certified channel by factor: -i channel -i certificate
    Decompose,
    /// Extremality consistency of candidate points: -i lmi -i point...
    Extremality,
    /// Built-in examples
    Example {
        #[command(subcommand)]
        which: Example,
    },
}

#[derive(Debug, Subcommand)]
pub enum Example {
    /// The six-point Schur channel with its M_2 factorization
    Hm {
        /// Run every check of the pipeline and fail if any does not hold
        #[arg(long)]
        verify: bool,
        /// Also write each document of the example into this directory
        #[arg(long)]
        write_dir: Option<PathBuf>,
    },
}

struct Outcome {
    doc: Value,
    ok: bool,
    summary: String,
}

impl Outcome {
    fn ok(doc: Value, summary: impl Into<String>) -> Self {
        Self {
            doc,
            ok: true,
            summary: summary.into(),
        }
    }
}

/// Executes a request, writing the result document to `out` (or the output
/// file) and diagnostics to `err`. Returns the process exit code.
pub fn run(req: &JobRequest, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = tolerance(req).and_then(|tol| dispatch(req, &tol)).and_then(|o| {
        let mut text = to_json(&o.doc);
        text.push('\n');
        match &req.output {
            Some(path) => fs::write(path, &text)
                .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?,
            None => out
                .write_all(text.as_bytes())
                .map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}")))?,
        }
        Ok(o)
    });
    match result {
        Ok(o) => {
            if !req.json && !o.summary.is_empty() {
                let _ = writeln!(err, "{}", o.summary);
            }
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let report = json!({ "error": e.code(), "detail": e.to_string() });
            let _ = writeln!(err, "{}", to_json(&report));
            if e.is_malformed_input() {
                2
            } else {
                1
            }
        }
    }
}

fn tolerance(req: &JobRequest) -> Result<ToleranceConfig> {
    let d = ToleranceConfig::default();
    ToleranceConfig::new(req.tol.unwrap_or(d.abs_tol), req.rank_tol.unwrap_or(d.rel_rank_tol))
}

struct Inputs<'a> {
    paths: &'a [PathBuf],
    command: &'static str,
}

impl Inputs<'_> {
    fn path(&self, i: usize, what: &str) -> Result<&Path> {
        self.paths.get(i).map(PathBuf::as_path).ok_or_else(|| {
            Error::InvalidArgument(format!("{} expects input #{} ({what})", self.command, i + 1))
        })
    }

    fn text(&self, i: usize, what: &str) -> Result<String> {
        let path = self.path(i, what)?;
        fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
    }

    fn doc<T: DeserializeOwned>(&self, i: usize, what: &str) -> Result<T> {
        from_json(&self.text(i, what)?)
    }

    fn channel(&self, i: usize) -> Result<KrausSet> {
        KrausSet::try_from(&self.doc::<ChannelDoc>(i, "channel")?)
    }

    fn matrix(&self, i: usize) -> Result<ComplexMatrix> {
        ComplexMatrix::try_from(&self.doc::<MatrixDoc>(i, "matrix")?)
    }

    fn certificate(&self, i: usize) -> Result<FactorizationCertificate> {
        FactorizationCertificate::try_from(&self.doc::<CertificateDoc>(i, "certificate")?)
    }

    fn point(&self, i: usize, tol: &ToleranceConfig) -> Result<LmiPoint> {
        self.doc::<PointDoc>(i, "point")?.decode(tol)
    }

    fn require_at_most(&self, n: usize) -> Result<()> {
        if self.paths.len() > n {
            return Err(Error::InvalidArgument(format!(
                "{} takes {n} input(s), got {}",
                self.command,
                self.paths.len()
            )));
        }
        Ok(())
    }
}

fn value<T: Serialize>(x: T) -> Value {
    serde_json::to_value(x).expect("documents serialize to JSON values")
}

fn matrices(ms: &[ComplexMatrix]) -> Value {
    value(ms.iter().map(MatrixDoc::from).collect::<Vec<_>>())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Choi => "choi",
        Command::Kraus => "kraus",
        Command::Check => "check",
        Command::Apply { .. } => "apply",
        Command::Dilate => "dilate",
        Command::Complement { .. } => "complement",
        Command::KernelBasis => "kernel-basis",
        Command::Schur => "schur",
        Command::Gram => "gram",
        Command::LmiBuild => "lmi-build",
        Command::LmiCheck => "lmi-check",
        Command::Extract { .. } => "extract",
        Command::Verify => "verify",
        Command::Combine { .. } => "combine",
        Command::Decompose => "decompose",
        Command::Extremality => "extremality",
        Command::Example { .. } => "example",
    }
}

fn dispatch(req: &JobRequest, tol: &ToleranceConfig) -> Result<Outcome> {
    let inp = Inputs {
        paths: &req.inputs,
        command: command_name(&req.command),
    };
    match &req.command {
        Command::Choi => {
            inp.require_at_most(1)?;
            let k = inp.channel(0)?;
            let c = choi_from_kraus(&k);
            let summary = format!("Choi matrix of size {0}x{0}", c.matrix().rows());
            Ok(Outcome::ok(value(ChoiDoc::from(&c)), summary))
        }
        Command::Kraus => {
            inp.require_at_most(1)?;
            let c = ChoiMatrix::try_from(&inp.doc::<ChoiDoc>(0, "choi")?)?;
            let k = kraus_from_choi(&c, tol)?;
            let summary = format!("{} Kraus operators", k.len());
            Ok(Outcome::ok(value(ChannelDoc::from(&k)), summary))
        }
        Command::Check => {
            inp.require_at_most(1)?;
            let raw: Value = from_json(&inp.text(0, "channel or choi")?)?;
            let checks = if raw.get("kraus").is_some() {
                channel_checks(&KrausSet::try_from(&value_doc::<ChannelDoc>(raw)?)?, tol)
            } else {
                ChoiMatrix::try_from(&value_doc::<ChoiDoc>(raw)?)?.checks(tol)
            };
            let doc = json!({
                "trace_preserving": checks.trace_preserving,
                "unital": checks.unital,
                "completely_positive": checks.completely_positive,
            });
            Ok(Outcome {
                doc,
                ok: checks.trace_preserving && checks.completely_positive,
                summary: format!(
                    "trace preserving: {}, unital: {}, completely positive: {}",
                    checks.trace_preserving, checks.unital, checks.completely_positive
                ),
            })
        }
        Command::Apply { adjoint } => {
            inp.require_at_most(2)?;
            let k = inp.channel(0)?;
            let x = inp.matrix(1)?;
            let y = if *adjoint { apply_adjoint(&k, &x)? } else { apply(&k, &x)? };
            Ok(Outcome::ok(value(MatrixDoc::from(&y)), ""))
        }
        Command::Dilate => {
            inp.require_at_most(1)?;
            let d = stinespring_dilation(&inp.channel(0)?, tol)?;
            let summary = format!("unitary on C^{} ⊗ C^{}", d.dim_out, d.env_dim);
            let doc = json!({
                "dim_out": d.dim_out,
                "env_dim": d.env_dim,
                "unitary": value(MatrixDoc::from(&d.unitary)),
            });
            Ok(Outcome::ok(doc, summary))
        }
        Command::Complement { adjoint } => {
            inp.require_at_most(2)?;
            let k = inp.channel(0)?;
            if req.inputs.len() == 1 {
                if *adjoint {
                    return Err(Error::InvalidArgument("--adjoint needs a matrix input".into()));
                }
                let basis = complement_range_basis(&k, tol)?;
                let summary = format!("complement range has dimension {}", basis.len());
                return Ok(Outcome::ok(json!({ "range_basis": matrices(&basis) }), summary));
            }
            let x = inp.matrix(1)?;
            let y = if *adjoint {
                apply_complement_adjoint(&k, &x)?
            } else {
                apply_complement(&k, &x)?
            };
            Ok(Outcome::ok(value(MatrixDoc::from(&y)), ""))
        }
        Command::KernelBasis => {
            inp.require_at_most(1)?;
            let k = inp.channel(0)?;
            let basis = selfadjoint_kernel_basis(&k, tol)?;
            let extreme = is_extreme_channel(&k, tol)?;
            let summary = format!("kernel dimension {}, extreme channel: {extreme}", basis.len());
            let doc = json!({ "dimension": basis.len(), "basis": matrices(&basis), "extreme": extreme });
            Ok(Outcome::ok(doc, summary))
        }
        Command::Schur => {
            inp.require_at_most(1)?;
            let c = correlation(&inp, tol)?;
            let k = schur_channel(&c, tol)?;
            let summary = format!("Schur channel on M_{} with {} Kraus operators", c.n(), k.len());
            Ok(Outcome::ok(value(ChannelDoc::from(&k)), summary))
        }
        Command::Gram => {
            inp.require_at_most(1)?;
            let c = correlation(&inp, tol)?;
            let w = gram_from_correlation(&c, tol)?;
            // column j holds w_j
            let m = ComplexMatrix::from_fn(w.dim(), w.len(), |a, j| w.vectors()[j][a]);
            let summary = format!("{} Gram vectors in C^{}", w.len(), w.dim());
            Ok(Outcome::ok(json!({ "rank": c.rank(), "vectors": value(MatrixDoc::from(&m)) }), summary))
        }
        Command::LmiBuild => {
            inp.require_at_most(1)?;
            let s = build_lmi(&inp.channel(0)?, tol)?;
            let summary = format!("p = {}, d = {}", s.p(), s.d());
            Ok(Outcome::ok(value(LmiDoc::from(&s)), summary))
        }
        Command::LmiCheck => {
            inp.require_at_most(2)?;
            let s = inp.doc::<LmiDoc>(0, "lmi")?.decode(tol)?;
            let pt = inp.point(1, tol)?;
            let m = lmi_membership(&s, &pt, tol)?;
            let in_dk = m.psd && m.rank <= pt.k();
            let summary = format!("psd: {}, rank {} (k = {}), max |Tr A_i| = {:.3e}", m.psd, m.rank, pt.k(), m.max_abs_trace());
            let doc = json!({
                "psd": m.psd,
                "rank": m.rank,
                "min_eigenvalue": m.min_eigenvalue,
                "traces": m.traces,
                "in_dk": in_dk,
            });
            Ok(Outcome {
                doc,
                ok: m.psd,
                summary,
            })
        }
        Command::Extract { certificate } => {
            inp.require_at_most(if *certificate { 3 } else { 2 })?;
            let s = inp.doc::<LmiDoc>(0, "lmi")?.decode(tol)?;
            let pt = inp.point(1, tol)?;
            if *certificate {
                let k = inp.channel(2)?;
                let cert = certificate_from_point(&k, &s, &pt, tol)?;
                return Ok(Outcome::ok(value(CertificateDoc::from(&cert)), format!("certificate over M_{}", pt.k())));
            }
            let blocks = extract_blocks(&s, &pt, tol)?;
            Ok(Outcome::ok(json!({ "blocks": matrices(&blocks) }), format!("{} blocks of size {}", blocks.len(), pt.k())))
        }
        Command::Verify => {
            inp.require_at_most(2)?;
            let k = inp.channel(0)?;
            let cert = inp.certificate(1)?;
            let r = verify_certificate(&k, &cert, tol)?;
            let doc = json!({
                "orthonormality_residual": r.orthonormality_residual,
                "complement_residual": r.complement_residual,
                "unitarity_residual": r.unitarity_residual,
                "bound": r.bound,
                "pass": r.pass,
            });
            let summary = format!(
                "certificate {}: orthonormality {:.3e}, complement {:.3e}, unitarity {:.3e}",
                if r.pass { "accepted" } else { "rejected" },
                r.orthonormality_residual,
                r.complement_residual,
                r.unitarity_residual
            );
            Ok(Outcome { doc, ok: r.pass, summary })
        }
        Command::Combine { weight } => {
            inp.require_at_most(4)?;
            let (k1, c1) = (inp.channel(0)?, inp.certificate(1)?);
            let (k2, c2) = (inp.channel(2)?, inp.certificate(3)?);
            let (k, cert) = combine_certificates(&k1, &c1, &k2, &c2, *weight, tol)?;
            let doc = json!({
                "channel": value(ChannelDoc::from(&k)),
                "certificate": value(CertificateDoc::from(&cert)),
            });
            Ok(Outcome::ok(doc, format!("certificate over {} factors", cert.algebra().len())))
        }
        Command::Decompose => {
            inp.require_at_most(2)?;
            let k = inp.channel(0)?;
            let cert = inp.certificate(1)?;
            let parts = decompose_by_factors(&k, &cert, tol)?;
            let components: Vec<Value> = parts
                .iter()
                .map(|c| {
                    json!({
                        "weight": c.weight,
                        "channel": value(ChannelDoc::from(&c.channel)),
                        "certificate": value(CertificateDoc::from(&c.certificate)),
                        "gram": value(MatrixDoc::from(&c.gram)),
                    })
                })
                .collect();
            let weights: Vec<String> = parts.iter().map(|c| format!("{:.6}", c.weight)).collect();
            Ok(Outcome::ok(
                json!({ "components": components }),
                format!("{} components with weights {}", parts.len(), weights.join(", ")),
            ))
        }
        Command::Extremality => {
            if req.inputs.len() < 2 {
                return Err(Error::InvalidArgument("extremality expects an lmi and at least one point".into()));
            }
            let s = inp.doc::<LmiDoc>(0, "lmi")?.decode(tol)?;
            let points = (1..req.inputs.len()).map(|i| inp.point(i, tol)).collect::<Result<Vec<_>>>()?;
            let r = extremality_check(&s, &points, tol)?;
            let candidates: Vec<Value> = r
                .candidates
                .iter()
                .map(|c| {
                    json!({
                        "in_dk": c.in_dk,
                        "rank": c.rank,
                        "trace_norm": c.trace_norm,
                        "consistent_with_extremality": c.consistent_with_extremality,
                    })
                })
                .collect();
            let summary = format!(
                "{} candidate(s), all consistent with extremality: {}",
                points.len(),
                r.all_consistent
            );
            Ok(Outcome {
                doc: json!({ "all_consistent": r.all_consistent, "candidates": candidates }),
                ok: r.all_consistent,
                summary,
            })
        }
        Command::Example { which } => match which {
            Example::Hm { verify, write_dir } => {
                inp.require_at_most(0)?;
                example_hm(*verify, write_dir.as_deref(), tol)
            }
        },
    }
}

fn value_doc<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::InvalidArgument(format!("malformed JSON document: {e}")))
}

fn correlation(inp: &Inputs<'_>, tol: &ToleranceConfig) -> Result<crate::schur::CorrelationMatrix> {
    let doc = inp.doc::<CorrelationDoc>(0, "correlation")?;
    validate_correlation(&ComplexMatrix::try_from(&doc.matrix)?, tol)
}

/// One named assertion of the built-in example.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineCheck {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

fn within(name: &'static str, value: f64, bound: f64) -> PipelineCheck {
    PipelineCheck {
        name,
        value,
        bound,
        pass: value <= bound,
    }
}

fn equals(name: &'static str, value: usize, expected: usize) -> PipelineCheck {
    PipelineCheck {
        name,
        value: value as f64,
        bound: expected as f64,
        pass: value == expected,
    }
}

/// The derived M_2 point of the six-point example: A_1 = diag(−1/√2, 1/√2)
/// and A_2 + i A_3 = √2 E_12.
pub fn hm_point() -> LmiPoint {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = vec![
        ComplexMatrix::diag_real(&[-h, h]),
        ComplexMatrix::from_real_rows(&[&[0.0, h], &[h, 0.0]]),
        ComplexMatrix::from_rows(&[vec![ZERO, -I * h], vec![I * h, ZERO]]),
    ];
    LmiPoint::new(2, a, &ToleranceConfig::default()).expect("fixed point is Hermitian")
}

/// Runs every check of the six-point example and returns them in order.
pub fn hm_pipeline(tol: &ToleranceConfig) -> Result<Vec<PipelineCheck>> {
    let ex = hm_example();
    let k = ex.channel();
    let mut checks = vec![equals("correlation rank", ex.correlation.rank(), 3)];

    let ch = channel_checks(&k, tol);
    checks.push(equals("trace preserving", ch.trace_preserving as usize, 1));
    checks.push(equals("unital", ch.unital as usize, 1));

    let basis = selfadjoint_kernel_basis(&k, tol)?;
    checks.push(equals("kernel dimension", basis.len(), 3));
    let span = ex
        .z
        .iter()
        .map(|z| span_residual(&basis, z, tol))
        .collect::<Result<Vec<_>>>()?;
    checks.push(within("fixed basis in kernel span", span.into_iter().fold(0.0, f64::max), 1e-9));
    let annihilation = ex
        .z
        .iter()
        .map(|z| apply_complement_adjoint(&k, z).map(|m| m.frobenius_norm()))
        .collect::<Result<Vec<_>>>()?;
    checks.push(within("adjoint complement annihilates basis", annihilation.into_iter().fold(0.0, f64::max), 1e-12));

    let pt = hm_point();
    let eq = hm_equation_residuals(&pt.a()[0], &pt.a()[1], &pt.a()[2])?;
    checks.push(within("point equations", eq.into_iter().fold(0.0, f64::max), 1e-12));

    let s = hm_system();
    let m = lmi_membership(&s, &pt, tol)?;
    checks.push(equals("point psd", m.psd as usize, 1));
    checks.push(equals("point rank", m.rank, 2));
    checks.push(within("point traces", m.max_abs_trace(), 1e-12));

    let cert = certificate_from_point(&k, &s, &pt, tol)?;
    let r = verify_certificate(&k, &cert, tol)?;
    checks.push(within("certificate unitarity", r.unitarity_residual, 1e-8));
    checks.push(equals("certificate accepted", r.pass as usize, 1));
    Ok(checks)
}

fn example_hm(verify: bool, write_dir: Option<&Path>, tol: &ToleranceConfig) -> Result<Outcome> {
    let ex = hm_example();
    let k = ex.channel();
    let s = hm_system();
    let pt = hm_point();
    let cert = certificate_from_point(&k, &s, &pt, tol)?;
    let files = [
        ("correlation.json", value(CorrelationDoc { matrix: ex.correlation.matrix().into() })),
        ("channel.json", value(ChannelDoc::from(&k))),
        ("lmi.json", value(LmiDoc::from(&s))),
        ("point.json", value(PointDoc::from(&pt))),
        ("certificate.json", value(CertificateDoc::from(&cert))),
    ];
    if let Some(dir) = write_dir {
        fs::create_dir_all(dir).map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", dir.display())))?;
        for (name, doc) in &files {
            let path = dir.join(name);
            fs::write(&path, to_json(doc) + "\n")
                .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    let mut doc = serde_json::Map::new();
    for (name, d) in files {
        doc.insert(name.trim_end_matches(".json").to_string(), d);
    }
    if !verify {
        return Ok(Outcome::ok(Value::Object(doc), "six-point example written"));
    }
    let checks = hm_pipeline(tol)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    doc.insert("checks".into(), value(&checks));
    let summary = if failed.is_empty() {
        format!("all {} checks passed", checks.len())
    } else {
        format!("failed checks: {}", failed.join(", "))
    };
    Ok(Outcome {
        doc: Value::Object(doc),
        ok: failed.is_empty(),
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(args: &[&str]) -> JobRequest {
        JobRequest::try_parse_from(std::iter::once("qfact").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn parses_global_flags_after_subcommand() {
        let r = request(&["verify", "-i", "a.json", "-i", "b.json", "--tol", "1e-8", "--json"]);
        assert_eq!(r.inputs.len(), 2);
        assert_eq!(r.tol, Some(1e-8));
        assert!(r.json);
        assert!(matches!(r.command, Command::Verify));
    }

    #[test]
    fn example_pipeline_passes() {
        let checks = hm_pipeline(&ToleranceConfig::default()).unwrap();
        for c in &checks {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn missing_input_is_malformed() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&request(&["choi"]), &mut out, &mut err);
        assert_eq!(code, 2);
        let report: Value = serde_json::from_slice(&err).unwrap();
        assert_eq!(report["error"], "InvalidArgument");
    }

    #[test]
    fn negative_tolerance_is_malformed() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(&request(&["example", "hm", "--tol=-1"]), &mut out, &mut err), 2);
    }
}
