//! JSON documents for every data type the command line reads or writes.
//!
//! Complex scalars are `[re, im]` pairs; matrices are
//! `{"rows", "cols", "data"}` with row-major nested arrays. Floats are written
//! with 17 significant digits so that parsing the output reproduces every bit.

use std::io;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::channel::{ChoiMatrix, KrausSet};
use crate::error::{mismatch, Error, Result};
use crate::factorization::{Factor, FactorAlgebra, FactorizationCertificate};
use crate::lmi::{LmiPoint, LmiSystem};
use crate::numerics::{ComplexMatrix, ToleranceConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiDoc {
    pub dim_in: usize,
    pub dim_out: usize,
    pub matrix: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationDoc {
    pub matrix: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LmiDoc {
    pub p: usize,
    pub z: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub k: usize,
    pub a: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub factors: Vec<FactorDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub algebra: AlgebraDoc,
    pub v: Vec<Vec<MatrixDoc>>,
}

impl From<&ComplexMatrix> for MatrixDoc {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: (0..m.rows())
                .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<&MatrixDoc> for ComplexMatrix {
    type Error = Error;

    fn try_from(doc: &MatrixDoc) -> Result<Self> {
        if doc.data.len() != doc.rows || doc.data.iter().any(|r| r.len() != doc.cols) {
            return Err(mismatch(format!("matrix data does not have shape {}x{}", doc.rows, doc.cols)));
        }
        let data = doc
            .data
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_vec(doc.rows, doc.cols, data)
    }
}

fn matrices(docs: &[MatrixDoc]) -> Result<Vec<ComplexMatrix>> {
    docs.iter().map(ComplexMatrix::try_from).collect()
}

fn docs(ms: &[ComplexMatrix]) -> Vec<MatrixDoc> {
    ms.iter().map(MatrixDoc::from).collect()
}

impl From<&KrausSet> for ChannelDoc {
    fn from(k: &KrausSet) -> Self {
        Self {
            dim_in: k.dim_in(),
            dim_out: k.dim_out(),
            kraus: docs(k.operators()),
        }
    }
}

impl TryFrom<&ChannelDoc> for KrausSet {
    type Error = Error;

    fn try_from(doc: &ChannelDoc) -> Result<Self> {
        KrausSet::new(doc.dim_in, doc.dim_out, matrices(&doc.kraus)?)
    }
}

impl From<&ChoiMatrix> for ChoiDoc {
    fn from(c: &ChoiMatrix) -> Self {
        Self {
            dim_in: c.dim_in(),
            dim_out: c.dim_out(),
            matrix: c.matrix().into(),
        }
    }
}

impl TryFrom<&ChoiDoc> for ChoiMatrix {
    type Error = Error;

    fn try_from(doc: &ChoiDoc) -> Result<Self> {
        ChoiMatrix::new(doc.dim_in, doc.dim_out, (&doc.matrix).try_into()?)
    }
}

impl From<&LmiSystem> for LmiDoc {
    fn from(s: &LmiSystem) -> Self {
        Self { p: s.p(), z: docs(s.z()) }
    }
}

impl LmiDoc {
    pub fn decode(&self, tol: &ToleranceConfig) -> Result<LmiSystem> {
        LmiSystem::new(self.p, matrices(&self.z)?, tol)
    }
}

impl From<&LmiPoint> for PointDoc {
    fn from(pt: &LmiPoint) -> Self {
        Self { k: pt.k(), a: docs(pt.a()) }
    }
}

impl PointDoc {
    pub fn decode(&self, tol: &ToleranceConfig) -> Result<LmiPoint> {
        LmiPoint::new(self.k, matrices(&self.a)?, tol)
    }
}

impl From<&FactorAlgebra> for AlgebraDoc {
    fn from(a: &FactorAlgebra) -> Self {
        Self {
            factors: a
                .factors()
                .iter()
                .map(|f| FactorDoc {
                    dim: f.dim,
                    weight: f.weight,
                })
                .collect(),
        }
    }
}

impl TryFrom<&AlgebraDoc> for FactorAlgebra {
    type Error = Error;

    fn try_from(doc: &AlgebraDoc) -> Result<Self> {
        FactorAlgebra::new(
            doc.factors
                .iter()
                .map(|f| Factor {
                    dim: f.dim,
                    weight: f.weight,
                })
                .collect(),
        )
    }
}

impl From<&FactorizationCertificate> for CertificateDoc {
    fn from(c: &FactorizationCertificate) -> Self {
        Self {
            algebra: c.algebra().into(),
            v: c.elements().iter().map(|e| docs(e)).collect(),
        }
    }
}

impl TryFrom<&CertificateDoc> for FactorizationCertificate {
    type Error = Error;

    fn try_from(doc: &CertificateDoc) -> Result<Self> {
        let elements = doc.v.iter().map(|e| matrices(e)).collect::<Result<_>>()?;
        FactorizationCertificate::new((&doc.algebra).try_into()?, elements)
    }
}

/// Compact JSON whose floats carry 17 significant digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactFloats;

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("malformed JSON document: {e}")))
}
