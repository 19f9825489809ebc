//! The on-disk document format.
//!
//! A document is a UTF-8 JSON object with the keys `kind`, `dim`, `data` and
//! `meta`, always written in that order. Keys inside `data` and `meta` are
//! sorted. Floats are written with 17 significant digits, complex numbers
//! as `[re, im]`, and matrices as arrays of rows.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use qplex::geometry::PointSet;
use qplex::linalg::{CMatrix, CVector, HermitianOperator, C64};
use qplex::rep::{GeneralParams, MeasurementMatrix, ProbVector};
use qplex::sic::{SicFiducial, SicSystem};
use qplex::symmetry::StretchedMatrix;
use qplex::tol::TAU_PROB;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: field `{field}`: {message}")]
    Field {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("{path}: expected a {expected} document, found {found}")]
    Kind {
        path: PathBuf,
        expected: String,
        found: String,
    },
}

/// Field-level problem, located by a dotted path such as `data.p[3]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        FieldError {
            field: field.into(),
            message: message.to_string(),
        }
    }

    fn at(self, path: &Path) -> DocumentError {
        DocumentError::Field {
            path: path.to_path_buf(),
            field: self.field,
            message: self.message,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Fiducial,
    SicSystem,
    ProbVector,
    Measurement,
    StretchedMatrix,
    PointSet,
    Report,
    Params,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Fiducial => "fiducial",
            Kind::SicSystem => "sic_system",
            Kind::ProbVector => "prob_vector",
            Kind::Measurement => "measurement",
            Kind::StretchedMatrix => "stretched_matrix",
            Kind::PointSet => "point_set",
            Kind::Report => "report",
            Kind::Params => "params",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl Meta {
    pub fn new(seed: Option<u64>) -> Self {
        Meta {
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances: BTreeMap::new(),
        }
    }

    pub fn with_tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }
}

pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiducialData {
    pub vector: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SicSystemData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiducial: Option<Vec<Complex>>,
    pub projectors: Vec<Vec<Vec<Complex>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbVectorData {
    pub p: Vec<f64>,
}

/// `r[j][i] = r(j|i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementData {
    pub r: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StretchedData {
    pub r: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetData {
    pub labels: Vec<String>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsData {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub lower: f64,
    pub upper: f64,
    pub m_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Fiducial(FiducialData),
    SicSystem(SicSystemData),
    ProbVector(ProbVectorData),
    Measurement(MeasurementData),
    StretchedMatrix(StretchedData),
    PointSet(PointSetData),
    Report(RunReport),
    Params(ParamsData),
}

impl Payload {
    pub fn kind(&self) -> Kind {
        match self {
            Payload::Fiducial(_) => Kind::Fiducial,
            Payload::SicSystem(_) => Kind::SicSystem,
            Payload::ProbVector(_) => Kind::ProbVector,
            Payload::Measurement(_) => Kind::Measurement,
            Payload::StretchedMatrix(_) => Kind::StretchedMatrix,
            Payload::PointSet(_) => Kind::PointSet,
            Payload::Report(_) => Kind::Report,
            Payload::Params(_) => Kind::Params,
        }
    }

    fn to_value(&self) -> serde_json::Result<Value> {
        match self {
            Payload::Fiducial(x) => serde_json::to_value(x),
            Payload::SicSystem(x) => serde_json::to_value(x),
            Payload::ProbVector(x) => serde_json::to_value(x),
            Payload::Measurement(x) => serde_json::to_value(x),
            Payload::StretchedMatrix(x) => serde_json::to_value(x),
            Payload::PointSet(x) => serde_json::to_value(x),
            Payload::Report(x) => serde_json::to_value(x),
            Payload::Params(x) => serde_json::to_value(x),
        }
    }

    fn from_value(kind: Kind, value: Value) -> std::result::Result<Self, FieldError> {
        fn decode<T: DeserializeOwned>(value: Value) -> std::result::Result<T, FieldError> {
            serde_path_to_error::deserialize(value).map_err(|e| {
                let path = e.path().to_string();
                let field = if path == "." {
                    "data".to_string()
                } else {
                    format!("data.{path}")
                };
                FieldError::new(field, e.into_inner())
            })
        }
        Ok(match kind {
            Kind::Fiducial => Payload::Fiducial(decode(value)?),
            Kind::SicSystem => Payload::SicSystem(decode(value)?),
            Kind::ProbVector => Payload::ProbVector(decode(value)?),
            Kind::Measurement => Payload::Measurement(decode(value)?),
            Kind::StretchedMatrix => Payload::StretchedMatrix(decode(value)?),
            Kind::PointSet => Payload::PointSet(decode(value)?),
            Kind::Report => Payload::Report(decode(value)?),
            Kind::Params => Payload::Params(decode(value)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub dim: usize,
    pub payload: Payload,
    pub meta: Meta,
}

#[derive(Serialize)]
struct RawOut<'a> {
    kind: Kind,
    dim: usize,
    data: Value,
    meta: &'a Meta,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIn {
    kind: Kind,
    dim: usize,
    data: Value,
    meta: Meta,
}

fn complex(z: C64) -> Complex {
    [z.re, z.im]
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<Complex>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| complex(m[(r, c)])).collect())
        .collect()
}

fn check_finite(field: &str, values: &[f64]) -> std::result::Result<(), FieldError> {
    match values.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(FieldError::new(
            format!("{field}[{i}]"),
            "non-finite number",
        )),
        None => Ok(()),
    }
}

fn check_probability(field: &str, p: &[f64], n: usize) -> std::result::Result<(), FieldError> {
    if p.len() != n {
        return Err(FieldError::new(
            field,
            format!("expected {n} entries, found {}", p.len()),
        ));
    }
    check_finite(field, p)?;
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| **v < -TAU_PROB) {
        return Err(FieldError::new(
            format!("{field}[{i}]"),
            format!("negative probability {v}"),
        ));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > TAU_PROB {
        return Err(FieldError::new(field, format!("entries sum to {s}")));
    }
    Ok(())
}

fn check_square(field: &str, rows: &[Vec<f64>], n: usize) -> std::result::Result<(), FieldError> {
    if rows.len() != n {
        return Err(FieldError::new(
            field,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(FieldError::new(
                format!("{field}[{i}]"),
                format!("expected {n} columns, found {}", row.len()),
            ));
        }
        check_finite(&format!("{field}[{i}]"), row)?;
    }
    Ok(())
}

fn complex_vector(
    field: &str,
    v: &[Complex],
    d: usize,
) -> std::result::Result<CVector, FieldError> {
    if v.len() != d {
        return Err(FieldError::new(
            field,
            format!("expected {d} entries, found {}", v.len()),
        ));
    }
    if let Some(i) = v
        .iter()
        .position(|z| !z[0].is_finite() || !z[1].is_finite())
    {
        return Err(FieldError::new(
            format!("{field}[{i}]"),
            "non-finite number",
        ));
    }
    Ok(CVector::from_iterator(
        d,
        v.iter().map(|z| C64::new(z[0], z[1])),
    ))
}

fn complex_matrix(
    field: &str,
    rows: &[Vec<Complex>],
    d: usize,
) -> std::result::Result<CMatrix, FieldError> {
    if rows.len() != d {
        return Err(FieldError::new(
            field,
            format!("expected {d} rows, found {}", rows.len()),
        ));
    }
    let mut m = CMatrix::zeros(d, d);
    for (r, row) in rows.iter().enumerate() {
        let v = complex_vector(&format!("{field}[{r}]"), row, d)?;
        for c in 0..d {
            m[(r, c)] = v[c];
        }
    }
    Ok(m)
}

impl Document {
    pub fn new(dim: usize, payload: Payload, meta: Meta) -> Self {
        Document { dim, payload, meta }
    }

    pub fn kind(&self) -> Kind {
        self.payload.kind()
    }

    pub fn from_fiducial(fid: &SicFiducial, meta: Meta) -> Self {
        Document::new(
            fid.dim(),
            Payload::Fiducial(FiducialData {
                vector: fid.vector().iter().map(|z| complex(*z)).collect(),
            }),
            meta,
        )
    }

    pub fn from_sic_system(sys: &SicSystem, meta: Meta) -> Self {
        use qplex::sic::{OperatorFrame, Provenance};
        let fiducial = match sys.provenance() {
            Provenance::Fiducial(f) => Some(f.vector().iter().map(|z| complex(*z)).collect()),
            Provenance::Explicit => None,
        };
        Document::new(
            sys.dim(),
            Payload::SicSystem(SicSystemData {
                fiducial,
                projectors: sys
                    .projectors()
                    .iter()
                    .map(|p| matrix_rows(p.matrix()))
                    .collect(),
            }),
            meta,
        )
    }

    pub fn from_prob(d: usize, p: &[f64], meta: Meta) -> Self {
        Document::new(
            d,
            Payload::ProbVector(ProbVectorData { p: p.to_vec() }),
            meta,
        )
    }

    pub fn from_measurement(d: usize, m: &MeasurementMatrix, meta: Meta) -> Self {
        let r = (0..m.outcomes()).map(|j| m.row(j).to_vec()).collect();
        Document::new(d, Payload::Measurement(MeasurementData { r }), meta)
    }

    pub fn from_stretched(r: &StretchedMatrix, meta: Meta) -> Self {
        let n = r.n();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| r.get(i, j)).collect())
            .collect();
        Document::new(
            r.dim(),
            Payload::StretchedMatrix(StretchedData { r: rows }),
            meta,
        )
    }

    pub fn from_point_set(d: usize, set: &PointSet, meta: Meta) -> Self {
        Document::new(
            d,
            Payload::PointSet(PointSetData {
                labels: set.labels().to_vec(),
                points: set.points().iter().map(|p| p.to_vec()).collect(),
            }),
            meta,
        )
    }

    pub fn from_report(d: usize, report: &RunReport, meta: Meta) -> Self {
        Document::new(d, Payload::Report(report.clone()), meta)
    }

    /// `dim` is `√N` when `N` is a square and 0 otherwise.
    pub fn from_params(p: &GeneralParams, meta: Meta) -> Self {
        let root = (p.n as f64).sqrt().round() as usize;
        let dim = if root * root == p.n { root } else { 0 };
        Document::new(
            dim,
            Payload::Params(ParamsData {
                n: p.n,
                alpha: p.alpha,
                beta: p.beta,
                lower: p.lower,
                upper: p.upper,
                m_max: p.m_max,
            }),
            meta,
        )
    }

    /// Checks that the payload agrees with `kind` and `dim`.
    pub fn validate(&self) -> std::result::Result<(), FieldError> {
        let d = self.dim;
        let n = d * d;
        for (k, v) in &self.meta.tolerances {
            if !v.is_finite() {
                return Err(FieldError::new(
                    format!("meta.tolerances.{k}"),
                    "non-finite number",
                ));
            }
        }
        if d < 2 && !matches!(self.payload, Payload::Report(_) | Payload::Params(_)) {
            return Err(FieldError::new("dim", format!("dimension {d} < 2")));
        }
        match &self.payload {
            Payload::Fiducial(x) => {
                let v = complex_vector("data.vector", &x.vector, d)?;
                SicFiducial::new(v).map_err(|e| FieldError::new("data.vector", e))?;
            }
            Payload::SicSystem(x) => {
                if let Some(f) = &x.fiducial {
                    complex_vector("data.fiducial", f, d)?;
                }
                if x.projectors.len() != n {
                    return Err(FieldError::new(
                        "data.projectors",
                        format!("expected {n} projectors, found {}", x.projectors.len()),
                    ));
                }
                for (k, rows) in x.projectors.iter().enumerate() {
                    let field = format!("data.projectors[{k}]");
                    let m = complex_matrix(&field, rows, d)?;
                    HermitianOperator::new(m).map_err(|e| FieldError::new(field, e))?;
                }
            }
            Payload::ProbVector(x) => check_probability("data.p", &x.p, n)?,
            Payload::Measurement(x) => {
                if x.r.is_empty() {
                    return Err(FieldError::new("data.r", "no outcomes"));
                }
                for (j, row) in x.r.iter().enumerate() {
                    if row.len() != n {
                        return Err(FieldError::new(
                            format!("data.r[{j}]"),
                            format!("expected {n} inputs, found {}", row.len()),
                        ));
                    }
                    check_finite(&format!("data.r[{j}]"), row)?;
                }
                let flat: Vec<f64> = x.r.iter().flatten().copied().collect();
                MeasurementMatrix::new(x.r.len(), n, flat)
                    .map_err(|e| FieldError::new("data.r", e))?;
            }
            Payload::StretchedMatrix(x) => check_square("data.r", &x.r, n)?,
            Payload::PointSet(x) => {
                if x.labels.len() != x.points.len() {
                    return Err(FieldError::new(
                        "data.labels",
                        format!("{} labels for {} points", x.labels.len(), x.points.len()),
                    ));
                }
                for (i, p) in x.points.iter().enumerate() {
                    check_probability(&format!("data.points[{i}]"), p, n)?;
                }
            }
            Payload::Report(r) => r.validate()?,
            Payload::Params(x) => {
                let p = GeneralParams::new(x.n, x.alpha)
                    .map_err(|e| FieldError::new("data.alpha", e))?;
                for (name, stored, derived) in [
                    ("beta", x.beta, p.beta),
                    ("lower", x.lower, p.lower),
                    ("upper", x.upper, p.upper),
                    ("m_max", x.m_max, p.m_max),
                ] {
                    if (stored - derived).abs() > 1e-12 * derived.abs().max(1.0) {
                        return Err(FieldError::new(
                            format!("data.{name}"),
                            format!("{stored} disagrees with the value {derived} implied by n and alpha"),
                        ));
                    }
                }
                if d != 0 && x.n != n {
                    return Err(FieldError::new(
                        "data.n",
                        format!("n = {} but dim = {d}", x.n),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_string_pretty(&self) -> std::result::Result<String, FieldError> {
        self.validate()?;
        let data = self
            .payload
            .to_value()
            .map_err(|e| FieldError::new("data", e))?;
        let raw = RawOut {
            kind: self.kind(),
            dim: self.dim,
            data,
            meta: &self.meta,
        };
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, DocFormatter::default());
        raw.serialize(&mut ser)
            .map_err(|e| FieldError::new("data", e))?;
        buf.push(b'\n');
        Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, DocumentError> {
        let raw: RawIn = serde_json::from_str(text).map_err(|e| DocumentError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let payload = Payload::from_value(raw.kind, raw.data).map_err(|e| e.at(path))?;
        let doc = Document {
            dim: raw.dim,
            payload,
            meta: raw.meta,
        };
        doc.validate().map_err(|e| e.at(path))?;
        Ok(doc)
    }

    pub fn expect_kind(&self, expected: Kind, path: &Path) -> Result<(), DocumentError> {
        if self.kind() != expected {
            return Err(DocumentError::Kind {
                path: path.to_path_buf(),
                expected: expected.to_string(),
                found: self.kind().to_string(),
            });
        }
        Ok(())
    }

    pub fn to_fiducial(&self) -> Option<SicFiducial> {
        match &self.payload {
            Payload::Fiducial(x) => {
                let v = CVector::from_iterator(
                    x.vector.len(),
                    x.vector.iter().map(|z| C64::new(z[0], z[1])),
                );
                SicFiducial::new(v).ok()
            }
            _ => None,
        }
    }

    pub fn to_sic_system(&self) -> Option<SicSystem> {
        match &self.payload {
            Payload::SicSystem(x) => {
                let ops = x
                    .projectors
                    .iter()
                    .map(|rows| {
                        let m = complex_matrix("", rows, self.dim).ok()?;
                        HermitianOperator::new(m).ok()
                    })
                    .collect::<Option<Vec<_>>>()?;
                SicSystem::explicit(self.dim, ops).ok()
            }
            _ => None,
        }
    }

    pub fn to_prob(&self) -> Option<ProbVector> {
        match &self.payload {
            Payload::ProbVector(x) => ProbVector::new(x.p.clone()).ok(),
            _ => None,
        }
    }

    pub fn to_measurement(&self) -> Option<MeasurementMatrix> {
        match &self.payload {
            Payload::Measurement(x) => {
                let flat: Vec<f64> = x.r.iter().flatten().copied().collect();
                MeasurementMatrix::new(x.r.len(), self.dim * self.dim, flat).ok()
            }
            _ => None,
        }
    }

    pub fn to_stretched(&self) -> Option<StretchedMatrix> {
        match &self.payload {
            Payload::StretchedMatrix(x) => {
                let flat: Vec<f64> = x.r.iter().flatten().copied().collect();
                StretchedMatrix::from_rows(self.dim, &flat).ok()
            }
            _ => None,
        }
    }

    pub fn to_point_set(&self) -> Option<PointSet> {
        match &self.payload {
            Payload::PointSet(x) => {
                let mut set = PointSet::new(self.dim * self.dim);
                for (p, label) in x.points.iter().zip(&x.labels) {
                    set.push(ProbVector::new(p.clone()).ok()?, label.clone())
                        .ok()?;
                }
                Some(set)
            }
            _ => None,
        }
    }
}

pub fn load_document(path: &Path) -> Result<Document, DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Document::parse(&text, path)
}

pub fn save_document(doc: &Document, path: &Path) -> Result<(), DocumentError> {
    let text = doc.to_string_pretty().map_err(|e| e.at(path))?;
    std::fs::write(path, text).map_err(|source| DocumentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Frame {
    Object { empty: bool },
    Array { nested: bool },
}

/// Indented objects; arrays of scalars stay on one line, nested arrays and
/// objects inside arrays start on their own line. Floats use `{:.16e}`.
#[derive(Debug, Default)]
struct DocFormatter {
    stack: Vec<Frame>,
}

impl DocFormatter {
    fn newline<W: ?Sized + Write>(&self, w: &mut W, depth: usize) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..depth {
            w.write_all(b"  ")?;
        }
        Ok(())
    }

    fn open_in_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        if let Some(Frame::Array { nested }) = self.stack.last_mut() {
            *nested = true;
            let depth = self.stack.len();
            self.newline(w, depth)?;
        }
        Ok(())
    }
}

impl Formatter for DocFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.open_in_array(w)?;
        self.stack.push(Frame::Array { nested: false });
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        if let Some(Frame::Array { nested: true }) = self.stack.pop() {
            let depth = self.stack.len();
            self.newline(w, depth)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.open_in_array(w)?;
        self.stack.push(Frame::Object { empty: true });
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        if let Some(Frame::Object { empty: false }) = self.stack.pop() {
            let depth = self.stack.len();
            self.newline(w, depth)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        if let Some(Frame::Object { empty }) = self.stack.last_mut() {
            *empty = false;
        }
        let depth = self.stack.len();
        self.newline(w, depth)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        Ok(())
    }
}
