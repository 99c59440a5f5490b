//! Text documents for realizations and matrices.
//!
//! Documents are JSON with a fixed canonical layout: lowercase keys in a fixed order,
//! one matrix row per line, every scalar written as a quadruple `[x0, x1, x2, x3]` of
//! coefficients of `1, i, j_t, k_t` with 17 significant digits. Parsing a canonical
//! document and writing it again gives the same bytes.

use crate::error::CliError;
use ht_rational::structured::{Certificate, CertificateKind, Signature};
use ht_rational::{AlgebraContext, HtMatrix, HtScalar, Node};
use serde::Deserialize;
use serde_json::{Map, Value};
use std::fmt::Write as _;
use std::path::Path;

type Rows = Vec<Vec<[f64; 4]>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    t: f64,
    state: usize,
    inputs: usize,
    outputs: usize,
    #[serde(default)]
    kind: Option<String>,
    a: Rows,
    b: Rows,
    c: Rows,
    d: Rows,
    #[serde(default)]
    j: Option<Rows>,
    #[serde(default)]
    h: Option<Rows>,
    #[serde(default)]
    metadata: Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    matrix: Rows,
    #[serde(default)]
    metadata: Map<String, Value>,
}

/// A realization with optional signature, certificate and free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDocument {
    pub t: f64,
    pub a: HtMatrix,
    pub b: HtMatrix,
    pub c: HtMatrix,
    pub d: HtMatrix,
    pub kind: Option<CertificateKind>,
    pub j: Option<HtMatrix>,
    pub h: Option<HtMatrix>,
    pub metadata: Map<String, Value>,
}

/// A bare matrix: a signature, a certificate, a projection or a submodule basis whose
/// columns span the submodule.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDocument {
    pub matrix: HtMatrix,
    pub metadata: Map<String, Value>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })
}

// serde_json appends " at line L column C" to its messages; the position is reported
// separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn to_matrix(name: &str, rows: &Rows, nrows: usize, ncols: usize) -> Result<HtMatrix, CliError> {
    if rows.len() != nrows {
        return Err(CliError::Invalid(format!("'{name}' has {} rows, expected {nrows}", rows.len())));
    }
    let mut data = Vec::with_capacity(nrows * ncols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(CliError::Invalid(format!(
                "row {i} of '{name}' has {} entries, expected {ncols}",
                row.len()
            )));
        }
        for q in row {
            if q.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Invalid(format!("'{name}' has a non-finite entry in row {i}")));
            }
            data.push(HtScalar::from_coords(*q));
        }
    }
    Ok(HtMatrix::from_row_major(nrows, ncols, data)?)
}

impl NodeDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawNode = parse_json(text)?;
        if raw.t == 0.0 || !raw.t.is_finite() {
            return Err(CliError::Invalid("t must be a nonzero finite number".into()));
        }
        let (n, m, p) = (raw.state, raw.inputs, raw.outputs);
        let kind = match &raw.kind {
            Some(k) => Some(k.parse::<CertificateKind>().map_err(|_| {
                CliError::Invalid(format!("unknown kind '{k}'; expected one of {}", kind_names()))
            })?),
            None => None,
        };
        let doc = Self {
            t: raw.t,
            a: to_matrix("a", &raw.a, n, n)?,
            b: to_matrix("b", &raw.b, n, m)?,
            c: to_matrix("c", &raw.c, p, n)?,
            d: to_matrix("d", &raw.d, p, m)?,
            kind,
            j: raw.j.as_ref().map(|j| to_matrix("j", j, p, p)).transpose()?,
            h: raw.h.as_ref().map(|h| to_matrix("h", h, n, n)).transpose()?,
            metadata: raw.metadata,
        };
        if doc.h.is_some() && doc.kind.is_none() {
            return Err(CliError::Invalid("'h' needs a 'kind'".into()));
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read_text(path)?)
    }

    pub fn from_node(node: &Node) -> Self {
        Self {
            t: node.ctx().t(),
            a: node.a().clone(),
            b: node.b().clone(),
            c: node.c().clone(),
            d: node.d().clone(),
            kind: None,
            j: None,
            h: None,
            metadata: Map::new(),
        }
    }

    pub fn with_signature(mut self, j: Option<&Signature>) -> Self {
        self.j = j.map(|j| j.matrix().clone());
        self
    }

    pub fn with_certificate(mut self, cert: &Certificate) -> Self {
        self.kind = Some(cert.kind);
        self.h = Some(cert.h.clone());
        self
    }

    pub fn with_label(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn ctx(&self) -> Result<AlgebraContext, CliError> {
        Ok(AlgebraContext::new(self.t)?)
    }

    pub fn node(&self) -> Result<Node, CliError> {
        Ok(Node::new(self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone(), self.ctx()?)?)
    }

    pub fn signature(&self, tol: f64) -> Result<Option<Signature>, CliError> {
        let ctx = self.ctx()?;
        self.j.as_ref().map(|j| Signature::new(j.clone(), &ctx, tol).map_err(CliError::from)).transpose()
    }

    /// The stored certificate, if any.
    pub fn certificate(&self) -> Option<Certificate> {
        match (self.kind, &self.h) {
            (Some(kind), Some(h)) => Some(Certificate { kind, h: h.clone(), residual: f64::NAN }),
            _ => None,
        }
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        let mut s = String::from("{\n");
        let _ = writeln!(s, "  \"t\": {},", num(self.t));
        let _ = writeln!(s, "  \"state\": {},", self.a.nrows());
        let _ = writeln!(s, "  \"inputs\": {},", self.b.ncols());
        let _ = writeln!(s, "  \"outputs\": {},", self.c.nrows());
        if let Some(k) = self.kind {
            let _ = writeln!(s, "  \"kind\": \"{}\",", k.name());
        }
        let mut fields: Vec<(&str, &HtMatrix)> =
            vec![("a", &self.a), ("b", &self.b), ("c", &self.c), ("d", &self.d)];
        if let Some(j) = &self.j {
            fields.push(("j", j));
        }
        if let Some(h) = &self.h {
            fields.push(("h", h));
        }
        let last = fields.len() - 1;
        for (i, (name, m)) in fields.iter().enumerate() {
            let sep = if i == last && self.metadata.is_empty() { "" } else { "," };
            let _ = writeln!(s, "  \"{name}\": {}{sep}", matrix_text(m));
        }
        if !self.metadata.is_empty() {
            let _ = writeln!(s, "  \"metadata\": {}", metadata_text(&self.metadata));
        }
        s.push_str("}\n");
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.to_text())
    }
}

impl MatrixDocument {
    pub fn new(matrix: HtMatrix) -> Self {
        Self { matrix, metadata: Map::new() }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawMatrix = parse_json(text)?;
        Ok(Self { matrix: to_matrix("matrix", &raw.matrix, raw.rows, raw.cols)?, metadata: raw.metadata })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read_text(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("{\n");
        let _ = writeln!(s, "  \"rows\": {},", self.matrix.nrows());
        let _ = writeln!(s, "  \"cols\": {},", self.matrix.ncols());
        let sep = if self.metadata.is_empty() { "" } else { "," };
        let _ = writeln!(s, "  \"matrix\": {}{sep}", matrix_text(&self.matrix));
        if !self.metadata.is_empty() {
            let _ = writeln!(s, "  \"metadata\": {}", metadata_text(&self.metadata));
        }
        s.push_str("}\n");
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.to_text())
    }
}

pub fn kind_names() -> String {
    CertificateKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
}

/// 17 significant digits, enough to round trip every double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn quad(q: &HtScalar) -> String {
    let [x0, x1, x2, x3] = q.coords();
    format!("[{}, {}, {}, {}]", num(x0), num(x1), num(x2), num(x3))
}

fn matrix_text(m: &HtMatrix) -> String {
    if m.nrows() == 0 {
        return "[]".into();
    }
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let entries: Vec<String> = (0..m.ncols()).map(|j| quad(&m[(i, j)])).collect();
            format!("    [{}]", entries.join(", "))
        })
        .collect();
    format!("[\n{}\n  ]", rows.join(",\n"))
}

fn metadata_text(meta: &Map<String, Value>) -> String {
    let entries: Vec<String> = meta
        .iter()
        .map(|(k, v)| format!("    {}: {}", Value::String(k.clone()), v))
        .collect();
    format!("{{\n{}\n  }}", entries.join(",\n"))
}

/// Quadruples as nested JSON arrays, for machine-readable output.
pub fn matrix_json(m: &HtMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| serde_json::json!(m[(i, j)].coords())).collect()))
            .collect(),
    )
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}
