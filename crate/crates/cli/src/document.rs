//! JSON interchange documents: couples, filtered complexes, derivation trees.
//!
//! Every document is one JSON object with a `format_version` and a `type`.
//! Rationals are strings, `"p/q"` in lowest terms or `"p"`. Matrices are
//! row-major lists of rows; subspaces are lists of basis vectors. The
//! canonical text form sorts keys, writes arrays of scalars on one line and
//! ends in a newline, so canonical documents survive parse → print unchanged.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use exact_couples::complex::FilteredComplex;
use exact_couples::filt::{first_violation, Filt, FiltMorphism, FiltObject};
use exact_couples::linalg::{format_rational, parse_rational, Matrix, Subspace};
use exact_couples::vect::{Vect, VectMorphism, VectObject};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocumentError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> DocumentError {
    DocumentError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

fn syntax(e: serde_json::Error) -> DocumentError {
    let text = e.to_string();
    let message = match text.rsplit_once(" at line ") {
        Some((m, _)) => m.to_string(),
        None => text,
    };
    DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message,
    }
}

pub type Rows = Vec<Vec<String>>;
/// Basis vectors, one inner list per vector.
pub type Basis = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDoc {
    pub dim: usize,
    /// Filtration `F₀ ⊇ F₁ ⊇ …`, last step zero; absent for plain vector spaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<Basis>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectsDoc {
    #[serde(rename = "D")]
    pub d: ObjectDoc,
    #[serde(rename = "E")]
    pub e: ObjectDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismsDoc {
    pub alpha: Rows,
    pub beta: Rows,
    pub gamma: Rows,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupleDoc {
    pub format_version: u32,
    #[serde(rename = "type")]
    pub doc_type: String,
    pub kind: String,
    pub objects: ObjectsDoc,
    pub morphisms: MorphismsDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub format_version: u32,
    #[serde(rename = "type")]
    pub doc_type: String,
    pub dims: Vec<usize>,
    /// `d_1, …, d_N`, with `d_n : C_n → C_{n−1}`.
    pub differentials: Vec<Rows>,
    /// `filtration[p][n]` spans `F_p C_n`.
    pub filtration: Vec<Vec<Basis>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub alpha_strict: bool,
    pub beta_strict: bool,
    pub gamma_strict: bool,
    pub ker_gamma_semistable: String,
    pub cok_beta_semistable: String,
    pub alpha_power_strict: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaDoc {
    pub unique: bool,
    pub monic: bool,
    pub epic: bool,
    pub iso: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    /// `L`/`R` letters from the root; empty for the root.
    pub path: String,
    pub dim_d: usize,
    pub dim_e: usize,
    pub certificate: CertificateDoc,
    /// Comparison map between this node's two children.
    pub omega: Option<OmegaDoc>,
    pub failure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couple: Option<CoupleDoc>,
}

/// Page totals of the spectral sequence against the `E` objects at one depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDoc {
    pub depth: usize,
    pub page: usize,
    pub page_total: usize,
    pub node_dims: Vec<usize>,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub format_version: u32,
    #[serde(rename = "type")]
    pub doc_type: String,
    pub kind: String,
    pub depth: usize,
    pub sides: String,
    pub complete: bool,
    pub nodes: Vec<NodeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<OracleDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Couple(CoupleDoc),
    Complex(ComplexDoc),
    Tree(TreeDoc),
}

/// Parses any document, reporting JSON and schema errors with line and column.
pub fn parse(text: &str) -> Result<Document, DocumentError> {
    let value: Value = serde_json::from_str(text).map_err(syntax)?;
    let ty = value
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| invalid("type", "missing document type"))?;
    match value.get("format_version").and_then(Value::as_u64) {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => {
            return Err(invalid(
                "format_version",
                format!("unsupported version {v}"),
            ))
        }
        None => return Err(invalid("format_version", "missing")),
    }
    Ok(match ty {
        "couple" => Document::Couple(serde_json::from_str(text).map_err(syntax)?),
        "complex" => Document::Complex(serde_json::from_str(text).map_err(syntax)?),
        "tree" => Document::Tree(serde_json::from_str(text).map_err(syntax)?),
        other => return Err(invalid("type", format!("unknown document type {other:?}"))),
    })
}

/// Canonical text of a document.
pub fn to_canonical(doc: &Document) -> String {
    let value = match doc {
        Document::Couple(d) => serde_json::to_value(d),
        Document::Complex(d) => serde_json::to_value(d),
        Document::Tree(d) => serde_json::to_value(d),
    }
    .expect("documents serialize");
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&item.to_string());
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(&map[k.as_str()], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

// ---------------------------------------------------------------------------
// Matrices and subspaces

pub fn matrix_to_rows(m: &Matrix) -> Rows {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect()
}

/// Reads a `rows × cols` matrix.
pub fn rows_to_matrix(
    rows: &Rows,
    shape: (usize, usize),
    path: &str,
) -> Result<Matrix, DocumentError> {
    if rows.len() != shape.0 {
        return Err(invalid(
            path,
            format!("expected {} rows, found {}", shape.0, rows.len()),
        ));
    }
    let mut m = Matrix::zeros(shape.0, shape.1);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != shape.1 {
            return Err(invalid(
                format!("{path}[{i}]"),
                format!("expected {} entries, found {}", shape.1, row.len()),
            ));
        }
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = parse_rational(entry)
                .map_err(|e| invalid(format!("{path}[{i}][{j}]"), e.to_string()))?;
        }
    }
    Ok(m)
}

pub fn subspace_to_basis(s: &Subspace) -> Basis {
    matrix_to_rows(&s.basis().transpose())
}

pub fn basis_to_subspace(basis: &Basis, dim: usize, path: &str) -> Result<Subspace, DocumentError> {
    let vectors = rows_to_matrix(basis, (basis.len(), dim), path)?;
    Ok(Subspace::span(&vectors.transpose()))
}

// ---------------------------------------------------------------------------
// Backends

/// What the documents and reports need to know about a backend.
pub trait Backend: exact_couples::category::Sampler {
    const KIND: &'static str;
    fn object_doc(x: &Self::Object) -> ObjectDoc;
    fn matrix(f: &Self::Morphism) -> &Matrix;
}

impl Backend for Vect {
    const KIND: &'static str = "vect";

    fn object_doc(x: &VectObject) -> ObjectDoc {
        ObjectDoc {
            dim: x.dim,
            steps: None,
        }
    }

    fn matrix(f: &VectMorphism) -> &Matrix {
        f.matrix()
    }
}

impl Backend for Filt {
    const KIND: &'static str = "filt";

    fn object_doc(x: &FiltObject) -> ObjectDoc {
        ObjectDoc {
            dim: x.dim(),
            steps: Some(x.steps().iter().map(subspace_to_basis).collect()),
        }
    }

    fn matrix(f: &FiltMorphism) -> &Matrix {
        f.matrix()
    }
}

pub fn couple_doc<B: Backend>(
    cat: &B,
    alpha: &B::Morphism,
    beta: &B::Morphism,
    gamma: &B::Morphism,
) -> CoupleDoc {
    CoupleDoc {
        format_version: FORMAT_VERSION,
        doc_type: "couple".into(),
        kind: B::KIND.into(),
        objects: ObjectsDoc {
            d: B::object_doc(&cat.source(alpha)),
            e: B::object_doc(&cat.target(beta)),
        },
        morphisms: MorphismsDoc {
            alpha: matrix_to_rows(B::matrix(alpha)),
            beta: matrix_to_rows(B::matrix(beta)),
            gamma: matrix_to_rows(B::matrix(gamma)),
        },
    }
}

/// The three maps of a couple document, not yet checked for exactness.
#[derive(Clone, Debug)]
pub struct RawCouple<M> {
    pub alpha: M,
    pub beta: M,
    pub gamma: M,
}

#[derive(Clone, Debug)]
pub enum LoadedCouple {
    Vect(RawCouple<VectMorphism>),
    Filt(RawCouple<FiltMorphism>),
}

fn filt_object(doc: &ObjectDoc, path: &str) -> Result<FiltObject, DocumentError> {
    match &doc.steps {
        None => Ok(FiltObject::trivial(doc.dim)),
        Some(steps) => {
            let subspaces = steps
                .iter()
                .enumerate()
                .map(|(p, b)| basis_to_subspace(b, doc.dim, &format!("{path}.steps[{p}]")))
                .collect::<Result<Vec<_>, _>>()?;
            FiltObject::new(doc.dim, subspaces)
                .map_err(|e| invalid(format!("{path}.steps"), e.to_string()))
        }
    }
}

impl CoupleDoc {
    /// Builds the morphisms, checking shapes, rationals, filtrations and that
    /// every map respects the filtrations.
    pub fn load(&self) -> Result<LoadedCouple, DocumentError> {
        if self.doc_type != "couple" {
            return Err(invalid("type", "expected a couple document"));
        }
        let (d, e) = (self.objects.d.dim, self.objects.e.dim);
        let m = &self.morphisms;
        let alpha = rows_to_matrix(&m.alpha, (d, d), "morphisms.alpha")?;
        let beta = rows_to_matrix(&m.beta, (e, d), "morphisms.beta")?;
        let gamma = rows_to_matrix(&m.gamma, (d, e), "morphisms.gamma")?;
        match self.kind.as_str() {
            "vect" => {
                for (o, name) in [(&self.objects.d, "D"), (&self.objects.e, "E")] {
                    if o.steps.is_some() {
                        return Err(invalid(
                            format!("objects.{name}.steps"),
                            "vect objects carry no filtration",
                        ));
                    }
                }
                Ok(LoadedCouple::Vect(RawCouple {
                    alpha: VectMorphism::from_matrix(alpha),
                    beta: VectMorphism::from_matrix(beta),
                    gamma: VectMorphism::from_matrix(gamma),
                }))
            }
            "filt" => {
                let fd = filt_object(&self.objects.d, "objects.D")?;
                let fe = filt_object(&self.objects.e, "objects.E")?;
                let lift = |name: &str, m: Matrix, s: &FiltObject, t: &FiltObject| {
                    if let Some(level) = first_violation(&m, s, t) {
                        return Err(invalid(
                            format!("morphisms.{name}"),
                            format!("does not respect the filtrations at level {level}"),
                        ));
                    }
                    FiltMorphism::new(s.clone(), t.clone(), m)
                        .map_err(|e| invalid(format!("morphisms.{name}"), e.to_string()))
                };
                Ok(LoadedCouple::Filt(RawCouple {
                    alpha: lift("alpha", alpha, &fd, &fd)?,
                    beta: lift("beta", beta, &fd, &fe)?,
                    gamma: lift("gamma", gamma, &fe, &fd)?,
                }))
            }
            other => Err(invalid("kind", format!("unknown backend kind {other:?}"))),
        }
    }
}

impl ComplexDoc {
    pub fn from_complex(fc: &FilteredComplex) -> Self {
        ComplexDoc {
            format_version: FORMAT_VERSION,
            doc_type: "complex".into(),
            dims: fc.dims().to_vec(),
            differentials: fc.differentials().iter().map(matrix_to_rows).collect(),
            filtration: fc
                .filtration()
                .iter()
                .map(|level| level.iter().map(subspace_to_basis).collect())
                .collect(),
        }
    }

    pub fn load(&self) -> Result<FilteredComplex, DocumentError> {
        let dims = &self.dims;
        if dims.is_empty() {
            return Err(invalid("dims", "a complex needs at least one degree"));
        }
        if self.differentials.len() + 1 != dims.len() {
            return Err(invalid(
                "differentials",
                format!(
                    "expected {} differentials, found {}",
                    dims.len() - 1,
                    self.differentials.len()
                ),
            ));
        }
        let differentials = self
            .differentials
            .iter()
            .enumerate()
            .map(|(i, rows)| {
                rows_to_matrix(rows, (dims[i], dims[i + 1]), &format!("differentials[{i}]"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut filtration = Vec::with_capacity(self.filtration.len());
        for (p, level) in self.filtration.iter().enumerate() {
            if level.len() != dims.len() {
                return Err(invalid(
                    format!("filtration[{p}]"),
                    "one subspace per degree expected",
                ));
            }
            filtration.push(
                level
                    .iter()
                    .enumerate()
                    .map(|(n, b)| basis_to_subspace(b, dims[n], &format!("filtration[{p}][{n}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        FilteredComplex::new(dims.clone(), differentials, filtration)
            .map_err(|e| invalid("complex", e))
    }
}
