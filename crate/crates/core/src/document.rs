//! JSON model documents: complex numbers as `[re, im]`, matrices as
//! row-major nested arrays.

use serde::{Deserialize, Serialize};

use crate::dynamics::FeedbackDesign;
use crate::error::{Error, Result};
use crate::generator::{Channel, GksModel, LindbladModel};
use crate::linquant::{c, hermitian_basis, identity, ComplexMatrix, SpaceDecomposition};

pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_doc(m: &ComplexMatrix) -> MatrixDoc {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn doc_to_matrix(doc: &MatrixDoc, d: usize, name: &str) -> Result<ComplexMatrix> {
    if doc.len() != d || doc.iter().any(|row| row.len() != d) {
        let cols = doc.first().map_or(0, Vec::len);
        return Err(Error::Dimension(format!("{name}: expected {d}x{d}, found {}x{cols}", doc.len())));
    }
    if doc.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name}: non-finite entry")));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| c(doc[i][j][0], doc[i][j][1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub gamma: f64,
    #[serde(rename = "L")]
    pub op: MatrixDoc,
}

/// Either the name `"hermitian"` (traceless orthonormal Hermitian basis) or explicit matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GksBasisDoc {
    Named(String),
    Matrices(Vec<MatrixDoc>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GksDoc {
    pub basis: GksBasisDoc,
    #[serde(rename = "A")]
    pub a: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    pub n: usize,
    pub f: usize,
    pub r: usize,
    /// Identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_change: Option<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignDoc {
    #[serde(rename = "M")]
    pub measurement: MatrixDoc,
    #[serde(rename = "F")]
    pub feedback: MatrixDoc,
    #[serde(default = "one")]
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compensation: Option<MatrixDoc>,
}

fn one() -> f64 {
    1.0
}

/// Model file. The generator is `hamiltonian` plus `channels`, plus the GKS
/// part if present, plus the feedback channel when a design is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub dim: usize,
    pub hamiltonian: MatrixDoc,
    #[serde(default)]
    pub channels: Vec<ChannelDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gks: Option<GksDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignDoc>,
}

impl ModelDocument {
    /// Parses and validates every part of the document.
    pub fn parse(text: &str) -> std::result::Result<Self, DocumentError> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_model(model: &LindbladModel) -> Self {
        use crate::generator::Generator;
        Self {
            dim: model.dim(),
            hamiltonian: matrix_to_doc(model.hamiltonian()),
            channels: model.channels().iter().map(|ch| ChannelDoc { gamma: ch.rate, op: matrix_to_doc(&ch.op) }).collect(),
            gks: None,
            decomposition: None,
            design: None,
        }
    }

    /// Document for a feedback design: `hamiltonian` is the free Hamiltonian `H`.
    pub fn from_design(design: &FeedbackDesign) -> Self {
        Self {
            dim: design.dim(),
            hamiltonian: matrix_to_doc(&design.hamiltonian),
            channels: Vec::new(),
            gks: None,
            decomposition: None,
            design: Some(DesignDoc {
                measurement: matrix_to_doc(&design.measurement),
                feedback: matrix_to_doc(&design.feedback),
                eta: design.eta,
                compensation: Some(matrix_to_doc(&design.compensation)),
            }),
        }
    }

    pub fn with_decomposition(mut self, decomp: &SpaceDecomposition) -> Self {
        self.decomposition = Some(DecompositionDoc {
            n: decomp.n(),
            f: decomp.f(),
            r: decomp.r(),
            basis_change: Some(matrix_to_doc(decomp.basis_change())),
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.lindblad()?;
        self.gks_model()?;
        self.space_decomposition()?;
        Ok(())
    }

    fn hamiltonian_matrix(&self) -> Result<ComplexMatrix> {
        if self.dim == 0 {
            return Err(Error::Dimension("dim must be positive".into()));
        }
        doc_to_matrix(&self.hamiltonian, self.dim, "hamiltonian")
    }

    pub fn feedback_design(&self) -> Result<Option<FeedbackDesign>> {
        let Some(design) = &self.design else { return Ok(None) };
        let d = self.dim;
        let compensation = match &design.compensation {
            Some(m) => doc_to_matrix(m, d, "design.compensation")?,
            None => ComplexMatrix::zeros(d, d),
        };
        FeedbackDesign::new(
            doc_to_matrix(&design.measurement, d, "design.M")?,
            doc_to_matrix(&design.feedback, d, "design.F")?,
            self.hamiltonian_matrix()?,
            compensation,
            design.eta,
        )
        .map(Some)
    }

    pub fn gks_model(&self) -> Result<Option<GksModel>> {
        let Some(gks) = &self.gks else { return Ok(None) };
        let d = self.dim;
        let basis = match &gks.basis {
            GksBasisDoc::Named(name) if name == "hermitian" => hermitian_basis(d).split_off(1),
            GksBasisDoc::Named(name) => return Err(Error::InvalidParameter(format!("unknown GKS basis '{name}'"))),
            GksBasisDoc::Matrices(ms) => ms.iter().enumerate().map(|(k, m)| doc_to_matrix(m, d, &format!("gks.basis[{k}]"))).collect::<Result<_>>()?,
        };
        let m = basis.len();
        let a = if gks.a.len() == m && gks.a.iter().all(|row| row.len() == m) {
            ComplexMatrix::from_fn(m, m, |i, j| c(gks.a[i][j][0], gks.a[i][j][1]))
        } else {
            return Err(Error::Dimension(format!("gks.A must be {m}x{m}")));
        };
        GksModel::new(self.hamiltonian_matrix()?, basis, a).map(Some)
    }

    /// The complete generator described by the document.
    pub fn lindblad(&self) -> Result<LindbladModel> {
        let d = self.dim;
        let mut h = self.hamiltonian_matrix()?;
        let mut channels = Vec::with_capacity(self.channels.len());
        for (k, ch) in self.channels.iter().enumerate() {
            if !(ch.gamma >= 0.0) || !ch.gamma.is_finite() {
                return Err(Error::InvalidParameter(format!("channels[{k}].gamma must be a nonnegative number")));
            }
            channels.push(Channel::new(ch.gamma, doc_to_matrix(&ch.op, d, &format!("channels[{k}].L"))?));
        }
        if let Some(g) = self.gks_model()? {
            channels.extend(g.to_lindblad()?.channels().iter().cloned());
        }
        if let Some(design) = self.feedback_design()? {
            let fme = crate::dynamics::build_fme(&design)?;
            h = fme.hamiltonian().clone();
            channels.extend(fme.channels().iter().cloned());
        }
        LindbladModel::new(h, channels)
    }

    /// True when the generator is fully described by the GKS part.
    pub fn is_pure_gks(&self) -> bool {
        self.gks.is_some() && self.channels.is_empty() && self.design.is_none()
    }

    pub fn space_decomposition(&self) -> Result<Option<SpaceDecomposition>> {
        let Some(dd) = &self.decomposition else { return Ok(None) };
        if dd.n * dd.f + dd.r != self.dim {
            return Err(Error::Dimension(format!("decomposition {}*{}+{} does not match dim {}", dd.n, dd.f, dd.r, self.dim)));
        }
        let u = match &dd.basis_change {
            Some(m) => doc_to_matrix(m, self.dim, "decomposition.basis_change")?,
            None => identity(self.dim),
        };
        SpaceDecomposition::new(dd.n, dd.f, dd.r, u).map(Some)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocumentError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Model(#[from] Error),
}

/// Matrix in document form on its own, as used for initial states.
pub fn parse_matrix(text: &str, d: usize) -> std::result::Result<ComplexMatrix, DocumentError> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(doc_to_matrix(&doc, d, "matrix")?)
}
