//! JSON documents for maps, states and cone vectors.
//!
//! Every matrix is `{"rows": r, "cols": c, "data": [[re, im], ...]}` with
//! row-major data.

use posmap_core::choi::LinearMapRep;
use posmap_core::{ComplexMatrix, Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Optional descriptive fields carried through to reports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl Metadata {
    fn is_empty(&self) -> bool {
        self.name.is_none() && self.seed.is_none() && self.notes.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "encoding", rename_all = "kebab-case")]
pub enum MapEncoding {
    /// `h = Σ E_ij ⊗ φ(E_ij)`, an `mn x mn` matrix.
    Choi { choi: ComplexMatrix },
    /// `φ(E_ij)` for `i, j` in row-major order.
    UnitAction { images: Vec<ComplexMatrix> },
    /// `a ↦ Σ w_r K_r a K_r*` with `n x m` operators `K_r`.
    #[serde(alias = "kraus-like-sum-of-conjugations")]
    Conjugations { ops: Vec<ComplexMatrix>, weights: Vec<f64> },
}

/// A linear map `B(C^m) → B(C^n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDocument {
    pub m: usize,
    pub n: usize,
    #[serde(flatten)]
    pub encoding: MapEncoding,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

impl MapDocument {
    pub fn from_map(phi: &LinearMapRep, name: Option<&str>) -> Self {
        Self {
            m: phi.m(),
            n: phi.n(),
            encoding: MapEncoding::Choi {
                choi: phi.choi().clone(),
            },
            metadata: Metadata {
                name: name.map(str::to_string),
                ..Metadata::default()
            },
        }
    }

    pub fn to_map(&self) -> Result<LinearMapRep> {
        let (m, n) = (self.m, self.n);
        if m == 0 || n == 0 {
            return Err(Error::InvalidDocument("map dimensions must be positive".into()));
        }
        match &self.encoding {
            MapEncoding::Choi { choi } => {
                if choi.shape() != (m * n, m * n) {
                    return Err(Error::InvalidDocument(format!(
                        "Choi matrix is {}x{}, expected {}x{} for m = {m}, n = {n}",
                        choi.rows(),
                        choi.cols(),
                        m * n,
                        m * n
                    )));
                }
                LinearMapRep::from_choi(choi.clone(), m, n)
            }
            MapEncoding::UnitAction { images } => {
                if images.len() != m * m {
                    return Err(Error::InvalidDocument(format!(
                        "{} unit images, expected {}",
                        images.len(),
                        m * m
                    )));
                }
                if let Some((i, img)) = images.iter().enumerate().find(|(_, a)| a.shape() != (n, n)) {
                    return Err(Error::InvalidDocument(format!(
                        "unit image {i} is {}x{}, expected {n}x{n}",
                        img.rows(),
                        img.cols()
                    )));
                }
                LinearMapRep::from_unit_action(m, n, images)
            }
            MapEncoding::Conjugations { ops, weights } => {
                if ops.len() != weights.len() {
                    return Err(Error::InvalidDocument(format!(
                        "{} operators but {} weights",
                        ops.len(),
                        weights.len()
                    )));
                }
                if let Some((i, k)) = ops.iter().enumerate().find(|(_, k)| k.shape() != (n, m)) {
                    return Err(Error::InvalidDocument(format!(
                        "operator {i} is {}x{}, expected {n}x{m}",
                        k.rows(),
                        k.cols()
                    )));
                }
                LinearMapRep::from_conjugations(m, n, ops, weights)
            }
        }
    }
}

/// A density matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub rho: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

/// A vector of the GNS space of `B(C^{dim_a}) ⊗ B(C^{dim_b})`, given either
/// directly or as the block matrix `a` of `Δ^{1/4} a Ω`. Missing states
/// default to the tracial ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeDocument {
    pub dim_a: usize,
    pub dim_b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_a: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_b: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

fn tracial(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d).scale_real(1.0 / d as f64)
}

impl ConeDocument {
    pub fn states(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        if self.dim_a == 0 || self.dim_b == 0 {
            return Err(Error::InvalidDocument("cone dimensions must be positive".into()));
        }
        let pick = |r: &Option<ComplexMatrix>, d: usize, label: &str| -> Result<ComplexMatrix> {
            match r {
                Some(m) if m.shape() != (d, d) => Err(Error::InvalidDocument(format!(
                    "{label} is {}x{}, expected {d}x{d}",
                    m.rows(),
                    m.cols()
                ))),
                Some(m) => Ok(m.clone()),
                None => Ok(tracial(d)),
            }
        };
        Ok((pick(&self.rho_a, self.dim_a, "rho_a")?, pick(&self.rho_b, self.dim_b, "rho_b")?))
    }

    /// Which of `vector` / `blocks` was supplied, checked for size.
    pub fn input(&self) -> Result<ConeInput<'_>> {
        let d = self.dim_a * self.dim_b;
        let (m, input) = match (&self.vector, &self.blocks) {
            (Some(v), None) => (v, ConeInput::Vector(v)),
            (None, Some(b)) => (b, ConeInput::Blocks(b)),
            _ => {
                return Err(Error::InvalidDocument(
                    "exactly one of `vector` and `blocks` is required".into(),
                ))
            }
        };
        if m.shape() != (d, d) {
            return Err(Error::InvalidDocument(format!(
                "cone input is {}x{}, expected {d}x{d}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(input)
    }
}

pub enum ConeInput<'a> {
    Vector(&'a ComplexMatrix),
    Blocks(&'a ComplexMatrix),
}

/// Parses JSON, reporting the line and column of syntax and schema errors.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
