//! JSON manifold descriptors.
//!
//! ```json
//! {
//!   "name": "round_s3",
//!   "dim": 3,
//!   "kind": "homogeneous",
//!   "structure_constants": [[[0, 0, 0], ...], ...],
//!   "representations": [[[[re, im], ...], ...], ...],
//!   "parameters": {},
//!   "expected": [{"alpha": 0, "beta": 1, "kernel_dim": {"exact": 2}}],
//!   "sasaki_m": 1
//! }
//! ```
//!
//! Chart descriptors replace `structure_constants`/`representations` by
//! `chart` (a tagged recipe: `flat`, `product_sphere`, `warped`) and may add `scale`
//! and `samples`. `structure_constants[i][j][k]` is `c_ij^k` in `[e_i, e_j] = Σ c_ij^k e_k`;
//! `representations` holds, per model, the matrices `L_0..L_n` as rows of `[re, im]`
//! pairs. Floats are written in shortest round-trip form, so dumping and reloading
//! reproduces every number bit for bit.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Chart, ChartRecipe, FrameKind, FrameManifold, FrameRepresentation, Tensor3};
use crate::linalg::{CMatrix, C64};
use crate::zoo::{ExpectedFact, Witness, ZooEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptorKind {
    Homogeneous,
    Chart,
}

type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptor {
    pub name: String,
    pub dim: usize,
    pub kind: DescriptorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub representations: Vec<Vec<ComplexRows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartRecipe>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<ExpectedFact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sasaki_m: Option<usize>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

fn matrix_rows(m: &CMatrix) -> ComplexRows {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

fn rows_matrix(rows: &ComplexRows, where_: &str) -> Result<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Descriptor(format!("{where_}: matrix is not square")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

impl Descriptor {
    pub fn from_manifold(mf: &FrameManifold) -> Result<Self> {
        let mut d = Descriptor {
            name: mf.name().to_string(),
            dim: mf.dim(),
            kind: DescriptorKind::Homogeneous,
            structure_constants: None,
            representations: Vec::new(),
            chart: None,
            scale: None,
            samples: None,
            parameters: BTreeMap::new(),
            expected: Vec::new(),
            sasaki_m: None,
            notes: String::new(),
        };
        match mf.kind() {
            FrameKind::Homogeneous(h) => {
                d.structure_constants = Some(h.structure.to_nested());
                d.representations =
                    h.representations.iter().map(|r| r.generators().iter().map(matrix_rows).collect()).collect();
            }
            FrameKind::Chart(ch) => {
                if matches!(ch.recipe, ChartRecipe::Custom(_)) {
                    return Err(Error::Unsupported("custom chart frames cannot be written as descriptors".into()));
                }
                d.kind = DescriptorKind::Chart;
                d.chart = Some(ch.recipe.clone());
                d.scale = Some(ch.scale.clone());
                d.samples = Some(ch.samples.clone());
            }
        }
        Ok(d)
    }

    pub fn from_entry(entry: &ZooEntry, parameters: &BTreeMap<String, f64>) -> Result<Self> {
        let mut d = Self::from_manifold(&entry.manifold)?;
        d.parameters = parameters.clone();
        d.expected = entry.expected.clone();
        d.sasaki_m = entry.sasaki_m;
        d.notes = entry.notes.clone();
        Ok(d)
    }

    pub fn to_manifold(&self) -> Result<FrameManifold> {
        let manifold = match self.kind {
            DescriptorKind::Homogeneous => {
                if self.chart.is_some() || self.scale.is_some() || self.samples.is_some() {
                    return Err(Error::Descriptor("homogeneous descriptors take no chart, scale or samples".into()));
                }
                let nested = self
                    .structure_constants
                    .as_ref()
                    .ok_or_else(|| Error::Descriptor("missing field `structure_constants`".into()))?;
                let c = Tensor3::from_nested(nested).map_err(|e| Error::Descriptor(format!("structure_constants: {e}")))?;
                let reps = self
                    .representations
                    .iter()
                    .enumerate()
                    .map(|(k, gens)| {
                        let mats = gens
                            .iter()
                            .enumerate()
                            .map(|(i, g)| rows_matrix(g, &format!("representations[{k}][{i}]")))
                            .collect::<Result<Vec<_>>>()?;
                        FrameRepresentation::new(mats, &c)
                            .map_err(|e| Error::Descriptor(format!("representations[{k}]: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                FrameManifold::homogeneous_with(self.name.clone(), c, reps)?
            }
            DescriptorKind::Chart => {
                if self.structure_constants.is_some() || !self.representations.is_empty() {
                    return Err(Error::Descriptor("chart descriptors take no structure_constants or representations".into()));
                }
                let recipe = self.chart.clone().ok_or_else(|| Error::Descriptor("missing field `chart`".into()))?;
                let base = FrameManifold::chart(self.name.clone(), recipe.clone())?;
                let scale = self.scale.clone().unwrap_or_else(|| vec![1.0; base.dim()]);
                let samples = self.samples.clone().unwrap_or_else(|| base.samples());
                if let Some(bad) = samples.iter().position(|s| s.len() != base.dim()) {
                    return Err(Error::Descriptor(format!("samples[{bad}]: expected {} coordinates", base.dim())));
                }
                FrameManifold::from_parts(self.name.clone(), FrameKind::Chart(Chart { recipe, scale, samples }))?
            }
        };
        if manifold.dim() != self.dim {
            return Err(Error::Descriptor(format!("dim is {} but the frame data has dimension {}", self.dim, manifold.dim())));
        }
        Ok(manifold)
    }

    /// Catalog-style entry; chart witnesses are recovered from the recipe when the frame
    /// is not rescaled.
    pub fn to_entry(&self) -> Result<ZooEntry> {
        let manifold = self.to_manifold()?;
        let witness = match manifold.kind() {
            FrameKind::Homogeneous(_) => Witness::Kernel,
            FrameKind::Chart(ch) if ch.scale.iter().all(|s| *s == 1.0) => match &ch.recipe {
                ChartRecipe::Flat { xi } => Witness::Flat { xi: xi.clone() },
                ChartRecipe::ProductSphere { radius, .. } => Witness::SphereProduct { radius: *radius },
                _ => Witness::Unknown,
            },
            FrameKind::Chart(_) => Witness::Unknown,
        };
        Ok(ZooEntry {
            manifold,
            expected: self.expected.clone(),
            notes: self.notes.clone(),
            witness,
            sasaki_m: self.sasaki_m,
        })
    }

    /// Parse with field paths and line/column positions in error messages.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let (line, column) = (inner.line(), inner.column());
            let text = inner.to_string();
            let what = text.strip_suffix(&format!(" at line {line} column {column}")).unwrap_or(&text);
            Error::Descriptor(format!("at `{path}` (line {line}, column {column}): {what}"))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Descriptor(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }
}
