//! Versioned JSON documents for curvature tensors and counterexamples.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvature::AlgebraicCurvature;
use crate::error::{Error, Result};
use crate::models::{build, ModelSpec};
use crate::tensor_space::Dim;

pub const SCHEMA: &str = "curvature2k/1";
pub const BASIS: &str = "lex-wedge2";
pub const CONVENTION: &str = "matrix[(ij)][(kl)] = R_ijkl over pairs i<j in lexicographic order, \
indices 0-based; sectional(i,j) = R_ijij; the unit sphere has matrix = Id";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub schema: String,
    pub n: usize,
    pub basis: String,
    pub convention: String,
    pub matrix: Vec<Vec<f64>>,
}

impl TensorFile {
    pub fn from_curvature(r: &AlgebraicCurvature) -> Self {
        let m = r.matrix();
        TensorFile {
            schema: SCHEMA.to_string(),
            n: r.n(),
            basis: BASIS.to_string(),
            convention: CONVENTION.to_string(),
            matrix: (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect(),
        }
    }

    /// Validates header fields, shape, symmetry and the Bianchi identity.
    pub fn to_curvature(&self) -> std::result::Result<AlgebraicCurvature, String> {
        if self.schema != SCHEMA {
            return Err(format!(
                "unsupported schema `{}` (expected `{SCHEMA}`)",
                self.schema
            ));
        }
        if self.basis != BASIS {
            return Err(format!(
                "unsupported basis `{}` (expected `{BASIS}`)",
                self.basis
            ));
        }
        let dim = Dim::new(self.n).map_err(|e| e.to_string())?;
        let k = dim.wedge2_dim();
        if self.matrix.len() != k || self.matrix.iter().any(|row| row.len() != k) {
            return Err(format!("matrix must be {k}x{k} for n = {}", self.n));
        }
        if self.matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err("matrix has non-finite entries".to_string());
        }
        let m = DMatrix::from_fn(k, k, |i, j| self.matrix[i][j]);
        let r = AlgebraicCurvature::new(dim, m).map_err(|e| e.to_string())?;
        let bianchi = r.bianchi_residual();
        if bianchi > crate::tol::IDENTITY * r.matrix().amax().max(1.0) {
            return Err(format!(
                "first Bianchi identity fails (residual {bianchi:e})"
            ));
        }
        Ok(r)
    }
}

fn file_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::TensorFile {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

pub fn read_tensor(path: &Path) -> Result<AlgebraicCurvature> {
    let text = std::fs::read_to_string(path).map_err(|e| file_err(path, e.to_string()))?;
    let doc: TensorFile = serde_json::from_str(&text).map_err(|e| file_err(path, e.to_string()))?;
    doc.to_curvature().map_err(|reason| file_err(path, reason))
}

pub fn write_tensor(path: &Path, r: &AlgebraicCurvature) -> Result<()> {
    write_json(path, &TensorFile::from_curvature(r))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// A tensor violating a conditional claim, with enough context to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counterexample {
    pub schema: String,
    pub claim: String,
    pub seed: u64,
    pub index: u64,
    pub margins: BTreeMap<String, f64>,
    pub tensor: TensorFile,
}

impl Counterexample {
    pub fn new(
        claim: &str,
        seed: u64,
        index: u64,
        margins: BTreeMap<String, f64>,
        r: &AlgebraicCurvature,
    ) -> Self {
        Counterexample {
            schema: SCHEMA.to_string(),
            claim: claim.to_string(),
            seed,
            index,
            margins,
            tensor: TensorFile::from_curvature(r),
        }
    }
}

pub fn read_counterexample(path: &Path) -> Result<Counterexample> {
    let text = std::fs::read_to_string(path).map_err(|e| file_err(path, e.to_string()))?;
    let doc: Counterexample =
        serde_json::from_str(&text).map_err(|e| file_err(path, e.to_string()))?;
    if doc.schema != SCHEMA {
        return Err(file_err(
            path,
            format!("unsupported schema `{}`", doc.schema),
        ));
    }
    doc.tensor
        .to_curvature()
        .map_err(|reason| file_err(path, reason))?;
    Ok(doc)
}

/// Where a command takes its curvature tensor from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TensorSource {
    Model(ModelSpec),
    File(String),
}

impl TensorSource {
    /// Accepts `kind:key=value,...` (e.g. `cylinder:n=4`, `cp_fubini_study:m=2`)
    /// or a path to a tensor file.
    pub fn parse(text: &str) -> Result<Self> {
        if text.ends_with(".json") || Path::new(text).is_file() {
            return Ok(TensorSource::File(text.to_string()));
        }
        parse_model(text).map(TensorSource::Model)
    }

    pub fn load(&self) -> Result<AlgebraicCurvature> {
        match self {
            TensorSource::Model(spec) => build(spec),
            TensorSource::File(path) => read_tensor(Path::new(path)),
        }
    }

    pub fn model(&self) -> Option<&ModelSpec> {
        match self {
            TensorSource::Model(spec) => Some(spec),
            TensorSource::File(_) => None,
        }
    }
}

/// Parses `kind:key=value,...`; omitted curvature constants default to the
/// normalizations `kappa = 1`, `c = 4`.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut fields: BTreeMap<&str, f64> = BTreeMap::new();
    for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("model field `{item}` is not key=value")))?;
        let value: f64 = value.trim().parse().map_err(|_| {
            Error::Config(format!(
                "model field `{key}` has non-numeric value `{value}`"
            ))
        })?;
        fields.insert(key.trim(), value);
    }
    let int = |key: &str| -> Result<usize> {
        let v = *fields
            .get(key)
            .ok_or_else(|| Error::Config(format!("model `{kind}` needs `{key}`")))?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Config(format!(
                "`{key}` must be a non-negative integer, got {v}"
            )));
        }
        Ok(v as usize)
    };
    let real = |key: &str, default: f64| fields.get(key).copied().unwrap_or(default);
    let known: &[&str] = match kind {
        "sphere" => &["n", "kappa"],
        "cylinder" | "flat" => &["n"],
        "sphere_product" => &["n", "k", "kappa1", "kappa2"],
        "cp_fubini_study" => &["m", "c"],
        "cp_product" => &["m", "k", "c"],
        _ => return Err(Error::Config(format!("unknown model kind `{kind}`"))),
    };
    if let Some(extra) = fields.keys().find(|k| !known.contains(k)) {
        return Err(Error::Config(format!(
            "model `{kind}` has no field `{extra}`"
        )));
    }
    let spec = match kind {
        "sphere" => ModelSpec::Sphere {
            n: int("n")?,
            kappa: real("kappa", 1.0),
        },
        "cylinder" => ModelSpec::Cylinder { n: int("n")? },
        "flat" => ModelSpec::Flat { n: int("n")? },
        "sphere_product" => ModelSpec::SphereProduct {
            n: int("n")?,
            k: int("k")?,
            kappa1: real("kappa1", 1.0),
            kappa2: real("kappa2", 1.0),
        },
        "cp_fubini_study" => ModelSpec::CpFubiniStudy {
            m: int("m")?,
            c: real("c", 4.0),
        },
        _ => ModelSpec::CpProduct {
            m: int("m")?,
            k: int("k")?,
            c: real("c", 4.0),
        },
    };
    spec.validate()?;
    Ok(spec)
}
