//! JSON instance files.
//!
//! ```text
//! {"n_qubits": 3, "metadata": {...}, "terms": [{"support": [0, 1], "coef": -2.5e-1}, ...]}
//! ```
//!
//! Coefficients are written with 17 significant digits so a save/load cycle
//! reproduces every `f64` exactly. `metadata` is optional and free-form.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::DiagonalHamiltonian;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    support: Vec<usize>,
    coef: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    n_qubits: usize,
    #[serde(default)]
    metadata: Option<serde_json::Value>,
    terms: Vec<TermRecord>,
}

/// A loaded instance together with its metadata block.
#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub hamiltonian: DiagonalHamiltonian,
    pub metadata: Option<serde_json::Value>,
}

/// The canonical text form; identical instances serialize to identical bytes.
pub fn to_canonical_json(h: &DiagonalHamiltonian, metadata: Option<&serde_json::Value>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"n_qubits\": {},", h.n_qubits());
    if let Some(meta) = metadata {
        let _ = writeln!(out, "  \"metadata\": {},", serde_json::to_string(meta).expect("json value"));
    }
    let _ = writeln!(out, "  \"terms\": [");
    for (k, t) in h.terms().iter().enumerate() {
        let support: Vec<String> = t.support.iter().map(|q| q.to_string()).collect();
        let sep = if k + 1 == h.len() { "" } else { "," };
        let _ = writeln!(out, "    {{\"support\": [{}], \"coef\": {:.16e}}}{sep}", support.join(", "), t.coef);
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

pub fn save_instance(
    path: impl AsRef<Path>,
    h: &DiagonalHamiltonian,
    metadata: Option<&serde_json::Value>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_canonical_json(h, metadata)).map_err(|e| Error::io(path, e))
}

pub fn parse_instance(text: &str, source_name: &str) -> Result<InstanceFile> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let terms = raw.terms.into_iter().map(|t| (t.support, t.coef));
    let hamiltonian =
        DiagonalHamiltonian::new(raw.n_qubits, terms).map_err(|e| Error::invalid(format!("{source_name}: {e}")))?;
    Ok(InstanceFile { hamiltonian, metadata: raw.metadata })
}

pub fn load_instance_with_metadata(path: impl AsRef<Path>) -> Result<InstanceFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text, &path.display().to_string())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<DiagonalHamiltonian> {
    Ok(load_instance_with_metadata(path)?.hamiltonian)
}
