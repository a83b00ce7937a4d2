use std::path::Path;

use thiserror::Error;

use crate::canonical::{canonicalize, CanonicalError};
use crate::model::{JsonError, NormalizedInstance};
use crate::mps::{read_mps_file, MpsError};
use crate::normalize::{normalize, NormalizeError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Mps { path: String, source: MpsError },
    #[error("{path}: {source}")]
    Canonical { path: String, source: CanonicalError },
    #[error("{path}: {source}")]
    Normalize { path: String, source: NormalizeError },
    #[error("{path}: {source}")]
    Json { path: String, source: JsonError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Reads an MPS file (optionally gzipped) and normalizes it, or reads a
/// cached normalized instance when the path ends in `.json`.
pub fn load_instance(path: impl AsRef<Path>) -> Result<NormalizedInstance, LoadError> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
        return NormalizedInstance::from_json(&text).map_err(|source| LoadError::Json { path: shown, source });
    }
    let raw = read_mps_file(path).map_err(|source| LoadError::Mps { path: shown.clone(), source })?;
    let canonical = canonicalize(&raw).map_err(|source| LoadError::Canonical { path: shown.clone(), source })?;
    normalize(&canonical).map_err(|source| LoadError::Normalize { path: shown, source })
}
