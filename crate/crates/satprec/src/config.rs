use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::CliError;

/// Reads a TOML or JSON config, chosen by file extension.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text).map_err(|e| bad(e.to_string())),
        Some("json") => serde_json::from_str(&text).map_err(|e| bad(e.to_string())),
        _ => Err(bad("expected a .toml or .json file".into())),
    }
}
