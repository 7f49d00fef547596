//! Vectors and step functions given inline as JSON or as `@path`.

use std::sync::Arc;

use lp_projection::{LpVector, MeasureSpace, StepFunction};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Reads `@path` from disk, otherwise returns the argument itself.
pub fn load_text(arg: &str) -> CliResult<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorJson {
    Pairs(Vec<(usize, f64)>),
    Dense(Vec<f64>),
}

/// `[[index, value], ...]` with 1-based indices, or a dense list `[x1, x2, ...]`.
pub fn parse_vector(arg: &str, flag: &str) -> CliResult<LpVector> {
    let text = load_text(arg)?;
    let parsed: VectorJson = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("--{flag}: expected [[index, value], ...] or [x1, x2, ...]: {e}")))?;
    match parsed {
        VectorJson::Pairs(pairs) => Ok(LpVector::from_entries(pairs)?),
        VectorJson::Dense(values) => Ok(LpVector::from_entries(
            values.into_iter().enumerate().map(|(i, v)| (i + 1, v)),
        )?),
    }
}

/// A dense list with one value per atom of `space`.
pub fn parse_function(arg: &str, flag: &str, space: &Arc<MeasureSpace>) -> CliResult<StepFunction> {
    let text = load_text(arg)?;
    let values: Vec<f64> = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("--{flag}: expected a list of atom values: {e}")))?;
    if values.len() != space.len() {
        return Err(CliError::parse(format!(
            "--{flag}: {} values for a space with {} atoms",
            values.len(),
            space.len()
        )));
    }
    Ok(StepFunction::new(space.clone(), values)?)
}

/// A built-in space such as `geo16` (atoms weighted `2^-i`).
pub fn named_space(name: &str) -> CliResult<Arc<MeasureSpace>> {
    MeasureSpace::named(name)
        .map(Arc::new)
        .ok_or_else(|| CliError::parse(format!("unknown measure space {name:?}, expected geoN")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_and_dense_agree() {
        let a = parse_vector("[[1, 3.0], [3, -1]]", "x").unwrap();
        let b = parse_vector("[3, 0, -1]", "x").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(matches!(parse_vector("[[0, 1.0]]", "x"), Err(CliError::Parse(_))));
        assert!(matches!(parse_vector("{\"a\": 1}", "x"), Err(CliError::Parse(_))));
        assert!(matches!(parse_vector("@/nonexistent/file.json", "x"), Err(CliError::Parse(_))));
    }

    #[test]
    fn function_length_must_match() {
        let space = named_space("geo4").unwrap();
        assert!(parse_function("[1, 2, 3, 4]", "f", &space).is_ok());
        assert!(matches!(parse_function("[1, 2]", "f", &space), Err(CliError::Parse(_))));
        assert!(named_space("uniform").is_err());
    }
}
