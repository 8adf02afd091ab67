//! Jupyter notebook extraction: pull code cells out of `.ipynb` JSON and
//! tokenize them as one sequence, with optional barriers between cells.

use clonequant_core::{tokenize_cells, CellBoundary, LexProfile, TokenSequence};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Returns the source of each code cell, in notebook order. Markdown and
/// raw cells contribute nothing. The notebook must be nbformat 4 or later
/// JSON with a `cells` array; a cell whose `source` is neither a string
/// nor a list of strings is an input error naming the file and cell.
pub fn notebook_code_cells(raw: &str, path_label: &str) -> Result<Vec<String>> {
    let doc: Value = serde_json::from_str(raw)
        .map_err(|e| CliError::input(format!("{path_label}: not valid notebook JSON: {e}")))?;
    match doc.get("nbformat").and_then(Value::as_u64) {
        Some(v) if v >= 4 => {}
        _ => {
            return Err(CliError::input(format!(
                "{path_label}: missing or unsupported nbformat (need 4 or later)"
            )))
        }
    }
    let cells = doc
        .get("cells")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::input(format!("{path_label}: missing \"cells\" array")))?;

    let mut out = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        if cell.get("cell_type").and_then(Value::as_str) != Some("code") {
            continue;
        }
        let source = match cell.get("source") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Array(parts)) => {
                let mut joined = String::new();
                for part in parts {
                    match part.as_str() {
                        Some(s) => joined.push_str(s),
                        None => {
                            return Err(CliError::input(format!(
                                "{path_label}: cell {i}: source list holds a non-string"
                            )))
                        }
                    }
                }
                joined
            }
            _ => {
                return Err(CliError::input(format!(
                    "{path_label}: cell {i}: source is neither a string nor a list of strings"
                )))
            }
        };
        out.push(source);
    }
    Ok(out)
}

/// Parses and tokenizes a notebook in one step.
pub fn extract_notebook(
    file_id: &str,
    raw: &str,
    boundary: CellBoundary,
) -> Result<TokenSequence> {
    let cells = notebook_code_cells(raw, file_id)?;
    let refs: Vec<&str> = cells.iter().map(String::as_str).collect();
    Ok(tokenize_cells(file_id, &refs, LexProfile::Script, boundary))
}
