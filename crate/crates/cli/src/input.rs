//! Readers for CSV panels, inline or file vectors and JSON experiment specs.

use std::fs;
use std::path::Path;

use logcone::cone::{MAX_COMPONENT, MIN_COMPONENT};
use serde::de::DeserializeOwned;
use serde_path_to_error::Segment;

use crate::error::{CliError, CliResult};

/// A rectangular CSV table with a header row of labels.
#[derive(Debug, Clone)]
pub struct Panel {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Panel {
    /// Resolves a column by label, falling back to a 1-based index.
    pub fn column_index(&self, name: &str) -> CliResult<usize> {
        if let Some(i) = self.labels.iter().position(|l| l == name) {
            return Ok(i);
        }
        match name.parse::<usize>() {
            Ok(i) if (1..=self.labels.len()).contains(&i) => Ok(i - 1),
            _ => Err(CliError::parse(format!(
                "no column named '{name}' (labels: {})",
                self.labels.join(", ")
            ))),
        }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

fn parse_number(field: &str) -> Result<f64, String> {
    let value: f64 = field
        .parse()
        .map_err(|_| format!("cannot parse '{field}' as a decimal number"))?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{field}' is not a finite number"))
    }
}

fn is_positive(value: f64) -> bool {
    (MIN_COMPONENT..=MAX_COMPONENT).contains(&value)
}

pub fn read_panel(path: &Path) -> CliResult<Panel> {
    let shown = path.display();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::parse(format!("{shown}: {e}")))?;
    let labels: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::parse(format!("{shown}: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if labels.iter().all(String::is_empty) {
        return Err(CliError::parse(format!("{shown}: missing header row")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::parse(format!("{shown}: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(record.len());
        for (c, field) in record.iter().enumerate() {
            let value = parse_number(field)
                .map_err(|m| CliError::parse(format!("{shown}: line {line}, column {}: {m}", c + 1)))?;
            if !is_positive(value) {
                return Err(CliError::not_positive(format!(
                    "{shown}: line {line}, column {} ({}): value {value} is not strictly positive",
                    c + 1,
                    labels[c]
                )));
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::parse(format!("{shown}: no data rows")));
    }
    Ok(Panel { labels, rows })
}

fn parse_vector(text: &str, origin: &str) -> CliResult<Vec<f64>> {
    let mut values = Vec::new();
    for (i, field) in text.split(',').enumerate() {
        let value = parse_number(field.trim())
            .map_err(|m| CliError::parse(format!("{origin}, component {}: {m}", i + 1)))?;
        if !is_positive(value) {
            return Err(CliError::not_positive(format!(
                "{origin}, component {}: value {value} is not strictly positive",
                i + 1
            )));
        }
        values.push(value);
    }
    Ok(values)
}

/// Reads `1.5,2,3` inline, or `@path` for a file with one comma-separated
/// vector per non-empty line.
pub fn read_vectors(arg: &str) -> CliResult<Vec<Vec<f64>>> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::parse(format!("{path}: {e}")))?;
            let vectors = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(n, l)| parse_vector(l, &format!("{path}: line {}", n + 1)))
                .collect::<CliResult<Vec<_>>>()?;
            if vectors.is_empty() {
                return Err(CliError::parse(format!("{path}: no vectors")));
            }
            Ok(vectors)
        }
        None => Ok(vec![parse_vector(arg, "argument")?]),
    }
}

/// Exactly one vector from an inline or file argument.
pub fn read_vector(arg: &str) -> CliResult<Vec<f64>> {
    let mut vectors = read_vectors(arg)?;
    if vectors.len() != 1 {
        return Err(CliError::parse(format!("{arg}: expected one vector, found {}", vectors.len())));
    }
    Ok(vectors.remove(0))
}

/// RFC 6901 pointer of a deserialization path.
pub fn json_pointer(path: &serde_path_to_error::Path) -> String {
    let mut pointer = String::new();
    for segment in path.iter() {
        match segment {
            Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                pointer.push('/');
                pointer.push_str(&key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    pointer
}

pub fn schema_error(path: &Path, pointer: &str, message: impl std::fmt::Display) -> CliError {
    CliError::parse(format!("{}: schema error at \"{pointer}\": {message}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer = json_pointer(e.path());
        schema_error(path, &pointer, e.into_inner())
    })?;
    de.end().map_err(|e| schema_error(path, "", e))?;
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_vectors() {
        assert_eq!(read_vector("1, 2.5,3e2").unwrap(), vec![1.0, 2.5, 300.0]);
        assert_eq!(read_vector("1,0").unwrap_err().code, 3);
        assert_eq!(read_vector("1,x").unwrap_err().code, 2);
        assert_eq!(read_vector("1,inf").unwrap_err().code, 2);
    }

    #[test]
    fn pointer_escaping() {
        #[derive(serde::Deserialize, Debug)]
        #[allow(dead_code)]
        struct Inner {
            v: Vec<f64>,
        }
        let text = r#"{"a/b": {"v": [1.0, "x"]}}"#;
        let mut de = serde_json::Deserializer::from_str(text);
        let err = serde_path_to_error::deserialize::<_, std::collections::BTreeMap<String, Inner>>(&mut de).unwrap_err();
        assert_eq!(json_pointer(err.path()), "/a~1b/v/1");
    }
}
