//! The `regmap-v1` map file format and certificate documents.
//!
//! Map files are single-line JSON objects with keys in the fixed order
//! `format`, `darts`, `x`, `y`, `label` (label omitted when absent), no
//! whitespace, and a trailing newline. Emitting the same map always yields
//! the same bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::map::{MapError, OrientedMap};
use crate::perm::Perm;

pub const MAP_FORMAT: &str = "regmap-v1";
pub const CERT_FORMAT: &str = "regmap-cert-v1";
pub const CERT_BATCH_FORMAT: &str = "regmap-cert-batch-v1";

/// Product maps above this many darts are written to a side file.
pub const INLINE_DART_LIMIT: usize = 200_000;

#[derive(Debug, Error)]
pub enum MapFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON syntax error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error in field \"{field}\": {reason}")]
    Schema { field: String, reason: String },
    #[error("map does not validate: {0}")]
    Validation(#[from] MapError),
    #[error("digest mismatch for {path}: recorded {recorded}, actual {actual}")]
    Digest {
        path: String,
        recorded: String,
        actual: String,
    },
}

impl MapFileError {
    fn schema(field: impl Into<String>, reason: impl Into<String>) -> MapFileError {
        MapFileError::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

fn image_array(obj: &Map<String, Value>, field: &str, d: usize) -> Result<Vec<u32>, MapFileError> {
    let arr = obj
        .get(field)
        .ok_or_else(|| MapFileError::schema(field, "missing"))?
        .as_array()
        .ok_or_else(|| MapFileError::schema(field, "not an array"))?;
    if arr.len() != d {
        return Err(MapFileError::schema(
            field,
            format!("has length {}, expected darts = {d}", arr.len()),
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_u64()
                .filter(|&a| a < d as u64)
                .map(|a| a as u32)
                .ok_or_else(|| MapFileError::schema(field, format!("entry {i} is not a dart index below {d}")))
        })
        .collect()
}

pub fn map_from_value(v: &Value) -> Result<OrientedMap, MapFileError> {
    let obj = v
        .as_object()
        .ok_or_else(|| MapFileError::schema("$", "top level is not an object"))?;
    match obj.get("format") {
        Some(Value::String(f)) if f == MAP_FORMAT => {}
        Some(other) => {
            return Err(MapFileError::schema(
                "format",
                format!("expected \"{MAP_FORMAT}\", found {other}"),
            ))
        }
        None => return Err(MapFileError::schema("format", "missing")),
    }
    for key in obj.keys() {
        if !matches!(key.as_str(), "format" | "darts" | "x" | "y" | "label") {
            return Err(MapFileError::schema(key.as_str(), "unknown field"));
        }
    }
    let d = obj
        .get("darts")
        .ok_or_else(|| MapFileError::schema("darts", "missing"))?
        .as_u64()
        .filter(|&d| d >= 1 && d <= u32::MAX as u64)
        .ok_or_else(|| MapFileError::schema("darts", "not a positive integer"))? as usize;
    let x = image_array(obj, "x", d)?;
    let y = image_array(obj, "y", d)?;
    let label = match obj.get("label") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(MapFileError::schema("label", "not a string")),
    };
    let x = Perm::from_images(x).map_err(|e| MapFileError::schema("x", e.to_string()))?;
    let y = Perm::from_images(y).map_err(|e| MapFileError::schema("y", e.to_string()))?;
    let map = OrientedMap::validate(d, x, y)?;
    Ok(match label {
        Some(l) => map.with_label(l),
        None => map,
    })
}

pub fn parse_map_str(text: &str) -> Result<OrientedMap, MapFileError> {
    let v: Value = serde_json::from_str(text)?;
    map_from_value(&v)
}

pub fn parse_map(path: &Path) -> Result<OrientedMap, MapFileError> {
    let text = fs::read_to_string(path).map_err(|source| MapFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_map_str(&text)
}

fn push_array(out: &mut String, images: &[u32]) {
    out.push('[');
    for (i, a) in images.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{a}").expect("write to String");
    }
    out.push(']');
}

/// Canonical single-line serialization, newline-terminated.
pub fn emit_map_string(m: &OrientedMap) -> String {
    let mut out = String::with_capacity(16 * m.darts() + 64);
    write!(out, "{{\"format\":\"{MAP_FORMAT}\",\"darts\":{},\"x\":", m.darts()).expect("write to String");
    push_array(&mut out, m.x().images());
    out.push_str(",\"y\":");
    push_array(&mut out, m.y().images());
    if let Some(label) = m.label() {
        out.push_str(",\"label\":");
        out.push_str(&serde_json::to_string(label).expect("string serializes"));
    }
    out.push_str("}\n");
    out
}

pub fn emit_map(m: &OrientedMap, path: &Path) -> Result<(), MapFileError> {
    fs::write(path, emit_map_string(m)).map_err(|source| MapFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// The map as a JSON value with the same shape as a map file.
pub fn map_to_value(m: &OrientedMap) -> Value {
    serde_json::from_str(&emit_map_string(m)).expect("canonical map text is JSON")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Where a certificate's product map lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapStorage {
    Inline,
    /// Side file, relative to the certificate's directory.
    External(PathBuf),
}

/// Either an inline map object or `{"file", "sha256", "darts"}`; in the
/// latter case the side file is read relative to `base_dir` and its digest
/// checked.
pub fn map_from_stored_value(v: &Value, base_dir: &Path) -> Result<OrientedMap, MapFileError> {
    let Some(obj) = v.as_object() else {
        return Err(MapFileError::schema("$", "map entry is not an object"));
    };
    if obj.contains_key("format") {
        return map_from_value(v);
    }
    let file = obj
        .get("file")
        .and_then(Value::as_str)
        .ok_or_else(|| MapFileError::schema("file", "missing external map reference"))?;
    let recorded = obj
        .get("sha256")
        .and_then(Value::as_str)
        .ok_or_else(|| MapFileError::schema("sha256", "missing"))?;
    let path = base_dir.join(file);
    let bytes = fs::read(&path).map_err(|source| MapFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let actual = sha256_hex(&bytes);
    if actual != recorded {
        return Err(MapFileError::Digest {
            path: path.display().to_string(),
            recorded: recorded.to_string(),
            actual,
        });
    }
    let text = String::from_utf8(bytes).map_err(|e| MapFileError::schema("file", e.to_string()))?;
    parse_map_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::torus_map_44;

    #[test]
    fn emit_is_canonical() {
        let m = torus_map_44(1, 0).unwrap().without_label();
        let s = emit_map_string(&m);
        assert!(s.starts_with("{\"format\":\"regmap-v1\",\"darts\":4,\"x\":["));
        assert!(s.ends_with("]}\n"));
        assert!(!s.contains(' '));
        assert!(!s.contains("label"));
        let back = parse_map_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn wrong_length_names_field() {
        let text = r#"{"format":"regmap-v1","darts":4,"x":[1,2,3],"y":[0,1,2,3]}"#;
        match parse_map_str(text) {
            Err(MapFileError::Schema { field, .. }) => assert_eq!(field, "x"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_regular_is_a_validation_error() {
        let text = r#"{"format":"regmap-v1","darts":3,"x":[1,2,0],"y":[1,0,2]}"#;
        assert!(matches!(
            parse_map_str(text),
            Err(MapFileError::Validation(MapError::NotRegular(_)))
        ));
    }

    #[test]
    fn syntax_and_format_errors() {
        assert!(matches!(parse_map_str("{"), Err(MapFileError::Json(_))));
        assert!(matches!(
            parse_map_str(r#"{"format":"other","darts":1,"x":[0],"y":[0]}"#),
            Err(MapFileError::Schema { .. })
        ));
        assert!(matches!(
            parse_map_str(r#"{"format":"regmap-v1","darts":2,"x":[0,0],"y":[1,0]}"#),
            Err(MapFileError::Schema { .. })
        ));
    }

    #[test]
    fn labels_are_escaped() {
        let m = torus_map_44(1, 0).unwrap().with_label("a \"quoted\" λ");
        let back = parse_map_str(&emit_map_string(&m)).unwrap();
        assert_eq!(back.label(), Some("a \"quoted\" λ"));
    }
}
