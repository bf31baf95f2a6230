//! Deterministic output writing: RFC-4180 CSV bodies with a leading
//! provenance comment line, and JSON documents with a provenance object.
//! Floats are printed with 17 significant digits so that values round-trip.

use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

/// Identification of the run baked into every output.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    /// SHA-256 of the effective configuration JSON.
    pub config_sha256: String,
    /// Library/CLI version.
    pub version: String,
    /// Command that produced the output.
    pub command: String,
}

impl Provenance {
    /// Provenance for the current binary version.
    pub fn new(config_sha256: String, command: &str) -> Self {
        Self {
            config_sha256,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
        }
    }

    /// The CSV comment line (the body below it stays RFC-4180).
    pub fn csv_header(&self) -> String {
        format!(
            "# config_sha256={} version={} command={}\r\n",
            self.config_sha256, self.version, self.command
        )
    }
}

/// 17-significant-digit scientific form with a dot decimal separator.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Assemble a CSV document: provenance comment, header record, data records,
/// CRLF line endings throughout.
pub fn csv_document(prov: &Provenance, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&prov.csv_header());
    out.push_str(&header.join(","));
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&row.join(","));
        out.push_str("\r\n");
    }
    out
}

/// Serialize a JSON payload with its provenance, pretty-printed with stable
/// key order (struct declaration order).
pub fn json_document<T: Serialize>(prov: &Provenance, payload: &T) -> String {
    #[derive(Serialize)]
    struct Doc<'a, T: Serialize> {
        provenance: &'a Provenance,
        #[serde(flatten)]
        payload: &'a T,
    }
    let mut text = serde_json::to_string_pretty(&Doc {
        provenance: prov,
        payload,
    })
    .expect("payload serializes");
    text.push('\n');
    text
}

/// Write to the path, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            fs::write(p, content)
        }
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}
