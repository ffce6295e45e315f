//! Report envelopes and atomic file output.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use slowfast::Model;

/// Common wrapper around every JSON report.
#[derive(Serialize)]
pub struct Envelope<R: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub model: String,
    pub eps: f64,
    pub parameters: BTreeMap<String, f64>,
    /// Every setting used, defaults included.
    pub config: Value,
    pub report: R,
}

impl<R: Serialize> Envelope<R> {
    pub fn new(command: &'static str, model: &Model, config: Value, report: R, timestamp: bool) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: timestamp.then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
            model: model.key().to_string(),
            eps: model.eps(),
            parameters: model.parameters(),
            config,
            report,
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    {
        let mut w = io::BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json<R: Serialize>(path: &Path, env: &Envelope<R>) -> io::Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, env).map_err(io::Error::other)?;
        writeln!(w)
    })
}
