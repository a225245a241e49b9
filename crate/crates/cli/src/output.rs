//! Output files: every artifact starts with a provenance header.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub rng_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

impl Header {
    pub fn new(command: &str, config: &serde_json::Value, rng_seed: u64, reproducible: bool) -> Self {
        let canonical = serde_json::to_string(config).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let generated_unix = (!reproducible).then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        Self {
            tool: "cuelex",
            version: VERSION,
            command: command.to_string(),
            config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            rng_seed,
            generated_unix,
        }
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "cuelex {} command={} config_sha256={} rng_seed={}",
            self.version, self.command, self.config_sha256, self.rng_seed
        );
        if let Some(t) = self.generated_unix {
            s.push_str(&format!(" generated_unix={t}"));
        }
        s
    }
}

pub struct Output {
    dir: PathBuf,
    header: Header,
    written: Vec<PathBuf>,
}

fn io_failure(path: &Path, e: impl Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

impl Output {
    pub fn new(dir: PathBuf, header: Header) -> Result<Self, Failure> {
        std::fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
        Ok(Self { dir, header, written: Vec::new() })
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| io_failure(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// TSV (or CSV) with a `#` header line.
    pub fn table<F>(&mut self, name: &str, body: F) -> Result<(), Failure>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = format!("# {}\n", self.header.line()).into_bytes();
        body(&mut buf).map_err(|e| Failure::Internal(e.to_string()))?;
        self.put(name, &buf)
    }

    /// `{"meta": header, "data": value}`.
    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<(), Failure> {
        let doc = serde_json::json!({ "meta": &self.header, "data": data });
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Internal(e.to_string()))?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    /// XML document; the header goes in a comment after the declaration.
    pub fn xml(&mut self, name: &str, doc: &[u8]) -> Result<(), Failure> {
        let text = String::from_utf8_lossy(doc);
        let (decl, rest) = match text.split_once('\n') {
            Some((d, r)) if d.starts_with("<?xml") => (format!("{d}\n"), r.to_string()),
            _ => (String::new(), text.into_owned()),
        };
        let out = format!("{decl}<!-- {} -->\n{rest}", self.header.line());
        self.put(name, out.as_bytes())
    }
}

/// Reads a JSON artifact, unwrapping the `data` member when present.
pub fn read_data<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| io_failure(path, e))?;
    if value.get("meta").is_some() {
        if let Some(data) = value.get_mut("data").map(serde_json::Value::take) {
            value = data;
        }
    }
    serde_json::from_value(value).map_err(|e| io_failure(path, e))
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_failure(path, e))
}
