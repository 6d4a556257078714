//! Output directory: the certificate bundle (JSON) and tab-separated tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use transdeg::certifier::Certificate;

use crate::config::ConfigEcho;
use crate::exit::{CliError, Exit};

/// Version tag of the bundle layout.
pub const BUNDLE_SCHEMA: &str = "transdeg-bundle/1";

pub struct Output {
    dir: PathBuf,
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(CliError::io)?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    /// Writes a table; with `echo` it is also printed to stdout.
    pub fn table(&self, name: &str, header: &[&str], rows: &[Vec<String>], echo: bool) -> Result<(), CliError> {
        let mut text = header.join("\t");
        text.push('\n');
        for r in rows {
            text.push_str(&r.join("\t"));
            text.push('\n');
        }
        if echo {
            print!("{text}");
        }
        fs::write(self.dir.join(name), text).map_err(CliError::io)
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("output serializes");
        fs::write(self.dir.join(name), text + "\n").map_err(CliError::io)
    }

    /// `certificates.json`: configuration echo, exit code, certificates and
    /// command-specific data. Written on success and on failure alike.
    pub fn bundle(
        &self,
        command: &str,
        config: &ConfigEcho,
        exit: Exit,
        certificates: &[Certificate],
        extra: Value,
        error: Option<&str>,
    ) -> Result<(), CliError> {
        let doc = json!({
            "schema": BUNDLE_SCHEMA,
            "command": command,
            "config": config,
            "exit_code": exit.code(),
            "error": error,
            "certificates": certificates,
            "data": extra,
        });
        self.json("certificates.json", &doc)
    }
}
