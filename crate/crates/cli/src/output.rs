//! Writing reports. JSON files carry an envelope with the tool version and
//! run config; CSV files carry the same as leading `#` comment lines.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use coxstab::report::{Envelope, TOOL_NAME, TOOL_VERSION};
use coxstab::{CoxError, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| CoxError::io(root, e))?;
        Ok(OutDir {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<R: Serialize>(&self, name: &str, config: &RunConfig, result: R) -> Result<PathBuf> {
        let path = self.path(name);
        let mut json = Envelope::new(config, result).stamped().to_json()?;
        json.push('\n');
        fs::write(&path, json).map_err(|e| CoxError::io(&path, e))?;
        Ok(path)
    }

    /// Writes a CSV preceded by provenance comments. `body` writes the
    /// header row and the data.
    pub fn write_csv(
        &self,
        name: &str,
        config: &RunConfig,
        body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<PathBuf> {
        let path = self.path(name);
        let write = || -> std::io::Result<()> {
            let mut out = BufWriter::new(File::create(&path)?);
            write_provenance(&mut out, config)?;
            body(&mut out)?;
            out.flush()
        };
        write().map_err(|e| CoxError::io(&path, e))?;
        Ok(path)
    }
}

pub fn write_provenance(out: &mut dyn Write, config: &RunConfig) -> std::io::Result<()> {
    let json = serde_json::to_string(config).map_err(std::io::Error::other)?;
    writeln!(out, "# {TOOL_NAME} {TOOL_VERSION}")?;
    writeln!(out, "# config: {json}")
}
