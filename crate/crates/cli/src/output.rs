use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// A file produced by a command, held in memory until every output of the
/// run is ready.
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl OutputFile {
    pub fn json<T: Serialize>(name: &str, value: &T) -> Result<Self, CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
        bytes.push(b'\n');
        Ok(Self {
            name: name.to_string(),
            bytes,
        })
    }

    pub fn csv<T: Serialize>(name: &str, rows: impl IntoIterator<Item = T>) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in rows {
            writer.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
        }
        let bytes = writer.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        Ok(Self {
            name: name.to_string(),
            bytes,
        })
    }
}

/// Writes each file through a temporary file in `dir` and a rename.
pub fn write_all(dir: &Path, files: &[OutputFile]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    for f in files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Output(e.to_string()))?;
        tmp.write_all(&f.bytes).map_err(|e| CliError::Output(e.to_string()))?;
        tmp.persist(dir.join(&f.name))
            .map_err(|e| CliError::Output(format!("{}: {}", f.name, e.error)))?;
    }
    Ok(())
}
