use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fpwalk::output::CsvTable;
use fpwalk::{Error, IncrementModel, LatticeIncrement, Result};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// A distribution file: the parsed model and its canonical JSON.
pub struct LoadedDist {
    pub name: String,
    pub model: IncrementModel,
    pub json: Value,
}

impl LoadedDist {
    pub fn lattice(&self) -> Result<&LatticeIncrement> {
        self.model.as_lattice().ok_or_else(|| {
            Error::InvalidArgument(format!("{}: this command needs a lattice distribution", self.name))
        })
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

pub fn load_dist(path: &Path) -> Result<LoadedDist> {
    let text = read_text(path)?;
    let json: Value = serde_json::from_str(&text)?;
    let model = IncrementModel::from_json(&text)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dist".into());
    Ok(LoadedDist { name, model, json })
}

/// SHA-256 of the compact JSON form (object keys sorted).
pub fn config_hash(config: &Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

pub fn comment(command: &str, config: &Value) -> String {
    format!(
        "fpwalk {} {command} config_sha256={}",
        fpwalk::VERSION,
        config_hash(config)
    )
}

/// Where tables go: a directory, or stdout for the primary table only.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self { dir })
    }

    pub fn primary(&self, file: &str, table: &CsvTable) -> Result<()> {
        match &self.dir {
            Some(d) => table.write_to(fs::File::create(d.join(file))?),
            None => {
                let out = std::io::stdout();
                let mut lock = out.lock();
                table.write_to(&mut lock)?;
                lock.flush()?;
                Ok(())
            }
        }
    }

    pub fn secondary(&self, file: &str, table: &CsvTable) -> Result<()> {
        match &self.dir {
            Some(d) => table.write_to(fs::File::create(d.join(file))?),
            None => Ok(()),
        }
    }

    pub fn json(&self, file: &str, value: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        match &self.dir {
            Some(d) => fs::write(d.join(file), text)?,
            None => {
                let out = std::io::stdout();
                let mut lock = out.lock();
                lock.write_all(text.as_bytes())?;
                lock.flush()?;
            }
        }
        Ok(())
    }
}
