use std::path::{Path, PathBuf};

use dualvol::Error;
use serde::Serialize;

/// Why a command stopped. `Input` maps to exit code 1, `Property` to 2.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotSpd { .. } | Error::Positivity { .. } => Failure::Property(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

/// Files held in memory until every computation has succeeded.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifacts {
    pub fn push(&mut self, path: &Path, contents: impl Into<Vec<u8>>) {
        self.files.push((path.to_path_buf(), contents.into()));
    }

    pub fn push_json(&mut self, path: &Path, value: &impl Serialize) -> Outcome {
        self.push(path, json(value)?);
        Ok(())
    }

    pub fn write(self) -> Outcome {
        for (path, contents) in self.files {
            std::fs::write(&path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

pub fn json(value: &impl Serialize) -> Outcome<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Rows serialized as RFC-4180 CSV with a header, even when empty.
pub fn csv_rows<T: Serialize>(header: &[&str], rows: &[T]) -> Outcome<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::Input(e.to_string());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.serialize(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Failure::Input(e.to_string()))
}

/// The output's directory must already exist.
pub fn check_output(path: &Path) -> Outcome {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(Failure::Input(format!(
            "output directory {} does not exist",
            parent.display()
        )));
    }
    if path.is_dir() {
        return Err(Failure::Input(format!("output {} is a directory", path.display())));
    }
    Ok(())
}

pub fn read_mesh(path: &Path) -> Outcome<dualvol::TetMesh> {
    dualvol::mesh::read_medit(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}
