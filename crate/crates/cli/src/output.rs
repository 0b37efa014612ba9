use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Files staged in memory and written together at the end of a run: each to
/// a temporary sibling first, then renamed into place.
#[derive(Debug, Default)]
pub struct Artifacts {
    staged: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.staged.push((path, bytes));
    }

    pub fn paths(&self) -> Vec<PathBuf> {
        self.staged.iter().map(|(p, _)| p.clone()).collect()
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        let mut temps: Vec<(PathBuf, PathBuf)> = Vec::new();
        let cleanup = |temps: &[(PathBuf, PathBuf)]| {
            for (t, _) in temps {
                let _ = fs::remove_file(t);
            }
        };
        for (path, bytes) in &self.staged {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                if let Err(e) = fs::create_dir_all(dir) {
                    cleanup(&temps);
                    return Err(io(dir)(e));
                }
            }
            let mut name = path.file_name().unwrap_or_default().to_os_string();
            name.push(format!(".tmp-{}", std::process::id()));
            let tmp = path.with_file_name(name);
            if let Err(e) = fs::write(&tmp, bytes) {
                let _ = fs::remove_file(&tmp);
                cleanup(&temps);
                return Err(io(&tmp)(e));
            }
            temps.push((tmp, path.clone()));
        }
        for (i, (tmp, path)) in temps.iter().enumerate() {
            if let Err(e) = fs::rename(tmp, path) {
                cleanup(&temps[i..]);
                for (_, done) in &temps[..i] {
                    let _ = fs::remove_file(done);
                }
                return Err(io(path)(e));
            }
        }
        Ok(temps.into_iter().map(|(_, p)| p).collect())
    }
}

/// `<prefix>.<table>.<ext>`
pub fn table_path(prefix: &Path, table: &str, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(format!(".{table}.{ext}"));
    PathBuf::from(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyInfo {
    pub name: String,
    pub n: usize,
    pub bad_bound: u64,
    pub delta: String,
    pub depth: Option<u32>,
}

/// The run manifest. Keys are written in field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub command: String,
    pub family: FamilyInfo,
    pub bound: u64,
    pub places: Vec<String>,
    pub centering: Option<String>,
    pub window: Option<[f64; 2]>,
    pub seed: u64,
    pub rng: String,
    pub threads: usize,
    pub samples: Option<u64>,
    pub tainted_fraction: Option<f64>,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
    pub exit_code: i32,
    pub wall_time_seconds: f64,
    pub finished_unix_seconds: u64,
}

impl Manifest {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("manifest serializes");
        v.push(b'\n');
        v
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = fs::read(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::Read {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
    }
}
