use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INTERNAL: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const GATEWAY: u8 = 3;
    pub const PARTIAL: u8 = 4;
}

/// An error that carries its exit code through `anyhow` chains.
#[derive(Debug)]
pub struct Coded {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Coded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Coded {}

pub fn coded(code: u8, err: impl fmt::Display) -> anyhow::Error {
    anyhow::Error::new(Coded { code, message: format!("{err:#}") })
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain().find_map(|e| e.downcast_ref::<Coded>()).map_or(exit::INTERNAL, |c| c.code)
}

/// One directory per invocation, never reused.
pub struct RunDir {
    pub path: PathBuf,
}

impl RunDir {
    pub fn create(output_dir: &Path, config_hash: &str) -> Result<RunDir> {
        std::fs::create_dir_all(output_dir).with_context(|| format!("creating {}", output_dir.display()))?;
        let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
        let base = format!("{stamp}-{config_hash}");
        for n in 0u32.. {
            let name = if n == 0 { base.clone() } else { format!("{base}-{n}") };
            let path = output_dir.join(name);
            match std::fs::create_dir(&path) {
                Ok(()) => return Ok(RunDir { path }),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(e).with_context(|| format!("creating {}", path.display())),
            }
        }
        unreachable!()
    }

    pub fn sub(&self, rel: &str) -> Result<PathBuf> {
        let p = self.path.join(rel);
        std::fs::create_dir_all(&p).with_context(|| format!("creating {}", p.display()))?;
        Ok(p)
    }

    pub fn write(&self, rel: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        write_file(&self.path.join(rel), contents)
    }
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path.to_path_buf())
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

/// Recorded in every run directory. Holds no timestamp so that replay
/// runs produce identical trees.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub tool_version: &'static str,
    pub command: &'a str,
    pub config_hash: String,
    pub seeds: BTreeMap<&'static str, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    pub template_versions: BTreeMap<String, String>,
    pub config: &'a C,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_dirs_are_never_reused() {
        let dir = tempfile::tempdir().unwrap();
        let a = RunDir::create(dir.path(), "abcd1234").unwrap();
        let b = RunDir::create(dir.path(), "abcd1234").unwrap();
        assert_ne!(a.path, b.path);
        assert!(a.path.file_name().unwrap().to_str().unwrap().ends_with("abcd1234"));
    }

    #[test]
    fn codes_survive_context() {
        let e = coded(exit::GATEWAY, "replay miss").context("decompose");
        assert_eq!(exit_code(&e), exit::GATEWAY);
        assert_eq!(exit_code(&anyhow::anyhow!("plain")), exit::INTERNAL);
    }
}
