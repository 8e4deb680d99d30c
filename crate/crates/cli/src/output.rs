use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level JSON document: schema version and command name, then the
/// command's payload fields.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    #[serde(flatten)]
    pub payload: T,
}

pub fn to_json<T: Serialize>(command: &str, payload: T) -> Result<String> {
    let doc = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        payload,
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// Fails if any of `paths` exists and `force` is off.
pub fn ensure_writable(paths: &[&Path], force: bool) -> Result<()> {
    if force {
        return Ok(());
    }
    for p in paths {
        if p.exists() {
            bail!("{} already exists; pass --force to overwrite", p.display());
        }
    }
    Ok(())
}

pub fn write_file(path: &Path, contents: &str, force: bool) -> Result<()> {
    let mut opts = OpenOptions::new();
    opts.write(true);
    if force {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    let mut f = opts.open(path).with_context(|| {
        if !force && path.exists() {
            format!("{} already exists; pass --force to overwrite", path.display())
        } else {
            format!("cannot open {}", path.display())
        }
    })?;
    f.write_all(contents.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Writes to `out` if given, else to stdout.
pub fn emit(out: Option<&Path>, contents: &str, force: bool) -> Result<()> {
    match out {
        Some(p) => write_file(p, contents, force),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

/// `hist.csv` → `hist.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}
