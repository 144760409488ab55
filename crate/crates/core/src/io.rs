// SPDX-License-Identifier: Apache-2.0
//! Output file plumbing: atomic replacement and reproducibility stamps.

use std::io::Write;
use std::path::Path;

pub const TOOL_NAME: &str = "pbitsim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One `#`-prefixed line identifying the tool version, subcommand and seed.
pub fn stamp_line(subcommand: &str, seed: Option<u64>) -> String {
    match seed {
        Some(s) => format!("# {TOOL_NAME} {TOOL_VERSION} {subcommand} seed={s}\n"),
        None => format!("# {TOOL_NAME} {TOOL_VERSION} {subcommand}\n"),
    }
}

/// Writes `bytes` to a temporary file beside `path` and renames it into
/// place, so a failed run never leaves a truncated output behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stamp_mentions_seed() {
        let line = stamp_line("sweep", Some(7));
        assert!(line.starts_with("# pbitsim "));
        assert!(line.ends_with("sweep seed=7\n"));
        assert!(!stamp_line("analyze", None).contains("seed"));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"first").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
