//! Corpus discovery: walk a directory tree into a reproducible manifest.
//!
//! The manifest records every candidate file with its size and content
//! hash, sorted by relative path, plus everything that was skipped and
//! why. Scanning twice over an unchanged tree yields byte-identical
//! manifests, so the manifest digest identifies the input sample.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::error::{CliError, Result};

/// Default per-file size limit; bounds suffix-structure memory.
pub const DEFAULT_MAX_BYTES: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Script,
    Notebook,
    Generic,
}

/// Which files a scan takes and which frontend handles them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// `.py` files through the script tokenizer.
    Python,
    /// `.ipynb` files through the notebook extractor.
    Notebook,
    /// Every regular file through the generic tokenizer.
    Generic,
}

impl Selection {
    pub fn frontend_name(self) -> &'static str {
        match self {
            Selection::Python => "python",
            Selection::Notebook => "notebook",
            Selection::Generic => "generic",
        }
    }

    /// The file kind for a relative path, or `None` if the selection
    /// does not take it.
    pub fn classify(self, rel_path: &str) -> Option<FileKind> {
        let ext = Path::new(rel_path).extension().and_then(|e| e.to_str());
        match self {
            Selection::Python => (ext == Some("py")).then_some(FileKind::Script),
            Selection::Notebook => (ext == Some("ipynb")).then_some(FileKind::Notebook),
            Selection::Generic => Some(FileKind::Generic),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the corpus root, forward slashes on every platform.
    pub path: String,
    pub bytes: u64,
    /// Hex SHA-256 of the file content.
    pub content_hash: String,
    pub kind: FileKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub path: String,
    /// One of "duplicate-content", "too-large", "io-error".
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub version: u32,
    pub root: String,
    pub entries: Vec<ManifestEntry>,
    pub skipped: Vec<SkippedFile>,
}

impl CorpusManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Hex SHA-256 of the serialized manifest; identifies the sample.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DiscoverOptions {
    pub max_bytes: u64,
    pub dedup: bool,
}

impl Default for DiscoverOptions {
    fn default() -> DiscoverOptions {
        DiscoverOptions {
            max_bytes: DEFAULT_MAX_BYTES,
            dedup: true,
        }
    }
}

fn rel_string(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let parts: Vec<String> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    parts.join("/")
}

/// Walks `root` and builds the manifest. The root must be a readable
/// directory; everything below it that fails is recorded as skipped, not
/// fatal. Symbolic links are never followed. With dedup on, files whose
/// content hash repeats keep only the lexicographically first path.
pub fn discover_corpus(
    root: &Path,
    selection: Selection,
    opts: &DiscoverOptions,
) -> Result<CorpusManifest> {
    let meta = std::fs::metadata(root)
        .map_err(|e| CliError::input(format!("cannot read corpus root {}: {e}", root.display())))?;
    if !meta.is_dir() {
        return Err(CliError::input(format!(
            "corpus root {} is not a directory",
            root.display()
        )));
    }

    let mut candidates: Vec<(String, PathBuf)> = Vec::new();
    let mut skipped: Vec<SkippedFile> = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        match entry {
            Err(e) => {
                let path = e
                    .path()
                    .map(|p| rel_string(root, p))
                    .unwrap_or_default();
                skipped.push(SkippedFile {
                    path,
                    reason: String::from("io-error"),
                });
            }
            Ok(ent) => {
                if !ent.file_type().is_file() {
                    continue;
                }
                let rel = rel_string(root, ent.path());
                if selection.classify(&rel).is_some() {
                    candidates.push((rel, ent.path().to_path_buf()));
                }
            }
        }
    }
    candidates.sort();

    let mut entries: Vec<ManifestEntry> = Vec::new();
    let mut seen_hashes: BTreeSet<String> = BTreeSet::new();
    for (rel, abs) in candidates {
        let kind = selection.classify(&rel).expect("candidate was classified");
        match std::fs::metadata(&abs) {
            Err(_) => {
                skipped.push(SkippedFile {
                    path: rel,
                    reason: String::from("io-error"),
                });
                continue;
            }
            Ok(m) if m.len() > opts.max_bytes => {
                skipped.push(SkippedFile {
                    path: rel,
                    reason: String::from("too-large"),
                });
                continue;
            }
            Ok(_) => {}
        }
        let bytes = match std::fs::read(&abs) {
            Ok(b) => b,
            Err(_) => {
                skipped.push(SkippedFile {
                    path: rel,
                    reason: String::from("io-error"),
                });
                continue;
            }
        };
        let content_hash = hex::encode(Sha256::digest(&bytes));
        if opts.dedup && !seen_hashes.insert(content_hash.clone()) {
            skipped.push(SkippedFile {
                path: rel,
                reason: String::from("duplicate-content"),
            });
            continue;
        }
        entries.push(ManifestEntry {
            path: rel,
            bytes: bytes.len() as u64,
            content_hash,
            kind,
        });
    }
    skipped.sort_by(|a, b| (&a.path, &a.reason).cmp(&(&b.path, &b.reason)));

    Ok(CorpusManifest {
        version: 1,
        root: root.display().to_string(),
        entries,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, rel: &str, content: &str) {
        let p = dir.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).unwrap();
        }
        fs::write(p, content).unwrap();
    }

    #[test]
    fn empty_directory_gives_empty_manifest() {
        let tmp = tempfile::tempdir().unwrap();
        let m = discover_corpus(tmp.path(), Selection::Python, &DiscoverOptions::default())
            .unwrap();
        assert!(m.entries.is_empty());
        assert!(m.skipped.is_empty());
        assert_eq!(m.version, 1);
    }

    #[test]
    fn dedup_keeps_first_path_and_filters_extensions() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.py", "x = 1\n");
        write(tmp.path(), "b.py", "x = 1\n");
        write(tmp.path(), "c.txt", "x = 1\n");
        let m = discover_corpus(tmp.path(), Selection::Python, &DiscoverOptions::default())
            .unwrap();
        assert_eq!(m.entries.len(), 1);
        assert_eq!(m.entries[0].path, "a.py");
        assert_eq!(m.entries[0].kind, FileKind::Script);
        assert_eq!(
            m.skipped,
            vec![SkippedFile {
                path: String::from("b.py"),
                reason: String::from("duplicate-content"),
            }]
        );
    }

    #[test]
    fn no_dedup_keeps_identical_files() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.py", "x = 1\n");
        write(tmp.path(), "b.py", "x = 1\n");
        let opts = DiscoverOptions {
            dedup: false,
            ..DiscoverOptions::default()
        };
        let m = discover_corpus(tmp.path(), Selection::Python, &opts).unwrap();
        assert_eq!(m.entries.len(), 2);
        assert_eq!(m.entries[0].content_hash, m.entries[1].content_hash);
    }

    #[test]
    fn notebooks_sort_by_forward_slash_path() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "sub/z.ipynb", "{\"a\":1}");
        write(tmp.path(), "a.ipynb", "{\"b\":2}");
        write(tmp.path(), "sub/m.ipynb", "{\"c\":3}");
        let m = discover_corpus(tmp.path(), Selection::Notebook, &DiscoverOptions::default())
            .unwrap();
        let paths: Vec<&str> = m.entries.iter().map(|e| e.path.as_str()).collect();
        assert_eq!(paths, vec!["a.ipynb", "sub/m.ipynb", "sub/z.ipynb"]);
        assert!(m.entries.iter().all(|e| e.kind == FileKind::Notebook));
    }

    #[test]
    fn oversize_files_are_skipped_not_fatal() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "big.py", &"x".repeat(100));
        write(tmp.path(), "ok.py", "y = 2\n");
        let opts = DiscoverOptions {
            max_bytes: 50,
            ..DiscoverOptions::default()
        };
        let m = discover_corpus(tmp.path(), Selection::Python, &opts).unwrap();
        assert_eq!(m.entries.len(), 1);
        assert_eq!(m.entries[0].path, "ok.py");
        assert_eq!(m.skipped[0].reason, "too-large");
    }

    #[test]
    fn generic_selection_takes_everything() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.py", "1");
        write(tmp.path(), "b.txt", "2");
        write(tmp.path(), "noext", "3");
        let m = discover_corpus(tmp.path(), Selection::Generic, &DiscoverOptions::default())
            .unwrap();
        assert_eq!(m.entries.len(), 3);
        assert!(m.entries.iter().all(|e| e.kind == FileKind::Generic));
    }

    #[test]
    fn rediscovery_is_byte_identical() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.py", "x = 1\n");
        write(tmp.path(), "d/b.py", "y = 2\n");
        let a = discover_corpus(tmp.path(), Selection::Python, &DiscoverOptions::default())
            .unwrap();
        let b = discover_corpus(tmp.path(), Selection::Python, &DiscoverOptions::default())
            .unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.digest(), b.digest());
    }

    #[cfg(unix)]
    #[test]
    fn symlinks_are_not_followed() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "real.py", "x = 1\n");
        std::os::unix::fs::symlink(tmp.path().join("real.py"), tmp.path().join("link.py"))
            .unwrap();
        let m = discover_corpus(tmp.path(), Selection::Python, &DiscoverOptions::default())
            .unwrap();
        assert_eq!(m.entries.len(), 1);
        assert_eq!(m.entries[0].path, "real.py");
    }

    #[test]
    fn missing_root_is_a_fatal_input_error() {
        let tmp = tempfile::tempdir().unwrap();
        let err = discover_corpus(
            &tmp.path().join("no-such-dir"),
            Selection::Python,
            &DiscoverOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn manifest_roundtrips_through_json() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.py", "x = 1\n");
        let m = discover_corpus(tmp.path(), Selection::Python, &DiscoverOptions::default())
            .unwrap();
        let back: CorpusManifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
