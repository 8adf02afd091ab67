//! The scan pipeline: discover a corpus, tokenize and count duplicates
//! per file in parallel, and stream profiles to JSON Lines.
//!
//! Output order always equals manifest order and the bytes are
//! independent of the worker count: files are processed in fixed-size
//! chunks whose results are collected in order before writing.

use std::io::Write;
use std::path::{Path, PathBuf};

use clonequant_core::{count_duplicates, tokenize_source, CellBoundary, LexProfile, ScanConfig};
use rayon::prelude::*;

use crate::corpus::{discover_corpus, CorpusManifest, DiscoverOptions, FileKind, ManifestEntry, Selection};
use crate::error::{CliError, Result};
use crate::formats::{ErrorRecord, ProfileRecord, ProfilesHeader};
use crate::notebook::extract_notebook;

/// Files per parallel batch; bounds in-flight memory while keeping the
/// pool busy.
const CHUNK: usize = 256;

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub selection: Selection,
    pub input: PathBuf,
    pub out: PathBuf,
    pub config: ScanConfig,
    pub cell_boundary: CellBoundary,
    pub discover: DiscoverOptions,
    /// Worker threads; 0 means one per logical core.
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanSummary {
    pub scanned: usize,
    /// Files that produced an error record instead of a profile.
    pub failed: usize,
    /// Files skipped during discovery because they were unreadable.
    pub skipped_io: usize,
    /// Files skipped as duplicates or oversize.
    pub skipped_benign: usize,
}

fn entry_abs_path(root: &Path, rel: &str) -> PathBuf {
    rel.split('/').fold(root.to_path_buf(), |p, c| p.join(c))
}

fn process_entry(
    root: &Path,
    entry: &ManifestEntry,
    config: &ScanConfig,
    boundary: CellBoundary,
) -> std::result::Result<ProfileRecord, ErrorRecord> {
    let fail = |error: String| ErrorRecord {
        path: entry.path.clone(),
        error,
    };
    let bytes = std::fs::read(entry_abs_path(root, &entry.path))
        .map_err(|e| fail(format!("read failed: {e}")))?;
    let text = String::from_utf8_lossy(&bytes);
    let seq = match entry.kind {
        FileKind::Script => tokenize_source(&entry.path, &text, LexProfile::Script),
        FileKind::Generic => tokenize_source(&entry.path, &text, LexProfile::Generic),
        FileKind::Notebook => {
            extract_notebook(&entry.path, &text, boundary).map_err(|e| fail(e.to_string()))?
        }
    };
    let profile = count_duplicates(&seq, config);
    Ok(ProfileRecord::from_profile(&profile, &entry.content_hash))
}

/// Runs a full scan and returns what happened; per-file failures are in
/// the output file and on standard error, never fatal.
pub fn run_scan(opts: &ScanOptions) -> Result<ScanSummary> {
    if !opts.config.is_valid() {
        return Err(CliError::usage(format!(
            "invalid scan config: min size {} and cap ratio {} (need min >= 1, 0 < ratio <= 1)",
            opts.config.min_size, opts.config.cap_ratio
        )));
    }
    let manifest = discover_corpus(&opts.input, opts.selection, &opts.discover)?;
    let digest = manifest.digest();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| CliError::internal(format!("cannot build worker pool: {e}")))?;

    let file = std::fs::File::create(&opts.out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", opts.out.display())))?;
    let mut out = std::io::BufWriter::new(file);
    let write_err =
        |e: std::io::Error| CliError::input(format!("cannot write {}: {e}", opts.out.display()));

    let header = ProfilesHeader::new(opts.selection.frontend_name(), &digest, &opts.config);
    let header_line = serde_json::to_string(&header).expect("header serializes");
    writeln!(out, "{header_line}").map_err(write_err)?;

    let root = opts.input.as_path();
    let mut scanned = 0usize;
    let mut failed = 0usize;
    for chunk in manifest.entries.chunks(CHUNK) {
        let results: Vec<std::result::Result<ProfileRecord, ErrorRecord>> = pool.install(|| {
            chunk
                .par_iter()
                .map(|entry| process_entry(root, entry, &opts.config, opts.cell_boundary))
                .collect()
        });
        for result in results {
            scanned += 1;
            let line = match &result {
                Ok(rec) => serde_json::to_string(rec).expect("record serializes"),
                Err(rec) => {
                    failed += 1;
                    eprintln!("scan: {}: {}", rec.path, rec.error);
                    serde_json::to_string(rec).expect("record serializes")
                }
            };
            writeln!(out, "{line}").map_err(write_err)?;
        }
    }
    out.flush().map_err(write_err)?;

    let summary = summarize(&manifest, scanned, failed);
    for skip in &manifest.skipped {
        if skip.reason == "io-error" {
            eprintln!("scan: {}: skipped ({})", skip.path, skip.reason);
        }
    }
    eprintln!(
        "scan: {} file(s) profiled, {} failed, {} skipped ({} unreadable)",
        summary.scanned - summary.failed,
        summary.failed,
        summary.skipped_benign + summary.skipped_io,
        summary.skipped_io
    );
    Ok(summary)
}

fn summarize(manifest: &CorpusManifest, scanned: usize, failed: usize) -> ScanSummary {
    let skipped_io = manifest
        .skipped
        .iter()
        .filter(|s| s.reason == "io-error")
        .count();
    ScanSummary {
        scanned,
        failed,
        skipped_io,
        skipped_benign: manifest.skipped.len() - skipped_io,
    }
}
