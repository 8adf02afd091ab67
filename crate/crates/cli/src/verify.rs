//! Self-check: run the suffix-array fast paths and the brute-force
//! oracle over the same inputs and demand exact agreement. Any mismatch
//! is an internal error (exit 3), because it means the optimized
//! algorithms are wrong.

use std::path::{Path, PathBuf};

use clonequant_core::{
    clone_groups_oracle, count_duplicates, count_duplicates_oracle, find_clone_groups,
    tokenize_source, CellBoundary, CountingMode, LexProfile, Rational, ScanConfig, TokenSequence,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{discover_corpus, DiscoverOptions, FileKind, Selection};
use crate::error::{CliError, Result};
use crate::notebook::extract_notebook;

/// Random in-memory sequences checked when a seed is given.
pub const RANDOM_CASES: usize = 500;

/// Files above this token count are skipped with a warning; the oracle
/// is quadratic and meant for small inputs.
pub const MAX_FILE_TOKENS: usize = 2_000;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub input: Option<PathBuf>,
    pub selection: Selection,
    pub seed: Option<u64>,
}

fn config_grid() -> Vec<ScanConfig> {
    let mut grid = Vec::new();
    for &min_size in &[1u32, 3] {
        for &cap_ratio in &[Rational::new(1, 2), Rational::ONE] {
            for &mode in &[CountingMode::Distinct, CountingMode::Maximal] {
                grid.push(ScanConfig {
                    min_size,
                    cap_ratio,
                    mode,
                });
            }
        }
    }
    grid
}

fn check_sequence(seq: &TokenSequence, config: &ScanConfig, what: &str) -> Result<()> {
    let fast = count_duplicates(seq, config);
    let slow = count_duplicates_oracle(seq, config)
        .map_err(|e| CliError::internal(format!("{what}: oracle refused: {e}")))?;
    if fast.counts != slow.counts {
        return Err(CliError::internal(format!(
            "{what}: fast path disagrees with oracle (mode {}, min {}): fast {:?} oracle {:?}",
            config.mode, config.min_size, fast.counts, slow.counts
        )));
    }
    let fast_groups = find_clone_groups(seq, config.min_size);
    let slow_groups = clone_groups_oracle(seq, config.min_size)
        .map_err(|e| CliError::internal(format!("{what}: oracle refused: {e}")))?;
    if fast_groups != slow_groups {
        return Err(CliError::internal(format!(
            "{what}: clone groups disagree with oracle at min size {}",
            config.min_size
        )));
    }
    Ok(())
}

fn verify_random(seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = config_grid();
    for case in 0..RANDOM_CASES {
        let len = rng.gen_range(0..=200);
        let alphabet = rng.gen_range(1..=4u32);
        let symbols: Vec<u32> = (0..len).map(|_| rng.gen_range(0..alphabet)).collect();
        let seq = TokenSequence::from_symbols("random", &symbols);
        let config = &grid[case % grid.len()];
        check_sequence(&seq, config, &format!("random case {case} (seed {seed})"))?;
    }
    println!("verify: {RANDOM_CASES} random sequences match the oracle (seed {seed})");
    Ok(())
}

fn tokenize_for(kind: FileKind, path_label: &str, text: &str) -> Result<TokenSequence> {
    match kind {
        FileKind::Script => Ok(tokenize_source(path_label, text, LexProfile::Script)),
        FileKind::Generic => Ok(tokenize_source(path_label, text, LexProfile::Generic)),
        FileKind::Notebook => extract_notebook(path_label, text, CellBoundary::Barrier),
    }
}

fn forced_kind(selection: Selection) -> FileKind {
    match selection {
        Selection::Python => FileKind::Script,
        Selection::Notebook => FileKind::Notebook,
        Selection::Generic => FileKind::Generic,
    }
}

fn verify_files(input: &Path, selection: Selection) -> Result<()> {
    let meta = std::fs::metadata(input)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", input.display())))?;
    // A single file is taken as-is under the chosen frontend; a
    // directory goes through normal discovery.
    let files: Vec<(String, PathBuf, FileKind)> = if meta.is_file() {
        vec![(
            input.display().to_string(),
            input.to_path_buf(),
            forced_kind(selection),
        )]
    } else {
        let manifest = discover_corpus(
            input,
            selection,
            &DiscoverOptions {
                dedup: false,
                ..DiscoverOptions::default()
            },
        )?;
        manifest
            .entries
            .iter()
            .map(|e| {
                let abs = e.path.split('/').fold(input.to_path_buf(), |p, c| p.join(c));
                (e.path.clone(), abs, e.kind)
            })
            .collect()
    };

    let mut checked = 0usize;
    let mut skipped = 0usize;
    for (label, abs, kind) in files {
        let bytes = std::fs::read(&abs)
            .map_err(|e| CliError::input(format!("cannot read {label}: {e}")))?;
        let text = String::from_utf8_lossy(&bytes);
        let seq = tokenize_for(kind, &label, &text)?;
        if seq.len() > MAX_FILE_TOKENS {
            eprintln!(
                "verify: {label}: skipped, {} tokens is too large for the oracle (limit {})",
                seq.len(),
                MAX_FILE_TOKENS
            );
            skipped += 1;
            continue;
        }
        for config in &config_grid() {
            check_sequence(&seq, config, &label)?;
        }
        checked += 1;
    }
    println!("verify: {checked} file(s) match the oracle ({skipped} skipped as too large)");
    Ok(())
}

pub fn run_verify(opts: &VerifyOptions) -> Result<()> {
    if opts.input.is_none() && opts.seed.is_none() {
        return Err(CliError::usage(
            "verify needs --input and/or --seed to have something to check",
        ));
    }
    if let Some(seed) = opts.seed {
        verify_random(seed)?;
    }
    if let Some(input) = &opts.input {
        verify_files(input, opts.selection)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn random_verification_passes() {
        run_verify(&VerifyOptions {
            input: None,
            selection: Selection::Python,
            seed: Some(7),
        })
        .unwrap();
    }

    #[test]
    fn file_verification_passes_on_a_small_corpus() {
        let tmp = tempfile::tempdir().unwrap();
        fs::write(
            tmp.path().join("a.py"),
            "def f():\n    return 1\n\ndef g():\n    return 1\n",
        )
        .unwrap();
        fs::write(tmp.path().join("b.py"), "x = [1, 2, 3]\ny = [1, 2, 3]\n").unwrap();
        run_verify(&VerifyOptions {
            input: Some(tmp.path().to_path_buf()),
            selection: Selection::Python,
            seed: None,
        })
        .unwrap();
    }

    #[test]
    fn single_file_input_uses_the_selected_frontend() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("anything.txt");
        fs::write(&path, "a b a b a b\n").unwrap();
        run_verify(&VerifyOptions {
            input: Some(path),
            selection: Selection::Generic,
            seed: None,
        })
        .unwrap();
    }

    #[test]
    fn missing_both_inputs_is_a_usage_error() {
        let err = run_verify(&VerifyOptions {
            input: None,
            selection: Selection::Python,
            seed: None,
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
