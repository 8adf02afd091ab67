//! Brute-force reference counting.
//!
//! Materializes every window of every size into a content-keyed multiset
//! and counts classes with at least two members. Quadratic-and-worse by
//! design: it exists so the suffix-structure fast path has something
//! independent to be checked against, both in tests and via the `verify`
//! command. Inputs are capped at [`ORACLE_MAX_TOKENS`] tokens.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::cloneindex::{CloneGroup, CountingMode, DuplicateProfile, ScanConfig};
use crate::token::TokenSequence;

/// Refusal threshold for the brute-force paths.
pub const ORACLE_MAX_TOKENS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    SequenceTooLarge { len: usize, max: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::SequenceTooLarge { len, max } => {
                write!(f, "sequence of {len} tokens exceeds the oracle cap of {max}")
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// Reference implementation of duplicate counting.
pub fn count_duplicates_oracle(
    seq: &TokenSequence,
    config: &ScanConfig,
) -> Result<DuplicateProfile, OracleError> {
    config.assert_valid();
    let sym = seq.symbols();
    let n = sym.len();
    if n > ORACLE_MAX_TOKENS {
        return Err(OracleError::SequenceTooLarge {
            len: n,
            max: ORACLE_MAX_TOKENS,
        });
    }
    let lo = config.min_size as usize;
    let hi = (config.size_cap(n) as usize).min(n.saturating_sub(1));
    let mut counts = BTreeMap::new();
    if lo <= hi {
        for s in lo..=hi {
            let size_count = match config.mode {
                CountingMode::Distinct => distinct_at(sym, s),
                CountingMode::Maximal => maximal_at(sym, s).len() as u64,
            };
            if size_count > 0 {
                counts.insert(s as u32, size_count);
            }
        }
    }
    Ok(DuplicateProfile {
        file_id: String::from(seq.file_id()),
        token_count: n as u64,
        counts,
        config: config.clone(),
    })
}

/// Reference clone-group enumeration: every maximal repeat of length at
/// least `min_size` with its full occurrence set, in the same order as
/// `find_clone_groups`.
pub fn clone_groups_oracle(
    seq: &TokenSequence,
    min_size: u32,
) -> Result<Vec<CloneGroup>, OracleError> {
    assert!(min_size >= 1, "min_size must be at least 1");
    let sym = seq.symbols();
    let n = sym.len();
    if n > ORACLE_MAX_TOKENS {
        return Err(OracleError::SequenceTooLarge {
            len: n,
            max: ORACLE_MAX_TOKENS,
        });
    }
    let mut groups = Vec::new();
    for s in min_size as usize..n {
        for occ in maximal_at(sym, s) {
            let start = occ[0] as usize;
            groups.push(CloneGroup {
                length: s as u32,
                text_ids: sym[start..start + s].to_vec(),
                occurrences: occ,
            });
        }
    }
    crate::cloneindex::sort_groups(&mut groups);
    Ok(groups)
}

fn distinct_at(sym: &[u32], s: usize) -> u64 {
    if s == 0 || s > sym.len() {
        return 0;
    }
    let mut classes: HashMap<&[u32], u64> = HashMap::new();
    for i in 0..=sym.len() - s {
        *classes.entry(&sym[i..i + s]).or_insert(0) += 1;
    }
    classes.values().filter(|&&c| c >= 2).count() as u64
}

/// Occurrence sets (sorted) of the maximal repeats of length exactly `s`:
/// classes with two or more occurrences where no single-symbol extension
/// on either side preserves the whole occurrence set.
fn maximal_at(sym: &[u32], s: usize) -> Vec<Vec<u32>> {
    let n = sym.len();
    if s == 0 || s > n {
        return Vec::new();
    }
    let mut classes: HashMap<&[u32], Vec<u32>> = HashMap::new();
    for i in 0..=n - s {
        classes.entry(&sym[i..i + s]).or_default().push(i as u32);
    }
    let mut out: Vec<Vec<u32>> = classes
        .into_values()
        .filter(|occ| occ.len() >= 2)
        .filter(|occ| {
            // Left extension by one symbol: possible only when every
            // occurrence has the same predecessor.
            let left_fixed = occ.iter().all(|&p| p > 0)
                && occ
                    .iter()
                    .all(|&p| sym[p as usize - 1] == sym[occ[0] as usize - 1]);
            // Right extension likewise with successors.
            let right_fixed = occ.iter().all(|&p| (p as usize) + s < n)
                && occ
                    .iter()
                    .all(|&p| sym[p as usize + s] == sym[occ[0] as usize + s]);
            !left_fixed && !right_fixed
        })
        .collect();
    for occ in &mut out {
        occ.sort_unstable();
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn seq(ids: &[u32]) -> TokenSequence {
        TokenSequence::from_symbols("t", ids)
    }

    fn counts(ids: &[u32], mode: CountingMode, min: u32, ratio: (u64, u64)) -> BTreeMap<u32, u64> {
        let config = ScanConfig {
            min_size: min,
            cap_ratio: crate::Rational::new(ratio.0, ratio.1),
            mode,
        };
        count_duplicates_oracle(&seq(ids), &config).unwrap().counts
    }

    #[test]
    fn repeated_run_counts_prefix_lengths() {
        // Eight identical symbols: one repeated subsequence per size.
        let got = counts(&[1; 8], CountingMode::Distinct, 3, (1, 2));
        assert_eq!(got, BTreeMap::from([(3, 1), (4, 1)]));
    }

    #[test]
    fn distinct_and_maximal_disagree_on_alternation() {
        let ids = [0u32, 1, 0, 1, 0, 1, 0];
        assert_eq!(
            counts(&ids, CountingMode::Distinct, 3, (1, 2)),
            BTreeMap::from([(3, 2)])
        );
        assert_eq!(
            counts(&ids, CountingMode::Maximal, 3, (1, 2)),
            BTreeMap::from([(3, 1)])
        );
    }

    #[test]
    fn all_distinct_symbols_have_no_duplicates() {
        assert!(counts(&[1, 2, 3], CountingMode::Distinct, 3, (1, 2)).is_empty());
    }

    #[test]
    fn refuses_oversized_sequences() {
        let ids = vec![0u32; ORACLE_MAX_TOKENS + 1];
        let err = count_duplicates_oracle(&seq(&ids), &ScanConfig::default()).unwrap_err();
        assert!(matches!(err, OracleError::SequenceTooLarge { .. }));
    }

    #[test]
    fn groups_allow_overlapping_occurrences() {
        let groups = clone_groups_oracle(&seq(&[4, 4, 4, 4]), 3).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].length, 3);
        assert_eq!(groups[0].occurrences, vec![0, 1]);
    }
}
