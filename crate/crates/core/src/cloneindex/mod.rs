//! Exact counting of repeated token subsequences.
//!
//! For a sequence of `L` interned symbols, [`count_duplicates`] reports,
//! for every size `s` with `min_size <= s <= floor(L * cap_ratio)`, how
//! many clone classes of exactly `s` tokens occur two or more times
//! (overlaps allowed). Two modes:
//!
//! * [`CountingMode::Distinct`]: one class per distinct symbol subsequence;
//! * [`CountingMode::Maximal`]: only maximal repeats, i.e. classes where
//!   extending every occurrence by one symbol on either side loses at
//!   least one occurrence.
//!
//! Both modes run on a suffix array + LCP array. Distinct counts for all
//! sizes fall out of two difference arrays over the LCP values; maximal
//! repeats are the left-diverse branching intervals of a sentinel-
//!   terminated sequence. The brute-force reference lives in [`oracle`].

mod oracle;
mod suffix;

pub use oracle::{clone_groups_oracle, count_duplicates_oracle, OracleError, ORACLE_MAX_TOKENS};
pub use suffix::{lcp_array, suffix_array};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::rational::Rational;
use crate::token::TokenSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountingMode {
    Distinct,
    Maximal,
}

impl CountingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountingMode::Distinct => "distinct",
            CountingMode::Maximal => "maximal",
        }
    }
}

impl core::str::FromStr for CountingMode {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<CountingMode, UnknownName> {
        match s {
            "distinct" => Ok(CountingMode::Distinct),
            "maximal" => Ok(CountingMode::Maximal),
            _ => Err(UnknownName("counting mode")),
        }
    }
}

impl core::fmt::Display for CountingMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownName(pub &'static str);

impl core::fmt::Display for UnknownName {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "unknown {}", self.0)
    }
}

impl core::error::Error for UnknownName {}

/// Counting parameters shared by a whole scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    /// Smallest clone size counted, in tokens. At least 1.
    pub min_size: u32,
    /// Largest counted size as a fraction of the file's token count;
    /// `0 < cap_ratio <= 1`.
    pub cap_ratio: Rational,
    pub mode: CountingMode,
}

impl Default for ScanConfig {
    fn default() -> ScanConfig {
        ScanConfig {
            min_size: 3,
            cap_ratio: Rational::new(1, 2),
            mode: CountingMode::Distinct,
        }
    }
}

impl ScanConfig {
    pub fn is_valid(&self) -> bool {
        self.min_size >= 1 && !self.cap_ratio.is_zero() && self.cap_ratio <= Rational::ONE
    }

    pub(crate) fn assert_valid(&self) {
        assert!(
            self.is_valid(),
            "invalid scan config: min_size {}, cap_ratio {}",
            self.min_size,
            self.cap_ratio
        );
    }

    /// `floor(token_count * cap_ratio)`.
    pub fn size_cap(&self, token_count: usize) -> u32 {
        let num = token_count as u128 * self.cap_ratio.num() as u128;
        (num / self.cap_ratio.den() as u128) as u32
    }
}

/// Per-file sparse histogram of duplicate classes by size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateProfile {
    pub file_id: String,
    pub token_count: u64,
    /// size -> number of clone classes of exactly that size; zero values
    /// are never stored.
    pub counts: BTreeMap<u32, u64>,
    pub config: ScanConfig,
}

/// One maximal repeat with its full occurrence set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloneGroup {
    /// Clone size in tokens.
    pub length: u32,
    /// All start offsets, ascending; at least two, overlaps allowed.
    pub occurrences: Vec<u32>,
    /// The repeated symbol subsequence.
    pub text_ids: Vec<u32>,
}

/// Counts duplicate classes per size. Panics on an invalid config; never
/// fails on any sequence.
pub fn count_duplicates(seq: &TokenSequence, config: &ScanConfig) -> DuplicateProfile {
    config.assert_valid();
    let sym = seq.symbols();
    let n = sym.len();
    let lo = config.min_size;
    let hi = config.size_cap(n).min(n.saturating_sub(1) as u32);
    let counts = if n < 2 || hi < lo {
        BTreeMap::new()
    } else {
        match config.mode {
            CountingMode::Distinct => distinct_counts(sym, lo, hi),
            CountingMode::Maximal => maximal_counts(sym, lo, hi),
        }
    };
    DuplicateProfile {
        file_id: String::from(seq.file_id()),
        token_count: n as u64,
        counts,
        config: config.clone(),
    }
}

/// All maximal repeats of at least `min_size` tokens, sorted by first
/// occurrence, then by length descending. No size cap applies.
pub fn find_clone_groups(seq: &TokenSequence, min_size: u32) -> Vec<CloneGroup> {
    assert!(min_size >= 1, "min_size must be at least 1");
    let sym = seq.symbols();
    if sym.len() < 2 {
        return Vec::new();
    }
    let t = with_sentinel(sym);
    let sa = suffix::suffix_array(&t);
    let lcp = suffix::lcp_array(&t, &sa);
    let diverse = LeftDiversity::new(&t, &sa);
    let mut groups = Vec::new();
    suffix::for_each_repeat_interval(&lcp, |depth, lb, rb| {
        if depth < min_size || !diverse.check(lb, rb) {
            return;
        }
        let mut occurrences: Vec<u32> = sa[lb..=rb].to_vec();
        occurrences.sort_unstable();
        let start = occurrences[0] as usize;
        groups.push(CloneGroup {
            length: depth,
            text_ids: sym[start..start + depth as usize].to_vec(),
            occurrences,
        });
    });
    sort_groups(&mut groups);
    groups
}

pub(crate) fn sort_groups(groups: &mut [CloneGroup]) {
    groups.sort_by(|a, b| {
        a.occurrences[0]
            .cmp(&b.occurrences[0])
            .then(b.length.cmp(&a.length))
    });
}

/// Distinct repeated subsequences of each size, from the LCP array alone.
///
/// A length-`s` subsequence repeats iff it is the common prefix of a
/// maximal run of suffix-array neighbours with `lcp >= s`, and each run
/// contributes exactly one class. Runs per threshold are `#(lcp[r] >= s)`
/// minus `#(adjacent pairs with both >= s)`, so two difference arrays give
/// every size in one pass.
fn distinct_counts(sym: &[u32], lo: u32, hi: u32) -> BTreeMap<u32, u64> {
    let n = sym.len();
    let sa = suffix::suffix_array(sym);
    let lcp = suffix::lcp_array(sym, &sa);
    let mut delta = vec![0i64; n + 1];
    for r in 1..n {
        let v = lcp[r] as usize;
        if v > 0 {
            delta[1] += 1;
            delta[v + 1] -= 1;
        }
        if r >= 2 {
            let pair = lcp[r].min(lcp[r - 1]) as usize;
            if pair > 0 {
                delta[1] -= 1;
                delta[pair + 1] += 1;
            }
        }
    }
    let mut counts = BTreeMap::new();
    let mut acc = 0i64;
    let top = (hi as usize).min(n);
    for (s, &d) in delta.iter().enumerate().skip(1).take(top) {
        acc += d;
        if s >= lo as usize && acc > 0 {
            counts.insert(s as u32, acc as u64);
        }
    }
    counts
}

/// Maximal repeats of each size: left-diverse branching intervals of the
/// sentinel-terminated sequence, keyed by their string depth.
fn maximal_counts(sym: &[u32], lo: u32, hi: u32) -> BTreeMap<u32, u64> {
    let t = with_sentinel(sym);
    let sa = suffix::suffix_array(&t);
    let lcp = suffix::lcp_array(&t, &sa);
    let diverse = LeftDiversity::new(&t, &sa);
    let mut counts = BTreeMap::new();
    suffix::for_each_repeat_interval(&lcp, |depth, lb, rb| {
        if depth >= lo && depth <= hi && diverse.check(lb, rb) {
            *counts.entry(depth).or_insert(0u64) += 1;
        }
    });
    counts
}

/// Appends a unique terminal symbol so that an occurrence ending at the
/// end of the sequence counts as right-diverse.
fn with_sentinel(sym: &[u32]) -> Vec<u32> {
    let sentinel = sym
        .iter()
        .copied()
        .max()
        .map_or(0, |m| m.checked_add(1).expect("symbol id space exhausted"));
    let mut t = Vec::with_capacity(sym.len() + 1);
    t.extend_from_slice(sym);
    t.push(sentinel);
    t
}

/// O(1) left-diversity queries over suffix-array ranges.
///
/// An interval is left-diverse when its suffixes do not all share one
/// predecessor symbol; a suffix starting at position 0 has no predecessor
/// and makes any interval containing it diverse.
struct LeftDiversity {
    prev_sym: Vec<u32>,
    next_break: Vec<usize>,
}

const NO_PREDECESSOR: u32 = u32::MAX;

impl LeftDiversity {
    fn new(t: &[u32], sa: &[u32]) -> LeftDiversity {
        let m = t.len();
        let prev_sym: Vec<u32> = sa
            .iter()
            .map(|&p| {
                if p == 0 {
                    NO_PREDECESSOR
                } else {
                    t[p as usize - 1]
                }
            })
            .collect();
        let mut next_break = vec![m; m];
        for r in (0..m.saturating_sub(1)).rev() {
            next_break[r] = if prev_sym[r + 1] == prev_sym[r] {
                next_break[r + 1]
            } else {
                r + 1
            };
        }
        LeftDiversity {
            prev_sym,
            next_break,
        }
    }

    fn check(&self, lb: usize, rb: usize) -> bool {
        self.prev_sym[lb] == NO_PREDECESSOR || self.next_break[lb] <= rb
    }
}
