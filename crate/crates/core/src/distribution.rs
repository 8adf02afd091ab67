//! Corpus-level clone-size distributions and threshold transfer.
//!
//! A distribution is the per-size sum of duplicate counts over a corpus,
//! together with the file count (zero-count files included) and the scan
//! configuration. Quantile ranks are exact rationals: `W(<t) / W`, the
//! weight fraction of clone classes smaller than `t`. Thresholds move
//! between corpora by rank: the target threshold is the smallest integer
//! whose rank reaches the source threshold's rank.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use crate::cloneindex::{DuplicateProfile, ScanConfig};
use crate::rational::Rational;

/// Where a distribution came from: the corpus manifest digest and the
/// frontend that produced the token streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub frontend: String,
    pub manifest_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloneSizeDistribution {
    totals: BTreeMap<u32, u64>,
    file_count: u64,
    config: ScanConfig,
    provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistributionError {
    Empty,
    ConfigMismatch,
    ProvenanceMismatch,
    InvalidProbability,
    ThresholdBelowMinSize { threshold: u32, min_size: u32 },
    InvalidTotals { size: u32, min_size: u32 },
}

impl fmt::Display for DistributionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionError::Empty => write!(f, "distribution has no clone classes"),
            DistributionError::ConfigMismatch => {
                write!(f, "profiles or distributions carry different scan configs")
            }
            DistributionError::ProvenanceMismatch => {
                write!(f, "distributions come from different corpora or frontends")
            }
            DistributionError::InvalidProbability => {
                write!(f, "probability must lie in [0, 1]")
            }
            DistributionError::ThresholdBelowMinSize {
                threshold,
                min_size,
            } => write!(
                f,
                "threshold {threshold} is below the scan's min size {min_size}"
            ),
            DistributionError::InvalidTotals { size, min_size } => write!(
                f,
                "totals contain size {size} below the scan's min size {min_size}"
            ),
        }
    }
}

impl core::error::Error for DistributionError {}

impl CloneSizeDistribution {
    /// Builds a distribution from already-summed totals. Zero values are
    /// dropped; keys below `config.min_size` are rejected.
    pub fn from_totals(
        totals: BTreeMap<u32, u64>,
        file_count: u64,
        config: ScanConfig,
        provenance: Provenance,
    ) -> Result<CloneSizeDistribution, DistributionError> {
        config.assert_valid();
        let totals: BTreeMap<u32, u64> = totals.into_iter().filter(|&(_, v)| v > 0).collect();
        if let Some((&size, _)) = totals.iter().next() {
            if size < config.min_size {
                return Err(DistributionError::InvalidTotals {
                    size,
                    min_size: config.min_size,
                });
            }
        }
        Ok(CloneSizeDistribution {
            totals,
            file_count,
            config,
            provenance,
        })
    }

    pub fn totals(&self) -> &BTreeMap<u32, u64> {
        &self.totals
    }

    pub fn file_count(&self) -> u64 {
        self.file_count
    }

    pub fn config(&self) -> &ScanConfig {
        &self.config
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Total weight `W`: the number of clone classes over the corpus.
    pub fn total_weight(&self) -> u64 {
        self.totals.values().sum()
    }

    pub fn max_size(&self) -> Option<u32> {
        self.totals.keys().next_back().copied()
    }

    pub fn min_observed_size(&self) -> Option<u32> {
        self.totals.keys().next().copied()
    }

    /// Mean number of duplicate classes of size `s` per file; derived on
    /// demand, never stored.
    pub fn mean_per_file(&self, size: u32) -> Rational {
        if self.file_count == 0 {
            return Rational::ZERO;
        }
        Rational::new(self.totals.get(&size).copied().unwrap_or(0), self.file_count)
    }

    /// Exact quantile rank of a threshold: the weight fraction of classes
    /// strictly smaller than `t`.
    pub fn quantile_rank(&self, t: u32) -> Result<Rational, DistributionError> {
        let w = self.total_weight();
        if w == 0 {
            return Err(DistributionError::Empty);
        }
        let below: u64 = self.totals.range(..t).map(|(_, v)| v).sum();
        Ok(Rational::new(below, w))
    }

    /// Smallest size in the support whose cumulative weight fraction
    /// reaches `p`.
    pub fn quantile(&self, p: Rational) -> Result<u32, DistributionError> {
        if p > Rational::ONE {
            return Err(DistributionError::InvalidProbability);
        }
        let w = self.total_weight();
        if w == 0 {
            return Err(DistributionError::Empty);
        }
        let mut cum: u64 = 0;
        for (&s, &v) in &self.totals {
            cum += v;
            // cum / w >= p  <=>  cum * p.den >= p.num * w
            if cum as u128 * p.den() as u128 >= p.num() as u128 * w as u128 {
                return Ok(s);
            }
        }
        unreachable!("cumulative fraction reaches 1 at the maximum size")
    }
}

/// Sums per-file profiles into a distribution. Every profile must carry
/// exactly `config`; files with empty counts still increment the file
/// count.
pub fn aggregate_profiles<I>(
    profiles: I,
    config: &ScanConfig,
    provenance: Provenance,
) -> Result<CloneSizeDistribution, DistributionError>
where
    I: IntoIterator<Item = DuplicateProfile>,
{
    config.assert_valid();
    let mut totals: BTreeMap<u32, u64> = BTreeMap::new();
    let mut file_count = 0u64;
    for profile in profiles {
        if profile.config != *config {
            return Err(DistributionError::ConfigMismatch);
        }
        file_count += 1;
        for (&s, &v) in &profile.counts {
            *totals.entry(s).or_insert(0) += v;
        }
    }
    CloneSizeDistribution::from_totals(totals, file_count, config.clone(), provenance)
}

/// Pointwise sum of two distributions over the same corpus shard set.
/// Requires identical config and provenance; associative and commutative.
pub fn merge_distributions(
    a: &CloneSizeDistribution,
    b: &CloneSizeDistribution,
) -> Result<CloneSizeDistribution, DistributionError> {
    if a.config != b.config {
        return Err(DistributionError::ConfigMismatch);
    }
    if a.provenance != b.provenance {
        return Err(DistributionError::ProvenanceMismatch);
    }
    let mut totals = a.totals.clone();
    for (&s, &v) in &b.totals {
        *totals.entry(s).or_insert(0) += v;
    }
    CloneSizeDistribution::from_totals(
        totals,
        a.file_count + b.file_count,
        a.config.clone(),
        a.provenance.clone(),
    )
}

/// Result of carrying a threshold from a source to a target distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferResult {
    pub source_threshold: u32,
    /// Rank of the source threshold in the source distribution.
    pub source_quantile: Rational,
    /// Smallest integer threshold whose rank in the target reaches
    /// `source_quantile`; at least the target's min size.
    pub target_threshold: u32,
    /// Rank of `target_threshold` in the target; never below
    /// `source_quantile`.
    pub attained_quantile: Rational,
    /// Fraction of source clone classes at or above the source threshold.
    pub highlight_fraction_source: Rational,
    /// Fraction of target clone classes at or above the target threshold.
    pub highlight_fraction_target: Rational,
    /// Linear interpolation of the target's rank curve at the source
    /// rank. Diagnostic only; the integer threshold is authoritative.
    pub interpolated_target_threshold: f64,
}

/// Transfers `t_src` from `source` to `target` by quantile rank.
pub fn transfer_threshold(
    source: &CloneSizeDistribution,
    t_src: u32,
    target: &CloneSizeDistribution,
) -> Result<TransferResult, DistributionError> {
    if t_src < source.config.min_size {
        return Err(DistributionError::ThresholdBelowMinSize {
            threshold: t_src,
            min_size: source.config.min_size,
        });
    }
    let q = source.quantile_rank(t_src)?;
    let w = target.total_weight();
    if w == 0 {
        return Err(DistributionError::Empty);
    }
    let min_size = target.config.min_size;
    let mut t_tgt = min_size;
    if !q.is_zero() {
        let mut cum = 0u64;
        for (&s, &v) in &target.totals {
            cum += v;
            if cum as u128 * q.den() as u128 >= q.num() as u128 * w as u128 {
                t_tgt = s + 1;
                break;
            }
        }
    }
    let attained = target.quantile_rank(t_tgt)?;
    debug_assert!(attained >= q);
    Ok(TransferResult {
        source_threshold: t_src,
        source_quantile: q,
        target_threshold: t_tgt,
        attained_quantile: attained,
        highlight_fraction_source: q.one_minus(),
        highlight_fraction_target: attained.one_minus(),
        interpolated_target_threshold: interpolate_threshold(target, q),
    })
}

/// Piecewise-linear inverse of the target rank curve through the knots
/// `(min_size, 0)` and `(s_i + 1, rank(s_i + 1))` for each support point.
fn interpolate_threshold(target: &CloneSizeDistribution, q: Rational) -> f64 {
    let w = target.total_weight();
    let mut prev_t = target.config.min_size as f64;
    let mut prev_rank = 0.0f64;
    let mut cum = 0u64;
    let qf = q.to_f64();
    if q.is_zero() {
        return prev_t;
    }
    for (&s, &v) in &target.totals {
        cum += v;
        let t = (s + 1) as f64;
        let rank = cum as f64 / w as f64;
        if cum as u128 * q.den() as u128 >= q.num() as u128 * w as u128 {
            if rank == prev_rank {
                return t;
            }
            return prev_t + (qf - prev_rank) / (rank - prev_rank) * (t - prev_t);
        }
        prev_t = t;
        prev_rank = rank;
    }
    prev_t
}
