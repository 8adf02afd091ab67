//! On-disk formats: profiles JSON Lines, distribution JSON, transfer
//! JSON, and the Q-Q CSV reader.
//!
//! A profiles file starts with one header object carrying the scan
//! config and provenance, then one object per corpus file in manifest
//! order; failed files appear as `{"path":…, "error":…}`. Numeric map
//! keys serialize as decimal strings in numeric order.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use clonequant_core::report::{QQPoint, QQSeries};
use clonequant_core::{
    CloneSizeDistribution, CountingMode, DuplicateProfile, Provenance, Rational, ScanConfig,
    TransferResult,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const PROFILES_SCHEMA: &str = "clone-profiles";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfilesHeader {
    pub version: u32,
    pub schema: String,
    pub frontend: String,
    pub manifest_hash: String,
    pub mode: String,
    pub min_size: u32,
    pub cap_ratio: String,
}

impl ProfilesHeader {
    pub fn new(frontend: &str, manifest_hash: &str, config: &ScanConfig) -> ProfilesHeader {
        ProfilesHeader {
            version: 1,
            schema: String::from(PROFILES_SCHEMA),
            frontend: String::from(frontend),
            manifest_hash: String::from(manifest_hash),
            mode: config.mode.to_string(),
            min_size: config.min_size,
            cap_ratio: config.cap_ratio.to_string(),
        }
    }

    pub fn config(&self) -> Result<ScanConfig> {
        parse_config(&self.mode, self.min_size, &self.cap_ratio)
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            frontend: self.frontend.clone(),
            manifest_hash: self.manifest_hash.clone(),
        }
    }
}

fn parse_config(mode: &str, min_size: u32, cap_ratio: &str) -> Result<ScanConfig> {
    let mode: CountingMode = mode
        .parse()
        .map_err(|e| CliError::input(format!("bad mode in profiles data: {e}")))?;
    let cap_ratio: Rational = cap_ratio
        .parse()
        .map_err(|_| CliError::input(format!("bad cap_ratio in profiles data: {cap_ratio:?}")))?;
    let config = ScanConfig {
        min_size,
        cap_ratio,
        mode,
    };
    if !config.is_valid() {
        return Err(CliError::input(format!(
            "invalid scan config in profiles data: min_size {min_size}, cap_ratio {cap_ratio}"
        )));
    }
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub path: String,
    pub hash: String,
    pub token_count: u64,
    pub counts: BTreeMap<u32, u64>,
    pub mode: String,
    pub min_size: u32,
    pub cap_ratio: String,
}

impl ProfileRecord {
    pub fn from_profile(profile: &DuplicateProfile, hash: &str) -> ProfileRecord {
        ProfileRecord {
            path: profile.file_id.clone(),
            hash: String::from(hash),
            token_count: profile.token_count,
            counts: profile.counts.clone(),
            mode: profile.config.mode.to_string(),
            min_size: profile.config.min_size,
            cap_ratio: profile.config.cap_ratio.to_string(),
        }
    }

    pub fn to_profile(&self) -> Result<DuplicateProfile> {
        Ok(DuplicateProfile {
            file_id: self.path.clone(),
            token_count: self.token_count,
            counts: self.counts.clone(),
            config: parse_config(&self.mode, self.min_size, &self.cap_ratio)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub path: String,
    pub error: String,
}

/// A fully parsed profiles file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilesFile {
    pub header: ProfilesHeader,
    pub profiles: Vec<DuplicateProfile>,
    pub failures: Vec<ErrorRecord>,
}

pub fn read_profiles(path: &Path) -> Result<ProfilesFile> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let header: ProfilesHeader = match lines.next() {
        Some((_, Ok(first))) => serde_json::from_str(&first).map_err(|e| {
            CliError::input(format!("{}: not a profiles file: {e}", path.display()))
        })?,
        Some((_, Err(e))) => {
            return Err(CliError::input(format!("{}: {e}", path.display())))
        }
        None => {
            return Err(CliError::input(format!(
                "{}: empty profiles file",
                path.display()
            )))
        }
    };
    if header.schema != PROFILES_SCHEMA {
        return Err(CliError::input(format!(
            "{}: unexpected schema {:?}",
            path.display(),
            header.schema
        )));
    }
    let mut profiles = Vec::new();
    let mut failures = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let line_err = |e: serde_json::Error| {
            CliError::input(format!("{}: line {}: {e}", path.display(), idx + 1))
        };
        // Failed files carry an "error" field instead of a profile. The
        // line is re-parsed from text because counts keys are decimal
        // strings, which only the streaming deserializer maps to integers.
        let probe: serde_json::Value = serde_json::from_str(&line).map_err(line_err)?;
        if probe.get("error").is_some() {
            failures.push(serde_json::from_str::<ErrorRecord>(&line).map_err(line_err)?);
        } else {
            let rec = serde_json::from_str::<ProfileRecord>(&line).map_err(line_err)?;
            profiles.push(rec.to_profile()?);
        }
    }
    Ok(ProfilesFile {
        header,
        profiles,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionDoc {
    pub version: u32,
    pub frontend: String,
    pub manifest_hash: String,
    pub mode: String,
    pub min_size: u32,
    pub cap_ratio: String,
    pub file_count: u64,
    pub totals: BTreeMap<u32, u64>,
}

impl DistributionDoc {
    pub fn from_distribution(d: &CloneSizeDistribution) -> DistributionDoc {
        DistributionDoc {
            version: 1,
            frontend: d.provenance().frontend.clone(),
            manifest_hash: d.provenance().manifest_hash.clone(),
            mode: d.config().mode.to_string(),
            min_size: d.config().min_size,
            cap_ratio: d.config().cap_ratio.to_string(),
            file_count: d.file_count(),
            totals: d.totals().clone(),
        }
    }

    pub fn to_distribution(&self) -> Result<CloneSizeDistribution> {
        let config = parse_config(&self.mode, self.min_size, &self.cap_ratio)?;
        CloneSizeDistribution::from_totals(
            self.totals.clone(),
            self.file_count,
            config,
            Provenance {
                frontend: self.frontend.clone(),
                manifest_hash: self.manifest_hash.clone(),
            },
        )
        .map_err(|e| CliError::input(format!("invalid distribution data: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("distribution doc serializes");
        s.push('\n');
        s
    }
}

pub fn read_distribution(path: &Path) -> Result<CloneSizeDistribution> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    let doc: DistributionDoc = serde_json::from_str(&raw)
        .map_err(|e| CliError::input(format!("{}: not a distribution file: {e}", path.display())))?;
    doc.to_distribution()
}

pub fn write_distribution(path: &Path, d: &CloneSizeDistribution) -> Result<()> {
    std::fs::write(path, DistributionDoc::from_distribution(d).to_json())
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferDoc {
    pub source_threshold: u32,
    pub source_quantile: String,
    pub target_threshold: u32,
    pub attained_quantile: String,
    pub highlight_fraction_source: String,
    pub highlight_fraction_target: String,
    pub interpolated_target_threshold: f64,
}

impl TransferDoc {
    pub fn from_result(r: &TransferResult) -> TransferDoc {
        TransferDoc {
            source_threshold: r.source_threshold,
            source_quantile: r.source_quantile.to_string(),
            target_threshold: r.target_threshold,
            attained_quantile: r.attained_quantile.to_string(),
            highlight_fraction_source: r.highlight_fraction_source.to_string(),
            highlight_fraction_target: r.highlight_fraction_target.to_string(),
            interpolated_target_threshold: r.interpolated_target_threshold,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("transfer doc serializes");
        s.push('\n');
        s
    }
}

/// Reads back a `p,q_source,q_target` CSV produced by the qq command.
pub fn parse_qq_csv(text: &str, source_label: &str, target_label: &str) -> Result<QQSeries> {
    let mut lines = text.lines();
    match lines.next() {
        Some("p,q_source,q_target") => {}
        _ => return Err(CliError::input(String::from(
            "not a q-q CSV: expected header \"p,q_source,q_target\"",
        ))),
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let parse_err =
            || CliError::input(format!("q-q CSV row {}: malformed line {line:?}", i + 2));
        let p: Rational = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(parse_err)?;
        let source: u32 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(parse_err)?;
        let target: u32 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(parse_err)?;
        if fields.next().is_some() {
            return Err(parse_err());
        }
        points.push(QQPoint { p, source, target });
    }
    Ok(QQSeries {
        source_label: String::from(source_label),
        target_label: String::from(target_label),
        points,
        marker: None,
    })
}
