//! Argument parsing and the top-level command dispatcher.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use clonequant_core::report::{
    default_qq_grid, density_chart_svg, pdf_series, qq_chart_svg, qq_csv, qq_series, ChartStyle,
    QQSeries, Series,
};
use clonequant_core::{
    find_clone_groups, tokenize_source, transfer_threshold, CellBoundary, CloneGroup,
    CloneSizeDistribution, CountingMode, LexProfile, Rational, ScanConfig, TokenSequence,
};

use crate::corpus::{DiscoverOptions, Selection, DEFAULT_MAX_BYTES};
use crate::error::{CliError, Result};
use crate::formats::{
    parse_qq_csv, read_distribution, read_profiles, write_distribution, TransferDoc,
};
use crate::notebook::extract_notebook;
use crate::scan::{run_scan, ScanOptions};
use crate::verify::{run_verify, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "clonequant",
    version,
    about = "Exact token-level clone statistics and quantile threshold transfer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan a corpus directory into per-file duplicate profiles (JSONL).
    Scan(ScanArgs),
    /// Sum a profiles file into a clone-size distribution (JSON).
    Aggregate(AggregateArgs),
    /// Carry a threshold from one distribution to another by quantile rank.
    Transfer(TransferArgs),
    /// Tabulate paired quantiles of two distributions as CSV.
    Qq(QqArgs),
    /// Render distributions (and optionally a Q-Q comparison) as SVG.
    Plot(PlotArgs),
    /// List maximal clone groups in one file.
    Clones(ClonesArgs),
    /// Check the fast counting paths against the brute-force oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LangArg {
    Python,
    Notebook,
    Generic,
}

impl LangArg {
    fn selection(self) -> Selection {
        match self {
            LangArg::Python => Selection::Python,
            LangArg::Notebook => Selection::Notebook,
            LangArg::Generic => Selection::Generic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Distinct,
    Maximal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Barrier,
    None,
}

fn parse_cap_ratio(s: &str) -> std::result::Result<Rational, String> {
    let r: Rational = s
        .parse()
        .map_err(|_| format!("{s:?} is not a fraction like 1/2 or a decimal like 0.5"))?;
    if r.is_zero() || r > Rational::ONE {
        return Err(String::from("cap ratio must satisfy 0 < ratio <= 1"));
    }
    Ok(r)
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Which files to take and how to tokenize them.
    #[arg(long, value_enum)]
    pub lang: LangArg,
    /// Corpus root directory.
    #[arg(long)]
    pub input: PathBuf,
    /// Output profiles file (JSON Lines).
    #[arg(long)]
    pub out: PathBuf,
    /// Smallest clone size counted, in tokens.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub min_size: u32,
    /// Largest counted size as a fraction of each file's token count.
    #[arg(long, default_value = "1/2", value_parser = parse_cap_ratio)]
    pub cap_ratio: Rational,
    #[arg(long, value_enum, default_value_t = ModeArg::Distinct)]
    pub mode: ModeArg,
    /// Whether notebook cells are separated by barrier tokens.
    #[arg(long, value_enum, default_value_t = BoundaryArg::Barrier)]
    pub cell_boundary: BoundaryArg,
    /// Per-file size limit in bytes; larger files are skipped.
    #[arg(long, default_value_t = DEFAULT_MAX_BYTES)]
    pub max_bytes: u64,
    /// Keep files whose content duplicates an earlier file.
    #[arg(long)]
    pub no_dedup: bool,
    /// Worker threads (0 = one per logical core). Output bytes are
    /// identical regardless.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// Profiles file produced by scan.
    #[arg(long)]
    pub profiles: PathBuf,
    /// Output distribution file (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// Source distribution (where the threshold is known to work).
    #[arg(long)]
    pub source: PathBuf,
    /// Target distribution (where an equivalent threshold is wanted).
    #[arg(long)]
    pub target: PathBuf,
    /// Threshold in the source corpus, in tokens.
    #[arg(long)]
    pub threshold: u32,
}

#[derive(Debug, Args)]
pub struct QqArgs {
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    /// Probability grid as start:end:step, e.g. 0.5:0.99:0.005.
    #[arg(long)]
    pub grid: Option<String>,
    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Distribution file; pass twice to overlay two corpora.
    #[arg(long = "dist", required = true)]
    pub dist: Vec<PathBuf>,
    /// Q-Q CSV (from the qq command) to render as a second panel.
    #[arg(long, conflicts_with = "threshold")]
    pub qq: Option<PathBuf>,
    /// With two --dist files: compute the Q-Q panel directly and mark
    /// this source threshold's transfer on it.
    #[arg(long)]
    pub threshold: Option<u32>,
    /// Output SVG file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClonesArgs {
    /// File to inspect.
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub lang: LangArg,
    /// Smallest clone size reported, in tokens.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub min_size: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Directory or single file to check.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LangArg::Python)]
    pub lang: LangArg,
    /// Also check 500 seeded random sequences.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Scan(args) => cmd_scan(args),
        Command::Aggregate(args) => cmd_aggregate(args),
        Command::Transfer(args) => cmd_transfer(args),
        Command::Qq(args) => cmd_qq(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Clones(args) => cmd_clones(args),
        Command::Verify(args) => run_verify(&VerifyOptions {
            input: args.input,
            selection: args.lang.selection(),
            seed: args.seed,
        }),
    }
}

fn cmd_scan(args: ScanArgs) -> Result<()> {
    let summary = run_scan(&ScanOptions {
        selection: args.lang.selection(),
        input: args.input,
        out: args.out,
        config: ScanConfig {
            min_size: args.min_size,
            cap_ratio: args.cap_ratio,
            mode: match args.mode {
                ModeArg::Distinct => CountingMode::Distinct,
                ModeArg::Maximal => CountingMode::Maximal,
            },
        },
        cell_boundary: match args.cell_boundary {
            BoundaryArg::Barrier => CellBoundary::Barrier,
            BoundaryArg::None => CellBoundary::None,
        },
        discover: DiscoverOptions {
            max_bytes: args.max_bytes,
            dedup: !args.no_dedup,
        },
        jobs: args.jobs,
    })?;
    let troubled = summary.failed + summary.skipped_io;
    if troubled > 0 {
        return Err(CliError::input(format!(
            "{troubled} file(s) could not be processed; see error records and standard error"
        )));
    }
    Ok(())
}

fn cmd_aggregate(args: AggregateArgs) -> Result<()> {
    let parsed = read_profiles(&args.profiles)?;
    let config = parsed.header.config()?;
    let provenance = parsed.header.provenance();
    if !parsed.failures.is_empty() {
        eprintln!(
            "aggregate: {} failed record(s) excluded from the file count",
            parsed.failures.len()
        );
    }
    let dist = clonequant_core::aggregate_profiles(parsed.profiles, &config, provenance)
        .map_err(|e| CliError::input(format!("{}: {e}", args.profiles.display())))?;
    write_distribution(&args.out, &dist)
}

fn cmd_transfer(args: TransferArgs) -> Result<()> {
    let source = read_distribution(&args.source)?;
    let target = read_distribution(&args.target)?;
    let result = transfer_threshold(&source, args.threshold, &target)
        .map_err(|e| CliError::input(e.to_string()))?;
    print!("{}", TransferDoc::from_result(&result).to_json());
    Ok(())
}

fn parse_grid(spec: &str) -> Result<Vec<Rational>> {
    let bad = || {
        CliError::usage(format!(
            "bad grid {spec:?}: expected start:end:step with values in [0,1], e.g. 0.5:0.99:0.005"
        ))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(bad());
    };
    let start: Rational = start.parse().map_err(|_| bad())?;
    let end: Rational = end.parse().map_err(|_| bad())?;
    let step: Rational = step.parse().map_err(|_| bad())?;
    if step.is_zero() || end > Rational::ONE || start > end {
        return Err(bad());
    }
    let mut grid = Vec::new();
    let mut p = start;
    while p <= end {
        grid.push(p);
        p = p + step;
    }
    Ok(grid)
}

fn stem_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_qq(args: QqArgs) -> Result<()> {
    let source = read_distribution(&args.source)?;
    let target = read_distribution(&args.target)?;
    let grid = match &args.grid {
        Some(spec) => parse_grid(spec)?,
        None => default_qq_grid(),
    };
    let series = qq_series(
        &source,
        &target,
        &grid,
        &stem_label(&args.source),
        &stem_label(&args.target),
        None,
    )
    .map_err(|e| CliError::input(e.to_string()))?;
    std::fs::write(&args.out, qq_csv(&series))
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", args.out.display())))
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    if args.dist.len() > 2 {
        return Err(CliError::usage("plot takes at most two --dist files"));
    }
    let dists: Vec<(String, CloneSizeDistribution)> = args
        .dist
        .iter()
        .map(|p| read_distribution(p).map(|d| (stem_label(p), d)))
        .collect::<Result<_>>()?;

    let mut density: Vec<Series> = Vec::new();
    for (label, dist) in &dists {
        density.push(pdf_series(dist, label).map_err(|e| {
            CliError::input(format!("distribution {label}: {e}"))
        })?);
    }

    let qq: Option<QQSeries> = match (&args.qq, args.threshold) {
        (Some(path), None) => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
            Some(parse_qq_csv(&raw, "source", "target")?)
        }
        (None, Some(threshold)) => {
            let [(src_label, src), (tgt_label, tgt)] = dists.as_slice() else {
                return Err(CliError::usage(
                    "plot --threshold needs exactly two --dist files (source then target)",
                ));
            };
            Some(
                qq_series(src, tgt, &default_qq_grid(), src_label, tgt_label, Some(threshold))
                    .map_err(|e| CliError::input(e.to_string()))?,
            )
        }
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("clap rejects --qq with --threshold"),
    };

    let density_style = ChartStyle::density();
    let density_svg =
        density_chart_svg(&density, &density_style).map_err(|e| CliError::input(e.to_string()))?;
    let svg = match qq {
        None => density_svg,
        Some(series) => {
            let qq_style = ChartStyle::qq();
            let qq_svg =
                qq_chart_svg(&series, &qq_style).map_err(|e| CliError::input(e.to_string()))?;
            stack_panels(&density_svg, density_style.height, &qq_svg, qq_style.height)
        }
    };
    std::fs::write(&args.out, svg)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", args.out.display())))
}

/// Stacks two complete SVG documents vertically into one document.
/// Nested svg elements position panels without rewriting coordinates.
fn stack_panels(top: &str, top_height: u32, bottom: &str, bottom_height: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"{}\">\n{}<g transform=\"translate(0,{top_height})\">\n{}</g>\n</svg>\n",
        top_height + bottom_height,
        top,
        bottom,
    )
}

fn cmd_clones(args: ClonesArgs) -> Result<()> {
    let bytes = std::fs::read(&args.file)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", args.file.display())))?;
    let text = String::from_utf8_lossy(&bytes);
    let label = args.file.display().to_string();
    let seq = match args.lang {
        LangArg::Python => tokenize_source(&label, &text, LexProfile::Script),
        LangArg::Generic => tokenize_source(&label, &text, LexProfile::Generic),
        LangArg::Notebook => extract_notebook(&label, &text, CellBoundary::Barrier)?,
    };
    let groups = find_clone_groups(&seq, args.min_size);
    if groups.is_empty() {
        println!("{label}: no clone groups (min size {} tokens)", args.min_size);
        return Ok(());
    }
    println!(
        "{label}: {} clone group(s) (min size {} tokens)",
        groups.len(),
        args.min_size
    );
    for group in &groups {
        println!("  {}", describe_group(&seq, group));
    }
    Ok(())
}

/// One line per group: size, copy count, and the source line range of
/// every occurrence (with its cell for notebooks).
fn describe_group(seq: &TokenSequence, group: &CloneGroup) -> String {
    let tokens = seq.tokens();
    let spans = seq.cell_spans();
    let mut places = Vec::new();
    for &start in &group.occurrences {
        let start = start as usize;
        let end = start + group.length as usize - 1;
        let first = tokens[start].line;
        let last = tokens[end].line;
        let cell = spans.and_then(|spans| {
            spans
                .iter()
                .position(|span| span.contains(&start))
                .map(|i| format!("cell {i} "))
        });
        let range = if first == last {
            format!("line {first}")
        } else {
            format!("lines {first}-{last}")
        };
        places.push(format!("{}{range}", cell.unwrap_or_default()));
    }
    format!(
        "{} tokens x {} copies: {}",
        group.length,
        group.occurrences.len(),
        places.join(", ")
    )
}
