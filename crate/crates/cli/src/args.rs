use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use pgen_core::constructions::{Flavor, ZSequence};
use pgen_core::digits::DigitFormat;
use pgen_core::{Convention, Lambda};

#[derive(Debug, Parser)]
#[command(
    name = "pgen",
    version,
    about = "Poisson-genericity statistics for digit streams"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Digit base.
    #[arg(long, global = true, default_value_t = 2)]
    pub base: u32,
    /// Seed for random sources.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Window convention: A counts floor(λb^k)+1 windows, B counts floor(λb^k).
    #[arg(long, global = true, default_value = "A", value_parser = parse_convention)]
    pub convention: Convention,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a digit stream to a file.
    Gen {
        #[command(flatten)]
        source: SourceArg,
        /// Number of digits (defaults to the full length of finite sources).
        #[arg(long, short = 'n')]
        length: Option<u64>,
        #[arg(long, short = 'o')]
        out: PathBuf,
        #[arg(long, default_value = "ascii", value_parser = parse_digit_format)]
        out_format: DigitFormat,
    },
    /// Z-profile of one word length.
    Zstats {
        #[command(flatten)]
        source: SourceArg,
        #[arg(short = 'k', long)]
        k: u32,
        #[arg(long, default_value = "1", value_parser = parse_lambda)]
        lambda: Lambda,
        #[arg(long, default_value_t = 16)]
        j_max: usize,
    },
    /// Deviations from the Poisson law across a range of word lengths.
    Scan {
        #[command(flatten)]
        source: SourceArg,
        /// Inclusive range such as 8..16.
        #[arg(long, value_parser = parse_range)]
        k_range: (u32, u32),
        /// Comma-separated list of λ values.
        #[arg(long, default_value = "1", value_delimiter = ',', value_parser = parse_lambda)]
        lambda: Vec<Lambda>,
        /// Comma-separated list of j values reported per row.
        #[arg(long, short = 'j', default_value = "0,1,2", value_delimiter = ',')]
        j: Vec<usize>,
    },
    /// Build f(z) from a source x and write it to a file.
    Construct {
        #[arg(long, value_parser = parse_flavor)]
        flavor: Flavor,
        /// z-spec such as "even=const:4,odd=id" or "3,4,5;tail=const:2".
        #[arg(long, value_parser = parse_z)]
        z: ZSequence,
        #[arg(long, default_value_t = 1)]
        k0: u32,
        #[arg(long, default_value_t = 3)]
        steps: u32,
        /// Explicit exponents k_1,k_2,... (bold flavors).
        #[arg(long, value_delimiter = ',')]
        exponents: Option<Vec<u32>>,
        /// Source x (same grammar as --source).
        #[arg(long, default_value = "random")]
        x: String,
        /// Digits to write (defaults to the end of the last block).
        #[arg(long, short = 'n')]
        length: Option<u64>,
        #[arg(long, short = 'o')]
        out: PathBuf,
        #[arg(long, default_value = "ascii", value_parser = parse_digit_format)]
        out_format: DigitFormat,
    },
    /// Exact interval-set computations.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// Total variation between count laws over (0, λ] and (0, λ'].
    Tv {
        #[command(flatten)]
        source: SourceArg,
        #[arg(short = 'k', long)]
        k: u32,
        #[arg(long, value_parser = parse_lambda)]
        lambda: Lambda,
        #[arg(long, value_parser = parse_lambda)]
        lambda_prime: Lambda,
    },
    /// Worst word-frequency deviation over word lengths 1..=max-len.
    Normality {
        #[command(flatten)]
        source: SourceArg,
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_len: u32,
    },
    /// (w, n)-discrepancy of one word.
    Discrepancy {
        #[command(flatten)]
        source: SourceArg,
        /// Word in digit symbols, e.g. 0110.
        #[arg(long)]
        word: String,
        #[arg(short = 'n', long)]
        n: usize,
    },
    /// Word lengths where |Z_j − pmf_j| < ε.
    Weakly {
        #[command(flatten)]
        source: SourceArg,
        #[arg(long, default_value = "1", value_parser = parse_lambda)]
        lambda: Lambda,
        #[arg(short = 'j', long, default_value_t = 0)]
        j: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_parser = parse_range)]
        k_range: (u32, u32),
    },
    /// Re-run the manifest embedded in a report and print the report again.
    Replay { report: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum MeasureCommand {
    /// Bad(λ, k, j, ε) by full prefix enumeration.
    Bad {
        #[arg(long, value_parser = parse_lambda)]
        lambda: Lambda,
        #[arg(short = 'k', long)]
        k: u32,
        /// A single j, or "all" for J_k.
        #[arg(short = 'j', long)]
        j: String,
        /// Defaults to 1/k.
        #[arg(long, value_parser = parse_ratio)]
        epsilon: Option<Ratio<u64>>,
    },
    /// Bad_k: the union over λ ∈ L_k and j ∈ J_k with ε = 1/k.
    Badk {
        #[arg(short = 'k', long)]
        k: u32,
    },
    /// Complement of the union of Bad_k over an inclusive k range.
    Eset {
        #[arg(long, value_parser = parse_range)]
        k_range: (u32, u32),
    },
    /// Exact μ(Bad_k) against the closed-form bound.
    Fact1 {
        #[arg(long, value_parser = parse_range)]
        k_range: (u32, u32),
    },
    /// Digit selection over nested intervals; prints a JSON-lines trace.
    Algorithm {
        #[arg(long, value_enum, default_value_t = ScheduleKind::Toy)]
        schedule: ScheduleKind,
        #[arg(long, default_value_t = 0)]
        n0: u32,
        #[arg(long, default_value_t = 8)]
        steps: u32,
        /// Per-step inclusive k ranges: step i removes Bad_k for k in the i-th
        /// range. Steps past the list remove nothing.
        #[arg(long, value_delimiter = ',', value_parser = parse_range)]
        k_ranges: Vec<(u32, u32)>,
        /// Sets removed at every step: "badk:K" or "bad:LAMBDA:K:J:EPS" (J may be "all").
        #[arg(long = "exclude")]
        exclude: Vec<String>,
        /// "standard" for b^(-2n) or a ratio r for r^n.
        #[arg(long, default_value = "standard")]
        threshold: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScheduleKind {
    /// N_n = b^(2n) and threshold 1/N_n.
    Standard,
    /// Exclusions and threshold from the command line.
    Toy,
}

#[derive(Debug, Args)]
pub struct SourceArg {
    /// random[:SEED] | constant:D | champernowne | debruijn:K | xdebruijn:M | file:PATH
    #[arg(long, default_value = "random")]
    pub source: String,
}

fn parse_lambda(s: &str) -> Result<Lambda, String> {
    s.parse().map_err(|e: pgen_core::Error| e.to_string())
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse().map_err(|e: pgen_core::Error| e.to_string())
}

fn parse_digit_format(s: &str) -> Result<DigitFormat, String> {
    s.parse().map_err(|e: pgen_core::Error| e.to_string())
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    s.parse().map_err(|e: pgen_core::Error| e.to_string())
}

fn parse_z(s: &str) -> Result<ZSequence, String> {
    s.parse().map_err(|e: pgen_core::Error| e.to_string())
}

pub fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let r: Ratio<u64> = s
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse ratio {s:?}"))?;
    Ok(r)
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let bad = || format!("expected an inclusive range LO..HI or a single value, got {s:?}");
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}
