//! Command-line surface: subcommands, flags, and value parsers.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Batch computations over Liouville/Möbius tables: correlations,
/// dilation residuals, cylinder frequencies, block complexity, Gowers
/// norms, unipotent progression checks, and rotation averages.
#[derive(Parser, Debug)]
#[command(name = "sarnak", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct CommonOpts {
    /// Output path base; writes <out>.csv or <out>.json plus
    /// <out>.manifest.json
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Primary output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads for parallel scans (results do not depend on this)
    #[arg(long)]
    pub workers: Option<usize>,

    /// Cache directory for sieve tables and correlation results
    /// (default: $SARNAK_CACHE_DIR, else ./cache)
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,

    /// Fail instead of building a missing sieve table
    #[arg(long)]
    pub require_cache: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableArg {
    Lambda,
    Mobius,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AvgArg {
    Cesaro,
    Log,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightingArg {
    Uniform,
    #[value(name = "dyadic-1/p")]
    DyadicReciprocal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynamicsOp {
    Ap,
    PrimeAp,
    SkewProbe,
    Stationarity,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build (or refresh) a sieve table and report its checksum
    Sieve {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_enum, default_value_t = TableArg::Lambda)]
        table: TableArg,
        /// Table bound, scientific notation accepted ("1e8")
        #[arg(long, value_parser = parse_magnitude, default_value = "1e6")]
        n: u64,
        /// Values per sieve segment
        #[arg(long, value_parser = parse_magnitude)]
        segment_length: Option<u64>,
    },

    /// Multi-point correlation of shifted table values
    Corr {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_enum, default_value_t = TableArg::Lambda)]
        table: TableArg,
        /// Cutoffs, comma-separated ("1e5,1e6,1e7")
        #[arg(long, value_parser = parse_magnitude, value_delimiter = ',', default_value = "1e6")]
        n: Vec<u64>,
        /// Shifts h_1,…,h_ℓ ("0,1")
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        shifts: Vec<i64>,
        #[arg(long, value_enum, default_value_t = AvgArg::Log)]
        avg: AvgArg,
        /// Optional linear phase weight e(n·alpha); decimal or preset
        /// ("golden", "sqrt2m1")
        #[arg(long, value_parser = parse_alpha)]
        phase_alpha: Option<f64>,
    },

    /// Residual of the prime-dilation sign identity
    TaoCheck {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_enum, default_value_t = TableArg::Lambda)]
        table: TableArg,
        #[arg(long, value_parser = parse_magnitude, value_delimiter = ',', default_value = "1e6")]
        n: Vec<u64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        shifts: Vec<i64>,
        #[arg(long, value_parser = parse_magnitude, default_value = "1000")]
        prime_cutoff: u64,
        #[arg(long, value_enum, default_value_t = WeightingArg::Uniform)]
        prime_weighting: WeightingArg,
    },

    /// Logarithmic (or Cesàro) density of one sign pattern
    Cylinder {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_enum, default_value_t = TableArg::Mobius)]
        table: TableArg,
        #[arg(long, value_parser = parse_magnitude, value_delimiter = ',', default_value = "1e6")]
        n: Vec<u64>,
        /// Pattern over {+,-,0}, e.g. "+-0" for ε_{−1}ε_0ε_{+1}
        #[arg(long, required = true)]
        word: String,
        #[arg(long, value_enum, default_value_t = AvgArg::Log)]
        avg: AvgArg,
    },

    /// Block complexity and special-word counts
    Complexity {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_parser = parse_magnitude, default_value = "1e8")]
        n: u64,
        #[arg(long, default_value_t = 16)]
        nmax: u32,
    },

    /// Gowers uniformity norm of a table segment on Z/NZ
    Gowers {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_enum, default_value_t = TableArg::Lambda)]
        table: TableArg,
        #[arg(long, value_parser = parse_magnitude, default_value = "1e4")]
        n: u64,
        /// Norm orders, comma-separated
        #[arg(long, value_delimiter = ',', default_value = "2")]
        k: Vec<u32>,
    },

    /// Hall–Petresco sequences in unipotent matrix groups
    Nilap {
        #[command(flatten)]
        common: CommonOpts,
        /// Coefficient file: {"dim": d, "coefficients": [matrix, …]},
        /// matrices as arrays of decimal-string rows
        #[arg(long, conflicts_with = "random_trials")]
        coeffs: Option<PathBuf>,
        /// Generate this many random sequences instead of reading a file
        #[arg(long)]
        random_trials: Option<u64>,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// Window "j_min:j_max"
        #[arg(long, value_parser = parse_window, default_value = "-5:6", allow_hyphen_values = true)]
        window: (i64, i64),
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Rotation-system averages and stationarity residuals
    Dynamics {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_enum)]
        op: DynamicsOp,
        /// Rotation number; decimal or preset ("golden", "sqrt2m1")
        #[arg(long, value_parser = parse_alpha, default_value = "golden")]
        alpha: f64,
        /// Observation start point on the circle
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        /// Character product as JSON pairs [[j, c], …]
        #[arg(long, value_parser = parse_terms, default_value = "[[1,1],[2,-1]]")]
        terms: CharacterTerms,
        /// Dilation factors (op = ap) or single r (op = stationarity)
        #[arg(long, value_delimiter = ',', default_value = "1")]
        r: Vec<u64>,
        #[arg(long, value_parser = parse_magnitude, value_delimiter = ',', default_value = "1e6")]
        n: Vec<u64>,
        #[arg(long, value_parser = parse_magnitude, default_value = "1e4")]
        prime_cutoff: u64,
        /// Residue modulus for op = prime-ap
        #[arg(long, default_value_t = 1)]
        d: u64,
        /// Block-frequency slope β for op = skew-probe
        #[arg(long, value_parser = parse_alpha, default_value = "golden")]
        beta: f64,
        #[arg(long, value_enum, default_value_t = AvgArg::Log)]
        avg: AvgArg,
        #[arg(long, value_enum, default_value_t = TableArg::Lambda)]
        table: TableArg,
        /// Window half-width for op = stationarity
        #[arg(long, default_value_t = 1)]
        m: u32,
    },

    /// Aggregate manifests from earlier runs into one summary
    Report {
        #[command(flatten)]
        common: CommonOpts,
        /// Manifest files to aggregate
        manifests: Vec<PathBuf>,
    },
}

#[derive(Clone, Debug)]
pub struct CharacterTerms(pub Vec<(i64, i64)>);

/// "1e8", "2.5e6", or a plain integer.
pub fn parse_magnitude(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if !v.is_finite() || v < 0.0 || v > 9.0e18 {
        return Err(format!("count out of range: {s}"));
    }
    let rounded = v.round();
    if (v - rounded).abs() > 1e-6 * v.abs().max(1.0) {
        return Err(format!("not an integral count: {s}"));
    }
    Ok(rounded as u64)
}

/// Decimal in [0,1)-ish or the presets "golden" ((√5−1)/2) and
/// "sqrt2m1" (√2−1).
pub fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.trim() {
        "golden" => Ok((5.0f64.sqrt() - 1.0) / 2.0),
        "sqrt2m1" => Ok(2.0f64.sqrt() - 1.0),
        other => other
            .parse::<f64>()
            .map_err(|_| format!("not a rotation number: {other}")),
    }
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("window must look like j_min:j_max, got {s}"))?;
    let lo: i64 = a.trim().parse().map_err(|_| format!("bad window start {a}"))?;
    let hi: i64 = b.trim().parse().map_err(|_| format!("bad window end {b}"))?;
    if lo > hi {
        return Err(format!("empty window {s}"));
    }
    Ok((lo, hi))
}

fn parse_terms(s: &str) -> Result<CharacterTerms, String> {
    let pairs: Vec<(i64, i64)> =
        serde_json::from_str(s).map_err(|e| format!("terms must be JSON pairs [[j,c],…]: {e}"))?;
    Ok(CharacterTerms(pairs))
}

/// Word over {+,-,0}; returns (half_width, letters).
pub fn parse_word(s: &str) -> Result<(u32, Vec<i8>), String> {
    let letters: Vec<i8> = s
        .chars()
        .map(|c| match c {
            '+' => Ok(1i8),
            '-' => Ok(-1i8),
            '0' => Ok(0i8),
            other => Err(format!("cylinder letters are +, -, 0; got {other}")),
        })
        .collect::<Result<_, _>>()?;
    if letters.len() % 2 == 0 {
        return Err("cylinder word length must be odd (2m+1 letters)".into());
    }
    Ok(((letters.len() / 2) as u32, letters))
}
