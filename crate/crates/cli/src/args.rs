use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Parser)]
#[command(name = "curveflow", version, about = "Euler flows on a quadratic space curve")]
pub struct Cli {
    /// Gas and potential as JSON (keys R, n, k, g, lambda, potential).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Integration or quadrature tolerance; each command has its own default.
    #[arg(long, global = true, value_name = "REAL")]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn name(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the cross-verification suite and report every property.
    Verify(VerifyArgs),
    /// Equilibria of the planar flow-temperature field.
    FixedPoints(PlaneArgs),
    /// Direction field, trajectories and fixed points of the planar field.
    Portrait(PortraitArgs),
    /// Tabulate an exact Euler solution with its residuals.
    Solution(SolutionArgs),
    /// Integrate the zeroth- or first-order terms of the virial expansion.
    Expand(ExpandArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restrict the Euler checks to one solution family.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub family: Option<u8>,
    /// Seed for the sampled points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PlaneArgs {
    /// Coefficient A of the planar field.
    #[arg(short = 'A', allow_negative_numbers = true)]
    pub a: f64,
    /// Coefficient B of the planar field.
    #[arg(short = 'B', allow_negative_numbers = true)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct PortraitArgs {
    #[command(flatten)]
    pub plane: PlaneArgs,
    /// y0,y1,n0,n1
    #[arg(long, allow_hyphen_values = true, default_value = "-1,3,-2,2")]
    pub window: List,
    /// Direction-field grid size as ny,nn.
    #[arg(long, default_value = "21,21")]
    pub grid: List,
    /// Seed points, one `y,N0` pair per line.
    #[arg(long, value_name = "FILE")]
    pub seeds: Option<PathBuf>,
    /// Number of random seeds when no seed file is given.
    #[arg(long, default_value_t = 12)]
    pub seed_count: usize,
    /// Seed for the random seed points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Integration length in each direction.
    #[arg(long, default_value_t = 10.0)]
    pub s_max: f64,
    /// Output samples per trajectory piece.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct SolutionArgs {
    /// Solution family; family 2 needs n != 2.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub family: u8,
    /// c1,c2,c3,c4,c5
    #[arg(long, allow_hyphen_values = true, default_value = "1,2,0,0,0")]
    pub constants: List,
    /// Grid size as nt,na.
    #[arg(long, default_value = "20,20")]
    pub grid: List,
    /// t0,t1; defaults to the middle 90% of the validity interval.
    #[arg(long, allow_hyphen_values = true)]
    pub t_range: Option<List>,
    /// a0,a1
    #[arg(long, allow_hyphen_values = true, default_value = "0.5,3")]
    pub a_range: List,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Expansion order, 0 or 1.
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    /// Coefficients of A1(y) in increasing powers of y; defaults to the first
    /// virial coefficient of the configured potential, or zero.
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<List>,
    /// c1,c2,c3 of the zeroth-order term.
    #[arg(long, allow_hyphen_values = true, default_value = "2,1,2")]
    pub constants: List,
    /// y0,y1
    #[arg(long, allow_hyphen_values = true, default_value = "1,3")]
    pub y_range: List,
    /// N0 at the start of the y-range.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    pub n0: f64,
    /// M1,N1,L1,K1 at the start of the y-range.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,0,0")]
    pub state: List,
    /// Number of output rows.
    #[arg(long, default_value_t = 41)]
    pub samples: usize,
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq)]
pub struct List(pub Vec<f64>);

impl FromStr for List {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

impl List {
    /// Exactly `N` entries, or a message naming the flag.
    pub fn fixed<const N: usize>(&self, flag: &str) -> Result<[f64; N], String> {
        <[f64; N]>::try_from(self.0.as_slice())
            .map_err(|_| format!("--{flag} takes {N} comma-separated values, got {}", self.0.len()))
    }
}
