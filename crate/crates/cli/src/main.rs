mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "mmes",
    version,
    about = "Exact cumulants, sampling and ground-state search for the potential of multipartite entanglement",
    after_help = "Dense-state commands refuse registers above 14 qubits unless MMES_MAX_QUBITS raises the cap."
)]
pub struct Cli {
    /// Worker threads for parallel kernels (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact and asymptotic cumulants of the potential over Haar states.
    Cumulants(CumulantsArgs),
    /// Histogram of the potential over Haar states, optionally reweighted to β.
    Sample(SampleArgs),
    /// Ground-state search by annealing or over ±1 amplitude states.
    Search(SearchArgs),
    /// Bipartition coupling table and its symmetry checks.
    Coupling(CouplingArgs),
    /// Saddle-point constants of the large-N expansion.
    Saddle(SaddleArgs),
    /// Fast invariant suite; exits nonzero on any failure.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Reduced,
    Bitsum,
}

#[derive(Args, Debug)]
pub struct CumulantsArgs {
    /// Number of qubits.
    #[arg(long)]
    pub n: u32,
    /// Exact rational values only.
    #[arg(long, group = "which")]
    pub exact: bool,
    /// Leading large-N values only.
    #[arg(long, group = "which")]
    pub asymptotic: bool,
    /// Exact and asymptotic values (default).
    #[arg(long, group = "which")]
    pub both: bool,
    /// Route for the structure functions.
    #[arg(long, value_enum, default_value_t = Form::Reduced)]
    pub form: Form,
    /// Output JSON path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleFormat {
    /// `lower_edge,density` CSV plus a `.meta.json` sidecar.
    Csv,
    /// One JSON document with bins, standard errors and metadata.
    Json,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: u32,
    /// Number of Haar samples.
    #[arg(long, default_value_t = 500_000)]
    pub samples: usize,
    /// Histogram bin width.
    #[arg(long, default_value_t = 3e-3)]
    pub bin_width: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inverse temperature; nonzero values reweight the samples by e^{-βH}.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = SampleFormat::Csv)]
    pub format: SampleFormat,
    /// Output path. CSV output also writes `<stem>.meta.json` next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RampArg {
    Geometric,
    Linear,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: u32,
    /// Search over states with amplitudes ±N^{-1/2} (n ≤ 6).
    #[arg(long)]
    pub binary: bool,
    /// Sign-flip proposals available to the ±1 search.
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta_start: f64,
    #[arg(long, default_value_t = 1e5)]
    pub beta_end: f64,
    /// Number of inverse temperatures in the ramp.
    #[arg(long, default_value_t = 60)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = RampArg::Geometric)]
    pub ramp: RampArg,
    #[arg(long, default_value_t = 200)]
    pub moves_per_beta: usize,
    /// Independent annealing restarts.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Iteration cap of the descent polish after each restart.
    #[arg(long, default_value_t = 20_000)]
    pub polish_iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output JSON path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CouplingArgs {
    #[arg(long)]
    pub n: u32,
    /// Check the coupling symmetries on random quadruples instead of
    /// printing the table; exits nonzero on a violation.
    #[arg(long)]
    pub check_symmetries: bool,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SaddleArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest register size swept.
    #[arg(long, default_value_t = mmes_core::selftest::DEFAULT_SELFTEST_MAX_N)]
    pub max_n: u32,
    #[arg(long, hide = true)]
    pub corrupt_ghat: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
