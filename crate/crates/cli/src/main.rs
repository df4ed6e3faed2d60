//! `orbitsep`: runs the invariance, separation, Galois, bad-set, Veronese,
//! sort-separator, point-cloud and MRA suites.
//!
//! Exit codes: 0 all checks passed, 1 violations found (witnesses are in the
//! report), 2 usage or I/O error, 3 resource cap hit.

mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::{emit_report, unix_time, write_manifest, CliError, Format, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "orbitsep", version, about = "Orbit-separation suites for group-invariant features")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Check f(g x) = f(x) for random points and group elements.
    Invariance(SuiteArgs),
    /// Compare feature equality with the brute-force orbit oracle.
    Separation(SuiteArgs),
    /// Enumerate the product group and find the fixers of f*.
    GaloisCheck(GaloisArgs),
    /// Test random symmetric matrices (or one given matrix) for bad-set membership.
    Badset(BadsetArgs),
    /// Veronese separators on C^2 against the scalar root-of-unity action.
    Veronese(VeroneseArgs),
    /// Sort-based separators under row permutations.
    Sortsep(SortArgs),
    /// Point-cloud invariants under translations, O(d) and relabeling.
    Pointcloud(CloudArgs),
    /// Multi-reference alignment sample-complexity sweep.
    Mra(MraArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Base seed; every random draw derives from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; does not affect results.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Common {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Diagonal and off-diagonal power sums plus f* on symmetric matrices.
    Conjugation,
    /// Diagonal and off-diagonal power sums only.
    DiagOffdiag,
    /// The raw diagonal; not invariant.
    RawDiagonal,
    /// Mean, power spectrum and bispectrum of signals.
    Fourier,
    /// Veronese separators (uses --n, --j).
    Veronese,
    /// Sort separators on n x d matrices (uses --n, --d, --count).
    Sort,
    /// Centered Gram invariants of d x n point clouds.
    Cloud,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SuiteArgs {
    #[arg(long, value_enum, default_value_t = Family::Conjugation)]
    pub family: Family,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Number of sort separators; defaults to 2nd+1.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Relative tolerance for feature equality.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GaloisArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Random integer points per group element.
    #[arg(long, default_value_t = orbitsep::galois::DEFAULT_PIT_TRIALS)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BadsetArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    /// Residuals at most this times the largest |f*| count as zero.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Check a single matrix given as JSON {"n":..,"diag":[..],"offdiag":[..]}.
    #[arg(long)]
    pub matrix: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VeroneseArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Pairs compared by the collision search.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SortArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Number of separators; defaults to 2nd+1.
    #[arg(long)]
    pub count: Option<usize>,
    /// Use nd+1 separators.
    #[arg(long, conflicts_with = "count")]
    pub generic: bool,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CloudArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Relative tolerance for feature equality.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Relative residual below which two clouds are in one orbit.
    #[arg(long, default_value_t = orbitsep::pointcloud::DEFAULT_ALIGN_TOL)]
    pub align_tol: f64,
    /// CSV point cloud (header x0,...,x{d-1}); prints its invariants.
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    /// Second cloud to align against --cloud.
    #[arg(long, requires = "cloud")]
    pub compare: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MraArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated noise levels.
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    #[arg(long)]
    pub target_error: Option<f64>,
    #[arg(long)]
    pub max_samples: Option<usize>,
    /// Repetitions per noise level.
    #[arg(long)]
    pub trials: Option<usize>,
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 4.5)]
    pub slope_min: f64,
    #[arg(long, default_value_t = 7.5)]
    pub slope_max: f64,
    #[command(flatten)]
    pub common: Common,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Invariance(a) | Command::Separation(a) => &a.common,
            Command::GaloisCheck(a) => &a.common,
            Command::Badset(a) => &a.common,
            Command::Veronese(a) => &a.common,
            Command::Sortsep(a) => &a.common,
            Command::Pointcloud(a) => &a.common,
            Command::Mra(a) => &a.common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Invariance(_) => "invariance",
            Command::Separation(_) => "separation",
            Command::GaloisCheck(_) => "galois-check",
            Command::Badset(_) => "badset",
            Command::Veronese(_) => "veronese",
            Command::Sortsep(_) => "sortsep",
            Command::Pointcloud(_) => "pointcloud",
            Command::Mra(_) => "mra",
        }
    }
}

fn run(command: &Command) -> Result<i32, CliError> {
    let started_at = unix_time();
    let common = command.common();
    let outcome = match command {
        Command::Invariance(a) => suites::invariance(a),
        Command::Separation(a) => suites::separation(a),
        Command::GaloisCheck(a) => suites::galois_check(a),
        Command::Badset(a) => suites::badset(a),
        Command::Veronese(a) => suites::veronese(a),
        Command::Sortsep(a) => suites::sortsep(a),
        Command::Pointcloud(a) => suites::pointcloud(a),
        Command::Mra(a) => suites::mra(a),
    }?;
    eprintln!("{}: {}", command.name(), outcome.summary);
    emit_report(&outcome, common.format, common.out.as_deref())?;
    let code = outcome.status.exit_code();
    if let Some(out) = &common.out {
        let manifest = RunManifest {
            subcommand: command.name().to_string(),
            args: serde_json::to_value(command).unwrap_or_default(),
            seed: common.seed(),
            version: env!("CARGO_PKG_VERSION"),
            started_at,
            finished_at: unix_time(),
            outputs: vec![out.display().to_string()],
            exit_code: code,
        };
        write_manifest(&manifest, out)?;
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.command.common().threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
