use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toda_verify::config::{parse_n_range, parse_tol, RunConfig, Suite};
use toda_verify::{run, RunError};

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "toda-verify", version, about = "Verification suites for the 2+1 Toda lump")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one of the pointwise or Fourier-side suites.
    Verify {
        /// exact, linearized or fourier.
        suite: Option<String>,
        #[arg(long = "suite", value_name = "SUITE")]
        suite_flag: Option<String>,
    },
    /// Near-kernel of the discretized linearized operator.
    Kernel,
    /// Every suite, in order.
    Report,
}

#[derive(Args, Debug)]
struct Opts {
    #[arg(long, global = true, env = "TODA_VERIFY_SAMPLES")]
    samples: Option<usize>,
    #[arg(long, global = true, env = "TODA_VERIFY_SEED")]
    seed: Option<u64>,
    /// Sample box for the pointwise suites, box of the kernel grid.
    #[arg(long, global = true, env = "TODA_VERIFY_HALF_WIDTH")]
    half_width: Option<f64>,
    /// Grid nodes per lattice shift.
    #[arg(long, global = true, env = "TODA_VERIFY_REFINE")]
    refine: Option<usize>,
    /// Override a tolerance, NAME=VALUE; repeatable.
    #[arg(long = "tol", global = true, env = "TODA_VERIFY_TOL", value_delimiter = ',', value_parser = tol_arg)]
    tol: Vec<(String, f64)>,
    #[arg(long, global = true, env = "TODA_VERIFY_JSON")]
    json: Option<PathBuf>,
    #[arg(long, global = true, env = "TODA_VERIFY_CSV_DIR")]
    csv_dir: Option<PathBuf>,
    #[arg(long, global = true, env = "TODA_VERIFY_PARALLEL")]
    parallel: bool,
    /// Inclusive site range LO:HI.
    #[arg(long, global = true, env = "TODA_VERIFY_N_RANGE", value_parser = n_range_arg, allow_hyphen_values = true)]
    n_range: Option<(i64, i64)>,
    /// Suppress the per-check summary on stdout.
    #[arg(long, global = true, env = "TODA_VERIFY_QUIET")]
    quiet: bool,
}

fn tol_arg(s: &str) -> Result<(String, f64), String> {
    parse_tol(s).map_err(|e| e.0)
}

fn n_range_arg(s: &str) -> Result<(i64, i64), String> {
    parse_n_range(s).map_err(|e| e.0)
}

fn verify_suite(positional: Option<String>, flag: Option<String>) -> Result<Suite, String> {
    let name = match (positional, flag) {
        (Some(a), Some(b)) if a != b => return Err(format!("suite given twice: `{a}` and `{b}`")),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err("verify needs a suite: exact, linearized or fourier".into()),
    };
    match Suite::parse(&name).map_err(|e| e.0)? {
        s @ (Suite::Exact | Suite::Linearized | Suite::Fourier) => Ok(s),
        _ => Err(format!("`verify` runs exact, linearized or fourier, not `{name}`")),
    }
}

fn config(cli: Cli) -> Result<RunConfig, String> {
    let suite = match cli.command {
        Command::Verify { suite, suite_flag } => verify_suite(suite, suite_flag)?,
        Command::Kernel => Suite::Kernel,
        Command::Report => Suite::All,
    };
    let o = cli.opts;
    let mut cfg = RunConfig::new(suite);
    if let Some(v) = o.samples {
        cfg.samples = v;
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    cfg.half_width = o.half_width;
    if let Some(v) = o.refine {
        cfg.refine = v;
    }
    if let Some(v) = o.n_range {
        cfg.n_range = v;
    }
    for (name, value) in o.tol {
        cfg.tolerances.set(&name, value).map_err(|e| e.0)?;
    }
    cfg.parallel = o.parallel;
    cfg.output.json = o.json;
    cfg.output.csv_dir = o.csv_dir;
    cfg.output.stdout_summary = !o.quiet;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cfg = match config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(&cfg) {
        Ok(out) => {
            if cfg.output.stdout_summary {
                print!("{}", out.report.summary());
                for f in &out.csv_files {
                    println!("wrote {}", f.display());
                }
            }
            if out.report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(RunError::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
