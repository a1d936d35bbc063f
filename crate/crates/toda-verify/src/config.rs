//! Run configuration and the small text formats accepted on the command line.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use toda_lump::sampling::DEFAULT_SEED;

use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Exact,
    Linearized,
    Fourier,
    Kernel,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Exact => "exact",
            Suite::Linearized => "linearized",
            Suite::Fourier => "fourier",
            Suite::Kernel => "kernel",
            Suite::All => "all",
        }
    }

    /// The concrete suites this selection runs, in report order.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Exact, Suite::Linearized, Suite::Fourier, Suite::Kernel],
            s => vec![s],
        }
    }

    pub fn parse(s: &str) -> Result<Suite, UsageError> {
        Ok(match s {
            "exact" => Suite::Exact,
            "linearized" => Suite::Linearized,
            "fourier" => Suite::Fourier,
            "kernel" => Suite::Kernel,
            "all" => Suite::All,
            other => return Err(UsageError(format!("unknown suite `{other}`"))),
        })
    }
}

/// Tolerance names understood by `--tol`, with their defaults.
pub const TOLERANCES: &[(&str, f64)] = &[
    ("toda", 1e-10),
    ("bilinear", 1e-12),
    ("backlund", 1e-12),
    ("exchange", 1e-10),
    ("lump_log", 1e-13),
    ("v_field", 1e-12),
    ("translation", 1e-10),
    ("annihilation", 1e-12),
    ("m1_pairs", 1e-10),
    ("l3", 1e-10),
    ("l4", 1e-10),
    ("pole", 1e-6),
    ("symbol_origin", 1e-10),
    ("gamma_product", 1e-14),
    ("small_xi", 1e-5),
    ("transforms", 1e-4),
    ("plug_back", 1e-7),
    ("identities", 1e-6),
    ("j_zeros", 1e-8),
    ("mean_zero", 1e-6),
    ("yi_residual", 1e-3),
    ("count_below", 2.0),
    ("gap_ratio", 10.0),
    ("angles", 0.05),
    ("refinement", 0.5),
    ("sigma3_spread", 0.2),
    ("parity", 1e-6),
    ("solver", 1e-6),
    ("mode_order", 3.5),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    /// # Panics
    /// On a name missing from [`TOLERANCES`]; names are fixed at compile time.
    pub fn get(&self, name: &str) -> f64 {
        *self.0.get(name).unwrap_or_else(|| panic!("unknown tolerance `{name}`"))
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), UsageError> {
        match self.0.get_mut(name) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(UsageError(format!(
                "unknown tolerance `{name}` (known: {})",
                TOLERANCES.iter().map(|t| t.0).collect::<Vec<_>>().join(", ")
            ))),
        }
    }
}

/// Parses `name=value` with a finite, positive value.
pub fn parse_tol(s: &str) -> Result<(String, f64), UsageError> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| UsageError(format!("expected name=value, got `{s}`")))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(UsageError(format!("bad tolerance name `{name}`")));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("bad tolerance value in `{s}`")))?;
    if !value.is_finite() || value <= 0.0 {
        return Err(UsageError(format!("tolerance `{name}` must be finite and positive")));
    }
    Ok((name.to_string(), value))
}

/// Parses an inclusive site range `lo:hi`.
pub fn parse_n_range(s: &str) -> Result<(i64, i64), UsageError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| UsageError(format!("expected lo:hi, got `{s}`")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| UsageError(format!("bad site index `{t}` in `{s}`")))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        return Err(UsageError(format!("empty site range {lo}:{hi}")));
    }
    // sites are shifted by ±2 inside the suites
    if lo < -1_000_000 || hi > 1_000_000 {
        return Err(UsageError(format!("site range {lo}:{hi} out of bounds")));
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv_dir: Option<PathBuf>,
    pub stdout_summary: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    /// Sample box for the pointwise suites, box of the kernel grid; `None`
    /// picks the suite default.
    pub half_width: Option<f64>,
    pub refine: usize,
    pub n_range: (i64, i64),
    pub parallel: bool,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

pub const SAMPLE_HALF_WIDTH: f64 = 5.0;
pub const KERNEL_HALF_WIDTH: f64 = 12.0;

impl RunConfig {
    pub fn new(suite: Suite) -> Self {
        RunConfig {
            suite,
            seed: DEFAULT_SEED,
            samples: 1000,
            half_width: None,
            refine: 4,
            n_range: (-3, 3),
            parallel: false,
            tolerances: Tolerances::default(),
            output: OutputConfig { json: None, csv_dir: None, stdout_summary: true },
        }
    }

    pub fn sample_half_width(&self) -> f64 {
        self.half_width.unwrap_or(SAMPLE_HALF_WIDTH)
    }

    pub fn kernel_half_width(&self) -> f64 {
        self.half_width.unwrap_or(KERNEL_HALF_WIDTH)
    }

    /// Checks the invariants and that the output locations can be written.
    pub fn validate(&self) -> Result<(), UsageError> {
        if self.samples == 0 {
            return Err(UsageError("--samples must be at least 1".into()));
        }
        if self.refine < 2 {
            return Err(UsageError("--refine must be at least 2".into()));
        }
        if let Some(l) = self.half_width {
            if !l.is_finite() || l <= 0.0 {
                return Err(UsageError("--half-width must be finite and positive".into()));
            }
        }
        if self.n_range.0 > self.n_range.1 {
            return Err(UsageError("empty --n-range".into()));
        }
        if let Some(p) = &self.output.json {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            check_writable(dir)?;
            if p.is_dir() {
                return Err(UsageError(format!("--json {} is a directory", p.display())));
            }
        }
        if let Some(d) = &self.output.csv_dir {
            fs::create_dir_all(d).map_err(|e| UsageError(format!("--csv-dir {}: {e}", d.display())))?;
            check_writable(d)?;
        }
        Ok(())
    }
}

fn check_writable(dir: &Path) -> Result<(), UsageError> {
    tempfile::NamedTempFile::new_in(dir)
        .map(drop)
        .map_err(|e| UsageError(format!("{} is not writable: {e}", dir.display())))
}
