//! Run configuration: a TOML file merged with command-line flags, flags winning.
//!
//! Every key of the file is optional and mirrors a long flag:
//!
//! ```toml
//! dim = 3
//! matrix = "[[0,-1,1],[1,0,0],[0,1,0]]"   # literal, "@path" to a file, or "factory"
//! conjugator = "[[1,-2,3],[0,1,-2],[0,0,1]]"
//! power = 7
//! n_max = 10
//! tolerance = 1e-8
//! prime_budget = 500
//! target_bound = "1e20"
//! seed = 0
//! jobs = 4
//! out = "transdeg-out"
//! ```

use std::path::{Path, PathBuf};

use clap::Args;
use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use transdeg::factory::construct_polynomial;
use transdeg_core::{IntPolynomial, IntegerMatrix};

use crate::exit::{CliError, Exit};

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// TOML file with default values for any of the flags below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Dimension `d >= 3`.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Matrix literal `[[..],[..]]`, `@path` to a file holding one, or `factory`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// Unimodular conjugator `Y`; the pipelines then use `Y M Y^-1`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub conjugator: Option<String>,
    /// Power `N` applied to the (conjugated) matrix.
    #[arg(long, global = true)]
    pub power: Option<u64>,
    /// Last iterate in degree tables; number of convergents for `diagnose`.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Target width of the dynamical-degree enclosure.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Primes tried per certificate search.
    #[arg(long, global = true)]
    pub prime_budget: Option<usize>,
    /// Index bound for the recurrence scan, e.g. `1e20` or `10^20`.
    #[arg(long, global = true)]
    pub target_bound: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// The file form of [`Flags`].
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dim: Option<usize>,
    matrix: Option<String>,
    conjugator: Option<String>,
    power: Option<u64>,
    n_max: Option<usize>,
    tolerance: Option<f64>,
    prime_budget: Option<usize>,
    target_bound: Option<TomlBound>,
    seed: Option<u64>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum TomlBound {
    Int(u64),
    Text(String),
}

/// Validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dim: usize,
    pub matrix: Option<IntegerMatrix>,
    pub conjugator: Option<IntegerMatrix>,
    pub power: u64,
    pub n_max: Option<usize>,
    pub tolerance: f64,
    pub prime_budget: usize,
    pub target_bound: BigInt,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out: PathBuf,
}

/// Echo of the configuration written into every bundle.
#[derive(Serialize)]
pub struct ConfigEcho {
    pub dim: usize,
    pub matrix: Option<String>,
    pub conjugator: Option<String>,
    pub power: u64,
    pub n_max: Option<usize>,
    pub tolerance: f64,
    pub prime_budget: usize,
    pub target_bound: String,
    pub seed: u64,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::new(Exit::Validation, msg)
}

/// Parses `123`, `1e20` or `10^20`.
pub fn parse_bound(s: &str) -> Result<BigInt, CliError> {
    let s = s.trim();
    let bad = || invalid(format!("bad bound {s:?}"));
    let pow = |base: &str, exp: &str| -> Result<BigInt, CliError> {
        let b: BigInt = base.parse().map_err(|_| bad())?;
        let e: u32 = exp.parse().map_err(|_| bad())?;
        Ok(b.pow(e))
    };
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        Ok(m.parse::<BigInt>().map_err(|_| bad())? * pow("10", e)?)
    } else if let Some((b, e)) = s.split_once('^') {
        pow(b, e)
    } else {
        s.parse().map_err(|_| bad())
    }
}

fn parse_matrix(text: &str, what: &str) -> Result<IntegerMatrix, CliError> {
    let literal = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {what} file {path}: {e}")))?,
        None => text.to_string(),
    };
    literal.trim().parse().map_err(|e| invalid(format!("{what}: {e}")))
}

pub fn parse_polynomial(text: &str) -> Result<IntPolynomial, CliError> {
    text.parse().map_err(|e| invalid(format!("polynomial {text:?}: {e}")))
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let bound_text = match (&flags.target_bound, file.target_bound) {
            (Some(s), _) => s.clone(),
            (None, Some(TomlBound::Int(n))) => n.to_string(),
            (None, Some(TomlBound::Text(s))) => s,
            (None, None) => "1e20".into(),
        };
        let seed = flags.seed.or(file.seed).unwrap_or(0);
        let dim_hint = flags.dim.or(file.dim);
        let matrix = match flags.matrix.clone().or(file.matrix) {
            None => None,
            Some(m) if m.trim() == "factory" => {
                let d = dim_hint.unwrap_or(3);
                let result = construct_polynomial(d, seed).map_err(CliError::from)?;
                Some(IntegerMatrix::companion(&result.polynomial()).map_err(|e| invalid(e.to_string()))?)
            }
            Some(m) => Some(parse_matrix(&m, "matrix")?),
        };
        let conjugator = flags.conjugator.clone().or(file.conjugator).map(|c| parse_matrix(&c, "conjugator")).transpose()?;
        let dim = match (&matrix, dim_hint) {
            (Some(m), Some(d)) if m.dim() != d => {
                return Err(invalid(format!("--dim {d} does not match the {0}x{0} matrix", m.dim())));
            }
            (Some(m), _) => m.dim(),
            (None, d) => d.unwrap_or(3),
        };
        let config = RunConfig {
            dim,
            matrix,
            conjugator,
            power: flags.power.or(file.power).unwrap_or(1),
            n_max: flags.n_max.or(file.n_max),
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(1e-8),
            prime_budget: flags.prime_budget.or(file.prime_budget).unwrap_or(500),
            target_bound: parse_bound(&bound_text)?,
            seed,
            jobs: flags.jobs.or(file.jobs),
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("transdeg-out")),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.dim < 3 {
            return Err(invalid(format!("dimension {} is too small (need at least 3)", self.dim)));
        }
        if self.power == 0 {
            return Err(invalid("--power must be positive"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(invalid("--tolerance must be positive"));
        }
        if self.prime_budget == 0 {
            return Err(invalid("--prime-budget must be positive"));
        }
        if !self.target_bound.is_positive() {
            return Err(invalid("--target-bound must be positive"));
        }
        if self.jobs == Some(0) {
            return Err(invalid("--jobs must be positive"));
        }
        for (name, m) in [("matrix", &self.matrix), ("conjugator", &self.conjugator)] {
            if let Some(m) = m {
                if m.dim() != self.dim {
                    return Err(invalid(format!("{name} has dimension {}, expected {}", m.dim(), self.dim)));
                }
            }
        }
        if let Some(m) = &self.matrix {
            if !m.is_sl() {
                return Err(invalid(format!("matrix is not in SL_{}(Z): determinant {}", self.dim, m.det())));
            }
        }
        if let Some(y) = &self.conjugator {
            if !y.is_unimodular() {
                return Err(invalid(format!("conjugator is not unimodular: determinant {}", y.det())));
            }
        }
        Ok(())
    }

    pub fn require_matrix(&self) -> Result<&IntegerMatrix, CliError> {
        self.matrix.as_ref().ok_or_else(|| invalid("no matrix given (use --matrix or the config file)"))
    }

    /// `Y M Y^-1`, or the matrix itself without a conjugator.
    pub fn conjugated(&self) -> Result<IntegerMatrix, CliError> {
        let m = self.require_matrix()?;
        match &self.conjugator {
            Some(y) => m.conjugate_by(y).map_err(|e| invalid(e.to_string())),
            None => Ok(m.clone()),
        }
    }

    /// The matrix driving the map: the conjugated matrix to the power `N`.
    pub fn target(&self) -> Result<IntegerMatrix, CliError> {
        Ok(self.conjugated()?.pow(self.power))
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            dim: self.dim,
            matrix: self.matrix.as_ref().map(|m| m.to_string()),
            conjugator: self.conjugator.as_ref().map(|m| m.to_string()),
            power: self.power,
            n_max: self.n_max,
            tolerance: self.tolerance,
            prime_budget: self.prime_budget,
            target_bound: self.target_bound.to_string(),
            seed: self.seed,
        }
    }
}
