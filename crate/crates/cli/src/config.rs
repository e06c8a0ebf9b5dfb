//! Run configuration shared by the command line and JSON config files.
//!
//! Config-file keys are the long flag names (`tol-el`, `max-iter`, ...). Values given on the
//! command line win over the file; `SPSS_SEED` wins over both.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Deserializer};
use spss_core::io::{parse_real, parse_value_list};
use spss_core::{ModelParams, SolveOptions};

pub const SEED_ENV: &str = "SPSS_SEED";

/// A real number; accepts `p/q` fractions on the command line and numbers or strings in JSON.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl FromStr for Real {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        parse_real(s).map(Real).map_err(|e| e.to_string())
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() => Ok(Real(v)),
            Raw::Num(v) => Err(serde::de::Error::custom(format!("non-finite number {v}"))),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Comma-separated reals on the command line; an array or a comma-separated string in JSON.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueList(pub Vec<f64>);

impl FromStr for ValueList {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        parse_value_list(s).map(ValueList).map_err(|e| e.to_string())
    }
}

impl<'de> Deserialize<'de> for ValueList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<Real>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) if v.is_empty() => Err(serde::de::Error::custom("empty value list")),
            Raw::List(v) => Ok(ValueList(v.into_iter().map(|r| r.0).collect())),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand the file is meant for; must match the invoked one when present.
    #[arg(skip)]
    pub subcommand: Option<String>,

    /// JSON config file; keys are the long flag names.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, help_heading = "Model")]
    pub alpha: Option<Real>,
    #[arg(long, help_heading = "Model")]
    pub coupling: Option<Real>,
    #[arg(long, help_heading = "Model")]
    pub mass: Option<Real>,

    /// Sweep values of alpha.
    #[arg(long, help_heading = "Sweep")]
    pub alphas: Option<ValueList>,
    #[arg(long, help_heading = "Sweep")]
    pub couplings: Option<ValueList>,
    #[arg(long, help_heading = "Sweep")]
    pub masses: Option<ValueList>,
    /// Relative half-width of the band around a threshold with no prediction [default: 0.1].
    #[arg(long, help_heading = "Sweep")]
    pub band: Option<Real>,
    /// Energies below minus this value count as negative [default: 1e-5].
    #[arg(long, help_heading = "Sweep")]
    pub negative_threshold: Option<Real>,

    /// Outer radius R [default: 40].
    #[arg(long, help_heading = "Solver")]
    pub radius: Option<Real>,
    /// Number of grid intervals N [default: 4000].
    #[arg(long, help_heading = "Solver")]
    pub intervals: Option<usize>,
    /// Stationarity tolerance [default: 1e-6].
    #[arg(long, help_heading = "Solver")]
    pub tol_el: Option<Real>,
    /// [default: 50000]
    #[arg(long, help_heading = "Solver")]
    pub max_iter: Option<usize>,
    /// Seed for random starts [default: 0; env SPSS_SEED overrides].
    #[arg(long, help_heading = "Solver")]
    pub seed: Option<u64>,
    /// Parallel solves [default: 1].
    #[arg(long, help_heading = "Solver")]
    pub jobs: Option<usize>,
    /// Move the grid to the best dilation scale of the start [default: true].
    #[arg(long, help_heading = "Solver")]
    pub adapt_grid: Option<bool>,
    /// Starting profile: gaussian, exponential, shell, cut-gaussian or random [default: gaussian].
    #[arg(long, help_heading = "Solver")]
    pub init: Option<String>,
    /// Width of the starting profile [default: 1].
    #[arg(long, help_heading = "Solver")]
    pub width: Option<Real>,
    /// Field CSV to start from (warm start); overrides --init.
    #[arg(long, value_name = "FILE", help_heading = "Solver")]
    pub init_field: Option<PathBuf>,

    /// Verification suite: scaling, virial, subadditivity, cubic, j-scaling, lions or all.
    #[arg(long, help_heading = "Verify")]
    pub suite: Option<String>,
    /// Split masses for the subadditivity suite.
    #[arg(long, help_heading = "Verify")]
    pub splits: Option<ValueList>,
    /// Largest bump count tried [default: 1048576].
    #[arg(long, help_heading = "Bumps")]
    pub n_max: Option<usize>,

    /// Main output file [default: standard output].
    #[arg(long, value_name = "FILE", help_heading = "Output")]
    pub out: Option<PathBuf>,
    /// Field CSV output [default: next to --out with extension .csv].
    #[arg(long, value_name = "FILE", help_heading = "Output")]
    pub field_out: Option<PathBuf>,
}

pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_run_config(&text).with_context(|| format!("parsing {}", path.display()))
}

macro_rules! overlay {
    ($hi:ident, $lo:ident, $($f:ident),*) => {
        RunConfig { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl RunConfig {
    /// Fields set in `self` win; the rest come from `lower`.
    pub fn over(self, lower: RunConfig) -> RunConfig {
        let hi = self;
        let lo = lower;
        overlay!(
            hi, lo, subcommand, config, alpha, coupling, mass, alphas, couplings, masses, band,
            negative_threshold, radius, intervals, tol_el, max_iter, seed, jobs, adapt_grid, init,
            width, init_field, suite, splits, n_max, out, field_out
        )
    }

    /// Loads the config file (if any), applies the flags on top and the seed variable last.
    pub fn resolve(self, command: &str, seed_env: Option<&str>) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => read_run_config(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &file.subcommand {
            if s != command {
                bail!("config file is for `{s}`, not `{command}`");
            }
        }
        let mut cfg = self.over(file);
        if let Some(s) = seed_env {
            let seed = s
                .trim()
                .parse()
                .with_context(|| format!("{SEED_ENV} must be an unsigned integer, got `{s}`"))?;
            cfg.seed = Some(seed);
        }
        Ok(cfg)
    }

    pub fn require(&self, value: Option<Real>, flag: &str) -> Result<f64> {
        match value {
            Some(v) => Ok(v.0),
            None => bail!("missing required option --{flag}"),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        let alpha = self.require(self.alpha, "alpha")?;
        let coupling = self.require(self.coupling, "coupling")?;
        let mass = self.require(self.mass, "mass")?;
        Ok(ModelParams::new(alpha, coupling, mass)?)
    }

    pub fn solve_options(&self) -> Result<SolveOptions> {
        let d = SolveOptions::default();
        let opts = SolveOptions {
            tol_el: self.tol_el.map_or(d.tol_el, |r| r.0),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            seed: self.seed.unwrap_or(d.seed),
            radius: self.radius.map_or(d.radius, |r| r.0),
            intervals: self.intervals.unwrap_or(d.intervals),
            adapt_grid: self.adapt_grid.unwrap_or(d.adapt_grid),
            ..d
        };
        opts.validate()?;
        Ok(opts)
    }

    pub fn jobs(&self) -> Result<usize> {
        match self.jobs.unwrap_or(1) {
            0 => bail!("--jobs must be at least 1"),
            j => Ok(j),
        }
    }

    /// Where the field CSV goes: `--field-out`, else `--out` with extension `.csv`.
    pub fn field_path(&self) -> Option<PathBuf> {
        self.field_out
            .clone()
            .or_else(|| self.out.as_ref().map(|p| p.with_extension("csv")))
    }
}
