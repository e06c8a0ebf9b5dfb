use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use spss_core::bumps::{bump_scan, default_eta, lattice_coulomb};
use spss_core::constants::constants_report;
use spss_core::io::{read_field, write_field, write_field_csv};
use spss_core::phase::{sweep as run_sweep, PhaseConfig, PhasePoint};
use spss_core::profiles::Profile;
use spss_core::{functionals, minimizer, Init, ModelParams, Status};

use crate::config::RunConfig;
use crate::emit;
use crate::verify::{run_suite, Suite};

const DEFAULT_N_MAX: usize = 1 << 20;

fn init_of(cfg: &RunConfig) -> Result<Init> {
    if let Some(path) = &cfg.init_field {
        return Ok(Init::Field(read_field(path)?));
    }
    let width = cfg.width.map_or(1.0, |w| w.0);
    match cfg.init.as_deref().unwrap_or("gaussian") {
        "random" => Ok(Init::Random),
        name => Ok(Init::Profile {
            profile: name.parse::<Profile>()?,
            width,
        }),
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn minimize(cfg: &RunConfig) -> Result<i32> {
    let params = cfg.params()?;
    let opts = cfg.solve_options()?;
    let init = init_of(cfg)?;
    let rep = minimizer::minimize(&params, &init, &opts)?;
    emit(cfg.out.as_deref(), &json(&rep)?)?;
    if let (Some(path), Some(field)) = (cfg.field_path(), rep.field.as_ref()) {
        write_field(&path, field).with_context(|| format!("writing {}", path.display()))?;
    }
    if rep.status == Status::Maxiter {
        eprintln!(
            "warning: no convergence after {} iterations (residual {:e})",
            rep.iterations, rep.el_residual
        );
        return Ok(2);
    }
    Ok(0)
}

pub fn constants(cfg: &RunConfig) -> Result<i32> {
    let alpha = cfg.require(cfg.alpha, "alpha")?;
    let opts = cfg.solve_options()?;
    let rep = constants_report(alpha, cfg.coupling.map(|c| c.0), &opts)?;
    emit(cfg.out.as_deref(), &json(&rep)?)?;
    if let Some(path) = &cfg.field_out {
        if let Some(f) = &rep.maximizer {
            write_field(path, f)?;
        }
    }
    Ok(0)
}

fn sweep_csv(points: &[PhasePoint]) -> String {
    let mut out = String::from("alpha,C,M,I_hat,status,numeric_class,predicted_class,agrees,margin\n");
    for p in points {
        let status = p.status.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            p.alpha, p.coupling, p.mass, p.i_hat, status, p.numeric_class, p.predicted_class, p.agrees, p.margin
        );
    }
    out
}

pub fn sweep(cfg: &RunConfig) -> Result<i32> {
    let list = |v: &Option<crate::config::ValueList>, flag: &str| match v {
        Some(l) => Ok(l.0.clone()),
        None => Err(anyhow::anyhow!("missing required option --{flag}")),
    };
    let alphas = list(&cfg.alphas, "alphas")?;
    let couplings = list(&cfg.couplings, "couplings")?;
    let masses = list(&cfg.masses, "masses")?;
    let d = PhaseConfig::default();
    let phase = PhaseConfig {
        band: cfg.band.map_or(d.band, |b| b.0),
        negative_threshold: cfg.negative_threshold.map_or(d.negative_threshold, |t| t.0),
    };
    if !(phase.band >= 0.0 && phase.negative_threshold >= 0.0) {
        bail!("--band and --negative-threshold must be nonnegative");
    }
    let opts = cfg.solve_options()?;
    let points = run_sweep(&alphas, &couplings, &masses, &opts, &phase, cfg.jobs()?)?;
    emit(cfg.out.as_deref(), &sweep_csv(&points))?;
    Ok(0)
}

pub fn verify(cfg: &RunConfig) -> Result<i32> {
    let name = cfg.suite.as_deref().context("missing required option --suite")?;
    let suite: Suite = name.parse()?;
    let summary = run_suite(suite, cfg)?;
    emit(cfg.out.as_deref(), &json(&summary)?)?;
    for c in summary.checks.iter().filter(|c| !c.passed) {
        eprintln!("failed: {}", c.name);
    }
    Ok(if summary.passed { 0 } else { 1 })
}

pub fn bumps(cfg: &RunConfig) -> Result<i32> {
    let params: ModelParams = cfg.params()?;
    let eta = default_eta(params.mass)?;
    let scan = bump_scan(&eta, &params, cfg.n_max.unwrap_or(DEFAULT_N_MAX))?;
    let d_eta = functionals::coulomb_energy(&eta);
    let mut out = String::from("n,kinetic,coulomb_bound,coulomb_lattice,power,separation,G\n");
    for r in &scan.rows {
        let lattice = lattice_coulomb(d_eta, params.mass, r.n, r.separation);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n, r.kinetic, r.coulomb_bound, lattice, r.power, r.separation, r.g
        );
    }
    emit(cfg.out.as_deref(), &out)?;
    if let Some(path) = &cfg.field_out {
        std::fs::write(path, write_field_csv(&eta))?;
    }
    eprintln!("smallest n with G < 0: {}", scan.n_negative);
    Ok(0)
}
