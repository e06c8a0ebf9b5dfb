//! Named verification suites behind `spss verify`.

use std::f64::consts::PI;
use std::str::FromStr;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::{json, Value};
use spss_core::constants::{estimate_interp_constant, v_critical, Quotient};
use spss_core::functionals::{self, rescale, ModelParams};
use spss_core::minimizer::{elimination_residual, minimize};
use spss_core::phase;
use spss_core::profiles::Profile;
use spss_core::{Init, RadialField, SolveOptions, Status};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Scaling,
    Virial,
    Subadditivity,
    Cubic,
    JScaling,
    Lions,
    All,
}

impl Suite {
    const EACH: [Suite; 6] = [
        Suite::Scaling,
        Suite::Virial,
        Suite::Subadditivity,
        Suite::Cubic,
        Suite::JScaling,
        Suite::Lions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Scaling => "scaling",
            Suite::Virial => "virial",
            Suite::Subadditivity => "subadditivity",
            Suite::Cubic => "cubic",
            Suite::JScaling => "j-scaling",
            Suite::Lions => "lions",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                anyhow::anyhow!("unknown suite `{s}` (expected scaling, virial, subadditivity, cubic, j-scaling, lions or all)")
            })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    opts: SolveOptions,
    checks: Vec<Check>,
    suite: &'static str,
}

impl Ctx<'_> {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: Value) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            passed,
            detail,
        });
    }

    fn or(&self, v: Option<crate::config::Real>, default: f64) -> f64 {
        v.map_or(default, |r| r.0)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn probes(opts: &SolveOptions, profiles: &[Profile]) -> Result<Vec<(String, RadialField)>> {
    let grid = opts.grid()?;
    let mut out = Vec::new();
    for &profile in profiles {
        for width in [0.7, 1.0, 2.0] {
            let name = format!("{profile:?} width {width}").to_lowercase();
            out.push((name, profile.build(&grid, width, 1.0)?));
        }
    }
    Ok(out)
}

fn integrals(f: &RadialField, alpha: f64) -> [f64; 4] {
    [
        functionals::mass(f),
        functionals::kinetic_integral(f),
        functionals::coulomb_energy(f),
        functionals::power_integral(f, alpha),
    ]
}

fn scaling(cx: &mut Ctx) -> Result<()> {
    let alpha = cx.or(cx.cfg.alpha, 1.0 / 3.0);
    for (name, f) in probes(&cx.opts, &[Profile::Gaussian])? {
        let base = integrals(&f, alpha);
        let mut errs = Vec::new();
        for l in [0.5, 2.0] {
            let got = integrals(&rescale(&f, l, 1.5, 1.0)?, alpha);
            let law = [1.0, l * l, l, l.powf(3.0 * alpha)];
            errs.extend((0..4).map(|i| rel(got[i], law[i] * base[i])));
        }
        let worst = errs.iter().cloned().fold(0.0, f64::max);
        let general = functionals::mass(&rescale(&f, 1.5, 2.0, 1.0)?);
        let mass_law = rel(general, 1.5f64.powf(2.0 * 2.0 - 3.0) * base[0]);
        cx.push(
            format!("dilation laws, {name}"),
            errs.iter().all(|e| *e < 1e-5) && mass_law < 1e-6,
            json!({"dilation_worst": worst, "general_mass_law": mass_law}),
        );
    }
    Ok(())
}

fn virial(cx: &mut Ctx) -> Result<()> {
    let alpha = cx.or(cx.cfg.alpha, 1.0 / 3.0);
    let coupling = cx.or(cx.cfg.coupling, 10.0);
    let mass = cx.or(cx.cfg.mass, 5.0);
    let p = ModelParams::new(alpha, coupling, mass)?;
    let rep = minimize(&p, &Init::default(), &cx.opts)?;
    let converged = rep.status == Status::Converged;
    cx.push(
        "virial residual",
        converged && rep.virial_residual.abs() < 1e-3,
        json!({"status": rep.status, "virial_residual": rep.virial_residual, "I_hat": rep.i_hat}),
    );
    let gap = elimination_residual(alpha, rep.breakdown.kinetic_integral, rep.i_hat, rep.ell, mass);
    cx.push(
        "multiplier elimination identity",
        converged && gap < 1e-3,
        json!({"ell": rep.ell, "residual": gap}),
    );
    Ok(())
}

fn subadditivity(cx: &mut Ctx) -> Result<()> {
    let alpha = cx.or(cx.cfg.alpha, 1.0 / 3.0);
    let coupling = cx.or(cx.cfg.coupling, 10.0);
    let mass = cx.or(cx.cfg.mass, 5.0);
    let splits = match &cx.cfg.splits {
        Some(s) => s.0.clone(),
        None => vec![0.2 * mass, 0.5 * mass],
    };
    let rep = phase::subadditivity_check(alpha, coupling, mass, &splits, &cx.opts)?;
    let passed = rep.passed;
    cx.push("strict subadditivity", passed, serde_json::to_value(&rep)?);
    Ok(())
}

fn cubic(cx: &mut Ctx) -> Result<()> {
    let (c_half, _) = estimate_interp_constant(0.5, &cx.opts)?;
    let threshold = v_critical(0.5, c_half)?;
    let coupling = cx.or(cx.cfg.coupling, 2.0 * threshold);
    let rep = phase::cubic_scaling_check(coupling, &[1.0, 1.5], c_half, &cx.opts)?;
    let passed = rep.passed;
    cx.push(
        "cubic mass law at alpha=1/2",
        passed,
        json!({"coupling": coupling, "threshold": threshold, "report": rep}),
    );
    Ok(())
}

fn j_scaling(cx: &mut Ctx) -> Result<()> {
    let alpha = cx.or(cx.cfg.alpha, 1.0 / 3.0);
    let coupling = cx.or(cx.cfg.coupling, 10.0);
    let mass = cx.or(cx.cfg.mass, 2.0);
    let rep = phase::j_scaling_check(alpha, coupling, mass, &[0.5, 0.25], &cx.opts)?;
    let passed = rep.passed;
    cx.push("reduced-energy scaling", passed, serde_json::to_value(&rep)?);
    Ok(())
}

fn lions(cx: &mut Ctx) -> Result<()> {
    let bound = 1.0 / (2.0 * PI.sqrt());
    for (name, f) in probes(&cx.opts, &[Profile::Gaussian, Profile::Exponential, Profile::Shell])? {
        let p3 = functionals::power_integral(&f, 0.5);
        let rhs = functionals::kinetic_integral(&f) * functionals::coulomb_energy(&f) / (4.0 * PI);
        let q = Quotient::Interpolation.evaluate(&f, 0.5);
        cx.push(
            format!("Lions inequality, {name}"),
            p3 * p3 <= rhs && q <= bound,
            json!({"lhs": p3 * p3, "rhs": rhs, "quotient": q}),
        );
    }
    let (c, _) = estimate_interp_constant(0.5, &cx.opts)?;
    cx.push(
        "estimated constant inside [Gaussian quotient, bound]",
        (0.2108..=bound).contains(&c),
        json!({"c_half_hat": c, "upper": bound}),
    );
    Ok(())
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<VerifySummary> {
    let mut cx = Ctx {
        cfg,
        opts: cfg.solve_options()?,
        checks: Vec::new(),
        suite: suite.name(),
    };
    let list: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    for s in list {
        cx.suite = s.name();
        match s {
            Suite::Scaling => scaling(&mut cx)?,
            Suite::Virial => virial(&mut cx)?,
            Suite::Subadditivity => subadditivity(&mut cx)?,
            Suite::Cubic => cubic(&mut cx)?,
            Suite::JScaling => j_scaling(&mut cx)?,
            Suite::Lions => lions(&mut cx)?,
            Suite::All => bail!("nested suite"),
        }
    }
    Ok(VerifySummary {
        suite: suite.name(),
        passed: cx.checks.iter().all(|c| c.passed),
        checks: cx.checks,
    })
}
