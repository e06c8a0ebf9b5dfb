//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spss_core::bumps::{bump_scan, default_eta, lattice_coulomb};
use spss_core::constants::{self, cached_gn_two_thirds, cached_interp_constant, v_critical};
use spss_core::functionals::{self, dilate, rescale, ModelParams};
use spss_core::minimizer::{self, critical_mass_identities, decay_check, elimination_residual, minimize};
use spss_core::phase::{self, NumericClass, PhaseConfig, PredictedClass};
use spss_core::profiles::Profile;
use spss_core::{Init, MinimizerReport, RadialField, SolveOptions, Status};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Like `f64::max` but NaN wins, so a NaN error can never pass.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn solve(alpha: f64, c: f64, m: f64) -> Result<MinimizerReport, String> {
    let p = ModelParams::new(alpha, c, m).map_err(|e| e.to_string())?;
    minimize(&p, &Init::default(), &SolveOptions::default()).map_err(|e| e.to_string())
}

fn v_c(alpha: f64) -> f64 {
    v_critical(alpha, cached_interp_constant(alpha).unwrap()).unwrap()
}

fn gaussian_oracles() -> Outcome {
    let f = gaussian(20.0, 4000);
    let errs = [
        rel(functionals::mass(&f), PI32),
        rel(functionals::kinetic_integral(&f), 1.5 * PI32),
        rel(functionals::coulomb_energy(&f), 2f64.sqrt() * PI.powf(2.5)),
        rel(functionals::power_integral(&f, 1.0 / 3.0), (PI / (4.0 / 3.0)).powf(1.5)),
        rel(functionals::power_integral(&f, 0.5), (PI / 1.5).powf(1.5)),
    ];
    let worst = errs.iter().cloned().fold(0.0, nan_max);
    ensure(worst < 1e-5, format!("worst relative error {worst:.1e}"))
}

fn scaling_identities() -> Outcome {
    let f = gaussian(20.0, 4000);
    let alpha = 1.0 / 3.0;
    let base = [
        functionals::mass(&f),
        functionals::kinetic_integral(&f),
        functionals::coulomb_energy(&f),
        functionals::power_integral(&f, alpha),
    ];
    let mut worst: f64 = 0.0;
    for l in [0.5, 2.0] {
        let s = rescale(&f, l, 1.5, 1.0).map_err(|e| e.to_string())?;
        let got = [
            functionals::mass(&s),
            functionals::kinetic_integral(&s),
            functionals::coulomb_energy(&s),
            functionals::power_integral(&s, alpha),
        ];
        let factor = [1.0, l * l, l, l.powf(3.0 * alpha)];
        for i in 0..4 {
            worst = nan_max(worst, rel(got[i], factor[i] * base[i]));
        }
    }
    let general = rescale(&f, 1.5, 2.0, 1.0).map_err(|e| e.to_string())?;
    let mass_law = rel(functionals::mass(&general), 1.5f64.powf(2.0 * 2.0 - 3.0) * base[0]);
    ensure(
        worst < 1e-5 && mass_law < 1e-6,
        format!("dilation worst {worst:.1e}, general mass law {mass_law:.1e}"),
    )
}

/// Even in `r`, hence smooth as a function on R^3.
fn smooth_field(g: &spss_core::RadialGrid, rng: &mut ChaCha8Rng, signed: bool) -> Vec<f64> {
    let lo = if signed { -1.0 } else { 0.1 };
    let terms: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=3))
        .map(|_| (rng.gen_range(lo..1.5), rng.gen_range(0.0..0.5), rng.gen_range(0.7..2.5)))
        .collect();
    let n = g.intervals();
    g.nodes()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let v: f64 = terms.iter().map(|(a, b, w)| a * (1.0 + b * r * r) * (-(r / w).powi(2)).exp()).sum();
            if i == n { 0.0 } else { v }
        })
        .collect()
}

fn gradient_check() -> Outcome {
    let g = grid(20.0, 4000);
    let p = ModelParams::new(1.0 / 3.0, 10.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let f = RadialField::new(g.clone(), smooth_field(&g, &mut rng, false)).unwrap();
        let dir = smooth_field(&g, &mut rng, true);
        let s = 1e-5;
        let shifted = |sign: f64| {
            let v: Vec<f64> = f.values().iter().zip(&dir).map(|(a, d)| a + sign * s * d).collect();
            functionals::energy(&RadialField::new(g.clone(), v).unwrap(), &p).total
        };
        let fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * s);
        let grad = minimizer::l2_gradient(&f, &p);
        let prod: Vec<f64> = grad.values().iter().zip(&dir).map(|(a, b)| a * b).collect();
        worst = nan_max(worst, rel(g.integrate(&prod), fd));
    }
    ensure(worst < 1e-5, format!("worst relative mismatch {worst:.1e} over 10 fields"))
}

fn virial() -> Outcome {
    let a = solve(1.0 / 3.0, 10.0, 5.0)?;
    let b = solve(0.6, 3.0 * v_c(0.6), 1.0)?;
    let ok = a.status == Status::Converged
        && b.status == Status::Converged
        && a.virial_residual.abs() < 1e-3
        && b.virial_residual.abs() < 1e-3;
    ensure(
        ok,
        format!(
            "(1/3,10,5) {} {:.1e}; (0.6,3Vc,1) {} {:.1e}",
            a.status, a.virial_residual, b.status, b.virial_residual
        ),
    )
}

fn euler_lagrange() -> Outcome {
    let mut worst: f64 = 0.0;
    for (alpha, c, m) in [(1.0 / 3.0, 10.0, 5.0), (0.6, 3.0 * v_c(0.6), 1.0)] {
        let r = solve(alpha, c, m)?;
        if r.status != Status::Converged {
            return Err(format!("alpha {alpha}: {}", r.status));
        }
        worst = nan_max(worst, elimination_residual(alpha, r.breakdown.kinetic_integral, r.i_hat, r.ell, m));
    }
    let h = solve(0.5, 2.0 * v_c(0.5), 1.0)?;
    let half = rel(-6.0 * h.i_hat / 1.0, h.ell);
    ensure(
        worst < 1e-3 && half < 1e-3 && h.status == Status::Converged,
        format!("elimination {worst:.1e}; alpha=1/2 ell vs -6I/M {half:.1e}"),
    )
}

fn critical_mass() -> Outcome {
    let r = solve(1.0 / 3.0, 10.0, 5.0)?;
    let ids = critical_mass_identities(&r, &r.params).map_err(|e| e.to_string())?;
    let worst = ids.max_residual();
    ensure(worst < 5e-3, format!("max residual {worst:.1e}"))
}

fn cubic_law() -> Outcome {
    let c_half = cached_interp_constant(0.5).unwrap();
    let c = 2.0 * 3.0 / (2f64.sqrt() * c_half);
    let rep = phase::cubic_scaling_check(c, &[1.0, 1.5], c_half, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let e = &rep.entries[0];
    ensure(rep.passed, format!("I(1.5)/I(1) = {:.5} (target 3.375)", e.lhs / e.rhs * 3.375))
}

fn alpha_zero() -> Outcome {
    let p = ModelParams::new(0.0, 1.0, 1.0).unwrap();
    let g = grid(20.0, 4000);
    let mut lowest = f64::INFINITY;
    let mut probes = Vec::new();
    for (prof, w) in [(Profile::Gaussian, 1.0), (Profile::Exponential, 0.7), (Profile::Shell, 1.5)] {
        probes.push(prof.build(&g, w, 1.0).unwrap());
    }
    for seed in 0..5 {
        let f = random_field(&g, 40 + seed);
        let m = functionals::mass(&f);
        probes.push(f.scaled(m.sqrt().recip()));
    }
    for f in &probes {
        for l in [0.01, 0.1, 0.5, 1.0, 3.0] {
            let e = functionals::energy(&dilate(f, l).unwrap(), &p).total;
            lowest = lowest.min(e);
        }
    }
    let wide = dilate(&probes[0], 1e-2).unwrap();
    let e = functionals::energy(&wide, &p).total;
    let gap = rel(e, -0.5);
    ensure(
        lowest >= -0.5 - 1e-6 && gap <= 0.05 && wide.grid().radius() > 1000.0,
        format!("lowest probe {lowest:.6}; lambda=1e-2 energy {e:.5} on R={}", wide.grid().radius()),
    )
}

fn lions_constant() -> Outcome {
    let c = cached_interp_constant(0.5).unwrap();
    ensure(
        (0.2108..=1.0 / (2.0 * PI.sqrt())).contains(&c),
        format!("C_1/2 estimate {c:.6}"),
    )
}

fn phase_diagram() -> Outcome {
    let cfg = PhaseConfig::default();
    let opts = SolveOptions::default();
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let vh = v_c(0.5);
    let v6 = v_c(0.6);
    let rows: Vec<(f64, Vec<f64>, Vec<f64>)> = vec![
        (0.2, vec![5.0], vec![0.5, 1.0, 2.0, 4.0]),
        (1.0 / 3.0, vec![10.0], vec![0.5, 1.0, 2.0, 5.0]),
        (0.5, vec![0.5 * vh, 2.0 * vh], vec![0.5, 1.0, 1.5, 2.0]),
        (0.6, vec![v6], vec![0.25, 0.5, 1.0, 2.0, 4.0]),
        (2.0 / 3.0, vec![8.0], vec![0.5, 1.0, 2.0, 4.0]),
        (0.8, vec![1.0], vec![0.5, 1.0, 2.0, 4.0]),
    ];
    let mut points = Vec::new();
    for (a, cs, ms) in &rows {
        points.extend(phase::sweep(&[*a], cs, ms, &opts, &cfg, jobs).map_err(|e| e.to_string())?);
    }
    let off_band: Vec<_> = points.iter().filter(|p| p.margin.is_nan() || p.margin.abs() > cfg.band).collect();
    let disagreements: Vec<String> = off_band
        .iter()
        .filter(|p| !p.agrees || p.numeric_class == NumericClass::Indeterminate)
        .map(|p| format!("({:.3},{:.3},{}) {} vs {}", p.alpha, p.coupling, p.mass, p.numeric_class, p.predicted_class))
        .collect();
    let confusions = points
        .iter()
        .filter(|p| {
            matches!(
                (p.numeric_class, p.predicted_class),
                (NumericClass::Negative, PredictedClass::Unbounded) | (NumericClass::Unbounded, PredictedClass::Negative)
            )
        })
        .count();
    ensure(
        disagreements.is_empty() && confusions == 0,
        format!(
            "{} points, {} off-band, {} mismatches {:?}, {} NEGATIVE/UNBOUNDED confusions",
            points.len(),
            off_band.len(),
            disagreements.len(),
            disagreements,
            confusions
        ),
    )
}

fn subadditivity() -> Outcome {
    let opts = SolveOptions::default();
    let vh = v_c(0.5);
    let v6 = v_c(0.6);
    let tuples = [
        (1.0 / 3.0, 10.0, 5.0, 2.5),
        (1.0 / 3.0, 10.0, 5.0, 1.0),
        (1.0 / 3.0, 10.0, 2.0, 0.5),
        (0.2, 5.0, 4.0, 2.0),
        (0.2, 5.0, 2.0, 0.5),
        (0.25, 3.0, 3.0, 1.5),
        (0.5, 2.0 * vh, 1.5, 0.75),
        (0.5, 2.0 * vh, 1.0, 0.3),
        (0.5, 0.5 * vh, 1.0, 0.5),
        (0.6, v6, 4.0, 2.0),
        (0.6, v6, 3.0, 1.0),
        (0.6, v6, 0.5, 0.25),
    ];
    let mut failed = Vec::new();
    for (a, c, m, s) in tuples {
        let r = phase::subadditivity_check(a, c, m, &[s], &opts).map_err(|e| e.to_string())?;
        if !r.passed {
            failed.push(format!("({a:.3},{c:.3},{m},{s})"));
        }
    }
    let mono = [
        phase::monotonicity_check(1.0 / 3.0, 10.0, &[1.0, 5.0, 25.0], &opts),
        phase::monotonicity_check(0.2, 5.0, &[0.5, 1.0, 2.0, 4.0], &opts),
        phase::monotonicity_check(0.6, v6, &[0.5, 1.0, 2.0, 4.0], &opts),
    ];
    let mono_ok = mono.iter().all(|r| r.as_ref().is_ok_and(|r| r.passed));
    let key = phase::keyscaling_check(0.6, v6, &[1.5, 2.0, 3.0, 4.0], &opts).map_err(|e| e.to_string())?;
    ensure(
        failed.is_empty() && mono_ok && key.passed,
        format!(
            "12 splits, failures {failed:?}; monotone rows {}; key scaling above M_c {}",
            mono_ok, key.passed
        ),
    )
}

fn j_scaling() -> Outcome {
    let r = phase::j_scaling_check(1.0 / 3.0, 10.0, 2.0, &[0.5, 0.25], &SolveOptions::default())
        .map_err(|e| e.to_string())?;
    let worst = r.entries.iter().map(|e| e.rel_err).fold(0.0, nan_max);
    ensure(r.passed, format!("{} identities, worst {worst:.1e}", r.entries.len()))
}

fn multi_bump() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for m in [1.0, 10.0, 100.0] {
        let eta = default_eta(m).map_err(|e| e.to_string())?;
        let p = ModelParams::new(1.0 / 3.0, 10.0, m).unwrap();
        let scan = bump_scan(&eta, &p, 1 << 20).map_err(|e| e.to_string())?;
        let row = scan.rows.iter().find(|r| r.n == scan.n_negative).unwrap();
        let d_eta = functionals::coulomb_energy(&eta);
        let n23 = (row.n as f64).powf(2.0 / 3.0);
        let lattice = lattice_coulomb(d_eta, m, row.n, row.separation);
        let bound_ok = rel(row.coulomb_bound, 2.0 * d_eta / n23) < 1e-12 && lattice <= row.coulomb_bound && row.g < 0.0;
        ok &= bound_ok;
        notes.push(format!("M={m}: n={} G={:.3e}", row.n, row.g));
    }
    ensure(ok, notes.join("; "))
}

fn decay() -> Outcome {
    let r = solve(1.0 / 3.0, 10.0, 5.0)?;
    let fit = decay_check(&r).map_err(|e| e.to_string())?;
    ensure(
        fit.ok,
        format!("delta_fit {:.4} vs sqrt(ell) {:.4}", fit.delta_fit, fit.expected),
    )
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("Gaussian closed forms", gaussian_oracles),
        ("dilation scaling identities", scaling_identities),
        ("gradient vs finite differences", gradient_check),
        ("virial identity at minimizers", virial),
        ("Euler-Lagrange multiplier identities", euler_lagrange),
        ("critical-mass identity residuals", critical_mass),
        ("cubic mass law at alpha=1/2", cubic_law),
        ("alpha=0 infimum -CM/2", alpha_zero),
        ("Lions constant containment", lions_constant),
        ("phase diagram", phase_diagram),
        ("subadditivity, monotonicity, key scaling", subadditivity),
        ("J-functional scaling at alpha=1/3", j_scaling),
        ("multi-bump negativity", multi_bump),
        ("exponential decay rate", decay),
    ];
    // warm the shared constant caches before fanning out
    let _ = cached_gn_two_thirds();
    let _ = constants::cached_interp_constant(0.5);
    let _ = constants::cached_interp_constant(0.6);
    let start = Instant::now();
    let results: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
                    (out, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failures = 0;
    for (i, ((name, _), (out, secs))) in criteria.iter().zip(&results).enumerate() {
        let (tag, detail) = match out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}  {name} ({secs:.1}s): {detail}", i + 1);
    }
    println!("{} of 14 criteria passed in {:.1}s", 14 - failures, start.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
