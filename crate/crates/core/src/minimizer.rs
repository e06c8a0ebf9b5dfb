//! Mass-constrained energy minimization over nonnegative radial profiles, with the
//! stationarity diagnostics (virial, multiplier, residuals, decay rate) of the minimizers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::{Error, Result};
use crate::functionals::{self, dilate, snap_alpha, EnergyBreakdown, ModelParams};
use crate::grid::{RadialField, RadialGrid};
use crate::operators;
use crate::profiles::Profile;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub tol_el: f64,
    pub max_iter: usize,
    pub step0: f64,
    pub backtrack: f64,
    pub scaling_period: usize,
    pub disperse_scale_floor: f64,
    pub seed: u64,
    pub radius: f64,
    pub intervals: usize,
    /// Overrides the internally estimated `C_GN(2/3)` used by the boundedness test at `alpha = 2/3`.
    pub c_gn_two_thirds: Option<f64>,
    /// Move the grid to the optimal dilation scale of the initial field before iterating.
    pub adapt_grid: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_el: 1e-6,
            max_iter: 50_000,
            step0: 1e-2,
            backtrack: 0.5,
            scaling_period: 50,
            disperse_scale_floor: 1e-3,
            seed: 0,
            radius: 40.0,
            intervals: 4000,
            c_gn_two_thirds: None,
            adapt_grid: true,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidOption(m.to_string()));
        if !(self.tol_el.is_finite() && self.tol_el > 0.0) {
            return bad("tol_el must be positive");
        }
        if self.max_iter < 1 {
            return bad("max_iter must be at least 1");
        }
        if !(self.step0.is_finite() && self.step0 > 0.0) {
            return bad("step0 must be positive");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack must lie in (0, 1)");
        }
        if self.scaling_period < 1 {
            return bad("scaling_period must be at least 1");
        }
        if !(self.disperse_scale_floor.is_finite() && self.disperse_scale_floor > 0.0) {
            return bad("disperse_scale_floor must be positive");
        }
        RadialGrid::new(self.radius, self.intervals)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.radius, self.intervals)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Converged,
    Dispersed,
    Unbounded,
    Maxiter,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Converged => "CONVERGED",
            Status::Dispersed => "DISPERSED",
            Status::Unbounded => "UNBOUNDED",
            Status::Maxiter => "MAXITER",
        })
    }
}

/// Starting point of a solve.
#[derive(Clone, Debug)]
pub enum Init {
    Profile { profile: Profile, width: f64 },
    Field(RadialField),
    /// A seeded random superposition of Gaussian bumps and shells.
    Random,
}

impl Default for Init {
    fn default() -> Self {
        Init::Profile {
            profile: Profile::Gaussian,
            width: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimizerReport {
    #[serde(skip)]
    pub field: Option<RadialField>,
    pub breakdown: EnergyBreakdown,
    #[serde(rename = "I_hat")]
    pub i_hat: f64,
    pub ell: f64,
    pub virial_residual: f64,
    pub el_residual: f64,
    pub status: Status,
    pub iterations: usize,
    pub grid: RadialGrid,
    pub params: ModelParams,
    /// Energies of the accepted iterates.
    #[serde(skip)]
    pub history: Vec<f64>,
}

impl MinimizerReport {
    pub fn field(&self) -> &RadialField {
        self.field.as_ref().expect("report carries its field")
    }
}

/// `dE/dphi = -Delta phi + w V phi - C |phi|^{2 alpha} phi` with respect to the volume inner product.
///
/// Exact gradient of the discrete energy the solver descends, whose quadrature uses
/// [`RadialGrid::trapezoid_weights`].
pub fn l2_gradient(f: &RadialField, p: &ModelParams) -> RadialField {
    let g = f.grid();
    let v = operators::symmetric_potential(g, f.values());
    let values = gradient_values(g, f.values(), &v, p).0;
    RadialField::new(g.clone(), values).expect("finite gradient")
}

/// Gradient plus its three pieces (Laplacian, Coulomb, power) for residual scaling.
fn gradient_values(
    g: &RadialGrid,
    phi: &[f64],
    v: &[f64],
    p: &ModelParams,
) -> (Vec<f64>, [Vec<f64>; 3]) {
    let lap = operators::neg_laplacian(g, phi);
    let w = p.coulomb_weight;
    let e = 2.0 * p.alpha;
    let cou: Vec<f64> = phi.iter().zip(v).map(|(x, v)| w * v * x).collect();
    let pow: Vec<f64> = phi.iter().map(|x| p.coupling * x.abs().powf(e) * x).collect();
    let mut grad: Vec<f64> = (0..phi.len()).map(|i| lap[i] + cou[i] - pow[i]).collect();
    if let Some(last) = grad.last_mut() {
        *last = 0.0;
    }
    (grad, [lap, cou, pow])
}

/// `ell = -(K + w D - C P) / M`, the multiplier obtained by testing the stationarity equation with `phi`.
pub fn lagrange_multiplier(f: &RadialField, p: &ModelParams) -> Result<f64> {
    let e = functionals::energy(f, p);
    multiplier_from(&e)
}

fn multiplier_from(e: &EnergyBreakdown) -> Result<f64> {
    if e.mass.is_nan() || e.mass <= 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(-(e.kinetic_integral + e.coulomb_weight * e.coulomb - e.coupling * e.power_integral) / e.mass)
}

/// Relative size of `dE(phi_lambda)/dlambda` at `lambda = 1`.
pub fn virial_residual(f: &RadialField, p: &ModelParams) -> f64 {
    virial_from(&functionals::energy(f, p))
}

fn virial_from(e: &EnergyBreakdown) -> f64 {
    let a = e.kinetic_integral;
    let b = 0.25 * e.coulomb_weight * e.coulomb;
    let c = 3.0 * e.alpha * e.coupling / (2.0 * e.alpha + 2.0) * e.power_integral;
    let scale = a.max(b).max(c);
    if scale == 0.0 {
        0.0
    } else {
        (a + b - c) / scale
    }
}

fn w_norm(g: &RadialGrid, v: &[f64]) -> f64 {
    g.trapezoid_weights()
        .iter()
        .zip(v)
        .map(|(w, x)| w * x * x)
        .sum::<f64>()
        .sqrt()
}

fn w_dot(g: &RadialGrid, a: &[f64], b: &[f64]) -> f64 {
    g.trapezoid_weights()
        .iter()
        .zip(a)
        .zip(b)
        .map(|((w, a), b)| w * a * b)
        .sum()
}

/// Normalized stationarity residual `|grad E + ell phi| / (|-Delta phi| + |w V phi| + |C phi^{2 alpha + 1}|)`.
pub fn el_residual(f: &RadialField, p: &ModelParams) -> Result<f64> {
    let it = evaluate(f.grid(), f.values().to_vec(), p);
    let ell = multiplier_from(&it.e)?;
    Ok(residual_from(f.grid(), &it.phi, &it.v, p, ell))
}

fn residual_from(g: &RadialGrid, phi: &[f64], v: &[f64], p: &ModelParams, ell: f64) -> f64 {
    let (grad, [lap, cou, pow]) = gradient_values(g, phi, v, p);
    let res: Vec<f64> = grad.iter().zip(phi).map(|(a, x)| a + ell * x).collect();
    let mut res = res;
    if let Some(last) = res.last_mut() {
        *last = 0.0;
    }
    let scale = w_norm(g, &lap) + w_norm(g, &cou) + w_norm(g, &pow);
    if scale == 0.0 {
        0.0
    } else {
        w_norm(g, &res) / scale
    }
}

fn scale_to_mass(g: &RadialGrid, phi: &mut [f64], target: f64) -> f64 {
    let m: f64 = g
        .trapezoid_weights()
        .iter()
        .zip(phi.iter())
        .map(|(w, v)| w * v * v)
        .sum();
    if m > 0.0 {
        let c = (target / m).sqrt();
        phi.iter_mut().for_each(|v| *v *= c);
    }
    m
}

fn random_field(grid: &RadialGrid, seed: u64) -> Result<RadialField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(0.2..1.0),
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.6..2.0),
            )
        })
        .collect();
    RadialField::from_fn(grid, |r| {
        bumps
            .iter()
            .map(|(a, c, w)| a * (-((r - c) / w).powi(2)).exp())
            .sum()
    })
}

fn initial_field(init: &Init, grid: &RadialGrid, mass: f64, seed: u64, keep_grid: bool) -> Result<RadialField> {
    let f = match init {
        Init::Profile { profile, width } => profile.build(grid, *width, mass)?,
        Init::Field(f) => {
            if f.grid() == grid || keep_grid {
                f.clone()
            } else {
                f.resample(grid)?
            }
        }
        Init::Random => random_field(grid, seed)?,
    };
    let grid = f.grid().clone();
    let mut v: Vec<f64> = f.values().iter().map(|x| x.abs()).collect();
    *v.last_mut().unwrap() = 0.0;
    if scale_to_mass(&grid, &mut v, mass) <= 0.0 {
        return Err(Error::ZeroField);
    }
    RadialField::new(grid, v)
}

/// Dilates `f` onto the node-mapped grid of its best dilation scale when that scale is
/// far from 1 but still above the dispersion floor.
fn adapt_to_scale(f: RadialField, p: &ModelParams, opts: &SolveOptions) -> Result<RadialField> {
    let fam = functionals::energy(&f, p).family();
    let (lambda, _) = fam.argmin(-6.0, 6.0);
    if lambda >= opts.disperse_scale_floor && lambda <= 1.0 / opts.disperse_scale_floor && lambda.ln().abs() > 2f64.ln() {
        dilate(&f, lambda)
    } else {
        Ok(f)
    }
}

fn report(
    field: RadialField,
    p: &ModelParams,
    status: Status,
    iterations: usize,
    history: Vec<f64>,
) -> MinimizerReport {
    let grid = field.grid().clone();
    let internal = evaluate(&grid, field.values().to_vec(), p);
    let breakdown = functionals::energy(&field, p);
    let ell = multiplier_from(&internal.e).unwrap_or(f64::NAN);
    let el = residual_from(&grid, &internal.phi, &internal.v, p, ell);
    let i_hat = if status == Status::Dispersed {
        0.0
    } else {
        breakdown.total
    };
    MinimizerReport {
        virial_residual: virial_from(&breakdown),
        el_residual: el,
        field: Some(field),
        breakdown,
        i_hat,
        ell,
        status,
        iterations,
        grid,
        params: *p,
        history,
    }
}

/// Whether `alpha = 2/3` with `C C_GN M^{2/3} >= 5/3`, where the energy is unbounded below.
pub fn unbounded_at_two_thirds(p: &ModelParams, opts: &SolveOptions) -> bool {
    if snap_alpha(p.alpha) != 2.0 / 3.0 {
        return false;
    }
    let c_gn = opts
        .c_gn_two_thirds
        .unwrap_or_else(constants::cached_gn_two_thirds);
    p.coupling * c_gn * p.mass.powf(2.0 / 3.0) >= 5.0 / 3.0
}

/// Grid-scale modes have preconditioned curvature close to 4/3; steps beyond 1.5 amplify them.
const MAX_STEP: f64 = 1.2;

struct Iterate {
    phi: Vec<f64>,
    v: Vec<f64>,
    e: EnergyBreakdown,
}

fn evaluate(grid: &RadialGrid, phi: Vec<f64>, p: &ModelParams) -> Iterate {
    let v = operators::symmetric_potential(grid, &phi);
    let w = grid.trapezoid_weights();
    let m = w.iter().zip(&phi).map(|(w, x)| w * x * x).sum();
    let d = w.iter().zip(&phi).zip(&v).map(|((w, x), v)| w * x * x * v).sum();
    let pw = w
        .iter()
        .zip(&phi)
        .map(|(w, x)| w * x.abs().powf(2.0 * p.alpha + 2.0))
        .sum();
    let k = operators::kinetic_form(grid, &phi);
    let e = EnergyBreakdown::from_integrals(k, d, pw, m, p);
    Iterate { phi, v, e }
}

/// Projected, Sobolev-preconditioned gradient flow on the mass sphere, interleaved with exact
/// searches along the dilation orbit.
pub fn minimize(p: &ModelParams, init: &Init, opts: &SolveOptions) -> Result<MinimizerReport> {
    p.validate()?;
    opts.validate()?;
    if p.alpha <= 0.0 {
        return Err(Error::AlphaOutOfRange {
            alpha: p.alpha,
            range: "(0, 2/3]",
        });
    }
    let start = initial_field(init, &opts.grid()?, p.mass, opts.seed, opts.adapt_grid)?;
    let alpha = snap_alpha(p.alpha);
    if alpha > 2.0 / 3.0 || unbounded_at_two_thirds(p, opts) {
        return Ok(report(start, p, Status::Unbounded, 0, Vec::new()));
    }

    let start = if opts.adapt_grid {
        adapt_to_scale(start, p, opts)?
    } else {
        start
    };
    let grid = start.grid().clone();
    let n = grid.intervals();
    let tol = opts.tol_el;
    let mut cur = evaluate(&grid, start.into_values(), p);
    let mut history = vec![cur.e.total];
    let mut tau = opts.step0;
    let mut small_scale_hits = 0;
    let finish = |cur: Iterate, status, it, history| {
        let f = RadialField::new(grid.clone(), cur.phi).expect("finite iterate");
        Ok(report(f, p, status, it, history))
    };

    for it in 0..opts.max_iter {
        if it % opts.scaling_period == 0 {
            let fam = cur.e.family();
            let (lambda, e_min) = fam.argmin(-6.0, 6.0);
            if e_min < -1.0 / tol || fam.energy(1e6) < -1.0 / tol {
                return finish(cur, Status::Unbounded, it, history);
            }
            if lambda < opts.disperse_scale_floor {
                if e_min >= -tol {
                    small_scale_hits += 1;
                    if small_scale_hits >= 2 {
                        return finish(cur, Status::Dispersed, it, history);
                    }
                } else {
                    small_scale_hits = 0;
                }
            } else {
                small_scale_hits = 0;
                if (lambda.ln()).abs() > 1e-6 {
                    let f = RadialField::new(grid.clone(), cur.phi.clone())?;
                    if let Ok(cand) = dilate(&f, lambda).and_then(|d| d.resample(&grid)) {
                        let mut v = cand.into_values();
                        v.iter_mut().for_each(|x| *x = x.max(0.0));
                        v[n] = 0.0;
                        if scale_to_mass(&grid, &mut v, p.mass) > 0.0 {
                            let next = evaluate(&grid, v, p);
                            if next.e.total < cur.e.total {
                                cur = next;
                                history.push(cur.e.total);
                            }
                        }
                    }
                }
            }
        }

        let ell = multiplier_from(&cur.e)?;
        let (grad, _) = gradient_values(&grid, &cur.phi, &cur.v, p);
        let res = residual_from(&grid, &cur.phi, &cur.v, p, ell);
        if res <= tol {
            // a stationary state whose dilation orbit still prefers spreading is box-confined
            let (lambda, e_min) = cur.e.family().argmin(-6.0, 6.0);
            let status = if lambda < opts.disperse_scale_floor && e_min >= -tol {
                Status::Dispersed
            } else {
                Status::Converged
            };
            return finish(cur, status, it, history);
        }

        let sigma = (cur.e.kinetic_integral / cur.e.mass).max(1e-8);
        let a = operators::shifted_inverse(&grid, sigma, &grad);
        let b = operators::shifted_inverse(&grid, sigma, &cur.phi);
        let beta = w_dot(&grid, &a, &cur.phi) / w_dot(&grid, &b, &cur.phi);
        let mut dir: Vec<f64> = a.iter().zip(&b).map(|(a, b)| a - beta * b).collect();
        dir[n] = 0.0;

        let slack = 1e-12 * cur.e.total.abs().max(1e-300);
        let mut accepted = false;
        for _ in 0..60 {
            let mut v: Vec<f64> = cur
                .phi
                .iter()
                .zip(&dir)
                .map(|(x, d)| (x - tau * d).max(0.0))
                .collect();
            v[n] = 0.0;
            if scale_to_mass(&grid, &mut v, p.mass) > 0.0 {
                let next = evaluate(&grid, v, p);
                if next.e.total <= cur.e.total + slack {
                    cur = next;
                    history.push(cur.e.total);
                    accepted = true;
                    tau = (tau * 1.3).min(MAX_STEP);
                    break;
                }
            }
            tau *= opts.backtrack;
        }
        if cur.e.total < -1.0 / tol {
            return finish(cur, Status::Unbounded, it + 1, history);
        }
        if !accepted {
            return finish(cur, Status::Maxiter, it + 1, history);
        }
    }
    finish(cur, Status::Maxiter, opts.max_iter, history)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalMassIdentities {
    pub eps_m: f64,
    pub eta_m: f64,
    pub kinetic_residual: f64,
    pub coulomb_residual: f64,
    pub power_residual: f64,
}

impl CriticalMassIdentities {
    pub fn max_residual(&self) -> f64 {
        self.kinetic_residual
            .max(self.coulomb_residual)
            .max(self.power_residual)
    }
}

/// Predicted `(K, D, C P / (2 alpha + 2))` from `eps = M ell / (2 alpha - 1)` and `eta = I / (1 - 2 alpha)`.
pub fn critical_mass_predictions(alpha: f64, eps: f64, eta: f64) -> (f64, f64, f64) {
    (
        0.5 * (3.0 * alpha - 1.0) * eps - (5.0 * alpha - 1.0) * eta,
        (2.0 - 3.0 * alpha) * eps - 2.0 * (2.0 - alpha) * eta,
        0.25 * eps - 1.5 * eta,
    )
}

pub fn critical_mass_identities(rep: &MinimizerReport, p: &ModelParams) -> Result<CriticalMassIdentities> {
    let alpha = p.alpha;
    if (alpha - 0.5).abs() < 1e-12 {
        return Err(Error::UndefinedAtHalf);
    }
    if rep.status != Status::Converged {
        return Err(Error::NotConverged(rep.status.to_string()));
    }
    let b = &rep.breakdown;
    let eps = b.mass * rep.ell / (2.0 * alpha - 1.0);
    let eta = rep.i_hat / (1.0 - 2.0 * alpha);
    let (k, d, x) = critical_mass_predictions(alpha, eps, eta);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    Ok(CriticalMassIdentities {
        eps_m: eps,
        eta_m: eta,
        kinetic_residual: rel(b.kinetic_integral, k),
        coulomb_residual: rel(b.coulomb, d),
        power_residual: rel(p.power_coefficient() * b.power_integral, x),
    })
}

/// `ell` eliminated against the virial relation and `E = I`:
/// `(2/M) [ (2 alpha - 1)/(3 alpha - 1) K + (5 alpha - 1)/(3 alpha - 1) |I| ]`.
///
/// Singular at `alpha = 1/3`; see [`elimination_residual`].
pub fn multiplier_by_elimination(alpha: f64, kinetic: f64, i_m: f64, mass: f64) -> f64 {
    let a = 3.0 * alpha - 1.0;
    2.0 / mass * ((2.0 * alpha - 1.0) / a * kinetic + (5.0 * alpha - 1.0) / a * i_m.abs())
}

/// Relative residual of `(3 alpha - 1) ell M / 2 = (2 alpha - 1) K + (5 alpha - 1) |I|`,
/// the elimination identity with the denominator cleared. At `alpha = 1/3` it reads `K = 2|I|`.
pub fn elimination_residual(alpha: f64, kinetic: f64, i_m: f64, ell: f64, mass: f64) -> f64 {
    let lhs = (3.0 * alpha - 1.0) * ell * mass / 2.0;
    let k = (2.0 * alpha - 1.0) * kinetic;
    let i = (5.0 * alpha - 1.0) * i_m.abs();
    let scale = lhs.abs().max(k.abs()).max(i.abs());
    if scale == 0.0 {
        return 0.0;
    }
    (lhs - k - i).abs() / scale
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub delta_fit: f64,
    /// Power-law correction in `phi ~ r^{-kappa} exp(-delta r)`.
    pub kappa: f64,
    pub expected: f64,
    pub ok: bool,
}

/// Fits `ln phi = c - delta r - kappa ln r` where `phi` lies in `[1e-10, 1e-4]` and compares `delta`
/// to `sqrt(ell)`.
pub fn decay_fit(f: &RadialField, ell: f64) -> Result<DecayFit> {
    if ell.is_nan() || ell <= 0.0 {
        return Err(Error::NonPositiveMultiplier(ell));
    }
    let g = f.grid();
    let vals = f.values();
    let peak = vals
        .iter()
        .enumerate()
        .fold((0, 0.0), |m, (i, v)| if *v > m.1 { (i, *v) } else { m })
        .0;
    let pts: Vec<(f64, f64)> = (peak.max(1)..g.len())
        .filter(|&i| (1e-10..=1e-4).contains(&vals[i]))
        .map(|i| (g.node(i), vals[i].ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::EmptyDecayWindow);
    }
    // normal equations for y = c + b r + k ln r
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (r, y) in &pts {
        let row = [1.0, *r, r.ln()];
        for i in 0..3 {
            aty[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let sol = solve3(ata, aty).ok_or(Error::EmptyDecayWindow)?;
    let delta = -sol[1];
    let expected = ell.sqrt();
    Ok(DecayFit {
        delta_fit: delta,
        kappa: -sol[2],
        expected,
        ok: (delta - expected).abs() <= 0.1 * expected,
    })
}

#[allow(clippy::needless_range_loop)]
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let piv = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

pub fn decay_check(rep: &MinimizerReport) -> Result<DecayFit> {
    if rep.status != Status::Converged {
        return Err(Error::NotConverged(rep.status.to_string()));
    }
    decay_fit(rep.field(), rep.ell)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn options_validation() {
        assert!(SolveOptions::default().validate().is_ok());
        let bad = SolveOptions {
            backtrack: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolveOptions {
            tol_el: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolveOptions {
            max_iter: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn critical_mass_predictions_are_consistent() {
        let (alpha, eps, eta) = (0.4, 1.0, -0.1);
        let (k, d, x) = critical_mass_predictions(alpha, eps, eta);
        let ell_m = eps * (2.0 * alpha - 1.0);
        let i = eta * (1.0 - 2.0 * alpha);
        assert!((0.5 * k + 0.25 * d - x - i).abs() < 1e-14);
        assert!((k + 0.25 * d - 3.0 * alpha * x).abs() < 1e-14);
        assert!((k + d - (2.0 * alpha + 2.0) * x + ell_m).abs() < 1e-14);
    }

    #[test]
    fn synthetic_exponential_decay() {
        let g = RadialGrid::new(20.0, 2000).unwrap();
        let f = RadialField::from_fn(&g, |r| (-2.0 * r).exp()).unwrap();
        let fit = decay_fit(&f, 4.0).unwrap();
        assert!((fit.delta_fit - 2.0).abs() < 0.02);
        assert!(fit.ok);
        assert!(decay_fit(&f, 0.0).is_err());
        let small = RadialGrid::new(2.0, 200).unwrap();
        let f = RadialField::from_fn(&small, |r| (-2.0 * r).exp()).unwrap();
        assert_eq!(decay_fit(&f, 4.0).unwrap_err().to_string(), "decay window is empty; increase R");
    }

    #[test]
    fn zero_gradient_at_zero() {
        let g = RadialGrid::new(5.0, 100).unwrap();
        let p = ModelParams::new(0.5, 1.0, 1.0).unwrap();
        assert!(l2_gradient(&RadialField::zeros(&g), &p).is_zero());
        assert_eq!(lagrange_multiplier(&RadialField::zeros(&g), &p).unwrap_err(), Error::ZeroField);
    }

    #[test]
    fn unbounded_without_iterating() {
        let p = ModelParams::new(0.8, 1.0, 1.0).unwrap();
        let opts = SolveOptions {
            radius: 10.0,
            intervals: 200,
            ..Default::default()
        };
        let rep = minimize(&p, &Init::default(), &opts).unwrap();
        assert_eq!(rep.status, Status::Unbounded);
        assert_eq!(rep.iterations, 0);
    }
}
