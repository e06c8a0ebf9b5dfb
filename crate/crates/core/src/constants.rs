//! Lower estimates of the sharp interpolation constants and the critical thresholds built on them.
//!
//! Every estimate is the quotient of an explicit discrete field, so it never exceeds the
//! sharp (radial) constant up to discretization error.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{self, dilate, potential_values, snap_alpha};
use crate::grid::{RadialField, RadialGrid};
use crate::minimizer::SolveOptions;
use crate::operators;
use crate::profiles::Profile;

/// Scale-invariant quotients `P / (M^a D^b K^c)` with `P = int |u|^{2 alpha + 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Quotient {
    /// Gagliardo-Nirenberg: `P / (K^{3 alpha/2} M^{(2 - alpha)/2})`.
    Weinstein,
    /// `P / (M^{4 alpha - 2} D^{2 - 3 alpha} K^{3 alpha - 1})`, `alpha in [1/3, 2/3]`.
    Interpolation,
    /// `P / (M^{1 - 2 alpha} D^alpha K^alpha)`, `alpha in [0, 1/2]`.
    Coulomb,
}

impl Quotient {
    /// Exponents of `(M, D, K)`.
    pub fn exponents(self, alpha: f64) -> (f64, f64, f64) {
        match self {
            Quotient::Weinstein => ((2.0 - alpha) / 2.0, 0.0, 1.5 * alpha),
            Quotient::Interpolation => (4.0 * alpha - 2.0, 2.0 - 3.0 * alpha, 3.0 * alpha - 1.0),
            Quotient::Coulomb => (1.0 - 2.0 * alpha, alpha, alpha),
        }
    }

    pub fn check_domain(self, alpha: f64) -> Result<()> {
        let a = snap_alpha(alpha);
        let (ok, range) = match self {
            Quotient::Weinstein => (a > 0.0 && a < 2.0, "(0, 2)"),
            Quotient::Interpolation => ((1.0 / 3.0..=2.0 / 3.0).contains(&a), "[1/3, 2/3]"),
            Quotient::Coulomb => ((0.0..=0.5).contains(&a), "[0, 1/2]"),
        };
        if ok && alpha.is_finite() {
            Ok(())
        } else {
            Err(Error::AlphaOutOfRange { alpha, range })
        }
    }

    pub fn evaluate(self, f: &RadialField, alpha: f64) -> f64 {
        let (em, ed, ek) = self.exponents(alpha);
        let p = functionals::power_integral(f, alpha);
        let m = functionals::mass(f);
        let k = functionals::kinetic_integral(f);
        let d = if ed != 0.0 { functionals::coulomb_energy(f) } else { 1.0 };
        p / (m.powf(em) * d.powf(ed) * k.powf(ek))
    }
}

struct State {
    log_q: f64,
    k: f64,
    m: f64,
    d: f64,
    p: f64,
    v: Vec<f64>,
}

fn evaluate_state(grid: &RadialGrid, phi: &[f64], alpha: f64, ex: (f64, f64, f64)) -> State {
    let w = grid.volume_weights();
    let m: f64 = w.iter().zip(phi).map(|(w, v)| w * v * v).sum();
    let p: f64 = w
        .iter()
        .zip(phi)
        .map(|(w, v)| w * v.abs().powf(2.0 * alpha + 2.0))
        .sum();
    let k = operators::kinetic_form(grid, phi);
    let (d, v) = if ex.1 != 0.0 {
        let v = potential_values(grid, phi);
        let d = w.iter().zip(phi).zip(&v).map(|((w, p), v)| w * p * p * v).sum();
        (d, v)
    } else {
        (1.0, Vec::new())
    };
    let log_q = p.ln() - ex.0 * m.ln() - ex.1 * d.ln() - ex.2 * k.ln();
    State { log_q, k, m, d, p, v }
}

fn normalize(grid: &RadialGrid, phi: &mut [f64]) {
    let m = grid.integrate(&phi.iter().map(|v| v * v).collect::<Vec<_>>());
    if m > 0.0 {
        let c = m.sqrt().recip();
        phi.iter_mut().for_each(|v| *v *= c);
    }
}

/// Preconditioned projected ascent on `log Q` over unit-mass nonnegative fields.
///
/// Returns the quotient value and the field realizing it. Never returns less than the quotient
/// of `init` (after clamping and normalization).
pub fn ascend(kind: Quotient, alpha: f64, init: &RadialField, max_iter: usize) -> (f64, RadialField) {
    let grid = init.grid().clone();
    let n = grid.intervals();
    let ex = kind.exponents(alpha);
    let mut phi: Vec<f64> = init.values().iter().map(|v| v.abs()).collect();
    phi[n] = 0.0;
    normalize(&grid, &mut phi);
    let mut st = evaluate_state(&grid, &phi, alpha, ex);
    let mut tau = 0.5;
    let mut history = vec![st.log_q];
    let w = grid.volume_weights().to_vec();

    for it in 0..max_iter {
        if !(0.25..=4.0).contains(&st.k) {
            let f = RadialField::new(grid.clone(), phi.clone()).expect("finite");
            let lambda = 1.0 / st.k.sqrt();
            if let Ok(g) = dilate(&f, lambda).and_then(|g| g.resample(&grid)) {
                let mut cand = g.into_values();
                cand[n] = 0.0;
                normalize(&grid, &mut cand);
                let s2 = evaluate_state(&grid, &cand, alpha, ex);
                if s2.log_q.is_finite() && s2.log_q >= st.log_q - 1e-9 {
                    phi = cand;
                    st = s2;
                }
            }
        }
        let lap = operators::neg_laplacian(&grid, &phi);
        let e = 2.0 * alpha + 2.0;
        let grad: Vec<f64> = (0..=n)
            .map(|i| {
                let x = phi[i];
                let mut g = e * x.abs().powf(2.0 * alpha + 1.0) / st.p - ex.0 * 2.0 * x / st.m
                    - ex.2 * 2.0 * lap[i] / st.k;
                if ex.1 != 0.0 {
                    g -= ex.1 * 4.0 * st.v[i] * x / st.d;
                }
                g
            })
            .collect();
        let sigma = st.k / st.m;
        let mut dir = operators::shifted_inverse(&grid, sigma, &grad);
        let dot: f64 = (0..=n).map(|i| w[i] * dir[i] * phi[i]).sum();
        let c = dot / st.m;
        dir.iter_mut().zip(&phi).for_each(|(d, p)| *d -= c * p);
        dir[n] = 0.0;

        let mut accepted = false;
        for _ in 0..50 {
            let mut cand: Vec<f64> = phi
                .iter()
                .zip(&dir)
                .map(|(p, d)| (p + tau * d).max(0.0))
                .collect();
            cand[n] = 0.0;
            normalize(&grid, &mut cand);
            let s2 = evaluate_state(&grid, &cand, alpha, ex);
            if s2.log_q.is_finite() && s2.log_q >= st.log_q {
                phi = cand;
                st = s2;
                tau = (tau * 1.5).min(1e3);
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        history.push(st.log_q);
        if !accepted {
            break;
        }
        if it >= 200 {
            let old = history[history.len() - 201];
            if st.log_q - old < 1e-12 {
                break;
            }
        }
    }
    let field = RadialField::new(grid, phi).expect("finite iterate");
    (st.log_q.exp(), field)
}

fn best_of_inits(kind: Quotient, alpha: f64, opts: &SolveOptions) -> Result<(f64, RadialField)> {
    kind.check_domain(alpha)?;
    let grid = RadialGrid::new(opts.radius, opts.intervals)?;
    let iters = opts.max_iter.min(20_000);
    let mut best: Option<(f64, RadialField)> = None;
    for prof in [Profile::Gaussian, Profile::Exponential, Profile::Shell] {
        let init = prof.build(&grid, 1.0, 1.0)?;
        let (q, f) = ascend(kind, alpha, &init, iters);
        if best.as_ref().is_none_or(|b| q > b.0) {
            best = Some((q, f));
        }
    }
    Ok(best.expect("three initializations"))
}

pub fn estimate_gn_constant(alpha: f64, opts: &SolveOptions) -> Result<(f64, RadialField)> {
    best_of_inits(Quotient::Weinstein, alpha, opts)
}

pub fn estimate_interp_constant(alpha: f64, opts: &SolveOptions) -> Result<(f64, RadialField)> {
    best_of_inits(Quotient::Interpolation, alpha, opts)
}

pub fn estimate_coulomb_constant(alpha: f64, opts: &SolveOptions) -> Result<(f64, RadialField)> {
    best_of_inits(Quotient::Coulomb, alpha, opts)
}

/// `V_c = (alpha + 1)/c_alpha (1/(3 alpha - 1))^{3 alpha - 1} (1/(2(2 - 3 alpha)))^{2 - 3 alpha}`
/// with `x^x = 1` at `x = 0`.
pub fn v_critical(alpha: f64, c_alpha: f64) -> Result<f64> {
    let a = snap_alpha(alpha);
    Quotient::Interpolation.check_domain(alpha)?;
    if !(c_alpha.is_finite() && c_alpha > 0.0) {
        return Err(Error::InvalidOption(format!("constant must be positive, got {c_alpha}")));
    }
    let x = if a == 1.0 / 3.0 { 0.0 } else { 3.0 * a - 1.0 };
    let y = if a == 2.0 / 3.0 { 0.0 } else { 2.0 - 3.0 * a };
    let fx = if x == 0.0 { 1.0 } else { x.recip().powf(x) };
    let fy = if y == 0.0 { 1.0 } else { (2.0 * y).recip().powf(y) };
    Ok((a + 1.0) / c_alpha * fx * fy)
}

/// `M_c = (V_c / C)^{1/(4 alpha - 2)}` for `alpha in (1/2, 2/3]`.
pub fn critical_mass(alpha: f64, coupling: f64, v_c: f64) -> Result<f64> {
    if (alpha - 0.5).abs() < 1e-12 {
        return Err(Error::CriticalMassAtHalf);
    }
    if !(alpha > 0.5 && snap_alpha(alpha) <= 2.0 / 3.0) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "(1/2, 2/3]",
        });
    }
    if !(coupling > 0.0 && v_c > 0.0) {
        return Err(Error::InvalidCoupling(coupling));
    }
    Ok((v_c / coupling).powf(1.0 / (4.0 * alpha - 2.0)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub alpha: f64,
    pub c_gn_hat: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c_alpha_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_alpha_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v_c_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m_c_hat: Option<f64>,
    #[serde(skip)]
    pub maximizer: Option<RadialField>,
}

/// Estimates every constant that is defined at `alpha`; `coupling` is only used for `M_c`.
pub fn constants_report(alpha: f64, coupling: Option<f64>, opts: &SolveOptions) -> Result<ConstantsReport> {
    let a = snap_alpha(alpha);
    let (c_gn, gn_field) = estimate_gn_constant(alpha, opts)?;
    let mut maximizer = gn_field;
    let c_alpha = if a == 2.0 / 3.0 {
        Some(c_gn)
    } else if Quotient::Interpolation.check_domain(alpha).is_ok() {
        let (c, f) = estimate_interp_constant(alpha, opts)?;
        maximizer = f;
        Some(c)
    } else {
        None
    };
    let k_alpha = if a == 0.5 {
        c_alpha
    } else if Quotient::Coulomb.check_domain(alpha).is_ok() && a > 0.0 {
        Some(estimate_coulomb_constant(alpha, opts)?.0)
    } else {
        None
    };
    let v_c = c_alpha.map(|c| v_critical(alpha, c)).transpose()?;
    let m_c = match (v_c, coupling) {
        (Some(v), Some(c)) if a > 0.5 => Some(critical_mass(alpha, c, v)?),
        _ => None,
    };
    Ok(ConstantsReport {
        alpha,
        c_gn_hat: c_gn,
        c_alpha_hat: c_alpha,
        k_alpha_hat: k_alpha,
        v_c_hat: v_c,
        m_c_hat: m_c,
        maximizer: Some(maximizer),
    })
}

/// Estimated `C_GN(2/3)` on the default grid, computed once per process.
pub fn cached_gn_two_thirds() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| {
        estimate_gn_constant(2.0 / 3.0, &SolveOptions::default())
            .map(|r| r.0)
            .expect("default grid is valid")
    })
}

/// Estimated `C_alpha` on the default grid, memoized per `alpha`.
pub fn cached_interp_constant(alpha: f64) -> Result<f64> {
    use std::collections::HashMap;
    use std::sync::Mutex;
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let key = snap_alpha(alpha).to_bits();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache lock").get(&key) {
        return Ok(*v);
    }
    let v = estimate_interp_constant(alpha, &SolveOptions::default())?.0;
    cache.lock().expect("cache lock").insert(key, v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_critical_closed_forms() {
        let c = 0.25;
        let half = v_critical(0.5, c).unwrap();
        assert!((half - 3.0 / (2f64.sqrt() * c)).abs() < 1e-12);
        let two_thirds = v_critical(2.0 / 3.0, c).unwrap();
        assert!((two_thirds - 5.0 / (3.0 * c)).abs() < 1e-12);
        let third = v_critical(1.0 / 3.0, 1.0).unwrap();
        assert!((third - (4.0 / 3.0) * 0.5).abs() < 1e-12);
        assert!(v_critical(0.7, 1.0).is_err());
        assert!(v_critical(0.5, 0.0).is_err());
    }

    #[test]
    fn critical_mass_arithmetic() {
        assert!((critical_mass(0.6, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((critical_mass(0.625, 1.0, 4.0).unwrap() - 16.0).abs() < 1e-12);
        let e = critical_mass(0.5, 1.0, 1.0).unwrap_err();
        assert_eq!(e.to_string(), "critical mass undefined at alpha=1/2");
        assert!(critical_mass(0.4, 1.0, 1.0).is_err());
    }

    #[test]
    fn quotient_domains() {
        assert!(Quotient::Interpolation.check_domain(0.3).is_err());
        assert!(Quotient::Interpolation.check_domain(1.0 / 3.0).is_ok());
        assert!(Quotient::Coulomb.check_domain(0.6).is_err());
        assert!(Quotient::Weinstein.check_domain(2.0).is_err());
        assert!(Quotient::Weinstein.check_domain(0.0).is_err());
    }
}
