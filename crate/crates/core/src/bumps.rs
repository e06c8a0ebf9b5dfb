//! Test functions made of `n` separated copies of a compressed unit-ball bump.
//!
//! Only aggregate integrals are needed: `eta_n(x) = eta(n^{1/3} x)` placed at `n` centers with
//! mutual distance at least `M^2 n^{2/3} / D[eta] + 2` keeps the mass and power integrals of `eta`,
//! multiplies the kinetic integral by `n^{2/3}` and divides the Coulomb energy by at least
//! `n^{2/3} / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{self, g_from_integrals, EnergyBreakdown, ModelParams};
use crate::grid::{RadialField, RadialGrid};
use crate::profiles::Profile;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiBump {
    pub n: usize,
    /// Kinetic, mass and power integrals are exact; `coulomb` is the certified upper bound.
    pub summary: EnergyBreakdown,
    pub separation: f64,
    /// `D[eta]` of the uncompressed bump.
    pub eta_coulomb: f64,
}

fn check_unit_ball(eta: &RadialField) -> Result<()> {
    let g = eta.grid();
    let sup = eta.sup_norm();
    if sup == 0.0 {
        return Err(Error::ZeroField);
    }
    let outside = g
        .nodes()
        .iter()
        .zip(eta.values())
        .filter(|(r, _)| **r >= 1.0)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    if outside > 1e-12 * sup {
        return Err(Error::NotInUnitBall(outside));
    }
    Ok(())
}

pub fn multi_bump(eta: &RadialField, n: usize, params: &ModelParams) -> Result<MultiBump> {
    check_unit_ball(eta)?;
    if n == 0 {
        return Err(Error::InvalidOption("bump count must be positive".into()));
    }
    let base = functionals::energy(eta, params);
    Ok(aggregate(&base, n, params))
}

fn aggregate(base: &EnergyBreakdown, n: usize, params: &ModelParams) -> MultiBump {
    let n23 = (n as f64).powf(2.0 / 3.0);
    let m = base.mass;
    let summary = EnergyBreakdown::from_integrals(
        n23 * base.kinetic_integral,
        2.0 * base.coulomb / n23,
        base.power_integral,
        m,
        params,
    );
    MultiBump {
        n,
        summary,
        separation: m * m * n23 / base.coulomb + 2.0,
        eta_coulomb: base.coulomb,
    }
}

/// Coulomb energy of the `n` bumps placed on a cubic lattice of spacing `separation`.
///
/// The compressed bumps are radial with disjoint supports, so each pair interacts as two point
/// charges of mass `M / n`.
pub fn lattice_coulomb(eta_coulomb: f64, mass: f64, n: usize, separation: f64) -> f64 {
    let n23 = (n as f64).powf(2.0 / 3.0);
    let side = (1..).find(|k: &usize| k * k * k >= n).unwrap_or(1);
    let centers: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let (x, y, z) = (i % side, (i / side) % side, i / (side * side));
            [x as f64 * separation, y as f64 * separation, z as f64 * separation]
        })
        .collect();
    let q = mass / n as f64;
    let mut cross = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = (0..3).map(|k| (centers[i][k] - centers[j][k]).powi(2)).sum::<f64>().sqrt();
            cross += 2.0 * q * q / d;
        }
    }
    eta_coulomb / n23 + cross
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpRow {
    pub n: usize,
    pub kinetic: f64,
    pub coulomb_bound: f64,
    pub power: f64,
    pub separation: f64,
    pub g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpScan {
    pub rows: Vec<BumpRow>,
    /// Smallest `n` whose test value is negative.
    pub n_negative: usize,
}

/// Default test profile: a smoothly cut Gaussian on the unit ball with the requested mass.
pub fn default_eta(mass: f64) -> Result<RadialField> {
    let grid = RadialGrid::new(1.0, 2000)?;
    Profile::CutGaussian.build(&grid, 0.35, mass)
}

/// Doubles `n` until the test value is negative, then bisects for the smallest such `n`.
///
/// Rows list `n = 1, 2, 4, ...` and the minimal negative `n`.
pub fn bump_scan(eta: &RadialField, params: &ModelParams, n_max: usize) -> Result<BumpScan> {
    let a = params.alpha;
    if !((1.0 / 3.0 - 1e-9)..0.5).contains(&a) {
        return Err(Error::AlphaOutOfRange {
            alpha: a,
            range: "[1/3, 1/2)",
        });
    }
    check_unit_ball(eta)?;
    let base = functionals::energy(eta, params);
    let row = |n: usize| -> Result<BumpRow> {
        let mb = aggregate(&base, n, params);
        let s = &mb.summary;
        let g = g_from_integrals(s.kinetic_integral, s.coulomb, s.power_integral, params)?.g;
        Ok(BumpRow {
            n,
            kinetic: s.kinetic_integral,
            coulomb_bound: s.coulomb,
            power: s.power_integral,
            separation: mb.separation,
            g,
        })
    };
    let mut rows = Vec::new();
    let mut n = 1usize;
    loop {
        let r = row(n)?;
        rows.push(r);
        if r.g < 0.0 {
            break;
        }
        if n >= n_max {
            return Err(Error::NoNegativeBump(n_max));
        }
        n = (n * 2).min(n_max);
    }
    let mut hi = n;
    let mut lo = n / 2;
    if hi > 1 && lo >= 1 {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if row(mid)?.g < 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if hi != n {
            rows.push(row(hi)?);
        }
    }
    Ok(BumpScan { rows, n_negative: hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bump_is_eta() {
        let eta = default_eta(3.0).unwrap();
        let p = ModelParams::new(1.0 / 3.0, 10.0, 3.0).unwrap();
        let mb = multi_bump(&eta, 1, &p).unwrap();
        let e = functionals::energy(&eta, &p);
        assert_eq!(mb.summary.kinetic_integral, e.kinetic_integral);
        assert_eq!(mb.summary.coulomb, 2.0 * e.coulomb);
        assert_eq!(mb.summary.power_integral, e.power_integral);
    }

    #[test]
    fn eight_bumps_scale() {
        let eta = default_eta(1.0).unwrap();
        let p = ModelParams::new(1.0 / 3.0, 10.0, 1.0).unwrap();
        let one = multi_bump(&eta, 1, &p).unwrap();
        let eight = multi_bump(&eta, 8, &p).unwrap();
        assert!((eight.summary.coulomb - one.eta_coulomb / 2.0).abs() < 1e-12 * one.eta_coulomb);
        assert!((eight.summary.kinetic_integral - 4.0 * one.summary.kinetic_integral).abs() < 1e-9);
    }

    #[test]
    fn rejects_wide_profile() {
        let g = RadialGrid::new(3.0, 300).unwrap();
        let f = Profile::Gaussian.build(&g, 1.0, 1.0).unwrap();
        let p = ModelParams::new(1.0 / 3.0, 10.0, 1.0).unwrap();
        assert!(matches!(multi_bump(&f, 2, &p), Err(Error::NotInUnitBall(_))));
    }

    #[test]
    fn lattice_respects_bound() {
        for n in [1usize, 2, 7, 27, 64, 100] {
            let (d, m) = (5.0, 2.0);
            let sep = m * m * (n as f64).powf(2.0 / 3.0) / d + 2.0;
            let exact = lattice_coulomb(d, m, n, sep);
            assert!(exact <= 2.0 * d / (n as f64).powf(2.0 / 3.0));
        }
    }
}
