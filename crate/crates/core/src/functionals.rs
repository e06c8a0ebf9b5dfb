//! Mass, kinetic, Coulomb and power integrals, the total energy, and the scaling maps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};
use crate::operators;

fn default_weight() -> f64 {
    1.0
}

/// Exponent `alpha`, coupling `C`, target mass `M`; the interaction sign is fixed to `+1`.
///
/// `coulomb_weight` multiplies the Coulomb term. It is 1 for the physical energy
/// and differs only for the reduced functional used in the mass-scaling checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub coupling: f64,
    pub mass: f64,
    #[serde(default = "default_weight")]
    pub coulomb_weight: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, coupling: f64, mass: f64) -> Result<Self> {
        let p = Self {
            alpha,
            coupling,
            mass,
            coulomb_weight: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_coulomb_weight(mut self, w: f64) -> Result<Self> {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidOption(format!("coulomb weight {w}")));
        }
        self.coulomb_weight = w;
        Ok(self)
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        self.mass = mass;
        self.validate()?;
        Ok(self)
    }

    pub fn epsilon(&self) -> f64 {
        1.0
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !self.coupling.is_finite() || self.coupling < 0.0 {
            return Err(Error::InvalidCoupling(self.coupling));
        }
        if !self.mass.is_finite() || self.mass <= 0.0 {
            return Err(Error::InvalidMass(self.mass));
        }
        if !self.coulomb_weight.is_finite() || self.coulomb_weight < 0.0 {
            return Err(Error::InvalidOption(format!(
                "coulomb weight {}",
                self.coulomb_weight
            )));
        }
        Ok(())
    }

    /// `C / (2 alpha + 2)`
    pub fn power_coefficient(&self) -> f64 {
        self.coupling / (2.0 * self.alpha + 2.0)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && (0.0..2.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange {
            alpha,
            range: "[0, 2)",
        })
    }
}

fn is_unit(w: &f64) -> bool {
    *w == 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic_integral: f64,
    pub coulomb: f64,
    pub power_integral: f64,
    pub mass: f64,
    pub total: f64,
    pub alpha: f64,
    pub coupling: f64,
    #[serde(default = "default_weight", skip_serializing_if = "is_unit")]
    pub coulomb_weight: f64,
}

impl EnergyBreakdown {
    pub fn from_integrals(k: f64, d: f64, p: f64, m: f64, params: &ModelParams) -> Self {
        let total = 0.5 * k + 0.25 * params.coulomb_weight * d - params.power_coefficient() * p;
        Self {
            kinetic_integral: k,
            coulomb: d,
            power_integral: p,
            mass: m,
            total,
            alpha: params.alpha,
            coupling: params.coupling,
            coulomb_weight: params.coulomb_weight,
        }
    }

    pub fn family(&self) -> DilationFamily {
        DilationFamily {
            kinetic: self.kinetic_integral,
            coulomb: self.coulomb,
            power: self.power_integral,
            alpha: self.alpha,
            coupling: self.coupling,
            coulomb_weight: self.coulomb_weight,
        }
    }
}

pub fn mass(f: &RadialField) -> f64 {
    let g = f.grid();
    g.volume_weights()
        .iter()
        .zip(f.values())
        .map(|(w, v)| w * v * v)
        .sum()
}

/// `int |grad phi|^2`, fourth-order accurate; assumes `phi(R) = 0`.
pub fn kinetic_integral(f: &RadialField) -> f64 {
    operators::kinetic_form(f.grid(), f.values())
}

/// `V = phi^2 * |x|^{-1}` evaluated radially in O(N).
pub fn coulomb_potential(f: &RadialField) -> RadialField {
    let g = f.grid();
    let values = potential_values(g, f.values());
    RadialField::new(g.clone(), values).expect("finite potential")
}

pub(crate) fn potential_values(g: &RadialGrid, phi: &[f64]) -> Vec<f64> {
    let r = g.nodes();
    let rho_r2: Vec<f64> = phi.iter().zip(r).map(|(p, r)| p * p * r * r).collect();
    let rho_r: Vec<f64> = phi.iter().zip(r).map(|(p, r)| p * p * r).collect();
    let inner = g.cumulative(&rho_r2);
    let outer = g.cumulative(&rho_r);
    let total = *outer.last().unwrap();
    let mut v = Vec::with_capacity(r.len());
    v.push(4.0 * PI * total);
    for i in 1..r.len() {
        v.push(4.0 * PI * (inner[i] / r[i] + (total - outer[i])));
    }
    v
}

/// `D = int int phi^2(x) phi^2(y) / |x - y| dx dy`.
pub fn coulomb_energy(f: &RadialField) -> f64 {
    let g = f.grid();
    let v = potential_values(g, f.values());
    g.volume_weights()
        .iter()
        .zip(f.values())
        .zip(&v)
        .map(|((w, p), v)| w * p * p * v)
        .sum()
}

pub fn power_integral(f: &RadialField, alpha: f64) -> f64 {
    let e = 2.0 * alpha + 2.0;
    let g = f.grid();
    g.volume_weights()
        .iter()
        .zip(f.values())
        .map(|(w, v)| w * v.abs().powf(e))
        .sum()
}

pub fn energy(f: &RadialField, p: &ModelParams) -> EnergyBreakdown {
    EnergyBreakdown::from_integrals(
        kinetic_integral(f),
        coulomb_energy(f),
        power_integral(f, p.alpha),
        mass(f),
        p,
    )
}

/// Energy along the mass-preserving dilations `lambda^{3/2} phi(lambda x)`, known in closed form
/// from the three integrals of `phi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilationFamily {
    pub kinetic: f64,
    pub coulomb: f64,
    pub power: f64,
    pub alpha: f64,
    pub coupling: f64,
    pub coulomb_weight: f64,
}

impl DilationFamily {
    pub fn energy(&self, lambda: f64) -> f64 {
        0.5 * lambda * lambda * self.kinetic + 0.25 * self.coulomb_weight * lambda * self.coulomb
            - self.coupling / (2.0 * self.alpha + 2.0) * lambda.powf(3.0 * self.alpha) * self.power
    }

    /// `dE/dlambda` at `lambda = 1`.
    pub fn slope_at_one(&self) -> f64 {
        self.kinetic + 0.25 * self.coulomb_weight * self.coulomb
            - 3.0 * self.alpha * self.coupling / (2.0 * self.alpha + 2.0) * self.power
    }

    /// Minimizer of the family over `log10 lambda in [lo, hi]`: coarse scan then golden section.
    pub fn argmin(&self, lo: f64, hi: f64) -> (f64, f64) {
        let steps = 240;
        let mut best = (lo, self.energy(10f64.powf(lo)));
        for k in 1..=steps {
            let t = lo + (hi - lo) * k as f64 / steps as f64;
            let e = self.energy(10f64.powf(t));
            if e < best.1 {
                best = (t, e);
            }
        }
        let dt = (hi - lo) / steps as f64;
        let (mut a, mut b) = ((best.0 - dt).max(lo), (best.0 + dt).min(hi));
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let f = |t: f64| self.energy(10f64.powf(t));
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        let t = 0.5 * (a + b);
        let e = f(t);
        if e <= best.1 {
            (10f64.powf(t), e)
        } else {
            (10f64.powf(best.0), best.1)
        }
    }
}

/// `lambda^{3/2} phi(lambda r)` represented exactly on the node-mapped grid of radius `R / lambda`.
pub fn dilate(f: &RadialField, lambda: f64) -> Result<RadialField> {
    node_mapped(f, lambda, 1.5, 1.0)
}

fn node_mapped(f: &RadialField, lambda: f64, p: f64, q: f64) -> Result<RadialField> {
    check_scale(lambda)?;
    let g = f.grid();
    let grid = RadialGrid::new(g.radius() / lambda.powf(q), g.intervals())?;
    let c = lambda.powf(p);
    RadialField::new(grid, f.values().iter().map(|v| c * v).collect())
}

fn check_scale(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidScale(lambda))
    }
}

/// `lambda^p phi(lambda^q r)`.
///
/// Spreading maps (`lambda^q <= 1`) enlarge the radius to `R / lambda^q`; concentrating maps keep
/// the grid and interpolate.
pub fn rescale(f: &RadialField, lambda: f64, p: f64, q: f64) -> Result<RadialField> {
    check_scale(lambda)?;
    let s = lambda.powf(q);
    if s <= 1.0 {
        return node_mapped(f, lambda, p, q);
    }
    let c = lambda.powf(p);
    let g = f.grid();
    let values = g.nodes().iter().map(|&r| c * f.eval(s * r)).collect();
    RadialField::new(g.clone(), values)
}

/// `x^e` with `x^0 = 1` for every `x`, including the degenerate `0^0`.
fn pow_convention(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

/// Snaps `alpha` onto 1/3 or 2/3 when it is within rounding of them.
pub(crate) fn snap_alpha(alpha: f64) -> f64 {
    for t in [1.0 / 3.0, 2.0 / 3.0] {
        if (alpha - t).abs() < 1e-9 {
            return t;
        }
    }
    alpha
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GTest {
    pub g: f64,
    /// Minimizer of `E(phi_lambda) / lambda`; `None` outside `(1/3, 2/3)`.
    pub lambda_opt: Option<f64>,
}

/// Sign test for negative energies on the dilation orbit, from the three integrals alone.
pub fn g_from_integrals(k: f64, d: f64, p: f64, params: &ModelParams) -> Result<GTest> {
    let alpha = snap_alpha(params.alpha);
    if !(1.0 / 3.0..=2.0 / 3.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange {
            alpha: params.alpha,
            range: "[1/3, 2/3]",
        });
    }
    let a = if alpha == 1.0 / 3.0 { 0.0 } else { 3.0 * alpha - 1.0 };
    let b = if alpha == 2.0 / 3.0 { 0.0 } else { 2.0 - 3.0 * alpha };
    let c = params.coupling;
    let kin = if a == 0.0 { 1.0 } else { pow_convention(k / a, a) };
    let cou = if b == 0.0 { 1.0 } else { pow_convention(d / (2.0 * b), b) };
    let g = kin * cou - c / (alpha + 1.0) * p;
    let lambda_opt = if a > 0.0 && b > 0.0 && k > 0.0 {
        Some((a * c * p / ((alpha + 1.0) * k)).powf(1.0 / b))
    } else {
        None
    };
    Ok(GTest { g, lambda_opt })
}

pub fn g_functional(f: &RadialField, params: &ModelParams) -> Result<GTest> {
    if f.is_zero() {
        return Err(Error::ZeroField);
    }
    g_from_integrals(
        kinetic_integral(f),
        coulomb_energy(f),
        power_integral(f, params.alpha),
        params,
    )
}

/// `E >= D/4 [1 - (C M^{4 alpha - 2} / V_c)^{1/(2 - 3 alpha)}]` for `alpha in (1/3, 2/3)`,
/// with `V_c` built from the interpolation constant `c_alpha`.
pub fn coulomb_lower_bound(f: &RadialField, params: &ModelParams, c_alpha: f64) -> Result<f64> {
    let alpha = params.alpha;
    if !(alpha > 1.0 / 3.0 && alpha < 2.0 / 3.0) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "(1/3, 2/3)",
        });
    }
    let m = mass(f);
    let vc = crate::constants::v_critical(alpha, c_alpha)?;
    let x = params.coupling * m.powf(4.0 * alpha - 2.0) / vc;
    Ok(0.25 * coulomb_energy(f) * (1.0 - x.powf(1.0 / (2.0 - 3.0 * alpha))))
}

/// `E >= K/2 - C c_gn / (2 alpha + 2) M^{(2 - alpha)/2} K^{3 alpha / 2}`.
pub fn gn_lower_bound(f: &RadialField, params: &ModelParams, c_gn: f64) -> f64 {
    let k = kinetic_integral(f);
    let m = mass(f);
    let alpha = params.alpha;
    0.5 * k
        - params.power_coefficient() * c_gn * m.powf((2.0 - alpha) / 2.0) * k.powf(1.5 * alpha)
}
