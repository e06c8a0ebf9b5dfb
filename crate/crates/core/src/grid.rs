//! Uniform radial mesh on `[0, R]`, volume quadrature and cubic resampling.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_INTERVALS: usize = 16;

/// Uniform mesh `r_i = i R / N`, `i = 0..=N`, with precomputed volume weights.
///
/// Cloning is cheap: nodes and weights are shared.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct RadialGrid {
    radius: f64,
    intervals: usize,
    nodes: Arc<[f64]>,
    volume_weights: Arc<[f64]>,
    trapezoid_weights: Arc<[f64]>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct GridSpec {
    radius: f64,
    intervals: usize,
}

impl TryFrom<GridSpec> for RadialGrid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Self> {
        RadialGrid::new(s.radius, s.intervals)
    }
}

impl From<RadialGrid> for GridSpec {
    fn from(g: RadialGrid) -> Self {
        GridSpec {
            radius: g.radius,
            intervals: g.intervals,
        }
    }
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.radius == other.radius && self.intervals == other.intervals
    }
}

impl RadialGrid {
    pub fn new(radius: f64, intervals: usize) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidRadius(radius));
        }
        if intervals < MIN_INTERVALS {
            return Err(Error::InvalidIntervals(intervals));
        }
        let n = intervals;
        let nodes: Arc<[f64]> = (0..=n)
            .map(|i| if i == n { radius } else { radius * i as f64 / n as f64 })
            .collect();
        let h = radius / n as f64;
        let w = simpson_weights(n, h);
        let volume_weights = nodes
            .iter()
            .zip(&w)
            .map(|(r, w)| 4.0 * PI * w * r * r)
            .collect();
        let trapezoid_weights = nodes
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let t = if i == n { h / 2.0 } else { h };
                4.0 * PI * t * r * r
            })
            .collect();
        Ok(Self {
            radius,
            intervals,
            nodes,
            volume_weights,
            trapezoid_weights,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.radius / self.intervals as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// `4 pi w_i r_i^2`: integrating a radial function over R^3 is a dot product with these.
    pub fn volume_weights(&self) -> &[f64] {
        &self.volume_weights
    }

    /// `4 pi t_i r_i^2` with trapezoid line weights `t_i`; the inner product the solvers work in.
    pub fn trapezoid_weights(&self) -> &[f64] {
        &self.trapezoid_weights
    }

    /// `sum_i W_i f_i`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        self.volume_weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Running integral `F_i = int_0^{r_i} f(s) ds` (plain line measure).
    ///
    /// Fourth order on even nodes, third order on odd ones.
    pub fn cumulative(&self, f: &[f64]) -> Vec<f64> {
        let n = self.intervals;
        let h = self.spacing();
        let mut out = vec![0.0; n + 1];
        for i in 1..=n {
            out[i] = if i % 2 == 0 {
                out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i])
            } else if i < n {
                out[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1])
            } else {
                out[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i])
            };
        }
        out
    }
}

/// Composite Simpson weights; an odd interval count gets a trapezoid on the last cell.
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    let even = n - n % 2;
    for c in (0..even).step_by(2) {
        w[c] += h / 3.0;
        w[c + 1] += 4.0 * h / 3.0;
        w[c + 2] += h / 3.0;
    }
    if even < n {
        w[n - 1] += h / 2.0;
        w[n] += h / 2.0;
    }
    w
}

/// Real samples of a radial function on a [`RadialGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// `int_{R^3} f dx`.
    pub fn integrate_volume(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// Same samples with a forced zero at the outer node.
    pub fn with_dirichlet(mut self) -> Self {
        if let Some(last) = self.values.last_mut() {
            *last = 0.0;
        }
        self
    }

    /// Cubic Lagrange value at `r`; zero outside `[0, R]`.
    pub fn eval(&self, r: f64) -> f64 {
        let n = self.grid.intervals();
        let big_r = self.grid.radius();
        let r = r.abs();
        if r > big_r {
            return 0.0;
        }
        let h = self.grid.spacing();
        let x = r / h;
        let cell = (x.floor() as usize).min(n - 1);
        // stencil of four consecutive nodes, using evenness at the origin
        let first = (cell as isize - 1).min(n as isize - 3);
        let t = x - first as f64;
        let mut acc = 0.0;
        for k in 0..4 {
            let idx = first + k as isize;
            let v = self.values[idx.unsigned_abs()];
            let mut l = 1.0;
            for m in 0..4 {
                if m != k {
                    l *= (t - m as f64) / (k as f64 - m as f64);
                }
            }
            acc += l * v;
        }
        acc
    }

    pub fn resample(&self, target: &RadialGrid) -> Result<Self> {
        if *target == self.grid {
            return Ok(self.clone());
        }
        if target.radius() > self.grid.radius() {
            let edge = self.values[self.grid.intervals()].abs();
            if edge > 1e-12 * self.sup_norm().max(1.0) {
                return Err(Error::NonDecayedBoundary(edge));
            }
        }
        let values = target.nodes().iter().map(|&r| self.eval(r)).collect();
        Self::new(target.clone(), values)
    }
}

pub fn make_grid(radius: f64, intervals: usize) -> Result<RadialGrid> {
    RadialGrid::new(radius, intervals)
}

pub fn integrate_volume(f: &RadialField) -> f64 {
    f.integrate_volume()
}

pub fn resample(f: &RadialField, g: &RadialGrid) -> Result<RadialField> {
    f.resample(g)
}
