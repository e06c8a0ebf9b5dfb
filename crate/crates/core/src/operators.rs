//! Discrete radial Laplacian in the variable `u = r phi`.
//!
//! The kinetic integral is the quadratic form
//! `4 pi [ sum_c (u_{c+1} - u_c)^2 / h + sum_i s_i^2 / (12 h) ]`, `s_i = u_{i+1} - 2 u_i + u_{i-1}`,
//! whose second term cancels the leading `h^2` error of the plain difference quotient.
//! `u_0 = 0` always and `u_N = 0` under the Dirichlet condition.

use std::f64::consts::PI;

use crate::grid::RadialGrid;

fn u_of(grid: &RadialGrid, phi: &[f64]) -> Vec<f64> {
    grid.nodes().iter().zip(phi).map(|(r, p)| r * p).collect()
}

fn second_differences(u: &[f64]) -> Vec<f64> {
    let n = u.len() - 1;
    let mut s = vec![0.0; n + 1];
    for i in 1..n {
        s[i] = u[i + 1] - 2.0 * u[i] + u[i - 1];
    }
    s
}

pub fn kinetic_form(grid: &RadialGrid, phi: &[f64]) -> f64 {
    let h = grid.spacing();
    let u = u_of(grid, phi);
    let first: f64 = u.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    let second: f64 = second_differences(&u).iter().map(|s| s * s).sum();
    4.0 * PI * (first / h + second / (12.0 * h))
}

/// `-Delta phi` at every node, consistent with [`kinetic_form`]:
/// `sum_i 4 pi h r_i^2 (-Delta phi)_i psi_i` is its bilinear form.
pub fn neg_laplacian(grid: &RadialGrid, phi: &[f64]) -> Vec<f64> {
    let n = grid.intervals();
    let h = grid.spacing();
    let u = u_of(grid, phi);
    let s = second_differences(&u);
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        let prev = s[i - 1];
        let next = s[i + 1];
        let b = -s[i] / h + (prev - 2.0 * s[i] + next) / (12.0 * h);
        out[i] = b / (h * grid.node(i));
    }
    // smooth even extension to the origin
    if n >= 3 {
        out[0] = (4.0 * out[1] - out[2]) / 3.0;
    }
    out
}

/// Coulomb potential whose energy `sum_i T_i rho_i V_i` (trapezoid weights `T`) is a symmetric
/// quadratic form in `rho = phi^2`, so that `V phi` is its exact gradient.
///
/// The diagonal term `-pi h^2 rho / 3` removes the `h^2` error caused by the kink of `1/max(r, s)`.
pub fn symmetric_potential(grid: &RadialGrid, phi: &[f64]) -> Vec<f64> {
    let n = grid.intervals();
    let h = grid.spacing();
    let r = grid.nodes();
    let t = |j: usize| if j == n { h / 2.0 } else { h };
    let rho: Vec<f64> = phi.iter().map(|p| p * p).collect();
    // inner[k] = sum_{j<k} t_j r_j^2 rho_j ; outer[k] = sum_{j>k} t_j r_j rho_j
    let mut inner = vec![0.0; n + 1];
    for k in 1..=n {
        inner[k] = inner[k - 1] + t(k - 1) * r[k - 1] * r[k - 1] * rho[k - 1];
    }
    let mut outer = vec![0.0; n + 1];
    for k in (0..n).rev() {
        outer[k] = outer[k + 1] + t(k + 1) * r[k + 1] * rho[k + 1];
    }
    let corr = -PI * h * h / 3.0;
    (0..=n)
        .map(|k| {
            let half = 0.5 * t(k) * rho[k];
            let near = if k == 0 { 0.0 } else { (inner[k] + half * r[k] * r[k]) / r[k] };
            4.0 * PI * (near + outer[k] + half * r[k]) + corr * rho[k]
        })
        .collect()
}

/// Applies `(sigma - Delta)^{-1}` with second-order differences in `u` and
/// homogeneous Dirichlet data at `r = R`.
pub fn shifted_inverse(grid: &RadialGrid, sigma: f64, v: &[f64]) -> Vec<f64> {
    let n = grid.intervals();
    let h = grid.spacing();
    let h2 = h * h;
    let m = n - 1;
    let diag = sigma + 2.0 / h2;
    let off = -1.0 / h2;
    // Thomas algorithm on unknowns u_1..u_{N-1}
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        let rhs = grid.node(i) * v[i];
        if k == 0 {
            c[k] = off / diag;
            d[k] = rhs / diag;
        } else {
            let denom = diag - off * c[k - 1];
            c[k] = off / denom;
            d[k] = (rhs - off * d[k - 1]) / denom;
        }
    }
    let mut u = vec![0.0; n + 1];
    for k in (0..m).rev() {
        let next = if k + 1 < m { u[k + 2] } else { 0.0 };
        u[k + 1] = d[k] - c[k] * next;
    }
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        out[i] = u[i] / grid.node(i);
    }
    if n >= 3 {
        out[0] = (4.0 * out[1] - out[2]) / 3.0;
    }
    out
}
