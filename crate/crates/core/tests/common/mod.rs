#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spss_core::{RadialField, RadialGrid};

pub const PI32: f64 = 5.568_327_996_831_708; // pi^{3/2}

pub fn grid(r: f64, n: usize) -> RadialGrid {
    RadialGrid::new(r, n).unwrap()
}

/// `exp(-r^2/2)` with a Dirichlet zero at the outer node.
pub fn gaussian(r: f64, n: usize) -> RadialField {
    RadialField::from_fn(&grid(r, n), |r| (-r * r / 2.0).exp())
        .unwrap()
        .with_dirichlet()
}

/// Smooth positive field: a few Gaussian shells with random centers, widths and weights.
pub fn random_field(g: &RadialGrid, seed: u64) -> RadialField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=4);
    let bumps: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| (rng.gen_range(0.1..2.0), rng.gen_range(0.0..3.0), rng.gen_range(0.5..2.0)))
        .collect();
    RadialField::from_fn(g, |r| {
        bumps
            .iter()
            .map(|(a, c, w)| a * (-((r - c) / w).powi(2)).exp())
            .sum()
    })
    .unwrap()
    .with_dirichlet()
}

/// Smooth perturbation direction vanishing at the outer node.
pub fn random_direction(g: &RadialGrid, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (a, b, w) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.7..2.0));
    let n = g.intervals();
    g.nodes()
        .iter()
        .enumerate()
        .map(|(i, r)| if i == n { 0.0 } else { (a + b * r) * (-(r / w).powi(2)).exp() })
        .collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Composite 8-point Gauss-Legendre rule on `[a, b]` with `cells` panels.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let h = (b - a) / cells as f64;
    let mut acc = 0.0;
    for c in 0..cells {
        let mid = a + (c as f64 + 0.5) * h;
        for k in 0..4 {
            let d = 0.5 * h * X[k];
            acc += W[k] * (f(mid - d) + f(mid + d));
        }
    }
    0.5 * h * acc
}

/// Radial ground state of `-Q'' - 2Q'/r + Q = Q^p` by shooting on `Q(0)`.
///
/// Returns the mass `int Q^2 dx` of the decaying solution.
pub fn ground_state_mass(p: f64) -> f64 {
    let h = 1e-3;
    let rhs = |r: f64, q: f64, dq: f64| -> f64 {
        let src = q - q.abs().powf(p - 1.0) * q;
        if r == 0.0 {
            src / 3.0
        } else {
            src - 2.0 * dq / r
        }
    };
    // integrates until the profile crosses zero (+1) or turns upward (-1)
    let run = |a: f64, mass: &mut f64| -> i32 {
        let (mut r, mut q, mut dq) = (0.0f64, a, 0.0f64);
        *mass = 0.0;
        while r < 30.0 {
            let k1 = (dq, rhs(r, q, dq));
            let k2 = (dq + 0.5 * h * k1.1, rhs(r + 0.5 * h, q + 0.5 * h * k1.0, dq + 0.5 * h * k1.1));
            let k3 = (dq + 0.5 * h * k2.1, rhs(r + 0.5 * h, q + 0.5 * h * k2.0, dq + 0.5 * h * k2.1));
            let k4 = (dq + h * k3.1, rhs(r + h, q + h * k3.0, dq + h * k3.1));
            let q1 = q + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            let dq1 = dq + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            *mass += 4.0 * PI * 0.5 * h * (r * r * q * q + (r + h) * (r + h) * q1 * q1);
            r += h;
            q = q1;
            dq = dq1;
            if q < 0.0 {
                return 1;
            }
            if dq > 0.0 {
                return -1;
            }
        }
        0
    };
    let (mut lo, mut hi) = (1.0, 10.0);
    let mut m = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if run(mid, &mut m) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    run(lo, &mut m);
    m
}

/// Sharp Gagliardo-Nirenberg constant from the ground state mass via the Pohozaev identities
/// `K = 3 alpha M/(2 - alpha)`, `P = 2(alpha + 1) M/(2 - alpha)`.
pub fn gn_constant_from_shooting(alpha: f64) -> f64 {
    let m = ground_state_mass(2.0 * alpha + 1.0);
    let k = 3.0 * alpha * m / (2.0 - alpha);
    let p = 2.0 * (alpha + 1.0) * m / (2.0 - alpha);
    p / (k.powf(1.5 * alpha) * m.powf((2.0 - alpha) / 2.0))
}
