//! Ground states of the Schrödinger–Poisson–Slater energy
//! `E = 1/2 |grad phi|^2 + 1/4 D[phi] - C/(2 alpha + 2) |phi|^{2 alpha + 2}` on radial profiles
//! of fixed mass, together with the interpolation constants and existence thresholds that
//! decide whether a minimizer exists.

pub mod bumps;
pub mod constants;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod io;
pub mod minimizer;
pub mod operators;
pub mod phase;
pub mod profiles;

pub use error::{Error, Result};
pub use functionals::{EnergyBreakdown, ModelParams};
pub use grid::{RadialField, RadialGrid};
pub use minimizer::{Init, MinimizerReport, SolveOptions, Status};
