//! Spectral solvers for the radial Schrödinger problem with
//! V(r) = -a/r + b r^2, in free space or inside an impenetrable sphere.
//!
//! * [`aim`]: asymptotic iteration method in arbitrary precision.
//! * [`exact`]: quasi-exact solvability conditions and closed-form levels.
//! * [`bounds`]: Heisenberg and envelope bounds, critical-coupling estimates.
//! * [`oracle`]: double-precision finite-difference reference solver.
//! * [`scan`]: critical couplings, level orderings, crossings, sweeps.

pub mod aim;
pub mod bounds;
pub mod error;
pub mod exact;
pub mod oracle;
pub mod poly;
pub mod precision;
pub mod rational;
pub mod root;
pub mod scan;
pub mod types;

pub use rug;

pub use aim::{aim_delta, aim_iterate, aim_solve, aim_solve_level, AimOptions, AimProblem, DeltaTrace};
pub use error::{Error, Result};
pub use poly::Poly;
pub use precision::{format_fixed, format_significant, PrecisionCtx};
pub use rational::{rf_derivative, rf_eval, RationalFn};
pub use scan::{find_bc, find_crossing, ordering, sweep_export, CriticalCoupling, CrossingEvent, OrderingTable};
pub use types::{Confinement, EigenResult, LevelLabel, PotentialSpec, SolverKind};
