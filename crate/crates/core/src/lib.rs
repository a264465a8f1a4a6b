//! Real solutions of the Painlevé I equation `y'' = 6y² + x`.
//!
//! * [`specfun`]: complex log-gamma.
//! * [`stokes`]: Stokes multipliers, their constraints and the connection
//!   formulas giving the asymptotic constants `(a, φ)` and `(b, ψ)`.
//! * [`asymptotics`]: the `x -> -inf` formulas for `y` and the Hamiltonian,
//!   and the predicted pole lattice of singular solutions.
//! * [`ode`]: adaptive integration through double poles.
//! * [`harness`]: the two reference solutions, numeric-vs-asymptotic
//!   comparison and parameter recovery.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod harness;
pub mod io;
pub mod ode;
pub mod specfun;
pub mod stokes;

pub use error::{Error, Result};
pub use num_complex::Complex64;
