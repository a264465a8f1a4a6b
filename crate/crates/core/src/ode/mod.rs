//! Numerical integration of `y'' = 6y² + x` through its double poles.
//!
//! Away from poles the equation is integrated as the first-order system
//! `(y, y')` with an embedded Dormand–Prince 5(4) pair. When `y` blows up
//! the local Laurent data `(p, h)` is fitted from the recent trajectory and
//! the integration resumes from the series on the far side of the pole.

mod dopri;
mod integrate;
mod laurent;

pub use dopri::{hermite, step, StepOutcome};
pub use integrate::{detect_and_fit_pole, integrate, seed_from_pole, PoleCrossing, Sample, Start, Trajectory};
pub use laurent::{laurent_coeffs, laurent_eval, LaurentSeries};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(x, y, y')` of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub dy: f64,
}

impl State {
    pub fn new(x: f64, y: f64, dy: f64) -> Self {
        Self { x, y, dy }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.dy.is_finite()
    }

    pub fn hamiltonian(&self) -> f64 {
        hamiltonian(self)
    }
}

/// Laurent data of a solution at a pole: the location `p` and the free
/// quartic coefficient `h` of
/// `y = (x-p)^-2 - p(x-p)²/10 - (x-p)³/6 + h(x-p)⁴ + ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleData {
    pub p: f64,
    pub h: f64,
}

impl PoleData {
    pub fn new(p: f64, h: f64) -> Self {
        Self { p, h }
    }
}

/// Integration direction along the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Left => -1.0,
            Direction::Right => 1.0,
        }
    }

    pub fn towards(from: f64, to: f64) -> Self {
        if to < from {
            Direction::Left
        } else {
            Direction::Right
        }
    }
}

/// Tuning of the integrator and of the pole handoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Magnitude of the first trial step.
    pub h_init: f64,
    /// `y` above which a pole is declared.
    pub y_detect: f64,
    /// `|x - p|` window whose samples are used for fitting `h`.
    pub fit_band: (f64, f64),
    /// Distance from the pole at which the integration restarts.
    pub restart_offset: f64,
    /// Highest Laurent power kept in the series.
    pub series_degree: usize,
    /// Upper bound on the number of poles crossed by one integration.
    pub max_poles: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-3,
            y_detect: 1e4,
            fit_band: (0.05, 0.5),
            restart_offset: 0.2,
            series_degree: 20,
            max_poles: 10_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return bad("rtol and atol must be positive");
        }
        if !(self.h_init > 0.0) {
            return bad("h_init must be positive");
        }
        if !(0.0 < self.fit_band.0 && self.fit_band.0 < self.fit_band.1) {
            return bad("fit_band must satisfy 0 < lo < hi");
        }
        if self.series_degree < 6 {
            return bad("series_degree must be at least 6");
        }
        if !(self.restart_offset >= self.fit_band.0 && self.restart_offset <= self.fit_band.1) {
            return bad("restart_offset must lie inside fit_band");
        }
        if !(self.y_detect > 1.0 / (self.fit_band.0 * self.fit_band.0)) {
            return bad("y_detect must trigger closer to the pole than fit_band.lo");
        }
        Ok(())
    }
}

/// Right-hand side of the first-order system: `(y', 6y² + x)`.
pub fn rhs(s: &State) -> (f64, f64) {
    (s.dy, 6.0 * s.y * s.y + s.x)
}

/// `H = y'²/2 - 2y³ - xy`; along solutions `dH/dx = -y`.
pub fn hamiltonian(s: &State) -> f64 {
    0.5 * s.dy * s.dy - 2.0 * s.y * s.y * s.y - s.x * s.y
}
