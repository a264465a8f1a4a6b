//! Reference solutions and the numeric-versus-asymptotic comparison.

mod compare;
mod fit;
mod flow;

pub use compare::{
    envelope_exponent, run_compare, run_compare_with, CompareOptions, CompareReport, Exponent, GridRow, PoleRow,
};
pub use fit::{fit_params, fit_params_with, FitOptions};
pub use flow::{hamiltonian_flow_defect, FlowCheck};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ode::{PoleData, Start, State};
use crate::stokes::{
    classify_s2, complete_from_adjacent, OscParams, SingParams, SolutionClass, StokesMultipliers, DEFAULT_CLASSIFY_TOL,
};

/// Asymptotic constants of one solution family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum AsymParams {
    Oscillatory(OscParams),
    Singular(SingParams),
}

/// The solution a comparison run integrates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `y(0) = y'(0) = 0`, all multipliers `2i cos(2π/5)`.
    ZeroIc,
    /// Double pole at the origin with `h = 0`, all multipliers `-2i cos(π/5)`.
    ZeroPole,
    Custom {
        init: Start,
        s2: Complex64,
    },
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::ZeroIc => "zero-ic",
            Preset::ZeroPole => "zero-pole",
            Preset::Custom { .. } => "custom",
        }
    }

    pub fn start(&self) -> Start {
        match self {
            Preset::ZeroIc => Start::Point(State::new(0.0, 0.0, 0.0)),
            Preset::ZeroPole => Start::Pole(PoleData::new(0.0, 0.0)),
            Preset::Custom { init, .. } => *init,
        }
    }

    pub fn s2(&self) -> Complex64 {
        match self {
            Preset::ZeroIc => zero_ic_stokes().s_2,
            Preset::ZeroPole => zero_pole_stokes().s_2,
            Preset::Custom { s2, .. } => *s2,
        }
    }

    pub fn class(&self) -> SolutionClass {
        classify_s2(self.s2(), DEFAULT_CLASSIFY_TOL)
    }
}

pub fn zero_ic_stokes() -> StokesMultipliers {
    StokesMultipliers::uniform(Complex64::new(0.0, 2.0 * (2.0 * PI / 5.0).cos()))
}

pub fn zero_pole_stokes() -> StokesMultipliers {
    StokesMultipliers::uniform(Complex64::new(0.0, -2.0 * (PI / 5.0).cos()))
}

/// Multipliers of the solution with a pole at the origin and `h = 0`,
/// assembled from the connection matrices of its local solutions.
///
/// `s0 = (c2 - c̃2)/c1`. The upper-triangular factor `C̃ D⁻¹` is
/// `c1 d4 [[1, s1], [0, 1]]` up to normalisation, hence `s1 = -d3/d4`.
pub fn appendix_b_stokes() -> Result<StokesMultipliers> {
    let i = Complex64::i();
    let e = |theta: f64| Complex64::from_polar(1.0, theta);
    let k1 = (4.0 * PI / 5.0).powf(-0.5);
    let k3 = (4.0 / (5.0 * PI)).powf(-0.5);
    let c1 = i * k1;
    let c2 = e(-PI / 5.0) * k1;
    let c3 = i * k3;
    let c2t = -e(2.0 * PI / 5.0) * c2;
    let d3 = e(-PI / 5.0) * i * c3 + c2t * PI;
    let d4 = c3;
    let s0 = (c2 - c2t) / c1;
    let s1 = -d3 / d4;
    complete_from_adjacent(s0, s1)
}
