//! Stokes multipliers of real Painlevé I transcendents and the connection
//! formulas that map them to the amplitude/phase constants of the
//! `x -> -inf` asymptotics.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{arg_gamma, reduce_angle};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// (19/8) ln 2 + (5/8) ln 3, the coefficient tying the log-phase to a and b.
pub fn log_phase_constant() -> f64 {
    19.0 / 8.0 * 2f64.ln() + 5.0 / 8.0 * 3f64.ln()
}

/// Default tolerance on `| |s2| - 1 |` used by [`classify`].
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Threshold on `|1 + s2 s_-2|` below which the pair completion is refused.
pub const DEGENERATE_PRODUCT_TOL: f64 = 1e-12;

/// The five Stokes multipliers `s_-2 .. s_2`, extended periodically by
/// `s_{k+5} = s_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesMultipliers {
    pub s_m2: Complex64,
    pub s_m1: Complex64,
    pub s_0: Complex64,
    pub s_1: Complex64,
    pub s_2: Complex64,
}

impl StokesMultipliers {
    pub fn new(s_m2: Complex64, s_m1: Complex64, s_0: Complex64, s_1: Complex64, s_2: Complex64) -> Self {
        Self {
            s_m2,
            s_m1,
            s_0,
            s_1,
            s_2,
        }
    }

    /// Every multiplier equal to `s`.
    pub fn uniform(s: Complex64) -> Self {
        Self::new(s, s, s, s, s)
    }

    /// `s_k` for any integer `k`, using the period-5 extension.
    pub fn get(&self, k: i64) -> Complex64 {
        match k.rem_euclid(5) {
            0 => self.s_0,
            1 => self.s_1,
            2 => self.s_2,
            3 => self.s_m2,
            _ => self.s_m1,
        }
    }

    pub fn as_array(&self) -> [Complex64; 5] {
        [self.s_m2, self.s_m1, self.s_0, self.s_1, self.s_2]
    }
}

/// Completes the set from `s2` and `s_-2` using
/// `1 + s2 s_-2 = -i s0`, `s1 = (i - s_-2)/(1 + s2 s_-2)`,
/// `s_-1 = (i - s2)/(1 + s2 s_-2)`.
pub fn complete_from_pair(s2: Complex64, sm2: Complex64) -> Result<StokesMultipliers> {
    let prod = 1.0 + s2 * sm2;
    if prod.norm() <= DEGENERATE_PRODUCT_TOL {
        return Err(Error::DegenerateProduct);
    }
    let s0 = I * prod;
    let s1 = (I - sm2) / prod;
    let sm1 = (I - s2) / prod;
    Ok(StokesMultipliers::new(sm2, sm1, s0, s1, s2))
}

/// Completes the set from two adjacent multipliers `s0`, `s1` by running
/// the cyclic relation `1 + s_k s_{k+1} = -i s_{k+3}` around the cycle.
pub fn complete_from_adjacent(s0: Complex64, s1: Complex64) -> Result<StokesMultipliers> {
    // k = 0: s_3 = s_-2
    let sm2 = I * (1.0 + s0 * s1);
    if sm2.norm() <= DEGENERATE_PRODUCT_TOL {
        return Err(Error::DegenerateProduct);
    }
    // k = -2: 1 + s_-2 s_-1 = -i s_1
    let sm1 = (-I * s1 - 1.0) / sm2;
    // k = -1: 1 + s_-1 s_0 = -i s_2
    let s2 = I * (1.0 + sm1 * s0);
    Ok(StokesMultipliers::new(sm2, sm1, s0, s1, s2))
}

/// `max_k |1 + s_k s_{k+1} + i s_{k+3}|` over one period.
pub fn constraint_residual(s: &StokesMultipliers) -> f64 {
    (-2..=2)
        .map(|k| (1.0 + s.get(k) * s.get(k + 1) + I * s.get(k + 3)).norm())
        .fold(0.0, f64::max)
}

/// Deviation from the reality conditions satisfied by real solutions:
/// `conj s2 = -s_-2`, `conj s0 = -s0`, `conj s1 = -s_-1`.
pub fn reality_residual(s: &StokesMultipliers) -> f64 {
    (s.s_2.conj() + s.s_m2).norm() + (s.s_0.conj() + s.s_0).norm() + (s.s_1.conj() + s.s_m1).norm()
}

/// Behaviour class of a real solution as `x -> -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionClass {
    Oscillatory,
    Separatrix,
    Singular,
}

impl fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionClass::Oscillatory => "oscillatory",
            SolutionClass::Separatrix => "separatrix",
            SolutionClass::Singular => "singular",
        })
    }
}

pub fn classify(s: &StokesMultipliers, tol: f64) -> SolutionClass {
    classify_s2(s.s_2, tol)
}

pub fn classify_s2(s2: Complex64, tol: f64) -> SolutionClass {
    let m = s2.norm();
    if m < 1.0 - tol {
        SolutionClass::Oscillatory
    } else if m > 1.0 + tol {
        SolutionClass::Singular
    } else {
        SolutionClass::Separatrix
    }
}

/// Amplitude/phase constants of an oscillatory solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscParams {
    pub a: f64,
    /// Phase in (-π, π]. Meaningless when `phi_defined` is false.
    pub phi: f64,
    /// False when s2 = 0: the oscillatory term vanishes and φ is reported as 0.
    pub phi_defined: bool,
}

impl OscParams {
    pub fn new(a: f64, phi: f64) -> Self {
        Self {
            a,
            phi,
            phi_defined: true,
        }
    }
}

/// Constants of a singular (pole-carrying) solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingParams {
    pub b: f64,
    /// Phase in (-π, π]; only defined modulo π by the asymptotics.
    pub psi: f64,
}

impl SingParams {
    pub fn new(b: f64, psi: f64) -> Self {
        Self { b, psi }
    }
}

fn osc_phase_unreduced(s2: Complex64, a: f64) -> Result<f64> {
    let g = arg_gamma(Complex64::new(0.0, -a / 2.0))?;
    Ok(s2.arg() - log_phase_constant() * a - g - PI / 4.0)
}

fn sing_phase_unreduced(s2: Complex64, b: f64) -> Result<f64> {
    let g = arg_gamma(Complex64::new(0.5, -b))?;
    Ok(0.5 * s2.arg() + log_phase_constant() * b + 0.5 * g + PI / 4.0)
}

/// `a = -ln(1 - |s2|^2)/π` and
/// `φ = arg s2 - ((19/8)ln2 + (5/8)ln3) a - arg Γ(-ia/2) - π/4`.
pub fn osc_params(s2: Complex64) -> Result<OscParams> {
    let m2 = s2.norm_sqr();
    if m2 >= 1.0 {
        return Err(Error::OutOfRegime {
            modulus: m2.sqrt(),
            regime: "oscillatory",
        });
    }
    if m2 == 0.0 {
        return Ok(OscParams {
            a: 0.0,
            phi: 0.0,
            phi_defined: false,
        });
    }
    let a = -(-m2).ln_1p() / PI;
    let phi = osc_phase_unreduced(s2, a)?;
    Ok(OscParams::new(a, reduce_angle(phi)))
}

/// `b = ln(|s2|^2 - 1)/(2π)` and
/// `ψ = arg(s2)/2 + ((19/8)ln2 + (5/8)ln3) b + arg Γ(1/2 - ib)/2 + π/4`.
pub fn sing_params(s2: Complex64) -> Result<SingParams> {
    let m2 = s2.norm_sqr();
    if m2 <= 1.0 {
        return Err(Error::OutOfRegime {
            modulus: m2.sqrt(),
            regime: "singular",
        });
    }
    let b = (m2 - 1.0).ln() / (2.0 * PI);
    let psi = sing_phase_unreduced(s2, b)?;
    Ok(SingParams::new(b, reduce_angle(psi)))
}

/// s2 with `|s2| = sqrt(1 - e^{-πa})` and the given argument.
pub fn invert_osc(p: &OscParams, arg_s2: f64) -> Complex64 {
    let m = (-(-PI * p.a).exp_m1()).max(0.0).sqrt();
    Complex64::from_polar(m, arg_s2)
}

/// s2 with `|s2| = sqrt(1 + e^{2πb})` and the given argument.
pub fn invert_sing(p: &SingParams, arg_s2: f64) -> Complex64 {
    let m = (1.0 + (2.0 * PI * p.b).exp()).sqrt();
    Complex64::from_polar(m, arg_s2)
}

/// Amplitude/phase pair in the form found in older literature, where the
/// oscillatory phase carried `+3π/4` (instead of `-π/4`) and the singular
/// phase `-π/4` (instead of `+π/4`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegacyConstants {
    /// d (oscillatory, with d² playing the role of a) or ρ (singular).
    pub amplitude: f64,
    /// χ (oscillatory) or σ (singular), unreduced.
    pub phase: f64,
}

/// Shift turning the legacy oscillatory phase χ into φ: `3π/4 -> -π/4`.
pub const LEGACY_OSC_PHASE_SHIFT: f64 = -PI;

/// Shift turning the legacy singular phase σ into ψ: `-π/4 -> +π/4`.
pub const LEGACY_SING_PHASE_SHIFT: f64 = PI / 2.0;

/// `d² = -ln(1-|s2|²)/π`, `χ = arg s2 - K d² - arg Γ(-id²/2) + 3π/4`.
pub fn legacy_osc_constants(s2: Complex64) -> Result<LegacyConstants> {
    let m2 = s2.norm_sqr();
    if m2 >= 1.0 || m2 == 0.0 {
        return Err(Error::OutOfRegime {
            modulus: m2.sqrt(),
            regime: "oscillatory",
        });
    }
    let d2 = -(-m2).ln_1p() / PI;
    let g = arg_gamma(Complex64::new(0.0, -d2 / 2.0))?;
    let chi = s2.arg() - log_phase_constant() * d2 - g + 3.0 * PI / 4.0;
    Ok(LegacyConstants {
        amplitude: d2.sqrt(),
        phase: chi,
    })
}

/// `ρ = ln(|s2|²-1)/(2π)`, `σ = arg(s2)/2 + K ρ + arg Γ(1/2 - iρ)/2 - π/4`.
pub fn legacy_sing_constants(s2: Complex64) -> Result<LegacyConstants> {
    let m2 = s2.norm_sqr();
    if m2 <= 1.0 {
        return Err(Error::OutOfRegime {
            modulus: m2.sqrt(),
            regime: "singular",
        });
    }
    let rho = (m2 - 1.0).ln() / (2.0 * PI);
    let g = arg_gamma(Complex64::new(0.5, -rho))?;
    let sigma = 0.5 * s2.arg() + log_phase_constant() * rho + 0.5 * g - PI / 4.0;
    Ok(LegacyConstants {
        amplitude: rho,
        phase: sigma,
    })
}

/// Signed difference `a - b` of two angles, reduced to (-π, π].
pub fn angle_diff(a: f64, b: f64) -> f64 {
    reduce_angle(a - b)
}
