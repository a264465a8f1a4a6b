//! Leading-order behaviour of real Painlevé I transcendents and their
//! Hamiltonians as `x -> -inf`, plus the pole lattice predicted for
//! singular solutions.
//!
//! Oscillatory solutions (`|s2| < 1`):
//!
//! ```text
//! y ~ -sqrt(-x/6) + sqrt(a) (-24x)^(-1/8) cos θ(x)
//! H ~ -4(-x/6)^(3/2) + a(-3x/2)^(1/4) + sqrt(a) (-24x)^(-3/8) sin θ(x)
//! θ(x) = (4·24^(1/4)/5)(-x)^(5/4) - (5a/8) ln(-x) + φ
//! ```
//!
//! Singular solutions (`|s2| > 1`):
//!
//! ```text
//! y ~ -sqrt(-x/6) + (-x)^(1/2) / ((sqrt6/3) sin² ω(x))
//! H ~ -4(-x/6)^(3/2) - b(-24x)^(1/4) - (-3x/2)^(1/4) cot ω(x)
//! ω(x) = (2·24^(1/4)/5)(-x)^(5/4) + (5b/8) ln(-x) + ψ
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stokes::{OscParams, SingParams};

/// Default `|sin ω|` below which singular-case evaluations are flagged.
pub const DEFAULT_MASK_EPS: f64 = 0.1;

/// 4·24^(1/4)/5, the frequency of the oscillatory phase.
pub fn osc_frequency() -> f64 {
    4.0 * 24f64.powf(0.25) / 5.0
}

/// 2·24^(1/4)/5, the frequency of the singular phase.
pub fn sing_frequency() -> f64 {
    2.0 * 24f64.powf(0.25) / 5.0
}

/// One evaluation of an asymptotic formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymEval {
    pub x: f64,
    pub y: f64,
    /// Hamiltonian.
    pub h: f64,
    /// θ(x) or ω(x), unwrapped.
    pub phase: f64,
    /// `|sin ω|` for singular solutions, 1 otherwise.
    pub pole_proximity: f64,
    /// Set when the point lies inside a masked pole neighbourhood, where the
    /// error bound of the formula does not apply.
    pub near_pole: bool,
}

fn check_negative(x: f64) -> Result<f64> {
    if x < 0.0 && x.is_finite() {
        Ok(-x)
    } else {
        Err(Error::InvalidInput(format!("asymptotic formulas need x < 0, got {x}")))
    }
}

/// Leading background `-sqrt(-x/6)` shared by both families.
fn background_y(u: f64) -> f64 {
    -(u / 6.0).sqrt()
}

fn background_h(u: f64) -> f64 {
    -4.0 * (u / 6.0).powf(1.5)
}

pub fn phase_osc(x: f64, p: &OscParams) -> Result<f64> {
    let u = check_negative(x)?;
    Ok(osc_frequency() * u.powf(1.25) - 5.0 * p.a / 8.0 * u.ln() + p.phi)
}

pub fn osc_eval(x: f64, p: &OscParams) -> Result<AsymEval> {
    let u = check_negative(x)?;
    let theta = phase_osc(x, p)?;
    let root_a = p.a.sqrt();
    let y = background_y(u) + root_a * (24.0 * u).powf(-0.125) * theta.cos();
    let h = background_h(u) + p.a * (1.5 * u).powf(0.25) + root_a * (24.0 * u).powf(-0.375) * theta.sin();
    Ok(AsymEval {
        x,
        y,
        h,
        phase: theta,
        pole_proximity: 1.0,
        near_pole: false,
    })
}

pub fn osc_y(x: f64, p: &OscParams) -> Result<f64> {
    osc_eval(x, p).map(|e| e.y)
}

pub fn osc_h(x: f64, p: &OscParams) -> Result<f64> {
    osc_eval(x, p).map(|e| e.h)
}

pub fn phase_sing(x: f64, p: &SingParams) -> Result<f64> {
    let u = check_negative(x)?;
    Ok(sing_frequency() * u.powf(1.25) + 5.0 * p.b / 8.0 * u.ln() + p.psi)
}

/// Derivative dω/dx.
pub fn phase_sing_derivative(x: f64, p: &SingParams) -> Result<f64> {
    let u = check_negative(x)?;
    Ok(-(1.25 * sing_frequency() * u.powf(0.25) + 5.0 * p.b / (8.0 * u)))
}

/// Singular-case evaluation. Points with `|sin ω| < mask_eps` are still
/// evaluated but carry `near_pole = true`.
pub fn sing_eval(x: f64, p: &SingParams, mask_eps: f64) -> Result<AsymEval> {
    let u = check_negative(x)?;
    let omega = phase_sing(x, p)?;
    let (s, c) = omega.sin_cos();
    let y = background_y(u) + u.sqrt() / (6f64.sqrt() / 3.0 * s * s);
    let h = background_h(u) - p.b * (24.0 * u).powf(0.25) - (1.5 * u).powf(0.25) * c / s;
    Ok(AsymEval {
        x,
        y,
        h,
        phase: omega,
        pole_proximity: s.abs(),
        near_pole: s.abs() < mask_eps,
    })
}

pub fn sing_y(x: f64, p: &SingParams, mask_eps: f64) -> Result<AsymEval> {
    sing_eval(x, p, mask_eps)
}

pub fn sing_h(x: f64, p: &SingParams, mask_eps: f64) -> Result<AsymEval> {
    sing_eval(x, p, mask_eps)
}

/// Tronquée solution with its exponentially small correction:
/// `sqrt(-x/6) + (s1 - s_-1)/(4·24^(1/4) sqrt(π)) (-x)^(-1/8) exp(-(4·24^(1/4)/5)(-x)^(5/4))`.
pub fn separatrix_y(x: f64, s1: Complex64, sm1: Complex64) -> Result<f64> {
    let u = check_negative(x)?;
    let diff = s1 - sm1;
    if diff.im.abs() > 1e-10 {
        return Err(Error::NonRealCorrection(diff.im));
    }
    let coeff = diff.re / (4.0 * 24f64.powf(0.25) * PI.sqrt());
    Ok((u / 6.0).sqrt() + coeff * u.powf(-0.125) * (-osc_frequency() * u.powf(1.25)).exp())
}

/// Solves `ω(x_n) = nπ` for `n_lo..=n_hi`.
///
/// Newton iteration in `u = -x`, started from the closed form valid when
/// the logarithmic term vanishes.
pub fn predict_poles(p: &SingParams, n_lo: i64, n_hi: i64) -> Result<Vec<(i64, f64)>> {
    if n_hi < n_lo {
        return Err(Error::InvalidInput(format!("empty pole index range {n_lo}..{n_hi}")));
    }
    let f = sing_frequency();
    let mut out = Vec::with_capacity((n_hi - n_lo + 1) as usize);
    for n in n_lo..=n_hi {
        let target = n as f64 * PI;
        let start = if target - p.psi > 0.0 { target - p.psi } else { target };
        if start <= 0.0 {
            return Err(Error::NoConvergence(format!("pole index {n} has no x < 0 start")));
        }
        let mut u = (start / f).powf(0.8);
        let mut converged = false;
        for _ in 0..50 {
            let omega = f * u.powf(1.25) + 5.0 * p.b / 8.0 * u.ln() + p.psi;
            let d_omega = 1.25 * f * u.powf(0.25) + 5.0 * p.b / (8.0 * u);
            if d_omega <= 0.0 || !d_omega.is_finite() {
                break;
            }
            let delta = (omega - target) / d_omega;
            let mut next = u - delta;
            if next <= 0.0 {
                next = 0.5 * u;
            }
            u = next;
            if delta.abs() <= 1e-15 * u.max(1.0) {
                converged = true;
                break;
            }
        }
        let omega = f * u.powf(1.25) + 5.0 * p.b / 8.0 * u.ln() + p.psi;
        if !converged && (omega - target).abs() >= 1e-10 {
            return Err(Error::NoConvergence(format!("Newton failed for pole index {n}")));
        }
        if (omega - target).abs() >= 1e-10 {
            return Err(Error::NoConvergence(format!(
                "pole index {n}: residual {}",
                omega - target
            )));
        }
        out.push((n, -u));
    }
    if out.windows(2).any(|w| w[1].1 >= w[0].1) {
        return Err(Error::NoConvergence("predicted poles are not monotone in n".into()));
    }
    Ok(out)
}
