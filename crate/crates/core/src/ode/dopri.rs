//! Dormand–Prince 5(4) step for the Painlevé I system.

use super::{rhs, IntegratorConfig, State};
use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Smallest step magnitude the controller may request.
pub const MIN_STEP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Fifth-order solution at `x + h`.
    pub state: State,
    /// Local error estimate scaled by `atol + rtol·|value|`, max over components.
    pub error: f64,
}

fn eval(x: f64, y: [f64; 2]) -> [f64; 2] {
    let (a, b) = rhs(&State::new(x, y[0], y[1]));
    [a, b]
}

fn comb(y: [f64; 2], h: f64, terms: &[(f64, [f64; 2])]) -> [f64; 2] {
    let mut out = y;
    for &(w, k) in terms {
        out[0] += h * w * k[0];
        out[1] += h * w * k[1];
    }
    out
}

/// One Dormand–Prince step of signed size `h` from `s`.
pub fn step(s: &State, h: f64, cfg: &IntegratorConfig) -> Result<StepOutcome> {
    if h.abs() < MIN_STEP {
        return Err(Error::StepUnderflow(s.x));
    }
    let x = s.x;
    let y = [s.y, s.dy];
    let k1 = eval(x, y);
    let k2 = eval(x + C2 * h, comb(y, h, &[(A21, k1)]));
    let k3 = eval(x + C3 * h, comb(y, h, &[(A31, k1), (A32, k2)]));
    let k4 = eval(x + C4 * h, comb(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
    let k5 = eval(x + C5 * h, comb(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
    let k6 = eval(
        x + h,
        comb(y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]),
    );
    let y5 = comb(y, h, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
    let k7 = eval(x + h, y5);

    let mut err: f64 = 0.0;
    for c in 0..2 {
        let e = h * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c] + E5 * k5[c] + E6 * k6[c] + E7 * k7[c]);
        let scale = cfg.atol + cfg.rtol * y[c].abs().max(y5[c].abs());
        err = err.max((e / scale).abs());
    }
    if !(y5[0].is_finite() && y5[1].is_finite()) {
        err = f64::INFINITY;
    }
    Ok(StepOutcome {
        state: State::new(x + h, y5[0], y5[1]),
        error: err,
    })
}

/// Cubic Hermite interpolation of `(y, y')` between two states of one
/// solution, using `y'' = 6y² + x` for the slope of `y'`.
pub fn hermite(a: &State, b: &State, x: f64) -> State {
    let h = b.x - a.x;
    let s = (x - a.x) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    let y = h00 * a.y + h10 * h * a.dy + h01 * b.y + h11 * h * b.dy;
    let (_, fa) = rhs(a);
    let (_, fb) = rhs(b);
    let dy = h00 * a.dy + h10 * h * fa + h01 * b.dy + h11 * h * fb;
    State::new(x, y, dy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_start_from_origin() {
        let cfg = IntegratorConfig::default();
        let mut st = State::new(0.0, 0.0, 0.0);
        for _ in 0..5 {
            let out = step(&st, -0.02, &cfg).unwrap();
            assert!(out.error <= 1.0);
            st = out.state;
        }
        // y ≈ x³/6 + x⁸/336
        let x: f64 = -0.1;
        let want = x.powi(3) / 6.0 + x.powi(8) / 336.0;
        assert!((st.x - x).abs() < 1e-16);
        assert!((st.y - want).abs() < 1e-13, "{} {}", st.y, want);
        assert!((st.dy - (x * x / 2.0 + x.powi(7) / 42.0)).abs() < 1e-12);
    }

    #[test]
    fn step_is_nearly_reversible() {
        let cfg = IntegratorConfig::default();
        let s = State::new(-2.0, -0.4, 0.7);
        let fwd = step(&s, 0.01, &cfg).unwrap();
        let back = step(&fwd.state, -0.01, &cfg).unwrap();
        let tol = 10.0 * (cfg.atol + cfg.rtol * s.y.abs());
        assert!((back.state.y - s.y).abs() < tol);
        assert!((back.state.dy - s.dy).abs() < 10.0 * (cfg.atol + cfg.rtol * s.dy.abs()));
    }

    #[test]
    fn underflow() {
        let cfg = IntegratorConfig::default();
        assert!(matches!(
            step(&State::new(0.0, 0.0, 0.0), 1e-15, &cfg),
            Err(Error::StepUnderflow(_))
        ));
    }

    #[test]
    fn hermite_hits_endpoints() {
        let a = State::new(0.0, 1.0, 2.0);
        let b = State::new(0.5, 2.0, 3.0);
        let m = hermite(&a, &b, 0.0);
        assert_eq!((m.y, m.dy), (1.0, 2.0));
        let m = hermite(&a, &b, 0.5);
        assert!((m.y - 2.0).abs() < 1e-15 && (m.dy - 3.0).abs() < 1e-15);
    }
}
