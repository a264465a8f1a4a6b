use std::f64::consts::PI;

use super::AsymParams;
use crate::asymptotics::{osc_frequency, sing_frequency};
use crate::error::{Error, Result};
use crate::ode::{State, Trajectory};
use crate::specfun::reduce_angle;
use crate::stokes::{OscParams, SingParams, SolutionClass};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Only the part of the trajectory with `-x >= from` is used.
    pub from: f64,
    /// Fewest oscillation cells (or poles) accepted.
    pub min_cells: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            from: 10.0,
            min_cells: 5,
        }
    }
}

/// Recovers the asymptotic constants of a numerical solution.
pub fn fit_params(traj: &Trajectory, class: SolutionClass) -> Result<AsymParams> {
    fit_params_with(traj, class, &FitOptions::default())
}

pub fn fit_params_with(traj: &Trajectory, class: SolutionClass, opts: &FitOptions) -> Result<AsymParams> {
    match class {
        SolutionClass::Oscillatory => fit_osc(traj, opts).map(AsymParams::Oscillatory),
        SolutionClass::Singular => fit_sing(traj, opts).map(AsymParams::Singular),
        SolutionClass::Separatrix => Err(Error::InvalidInput(
            "separatrix solutions carry no fitted constants".into(),
        )),
    }
}

/// `(y + sqrt(-x/6)) (-24x)^(1/8)`, which oscillates as `sqrt(a) cos θ`.
fn scaled(s: &State) -> f64 {
    let u = -s.x;
    (s.y + (u / 6.0).sqrt()) * (24.0 * u).powf(0.125)
}

fn scaled_slope(s: &State) -> f64 {
    let u = -s.x;
    let w = (24.0 * u).powf(0.125);
    (s.dy - 1.0 / (12.0 * (u / 6.0).sqrt())) * w - 3.0 * (s.y + (u / 6.0).sqrt()) * w / (24.0 * u)
}

/// Extrema of the scaled oscillation, located on the interpolant.
fn extrema(traj: &Trajectory, from: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for seg in traj.segments() {
        for w in seg.windows(2) {
            let (a, b) = (&w[0].state, &w[1].state);
            if -a.x < from || -b.x < from {
                continue;
            }
            let (fa, fb) = (scaled_slope(a), scaled_slope(b));
            if fa == 0.0 {
                out.push((a.x, scaled(a)));
                continue;
            }
            if fa * fb >= 0.0 {
                continue;
            }
            let (mut lo, mut hi, mut flo) = (a.x, b.x, fa);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                let Some(s) = traj.eval(mid) else { break };
                let fm = scaled_slope(&s);
                if fm * flo > 0.0 {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            if let Some(s) = traj.eval(0.5 * (lo + hi)) {
                out.push((s.x, scaled(&s)));
            }
        }
    }
    out.sort_by(|p, q| q.0.total_cmp(&p.0));
    out
}

/// `a` from the squared half peak-to-trough swing of the scaled oscillation,
/// `φ` from the phases at which the extrema sit (θ = mπ).
fn fit_osc(traj: &Trajectory, opts: &FitOptions) -> Result<OscParams> {
    let ext = extrema(traj, opts.from);
    let swings: Vec<f64> = ext
        .windows(2)
        .filter(|w| w[0].1 * w[1].1 < 0.0)
        .map(|w| (0.5 * (w[0].1.abs() + w[1].1.abs())).powi(2))
        .collect();
    if swings.len() < 2 * opts.min_cells {
        return Err(Error::InsufficientCells(format!(
            "{} half-oscillations beyond -x = {}, need {}",
            swings.len(),
            opts.from,
            2 * opts.min_cells
        )));
    }
    let a = swings.iter().sum::<f64>() / swings.len() as f64;
    let (mut sn, mut cs) = (0.0, 0.0);
    for &(x, v) in &ext {
        let u = -x;
        let theta0 = osc_frequency() * u.powf(1.25) - 5.0 * a / 8.0 * u.ln();
        let m = if v > 0.0 { 0.0 } else { PI };
        let phi = m - theta0;
        sn += phi.sin();
        cs += phi.cos();
    }
    Ok(OscParams::new(a, reduce_angle(sn.atan2(cs))))
}

/// Regression of `nπ - F(-x_n)^(5/4)` on `(5/8) ln(-x_n)`, a constant and
/// the next-order term `(-x_n)^(-5/4)`. The pole index is only known up to
/// a shift, so `ψ` is returned modulo π in `(-π/2, π/2]`.
fn fit_sing(traj: &Trajectory, opts: &FitOptions) -> Result<SingParams> {
    let mut us: Vec<f64> = traj
        .crossings
        .iter()
        .map(|c| -c.pole.p)
        .filter(|&u| u >= opts.from)
        .collect();
    us.sort_by(f64::total_cmp);
    if us.len() < opts.min_cells.max(4) {
        return Err(Error::InsufficientCells(format!(
            "{} poles beyond -x = {}, need {}",
            us.len(),
            opts.from,
            opts.min_cells.max(4)
        )));
    }
    let rows: Vec<[f64; 3]> = us.iter().map(|&u| [0.625 * u.ln(), 1.0, u.powf(-1.25)]).collect();
    let rhs: Vec<f64> = us
        .iter()
        .enumerate()
        .map(|(n, &u)| n as f64 * PI - sing_frequency() * u.powf(1.25))
        .collect();
    let c = least_squares3(&rows, &rhs)?;
    let mut psi = c[1].rem_euclid(PI);
    if psi > PI / 2.0 {
        psi -= PI;
    }
    Ok(SingParams::new(c[0], psi))
}

fn least_squares3(rows: &[[f64; 3]], rhs: &[f64]) -> Result<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for (r, &b) in rows.iter().zip(rhs) {
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += r[i] * r[j];
            }
            m[i][3] += r[i] * b;
        }
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        if m[col][col].abs() < 1e-300 {
            return Err(Error::FitIllConditioned("singular normal equations".into()));
        }
        for i in 0..3 {
            if i != col {
                let f = m[i][col] / m[col][col];
                for j in col..4 {
                    m[i][j] -= f * m[col][j];
                }
            }
        }
    }
    Ok([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::osc_frequency;
    use crate::ode::{Direction, IntegratorConfig, PoleCrossing, PoleData, Sample};

    fn synthetic_osc(a: f64, phi: f64) -> Trajectory {
        // exact leading-order oscillation, sampled finely
        let f = osc_frequency();
        let samples = (0..60000)
            .map(|k| -8.0 - k as f64 * 5e-4)
            .map(|x: f64| {
                let u = -x;
                let th = f * u.powf(1.25) - 5.0 * a / 8.0 * u.ln() + phi;
                let dth = -(1.25 * f * u.powf(0.25) - 5.0 * a / (8.0 * u));
                let w = (24.0 * u).powf(-0.125);
                let y = -(u / 6.0).sqrt() + a.sqrt() * w * th.cos();
                let dw = w / (8.0 * u);
                let dy = 1.0 / (12.0 * (u / 6.0).sqrt()) + a.sqrt() * (dw * th.cos() - w * th.sin() * dth);
                Sample::new(State::new(x, y, dy))
            })
            .collect();
        Trajectory {
            samples,
            crossings: Vec::new(),
            origin: None,
            direction: Direction::Left,
            config: IntegratorConfig::default(),
        }
    }

    #[test]
    fn recovers_synthetic_oscillation() {
        for &(a, phi) in &[(0.15, -1.2), (0.6, 2.9), (0.02, 0.3)] {
            let got = fit_params(&synthetic_osc(a, phi), SolutionClass::Oscillatory).unwrap();
            let AsymParams::Oscillatory(p) = got else { panic!() };
            assert!((p.a - a).abs() < 1e-6 * a.max(1.0), "{p:?}");
            assert!(reduce_angle(p.phi - phi).abs() < 1e-5, "{p:?}");
        }
    }

    #[test]
    fn recovers_synthetic_lattice() {
        let sp = SingParams::new(0.08, 0.4);
        let poles = crate::asymptotics::predict_poles(&sp, 5, 60).unwrap();
        let crossings = poles
            .iter()
            .map(|&(_, x)| PoleCrossing {
                pole: PoleData::new(x, 0.0),
                h_hamiltonian: 0.0,
                consistent: true,
                resume_index: 0,
            })
            .collect();
        let traj = Trajectory {
            samples: vec![Sample::new(State::new(0.0, 0.0, 0.0))],
            crossings,
            origin: None,
            direction: Direction::Left,
            config: IntegratorConfig::default(),
        };
        let AsymParams::Singular(p) = fit_params(&traj, SolutionClass::Singular).unwrap() else {
            panic!()
        };
        assert!((p.b - 0.08).abs() < 1e-8, "{p:?}");
        assert!(reduce_angle(2.0 * (p.psi - 0.4)).abs() < 1e-7, "{p:?}");
    }

    #[test]
    fn too_short() {
        let traj = synthetic_osc(0.1, 0.0);
        let opts = FitOptions {
            from: 37.0,
            min_cells: 5,
        };
        assert!(matches!(
            fit_params_with(&traj, SolutionClass::Oscillatory, &opts),
            Err(Error::InsufficientCells(_))
        ));
        assert!(matches!(
            fit_params(&traj, SolutionClass::Singular),
            Err(Error::InsufficientCells(_))
        ));
    }
}
