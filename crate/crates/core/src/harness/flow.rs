use crate::error::{Error, Result};
use crate::ode::{integrate, IntegratorConfig, Start, Trajectory};

/// Worst violation of `dH/dx = -y` found by [`hamiltonian_flow_defect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowCheck {
    pub max_defect: f64,
    pub worst_x: f64,
    pub points: usize,
}

/// Checks `dH/dx + y = 0` with a five-point stencil of half-width `2 eps`.
///
/// The stencil values come from short integrations at `rtol` started from
/// the trajectory at grid points `spacing` apart. Points closer than
/// `exclusion` to a pole, or where `y > exclusion⁻²`, are skipped.
pub fn hamiltonian_flow_defect(
    traj: &Trajectory,
    rtol: f64,
    spacing: f64,
    eps: f64,
    exclusion: f64,
) -> Result<FlowCheck> {
    if !(spacing > 0.0 && eps > 0.0 && exclusion >= 0.0) {
        return Err(Error::InvalidInput("spacing and eps must be positive".into()));
    }
    let cfg = IntegratorConfig {
        h_init: eps / 4.0,
        ..IntegratorConfig::with_tolerances(rtol, rtol * 1e-2)
    };
    let mut poles: Vec<f64> = traj.crossings.iter().map(|c| c.pole.p).collect();
    poles.extend(traj.origin.map(|o| o.p));
    let x0 = traj.samples[0].state.x;
    let x1 = traj.last().state.x;
    let (lo, hi) = (x0.min(x1) + 2.0 * eps, x0.max(x1) - 2.0 * eps);
    let mut check = FlowCheck {
        max_defect: 0.0,
        worst_x: f64::NAN,
        points: 0,
    };
    let mut x = hi;
    while x >= lo {
        let here = x;
        x -= spacing;
        if poles.iter().any(|p| (here - p).abs() < exclusion + 2.0 * eps) {
            continue;
        }
        let Some(s) = traj.eval(here) else { continue };
        // an uncrossed pole just beyond the end of the range
        if s.y * exclusion * exclusion > 1.0 {
            continue;
        }
        let mut hs = [0.0; 4];
        for (slot, j) in hs.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
            let t = integrate(Start::Point(s), here + j * eps, &cfg)?;
            if !t.crossings.is_empty() {
                return Err(Error::InvalidInput(format!("stencil at x = {here} crosses a pole")));
            }
            *slot = t.last().state.hamiltonian();
        }
        let dh = (hs[0] - 8.0 * hs[1] + 8.0 * hs[2] - hs[3]) / (12.0 * eps);
        let defect = (dh + s.y).abs();
        check.points += 1;
        if !(defect <= check.max_defect) {
            check.max_defect = defect;
            check.worst_x = here;
        }
    }
    Ok(check)
}
