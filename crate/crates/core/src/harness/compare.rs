use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{AsymParams, Preset};
use crate::asymptotics::{osc_eval, phase_sing, predict_poles, sing_eval, AsymEval, DEFAULT_MASK_EPS};
use crate::error::{Error, Result};
use crate::ode::{integrate, IntegratorConfig, Trajectory};
use crate::stokes::{osc_params, sing_params, SolutionClass};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    /// Grid spacing.
    pub dx: f64,
    /// `|sin ω|` threshold of the singular-case pole mask.
    pub mask_eps: f64,
    /// Only points with `-x >= fit_from` enter the exponent fits.
    pub fit_from: f64,
    /// Fewest unmasked points the exponent fits accept.
    pub min_points: usize,
    /// Detected poles with `-x` below this are not paired with the lattice.
    pub pole_from: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            dx: 0.01,
            mask_eps: DEFAULT_MASK_EPS,
            fit_from: 10.0,
            min_points: 10,
            pole_from: 1.0,
        }
    }
}

/// Power law `C (-x)^value` fitted to envelope maxima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub value: f64,
    pub stderr: f64,
    /// Number of cells that entered the regression.
    pub cells: usize,
}

/// A detected pole paired with the lattice point of the same index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleRow {
    pub n: i64,
    pub p_num: f64,
    pub x_pred: f64,
    pub gap: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub x: f64,
    pub y_num: f64,
    pub y_asym: f64,
    pub h_num: f64,
    pub h_asym: f64,
    pub masked: bool,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub preset: String,
    pub class: SolutionClass,
    pub x_min: f64,
    /// Constants from the connection formulas.
    pub params: AsymParams,
    pub trajectory: Trajectory,
    pub grid: Vec<GridRow>,
    pub exp_y: Exponent,
    pub exp_h: Exponent,
    pub pole_table: Vec<PoleRow>,
    /// Lattice indices inside the integrated range with no detected pole.
    pub unpaired: Vec<i64>,
}

impl CompareReport {
    /// Residual `num - asym` of `y` at each grid row, `None` where masked.
    pub fn residual_y(&self) -> Vec<Option<f64>> {
        self.grid
            .iter()
            .map(|r| (!r.masked).then_some(r.y_num - r.y_asym))
            .collect()
    }

    pub fn residual_h(&self) -> Vec<Option<f64>> {
        self.grid
            .iter()
            .map(|r| (!r.masked).then_some(r.h_num - r.h_asym))
            .collect()
    }

    /// Summary document pointing at the exported CSV files.
    pub fn to_json(&self, traj_file: &str, grid_file: &str) -> serde_json::Value {
        let exp = |e: &Exponent| serde_json::json!({ "value": e.value, "stderr": e.stderr });
        serde_json::json!({
            "preset": self.preset,
            "class": self.class,
            "x_min": self.x_min,
            "params": self.params,
            "exp_y": exp(&self.exp_y),
            "exp_h": exp(&self.exp_h),
            "pole_table": self.pole_table,
            "files": { "traj": traj_file, "grid": grid_file },
        })
    }
}

pub fn run_compare(preset: Preset, x_min: f64, cfg: &IntegratorConfig) -> Result<CompareReport> {
    run_compare_with(preset, x_min, cfg, &CompareOptions::default())
}

pub fn run_compare_with(
    preset: Preset,
    x_min: f64,
    cfg: &IntegratorConfig,
    opts: &CompareOptions,
) -> Result<CompareReport> {
    if !(x_min < 0.0 && x_min.is_finite()) {
        return Err(Error::InvalidInput(format!("x_min must be negative, got {x_min}")));
    }
    if !(opts.dx > 0.0) {
        return Err(Error::InvalidInput("grid spacing must be positive".into()));
    }
    let class = preset.class();
    let params = match class {
        SolutionClass::Oscillatory => AsymParams::Oscillatory(osc_params(preset.s2())?),
        SolutionClass::Singular => AsymParams::Singular(sing_params(preset.s2())?),
        SolutionClass::Separatrix => {
            return Err(Error::OutOfRegime {
                modulus: preset.s2().norm(),
                regime: "oscillatory or singular",
            })
        }
    };
    let asym = |x: f64| -> Result<AsymEval> {
        match &params {
            AsymParams::Oscillatory(p) => osc_eval(x, p),
            AsymParams::Singular(p) => sing_eval(x, p, opts.mask_eps),
        }
    };

    let trajectory = integrate(preset.start(), x_min, cfg)?;

    let n = (-x_min / opts.dx).floor() as usize;
    let mut grid = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    for k in 1..=n {
        let x = -(k as f64) * opts.dx;
        let a = asym(x)?;
        let (y_num, h_num, ok) = match trajectory.eval(x) {
            Some(s) if s.is_finite() => (s.y, s.hamiltonian(), true),
            _ => (f64::NAN, f64::NAN, false),
        };
        grid.push(GridRow {
            x,
            y_num,
            y_asym: a.y,
            h_num,
            h_asym: a.h,
            masked: !ok || a.near_pole,
        });
        phases.push(a.phase);
    }

    let mut pts_y = Vec::new();
    let mut pts_h = Vec::new();
    for (r, &ph) in grid.iter().zip(&phases) {
        if r.masked || -r.x < opts.fit_from {
            continue;
        }
        pts_y.push((r.x, ph, (r.y_num - r.y_asym).abs()));
        pts_h.push((r.x, ph, (r.h_num - r.h_asym).abs()));
    }
    if pts_y.len() < opts.min_points {
        return Err(Error::EmptyAfterMask(pts_y.len()));
    }
    let exp_y = envelope_exponent(&pts_y)?;
    let exp_h = envelope_exponent(&pts_h)?;

    let (pole_table, unpaired) = match &params {
        AsymParams::Singular(p) => pair_poles(&trajectory, p, x_min, opts.pole_from)?,
        AsymParams::Oscillatory(_) => (Vec::new(), Vec::new()),
    };

    Ok(CompareReport {
        preset: preset.name().to_string(),
        class,
        x_min,
        params,
        trajectory,
        grid,
        exp_y,
        exp_h,
        pole_table,
        unpaired,
    })
}

fn pair_poles(
    traj: &Trajectory,
    p: &crate::stokes::SingParams,
    x_min: f64,
    pole_from: f64,
) -> Result<(Vec<PoleRow>, Vec<i64>)> {
    let mut rows: Vec<PoleRow> = Vec::new();
    for c in &traj.crossings {
        let pn = c.pole.p;
        if -pn < pole_from {
            continue;
        }
        let n = (phase_sing(pn, p)? / PI).round() as i64;
        let x_pred = predict_poles(p, n, n)?[0].1;
        rows.push(PoleRow {
            n,
            p_num: pn,
            x_pred,
            gap: (pn - x_pred).abs(),
            h: c.pole.h,
        });
    }
    // lattice points well inside the integrated range
    let lo = (x_min.max(traj.last().state.x) + 0.01).min(-pole_from);
    let n_lo = (phase_sing(-pole_from, p)? / PI).ceil().max(1.0) as i64;
    let n_hi = (phase_sing(lo, p)? / PI).floor() as i64;
    let mut unpaired = Vec::new();
    if n_hi >= n_lo {
        for (n, x) in predict_poles(p, n_lo, n_hi)? {
            if x < -pole_from && x > lo && !rows.iter().any(|r| r.n == n) {
                unpaired.push(n);
            }
        }
    }
    Ok((rows, unpaired))
}

/// Fits `log max|r|` per oscillation cell against `log(-x)`.
///
/// `points` holds `(x, phase, |r|)`. A cell is one interval of length π in
/// the phase; the first and last cells are dropped as they may be partial.
pub fn envelope_exponent(points: &[(f64, f64, f64)]) -> Result<Exponent> {
    let mut cells: Vec<(i64, f64, f64)> = Vec::new();
    for &(x, ph, r) in points {
        let c = (ph / PI).floor() as i64;
        match cells.iter_mut().find(|e| e.0 == c) {
            Some(e) => {
                if r > e.2 {
                    e.1 = x;
                    e.2 = r;
                }
            }
            None => cells.push((c, x, r)),
        }
    }
    cells.sort_by_key(|e| e.0);
    if cells.len() < 5 {
        return Err(Error::InsufficientCells(format!(
            "{} oscillation cells, need at least 5",
            cells.len()
        )));
    }
    let inner = &cells[1..cells.len() - 1];
    let xs: Vec<f64> = inner.iter().map(|e| (-e.1).ln()).collect();
    let ys: Vec<f64> = inner.iter().map(|e| e.2.ln()).collect();
    let (slope, stderr) = ols_slope(&xs, &ys);
    Ok(Exponent {
        value: slope,
        stderr,
        cells: inner.len(),
    })
}

/// Ordinary least-squares slope and its standard error.
pub(crate) fn ols_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    let stderr = if xs.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, stderr)
}
