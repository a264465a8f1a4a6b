use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::dopri::{hermite, step, MIN_STEP};
use super::laurent::LaurentSeries;
use super::{hamiltonian, Direction, IntegratorConfig, PoleData, State};
use crate::error::{Error, Result};

/// Where an integration starts: an ordinary point or a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    Point(State),
    Pole(PoleData),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub state: State,
    pub hamiltonian: f64,
}

impl Sample {
    pub fn new(state: State) -> Self {
        Self {
            state,
            hamiltonian: hamiltonian(&state),
        }
    }
}

/// A pole crossed during integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleCrossing {
    pub pole: PoleData,
    /// `h` recovered independently from the constant term `-14h` of the
    /// Hamiltonian's expansion `H = 1/(x-p) - 14h + O((x-p)³)`.
    pub h_hamiltonian: f64,
    /// Whether the two `h` estimates agree to 1e-4 relative.
    pub consistent: bool,
    /// Index of the first sample past the pole.
    pub resume_index: usize,
}

/// Accepted samples of one integration together with the poles it crossed.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub crossings: Vec<PoleCrossing>,
    /// Pole the integration was seeded from, if any.
    pub origin: Option<PoleData>,
    pub direction: Direction,
    pub config: IntegratorConfig,
}

/// Result of fitting Laurent data to the approach of a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleFit {
    pub pole: PoleData,
    pub h_hamiltonian: f64,
}

impl PoleFit {
    pub fn consistent(&self) -> bool {
        (self.pole.h - self.h_hamiltonian).abs() <= 1e-4 * self.pole.h.abs().max(1.0)
    }
}

/// Fits `(p, h)` to the recent approach `tail` of a pole.
///
/// `p` starts from `x + 2y/y'` at the newest state and `h` from the
/// degree-4 residual at the band sample nearest `restart_offset`. Both are
/// then refined by Gauss-Newton on the relative misfit of the full series
/// at the newest state and at the band samples where the series is
/// trusted: up to `restart_offset`, and beyond wherever its last two terms
/// are negligible.
pub fn detect_and_fit_pole(tail: &[State], cfg: &IntegratorConfig, direction: Direction) -> Result<PoleFit> {
    let last = *tail
        .last()
        .ok_or_else(|| Error::FitIllConditioned("no samples".into()))?;
    if last.y <= 0.0 {
        return Err(Error::FitIllConditioned(format!(
            "blow-up towards -inf at x = {}",
            last.x
        )));
    }
    if last.dy == 0.0 {
        return Err(Error::FitIllConditioned(format!("zero slope at x = {}", last.x)));
    }
    let p0 = last.x + 2.0 * last.y / last.dy;
    // the pole must lie ahead in the integration direction
    if (p0 - last.x) * direction.sign() < 0.0 {
        return Err(Error::FitIllConditioned(format!(
            "pole estimate {p0} lies behind x = {}",
            last.x
        )));
    }

    let (lo, hi) = cfg.fit_band;
    let in_band: Vec<State> = tail
        .iter()
        .filter(|s| {
            let t = (s.x - p0).abs();
            t >= lo && t <= hi
        })
        .copied()
        .collect();
    let band = *in_band
        .iter()
        .min_by(|a, b| {
            let da = ((a.x - p0).abs() - cfg.restart_offset).abs();
            let db = ((b.x - p0).abs() - cfg.restart_offset).abs();
            da.total_cmp(&db)
        })
        .ok_or_else(|| Error::FitIllConditioned(format!("no sample within {lo}..{hi} of the pole near {p0}")))?;

    let t = band.x - p0;
    let t2 = t * t;
    let h0 = (band.y - (1.0 / t2 - p0 * t2 / 10.0 - t2 * t / 6.0)) / (t2 * t2);

    let degree = cfg.series_degree;
    // farther out only where the last two series terms are negligible
    let trial = LaurentSeries::new(PoleData::new(p0, h0), degree)?;
    let k = degree as i64;
    let tail_term =
        |t: f64| (trial.coeff(k) * t.powi(k as i32 + 2)).abs() + (trial.coeff(k - 1) * t.powi(k as i32 + 1)).abs();
    let mut pts: Vec<State> = in_band
        .into_iter()
        .filter(|s| {
            let t = (s.x - p0).abs();
            t <= cfg.restart_offset || tail_term(t) <= 1e-15
        })
        .collect();
    pts.push(band);
    pts.push(last);
    let residual = |p: f64, h: f64| -> Result<Vec<f64>> {
        let series = LaurentSeries::new(PoleData::new(p, h), degree)?;
        pts.iter()
            .map(|s| Ok((series.eval(s.x)?.y - s.y) / s.y.abs().max(1.0)))
            .collect()
    };

    let (mut p, mut h) = (p0, h0);
    let t_last = (last.x - p0).abs();
    for _ in 0..40 {
        let f = residual(p, h)?;
        let dp = 1e-6 * t_last;
        let dh = 1e-4 * (1.0 + h.abs());
        let fp1 = residual(p + dp, h)?;
        let fp0 = residual(p - dp, h)?;
        let fh1 = residual(p, h + dh)?;
        let fh0 = residual(p, h - dh)?;
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..f.len() {
            let jp = (fp1[i] - fp0[i]) / (2.0 * dp);
            let jh = (fh1[i] - fh0[i]) / (2.0 * dh);
            a11 += jp * jp;
            a12 += jp * jh;
            a22 += jh * jh;
            g1 += jp * f[i];
            g2 += jh * f[i];
        }
        let det = a11 * a22 - a12 * a12;
        if !(det > 0.0 && det.is_finite()) {
            return Err(Error::FitIllConditioned("singular normal equations in pole fit".into()));
        }
        let step_p = (g1 * a22 - g2 * a12) / det;
        let step_h = (a11 * g2 - a12 * g1) / det;
        p -= step_p;
        h -= step_h;
        if !(p.is_finite() && h.is_finite()) {
            return Err(Error::FitIllConditioned("pole fit diverged".into()));
        }
        if step_p.abs() <= 1e-15 * (1.0 + p.abs()) && step_h.abs() <= 1e-12 * (1.0 + h.abs()) {
            break;
        }
    }
    if (p - p0).abs() > 0.5 * t_last.max(lo) {
        return Err(Error::FitIllConditioned(format!("pole fit moved from {p0} to {p}")));
    }

    let pole = PoleData::new(p, h);
    // H(x) - 1/(x-p) -> -14h; the series supplies the O((x-p)³) remainder.
    let series = LaurentSeries::new(pole, degree)?;
    let tb = band.x - p;
    let remainder = hamiltonian(&series.eval(band.x)?) - 1.0 / tb + 14.0 * h;
    let h_hamiltonian = -(hamiltonian(&band) - 1.0 / tb - remainder) / 14.0;
    Ok(PoleFit { pole, h_hamiltonian })
}

/// Series state at distance `restart_offset` from the pole on `side`.
pub fn seed_from_pole(pd: &PoleData, side: Direction, cfg: &IntegratorConfig) -> Result<State> {
    LaurentSeries::new(*pd, cfg.series_degree)?.eval(pd.p + side.sign() * cfg.restart_offset)
}

/// Integrates from `start` to `x_end`, vaulting over every pole met on the
/// way by Laurent-series handoff.
pub fn integrate(start: Start, x_end: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !x_end.is_finite() {
        return Err(Error::InvalidInput("x_end must be finite".into()));
    }
    let (mut state, origin, direction) = match start {
        Start::Point(s) => {
            if !s.is_finite() {
                return Err(Error::InvalidInput("initial state must be finite".into()));
            }
            (s, None, Direction::towards(s.x, x_end))
        }
        Start::Pole(pd) => {
            if x_end == pd.p {
                return Err(Error::AtPole(pd.p));
            }
            let dir = Direction::towards(pd.p, x_end);
            let seed = seed_from_pole(&pd, dir, cfg)?;
            // end point inside the series region: no integration needed
            if (x_end - seed.x) * dir.sign() <= 0.0 {
                let end = LaurentSeries::new(pd, cfg.series_degree)?.eval(x_end)?;
                return Ok(Trajectory {
                    samples: vec![Sample::new(end)],
                    crossings: Vec::new(),
                    origin: Some(pd),
                    direction: dir,
                    config: *cfg,
                });
            }
            (seed, Some(pd), dir)
        }
    };

    let sgn = direction.sign();
    let mut traj = Trajectory {
        samples: vec![Sample::new(state)],
        crossings: Vec::new(),
        origin,
        direction,
        config: *cfg,
    };
    // states within reach of the fit band of a pole ahead
    let reach = 2.0 * cfg.fit_band.1;
    let mut tail: VecDeque<State> = VecDeque::new();
    tail.push_back(state);
    let mut h = cfg.h_init;
    let mut prev_err: f64 = 1e-4;

    loop {
        let remaining = (x_end - state.x) * sgn;
        if remaining <= 0.0 {
            break;
        }
        let last_step = h >= remaining;
        let hh = if last_step { remaining } else { h };
        let out = step(&state, sgn * hh, cfg)?;
        if !(out.error <= 1.0) {
            let shrink = if out.error.is_finite() {
                (0.9 * out.error.powf(-0.2)).max(0.2)
            } else {
                0.2
            };
            h = hh * shrink;
            if h < MIN_STEP {
                return Err(Error::StepUnderflow(state.x));
            }
            continue;
        }

        let mut new = out.state;
        if last_step {
            new.x = x_end;
        }
        let err = out.error.max(1e-10);
        let factor = (0.9 * err.powf(-0.14) * prev_err.powf(0.08)).clamp(0.2, 5.0);
        prev_err = err.max(1e-4);
        h = hh * factor;
        state = new;
        traj.samples.push(Sample::new(state));
        tail.push_back(state);
        while tail.front().is_some_and(|f| (state.x - f.x).abs() > reach) {
            tail.pop_front();
        }

        if state.y <= -cfg.y_detect {
            return Err(Error::FitIllConditioned(format!(
                "blow-up towards -inf at x = {}",
                state.x
            )));
        }
        if state.y < cfg.y_detect {
            continue;
        }

        let fit = detect_and_fit_pole(tail.make_contiguous(), cfg, direction)?;
        if traj.crossings.len() >= cfg.max_poles {
            return Err(Error::MaxPolesExceeded(cfg.max_poles));
        }
        let crossing = PoleCrossing {
            pole: fit.pole,
            h_hamiltonian: fit.h_hamiltonian,
            consistent: fit.consistent(),
            resume_index: traj.samples.len(),
        };
        traj.crossings.push(crossing);
        let seed = seed_from_pole(&fit.pole, direction, cfg)?;
        if (x_end - seed.x) * sgn <= 0.0 {
            if x_end == fit.pole.p {
                return Err(Error::AtPole(x_end));
            }
            let end = LaurentSeries::new(fit.pole, cfg.series_degree)?.eval(x_end)?;
            if (end.x - state.x) * sgn > 0.0 {
                traj.samples.push(Sample::new(end));
            }
            break;
        }
        state = seed;
        traj.samples.push(Sample::new(state));
        tail.clear();
        tail.push_back(state);
        h = cfg.h_init;
        prev_err = 1e-4;
    }
    Ok(traj)
}

impl Trajectory {
    pub fn poles(&self) -> Vec<PoleData> {
        self.crossings.iter().map(|c| c.pole).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory holds at least one sample")
    }

    fn key(&self, x: f64) -> f64 {
        self.direction.sign() * x
    }

    /// Contiguous sample ranges not separated by a pole.
    pub fn segments(&self) -> Vec<&[Sample]> {
        let mut out = Vec::with_capacity(self.crossings.len() + 1);
        let mut start = 0;
        for c in &self.crossings {
            let end = c.resume_index.min(self.samples.len());
            out.push(&self.samples[start..end]);
            start = end;
        }
        out.push(&self.samples[start..]);
        out
    }

    /// Solution state at `x`, interpolated between accepted samples or
    /// taken from the Laurent series inside a pole gap. `None` outside the
    /// integrated range or exactly at a pole.
    pub fn eval(&self, x: f64) -> Option<State> {
        let k = self.key(x);
        let first = self.samples.first()?;
        if k < self.key(first.state.x) {
            let pd = self.origin?;
            if k >= self.key(pd.p) {
                return LaurentSeries::new(pd, self.config.series_degree).ok()?.eval(x).ok();
            }
            return None;
        }
        if k > self.key(self.last().state.x) {
            return None;
        }
        // first index whose key exceeds k
        let idx = self.samples.partition_point(|s| self.key(s.state.x) <= k);
        if idx == 0 {
            return Some(first.state);
        }
        let a = &self.samples[idx - 1].state;
        if a.x == x || idx == self.samples.len() {
            return Some(*a);
        }
        let b = &self.samples[idx].state;
        match self.crossings.binary_search_by_key(&idx, |c| c.resume_index) {
            Ok(ci) => {
                let pd = self.crossings[ci].pole;
                LaurentSeries::new(pd, self.config.series_degree).ok()?.eval(x).ok()
            }
            Err(_) => Some(hermite(a, b, x)),
        }
    }

    /// States at each grid point (see [`Trajectory::eval`]).
    pub fn dense(&self, grid: &[f64]) -> Vec<Option<State>> {
        grid.iter().map(|&x| self.eval(x)).collect()
    }

    /// Builds a trajectory from plain `(x, y, y')` rows, e.g. a CSV export.
    ///
    /// Poles are recovered from the spikes in `y`: the largest sample of
    /// each spike above `threshold` gives `p = x + 2y/y'`, and `h` is taken
    /// from the Hamiltonian constant at that sample.
    pub fn from_states(states: Vec<State>, threshold: f64) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidInput("need at least two rows".into()));
        }
        let direction = Direction::towards(states[0].x, states[1].x);
        let sgn = direction.sign();
        if states.windows(2).any(|w| (w[1].x - w[0].x) * sgn <= 0.0) {
            return Err(Error::InvalidInput("rows must be strictly monotone in x".into()));
        }
        let mut crossings = Vec::new();
        let mut i = 0;
        while i < states.len() {
            if states[i].y < threshold {
                i += 1;
                continue;
            }
            let mut j = i;
            while j < states.len() && states[j].y >= threshold {
                j += 1;
            }
            // spike rows i..j: fit from the approach, fall back to the peak row
            let peak = (i..j).max_by(|&a, &b| states[a].y.total_cmp(&states[b].y)).unwrap();
            let s = states[peak];
            let p_est = s.x + 2.0 * s.y / s.dy;
            let resume = (i..j).find(|&r| (states[r].x - p_est) * sgn > 0.0).unwrap_or(j);
            let cfg = IntegratorConfig::default();
            let pole = match detect_and_fit_pole(&states[..resume], &cfg, direction) {
                Ok(fit) => fit.pole,
                Err(_) => {
                    let t = s.x - p_est;
                    PoleData::new(p_est, -(hamiltonian(&s) - 1.0 / t) / 14.0)
                }
            };
            crossings.push(PoleCrossing {
                pole,
                h_hamiltonian: pole.h,
                consistent: true,
                resume_index: resume,
            });
            i = j;
        }
        Ok(Self {
            samples: states.into_iter().map(Sample::new).collect(),
            crossings,
            origin: None,
            direction,
            config: IntegratorConfig::default(),
        })
    }
}
