use super::{PoleData, State};
use crate::error::{Error, Result};

/// Laurent coefficients `c_-2 ..= c_degree` of the solution with pole data
/// `pd`, in powers of `t = x - p`.
///
/// Substituting the series into `y'' = 6y² + x` gives, for `k >= 2`,
/// `(k(k-1) - 12) c_k = 6 Σ' c_i c_j + p[k=2] + [k=3]`, the primed sum over
/// `i + j = k - 2` with `i, j >= -1`. The factor vanishes at `k = 4`,
/// which is where `h` enters freely.
pub fn laurent_coeffs(pd: &PoleData, degree: usize) -> Result<Vec<f64>> {
    if degree < 4 {
        return Err(Error::DegreeTooSmall(degree));
    }
    // index i holds c_{i-2}
    let mut c = vec![0.0; degree + 3];
    c[0] = 1.0;
    for k in 2..=degree as i64 {
        if k == 4 {
            c[6] = pd.h;
            continue;
        }
        let m = k - 2;
        let mut sum = 0.0;
        for i in -1..=m + 1 {
            let j = m - i;
            if j < -1 {
                continue;
            }
            sum += c[(i + 2) as usize] * c[(j + 2) as usize];
        }
        let mut rhs = 6.0 * sum;
        if k == 2 {
            rhs += pd.p;
        }
        if k == 3 {
            rhs += 1.0;
        }
        c[(k + 2) as usize] = rhs / ((k * (k - 1) - 12) as f64);
    }
    Ok(c)
}

/// A truncated Laurent expansion about a pole.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    pub pole: PoleData,
    coeffs: Vec<f64>,
}

impl LaurentSeries {
    pub fn new(pole: PoleData, degree: usize) -> Result<Self> {
        Ok(Self {
            pole,
            coeffs: laurent_coeffs(&pole, degree)?,
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 3
    }

    /// Coefficient of `t^k`, `k >= -2`.
    pub fn coeff(&self, k: i64) -> f64 {
        self.coeffs.get((k + 2) as usize).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> Result<State> {
        let t = x - self.pole.p;
        if t == 0.0 {
            return Err(Error::AtPole(self.pole.p));
        }
        // y t² = Σ c_k t^(k+2), y' t³ = Σ k c_k t^(k+2)
        let mut ys = 0.0;
        let mut ds = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            let k = i as f64 - 2.0;
            ys = ys * t + c;
            ds = ds * t + k * c;
        }
        Ok(State::new(x, ys / (t * t), ds / (t * t * t)))
    }

    /// Coefficients `r_m`, `m = -4 ..= 2K`, of `y'' - 6y² - x` for the
    /// truncated series. Index `i` holds `r_{i-4}`.
    pub fn residual_coeffs(&self) -> Vec<f64> {
        let kmax = self.degree() as i64;
        let len = (2 * kmax + 5) as usize;
        let mut r = vec![0.0; len];
        // y''
        for k in -2..=kmax {
            let c = self.coeff(k);
            let m = k - 2;
            r[(m + 4) as usize] += (k * (k - 1)) as f64 * c;
        }
        // -6y²
        for i in -2..=kmax {
            for j in -2..=kmax {
                r[(i + j + 4) as usize] -= 6.0 * self.coeff(i) * self.coeff(j);
            }
        }
        // -x = -p - t
        r[4] -= self.pole.p;
        r[5] -= 1.0;
        r
    }

    /// Truncation residual `y'' - 6y² - x` at `t = x - p`, keeping only the
    /// powers `t^m`, `m >= K - 1`, which the recursion does not enforce.
    ///
    /// The lower powers cancel identically; summing their rounding noise
    /// would swamp the true residual for small `t`.
    pub fn truncation_residual(&self, t: f64) -> f64 {
        let kmax = self.degree() as i64;
        let r = self.residual_coeffs();
        let mut acc = 0.0;
        for m in ((kmax - 1)..=(2 * kmax)).rev() {
            acc = acc * t + r[(m + 4) as usize];
        }
        acc * t.powi((kmax - 1) as i32)
    }

    /// Largest `|r_m|` over the powers the recursion is meant to cancel.
    pub fn enforced_residual(&self) -> f64 {
        let kmax = self.degree() as i64;
        let r = self.residual_coeffs();
        (-4..=kmax - 2).map(|m| r[(m + 4) as usize].abs()).fold(0.0, f64::max)
    }
}

/// `(y, y')` of the degree-`degree` truncated series at `x`.
pub fn laurent_eval(pd: &PoleData, degree: usize, x: f64) -> Result<State> {
    LaurentSeries::new(*pd, degree)?.eval(x)
}
