//! The 0-1 test for chaos.
//!
//! A scalar series `phi(j)` drives the translation variables
//!
//! ```text
//! p_c(n) = sum_{j=1..n} phi(j) cos(j c)
//! q_c(n) = sum_{j=1..n} phi(j) sin(j c)
//! ```
//!
//! Regular dynamics keep `(p_c, q_c)` bounded; chaotic dynamics make it
//! diffuse, so the mean-square displacement grows linearly in `n`. `K_c`
//! measures that growth and the median over many `c` is the test statistic:
//! near 0 for regular motion, near 1 for chaos.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;

/// How `K_c` is extracted from the mean-square displacement `M_c(n)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KcEstimator {
    /// Correlation coefficient between `n` and `M_c(n)`.
    #[default]
    Correlation,
    /// Least-squares slope of `log M_c(n)` against `log n`.
    Regression,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chaos01Config {
    pub c_values: Vec<f64>,
    pub series_length: usize,
    /// Fraction of the series length used as the largest lag `n`.
    pub msd_cutoff: f64,
    pub estimator: KcEstimator,
}

pub const DEFAULT_SERIES_LENGTH: usize = 2000;
pub const DEFAULT_C_COUNT: usize = 100;

impl Chaos01Config {
    /// `count` values of `c` drawn uniformly from `(pi/5, 4 pi/5)` with a
    /// seeded generator, away from the resonances at 0 and pi.
    pub fn seeded(seed: u64) -> Self {
        Self::sampled(seed, DEFAULT_C_COUNT, (PI / 5.0, 4.0 * PI / 5.0))
    }

    pub fn sampled(seed: u64, count: usize, range: (f64, f64)) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c_values = (0..count)
            .map(|_| rng.random_range(range.0..range.1))
            .collect();
        Chaos01Config {
            c_values,
            series_length: DEFAULT_SERIES_LENGTH,
            msd_cutoff: 0.1,
            estimator: KcEstimator::Correlation,
        }
    }

    pub fn with_series_length(mut self, n: usize) -> Self {
        self.series_length = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_values.is_empty() {
            return Err(Error::InvalidConfig("no c values".into()));
        }
        if let Some(c) = self.c_values.iter().find(|&&c| !(c > 0.0 && c < 2.0 * PI)) {
            return Err(Error::InvalidConfig(format!("c = {c} outside (0, 2pi)")));
        }
        if self.series_length < 100 {
            return Err(Error::InvalidConfig(format!(
                "series length {} below 100",
                self.series_length
            )));
        }
        if !(self.msd_cutoff > 0.0 && self.msd_cutoff < 1.0) || self.max_lag() < 2 {
            return Err(Error::InvalidConfig(format!(
                "msd cutoff {} leaves fewer than 2 lags",
                self.msd_cutoff
            )));
        }
        Ok(())
    }

    pub fn max_lag(&self) -> usize {
        (self.msd_cutoff * self.series_length as f64) as usize
    }
}

/// Cumulative sums `(p_c(n), q_c(n))` for `n = 1..=phi.len()`.
pub fn translation_series(phi: &[f64], c: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = Vec::with_capacity(phi.len());
    let mut q = Vec::with_capacity(phi.len());
    let (mut ps, mut qs) = (0.0, 0.0);
    for (i, &v) in phi.iter().enumerate() {
        let (s, co) = ((i + 1) as f64 * c).sin_cos();
        ps += v * co;
        qs += v * s;
        p.push(ps);
        q.push(qs);
    }
    (p, q)
}

/// Mean-square displacement `M_c(n)` for lags `n = 1..=max_lag`.
pub fn mean_square_displacement(p: &[f64], q: &[f64], max_lag: usize) -> Vec<f64> {
    let len = p.len().min(q.len());
    (1..=max_lag)
        .map(|n| {
            let count = len - n;
            let sum: f64 = (0..count)
                .map(|j| {
                    let dp = p[j + n] - p[j];
                    let dq = q[j + n] - q[j];
                    dp * dp + dq * dq
                })
                .sum();
            sum / count as f64
        })
        .collect()
}

fn correlation(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxx > 0.0 && syy > 0.0 && syy.is_finite()).then(|| sxy / (sxx * syy).sqrt())
}

/// Asymptotic growth rate `K_c` of the translation variables.
pub fn growth_rate_kc(p: &[f64], q: &[f64], cfg: &Chaos01Config) -> Result<f64> {
    let max_lag = cfg.max_lag();
    let needed = max_lag + 2;
    if p.len() < needed || q.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            available: p.len().min(q.len()),
        });
    }
    let msd = mean_square_displacement(p, q, max_lag);
    let lags: Vec<f64> = (1..=max_lag).map(|n| n as f64).collect();
    match cfg.estimator {
        KcEstimator::Correlation => correlation(&lags, &msd).ok_or(Error::DegenerateSeries),
        KcEstimator::Regression => {
            if msd.iter().any(|&m| !(m > 0.0)) {
                return Err(Error::DegenerateSeries);
            }
            let lx: Vec<f64> = lags.iter().map(|n| n.ln()).collect();
            let ly: Vec<f64> = msd.iter().map(|m| m.ln()).collect();
            let mx = lx.iter().sum::<f64>() / lx.len() as f64;
            let my = ly.iter().sum::<f64>() / ly.len() as f64;
            let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
            Ok(sxy / sxx)
        }
    }
}

/// `K_c` for a raw observable series. The series mean is removed first, which
/// cancels the bounded oscillation a nonzero mean adds to `M_c(n)`.
pub fn kc_for_series(phi: &[f64], c: f64, cfg: &Chaos01Config) -> Result<f64> {
    let centered = centered(phi)?;
    let (p, q) = translation_series(&centered, c);
    growth_rate_kc(&p, &q, cfg)
}

fn centered(phi: &[f64]) -> Result<Vec<f64>> {
    if phi.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mean = phi.iter().sum::<f64>() / phi.len() as f64;
    let scale = phi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let var = phi.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / phi.len() as f64;
    if !(var.sqrt() > 1e-12 * scale) {
        return Err(Error::DegenerateSeries);
    }
    Ok(phi.iter().map(|v| v - mean).collect())
}

/// Median of `K_c` over `cfg.c_values`, with the per-`c` values sorted by `c`.
pub fn chaos01_series(phi: &[f64], cfg: &Chaos01Config) -> Result<(f64, Vec<(f64, f64)>)> {
    cfg.validate()?;
    if phi.len() < cfg.series_length {
        return Err(Error::SeriesTooShort {
            needed: cfg.series_length,
            available: phi.len(),
        });
    }
    let series = centered(&phi[..cfg.series_length])?;
    let mut per_c = cfg
        .c_values
        .par_iter()
        .map(|&c| {
            let (p, q) = translation_series(&series, c);
            growth_rate_kc(&p, &q, cfg).map(|k| (c, k))
        })
        .collect::<Result<Vec<_>>>()?;
    per_c.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ks: Vec<f64> = per_c.iter().map(|&(_, k)| k).collect();
    Ok((median(&ks), per_c))
}

/// 0-1 test on the `x3` component of a trajectory sampled at the desired
/// interval. The sample at `t = 0` is skipped; the next `series_length`
/// samples are used.
pub fn chaos01_k(traj: &Trajectory, cfg: &Chaos01Config) -> Result<(f64, Vec<(f64, f64)>)> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let phi: Vec<f64> = traj.states[1..].iter().map(|x| x.x3()).collect();
    chaos01_series(&phi, cfg)
}

/// Median with the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
