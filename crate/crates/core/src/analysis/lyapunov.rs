//! Largest Lyapunov exponent by two-trajectory renormalization (Benettin).
//!
//! A companion orbit starts `d0` away from the reference orbit; after every
//! `renorm_every` steps the separation is measured, its log-growth recorded,
//! and the companion pulled back to distance `d0` along the current
//! separation direction.
//!
//! On these switched systems the result depends on `d0`: when `d0` is well
//! below the per-step displacement both orbits take identical branch
//! decisions and the estimate collapses to the linear growth rate of the
//! pieces. [`crate::analysis::lle_saltation`] does not have that blind spot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{check_bound, rk4_step, IntegrationConfig};
use crate::linalg::Vec3;
use crate::pwl::PwlSystem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    pub d0: f64,
    pub renorm_every: usize,
    /// Time integrated before measurement starts.
    pub transient: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig {
            d0: 1e-8,
            renorm_every: 1,
            transient: 50.0,
        }
    }
}

/// Running estimate after each renormalization, for convergence plots.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub value: f64,
    pub times: Vec<f64>,
    pub running: Vec<f64>,
}

/// LLE in nats per unit time, measured over `cfg.duration` after the
/// transient.
pub fn lle_benettin(
    sys: &PwlSystem,
    cfg: &IntegrationConfig,
    lcfg: &LyapunovConfig,
) -> Result<f64> {
    run(sys, cfg, lcfg, false).map(|e| e.value)
}

/// Like [`lle_benettin`] but also records the running estimate.
pub fn lle_benettin_traced(
    sys: &PwlSystem,
    cfg: &IntegrationConfig,
    lcfg: &LyapunovConfig,
) -> Result<LyapunovEstimate> {
    run(sys, cfg, lcfg, true)
}

fn run(
    sys: &PwlSystem,
    cfg: &IntegrationConfig,
    lcfg: &LyapunovConfig,
    trace: bool,
) -> Result<LyapunovEstimate> {
    cfg.validate()?;
    if !(lcfg.d0 > 0.0 && lcfg.d0.is_finite()) || lcfg.renorm_every == 0 {
        return Err(Error::InvalidConfig(
            "Lyapunov d0 must be positive and renorm_every nonzero".into(),
        ));
    }
    if !(lcfg.transient >= 0.0) {
        return Err(Error::InvalidConfig("transient must be nonnegative".into()));
    }
    let h = cfg.step;
    let bound = cfg.divergence_bound;
    let mut x = cfg.initial_state;
    let transient_steps = (lcfg.transient / h).round() as usize;
    for i in 1..=transient_steps {
        x = rk4_step(sys, &x, h)?;
        check_bound(&x, i as f64 * h, bound)?;
    }

    let dir = Vec3::new(1.0, 1.0, 1.0).scale(1.0 / 3f64.sqrt());
    let mut y = x + dir.scale(lcfg.d0);
    let steps = cfg.steps();
    let mut log_sum = 0.0;
    let mut elapsed_steps = 0usize;
    let mut est = LyapunovEstimate::default();
    for i in 1..=steps {
        x = rk4_step(sys, &x, h)?;
        y = rk4_step(sys, &y, h)?;
        let t = (transient_steps + i) as f64 * h;
        check_bound(&x, t, bound)?;
        if i % lcfg.renorm_every == 0 || i == steps {
            let sep = y - x;
            let d = sep.norm();
            elapsed_steps = i;
            if d > 0.0 {
                log_sum += (d / lcfg.d0).ln();
                y = x + sep.scale(lcfg.d0 / d);
            } else {
                // Orbits merged exactly; restart the companion.
                log_sum += (f64::MIN_POSITIVE / lcfg.d0).ln();
                y = x + dir.scale(lcfg.d0);
            }
            if trace {
                est.times.push(i as f64 * h);
                est.running.push(log_sum / (i as f64 * h));
            }
        }
    }
    est.value = log_sum / (elapsed_steps as f64 * h);
    Ok(est)
}
