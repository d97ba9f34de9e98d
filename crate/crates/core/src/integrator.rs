//! Fixed-step RK4 over a discontinuous PWL field.
//!
//! Each RK4 stage dispatches independently, so a step straddling a switching
//! surface mixes pieces. There is no event localization: transitions between
//! region labels are recorded at sample resolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::pwl::{PwlSystem, RegionLabeler};

pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub step: f64,
    pub duration: f64,
    /// Record every `sample_every`-th integration step.
    pub sample_every: usize,
    pub initial_state: Vec3,
    /// Abort with [`Error::Divergence`] once `max |x_i|` exceeds this.
    pub divergence_bound: f64,
}

impl IntegrationConfig {
    pub fn new(initial_state: Vec3, duration: f64) -> Self {
        IntegrationConfig {
            step: DEFAULT_STEP,
            duration,
            sample_every: 1,
            initial_state,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_sample_every(mut self, sample_every: usize) -> Self {
        self.sample_every = sample_every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if !(self.duration >= self.step && self.duration.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "duration {} must be at least one step ({})",
                self.duration, self.step
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidConfig("sample_every must be positive".into()));
        }
        if !self.initial_state.is_finite() {
            return Err(Error::NonFinite {
                what: "initial state",
            });
        }
        if !(self.divergence_bound > 0.0) {
            return Err(Error::InvalidConfig(
                "divergence bound must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of integration steps, `round(duration / step)`.
    pub fn steps(&self) -> usize {
        (self.duration / self.step).round() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub time: f64,
    pub from: u8,
    pub to: u8,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec3>,
    pub regions: Vec<u8>,
    pub transitions: Vec<Transition>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Largest `|x_i|` over all samples.
    pub fn max_abs(&self) -> f64 {
        self.states.iter().map(Vec3::max_abs).fold(0.0, f64::max)
    }

    /// One observable per sample.
    pub fn observable(&self, phi: impl Fn(&Vec3) -> f64) -> Vec<f64> {
        self.states.iter().map(phi).collect()
    }

    fn push(&mut self, time: f64, state: Vec3, label: u8) {
        if let Some(&prev) = self.regions.last() {
            if prev != label {
                self.transitions.push(Transition {
                    time,
                    from: prev,
                    to: label,
                });
            }
        }
        self.times.push(time);
        self.states.push(state);
        self.regions.push(label);
    }
}

/// One classical RK4 step of size `h`.
pub fn rk4_step(sys: &PwlSystem, x: &Vec3, h: f64) -> Result<Vec3> {
    let k1 = sys.vector_field_at(x)?;
    let k2 = sys.vector_field_at(&(*x + k1.scale(0.5 * h)))?;
    let k3 = sys.vector_field_at(&(*x + k2.scale(0.5 * h)))?;
    let k4 = sys.vector_field_at(&(*x + k3.scale(h)))?;
    Ok(*x + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0))
}

pub(crate) fn check_bound(x: &Vec3, time: f64, bound: f64) -> Result<()> {
    let norm = x.max_abs();
    if norm > bound || !x.is_finite() {
        return Err(Error::Divergence { time, norm, bound });
    }
    Ok(())
}

/// Integrates `sys` per `cfg`, labelling each recorded sample.
pub fn integrate(
    sys: &PwlSystem,
    cfg: &IntegrationConfig,
    labeler: &impl RegionLabeler,
) -> Result<Trajectory> {
    cfg.validate()?;
    let steps = cfg.steps();
    let mut traj = Trajectory::default();
    let capacity = steps / cfg.sample_every + 1;
    traj.times.reserve(capacity);
    traj.states.reserve(capacity);
    traj.regions.reserve(capacity);

    let mut x = cfg.initial_state;
    traj.push(0.0, x, labeler.label(&x));
    for i in 1..=steps {
        x = rk4_step(sys, &x, cfg.step)?;
        let t = i as f64 * cfg.step;
        check_bound(&x, t, cfg.divergence_bound)?;
        if i % cfg.sample_every == 0 {
            traj.push(t, x, labeler.label(&x));
        }
    }
    Ok(traj)
}
