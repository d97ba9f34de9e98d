use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{chaos01_k, lle_saltation, occupancy, symbol_sequence, Chaos01Config};
use crate::error::Result;
use crate::integrator::{integrate, IntegrationConfig, Trajectory};
use crate::pwl::PwlSystem;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcPoint {
    pub c: f64,
    pub kc: f64,
}

/// Summary of the chaos diagnostics for one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChaosReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_median: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_per_c: Vec<KcPoint>,
    pub symbols: String,
    /// Region label -> fraction of samples.
    pub occupancy: BTreeMap<u8, f64>,
    /// Largest absolute state component over the sampled trajectory.
    pub max_abs: f64,
}

impl ChaosReport {
    pub fn set_k(&mut self, k_median: f64, per_c: &[(f64, f64)]) {
        self.k_median = Some(k_median);
        self.k_per_c = per_c.iter().map(|&(c, kc)| KcPoint { c, kc }).collect();
    }
}

/// Which diagnostics [`analyze`] runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub lle: bool,
    pub k: bool,
    /// Seeds the `c` values of the 0-1 test.
    pub seed: u64,
    /// Time discarded before the Lyapunov measurement.
    pub lle_transient: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            lle: true,
            k: true,
            seed: 42,
            lle_transient: 50.0,
        }
    }
}

/// Integrates `sys` and runs the requested diagnostics.
///
/// The 0-1 test reads `x3` from the sampled trajectory, so `cfg.sample_every`
/// sets its sampling interval. The Lyapunov exponent is measured on the same
/// initial state, step and duration after `lle_transient`.
pub fn analyze(
    sys: &PwlSystem,
    cfg: &IntegrationConfig,
    opts: &AnalysisOptions,
) -> Result<(Trajectory, ChaosReport)> {
    let traj = integrate(sys, cfg, &sys.region_scheme())?;
    let mut report = ChaosReport {
        symbols: symbol_sequence(&traj),
        occupancy: occupancy(&traj)?,
        max_abs: traj.max_abs(),
        ..Default::default()
    };
    if opts.k {
        let (k, per_c) = chaos01_k(&traj, &Chaos01Config::seeded(opts.seed))?;
        report.set_k(k, &per_c);
    }
    if opts.lle {
        report.lle = Some(lle_saltation(sys, cfg, opts.lle_transient)?);
    }
    Ok((traj, report))
}
