//! Chaos diagnostics for simulated trajectories.

pub mod chaos01;
pub mod lyapunov;
pub mod report;
pub mod saltation;
pub mod symbolic;

pub use chaos01::{
    chaos01_k, chaos01_series, growth_rate_kc, kc_for_series, translation_series, Chaos01Config,
    KcEstimator,
};
pub use lyapunov::{lle_benettin, lle_benettin_traced, LyapunovConfig, LyapunovEstimate};
pub use report::{analyze, AnalysisOptions, ChaosReport, KcPoint};
pub use saltation::lle_saltation;
pub use symbolic::{adjacent_transitions_only, occupancy, symbol_sequence, symbol_sequence_with};
