//! Piecewise-linear multi-scroll systems without equilibria.
//!
//! - [`pwl`]: switching planes, guarded affine pieces, dispatch.
//! - [`equilibria`]: rank conditions and virtual equilibria.
//! - [`closed_form`]: exact solution of one spiral subsystem.
//! - [`systems`]: the double/triple scroll factories.
//! - [`document`]: JSON system definitions.
//! - [`integrator`]: fixed-step RK4 with region labelling.
//! - [`analysis`]: Lyapunov exponent, 0-1 test, symbolic itineraries.
//! - [`export`]: CSV and JSON writers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod closed_form;
pub mod document;
pub mod equilibria;
pub mod error;
pub mod export;
pub mod integrator;
pub mod linalg;
pub mod pwl;
pub mod systems;

pub use closed_form::{subsystem_solution, SubsystemParams};
pub use document::{load_system, load_system_file, save_system, save_system_file, SystemDocument};
pub use equilibria::{
    equilibrium_report, has_equilibrium, neutral_vector_independent, virtual_equilibria,
    EquilibriumReport, EquilibriumStatus, VirtualEquilibrium,
};
pub use error::{Error, Result};
pub use integrator::{integrate, rk4_step, IntegrationConfig, Trajectory, Transition};
pub use linalg::{Mat3, Vec3};
pub use pwl::{
    AffinePiece, Clause, Cmp, PwlSystem, RegionLabeler, RegionPredicate, RegionScheme, Side,
    SideReq, SwitchingPlane,
};
pub use systems::{
    build_example1_double, build_example1_triple, build_example2_triple, FactorySystem,
};
