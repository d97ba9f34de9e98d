//! Closed-form solution of one spiral subsystem.
//!
//! The subsystem is `x' = A (x + k) + V` with
//! `A = [[m, -n, 0], [n, m, 0], [0, 0, eta]]`, `k = (k1, k2, 0)` and
//! `V = (0, 0, v)`. Its planar part spirals about `(-k1, -k2)` at rate `m`
//! and angular speed `n`; the axial part drifts linearly when `eta = 0` and
//! relaxes (or runs away) exponentially otherwise. Used as an oracle for the
//! integrator.

use serde::{Deserialize, Serialize};

use crate::linalg::{Mat3, Vec3};
use crate::pwl::{AffinePiece, PwlSystem, RegionPredicate};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsystemParams {
    pub m: f64,
    pub n: f64,
    pub eta: f64,
    pub k1: f64,
    pub k2: f64,
    pub v: f64,
}

impl SubsystemParams {
    pub fn a_matrix(&self) -> Mat3 {
        Mat3::spiral(self.m, self.n, self.eta)
    }

    /// `k1 a1 + k2 a2 + (0, 0, v)`.
    pub fn b_vector(&self) -> Vec3 {
        let a = self.a_matrix();
        a.column(0).scale(self.k1) + a.column(1).scale(self.k2) + Vec3::new(0.0, 0.0, self.v)
    }

    /// The subsystem as a one-piece system valid everywhere.
    pub fn to_system(&self) -> PwlSystem {
        let piece = AffinePiece::new(
            RegionPredicate::everywhere(),
            self.a_matrix(),
            self.b_vector(),
        );
        PwlSystem::new(vec![], vec![piece], vec![]).expect("single unguarded piece is valid")
    }

    /// State at time `t` from `x0`.
    pub fn solution(&self, x0: &Vec3, t: f64) -> Vec3 {
        let growth = (self.m * t).exp();
        let (s, c) = (self.n * t).sin_cos();
        let y1 = x0.x1() + self.k1;
        let y2 = x0.x2() + self.k2;
        let x1 = growth * (c * y1 - s * y2) - self.k1;
        let x2 = growth * (s * y1 + c * y2) - self.k2;
        Vec3::new(x1, x2, self.axial(x0.x3(), t))
    }

    /// Axial coordinate at time `t`.
    pub fn axial(&self, x3_0: f64, t: f64) -> f64 {
        if self.eta == 0.0 {
            x3_0 + self.v * t
        } else {
            let r = self.v / self.eta;
            (self.eta * t).exp() * (x3_0 + r) - r
        }
    }

    /// Limit of the axial coordinate as `t -> inf`, when it exists (`eta < 0`).
    pub fn axial_limit(&self) -> Option<f64> {
        (self.eta < 0.0).then(|| -self.v / self.eta)
    }

    /// First positive time at which the axial coordinate reaches `level`.
    pub fn axial_hitting_time(&self, x3_0: f64, level: f64) -> Option<f64> {
        let t = if self.eta == 0.0 {
            if self.v == 0.0 {
                return None;
            }
            (level - x3_0) / self.v
        } else {
            let r = self.v / self.eta;
            let ratio = (level + r) / (x3_0 + r);
            if !(ratio > 0.0) {
                return None;
            }
            ratio.ln() / self.eta
        };
        (t > 0.0 && t.is_finite()).then_some(t)
    }
}

/// Free-function form of [`SubsystemParams::solution`].
pub fn subsystem_solution(params: &SubsystemParams, x0: &Vec3, t: f64) -> Vec3 {
    params.solution(x0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_at_time_zero() {
        let p = SubsystemParams {
            m: 0.3,
            n: -4.0,
            eta: -0.2,
            k1: 1.5,
            k2: -0.7,
            v: 2.0,
        };
        let x0 = Vec3::new(0.4, -1.2, 3.3);
        let x = subsystem_solution(&p, &x0, 0.0);
        assert!((x - x0).norm() < 1e-15);
    }

    #[test]
    fn full_rotation_with_linear_drift() {
        let p = SubsystemParams {
            m: 0.5,
            n: 10.0,
            eta: 0.0,
            k1: 0.0,
            k2: 0.0,
            v: 5.0,
        };
        let x = p.solution(&Vec3::new(1.0, 0.0, 0.0), 2.0 * PI / 10.0);
        assert!((x.x1() - (PI / 10.0).exp()).abs() < 1e-12);
        assert!(x.x2().abs() < 1e-12);
        assert!((x.x3() - PI).abs() < 1e-12);
    }

    #[test]
    fn exponential_axial_relaxation() {
        let p = SubsystemParams {
            m: 0.5,
            n: 10.0,
            eta: 0.1,
            k1: 0.0,
            k2: 0.0,
            v: 5.0,
        };
        let x = p.solution(&Vec3::ZERO, 1.0);
        assert_eq!(x.x1(), 0.0);
        assert_eq!(x.x2(), 0.0);
        assert!((x.x3() - 50.0 * (0.1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn b_vector_matches_shift_form() {
        // A (x + k) + V == A x + b_vector.
        let p = SubsystemParams {
            m: 0.5,
            n: 10.0,
            eta: 0.1,
            k1: -1.1,
            k2: 0.3,
            v: -5.0,
        };
        let x = Vec3::new(0.2, 0.7, -1.0);
        let shifted =
            p.a_matrix().mul_vec(&(x + Vec3::new(p.k1, p.k2, 0.0))) + Vec3::new(0.0, 0.0, p.v);
        let direct = p.a_matrix().mul_vec(&x) + p.b_vector();
        assert!((shifted - direct).norm() < 1e-12);
    }

    #[test]
    fn hitting_time_linear_and_exponential() {
        let lin = SubsystemParams {
            m: 0.5,
            n: 10.0,
            eta: 0.0,
            k1: 0.0,
            k2: 0.0,
            v: -5.0,
        };
        assert!((lin.axial_hitting_time(1.0, 0.0).unwrap() - 0.2).abs() < 1e-15);
        assert!(lin.axial_hitting_time(-1.0, 0.0).is_none());

        let exp = SubsystemParams { eta: -0.01, ..lin };
        let t = exp.axial_hitting_time(1.0, 0.0).unwrap();
        assert!((t - 100.0 * (501.0f64 / 500.0).ln()).abs() < 1e-12);
        assert!(exp.axial(1.0, t).abs() < 1e-12);
        assert_eq!(exp.axial_limit(), Some(-500.0));
    }
}
