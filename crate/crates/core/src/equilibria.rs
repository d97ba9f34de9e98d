//! Equilibrium analysis of affine pieces and whole PWL systems.
//!
//! An affine map `A x + B` has no zero iff `A` is singular and `B` lies
//! outside the column space of `A`. When a piece does have zeros, they only
//! matter if they fall inside that piece's guard; zeros outside the guard are
//! virtual equilibria and the PWL system stays equilibrium-free.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3, RANK_RTOL};
use crate::pwl::{Clause, Cmp, PwlSystem, SideReq};

/// True iff `a_matrix x = -b_vector` has a solution (rank test on `[A | -B]`).
pub fn has_equilibrium(a_matrix: &Mat3, b_vector: &Vec3) -> bool {
    a_matrix.rank() == a_matrix.augmented_rank(&(-*b_vector))
}

/// True iff `v` is an eigenvector of the zero eigenvalue of `a_matrix` and is
/// not in its column space.
///
/// Errors unless zero is a simple root of the characteristic polynomial.
pub fn neutral_vector_independent(a_matrix: &Mat3, v: &Vec3) -> Result<bool> {
    let scale = a_matrix.frobenius_norm();
    if scale == 0.0 {
        return Err(Error::NotSingleZeroEigenvalue);
    }
    let det_is_zero = a_matrix.determinant().abs() <= RANK_RTOL * scale.powi(3);
    let simple = a_matrix.principal_minor_sum().abs() > RANK_RTOL * scale.powi(2);
    if !(det_is_zero && simple) {
        return Err(Error::NotSingleZeroEigenvalue);
    }
    let vnorm = v.norm();
    if vnorm == 0.0 {
        return Ok(false);
    }
    let is_eigvec = a_matrix.mul_vec(v).norm() <= RANK_RTOL * scale * vnorm;
    Ok(is_eigvec && a_matrix.augmented_rank(v) > a_matrix.rank())
}

/// Affine equilibrium of one piece.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VirtualEquilibrium {
    pub piece_index: usize,
    /// `-A^-1 B`, absent when `A` is singular.
    pub point: Option<Vec3>,
    pub inside_guard: bool,
    pub singular: bool,
}

/// For each piece with invertible matrix, its equilibrium `-A^-1 B` and
/// whether that point satisfies the piece's own guard.
pub fn virtual_equilibria(sys: &PwlSystem) -> Vec<VirtualEquilibrium> {
    sys.pieces()
        .iter()
        .enumerate()
        .map(|(i, piece)| match piece.a_matrix.try_inverse() {
            Some(inv) => {
                let point = -inv.mul_vec(&piece.b_vector);
                VirtualEquilibrium {
                    piece_index: i,
                    point: Some(point),
                    inside_guard: sys.guard_holds(i, &point),
                    singular: false,
                }
            }
            None => VirtualEquilibrium {
                piece_index: i,
                point: None,
                inside_guard: false,
                singular: true,
            },
        })
        .collect()
}

/// Zero set of one affine piece.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EquilibriumStatus {
    /// `A x + B = 0` has no solution anywhere.
    None,
    /// Unique solution (invertible `A`).
    Isolated { point: Vec3, inside_guard: bool },
    /// Affine subspace of solutions `point + span(directions)`.
    Degenerate {
        point: Vec3,
        directions: Vec<Vec3>,
        meets_guard: bool,
    },
}

impl EquilibriumStatus {
    /// True when some zero of the piece lies in its own region.
    pub fn is_real(&self) -> bool {
        match self {
            EquilibriumStatus::None => false,
            EquilibriumStatus::Isolated { inside_guard, .. } => *inside_guard,
            EquilibriumStatus::Degenerate { meets_guard, .. } => *meets_guard,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceEquilibrium {
    pub piece_index: usize,
    pub has_equilibrium: bool,
    pub status: EquilibriumStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub pieces: Vec<PieceEquilibrium>,
    pub equilibrium_free: bool,
}

pub fn piece_equilibrium(sys: &PwlSystem, index: usize) -> PieceEquilibrium {
    let piece = &sys.pieces()[index];
    let has = has_equilibrium(&piece.a_matrix, &piece.b_vector);
    let status = if !has {
        EquilibriumStatus::None
    } else if let Some(inv) = piece.a_matrix.try_inverse() {
        let point = -inv.mul_vec(&piece.b_vector);
        EquilibriumStatus::Isolated {
            point,
            inside_guard: sys.guard_holds(index, &point),
        }
    } else {
        let (point, directions) = piece.a_matrix.solve_with_null_space(&(-piece.b_vector));
        let meets_guard = affine_set_meets_guard(sys, index, &point, &directions);
        EquilibriumStatus::Degenerate {
            point,
            directions,
            meets_guard,
        }
    };
    PieceEquilibrium {
        piece_index: index,
        has_equilibrium: has,
        status,
    }
}

pub fn equilibrium_report(sys: &PwlSystem) -> EquilibriumReport {
    let pieces: Vec<_> = (0..sys.pieces().len())
        .map(|i| piece_equilibrium(sys, i))
        .collect();
    let equilibrium_free = pieces.iter().all(|p| !p.status.is_real());
    EquilibriumReport {
        pieces,
        equilibrium_free,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rel {
    Lt,
    Le,
    Eq,
}

/// `coeffs . s  rel  rhs`
#[derive(Clone, Debug)]
struct Constraint {
    coeffs: Vec<f64>,
    rhs: f64,
    rel: Rel,
}

const FEAS_EPS: f64 = 1e-9;

impl Constraint {
    fn normalized(mut self) -> Self {
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if scale > 0.0 {
            for c in &mut self.coeffs {
                *c /= scale;
            }
            self.rhs /= scale;
        }
        self
    }
}

/// Half-space constraints `a . x rel b` equivalent to one guard clause.
fn clause_constraints(sys: &PwlSystem, clause: &Clause) -> Vec<(Vec3, f64, Rel)> {
    match *clause {
        Clause::Plane { plane, side } => {
            let p = &sys.planes()[plane];
            let (n, d, tol) = (p.normal(), p.offset(), p.on_tolerance());
            match side {
                SideReq::Below => vec![(n, d - tol, Rel::Lt)],
                SideReq::Above => vec![(-n, -(d + tol), Rel::Lt)],
                SideReq::OnOrBelow => vec![(n, d + tol, Rel::Le)],
                SideReq::OnOrAbove => vec![(-n, -(d - tol), Rel::Le)],
                SideReq::On if tol == 0.0 => vec![(n, d, Rel::Eq)],
                SideReq::On => vec![(n, d + tol, Rel::Le), (-n, -(d - tol), Rel::Le)],
            }
        }
        Clause::Coord { axis, cmp, value } => {
            let mut e = [0.0; 3];
            e[axis] = 1.0;
            let e = Vec3::from(e);
            match cmp {
                Cmp::Lt => vec![(e, value, Rel::Lt)],
                Cmp::Le => vec![(e, value, Rel::Le)],
                Cmp::Gt => vec![(-e, -value, Rel::Lt)],
                Cmp::Ge => vec![(-e, -value, Rel::Le)],
            }
        }
    }
}

/// Does `point + span(directions)` intersect the guard of piece `index`?
fn affine_set_meets_guard(
    sys: &PwlSystem,
    index: usize,
    point: &Vec3,
    directions: &[Vec3],
) -> bool {
    let rows = sys.pieces()[index]
        .guard
        .clauses
        .iter()
        .flat_map(|c| clause_constraints(sys, c))
        .map(|(a, b, rel)| {
            Constraint {
                coeffs: directions.iter().map(|d| a.dot(d)).collect(),
                rhs: b - a.dot(point),
                rel,
            }
            .normalized()
        })
        .collect();
    feasible(rows, directions.len())
}

/// Fourier-Motzkin feasibility for a small system of mixed strict/non-strict
/// linear constraints.
fn feasible(mut rows: Vec<Constraint>, nvars: usize) -> bool {
    for j in 0..nvars {
        for r in &mut rows {
            if r.coeffs[j].abs() <= FEAS_EPS {
                r.coeffs[j] = 0.0;
            }
        }
        if let Some(k) = rows
            .iter()
            .position(|r| r.rel == Rel::Eq && r.coeffs[j] != 0.0)
        {
            let pivot = rows.swap_remove(k);
            rows = rows
                .into_iter()
                .map(|mut r| {
                    let f = r.coeffs[j] / pivot.coeffs[j];
                    if f != 0.0 {
                        for (c, p) in r.coeffs.iter_mut().zip(&pivot.coeffs) {
                            *c -= f * p;
                        }
                        r.rhs -= f * pivot.rhs;
                        r.coeffs[j] = 0.0;
                    }
                    r.normalized()
                })
                .collect();
            continue;
        }
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.coeffs[j] > 0.0 {
                pos.push(r);
            } else if r.coeffs[j] < 0.0 {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                let (wp, wn) = (1.0 / p.coeffs[j], -1.0 / n.coeffs[j]);
                let mut coeffs: Vec<f64> = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(a, b)| wp * a + wn * b)
                    .collect();
                coeffs[j] = 0.0;
                let rel = if p.rel == Rel::Lt || n.rel == Rel::Lt {
                    Rel::Lt
                } else {
                    Rel::Le
                };
                rest.push(
                    Constraint {
                        coeffs,
                        rhs: wp * p.rhs + wn * n.rhs,
                        rel,
                    }
                    .normalized(),
                );
            }
        }
        rows = rest;
    }
    rows.iter().all(|r| match r.rel {
        Rel::Lt => r.rhs > FEAS_EPS,
        Rel::Le => r.rhs >= -FEAS_EPS,
        Rel::Eq => r.rhs.abs() <= FEAS_EPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pwl::{AffinePiece, RegionPredicate, SwitchingPlane};

    fn a_singular() -> Mat3 {
        Mat3::spiral(0.5, 10.0, 0.0)
    }

    #[test]
    fn neutral_forcing_removes_equilibrium() {
        assert!(!has_equilibrium(&a_singular(), &Vec3::new(0.0, 0.0, 5.0)));
    }

    #[test]
    fn column_space_forcing_keeps_equilibrium() {
        // A x = -(0.05, 1, 0) is solved by x = (-0.1, 0, s).
        assert!(has_equilibrium(&a_singular(), &Vec3::new(0.05, 1.0, 0.0)));
    }

    #[test]
    fn invertible_matrix_always_has_equilibrium() {
        let a = Mat3::spiral(0.5, 10.0, 0.1);
        for b in [
            Vec3::new(0.0, 0.0, 5.0),
            Vec3::new(3.0, -1.0, 2.0),
            Vec3::ZERO,
        ] {
            assert!(has_equilibrium(&a, &b));
        }
    }

    #[test]
    fn neutral_vector_examples() {
        let a = a_singular();
        assert!(neutral_vector_independent(&a, &Vec3::new(0.0, 0.0, 5.0)).unwrap());
        assert!(neutral_vector_independent(&a, &Vec3::new(0.0, 0.0, -1.0)).unwrap());
        assert!(!neutral_vector_independent(&a, &Vec3::new(1.0, 0.0, 0.0)).unwrap());
    }

    #[test]
    fn neutral_vector_requires_simple_zero() {
        let invertible = Mat3::spiral(0.5, 10.0, 0.1);
        assert!(matches!(
            neutral_vector_independent(&invertible, &Vec3::new(0.0, 0.0, 1.0)),
            Err(Error::NotSingleZeroEigenvalue)
        ));
        let double_zero = Mat3::diagonal([1.0, 0.0, 0.0]);
        assert!(neutral_vector_independent(&double_zero, &Vec3::new(0.0, 0.0, 1.0)).is_err());
        assert!(neutral_vector_independent(&Mat3::zero(), &Vec3::new(0.0, 0.0, 1.0)).is_err());
    }

    fn one_piece(guard: RegionPredicate, a: Mat3, b: Vec3) -> PwlSystem {
        let planes = vec![(
            "S1".to_string(),
            SwitchingPlane::new(Vec3::new(0.0, 0.0, 1.0), 0.0).unwrap(),
        )];
        PwlSystem::new(planes, vec![AffinePiece::new(guard, a, b)], vec![]).unwrap()
    }

    #[test]
    fn linear_single_piece_has_origin_inside() {
        let sys = one_piece(
            RegionPredicate::everywhere(),
            Mat3::spiral(0.5, 10.0, 0.1),
            Vec3::ZERO,
        );
        let ve = virtual_equilibria(&sys);
        assert_eq!(ve.len(), 1);
        assert_eq!(ve[0].point, Some(Vec3::ZERO));
        assert!(ve[0].inside_guard);
        assert!(!equilibrium_report(&sys).equilibrium_free);
    }

    #[test]
    fn singular_piece_reported_singular() {
        let sys = one_piece(
            RegionPredicate::everywhere(),
            a_singular(),
            Vec3::new(0.0, 0.0, 5.0),
        );
        let ve = virtual_equilibria(&sys);
        assert!(ve[0].singular && ve[0].point.is_none());
        assert!(equilibrium_report(&sys).equilibrium_free);
    }

    #[test]
    fn equilibrium_line_outside_guard() {
        // Zeros of A x + W1 form the line (0.1, 0, s); the guard asks x1 < 0.
        let w1 = a_singular().column(0).scale(-0.1);
        let guard = RegionPredicate::new(vec![
            Clause::plane(0, SideReq::On),
            Clause::x1(Cmp::Lt, 0.0),
        ]);
        let sys = one_piece(guard, a_singular(), w1);
        let pe = piece_equilibrium(&sys, 0);
        assert!(pe.has_equilibrium);
        assert!(matches!(
            pe.status,
            EquilibriumStatus::Degenerate {
                meets_guard: false,
                ..
            }
        ));
    }

    #[test]
    fn equilibrium_line_inside_guard() {
        let w1 = a_singular().column(0).scale(-0.1);
        let guard = RegionPredicate::new(vec![
            Clause::plane(0, SideReq::On),
            Clause::x1(Cmp::Ge, 0.0),
        ]);
        let sys = one_piece(guard, a_singular(), w1);
        assert!(piece_equilibrium(&sys, 0).status.is_real());
    }

    #[test]
    fn fourier_motzkin_strictness() {
        // s < 0 and s >= 0 is infeasible; s <= 0 and s >= 0 is feasible.
        let c = |a: f64, b: f64, rel| Constraint {
            coeffs: vec![a],
            rhs: b,
            rel,
        };
        assert!(!feasible(
            vec![c(1.0, 0.0, Rel::Lt), c(-1.0, 0.0, Rel::Le)],
            1
        ));
        assert!(feasible(
            vec![c(1.0, 0.0, Rel::Le), c(-1.0, 0.0, Rel::Le)],
            1
        ));
        assert!(feasible(
            vec![c(1.0, 2.0, Rel::Eq), c(-1.0, -1.0, Rel::Lt)],
            1
        ));
        assert!(!feasible(
            vec![c(1.0, 2.0, Rel::Eq), c(1.0, 1.0, Rel::Lt)],
            1
        ));
    }

    #[test]
    fn fourier_motzkin_two_variables() {
        // s0 + s1 < 1, s0 > 0, s1 > 0: feasible; add s0 + s1 > 2: infeasible.
        let c = |a: [f64; 2], b: f64, rel| Constraint {
            coeffs: a.to_vec(),
            rhs: b,
            rel,
        };
        let mut rows = vec![
            c([1.0, 1.0], 1.0, Rel::Lt),
            c([-1.0, 0.0], 0.0, Rel::Lt),
            c([0.0, -1.0], 0.0, Rel::Lt),
        ];
        assert!(feasible(rows.clone(), 2));
        rows.push(c([-1.0, -1.0], -2.0, Rel::Lt));
        assert!(!feasible(rows, 2));
    }
}
