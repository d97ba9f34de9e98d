//! Piecewise-linear vector fields on R^3.
//!
//! A [`PwlSystem`] is an ordered list of [`AffinePiece`]s, each guarded by a
//! conjunction of half-space and coordinate clauses over a shared table of
//! oriented [`SwitchingPlane`]s. Dispatch is first-match-wins.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};

/// Position of a point relative to an oriented plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    On,
    Above,
}

/// Hyperplane `normal . x = offset`, oriented by `normal`.
///
/// Points with `|normal . x - offset| <= on_tolerance` are on the plane. With
/// the default tolerance of zero only exact floating equality counts.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchingPlane {
    normal: Vec3,
    offset: f64,
    on_tolerance: f64,
}

impl SwitchingPlane {
    pub fn new(normal: Vec3, offset: f64) -> Result<Self> {
        Self::with_tolerance(normal, offset, 0.0)
    }

    pub fn with_tolerance(normal: Vec3, offset: f64, on_tolerance: f64) -> Result<Self> {
        if !normal.is_finite() || !offset.is_finite() {
            return Err(Error::NonFinite {
                what: "switching plane",
            });
        }
        if normal.norm() == 0.0 {
            return Err(Error::ZeroNormal);
        }
        if !(on_tolerance >= 0.0 && on_tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "on-plane tolerance must be finite and nonnegative, got {on_tolerance}"
            )));
        }
        Ok(SwitchingPlane {
            normal,
            offset,
            on_tolerance,
        })
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn on_tolerance(&self) -> f64 {
        self.on_tolerance
    }

    /// Signed residual `normal . x - offset`.
    pub fn residual(&self, x: &Vec3) -> f64 {
        self.normal.dot(x) - self.offset
    }

    pub fn classify(&self, x: &Vec3) -> Side {
        let r = self.residual(x);
        if r > self.on_tolerance {
            Side::Above
        } else if r < -self.on_tolerance {
            Side::Below
        } else {
            Side::On
        }
    }
}

/// Which sides of a plane a clause admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideReq {
    Below,
    On,
    Above,
    OnOrAbove,
    OnOrBelow,
}

impl SideReq {
    pub fn admits(self, side: Side) -> bool {
        match self {
            SideReq::Below => side == Side::Below,
            SideReq::On => side == Side::On,
            SideReq::Above => side == Side::Above,
            SideReq::OnOrAbove => side != Side::Below,
            SideReq::OnOrBelow => side != Side::Above,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Cmp {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Cmp::Lt => lhs < rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Gt => lhs > rhs,
            Cmp::Ge => lhs >= rhs,
        }
    }
}

/// One atomic condition of a guard.
#[derive(Clone, Debug, PartialEq)]
pub enum Clause {
    /// Side of the plane at `plane` in the system's plane table.
    Plane { plane: usize, side: SideReq },
    /// `x[axis] cmp value`, with `axis` zero-based.
    Coord { axis: usize, cmp: Cmp, value: f64 },
}

impl Clause {
    pub fn plane(plane: usize, side: SideReq) -> Self {
        Clause::Plane { plane, side }
    }

    pub fn x1(cmp: Cmp, value: f64) -> Self {
        Clause::Coord {
            axis: 0,
            cmp,
            value,
        }
    }

    fn holds(&self, planes: &[SwitchingPlane], x: &Vec3) -> bool {
        match *self {
            Clause::Plane { plane, side } => side.admits(planes[plane].classify(x)),
            Clause::Coord { axis, cmp, value } => cmp.holds(x[axis], value),
        }
    }
}

/// Conjunction of clauses. The empty conjunction holds everywhere.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegionPredicate {
    pub clauses: Vec<Clause>,
}

impl RegionPredicate {
    pub fn new(clauses: Vec<Clause>) -> Self {
        RegionPredicate { clauses }
    }

    pub fn everywhere() -> Self {
        RegionPredicate::default()
    }

    pub fn holds(&self, planes: &[SwitchingPlane], x: &Vec3) -> bool {
        self.clauses.iter().all(|c| c.holds(planes, x))
    }
}

/// `x' = a_matrix x + b_vector` on the region selected by `guard`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePiece {
    pub guard: RegionPredicate,
    pub a_matrix: Mat3,
    pub b_vector: Vec3,
}

impl AffinePiece {
    pub fn new(guard: RegionPredicate, a_matrix: Mat3, b_vector: Vec3) -> Self {
        AffinePiece {
            guard,
            a_matrix,
            b_vector,
        }
    }

    pub fn eval(&self, x: &Vec3) -> Vec3 {
        self.a_matrix.mul_vec(x) + self.b_vector
    }
}

/// Region labels from a stack of parallel planes.
///
/// A point gets label `1 + 2k`, where `k` counts the planes it is not below.
/// With the transverse planes `[S2, S4]` this yields the scroll alphabet
/// `{1, 3, 5}`; with no planes every point is labelled `1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionScheme {
    planes: Vec<SwitchingPlane>,
}

impl RegionScheme {
    pub fn new(planes: Vec<SwitchingPlane>) -> Self {
        RegionScheme { planes }
    }

    pub fn single() -> Self {
        RegionScheme { planes: Vec::new() }
    }

    pub fn labels(&self) -> Vec<u8> {
        (0..=self.planes.len()).map(|k| 1 + 2 * k as u8).collect()
    }

    pub fn label(&self, x: &Vec3) -> u8 {
        let k = self
            .planes
            .iter()
            .filter(|p| p.classify(x) != Side::Below)
            .count();
        1 + 2 * k as u8
    }
}

/// Maps a state to a region label.
pub trait RegionLabeler {
    fn label(&self, x: &Vec3) -> u8;
}

impl RegionLabeler for RegionScheme {
    fn label(&self, x: &Vec3) -> u8 {
        RegionScheme::label(self, x)
    }
}

impl<F: Fn(&Vec3) -> u8> RegionLabeler for F {
    fn label(&self, x: &Vec3) -> u8 {
        self(x)
    }
}

/// A guarded piecewise-affine vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct PwlSystem {
    name: Option<String>,
    plane_names: Vec<String>,
    planes: Vec<SwitchingPlane>,
    pieces: Vec<AffinePiece>,
    region_planes: Vec<usize>,
}

impl PwlSystem {
    /// Builds a system over a named plane table.
    ///
    /// `region_planes` lists, in stacking order, the planes that define the
    /// scroll-region labels (see [`RegionScheme`]).
    pub fn new(
        planes: Vec<(String, SwitchingPlane)>,
        pieces: Vec<AffinePiece>,
        region_planes: Vec<usize>,
    ) -> Result<Self> {
        let (plane_names, planes): (Vec<_>, Vec<_>) = planes.into_iter().unzip();
        for (i, piece) in pieces.iter().enumerate() {
            let finite_a = piece
                .a_matrix
                .to_rows()
                .iter()
                .flatten()
                .all(|v| v.is_finite());
            if !finite_a || !piece.b_vector.is_finite() {
                return Err(Error::NonFinite {
                    what: "affine piece",
                });
            }
            for clause in &piece.guard.clauses {
                match *clause {
                    Clause::Plane { plane, .. } if plane >= planes.len() => {
                        return Err(Error::InvalidConfig(format!(
                            "piece {i} references plane index {plane}, table has {}",
                            planes.len()
                        )));
                    }
                    Clause::Coord { axis, value, .. } => {
                        if axis > 2 {
                            return Err(Error::InvalidConfig(format!(
                                "piece {i} uses coordinate axis {axis}"
                            )));
                        }
                        if !value.is_finite() {
                            return Err(Error::NonFinite {
                                what: "coordinate threshold",
                            });
                        }
                    }
                    _ => {}
                }
            }
        }
        if let Some(&bad) = region_planes.iter().find(|&&p| p >= planes.len()) {
            return Err(Error::InvalidConfig(format!(
                "region plane index {bad} out of range"
            )));
        }
        Ok(PwlSystem {
            name: None,
            plane_names,
            planes,
            pieces,
            region_planes,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn planes(&self) -> &[SwitchingPlane] {
        &self.planes
    }

    pub fn plane_names(&self) -> &[String] {
        &self.plane_names
    }

    pub fn plane_index(&self, name: &str) -> Option<usize> {
        self.plane_names.iter().position(|n| n == name)
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn region_planes(&self) -> &[usize] {
        &self.region_planes
    }

    pub fn region_scheme(&self) -> RegionScheme {
        RegionScheme::new(
            self.region_planes
                .iter()
                .map(|&i| self.planes[i].clone())
                .collect(),
        )
    }

    pub fn guard_holds(&self, piece: usize, x: &Vec3) -> bool {
        self.pieces[piece].guard.holds(&self.planes, x)
    }

    /// Index of the first piece whose guard holds at `x`.
    pub fn piece_index_at(&self, x: &Vec3) -> Option<usize> {
        self.pieces
            .iter()
            .position(|p| p.guard.holds(&self.planes, x))
    }

    pub fn vector_field_at(&self, x: &Vec3) -> Result<Vec3> {
        self.pieces
            .iter()
            .find(|p| p.guard.holds(&self.planes, x))
            .map(|p| p.eval(x))
            .ok_or(Error::NoMatchingRegion { point: *x })
    }

    /// Returns a copy whose planes all use the given on-plane tolerance.
    pub fn with_on_tolerance(&self, tol: f64) -> Result<Self> {
        let mut out = self.clone();
        for p in &mut out.planes {
            *p = SwitchingPlane::with_tolerance(p.normal, p.offset, tol)?;
        }
        Ok(out)
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Side::Below => "below",
            Side::On => "on",
            Side::Above => "above",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x3_plane() -> SwitchingPlane {
        SwitchingPlane::new(Vec3::new(0.0, 0.0, 1.0), 0.0).unwrap()
    }

    #[test]
    fn classify_examples() {
        let s1 = x3_plane();
        assert_eq!(s1.classify(&Vec3::new(0.0, 0.0, 2.0)), Side::Above);
        assert_eq!(s1.classify(&Vec3::new(5.0, -3.0, 0.0)), Side::On);
        let s2 = SwitchingPlane::new(Vec3::new(1.0, 0.0, 0.5), 1.0).unwrap();
        assert_eq!(s2.classify(&Vec3::ZERO), Side::Below);
    }

    #[test]
    fn tolerance_band_widens_on_region() {
        let p = SwitchingPlane::with_tolerance(Vec3::new(0.0, 0.0, 1.0), 0.0, 0.1).unwrap();
        assert_eq!(p.classify(&Vec3::new(0.0, 0.0, 0.05)), Side::On);
        assert_eq!(p.classify(&Vec3::new(0.0, 0.0, -0.1)), Side::On);
        assert_eq!(p.classify(&Vec3::new(0.0, 0.0, -0.11)), Side::Below);
    }

    #[test]
    fn zero_normal_rejected() {
        assert!(matches!(
            SwitchingPlane::new(Vec3::ZERO, 1.0),
            Err(Error::ZeroNormal)
        ));
    }

    #[test]
    fn first_match_wins() {
        let planes = vec![("S".to_string(), x3_plane())];
        let a = Mat3::zero();
        let pieces = vec![
            AffinePiece::new(
                RegionPredicate::new(vec![Clause::plane(0, SideReq::OnOrAbove)]),
                a,
                Vec3::new(1.0, 0.0, 0.0),
            ),
            AffinePiece::new(RegionPredicate::everywhere(), a, Vec3::new(2.0, 0.0, 0.0)),
        ];
        let sys = PwlSystem::new(planes, pieces, vec![]).unwrap();
        assert_eq!(sys.vector_field_at(&Vec3::ZERO).unwrap().x1(), 1.0);
        assert_eq!(
            sys.vector_field_at(&Vec3::new(0.0, 0.0, -1.0))
                .unwrap()
                .x1(),
            2.0
        );
    }

    #[test]
    fn uncovered_point_is_an_error() {
        let planes = vec![("S".to_string(), x3_plane())];
        let pieces = vec![AffinePiece::new(
            RegionPredicate::new(vec![Clause::plane(0, SideReq::Above)]),
            Mat3::zero(),
            Vec3::ZERO,
        )];
        let sys = PwlSystem::new(planes, pieces, vec![]).unwrap();
        assert!(matches!(
            sys.vector_field_at(&Vec3::ZERO),
            Err(Error::NoMatchingRegion { .. })
        ));
    }

    #[test]
    fn bad_plane_reference_rejected() {
        let pieces = vec![AffinePiece::new(
            RegionPredicate::new(vec![Clause::plane(3, SideReq::Above)]),
            Mat3::zero(),
            Vec3::ZERO,
        )];
        assert!(PwlSystem::new(vec![], pieces, vec![]).is_err());
    }

    #[test]
    fn region_scheme_labels() {
        let s2 = SwitchingPlane::new(Vec3::new(1.0, 0.0, 0.5), 1.0).unwrap();
        let s4 = SwitchingPlane::new(Vec3::new(1.0, 0.0, 0.5), 3.0).unwrap();
        let scheme = RegionScheme::new(vec![s2, s4]);
        assert_eq!(scheme.labels(), vec![1, 3, 5]);
        assert_eq!(scheme.label(&Vec3::ZERO), 1);
        assert_eq!(scheme.label(&Vec3::new(1.0, 0.0, 0.0)), 3);
        assert_eq!(scheme.label(&Vec3::new(2.0, 0.0, 2.0)), 5);
        assert_eq!(RegionScheme::single().label(&Vec3::new(9.0, 9.0, 9.0)), 1);
    }

    proptest! {
        #[test]
        fn classification_is_a_trichotomy(
            n in prop::array::uniform3(-5.0f64..5.0),
            d in -5.0f64..5.0,
            tol in 0.0f64..0.5,
            x in prop::array::uniform3(-10.0f64..10.0),
        ) {
            let normal = Vec3::from(n);
            prop_assume!(normal.norm() > 1e-6);
            let plane = SwitchingPlane::with_tolerance(normal, d, tol).unwrap();
            let x = Vec3::from(x);
            let side = plane.classify(&x);
            let hits = [Side::Below, Side::On, Side::Above]
                .iter()
                .filter(|&&s| SideReq::admits(match s {
                    Side::Below => SideReq::Below,
                    Side::On => SideReq::On,
                    Side::Above => SideReq::Above,
                }, side))
                .count();
            prop_assert_eq!(hits, 1);
            let r = plane.residual(&x);
            prop_assert_eq!(side == Side::On, r.abs() <= tol);
            prop_assert_eq!(side == Side::Above, r > tol);
        }
    }
}
