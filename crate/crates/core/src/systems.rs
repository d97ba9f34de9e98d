//! Factory constructors for the double- and triple-scroll systems.
//!
//! All factories share one spiral matrix `A = [[m, -n, 0], [n, m, 0], [0, 0, eta]]`,
//! a neutral forcing `V = (0, 0, v)` and column-space shifts `W_i = k1 a1 + k2 a2`.
//! Floor planes `x3 = 0, 2, 4` (S1, S3, S5) host the saddle-focus-like cells;
//! the transverse planes `x1 + x3/2 = 1, 3` (S2, S4) switch between them.
//!
//! Branch guards are kept row by row with their irregularities (some rows
//! overlap, some omit clauses their neighbours carry); they only become a
//! partition together with first-match dispatch.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::pwl::{AffinePiece, Clause, Cmp, PwlSystem, RegionPredicate, SideReq, SwitchingPlane};

/// Coefficients of `W = k1 a1 + k2 a2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WVectorSpec {
    pub k1: f64,
    pub k2: f64,
}

impl WVectorSpec {
    pub const fn new(k1: f64, k2: f64) -> Self {
        WVectorSpec { k1, k2 }
    }

    pub fn resolve(&self, a: &Mat3) -> Vec3 {
        a.column(0).scale(self.k1) + a.column(1).scale(self.k2)
    }

    /// Planar rotation centre `(-k1, -k2)` of the on-plane flow `A x + W`.
    pub fn focus(&self) -> (f64, f64) {
        (-self.k1, -self.k2)
    }
}

/// W table shared by every factory.
pub const W_TABLE: [WVectorSpec; 6] = [
    WVectorSpec::new(-0.1, 0.0),
    WVectorSpec::new(0.1, 0.0),
    WVectorSpec::new(-1.1, 0.0),
    WVectorSpec::new(-0.9, 0.0),
    WVectorSpec::new(-2.1, 0.0),
    WVectorSpec::new(-1.9, 0.0),
];

/// Parameters of a multi-scroll family.
#[derive(Clone, Debug, PartialEq)]
pub struct ScrollFamilySpec {
    pub m: f64,
    pub n: f64,
    pub eta: f64,
    pub v: f64,
    /// S1..S_{2s-1}, alternating floor and transverse planes.
    pub planes: Vec<SwitchingPlane>,
    pub w_specs: Vec<WVectorSpec>,
    /// Per-cell split line `x1 = threshold` between the two foci.
    pub x1_thresholds: Vec<f64>,
}

impl ScrollFamilySpec {
    /// Standard parameters (`m = 0.5`, `n = 10`, `v = 5`) for `scrolls` cells.
    pub fn standard(scrolls: usize, eta: f64) -> Result<Self> {
        if !(2..=3).contains(&scrolls) {
            return Err(Error::InvalidConfig(format!(
                "branch tables exist for 2 or 3 scrolls, got {scrolls}"
            )));
        }
        let mut planes = Vec::with_capacity(2 * scrolls - 1);
        for cell in 0..scrolls {
            let floor = 2.0 * cell as f64;
            planes.push(SwitchingPlane::new(Vec3::new(0.0, 0.0, 1.0), floor)?);
            if cell + 1 < scrolls {
                planes.push(SwitchingPlane::new(Vec3::new(1.0, 0.0, 0.5), floor + 1.0)?);
            }
        }
        Ok(ScrollFamilySpec {
            m: 0.5,
            n: 10.0,
            eta,
            v: 5.0,
            planes,
            w_specs: W_TABLE[..2 * scrolls].to_vec(),
            x1_thresholds: (0..scrolls).map(|c| c as f64).collect(),
        })
    }

    pub fn scrolls(&self) -> usize {
        self.x1_thresholds.len()
    }

    pub fn a_matrix(&self) -> Mat3 {
        Mat3::spiral(self.m, self.n, self.eta)
    }

    pub fn neutral_vector(&self) -> Vec3 {
        Vec3::new(0.0, 0.0, self.v)
    }

    fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) || self.n == 0.0 || !self.n.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "need m > 0 and n != 0, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        let s = self.scrolls();
        if self.w_specs.len() != 2 * s {
            return Err(Error::InvalidConfig(format!(
                "{s} scrolls need {} W vectors, got {}",
                2 * s,
                self.w_specs.len()
            )));
        }
        if self.planes.len() != 2 * s - 1 {
            return Err(Error::InvalidConfig(format!(
                "{s} scrolls need {} planes, got {}",
                2 * s - 1,
                self.planes.len()
            )));
        }
        Ok(())
    }
}

/// Guard atoms with 1-based plane numbers `S_k` and 0-based cell indices.
#[derive(Clone, Copy)]
enum G {
    Below(usize),
    On(usize),
    Above(usize),
    AtLeast(usize),
    X1Lt(usize),
    X1Ge(usize),
}

/// One branch: guard, sign of V, 1-based W index.
struct Row(&'static [G], i8, usize);

use G::*;

const TWO_SCROLL: [Row; 12] = [
    Row(&[Below(1), X1Lt(0)], 1, 1),
    Row(&[Below(1), Below(2), X1Ge(0)], 1, 2),
    Row(&[On(1), X1Lt(0)], 0, 1),
    Row(&[On(1), Below(2), X1Ge(0)], 0, 2),
    Row(&[Above(1), Below(2), X1Lt(0)], -1, 1),
    Row(&[Above(1), Below(2), X1Ge(0)], -1, 2),
    Row(&[Below(3), AtLeast(2), X1Lt(1)], 1, 3),
    Row(&[Below(3), AtLeast(2), X1Ge(1)], 1, 4),
    Row(&[On(3), AtLeast(2), X1Lt(1)], 0, 3),
    Row(&[On(3), X1Ge(1)], 0, 4),
    Row(&[Above(3), AtLeast(2), X1Lt(1)], -1, 3),
    Row(&[Above(3), X1Ge(1)], -1, 4),
];

const THREE_SCROLL: [Row; 18] = [
    Row(&[Below(1), X1Lt(0)], 1, 1),
    Row(&[Below(1), Below(2), X1Ge(0)], 1, 2),
    Row(&[On(1), X1Lt(0)], 0, 1),
    Row(&[On(1), Below(2), X1Ge(0)], 0, 2),
    Row(&[Above(1), Below(2), X1Lt(0)], -1, 1),
    Row(&[Above(1), Below(2), X1Ge(0)], -1, 2),
    Row(&[Below(3), AtLeast(2), X1Lt(1)], 1, 3),
    Row(&[Below(3), AtLeast(2), Below(4), X1Ge(1)], 1, 4),
    Row(&[On(3), AtLeast(2), X1Lt(1)], 0, 3),
    Row(&[On(3), Below(4), X1Ge(1)], 0, 4),
    Row(&[Above(3), AtLeast(2), Below(4), X1Lt(1)], -1, 3),
    Row(&[Above(3), Below(4), X1Ge(1)], -1, 4),
    Row(&[Below(5), AtLeast(4), X1Lt(2)], 1, 5),
    Row(&[Below(5), AtLeast(4), X1Ge(2)], 1, 6),
    Row(&[On(5), AtLeast(4), X1Lt(2)], 0, 5),
    // `x >= S4` is implied by x3 = 4, x1 >= 2; stated for symmetry with row 4.
    Row(&[On(5), AtLeast(4), X1Ge(2)], 0, 6),
    Row(&[Above(5), AtLeast(4), X1Lt(2)], -1, 5),
    Row(&[Above(5), X1Ge(2)], -1, 6),
];

/// Assembles the branch table for a two- or three-scroll family.
pub fn build_scroll_system(spec: &ScrollFamilySpec) -> Result<PwlSystem> {
    spec.validate()?;
    let table: &[Row] = match spec.scrolls() {
        2 => &TWO_SCROLL,
        3 => &THREE_SCROLL,
        s => {
            return Err(Error::InvalidConfig(format!(
                "branch tables exist for 2 or 3 scrolls, got {s}"
            )))
        }
    };
    let a = spec.a_matrix();
    let v = spec.neutral_vector();
    let th = &spec.x1_thresholds;
    let pieces = table
        .iter()
        .map(|Row(atoms, v_sign, w)| {
            let clauses = atoms
                .iter()
                .map(|atom| match *atom {
                    Below(k) => Clause::plane(k - 1, SideReq::Below),
                    On(k) => Clause::plane(k - 1, SideReq::On),
                    Above(k) => Clause::plane(k - 1, SideReq::Above),
                    AtLeast(k) => Clause::plane(k - 1, SideReq::OnOrAbove),
                    X1Lt(c) => Clause::x1(Cmp::Lt, th[c]),
                    X1Ge(c) => Clause::x1(Cmp::Ge, th[c]),
                })
                .collect();
            let b = v.scale(f64::from(*v_sign)) + spec.w_specs[w - 1].resolve(&a);
            AffinePiece::new(RegionPredicate::new(clauses), a, b)
        })
        .collect();
    let planes = spec
        .planes
        .iter()
        .enumerate()
        .map(|(i, p)| (format!("S{}", i + 1), p.clone()))
        .collect();
    // Transverse planes S2, S4 delimit the scroll regions.
    let region_planes = (1..spec.planes.len()).step_by(2).collect();
    PwlSystem::new(planes, pieces, region_planes)
}

/// Double scroll, singular `A` (`eta = 0`): 12 branches over S1..S3.
pub fn build_example1_double() -> PwlSystem {
    let spec = ScrollFamilySpec::standard(2, 0.0).expect("standard parameters are valid");
    build_scroll_system(&spec)
        .expect("standard parameters are valid")
        .with_name("example1-double")
}

/// Triple scroll, singular `A` (`eta = 0`): 18 branches over S1..S5.
pub fn build_example1_triple() -> PwlSystem {
    let spec = ScrollFamilySpec::standard(3, 0.0).expect("standard parameters are valid");
    build_scroll_system(&spec)
        .expect("standard parameters are valid")
        .with_name("example1-triple")
}

/// Triple scroll with invertible `A` (`eta = 0.1`).
pub fn build_example2_triple() -> PwlSystem {
    let spec = ScrollFamilySpec::standard(3, 0.1).expect("standard parameters are valid");
    build_scroll_system(&spec)
        .expect("standard parameters are valid")
        .with_name("example2-triple")
}

/// Built-in system names accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorySystem {
    Example1Double,
    Example1Triple,
    Example2Triple,
}

impl FactorySystem {
    pub const ALL: [FactorySystem; 3] = [
        FactorySystem::Example1Double,
        FactorySystem::Example1Triple,
        FactorySystem::Example2Triple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FactorySystem::Example1Double => "example1-double",
            FactorySystem::Example1Triple => "example1-triple",
            FactorySystem::Example2Triple => "example2-triple",
        }
    }

    pub fn build(self) -> PwlSystem {
        match self {
            FactorySystem::Example1Double => build_example1_double(),
            FactorySystem::Example1Triple => build_example1_triple(),
            FactorySystem::Example2Triple => build_example2_triple(),
        }
    }
}

impl FromStr for FactorySystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FactorySystem::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown system `{s}`")))
    }
}
