//! Fixed-size 3-vectors and 3x3 matrices.
//!
//! Thin newtypes over `nalgebra` so the rest of the crate speaks in terms of
//! states and system matrices, with finiteness checked at the input boundary.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix3x4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Singular values below `RANK_RTOL * sigma_max` count as zero.
pub const RANK_RTOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3(Vector3<f64>);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Vec3(Vector3::new(x1, x2, x3))
    }

    /// Checked constructor for values arriving from outside the crate.
    pub fn try_new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let v = Vec3::new(x1, x2, x3);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { what: "vector" })
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    pub fn x1(&self) -> f64 {
        self.0.x
    }

    pub fn x2(&self) -> f64 {
        self.0.y
    }

    pub fn x3(&self) -> f64 {
        self.0.z
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3(self.0 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub(crate) fn inner(&self) -> &Vector3<f64> {
        &self.0
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3(self.0 + rhs.0)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        self.0 += rhs.0;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3(self.0 - rhs.0)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3(-self.0)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        Vec3(rhs.0 * self)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0.x, self.0.y, self.0.z)
    }
}

/// Row-major 3x3 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(Matrix3<f64>);

impl Mat3 {
    pub const fn zero() -> Self {
        Mat3(Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
    }

    pub fn identity() -> Self {
        Mat3(Matrix3::identity())
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Mat3(Matrix3::from_row_slice(&[
            rows[0][0], rows[0][1], rows[0][2], rows[1][0], rows[1][1], rows[1][2], rows[2][0],
            rows[2][1], rows[2][2],
        ]))
    }

    pub fn try_from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        if rows.iter().flatten().all(|v| v.is_finite()) {
            Ok(Mat3::from_rows(rows))
        } else {
            Err(Error::NonFinite { what: "matrix" })
        }
    }

    pub fn diagonal(d: [f64; 3]) -> Self {
        Mat3(Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2])))
    }

    /// Spiral-plus-axial matrix `[[m, -n, 0], [n, m, 0], [0, 0, eta]]`.
    pub fn spiral(m: f64, n: f64, eta: f64) -> Self {
        Mat3::from_rows([[m, -n, 0.0], [n, m, 0.0], [0.0, 0.0, eta]])
    }

    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn column(&self, j: usize) -> Vec3 {
        Vec3(self.0.column(j).into_owned())
    }

    pub fn mul_vec(&self, x: &Vec3) -> Vec3 {
        Vec3(self.0 * x.inner())
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Sum of the principal 2x2 minors: the coefficient of `lambda` in the
    /// characteristic polynomial `lambda^3 - tr lambda^2 + c2 lambda - det`.
    pub fn principal_minor_sum(&self) -> f64 {
        let a = &self.0;
        let minor = |i: usize, j: usize| a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)];
        minor(0, 1) + minor(0, 2) + minor(1, 2)
    }

    pub fn transpose(&self) -> Mat3 {
        Mat3(self.0.transpose())
    }

    pub fn matmul(&self, other: &Mat3) -> Mat3 {
        Mat3(self.0 * other.0)
    }

    /// Rank-one matrix `u v^T`.
    pub fn outer(u: &Vec3, v: &Vec3) -> Mat3 {
        Mat3(u.inner() * v.inner().transpose())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn singular_values(&self) -> [f64; 3] {
        let s = self.0.singular_values();
        [s[0], s[1], s[2]]
    }

    pub fn rank(&self) -> usize {
        numerical_rank(self.0.singular_values().as_slice())
    }

    /// Rank of the 3x4 augmented matrix `[A | b]`.
    pub fn augmented_rank(&self, b: &Vec3) -> usize {
        let aug = Matrix3x4::from_columns(&[
            self.0.column(0).into_owned(),
            self.0.column(1).into_owned(),
            self.0.column(2).into_owned(),
            *b.inner(),
        ]);
        numerical_rank(aug.singular_values().as_slice())
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == 3
    }

    pub fn try_inverse(&self) -> Option<Mat3> {
        if !self.is_invertible() {
            return None;
        }
        self.0.try_inverse().map(Mat3)
    }

    /// Least-squares solution of `A x = b` together with an orthonormal basis
    /// of the numerical null space of `A`.
    pub fn solve_with_null_space(&self, b: &Vec3) -> (Vec3, Vec<Vec3>) {
        let svd = self.0.svd(true, true);
        let u = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v_t requested");
        let s = svd.singular_values;
        let smax = s.max();
        let cutoff = RANK_RTOL * smax;
        let mut x = Vector3::zeros();
        let mut null = Vec::new();
        for i in 0..3 {
            let vi = v_t.row(i).transpose();
            if smax > 0.0 && s[i] > cutoff {
                let coeff = u.column(i).dot(b.inner()) / s[i];
                x += vi * coeff;
            } else {
                null.push(Vec3(vi));
            }
        }
        (Vec3(x), null)
    }
}

impl Mul<Mat3> for f64 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        Mat3(rhs.0 * self)
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        Mat3(self.0 + rhs.0)
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        Mat3(self.0 - rhs.0)
    }
}

fn numerical_rank(singular_values: &[f64]) -> usize {
    let smax = singular_values.iter().copied().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    singular_values
        .iter()
        .filter(|&&s| s > RANK_RTOL * smax)
        .count()
}
