//! JSON system definitions.
//!
//! ```json
//! {
//!   "name": "example1-double",
//!   "matrix": [[0.5, -10, 0], [10, 0.5, 0], [0, 0, 0]],
//!   "planes": [
//!     { "name": "S1", "normal": [0, 0, 1], "offset": 0, "tolerance": 0 }
//!   ],
//!   "regions": ["S1"],
//!   "pieces": [
//!     {
//!       "guard": [
//!         { "plane": "S1", "side": "below" },
//!         { "coord": "x1", "cmp": "lt", "value": 0 }
//!       ],
//!       "b_vector": [-0.05, -1, 5]
//!     }
//!   ]
//! }
//! ```
//!
//! - `matrix` is row-major, either nested 3x3 or flat with 9 entries. A piece
//!   may carry its own `matrix`, which overrides the shared one.
//! - `side` is one of `below`, `on`, `above`, `on_or_above`, `on_or_below`.
//! - `coord` is `x1`, `x2` or `x3`; `cmp` is `lt`, `le`, `gt` or `ge`.
//! - `tolerance` (default 0), `regions` (default none) and `name` are optional.
//! - Pieces are tried in order; the first whose guard holds is used.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::pwl::{AffinePiece, Clause, Cmp, PwlSystem, RegionPredicate, SideReq, SwitchingPlane};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub matrix: Value,
    pub planes: Vec<PlaneDocument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<String>,
    pub pieces: Vec<PieceDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneDocument {
    pub name: String,
    pub normal: [f64; 3],
    pub offset: f64,
    #[serde(default)]
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDocument {
    pub guard: Vec<ClauseDocument>,
    pub b_vector: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    fn from_index(i: usize) -> Self {
        [Axis::X1, Axis::X2, Axis::X3][i]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClauseDocument {
    Plane { plane: String, side: SideReq },
    Coord { coord: Axis, cmp: Cmp, value: f64 },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn dimension(path: &str, found: impl Into<String>) -> Error {
    Error::Dimension {
        path: path.into(),
        found: found.into(),
    }
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| schema(path, format!("expected a number, found {v}")))
}

/// Reads a 3x3 matrix given nested or flat. Wrong shapes are dimension errors.
fn parse_matrix(v: &Value, path: &str) -> Result<Mat3> {
    let Value::Array(items) = v else {
        return Err(schema(path, format!("expected an array, found {v}")));
    };
    let mut rows = [[0.0; 3]; 3];
    if items.iter().all(Value::is_array) {
        let lens: Vec<usize> = items
            .iter()
            .map(|r| r.as_array().map_or(0, Vec::len))
            .collect();
        if items.len() != 3 || lens.iter().any(|&l| l != 3) {
            let cols = lens.iter().copied().max().unwrap_or(0);
            return Err(dimension(path, format!("found {}x{}", items.len(), cols)));
        }
        for (i, row) in items.iter().enumerate() {
            for (j, e) in row.as_array().into_iter().flatten().enumerate() {
                rows[i][j] = number(e, &format!("{path}[{i}][{j}]"))?;
            }
        }
    } else {
        if items.len() != 9 {
            return Err(dimension(
                path,
                format!("found {} flat entries", items.len()),
            ));
        }
        for (k, e) in items.iter().enumerate() {
            rows[k / 3][k % 3] = number(e, &format!("{path}[{k}]"))?;
        }
    }
    Mat3::try_from_rows(rows)
}

fn matrix_value(m: &Mat3) -> Value {
    serde_json::to_value(m.to_rows()).expect("array of floats serializes")
}

impl SystemDocument {
    pub fn from_system(sys: &PwlSystem) -> Self {
        let shared = sys.pieces().first().map_or(Mat3::zero(), |p| p.a_matrix);
        let names = sys.plane_names();
        let planes = sys
            .planes()
            .iter()
            .zip(names)
            .map(|(p, name)| PlaneDocument {
                name: name.clone(),
                normal: p.normal().to_array(),
                offset: p.offset(),
                tolerance: p.on_tolerance(),
            })
            .collect();
        let pieces = sys
            .pieces()
            .iter()
            .map(|piece| PieceDocument {
                guard: piece
                    .guard
                    .clauses
                    .iter()
                    .map(|c| match *c {
                        Clause::Plane { plane, side } => ClauseDocument::Plane {
                            plane: names[plane].clone(),
                            side,
                        },
                        Clause::Coord { axis, cmp, value } => ClauseDocument::Coord {
                            coord: Axis::from_index(axis),
                            cmp,
                            value,
                        },
                    })
                    .collect(),
                b_vector: piece.b_vector.to_array(),
                matrix: (piece.a_matrix != shared).then(|| matrix_value(&piece.a_matrix)),
            })
            .collect();
        SystemDocument {
            name: sys.name().map(str::to_owned),
            matrix: matrix_value(&shared),
            planes,
            regions: sys
                .region_planes()
                .iter()
                .map(|&i| names[i].clone())
                .collect(),
            pieces,
        }
    }

    pub fn to_system(&self) -> Result<PwlSystem> {
        let shared = parse_matrix(&self.matrix, "matrix")?;
        let mut planes = Vec::with_capacity(self.planes.len());
        for (i, p) in self.planes.iter().enumerate() {
            if self.planes[..i].iter().any(|q| q.name == p.name) {
                return Err(schema(
                    format!("planes[{i}].name"),
                    format!("duplicate plane name `{}`", p.name),
                ));
            }
            let normal = Vec3::from(p.normal);
            let plane = SwitchingPlane::with_tolerance(normal, p.offset, p.tolerance)?;
            planes.push((p.name.clone(), plane));
        }
        let index_of = |name: &str, path: String| {
            self.planes
                .iter()
                .position(|p| p.name == name)
                .ok_or_else(|| schema(path, format!("unknown plane `{name}`")))
        };
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (i, pd) in self.pieces.iter().enumerate() {
            let mut clauses = Vec::with_capacity(pd.guard.len());
            for (j, c) in pd.guard.iter().enumerate() {
                clauses.push(match c {
                    ClauseDocument::Plane { plane, side } => Clause::Plane {
                        plane: index_of(plane, format!("pieces[{i}].guard[{j}].plane"))?,
                        side: *side,
                    },
                    ClauseDocument::Coord { coord, cmp, value } => Clause::Coord {
                        axis: coord.index(),
                        cmp: *cmp,
                        value: *value,
                    },
                });
            }
            let a = match &pd.matrix {
                Some(m) => parse_matrix(m, &format!("pieces[{i}].matrix"))?,
                None => shared,
            };
            pieces.push(AffinePiece::new(
                RegionPredicate::new(clauses),
                a,
                Vec3::try_new(pd.b_vector[0], pd.b_vector[1], pd.b_vector[2])?,
            ));
        }
        let regions = self
            .regions
            .iter()
            .enumerate()
            .map(|(k, name)| index_of(name, format!("regions[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let sys = PwlSystem::new(planes, pieces, regions)?;
        Ok(match &self.name {
            Some(n) => sys.with_name(n.clone()),
            None => sys,
        })
    }
}

/// Parses a system from JSON text.
pub fn load_system(json: &str) -> Result<PwlSystem> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let doc: SystemDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;
    doc.to_system()
}

/// Pretty-printed JSON for `sys`.
pub fn save_system(sys: &PwlSystem) -> String {
    serde_json::to_string_pretty(&SystemDocument::from_system(sys))
        .expect("system document serializes")
}

pub fn load_system_file(path: impl AsRef<Path>) -> Result<PwlSystem> {
    load_system(&fs::read_to_string(path)?)
}

pub fn save_system_file(sys: &PwlSystem, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, save_system(sys) + "\n")?;
    Ok(())
}
