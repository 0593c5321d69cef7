//! Angle coordinates of a pattern.
//!
//! For a face with circumcenter `O` and corners `SW, SE, NE, NW`, the four
//! angles are `φS = ∠SW·O·SE`, `φE = ∠SE·O·NE`, `φN = ∠NE·O·NW` and
//! `φW = ∠NW·O·SW`: walking counterclockwise around the face, each corner is
//! the previous one rotated about `O` by the angle of the edge between them.

mod conditions;
mod reconstruct;
mod recurrence;

pub use conditions::{check_conditions, Condition, ConditionKind, ConditionReport};
pub use reconstruct::{gauge_align, reconstruct};
pub use recurrence::{lemma52_solve, lemma52_solve_complex, recurrence_step, XField};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::oriented_angle;
use crate::pattern::{check_shape, FaceId, TorusPattern};

/// Edge of a face, seen from its circumcenter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    N,
    W,
    S,
    E,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::W, Dir::S, Dir::E];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Next direction counterclockwise: `N → W → S → E → N`.
    pub fn ccw(self) -> Dir {
        Dir::ALL[(self.index() + 1) % 4]
    }

    pub fn cw(self) -> Dir {
        Dir::ALL[(self.index() + 3) % 4]
    }

    pub fn opposite(self) -> Dir {
        Dir::ALL[(self.index() + 2) % 4]
    }

    /// Offset to the face across this edge.
    pub fn offset(self) -> (i64, i64) {
        match self {
            Dir::N => (0, 1),
            Dir::W => (-1, 0),
            Dir::S => (0, -1),
            Dir::E => (1, 0),
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dir::N => "N",
            Dir::W => "W",
            Dir::S => "S",
            Dir::E => "E",
        };
        f.write_str(s)
    }
}

/// One angle per (face of the fundamental domain, direction).
#[derive(Debug, Clone, PartialEq)]
pub struct PhiField {
    m: usize,
    n: usize,
    s: usize,
    /// Row-major over faces, each entry ordered `[N, W, S, E]`.
    values: Vec<[f64; 4]>,
}

impl PhiField {
    pub fn new(m: usize, n: usize, s: usize, values: Vec<[f64; 4]>) -> Result<Self> {
        check_shape(m, n, s)?;
        if values.len() != m * n {
            return Err(Error::InvalidParameters(format!(
                "expected {} faces, got {}",
                m * n,
                values.len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameters("non-finite angle".into()));
        }
        Ok(PhiField { m, n, s, values })
    }

    /// Every angle equal to `value`.
    pub fn constant(m: usize, n: usize, s: usize, value: f64) -> Result<Self> {
        PhiField::new(m, n, s, vec![[value; 4]; m * n])
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.s)
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.n as i64).flat_map(move |fy| (0..self.m as i64).map(move |fx| FaceId::new(fx, fy)))
    }

    fn slot(&self, f: FaceId) -> usize {
        face_slot(self.m, self.n, self.s, f)
    }

    /// Angle at any face of `ℤ²`, reduced by periodicity.
    pub fn get(&self, f: FaceId, d: Dir) -> f64 {
        self.values[self.slot(f)][d.index()]
    }

    pub fn set(&mut self, f: FaceId, d: Dir, value: f64) {
        let k = self.slot(f);
        self.values[k][d.index()] = value;
    }

    pub fn values(&self) -> &[[f64; 4]] {
        &self.values
    }

    /// Largest entrywise distance modulo `2π`.
    pub fn max_deviation(&self, other: &PhiField) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| crate::tol::angle_distance(*a, *b))
            .fold(0.0, f64::max)
    }

    /// `R_to / R_from` for two adjacent faces.
    pub fn radius_ratio(&self, from: FaceId, to: FaceId) -> Result<f64> {
        let half_sin = |f: FaceId, d: Dir| (0.5 * self.get(f, d)).sin();
        match (to.fx - from.fx, to.fy - from.fy) {
            (1, 0) => Ok(half_sin(from, Dir::E) / half_sin(to, Dir::W)),
            (-1, 0) => Ok(half_sin(from, Dir::W) / half_sin(to, Dir::E)),
            (0, 1) => Ok(half_sin(from, Dir::N) / half_sin(to, Dir::S)),
            (0, -1) => Ok(half_sin(from, Dir::S) / half_sin(to, Dir::N)),
            _ => Err(Error::InvalidParameters(format!(
                "faces {} and {} are not adjacent",
                from.label(),
                to.label()
            ))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PhiDoc::from(self)).expect("phi field serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PhiDoc = serde_json::from_str(s)?;
        doc.try_into()
    }
}

/// Row-major index of the fundamental-domain face equivalent to `f`.
pub(crate) fn face_slot(m: usize, n: usize, s: usize, f: FaceId) -> usize {
    let (m, n, s) = (m as i64, n as i64, s as i64);
    let b = f.fy.div_euclid(n);
    let y0 = f.fy - b * n;
    let x0 = (f.fx - b * s).rem_euclid(m);
    (y0 * m + x0) as usize
}

/// Angles of every face of `p`.
pub fn extract_phi(p: &TorusPattern) -> Result<PhiField> {
    let mut values = Vec::with_capacity(p.m() * p.n());
    for f in p.faces() {
        let o = p.face_circle(f)?.center;
        let [sw, se, ne, nw] = p.corners(f);
        values.push([
            oriented_angle(ne, o, nw)?,
            oriented_angle(nw, o, sw)?,
            oriented_angle(sw, o, se)?,
            oriented_angle(se, o, ne)?,
        ]);
    }
    PhiField::new(p.m(), p.n(), p.s(), values)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct FaceAngles {
    #[serde(rename = "N")]
    n: f64,
    #[serde(rename = "W")]
    w: f64,
    #[serde(rename = "S")]
    s: f64,
    #[serde(rename = "E")]
    e: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PhiDoc {
    m: usize,
    n: usize,
    s: usize,
    phi: BTreeMap<String, FaceAngles>,
}

impl From<&PhiField> for PhiDoc {
    fn from(f: &PhiField) -> Self {
        let phi = f
            .faces()
            .map(|face| {
                let [n, w, s, e] = f.values[f.slot(face)];
                (face.label(), FaceAngles { n, w, s, e })
            })
            .collect();
        PhiDoc {
            m: f.m,
            n: f.n,
            s: f.s,
            phi,
        }
    }
}

impl TryFrom<PhiDoc> for PhiField {
    type Error = Error;
    fn try_from(doc: PhiDoc) -> Result<Self> {
        check_shape(doc.m, doc.n, doc.s)?;
        let mut values = vec![[f64::NAN; 4]; doc.m * doc.n];
        let mut seen = vec![false; doc.m * doc.n];
        for (label, a) in &doc.phi {
            let f = FaceId::parse_label(label)?;
            if f.fx < 0 || f.fy < 0 || f.fx >= doc.m as i64 || f.fy >= doc.n as i64 {
                return Err(Error::Parse(format!(
                    "face {label} outside the fundamental domain"
                )));
            }
            let k = f.fy as usize * doc.m + f.fx as usize;
            values[k] = [a.n, a.w, a.s, a.e];
            seen[k] = true;
        }
        if let Some(k) = seen.iter().position(|&b| !b) {
            let f = FaceId::new((k % doc.m) as i64, (k / doc.m) as i64);
            return Err(Error::Parse(format!(
                "missing angles for face {}",
                f.label()
            )));
        }
        PhiField::new(doc.m, doc.n, doc.s, values)
    }
}
