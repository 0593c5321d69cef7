//! Consistency conditions cutting out the image of `extract_phi`.
//!
//! Congruences are scored by the distance to the nearest admissible lattice
//! value, sine-product identities by the magnitude of the log ratio of the
//! two sides, and non-degeneracy inequalities by their margin.

use std::f64::consts::TAU;
use std::fmt;

use serde::Serialize;

use super::{Dir, PhiField};
use crate::pattern::FaceId;
use crate::tol::{self, lattice_distance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// Must be small.
    Identity,
    /// Margin that must stay away from zero.
    Inequality,
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition {
    pub label: &'static str,
    pub kind: ConditionKind,
    /// Worst residual (identities) or smallest margin (inequalities).
    pub worst: f64,
    /// Where the worst value occurs.
    pub location: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub tolerance: f64,
    pub pass: bool,
    pub conditions: Vec<Condition>,
}

impl ConditionReport {
    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, label: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.label == label)
    }

    /// Largest residual over the identity conditions.
    pub fn max_residual(&self) -> f64 {
        self.conditions
            .iter()
            .filter(|c| c.kind == ConditionKind::Identity)
            .map(|c| c.worst)
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            writeln!(
                f,
                "{:<24} {:>4}  {:.3e}  {}",
                c.label,
                if c.pass { "ok" } else { "FAIL" },
                c.worst,
                c.location
            )?;
        }
        Ok(())
    }
}

struct Tracker {
    label: &'static str,
    kind: ConditionKind,
    worst: f64,
    location: String,
}

impl Tracker {
    fn identity(label: &'static str) -> Self {
        Tracker {
            label,
            kind: ConditionKind::Identity,
            worst: 0.0,
            location: String::new(),
        }
    }

    fn inequality(label: &'static str) -> Self {
        Tracker {
            label,
            kind: ConditionKind::Inequality,
            worst: f64::INFINITY,
            location: String::new(),
        }
    }

    fn record(&mut self, value: f64, location: impl FnOnce() -> String) {
        let worse = match self.kind {
            ConditionKind::Identity => !(value <= self.worst),
            ConditionKind::Inequality => !(value >= self.worst),
        };
        if worse {
            self.worst = value;
            self.location = location();
        }
    }

    fn finish(self, tolerance: f64) -> Condition {
        let pass = match self.kind {
            ConditionKind::Identity => self.worst < tolerance,
            ConditionKind::Inequality => self.worst > tol::ANGLE,
        };
        Condition {
            label: self.label,
            kind: self.kind,
            worst: self.worst,
            location: self.location,
            pass,
        }
    }
}

fn log_half_sin(phi: f64) -> f64 {
    let s = (0.5 * phi).sin();
    if s > 0.0 {
        s.ln()
    } else {
        f64::NAN
    }
}

/// `|Σ log sin(a/2) − Σ log sin(b/2)|`, infinite when a sine is not positive.
fn product_residual(lhs: impl Iterator<Item = f64>, rhs: impl Iterator<Item = f64>) -> f64 {
    let r = (lhs.map(log_half_sin).sum::<f64>() - rhs.map(log_half_sin).sum::<f64>()).abs();
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

/// Evaluate every defining condition of the coordinate space for the
/// field's `(m, n, s)`, switching to the shifted vertical conditions when
/// `s ≠ 0`.
pub fn check_conditions(f: &PhiField, tolerance: f64) -> ConditionReport {
    let (m, n, s) = f.shape();
    let (mi, ni, si) = (m as i64, n as i64, s as i64);
    let g = |fx: i64, fy: i64, d: Dir| f.get(FaceId::new(fx, fy), d);

    let mut range = Tracker::inequality("angle_range");
    let mut diag_nw = Tracker::inequality("diagonal_nw");
    let mut diag_ne = Tracker::inequality("diagonal_ne");
    let mut face = Tracker::identity("face_flatness");
    for face_id in f.faces() {
        let here = || face_id.label();
        for d in Dir::ALL {
            let v = f.get(face_id, d);
            let margin = if v.is_finite() {
                v.min(TAU - v)
            } else {
                f64::NEG_INFINITY
            };
            range.record(margin, || format!("{} {d}", face_id.label()));
        }
        let [pn, pw, ps, pe] = [Dir::N, Dir::W, Dir::S, Dir::E].map(|d| f.get(face_id, d));
        diag_nw.record(lattice_distance(pn + pw, TAU), here);
        diag_ne.record(lattice_distance(pn + pe, TAU), here);
        face.record(lattice_distance(pn + pw + ps + pe, TAU), here);
    }

    // the four faces around vertex (x, y) and the triangles they contribute
    let mut vertex_flat = Tracker::identity("vertex_flatness");
    let mut vertex_mono = Tracker::identity("vertex_monodromy");
    for y in 0..ni {
        for x in 0..mi {
            let black = [
                g(x, y, Dir::W),
                g(x - 1, y, Dir::S),
                g(x - 1, y - 1, Dir::E),
                g(x, y - 1, Dir::N),
            ];
            let white = [
                g(x, y, Dir::S),
                g(x - 1, y, Dir::E),
                g(x - 1, y - 1, Dir::N),
                g(x, y - 1, Dir::W),
            ];
            let at = || format!("vertex ({x},{y})");
            let total: f64 = black.iter().chain(&white).sum();
            vertex_flat.record(lattice_distance(total, 2.0 * TAU), at);
            vertex_mono.record(product_residual(black.into_iter(), white.into_iter()), at);
        }
    }

    let mut vertical_mono = Tracker::identity("vertical_monodromy");
    let mut vertical_par = Tracker::identity("vertical_parallelism");
    for fx in 0..mi {
        let at = || format!("column {}", fx as f64 + 0.5);
        // climb the column, then cross the top row over the s-shift
        let south = (0..ni)
            .map(|fy| g(fx, fy, Dir::S))
            .chain((fx + 1..=fx + si).map(|i| g(i, ni - 1, Dir::W)));
        let north = (-1..ni - 1)
            .map(|fy| g(fx, fy, Dir::N))
            .chain((fx..fx + si).map(|i| g(i, ni - 1, Dir::E)));
        vertical_mono.record(product_residual(south, north), at);
        let west: f64 = (-1..ni - 1).map(|fy| g(fx, fy, Dir::W)).sum::<f64>()
            + (fx + 1..=fx + si)
                .map(|i| g(i, ni - 1, Dir::N))
                .sum::<f64>();
        let east: f64 = (0..ni).map(|fy| g(fx, fy, Dir::E)).sum::<f64>()
            + (fx..fx + si).map(|i| g(i, ni - 1, Dir::S)).sum::<f64>();
        vertical_par.record(lattice_distance(west - east, TAU), at);
    }

    let mut horizontal_mono = Tracker::identity("horizontal_monodromy");
    let mut horizontal_par = Tracker::identity("horizontal_parallelism");
    for fy in 0..ni {
        let at = || format!("row {}", fy as f64 + 0.5);
        let west = (0..mi).map(|fx| g(fx, fy, Dir::W));
        let east = (0..mi).map(|fx| g(fx, fy, Dir::E));
        horizontal_mono.record(product_residual(west, east), at);
        let north: f64 = (0..mi).map(|fx| g(fx, fy, Dir::N)).sum();
        let south: f64 = (0..mi).map(|fx| g(fx, fy, Dir::S)).sum();
        horizontal_par.record(lattice_distance(north - south, TAU), at);
    }

    // periodicity is built into the storage
    let mut periodic = Tracker::identity("biperiodicity");
    periodic.record(0.0, String::new);

    let conditions: Vec<Condition> = [
        periodic,
        range,
        diag_nw,
        diag_ne,
        face,
        vertex_flat,
        vertex_mono,
        vertical_mono,
        horizontal_mono,
        vertical_par,
        horizontal_par,
    ]
    .into_iter()
    .map(|t| t.finish(tolerance))
    .collect();
    ConditionReport {
        tolerance,
        pass: conditions.iter().all(|c| c.pass),
        conditions,
    }
}
