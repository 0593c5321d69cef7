//! Miquel mutations and the orbits they generate.
//!
//! Time convention: `S_t = μ_B(S_{t−1})` for odd `t` and `S_t = μ_W(S_{t−1})`
//! for even `t`, for every integer `t`. Going backwards therefore applies
//! `μ_W` to reach `S_{−1}` from `S_0`, then `μ_B`, and so on.

use crate::error::{Error, Result};
use crate::geom::{other_intersection, Point};
use crate::pattern::{Color, FaceId, TorusPattern};
use crate::tol;

/// The two faces of the opposite color through vertex `(x, y)`:
/// `(x−1, y)` and `(x, y−1)` when `(x, y)` itself has color `color`,
/// otherwise the diagonal pair `(x, y)` and `(x−1, y−1)`.
fn fixed_faces(x: i64, y: i64, color: Color) -> (FaceId, FaceId) {
    let f = FaceId::new(x, y);
    if f.color() == color {
        (FaceId::new(x - 1, y), FaceId::new(x, y - 1))
    } else {
        (f, FaceId::new(x - 1, y - 1))
    }
}

fn mutated_vertex(p: &TorusPattern, x: i64, y: i64, color: Color) -> Result<Point> {
    let (f, g) = fixed_faces(x, y, color);
    let degenerate = |reason: String| Error::DegenerateMutation { time: None, reason };
    let cf = p
        .circumcircle(f)
        .map_err(|e| degenerate(format!("face {}: {e}", p.reduce_face(f).label())))?;
    let cg = p
        .circumcircle(g)
        .map_err(|e| degenerate(format!("face {}: {e}", p.reduce_face(g).label())))?;
    other_intersection(&cf, &cg, p.vertex(x, y)).map_err(|e| {
        degenerate(format!(
            "vertex ({x},{y}) between {} and {}: {e}",
            p.reduce_face(f).label(),
            p.reduce_face(g).label()
        ))
    })
}

/// Mutate every circle of `color`: each vertex is reflected across the line
/// joining the centers of its two circles of the other color.
///
/// All reads happen before any write. Vertices on that line (tangent
/// circles) stay put. The result is validated with [`tol::EVOLUTION`].
pub fn mutate(p: &TorusPattern, color: Color) -> Result<TorusPattern> {
    let (m, n) = (p.m(), p.n());
    let mut out = p.clone();
    for y in 0..n {
        for x in 0..m {
            let q = mutated_vertex(p, x as i64, y as i64, color)?;
            out.set_stored(x, y, q);
        }
    }
    let report = out.validate_with(tol::EVOLUTION);
    if !report.pass {
        return Err(Error::DegenerateMutation {
            time: None,
            reason: report.failures.join("; "),
        });
    }
    Ok(out)
}

/// Largest disagreement between a mutated vertex computed directly at an
/// unfolded copy `(x + m, y)` or `(x + s, y + n)` and the translate of the
/// stored result, relative to the pattern diameter.
pub fn unfolding_defect(p: &TorusPattern, color: Color) -> Result<f64> {
    let (m, n, s) = (p.m() as i64, p.n() as i64, p.s() as i64);
    let diam = p.diameter();
    let mut worst: f64 = 0.0;
    for y in 0..n {
        for x in 0..m {
            let base = mutated_vertex(p, x, y, color)?;
            let across_u = mutated_vertex(p, x + m, y, color)?;
            let across_v = mutated_vertex(p, x + s, y + n, color)?;
            worst = worst
                .max(across_u.dist(base + p.u()) / diam)
                .max(across_v.dist(base + p.v()) / diam);
        }
    }
    Ok(worst)
}

/// Color mutated to go from `S_{t−1}` to `S_t`.
pub fn color_at(t: i64) -> Color {
    if t.rem_euclid(2) == 1 {
        Color::Black
    } else {
        Color::White
    }
}

/// States `S_t` for `t` in `t_min..=t_max`.
#[derive(Debug, Clone)]
pub struct Orbit {
    t_min: i64,
    states: Vec<TorusPattern>,
}

impl Orbit {
    pub fn t_min(&self) -> i64 {
        self.t_min
    }

    pub fn t_max(&self) -> i64 {
        self.t_min + self.states.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, t: i64) -> Option<&TorusPattern> {
        usize::try_from(t - self.t_min)
            .ok()
            .and_then(|k| self.states.get(k))
    }

    pub fn states(&self) -> &[TorusPattern] {
        &self.states
    }

    /// `(t, S_t)` pairs in increasing time.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &TorusPattern)> {
        self.states
            .iter()
            .enumerate()
            .map(move |(k, s)| (self.t_min + k as i64, s))
    }
}

fn tag(e: Error, t: i64) -> Error {
    match e {
        Error::DegenerateMutation { reason, .. } => Error::DegenerateMutation {
            time: Some(t),
            reason,
        },
        other => Error::DegenerateMutation {
            time: Some(t),
            reason: other.to_string(),
        },
    }
}

/// Run the dynamics from `S_0 = p` over the window `t_min..=t_max`.
///
/// The window need not contain `0`; states between `0` and the window are
/// computed and dropped.
pub fn evolve(p: &TorusPattern, t_min: i64, t_max: i64) -> Result<Orbit> {
    if t_min > t_max {
        return Err(Error::InvalidParameters(format!(
            "empty time window {t_min}..={t_max}"
        )));
    }
    let mut forward = Vec::new();
    let mut cur = p.clone();
    for t in 1..=t_max {
        cur = mutate(&cur, color_at(t)).map_err(|e| tag(e, t))?;
        if t >= t_min {
            forward.push(cur.clone());
        }
    }
    let mut backward = Vec::new();
    let mut cur = p.clone();
    for t in (t_min..0).rev() {
        // S_t = μ_{c(t+1)}(S_{t+1}) since each mutation is an involution
        cur = mutate(&cur, color_at(t + 1)).map_err(|e| tag(e, t))?;
        if t <= t_max {
            backward.push(cur.clone());
        }
    }
    backward.reverse();
    let mut states = backward;
    if t_min <= 0 && 0 <= t_max {
        states.push(p.clone());
    }
    states.extend(forward);
    Ok(Orbit { t_min, states })
}

/// An orbit translated so that `S̃_t(0,0) = S_0(0,0)` for all `t`.
#[derive(Debug, Clone)]
pub struct NormalizedOrbit {
    t_min: i64,
    states: Vec<TorusPattern>,
}

impl NormalizedOrbit {
    pub fn t_min(&self) -> i64 {
        self.t_min
    }

    pub fn state(&self, t: i64) -> Option<&TorusPattern> {
        usize::try_from(t - self.t_min)
            .ok()
            .and_then(|k| self.states.get(k))
    }

    pub fn states(&self) -> &[TorusPattern] {
        &self.states
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &TorusPattern)> {
        self.states
            .iter()
            .enumerate()
            .map(move |(k, s)| (self.t_min + k as i64, s))
    }
}

/// Translate every state so that its vertex `(0,0)` sits where it does at
/// time `0` (or at the first time of the window if `0` is outside it).
pub fn normalize(o: &Orbit) -> NormalizedOrbit {
    let anchor = o.state(0).unwrap_or(&o.states[0]).stored(0, 0);
    let states = o
        .states
        .iter()
        .map(|s| {
            let mut q = s.translate(anchor - s.stored(0, 0));
            q.set_stored(0, 0, anchor);
            q
        })
        .collect();
    NormalizedOrbit {
        t_min: o.t_min,
        states,
    }
}

/// `S_t(tracked) − S_t(reference)` for each state, indices unfolded.
pub fn relative_motion(o: &Orbit, tracked: (i64, i64), reference: (i64, i64)) -> Vec<Point> {
    o.states
        .iter()
        .map(|s| s.vertex(tracked.0, tracked.1) - s.vertex(reference.0, reference.1))
        .collect()
}
