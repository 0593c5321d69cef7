//! Quantities conserved (or sign-flipped) by the dynamics, and isoradial
//! patterns.
//!
//! Dual vertices are faces. The dual edge between horizontally adjacent
//! faces `f` and `f + (1,0)` carries `θ = ∠O_{f+(1,0)} · S(fx+1, fy) · O_f`;
//! between `f` and `f + (0,1)` it carries `θ = ∠O_f · S(fx, fy+1) · O_{f+(0,1)}`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::coords::{extract_phi, Dir, PhiField};
use crate::error::{Error, Result};
use crate::geom::oriented_angle;
use crate::pattern::{Color, FaceId, TorusPattern};
use crate::tol::{angle_distance, lattice_distance, wrap_angle};

/// Undirected edge of the dual graph, keyed by its lower/left face reduced
/// to the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualEdge {
    pub from: FaceId,
    /// `true` for the edge to `from + (1,0)`, `false` for `from + (0,1)`.
    pub horizontal: bool,
}

impl DualEdge {
    pub fn to(self) -> FaceId {
        if self.horizontal {
            self.from.offset(1, 0)
        } else {
            self.from.offset(0, 1)
        }
    }

    /// Edge crossed by a unit step from `face` in direction `d`.
    pub fn between(face: FaceId, d: Dir) -> DualEdge {
        match d {
            Dir::E => DualEdge {
                from: face,
                horizontal: true,
            },
            Dir::W => DualEdge {
                from: face.offset(-1, 0),
                horizontal: true,
            },
            Dir::N => DualEdge {
                from: face,
                horizontal: false,
            },
            Dir::S => DualEdge {
                from: face.offset(0, -1),
                horizontal: false,
            },
        }
    }

    /// `+1` for vertical steps from black to white and horizontal steps
    /// from white to black, `−1` otherwise.
    pub fn sign(face: FaceId, d: Dir) -> f64 {
        let vertical = matches!(d, Dir::N | Dir::S);
        let from_black = face.color() == Color::Black;
        if vertical == from_black {
            1.0
        } else {
            -1.0
        }
    }
}

/// Exterior intersection angle on one dual edge, measured geometrically.
pub fn theta(p: &TorusPattern, e: DualEdge) -> Result<f64> {
    let a = p.circumcircle(e.from)?.center;
    let b = p.circumcircle(e.to())?.center;
    let (fx, fy) = (e.from.fx, e.from.fy);
    if e.horizontal {
        oriented_angle(b, p.vertex(fx + 1, fy), a)
    } else {
        oriented_angle(a, p.vertex(fx, fy + 1), b)
    }
}

/// The same angle from the φ field: `π − ½(φ + φ')` over the shared edge.
pub fn theta_from_phi(f: &PhiField, e: DualEdge) -> f64 {
    let (near, far) = if e.horizontal {
        (Dir::E, Dir::W)
    } else {
        (Dir::N, Dir::S)
    };
    wrap_angle(PI - 0.5 * (f.get(e.from, near) + f.get(e.to(), far)))
}

/// θ on the `2mn` dual edges of the fundamental domain.
pub fn theta_map(p: &TorusPattern) -> Result<Vec<(DualEdge, f64)>> {
    let mut out = Vec::with_capacity(2 * p.m() * p.n());
    for f in p.faces() {
        for horizontal in [true, false] {
            let e = DualEdge {
                from: f,
                horizontal,
            };
            out.push((e, theta(p, e)?));
        }
    }
    Ok(out)
}

/// Worst distance to `2πℤ` of the four θ around a primal vertex.
pub fn theta_vertex_residual(p: &TorusPattern) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for f in p.faces() {
        // vertex (x, y) is the lower-left corner of f
        let (x, y) = (f.fx, f.fy);
        let edges = [
            DualEdge {
                from: FaceId::new(x - 1, y),
                horizontal: true,
            },
            DualEdge {
                from: FaceId::new(x - 1, y - 1),
                horizontal: true,
            },
            DualEdge {
                from: FaceId::new(x - 1, y - 1),
                horizontal: false,
            },
            DualEdge {
                from: FaceId::new(x, y - 1),
                horizontal: false,
            },
        ];
        let mut sum = 0.0;
        for e in edges {
            sum += theta(p, e)?;
        }
        worst = worst.max(lattice_distance(sum, TAU));
    }
    Ok(worst)
}

/// Closed walk in the dual graph: a start face and unit steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualLoop {
    pub start: FaceId,
    pub steps: Vec<Dir>,
}

impl DualLoop {
    pub fn new(start: FaceId, steps: Vec<Dir>) -> Self {
        DualLoop { start, steps }
    }

    /// Face reached after the last step (not reduced).
    pub fn end(&self) -> FaceId {
        self.steps.iter().fold(self.start, |f, d| {
            let (dx, dy) = d.offset();
            f.offset(dx, dy)
        })
    }

    /// Straight row `E^m` from face `(0,0)`.
    pub fn horizontal(p: &TorusPattern) -> Self {
        DualLoop::new(FaceId::new(0, 0), vec![Dir::E; p.m()])
    }

    /// Column `N^n` from face `(0,0)`, closed by `E^s`.
    pub fn vertical(p: &TorusPattern) -> Self {
        let mut steps = vec![Dir::N; p.n()];
        steps.extend(std::iter::repeat_n(Dir::E, p.s()));
        DualLoop::new(FaceId::new(0, 0), steps)
    }
}

/// Signed θ sum along a closed dual loop, reduced to `[0, 2π)`.
pub fn gamma(p: &TorusPattern, l: &DualLoop) -> Result<f64> {
    if p.reduce_face(l.end()) != p.reduce_face(l.start) {
        return Err(Error::InvalidLoop(format!(
            "loop from {} ends at {}",
            l.start.label(),
            p.reduce_face(l.end()).label()
        )));
    }
    let mut sum = 0.0;
    let mut face = l.start;
    for &d in &l.steps {
        sum += DualEdge::sign(face, d) * theta(p, DualEdge::between(face, d))?;
        let (dx, dy) = d.offset();
        face = face.offset(dx, dy);
    }
    Ok(wrap_angle(sum))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaValue {
    pub horizontal: f64,
    pub vertical: f64,
}

impl GammaValue {
    /// Componentwise distance to `−other` modulo `2π`.
    pub fn negation_defect(&self, other: &GammaValue) -> f64 {
        angle_distance(self.horizontal, -other.horizontal)
            .max(angle_distance(self.vertical, -other.vertical))
    }

    pub fn distance(&self, other: &GammaValue) -> f64 {
        angle_distance(self.horizontal, other.horizontal)
            .max(angle_distance(self.vertical, other.vertical))
    }
}

/// γ on the canonical horizontal and vertical generators.
pub fn gamma_generators(p: &TorusPattern) -> Result<GammaValue> {
    Ok(GammaValue {
        horizontal: gamma(p, &DualLoop::horizontal(p))?,
        vertical: gamma(p, &DualLoop::vertical(p))?,
    })
}

/// Real and imaginary parts of `v / u` as complex numbers.
pub fn monodromy_ratio(p: &TorusPattern) -> Result<(f64, f64)> {
    let (u, v) = (p.u(), p.v());
    let d = u.norm_sq();
    if !(d > 0.0) {
        return Err(Error::NonGeneric("monodromy u vanishes".into()));
    }
    Ok((u.dot(v) / d, u.cross(v) / d))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `lcm(m, mn / gcd(m, s))`, the return time of isoradial fields.
pub fn isoradial_period(m: usize, n: usize, s: usize) -> usize {
    let second = m * n / gcd(m, s);
    m / gcd(m, second) * second
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoradialReport {
    pub is_isoradial: bool,
    /// Largest relative deviation of a circumradius from the mean.
    pub radius_spread: f64,
    /// Largest violation of `φE = φW'` and `φN = φS'` across shared edges.
    pub phi_defect: f64,
    /// Whether the radius test and the angle test agree.
    pub consistent: bool,
    pub period: usize,
}

pub fn radius_spread(p: &TorusPattern) -> Result<f64> {
    let mut radii = Vec::with_capacity(p.m() * p.n());
    for f in p.faces() {
        radii.push(p.circumcircle(f)?.radius);
    }
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    Ok(radii
        .iter()
        .map(|r| (r / mean - 1.0).abs())
        .fold(0.0, f64::max))
}

pub fn isoradial_check(p: &TorusPattern) -> Result<IsoradialReport> {
    const ISORADIAL: f64 = 1e-9;
    let spread = radius_spread(p)?;
    let phi = extract_phi(p)?;
    let mut defect: f64 = 0.0;
    for f in phi.faces() {
        defect = defect
            .max(angle_distance(
                phi.get(f, Dir::E),
                phi.get(f.offset(1, 0), Dir::W),
            ))
            .max(angle_distance(
                phi.get(f, Dir::N),
                phi.get(f.offset(0, 1), Dir::S),
            ));
    }
    let by_radius = spread < ISORADIAL;
    let by_angle = defect < ISORADIAL;
    Ok(IsoradialReport {
        is_isoradial: by_radius && by_angle,
        radius_spread: spread,
        phi_defect: defect,
        consistent: by_radius == by_angle,
        period: isoradial_period(p.m(), p.n(), p.s()),
    })
}

/// For `n = 1` and `s ∈ {1, m−1}` every pattern is isoradial; returns the
/// outcome of the radius test at relative tolerance `1e−8`.
pub fn m_by_1_isoradiality(p: &TorusPattern) -> Result<bool> {
    let (m, n, s) = p.shape();
    if n != 1 || !(s == 1 || s + 1 == m) {
        return Err(Error::InvalidParameters(format!(
            "expected n = 1 and s ∈ {{1, m−1}}, got (m,n,s) = ({m},{n},{s})"
        )));
    }
    Ok(radius_spread(p)? < 1e-8)
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub gamma: GammaValue,
    pub ratio: (f64, f64),
    pub isoradial: bool,
    pub period: usize,
    pub theta_vertex_residual: f64,
    /// Largest gap between geometric θ and its φ expression.
    pub theta_phi_deviation: f64,
}

impl InvariantReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn invariant_report(p: &TorusPattern) -> Result<InvariantReport> {
    let iso = isoradial_check(p)?;
    Ok(InvariantReport {
        gamma: gamma_generators(p)?,
        ratio: monodromy_ratio(p)?,
        isoradial: iso.is_isoradial,
        period: iso.period,
        theta_vertex_residual: theta_vertex_residual(p)?,
        theta_phi_deviation: theta_phi_deviation(p)?,
    })
}

/// Worst agreement between the geometric θ and the φ formula.
pub fn theta_phi_deviation(p: &TorusPattern) -> Result<f64> {
    let phi = extract_phi(p)?;
    let mut worst: f64 = 0.0;
    for (e, t) in theta_map(p)? {
        worst = worst.max(angle_distance(t, theta_from_phi(&phi, e)));
    }
    Ok(worst)
}
