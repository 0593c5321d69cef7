//! Biperiodic square-grid circle patterns.
//!
//! A pattern stores the images of the `m × n` fundamental domain of `ℤ²`
//! together with two monodromy vectors: `u` for the period `(m, 0)` and `v`
//! for the period `(s, n)`. Every other vertex is obtained by unfolding.
//! Faces and circumcircles are recomputed on demand and never cached.

mod forge;

pub use forge::{forge_pattern, perturbed_seed, ForgeOptions};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{concyclicity_residual, Circle, Point};
use crate::tol;

/// Checkerboard color of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Black => f.write_str("black"),
            Color::White => f.write_str("white"),
        }
    }
}

/// A face of `ℤ²`, named by its lower-left corner `(fx, fy)`.
///
/// The face center is `(fx + ½, fy + ½)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId {
    pub fx: i64,
    pub fy: i64,
}

impl FaceId {
    pub const fn new(fx: i64, fy: i64) -> Self {
        FaceId { fx, fy }
    }

    /// Build from half-integer center coordinates.
    pub fn from_center(i: f64, j: f64) -> Result<Self> {
        let fx = i - 0.5;
        let fy = j - 0.5;
        if fx.fract() != 0.0 || fy.fract() != 0.0 {
            return Err(Error::Parse(format!(
                "face center ({i}, {j}) is not half-integer"
            )));
        }
        Ok(FaceId::new(fx as i64, fy as i64))
    }

    pub fn center(self) -> (f64, f64) {
        (self.fx as f64 + 0.5, self.fy as f64 + 0.5)
    }

    pub fn color(self) -> Color {
        if (self.fy - self.fx).rem_euclid(2) == 0 {
            Color::Black
        } else {
            Color::White
        }
    }

    pub fn offset(self, dx: i64, dy: i64) -> FaceId {
        FaceId::new(self.fx + dx, self.fy + dy)
    }

    /// Corners in the order SW, SE, NE, NW.
    pub fn corners(self) -> [(i64, i64); 4] {
        let (x, y) = (self.fx, self.fy);
        [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
    }

    /// `"i,j"` label with half-integer coordinates, e.g. `"0.5,1.5"`.
    pub fn label(self) -> String {
        let (i, j) = self.center();
        format!("{i},{j}")
    }

    pub fn parse_label(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad face label {s:?}")))?;
        let i: f64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad face label {s:?}")))?;
        let j: f64 = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad face label {s:?}")))?;
        FaceId::from_center(i, j)
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({})", self.label())
    }
}

/// Check `m` even and positive, `n` positive, `0 ≤ s < m`, `s ≡ n (mod 2)`.
pub fn check_shape(m: usize, n: usize, s: usize) -> Result<()> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!(
            "m = {m} must be positive and even"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameters("n must be positive".into()));
    }
    if s >= m {
        return Err(Error::InvalidParameters(format!(
            "shift s = {s} must satisfy s < m = {m}"
        )));
    }
    if !(s + n).is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!(
            "shift s = {s} must have the parity of n = {n}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusPattern {
    m: usize,
    n: usize,
    s: usize,
    vertices: Vec<Point>,
    u: Point,
    v: Point,
}

impl TorusPattern {
    /// `vertices` are row-major: `y` outer, `x` inner.
    pub fn new(
        m: usize,
        n: usize,
        s: usize,
        vertices: Vec<Point>,
        u: Point,
        v: Point,
    ) -> Result<Self> {
        check_shape(m, n, s)?;
        if vertices.len() != m * n {
            return Err(Error::InvalidParameters(format!(
                "expected {} vertices, got {}",
                m * n,
                vertices.len()
            )));
        }
        if !u.is_finite() || !v.is_finite() || vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameters("non-finite coordinates".into()));
        }
        Ok(TorusPattern {
            m,
            n,
            s,
            vertices,
            u,
            v,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.s)
    }
    pub fn u(&self) -> Point {
        self.u
    }
    pub fn v(&self) -> Point {
        self.v
    }
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Stored vertex of the fundamental domain.
    pub fn stored(&self, x: usize, y: usize) -> Point {
        self.vertices[y * self.m + x]
    }

    pub(crate) fn set_stored(&mut self, x: usize, y: usize, p: Point) {
        self.vertices[y * self.m + x] = p;
    }

    /// Reduce `(x, y)` to the fundamental domain: returns `(x₀, y₀, a, b)` with
    /// `(x, y) = (x₀, y₀) + a·(m, 0) + b·(s, n)`.
    pub fn reduce(&self, x: i64, y: i64) -> (usize, usize, i64, i64) {
        let (m, n, s) = (self.m as i64, self.n as i64, self.s as i64);
        let b = y.div_euclid(n);
        let y0 = y - b * n;
        let x1 = x - b * s;
        let a = x1.div_euclid(m);
        let x0 = x1 - a * m;
        (x0 as usize, y0 as usize, a, b)
    }

    /// Image of an arbitrary lattice point.
    pub fn vertex(&self, x: i64, y: i64) -> Point {
        let (x0, y0, a, b) = self.reduce(x, y);
        self.stored(x0, y0) + self.u * a as f64 + self.v * b as f64
    }

    /// Canonical representative of a face in the fundamental domain.
    pub fn reduce_face(&self, f: FaceId) -> FaceId {
        let (x0, y0, _, _) = self.reduce(f.fx, f.fy);
        FaceId::new(x0 as i64, y0 as i64)
    }

    /// Faces of the fundamental domain, row-major.
    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.n as i64).flat_map(move |fy| (0..self.m as i64).map(move |fx| FaceId::new(fx, fy)))
    }

    /// Unfolded corner points in the order SW, SE, NE, NW.
    pub fn corners(&self, f: FaceId) -> [Point; 4] {
        f.corners().map(|(x, y)| self.vertex(x, y))
    }

    pub fn concyclicity(&self, f: FaceId) -> f64 {
        let c = self.corners(f);
        concyclicity_residual(c[0], c[1], c[2], c[3])
    }

    /// Least-squares circle through the four corners, without the
    /// concyclicity check.
    pub fn circumcircle(&self, f: FaceId) -> Result<Circle> {
        fit_circle(&self.corners(f))
    }

    /// Circumcircle of a face; fails when the corners are not concyclic.
    pub fn face_circle(&self, f: FaceId) -> Result<Circle> {
        let residual = self.concyclicity(f);
        if !(residual < tol::CONCYCLIC) {
            return Err(Error::InvalidPattern(format!(
                "face {} is not concyclic (residual {residual:.3e})",
                f.label()
            )));
        }
        self.circumcircle(f)
    }

    /// Diameter of the unfolded block `[0, m] × [0, n]`.
    pub fn diameter(&self) -> f64 {
        let mut pts = Vec::with_capacity((self.m + 1) * (self.n + 1));
        for y in 0..=self.n as i64 {
            for x in 0..=self.m as i64 {
                pts.push(self.vertex(x, y));
            }
        }
        let mut d: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                d = d.max(p.dist(*q));
            }
        }
        d
    }

    /// Apply a map to every vertex. Monodromies are re-derived from the
    /// images of the unfolded period points, which is exact for affine maps.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> TorusPattern {
        let vertices = self.vertices.iter().map(|&p| f(p)).collect();
        let o = f(self.stored(0, 0));
        let u = f(self.stored(0, 0) + self.u) - o;
        let v = f(self.stored(0, 0) + self.v) - o;
        TorusPattern {
            vertices,
            u,
            v,
            ..*self
        }
    }

    pub fn translate(&self, by: Point) -> TorusPattern {
        TorusPattern {
            vertices: self.vertices.iter().map(|&p| p + by).collect(),
            ..self.clone()
        }
    }

    /// Largest vertex displacement against another pattern of the same shape.
    pub fn max_displacement(&self, other: &TorusPattern) -> f64 {
        self.vertices
            .iter()
            .zip(&other.vertices)
            .map(|(a, b)| a.dist(*b))
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(tol::CONCYCLIC)
    }

    pub fn validate_with(&self, tolerance: f64) -> ValidationReport {
        validate(self, tolerance)
    }

    pub fn to_json(&self) -> String {
        let doc = PatternDoc::from(self);
        serde_json::to_string_pretty(&doc).expect("pattern serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PatternDoc = serde_json::from_str(s)?;
        doc.try_into()
    }
}

/// Algebraic least-squares circle, fitted in coordinates centered at the
/// corners' centroid.
pub(crate) fn fit_circle(c: &[Point; 4]) -> Result<Circle> {
    let o = Point::new(
        c.iter().map(|p| p.x).sum::<f64>() / 4.0,
        c.iter().map(|p| p.y).sum::<f64>() / 4.0,
    );
    let mut a = nalgebra::Matrix4x3::zeros();
    let mut b = nalgebra::Vector4::zeros();
    for (i, p) in c.iter().enumerate() {
        let d = *p - o;
        a[(i, 0)] = d.x;
        a[(i, 1)] = d.y;
        a[(i, 2)] = 1.0;
        b[i] = -d.norm_sq();
    }
    let qr = a.qr();
    let r = qr.r();
    let diag = [r[(0, 0)], r[(1, 1)], r[(2, 2)]].map(f64::abs);
    if !(diag.iter().copied().fold(f64::INFINITY, f64::min)
        > 1e-12 * diag.iter().copied().fold(0.0, f64::max))
    {
        return Err(Error::InvalidPattern("face corners are collinear".into()));
    }
    let sol = r
        .solve_upper_triangular(&(qr.q().transpose() * b))
        .ok_or_else(|| Error::InvalidPattern("face corners are collinear".into()))?;
    let center = Point::new(-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = center.norm_sq() - sol[2];
    Circle::new(o + center, r2.max(0.0).sqrt())
}

/// Standard embedding `(x, y) ↦ (x, y)`.
pub fn standard_grid(m: usize, n: usize, s: usize) -> Result<TorusPattern> {
    check_shape(m, n, s)?;
    let vertices = (0..n)
        .flat_map(|y| (0..m).map(move |x| Point::new(x as f64, y as f64)))
        .collect();
    TorusPattern::new(
        m,
        n,
        s,
        vertices,
        Point::new(m as f64, 0.0),
        Point::new(s as f64, n as f64),
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternDoc {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub vertices: Vec<[f64; 2]>,
}

impl From<&TorusPattern> for PatternDoc {
    fn from(p: &TorusPattern) -> Self {
        PatternDoc {
            m: p.m,
            n: p.n,
            s: p.s,
            u: p.u.into(),
            v: p.v.into(),
            vertices: p.vertices.iter().map(|&q| q.into()).collect(),
        }
    }
}

impl TryFrom<PatternDoc> for TorusPattern {
    type Error = Error;
    fn try_from(d: PatternDoc) -> Result<Self> {
        TorusPattern::new(
            d.m,
            d.n,
            d.s,
            d.vertices.into_iter().map(Point::from).collect(),
            d.u.into(),
            d.v.into(),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceResidual {
    pub face: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CenterSeparation {
    pub from: String,
    pub to: String,
    /// Distance between the two circumcenters over the mean circumradius.
    pub relative_distance: f64,
    pub diagonal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub tolerance: f64,
    pub faces: Vec<FaceResidual>,
    pub separations: Vec<CenterSeparation>,
    pub worst_face: Option<FaceResidual>,
    pub closest_centers: Option<CenterSeparation>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn failing_faces(&self) -> Vec<String> {
        self.faces
            .iter()
            .filter(|f| !(f.residual < self.tolerance))
            .map(|f| f.face.clone())
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.faces.iter().map(|f| f.residual).fold(0.0, f64::max)
    }
}

fn validate(p: &TorusPattern, tolerance: f64) -> ValidationReport {
    let mut failures = Vec::new();
    let mut faces = Vec::new();
    let mut circles = std::collections::HashMap::new();
    let diam = p.diameter().max(f64::MIN_POSITIVE);
    for f in p.faces() {
        let residual = p.concyclicity(f);
        let corners = p.corners(f);
        let distinct =
            (0..4).all(|i| (i + 1..4).all(|j| corners[i].dist(corners[j]) > tol::GEOM * diam));
        if !distinct {
            failures.push(format!("face {} has coincident corners", f.label()));
        }
        if !(residual < tolerance) {
            failures.push(format!(
                "face {} not concyclic (residual {residual:.3e})",
                f.label()
            ));
        }
        match p.circumcircle(f) {
            Ok(c) => {
                circles.insert(f, c);
            }
            Err(_) => failures.push(format!("face {} has no circumcircle", f.label())),
        }
        faces.push(FaceResidual {
            face: f.label(),
            residual,
        });
    }

    let mut separations = Vec::new();
    for f in p.faces() {
        for (dx, dy, diagonal) in [(1, 0, false), (0, 1, false), (1, 1, true), (1, -1, true)] {
            let g = f.offset(dx, dy);
            let (Some(cf), Ok(cg)) = (circles.get(&f), p.circumcircle(g)) else {
                continue;
            };
            let mean_r = 0.5 * (cf.radius + cg.radius);
            let rel = cf.center.dist(cg.center) / mean_r;
            if !(rel > tol::GEOM) {
                failures.push(format!(
                    "circumcenters of {} and {} coincide",
                    f.label(),
                    p.reduce_face(g).label()
                ));
            }
            separations.push(CenterSeparation {
                from: f.label(),
                to: p.reduce_face(g).label(),
                relative_distance: rel,
                diagonal,
            });
        }
    }

    let worst_face = faces
        .iter()
        .max_by(|a, b| a.residual.total_cmp(&b.residual))
        .cloned();
    let closest_centers = separations
        .iter()
        .min_by(|a, b| a.relative_distance.total_cmp(&b.relative_distance))
        .cloned();
    ValidationReport {
        pass: failures.is_empty(),
        tolerance,
        faces,
        separations,
        worst_face,
        closest_centers,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_constraints() {
        assert!(check_shape(2, 2, 0).is_ok());
        assert!(check_shape(4, 1, 1).is_ok());
        assert!(matches!(
            check_shape(3, 2, 0),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            check_shape(4, 2, 1),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            check_shape(4, 2, 4),
            Err(Error::InvalidParameters(_))
        ));
        assert!(standard_grid(3, 2, 0).is_err());
    }

    #[test]
    fn face_colors() {
        assert_eq!(FaceId::new(0, 0).color(), Color::Black);
        assert_eq!(FaceId::new(1, 0).color(), Color::White);
        assert_eq!(FaceId::new(-1, 0).color(), Color::White);
        assert_eq!(FaceId::new(1, 1).color(), Color::Black);
        assert_eq!(FaceId::parse_label("0.5,1.5").unwrap(), FaceId::new(0, 1));
        assert_eq!(FaceId::new(-1, 2).label(), "-0.5,2.5");
    }

    #[test]
    fn unfold_standard_grid() {
        let g = standard_grid(2, 2, 0).unwrap();
        assert_eq!(g.vertex(5, 3), Point::new(5., 3.));
        assert_eq!(g.vertex(-3, -7), Point::new(-3., -7.));
        let g = standard_grid(4, 2, 2).unwrap();
        assert_eq!(g.vertex(1, 2), Point::new(1., 2.));
        assert_eq!(g.vertex(-5, 5), Point::new(-5., 5.));
        assert_eq!(g.stored(3, 1), g.vertex(3, 1));
    }

    #[test]
    fn standard_grid_faces() {
        let g = standard_grid(4, 2, 2).unwrap();
        for f in g.faces() {
            let c = g.face_circle(f).unwrap();
            let (i, j) = f.center();
            assert!(c.center.dist(Point::new(i, j)) < 1e-14);
            assert!((c.radius - 2f64.sqrt() / 2.0).abs() < 1e-14);
        }
        assert!(g.validate().pass);
    }

    #[test]
    fn moved_vertex_fails_on_its_faces() {
        let mut g = standard_grid(4, 2, 0).unwrap();
        g.set_stored(1, 1, Point::new(1.3, 1.0));
        let report = g.validate();
        assert!(!report.pass);
        let failing = report.failing_faces();
        assert!(failing.len() >= 2);
        for label in &failing {
            let f = FaceId::parse_label(label).unwrap();
            let touches = f
                .corners()
                .iter()
                .any(|&(x, y)| g.reduce(x, y).0 == 1 && g.reduce(x, y).1 == 1);
            assert!(touches, "{label} does not contain the moved vertex");
        }
        assert!(matches!(
            g.face_circle(FaceId::new(1, 1)),
            Err(Error::InvalidPattern(_))
        ));
    }

    #[test]
    fn coincident_centers_fail() {
        // Both faces of this 2x1 torus are inscribed in the unit circle.
        let h = |k: f64| {
            let t = k * std::f64::consts::FRAC_PI_3;
            Point::new(t.cos(), t.sin())
        };
        let p =
            TorusPattern::new(2, 1, 1, vec![h(4.), h(5.)], h(0.) - h(4.), h(1.) - h(5.)).unwrap();
        let report = p.validate();
        assert!(report.max_residual() < 1e-12);
        assert!(!report.pass);
        assert!(
            report.failures.iter().any(|f| f.contains("coincide")),
            "{:?}",
            report.failures
        );
    }

    #[test]
    fn json_round_trip() {
        let g = standard_grid(4, 2, 2).unwrap();
        let back = TorusPattern::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
        assert!(TorusPattern::from_json("{\"m\":3}").is_err());
    }
}
