//! Planar primitives: points, circles, lines and the predicates built on them.

use std::f64::consts::TAU;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{self, wrap_angle};

/// Relative tolerance for "this point lies on that circle".
pub const ON_CIRCLE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Quarter turn counterclockwise.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Point {
        Point::new(z.re, z.im)
    }

    /// Rotate about `center` by `angle` radians counterclockwise.
    pub fn rotate_about(self, center: Point, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        let d = self - center;
        center + Point::new(c * d.x - s * d.y, s * d.x + c * d.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point::new(a[0], a[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        p * self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::DegenerateGeometry(format!(
                "circle radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Circle { center, radius })
    }

    /// Circumcircle of three points.
    pub fn through(p: Point, q: Point, r: Point) -> Result<Self> {
        let center = circumcenter(p, q, r)?;
        let radius = (center.dist(p) + center.dist(q) + center.dist(r)) / 3.0;
        Circle::new(center, radius)
    }

    /// Relative distance of `p` to the circle.
    pub fn relative_offset(&self, p: Point) -> f64 {
        (self.center.dist(p) - self.radius).abs() / self.radius
    }

    pub fn contains(&self, p: Point, rel_tol: f64) -> bool {
        self.relative_offset(p) <= rel_tol
    }

    pub fn translate(&self, by: Point) -> Circle {
        Circle {
            center: self.center + by,
            radius: self.radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub a: Point,
    pub b: Point,
}

impl Line {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        let scale = a.norm().max(b.norm());
        if a.dist(b) <= tol::GEOM * scale || a == b || !a.is_finite() || !b.is_finite() {
            return Err(Error::DegenerateGeometry(
                "line through coincident points".into(),
            ));
        }
        Ok(Line { a, b })
    }

    pub fn direction(&self) -> Point {
        self.b - self.a
    }

    /// Signed distance from `p`, positive on the left of `a → b`.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let d = self.direction();
        d.cross(p - self.a) / d.norm()
    }

    /// Intersection point of two lines, `None` when (numerically) parallel.
    pub fn intersect(&self, other: &Line) -> Option<Point> {
        let d1 = self.direction();
        let d2 = other.direction();
        let den = d1.cross(d2);
        if den.abs() <= 1e-14 * d1.norm() * d2.norm() {
            return None;
        }
        let t = (other.a - self.a).cross(d2) / den;
        Some(self.a + d1 * t)
    }
}

/// Counterclockwise angle at `b` from the ray `b → a` to the ray `b → c`, in `[0, 2π)`.
pub fn oriented_angle(a: Point, b: Point, c: Point) -> Result<f64> {
    let ba = a - b;
    let bc = c - b;
    let (la, lc) = (ba.norm(), bc.norm());
    let scale = la.max(lc);
    if !(scale > 0.0) || la <= tol::GEOM * scale || lc <= tol::GEOM * scale {
        return Err(Error::DegenerateGeometry(
            "oriented angle with coincident points".into(),
        ));
    }
    Ok(wrap_angle(ba.cross(bc).atan2(ba.dot(bc))))
}

fn diameter_sq(pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            d = d.max((*p - *q).norm_sq());
        }
    }
    d
}

/// Twice the signed area of `pqr` is at most `GEOM · diam²`.
pub fn is_collinear(p: Point, q: Point, r: Point) -> bool {
    let area2 = (q - p).cross(r - p);
    area2.abs() <= tol::GEOM * diameter_sq(&[p, q, r])
}

pub fn circumcenter(p: Point, q: Point, r: Point) -> Result<Point> {
    let b = q - p;
    let c = r - p;
    let d = 2.0 * b.cross(c);
    if is_collinear(p, q, r) || d == 0.0 {
        return Err(Error::DegenerateGeometry(
            "circumcenter of collinear or coincident points".into(),
        ));
    }
    let (bb, cc) = (b.norm_sq(), c.norm_sq());
    let off = Point::new(c.y * bb - b.y * cc, b.x * cc - c.x * bb) * (1.0 / d);
    Ok(p + off)
}

pub fn reflect_across(p: Point, axis: &Line) -> Point {
    let d = axis.direction();
    let w = p - axis.a;
    let proj = axis.a + d * (w.dot(d) / d.norm_sq());
    proj * 2.0 - p
}

/// Exterior intersection angle `∠O₁ A O₂` at a common point `A` of two circles.
pub fn exterior_angle(c1: &Circle, c2: &Circle, at: Point) -> Result<f64> {
    let residual = c1.relative_offset(at).max(c2.relative_offset(at));
    if residual > ON_CIRCLE {
        return Err(Error::NotOnCircle { residual });
    }
    oriented_angle(c1.center, at, c2.center)
}

/// Second intersection point of two circles given the first one.
///
/// Tangent circles (the known point sits on the line of centers) return
/// the known point unchanged.
pub fn other_intersection(c1: &Circle, c2: &Circle, known: Point) -> Result<Point> {
    let sep = c1.center.dist(c2.center);
    let scale = c1.radius.max(c2.radius);
    if sep <= tol::GEOM * scale {
        return Err(Error::DegenerateGeometry(
            "circles with coincident centers".into(),
        ));
    }
    let axis = Line {
        a: c1.center,
        b: c2.center,
    };
    if axis.signed_distance(known).abs() <= tol::GEOM * scale {
        return Ok(known);
    }
    Ok(reflect_across(known, &axis))
}

/// Distance of `θ12 + θ34 − θ23 − θ41` to `2πℤ`.
pub fn miquel_residual(t12: f64, t23: f64, t34: f64, t41: f64) -> f64 {
    tol::lattice_distance(t12 + t34 - t23 - t41, TAU)
}

/// Whether four consecutive exterior angles admit the Miquel circles.
pub fn effective_miquel_check(t12: f64, t23: f64, t34: f64, t41: f64) -> bool {
    miquel_residual(t12, t23, t34, t41) <= tol::ANGLE
}

/// Scale-invariant distance of four points from being concyclic.
///
/// Each point in turn is held out and compared with the circumcircle of the
/// other three (relative to its radius); the maximum is returned. When the
/// other three are collinear the distance to their line, over the diameter
/// of the set, is used instead.
pub fn concyclicity_residual(p1: Point, p2: Point, p3: Point, p4: Point) -> f64 {
    let pts = [p1, p2, p3, p4];
    let diam = diameter_sq(&pts).sqrt();
    if diam == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for k in 0..4 {
        let others: Vec<Point> = (0..4).filter(|&i| i != k).map(|i| pts[i]).collect();
        let r = match Circle::through(others[0], others[1], others[2]) {
            Ok(c) => c.relative_offset(pts[k]),
            Err(_) => {
                // fall back to the line through the farthest pair
                let (mut a, mut b, mut best) = (others[0], others[1], -1.0);
                for i in 0..3 {
                    for j in i + 1..3 {
                        let d = others[i].dist(others[j]);
                        if d > best {
                            best = d;
                            a = others[i];
                            b = others[j];
                        }
                    }
                }
                if best <= 0.0 {
                    return f64::INFINITY;
                }
                Line { a, b }.signed_distance(pts[k]).abs() / diam
            }
        };
        worst = worst.max(r);
    }
    worst
}

/// Four circles `C₁ … C₄` where consecutive circles meet at `A_{i,i+1}`
/// and `B_{i,i+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiquelConfiguration {
    pub circles: [Circle; 4],
    /// `A₁₂, A₂₃, A₃₄, A₄₁`.
    pub a: [Point; 4],
    /// `B₁₂, B₂₃, B₃₄, B₄₁`.
    pub b: [Point; 4],
}

impl MiquelConfiguration {
    /// `Cᵢ` is the circle through `A_{i−1,i}`, `A_{i,i+1}` and `through[i]`;
    /// the `B` points are the second intersections.
    pub fn new(a: [Point; 4], through: [Point; 4]) -> Result<Self> {
        let mut circles = [Circle {
            center: Point::ORIGIN,
            radius: 1.0,
        }; 4];
        for i in 0..4 {
            circles[i] = Circle::through(a[(i + 3) % 4], a[i], through[i])?;
        }
        let mut b = [Point::ORIGIN; 4];
        for i in 0..4 {
            b[i] = other_intersection(&circles[i], &circles[(i + 1) % 4], a[i])?;
        }
        Ok(MiquelConfiguration { circles, a, b })
    }

    /// `[θ₁₂, θ₂₃, θ₃₄, θ₄₁]`, exterior angles taken at the `A` points.
    pub fn exterior_angles(&self) -> Result<[f64; 4]> {
        let t: Vec<f64> = (0..4)
            .map(|i| exterior_angle(&self.circles[i], &self.circles[(i + 1) % 4], self.a[i]))
            .collect::<Result<_>>()?;
        Ok([t[0], t[1], t[2], t[3]])
    }

    pub fn miquel_residual(&self) -> Result<f64> {
        let [t12, t23, t34, t41] = self.exterior_angles()?;
        Ok(miquel_residual(t12, t23, t34, t41))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn oriented_angle_examples() {
        let o = Point::ORIGIN;
        assert!((oriented_angle(p(1., 0.), o, p(0., 1.)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((oriented_angle(p(0., 1.), o, p(1., 0.)).unwrap() - 3. * FRAC_PI_2).abs() < 1e-15);
        assert!((oriented_angle(p(1., 0.), o, p(1., 1.)).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(matches!(
            oriented_angle(o, o, p(1., 0.)),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn circumcenter_examples() {
        let c = circumcenter(p(0., 0.), p(1., 0.), p(0., 1.)).unwrap();
        assert!(c.dist(p(0.5, 0.5)) < 1e-15);
        let c = circumcenter(p(0., 0.), p(2., 0.), p(1., 1.)).unwrap();
        assert!(c.dist(p(1., 0.)) < 1e-15);
        assert!(matches!(
            circumcenter(p(0., 0.), p(1., 0.), p(2., 0.)),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn reflection_examples() {
        let diag = Line::new(p(0., 0.), p(1., 1.)).unwrap();
        assert!(reflect_across(p(0., 1.), &diag).dist(p(1., 0.)) < 1e-15);
        assert!(reflect_across(p(3., 3.), &diag).dist(p(3., 3.)) < 1e-15);
        let yaxis = Line::new(p(0., 0.), p(0., 1.)).unwrap();
        assert!(reflect_across(p(2., 0.), &yaxis).dist(p(-2., 0.)) < 1e-15);
        assert!(Line::new(p(1., 1.), p(1., 1.)).is_err());
    }

    #[test]
    fn exterior_angle_examples() {
        let h = 3f64.sqrt() / 2.0;
        let c1 = Circle::new(p(0., 0.), 1.).unwrap();
        let c2 = Circle::new(p(1., 0.), 1.).unwrap();
        let a = exterior_angle(&c1, &c2, p(0.5, h)).unwrap();
        assert!((a - FRAC_PI_3).abs() < 1e-14, "{a}");

        let r = 2f64.sqrt() / 2.0;
        let g1 = Circle::new(p(0.5, 0.5), r).unwrap();
        let g2 = Circle::new(p(1.5, 0.5), r).unwrap();
        let a = exterior_angle(&g1, &g2, p(1., 1.)).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-14, "{a}");
        // at the lower common point the same pair is seen clockwise
        let a = exterior_angle(&g1, &g2, p(1., 0.)).unwrap();
        assert!((a - 3.0 * FRAC_PI_2).abs() < 1e-14, "{a}");

        let t2 = Circle::new(p(2., 0.), 1.).unwrap();
        let a = exterior_angle(&c1, &t2, p(1., 0.)).unwrap();
        assert!((a - PI).abs() < 1e-14);

        assert!(matches!(
            exterior_angle(&c1, &c2, p(5., 5.)),
            Err(Error::NotOnCircle { .. })
        ));
    }

    #[test]
    fn other_intersection_examples() {
        let h = 3f64.sqrt() / 2.0;
        let c1 = Circle::new(p(0., 0.), 1.).unwrap();
        let c2 = Circle::new(p(1., 0.), 1.).unwrap();
        let q = other_intersection(&c1, &c2, p(0.5, h)).unwrap();
        assert!(q.dist(p(0.5, -h)) < 1e-15);

        let t2 = Circle::new(p(2., 0.), 1.).unwrap();
        assert_eq!(other_intersection(&c1, &t2, p(1., 0.)).unwrap(), p(1., 0.));

        assert!(other_intersection(&c1, &c1, p(1., 0.)).is_err());
    }

    #[test]
    fn miquel_check_examples() {
        assert!(effective_miquel_check(
            FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2
        ));
        assert!(effective_miquel_check(
            FRAC_PI_3, FRAC_PI_4, FRAC_PI_4, FRAC_PI_3
        ));
        assert!(!effective_miquel_check(
            FRAC_PI_3, FRAC_PI_4, FRAC_PI_3, FRAC_PI_3
        ));
    }

    #[test]
    fn concyclicity_examples() {
        let sq = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        assert!(concyclicity_residual(sq[0], sq[1], sq[2], sq[3]) < 1e-15);
        let r = concyclicity_residual(p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.1));
        assert!(r > 0.01, "{r}");
        // three collinear points plus one off the line
        let r = concyclicity_residual(p(0., 0.), p(1., 0.), p(2., 0.), p(1., 1.));
        assert!(r > 0.1, "{r}");
    }

    #[test]
    fn concyclicity_is_similarity_invariant() {
        let pts = [p(0.1, -0.3), p(1.2, 0.05), p(0.9, 1.3), p(-0.2, 0.8)];
        let base = concyclicity_residual(pts[0], pts[1], pts[2], pts[3]);
        let sim = |q: Point| q.rotate_about(Point::ORIGIN, 0.7) * 3.5 + p(10., -4.);
        let moved = concyclicity_residual(sim(pts[0]), sim(pts[1]), sim(pts[2]), sim(pts[3]));
        assert!((base - moved).abs() < 1e-12, "{base} vs {moved}");
    }

    #[test]
    fn miquel_configuration_on_a_circle() {
        let on = |t: f64| p(t.cos(), t.sin());
        let a = [on(0.3), on(1.9), on(3.4), on(5.0)];
        let through = [p(1.5, -0.8), p(1.2, 1.6), p(-1.7, 0.9), p(-0.6, -1.8)];
        let cfg = MiquelConfiguration::new(a, through).unwrap();
        assert!(cfg.miquel_residual().unwrap() < 1e-12);
        assert!(concyclicity_residual(cfg.b[0], cfg.b[1], cfg.b[2], cfg.b[3]) < 1e-12);
        let mut moved = a;
        moved[3] = moved[3] * 1.01;
        let off = MiquelConfiguration::new(moved, through).unwrap();
        assert!(off.miquel_residual().unwrap() > 1e-4);
        assert!(concyclicity_residual(off.b[0], off.b[1], off.b[2], off.b[3]) > 1e-4);
    }
}
