//! Patterns with `(m, n, s) = (2, 2, 0)`.
//!
//! Vertices are named row by row: `A B C` at height 0, `D E F` at height 1,
//! `G H I` at height 2, so `C = A + u`, `G = A + v`, `I = A + u + v`.
//! `Ω₁ … Ω₄` are the circumcenters of faces `(0,0)`, `(0,1)`, `(1,0)`, `(1,1)`.

mod quartic;

pub use quartic::{
    generic_quartic, inscribed_center, pattern_quartic, quartic_trajectory, rectangular_quartic,
    rotation_law_check, QuarticModel, QuarticReport, RectangularFrame, RotationReport,
    TrajectoryPoint,
};

use std::f64::consts::PI;

use nalgebra::Matrix4;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{oriented_angle, other_intersection, Circle, Point};
use crate::pattern::{FaceId, TorusPattern};
use crate::tol::{angle_distance, lattice_distance};

/// Default acceptance threshold for [`Conic::residual`].
pub const ON_HYPERBOLA: f64 = 1e-8;

/// Threshold for flat angles and right angles in the regime tests.
pub const FLAT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoByTwoLabels {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    pub d: Point,
    pub e: Point,
    pub f: Point,
    pub g: Point,
    pub h: Point,
    pub i: Point,
    pub omega: [Point; 4],
}

fn require_2x2(p: &TorusPattern) -> Result<()> {
    if p.shape() != (2, 2, 0) {
        let (m, n, s) = p.shape();
        return Err(Error::InvalidParameters(format!(
            "expected a 2x2 pattern with s = 0, got ({m},{n},{s})"
        )));
    }
    Ok(())
}

impl TwoByTwoLabels {
    pub fn from_pattern(p: &TorusPattern) -> Result<Self> {
        require_2x2(p)?;
        let at = |x, y| p.vertex(x, y);
        let mut omega = [Point::ORIGIN; 4];
        for (k, (fx, fy)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            omega[k] = p.circumcircle(FaceId::new(fx, fy))?.center;
        }
        Ok(TwoByTwoLabels {
            a: at(0, 0),
            b: at(1, 0),
            c: at(2, 0),
            d: at(0, 1),
            e: at(1, 1),
            f: at(2, 1),
            g: at(0, 2),
            h: at(1, 2),
            i: at(2, 2),
            omega,
        })
    }

    /// Largest of `|C − A − (I − G)|` and `|G − A − (I − C)|` over the size of `ACIG`.
    pub fn parallelogram_defect(&self) -> f64 {
        let scale = self.a.dist(self.i).max(self.c.dist(self.g));
        ((self.c - self.a) - (self.i - self.g))
            .norm()
            .max(((self.g - self.a) - (self.i - self.c)).norm())
            / scale
    }
}

/// `qxx·X² + qxy·XY + qyy·Y² + qx·X + qy·Y + q0`.
///
/// Coefficients are kept in a normalized frame (the fitted points centered
/// at their centroid and scaled to unit diameter) so that residuals are
/// similarity invariant; [`Conic::coefficients`] converts back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    local: [f64; 6],
    center: Point,
    scale: f64,
}

impl Conic {
    fn local_coords(&self, p: Point) -> Point {
        (p - self.center) * (1.0 / self.scale)
    }

    fn eval_local(&self, q: Point) -> f64 {
        let [a, b, c, d, e, f] = self.local;
        a * q.x * q.x + b * q.x * q.y + c * q.y * q.y + d * q.x + e * q.y + f
    }

    fn grad_local(&self, q: Point) -> Point {
        let [a, b, c, d, e, _] = self.local;
        Point::new(2.0 * a * q.x + b * q.y + d, b * q.x + 2.0 * c * q.y + e)
    }

    /// World-frame coefficients `[qxx, qxy, qyy, qx, qy, q0]`, unit max-norm.
    pub fn coefficients(&self) -> [f64; 6] {
        let [a, b, c, d, e, f] = self.local;
        let (cx, cy, l) = (self.center.x, self.center.y, self.scale);
        let w = [
            a,
            b,
            c,
            -2.0 * a * cx - b * cy + d * l,
            -2.0 * c * cy - b * cx + e * l,
            a * cx * cx + b * cx * cy + c * cy * cy - d * l * cx - e * l * cy + f * l * l,
        ];
        let norm = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        w.map(|v| v / norm)
    }

    /// Conic value at `p` in the normalized frame.
    pub fn value(&self, p: Point) -> f64 {
        self.eval_local(self.local_coords(p))
    }

    /// Approximate distance from `p` to the curve, relative to the frame
    /// size: `|Q| / max(|∇Q|, √|Q|)` in the normalized frame, which stays
    /// meaningful at the crossing point of a line pair.
    pub fn residual(&self, p: Point) -> f64 {
        let q = self.local_coords(p);
        let v = self.eval_local(q).abs();
        if v == 0.0 {
            return 0.0;
        }
        v / self.grad_local(q).norm().max(v.sqrt())
    }

    /// Whether the quadratic part is trace free.
    pub fn trace(&self) -> f64 {
        self.local[0] + self.local[2]
    }

    /// Second intersection with the line through `on` (a point of the
    /// curve) in direction `dir`.
    pub fn second_intersection(&self, on: Point, dir: Point) -> Option<Point> {
        let q = self.local_coords(on);
        let w = dir * (1.0 / self.scale);
        let [a, b, c, ..] = self.local;
        let quad = a * w.x * w.x + b * w.x * w.y + c * w.y * w.y;
        let lin = self.grad_local(q).dot(w);
        if quad.abs() <= 1e-12 * w.norm_sq() {
            return None;
        }
        Some(on + dir * (-lin / quad))
    }
}

/// The conic `a(X² − Y²) + bXY + cX + dY + e = 0` through four points.
///
/// When `(BH) ⊥ (DF)` the result is the line pair `(BH) ∪ (DF)`.
pub fn equilateral_hyperbola(b: Point, d: Point, f: Point, h: Point) -> Result<Conic> {
    let pts = [b, d, f, h];
    let center = (b + d + f + h) * 0.25;
    let mut scale: f64 = 0.0;
    for (k, p) in pts.iter().enumerate() {
        for q in &pts[k + 1..] {
            scale = scale.max(p.dist(*q));
        }
    }
    if !(scale > 0.0) {
        return Err(Error::DegenerateConfiguration("coincident points".into()));
    }
    let rows: Vec<[f64; 5]> = pts
        .iter()
        .map(|p| {
            let q = (*p - center) * (1.0 / scale);
            [q.x * q.x - q.y * q.y, q.x * q.y, q.x, q.y, 1.0]
        })
        .collect();
    // the null vector of the 4×5 system is its generalized cross product:
    // signed 4×4 minors, which all vanish iff the rank drops
    let null: [f64; 5] = std::array::from_fn(|skip| {
        let minor = Matrix4::from_fn(|r, c| rows[r][if c < skip { c } else { c + 1 }]);
        if skip % 2 == 0 {
            minor.determinant()
        } else {
            -minor.determinant()
        }
    });
    let frobenius_sq: f64 = rows.iter().flatten().map(|v| v * v).sum();
    let norm = null.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if norm <= 1e-10 * frobenius_sq * frobenius_sq {
        return Err(Error::DegenerateConfiguration(
            if is_orthocentric(b, d, f, h) {
                "orthocentric points: every conic through them is an equilateral hyperbola".into()
            } else {
                "the four points do not determine a unique equilateral hyperbola".into()
            },
        ));
    }
    let [ca, cb, cc, cd, ce] = null.map(|v| v / norm);
    Ok(Conic {
        local: [ca, cb, -ca, cc, cd, ce],
        center,
        scale,
    })
}

/// Whether each of the four points is the orthocenter of the other three,
/// i.e. both pairs of opposite connecting segments are perpendicular.
pub fn is_orthocentric(b: Point, d: Point, f: Point, h: Point) -> bool {
    let right = |p: Point, q: Point| (p.dot(q) / (p.norm() * q.norm())).abs() < 1e-10;
    right(b - d, f - h) && right(b - f, d - h)
}

/// Build the 2×2 pattern with `S(1,0) = B`, `S(0,1) = D`, `S(1,1) = E`,
/// `u = F − D`, `v = H − B`.
///
/// `A` is the second intersection of the circle `BDE` with the circle `DEH`
/// translated by `−v`; the remaining vertices follow by periodicity.
///
/// For an orthocentric `B, D, F, H` the hyperbola constraint is empty and
/// every `E` is admissible.
pub fn build_2x2(b: Point, d: Point, f: Point, h: Point, e: Point) -> Result<TorusPattern> {
    if !is_orthocentric(b, d, f, h) {
        let residual = equilateral_hyperbola(b, d, f, h)?.residual(e);
        if !(residual < ON_HYPERBOLA) {
            return Err(Error::NotOnHyperbola { residual });
        }
    }
    let u = f - d;
    let v = h - b;
    let degenerate = |e: Error| Error::DegenerateConfiguration(e.to_string());
    let c1 = Circle::through(b, d, e).map_err(degenerate)?;
    let c2 = Circle::through(d, e, h).map_err(degenerate)?;
    let a = other_intersection(&c1, &c2.translate(Point::ORIGIN - v), b).map_err(degenerate)?;
    let p = TorusPattern::new(2, 2, 0, vec![a, b, d, e], u, v)?;
    let report = p.validate();
    if !report.pass {
        return Err(Error::DegenerateConfiguration(report.failures.join("; ")));
    }
    Ok(p)
}

/// Pattern with `ACIG` the axis-parallel rectangle `[−x_i, x_i] × [−y_i, y_i]`,
/// `E = e` and `D = (x_d, e.y)`.
///
/// Faces are isosceles trapezoids with horizontal bases; `x_d = −x_i`
/// makes every face a rectangle.
pub fn rectangular_2x2(x_i: f64, y_i: f64, x_d: f64, e: Point) -> Result<TorusPattern> {
    if !(x_i > 0.0 && y_i > 0.0) {
        return Err(Error::InvalidParameters(
            "half sides must be positive".into(),
        ));
    }
    let a = Point::new(-x_i, -y_i);
    let b = Point::new(x_i + x_d + e.x, -y_i);
    let d = Point::new(x_d, e.y);
    let p = TorusPattern::new(
        2,
        2,
        0,
        vec![a, b, d, e],
        Point::new(2.0 * x_i, 0.0),
        Point::new(0.0, 2.0 * y_i),
    )?;
    let report = p.validate();
    if !report.pass {
        return Err(Error::DegenerateConfiguration(report.failures.join("; ")));
    }
    Ok(p)
}

/// Random generic 2×2 pattern near the square grid.
///
/// `B, D, F, H` are the grid points `(0,−1), (−1,0), (1,0), (0,1)` moved by
/// up to `spread` in each coordinate; `E` is drawn on their equilateral
/// hyperbola within distance `0.5` of the origin.
pub fn random_generic_2x2(rng: &mut impl Rng, spread: f64) -> Result<TorusPattern> {
    for _ in 0..1000 {
        let mut jitter = |x: f64, y: f64| {
            Point::new(
                x + rng.gen_range(-spread..=spread),
                y + rng.gen_range(-spread..=spread),
            )
        };
        let (b, d, f, h) = (
            jitter(0., -1.),
            jitter(-1., 0.),
            jitter(1., 0.),
            jitter(0., 1.),
        );
        let Ok(conic) = equilateral_hyperbola(b, d, f, h) else {
            continue;
        };
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let Some(e) = conic.second_intersection(b, Point::new(angle.cos(), angle.sin())) else {
            continue;
        };
        if e.norm() > 0.5 {
            continue;
        }
        if let Ok(p) = build_2x2(b, d, f, h, e) {
            if matches!(classify_2x2(&p), Ok(Regime::Generic)) {
                return Ok(p);
            }
        }
    }
    Err(Error::DegenerateConfiguration(
        "no usable point on the hyperbola".into(),
    ))
}

/// Whether every face is a convex quadrilateral.
pub fn faces_are_convex(p: &TorusPattern) -> bool {
    p.faces().all(|f| {
        let c = p.corners(f);
        let turns = (0..4).map(|k| (c[(k + 1) % 4] - c[k]).cross(c[(k + 2) % 4] - c[(k + 1) % 4]));
        let (mut pos, mut neg) = (false, false);
        for t in turns {
            pos |= t > 0.0;
            neg |= t < 0.0;
        }
        !(pos && neg)
    })
}

/// `(α, β) = (∠CBA, ∠ADG)` reduced modulo `π`, after checking
/// `∠CBA ≡ ∠DEF` and `∠ADG ≡ ∠HEB`.
///
/// The congruences hold modulo `2π` when all faces are convex; a
/// non-convex face shifts one side by `π`, so they are then checked
/// modulo `π`.
pub fn angle_invariants(p: &TorusPattern) -> Result<(f64, f64)> {
    let l = TwoByTwoLabels::from_pattern(p)?;
    let cba = oriented_angle(l.c, l.b, l.a)?;
    let def = oriented_angle(l.d, l.e, l.f)?;
    let adg = oriented_angle(l.a, l.d, l.g)?;
    let heb = oriented_angle(l.h, l.e, l.b)?;
    let gap = if faces_are_convex(p) {
        angle_distance(cba, def).max(angle_distance(adg, heb))
    } else {
        lattice_distance(cba - def, PI).max(lattice_distance(adg - heb, PI))
    };
    if gap > 1e-9 {
        return Err(Error::InconsistentPattern(format!(
            "opposite angles of the 2x2 pattern differ by {gap:.3e}"
        )));
    }
    Ok((cba.rem_euclid(PI), adg.rem_euclid(PI)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Generic,
    /// `ACIG` is a rectangle; at least one of the flags is set.
    Rectangular {
        alpha_flat: bool,
        beta_flat: bool,
    },
}

impl Regime {
    pub fn all_rectangles(self) -> bool {
        matches!(
            self,
            Regime::Rectangular {
                alpha_flat: true,
                beta_flat: true
            }
        )
    }
}

pub fn is_flat(angle: f64) -> bool {
    lattice_distance(angle, PI) < FLAT
}

/// Generic versus rectangular fundamental domain, decided by the angles and
/// cross-checked against the shape of `ACIG`.
pub fn classify_2x2(p: &TorusPattern) -> Result<Regime> {
    let (alpha, beta) = angle_invariants(p)?;
    let (u, v) = (p.u(), p.v());
    let right = (u.dot(v) / (u.norm() * v.norm())).abs() < FLAT;
    let (alpha_flat, beta_flat) = (is_flat(alpha), is_flat(beta));
    if right != (alpha_flat || beta_flat) {
        return Err(Error::InconsistentPattern(format!(
            "angle test says {}, shape test says {}",
            if alpha_flat || beta_flat {
                "rectangular"
            } else {
                "generic"
            },
            if right { "rectangular" } else { "generic" },
        )));
    }
    Ok(if right {
        Regime::Rectangular {
            alpha_flat,
            beta_flat,
        }
    } else {
        Regime::Generic
    })
}

/// Whether every face has a pair of parallel opposite sides.
pub fn faces_are_trapezoids(p: &TorusPattern, tol: f64) -> bool {
    p.faces().all(|f| {
        let [sw, se, ne, nw] = p.corners(f);
        let par = |a: Point, b: Point| (a.cross(b) / (a.norm() * b.norm())).abs() < tol;
        par(se - sw, ne - nw) || par(nw - sw, ne - se)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::standard_grid;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn hyperbola_through_xy_equals_one() {
        let c = equilateral_hyperbola(p(1., 1.), p(2., 0.5), p(-1., -1.), p(4., 0.25)).unwrap();
        let k = c.coefficients();
        let sign = k[1].signum();
        let expected = [0.0, 1.0, 0.0, 0.0, 0.0, -1.0];
        for (a, b) in k.iter().zip(expected) {
            assert!((a * sign - b).abs() < 1e-12, "{k:?}");
        }
        assert!(c.residual(p(-2., -0.5)) < 1e-12);
        assert!(c.residual(p(-2., -0.4)) > 1e-3);
        assert!(c.trace().abs() < 1e-15);
    }

    #[test]
    fn perpendicular_diagonals_give_line_pair() {
        let c = equilateral_hyperbola(p(0., 1.), p(-1., 0.), p(1., 0.), p(0., -1.)).unwrap();
        let k = c.coefficients();
        assert!((k[1].abs() - 1.0).abs() < 1e-12, "{k:?}");
        for v in [k[0], k[2], k[3], k[4], k[5]] {
            assert!(v.abs() < 1e-12, "{k:?}");
        }
        assert_eq!(c.residual(p(0., 0.)), 0.0);
        assert!(c.residual(p(0.3, 0.0)) < 1e-12);
    }

    #[test]
    fn build_on_fitted_hyperbola() {
        let (b, d, f, h) = (p(0.1, -1.1), p(-0.9, 0.2), p(1.2, -0.1), p(-0.1, 0.9));
        let conic = equilateral_hyperbola(b, d, f, h).unwrap();
        let e = conic.second_intersection(b, p(0.1, 1.0)).unwrap();
        assert!(conic.residual(e) < 1e-12);
        let s = build_2x2(b, d, f, h, e).unwrap();
        assert!(s.validate().pass);
        assert_eq!(s.u(), f - d);
        assert_eq!(s.v(), h - b);
        assert_eq!(classify_2x2(&s).unwrap(), Regime::Generic);
        assert!(matches!(
            build_2x2(b, d, f, h, e + p(0.0, 0.1)),
            Err(Error::NotOnHyperbola { .. })
        ));
    }

    #[test]
    fn orthocentric_quadruple_accepts_any_center() {
        // (−1,−1) is the orthocenter of the other three points of XY = 1
        let (b, d, f, h) = (p(1., 1.), p(2., 0.5), p(-1., -1.), p(0.5, 2.));
        assert!(is_orthocentric(b, d, f, h));
        assert!(matches!(
            equilateral_hyperbola(b, d, f, h),
            Err(Error::DegenerateConfiguration(_))
        ));
        for e in [p(1.5, -0.3), p(0.3, 0.7), p(-0.2, 1.4)] {
            assert!(build_2x2(b, d, f, h, e).unwrap().validate().pass);
        }
        // E = B + F − D forces C = E
        assert!(matches!(
            build_2x2(b, d, f, h, p(-2., -0.5)),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn standard_grid_is_rectangular() {
        let g = standard_grid(2, 2, 0).unwrap();
        let (a, b) = angle_invariants(&g).unwrap();
        assert!(is_flat(a) && is_flat(b));
        assert!(classify_2x2(&g).unwrap().all_rectangles());
        assert!(faces_are_trapezoids(&g, 1e-12));
        let rebuilt = build_2x2(p(0., -1.), p(-1., 0.), p(1., 0.), p(0., 1.), p(0., 0.)).unwrap();
        assert!(classify_2x2(&rebuilt).unwrap().all_rectangles());
    }

    #[test]
    fn requires_two_by_two() {
        let g = standard_grid(4, 2, 0).unwrap();
        assert!(matches!(
            angle_invariants(&g),
            Err(Error::InvalidParameters(_))
        ));
    }
}
