//! Quartic curves carrying the orbit of `E`.
//!
//! In the generic regime the curve is `PM²·P′M² − λ·OM² = k`, with `O` the
//! center of `ACIG` and `P, P′ = 2O − P` built from the centers of the
//! inscribed-angle circles of `α` on `[CA]` and `β` on `[AG]`. When `ACIG`
//! is a rectangle the curve is `(X² + Y²)² − aX² − bY² + c = 0` in the frame
//! centered at `O` with axes along the sides.

use num_complex::Complex64;
use serde::Serialize;

use super::{angle_invariants, classify_2x2, Regime, TwoByTwoLabels};
use crate::dynamics::{evolve, normalize};
use crate::error::{Error, Result};
use crate::geom::{Line, Point};
use crate::pattern::TorusPattern;
use crate::tol;

/// Center of the circle of points `M` with `∠XMY ≡ angle (mod π)`.
pub fn inscribed_center(x: Point, y: Point, angle: f64) -> Result<Point> {
    let (s, c) = angle.sin_cos();
    if s.abs() < tol::ANGLE {
        return Err(Error::WrongRegime(
            "flat inscribed angle has no finite center".into(),
        ));
    }
    Ok(x.midpoint(y) - ((x - y) * 0.5).perp() * (c / s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectangularFrame {
    pub origin: Point,
    /// Unit vector along the side containing `A`'s neighbor playing `D`'s role.
    pub e1: Point,
    pub e2: Point,
    pub x_i: f64,
    pub y_i: f64,
    /// First coordinate of `D` (of `B` when the axes are swapped).
    pub x_d: f64,
    /// Whether the axes were swapped because only `β` is flat.
    pub swapped: bool,
}

impl RectangularFrame {
    pub fn coords(&self, p: Point) -> (f64, f64) {
        let w = p - self.origin;
        (w.dot(self.e1), w.dot(self.e2))
    }

    pub fn point(&self, x: f64, y: f64) -> Point {
        self.origin + self.e1 * x + self.e2 * y
    }

    /// `δ = ∠COI`, the rotation step of `E` in the all-rectangles case.
    pub fn delta(&self) -> f64 {
        let r2 = self.x_i * self.x_i + self.y_i * self.y_i;
        let cos = (self.x_i * self.x_i - self.y_i * self.y_i) / r2;
        let sin = 2.0 * self.x_i * self.y_i / r2;
        sin.atan2(cos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuarticModel {
    Generic {
        o: Point,
        p: Point,
        p_prime: Point,
        lambda: f64,
        k: f64,
        scale: f64,
    },
    Rectangular {
        frame: RectangularFrame,
        a: f64,
        b: f64,
        c: f64,
        scale: f64,
    },
}

impl QuarticModel {
    /// Curve equation at `m`, divided by `scale⁴` where `scale` is the
    /// diameter of `ACIG`.
    pub fn residual(&self, m: Point) -> f64 {
        match *self {
            QuarticModel::Generic {
                o,
                p,
                p_prime,
                lambda,
                k,
                scale,
            } => {
                let v =
                    m.dist(p).powi(2) * m.dist(p_prime).powi(2) - lambda * m.dist(o).powi(2) - k;
                v / scale.powi(4)
            }
            QuarticModel::Rectangular {
                frame,
                a,
                b,
                c,
                scale,
            } => {
                let (x, y) = frame.coords(m);
                let r2 = x * x + y * y;
                (r2 * r2 - a * x * x - b * y * y + c) / scale.powi(4)
            }
        }
    }

    /// Points of the curve on `samples` rays from its center, equally
    /// spaced in angle. Both curves are quadratic in `r²` along a ray, so
    /// each ray meets them at most twice.
    pub fn sample(&self, samples: usize) -> Vec<Point> {
        let mut out = Vec::new();
        for j in 0..samples {
            let theta = std::f64::consts::TAU * j as f64 / samples as f64;
            let dir = Point::new(theta.cos(), theta.sin());
            // R² + β R + γ = 0 with R = r²
            let (center, world_dir, beta, gamma) = match *self {
                QuarticModel::Generic {
                    o, p, lambda, k, ..
                } => {
                    let w = p - o;
                    let q = w.norm_sq();
                    (
                        o,
                        dir,
                        2.0 * q - 4.0 * w.dot(dir).powi(2) - lambda,
                        q * q - k,
                    )
                }
                QuarticModel::Rectangular { frame, a, b, c, .. } => {
                    let world = frame.e1 * dir.x + frame.e2 * dir.y;
                    (
                        frame.origin,
                        world,
                        -(a * dir.x * dir.x + b * dir.y * dir.y),
                        c,
                    )
                }
            };
            let disc = beta * beta - 4.0 * gamma;
            if disc < 0.0 {
                continue;
            }
            for root in [0.5 * (-beta - disc.sqrt()), 0.5 * (-beta + disc.sqrt())] {
                if root >= 0.0 {
                    out.push(center + world_dir * root.sqrt());
                }
            }
        }
        out
    }
}

/// Generic quartic through `A, C, G, I` for the angle pair `(α, β)`.
///
/// Sending `(α, β)` to `(−α, −β)` exchanges `P` and `P′`, so both parities
/// of the orbit share one curve.
pub fn generic_quartic(
    a: Point,
    c: Point,
    g: Point,
    i: Point,
    alpha: f64,
    beta: f64,
) -> Result<QuarticModel> {
    let (u, v) = (c - a, g - a);
    if (u.dot(v) / (u.norm() * v.norm())).abs() < super::FLAT {
        return Err(Error::WrongRegime("ACIG is a rectangle".into()));
    }
    if super::is_flat(alpha) || super::is_flat(beta) {
        return Err(Error::WrongRegime("flat angle invariant".into()));
    }
    let o = a.midpoint(i);
    let c1 = inscribed_center(c, a, alpha)?;
    let c2 = inscribed_center(a, g, beta)?;
    let degenerate = |e: Error| Error::DegenerateConfiguration(e.to_string());
    let l1 = Line::new(c1, c1 + v).map_err(degenerate)?;
    let l2 = Line::new(c2, c2 + u).map_err(degenerate)?;
    let p = l1
        .intersect(&l2)
        .ok_or_else(|| Error::DegenerateConfiguration("parallel center lines".into()))?;
    let p_prime = o * 2.0 - p;
    let d2 = |x: Point, y: Point| (x - y).norm_sq();
    let (oa, oc) = (d2(o, a), d2(o, c));
    let (pa, pc) = (d2(p, a) * d2(p_prime, a), d2(p, c) * d2(p_prime, c));
    let den = oa - oc;
    let lambda = (pa - pc) / den;
    let k = (oa * pc - oc * pa) / den;
    Ok(QuarticModel::Generic {
        o,
        p,
        p_prime,
        lambda,
        k,
        scale: a.dist(i).max(c.dist(g)),
    })
}

/// Coefficients `(a, b, c)` of the rectangular quartic.
pub fn rectangular_quartic(
    x_i: f64,
    y_i: f64,
    x_d: f64,
    x_e: f64,
    y_e: f64,
) -> Result<(f64, f64, f64)> {
    let den = y_i * y_i - y_e * y_e;
    if den.abs() <= tol::GEOM * y_i * y_i {
        return Err(Error::DegenerateConfiguration(
            "E is level with a corner of ACIG".into(),
        ));
    }
    let ri = x_i * x_i + y_i * y_i;
    let re = x_e * x_e + y_e * y_e;
    let w = (x_d + x_i).powi(2) * (ri - re);
    let a = ri + re + w / den;
    let b = ri + re + w * (x_e * x_e - x_i * x_i) / (den * den);
    let c = ri * re + w * (x_e * x_e * y_i * y_i - x_i * x_i * y_e * y_e) / (den * den);
    Ok((a, b, c))
}

fn rectangular_frame(l: &TwoByTwoLabels, swapped: bool) -> RectangularFrame {
    let origin = l.a.midpoint(l.i);
    let (side1, side2, d_role) = if swapped {
        (l.g, l.c, l.b)
    } else {
        (l.c, l.g, l.d)
    };
    let e1 = (side1 - l.a) * (1.0 / side1.dist(l.a));
    let e2 = (side2 - l.a) * (1.0 / side2.dist(l.a));
    RectangularFrame {
        origin,
        e1,
        e2,
        x_i: 0.5 * side1.dist(l.a),
        y_i: 0.5 * side2.dist(l.a),
        x_d: (d_role - origin).dot(e1),
        swapped,
    }
}

fn acig_diameter(l: &TwoByTwoLabels) -> f64 {
    l.a.dist(l.i).max(l.c.dist(l.g))
}

/// The quartic of the appropriate regime for a 2×2 pattern.
pub fn pattern_quartic(p: &TorusPattern) -> Result<(Regime, QuarticModel)> {
    let regime = classify_2x2(p)?;
    let l = TwoByTwoLabels::from_pattern(p)?;
    let model = match regime {
        Regime::Generic => {
            let (alpha, beta) = angle_invariants(p)?;
            generic_quartic(l.a, l.c, l.g, l.i, alpha, beta)?
        }
        Regime::Rectangular { alpha_flat, .. } => {
            let frame = rectangular_frame(&l, !alpha_flat);
            let (x_e, y_e) = frame.coords(l.e);
            let (a, b, c) = rectangular_quartic(frame.x_i, frame.y_i, frame.x_d, x_e, y_e)?;
            QuarticModel::Rectangular {
                frame,
                a,
                b,
                c,
                scale: acig_diameter(&l),
            }
        }
    };
    Ok((regime, model))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryPoint {
    pub t: i64,
    pub e: Point,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuarticReport {
    pub regime: Regime,
    pub model: QuarticModel,
    pub trajectory: Vec<TrajectoryPoint>,
    pub max_residual: f64,
    /// Present for patterns made of rectangles only.
    pub rotation: Option<RotationReport>,
}

impl QuarticReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `t,ex,ey,residual`, one row per time.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,ex,ey,residual\n");
        for p in &self.trajectory {
            out.push_str(&format!("{},{},{},{:e}\n", p.t, p.e.x, p.e.y, p.residual));
        }
        out
    }
}

/// Follow `E` over `steps` steps of the translation-normalized orbit and
/// evaluate the quartic of `S₀` along the way.
pub fn quartic_trajectory(p: &TorusPattern, steps: usize) -> Result<QuarticReport> {
    let (regime, model) = pattern_quartic(p)?;
    let orbit = normalize(&evolve(p, 0, steps as i64)?);
    let trajectory: Vec<TrajectoryPoint> = orbit
        .iter()
        .map(|(t, s)| {
            let e = s.vertex(1, 1);
            TrajectoryPoint {
                t,
                e,
                residual: model.residual(e),
            }
        })
        .collect();
    let max_residual = trajectory
        .iter()
        .map(|p| p.residual.abs())
        .fold(0.0, f64::max);
    let rotation = if regime.all_rectangles() {
        Some(rotation_law_check(p, steps)?)
    } else {
        None
    };
    Ok(QuarticReport {
        regime,
        model,
        trajectory,
        max_residual,
        rotation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationReport {
    pub delta: f64,
    /// `|E_t − predicted E_t|` over the diameter of `ACIG`, for `t = 1..=steps`.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

/// Compare the orbit of `E` with the reflection-rotation law.
///
/// In frame coordinates `z`, the black mutation acts on `E` as
/// `z ↦ conj(e^{iδ} z)` and the white one as `z ↦ conj(e^{−iδ} z)`. Black
/// faces mutate at odd times, so `z_{2t+1} = conj(e^{iδ} z_{2t})`,
/// `z_{2t+2} = conj(e^{−iδ} z_{2t+1})` and `z_{2t+2} = e^{2iδ} z_{2t}`.
pub fn rotation_law_check(p: &TorusPattern, steps: usize) -> Result<RotationReport> {
    if !classify_2x2(p)?.all_rectangles() {
        return Err(Error::WrongRegime(
            "rotation law needs every face to be a rectangle".into(),
        ));
    }
    let l = TwoByTwoLabels::from_pattern(p)?;
    let frame = rectangular_frame(&l, false);
    let delta = frame.delta();
    let scale = acig_diameter(&l);
    let orbit = normalize(&evolve(p, 0, steps as i64)?);
    let z = |s: &TorusPattern| {
        let (x, y) = frame.coords(s.vertex(1, 1));
        Complex64::new(x, y)
    };
    let mut deviations = Vec::with_capacity(steps);
    let mut prev = z(orbit.state(0).expect("time 0 in window"));
    for t in 1..=steps as i64 {
        let cur = z(orbit.state(t).expect("time in window"));
        let turn = if t % 2 == 1 { delta } else { -delta };
        let predicted = (Complex64::from_polar(1.0, turn) * prev).conj();
        deviations.push((cur - predicted).norm() / scale);
        prev = cur;
    }
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(RotationReport {
        delta,
        deviations,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::circumcenter;
    use crate::twobytwo::rectangular_2x2;

    #[test]
    fn inscribed_center_matches_circumcenter() {
        let (x, y, m) = (
            Point::new(2.0, 0.3),
            Point::new(-1.0, 0.1),
            Point::new(0.4, 1.7),
        );
        let angle = crate::geom::oriented_angle(x, m, y).unwrap();
        for a in [angle, angle + std::f64::consts::PI] {
            let z = inscribed_center(x, y, a).unwrap();
            assert!(z.dist(circumcenter(x, m, y).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn rectangular_quartic_passes_through_corners() {
        let p = rectangular_2x2(1.3, 0.8, -0.9, Point::new(0.2, 0.35)).unwrap();
        let (regime, model) = pattern_quartic(&p).unwrap();
        assert_eq!(
            regime,
            Regime::Rectangular {
                alpha_flat: true,
                beta_flat: false
            }
        );
        let l = TwoByTwoLabels::from_pattern(&p).unwrap();
        for q in [l.a, l.c, l.g, l.i, l.e] {
            assert!(model.residual(q).abs() < 1e-12, "{q:?}");
        }
    }

    #[test]
    fn samples_lie_on_the_curve() {
        let p = rectangular_2x2(1.3, 0.8, -0.9, Point::new(0.2, 0.35)).unwrap();
        let (_, model) = pattern_quartic(&p).unwrap();
        let pts = model.sample(256);
        assert!(pts.len() >= 256);
        assert!(pts.iter().all(|&q| model.residual(q).abs() < 1e-12));
    }

    #[test]
    fn rectangles_rotate() {
        let p = rectangular_2x2(1.0, 0.6, -1.0, Point::new(0.3, -0.2)).unwrap();
        let r = rotation_law_check(&p, 12).unwrap();
        assert!(r.max_deviation < 1e-10, "{:?}", r.deviations);
    }
}
