//! Rebuilding a pattern from its angle field.
//!
//! With `S(0,0) = 0` and `S(1,0) = 1`, each face with one known edge is
//! completed by locating its circumcenter from that edge and its angle, then
//! rotating around it. Faces are visited until the block `[0,m) × [0,n)` is
//! covered; every vertex reached twice is checked for agreement.

use std::collections::HashMap;

use num_complex::Complex64;

use super::{check_conditions, ConditionKind, Dir, PhiField};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::pattern::{FaceId, TorusPattern};
use crate::tol;

/// Edge angles in corner order: `SW → SE` is `φS`, then `φE`, `φN`, `φW`.
const EDGE_DIRS: [Dir; 4] = [Dir::S, Dir::E, Dir::N, Dir::W];

/// Image of `p` under the similarity sending `S(0,0)` to `0` and `S(1,0)` to `1`.
pub fn gauge_align(p: &TorusPattern) -> Result<TorusPattern> {
    let a = p.stored(0, 0).to_complex();
    let b = p.stored(1, 0).to_complex();
    let w = b - a;
    if w.norm() == 0.0 {
        return Err(Error::DegenerateGeometry("S(0,0) = S(1,0)".into()));
    }
    Ok(p.map_points(|z| Point::from_complex((z.to_complex() - a) / w)))
}

/// Pattern (in the gauge of [`gauge_align`]) whose angle field is `f`.
pub fn reconstruct(f: &PhiField) -> Result<TorusPattern> {
    let report = check_conditions(f, tol::CONDITIONS);
    if !report.pass {
        let failing: Vec<_> = report.failures().collect();
        return Err(Error::ConditionViolation {
            label: failing
                .iter()
                .map(|c| c.label)
                .collect::<Vec<_>>()
                .join(", "),
            residual: failing
                .iter()
                .map(|c| match c.kind {
                    ConditionKind::Identity => c.worst,
                    ConditionKind::Inequality => 0.0,
                })
                .fold(0.0, f64::max),
        });
    }
    let (m, n, s) = f.shape();
    let (mi, ni) = (m as i64, n as i64);

    let mut placed: HashMap<(i64, i64), Complex64> = HashMap::new();
    placed.insert((0, 0), Complex64::new(0.0, 0.0));
    placed.insert((1, 0), Complex64::new(1.0, 0.0));
    let mut done = vec![false; m * n];
    let mut mismatch: f64 = 0.0;

    loop {
        let mut progress = false;
        for fy in 0..ni {
            for fx in 0..mi {
                let k = (fy * mi + fx) as usize;
                if done[k] {
                    continue;
                }
                let face = FaceId::new(fx, fy);
                let corners = face.corners();
                let known = (0..4).find(|&c| {
                    placed.contains_key(&corners[c]) && placed.contains_key(&corners[(c + 1) % 4])
                });
                let Some(start) = known else { continue };
                let rot = |c: usize| Complex64::from_polar(1.0, f.get(face, EDGE_DIRS[c]));
                let p0 = placed[&corners[start]];
                let p1 = placed[&corners[(start + 1) % 4]];
                let r = rot(start);
                let den = Complex64::new(1.0, 0.0) - r;
                if den.norm() < tol::ANGLE {
                    return Err(Error::DegenerateGeometry(format!(
                        "edge angle of face {} vanishes",
                        face.label()
                    )));
                }
                let center = (p1 - r * p0) / den;
                let mut prev = p1;
                for step in 1..4 {
                    let c = (start + step) % 4;
                    let next = center + rot(c) * (prev - center);
                    let key = corners[(c + 1) % 4];
                    match placed.get(&key) {
                        Some(&q) => mismatch = mismatch.max((q - next).norm()),
                        None => {
                            placed.insert(key, next);
                        }
                    }
                    prev = next;
                }
                done[k] = true;
                progress = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
        if !progress {
            return Err(Error::DegenerateGeometry("reconstruction stalled".into()));
        }
    }

    let at = |x: i64, y: i64| placed[&(x, y)];
    let origin = at(0, 0);
    let u = at(mi, 0) - origin;
    let v = at(s as i64, ni) - origin;
    for y in 0..=ni {
        mismatch = mismatch.max((at(mi, y) - at(0, y) - u).norm());
    }
    for x in 0..=(mi - s as i64) {
        mismatch = mismatch.max((at(x + s as i64, ni) - at(x, 0) - v).norm());
    }
    let scale = placed
        .values()
        .map(|z| (z - origin).norm())
        .fold(1.0, f64::max);
    if !(mismatch <= 1e-8 * scale) {
        return Err(Error::ConditionViolation {
            label: "closure".into(),
            residual: mismatch / scale,
        });
    }

    let vertices = (0..ni)
        .flat_map(|y| (0..mi).map(move |x| (x, y)))
        .map(|(x, y)| Point::from_complex(at(x, y)))
        .collect();
    let p = TorusPattern::new(
        m,
        n,
        s,
        vertices,
        Point::from_complex(u),
        Point::from_complex(v),
    )?;
    let check = p.validate();
    if !check.pass {
        return Err(Error::DegenerateGeometry(check.failures.join("; ")));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::extract_phi;
    use crate::pattern::standard_grid;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn quarter_turns_rebuild_the_grid() {
        for (m, n, s) in [(2, 2, 0), (4, 2, 2), (4, 1, 1)] {
            let f = PhiField::constant(m, n, s, FRAC_PI_2).unwrap();
            let p = reconstruct(&f).unwrap();
            let g = standard_grid(m, n, s).unwrap();
            assert!(p.max_displacement(&g) < 1e-12);
            assert!((p.u() - g.u()).norm() < 1e-12);
            assert!((p.v() - g.v()).norm() < 1e-12);
            assert!(extract_phi(&p).unwrap().max_deviation(&f) < 1e-12);
        }
    }

    #[test]
    fn broken_column_is_rejected() {
        // raise one N angle and lower the S angle of the same face: face sums
        // survive, the column sine products do not
        let mut f = PhiField::constant(2, 2, 0, FRAC_PI_2).unwrap();
        let face = FaceId::new(0, 0);
        f.set(face, Dir::N, FRAC_PI_2 + 0.2);
        f.set(face, Dir::S, FRAC_PI_2 - 0.2);
        match reconstruct(&f) {
            Err(Error::ConditionViolation { label, .. }) => {
                assert!(label.contains("vertical_monodromy"), "{label}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gauge_alignment() {
        let g = standard_grid(2, 2, 0).unwrap();
        let moved = g.map_points(|z| Point::new(3.0 * z.y + 1.0, -3.0 * z.x + 2.0));
        let back = gauge_align(&moved).unwrap();
        assert!(back.max_displacement(&g) < 1e-12);
        assert!((back.v() - g.v()).norm() < 1e-12);
    }
}
