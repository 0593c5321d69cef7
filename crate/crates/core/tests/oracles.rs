//! Library results checked against independent computations.

use std::f64::consts::{PI, TAU};

use miquel::coords::lemma52_solve;
use miquel::dynamics::{evolve, normalize};
use miquel::geom::{concyclicity_residual, other_intersection, Circle, Line};
use miquel::twobytwo::{
    build_2x2, equilateral_hyperbola, faces_are_trapezoids, random_generic_2x2, rectangular_2x2,
    TwoByTwoLabels,
};
use miquel::Point;
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Both intersections of two circles: subtract the equations to get the
/// radical line, then solve the quadratic along it.
fn intersections(c1: &Circle, c2: &Circle) -> [Point; 2] {
    let (p, q) = (c1.center, c2.center);
    let d = q - p;
    let dist_sq = d.norm_sq();
    // foot of the radical line on the center line, as a fraction of d
    let along = (c1.radius * c1.radius - c2.radius * c2.radius + dist_sq) / (2.0 * dist_sq);
    let foot = p + d * along;
    let h = (c1.radius * c1.radius - along * along * dist_sq)
        .max(0.0)
        .sqrt();
    let n = d.perp() * (1.0 / dist_sq.sqrt());
    [foot + n * h, foot - n * h]
}

#[test]
fn other_intersection_matches_quadratic() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    while checked < 500 {
        let c1 = Circle::new(
            Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            rng.gen_range(0.3..2.0),
        )
        .unwrap();
        let c2 = Circle::new(
            Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            rng.gen_range(0.3..2.0),
        )
        .unwrap();
        let d = c1.center.dist(c2.center);
        // keep the circles well separated from tangency
        if d < (c1.radius - c2.radius).abs() + 0.1 || d > c1.radius + c2.radius - 0.1 {
            continue;
        }
        let [x, y] = intersections(&c1, &c2);
        let got = other_intersection(&c1, &c2, x).unwrap();
        assert!(got.dist(y) < 1e-12 * (1.0 + d), "{got:?} vs {y:?}");
        let back = other_intersection(&c1, &c2, y).unwrap();
        assert!(back.dist(x) < 1e-12 * (1.0 + d));
        checked += 1;
    }
}

/// Bisection for `c₀` on `sin(c₀/2)·Πsin(c_j/2) = sin(d₀/2)·Πsin(d_j/2)`
/// with `d₀ = S − c₀` fixed by the half-sum relation.
fn lemma52_bisect(c: &[f64], d: &[f64], p: u8) -> (f64, f64) {
    let sum: f64 = c.iter().chain(d).sum();
    let s = 2.0 * PI * p as f64 - sum;
    let pc: f64 = c.iter().map(|a| (a / 2.0).sin()).product();
    let pd: f64 = d.iter().map(|a| (a / 2.0).sin()).product();
    let f = |c0: f64| (c0 / 2.0).sin() * pc - ((s - c0) / 2.0).sin() * pd;
    // f(c₀ + 2π) = −f(c₀), so [0, 2π] brackets a root
    let (mut lo, mut hi) = (0.0, TAU);
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c0 = 0.5 * (lo + hi);
    (c0, s - c0)
}

#[test]
fn lemma52_matches_root_finder() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..200 {
        let c: Vec<f64> = (0..2).map(|_| rng.gen_range(0.2..TAU - 0.2)).collect();
        let d: Vec<f64> = (0..2).map(|_| rng.gen_range(0.2..TAU - 0.2)).collect();
        let p = (trial % 2) as u8;
        let (c0, d0) = lemma52_bisect(&c, &d, p);
        let Ok((big_c, big_d)) = lemma52_solve(&c, &d, p) else {
            continue;
        };
        let want_c = Complex64::from_polar(1.0, c0);
        let want_d = Complex64::from_polar(1.0, d0);
        assert!((big_c - want_c).norm() < 1e-9, "C0 {big_c} vs {want_c}");
        assert!((big_d - want_d).norm() < 1e-9, "D0 {big_d} vs {want_d}");
    }
}

/// Trace-free conic through four points by a 4×4 solve with the constant
/// term fixed to 1: `a(x² − y²) + bxy + cx + dy + 1 = 0`.
fn conic_oracle(pts: [Point; 4]) -> [f64; 5] {
    let m = Matrix4::from_fn(|r, k| {
        let p = pts[r];
        [p.x * p.x - p.y * p.y, p.x * p.y, p.x, p.y][k]
    });
    let sol = m.lu().solve(&Vector4::repeat(-1.0)).expect("nonsingular");
    [sol[0], sol[1], sol[2], sol[3], 1.0]
}

#[test]
fn hyperbola_agrees_with_linear_solve_at_a_fifth_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 100 {
        let mut jitter =
            |x: f64, y: f64| Point::new(x + rng.gen_range(-0.4..0.4), y + rng.gen_range(-0.4..0.4));
        // offset keeps the origin off the conic, so the constant term is nonzero
        let shift = Point::new(3.0, 2.0);
        let pts = [
            jitter(0.0, -1.0) + shift,
            jitter(-1.0, 0.0) + shift,
            jitter(1.0, 0.0) + shift,
            jitter(0.0, 1.0) + shift,
        ];
        let Ok(conic) = equilateral_hyperbola(pts[0], pts[1], pts[2], pts[3]) else {
            continue;
        };
        let [a, b, c, d, _] = conic_oracle(pts);
        // fifth point: second intersection of the oracle conic with a line through pts[0]
        let t0 = rng.gen_range(0.0..PI);
        let w = Point::new(t0.cos(), t0.sin());
        let p = pts[0];
        let q2 = a * (w.x * w.x - w.y * w.y) + b * w.x * w.y;
        let q1 =
            2.0 * a * (p.x * w.x - p.y * w.y) + b * (p.x * w.y + p.y * w.x) + c * w.x + d * w.y;
        if q2.abs() < 1e-3 {
            continue;
        }
        let fifth = p + w * (-q1 / q2);
        if fifth.dist(shift) > 5.0 {
            continue;
        }
        assert!(
            conic.residual(fifth) < 1e-9,
            "residual {:.2e}",
            conic.residual(fifth)
        );
        checked += 1;
    }
}

fn reflect(p: Point, l: &Line) -> Point {
    let d = (l.b - l.a) * (1.0 / l.a.dist(l.b));
    let w = p - l.a;
    l.a + d * (2.0 * w.dot(d)) - w
}

#[test]
fn b_and_d_points_stay_on_two_mirror_circles() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let p = random_generic_2x2(&mut rng, 0.25).unwrap();
        let orbit = normalize(&evolve(&p, 0, 24).unwrap());
        let labels: Vec<TwoByTwoLabels> = orbit
            .states()
            .iter()
            .map(|s| TwoByTwoLabels::from_pattern(s).unwrap())
            .collect();
        let ac = Line::new(labels[0].a, labels[0].c).unwrap();
        let ag = Line::new(labels[0].a, labels[0].g).unwrap();
        for (pick, mirror) in [(0usize, &ac), (1, &ag)] {
            let point = |l: &TwoByTwoLabels| if pick == 0 { l.b } else { l.d };
            // the locus of M with ∠CMA ≡ ∠CB₀A (mod π) is the circle through A, C, B₀
            let circle = Circle::through(mirror.a, mirror.b, point(&labels[0])).unwrap();
            let even: Vec<Point> = labels.iter().step_by(2).map(point).collect();
            let odd: Vec<Point> = labels
                .iter()
                .skip(1)
                .step_by(2)
                .map(|l| reflect(point(l), mirror))
                .collect();
            for q in even.iter().chain(&odd) {
                assert!(
                    circle.relative_offset(*q) < 1e-8,
                    "off by {:.2e}",
                    circle.relative_offset(*q)
                );
            }
        }
    }
}

#[test]
fn rectangular_faces_stay_trapezoids() {
    let p = rectangular_2x2(1.1, 0.8, 0.3, Point::new(0.2, -0.15)).unwrap();
    for (t, state) in evolve(&p, 0, 30).unwrap().iter() {
        assert!(faces_are_trapezoids(state, 1e-8), "t = {t}");
        for f in state.faces() {
            let c = state.corners(f);
            assert!(concyclicity_residual(c[0], c[1], c[2], c[3]) < 1e-9);
        }
    }
}

#[test]
fn build_places_the_given_points() {
    let (b, d, f, h) = (
        Point::new(0.1, -1.1),
        Point::new(-0.9, 0.2),
        Point::new(1.2, -0.1),
        Point::new(-0.1, 0.9),
    );
    let conic = equilateral_hyperbola(b, d, f, h).unwrap();
    let e = conic
        .second_intersection(b, Point::new(0.27, 0.96))
        .unwrap();
    let p = build_2x2(b, d, f, h, e).unwrap();
    let l = TwoByTwoLabels::from_pattern(&p).unwrap();
    for (got, want) in [(l.b, b), (l.d, d), (l.f, f), (l.h, h), (l.e, e)] {
        assert!(got.dist(want) < 1e-12);
    }
}
