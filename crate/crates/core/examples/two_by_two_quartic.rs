//! A generic 2×2 pattern built from four points and a fifth on their
//! equilateral hyperbola; its center vertex then travels on a quartic.

use miquel::geom::Point;
use miquel::twobytwo::{build_2x2, classify_2x2, equilateral_hyperbola, quartic_trajectory};

fn main() -> miquel::Result<()> {
    let (b, d, f, h) = (
        Point::new(0.1, -1.1),
        Point::new(-0.9, 0.2),
        Point::new(1.2, -0.1),
        Point::new(-0.1, 0.9),
    );
    let conic = equilateral_hyperbola(b, d, f, h)?;
    let e = conic
        .second_intersection(b, Point::new(0.27, 0.96))
        .expect("line is not asymptotic");
    let p = build_2x2(b, d, f, h, e)?;
    println!("regime {:?}", classify_2x2(&p)?);

    let report = quartic_trajectory(&p, 50)?;
    for q in report.trajectory.iter().step_by(10) {
        println!(
            "t={:>2}  E=({:+.6}, {:+.6})  residual {:+.1e}",
            q.t, q.e.x, q.e.y, q.residual
        );
    }
    println!("max residual over 50 steps: {:.1e}", report.max_residual);
    Ok(())
}
