//! When every face of a 2×2 pattern is a rectangle, the center vertex
//! alternates between reflection-rotations about the center of the
//! fundamental domain.

use miquel::geom::Point;
use miquel::twobytwo::{pattern_quartic, rectangular_2x2, rotation_law_check, QuarticModel};

fn main() -> miquel::Result<()> {
    let p = rectangular_2x2(1.0, 0.6, -1.0, Point::new(0.3, -0.2))?;
    if let (_, QuarticModel::Rectangular { a, b, c, .. }) = pattern_quartic(&p)? {
        // a = b: the quartic is a pair of circles about the center
        println!("a = {a:.6}  b = {b:.6}  c = {c:.6}");
        let disc = (a * a - 4.0 * c).sqrt();
        println!(
            "radii {:.6} {:.6}",
            ((a - disc) / 2.0).sqrt(),
            ((a + disc) / 2.0).sqrt()
        );
    }
    let r = rotation_law_check(&p, 40)?;
    println!(
        "delta = {:.6} rad, worst deviation over 40 steps {:.1e}",
        r.delta, r.max_deviation
    );
    Ok(())
}
