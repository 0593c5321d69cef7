//! Four circles meeting at four concyclic points, then the same with one
//! point pushed off the common circle: the alternating sum of exterior
//! angles and the concyclicity of the second intersections fail together.

use miquel::geom::{concyclicity_residual, MiquelConfiguration};
use miquel::Point;

fn report(label: &str, cfg: &MiquelConfiguration) -> miquel::Result<()> {
    let b = cfg.b;
    println!(
        "{label:<10} angle residual {:.2e}   B concyclicity {:.2e}",
        cfg.miquel_residual()?,
        concyclicity_residual(b[0], b[1], b[2], b[3])
    );
    Ok(())
}

fn main() -> miquel::Result<()> {
    let on_unit = |t: f64| Point::new(t.cos(), t.sin());
    let a = [on_unit(0.2), on_unit(1.7), on_unit(3.3), on_unit(4.9)];
    let through = [
        Point::new(1.6, -0.7),
        Point::new(1.1, 1.7),
        Point::new(-1.8, 0.8),
        Point::new(-0.5, -1.9),
    ];
    report("concyclic", &MiquelConfiguration::new(a, through)?)?;

    let mut off = a;
    off[2] = off[2] * 1.02;
    report("perturbed", &MiquelConfiguration::new(off, through)?)?;
    Ok(())
}
