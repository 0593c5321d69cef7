//! Least-squares projection of a vertex cloud onto the pattern space.
//!
//! Unknowns are every stored vertex except `S(0,0)` and `S(1,0)`, which are
//! pinned at their seed positions to fix the similarity gauge, plus the two
//! monodromy vectors. Each face contributes the imaginary part of the
//! cross-ratio of its corners (zero iff concyclic); the isoradial variant
//! adds one radius-equality residual per face.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::{standard_grid, FaceId, TorusPattern};
use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Debug, Clone, Copy)]
pub struct ForgeOptions {
    pub isoradial: bool,
    pub max_iter: usize,
    /// Required concyclicity residual (and relative radius spread).
    pub tol: f64,
}

impl Default for ForgeOptions {
    fn default() -> Self {
        ForgeOptions {
            isoradial: false,
            max_iter: 200,
            tol: 1e-10,
        }
    }
}

/// Standard grid with uniform noise of the given amplitudes on the vertices
/// and on the monodromy vectors.
pub fn perturbed_seed<R: Rng>(
    m: usize,
    n: usize,
    s: usize,
    vertex_noise: f64,
    monodromy_noise: f64,
    rng: &mut R,
) -> Result<TorusPattern> {
    let g = standard_grid(m, n, s)?;
    let mut jitter = |a: f64| {
        if a > 0.0 {
            Point::new(rng.gen_range(-a..a), rng.gen_range(-a..a))
        } else {
            Point::ORIGIN
        }
    };
    let vertices = g
        .vertices()
        .iter()
        .map(|&p| p + jitter(vertex_noise))
        .collect();
    let u = g.u() + jitter(monodromy_noise);
    let v = g.v() + jitter(monodromy_noise);
    TorusPattern::new(m, n, s, vertices, u, v)
}

struct Layout {
    seed: TorusPattern,
    /// Indices into the stored vertex array that are free.
    free: Vec<usize>,
    isoradial: bool,
}

impl Layout {
    fn new(seed: &TorusPattern, isoradial: bool) -> Self {
        let free = (2..seed.vertices().len()).collect();
        Layout {
            seed: seed.clone(),
            free,
            isoradial,
        }
    }

    fn params(&self, p: &TorusPattern) -> DVector<f64> {
        let mut out = Vec::with_capacity(2 * self.free.len() + 4);
        for &k in &self.free {
            out.push(p.vertices()[k].x);
            out.push(p.vertices()[k].y);
        }
        out.extend([p.u().x, p.u().y, p.v().x, p.v().y]);
        DVector::from_vec(out)
    }

    fn pattern(&self, x: &DVector<f64>) -> TorusPattern {
        let mut p = self.seed.clone();
        for (slot, &k) in self.free.iter().enumerate() {
            p.vertices[k] = Point::new(x[2 * slot], x[2 * slot + 1]);
        }
        let base = 2 * self.free.len();
        p.u = Point::new(x[base], x[base + 1]);
        p.v = Point::new(x[base + 2], x[base + 3]);
        p
    }

    fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        let p = self.pattern(x);
        let faces: Vec<FaceId> = p.faces().collect();
        let mut out = Vec::with_capacity(2 * faces.len());
        let mut radii = Vec::new();
        for &f in &faces {
            let c = p.corners(f).map(Point::to_complex);
            out.push(cross_ratio(c).im);
            if self.isoradial {
                radii.push(p.circumcircle(f).map(|c| c.radius).unwrap_or(f64::NAN));
            }
        }
        if self.isoradial {
            let r0 = radii[0];
            out.extend(radii[1..].iter().map(|r| r / r0 - 1.0));
        }
        DVector::from_vec(out)
    }
}

fn cross_ratio(c: [Complex64; 4]) -> Complex64 {
    (c[0] - c[2]) * (c[1] - c[3]) / ((c[0] - c[3]) * (c[1] - c[2]))
}

fn jacobian(layout: &Layout, x: &DVector<f64>, rows: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(rows, x.len());
    let mut xp = x.clone();
    for k in 0..x.len() {
        let h = 1e-7 * x[k].abs().max(1.0);
        xp[k] = x[k] + h;
        let rp = layout.residuals(&xp);
        xp[k] = x[k] - h;
        let rm = layout.residuals(&xp);
        xp[k] = x[k];
        j.set_column(k, &((rp - rm) / (2.0 * h)));
    }
    j
}

fn max_abs(r: &DVector<f64>) -> f64 {
    r.iter().fold(0.0f64, |a, &b| {
        if b.is_nan() {
            f64::INFINITY
        } else {
            a.max(b.abs())
        }
    })
}

/// Project `seed` onto the space of valid (optionally isoradial) patterns.
///
/// Uses minimum-norm Levenberg–Marquardt steps
/// `δ = −Jᵀ (J Jᵀ + λI)⁻¹ r`, which suit the underdetermined system.
pub fn forge_pattern(seed: &TorusPattern, options: ForgeOptions) -> Result<TorusPattern> {
    let layout = Layout::new(seed, options.isoradial);
    let mut x = layout.params(seed);
    let mut r = layout.residuals(&x);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let target = (options.tol * 1e-4).max(1e-15);
    let mut iterations = 0;
    let mut stalls = 0;

    while iterations < options.max_iter && max_abs(&r) > target && stalls < 8 {
        iterations += 1;
        let j = jacobian(&layout, &x, r.len());
        let jjt = &j * j.transpose();
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jjt.clone();
            for d in 0..a.nrows() {
                a[(d, d)] += lambda;
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = -(j.transpose() * chol.solve(&r));
            let trial = &x + &step;
            let rt = layout.residuals(&trial);
            let ct = rt.norm_squared();
            if ct.is_finite() && ct < cost {
                x = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 5.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            stalls += 1;
        }
    }

    let out = layout.pattern(&x);
    let report = out.validate_with(options.tol.max(1e-12));
    let concyclic = report.max_residual();
    let radius_spread = if options.isoradial {
        radius_spread(&out)
    } else {
        0.0
    };
    let residual = concyclic.max(radius_spread);
    if !(residual < options.tol) {
        return Err(Error::ForgeFailed {
            iterations,
            residual,
        });
    }
    if !report.pass {
        return Err(Error::ForgeDegenerate(report.failures.join("; ")));
    }
    Ok(out)
}

/// Largest relative deviation of a circumradius from the mean.
pub(crate) fn radius_spread(p: &TorusPattern) -> f64 {
    let radii: Vec<f64> = p
        .faces()
        .map(|f| p.circumcircle(f).map(|c| c.radius).unwrap_or(f64::NAN))
        .collect();
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    radii
        .iter()
        .map(|r| (r / mean - 1.0).abs())
        .fold(
            0.0,
            |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) },
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forge_noisy_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seed = perturbed_seed(2, 2, 0, 0.05, 0.0, &mut rng).unwrap();
        assert!(!seed.validate().pass);
        let p = forge_pattern(&seed, ForgeOptions::default()).unwrap();
        assert!(p.validate().pass);
        assert!(p.validate().max_residual() < 1e-10);
        assert_eq!(p.stored(0, 0), seed.stored(0, 0));
        assert_eq!(p.stored(1, 0), seed.stored(1, 0));
    }

    #[test]
    fn valid_seed_is_a_fixed_point() {
        let g = standard_grid(4, 2, 2).unwrap();
        let p = forge_pattern(&g, ForgeOptions::default()).unwrap();
        assert!(p.max_displacement(&g) < 1e-10);
        assert!((p.u() - g.u()).norm() < 1e-10);
    }

    #[test]
    fn forge_isoradial() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let seed = perturbed_seed(4, 2, 0, 0.1, 0.1, &mut rng).unwrap();
        let opts = ForgeOptions {
            isoradial: true,
            ..Default::default()
        };
        let p = forge_pattern(&seed, opts).unwrap();
        assert!(radius_spread(&p) < 1e-9);
        assert!(p.validate().pass);
    }

    #[test]
    fn forge_reports_non_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seed = perturbed_seed(4, 2, 0, 0.2, 0.0, &mut rng).unwrap();
        let opts = ForgeOptions {
            max_iter: 0,
            ..Default::default()
        };
        assert!(matches!(
            forge_pattern(&seed, opts),
            Err(Error::ForgeFailed { .. })
        ));
    }
}
