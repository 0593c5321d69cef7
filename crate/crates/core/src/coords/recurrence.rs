//! Algebraic form of the mutations on the exponentiated angles `X = e^{iφ}`.
//!
//! Around a mutating face, `X_D` is its own variable on side `D` and `Y_D`
//! the variable of the neighbor across that side, on the shared edge. The
//! closed forms are written for the north side; the other sides follow by
//! rotating the face a quarter turn, which sends `N → W → S → E → N` and
//! preserves both the angle conventions and the checkerboard.

use num_complex::Complex64;

use super::{face_slot, Dir, PhiField};
use crate::error::{Error, Result};
use crate::pattern::{Color, FaceId};
use crate::tol;

type C = Complex64;

const ONE: C = C::new(1.0, 0.0);
const SINGULAR: f64 = 1e-12;

/// Unit complex variables, one per (face, direction).
#[derive(Debug, Clone, PartialEq)]
pub struct XField {
    m: usize,
    n: usize,
    s: usize,
    values: Vec<[C; 4]>,
}

impl XField {
    pub fn from_phi(f: &PhiField) -> XField {
        let (m, n, s) = f.shape();
        let values = f
            .values()
            .iter()
            .map(|row| row.map(|a| C::from_polar(1.0, a)))
            .collect();
        XField { m, n, s, values }
    }

    pub fn to_phi(&self) -> PhiField {
        let values = self
            .values
            .iter()
            .map(|row| row.map(|z| tol::wrap_angle(z.arg())))
            .collect();
        PhiField::new(self.m, self.n, self.s, values).expect("shape already checked")
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.s)
    }

    pub fn get(&self, f: FaceId, d: Dir) -> C {
        self.values[face_slot(self.m, self.n, self.s, f)][d.index()]
    }

    fn set(&mut self, f: FaceId, d: Dir, z: C) {
        let k = face_slot(self.m, self.n, self.s, f);
        self.values[k][d.index()] = z;
    }

    /// Largest `| |X| − 1 |` over the field.
    pub fn max_modulus_defect(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.n as i64).flat_map(move |fy| (0..self.m as i64).map(move |fx| FaceId::new(fx, fy)))
    }
}

fn ratio(num: C, den: C, what: &str) -> Result<C> {
    if !(den.norm() > SINGULAR) || !num.is_finite() {
        return Err(Error::SingularConfiguration(format!(
            "vanishing denominator in {what}"
        )));
    }
    Ok(num / den)
}

fn neighbor(f: FaceId, d: Dir) -> FaceId {
    let (dx, dy) = d.offset();
    f.offset(dx, dy)
}

/// The factor contributed by side `a` to the update of the neighbor across
/// side `d`.
fn side_factor(xd: C, yd: C, xa: C, ya: C) -> Result<C> {
    let top = ONE
        - ratio(
            (ONE - xa.inv()) * (ONE - yd.inv()),
            (ONE - ya) * (ONE - xd),
            "Y update",
        )?;
    let bottom = ONE
        - ratio(
            (ONE - xa) * (ONE - yd),
            (ONE - ya.inv()) * (ONE - xd.inv()),
            "Y update",
        )?;
    ratio(top, bottom, "Y update")
}

/// Apply the mutation of every face of `color` to the field.
///
/// All neighbor variables are updated first from the old values; the
/// mutating faces' own variables then use the old values together with the
/// new neighbor variables.
pub fn recurrence_step(x: &XField, color: Color) -> Result<XField> {
    let mutating: Vec<FaceId> = x.faces().filter(|f| f.color() == color).collect();
    let mut out = x.clone();

    for &f in &mutating {
        let xs = Dir::ALL.map(|d| x.get(f, d));
        let ys = Dir::ALL.map(|d| x.get(neighbor(f, d), d.opposite()));
        for d in Dir::ALL {
            let (l, r) = (d.ccw().index(), d.cw().index());
            let (xd, yd) = (xs[d.index()], ys[d.index()]);
            let new = yd * side_factor(xd, yd, xs[l], ys[l])? * side_factor(xd, yd, xs[r], ys[r])?;
            out.set(neighbor(f, d), d.opposite(), new / new.norm());
        }
    }

    for &f in &mutating {
        let xs = Dir::ALL.map(|d| x.get(f, d));
        let ys = Dir::ALL.map(|d| x.get(neighbor(f, d), d.opposite()));
        let yn = Dir::ALL.map(|d| out.get(neighbor(f, d), d.opposite()));
        for d in Dir::ALL {
            let (k, l) = (d.index(), d.ccw().index());
            let top = ONE
                - ratio(
                    (ONE - xs[k].inv()) * (ONE - ys[l].inv()) * (ONE - yn[k].inv()),
                    (ONE - ys[k]) * (ONE - xs[l]) * (ONE - yn[l]),
                    "X update",
                )?;
            let bottom = ONE
                - ratio(
                    (ONE - xs[k]) * (ONE - ys[l]) * (ONE - yn[k]),
                    (ONE - ys[k].inv()) * (ONE - xs[l].inv()) * (ONE - yn[l].inv()),
                    "X update",
                )?;
            let new = ratio(top, bottom, "X update")?;
            out.set(f, d, new / new.norm());
        }
    }
    Ok(out)
}

/// Closed-form solution for the unknown pair `(C₀, D₀)` given
/// `C_j = e^{ic_j}`, `D_j = e^{id_j}` for `j = 1..k`, under the hypotheses
/// `½ Σ_{j=0}^{k} (c_j + d_j) ≡ pπ (mod 2π)` and
/// `Π sin(c_j/2) = Π sin(d_j/2)`.
pub fn lemma52_solve_complex(c: &[C], d: &[C], p: u8) -> Result<(C, C)> {
    if c.len() != d.len() || c.is_empty() {
        return Err(Error::InvalidParameters(
            "need two non-empty lists of equal length".into(),
        ));
    }
    if p > 1 {
        return Err(Error::InvalidParameters(format!(
            "parity p must be 0 or 1, got {p}"
        )));
    }
    let sign = if p == 0 { ONE } else { -ONE };
    let prod = |it: &mut dyn Iterator<Item = C>| it.fold(ONE, |a, b| a * b);
    let c_minus_1 = prod(&mut c.iter().map(|&z| z - ONE));
    let d_minus_1 = prod(&mut d.iter().map(|&z| z - ONE));
    let one_minus_cinv = prod(&mut c.iter().map(|&z| ONE - z.inv()));
    let one_minus_dinv = prod(&mut d.iter().map(|&z| ONE - z.inv()));
    let c0 = ratio(
        sign + ratio(one_minus_dinv, c_minus_1, "C0")?,
        sign + ratio(d_minus_1, one_minus_cinv, "C0")?,
        "C0",
    )?;
    let d0 = ratio(
        sign + ratio(one_minus_cinv, d_minus_1, "D0")?,
        sign + ratio(c_minus_1, one_minus_dinv, "D0")?,
        "D0",
    )?;
    Ok((c0, d0))
}

/// Angle form of [`lemma52_solve_complex`]; returns the unit complex pair.
pub fn lemma52_solve(c: &[f64], d: &[f64], p: u8) -> Result<(C, C)> {
    let cz: Vec<C> = c.iter().map(|&a| C::from_polar(1.0, a)).collect();
    let dz: Vec<C> = d.iter().map(|&a| C::from_polar(1.0, a)).collect();
    lemma52_solve_complex(&cz, &dz, p)
}
