//! Shared numerical thresholds.
//!
//! Geometric predicates are relative: they scale with the local feature
//! size (a circumradius or a point-set diameter) so that every check is
//! invariant under similarities.

/// Relative tolerance for geometric predicates.
pub const GEOM: f64 = 1e-9;

/// Angles within this distance of `0` or `2π` are treated as degenerate.
pub const ANGLE: f64 = 1e-9;

/// Default acceptance threshold for the concyclicity residual of a face.
pub const CONCYCLIC: f64 = 1e-9;

/// Concyclicity threshold for the output of a mutation. Each step reflects
/// vertices across lines through computed centers, so roundoff accumulates
/// along an orbit and grows near configurations with close centers.
pub const EVOLUTION: f64 = 1e-7;

/// Default threshold for the φ-coordinate consistency conditions.
pub const CONDITIONS: f64 = 1e-8;

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = a.rem_euclid(tau);
    if r >= tau {
        0.0
    } else {
        r
    }
}

/// Distance from `a` to the nearest point of `period·ℤ`.
pub fn lattice_distance(a: f64, period: f64) -> f64 {
    let r = a.rem_euclid(period);
    r.min(period - r)
}

/// Distance between two angles taken modulo `2π`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    lattice_distance(a - b, std::f64::consts::TAU)
}
