//! Miquel dynamics on biperiodic square-grid circle patterns.

// `!(x < tol)` is the NaN-rejecting form used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coords;
pub mod dynamics;
pub mod error;
pub mod geom;
pub mod invariants;
pub mod pattern;
pub mod tol;
pub mod twobytwo;

pub use error::{Error, Result};
pub use geom::{Circle, Line, Point};
pub use pattern::{standard_grid, Color, FaceId, TorusPattern, ValidationReport};
