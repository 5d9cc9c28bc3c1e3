//! Random walks on planar random environments that are translation invariant
//! modulo scaling.
//!
//! The crate is organized around a handful of interlocking pieces:
//!
//! * [`geometry`] — planar primitives (points, squares, polygonal regions,
//!   timed curves) and the curve metric used to compare walks modulo time
//!   parameterization.
//! * [`environment`] — the cell configuration: a windowed collection of
//!   compact planar cells with a conductance-weighted adjacency graph, plus
//!   hypothesis validation and an interchange file format.
//! * [`dyadic`] — uniform dyadic systems of squares (2D) and intervals (1D),
//!   mass-indexed squares and partitions, ergodic-average estimators, and the
//!   mass-transport balance checker.
//! * [`generators`] — concrete environments: conductance grids, the split
//!   grid, percolation faces, long-range lattices, and vertex-cell
//!   subdivisions.
//! * [`harmonic`] — Dirichlet energy, conjugate-gradient Dirichlet solves,
//!   the glued harmonic embeddings over dyadic partitions, corrector
//!   approximation, and energy identities.
//! * [`walk`] — conductance-weighted walks with area/pi holding times,
//!   quadratic-variation covariance estimation, loop-erasure couplings, exit
//!   laws, and recurrence diagnostics.
//! * [`analysis`] — Prokhorov distance on empirical measures,
//!   Kolmogorov-Smirnov statistics, CSV emission, and SVG rendering.

// `!(x > 0.0)`-style guards are used throughout to reject NaN along with
// out-of-range values; the suggested `<=` rewrites would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dyadic;
pub mod environment;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod harmonic;
pub mod rng;
pub mod walk;

pub use crate::environment::{CellConfiguration, CellId, CellStats};
pub use crate::error::{Error, Result};
pub use crate::geometry::{Point, Region, Square, TimedCurve};
