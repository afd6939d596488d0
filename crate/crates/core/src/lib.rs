//! Solver for the monopolist screening problem with two-dimensional consumer
//! types on the unit square and a finite product line along a convex curve
//! `z(y) = (y, F(y))`.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`] holds the problem data (quality curve, cost, density, product
//!   grid) and the hypothesis and market-size checks.
//! - [`geometry`] clips convex polygons against indifference lines and
//!   integrates densities over polygons and segments.
//! - [`solver`] turns breakpoints into prices, regions and profit, computes the
//!   decoupled first-order conditions and solves them in closed form (uniform
//!   density) or numerically.
//! - [`ot`] is the semi-discrete optimal transport companion: splitting
//!   levels, discrete nestedness and dual potentials.
//! - [`oracle`] is an independent brute-force layer (dense consumer-choice
//!   simulation and exhaustive price search).
//! - [`config`], [`report`] and [`cli`] make up the batch front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod model;
pub mod oracle;
pub mod ot;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod solver;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use geometry::{ConvexRegion, IndiffLine, Point};
pub use model::{CostModel, DensityModel, ProductGrid, QualityCurve, ScreeningInstance, Spacing};
pub use solver::{Breakpoints, SolutionBundle, Tariff};
