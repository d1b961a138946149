//! Lemniscates as level curves: critical graphs of the quadratic differential
//! -(r'/r)^2 dz^2, domain decompositions, and fingerprints via Blaschke
//! products.
//!
//! For a rational map r = p/q, the level curves of |r| foliate the sphere and
//! degenerate precisely at the zeros of the differential above.  This crate
//! computes that structure numerically:
//!
//! - [`poly`]: complex polynomial arithmetic and all-roots-at-once finding;
//! - [`qd`]: zeros, double poles and residues of the differential, the
//!   critical-value table, connectivity and properness predicates;
//! - [`trace`]: predictor-corrector tracing of level curves and of the
//!   critical trajectories that bound them;
//! - [`graph`]: assembly of the critical graph, its faces and the circle/ring
//!   domain census;
//! - [`teich`]: the integer angle-count identity verified on every face;
//! - [`conformal`]: Riemann maps of lemniscate components, fingerprints, and
//!   the three Blaschke-product identities they satisfy;
//! - [`oracle`]: slow marching-squares ground truth used by the test suite.
//!
//! The `lemniscate` binary exposes the pipeline as `analyze`, `render`,
//! `fingerprint` and `verify` subcommands; the `examples/` directory shows
//! each capability as a runnable program.

pub mod cli;
pub mod conformal;
pub mod error;
pub mod geom;
pub mod graph;
pub mod oracle;
pub mod poly;
pub mod qd;
pub mod rational;
pub mod report;
pub mod svg;
pub mod teich;
pub mod tol;
pub mod trace;

pub use error::{Error, Result};
pub use poly::{coprime, wronskian_numerator, Polynomial, Root, RootSet};
pub use qd::{InfinityKind, Properness, QuadraticDifferential, SpherePoint};
pub use rational::RationalMap;
pub use tol::Tolerances;
