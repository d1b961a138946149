//! Numerical tolerances used across the pipeline.
//!
//! One instance is threaded through every stage and echoed into reports, so a
//! run is reproducible from its own output.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative residual target for the polynomial root finder.
    pub root_residual: f64,
    /// Relative clustering radius for merging near-coincident roots into
    /// multiple roots.
    pub root_cluster: f64,
    /// Relative tolerance for comparing critical-value moduli.
    pub modulus_equality: f64,
    /// Relative deviation of |r| from the target level allowed at trajectory
    /// samples.
    pub trace_level: f64,
    /// Relative deviation of |r| from the level allowed at segment midpoints;
    /// bounds the sagitta of each polyline chord.
    pub trace_chord: f64,
    /// Levels closer than this (relative) to a critical modulus are refused by
    /// the plain level tracer.
    pub level_guard: f64,
    /// Launch offset from a zero, as a fraction of the local critical-point
    /// separation.
    pub launch_radius: f64,
    /// Capture radius as a multiple of the launch radius.
    pub capture_factor: f64,
    /// Corner angles may deviate from an admissible multiple by at most this
    /// many radians before snapping fails (2 degrees).
    pub angle_snap: f64,
    /// Conformal map accuracy target, relative to the curve diameter.
    pub map_accuracy: f64,
    /// Acceptance threshold for fingerprint theorem residuals.
    pub fingerprint_tol: f64,
    /// Boundary samples for fingerprints.
    pub fingerprint_samples: usize,
    /// Quadrature nodes for the integral-equation conformal map solver.
    pub szego_nodes: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_residual: 1e-12,
            root_cluster: 1e-6,
            modulus_equality: 1e-9,
            trace_level: 1e-9,
            trace_chord: 1e-5,
            level_guard: 1e-6,
            launch_radius: 1e-4,
            capture_factor: 10.0,
            angle_snap: 2.0 * std::f64::consts::PI / 180.0,
            map_accuracy: 1e-6,
            fingerprint_tol: 1e-3,
            fingerprint_samples: 1024,
            szego_nodes: 512,
        }
    }
}

/// Hard step-size bounds for the trajectory marcher.
pub const STEP_MIN: f64 = 1e-5;
pub const STEP_MAX: f64 = 1e-1;
