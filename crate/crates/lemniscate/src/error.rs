//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root finder did not converge after {iterations} iterations (worst residual {residual:.3e})")]
    RootsDidNotConverge {
        iterations: usize,
        residual: f64,
        /// Best iterate found so far, one entry per root.
        best: Vec<Complex64>,
    },

    #[error("polynomial must have degree >= 1")]
    DegreeTooSmall,

    #[error("p and q share a root near {near}")]
    NotCoprime { near: Complex64 },

    #[error("divisor balance violated: zeros {zeros} - 2*poles {poles} != -4")]
    DivisorBalance { zeros: i64, poles: i64 },

    #[error("critical value at {point} is degenerate (|w| = {modulus:.3e})")]
    DegenerateCriticalValue { point: Complex64, modulus: f64 },

    #[error("the differential has no finite critical points")]
    NoCriticalPoints,

    #[error("properness test requires a polynomial (constant q)")]
    NotPolynomial,

    #[error("level {level:.6e} collides with critical modulus {critical:.6e}")]
    CriticalLevel { level: f64, critical: f64 },

    #[error("seed {seed} does not lie on the level curve (relative deviation {deviation:.3e})")]
    SeedOffLevel { seed: Complex64, deviation: f64 },

    #[error("seed {seed} is within the capture radius of critical point {point}")]
    SeedNearCriticalPoint { seed: Complex64, point: Complex64 },

    #[error("step collapse near critical point {nearest} after {steps} steps")]
    StepCollapse { nearest: Complex64, steps: usize },

    #[error("trajectory did not close after {steps} steps")]
    NoClosure { steps: usize },

    #[error("trajectory escaped the tracing domain without terminating")]
    Escaped,

    #[error("trajectory captured at a critical point of mismatched level (expected {expected:.6e}, vertex has {found:.6e})")]
    CaptureLevelMismatch { expected: f64, found: f64 },

    #[error("ambiguous capture: approach angle {angle:.4} rad matches no ray of the terminal vertex within tolerance")]
    CaptureAngleAmbiguous { angle: f64 },

    #[error("ray ({vertex}, {ray}) remained unpaired after tracing")]
    UnpairedRay { vertex: usize, ray: usize },

    #[error("face classification failed: {reason}")]
    FaceClassification { reason: String },

    #[error("corner angle {measured:.5} rad is {deviation:.5} rad away from the nearest admissible multiple of {unit:.5} rad")]
    AngleSnap {
        measured: f64,
        deviation: f64,
        unit: f64,
    },

    #[error("winding of a point too close to the polyline (fractional part {fraction:.3})")]
    WindingAmbiguous { fraction: f64 },

    #[error("Blaschke factor base point {factor} lies on the unit circle")]
    BlaschkeFactorOnCircle { factor: Complex64 },

    #[error("evaluation at {point} hits a pole of a Blaschke factor")]
    BlaschkePole { point: Complex64 },

    #[error("branch of p^(1/n) does not close: measured winding {measured:.6}, expected {expected}")]
    BranchWinding { measured: f64, expected: i64 },

    #[error("curve passes within {distance:.3e} of critical point {point}; a smooth component is required")]
    CurveNotSmooth { point: Complex64, distance: f64 },

    #[error("curve has the wrong orientation (clockwise input)")]
    CurveOrientation,

    #[error("{point} is not a double pole of the differential")]
    NotADoublePole { point: Complex64 },

    #[error("point {point} is not strictly inside the curve")]
    PointNotInterior { point: Complex64 },

    #[error("root {root} lies outside the curve component")]
    RootOutside { root: Complex64 },

    #[error("root census mismatch: {reason}")]
    RootCensus { reason: String },

    #[error("conformal map accuracy {achieved:.3e} did not meet the target {target:.3e}")]
    MapAccuracy { achieved: f64, target: f64 },

    #[error("integral equation solve did not converge ({iterations} iterations, residual {residual:.3e})")]
    SzegoSolve { iterations: usize, residual: f64 },

    #[error("inverse evaluation did not converge near {seed}")]
    InverseDiverged { seed: Complex64 },

    #[error("verification failed: {reason}")]
    Verification { reason: String },

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
