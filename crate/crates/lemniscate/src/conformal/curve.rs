//! Closed-curve sampling for the integral-equation solver: equal-arclength
//! resampling of a traced polyline, optional Newton polish back onto the
//! implicit level curve, and high-order differentiation of the node sequence.

use crate::error::{Error, Result};
use crate::geom::{diameter, signed_area2};
use num_complex::Complex64;

/// A closed curve sampled at n nodes, counterclockwise, with the derivative
/// of the node sequence (eighth-order periodic finite differences).  The
/// derivative doubles as tangent-and-weight for all boundary quadratures.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub nodes: Vec<Complex64>,
    pub dz: Vec<Complex64>,
    pub length: f64,
    pub diameter: f64,
}

impl CurveSamples {
    /// Resamples a closed polyline at `n` equal-arclength nodes.  `polish`
    /// may project each node back onto the exact curve (for implicit level
    /// curves); resampling is iterated so the final spacing is uniform.
    /// The input must be counterclockwise.
    pub fn from_closed_polyline(
        points: &[Complex64],
        n: usize,
        polish: Option<&dyn Fn(Complex64) -> Option<Complex64>>,
    ) -> Result<CurveSamples> {
        if points.len() < 8 || n < 16 {
            return Err(Error::Input("curve needs at least 8 points and 16 nodes".into()));
        }
        if signed_area2(points) < 0.0 {
            return Err(Error::CurveOrientation);
        }
        let mut current: Vec<Complex64> = points.to_vec();
        if let (Some(&first), Some(&last)) = (current.first(), current.last()) {
            if (first - last).norm() > 0.0 {
                current.push(first);
            }
        }
        // without a polisher each pass cuts corners, so resample only once;
        // with one, iterate until the spacing is uniform on the exact curve
        let passes = if polish.is_some() { 4 } else { 1 };
        let mut nodes = Vec::new();
        for pass in 0..passes {
            nodes = resample_closed(&current, n);
            if let Some(f) = polish {
                for z in nodes.iter_mut() {
                    if let Some(p) = f(*z) {
                        *z = p;
                    }
                }
            }
            if pass + 1 < passes {
                current = nodes.clone();
                current.push(nodes[0]);
            }
        }
        let dz = fd8_derivative(&nodes);
        let length: f64 = dz.iter().map(|d| d.norm()).sum();
        Ok(CurveSamples {
            diameter: diameter(&nodes),
            nodes,
            dz,
            length,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Image of the curve under z -> 1/(z - z_c), reversed so it is again
    /// counterclockwise (as the boundary of the image of the exterior).  The
    /// derivative transforms by the exact chain rule, so quadrature accuracy
    /// carries over even though the image nodes are no longer equally spaced.
    pub fn invert_through(&self, z_c: Complex64) -> CurveSamples {
        let n = self.nodes.len();
        let mut nodes = Vec::with_capacity(n);
        let mut dz = Vec::with_capacity(n);
        for k in 0..n {
            let j = n - 1 - k;
            let d = self.nodes[j] - z_c;
            nodes.push(Complex64::new(1.0, 0.0) / d);
            // d/dk = -d/dj, and d(1/(z-c)) = -dz/(z-c)^2
            dz.push(self.dz[j] / (d * d));
        }
        let length: f64 = dz.iter().map(|d| d.norm()).sum();
        CurveSamples {
            diameter: diameter(&nodes),
            nodes,
            dz,
            length,
        }
    }
}

fn resample_closed(closed: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut cum = Vec::with_capacity(closed.len());
    cum.push(0.0f64);
    for w in closed.windows(2) {
        let last = *cum.last().unwrap();
        cum.push(last + (w[1] - w[0]).norm());
    }
    let total = *cum.last().unwrap();
    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    for i in 0..n {
        let target = total * i as f64 / n as f64;
        while seg + 1 < cum.len() - 1 && cum[seg + 1] < target {
            seg += 1;
        }
        let span = (cum[seg + 1] - cum[seg]).max(1e-300);
        let t = (target - cum[seg]) / span;
        out.push(closed[seg] + (closed[seg + 1] - closed[seg]) * t);
    }
    out
}

/// Eighth-order centered first derivative on a periodic unit-spaced grid.
pub fn fd8_derivative(z: &[Complex64]) -> Vec<Complex64> {
    const COEFF: [(usize, f64); 4] = [
        (1, 4.0 / 5.0),
        (2, -1.0 / 5.0),
        (3, 4.0 / 105.0),
        (4, -1.0 / 280.0),
    ];
    let n = z.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, a) in COEFF {
            acc += (z[(j + k) % n] - z[(j + n - k) % n]) * a;
        }
        out[j] = acc;
    }
    out
}

/// Real-valued fd8 derivative, for boundary-angle sequences.
pub fn fd8_derivative_real(x: &[f64]) -> Vec<f64> {
    const COEFF: [(usize, f64); 4] = [
        (1, 4.0 / 5.0),
        (2, -1.0 / 5.0),
        (3, 4.0 / 105.0),
        (4, -1.0 / 280.0),
    ];
    let n = x.len();
    let mut out = vec![0.0; n];
    for j in 0..n {
        let mut acc = 0.0;
        for (k, a) in COEFF {
            acc += (x[(j + k) % n] - x[(j + n - k) % n]) * a;
        }
        out[j] = acc;
    }
    out
}
