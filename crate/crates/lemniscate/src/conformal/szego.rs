//! Disk map of a smooth Jordan curve through the Szego kernel.
//!
//! The kernel boundary values solve the second-kind integral equation
//! (I - A) S = c_a, where A is the skew difference between the Cauchy kernel
//! and its adjoint (a smooth kernel that vanishes on the diagonal) and
//! c_a(w) = conj((1/2 pi i) T(w)/(w - a)).  The Riemann map f with f(a) = 0,
//! f'(a) > 0 then has boundary values f = -i S^2 T / |S^2 T| and derivative
//! f' = 2 pi S^2 / S(a, a).  The system is solved by conjugate gradients on
//! the normal equations; I - A is a compact perturbation of the identity and
//! a handful of iterations suffice.

use super::curve::{fd8_derivative_real, CurveSamples};
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct SzegoMap {
    pub curve: CurveSamples,
    pub center: Complex64,
    /// Szego kernel boundary values S(z_j, a).
    s_boundary: Vec<Complex64>,
    /// S(a, a) > 0.
    s_center: f64,
    /// f(z_j) on the unit circle.
    boundary_circle: Vec<Complex64>,
    /// Unwrapped boundary angles, strictly increasing, total 2 pi.
    thetas: Vec<f64>,
    /// d theta / d index, for Hermite interpolation.
    dthetas: Vec<f64>,
}

impl SzegoMap {
    pub fn build(curve: CurveSamples, center: Complex64) -> Result<SzegoMap> {
        let n = curve.len();
        let z = &curve.nodes;
        let dz = &curve.dz;
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);

        let tangents: Vec<Complex64> = dz.iter().map(|d| d / d.norm()).collect();
        let weights: Vec<f64> = dz.iter().map(|d| d.norm()).collect();

        // M = I - A, row-major
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    m[j * n + k] = Complex64::new(1.0, 0.0);
                    continue;
                }
                // A(z_j, z_k) = (1/2 pi i)(T_k/(z_k - z_j) + conj(T_j)/conj(z_j - z_k))
                let d = z[k] - z[j];
                let a_jk =
                    (tangents[k] / d - (tangents[j] / d).conj()) / two_pi_i * weights[k];
                m[j * n + k] = -a_jk;
            }
        }
        let rhs: Vec<Complex64> = (0..n)
            .map(|j| (tangents[j] / (z[j] - center) / two_pi_i).conj())
            .collect();

        let s_boundary = solve_normal_cg(&m, &rhs, n)?;
        let s_center: f64 = s_boundary
            .iter()
            .zip(&weights)
            .map(|(s, w)| s.norm_sqr() * w)
            .sum();
        if !(s_center > 0.0) {
            return Err(Error::SzegoSolve {
                iterations: 0,
                residual: f64::NAN,
            });
        }

        let mut boundary_circle = Vec::with_capacity(n);
        for j in 0..n {
            let v = -Complex64::new(0.0, 1.0) * s_boundary[j] * s_boundary[j] * tangents[j];
            let norm = v.norm();
            if norm < 1e-300 {
                return Err(Error::SzegoSolve {
                    iterations: 0,
                    residual: f64::NAN,
                });
            }
            boundary_circle.push(v / norm);
        }

        // unwrap angles and check the boundary correspondence is a strictly
        // increasing degree-one circle map
        let mut thetas = Vec::with_capacity(n);
        let mut prev = boundary_circle[0].arg();
        thetas.push(prev);
        for j in 1..n {
            let raw = boundary_circle[j].arg();
            let mut t = raw;
            while t < prev {
                t += 2.0 * std::f64::consts::PI;
            }
            if t - prev > std::f64::consts::PI {
                return Err(Error::Verification {
                    reason: "boundary correspondence jumped by more than pi".into(),
                });
            }
            thetas.push(t);
            prev = t;
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let closing_gap =
            (boundary_circle[0] / boundary_circle[n - 1]).arg().rem_euclid(two_pi);
        let total = thetas[n - 1] - thetas[0] + closing_gap;
        if (total - two_pi).abs() > 1e-6 {
            return Err(Error::Verification {
                reason: format!(
                    "boundary correspondence winds {:.6} instead of 2 pi",
                    total
                ),
            });
        }
        // differentiate theta minus its linear ramp (periodic), add the
        // slope back
        let slope = two_pi / n as f64;
        let mut dthetas = fd8_derivative_real(&unwrap_periodic_increments(&thetas));
        for d in dthetas.iter_mut() {
            *d += slope;
        }

        Ok(SzegoMap {
            curve,
            center,
            s_boundary,
            s_center,
            boundary_circle,
            thetas,
            dthetas,
        })
    }

    pub fn len(&self) -> usize {
        self.curve.len()
    }

    /// Boundary image f(z_j) at node j.
    pub fn circle_at_node(&self, j: usize) -> Complex64 {
        self.boundary_circle[j]
    }

    /// Unwrapped boundary angle at node j.
    pub fn theta_at_node(&self, j: usize) -> f64 {
        self.thetas[j]
    }

    /// Interior evaluation of the disk map f by the barycentric Cauchy
    /// quotient over the boundary values.
    pub fn to_disk(&self, z: Complex64) -> Complex64 {
        self.cauchy_quotient(&self.boundary_circle, z)
    }

    /// f'(z) = 2 pi S(z, a)^2 / S(a, a) at interior points.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let s = self.cauchy_quotient(&self.s_boundary, z);
        s * s * 2.0 * std::f64::consts::PI / self.s_center
    }

    fn cauchy_quotient(&self, values: &[Complex64], z: Complex64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for j in 0..self.curve.len() {
            let w = self.curve.dz[j] / (self.curve.nodes[j] - z);
            num += values[j] * w;
            den += w;
        }
        num / den
    }

    /// Curve point with boundary image e^{i theta}, by monotone Hermite
    /// inverse interpolation of the boundary correspondence.
    pub fn boundary_from_angle(&self, theta: f64) -> Complex64 {
        let t = self.index_from_angle(theta);
        self.point_at_index(t)
    }

    /// Fractional node index whose boundary angle is theta (mod 2 pi).
    pub fn index_from_angle(&self, theta: f64) -> f64 {
        let n = self.len();
        let two_pi = 2.0 * std::f64::consts::PI;
        let base = self.thetas[0];
        let target = base + (theta - base).rem_euclid(two_pi);
        // binary search over the increasing angle table
        let mut lo = 0usize;
        let mut hi = n; // node n is node 0 shifted by 2 pi
        let theta_at = |j: usize| {
            if j < n {
                self.thetas[j]
            } else {
                self.thetas[0] + two_pi
            }
        };
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if theta_at(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // refine inside [lo, lo+1] with Newton on the Hermite interpolant of
        // theta(index)
        let t0 = theta_at(lo);
        let t1 = theta_at(lo + 1);
        let d0 = self.dthetas[lo % n];
        let d1 = self.dthetas[(lo + 1) % n];
        let mut s = ((target - t0) / (t1 - t0)).clamp(0.0, 1.0);
        for _ in 0..20 {
            let (h, dh) = hermite_real(t0, t1, d0, d1, s);
            let diff = h - target;
            if diff.abs() < 1e-14 {
                break;
            }
            if dh.abs() < 1e-300 {
                break;
            }
            s = (s - diff / dh).clamp(0.0, 1.0);
        }
        lo as f64 + s
    }

    /// Hermite interpolation of the node positions at a fractional index.
    pub fn point_at_index(&self, t: f64) -> Complex64 {
        let n = self.len();
        let base = t.floor();
        let s = t - base;
        let j = (base.rem_euclid(n as f64)) as usize;
        let j1 = (j + 1) % n;
        hermite_complex(
            self.curve.nodes[j],
            self.curve.nodes[j1],
            self.curve.dz[j],
            self.curve.dz[j1],
            s,
        )
    }

    /// Boundary angle at a fractional node index.
    pub fn angle_at_index(&self, t: f64) -> f64 {
        let n = self.len();
        let two_pi = 2.0 * std::f64::consts::PI;
        let wraps = (t / n as f64).floor();
        let tt = t - wraps * n as f64;
        let j = tt.floor() as usize;
        let s = tt - j as f64;
        let j = j.min(n - 1);
        let t0 = self.thetas[j];
        let t1 = if j + 1 < n {
            self.thetas[j + 1]
        } else {
            self.thetas[0] + two_pi
        };
        let (h, _) = hermite_real(t0, t1, self.dthetas[j], self.dthetas[(j + 1) % n], s);
        h + wraps * two_pi
    }

    /// Inverse map: the interior point sent to `w` in the disk.  Seeded by a
    /// Cauchy quotient over the circle nodes and refined by damped Newton on
    /// f; falls back to a coarse grid search if Newton wanders.
    pub fn from_disk(&self, w: Complex64) -> Result<Complex64> {
        if w.norm() >= 1.0 {
            return Err(Error::Input("from_disk needs |w| < 1".into()));
        }
        // seed: Cauchy quotient of the inverse map over circle nodes
        // (d eta = i eta d theta)
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for j in 0..self.len() {
            let eta = self.boundary_circle[j];
            let deta = Complex64::new(0.0, 1.0) * eta * self.dthetas[j];
            let k = deta / (eta - w);
            num += self.curve.nodes[j] * k;
            den += k;
        }
        let mut z = num / den;
        let mut best = (f64::INFINITY, z);
        for _ in 0..60 {
            let f = self.to_disk(z);
            let err = (f - w).norm();
            if err < best.0 {
                best = (err, z);
            }
            if err < 1e-13 {
                return Ok(z);
            }
            let d = self.derivative(z);
            if d.norm() < 1e-300 {
                break;
            }
            let mut step = (f - w) / d;
            // damp steps that would jump outside the sampled region
            let max_step = 0.25 * self.curve.diameter;
            if step.norm() > max_step {
                step *= max_step / step.norm();
            }
            z -= step;
        }
        if best.0 < 1e-9 {
            return Ok(best.1);
        }
        // grid fallback inside the curve bounding box
        let mut grid_best = best;
        let steps = 40;
        let (re0, re1, im0, im1) = bounding_box(&self.curve.nodes);
        for i in 0..=steps {
            for j in 0..=steps {
                let z0 = Complex64::new(
                    re0 + (re1 - re0) * i as f64 / steps as f64,
                    im0 + (im1 - im0) * j as f64 / steps as f64,
                );
                let f = self.to_disk(z0);
                if f.norm() < 1.0 {
                    let err = (f - w).norm();
                    if err < grid_best.0 {
                        grid_best = (err, z0);
                    }
                }
            }
        }
        let mut z = grid_best.1;
        for _ in 0..60 {
            let f = self.to_disk(z);
            let err = (f - w).norm();
            if err < 1e-12 {
                return Ok(z);
            }
            let d = self.derivative(z);
            if d.norm() < 1e-300 {
                break;
            }
            z -= (f - w) / d;
        }
        Err(Error::InverseDiverged { seed: grid_best.1 })
    }
}

fn bounding_box(pts: &[Complex64]) -> (f64, f64, f64, f64) {
    let mut re = (f64::INFINITY, f64::NEG_INFINITY);
    let mut im = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        re = (re.0.min(p.re), re.1.max(p.re));
        im = (im.0.min(p.im), im.1.max(p.im));
    }
    (re.0, re.1, im.0, im.1)
}

/// Cubic Hermite on [0, 1] with endpoint derivatives, returning value and
/// derivative.
fn hermite_real(y0: f64, y1: f64, d0: f64, d1: f64, s: f64) -> (f64, f64) {
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    let v = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
    let dh00 = 6.0 * s * (s - 1.0);
    let dh10 = (1.0 - s) * (1.0 - 3.0 * s);
    let dh01 = -dh00;
    let dh11 = s * (3.0 * s - 2.0);
    let dv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (v, dv)
}

fn hermite_complex(
    y0: Complex64,
    y1: Complex64,
    d0: Complex64,
    d1: Complex64,
    s: f64,
) -> Complex64 {
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    y0 * h00 + d0 * h10 + y1 * h01 + d1 * h11
}

/// Increments of an increasing angle sequence, as a periodic signal suitable
/// for fd8 differentiation (the raw sequence itself is not periodic).
fn unwrap_periodic_increments(thetas: &[f64]) -> Vec<f64> {
    // theta minus the linear ramp is periodic; differentiate that and add
    // the ramp slope back
    let n = thetas.len();
    let slope = 2.0 * std::f64::consts::PI / n as f64;
    let detrended: Vec<f64> = thetas
        .iter()
        .enumerate()
        .map(|(j, &t)| t - slope * j as f64)
        .collect();
    detrended
}

/// CG on the normal equations M^H M x = M^H b for a dense square system.
fn solve_normal_cg(m: &[Complex64], b: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let matvec = |x: &[Complex64]| -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            let row = &m[j * n..(j + 1) * n];
            for (k, xv) in x.iter().enumerate() {
                acc += row[k] * xv;
            }
            y[j] = acc;
        }
        y
    };
    let matvec_adj = |x: &[Complex64]| -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let xv = x[j];
            let row = &m[j * n..(j + 1) * n];
            for (k, yv) in y.iter_mut().enumerate() {
                *yv += row[k].conj() * xv;
            }
        }
        y
    };

    let rhs = matvec_adj(b);
    let rhs_norm: f64 = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rs: f64 = r.iter().map(|v| v.norm_sqr()).sum();
    let max_iter = 500;
    for it in 0..max_iter {
        if rs.sqrt() <= 1e-13 * rhs_norm {
            return Ok(x);
        }
        let mp = matvec_adj(&matvec(&p));
        let denom: f64 = p
            .iter()
            .zip(&mp)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        if denom.abs() < 1e-300 {
            return Err(Error::SzegoSolve {
                iterations: it,
                residual: rs.sqrt() / rhs_norm,
            });
        }
        let alpha = rs / denom;
        for k in 0..n {
            x[k] += p[k] * alpha;
            r[k] -= mp[k] * alpha;
        }
        let rs_new: f64 = r.iter().map(|v| v.norm_sqr()).sum();
        let beta = rs_new / rs;
        for k in 0..n {
            p[k] = r[k] + p[k] * beta;
        }
        rs = rs_new;
    }
    if rs.sqrt() <= 1e-9 * rhs_norm {
        return Ok(x);
    }
    Err(Error::SzegoSolve {
        iterations: max_iter,
        residual: rs.sqrt() / rhs_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_samples(center: Complex64, radius: f64, n: usize) -> CurveSamples {
        let pts: Vec<Complex64> = (0..720)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 720.0;
                center + radius * Complex64::new(t.cos(), t.sin())
            })
            .collect();
        let polish = move |z: Complex64| {
            let d = z - center;
            Some(center + d / d.norm() * radius)
        };
        CurveSamples::from_closed_polyline(&pts, n, Some(&polish)).unwrap()
    }

    #[test]
    fn identity_on_unit_circle() {
        let m = SzegoMap::build(circle_samples(Complex64::new(0.0, 0.0), 1.0, 128), Complex64::new(0.0, 0.0))
            .unwrap();
        for j in 0..m.len() {
            assert!((m.circle_at_node(j) - m.curve.nodes[j]).norm() < 1e-7);
        }
        let z = Complex64::new(0.3, 0.2);
        assert!((m.to_disk(z) - z).norm() < 1e-9);
        assert!((m.derivative(z) - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn affine_circle() {
        // curve = circle radius 2 center 1: f(z) = (z - 1)/2
        let m = SzegoMap::build(circle_samples(Complex64::new(1.0, 0.0), 2.0, 128), Complex64::new(1.0, 0.0))
            .unwrap();
        for j in 0..m.len() {
            let expect = (m.curve.nodes[j] - Complex64::new(1.0, 0.0)) / 2.0;
            assert!((m.circle_at_node(j) - expect).norm() < 1e-7);
        }
        let w = Complex64::new(0.4, -0.1);
        let z = m.from_disk(w).unwrap();
        assert!((z - (Complex64::new(1.0, 0.0) + w * 2.0)).norm() < 1e-9);
    }

    #[test]
    fn boundary_interpolation_roundtrip() {
        let m = SzegoMap::build(circle_samples(Complex64::new(0.0, 0.0), 1.0, 128), Complex64::new(0.0, 0.0))
            .unwrap();
        for k in 0..17 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 17.0 + 0.05;
            let z = m.boundary_from_angle(theta);
            assert!((z - Complex64::new(theta.cos(), theta.sin())).norm() < 1e-6);
        }
    }
}
