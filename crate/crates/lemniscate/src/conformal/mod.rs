//! Fingerprints of lemniscates: the circle homeomorphism k obtained by
//! comparing the interior and exterior Riemann maps of a smooth level-curve
//! component, and the Blaschke-product identities it satisfies.
//!
//! Three identity checks are provided, dispatched by where the roots of p
//! sit relative to the curve: all roots inside (the proper case, where the
//! exterior map is the explicit branch of p^{1/n}), a single distinct root
//! inside a circle-domain component, and two distinct roots inside a
//! ring-domain component.  All residuals compare branch-free powers, so no
//! fractional-power ambiguity enters: p composed with a boundary
//! parametrization is evaluated directly on the appropriate side.

pub mod curve;
pub mod szego;

pub use curve::CurveSamples;
pub use szego::SzegoMap;

use crate::error::{Error, Result};
use crate::oracle;
use crate::poly::Polynomial;
use crate::qd::QuadraticDifferential;
use crate::rational::ChartPos;
use crate::tol::Tolerances;
use num_complex::Complex64;
use serde::Serialize;

/// Finite product of Moebius factors (z - a)/(1 - conj(a) z) with a rotation,
/// unimodular on the unit circle.  Factor base points inside the disk give
/// the classical Blaschke product; base points outside arise for
/// exterior-normalized products and are accepted as long as they stay off
/// the circle itself.
#[derive(Debug, Clone, Serialize)]
pub struct BlaschkeProduct {
    pub rotation: f64,
    pub factors: Vec<(Complex64, u32)>,
}

impl BlaschkeProduct {
    pub fn new(rotation: f64, factors: Vec<(Complex64, u32)>) -> Result<BlaschkeProduct> {
        for (a, _) in &factors {
            if ((a.norm() - 1.0).abs()) < 1e-9 {
                return Err(Error::BlaschkeFactorOnCircle { factor: *a });
            }
        }
        Ok(BlaschkeProduct { rotation, factors })
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, m)| m).sum()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut out = Complex64::from_polar(1.0, self.rotation);
        for (a, mult) in &self.factors {
            let den = Complex64::new(1.0, 0.0) - a.conj() * z;
            if den.norm() < 1e-13 * (1.0 + z.norm()) {
                return Err(Error::BlaschkePole { point: z });
            }
            let factor = (z - a) / den;
            for _ in 0..*mult {
                out *= factor;
            }
        }
        Ok(out)
    }
}

/// The numerical interior Riemann map of a curve component, direction
/// disk -> interior, normalized by phi(0) = z0 and positive derivative
/// there.  `rotation` lets tests compose with a disk rotation without
/// re-solving.
#[derive(Debug, Clone)]
pub struct DiskMap {
    szego: SzegoMap,
    pub rotation: f64,
    pub achieved_accuracy: f64,
}

impl DiskMap {
    /// Boundary point phi(e^{i theta}).
    pub fn boundary(&self, theta: f64) -> Complex64 {
        self.szego.boundary_from_angle(theta + self.rotation)
    }

    /// Interior evaluation phi(w) for |w| < 1.
    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        self.szego
            .from_disk(w * Complex64::from_polar(1.0, self.rotation))
    }

    /// Disk preimage of an interior point: phi^{-1}(z).
    pub fn preimage(&self, z: Complex64) -> Complex64 {
        self.szego.to_disk(z) * Complex64::from_polar(1.0, -self.rotation)
    }

    pub fn center(&self) -> Complex64 {
        self.szego.center
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.szego.curve.nodes
    }

    /// Boundary correspondence angle at node j.
    pub fn theta_at_node(&self, j: usize) -> f64 {
        self.szego.theta_at_node(j) - self.rotation
    }

    pub fn with_rotation(&self, alpha: f64) -> DiskMap {
        DiskMap {
            szego: self.szego.clone(),
            rotation: self.rotation + alpha,
            achieved_accuracy: self.achieved_accuracy,
        }
    }

    pub fn curve_diameter(&self) -> f64 {
        self.szego.curve.diameter
    }

    /// M boundary correspondence samples (angle, curve point).
    pub fn correspondence(&self, m: usize) -> Vec<(f64, Complex64)> {
        (0..m)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                (theta, self.boundary(theta))
            })
            .collect()
    }
}

/// The exterior Riemann map of a curve, phi: complement of the closed disk ->
/// exterior of the curve, phi(inf) = inf with positive derivative there.
/// Implemented through inversion about an interior point and the same
/// integral-equation engine.
#[derive(Debug, Clone)]
pub struct ExteriorMap {
    inner: SzegoMap,
    z_c: Complex64,
    /// Exterior boundary angle at each node of the *original* curve
    /// sampling, unwrapped increasing.
    thetas: Vec<f64>,
    dthetas: Vec<f64>,
    nodes: Vec<Complex64>,
    node_dz: Vec<Complex64>,
}

impl ExteriorMap {
    pub fn build(curve: &CurveSamples, z_c: Complex64) -> Result<ExteriorMap> {
        let closed: Vec<Complex64> = curve
            .nodes
            .iter()
            .copied()
            .chain(std::iter::once(curve.nodes[0]))
            .collect();
        if oracle::winding_number(&closed, z_c)? != 1 {
            return Err(Error::PointNotInterior { point: z_c });
        }
        let inverted = curve.invert_through(z_c);
        let inner = SzegoMap::build(inverted, Complex64::new(0.0, 0.0))?;
        let n = curve.len();
        // curve node j maps to inner node n-1-j; the exterior boundary angle
        // there is -arg g (the reciprocal of a unimodular value is its
        // conjugate)
        let mut raw: Vec<f64> = (0..n)
            .map(|j| -inner.theta_at_node(n - 1 - j))
            .collect();
        // unwrap into an increasing sequence
        let two_pi = 2.0 * std::f64::consts::PI;
        for j in 1..n {
            while raw[j] < raw[j - 1] {
                raw[j] += two_pi;
            }
        }
        let slope = two_pi / n as f64;
        let detrended: Vec<f64> = raw
            .iter()
            .enumerate()
            .map(|(j, &t)| t - slope * j as f64)
            .collect();
        let mut dthetas = curve::fd8_derivative_real(&detrended);
        for d in dthetas.iter_mut() {
            *d += slope;
        }
        Ok(ExteriorMap {
            inner,
            z_c,
            thetas: raw,
            dthetas,
            nodes: curve.nodes.clone(),
            node_dz: curve.dz.clone(),
        })
    }

    /// phi^{-1}(z) for z outside the curve; |result| > 1.
    pub fn preimage(&self, z: Complex64) -> Complex64 {
        let u = Complex64::new(1.0, 0.0) / (z - self.z_c);
        Complex64::new(1.0, 0.0) / self.inner.to_disk(u)
    }

    /// Exterior boundary angle at original-curve node j.
    pub fn theta_at_node(&self, j: usize) -> f64 {
        self.thetas[j]
    }

    /// Curve point phi(e^{i theta}), by Hermite inverse interpolation.
    pub fn boundary(&self, theta: f64) -> Complex64 {
        let t = self.index_from_angle(theta);
        self.point_at_index(t)
    }

    /// Exterior angle at a fractional node index of the original sampling.
    pub fn angle_at_index(&self, t: f64) -> f64 {
        let n = self.nodes.len();
        let two_pi = 2.0 * std::f64::consts::PI;
        let wraps = (t / n as f64).floor();
        let tt = t - wraps * n as f64;
        let j = (tt.floor() as usize).min(n - 1);
        let s = tt - j as f64;
        let t0 = self.thetas[j];
        let t1 = if j + 1 < n {
            self.thetas[j + 1]
        } else {
            self.thetas[0] + two_pi
        };
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * t0 + h10 * self.dthetas[j] + h01 * t1 + h11 * self.dthetas[(j + 1) % n]
            + wraps * two_pi
    }

    fn index_from_angle(&self, theta: f64) -> f64 {
        let n = self.nodes.len();
        let two_pi = 2.0 * std::f64::consts::PI;
        let base = self.thetas[0];
        let target = base + (theta - base).rem_euclid(two_pi);
        let theta_at = |j: usize| {
            if j < n {
                self.thetas[j]
            } else {
                self.thetas[0] + two_pi
            }
        };
        let mut lo = 0usize;
        let mut hi = n;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if theta_at(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t0 = theta_at(lo);
        let t1 = theta_at(lo + 1);
        let s = ((target - t0) / (t1 - t0)).clamp(0.0, 1.0);
        lo as f64 + s
    }

    fn point_at_index(&self, t: f64) -> Complex64 {
        let n = self.nodes.len();
        let base = t.floor();
        let s = t - base;
        let j = (base.rem_euclid(n as f64)) as usize;
        let j1 = (j + 1) % n;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        self.nodes[j] * h00 + self.node_dz[j] * h10 + self.nodes[j1] * h01
            + self.node_dz[j1] * h11
    }
}

/// Sampled fingerprint: M pairs (eta, k(eta)) of unimodular values.
#[derive(Debug, Clone, Serialize)]
pub struct Fingerprint {
    pub samples: Vec<(Complex64, Complex64)>,
    pub degree: usize,
}

impl Fingerprint {
    /// Strict monotonicity of the lifted angle and total increase 2 pi.
    pub fn is_monotone_degree_one(&self) -> bool {
        let mut prev: Option<f64> = None;
        let mut total = 0.0;
        let mut first = 0.0;
        for (i, (_, k)) in self.samples.iter().enumerate() {
            let a = k.arg();
            match prev {
                None => {
                    first = a;
                    prev = Some(a);
                }
                Some(p) => {
                    let mut step = a - p;
                    while step < 0.0 {
                        step += 2.0 * std::f64::consts::PI;
                    }
                    if step <= 0.0 || step > std::f64::consts::PI {
                        return false;
                    }
                    total += step;
                    prev = Some(a);
                }
            }
            let _ = i;
        }
        if let Some(p) = prev {
            let mut step = first - p;
            while step < 0.0 {
                step += 2.0 * std::f64::consts::PI;
            }
            total += step;
        }
        (total - 2.0 * std::f64::consts::PI).abs() < 1e-6
    }
}

/// Builds the level-curve polisher for |p| = c used when resampling traced
/// lemniscate components.
pub fn level_polisher<'a>(
    qd: &'a QuadraticDifferential,
    c: f64,
) -> impl Fn(Complex64) -> Option<Complex64> + 'a {
    let log_c = c.ln();
    move |mut z: Complex64| {
        for _ in 0..12 {
            let g = qd.map().log_abs(ChartPos::z(z)) - log_c;
            if g.abs() < 1e-13 {
                return Some(z);
            }
            let l = qd.map().log_deriv(ChartPos::z(z));
            let n = l.norm_sqr();
            if !n.is_finite() || n < 1e-300 {
                return None;
            }
            z -= l.conj() * (g / n);
        }
        Some(z)
    }
}

/// Continuous branch of p^{1/n} along a closed curve, by unwrapped-argument
/// tracking.  Errors when the curve passes too close to a critical point of
/// the differential or when p does not wind n times around the origin.
pub fn exterior_param(
    p: &Polynomial,
    curve: &[Complex64],
    qd: &QuadraticDifferential,
) -> Result<Vec<Complex64>> {
    let n = p.degree().ok_or(Error::DegreeTooSmall)?;
    let diam = crate::geom::diameter(curve);
    for z in qd.zeros() {
        let mut dmin = f64::INFINITY;
        for w in curve.windows(2) {
            let (d2, _) = crate::geom::segment_distance_sq(z.location, w[0], w[1]);
            dmin = dmin.min(d2.sqrt());
        }
        if dmin < 1e-3 * diam {
            return Err(Error::CurveNotSmooth {
                point: z.location,
                distance: dmin,
            });
        }
    }
    let mut out = Vec::with_capacity(curve.len());
    let mut arg = 0.0f64;
    let mut prev: Option<Complex64> = None;
    for &z in curve {
        let v = p.eval(z);
        match prev {
            None => arg = v.arg(),
            Some(pv) => arg += (v / pv).arg(),
        }
        prev = Some(v);
        out.push(Complex64::from_polar(v.norm().powf(1.0 / n as f64), arg / n as f64));
    }
    // closure: p must wind exactly n times along the full curve
    let first = p.eval(curve[0]);
    let closing = if (curve[0] - curve[curve.len() - 1]).norm() > 0.0 {
        (first / prev.unwrap()).arg()
    } else {
        0.0
    };
    let winding = (arg + closing - first.arg()) / (2.0 * std::f64::consts::PI);
    if (winding - n as f64).abs() > 0.05 {
        return Err(Error::BranchWinding {
            measured: winding,
            expected: n as i64,
        });
    }
    Ok(out)
}

/// The explicit conformal map beta p(z)^c of a circle domain around a double
/// pole: c = 1/n when the pole is infinity, c = 1/alpha when it is a zero of
/// p of multiplicity alpha.
#[derive(Debug, Clone)]
pub struct CircleDomainMap {
    pub center: crate::qd::SpherePoint,
    pub exponent: f64,
    pub alpha: usize,
    pub beta: Complex64,
}

pub fn circle_domain_map(
    p: &Polynomial,
    a: crate::qd::SpherePoint,
    tol: &Tolerances,
) -> Result<CircleDomainMap> {
    let n = p.degree().ok_or(Error::DegreeTooSmall)?;
    match a {
        crate::qd::SpherePoint::Infinity => Ok(CircleDomainMap {
            center: a,
            exponent: 1.0 / n as f64,
            alpha: n,
            beta: Complex64::new(1.0, 0.0),
        }),
        crate::qd::SpherePoint::Finite(z) => {
            let roots = p.roots(tol.root_residual)?;
            let root = roots
                .roots
                .iter()
                .find(|r| (r.location - z).norm() <= roots.cluster_tolerance.max(1e-9))
                .ok_or(Error::NotADoublePole { point: z })?;
            Ok(CircleDomainMap {
                center: a,
                exponent: 1.0 / root.multiplicity as f64,
                alpha: root.multiplicity,
                beta: Complex64::new(1.0, 0.0),
            })
        }
    }
}

impl CircleDomainMap {
    /// Branch-tracked values of beta p^c along a polyline inside the circle
    /// domain.
    pub fn map_polyline(&self, p: &Polynomial, curve: &[Complex64]) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(curve.len());
        let mut arg = 0.0f64;
        let mut prev: Option<Complex64> = None;
        for &z in curve {
            let v = p.eval(z);
            match prev {
                None => arg = v.arg(),
                Some(pv) => arg += (v / pv).arg(),
            }
            prev = Some(v);
            out.push(self.beta * Complex64::from_polar(v.norm().powf(self.exponent), arg * self.exponent));
        }
        out
    }
}

/// Numerical interior Riemann map of a closed smooth polyline, normalized by
/// phi(0) = z0 and positive derivative at 0.  `polish` projects resampled
/// nodes back onto the exact curve when one is available.
pub fn riemann_map_disk(
    curve_points: &[Complex64],
    z0: Complex64,
    tol: &Tolerances,
    polish: Option<&dyn Fn(Complex64) -> Option<Complex64>>,
) -> Result<DiskMap> {
    let mut n_nodes = tol.szego_nodes;
    let mut last_err = None;
    for _ in 0..2 {
        let samples = CurveSamples::from_closed_polyline(curve_points, n_nodes, polish)?;
        let closed: Vec<Complex64> = samples
            .nodes
            .iter()
            .copied()
            .chain(std::iter::once(samples.nodes[0]))
            .collect();
        if oracle::winding_number(&closed, z0)? != 1 {
            return Err(Error::PointNotInterior { point: z0 });
        }
        let diameter = samples.diameter;
        let szego = SzegoMap::build(samples, z0)?;
        let accuracy = map_accuracy_estimate(&szego, curve_points, polish);
        let target = tol.map_accuracy * diameter;
        if accuracy <= target {
            return Ok(DiskMap {
                szego,
                rotation: 0.0,
                achieved_accuracy: accuracy,
            });
        }
        last_err = Some(Error::MapAccuracy {
            achieved: accuracy,
            target,
        });
        n_nodes *= 2;
    }
    Err(last_err.unwrap())
}

/// Hausdorff-style accuracy of the boundary correspondence: the image of a
/// dense circle sampling must lie on the curve.  With a polisher the distance
/// is measured against the exact implicit curve, otherwise against the input
/// polyline.
fn map_accuracy_estimate(
    szego: &SzegoMap,
    curve_points: &[Complex64],
    polish: Option<&dyn Fn(Complex64) -> Option<Complex64>>,
) -> f64 {
    let m = 4 * szego.len();
    let mut worst = 0.0f64;
    for i in 0..m {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
        let z = szego.boundary_from_angle(theta);
        let d = match polish {
            Some(f) => match f(z) {
                Some(on_curve) => (z - on_curve).norm(),
                None => f64::INFINITY,
            },
            None => {
                let mut best = f64::INFINITY;
                for w in curve_points.windows(2) {
                    let (d2, _) = crate::geom::segment_distance_sq(z, w[0], w[1]);
                    best = best.min(d2.sqrt());
                }
                best
            }
        };
        worst = worst.max(d);
    }
    worst
}

fn fit_rotation(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (l, r) in lhs.iter().zip(rhs) {
        acc += l * r.conj();
    }
    acc.arg()
}

fn max_residual_with_rotation(lhs: &[Complex64], rhs: &[Complex64]) -> (f64, f64) {
    let theta = fit_rotation(lhs, rhs);
    let rot = Complex64::from_polar(1.0, theta);
    let mut worst = 0.0f64;
    for (l, r) in lhs.iter().zip(rhs) {
        worst = worst.max((l - rot * r).norm());
    }
    (worst, theta)
}

#[derive(Debug, Clone, Serialize)]
pub struct EksReport {
    pub residual: f64,
    pub rotation: f64,
    pub blaschke: BlaschkeProduct,
    pub degree: usize,
}

/// Proper-lemniscate fingerprint identity: the n-th power of the fingerprint
/// equals a Blaschke product with zeros at the disk preimages of the roots
/// of p.  Compares p(z_j) against B(eta_j) at the solver nodes, where both
/// sides are known without interpolation.
pub fn verify_eks(p: &Polynomial, dm: &DiskMap, tol: &Tolerances) -> Result<EksReport> {
    let n = p.degree().ok_or(Error::DegreeTooSmall)?;
    let roots = p.roots(tol.root_residual)?;
    let closed: Vec<Complex64> = dm
        .nodes()
        .iter()
        .copied()
        .chain(std::iter::once(dm.nodes()[0]))
        .collect();
    let mut factors = Vec::new();
    for r in &roots.roots {
        if oracle::winding_number(&closed, r.location)? != 1 {
            return Err(Error::RootOutside { root: r.location });
        }
        let a = dm.preimage(r.location);
        factors.push((a, r.multiplicity as u32));
    }
    let braw = BlaschkeProduct::new(0.0, factors)?;
    let nn = dm.nodes().len();
    let mut lhs = Vec::with_capacity(nn);
    let mut rhs = Vec::with_capacity(nn);
    for j in 0..nn {
        let eta = Complex64::from_polar(1.0, dm.theta_at_node(j));
        lhs.push(p.eval(dm.nodes()[j]));
        rhs.push(braw.eval(eta)?);
    }
    let (residual, rotation) = max_residual_with_rotation(&lhs, &rhs);
    Ok(EksReport {
        residual,
        rotation,
        blaschke: BlaschkeProduct {
            rotation,
            factors: braw.factors,
        },
        degree: n,
    })
}

/// Fingerprint samples for the proper case: k(eta) = p(phi(eta))^{1/n} with
/// the branch tracked along the boundary.
pub fn fingerprint(p: &Polynomial, dm: &DiskMap, m_samples: usize) -> Result<Fingerprint> {
    let n = p.degree().ok_or(Error::DegreeTooSmall)?;
    let mut samples = Vec::with_capacity(m_samples);
    let mut arg = 0.0f64;
    let mut prev: Option<Complex64> = None;
    for i in 0..m_samples {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / m_samples as f64;
        let eta = Complex64::from_polar(1.0, theta);
        let v = p.eval(dm.boundary(theta));
        match prev {
            None => arg = v.arg(),
            Some(pv) => arg += (v / pv).arg(),
        }
        prev = Some(v);
        samples.push((eta, Complex64::from_polar(v.norm().powf(1.0 / n as f64), arg / n as f64)));
    }
    Ok(Fingerprint { samples, degree: n })
}

/// Fingerprint sampled through both numerical maps (ring case): k maps the
/// interior boundary angle of a curve point to its exterior boundary angle.
pub fn fingerprint_ring(
    dm: &DiskMap,
    em: &ExteriorMap,
    m_samples: usize,
) -> Result<Fingerprint> {
    // interior theta grid per node, inverted by the szego map inside dm
    let mut samples = Vec::with_capacity(m_samples);
    for i in 0..m_samples {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / m_samples as f64;
        let eta = Complex64::from_polar(1.0, theta);
        let idx = dm.szego.index_from_angle(theta + dm.rotation);
        let kappa_angle = em.angle_at_index(idx);
        samples.push((eta, Complex64::from_polar(1.0, kappa_angle)));
    }
    Ok(Fingerprint {
        samples,
        degree: 1,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Thm2Report {
    pub residual: f64,
    pub rotation: f64,
    pub alpha: usize,
    pub degree: usize,
    pub exterior_preimages: Vec<Complex64>,
}

/// Circle-domain identity for a component whose interior holds exactly one
/// distinct root a of multiplicity alpha: the alpha-th power of the inverse
/// fingerprint equals z^n times an exterior Blaschke product.  Compares
/// p(z_j) with kappa_j^n B1(kappa_j) at the solver nodes.
pub fn verify_thm2(
    p: &Polynomial,
    a: Complex64,
    curve: &CurveSamples,
    em: &ExteriorMap,
    tol: &Tolerances,
) -> Result<Thm2Report> {
    let n = p.degree().ok_or(Error::DegreeTooSmall)?;
    let roots = p.roots(tol.root_residual)?;
    let closed: Vec<Complex64> = curve
        .nodes
        .iter()
        .copied()
        .chain(std::iter::once(curve.nodes[0]))
        .collect();
    let mut alpha = None;
    let mut exterior = Vec::new();
    for r in &roots.roots {
        let inside = oracle::winding_number(&closed, r.location)? == 1;
        if (r.location - a).norm() <= roots.cluster_tolerance.max(1e-9) {
            if !inside {
                return Err(Error::RootCensus {
                    reason: format!("distinguished root {} is not inside the curve", a),
                });
            }
            alpha = Some(r.multiplicity);
        } else if inside {
            return Err(Error::RootCensus {
                reason: format!("extra root {} inside the curve", r.location),
            });
        } else {
            exterior.push(r);
        }
    }
    let alpha = alpha.ok_or(Error::RootCensus {
        reason: format!("{} is not a root of p", a),
    })?;
    let mut factors = Vec::new();
    let mut preimages = Vec::new();
    for r in &exterior {
        let b = em.preimage(r.location);
        if b.norm() <= 1.0 {
            return Err(Error::RootCensus {
                reason: format!("exterior preimage of {} landed inside the disk", r.location),
            });
        }
        preimages.push(b);
        factors.push((b, r.multiplicity as u32));
    }
    let b1 = BlaschkeProduct::new(0.0, factors)?;
    let nn = curve.len();
    let mut lhs = Vec::with_capacity(nn);
    let mut rhs = Vec::with_capacity(nn);
    for j in 0..nn {
        let kappa = Complex64::from_polar(1.0, em.theta_at_node(j));
        lhs.push(p.eval(curve.nodes[j]));
        rhs.push(kappa.powu(n as u32) * b1.eval(kappa)?);
    }
    let (residual, rotation) = max_residual_with_rotation(&lhs, &rhs);
    Ok(Thm2Report {
        residual,
        rotation,
        alpha,
        degree: n,
        exterior_preimages: preimages,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Thm3Report {
    /// Residual of the functional equation B = A o k on the circle.
    pub residual: f64,
    /// Residual of the interior factorization p(phi_-(eta)) = e^{i t} B(eta).
    pub residual_interior: f64,
    /// Residual of the exterior factorization p(phi_+(eta)) = e^{i t} A(eta).
    pub residual_exterior: f64,
    pub rotation: f64,
    pub alpha: usize,
    pub beta: usize,
    pub interior_preimages: Vec<Complex64>,
    pub exterior_preimages: Vec<Complex64>,
}

/// Ring-domain identity for a component enclosing exactly the two distinct
/// roots a and b: the interior Blaschke product B (zeros at the disk
/// preimages of a and b) equals A o k with A = z^n B2 built from the exterior
/// preimages of the remaining roots.
pub fn verify_thm3(
    p: &Polynomial,
    a: Complex64,
    b: Complex64,
    curve: &CurveSamples,
    dm: &DiskMap,
    em: &ExteriorMap,
    tol: &Tolerances,
) -> Result<Thm3Report> {
    if (a - b).norm() < 1e-12 * (1.0 + a.norm()) {
        return Err(Error::RootCensus {
            reason: "the two distinguished roots coincide".into(),
        });
    }
    let n = p.degree().ok_or(Error::DegreeTooSmall)?;
    let roots = p.roots(tol.root_residual)?;
    let closed: Vec<Complex64> = curve
        .nodes
        .iter()
        .copied()
        .chain(std::iter::once(curve.nodes[0]))
        .collect();
    let mut alpha = None;
    let mut beta_mult = None;
    let mut exterior = Vec::new();
    for r in &roots.roots {
        let inside = oracle::winding_number(&closed, r.location)? == 1;
        let guard = roots.cluster_tolerance.max(1e-9);
        if (r.location - a).norm() <= guard {
            if !inside {
                return Err(Error::RootCensus {
                    reason: format!("root {} is not inside the curve", a),
                });
            }
            alpha = Some(r.multiplicity);
        } else if (r.location - b).norm() <= guard {
            if !inside {
                return Err(Error::RootCensus {
                    reason: format!("root {} is not inside the curve", b),
                });
            }
            beta_mult = Some(r.multiplicity);
        } else if inside {
            return Err(Error::RootCensus {
                reason: format!("extra root {} inside the curve", r.location),
            });
        } else {
            exterior.push(r);
        }
    }
    let alpha = alpha.ok_or(Error::RootCensus {
        reason: format!("{} is not a root of p", a),
    })?;
    let beta_mult = beta_mult.ok_or(Error::RootCensus {
        reason: format!("{} is not a root of p", b),
    })?;

    let a_in = dm.preimage(a);
    let b_in = dm.preimage(b);
    let braw = BlaschkeProduct::new(
        0.0,
        vec![(a_in, alpha as u32), (b_in, beta_mult as u32)],
    )?;
    let mut b2_factors = Vec::new();
    let mut exterior_preimages = Vec::new();
    for r in &exterior {
        let bpt = em.preimage(r.location);
        exterior_preimages.push(bpt);
        b2_factors.push((bpt, r.multiplicity as u32));
    }
    let b2 = BlaschkeProduct::new(0.0, b2_factors)?;
    let a_of = |w: Complex64| -> Result<Complex64> { Ok(w.powu(n as u32) * b2.eval(w)?) };

    // interior and exterior factorizations at the shared curve nodes
    let nn = curve.len();
    let mut p_at_nodes = Vec::with_capacity(nn);
    let mut braw_at_eta = Vec::with_capacity(nn);
    let mut a_at_kappa = Vec::with_capacity(nn);
    for j in 0..nn {
        let pv = p.eval(curve.nodes[j]);
        let eta = Complex64::from_polar(1.0, dm.theta_at_node(j));
        let kappa = Complex64::from_polar(1.0, em.theta_at_node(j));
        p_at_nodes.push(pv);
        braw_at_eta.push(braw.eval(eta)?);
        a_at_kappa.push(a_of(kappa)?);
    }
    let (residual_interior, _) = max_residual_with_rotation(&p_at_nodes, &braw_at_eta);
    let (residual_exterior, _) = max_residual_with_rotation(&p_at_nodes, &a_at_kappa);

    // functional equation B(eta) = A(k(eta)), sampled where both
    // correspondences are exact: eta_j and kappa_j at the shared curve nodes
    let (residual, rotation) = max_residual_with_rotation(&a_at_kappa, &braw_at_eta);
    Ok(Thm3Report {
        residual,
        residual_interior,
        residual_exterior,
        rotation,
        alpha,
        beta: beta_mult,
        interior_preimages: vec![a_in, b_in],
        exterior_preimages,
    })
}
