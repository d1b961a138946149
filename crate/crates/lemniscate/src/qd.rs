//! Structural model of the quadratic differential -(r'/r)^2 dz^2: zeros with
//! multiplicities, double poles with residues, the classification of infinity,
//! and the critical-value predicates built on it.

use crate::error::{Error, Result};

use crate::rational::{Chart, ChartPos, RationalMap};
use crate::tol::Tolerances;
use num_complex::Complex64;
use serde::Serialize;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Local chart in which this point is an ordinary point.
    pub fn chart(self) -> Chart {
        match self {
            SpherePoint::Finite(_) => Chart::Z,
            SpherePoint::Infinity => Chart::U,
        }
    }

    /// Coordinate of the point in its own chart.
    pub fn local_coord(self) -> Complex64 {
        match self {
            SpherePoint::Finite(z) => z,
            SpherePoint::Infinity => Complex64::new(0.0, 0.0),
        }
    }
}

impl std::fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}", z),
            SpherePoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Role of the point at infinity in the differential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InfinityKind {
    /// deg N = deg(pq) - 1, equivalently deg p != deg q; the residue is
    /// -(deg p - deg q)^2.
    DoublePole { residue: f64 },
    /// deg N < deg(pq) - 2; multiplicity 2 (deg pq - deg N) - 4.
    Zero { multiplicity: usize },
    /// deg N = deg(pq) - 2.
    Regular,
}

/// A finite zero of the differential.  `numerator_multiplicity` is the
/// multiplicity k of the root of N; the differential squares N, so the zero
/// has multiplicity m = 2k and carries m + 2 rays.
#[derive(Debug, Clone, Copy)]
pub struct QdZero {
    pub location: Complex64,
    pub numerator_multiplicity: usize,
    pub multiplicity: usize,
}

/// A double pole at a root of pq.  `signed_multiplicity` is m_a: positive at
/// zeros of r, negative at poles of r.  The residue is -m_a^2.
#[derive(Debug, Clone, Copy)]
pub struct QdPole {
    pub location: Complex64,
    pub signed_multiplicity: i32,
    pub residue: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CriticalValue {
    pub point: SpherePoint,
    pub value: Complex64,
    pub modulus: f64,
}

#[derive(Debug, Clone)]
pub struct CriticalValueTable {
    pub entries: Vec<CriticalValue>,
}

#[derive(Debug, Clone)]
pub struct QuadraticDifferential {
    map: RationalMap,
    zeros: Vec<QdZero>,
    poles: Vec<QdPole>,
    infinity: InfinityKind,
    values: CriticalValueTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Properness {
    Proper,
    NotSmooth,
    NotConnected,
}

impl QuadraticDifferential {
    /// Classifies zeros, poles and infinity from the root structure of N and
    /// pq, and tabulates critical values.
    pub fn build(map: RationalMap, tol: &Tolerances) -> Result<QuadraticDifferential> {
        let mut poles: Vec<QdPole> = Vec::new();
        let mut pole_locs: Vec<Complex64> = Vec::new();
        if map.deg_p() >= 1 {
            for root in &map.p().roots(tol.root_residual)?.roots {
                let m = root.multiplicity as i32;
                poles.push(QdPole {
                    location: root.location,
                    signed_multiplicity: m,
                    residue: -((m * m) as f64),
                });
                pole_locs.push(root.location);
            }
        }
        if map.deg_q() >= 1 {
            for root in &map.q().roots(tol.root_residual)?.roots {
                let m = -(root.multiplicity as i32);
                poles.push(QdPole {
                    location: root.location,
                    signed_multiplicity: m,
                    residue: -((m * m) as f64),
                });
                pole_locs.push(root.location);
            }
        }
        poles.sort_by(|a, b| {
            (a.location.re, a.location.im)
                .partial_cmp(&(b.location.re, b.location.im))
                .unwrap()
        });

        // Zeros of the differential: roots of N that are not roots of pq.
        // Coprimality makes overlap impossible exactly, but a multiple root of
        // p plants a root of N at the same spot, so a guard radius is needed.
        let pole_scale = pole_locs
            .iter()
            .map(|z| z.norm())
            .fold(1.0f64, f64::max);
        let guard = 100.0 * tol.root_cluster * pole_scale;
        let mut zeros: Vec<QdZero> = Vec::new();
        if map.deg_numerator().map_or(false, |d| d >= 1) {
            for root in &map.numerator().roots(tol.root_residual)?.roots {
                let near_pole = pole_locs
                    .iter()
                    .any(|&p| (p - root.location).norm() <= guard);
                if !near_pole {
                    zeros.push(QdZero {
                        location: root.location,
                        numerator_multiplicity: root.multiplicity,
                        multiplicity: 2 * root.multiplicity,
                    });
                }
            }
        }
        zeros.sort_by(|a, b| {
            (a.location.re, a.location.im)
                .partial_cmp(&(b.location.re, b.location.im))
                .unwrap()
        });

        let dn = map.deg_numerator().map_or(-1, |d| d as i64);
        let dpq = map.deg_pq() as i64;
        let infinity = if dn == dpq - 1 {
            let diff = map.deg_p() as f64 - map.deg_q() as f64;
            InfinityKind::DoublePole {
                residue: -(diff * diff),
            }
        } else if dn == dpq - 2 {
            InfinityKind::Regular
        } else {
            InfinityKind::Zero {
                multiplicity: (2 * (dpq - dn) - 4) as usize,
            }
        };

        // Divisor balance on the sphere must come out to -4.
        let zero_total: i64 = zeros.iter().map(|z| z.multiplicity as i64).sum::<i64>()
            + match infinity {
                InfinityKind::Zero { multiplicity } => multiplicity as i64,
                _ => 0,
            };
        let pole_total: i64 =
            poles.len() as i64 + i64::from(matches!(infinity, InfinityKind::DoublePole { .. }));
        if zero_total - 2 * pole_total != -4 {
            return Err(Error::DivisorBalance {
                zeros: zero_total,
                poles: pole_total,
            });
        }

        let mut entries: Vec<CriticalValue> = Vec::new();
        for z in &zeros {
            let w = map.eval(z.location);
            let modulus = w.norm();
            if !modulus.is_finite() || modulus < 1e-300 {
                return Err(Error::DegenerateCriticalValue {
                    point: z.location,
                    modulus,
                });
            }
            entries.push(CriticalValue {
                point: SpherePoint::Finite(z.location),
                value: w,
                modulus,
            });
        }
        if matches!(infinity, InfinityKind::Zero { .. }) {
            // deg p = deg q here, so r(inf) is the ratio of leading
            // coefficients.
            let w = map.p().leading() / map.q().leading();
            entries.push(CriticalValue {
                point: SpherePoint::Infinity,
                value: w,
                modulus: w.norm(),
            });
        }

        Ok(QuadraticDifferential {
            map,
            zeros,
            poles,
            infinity,
            values: CriticalValueTable { entries },
        })
    }

    pub fn map(&self) -> &RationalMap {
        &self.map
    }

    pub fn zeros(&self) -> &[QdZero] {
        &self.zeros
    }

    pub fn poles(&self) -> &[QdPole] {
        &self.poles
    }

    pub fn infinity(&self) -> InfinityKind {
        self.infinity
    }

    pub fn critical_values(&self) -> &CriticalValueTable {
        &self.values
    }

    /// Zeros of the differential as sphere points, finite ones first and the
    /// zero at infinity (when present) last.  This ordering matches the
    /// critical value table.
    pub fn sphere_zeros(&self) -> Vec<(SpherePoint, usize)> {
        let mut out: Vec<(SpherePoint, usize)> = self
            .zeros
            .iter()
            .map(|z| (SpherePoint::Finite(z.location), z.multiplicity))
            .collect();
        if let InfinityKind::Zero { multiplicity } = self.infinity {
            out.push((SpherePoint::Infinity, multiplicity));
        }
        out
    }

    /// Double poles as sphere points (finite ones plus infinity when it is a
    /// pole).
    pub fn sphere_poles(&self) -> Vec<SpherePoint> {
        let mut out: Vec<SpherePoint> = self
            .poles
            .iter()
            .map(|p| SpherePoint::Finite(p.location))
            .collect();
        if matches!(self.infinity, InfinityKind::DoublePole { .. }) {
            out.push(SpherePoint::Infinity);
        }
        out
    }

    /// Local leading coefficient of the logarithmic derivative at a zero of
    /// the differential: L(z) ~ A (z - z0)^k near a finite zero, and the
    /// analogous coefficient of the u-chart derivative at infinity.
    pub fn local_leading_coeff(&self, point: SpherePoint) -> Result<(Complex64, usize)> {
        match point {
            SpherePoint::Finite(z0) => {
                let zero = self
                    .zeros
                    .iter()
                    .find(|z| (z.location - z0).norm() < 1e-9 * (1.0 + z0.norm()))
                    .ok_or(Error::Input(format!("{} is not a zero of the differential", z0)))?;
                let k = zero.numerator_multiplicity;
                let mut fact = 1.0;
                for i in 2..=k {
                    fact *= i as f64;
                }
                let nk = self.map.numerator().nth_derivative(k).eval(z0) / fact;
                let denom = self.map.p().eval(z0) * self.map.q().eval(z0);
                Ok((nk / denom, k))
            }
            SpherePoint::Infinity => {
                let mult = match self.infinity {
                    InfinityKind::Zero { multiplicity } => multiplicity,
                    _ => {
                        return Err(Error::Input(
                            "infinity is not a zero of the differential".into(),
                        ))
                    }
                };
                let lead_n = self.map.numerator().leading();
                let lead_pq = self.map.p().leading() * self.map.q().leading();
                Ok((-lead_n / lead_pq, mult / 2))
            }
        }
    }

    /// True iff |w_i| = |w_j| within the relative modulus tolerance.  This is
    /// the computable form of the vanishing real period along an arc joining
    /// the two critical points.
    pub fn necessary_condition(&self, i: usize, j: usize, tol: &Tolerances) -> bool {
        let a = self.values.entries[i].modulus;
        let b = self.values.entries[j].modulus;
        moduli_equal(a, b, tol.modulus_equality)
    }

    /// True iff all critical-value moduli coincide, which characterizes a
    /// connected critical graph.
    pub fn connectivity_predicate(&self, tol: &Tolerances) -> Result<bool> {
        if self.values.entries.is_empty() {
            return Err(Error::NoCriticalPoints);
        }
        let m0 = self.values.entries[0].modulus;
        Ok(self
            .values
            .entries
            .iter()
            .all(|e| moduli_equal(e.modulus, m0, tol.modulus_equality)))
    }

    /// All index pairs attaining the maximal critical modulus.  For each such
    /// pair a finite critical trajectory joining the two points must exist.
    pub fn max_modulus_pairs(&self, tol: &Tolerances) -> Vec<(usize, usize)> {
        let entries = &self.values.entries;
        if entries.len() < 2 {
            return Vec::new();
        }
        let max = entries.iter().map(|e| e.modulus).fold(0.0f64, f64::max);
        let at_max: Vec<usize> = (0..entries.len())
            .filter(|&i| moduli_equal(entries[i].modulus, max, tol.modulus_equality))
            .collect();
        let mut out = Vec::new();
        for a in 0..at_max.len() {
            for b in a + 1..at_max.len() {
                out.push((at_max[a], at_max[b]));
            }
        }
        out
    }

    /// Trichotomy for the level-c lemniscate of a polynomial: smooth and
    /// connected iff every critical modulus is below c.
    pub fn properness_test(&self, level: f64, tol: &Tolerances) -> Result<Properness> {
        if !self.map.is_polynomial() {
            return Err(Error::NotPolynomial);
        }
        let mut any_above = false;
        for e in &self.values.entries {
            if moduli_equal(e.modulus, level, tol.modulus_equality) {
                return Ok(Properness::NotSmooth);
            }
            if e.modulus > level {
                any_above = true;
            }
        }
        Ok(if any_above {
            Properness::NotConnected
        } else {
            Properness::Proper
        })
    }

    /// Minimal distance between distinct critical points (zeros and poles),
    /// measured in the local chart of `point`.
    pub fn local_separation(&self, point: SpherePoint) -> f64 {
        let mut best = f64::INFINITY;
        let mut others: Vec<SpherePoint> = Vec::new();
        for (p, _) in self.sphere_zeros() {
            others.push(p);
        }
        for p in self.sphere_poles() {
            others.push(p);
        }
        match point {
            SpherePoint::Finite(z0) => {
                for other in others {
                    match other {
                        SpherePoint::Finite(z) => {
                            let d = (z - z0).norm();
                            if d > 1e-12 * (1.0 + z0.norm()) {
                                best = best.min(d);
                            }
                        }
                        SpherePoint::Infinity => {}
                    }
                }
            }
            SpherePoint::Infinity => {
                for other in others {
                    if let SpherePoint::Finite(z) = other {
                        if z.norm() > 1e-12 {
                            best = best.min(1.0 / z.norm());
                        }
                    }
                }
            }
        }
        if best.is_finite() {
            best
        } else {
            1.0
        }
    }

    /// Chart switch radius: |z| beyond which tracing moves to the u-chart.
    pub fn chart_switch_radius(&self) -> f64 {
        let mut max_root = 0.0f64;
        for p in &self.poles {
            max_root = max_root.max(p.location.norm());
        }
        for z in &self.zeros {
            max_root = max_root.max(z.location.norm());
        }
        10.0 * (max_root + 1.0)
    }

    /// Index into the critical value table for a sphere point, if it is a
    /// zero of the differential.
    pub fn value_index(&self, point: SpherePoint) -> Option<usize> {
        self.values.entries.iter().position(|e| match (e.point, point) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => true,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                (a - b).norm() < 1e-9 * (1.0 + a.norm())
            }
            _ => false,
        })
    }
}

pub fn moduli_equal(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Numerical residue probe: z^2 L(a + z)^2 -> m_a^2 as z -> 0, sampled along
/// four directions.  Used by tests and the verification command.
pub fn residue_probe(qd: &QuadraticDifferential, pole: &QdPole, delta: f64) -> f64 {
    let dirs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut worst: f64 = 0.0;
    let target = (pole.signed_multiplicity * pole.signed_multiplicity) as f64;
    for d in dirs {
        let z = d * delta;
        let l = qd.map().log_deriv(ChartPos::z(pole.location + z));
        let probe = (z * l).norm_sqr();
        worst = worst.max((probe - target).abs() / target);
    }
    worst
}
