//! Verification of the angle-count identity on trajectory-bounded polygons:
//! over the corners of a polygon, sum (1 - (m_j + 2) t_j / 2pi) equals
//! 2 + sum of the signed multiplicities inside.
//!
//! A face boundary walk bounds a disc on the sphere (the complement component
//! of the walk that contains the face), and every such disc is checked.
//! After snapping each corner to its admissible multiple of 2pi/(m+2), both
//! sides of the identity are integers and the check is exact.

use crate::error::{Error, Result};
use crate::geom::segment_distance_sq;
use crate::graph::{CriticalGraph, DomainConfiguration, Face, Walk};
use crate::oracle;
use crate::qd::{QuadraticDifferential, SpherePoint};
use crate::tol::Tolerances;
use crate::trace::Trajectory;
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct PolygonCorner {
    pub vertex: SpherePoint,
    /// Multiplicity m of the zero at the corner.
    pub multiplicity: usize,
    /// Interior angle snapped to a multiple of 2 pi / (m + 2).
    pub angle: f64,
    /// The same angle in units of 2 pi / (m + 2).
    pub units: usize,
    /// Angle measured from the incident polyline tangents before snapping.
    pub measured: f64,
}

#[derive(Debug, Clone)]
pub struct InteriorPoint {
    pub point: SpherePoint,
    /// +m for zeros of the differential, -2 for double poles.
    pub signed_multiplicity: i64,
}

/// A disc bounded by trajectory segments, with corner and content data ready
/// for the integer identity.
#[derive(Debug, Clone)]
pub struct QdPolygon {
    pub corners: Vec<PolygonCorner>,
    pub interior: Vec<InteriorPoint>,
    /// True when the disc is the side of its boundary walk containing
    /// infinity.
    pub contains_infinity_side: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct TeichmullerSum {
    pub lhs: i64,
    pub rhs: i64,
}

impl TeichmullerSum {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Left side: corners contribute 1 - units; right side: 2 + interior content.
pub fn teichmuller_sum(polygon: &QdPolygon) -> TeichmullerSum {
    let lhs = polygon
        .corners
        .iter()
        .map(|c| 1 - c.units as i64)
        .sum::<i64>();
    let rhs = 2 + polygon
        .interior
        .iter()
        .map(|p| p.signed_multiplicity)
        .sum::<i64>();
    TeichmullerSum { lhs, rhs }
}

/// Builds the polygon bounded by one face walk: the disc on the face's side.
/// Corner angles are measured from the five polyline samples nearest each
/// corner and snapped to the admissible multiples; a deviation above the snap
/// tolerance fails loudly.
pub fn polygon_from_walk(
    g: &CriticalGraph,
    qd: &QuadraticDifferential,
    walk: &Walk,
    tol: &Tolerances,
) -> Result<QdPolygon> {
    let mut corners = Vec::new();
    let n = walk.darts.len();
    for (i, corner) in walk.corners.iter().enumerate() {
        let vg = &g.vertices[corner.vertex];
        let m = vg.multiplicity;
        let unit_angle = 2.0 * std::f64::consts::PI / (m as f64 + 2.0);

        // incoming dart ends at the corner, outgoing dart starts there
        let d_in = walk.darts[i];
        let d_out = walk.darts[(i + 1) % n];
        let in_pts = g.dart_points(d_in);
        let out_pts = g.dart_points(d_out);
        let vertex_point = vg.point;
        let dir_in = mean_direction_near(&in_pts, vertex_point, true, qd);
        let dir_out = mean_direction_near(&out_pts, vertex_point, false, qd);
        let measured = match (dir_in, dir_out) {
            (Some(ain), Some(aout)) => (ain - aout).rem_euclid(2.0 * std::f64::consts::PI),
            _ => corner.interior_angle,
        };

        let units_measured = (measured / unit_angle).round();
        let deviation = (measured - units_measured * unit_angle).abs();
        if deviation > tol.angle_snap {
            return Err(Error::AngleSnap {
                measured,
                deviation,
                unit: unit_angle,
            });
        }
        let units = units_measured as usize;
        if units == 0 || units > m + 1 {
            return Err(Error::AngleSnap {
                measured,
                deviation,
                unit: unit_angle,
            });
        }
        // the rotation system fixes the exact angle independently; require
        // agreement
        if units != corner.units {
            return Err(Error::AngleSnap {
                measured,
                deviation: (measured - corner.interior_angle).abs(),
                unit: unit_angle,
            });
        }
        corners.push(PolygonCorner {
            vertex: vg.point,
            multiplicity: m,
            angle: units as f64 * unit_angle,
            units,
            measured,
        });
    }

    // interior census over all critical points not on this walk
    let on_walk: Vec<usize> = walk.corners.iter().map(|c| c.vertex).collect();
    let contains_infinity_side = side_contains_far_point(g, walk, qd);
    let mut interior = Vec::new();
    for (vi, v) in g.vertices.iter().enumerate() {
        if on_walk.contains(&vi) {
            continue;
        }
        if point_in_walk_side(g, walk, v.point, contains_infinity_side)? {
            interior.push(InteriorPoint {
                point: v.point,
                signed_multiplicity: v.multiplicity as i64,
            });
        }
    }
    for pole in qd.sphere_poles() {
        if point_in_walk_side(g, walk, pole, contains_infinity_side)? {
            interior.push(InteriorPoint {
                point: pole,
                signed_multiplicity: -2,
            });
        }
    }

    Ok(QdPolygon {
        corners,
        interior,
        contains_infinity_side,
    })
}

/// Mean unit direction from the corner to the five nearest polyline samples,
/// as an angle in the local chart of the corner.
fn mean_direction_near(
    pts: &[Complex64],
    vertex: SpherePoint,
    incoming: bool,
    qd: &QuadraticDifferential,
) -> Option<f64> {
    let chart_switch = qd.chart_switch_radius();
    // local coordinates around the corner
    let local: Vec<Complex64> = match vertex {
        SpherePoint::Finite(v) => pts.iter().map(|&z| z - v).collect(),
        SpherePoint::Infinity => pts
            .iter()
            .map(|&z| {
                if z.norm() < 1.0 {
                    Complex64::new(f64::INFINITY, 0.0)
                } else {
                    Complex64::new(1.0, 0.0) / z
                }
            })
            .collect(),
    };
    let ordered: Vec<Complex64> = if incoming {
        local.iter().rev().copied().collect()
    } else {
        local.clone()
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut count = 0;
    for &d in ordered.iter() {
        let n = d.norm();
        if n == 0.0 || !n.is_finite() || n > 2.0 * chart_switch {
            continue;
        }
        sum += d / n;
        count += 1;
        if count == 5 {
            break;
        }
    }
    if count == 0 {
        None
    } else {
        Some(sum.arg().rem_euclid(2.0 * std::f64::consts::PI))
    }
}

/// Does the disc on the face side of `walk` contain the far point (infinity)?
fn side_contains_far_point(g: &CriticalGraph, walk: &Walk, qd: &QuadraticDifferential) -> bool {
    if walk.through_infinity {
        // infinity is a boundary corner, not interior to either side
        return false;
    }
    let far = Complex64::new(
        1.43 * qd.chart_switch_radius(),
        0.39 * qd.chart_switch_radius(),
    );
    walk_side(g, walk, far)
}

/// True when `x` lies on the left (face) side of the walk at its nearest
/// segment.
fn walk_side(g: &CriticalGraph, walk: &Walk, x: Complex64) -> bool {
    let mut best = (f64::INFINITY, 0.0f64);
    for d in &walk.darts {
        let pts = g.dart_points(*d);
        for s in pts.windows(2) {
            let (d2, side) = segment_distance_sq(x, s[0], s[1]);
            if d2 < best.0 {
                best = (d2, side);
            }
        }
    }
    best.1 > 0.0
}

fn point_in_walk_side(
    g: &CriticalGraph,
    walk: &Walk,
    point: SpherePoint,
    contains_infinity_side: bool,
) -> Result<bool> {
    match point {
        SpherePoint::Finite(z) => {
            let inside = walk_side(g, walk, z);
            // winding cross-check on finite walks: the disc on the face side
            // has winding 1 around interior points when it is the bounded
            // side, 0 when it is the unbounded side
            if inside && !walk.through_infinity {
                let w = oracle::winding_number(&walk.points, z)?;
                let expected = if contains_infinity_side { 0 } else { 1 };
                if w != expected {
                    return Err(Error::Verification {
                        reason: format!(
                            "containment disagreement at {}: winding {} vs side test",
                            z, w
                        ),
                    });
                }
            }
            Ok(inside)
        }
        SpherePoint::Infinity => {
            if walk.through_infinity {
                Ok(false)
            } else {
                Ok(contains_infinity_side)
            }
        }
    }
}

/// A cornerless polygon from a closed smooth trajectory: interior content by
/// winding number.
pub fn polygon_from_loop(t: &Trajectory, qd: &QuadraticDifferential) -> Result<QdPolygon> {
    if !t.is_closed() {
        return Err(Error::Input("polygon_from_loop needs a closed trajectory".into()));
    }
    let mut interior = Vec::new();
    for (point, m) in qd.sphere_zeros() {
        if let SpherePoint::Finite(z) = point {
            if oracle::winding_number(&t.points, z)? == 1 {
                interior.push(InteriorPoint {
                    point,
                    signed_multiplicity: m as i64,
                });
            }
        }
    }
    for pole in qd.poles() {
        if oracle::winding_number(&t.points, pole.location)? == 1 {
            interior.push(InteriorPoint {
                point: SpherePoint::Finite(pole.location),
                signed_multiplicity: -2,
            });
        }
    }
    Ok(QdPolygon {
        corners: Vec::new(),
        interior,
        contains_infinity_side: false,
    })
}

#[derive(Debug, Clone)]
pub struct FaceCheck {
    pub face: usize,
    pub walk: usize,
    pub sum: TeichmullerSum,
}

/// Verifies the identity on the disc of every boundary walk of every face.
pub fn verify_configuration(
    g: &CriticalGraph,
    qd: &QuadraticDifferential,
    cfg: &DomainConfiguration,
    tol: &Tolerances,
) -> Result<Vec<FaceCheck>> {
    let mut out = Vec::new();
    for (fi, face) in cfg.faces.iter().enumerate() {
        for &wi in &face.walks {
            let polygon = polygon_from_walk(g, qd, &cfg.walks[wi], tol)?;
            out.push(FaceCheck {
                face: fi,
                walk: wi,
                sum: teichmuller_sum(&polygon),
            });
        }
    }
    Ok(out)
}

/// Convenience wrapper used by the acceptance suite and the CLI.
pub fn face_polygons(
    g: &CriticalGraph,
    qd: &QuadraticDifferential,
    cfg: &DomainConfiguration,
    face: &Face,
    tol: &Tolerances,
) -> Result<Vec<QdPolygon>> {
    face.walks
        .iter()
        .map(|&wi| polygon_from_walk(g, qd, &cfg.walks[wi], tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, domain_configurations};
    use crate::poly::Polynomial;
    use crate::rational::RationalMap;
    use crate::trace::{trace_level, vertex_geometry};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup(coeffs: &[f64]) -> (QuadraticDifferential, CriticalGraph, DomainConfiguration) {
        let tol = Tolerances::default();
        let qd = QuadraticDifferential::build(
            RationalMap::polynomial(Polynomial::from_real(coeffs)).unwrap(),
            &tol,
        )
        .unwrap();
        let geom = vertex_geometry(&qd, &tol).unwrap();
        let g = build_graph(&qd, &geom, &tol).unwrap();
        let cfg = domain_configurations(&g, &qd).unwrap();
        (qd, g, cfg)
    }

    #[test]
    fn lobe_polygon_of_eight() {
        let tol = Tolerances::default();
        let (qd, g, cfg) = setup(&[-1.0, 0.0, 1.0]);
        // find the circle face around +1
        let face = cfg
            .faces
            .iter()
            .find(|f| match &f.kind {
                crate::graph::FaceKind::Circle { pole: SpherePoint::Finite(z) } => {
                    (z - c(1.0, 0.0)).norm() < 1e-9
                }
                _ => false,
            })
            .unwrap();
        let polys = face_polygons(&g, &qd, &cfg, face, &tol).unwrap();
        assert_eq!(polys.len(), 1);
        let p = &polys[0];
        assert_eq!(p.corners.len(), 1);
        assert_eq!(p.corners[0].multiplicity, 2);
        assert_eq!(p.corners[0].units, 1);
        assert!((p.corners[0].angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(
            (p.corners[0].measured - std::f64::consts::FRAC_PI_2).abs()
                < Tolerances::default().angle_snap
        );
        assert_eq!(p.interior.len(), 1);
        assert_eq!(p.interior[0].signed_multiplicity, -2);
        let s = teichmuller_sum(p);
        assert_eq!(s.lhs, 0);
        assert_eq!(s.rhs, 0);
    }

    #[test]
    fn cornerless_loop_around_pole() {
        let tol = Tolerances::default();
        let (qd, _, _) = setup(&[-1.0, 0.0, 1.0]);
        // small loop around the root +1 of p encloses exactly one double pole
        let t = trace_level(&qd, 0.25, c(1.1, 0.0), &tol).unwrap();
        let p = polygon_from_loop(&t, &qd).unwrap();
        assert!(p.corners.is_empty());
        let s = teichmuller_sum(&p);
        assert_eq!(s.lhs, 0);
        assert_eq!(s.rhs, 0);
    }

    #[test]
    fn quartic_lobe_polygon() {
        let tol = Tolerances::default();
        let (qd, g, cfg) = setup(&[4.0, 0.0, -5.0, 0.0, 1.0]);
        let face = cfg
            .faces
            .iter()
            .find(|f| match &f.kind {
                crate::graph::FaceKind::Circle { pole: SpherePoint::Finite(z) } => {
                    (z - c(2.0, 0.0)).norm() < 1e-9
                }
                _ => false,
            })
            .unwrap();
        let polys = face_polygons(&g, &qd, &cfg, face, &tol).unwrap();
        let p = &polys[0];
        assert_eq!(p.corners.len(), 1);
        let s = (2.5f64).sqrt();
        assert!((p.corners[0].vertex.finite().unwrap() - c(s, 0.0)).norm() < 1e-9);
        let sum = teichmuller_sum(p);
        assert_eq!(sum.lhs, 0);
        assert_eq!(sum.rhs, 0);
    }

    #[test]
    fn all_faces_of_test_maps() {
        let tol = Tolerances::default();
        for coeffs in [
            vec![-1.0, 0.0, 1.0],
            vec![0.0, -3.0, 0.0, 1.0],
            vec![4.0, 0.0, -5.0, 0.0, 1.0],
        ] {
            let (qd, g, cfg) = setup(&coeffs);
            let checks = verify_configuration(&g, &qd, &cfg, &tol).unwrap();
            assert!(!checks.is_empty());
            for check in checks {
                assert!(
                    check.sum.holds(),
                    "face {} walk {}: {} != {}",
                    check.face,
                    check.walk,
                    check.sum.lhs,
                    check.sum.rhs
                );
            }
        }
    }

    #[test]
    fn snap_failure_is_loud() {
        // a synthetic corner angle far from any admissible multiple
        let tol = Tolerances::default();
        let unit = 2.0 * std::f64::consts::PI / 4.0;
        let measured = unit * 1.5;
        let units_measured = (measured / unit).round();
        let deviation = (measured - units_measured * unit).abs();
        assert!(deviation > tol.angle_snap);
    }
}
