//! Assembly of the critical graph from traced critical trajectories, its
//! embedding on the sphere, and the circle/ring decomposition of the
//! complement.
//!
//! Every zero of multiplicity m contributes m + 2 rays.  Each ray is traced
//! once; a trace from (v, i) ending on (w, j) must be matched by the trace
//! from (w, j) ending on (v, i), and the resulting involution pairs all rays
//! into edges.  Faces come from the rotation system given by the exact ray
//! angles at each vertex; the faces of the full (possibly disconnected)
//! configuration are then identified by which rotation face of every
//! component a sample point lands in.

use crate::error::{Error, Result};
use crate::geom::{segment_distance_sq, Window};
use crate::oracle;
use crate::qd::{QuadraticDifferential, SpherePoint};
use crate::tol::Tolerances;
use crate::trace::{level_components, trace_critical, RayIndex, Trajectory, VertexGeometry};
use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct Edge {
    pub a: RayIndex,
    pub b: RayIndex,
    /// Polyline oriented from a to b.
    pub points: Vec<Complex64>,
    pub level: f64,
    pub arg_change: f64,
}

impl Edge {
    pub fn joins(&self, v: usize, w: usize) -> bool {
        (self.a.vertex == v && self.b.vertex == w) || (self.a.vertex == w && self.b.vertex == v)
    }
}

/// A directed edge side: `forward` walks the stored polyline from a to b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dart {
    pub edge: usize,
    pub forward: bool,
}

impl Dart {
    pub fn id(&self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }

    pub fn reversed(&self) -> Dart {
        Dart {
            edge: self.edge,
            forward: !self.forward,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriticalGraph {
    pub vertices: Vec<VertexGeometry>,
    pub edges: Vec<Edge>,
    /// Component id per vertex.
    pub component_of: Vec<usize>,
    pub component_count: usize,
}

impl CriticalGraph {
    pub fn dart_tail(&self, d: Dart) -> RayIndex {
        let e = &self.edges[d.edge];
        if d.forward {
            e.a
        } else {
            e.b
        }
    }

    pub fn dart_head(&self, d: Dart) -> RayIndex {
        self.dart_tail(d.reversed())
    }

    pub fn dart_points(&self, d: Dart) -> Vec<Complex64> {
        let e = &self.edges[d.edge];
        if d.forward {
            e.points.clone()
        } else {
            e.points.iter().rev().copied().collect()
        }
    }

    /// Edge joining vertices i and j, if one was traced.
    pub fn connecting_trajectory(&self, i: usize, j: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.joins(i, j))
    }
}

/// Traces all rays and pairs them into edges.
pub fn build_graph(
    qd: &QuadraticDifferential,
    geometry: &[VertexGeometry],
    tol: &Tolerances,
) -> Result<CriticalGraph> {
    if geometry.is_empty() {
        return Err(Error::NoCriticalPoints);
    }
    let mut traces: Vec<Vec<Option<(RayIndex, Trajectory)>>> = geometry
        .iter()
        .map(|v| (0..v.rays.len()).map(|_| None).collect())
        .collect();
    for (vi, v) in geometry.iter().enumerate() {
        for ray in 0..v.rays.len() {
            let t = trace_critical(qd, geometry, RayIndex { vertex: vi, ray }, tol)?;
            traces[vi][ray] = Some((t.terminal, t.trajectory));
        }
    }

    // involution check and edge extraction from canonical ray sides
    let mut edges: Vec<Edge> = Vec::new();
    for vi in 0..geometry.len() {
        for ray in 0..geometry[vi].rays.len() {
            let terminal = traces[vi][ray].as_ref().unwrap().0;
            let back = traces[terminal.vertex][terminal.ray]
                .as_ref()
                .map(|(t, _)| *t);
            if back != Some(RayIndex { vertex: vi, ray }) {
                return Err(Error::UnpairedRay { vertex: vi, ray });
            }
            if (terminal.vertex, terminal.ray) < (vi, ray) {
                continue; // the other side is canonical
            }
            let (terminal, trajectory) = traces[vi][ray].as_ref().unwrap();
            edges.push(Edge {
                a: RayIndex { vertex: vi, ray },
                b: *terminal,
                points: trajectory.points.clone(),
                level: trajectory.level,
                arg_change: trajectory.total_arg_change,
            });
        }
    }

    // handshake: every ray belongs to exactly one edge end
    let total_rays: usize = geometry.iter().map(|v| v.rays.len()).sum();
    if 2 * edges.len() != total_rays {
        return Err(Error::FaceClassification {
            reason: format!(
                "handshake failed: {} edges vs {} rays",
                edges.len(),
                total_rays
            ),
        });
    }

    // connected components over vertices
    let mut component_of: Vec<usize> = (0..geometry.len()).collect();
    loop {
        let mut changed = false;
        for e in &edges {
            let (a, b) = (component_of[e.a.vertex], component_of[e.b.vertex]);
            if a != b {
                let m = a.min(b);
                component_of[e.a.vertex] = m;
                component_of[e.b.vertex] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut ids: Vec<usize> = component_of.clone();
    ids.sort_unstable();
    ids.dedup();
    let component_count = ids.len();
    for c in component_of.iter_mut() {
        *c = ids.iter().position(|&x| x == *c).unwrap();
    }

    Ok(CriticalGraph {
        vertices: geometry.to_vec(),
        edges,
        component_of,
        component_count,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Corner {
    pub vertex: usize,
    /// Ray along which the walk leaves the vertex.
    pub out_ray: usize,
    /// Ray along which the walk arrived (the reversed incoming dart).
    pub in_ray: usize,
    /// Interior angle in units of 2 pi / (m + 2).
    pub units: usize,
    pub interior_angle: f64,
}

/// One closed boundary walk of a rotation face, with the face on its left.
#[derive(Debug, Clone)]
pub struct Walk {
    pub darts: Vec<Dart>,
    pub corners: Vec<Corner>,
    pub points: Vec<Complex64>,
    pub component: usize,
    pub through_infinity: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FaceKind {
    Circle { pole: SpherePoint },
    Ring,
}

#[derive(Debug, Clone)]
pub struct Face {
    pub walks: Vec<usize>,
    pub kind: FaceKind,
}

#[derive(Debug, Clone)]
pub struct DomainConfiguration {
    pub walks: Vec<Walk>,
    pub faces: Vec<Face>,
}

impl DomainConfiguration {
    pub fn circle_count(&self) -> usize {
        self.faces
            .iter()
            .filter(|f| matches!(f.kind, FaceKind::Circle { .. }))
            .count()
    }

    pub fn ring_count(&self) -> usize {
        self.faces.iter().filter(|f| f.kind == FaceKind::Ring).count()
    }
}

/// Rotation-system face walks plus the face-on-the-left table, indexed by
/// dart id.
pub fn face_walks(g: &CriticalGraph) -> (Vec<Walk>, Vec<usize>) {
    // (vertex, ray) -> dart leaving there
    let mut dart_at: Vec<Vec<Option<Dart>>> = g
        .vertices
        .iter()
        .map(|v| vec![None; v.rays.len()])
        .collect();
    for (ei, e) in g.edges.iter().enumerate() {
        dart_at[e.a.vertex][e.a.ray] = Some(Dart {
            edge: ei,
            forward: true,
        });
        dart_at[e.b.vertex][e.b.ray] = Some(Dart {
            edge: ei,
            forward: false,
        });
    }
    let next = |d: Dart| -> Dart {
        let head = g.dart_head(d);
        let m = g.vertices[head.vertex].rays.len();
        let prev_ray = (head.ray + m - 1) % m;
        dart_at[head.vertex][prev_ray].unwrap()
    };

    let mut walk_of_dart = vec![usize::MAX; 2 * g.edges.len()];
    let mut walks = Vec::new();
    for e in 0..g.edges.len() {
        for forward in [true, false] {
            let d0 = Dart { edge: e, forward };
            if walk_of_dart[d0.id()] != usize::MAX {
                continue;
            }
            let id = walks.len();
            let mut darts = Vec::new();
            let mut d = d0;
            loop {
                walk_of_dart[d.id()] = id;
                darts.push(d);
                d = next(d);
                if d == d0 {
                    break;
                }
            }
            let mut corners = Vec::new();
            let n = darts.len();
            for i in 0..n {
                let d_in = darts[i];
                let d_out = darts[(i + 1) % n];
                let head = g.dart_head(d_in);
                let out = g.dart_tail(d_out);
                debug_assert_eq!(head.vertex, out.vertex);
                let m = g.vertices[head.vertex].rays.len();
                let units = (head.ray + m - out.ray) % m;
                let units = if units == 0 { m } else { units };
                corners.push(Corner {
                    vertex: head.vertex,
                    out_ray: out.ray,
                    in_ray: head.ray,
                    units,
                    interior_angle: units as f64 * 2.0 * std::f64::consts::PI / m as f64,
                });
            }
            let mut points: Vec<Complex64> = Vec::new();
            let mut through_infinity = false;
            for d in &darts {
                let tail = g.dart_tail(*d);
                let head = g.dart_head(*d);
                if g.vertices[tail.vertex].point.is_infinity()
                    || g.vertices[head.vertex].point.is_infinity()
                {
                    through_infinity = true;
                }
                let mut pts = g.dart_points(*d);
                let dup = match (points.last(), pts.first()) {
                    (Some(&last), Some(&first)) => (last - first).norm() == 0.0,
                    _ => false,
                };
                if dup {
                    pts.remove(0);
                }
                points.extend(pts);
            }
            let component = g.component_of[g.dart_tail(darts[0]).vertex];
            walks.push(Walk {
                darts,
                corners,
                points,
                component,
                through_infinity,
            });
        }
    }
    (walks, walk_of_dart)
}

/// Locates `x` against one component: the id of the rotation-face walk whose
/// face contains it, decided by the side of the nearest polyline segment.
fn locate_in_component(
    g: &CriticalGraph,
    walk_of_dart: &[usize],
    component_edges: &[usize],
    x: Complex64,
) -> usize {
    let mut best = (f64::INFINITY, 0.0f64, 0usize);
    for &ei in component_edges {
        let pts = &g.edges[ei].points;
        for s in pts.windows(2) {
            let (d2, side) = segment_distance_sq(x, s[0], s[1]);
            if d2 < best.0 {
                best = (d2, side, ei);
            }
        }
    }
    let (_, side, ei) = best;
    let dart = Dart {
        edge: ei,
        forward: side > 0.0,
    };
    walk_of_dart[dart.id()]
}

/// A representative point just inside the face of a walk, obtained by
/// offsetting from a mid-edge sample to the left of the walk direction.
fn walk_rep_point(g: &CriticalGraph, walk: &Walk, chart_switch: f64) -> Option<Complex64> {
    // prefer the dart with the longest moderate-|z| stretch
    let mut best: Option<(f64, Dart)> = None;
    for d in &walk.darts {
        let pts = g.dart_points(*d);
        let len: f64 = pts
            .windows(2)
            .filter(|w| w[0].norm() < chart_switch && w[1].norm() < chart_switch)
            .map(|w| (w[1] - w[0]).norm())
            .sum();
        if best.map_or(true, |(l, _)| len > l) {
            best = Some((len, *d));
        }
    }
    let (_, dart) = best?;
    let pts = g.dart_points(dart);
    let moderate: Vec<usize> = (0..pts.len().saturating_sub(1))
        .filter(|&i| pts[i].norm() < 0.5 * chart_switch && pts[i + 1].norm() < 0.5 * chart_switch)
        .collect();
    let &mid = moderate.get(moderate.len() / 2)?;
    let a = pts[mid];
    let b = pts[mid + 1];
    let t = b - a;
    let tn = t.norm();
    if tn == 0.0 {
        return None;
    }
    // clearance to everything except the local stretch around this sample
    let mut clearance = f64::INFINITY;
    for (ei, e) in g.edges.iter().enumerate() {
        for (si, s) in e.points.windows(2).enumerate() {
            if ei == dart.edge {
                let orig = if dart.forward {
                    si as i64
                } else {
                    e.points.len() as i64 - 2 - si as i64
                };
                if (orig - mid as i64).abs() < 12 {
                    continue;
                }
            }
            let (d2, _) = segment_distance_sq(a, s[0], s[1]);
            clearance = clearance.min(d2.sqrt());
        }
    }
    let eps = (clearance / 4.0).min(2.0 * tn).max(1e-12);
    Some(a + Complex64::new(0.0, 1.0) * t / tn * eps)
}

/// Faces of the full configuration, classified by contained double poles:
/// one pole = circle domain, none = ring domain.
pub fn domain_configurations(
    g: &CriticalGraph,
    qd: &QuadraticDifferential,
) -> Result<DomainConfiguration> {
    let (walks, walk_of_dart) = face_walks(g);
    let chart_switch = qd.chart_switch_radius();

    let mut edges_of_component: Vec<Vec<usize>> = vec![Vec::new(); g.component_count];
    for (ei, e) in g.edges.iter().enumerate() {
        edges_of_component[g.component_of[e.a.vertex]].push(ei);
    }

    let tuple_of = |x: Complex64| -> Vec<usize> {
        (0..g.component_count)
            .map(|comp| locate_in_component(g, &walk_of_dart, &edges_of_component[comp], x))
            .collect()
    };

    // regions keyed by their tuple of rotation faces, one per component
    let mut regions: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (wi, w) in walks.iter().enumerate() {
        let rep = walk_rep_point(g, w, chart_switch).ok_or(Error::FaceClassification {
            reason: format!("no representative point for walk {}", wi),
        })?;
        regions.entry(tuple_of(rep)).or_default().push(wi);
    }

    // Euler count for a graph on the sphere with C components
    let expected_faces = 1 + g.component_count + g.edges.len() - g.vertices.len();
    if regions.len() != expected_faces {
        return Err(Error::FaceClassification {
            reason: format!(
                "face census {} does not match Euler count {}",
                regions.len(),
                expected_faces
            ),
        });
    }

    // locate every double pole
    let keys: Vec<Vec<usize>> = regions.keys().cloned().collect();
    let mut pole_census: BTreeMap<Vec<usize>, Vec<SpherePoint>> = BTreeMap::new();
    for pole in qd.sphere_poles() {
        let x = match pole {
            SpherePoint::Finite(z) => z,
            // nothing lies beyond the chart switch radius when infinity is a
            // pole, so any far point shares its face
            SpherePoint::Infinity => Complex64::new(1.37 * chart_switch, 0.41 * chart_switch),
        };
        let t = tuple_of(x);
        if !keys.contains(&t) {
            return Err(Error::FaceClassification {
                reason: format!("pole {} landed outside the face census", pole),
            });
        }
        pole_census.entry(t).or_default().push(pole);
    }

    let mut faces = Vec::new();
    for (tuple, walk_ids) in &regions {
        let poles = pole_census.get(tuple).cloned().unwrap_or_default();
        let kind = match poles.len() {
            0 => FaceKind::Ring,
            1 => FaceKind::Circle { pole: poles[0] },
            n => {
                return Err(Error::FaceClassification {
                    reason: format!("face contains {} double poles", n),
                })
            }
        };
        match kind {
            FaceKind::Circle { .. } if walk_ids.len() != 1 => {
                return Err(Error::FaceClassification {
                    reason: format!("circle face bounded by {} walks", walk_ids.len()),
                });
            }
            FaceKind::Ring if walk_ids.len() != 2 => {
                return Err(Error::FaceClassification {
                    reason: format!("ring face bounded by {} walks", walk_ids.len()),
                });
            }
            _ => {}
        }
        faces.push(Face {
            walks: walk_ids.clone(),
            kind,
        });
    }

    if faces
        .iter()
        .filter(|f| matches!(f.kind, FaceKind::Circle { .. }))
        .count()
        != qd.sphere_poles().len()
    {
        return Err(Error::FaceClassification {
            reason: "circle faces do not match double poles".into(),
        });
    }

    Ok(DomainConfiguration { walks, faces })
}

/// Winding cross-check of the pole census on faces whose walks avoid
/// infinity: the boundary walks of a face wind exactly once in total around
/// the poles inside and zero times around every other pole.
pub fn verify_pole_census_by_winding(
    cfg: &DomainConfiguration,
    qd: &QuadraticDifferential,
) -> Result<()> {
    for face in &cfg.faces {
        if face.walks.iter().any(|&w| cfg.walks[w].through_infinity) {
            continue;
        }
        for pole in qd.poles() {
            let mut total = 0i32;
            for &wi in &face.walks {
                total += oracle::winding_number(&cfg.walks[wi].points, pole.location)?;
            }
            let inside = match &face.kind {
                FaceKind::Circle { pole: p } => match p {
                    SpherePoint::Finite(z) => (z - pole.location).norm() < 1e-9,
                    SpherePoint::Infinity => false,
                },
                FaceKind::Ring => false,
            };
            if (total == 1) != inside {
                return Err(Error::Verification {
                    reason: format!(
                        "winding census mismatch at pole {}: winding {}, census says inside={}",
                        pole.location, total, inside
                    ),
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct LemniscateComponents {
    pub count: usize,
    pub components: Vec<Trajectory>,
}

/// Component count and polylines of the level set |r| = c inside the window.
pub fn lemniscate_components(
    qd: &QuadraticDifferential,
    c: f64,
    window: &Window,
    tol: &Tolerances,
) -> Result<LemniscateComponents> {
    let components = level_components(qd, c, window, tol)?;
    Ok(LemniscateComponents {
        count: components.len(),
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::rational::RationalMap;
    use crate::trace::vertex_geometry;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn graph_of_poly(coeffs: &[f64]) -> (QuadraticDifferential, CriticalGraph) {
        let tol = Tolerances::default();
        let qd = QuadraticDifferential::build(
            RationalMap::polynomial(Polynomial::from_real(coeffs)).unwrap(),
            &tol,
        )
        .unwrap();
        let geom = vertex_geometry(&qd, &tol).unwrap();
        let g = build_graph(&qd, &geom, &tol).unwrap();
        (qd, g)
    }

    fn graph_of_frac(p: &[f64], q: &[f64]) -> (QuadraticDifferential, CriticalGraph) {
        let tol = Tolerances::default();
        let qd = QuadraticDifferential::build(
            RationalMap::new(Polynomial::from_real(p), Polynomial::from_real(q)).unwrap(),
            &tol,
        )
        .unwrap();
        let geom = vertex_geometry(&qd, &tol).unwrap();
        let g = build_graph(&qd, &geom, &tol).unwrap();
        (qd, g)
    }

    #[test]
    fn eight_graph() {
        let (_, g) = graph_of_poly(&[-1.0, 0.0, 1.0]);
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.component_count, 1);
        for e in &g.edges {
            assert!(e.joins(0, 0));
        }
    }

    #[test]
    fn quartic_graph() {
        let (_, g) = graph_of_poly(&[4.0, 0.0, -5.0, 0.0, 1.0]);
        assert_eq!(g.vertices.len(), 3);
        assert_eq!(g.edges.len(), 6);
        assert_eq!(g.component_count, 3);
    }

    #[test]
    fn fig1_left_graph() {
        let (_, g) = graph_of_frac(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]);
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.edges.len(), 4);
        assert_eq!(g.component_count, 1);
        for e in &g.edges {
            assert!(e.joins(0, 1));
        }
    }

    #[test]
    fn eight_faces() {
        let (qd, g) = graph_of_poly(&[-1.0, 0.0, 1.0]);
        let cfg = domain_configurations(&g, &qd).unwrap();
        assert_eq!(cfg.faces.len(), 3);
        assert_eq!(cfg.circle_count(), 3);
        assert_eq!(cfg.ring_count(), 0);
        verify_pole_census_by_winding(&cfg, &qd).unwrap();
    }

    #[test]
    fn quartic_faces() {
        let (qd, g) = graph_of_poly(&[4.0, 0.0, -5.0, 0.0, 1.0]);
        let cfg = domain_configurations(&g, &qd).unwrap();
        assert_eq!(cfg.faces.len(), 7);
        assert_eq!(cfg.circle_count(), 5);
        assert_eq!(cfg.ring_count(), 2);
        verify_pole_census_by_winding(&cfg, &qd).unwrap();
    }

    #[test]
    fn fig1_left_faces() {
        let (qd, g) = graph_of_frac(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]);
        let cfg = domain_configurations(&g, &qd).unwrap();
        assert_eq!(cfg.faces.len(), 4);
        assert_eq!(cfg.circle_count(), 4);
        assert_eq!(cfg.ring_count(), 0);
    }

    #[test]
    fn fig1_right_disconnected() {
        let (qd, g) = graph_of_frac(&[-4.0, 0.0, 1.0], &[1.0, 0.0, 1.0]);
        assert_eq!(g.component_count, 2);
        let cfg = domain_configurations(&g, &qd).unwrap();
        assert_eq!(cfg.circle_count(), 4);
        assert_eq!(cfg.ring_count(), 1);
    }

    #[test]
    fn cubic_connecting_trajectory() {
        let (_, g) = graph_of_poly(&[0.0, -3.0, 0.0, 1.0]);
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.edges.len(), 4);
        assert_eq!(g.component_count, 1);
        // two self-loops and two connecting edges
        let connecting: Vec<_> = g.edges.iter().filter(|e| e.joins(0, 1)).collect();
        assert_eq!(connecting.len(), 2);
        assert!(g.connecting_trajectory(0, 1).is_some());
    }

    #[test]
    fn quartic_equal_moduli_pair_not_connected() {
        let (_, g) = graph_of_poly(&[4.0, 0.0, -5.0, 0.0, 1.0]);
        // vertices 0 and 2 are -sqrt(5/2) and +sqrt(5/2): equal moduli but no
        // joining trajectory
        assert!(g.connecting_trajectory(0, 2).is_none());
        // self loop present at every vertex
        assert!(g.connecting_trajectory(0, 0).is_some());
    }

    #[test]
    fn handshake_and_euler() {
        for (qd, g) in [
            graph_of_poly(&[-1.0, 0.0, 1.0]),
            graph_of_poly(&[0.0, -3.0, 0.0, 1.0]),
            graph_of_poly(&[4.0, 0.0, -5.0, 0.0, 1.0]),
            graph_of_frac(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]),
        ] {
            let rays: usize = g.vertices.iter().map(|v| v.rays.len()).sum();
            assert_eq!(2 * g.edges.len(), rays);
            let cfg = domain_configurations(&g, &qd).unwrap();
            let f = cfg.faces.len();
            assert_eq!(g.vertices.len() + f, 1 + g.component_count + g.edges.len());
            assert_eq!(cfg.circle_count(), qd.sphere_poles().len());
        }
    }

    #[test]
    fn limit_law_counts() {
        let tol = Tolerances::default();
        let (qd, _) = graph_of_frac(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]);
        let w = Window::square(c(0.0, 0.0), 3.0);
        let low = lemniscate_components(&qd, 0.01, &w, &tol).unwrap();
        assert_eq!(low.count, qd.map().distinct_zero_count().unwrap());
        let high = lemniscate_components(&qd, 100.0, &w, &tol).unwrap();
        assert_eq!(high.count, qd.map().distinct_pole_count().unwrap());

        let (qd, _) = graph_of_poly(&[4.0, 0.0, -5.0, 0.0, 1.0]);
        let w = Window::square(c(0.0, 0.0), 7.0);
        let high = lemniscate_components(&qd, 100.0, &w, &tol).unwrap();
        assert_eq!(high.count, 1);
    }
}
