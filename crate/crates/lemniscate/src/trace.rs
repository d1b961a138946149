//! Numerical tracing of the horizontal trajectories of the differential:
//! level curves of |r|, and the m+2 critical trajectories leaving each zero.
//!
//! The marcher is a predictor along the unit tangent i conj(L)/|L| with a
//! Newton corrector that restores log|r| = log c along the gradient
//! direction.  Tracing switches to the chart u = 1/z beyond a radius set by
//! the root layout, so trajectories may pass through or terminate at
//! infinity.  Closed level curves are normalized counterclockwise, which
//! fixes the sign of the accumulated argument: a loop gains 2 pi times the
//! signed count of enclosed zeros and poles of r.

use crate::error::{Error, Result};
use crate::geom::{segment_distance_sq, signed_area2, Window};
use crate::qd::{moduli_equal, QuadraticDifferential, SpherePoint};
use crate::rational::{Chart, ChartPos, RationalMap};
use crate::tol::{Tolerances, STEP_MAX, STEP_MIN};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum EndTag {
    ClosedLoop,
    CriticalPoint { vertex: SpherePoint },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Samples in the finite plane.  A trajectory ending at infinity stops at
    /// its last finite sample; the tag carries the endpoint.
    pub points: Vec<Complex64>,
    pub level: f64,
    pub start_tag: EndTag,
    pub end_tag: EndTag,
    /// Unwrapped change of arg r along the stored orientation.
    pub total_arg_change: f64,
}

impl Trajectory {
    pub fn is_closed(&self) -> bool {
        self.start_tag == EndTag::ClosedLoop && self.end_tag == EndTag::ClosedLoop
    }
}

/// One of the m+2 rays of a zero of the differential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayIndex {
    /// Index into [`vertex_geometry`].
    pub vertex: usize,
    pub ray: usize,
}

/// Launch data for one zero of the differential.
#[derive(Debug, Clone)]
pub struct VertexGeometry {
    pub point: SpherePoint,
    /// Multiplicity m of the zero; it carries m + 2 rays.
    pub multiplicity: usize,
    /// Ray angles in the local chart, sorted ascending in [0, 2 pi).
    pub rays: Vec<f64>,
    pub value: Complex64,
    pub level: f64,
    pub launch_radius: f64,
    pub capture_radius: f64,
}

/// Launch geometry for every zero of the differential, finite zeros first
/// (sorted by location), the zero at infinity last.
pub fn vertex_geometry(
    qd: &QuadraticDifferential,
    tol: &Tolerances,
) -> Result<Vec<VertexGeometry>> {
    let mut out = Vec::new();
    for (point, m) in qd.sphere_zeros() {
        let (coeff, k) = qd.local_leading_coeff(point)?;
        debug_assert_eq!(2 * k, m);
        let mut rays: Vec<f64> = (0..m + 2)
            .map(|j| {
                let raw = (std::f64::consts::FRAC_PI_2 - coeff.arg()
                    + j as f64 * std::f64::consts::PI)
                    / (k as f64 + 1.0);
                raw.rem_euclid(2.0 * std::f64::consts::PI)
            })
            .collect();
        rays.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let sep = qd.local_separation(point);
        let launch_radius = tol.launch_radius * sep;
        let idx = qd.value_index(point).ok_or(Error::NoCriticalPoints)?;
        let value = qd.critical_values().entries[idx].value;
        out.push(VertexGeometry {
            point,
            multiplicity: m,
            rays,
            value,
            level: value.norm(),
            launch_radius,
            capture_radius: tol.capture_factor * launch_radius,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ArgReport {
    pub monotone: bool,
    pub offending_index: Option<usize>,
    pub total_change: f64,
    /// Deviation of total_change from the nearest integer multiple of 2 pi;
    /// meaningful for closed loops.
    pub closure_defect: f64,
}

/// Recomputes the unwrapped argument of r at every sample and reports strict
/// monotonicity and the total change.
pub fn arg_monotonicity_check(t: &Trajectory, r: &RationalMap) -> ArgReport {
    let mut total = 0.0f64;
    let mut monotone = true;
    let mut offending = None;
    let mut sign = 0.0f64;
    let mut prev = eval_far(r, t.points[0]);
    for (i, &z) in t.points.iter().enumerate().skip(1) {
        let cur = eval_far(r, z);
        let delta = (cur / prev).arg();
        if delta == 0.0 || (sign != 0.0 && delta.signum() != sign) {
            if monotone {
                monotone = false;
                offending = Some(i);
            }
        } else {
            sign = delta.signum();
        }
        total += delta;
        prev = cur;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let closure_defect = (total / two_pi - (total / two_pi).round()).abs() * two_pi;
    ArgReport {
        monotone,
        offending_index: offending,
        total_change: total,
        closure_defect,
    }
}

fn eval_far(r: &RationalMap, z: Complex64) -> Complex64 {
    if z.norm() > 1e6 {
        r.eval_chart(ChartPos::u(Complex64::new(1.0, 0.0) / z))
    } else {
        r.eval(z)
    }
}

struct CaptureSpec {
    point: SpherePoint,
    radius: f64,
    level: f64,
}

struct Marcher<'a> {
    map: &'a RationalMap,
    log_c: f64,
    level: f64,
    chart_switch: f64,
    tol: &'a Tolerances,
    captures: Vec<CaptureSpec>,
    /// finite critical points (zeros and poles) for the proximity speed limit
    finite_critical: Vec<Complex64>,
    infinity_critical: bool,
}

enum MarchOutcome {
    Closed,
    Captured { capture: usize, approach: f64 },
}

struct MarchResult {
    points: Vec<Complex64>,
    total_arg: f64,
    outcome: MarchOutcome,
}

impl<'a> Marcher<'a> {
    fn level_correct(&self, pos: ChartPos) -> Option<ChartPos> {
        let mut w = pos.w;
        for _ in 0..12 {
            let g = self.map.log_abs(ChartPos {
                chart: pos.chart,
                w,
            }) - self.log_c;
            if g.abs() <= self.tol.trace_level {
                return Some(ChartPos {
                    chart: pos.chart,
                    w,
                });
            }
            let l = self.map.log_deriv(ChartPos {
                chart: pos.chart,
                w,
            });
            let ln = l.norm_sqr();
            if !ln.is_finite() || ln < 1e-300 {
                return None;
            }
            let step = l.conj() * (-g / ln);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            w += step;
        }
        None
    }

    fn nearest_critical(&self, pos: ChartPos) -> f64 {
        match pos.chart {
            Chart::Z => {
                let mut best = f64::INFINITY;
                for &x in &self.finite_critical {
                    best = best.min((pos.w - x).norm());
                }
                best
            }
            Chart::U => {
                if self.infinity_critical {
                    pos.w.norm()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn push_point(points: &mut Vec<Complex64>, pos: ChartPos) {
        if let Some(z) = pos.to_z() {
            points.push(z);
        }
    }

    /// Marches from `start` (already on the level) in the direction `dir`
    /// (+1 = increasing arg r).  `grace` suppresses capture at the launch
    /// vertex until the trace has escaped twice its capture radius.
    fn run(
        &self,
        start: ChartPos,
        dir: f64,
        grace: Option<usize>,
        max_steps: usize,
    ) -> Result<MarchResult> {
        let mut pos = start;
        let mut points = Vec::new();
        Self::push_point(&mut points, pos);
        let mut r_prev = self.map.eval_chart(pos);
        let mut total_arg = 0.0f64;
        let mut grace = grace;
        let mut armed = false;

        let mut h = STEP_MIN.max(1e-3_f64.min(0.3 * self.nearest_critical(pos)));
        let armed_dist = 5.0 * h;

        for step_count in 0..max_steps {
            // speed limit near critical points
            let prox = self.nearest_critical(pos);
            let h_cap = (0.3 * prox).max(1e-9).min(STEP_MAX);
            h = h.min(h_cap);

            // predictor-corrector with step halving
            let mut attempt = h;
            let mut accepted: Option<(ChartPos, Complex64, f64)> = None;
            for _ in 0..45 {
                let l = self.map.log_deriv(pos);
                let t = Complex64::new(0.0, 1.0) * l.conj() / l.norm() * dir;
                let predicted = ChartPos {
                    chart: pos.chart,
                    w: pos.w + t * attempt,
                };
                let corrected = match self.level_correct(predicted) {
                    Some(c) => c,
                    None => {
                        attempt *= 0.5;
                        continue;
                    }
                };
                let r_new = self.map.eval_chart(corrected);
                let delta = (r_new / r_prev).arg();
                if delta.abs() > 0.9 * std::f64::consts::PI {
                    attempt *= 0.5;
                    continue;
                }
                // midpoint sag check keeps the polyline on the level between
                // samples
                let mid = ChartPos {
                    chart: pos.chart,
                    w: (pos.w + corrected.w) * 0.5,
                };
                let g_mid = self.map.log_abs(mid) - self.log_c;
                if g_mid.abs() > self.tol.trace_chord {
                    attempt *= 0.5;
                    continue;
                }
                accepted = Some((corrected, r_new, delta));
                break;
            }
            let (mut new_pos, r_new, delta) = match accepted {
                Some(a) => a,
                None => {
                    let nearest = self.nearest_critical_point(pos);
                    return Err(Error::StepCollapse {
                        nearest,
                        steps: step_count,
                    });
                }
            };
            total_arg += delta;
            r_prev = r_new;

            // closure test against the start point, in the start chart
            if new_pos.chart == start.chart {
                let dist = (new_pos.w - start.w).norm();
                if !armed && dist > armed_dist {
                    armed = true;
                }
                if armed {
                    let (d2, _) = segment_distance_sq(start.w, pos.w, new_pos.w);
                    if dist < 1.5 * attempt || d2.sqrt() < 0.75 * attempt {
                        Self::push_point(&mut points, new_pos);
                        if let Some(z) = start.to_z() {
                            points.push(z);
                        }
                        // account for the final gap in the argument total
                        let r_start = self.map.eval_chart(start);
                        total_arg += (r_start / r_new).arg();
                        return Ok(MarchResult {
                            points,
                            total_arg,
                            outcome: MarchOutcome::Closed,
                        });
                    }
                }
            }

            // capture test at zeros of the differential
            for (ci, cap) in self.captures.iter().enumerate() {
                let local = match (cap.point, new_pos.chart) {
                    (SpherePoint::Finite(v), Chart::Z) => Some((v, new_pos.w)),
                    (SpherePoint::Infinity, Chart::U) => {
                        Some((Complex64::new(0.0, 0.0), new_pos.w))
                    }
                    _ => None,
                };
                if let Some((v, w)) = local {
                    let dist = (w - v).norm();
                    if grace == Some(ci) {
                        if dist > 2.0 * cap.radius {
                            grace = None;
                        }
                        continue;
                    }
                    if dist < cap.radius {
                        if !moduli_equal(cap.level, self.level, 1e-6) {
                            return Err(Error::CaptureLevelMismatch {
                                expected: self.level,
                                found: cap.level,
                            });
                        }
                        let approach = (w - v).arg().rem_euclid(2.0 * std::f64::consts::PI);
                        Self::push_point(&mut points, new_pos);
                        if let SpherePoint::Finite(v) = cap.point {
                            points.push(v);
                        }
                        return Ok(MarchResult {
                            points,
                            total_arg,
                            outcome: MarchOutcome::Captured {
                                capture: ci,
                                approach,
                            },
                        });
                    }
                }
            }

            // chart switching with hysteresis
            new_pos = match new_pos.chart {
                Chart::Z if new_pos.w.norm() > self.chart_switch => {
                    ChartPos::u(Complex64::new(1.0, 0.0) / new_pos.w)
                }
                Chart::U if new_pos.w.norm() > 1.2 / self.chart_switch => {
                    ChartPos::z(Complex64::new(1.0, 0.0) / new_pos.w)
                }
                _ => new_pos,
            };

            Self::push_point(&mut points, new_pos);
            pos = new_pos;

            // grow the step when the corrector is comfortable
            if attempt >= h * 0.99 {
                h = (h * 1.3).min(STEP_MAX);
            } else {
                h = attempt.max(1e-9);
            }
        }
        Err(Error::NoClosure { steps: max_steps })
    }

    fn nearest_critical_point(&self, pos: ChartPos) -> Complex64 {
        match pos.chart {
            Chart::Z => self
                .finite_critical
                .iter()
                .copied()
                .min_by(|a, b| {
                    (a - pos.w)
                        .norm()
                        .partial_cmp(&(b - pos.w).norm())
                        .unwrap()
                })
                .unwrap_or(Complex64::new(0.0, 0.0)),
            Chart::U => Complex64::new(f64::INFINITY, 0.0),
        }
    }
}

fn marcher<'a>(
    map: &'a RationalMap,
    qd: &QuadraticDifferential,
    level: f64,
    tol: &'a Tolerances,
    captures: Vec<CaptureSpec>,
) -> Marcher<'a> {
    let mut finite_critical: Vec<Complex64> = qd.zeros().iter().map(|z| z.location).collect();
    finite_critical.extend(qd.poles().iter().map(|p| p.location));
    let infinity_critical = !matches!(qd.infinity(), crate::qd::InfinityKind::Regular);
    Marcher {
        map,
        log_c: level.ln(),
        level,
        chart_switch: qd.chart_switch_radius(),
        tol,
        captures,
        finite_critical,
        infinity_critical,
    }
}

/// Checks that `c` stays clear of every critical modulus by the level guard.
pub fn check_level_clear(qd: &QuadraticDifferential, c: f64, tol: &Tolerances) -> Result<()> {
    for e in &qd.critical_values().entries {
        if (c - e.modulus).abs() <= tol.level_guard * e.modulus.max(c) {
            return Err(Error::CriticalLevel {
                level: c,
                critical: e.modulus,
            });
        }
    }
    Ok(())
}

/// Traces the closed level curve of |r| = c through `seed`.  The result is
/// oriented counterclockwise.
pub fn trace_level(
    qd: &QuadraticDifferential,
    c: f64,
    seed: Complex64,
    tol: &Tolerances,
) -> Result<Trajectory> {
    check_level_clear(qd, c, tol)?;
    let geometry = vertex_geometry(qd, tol)?;
    for v in &geometry {
        if let SpherePoint::Finite(z) = v.point {
            if (z - seed).norm() < v.capture_radius {
                return Err(Error::SeedNearCriticalPoint { seed, point: z });
            }
        }
    }
    let m = marcher(qd.map(), qd, c, tol, Vec::new());
    let start = match m.level_correct(ChartPos::z(seed)) {
        Some(s) => s,
        None => {
            let dev = (qd.map().log_abs(ChartPos::z(seed)) - c.ln()).abs();
            return Err(Error::SeedOffLevel {
                seed,
                deviation: dev,
            });
        }
    };
    let result = m.run(start, 1.0, None, 400_000)?;
    let mut points = result.points;
    let mut total_arg = result.total_arg;
    if signed_area2(&points) < 0.0 {
        points.reverse();
        total_arg = -total_arg;
    }
    Ok(Trajectory {
        points,
        level: c,
        start_tag: EndTag::ClosedLoop,
        end_tag: EndTag::ClosedLoop,
        total_arg_change: total_arg,
    })
}

/// Result of tracing one critical ray: the trajectory and the terminal ray it
/// was captured on.
#[derive(Debug, Clone)]
pub struct CriticalTrace {
    pub trajectory: Trajectory,
    pub terminal: RayIndex,
}

/// Traces the critical trajectory leaving `ray.vertex` along ray `ray.ray`.
/// Terminates at a zero of the differential (possibly the same one, possibly
/// at infinity); the Strebel property guarantees termination.
pub fn trace_critical(
    qd: &QuadraticDifferential,
    geometry: &[VertexGeometry],
    ray: RayIndex,
    tol: &Tolerances,
) -> Result<CriticalTrace> {
    let v = &geometry[ray.vertex];
    let phi = v.rays[ray.ray];
    let captures: Vec<CaptureSpec> = geometry
        .iter()
        .map(|g| CaptureSpec {
            point: g.point,
            radius: g.capture_radius,
            level: g.level,
        })
        .collect();
    let m = marcher(qd.map(), qd, v.level, tol, captures);

    let dir_vec = Complex64::new(phi.cos(), phi.sin());
    let launch_w = v.point.local_coord() + dir_vec * v.launch_radius;
    let launch = ChartPos {
        chart: v.point.chart(),
        w: launch_w,
    };
    let launch = m.level_correct(launch).ok_or(Error::SeedOffLevel {
        seed: launch_w,
        deviation: f64::NAN,
    })?;
    let l = qd.map().log_deriv(launch);
    let t = Complex64::new(0.0, 1.0) * l.conj() / l.norm();
    let dir = if (t * dir_vec.conj()).re >= 0.0 { 1.0 } else { -1.0 };

    let result = m.run(launch, dir, Some(ray.vertex), 400_000)?;
    let (capture, approach) = match result.outcome {
        MarchOutcome::Captured { capture, approach } => (capture, approach),
        MarchOutcome::Closed => {
            return Err(Error::Escaped);
        }
    };
    let terminal_vertex = &geometry[capture];
    let unit = 2.0 * std::f64::consts::PI / (terminal_vertex.multiplicity as f64 + 2.0);
    let mut best = (usize::MAX, f64::INFINITY);
    for (j, &a) in terminal_vertex.rays.iter().enumerate() {
        let d = angular_distance(a, approach);
        if d < best.1 {
            best = (j, d);
        }
    }
    if best.1 > unit / 4.0 {
        return Err(Error::CaptureAngleAmbiguous { angle: approach });
    }

    let mut points = result.points;
    // prepend the launch vertex itself when finite
    if let SpherePoint::Finite(z) = v.point {
        points.insert(0, z);
    }
    Ok(CriticalTrace {
        trajectory: Trajectory {
            points,
            level: v.level,
            start_tag: EndTag::CriticalPoint { vertex: v.point },
            end_tag: EndTag::CriticalPoint {
                vertex: terminal_vertex.point,
            },
            total_arg_change: result.total_arg,
        },
        terminal: RayIndex {
            vertex: capture,
            ray: best.0,
        },
    })
}

pub fn angular_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (a - b).rem_euclid(two_pi);
    d.min(two_pi - d)
}

/// One representative seed per connected component of the level set inside
/// the window, found by sign changes on a coarse grid refined by bisection,
/// plus radial shots from the zeros and poles of r that catch components
/// smaller than the grid pitch.
pub fn level_seeds(
    qd: &QuadraticDifferential,
    c: f64,
    window: &Window,
    tol: &Tolerances,
) -> Result<Vec<Complex64>> {
    Ok(level_components(qd, c, window, tol)?
        .into_iter()
        .map(|t| t.points[0])
        .collect())
}

/// Seeds plus the traced closed component through each one.
pub fn level_components(
    qd: &QuadraticDifferential,
    c: f64,
    window: &Window,
    tol: &Tolerances,
) -> Result<Vec<Trajectory>> {
    check_level_clear(qd, c, tol)?;
    let map = qd.map();
    let log_c = c.ln();
    let grid_n = 192usize;
    let dx = window.width() / grid_n as f64;
    let dy = window.height() / grid_n as f64;
    let node =
        |i: usize, j: usize| Complex64::new(window.re_min + i as f64 * dx, window.im_min + j as f64 * dy);
    let mut values = vec![0.0f64; (grid_n + 1) * (grid_n + 1)];
    for j in 0..=grid_n {
        for i in 0..=grid_n {
            values[j * (grid_n + 1) + i] = map.log_abs(ChartPos::z(node(i, j))) - log_c;
        }
    }
    let mut candidates: Vec<Complex64> = Vec::new();
    {
        let mut push_crossing = |a: Complex64, b: Complex64, ga: f64, gb: f64| {
            if !ga.is_finite() || !gb.is_finite() {
                return;
            }
            if ga.signum() == gb.signum() {
                return;
            }
            let mut lo = a;
            let mut hi = b;
            let mut glo = ga;
            for _ in 0..60 {
                let mid = (lo + hi) * 0.5;
                let gm = map.log_abs(ChartPos::z(mid)) - log_c;
                if gm == 0.0 {
                    lo = mid;
                    break;
                }
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            candidates.push((lo + hi) * 0.5);
        };
        for j in 0..=grid_n {
            for i in 0..grid_n {
                let (a, b) = (node(i, j), node(i + 1, j));
                push_crossing(
                    a,
                    b,
                    values[j * (grid_n + 1) + i],
                    values[j * (grid_n + 1) + i + 1],
                );
            }
        }
        for j in 0..grid_n {
            for i in 0..=grid_n {
                let (a, b) = (node(i, j), node(i, j + 1));
                push_crossing(
                    a,
                    b,
                    values[j * (grid_n + 1) + i],
                    values[(j + 1) * (grid_n + 1) + i],
                );
            }
        }
    }

    // radial shots from the roots of p and q catch components smaller than
    // the grid pitch
    let mut radial_sources: Vec<Complex64> = Vec::new();
    if map.deg_p() >= 1 {
        radial_sources.extend(map.p().roots(tol.root_residual)?.locations());
    }
    if map.deg_q() >= 1 {
        radial_sources.extend(map.q().roots(tol.root_residual)?.locations());
    }
    for src in radial_sources {
        for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            let reach = 0.45 * window.width();
            let mut lo = 1e-9f64.max(1e-12 * (1.0 + src.norm()));
            let mut hi = reach;
            let g_at = |t: f64| map.log_abs(ChartPos::z(src + dir * t)) - log_c;
            let (mut glo, ghi) = (g_at(lo), g_at(hi));
            if !glo.is_finite() || !ghi.is_finite() || glo.signum() == ghi.signum() {
                continue;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let gm = g_at(mid);
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            candidates.push(src + dir * (0.5 * (lo + hi)));
        }
    }

    // deduplicate by tracing: a candidate near an already traced component is
    // the same component
    let geometry = vertex_geometry(qd, tol)?;
    let pitch = dx.max(dy);
    let mut components: Vec<Trajectory> = Vec::new();
    'cand: for cand in candidates {
        for v in &geometry {
            if let SpherePoint::Finite(z) = v.point {
                if (z - cand).norm() < v.capture_radius {
                    continue 'cand;
                }
            }
        }
        for t in &components {
            let mut near = false;
            for w in t.points.windows(2) {
                let (d2, _) = segment_distance_sq(cand, w[0], w[1]);
                if d2.sqrt() < 2.0 * pitch {
                    near = true;
                    break;
                }
            }
            if near {
                continue 'cand;
            }
        }
        let t = trace_level(qd, c, cand, tol)?;
        components.push(t);
    }
    Ok(components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::poly::Polynomial;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qd_poly(coeffs: &[f64]) -> QuadraticDifferential {
        QuadraticDifferential::build(
            RationalMap::polynomial(Polynomial::from_real(coeffs)).unwrap(),
            &Tolerances::default(),
        )
        .unwrap()
    }

    fn qd_frac(p: &[f64], q: &[f64]) -> QuadraticDifferential {
        QuadraticDifferential::build(
            RationalMap::new(Polynomial::from_real(p), Polynomial::from_real(q)).unwrap(),
            &Tolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn trace_unit_circle() {
        let tol = Tolerances::default();
        let qd = qd_poly(&[0.0, 0.0, 1.0]); // z^2
        let t = trace_level(&qd, 1.0, c(1.0, 0.0), &tol).unwrap();
        assert!(t.is_closed());
        for p in &t.points {
            assert!((p.norm() - 1.0).abs() < 1e-8);
        }
        // |z^2| = 1 walked once counterclockwise gains 4 pi
        assert!((t.total_arg_change - 4.0 * std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn trace_small_oval_winding() {
        let tol = Tolerances::default();
        let qd = qd_poly(&[-1.0, 0.0, 1.0]); // z^2 - 1
        let seed = c(1.5f64.sqrt(), 0.0);
        let t = trace_level(&qd, 0.5, seed, &tol).unwrap();
        assert_eq!(oracle::winding_number(&t.points, c(1.0, 0.0)).unwrap(), 1);
        assert_eq!(oracle::winding_number(&t.points, c(-1.0, 0.0)).unwrap(), 0);
        assert!((t.total_arg_change - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn trace_outer_loop_single_component() {
        let tol = Tolerances::default();
        let qd = qd_poly(&[-1.0, 0.0, 1.0]);
        let t = trace_level(&qd, 4.0, c(5.0f64.sqrt(), 0.0), &tol).unwrap();
        assert_eq!(oracle::winding_number(&t.points, c(1.0, 0.0)).unwrap(), 1);
        assert_eq!(oracle::winding_number(&t.points, c(-1.0, 0.0)).unwrap(), 1);
    }

    #[test]
    fn refuses_critical_level() {
        let tol = Tolerances::default();
        let qd = qd_poly(&[-1.0, 0.0, 1.0]);
        assert!(matches!(
            trace_level(&qd, 1.0, c(2.0, 0.0), &tol),
            Err(Error::CriticalLevel { .. })
        ));
    }

    #[test]
    fn refuses_seed_near_critical_point() {
        let tol = Tolerances::default();
        let qd = qd_poly(&[-1.0, 0.0, 1.0]);
        assert!(matches!(
            trace_level(&qd, 0.5, c(1e-7, 0.0), &tol),
            Err(Error::SeedNearCriticalPoint { .. })
        ));
    }

    #[test]
    fn figure_eight_of_z2m1() {
        let tol = Tolerances::default();
        let qd = qd_poly(&[-1.0, 0.0, 1.0]);
        let geom = vertex_geometry(&qd, &tol).unwrap();
        assert_eq!(geom.len(), 1);
        assert_eq!(geom[0].rays.len(), 4);
        // rays of |z^2-1| = 1 at the origin are the diagonals
        let expect = [
            std::f64::consts::FRAC_PI_4,
            3.0 * std::f64::consts::FRAC_PI_4,
            5.0 * std::f64::consts::FRAC_PI_4,
            7.0 * std::f64::consts::FRAC_PI_4,
        ];
        for (a, e) in geom[0].rays.iter().zip(expect) {
            assert!(angular_distance(*a, e) < 1e-12);
        }
        // all four rays return to the vertex; lobes enclose +1 or -1
        let mut around_plus = 0;
        let mut around_minus = 0;
        for ray in 0..4 {
            let tr = trace_critical(&qd, &geom, RayIndex { vertex: 0, ray }, &tol).unwrap();
            assert_eq!(tr.terminal.vertex, 0);
            let wp = oracle::winding_number(&tr.trajectory.points, c(1.0, 0.0)).unwrap();
            let wm = oracle::winding_number(&tr.trajectory.points, c(-1.0, 0.0)).unwrap();
            assert_eq!(wp.abs() + wm.abs(), 1);
            if wp.abs() == 1 {
                around_plus += 1;
            } else {
                around_minus += 1;
            }
        }
        assert_eq!(around_plus, 2);
        assert_eq!(around_minus, 2);
    }

    #[test]
    fn rays_terminate_at_infinity_for_fig1() {
        let tol = Tolerances::default();
        let qd = qd_frac(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]);
        let geom = vertex_geometry(&qd, &tol).unwrap();
        assert_eq!(geom.len(), 2);
        assert!(geom[1].point.is_infinity());
        for ray in 0..4 {
            let tr = trace_critical(&qd, &geom, RayIndex { vertex: 0, ray }, &tol).unwrap();
            assert_eq!(tr.terminal.vertex, 1);
        }
    }

    #[test]
    fn quartic_eight_windings() {
        let tol = Tolerances::default();
        let qd = qd_poly(&[4.0, 0.0, -5.0, 0.0, 1.0]);
        let geom = vertex_geometry(&qd, &tol).unwrap();
        // vertex 2 is +sqrt(5/2); its lobes enclose 1 and 2
        let s = (2.5f64).sqrt();
        assert!((geom[2].point.finite().unwrap() - c(s, 0.0)).norm() < 1e-9);
        let mut seen = [0usize; 2];
        for ray in 0..4 {
            let tr = trace_critical(&qd, &geom, RayIndex { vertex: 2, ray }, &tol).unwrap();
            assert_eq!(tr.terminal.vertex, 2);
            let w1 = oracle::winding_number(&tr.trajectory.points, c(1.0, 0.0)).unwrap();
            let w2 = oracle::winding_number(&tr.trajectory.points, c(2.0, 0.0)).unwrap();
            assert_eq!(w1.abs() + w2.abs(), 1);
            seen[if w1.abs() == 1 { 0 } else { 1 }] += 1;
        }
        assert_eq!(seen, [2, 2]);
    }

    #[test]
    fn monotone_arg_pole_loop() {
        let tol = Tolerances::default();
        let qd = qd_frac(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]);
        // c = 10 > 1: two loops shrink onto the poles of r at +-i
        let t = trace_level(&qd, 10.0, c(0.0, 1.1), &tol).unwrap();
        let rep = arg_monotonicity_check(&t, qd.map());
        assert!(rep.monotone);
        // counterclockwise loop around a simple pole of r loses 2 pi
        assert!((rep.total_change + 2.0 * std::f64::consts::PI).abs() < 1e-6);
        assert!(rep.closure_defect < 1e-6);
    }

    #[test]
    fn level_seed_counts() {
        let tol = Tolerances::default();
        let qd = qd_frac(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]);
        let w = Window::square(c(0.0, 0.0), 3.0);
        assert_eq!(level_seeds(&qd, 0.1, &w, &tol).unwrap().len(), 2);
        assert_eq!(level_seeds(&qd, 10.0, &w, &tol).unwrap().len(), 2);

        let qd = qd_poly(&[0.0, 0.0, 1.0]);
        let w = Window::square(c(0.0, 0.0), 2.0);
        assert_eq!(level_seeds(&qd, 1.0, &w, &tol).unwrap().len(), 1);
    }

    #[test]
    fn launch_directions_evenly_spaced() {
        let tol = Tolerances::default();
        let qd = qd_poly(&[4.0, 0.0, -5.0, 0.0, 1.0]);
        let geom = vertex_geometry(&qd, &tol).unwrap();
        for v in &geom {
            let m = v.multiplicity;
            assert_eq!(v.rays.len(), m + 2);
            let gap = 2.0 * std::f64::consts::PI / (m + 2) as f64;
            for i in 0..v.rays.len() {
                let a = v.rays[i];
                let b = v.rays[(i + 1) % v.rays.len()];
                assert!((angular_distance(a, b) - gap).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn oversampled_level_invariant() {
        let tol = Tolerances::default();
        let qd = qd_poly(&[-1.0, 0.0, 1.0]);
        let t = trace_level(&qd, 0.5, c(1.5f64.sqrt(), 0.0), &tol).unwrap();
        let map = qd.map();
        for w in t.points.windows(2) {
            for k in 1..10 {
                let z = w[0] + (w[1] - w[0]) * (k as f64 / 10.0);
                let g = map.log_abs(ChartPos::z(z)) - 0.5f64.ln();
                assert!(g.abs() < 3.0 * tol.trace_chord);
            }
        }
    }
}
