//! Plane-geometry helpers shared by the tracer, graph assembly and the
//! brute-force oracle: windows, point/segment queries, Hausdorff distances.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn square(center: Complex64, half_width: f64) -> Window {
        Window {
            re_min: center.re - half_width,
            re_max: center.re + half_width,
            im_min: center.im - half_width,
            im_max: center.im + half_width,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }
}

pub fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Squared distance from a point to a segment, and the cross product of the
/// segment direction with the offset (positive = point on the left).
pub fn segment_distance_sq(p: Complex64, a: Complex64, b: Complex64) -> (f64, f64) {
    let d = b - a;
    let len_sq = d.norm_sqr();
    let side = cross(d, p - a);
    if len_sq < 1e-300 {
        return ((p - a).norm_sqr(), side);
    }
    let t = ((p - a).re * d.re + (p - a).im * d.im) / len_sq;
    let t = t.clamp(0.0, 1.0);
    let c = a + d * t;
    ((p - c).norm_sqr(), side)
}

/// Nearest segment of a polyline to a point: (segment index, distance, side).
pub fn nearest_segment(p: Complex64, pts: &[Complex64]) -> Option<(usize, f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let mut best = (0usize, f64::INFINITY, 0.0f64);
    for i in 0..pts.len() - 1 {
        let (d2, side) = segment_distance_sq(p, pts[i], pts[i + 1]);
        if d2 < best.1 {
            best = (i, d2, side);
        }
    }
    Some((best.0, best.1.sqrt(), best.2))
}

pub fn polyline_length(pts: &[Complex64]) -> f64 {
    pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Twice the signed area of a closed polyline (positive = counterclockwise).
pub fn signed_area2(pts: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for w in pts.windows(2) {
        s += cross(w[0], w[1]);
    }
    if let (Some(&first), Some(&last)) = (pts.first(), pts.last()) {
        if (first - last).norm() > 0.0 {
            s += cross(last, first);
        }
    }
    s
}

pub fn diameter(pts: &[Complex64]) -> f64 {
    let mut re = (f64::INFINITY, f64::NEG_INFINITY);
    let mut im = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        re = (re.0.min(p.re), re.1.max(p.re));
        im = (im.0.min(p.im), im.1.max(p.im));
    }
    ((re.1 - re.0).powi(2) + (im.1 - im.0).powi(2)).sqrt()
}

/// Uniform spatial hash over segments for fast nearest-distance queries.
pub struct SegmentIndex {
    cell: f64,
    origin: Complex64,
    n_re: usize,
    n_im: usize,
    buckets: Vec<Vec<(Complex64, Complex64)>>,
}

impl SegmentIndex {
    pub fn build(polylines: &[&[Complex64]], cell: f64) -> SegmentIndex {
        let mut re = (f64::INFINITY, f64::NEG_INFINITY);
        let mut im = (f64::INFINITY, f64::NEG_INFINITY);
        for pl in polylines {
            for p in *pl {
                re = (re.0.min(p.re), re.1.max(p.re));
                im = (im.0.min(p.im), im.1.max(p.im));
            }
        }
        if !re.0.is_finite() {
            re = (0.0, 1.0);
            im = (0.0, 1.0);
        }
        let origin = Complex64::new(re.0 - cell, im.0 - cell);
        let n_re = (((re.1 - re.0) / cell).ceil() as usize + 3).max(1);
        let n_im = (((im.1 - im.0) / cell).ceil() as usize + 3).max(1);
        let mut idx = SegmentIndex {
            cell,
            origin,
            n_re,
            n_im,
            buckets: vec![Vec::new(); n_re * n_im],
        };
        for pl in polylines {
            for w in pl.windows(2) {
                idx.insert(w[0], w[1]);
            }
        }
        idx
    }

    fn bucket_of(&self, z: Complex64) -> (usize, usize) {
        let i = (((z.re - self.origin.re) / self.cell) as isize).clamp(0, self.n_re as isize - 1);
        let j = (((z.im - self.origin.im) / self.cell) as isize).clamp(0, self.n_im as isize - 1);
        (i as usize, j as usize)
    }

    fn insert(&mut self, a: Complex64, b: Complex64) {
        // conservative: all cells the segment's bounding box touches
        let (i0, j0) = self.bucket_of(a);
        let (i1, j1) = self.bucket_of(b);
        for i in i0.min(i1)..=i0.max(i1) {
            for j in j0.min(j1)..=j0.max(j1) {
                self.buckets[j * self.n_re + i].push((a, b));
            }
        }
    }

    /// Distance from `p` to the indexed segments, searching outward ring by
    /// ring until a ring no longer improves the result.
    pub fn distance(&self, p: Complex64) -> f64 {
        let (ci, cj) = self.bucket_of(p);
        let mut best = f64::INFINITY;
        let max_ring = self.n_re.max(self.n_im);
        for ring in 0..max_ring {
            if best.is_finite() && (ring as f64 - 1.0) * self.cell > best {
                break;
            }
            let mut any = false;
            for di in -(ring as isize)..=(ring as isize) {
                for dj in -(ring as isize)..=(ring as isize) {
                    if di.unsigned_abs().max(dj.unsigned_abs()) != ring {
                        continue;
                    }
                    let i = ci as isize + di;
                    let j = cj as isize + dj;
                    if i < 0 || j < 0 || i >= self.n_re as isize || j >= self.n_im as isize {
                        continue;
                    }
                    any = true;
                    for &(a, b) in &self.buckets[j as usize * self.n_re + i as usize] {
                        let (d2, _) = segment_distance_sq(p, a, b);
                        best = best.min(d2.sqrt());
                    }
                }
            }
            if !any && best.is_finite() {
                break;
            }
        }
        best
    }
}

/// One-sided Hausdorff distance from the samples of `from` to the polylines of
/// `to`.
pub fn one_sided_hausdorff(from: &[&[Complex64]], to: &[&[Complex64]], cell: f64) -> f64 {
    let idx = SegmentIndex::build(to, cell);
    let mut worst = 0.0f64;
    for pl in from {
        for &p in *pl {
            worst = worst.max(idx.distance(p));
        }
    }
    worst
}

pub fn hausdorff(a: &[&[Complex64]], b: &[&[Complex64]], cell: f64) -> f64 {
    one_sided_hausdorff(a, b, cell).max(one_sided_hausdorff(b, a, cell))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn segment_side_and_distance() {
        let (d2, side) = segment_distance_sq(c(0.5, 1.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!((d2 - 1.0).abs() < 1e-14);
        assert!(side > 0.0);
        let (_, side) = segment_distance_sq(c(0.5, -1.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(side < 0.0);
    }

    #[test]
    fn signed_area_orientation() {
        let ccw = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)];
        assert!(signed_area2(&ccw) > 0.0);
        let cw: Vec<_> = ccw.iter().rev().copied().collect();
        assert!(signed_area2(&cw) < 0.0);
    }

    #[test]
    fn hausdorff_of_shifted_squares() {
        let a = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)];
        let b: Vec<_> = a.iter().map(|&z| z + c(0.05, 0.0)).collect();
        let d = hausdorff(&[&a], &[&b], 0.25);
        assert!((d - 0.05).abs() < 1e-12);
    }
}
