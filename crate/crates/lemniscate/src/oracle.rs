//! Brute-force ground truth: dense-grid marching squares for level sets of
//! |r|, component counting, and turning-angle winding numbers.  Deliberately
//! simple and slow; the tracer and graph builder are tested against it.

use crate::error::{Error, Result};
use crate::geom::Window;
use crate::rational::{ChartPos, RationalMap};
use num_complex::Complex64;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct GridLevelSet {
    pub window: Window,
    pub pitch: f64,
    pub polylines: Vec<Vec<Complex64>>,
    pub component_count: usize,
}

/// Default window: centered box with half-width 2 + 2 max |roots of pq|.
pub fn default_window(r: &RationalMap) -> Result<Window> {
    let mut max_root = 0.0f64;
    if r.deg_p() >= 1 {
        for root in &r.p().roots(1e-12)?.roots {
            max_root = max_root.max(root.location.norm());
        }
    }
    if r.deg_q() >= 1 {
        for root in &r.q().roots(1e-12)?.roots {
            max_root = max_root.max(root.location.norm());
        }
    }
    Ok(Window::square(
        Complex64::new(0.0, 0.0),
        2.0 + 2.0 * max_root,
    ))
}

pub fn default_pitch(window: &Window) -> f64 {
    window.width() / 1024.0
}

/// Marching-squares extraction of { |r| = c } on a uniform grid with linear
/// interpolation on cell edges.  Saddle cells are disambiguated by the sign
/// at the cell center.  Segments are stitched by exact shared edge keys.
pub fn grid_level(r: &RationalMap, c: f64, window: &Window, pitch: f64) -> GridLevelSet {
    let log_c = c.ln();
    let nx = (window.width() / pitch).ceil() as usize + 1;
    let ny = (window.height() / pitch).ceil() as usize + 1;
    let x0 = window.re_min;
    let y0 = window.im_min;

    let mut values = vec![0.0f64; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let z = Complex64::new(x0 + i as f64 * pitch, y0 + j as f64 * pitch);
            values[j * nx + i] = r.log_abs(ChartPos::z(z)) - log_c;
        }
    }

    // Edge key: (i, j, 0) = horizontal edge from node (i,j) to (i+1,j),
    //           (i, j, 1) = vertical edge from node (i,j) to (i,j+1).
    let point_on_edge = |i: usize, j: usize, dir: u8| -> Complex64 {
        let (g1, g2) = match dir {
            0 => (values[j * nx + i], values[j * nx + i + 1]),
            _ => (values[j * nx + i], values[(j + 1) * nx + i]),
        };
        let t = interp_fraction(g1, g2);
        match dir {
            0 => Complex64::new(x0 + (i as f64 + t) * pitch, y0 + j as f64 * pitch),
            _ => Complex64::new(x0 + i as f64 * pitch, y0 + (j as f64 + t) * pitch),
        }
    };

    let mut segments: Vec<((usize, usize, u8), (usize, usize, u8))> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let bl = values[j * nx + i] > 0.0;
            let br = values[j * nx + i + 1] > 0.0;
            let tr = values[(j + 1) * nx + i + 1] > 0.0;
            let tl = values[(j + 1) * nx + i] > 0.0;
            let case = (bl as u8) | (br as u8) << 1 | (tr as u8) << 2 | (tl as u8) << 3;
            // edges of this cell
            let bottom = (i, j, 0u8);
            let top = (i, j + 1, 0u8);
            let left = (i, j, 1u8);
            let right = (i + 1, j, 1u8);
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((bottom, left)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((top, right)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((top, left)),
                5 | 10 => {
                    // saddle: resolve by the sign at the cell center
                    let zc = Complex64::new(
                        x0 + (i as f64 + 0.5) * pitch,
                        y0 + (j as f64 + 0.5) * pitch,
                    );
                    let center = r.log_abs(ChartPos::z(zc)) - log_c > 0.0;
                    let connect_bl = (case == 5) == center;
                    if connect_bl {
                        segments.push((bottom, right));
                        segments.push((top, left));
                    } else {
                        segments.push((bottom, left));
                        segments.push((top, right));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // Stitch segments into chains by shared edge keys.
    let mut adjacency: HashMap<(usize, usize, u8), Vec<usize>> = HashMap::new();
    for (si, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(si);
        adjacency.entry(*b).or_default().push(si);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a0, b0) = segments[start];
        let mut chain = vec![a0, b0];
        // extend forward from b0, then backward from a0
        for dir in 0..2 {
            loop {
                let tip = *chain.last().unwrap();
                let next = adjacency
                    .get(&tip)
                    .and_then(|list| list.iter().copied().find(|&si| !used[si]));
                match next {
                    None => break,
                    Some(si) => {
                        used[si] = true;
                        let (a, b) = segments[si];
                        chain.push(if a == tip { b } else { a });
                    }
                }
            }
            if dir == 0 {
                chain.reverse();
            }
        }
        polylines.push(chain.iter().map(|&(i, j, d)| point_on_edge(i, j, d)).collect());
    }

    let count = polylines.len();
    GridLevelSet {
        window: *window,
        pitch,
        polylines,
        component_count: count,
    }
}

fn interp_fraction(g1: f64, g2: f64) -> f64 {
    if !g1.is_finite() || !g2.is_finite() {
        // a grid node sits exactly on a zero or pole of r
        if !g1.is_finite() {
            return if g2.is_finite() { 1e-6 } else { 0.5 };
        }
        return 1.0 - 1e-6;
    }
    let d = g1 - g2;
    if d.abs() < 1e-300 {
        0.5
    } else {
        (g1 / d).clamp(0.0, 1.0)
    }
}

/// Signed winding number of a closed polyline around a point, by summed
/// turning angles rounded to the nearest integer.  Errors when the fractional
/// part exceeds 0.25, which signals a point too close to the curve.
pub fn winding_number(polyline: &[Complex64], point: Complex64) -> Result<i32> {
    if polyline.len() < 3 {
        return Ok(0);
    }
    let mut total = 0.0f64;
    let mut prev = polyline[0] - point;
    let closed = (polyline[0] - polyline[polyline.len() - 1]).norm() == 0.0;
    let iter: Vec<Complex64> = if closed {
        polyline[1..].to_vec()
    } else {
        let mut v = polyline[1..].to_vec();
        v.push(polyline[0]);
        v
    };
    for p in iter {
        let cur = p - point;
        let dot = prev.re * cur.re + prev.im * cur.im;
        let crs = prev.re * cur.im - prev.im * cur.re;
        total += crs.atan2(dot);
        prev = cur;
    }
    let turns = total / (2.0 * std::f64::consts::PI);
    let nearest = turns.round();
    if (turns - nearest).abs() >= 0.25 {
        return Err(Error::WindingAmbiguous {
            fraction: (turns - nearest).abs(),
        });
    }
    Ok(nearest as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_level_unit_circle() {
        let r = RationalMap::polynomial(Polynomial::from_real(&[0.0, 0.0, 1.0])).unwrap();
        let w = Window::square(c(0.0, 0.0), 2.0);
        let g = grid_level(&r, 1.0, &w, 0.01);
        assert_eq!(g.component_count, 1);
        // every vertex close to the unit circle
        for p in &g.polylines[0] {
            assert!((p.norm() - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn grid_level_two_components() {
        let r = RationalMap::new(
            Polynomial::from_real(&[-1.0, 0.0, 1.0]),
            Polynomial::from_real(&[1.0, 0.0, 1.0]),
        )
        .unwrap();
        let w = default_window(&r).unwrap();
        let g = grid_level(&r, 0.1, &w, default_pitch(&w));
        assert_eq!(g.component_count, 2);
    }

    #[test]
    fn grid_level_below_min_modulus() {
        // p = (z^2-1)(z^2-4) at c = 0.5 < 2.25: four ovals
        let r = RationalMap::polynomial(Polynomial::from_real(&[4.0, 0.0, -5.0, 0.0, 1.0]))
            .unwrap();
        let w = default_window(&r).unwrap();
        let g = grid_level(&r, 0.5, &w, default_pitch(&w));
        assert_eq!(g.component_count, 4);
    }

    #[test]
    fn winding_square() {
        let square = vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0)];
        assert_eq!(winding_number(&square, c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&square, c(5.0, 0.0)).unwrap(), 0);
        let cw: Vec<_> = square.iter().rev().copied().collect();
        assert_eq!(winding_number(&cw, c(0.0, 0.0)).unwrap(), -1);
    }

    #[test]
    fn winding_guard() {
        // a query at a polyline vertex makes the turn sum land between
        // integers, which the guard must reject
        let square = vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0)];
        assert!(matches!(
            winding_number(&square, c(1.0, 1.0)),
            Err(Error::WindingAmbiguous { .. })
        ));
    }

    #[test]
    fn pitch_halving_stable() {
        let r = RationalMap::polynomial(Polynomial::from_real(&[4.0, 0.0, -5.0, 0.0, 1.0]))
            .unwrap();
        let w = default_window(&r).unwrap();
        let p = default_pitch(&w);
        let a = grid_level(&r, 0.5, &w, p);
        let b = grid_level(&r, 0.5, &w, p / 2.0);
        assert_eq!(a.component_count, b.component_count);
    }
}
