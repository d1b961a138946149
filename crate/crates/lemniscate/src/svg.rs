//! Deterministic SVG rendering of the critical graph with optional level
//! overlays.  Palette: graph edges #1f2937, level curves #2563eb (dashed),
//! zeros #dc2626, poles #059669.

use crate::geom::Window;
use crate::graph::CriticalGraph;
use crate::qd::{QuadraticDifferential, SpherePoint};
use crate::trace::Trajectory;
use num_complex::Complex64;
use std::fmt::Write as _;

pub struct SvgOptions {
    pub window: Window,
    pub size_px: u32,
}

impl SvgOptions {
    pub fn for_window(window: Window) -> SvgOptions {
        SvgOptions {
            window,
            size_px: 800,
        }
    }
}

struct Mapper {
    window: Window,
    scale: f64,
    size: f64,
}

impl Mapper {
    fn new(opts: &SvgOptions) -> Mapper {
        let size = opts.size_px as f64;
        let scale = size / opts.window.width().max(opts.window.height());
        Mapper {
            window: opts.window,
            scale,
            size,
        }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        // image y grows downward
        let x = (z.re - self.window.re_min) * self.scale;
        let y = self.size - (z.im - self.window.im_min) * self.scale;
        (x, y)
    }
}

fn path_data(mapper: &Mapper, points: &[Complex64]) -> String {
    // split into runs that stay within a margin of the window, so arcs
    // through far field do not distort the viewbox
    let margin = 1.5 * mapper.window.width().max(mapper.window.height());
    let center = Complex64::new(
        (mapper.window.re_min + mapper.window.re_max) / 2.0,
        (mapper.window.im_min + mapper.window.im_max) / 2.0,
    );
    let mut d = String::new();
    let mut pen_down = false;
    for &z in points {
        if (z - center).norm() > margin {
            pen_down = false;
            continue;
        }
        let (x, y) = mapper.map(z);
        if pen_down {
            let _ = write!(d, "L{:.3} {:.3}", x, y);
        } else {
            let _ = write!(d, "M{:.3} {:.3}", x, y);
            pen_down = true;
        }
    }
    d
}

/// Renders the critical graph, optional level curves, and zero/pole markers.
/// The `desc` element carries the census so tests and tools can read the
/// counts back from the image.
pub fn render(
    qd: &QuadraticDifferential,
    graph: &CriticalGraph,
    levels: &[(f64, Vec<Trajectory>)],
    connected: bool,
    circle_faces: usize,
    ring_faces: usize,
    opts: &SvgOptions,
) -> String {
    let mapper = Mapper::new(opts);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"##,
        opts.size_px
    );
    let _ = writeln!(
        out,
        r##"<desc>{{"vertices":{},"edges":{},"components":{},"connected":{},"circle_faces":{},"ring_faces":{}}}</desc>"##,
        graph.vertices.len(),
        graph.edges.len(),
        graph.component_count,
        connected,
        circle_faces,
        ring_faces
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    for (level, components) in levels {
        for t in components {
            let d = path_data(&mapper, &t.points);
            if !d.is_empty() {
                let _ = writeln!(
                    out,
                    r##"<path class="level" data-level="{:.6}" d="{}" fill="none" stroke="#2563eb" stroke-width="1" stroke-dasharray="6 4"/>"##,
                    level, d
                );
            }
        }
    }

    for e in &graph.edges {
        let d = path_data(&mapper, &e.points);
        if !d.is_empty() {
            let _ = writeln!(
                out,
                r##"<path class="edge" d="{}" fill="none" stroke="#1f2937" stroke-width="1.6"/>"##,
                d
            );
        }
    }

    for v in &graph.vertices {
        if let SpherePoint::Finite(z) = v.point {
            let (x, y) = mapper.map(z);
            let _ = writeln!(
                out,
                r##"<circle class="zero" cx="{:.3}" cy="{:.3}" r="3.5" fill="#dc2626"/>"##,
                x, y
            );
        }
    }
    for p in qd.poles() {
        let (x, y) = mapper.map(p.location);
        let _ = writeln!(
            out,
            r##"<path class="pole" d="M{:.3} {:.3}l6 6m0 -6l-6 6" stroke="#059669" stroke-width="1.6" fill="none"/>"##,
            x - 3.0,
            y - 3.0
        );
    }

    out.push_str("</svg>\n");
    out
}
