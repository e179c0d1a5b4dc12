//! Rendering primitives: PPM P6 heatmaps of symmetric matrices and SVG
//! scatter plots with per-cluster minimal enclosing circles.

use maxkcut::elliptope::entry_floor;
use maxkcut::{Partition, SymMatrix};
use rand::seq::SliceRandom;
use rand::RngCore;

/// Two-stop colormap: the box floor -1/(k-1) maps to dark navy, 1 maps to
/// bright yellow, linear in between.
const COLOR_LOW: [f64; 3] = [0.0, 0.0, 64.0];
const COLOR_HIGH: [f64; 3] = [255.0, 255.0, 0.0];

/// Fixed per-cluster palette, recycled when k exceeds its length.
pub const PALETTE: &[&str] = &[
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999",
    "#66c2a5", "#e6ab02",
];

pub fn heatmap_color(value: f64, k: usize) -> [u8; 3] {
    let floor = entry_floor(k);
    let t = ((value - floor) / (1.0 - floor)).clamp(0.0, 1.0);
    let mut rgb = [0u8; 3];
    for (out, (lo, hi)) in rgb.iter_mut().zip(COLOR_LOW.iter().zip(COLOR_HIGH.iter())) {
        *out = (lo + t * (hi - lo)).round() as u8;
    }
    rgb
}

/// Binary PPM (P6) of the matrix, one pixel per entry, optionally permuted.
pub fn heatmap_ppm(m: &SymMatrix, k: usize, perm: Option<&[usize]>) -> Vec<u8> {
    let n = m.n();
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    out.reserve(3 * n * n);
    for row in 0..n {
        for col in 0..n {
            let (i, j) = match perm {
                Some(p) => (p[row], p[col]),
                None => (row, col),
            };
            out.extend_from_slice(&heatmap_color(m.get(i, j), k));
        }
    }
    out
}

/// Permutation grouping indices by block, preserving order inside a block,
/// blocks ordered by their smallest member (so the heatmap becomes block
/// diagonal).
pub fn block_permutation(p: &Partition) -> Vec<usize> {
    let mut perm: Vec<usize> = Vec::with_capacity(p.n());
    for block in p.blocks() {
        perm.extend(block);
    }
    perm
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    fn contains(&self, p: (f64, f64)) -> bool {
        let dx = p.0 - self.cx;
        let dy = p.1 - self.cy;
        (dx * dx + dy * dy).sqrt() <= self.r + 1e-9 * (1.0 + self.r)
    }
}

fn circle_two(a: (f64, f64), b: (f64, f64)) -> Circle {
    let cx = (a.0 + b.0) / 2.0;
    let cy = (a.1 + b.1) / 2.0;
    let r = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() / 2.0;
    Circle { cx, cy, r }
}

fn circumcircle(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<Circle> {
    let d = 2.0 * (a.0 * (b.1 - c.1) + b.0 * (c.1 - a.1) + c.0 * (a.1 - b.1));
    if d.abs() < 1e-12 {
        return None; // collinear
    }
    let a2 = a.0 * a.0 + a.1 * a.1;
    let b2 = b.0 * b.0 + b.1 * b.1;
    let c2 = c.0 * c.0 + c.1 * c.1;
    let cx = (a2 * (b.1 - c.1) + b2 * (c.1 - a.1) + c2 * (a.1 - b.1)) / d;
    let cy = (a2 * (c.0 - b.0) + b2 * (a.0 - c.0) + c2 * (b.0 - a.0)) / d;
    let r = ((a.0 - cx).powi(2) + (a.1 - cy).powi(2)).sqrt();
    Some(Circle { cx, cy, r })
}

/// Smallest circle through the (at most three) boundary points.
fn trivial_circle(boundary: &[(f64, f64)]) -> Circle {
    match boundary {
        [] => Circle {
            cx: 0.0,
            cy: 0.0,
            r: 0.0,
        },
        [a] => Circle {
            cx: a.0,
            cy: a.1,
            r: 0.0,
        },
        [a, b] => circle_two(*a, *b),
        [a, b, c] => {
            // Prefer a two-point circle when it already holds the third
            // point (also covers collinear triples exactly).
            for (p, q, s) in [(a, b, c), (a, c, b), (b, c, a)] {
                let circle = circle_two(*p, *q);
                if circle.contains(*s) {
                    return circle;
                }
            }
            circumcircle(*a, *b, *c).expect("non-collinear by construction")
        }
        _ => unreachable!("boundary holds at most 3 points"),
    }
}

fn welzl(points: &[(f64, f64)], end: usize, boundary: &mut Vec<(f64, f64)>) -> Circle {
    if end == 0 || boundary.len() == 3 {
        return trivial_circle(boundary);
    }
    let circle = welzl(points, end - 1, boundary);
    let p = points[end - 1];
    if circle.contains(p) {
        return circle;
    }
    boundary.push(p);
    let refined = welzl(points, end - 1, boundary);
    boundary.pop();
    refined
}

/// Exact minimal enclosing circle (randomized incremental); the shuffle is
/// driven by the caller's RNG so renders are reproducible.
pub fn enclosing_circle(points: &[(f64, f64)], rng: &mut dyn RngCore) -> Circle {
    let mut shuffled = points.to_vec();
    shuffled.shuffle(rng);
    welzl(&shuffled, shuffled.len(), &mut Vec::new())
}

/// SVG 1.1 scatter: one dot per point colored by block, one stroked minimal
/// enclosing circle per non-empty block.
pub fn scatter_svg(points: &[(f64, f64)], partition: &Partition, rng: &mut dyn RngCore) -> String {
    let blocks: Vec<Vec<usize>> = partition
        .blocks()
        .into_iter()
        .filter(|b| !b.is_empty())
        .collect();
    let circles: Vec<Circle> = blocks
        .iter()
        .map(|b| {
            let members: Vec<(f64, f64)> = b.iter().map(|&i| points[i]).collect();
            enclosing_circle(&members, rng)
        })
        .collect();

    // Bounds covering all points and circles, then a uniform scale to a
    // fixed canvas (uniform so circles stay circles).
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    for c in &circles {
        lo = (lo.0.min(c.cx - c.r), lo.1.min(c.cy - c.r));
        hi = (hi.0.max(c.cx + c.r), hi.1.max(c.cy + c.r));
    }
    let span = ((hi.0 - lo.0).max(1e-9), (hi.1 - lo.1).max(1e-9));
    let inner = 560.0;
    let pad = 20.0;
    let scale = (inner / span.0).min(inner / span.1);
    let width = span.0 * scale + 2.0 * pad;
    let height = span.1 * scale + 2.0 * pad;
    let fx = |x: f64| (x - lo.0) * scale + pad;
    let fy = |y: f64| (hi.1 - y) * scale + pad; // flip: SVG y grows downward

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{width:.1}\" height=\"{height:.1}\" \
         viewBox=\"0 0 {width:.1} {height:.1}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{width:.1}\" height=\"{height:.1}\" fill=\"#ffffff\"/>\n"
    ));
    for (b, (block, circle)) in blocks.iter().zip(&circles).enumerate() {
        let color = PALETTE[b % PALETTE.len()];
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" \
             stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            fx(circle.cx),
            fy(circle.cy),
            circle.r * scale,
        ));
        for &i in block {
            svg.push_str(&format!(
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                fx(points[i].0),
                fy(points[i].1),
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}
