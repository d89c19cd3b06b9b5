//! Two-dimensional MG regions in the `(S^U, S^e)` plane.
//!
//! Every region is a down-set: it contains the nonnegativity constraints
//! implicitly, and a hull of achievable points always reaches the axes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analytic::LinearConstraint;
use crate::error::{Error, Result};

const BOX: f64 = 1e6;
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Polygon,
    Segment,
    Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MGRegion {
    pub constraints: Vec<LinearConstraint>,
    /// Counter-clockwise, starting from the lowest (then leftmost) vertex.
    pub vertices: Vec<(f64, f64)>,
    pub shape: Shape,
}

fn clip(poly: &[(f64, f64)], c: &LinearConstraint) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (fp, fq) = (c.excess(p.0, p.1), c.excess(q.0, q.1));
        let (pin, qin) = (fp <= EPS, fq <= EPS);
        if pin {
            out.push(p);
        }
        if pin != qin {
            let t = fp / (fp - fq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    out
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() <= 1e-12 && (a.1 - b.1).abs() <= 1e-12
}

/// Drops repeated and collinear vertices of a closed polygon.
fn simplify(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.dedup_by(|a, b| close(*a, *b));
    while pts.len() > 1 && close(pts[0], pts[pts.len() - 1]) {
        pts.pop();
    }
    let mut changed = true;
    while changed && pts.len() > 2 {
        changed = false;
        for i in 0..pts.len() {
            let n = pts.len();
            let (a, b, c) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
            if cross(a, b, c).abs() <= 1e-15 {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

fn rotate_to_start(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    if let Some(i) = (0..pts.len()).min_by(|&i, &j| {
        let (a, b) = (pts[i], pts[j]);
        (a.1, a.0).partial_cmp(&(b.1, b.0)).expect("finite vertices")
    }) {
        pts.rotate_left(i);
    }
    pts
}

fn shape_of(pts: &[(f64, f64)]) -> Shape {
    match pts.len() {
        1 => Shape::Point,
        2 => Shape::Segment,
        _ => Shape::Polygon,
    }
}

/// Intersects the half-planes with the nonnegative quadrant.
///
/// Fails when the system is empty or does not bound the region.
pub fn polygon_from_constraints(constraints: &[LinearConstraint]) -> Result<MGRegion> {
    for c in constraints {
        if !(c.coeff_u.is_finite() && c.coeff_e.is_finite() && c.rhs.is_finite()) {
            return Err(Error::Region(format!("non-finite constraint {c:?}")));
        }
    }
    let clip_all = |size: f64| -> Result<Vec<(f64, f64)>> {
        let mut poly = vec![(0.0, 0.0), (size, 0.0), (size, size), (0.0, size)];
        for c in constraints {
            poly = clip(&poly, c);
            if poly.is_empty() {
                return Err(Error::Region("the constraints admit no point".into()));
            }
        }
        Ok(poly)
    };
    let coarse = clip_all(BOX)?;
    if coarse.iter().any(|&(u, e)| u > BOX / 2.0 || e > BOX / 2.0) {
        return Err(Error::Region("the constraints do not bound the region".into()));
    }
    // Clipping a huge box loses digits; redo it with a box just around the region.
    let extent = coarse.iter().fold(0.0_f64, |m, &(u, e)| m.max(u).max(e));
    let vertices = rotate_to_start(simplify(clip_all(2.0 * extent + 1.0)?));
    Ok(MGRegion {
        constraints: constraints.to_vec(),
        shape: shape_of(&vertices),
        vertices,
    })
}

/// Down-set hull of achievable points: convex hull of the points, their
/// projections on both axes, and the origin.
pub fn timeshare_hull(points: &[(f64, f64)]) -> Result<MGRegion> {
    if points.iter().any(|&(u, e)| !(u.is_finite() && e.is_finite()) || u < 0.0 || e < 0.0) {
        return Err(Error::Region("hull points must be finite and nonnegative".into()));
    }
    let mut pts = vec![(0.0, 0.0)];
    for &(u, e) in points {
        pts.extend([(u, e), (u, 0.0), (0.0, e)]);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    pts.dedup_by(|a, b| close(*a, *b));
    let hull = convex_hull(&pts);
    let vertices = rotate_to_start(simplify(hull));
    let n = vertices.len();
    let mut constraints = Vec::new();
    if n >= 2 {
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            // Outward normal of a CCW edge.
            let (nu, ne) = (b.1 - a.1, a.0 - b.0);
            if nu <= EPS && ne <= EPS {
                continue;
            }
            let scale = if ne > EPS { ne } else { nu };
            let (cu, ce) = (nu / scale, ne / scale);
            constraints.push(LinearConstraint {
                coeff_u: cu,
                coeff_e: ce,
                rhs: cu * a.0 + ce * a.1,
            });
        }
    }
    Ok(MGRegion {
        constraints,
        shape: shape_of(&vertices),
        vertices,
    })
}

/// Andrew's monotone chain; input sorted, output CCW without repeats.
fn convex_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Points spread evenly along the region boundary, vertices included.
fn boundary_samples(region: &MGRegion, samples: usize) -> Vec<(f64, f64)> {
    let v = &region.vertices;
    let n = v.len();
    if n < 2 {
        return v.clone();
    }
    let edge_len = |i: usize| {
        let (a, b) = (v[i], v[(i + 1) % n]);
        ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt()
    };
    let perimeter: f64 = (0..n).map(edge_len).sum();
    let mut out = v.clone();
    if perimeter == 0.0 {
        return out;
    }
    let mut edge = 0;
    let mut walked = 0.0;
    for s in 0..samples {
        let target = perimeter * s as f64 / samples as f64;
        while edge + 1 < n && walked + edge_len(edge) < target {
            walked += edge_len(edge);
            edge += 1;
        }
        let len = edge_len(edge);
        let t = if len > 0.0 { ((target - walked) / len).clamp(0.0, 1.0) } else { 0.0 };
        let (a, b) = (v[edge], v[(edge + 1) % n]);
        out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
    }
    out
}

/// Checks `inner ⊆ outer` at the inner vertices and at `samples` boundary
/// points (at least 100). Returns the largest constraint excess found.
pub fn is_subset(inner: &MGRegion, outer: &MGRegion, samples: usize) -> (bool, f64) {
    let mut worst = f64::NEG_INFINITY;
    for (u, e) in boundary_samples(inner, samples.max(100)) {
        worst = worst.max(-u).max(-e);
        for c in &outer.constraints {
            worst = worst.max(c.excess(u, e));
        }
    }
    let worst = worst.max(0.0);
    (worst <= 1e-9, worst)
}

/// Largest distance between corresponding vertices, or `None` when the
/// vertex counts differ.
pub fn vertex_distance(a: &MGRegion, b: &MGRegion) -> Option<f64> {
    if a.vertices.len() != b.vertices.len() {
        return None;
    }
    Some(
        a.vertices
            .iter()
            .zip(&b.vertices)
            .map(|(p, q)| (p.0 - q.0).abs().max((p.1 - q.1).abs()))
            .fold(0.0, f64::max),
    )
}

/// Renders labelled region outlines over a pair of axes.
pub fn to_svg(curves: &[(&str, &MGRegion)]) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 50.0;
    const COLORS: [&str; 6] = ["#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];
    let max = curves
        .iter()
        .flat_map(|(_, r)| r.vertices.iter())
        .fold(0.0_f64, |m, &(u, e)| m.max(u).max(e));
    let scale = if max > 0.0 { SIZE / (max * 1.05) } else { SIZE };
    let px = |u: f64| PAD + u * scale;
    let py = |e: f64| PAD + SIZE - e * scale;
    let mut s = String::new();
    let total = SIZE + 2.0 * PAD;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(
        s,
        r#"<path d="M {} {} L {} {} M {} {} L {} {}" stroke="gray" fill="none"/>"#,
        px(0.0),
        py(0.0),
        px(0.0) + SIZE,
        py(0.0),
        px(0.0),
        py(0.0),
        px(0.0),
        py(0.0) - SIZE
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">S^U</text>"#, PAD + SIZE - 20.0, PAD + SIZE + 30.0);
    let _ = writeln!(s, r#"<text x="10" y="{}" font-size="12">S^e</text>"#, PAD - 10.0);
    for (i, (label, region)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (j, &(u, e)) in region.vertices.iter().enumerate() {
            let _ = write!(d, "{} {:.3} {:.3} ", if j == 0 { "M" } else { "L" }, px(u), py(e));
        }
        d.push('Z');
        let _ = writeln!(s, r#"<path d="{d}" stroke="{color}" fill="none"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            PAD + 10.0,
            PAD + 15.0 * (i as f64 + 1.0),
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lc(u: f64, e: f64, rhs: f64) -> LinearConstraint {
        LinearConstraint {
            coeff_u: u,
            coeff_e: e,
            rhs,
        }
    }

    fn assert_vertices(r: &MGRegion, want: &[(f64, f64)]) {
        assert_eq!(r.vertices.len(), want.len(), "{:?}", r.vertices);
        for (a, b) in r.vertices.iter().zip(want) {
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9, "{:?}", r.vertices);
        }
    }

    #[test]
    fn trapezoid() {
        let r = polygon_from_constraints(&[lc(1.0, 0.0, 0.24), lc(1.0, 1.0, 0.7852)]).unwrap();
        assert_eq!(r.shape, Shape::Polygon);
        assert_vertices(&r, &[(0.0, 0.0), (0.24, 0.0), (0.24, 0.5452), (0.0, 0.7852)]);
    }

    #[test]
    fn unbounded_and_empty_are_flagged() {
        assert!(polygon_from_constraints(&[lc(1.0, 0.0, 0.3)]).is_err());
        assert!(polygon_from_constraints(&[lc(1.0, 1.0, -1.0)]).is_err());
    }

    #[test]
    fn degenerate_shapes() {
        let seg = polygon_from_constraints(&[lc(1.0, 0.0, 0.0), lc(0.0, 1.0, 0.5)]).unwrap();
        assert_eq!(seg.shape, Shape::Segment);
        let pt = polygon_from_constraints(&[lc(1.0, 0.0, 0.0), lc(0.0, 1.0, 0.0)]).unwrap();
        assert_eq!(pt.shape, Shape::Point);
    }

    #[test]
    fn single_point_hull_is_rectangle() {
        let r = timeshare_hull(&[(0.2, 0.5)]).unwrap();
        assert_vertices(&r, &[(0.0, 0.0), (0.2, 0.0), (0.2, 0.5), (0.0, 0.5)]);
        let back = polygon_from_constraints(&r.constraints).unwrap();
        assert_vertices(&back, &r.vertices);
    }

    #[test]
    fn hull_of_corners_matches_constraint_polygon() {
        let cons = [lc(1.0, 0.0, 0.24), lc(1.0065, 1.0, 0.7852)];
        let poly = polygon_from_constraints(&cons).unwrap();
        let hull = timeshare_hull(&poly.vertices).unwrap();
        assert_eq!(vertex_distance(&poly, &hull), Some(0.0));
        let again = polygon_from_constraints(&hull.constraints).unwrap();
        assert!(vertex_distance(&poly, &again).unwrap() < 1e-12);
    }

    #[test]
    fn subset_is_strict() {
        let inner = polygon_from_constraints(&[lc(1.0, 0.0, 0.24), lc(1.2, 1.0, 0.7)]).unwrap();
        let outer = polygon_from_constraints(&[lc(1.0, 0.0, 0.24), lc(1.0, 1.0, 0.7852)]).unwrap();
        assert!(is_subset(&inner, &outer, 100).0);
        let (ok, worst) = is_subset(&outer, &inner, 100);
        assert!(!ok && worst > 0.01);
    }

    #[test]
    fn svg_is_well_formed() {
        let r = timeshare_hull(&[(0.2, 0.5)]).unwrap();
        let s = to_svg(&[("inner <A>", &r)]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("inner &lt;A&gt;"));
    }
}
