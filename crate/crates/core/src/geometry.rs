//! Slider shapes, contact parameterization along the boundary, and the
//! support-distance quantities that set the torsional friction load.
//!
//! Body frame conventions: the centre of mass sits at the origin, the
//! contact normal points into the slider, and the contact parameter `s`
//! increases along the tangent `rot90(normal)`. On a counter-clockwise
//! polygon that tangent runs against the vertex order; on the default
//! (left-hand) edge of an axis-aligned square it is the body `+y` direction.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature;

pub type Vec2 = Vector2<f64>;

/// Tolerance on the contact parameter when checking edge bounds.
const EDGE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not convex at vertex {0}")]
    NonConvex(usize),
    #[error("degenerate shape: {0}")]
    DegenerateShape(String),
    #[error("contact parameter s = {s} outside edge bounds [{lo}, {hi}]")]
    OutOfEdge { s: f64, lo: f64, hi: f64 },
    #[error("edge {0:?} does not exist on this shape")]
    NoSuchEdge(EdgeId),
}

/// Identifies the part of the boundary that carries the contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeId {
    /// Polygon edge from vertex `i` to vertex `i + 1`.
    Edge(usize),
    Circumference,
    /// A contact frame built directly from a point and a normal.
    Free,
}

/// Admissible range of the contact parameter on one edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpan {
    pub lo: f64,
    pub hi: f64,
    /// Periodic spans wrap instead of ending at a corner.
    pub periodic: bool,
}

impl EdgeSpan {
    pub fn contains(&self, s: f64) -> bool {
        self.periodic || (s >= self.lo - EDGE_SLACK && s <= self.hi + EDGE_SLACK)
    }

    /// Wraps a periodic parameter into `(lo, hi]`; identity otherwise.
    pub fn wrap(&self, s: f64) -> f64 {
        if !self.periodic || (s > self.lo && s <= self.hi) {
            return s;
        }
        let period = self.hi - self.lo;
        let mut w = (s - self.lo).rem_euclid(period) + self.lo;
        if w <= self.lo {
            w += period;
        }
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    /// Builds a convex polygon, re-ordering to counter-clockwise and
    /// re-centring on the area centroid.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        if vertices
            .iter()
            .any(|v| !v.x.is_finite() || !v.y.is_finite())
        {
            return Err(GeometryError::DegenerateShape("non-finite vertex".into()));
        }
        let mut vertices = vertices;
        let area = signed_area(&vertices);
        let scale = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if area.abs() <= 1e-14 * scale * scale || area.abs() == 0.0 {
            return Err(GeometryError::DegenerateShape(
                "polygon has zero area".into(),
            ));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if cross(b - a, c - b) < -1e-12 * scale * scale {
                return Err(GeometryError::NonConvex((i + 1) % n));
            }
        }
        let centroid = area_centroid(&vertices);
        for v in &mut vertices {
            *v -= centroid;
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    fn edge(&self, i: usize) -> Option<(Vec2, Vec2)> {
        let n = self.vertices.len();
        (i < n).then(|| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// Slider boundary and support area, with the centre of mass at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SliderShape {
    Polygon(Polygon),
    Circle { radius: f64 },
}

impl SliderShape {
    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        Polygon::new(vertices).map(SliderShape::Polygon)
    }

    pub fn rectangle(width: f64, height: f64) -> Result<Self, GeometryError> {
        let (hw, hh) = (0.5 * width, 0.5 * height);
        Self::polygon(vec![
            Vec2::new(hw, -hh),
            Vec2::new(hw, hh),
            Vec2::new(-hw, hh),
            Vec2::new(-hw, -hh),
        ])
    }

    pub fn square(side: f64) -> Result<Self, GeometryError> {
        Self::rectangle(side, side)
    }

    pub fn circle(radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::DegenerateShape(format!(
                "circle radius must be > 0, got {radius}"
            )));
        }
        Ok(SliderShape::Circle { radius })
    }

    /// Returns a copy scaled uniformly about the centre of mass.
    pub fn scaled(&self, k: f64) -> Result<Self, GeometryError> {
        match self {
            SliderShape::Polygon(p) => Self::polygon(p.vertices.iter().map(|v| v * k).collect()),
            SliderShape::Circle { radius } => Self::circle(radius * k),
        }
    }

    /// The edge whose outward normal is closest to the body `-x` axis, i.e.
    /// the face a pusher approaching along `+x` touches first.
    pub fn default_edge(&self) -> EdgeId {
        match self {
            SliderShape::Circle { .. } => EdgeId::Circumference,
            SliderShape::Polygon(p) => {
                let mut best = 0;
                let mut best_nx = f64::NEG_INFINITY;
                for i in 0..p.vertices.len() {
                    let (a, b) = p.edge(i).unwrap();
                    let n = inward_normal(a, b);
                    if n.x > best_nx + 1e-12 {
                        best_nx = n.x;
                        best = i;
                    }
                }
                EdgeId::Edge(best)
            }
        }
    }

    pub fn edge_span(&self, edge: EdgeId) -> Result<EdgeSpan, GeometryError> {
        match (self, edge) {
            (SliderShape::Circle { radius }, EdgeId::Circumference) => Ok(EdgeSpan {
                lo: -PI * radius,
                hi: PI * radius,
                periodic: true,
            }),
            (SliderShape::Polygon(p), EdgeId::Edge(i)) => {
                let (a, b) = p.edge(i).ok_or(GeometryError::NoSuchEdge(edge))?;
                let half = 0.5 * (b - a).norm();
                Ok(EdgeSpan {
                    lo: -half,
                    hi: half,
                    periodic: false,
                })
            }
            _ => Err(GeometryError::NoSuchEdge(edge)),
        }
    }

    /// Contact frame at parameter `s` on `edge`.
    ///
    /// Polygon edges measure `s` from the edge midpoint. On a circle `s = 0`
    /// is the body point `(-r, 0)` and `s` is taken modulo the circumference.
    pub fn contact_frame(
        &self,
        edge: EdgeId,
        s: f64,
        mu: f64,
    ) -> Result<ContactFrame, GeometryError> {
        let span = self.edge_span(edge)?;
        match self {
            SliderShape::Circle { radius } => {
                let s = span.wrap(s);
                let angle = s / radius;
                let (sin, cos) = angle.sin_cos();
                let normal = Vec2::new(cos, -sin);
                let point = -normal * *radius;
                Ok(ContactFrame::with_edge(point, normal, mu, edge, span))
            }
            SliderShape::Polygon(p) => {
                if !span.contains(s) {
                    return Err(GeometryError::OutOfEdge {
                        s,
                        lo: span.lo,
                        hi: span.hi,
                    });
                }
                let EdgeId::Edge(i) = edge else {
                    return Err(GeometryError::NoSuchEdge(edge));
                };
                let (a, b) = p.edge(i).ok_or(GeometryError::NoSuchEdge(edge))?;
                let normal = inward_normal(a, b);
                let tangent = rot90(normal);
                let point = 0.5 * (a + b) + s * tangent;
                Ok(ContactFrame::with_edge(point, normal, mu, edge, span))
            }
        }
    }

    /// Mean distance of the support area from the centre of mass under a
    /// uniform pressure distribution.
    pub fn mean_support_distance(&self) -> f64 {
        match self {
            SliderShape::Circle { radius } => 2.0 * radius / 3.0,
            SliderShape::Polygon(p) => polygon_mean_distance(&p.vertices),
        }
    }

    /// Largest distance from the centre of mass to the support area.
    pub fn max_support_distance(&self) -> f64 {
        match self {
            SliderShape::Circle { radius } => *radius,
            SliderShape::Polygon(p) => p.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// Closed boundary sampled for plotting, body frame.
    pub fn outline(&self, segments: usize) -> Vec<Vec2> {
        match self {
            SliderShape::Polygon(p) => p.vertices.clone(),
            SliderShape::Circle { radius } => (0..segments)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / segments as f64;
                    Vec2::new(radius * a.cos(), radius * a.sin())
                })
                .collect(),
        }
    }
}

/// Body-frame contact geometry and friction at the pusher contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactFrame {
    pub point: Vec2,
    /// Unit normal pointing into the slider.
    pub normal: Vec2,
    /// `rot90(normal)`.
    pub tangent: Vec2,
    pub mu: f64,
    pub edge: EdgeId,
    pub span: EdgeSpan,
}

impl ContactFrame {
    /// Builds a free-standing frame; `normal` is normalized.
    pub fn new(point: Vec2, normal: Vec2, mu: f64) -> Self {
        let span = EdgeSpan {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            periodic: false,
        };
        Self::with_edge(point, normal, mu, EdgeId::Free, span)
    }

    fn with_edge(point: Vec2, normal: Vec2, mu: f64, edge: EdgeId, span: EdgeSpan) -> Self {
        let normal = normal.normalize();
        Self {
            point,
            normal,
            tangent: rot90(normal),
            mu,
            edge,
            span,
        }
    }

    /// Reflection of the frame about the body x-axis. The tangent is
    /// recomputed from the reflected normal, so it flips relative to the
    /// reflected geometry.
    pub fn mirrored(&self) -> Self {
        let m = |v: Vec2| Vec2::new(v.x, -v.y);
        Self::with_edge(m(self.point), m(self.normal), self.mu, self.edge, self.span)
    }
}

pub(crate) fn rot90(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

pub(crate) fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

fn inward_normal(a: Vec2, b: Vec2) -> Vec2 {
    rot90((b - a).normalize())
}

fn signed_area(v: &[Vec2]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum::<f64>()
}

fn area_centroid(v: &[Vec2]) -> Vec2 {
    let n = v.len();
    let mut acc = Vec2::zeros();
    let mut area2 = 0.0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        let w = cross(a, b);
        acc += (a + b) * w;
        area2 += w;
    }
    acc / (3.0 * area2)
}

const GAUSS_ORDER: usize = 16;
const GAUSS_PANELS: usize = 8;

/// Fan-triangulates from the centroid. For the triangle `(0, a, b)` the
/// substitution `x = t * (a + u (b - a))` gives
/// `int |x| dA = |a x b| / 3 * int_0^1 |a + u (b - a)| du`, whose integrand
/// is smooth because the edge never passes through the origin.
fn polygon_mean_distance(v: &[Vec2]) -> f64 {
    let rule = quadrature::gauss_legendre(GAUSS_ORDER);
    let n = v.len();
    let mut moment = 0.0;
    let mut area = 0.0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        let jac = cross(a, b);
        let line =
            quadrature::integrate(|u| (a + (b - a) * u).norm(), 0.0, 1.0, &rule, GAUSS_PANELS);
        moment += jac * line / 3.0;
        area += 0.5 * jac;
    }
    moment / area
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> SliderShape {
        SliderShape::square(1.0).unwrap()
    }

    #[test]
    fn square_default_edge_midpoint() {
        let sq = unit_square();
        let cf = sq.contact_frame(sq.default_edge(), 0.0, 0.5).unwrap();
        assert_relative_eq!(cf.point, Vec2::new(-0.5, 0.0), epsilon = 1e-15);
        assert_relative_eq!(cf.normal, Vec2::new(1.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(cf.tangent, Vec2::new(0.0, 1.0), epsilon = 1e-15);
    }

    #[test]
    fn square_default_edge_offset() {
        let sq = unit_square();
        let cf = sq.contact_frame(sq.default_edge(), 0.4, 0.5).unwrap();
        assert_relative_eq!(cf.point, Vec2::new(-0.5, 0.4), epsilon = 1e-15);
        assert_relative_eq!(cf.normal, Vec2::new(1.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn circle_reference_point() {
        let c = SliderShape::circle(0.5).unwrap();
        let cf = c.contact_frame(EdgeId::Circumference, 0.0, 0.0).unwrap();
        assert_relative_eq!(cf.point, Vec2::new(-0.5, 0.0), epsilon = 1e-15);
        assert_relative_eq!(cf.normal, Vec2::new(1.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn circle_parameter_follows_tangent() {
        let c = SliderShape::circle(0.5).unwrap();
        let h = 1e-6;
        let a = c.contact_frame(EdgeId::Circumference, 0.3, 0.0).unwrap();
        let b = c
            .contact_frame(EdgeId::Circumference, 0.3 + h, 0.0)
            .unwrap();
        let dc = (b.point - a.point) / h;
        assert_relative_eq!(dc, a.tangent, epsilon = 1e-6);
    }

    #[test]
    fn circle_wraps_modulo_circumference() {
        let c = SliderShape::circle(0.5).unwrap();
        let a = c.contact_frame(EdgeId::Circumference, 0.2, 0.0).unwrap();
        let b = c
            .contact_frame(EdgeId::Circumference, 0.2 + PI, 0.0)
            .unwrap();
        assert_relative_eq!(a.point, b.point, epsilon = 1e-12);
    }

    #[test]
    fn out_of_edge_is_an_error() {
        let sq = unit_square();
        let err = sq.contact_frame(sq.default_edge(), 0.6, 0.0).unwrap_err();
        assert!(matches!(err, GeometryError::OutOfEdge { .. }));
    }

    #[test]
    fn bad_edge_ids_are_rejected() {
        let sq = unit_square();
        assert!(sq.contact_frame(EdgeId::Edge(4), 0.0, 0.0).is_err());
        assert!(sq.contact_frame(EdgeId::Circumference, 0.0, 0.0).is_err());
    }

    #[test]
    fn max_support_distances() {
        assert_relative_eq!(
            unit_square().max_support_distance(),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            SliderShape::circle(0.5).unwrap().max_support_distance(),
            0.5
        );
        assert_relative_eq!(
            SliderShape::square(2.0).unwrap().max_support_distance(),
            2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn tiny_circle_mean_distance_vanishes() {
        let d = SliderShape::circle(1e-9).unwrap().mean_support_distance();
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn circle_closed_form_matches_polygon_quadrature() {
        let n = 4096;
        let r = 0.5;
        let ngon: Vec<Vec2> = (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                Vec2::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let d_poly = SliderShape::polygon(ngon).unwrap().mean_support_distance();
        let d_circle = SliderShape::circle(r).unwrap().mean_support_distance();
        assert_relative_eq!(d_poly, d_circle, max_relative = 1e-6);
    }

    #[test]
    fn polygon_recentred_and_reordered() {
        // Clockwise, offset triangle.
        let tri = SliderShape::polygon(vec![
            Vec2::new(10.0, 10.0),
            Vec2::new(10.0, 13.0),
            Vec2::new(13.0, 10.0),
        ])
        .unwrap();
        let SliderShape::Polygon(p) = &tri else {
            unreachable!()
        };
        assert!(p.area() > 0.0);
        let c = area_centroid(p.vertices());
        assert!(c.norm() < 1e-12);
    }

    #[test]
    fn rejects_invalid_polygons() {
        assert_eq!(
            SliderShape::polygon(vec![Vec2::zeros(), Vec2::x()]).unwrap_err(),
            GeometryError::TooFewVertices(2)
        );
        let flat = SliderShape::polygon(vec![Vec2::zeros(), Vec2::x(), 2.0 * Vec2::x()]);
        assert!(matches!(flat, Err(GeometryError::DegenerateShape(_))));
        let dart = SliderShape::polygon(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, -1.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(2.0, 1.0),
        ]);
        assert!(matches!(dart, Err(GeometryError::NonConvex(_))));
        assert!(SliderShape::circle(0.0).is_err());
        assert!(SliderShape::circle(-1.0).is_err());
    }
}
