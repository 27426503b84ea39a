//! Exact integer geometry: orientation, segment classification,
//! point-in-polygon, boundary contact and visibility inside a simple polygon.
//!
//! Coordinates are `i64` bounded by [`COORD_LIMIT`]; every determinant is
//! evaluated in `i128` so no predicate can overflow or round.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest accepted absolute coordinate value (2^31 - 1).
pub const COORD_LIMIT: i64 = i32::MAX as i64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("coordinate {0} exceeds the supported magnitude {COORD_LIMIT}")]
    CoordinateOutOfRange(i64),
    #[error("degenerate segment at {0}")]
    DegenerateSegment(Point),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon boundary is not simple")]
    NotSimple,
    #[error("point {0} is not strictly inside the polygon")]
    NotStrictlyInside(Point),
}

/// A lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Builds a point, rejecting coordinates outside `±COORD_LIMIT`.
    pub fn checked(x: i64, y: i64) -> Result<Self, GeometryError> {
        for c in [x, y] {
            if c.unsigned_abs() > COORD_LIMIT as u64 {
                return Err(GeometryError::CoordinateOutOfRange(c));
            }
        }
        Ok(Point { x, y })
    }

    pub fn in_range(&self) -> bool {
        Point::checked(self.x, self.y).is_ok()
    }
}

impl From<[i64; 2]> for Point {
    fn from([x, y]: [i64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [i64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

/// Exact cross product `(b - a) x (c - a)`.
#[inline]
pub fn cross(a: Point, b: Point, c: Point) -> i128 {
    let (bx, by) = ((b.x - a.x) as i128, (b.y - a.y) as i128);
    let (cx, cy) = ((c.x - a.x) as i128, (c.y - a.y) as i128);
    bx * cy - by * cx
}

#[inline]
pub fn orient2d(a: Point, b: Point, c: Point) -> Orientation {
    match cross(a, b, c).cmp(&0) {
        Ordering::Greater => Orientation::CounterClockwise,
        Ordering::Less => Orientation::Clockwise,
        Ordering::Equal => Orientation::Collinear,
    }
}

/// A closed segment with distinct endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment {
    a: Point,
    b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeometryError> {
        if a == b {
            return Err(GeometryError::DegenerateSegment(a));
        }
        Ok(Segment { a, b })
    }

    pub fn a(&self) -> Point {
        self.a
    }

    pub fn b(&self) -> Point {
        self.b
    }

    /// True iff `p` lies on the closed segment.
    pub fn contains(&self, p: Point) -> bool {
        cross(self.a, self.b, p) == 0 && in_box(self.a, self.b, p)
    }

    /// True iff `p` lies on the segment but is not one of its endpoints.
    pub fn contains_in_interior(&self, p: Point) -> bool {
        p != self.a && p != self.b && self.contains(p)
    }
}

#[inline]
fn in_box(a: Point, b: Point, p: Point) -> bool {
    a.x.min(b.x) <= p.x && p.x <= a.x.max(b.x) && a.y.min(b.y) <= p.y && p.y <= a.y.max(b.y)
}

/// How two closed segments meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentRelation {
    Disjoint,
    /// Single interior-interior crossing point.
    ProperCrossing,
    /// The only common point is an endpoint of both segments.
    TouchAtEndpoint(Point),
    /// An endpoint of one segment lies in the interior of the other.
    EndpointOnInterior(Point),
    /// Collinear and sharing more than one point.
    CollinearOverlap,
}

impl SegmentRelation {
    pub fn same_kind(&self, other: &SegmentRelation) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

pub fn classify_segments(s: &Segment, t: &Segment) -> SegmentRelation {
    let o1 = cross(s.a, s.b, t.a).signum();
    let o2 = cross(s.a, s.b, t.b).signum();

    if o1 == 0 && o2 == 0 {
        return classify_collinear(s, t);
    }

    for p in [s.a, s.b] {
        if p == t.a || p == t.b {
            return SegmentRelation::TouchAtEndpoint(p);
        }
    }

    let o3 = cross(t.a, t.b, s.a).signum();
    let o4 = cross(t.a, t.b, s.b).signum();

    if o1 * o2 < 0 && o3 * o4 < 0 {
        return SegmentRelation::ProperCrossing;
    }
    if o1 == 0 && in_box(s.a, s.b, t.a) {
        return SegmentRelation::EndpointOnInterior(t.a);
    }
    if o2 == 0 && in_box(s.a, s.b, t.b) {
        return SegmentRelation::EndpointOnInterior(t.b);
    }
    if o3 == 0 && in_box(t.a, t.b, s.a) {
        return SegmentRelation::EndpointOnInterior(s.a);
    }
    if o4 == 0 && in_box(t.a, t.b, s.b) {
        return SegmentRelation::EndpointOnInterior(s.b);
    }
    SegmentRelation::Disjoint
}

fn classify_collinear(s: &Segment, t: &Segment) -> SegmentRelation {
    // Project onto the axis along which s is not constant.
    let key = |p: Point| if s.a.x != s.b.x { p.x } else { p.y };
    let (s_lo, s_hi) = order_by(s.a, s.b, key);
    let (t_lo, t_hi) = order_by(t.a, t.b, key);
    let lo = if key(s_lo) >= key(t_lo) { s_lo } else { t_lo };
    let hi = if key(s_hi) <= key(t_hi) { s_hi } else { t_hi };
    match key(lo).cmp(&key(hi)) {
        Ordering::Greater => SegmentRelation::Disjoint,
        Ordering::Equal => SegmentRelation::TouchAtEndpoint(lo),
        Ordering::Less => SegmentRelation::CollinearOverlap,
    }
}

fn order_by(a: Point, b: Point, key: impl Fn(Point) -> i64) -> (Point, Point) {
    if key(a) <= key(b) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Twice the signed area of a vertex ring (positive for counter-clockwise).
pub fn signed_area2(vertices: &[Point]) -> i128 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let (p, q) = (vertices[i], vertices[(i + 1) % n]);
            p.x as i128 * q.y as i128 - q.x as i128 * p.y as i128
        })
        .sum()
}

/// Checks that the closed ring `vertices` is a simple polygon boundary.
pub fn is_simple(vertices: &[Point]) -> Result<bool, GeometryError> {
    let k = vertices.len();
    if k < 3 {
        return Err(GeometryError::TooFewVertices(k));
    }
    let mut edges = Vec::with_capacity(k);
    for i in 0..k {
        match Segment::new(vertices[i], vertices[(i + 1) % k]) {
            Ok(e) => edges.push(e),
            Err(_) => return Ok(false),
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            let rel = classify_segments(&edges[i], &edges[j]);
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            let ok = if adjacent {
                let shared = if j == i + 1 { edges[j].a } else { edges[i].a };
                rel == SegmentRelation::TouchAtEndpoint(shared)
            } else {
                rel == SegmentRelation::Disjoint
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Returns the ring in counter-clockwise order, keeping the first vertex.
pub fn normalize_ccw(vertices: &[Point]) -> Vec<Point> {
    let mut out = vertices.to_vec();
    if signed_area2(vertices) < 0 && out.len() > 1 {
        out[1..].reverse();
    }
    out
}

/// A validated simple polygon with counter-clockwise vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplePolygon {
    vertices: Vec<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    OnBoundary,
    Outside,
}

impl SimplePolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if let Some(bad) = vertices.iter().find(|p| !p.in_range()) {
            let c = if bad.x.unsigned_abs() > COORD_LIMIT as u64 { bad.x } else { bad.y };
            return Err(GeometryError::CoordinateOutOfRange(c));
        }
        if !is_simple(&vertices)? {
            return Err(GeometryError::NotSimple);
        }
        Ok(SimplePolygon {
            vertices: normalize_ccw(&vertices),
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| Segment {
            a: self.vertices[i],
            b: self.vertices[(i + 1) % k],
        })
    }

    pub fn signed_area2(&self) -> i128 {
        signed_area2(&self.vertices)
    }
}

/// Crossing-number classification; boundary contact is detected first.
pub fn point_in_polygon(p: Point, poly: &SimplePolygon) -> Location {
    if poly.edges().any(|e| e.contains(p)) {
        return Location::OnBoundary;
    }
    let mut inside = false;
    for e in poly.edges() {
        let (a, b) = (e.a, e.b);
        // Half-open rule on y so vertices are counted once.
        if (a.y > p.y) != (b.y > p.y) {
            // Crossing strictly right of p: sign of cross vs edge direction.
            let c = cross(a, b, p);
            let upward = b.y > a.y;
            if (upward && c > 0) || (!upward && c < 0) {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// True iff the closed segment shares at least one point with the boundary.
pub fn segment_hits_boundary(s: &Segment, poly: &SimplePolygon) -> bool {
    poly.edges()
        .any(|e| classify_segments(s, &e) != SegmentRelation::Disjoint)
}

/// Mutual visibility of two strictly interior points.
pub fn visible(p: Point, q: Point, poly: &SimplePolygon) -> Result<bool, GeometryError> {
    for x in [p, q] {
        if point_in_polygon(x, poly) != Location::Inside {
            return Err(GeometryError::NotStrictlyInside(x));
        }
    }
    if p == q {
        return Ok(true);
    }
    let s = Segment { a: p, b: q };
    Ok(!segment_hits_boundary(&s, poly))
}
