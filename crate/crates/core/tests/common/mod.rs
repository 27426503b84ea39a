//! Test-only oracles and random instance generators. Nothing here calls the
//! library's predicates or solver; the geometry is re-derived with
//! parametric (dot/cross ratio) arithmetic.

#![allow(dead_code)]

use polyembed::geometry::{point_in_polygon, Location, Point, SimplePolygon};
use polyembed::model::{Embedding, EmbeddingInstance, FreeTree, PointSet};
use polyembed::verifier::is_valid_embedding;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

fn sub(a: Point, b: Point) -> (i128, i128) {
    ((a.x - b.x) as i128, (a.y - b.y) as i128)
}

fn det(u: (i128, i128), v: (i128, i128)) -> i128 {
    u.0 * v.1 - u.1 * v.0
}

fn dot(u: (i128, i128), v: (i128, i128)) -> i128 {
    u.0 * v.0 + u.1 * v.1
}

/// `p` on closed segment `ab`, via projection parameter in `[0, |ab|^2]`.
pub fn on_segment(p: Point, a: Point, b: Point) -> bool {
    let ab = sub(b, a);
    let ap = sub(p, a);
    det(ab, ap) == 0 && (0..=dot(ab, ab)).contains(&dot(ap, ab))
}

/// Common points of closed segments `ab` and `cd`.
#[derive(Debug, PartialEq, Eq)]
pub enum Meet {
    Empty,
    /// A single point, given as `a + (num/den)(b - a)` with `den > 0`.
    Single { num: i128, den: i128 },
    Many,
}

pub fn meet(a: Point, b: Point, c: Point, d: Point) -> Meet {
    let r = sub(b, a);
    let s = sub(d, c);
    let ca = sub(c, a);
    let den = det(r, s);
    if den != 0 {
        // a + t r = c + u s
        let (mut t, mut u, mut den) = (det(ca, s), det(ca, r), den);
        if den < 0 {
            t = -t;
            u = -u;
            den = -den;
        }
        if (0..=den).contains(&t) && (0..=den).contains(&u) {
            return Meet::Single { num: t, den };
        }
        return Meet::Empty;
    }
    if det(r, ca) != 0 {
        return Meet::Empty;
    }
    let len = dot(r, r);
    let tc = dot(ca, r);
    let td = dot(sub(d, a), r);
    let lo = tc.min(td).max(0);
    let hi = tc.max(td).min(len);
    match lo.cmp(&hi) {
        std::cmp::Ordering::Greater => Meet::Empty,
        std::cmp::Ordering::Equal => Meet::Single { num: lo, den: len },
        std::cmp::Ordering::Less => Meet::Many,
    }
}

fn single_is(a: Point, b: Point, num: i128, den: i128, q: Point) -> bool {
    let r = sub(b, a);
    let aq = sub(q, a);
    num * r.0 == aq.0 * den && num * r.1 == aq.1 * den
}

/// Brute-force planarity check of a straight-line tree drawing.
pub fn oracle_planar(tree: &FreeTree, points: &PointSet, mapping: &[usize]) -> bool {
    let n = tree.node_count();
    if mapping.len() != n || points.len() != n {
        return false;
    }
    let mut sorted = mapping.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return false;
    }
    let at = |v: usize| points.get(mapping[v]);
    let edges = tree.edges();
    for (i, &(u1, v1)) in edges.iter().enumerate() {
        for &(u2, v2) in &edges[i + 1..] {
            let shared = [u1, v1].into_iter().find(|&x| x == u2 || x == v2);
            match (meet(at(u1), at(v1), at(u2), at(v2)), shared) {
                (Meet::Empty, None) => {}
                (Meet::Single { num, den }, Some(s)) if single_is(at(u1), at(v1), num, den, at(s)) => {}
                _ => return false,
            }
        }
        for w in 0..n {
            if w != u1 && w != v1 && on_segment(at(w), at(u1), at(v1)) {
                return false;
            }
        }
    }
    true
}

/// Uniform-ish random labelled tree on `n` nodes.
pub fn random_tree(rng: &mut StdRng, n: usize) -> FreeTree {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let edges: Vec<(usize, usize)> = (1..n)
        .map(|i| (labels[rng.gen_range(0..i)], labels[i]))
        .collect();
    FreeTree::new(n, &edges).unwrap()
}

/// Distinct random integer points in `[lo, hi]^2`.
pub fn random_points(rng: &mut StdRng, n: usize, lo: i64, hi: i64) -> PointSet {
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point::new(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    PointSet::new(pts).unwrap()
}

fn collinear(a: Point, b: Point, c: Point) -> bool {
    det(sub(b, a), sub(c, a)) == 0
}

/// Random points with no three collinear (rejection sampling).
pub fn random_general_position(rng: &mut StdRng, n: usize, hi: i64) -> PointSet {
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point::new(rng.gen_range(0..=hi), rng.gen_range(0..=hi));
        let bad = pts.contains(&p)
            || (0..pts.len()).any(|i| (i + 1..pts.len()).any(|j| collinear(pts[i], pts[j], p)));
        if !bad {
            pts.push(p);
        }
    }
    PointSet::new(pts).unwrap()
}

fn poly(v: &[(i64, i64)]) -> SimplePolygon {
    SimplePolygon::new(v.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
}

/// Small polygons used for randomized constrained instances.
pub fn polygon_catalog() -> Vec<SimplePolygon> {
    vec![
        // Triangle.
        poly(&[(0, 0), (10, 0), (0, 10)]),
        // Square.
        poly(&[(0, 0), (8, 0), (8, 8), (0, 8)]),
        // L shape.
        poly(&[(0, 0), (10, 0), (10, 4), (4, 4), (4, 10), (0, 10)]),
        // Notched triangle (two groups, B = 3).
        poly(&[(0, 0), (4, 0), (4, 2), (6, 0), (10, 0), (0, 10)]),
        // Comb with two teeth.
        poly(&[(0, 0), (9, 0), (9, 8), (7, 8), (7, 3), (5, 3), (5, 8), (3, 8), (3, 3), (1, 3), (1, 8), (0, 8)]),
        // Zig-zag.
        poly(&[(0, 0), (6, 0), (3, 4), (9, 4), (9, 9), (0, 9), (5, 6), (0, 3)]),
    ]
}

/// Random instance with `n` strictly interior points inside `polygon`.
pub fn random_constrained(rng: &mut StdRng, polygon: &SimplePolygon, n: usize) -> EmbeddingInstance {
    let v = polygon.vertices();
    let (x0, x1) = (v.iter().map(|p| p.x).min().unwrap(), v.iter().map(|p| p.x).max().unwrap());
    let (y0, y1) = (v.iter().map(|p| p.y).min().unwrap(), v.iter().map(|p| p.y).max().unwrap());
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point::new(rng.gen_range(x0..=x1), rng.gen_range(y0..=y1));
        if point_in_polygon(p, polygon) == Location::Inside && !pts.contains(&p) {
            pts.push(p);
        }
    }
    EmbeddingInstance::new(random_tree(rng, n), PointSet::new(pts).unwrap(), polygon.clone()).unwrap()
}

/// Exhaustive search over all bijections, each checked by the verifier.
/// Permutations are enumerated with Heap's algorithm.
pub fn brute_force_feasible(inst: &EmbeddingInstance) -> bool {
    let n = inst.tree().node_count();
    let mut perm: Vec<usize> = (0..n).collect();
    let check = |perm: &[usize]| is_valid_embedding(inst, &Embedding::new(perm.to_vec())).unwrap();
    if check(&perm) {
        return true;
    }
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if check(&perm) {
                return true;
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}
