//! Exact decision procedures for tree embeddings.
//!
//! [`decide_embedding`] is a complete backtracking search for the
//! polygon-constrained problem. [`embed_tree_unconstrained`] is the
//! polynomial recursive angular-split embedder for points in general
//! position with no bounding polygon.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::geometry::{
    classify_segments, cross, point_in_polygon, segment_hits_boundary, GeometryError, Location, Point,
    Segment, SegmentRelation, SimplePolygon,
};
use crate::model::{Embedding, EmbeddingInstance, FreeTree, PointSet};
use crate::verifier::verify_embedding;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("root node {root} out of range for {node_count} nodes")]
    RootOutOfRange { root: usize, node_count: usize },
    #[error("thread count must be positive")]
    ZeroThreads,
    #[error("GeneralPositionViolated: points {0}, {1}, {2} are collinear")]
    GeneralPositionViolated(usize, usize, usize),
    #[error("SizeMismatch: tree has {nodes} nodes but {points} points were given")]
    SizeMismatch { nodes: usize, points: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Symmetric point-visibility matrix; the diagonal is `true`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityGraph {
    n: usize,
    bits: Vec<bool>,
}

impl VisibilityGraph {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_visible(&self, p: usize, q: usize) -> bool {
        self.bits[p * self.n + q]
    }
}

pub fn build_visibility_graph(points: &PointSet, poly: &SimplePolygon) -> Result<VisibilityGraph, GeometryError> {
    let pts = points.points();
    for &p in pts {
        if point_in_polygon(p, poly) != Location::Inside {
            return Err(GeometryError::NotStrictlyInside(p));
        }
    }
    let n = pts.len();
    let mut bits = vec![false; n * n];
    for i in 0..n {
        bits[i * n + i] = true;
        for j in i + 1..n {
            let s = Segment::new(pts[i], pts[j]).expect("point set has distinct points");
            let v = !segment_hits_boundary(&s, poly);
            bits[i * n + j] = v;
            bits[j * n + i] = v;
        }
    }
    Ok(VisibilityGraph { n, bits })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Search root; defaults to the lowest-indexed node of maximum degree.
    pub root_node: Option<usize>,
    pub time_limit: Option<Duration>,
    pub thread_count: usize,
    /// Restrict candidates to the visibility graph and apply degree and
    /// component-packing cuts. Never changes the verdict.
    pub prune: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            root_node: None,
            time_limit: None,
            thread_count: 1,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Embedded(Embedding),
    Infeasible,
    TimedOut(Duration),
}

impl SolveOutcome {
    pub fn is_embedded(&self) -> bool {
        matches!(self, SolveOutcome::Embedded(_))
    }
}

pub fn decide_embedding(inst: &EmbeddingInstance, cfg: &SolverConfig) -> Result<SolveOutcome, SolverError> {
    let n = inst.tree().node_count();
    if cfg.thread_count == 0 {
        return Err(SolverError::ZeroThreads);
    }
    if let Some(root) = cfg.root_node {
        if root >= n {
            return Err(SolverError::RootOutOfRange { root, node_count: n });
        }
    }
    let start = Instant::now();
    if n == 1 {
        return Ok(SolveOutcome::Embedded(Embedding::new(vec![0])));
    }
    if cfg.time_limit.is_some_and(|limit| start.elapsed() >= limit) {
        return Ok(SolveOutcome::TimedOut(start.elapsed()));
    }

    let problem = Problem::new(inst, cfg)?;
    let ctl = Control {
        deadline: cfg.time_limit.map(|limit| start + limit),
        stop: AtomicBool::new(false),
        timed_out: AtomicBool::new(false),
    };
    let next_root = AtomicUsize::new(0);
    let found: Mutex<Option<Vec<usize>>> = Mutex::new(None);

    let work = || {
        let mut search = Search::new(&problem, &ctl);
        loop {
            if ctl.stop.load(AtomicOrdering::Relaxed) {
                return;
            }
            let q = next_root.fetch_add(1, AtomicOrdering::Relaxed);
            if q >= n {
                return;
            }
            match search.run_from(q) {
                RootResult::Found(mapping) => {
                    let mut slot = found.lock().expect("no panics while holding the lock");
                    if slot.is_none() {
                        *slot = Some(mapping);
                    }
                    ctl.stop.store(true, AtomicOrdering::Relaxed);
                    return;
                }
                RootResult::Exhausted => {}
                RootResult::Interrupted => return,
            }
        }
    };

    if cfg.thread_count == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..cfg.thread_count {
                s.spawn(work);
            }
        });
    }

    if let Some(mapping) = found.into_inner().expect("lock not poisoned") {
        let emb = Embedding::new(mapping);
        let report = verify_embedding(inst, &emb).expect("mapping has one entry per node");
        assert!(report.valid, "solver produced an invalid embedding: {:?}", report.violations);
        return Ok(SolveOutcome::Embedded(emb));
    }
    if ctl.timed_out.load(AtomicOrdering::Relaxed) {
        return Ok(SolveOutcome::TimedOut(start.elapsed()));
    }
    Ok(SolveOutcome::Infeasible)
}

struct Control {
    deadline: Option<Instant>,
    stop: AtomicBool,
    timed_out: AtomicBool,
}

/// Static data shared by all search threads.
struct Problem<'a> {
    points: &'a [Point],
    polygon: &'a SimplePolygon,
    prune: bool,
    /// Preorder from the root; `order[0]` is the root.
    order: Vec<usize>,
    parent: Vec<usize>,
    child_count: Vec<usize>,
    children_of: Vec<Vec<usize>>,
    subtree_size: Vec<usize>,
    /// Per point, the points an edge from it may reach: mutually visible
    /// with no third point on the segment. Only populated when pruning.
    neighbors: Vec<Vec<usize>>,
    all_points: Vec<usize>,
}

const NO_NODE: usize = usize::MAX;

impl<'a> Problem<'a> {
    fn new(inst: &'a EmbeddingInstance, cfg: &SolverConfig) -> Result<Self, SolverError> {
        let tree = inst.tree();
        let n = tree.node_count();
        let root = cfg.root_node.unwrap_or_else(|| {
            (0..n)
                .max_by_key(|&v| (tree.degree(v), std::cmp::Reverse(v)))
                .expect("tree is non-empty")
        });

        let mut order = Vec::with_capacity(n);
        let mut parent = vec![NO_NODE; n];
        let mut stack = vec![root];
        let mut seen = vec![false; n];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &c in tree.neighbors(v).iter().rev() {
                if !seen[c] {
                    seen[c] = true;
                    parent[c] = v;
                    stack.push(c);
                }
            }
        }
        let mut subtree_size = vec![1usize; n];
        for &v in order.iter().rev() {
            if parent[v] != NO_NODE {
                subtree_size[parent[v]] += subtree_size[v];
            }
        }
        let mut children_of = vec![Vec::new(); n];
        for &v in &order[1..] {
            children_of[parent[v]].push(v);
        }
        let child_count = children_of.iter().map(Vec::len).collect();

        let points = inst.points().points();
        let neighbors = if cfg.prune {
            let vis = build_visibility_graph(inst.points(), inst.polygon())?;
            let mut neighbors = vec![Vec::new(); n];
            for i in 0..n {
                for j in i + 1..n {
                    if !vis.is_visible(i, j) {
                        continue;
                    }
                    let s = Segment::new(points[i], points[j]).expect("distinct points");
                    let blocked = points
                        .iter()
                        .enumerate()
                        .any(|(k, &p)| k != i && k != j && s.contains(p));
                    if !blocked {
                        neighbors[i].push(j);
                        neighbors[j].push(i);
                    }
                }
            }
            for list in &mut neighbors {
                list.sort_unstable();
            }
            neighbors
        } else {
            Vec::new()
        };

        Ok(Problem {
            points,
            polygon: inst.polygon(),
            prune: cfg.prune,
            order,
            parent,
            child_count,
            children_of,
            subtree_size,
            neighbors,
            all_points: (0..n).collect(),
        })
    }

    fn n(&self) -> usize {
        self.points.len()
    }
}

enum RootResult {
    Found(Vec<usize>),
    Exhausted,
    Interrupted,
}

/// Upper bound on packing-check branching per call; past it the check
/// gives up and allows the placement.
const PACKING_BUDGET: usize = 4096;

/// Mutable search state for one thread.
struct Search<'p, 'a> {
    pb: &'p Problem<'a>,
    ctl: &'p Control,
    node_point: Vec<usize>,
    point_node: Vec<usize>,
    /// Placed non-root nodes, in placement order; each stands for the edge
    /// to its parent.
    placed: Vec<usize>,
    pending_children: Vec<usize>,
    free_neighbors: Vec<usize>,
    ticks: u64,
    // Scratch buffers for the packing check.
    component: Vec<usize>,
    queue: Vec<usize>,
}

impl<'p, 'a> Search<'p, 'a> {
    fn new(pb: &'p Problem<'a>, ctl: &'p Control) -> Self {
        let n = pb.n();
        Search {
            pb,
            ctl,
            node_point: vec![NO_NODE; n],
            point_node: vec![NO_NODE; n],
            placed: Vec::with_capacity(n),
            pending_children: pb.child_count.clone(),
            free_neighbors: if pb.prune {
                pb.neighbors.iter().map(Vec::len).collect()
            } else {
                Vec::new()
            },
            ticks: 0,
            component: vec![NO_NODE; n],
            queue: Vec::with_capacity(n),
        }
    }

    fn interrupted(&mut self) -> bool {
        self.ticks += 1;
        if !self.ticks.is_multiple_of(256) {
            return false;
        }
        if self.ctl.stop.load(AtomicOrdering::Relaxed) {
            return true;
        }
        if self.ctl.deadline.is_some_and(|d| Instant::now() >= d) {
            self.ctl.timed_out.store(true, AtomicOrdering::Relaxed);
            self.ctl.stop.store(true, AtomicOrdering::Relaxed);
            return true;
        }
        false
    }

    fn run_from(&mut self, root_point: usize) -> RootResult {
        let pb = self.pb;
        let n = pb.n();
        let root = pb.order[0];
        self.place(root, root_point);
        if pb.prune && !self.cuts_ok(root, root_point) {
            self.unplace(root, root_point);
            return RootResult::Exhausted;
        }

        let mut cursor = vec![0usize; n + 1];
        let mut level = 1;
        loop {
            if level == n {
                let mapping = self.node_point.clone();
                self.unwind();
                return RootResult::Found(mapping);
            }
            let node = pb.order[level];
            let pu = self.node_point[pb.parent[node]];
            let candidates: &[usize] = if pb.prune { &pb.neighbors[pu] } else { &pb.all_points };

            let mut advanced = false;
            while cursor[level] < candidates.len() {
                let q = candidates[cursor[level]];
                cursor[level] += 1;
                if self.point_node[q] != NO_NODE {
                    continue;
                }
                if self.interrupted() {
                    self.unwind();
                    return RootResult::Interrupted;
                }
                if !self.edge_ok(node, pu, q) {
                    continue;
                }
                self.place(node, q);
                if pb.prune && !self.cuts_ok(node, q) {
                    self.unplace(node, q);
                    continue;
                }
                advanced = true;
                break;
            }

            if advanced {
                level += 1;
                cursor[level] = 0;
            } else {
                level -= 1;
                if level == 0 {
                    self.unplace(root, root_point);
                    return RootResult::Exhausted;
                }
                let back = pb.order[level];
                self.unplace(back, self.node_point[back]);
            }
        }
    }

    fn unwind(&mut self) {
        while let Some(&v) = self.placed.last() {
            self.unplace(v, self.node_point[v]);
        }
        let root = self.pb.order[0];
        if self.node_point[root] != NO_NODE {
            self.unplace(root, self.node_point[root]);
        }
    }

    fn place(&mut self, node: usize, q: usize) {
        self.node_point[node] = q;
        self.point_node[q] = node;
        let parent = self.pb.parent[node];
        if parent != NO_NODE {
            self.placed.push(node);
            self.pending_children[parent] -= 1;
        }
        if self.pb.prune {
            for &r in &self.pb.neighbors[q] {
                self.free_neighbors[r] -= 1;
            }
        }
    }

    fn unplace(&mut self, node: usize, q: usize) {
        self.node_point[node] = NO_NODE;
        self.point_node[q] = NO_NODE;
        let parent = self.pb.parent[node];
        if parent != NO_NODE {
            let popped = self.placed.pop();
            debug_assert_eq!(popped, Some(node));
            self.pending_children[parent] += 1;
        }
        if self.pb.prune {
            for &r in &self.pb.neighbors[q] {
                self.free_neighbors[r] += 1;
            }
        }
    }

    /// Checks the edge `parent(node) -> q` against everything placed so far.
    fn edge_ok(&self, node: usize, pu: usize, q: usize) -> bool {
        let pb = self.pb;
        let pts = pb.points;
        let u = pb.parent[node];
        let seg = Segment::new(pts[pu], pts[q]).expect("distinct points");
        if !pb.prune {
            if segment_hits_boundary(&seg, pb.polygon) {
                return false;
            }
            for (r, &owner) in self.point_node.iter().enumerate() {
                if owner != NO_NODE && r != pu && seg.contains(pts[r]) {
                    return false;
                }
            }
        }
        for &x in &self.placed {
            let (a, b) = (self.node_point[pb.parent[x]], self.node_point[x]);
            let other = Segment::new(pts[a], pts[b]).expect("distinct points");
            if !pb.prune && other.contains(pts[q]) {
                return false;
            }
            let rel = classify_segments(&seg, &other);
            let ok = if x == u || pb.parent[x] == u {
                rel == SegmentRelation::TouchAtEndpoint(pts[pu])
            } else {
                rel == SegmentRelation::Disjoint
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Necessary conditions on the unplaced remainder after putting `node`
    /// on `q`: every placed node keeps enough free usable neighbours for its
    /// unplaced children, and the unplaced subtrees can be packed exactly into
    /// the connected components of free points.
    fn cuts_ok(&mut self, node: usize, q: usize) -> bool {
        let pb = self.pb;
        if self.free_neighbors[q] < self.pending_children[node] {
            return false;
        }
        for &r in &pb.neighbors[q] {
            let w = self.point_node[r];
            if w != NO_NODE && self.free_neighbors[r] < self.pending_children[w] {
                return false;
            }
        }
        self.packing_ok()
    }

    fn packing_ok(&mut self) -> bool {
        let pb = self.pb;
        let n = pb.n();

        self.component.fill(NO_NODE);
        let mut capacity = Vec::new();
        for start in 0..n {
            if self.point_node[start] != NO_NODE || self.component[start] != NO_NODE {
                continue;
            }
            let id = capacity.len();
            self.component[start] = id;
            self.queue.clear();
            self.queue.push(start);
            let mut size = 0;
            while let Some(p) = self.queue.pop() {
                size += 1;
                for &r in &pb.neighbors[p] {
                    if self.point_node[r] == NO_NODE && self.component[r] == NO_NODE {
                        self.component[r] = id;
                        self.queue.push(r);
                    }
                }
            }
            capacity.push(size);
        }
        if capacity.is_empty() {
            return true;
        }

        // One item per unplaced subtree hanging off a placed node.
        let mut items: Vec<(usize, Vec<usize>)> = Vec::new();
        for v in std::iter::once(pb.order[0]).chain(self.placed.iter().copied()) {
            if self.pending_children[v] == 0 {
                continue;
            }
            let pv = self.node_point[v];
            let mut allowed: Vec<usize> = pb.neighbors[pv]
                .iter()
                .filter(|&&r| self.point_node[r] == NO_NODE)
                .map(|&r| self.component[r])
                .collect();
            allowed.sort_unstable();
            allowed.dedup();
            for &c in &pb.children_of[v] {
                if self.node_point[c] == NO_NODE {
                    items.push((pb.subtree_size[c], allowed.clone()));
                }
            }
        }
        items.sort_by_key(|b| std::cmp::Reverse(b.0));
        let mut budget = PACKING_BUDGET;
        pack(&items, &mut capacity, &mut budget) != Some(false)
    }
}

/// `Some(true)` if packable, `Some(false)` if provably not, `None` when the
/// budget ran out.
fn pack(items: &[(usize, Vec<usize>)], capacity: &mut [usize], budget: &mut usize) -> Option<bool> {
    let Some(((size, allowed), rest)) = items.split_first() else {
        return Some(true);
    };
    for &c in allowed {
        if capacity[c] < *size {
            continue;
        }
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        capacity[c] -= size;
        let r = pack(rest, capacity, budget);
        capacity[c] += size;
        match r {
            Some(true) => return Some(true),
            None => return None,
            Some(false) => {}
        }
    }
    Some(false)
}

/// Returns a collinear triple `(i, j, k)` with `i < j < k`, if any.
pub fn check_general_position(points: &PointSet) -> Option<(usize, usize, usize)> {
    let pts = points.points();
    let n = pts.len();
    for i in 0..n {
        // Directions from i to every later point, reduced and sign-normalized.
        let mut dirs: Vec<((i64, i64), usize)> = (i + 1..n)
            .map(|j| (direction(pts[i], pts[j]), j))
            .collect();
        dirs.sort_unstable();
        if let Some(w) = dirs.windows(2).find(|w| w[0].0 == w[1].0) {
            let (j, k) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
            return Some((i, j, k));
        }
    }
    None
}

fn direction(a: Point, b: Point) -> (i64, i64) {
    let (mut dx, mut dy) = (b.x - a.x, b.y - a.y);
    let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()) as i64;
    dx /= g;
    dy /= g;
    if dx < 0 || (dx == 0 && dy < 0) {
        (-dx, -dy)
    } else {
        (dx, dy)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Embeds any tree on any point set in general position without a bounding
/// polygon.
///
/// The root (node 0) goes to the lowest point; the remaining points are
/// sorted by angle around it and cut into consecutive blocks, one per child
/// subtree (children by ascending index). Each child takes the first point
/// of its block and the block is handled recursively. All points of a block
/// lie strictly on one side of the line through the anchor and the child, so
/// blocks sit in disjoint wedges and no edges can cross.
pub fn embed_tree_unconstrained(tree: &FreeTree, points: &PointSet) -> Result<Embedding, SolverError> {
    let n = tree.node_count();
    if points.len() != n {
        return Err(SolverError::SizeMismatch {
            nodes: n,
            points: points.len(),
        });
    }
    if let Some((i, j, k)) = check_general_position(points) {
        return Err(SolverError::GeneralPositionViolated(i, j, k));
    }
    let pts = points.points();

    // Subtree sizes with node 0 as root.
    let mut parent = vec![NO_NODE; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &c in tree.neighbors(v) {
            if parent[c] == NO_NODE {
                parent[c] = v;
                stack.push(c);
            }
        }
    }
    let mut size = vec![1usize; n];
    for &v in order.iter().skip(1).rev() {
        size[parent[v]] += size[v];
    }

    let lowest = (0..n)
        .min_by_key(|&i| (pts[i].y, pts[i].x))
        .expect("at least one point");
    let mut mapping = vec![NO_NODE; n];
    mapping[0] = lowest;
    let rest: Vec<usize> = (0..n).filter(|&i| i != lowest).collect();
    let mut tasks = vec![(0usize, rest)];

    while let Some((node, mut block)) = tasks.pop() {
        let anchor = pts[mapping[node]];
        block.sort_by(|&a, &b| match cross(anchor, pts[a], pts[b]).cmp(&0) {
            Ordering::Greater => Ordering::Less,
            Ordering::Less => Ordering::Greater,
            Ordering::Equal => Ordering::Equal,
        });
        let mut offset = 0;
        for &c in tree.neighbors(node) {
            if c == parent[node] {
                continue;
            }
            let part = &block[offset..offset + size[c]];
            offset += size[c];
            mapping[c] = part[0];
            tasks.push((c, part[1..].to_vec()));
        }
        debug_assert_eq!(offset, block.len());
    }
    Ok(Embedding::new(mapping))
}
