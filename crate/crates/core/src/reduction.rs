//! Reduction from 3-partition to polygon-constrained tree embedding.
//!
//! A 3-partition instance `(B, a_1..a_3n)` becomes:
//! - a spider tree: one hub plus, for every `a_i`, a path of `a_i` nodes whose
//!   first node hangs off the hub;
//! - a triangle `(0,0), (n(B+2),0), (0,n(B+2))` with `n-1` thin notches cut
//!   out of its bottom edge, one between consecutive point groups;
//! - the apex point `p0 = (1, n(B+2)-2)` and `n` groups of `B` points on the
//!   line `y = 1`.
//!
//! The notches make groups mutually invisible, so every path must land
//! inside a single group, which is exactly a 3-partition.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, SimplePolygon};
use crate::model::{
    parse_json, to_canonical_json, Embedding, EmbeddingInstance, FreeTree, ModelError, PointSet,
};

/// Largest instance (number of elements) the exhaustive oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("LengthNotMultipleOf3: {0} elements is not a positive multiple of 3")]
    LengthNotMultipleOf3(usize),
    #[error("ElementOutOfRange: a[{index}] = {value} is not strictly between B/4 and B/2")]
    ElementOutOfRange { index: usize, value: u64 },
    #[error("SumMismatch: elements sum to {sum}, expected n*B = {expected}")]
    SumMismatch { sum: u128, expected: u128 },
    #[error("InvalidParameters: n = {n}, B = {b}: {reason}")]
    InvalidParameters { n: usize, b: u64, reason: &'static str },
    #[error("InvalidPartition: {0}")]
    InvalidPartition(String),
    #[error("TooLarge: {0} elements exceeds the exhaustive search limit of {BRUTE_FORCE_LIMIT}")]
    TooLarge(usize),
    #[error("PathStraddlesGroups: path {0} is spread over more than one point group")]
    PathStraddlesGroups(usize),
    #[error("HubNotOnP0: the hub node is not drawn on the apex point")]
    HubNotOnP0,
    #[error("SizeMismatch: embedding has {got} entries, reduction expects {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A validated 3-partition instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreePartitionInstance {
    target: u64,
    values: Vec<u64>,
}

impl ThreePartitionInstance {
    pub fn new(target: u64, values: Vec<u64>) -> Result<Self, ReductionError> {
        if values.is_empty() || !values.len().is_multiple_of(3) {
            return Err(ReductionError::LengthNotMultipleOf3(values.len()));
        }
        let b = target as u128;
        for (index, &value) in values.iter().enumerate() {
            let v = value as u128;
            if !(4 * v > b && 2 * v < b) {
                return Err(ReductionError::ElementOutOfRange { index, value });
            }
        }
        let sum: u128 = values.iter().map(|&v| v as u128).sum();
        let expected = b * (values.len() / 3) as u128;
        if sum != expected {
            return Err(ReductionError::SumMismatch { sum, expected });
        }
        Ok(ThreePartitionInstance { target, values })
    }

    /// The target sum `B`.
    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Number of triples `n`.
    pub fn groups(&self) -> usize {
        self.values.len() / 3
    }
}

/// Same as [`ThreePartitionInstance::new`].
pub fn validate_3p(target: u64, values: &[u64]) -> Result<ThreePartitionInstance, ReductionError> {
    ThreePartitionInstance::new(target, values.to_vec())
}

/// A solution: `n` sorted index triples, listed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partition {
    pub sets: Vec<[usize; 3]>,
}

impl Partition {
    /// Normalizes triple order and checks the partition against `inst`.
    pub fn new(inst: &ThreePartitionInstance, mut sets: Vec<[usize; 3]>) -> Result<Self, ReductionError> {
        for t in &mut sets {
            t.sort_unstable();
        }
        sets.sort_unstable();
        check_partition(inst.target(), inst.values(), &sets)?;
        Ok(Partition { sets })
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }
}

fn check_partition(target: u64, values: &[u64], sets: &[[usize; 3]]) -> Result<(), ReductionError> {
    if sets.len() * 3 != values.len() {
        return Err(ReductionError::InvalidPartition(format!(
            "{} triples for {} elements",
            sets.len(),
            values.len()
        )));
    }
    let mut used = vec![false; values.len()];
    for t in sets {
        for &i in t {
            if i >= values.len() || used[i] {
                return Err(ReductionError::InvalidPartition(format!(
                    "index {i} is out of range or repeated"
                )));
            }
            used[i] = true;
        }
        let sum: u128 = t.iter().map(|&i| values[i] as u128).sum();
        if sum != target as u128 {
            return Err(ReductionError::InvalidPartition(format!(
                "triple {t:?} sums to {sum}, expected {target}"
            )));
        }
    }
    Ok(())
}

/// Index bookkeeping that maps an embedding back to a partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionMeta {
    #[serde(rename = "B")]
    pub target: u64,
    /// Per group, the point indices of `p_{g,1..B}` left to right.
    pub group_points: Vec<Vec<usize>>,
    pub n: usize,
    pub p0_point: usize,
    /// Per path, its node indices starting at the node adjacent to the hub.
    pub path_nodes: Vec<Vec<usize>>,
    pub v0_node: usize,
}

impl ReductionMeta {
    pub fn node_count(&self) -> usize {
        1 + self.path_nodes.iter().map(Vec::len).sum::<usize>()
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, ReductionError> {
        Ok(parse_json(text)?)
    }
}

/// Tree half of the layout: hub and path node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLayout {
    pub v0_node: usize,
    pub path_nodes: Vec<Vec<usize>>,
}

/// Point half of the layout: apex and group point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointLayout {
    pub p0_point: usize,
    pub group_points: Vec<Vec<usize>>,
}

/// Hub is node 0; path `i` occupies the next `a_i` consecutive indices.
pub fn build_tree(inst: &ThreePartitionInstance) -> Result<(FreeTree, TreeLayout), ReductionError> {
    let node_count = 1 + inst.values().iter().map(|&a| a as usize).sum::<usize>();
    let mut edges = Vec::with_capacity(node_count - 1);
    let mut path_nodes = Vec::with_capacity(inst.values().len());
    let mut next = 1;
    for &a in inst.values() {
        let nodes: Vec<usize> = (next..next + a as usize).collect();
        next += a as usize;
        edges.push((0, nodes[0]));
        edges.extend(nodes.windows(2).map(|w| (w[0], w[1])));
        path_nodes.push(nodes);
    }
    let tree = FreeTree::new(node_count, &edges)?;
    Ok((
        tree,
        TreeLayout {
            v0_node: 0,
            path_nodes,
        },
    ))
}

/// The notched triangle, as a counter-clockwise ring of `3n` vertices.
pub fn build_polygon(n: usize, target: u64) -> Result<SimplePolygon, ReductionError> {
    if n == 0 || target == 0 {
        return Err(ReductionError::InvalidParameters {
            n,
            b: target,
            reason: "need n >= 1 and B >= 1",
        });
    }
    let step = target as i64 + 2;
    let side = n as i64 * step;
    let b = target as i64;
    let mut vertices = Vec::with_capacity(3 * n);
    vertices.push(Point::new(0, 0));
    for k in 0..n as i64 - 1 {
        let base = b + 1 + k * step;
        vertices.push(Point::new(base, 0));
        vertices.push(Point::new(base, 2));
        vertices.push(Point::new(base + 2, 0));
    }
    vertices.push(Point::new(side, 0));
    vertices.push(Point::new(0, side));
    Ok(SimplePolygon::new(vertices).map_err(ModelError::from)?)
}

/// `p0` first, then the groups left to right.
pub fn build_points(n: usize, target: u64) -> Result<(PointSet, PointLayout), ReductionError> {
    if n == 0 || target < 3 {
        return Err(ReductionError::InvalidParameters {
            n,
            b: target,
            reason: "need n >= 1 and B >= 3",
        });
    }
    let step = target as i64 + 2;
    let mut points = Vec::with_capacity(n * target as usize + 1);
    points.push(Point::new(1, n as i64 * step - 2));
    let mut group_points = Vec::with_capacity(n);
    for i in 0..n as i64 {
        let start = points.len();
        points.extend((1..=target as i64).map(|j| Point::new(i * step + j, 1)));
        group_points.push((start..points.len()).collect());
    }
    Ok((
        PointSet::new(points)?,
        PointLayout {
            p0_point: 0,
            group_points,
        },
    ))
}

pub fn build_instance(
    inst: &ThreePartitionInstance,
) -> Result<(EmbeddingInstance, ReductionMeta), ReductionError> {
    let n = inst.groups();
    let (tree, tree_layout) = build_tree(inst)?;
    let (points, point_layout) = build_points(n, inst.target())?;
    let polygon = build_polygon(n, inst.target())?;
    let instance = EmbeddingInstance::new(tree, points, polygon)?;
    let meta = ReductionMeta {
        target: inst.target(),
        group_points: point_layout.group_points,
        n,
        p0_point: point_layout.p0_point,
        path_nodes: tree_layout.path_nodes,
        v0_node: tree_layout.v0_node,
    };
    Ok((instance, meta))
}

/// Reads the partition induced by an embedding of a reduction instance.
///
/// A verifier-valid embedding that puts one path into two groups would
/// contradict the construction, so it is reported as
/// [`ReductionError::PathStraddlesGroups`] rather than handled.
pub fn extract_partition(meta: &ReductionMeta, emb: &Embedding) -> Result<Partition, ReductionError> {
    let expected = meta.node_count();
    if emb.len() != expected {
        return Err(ReductionError::SizeMismatch {
            expected,
            got: emb.len(),
        });
    }
    if !emb.is_bijection(expected) {
        return Err(ModelError::NotBijection.into());
    }
    if emb.mapping[meta.v0_node] != meta.p0_point {
        return Err(ReductionError::HubNotOnP0);
    }
    let mut group_of_point = vec![usize::MAX; expected];
    for (g, pts) in meta.group_points.iter().enumerate() {
        for &p in pts {
            if p < expected {
                group_of_point[p] = g;
            }
        }
    }
    let mut by_group: Vec<Vec<usize>> = vec![Vec::new(); meta.group_points.len()];
    for (i, nodes) in meta.path_nodes.iter().enumerate() {
        let mut groups = nodes.iter().map(|&v| group_of_point[emb.mapping[v]]);
        let first = groups.next().ok_or_else(|| {
            ReductionError::InvalidPartition(format!("path {i} is empty"))
        })?;
        if first == usize::MAX {
            return Err(ReductionError::HubNotOnP0);
        }
        if groups.any(|g| g != first) {
            return Err(ReductionError::PathStraddlesGroups(i));
        }
        by_group[first].push(i);
    }
    let mut sets = Vec::with_capacity(by_group.len());
    for (g, paths) in by_group.iter().enumerate() {
        let triple: [usize; 3] = paths.as_slice().try_into().map_err(|_| {
            ReductionError::InvalidPartition(format!("group {g} holds {} paths", paths.len()))
        })?;
        sets.push(triple);
    }
    for t in &mut sets {
        t.sort_unstable();
    }
    sets.sort_unstable();
    let values: Vec<u64> = meta.path_nodes.iter().map(|p| p.len() as u64).collect();
    check_partition(meta.target, &values, &sets)?;
    Ok(Partition { sets })
}

/// Builds the embedding a partition certifies: hub on `p0`, and each group's
/// three paths laid left to right along its points, heads leftmost.
pub fn embedding_from_partition(
    meta: &ReductionMeta,
    partition: &Partition,
) -> Result<Embedding, ReductionError> {
    let values: Vec<u64> = meta.path_nodes.iter().map(|p| p.len() as u64).collect();
    check_partition(meta.target, &values, &partition.sets)?;
    if partition.sets.len() != meta.group_points.len() {
        return Err(ReductionError::InvalidPartition(format!(
            "{} triples for {} groups",
            partition.sets.len(),
            meta.group_points.len()
        )));
    }
    let mut mapping = vec![usize::MAX; meta.node_count()];
    mapping[meta.v0_node] = meta.p0_point;
    for (triple, group) in partition.sets.iter().zip(&meta.group_points) {
        let mut slots = group.iter();
        for &path in triple {
            for &node in &meta.path_nodes[path] {
                mapping[node] = *slots.next().expect("triple sums to B");
            }
        }
    }
    Ok(Embedding::new(mapping))
}

/// Exhaustive 3-partition search returning the lexicographically least
/// solution, or `None`.
pub fn brute_force_3p(inst: &ThreePartitionInstance) -> Result<Option<Partition>, ReductionError> {
    let m = inst.values().len();
    if m > BRUTE_FORCE_LIMIT {
        return Err(ReductionError::TooLarge(m));
    }
    let mut used = vec![false; m];
    let mut sets = Vec::with_capacity(m / 3);
    if search_triples(inst.values(), inst.target(), &mut used, &mut sets) {
        Ok(Some(Partition { sets }))
    } else {
        Ok(None)
    }
}

fn search_triples(values: &[u64], target: u64, used: &mut [bool], sets: &mut Vec<[usize; 3]>) -> bool {
    let Some(i) = used.iter().position(|&u| !u) else {
        return true;
    };
    used[i] = true;
    for j in i + 1..values.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        for k in j + 1..values.len() {
            if used[k] || values[i] + values[j] + values[k] != target {
                continue;
            }
            used[k] = true;
            sets.push([i, j, k]);
            if search_triples(values, target, used, sets) {
                return true;
            }
            sets.pop();
            used[k] = false;
        }
        used[j] = false;
    }
    used[i] = false;
    false
}
