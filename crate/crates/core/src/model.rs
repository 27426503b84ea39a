//! Problem types: free trees, point sets, embedding instances and embeddings,
//! together with their canonical JSON file formats.

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{point_in_polygon, GeometryError, Location, Point, SimplePolygon};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("tree has {tree_nodes} nodes but {points} points were given")]
    NodeCountMismatch { tree_nodes: usize, points: usize },
    #[error("polygon is not simple")]
    PolygonNotSimple,
    #[error("point {index} at {point} is not strictly inside the polygon")]
    PointOnOrOutsideBoundary { index: usize, point: Point },
    #[error("tree is not connected")]
    TreeNotConnected,
    #[error("tree edge ({0}, {1}) closes a cycle")]
    TreeHasCycle(usize, usize),
    #[error("tree edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("tree edge ({0}, {1}) is duplicated")]
    DuplicateEdge(usize, usize),
    #[error("node index {index} out of range for {node_count} nodes")]
    NodeOutOfRange { index: usize, node_count: usize },
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("mapping is not a bijection onto the point set")]
    NotBijection,
    #[error("mapping has {got} entries, expected {expected}")]
    MappingLength { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<serde_json::Error> for ModelError {
    fn from(e: serde_json::Error) -> Self {
        ModelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// An unrooted tree on nodes `0..node_count`. Edges are stored as `(u, v)`
/// with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeTree {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl FreeTree {
    pub fn new(node_count: usize, edges: &[(usize, usize)]) -> Result<Self, ModelError> {
        if node_count == 0 {
            return Err(ModelError::TreeNotConnected);
        }
        let mut dsu = DisjointSets::new(node_count);
        let mut normalized = Vec::with_capacity(edges.len());
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in edges {
            for index in [u, v] {
                if index >= node_count {
                    return Err(ModelError::NodeOutOfRange { index, node_count });
                }
            }
            if u == v {
                return Err(ModelError::SelfLoop(u, v));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(ModelError::DuplicateEdge(e.0, e.1));
            }
            if !dsu.union(u, v) {
                return Err(ModelError::TreeHasCycle(u, v));
            }
            normalized.push(e);
        }
        if normalized.len() + 1 != node_count {
            return Err(ModelError::TreeNotConnected);
        }
        normalized.sort_unstable();
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(FreeTree {
            node_count,
            edges: normalized,
            adjacency,
        })
    }

    /// Infers `node_count = edges.len() + 1`.
    pub fn from_edges(edges: &[(usize, usize)]) -> Result<Self, ModelError> {
        FreeTree::new(edges.len() + 1, edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Pairwise distinct points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self, ModelError> {
        for p in &points {
            Point::checked(p.x, p.y)?;
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by_key(|&i| (points[i], i));
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                return Err(ModelError::DuplicatePoint(w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        Ok(PointSet { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> Point {
        self.points[i]
    }
}

/// A validated (tree, points, polygon) triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingInstance {
    tree: FreeTree,
    points: PointSet,
    polygon: SimplePolygon,
}

impl EmbeddingInstance {
    pub fn new(tree: FreeTree, points: PointSet, polygon: SimplePolygon) -> Result<Self, ModelError> {
        if tree.node_count() != points.len() {
            return Err(ModelError::NodeCountMismatch {
                tree_nodes: tree.node_count(),
                points: points.len(),
            });
        }
        for (index, &point) in points.points().iter().enumerate() {
            if point_in_polygon(point, &polygon) != Location::Inside {
                return Err(ModelError::PointOnOrOutsideBoundary { index, point });
            }
        }
        Ok(EmbeddingInstance {
            tree,
            points,
            polygon,
        })
    }

    pub fn tree(&self) -> &FreeTree {
        &self.tree
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn polygon(&self) -> &SimplePolygon {
        &self.polygon
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            points: self.points.points().to_vec(),
            polygon: self.polygon.vertices().to_vec(),
            tree_edges: self.tree.edges().iter().map(|&(u, v)| [u, v]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&self.to_raw())
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        validate_instance(&parse_json::<RawInstance>(text)?)
    }
}

/// Instance file contents before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub points: Vec<Point>,
    pub polygon: Vec<Point>,
    pub tree_edges: Vec<[usize; 2]>,
}

/// Checks every instance invariant, reporting the first violation.
pub fn validate_instance(raw: &RawInstance) -> Result<EmbeddingInstance, ModelError> {
    let polygon = match SimplePolygon::new(raw.polygon.clone()) {
        Ok(p) => p,
        Err(GeometryError::NotSimple) => return Err(ModelError::PolygonNotSimple),
        Err(e) => return Err(e.into()),
    };
    let edges: Vec<(usize, usize)> = raw.tree_edges.iter().map(|e| (e[0], e[1])).collect();
    let tree = FreeTree::from_edges(&edges)?;
    if tree.node_count() != raw.points.len() {
        return Err(ModelError::NodeCountMismatch {
            tree_nodes: tree.node_count(),
            points: raw.points.len(),
        });
    }
    let points = PointSet::new(raw.points.clone())?;
    EmbeddingInstance::new(tree, points, polygon)
}

/// `mapping[v]` is the index of the point node `v` is drawn on. Not
/// necessarily a bijection; see [`Embedding::checked`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Embedding {
    pub mapping: Vec<usize>,
}

impl Embedding {
    pub fn new(mapping: Vec<usize>) -> Self {
        Embedding { mapping }
    }

    /// Accepts only permutations of `0..node_count`.
    pub fn checked(mapping: Vec<usize>, node_count: usize) -> Result<Self, ModelError> {
        if mapping.len() != node_count {
            return Err(ModelError::MappingLength {
                expected: node_count,
                got: mapping.len(),
            });
        }
        let emb = Embedding { mapping };
        if !emb.is_bijection(node_count) {
            return Err(ModelError::NotBijection);
        }
        Ok(emb)
    }

    pub fn is_bijection(&self, point_count: usize) -> bool {
        if self.mapping.len() != point_count {
            return false;
        }
        let mut hit = vec![false; point_count];
        for &p in &self.mapping {
            if p >= point_count || hit[p] {
                return false;
            }
            hit[p] = true;
        }
        true
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    /// Parses without checking the bijection property.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        parse_json(text)
    }

    pub fn from_json_checked(text: &str, node_count: usize) -> Result<Self, ModelError> {
        let raw: Embedding = parse_json(text)?;
        Embedding::checked(raw.mapping, node_count)
    }
}

/// Point file used by the unconstrained embedder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawPoints {
    pub points: Vec<Point>,
}

/// Tree file used by the unconstrained embedder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawTree {
    pub tree_edges: Vec<[usize; 2]>,
}

impl RawTree {
    pub fn to_tree(&self) -> Result<FreeTree, ModelError> {
        let edges: Vec<(usize, usize)> = self.tree_edges.iter().map(|e| (e[0], e[1])).collect();
        FreeTree::from_edges(&edges)
    }
}

/// Compact JSON with struct fields declared in sorted order, newline-terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("in-memory values serialize");
    s.push('\n');
    s
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, ModelError> {
    let value: T = serde_json::from_str(text)?;
    Ok(value)
}

/// Re-emits arbitrary JSON compactly with sorted object keys.
pub fn canonicalize_json(text: &str) -> Result<String, ModelError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    Ok(to_canonical_json(&value))
}
