//! Certificate checking for tree embeddings.
//!
//! An embedding is valid when the mapping is a bijection, edges meet only at
//! shared endpoints, no edge passes through another node's point, and (for
//! the constrained problem) no edge touches the polygon boundary. All checks
//! are pairwise and exact: `O(m^2 + m*k + m*n)` predicate calls.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{classify_segments, segment_hits_boundary, Segment, SegmentRelation, SimplePolygon};
use crate::model::{to_canonical_json, Embedding, EmbeddingInstance, FreeTree, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("mapping has {got} entries but the tree has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    NotBijection,
    EdgeCrossesEdge,
    EdgesOverlapAtSegment,
    EdgeHitsBoundary,
    EdgeThroughMappedPoint,
}

/// One failed condition. `edges` index into [`FreeTree::edges`], `points`
/// into the point set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub edges: Vec<usize>,
    pub points: Vec<usize>,
}

// Field order here is the serialized key order.
#[derive(Serialize)]
struct ViolationRecord<'a> {
    edges: &'a [usize],
    kind: ViolationKind,
    points: &'a [usize],
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        VerificationReport {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn has_kind(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            valid: bool,
            violations: Vec<ViolationRecord<'a>>,
        }
        to_canonical_json(&Record {
            valid: self.valid,
            violations: self
                .violations
                .iter()
                .map(|v| ViolationRecord {
                    edges: &v.edges,
                    kind: v.kind,
                    points: &v.points,
                })
                .collect(),
        })
    }
}

pub fn verify_embedding(inst: &EmbeddingInstance, emb: &Embedding) -> Result<VerificationReport, VerifyError> {
    let violations = collect(inst.tree(), inst.points(), Some(inst.polygon()), emb, false)?;
    Ok(VerificationReport::from_violations(violations))
}

/// Like [`verify_embedding`] without the polygon boundary check.
pub fn verify_planar_only(
    tree: &FreeTree,
    points: &PointSet,
    emb: &Embedding,
) -> Result<VerificationReport, VerifyError> {
    let violations = collect(tree, points, None, emb, false)?;
    Ok(VerificationReport::from_violations(violations))
}

/// Stops at the first violation; same verdict as `verify_embedding(..).valid`.
pub fn is_valid_embedding(inst: &EmbeddingInstance, emb: &Embedding) -> Result<bool, VerifyError> {
    Ok(collect(inst.tree(), inst.points(), Some(inst.polygon()), emb, true)?.is_empty())
}

fn collect(
    tree: &FreeTree,
    points: &PointSet,
    polygon: Option<&SimplePolygon>,
    emb: &Embedding,
    first_only: bool,
) -> Result<Vec<Violation>, VerifyError> {
    let n = tree.node_count();
    if emb.len() != n {
        return Err(VerifyError::LengthMismatch {
            expected: n,
            got: emb.len(),
        });
    }
    let mut out = Vec::new();

    let mut hits = vec![0usize; points.len()];
    for &p in &emb.mapping {
        if p >= points.len() {
            out.push(Violation {
                kind: ViolationKind::NotBijection,
                edges: vec![],
                points: vec![p],
            });
        } else {
            hits[p] += 1;
        }
    }
    for (p, &h) in hits.iter().enumerate() {
        if h > 1 || (h == 0 && points.len() == n) {
            out.push(Violation {
                kind: ViolationKind::NotBijection,
                edges: vec![],
                points: vec![p],
            });
        }
    }
    if points.len() != n && out.is_empty() {
        out.push(Violation {
            kind: ViolationKind::NotBijection,
            edges: vec![],
            points: vec![],
        });
    }
    // Geometry is meaningless once two nodes share a point.
    if !out.is_empty() {
        out.sort();
        out.dedup();
        return Ok(out);
    }

    let edges = tree.edges();
    let segments: Vec<Segment> = edges
        .iter()
        .map(|&(u, v)| {
            Segment::new(points.get(emb.mapping[u]), points.get(emb.mapping[v]))
                .expect("bijection maps distinct nodes to distinct points")
        })
        .collect();

    macro_rules! report {
        ($kind:expr, $edges:expr, $points:expr) => {{
            out.push(Violation {
                kind: $kind,
                edges: $edges,
                points: $points,
            });
            if first_only {
                return Ok(out);
            }
        }};
    }

    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = (edges[i], edges[j]);
            let shared = [a.0, a.1].into_iter().find(|&x| x == b.0 || x == b.1);
            let rel = classify_segments(&segments[i], &segments[j]);
            let kind = match (shared, rel) {
                (_, SegmentRelation::CollinearOverlap) => Some(ViolationKind::EdgesOverlapAtSegment),
                (None, SegmentRelation::Disjoint) => None,
                (None, _) => Some(ViolationKind::EdgeCrossesEdge),
                (Some(v), SegmentRelation::TouchAtEndpoint(q)) if q == points.get(emb.mapping[v]) => None,
                (Some(_), _) => Some(ViolationKind::EdgeCrossesEdge),
            };
            if let Some(kind) = kind {
                report!(kind, vec![i, j], vec![]);
            }
        }
    }

    if let Some(poly) = polygon {
        for (i, s) in segments.iter().enumerate() {
            if segment_hits_boundary(s, poly) {
                report!(ViolationKind::EdgeHitsBoundary, vec![i], vec![]);
            }
        }
    }

    for (i, s) in segments.iter().enumerate() {
        let (pu, pv) = (emb.mapping[edges[i].0], emb.mapping[edges[i].1]);
        for &p in &emb.mapping {
            if p != pu && p != pv && s.contains(points.get(p)) {
                report!(ViolationKind::EdgeThroughMappedPoint, vec![i], vec![p]);
            }
        }
    }

    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::reduction::{build_instance, validate_3p};

    fn pts(v: &[(i64, i64)]) -> PointSet {
        PointSet::new(v.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn single_node_is_valid() {
        let tree = FreeTree::new(1, &[]).unwrap();
        let r = verify_planar_only(&tree, &pts(&[(3, 3)]), &Embedding::new(vec![0])).unwrap();
        assert!(r.valid);
    }

    #[test]
    fn two_nodes_valid() {
        let tree = FreeTree::new(2, &[(0, 1)]).unwrap();
        let r = verify_planar_only(&tree, &pts(&[(0, 0), (5, -3)]), &Embedding::new(vec![1, 0])).unwrap();
        assert!(r.valid);
    }

    #[test]
    fn path_through_mapped_point() {
        let tree = FreeTree::new(3, &[(0, 1), (1, 2)]).unwrap();
        let r = verify_planar_only(&tree, &pts(&[(0, 0), (2, 0), (1, 0)]), &Embedding::new(vec![0, 1, 2]))
            .unwrap();
        assert!(!r.valid);
        assert!(r.violations.contains(&Violation {
            kind: ViolationKind::EdgeThroughMappedPoint,
            edges: vec![0],
            points: vec![2],
        }));
        assert!(r.has_kind(ViolationKind::EdgesOverlapAtSegment));
    }

    #[test]
    fn star_is_valid() {
        let tree = FreeTree::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = verify_planar_only(
            &tree,
            &pts(&[(0, 0), (1, 0), (0, 1), (-1, -1)]),
            &Embedding::new(vec![0, 1, 2, 3]),
        )
        .unwrap();
        assert!(r.valid, "{:?}", r);
    }

    #[test]
    fn crossing_detected() {
        // Path 0-1-2-3 drawn as a Z that crosses itself.
        let tree = FreeTree::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = verify_planar_only(
            &tree,
            &pts(&[(0, 0), (2, 2), (2, 0), (0, 2)]),
            &Embedding::new(vec![0, 1, 2, 3]),
        )
        .unwrap();
        assert_eq!(
            r.violations,
            vec![Violation {
                kind: ViolationKind::EdgeCrossesEdge,
                edges: vec![0, 2],
                points: vec![],
            }]
        );
    }

    #[test]
    fn not_bijection_reported() {
        let tree = FreeTree::new(3, &[(0, 1), (1, 2)]).unwrap();
        let r = verify_planar_only(&tree, &pts(&[(0, 0), (2, 0), (1, 5)]), &Embedding::new(vec![0, 0, 7]))
            .unwrap();
        assert!(!r.valid);
        assert!(r.violations.iter().all(|v| v.kind == ViolationKind::NotBijection));
        assert_eq!(r.violations.len(), 4);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let tree = FreeTree::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            verify_planar_only(&tree, &pts(&[(0, 0), (2, 0), (1, 5)]), &Embedding::new(vec![0, 1])),
            Err(VerifyError::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn boundary_violation_in_reduction() {
        let (inst, meta) = build_instance(&validate_3p(7, &[2, 2, 3, 2, 2, 3]).unwrap()).unwrap();
        // Hub on p0, paths laid in order: paths 0..2 fill group 1, 3..5 group 2.
        let mut mapping = vec![0; 15];
        for (node, slot) in (1..15).zip(1..15) {
            mapping[node] = slot;
        }
        let good = Embedding::new(mapping.clone());
        assert!(verify_embedding(&inst, &good).unwrap().valid);

        // Path 2 ends on the last group-1 point; move its tail into group 2.
        let tail = *meta.path_nodes[2].last().unwrap();
        let other = meta.path_nodes[3][0];
        mapping.swap(tail, other);
        let r = verify_embedding(&inst, &Embedding::new(mapping)).unwrap();
        assert!(r.has_kind(ViolationKind::EdgeHitsBoundary));
        assert!(!verify_planar_only(inst.tree(), inst.points(), &good).unwrap().violations.iter().any(|v| v.kind == ViolationKind::EdgeHitsBoundary));
    }

    #[test]
    fn report_json_shape() {
        let tree = FreeTree::new(3, &[(0, 1), (1, 2)]).unwrap();
        let r = verify_planar_only(&tree, &pts(&[(0, 0), (2, 0), (1, 0)]), &Embedding::new(vec![0, 1, 2]))
            .unwrap();
        assert_eq!(
            r.to_json(),
            "{\"valid\":false,\"violations\":[{\"edges\":[0,1],\"kind\":\"EdgesOverlapAtSegment\",\"points\":[]},{\"edges\":[0],\"kind\":\"EdgeThroughMappedPoint\",\"points\":[2]}]}\n"
        );
        let ok = VerificationReport::from_violations(vec![]);
        assert_eq!(ok.to_json(), "{\"valid\":true,\"violations\":[]}\n");
    }
}
