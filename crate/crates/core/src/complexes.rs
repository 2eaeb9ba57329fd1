//! Čech and Vietoris–Rips complexes of a fixed point set, truncated at
//! dimension 2.
//!
//! Both use the coverage-radius convention: `r` is the radius of each
//! sensor disk, so an edge joins points at distance at most `2r`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{triple_fits_in_ball, Point2};
use crate::network::{NodeId, SpatialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKind {
    Cech,
    Rips,
}

impl ComplexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComplexKind::Cech => "cech",
            ComplexKind::Rips => "rips",
        }
    }
}

impl std::str::FromStr for ComplexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cech" | "čech" => Ok(ComplexKind::Cech),
            "rips" => Ok(ComplexKind::Rips),
            other => Err(format!("unknown complex kind `{other}` (expected rips or cech)")),
        }
    }
}

pub type Edge = [NodeId; 2];
pub type Triangle = [NodeId; 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("edge {0:?} references a missing vertex")]
    DanglingEdge(Edge),
    #[error("triangle {0:?} is missing a boundary edge")]
    OpenTriangle(Triangle),
    #[error("simplex {0:?} is not stored in sorted order")]
    Unsorted(Vec<NodeId>),
}

/// Vertices, edges and triangles; simplices are stored with sorted vertex ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    pub kind: ComplexKind,
    pub scale: f64,
    pub vertices: BTreeSet<NodeId>,
    pub edges: BTreeSet<Edge>,
    pub triangles: BTreeSet<Triangle>,
}

impl SimplicialComplex {
    /// Checks that every face of every simplex is present.
    pub fn check_closed(&self) -> Result<(), StructureError> {
        for e in &self.edges {
            if e[0] >= e[1] {
                return Err(StructureError::Unsorted(e.to_vec()));
            }
            if !self.vertices.contains(&e[0]) || !self.vertices.contains(&e[1]) {
                return Err(StructureError::DanglingEdge(*e));
            }
        }
        for t in &self.triangles {
            if !(t[0] < t[1] && t[1] < t[2]) {
                return Err(StructureError::Unsorted(t.to_vec()));
            }
            let faces = [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]];
            if faces.iter().any(|f| !self.edges.contains(f)) {
                return Err(StructureError::OpenTriangle(*t));
            }
        }
        Ok(())
    }

    /// All simplices as sorted vertex lists, vertices first.
    pub fn simplices(&self) -> BTreeSet<Vec<NodeId>> {
        self.vertices
            .iter()
            .map(|v| vec![*v])
            .chain(self.edges.iter().map(|e| e.to_vec()))
            .chain(self.triangles.iter().map(|t| t.to_vec()))
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }
}

/// Ids adjacent under the `2r` edge rule, found via a grid of width `2r`.
fn neighborhoods(points: &BTreeMap<NodeId, Point2>, r: f64) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let reach_sq = 4.0 * r * r;
    let grid = SpatialGrid::new(2.0 * r, points.iter().map(|(&id, &p)| (id, p)));
    let mut adjacency: BTreeMap<NodeId, BTreeSet<NodeId>> =
        points.keys().map(|&id| (id, BTreeSet::new())).collect();
    for (a, b) in grid.candidate_pairs() {
        if points[&a].distance_sq(points[&b]) <= reach_sq {
            adjacency.get_mut(&a).unwrap().insert(b);
            adjacency.get_mut(&b).unwrap().insert(a);
        }
    }
    adjacency
}

fn build(
    points: &BTreeMap<NodeId, Point2>,
    r: f64,
    kind: ComplexKind,
) -> SimplicialComplex {
    assert!(r > 0.0 && r.is_finite(), "radius must be positive, got {r}");
    let adjacency = neighborhoods(points, r);
    let mut edges = BTreeSet::new();
    let mut triangles = BTreeSet::new();
    for (&a, nbrs) in &adjacency {
        for &b in nbrs.range(a..) {
            edges.insert([a, b]);
            // Common neighbours above b close a Rips triangle.
            for &c in nbrs.range(b..).skip(1) {
                if !adjacency[&b].contains(&c) {
                    continue;
                }
                let keep = match kind {
                    ComplexKind::Rips => true,
                    ComplexKind::Cech => {
                        triple_fits_in_ball(points[&a], points[&b], points[&c], r)
                    }
                };
                if keep {
                    triangles.insert([a, b, c]);
                }
            }
        }
    }
    SimplicialComplex {
        kind,
        scale: r,
        vertices: points.keys().copied().collect(),
        edges,
        triangles,
    }
}

/// Rips complex: edges between points within `2 r_c`, triangles on every
/// 3-clique.
pub fn build_rips(points: &BTreeMap<NodeId, Point2>, r_c: f64) -> SimplicialComplex {
    build(points, r_c, ComplexKind::Rips)
}

/// Čech complex of the disks of radius `r_c`: same edges as Rips, triangles
/// where the three disks share a point.
pub fn build_cech(points: &BTreeMap<NodeId, Point2>, r_c: f64) -> SimplicialComplex {
    build(points, r_c, ComplexKind::Cech)
}

pub fn build_complex(
    points: &BTreeMap<NodeId, Point2>,
    r_c: f64,
    kind: ComplexKind,
) -> SimplicialComplex {
    build(points, r_c, kind)
}
