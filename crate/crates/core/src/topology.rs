//! Homological coverage certification and its geometric ground truth.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::{build_cech, build_rips, SimplicialComplex, StructureError};
use crate::geometry::{min_enclosing_ball, Point2};
use crate::gf2::{self, BitColumn};
use crate::network::{NetworkConfig, NetworkError, NetworkInstance, NodeId, SensorNode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("complex is not closed: {0}")]
    Structure(#[from] StructureError),
    #[error("grid resolution {resolution} must be positive and at most r_c/4 = {max}")]
    InvalidResolution { resolution: f64, max: f64 },
    #[error("sample count must be at least 1")]
    InvalidSampleCount,
    #[error("network has too many instances to enumerate")]
    TooManyInstances,
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiNumbers {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
}

/// Union-find over vertex indices.
struct Components {
    parent: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components { parent: (0..n).collect() }
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
        if ra != rb {
            self.parent[ra] = rb;
        }
        ra != rb
    }
}

/// Connected components of the 1-skeleton.
pub fn connected_components(cx: &SimplicialComplex) -> usize {
    let index: HashMap<NodeId, usize> = cx.vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut uf = Components::new(cx.vertices.len());
    let merges = cx
        .edges
        .iter()
        .filter(|[a, b]| uf.union(index[a], index[b]))
        .count();
    cx.vertices.len() - merges
}

/// Betti numbers over GF(2). `b0` comes from union-find on the 1-skeleton,
/// `b1 = dim ker d1 - rank d2` and `b2 = dim ker d2` from boundary-matrix
/// ranks.
pub fn betti_numbers(cx: &SimplicialComplex) -> Result<BettiNumbers, TopologyError> {
    cx.check_closed()?;
    let vertex_index: HashMap<NodeId, usize> =
        cx.vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let edge_index: HashMap<[NodeId; 2], usize> =
        cx.edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();

    let v = cx.vertices.len();
    let rank_d1 = gf2::rank(
        cx.edges
            .iter()
            .map(|[a, b]| BitColumn::from_rows(v, &[vertex_index[a], vertex_index[b]])),
    );
    let e = cx.edges.len();
    let rank_d2 = gf2::rank(cx.triangles.iter().map(|&[a, b, c]| {
        BitColumn::from_rows(e, &[edge_index[&[a, b]], edge_index[&[a, c]], edge_index[&[b, c]]])
    }));

    let b0 = connected_components(cx);
    debug_assert_eq!(b0, v - rank_d1);
    Ok(BettiNumbers {
        b0,
        b1: e - rank_d1 - rank_d2,
        b2: cx.triangles.len() - rank_d2,
    })
}

/// Regular sample lattice over the domain with spacing at most the requested
/// resolution; both domain edges are sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridLayout {
    origin: Point2,
    cols: usize,
    rows: usize,
    dx: f64,
    dy: f64,
}

impl GridLayout {
    pub fn new(config: &NetworkConfig, resolution: f64) -> Result<Self, TopologyError> {
        let max = config.rc() / 4.0;
        if !(resolution.is_finite() && resolution > 0.0 && resolution <= max * (1.0 + 1e-12)) {
            return Err(TopologyError::InvalidResolution { resolution, max });
        }
        let d = config.domain();
        let cols = (d.width / resolution).ceil().max(1.0) as usize;
        let rows = (d.height / resolution).ceil().max(1.0) as usize;
        Ok(GridLayout {
            origin: Point2::new(d.x, d.y),
            cols,
            rows,
            dx: d.width / cols as f64,
            dy: d.height / rows as f64,
        })
    }

    /// Number of samples along x.
    pub fn width(&self) -> usize {
        self.cols + 1
    }

    /// Number of samples along y.
    pub fn height(&self) -> usize {
        self.rows + 1
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize, j: usize) -> Point2 {
        Point2::new(self.origin.x() + self.dx * i as f64, self.origin.y() + self.dy * j as f64)
    }

    fn index(&self, i: usize, j: usize) -> usize {
        j * self.width() + i
    }

    fn on_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.cols || j == self.rows
    }

    /// Sample indices within `r` of `center`.
    fn samples_in_disk(&self, center: Point2, r: f64) -> impl Iterator<Item = usize> + '_ {
        let span = |c: f64, o: f64, step: f64, last: usize| {
            if step == 0.0 {
                return (0, last);
            }
            let lo = ((c - r - o) / step).ceil().max(0.0) as usize;
            let hi = ((c + r - o) / step).floor().min(last as f64);
            if hi < 0.0 {
                (1, 0)
            } else {
                (lo, hi as usize)
            }
        };
        let (i0, i1) = span(center.x(), self.origin.x(), self.dx, self.cols);
        let (j0, j1) = span(center.y(), self.origin.y(), self.dy, self.rows);
        let r_sq = r * r;
        (j0..=j1).flat_map(move |j| {
            (i0..=i1).filter(move |&i| self.point(i, j).distance_sq(center) <= r_sq).map(move |i| self.index(i, j))
        })
    }

    /// How many of `points` cover each sample.
    pub fn coverage_counts(&self, points: impl IntoIterator<Item = Point2>, rc: f64) -> Vec<u32> {
        let mut counts = vec![0u32; self.len()];
        for p in points {
            for idx in self.samples_in_disk(p, rc) {
                counts[idx] += 1;
            }
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UncoveredComponent {
    /// Grid sample coordinates `[i, j]`.
    pub cells: Vec<[u32; 2]>,
    pub touches_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageReport {
    pub covered_samples: usize,
    pub total_samples: usize,
    pub covered_fraction: f64,
    /// Uncovered components that do not touch the domain boundary.
    pub hole_count: usize,
    /// Uncovered components that reach the domain boundary.
    pub boundary_gap_count: usize,
    pub uncovered_components: Vec<UncoveredComponent>,
    pub fully_covered: bool,
}

impl CoverageReport {
    /// Size in samples of the smallest interior hole.
    pub fn smallest_hole(&self) -> Option<usize> {
        self.uncovered_components
            .iter()
            .filter(|c| !c.touches_boundary)
            .map(|c| c.cells.len())
            .min()
    }
}

const NEIGHBOURS: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

fn report_from_counts(layout: &GridLayout, counts: &[u32]) -> CoverageReport {
    let total = counts.len();
    let covered = counts.iter().filter(|&&c| c > 0).count();
    let mut seen = vec![false; total];
    let mut components = Vec::new();
    for j in 0..layout.height() {
        for i in 0..layout.width() {
            let start = layout.index(i, j);
            if counts[start] > 0 || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([(i, j)]);
            let mut cells = Vec::new();
            let mut touches_boundary = false;
            while let Some((ci, cj)) = queue.pop_front() {
                cells.push([ci as u32, cj as u32]);
                touches_boundary |= layout.on_boundary(ci, cj);
                for (di, dj) in NEIGHBOURS {
                    let (ni, nj) = (ci.wrapping_add_signed(di), cj.wrapping_add_signed(dj));
                    if ni >= layout.width() || nj >= layout.height() {
                        continue;
                    }
                    let idx = layout.index(ni, nj);
                    if counts[idx] == 0 && !seen[idx] {
                        seen[idx] = true;
                        queue.push_back((ni, nj));
                    }
                }
            }
            components.push(UncoveredComponent { cells, touches_boundary });
        }
    }
    let hole_count = components.iter().filter(|c| !c.touches_boundary).count();
    CoverageReport {
        covered_samples: covered,
        total_samples: total,
        covered_fraction: covered as f64 / total as f64,
        hole_count,
        boundary_gap_count: components.len() - hole_count,
        fully_covered: components.is_empty(),
        uncovered_components: components,
    }
}

/// Samples the domain on a regular grid and reports which samples lie in the
/// union of disks of radius `r_c` around the instance's sensor positions.
/// Uncovered samples are grouped 4-connected; groups away from the domain
/// boundary are holes.
pub fn grid_cover_oracle(
    instance: &NetworkInstance<'_>,
    resolution: f64,
) -> Result<CoverageReport, TopologyError> {
    let config = instance.config();
    let layout = GridLayout::new(config, resolution)?;
    let counts = layout.coverage_counts(instance.points().into_iter().map(|(_, p)| p), config.rc());
    Ok(report_from_counts(&layout, &counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoverageVerdict {
    CertifiedNoHoles,
    HolesPresent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageCertificate {
    pub verdict: CoverageVerdict,
    pub betti: BettiNumbers,
}

/// Decides whether the disk union of one instance has holes from the first
/// Betti number of its Čech complex. Disks are convex, so the Čech complex
/// has the homotopy type of the union.
pub fn certify_instance_coverage(instance: &NetworkInstance<'_>) -> CoverageCertificate {
    let cx = build_cech(&instance.point_map(), instance.config().rc());
    let betti = betti_numbers(&cx).expect("constructed complexes are closed");
    let verdict = if betti.b1 == 0 {
        CoverageVerdict::CertifiedNoHoles
    } else {
        CoverageVerdict::HolesPresent
    };
    CoverageCertificate { verdict, betti }
}

/// Checks `R_{r'} ⊆ C_r ⊆ R_r` as simplex sets. Holds whenever
/// `r / r' >= sqrt(4/3)`.
pub fn check_interleaving(points: &BTreeMap<NodeId, Point2>, r: f64, r_prime: f64) -> bool {
    let small = build_rips(points, r_prime).simplices();
    let cech = build_cech(points, r).simplices();
    let big = build_rips(points, r).simplices();
    small.is_subset(&cech) && cech.is_subset(&big)
}

/// Radii at which the union of equal disks around `points` can change
/// topology: the radii of empty smallest enclosing circles of pairs and
/// triples, a superset of the critical values of the distance function to
/// the point set. Between consecutive values, growing or shrinking the disks
/// neither opens nor closes a hole. Sorted ascending.
pub fn critical_radii(points: &[Point2]) -> Vec<f64> {
    let n = points.len();
    let mut out: Vec<f64> = Vec::new();
    let mut consider = |idx: &[usize]| {
        let subset: Vec<Point2> = idx.iter().map(|&i| points[i]).collect();
        let ball = min_enclosing_ball(&subset).expect("two or three points");
        // Every point, including the defining ones, must lie on or outside
        // the circle; a triple whose circle is fixed by only two of its
        // points is thereby skipped.
        let r_sq = ball.radius * ball.radius * (1.0 - 1e-9);
        let empty = points.iter().all(|q| q.distance_sq(ball.center) >= r_sq);
        if empty {
            out.push(ball.radius);
        }
    };
    for i in 0..n {
        for j in i + 1..n {
            consider(&[i, j]);
            for l in j + 1..n {
                consider(&[i, j, l]);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Greedily drops sensors whose removal leaves the anchor instance's covered
/// sample set unchanged, trying the most crowded anchors first. The
/// coverage verdict (full coverage and hole count) is therefore preserved.
pub fn sparsify(config: &NetworkConfig, resolution: f64) -> Result<NetworkConfig, TopologyError> {
    let layout = GridLayout::new(config, resolution)?;
    let rc = config.rc();
    let nodes = config.nodes();
    let mut counts = layout.coverage_counts(nodes.iter().map(|n| n.anchor), rc);

    let reach_sq = 4.0 * rc * rc;
    let density = |n: &SensorNode| {
        nodes
            .iter()
            .filter(|m| m.id != n.id && m.anchor.distance_sq(n.anchor) <= reach_sq)
            .count()
    };
    let mut order: Vec<(usize, NodeId)> = nodes.iter().map(|n| (density(n), n.id)).collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut removed = Vec::new();
    for (_, id) in order {
        let anchor = config.node(id).expect("id from config").anchor;
        let footprint: Vec<usize> = layout.samples_in_disk(anchor, rc).collect();
        if footprint.iter().all(|&i| counts[i] >= 2) {
            for &i in &footprint {
                counts[i] -= 1;
            }
            removed.push(id);
        }
    }
    let kept = nodes.iter().filter(|n| !removed.contains(&n.id)).cloned().collect();
    Ok(NetworkConfig::new(config.params(), kept)?)
}

/// Anchor-instance coverage report, the reference for [`sparsify`].
pub fn anchor_coverage(config: &NetworkConfig, resolution: f64) -> Result<CoverageReport, TopologyError> {
    grid_cover_oracle(&NetworkInstance::anchors(config), resolution)
}
