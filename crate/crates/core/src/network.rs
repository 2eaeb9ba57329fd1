//! The indecisive-points network model.
//!
//! Every sensor has an anchor and `k` candidate locations inside a disk of
//! radius `eps` around it. An instance picks one candidate per sensor, each
//! with probability `1/k`, independently.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{check_radii, GeometryError, Point2};

/// Relative slack when checking that stored locations sit inside their disk
/// of uncertainty; sampled coordinates carry rounding error.
const DISK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("duplicate node id {0}")]
    DuplicateId(NodeId),
    #[error("node {0} not found")]
    NodeNotFound(NodeId),
    #[error("node {id} has {got} locations, expected k = {expected}")]
    LocationCount { id: NodeId, expected: usize, got: usize },
    #[error("location {index} of node {id} lies outside its disk of uncertainty")]
    LocationOutsideDisk { id: NodeId, index: usize },
    #[error("anchor of node {0} lies outside the domain")]
    AnchorOutsideDomain(NodeId),
    #[error("choice vector has {got} entries for {expected} nodes")]
    ChoiceLength { expected: usize, got: usize },
    #[error("location index {index} out of range for node {id}")]
    ChoiceOutOfRange { id: NodeId, index: usize },
}

impl NetworkError {
    /// True for errors that describe an invalid configuration (as opposed to
    /// a missing node).
    pub fn is_config_error(&self) -> bool {
        !matches!(self, NetworkError::NodeNotFound(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Axis-aligned rectangle `[x, x + width] x [y, y + height]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Domain {
    pub fn new(x: f64, y: f64, width: f64, height: f64) -> Result<Self, NetworkError> {
        for (name, v) in [("domain x", x), ("domain y", y)] {
            if !v.is_finite() {
                return Err(NetworkError::InvalidParameter { name, value: v });
            }
        }
        for (name, v) in [("domain width", width), ("domain height", height)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(NetworkError::InvalidParameter { name, value: v });
            }
        }
        Ok(Domain { x, y, width, height })
    }

    pub fn square(side: f64) -> Self {
        Domain { x: 0.0, y: 0.0, width: side, height: side }
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x() >= self.x
            && p.x() <= self.x + self.width
            && p.y() >= self.y
            && p.y() <= self.y + self.height
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.x + 0.5 * self.width, self.y + 0.5 * self.height)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Point2 {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        // Clamp guards the upper edge against rounding in x + u * width.
        Point2::new(
            (self.x + u * self.width).min(self.x + self.width),
            (self.y + v * self.height).min(self.y + self.height),
        )
    }
}

/// One uncertain sensor: its anchor and its `k` indecisive locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorNode {
    pub id: NodeId,
    pub anchor: Point2,
    pub locations: Vec<Point2>,
}

impl SensorNode {
    pub fn k(&self) -> usize {
        self.locations.len()
    }

    fn translate(&self, dx: f64, dy: f64) -> Result<SensorNode, GeometryError> {
        Ok(SensorNode {
            id: self.id,
            anchor: self.anchor.try_translate(dx, dy)?,
            locations: self
                .locations
                .iter()
                .map(|p| p.try_translate(dx, dy))
                .collect::<Result<_, _>>()?,
        })
    }
}

/// Draws a point uniformly (by area) from the disk of radius `radius` around
/// `center`.
pub fn sample_in_disk<R: Rng>(rng: &mut R, center: Point2, radius: f64) -> Point2 {
    let u: f64 = rng.random();
    let t: f64 = rng.random();
    let r = radius * u.sqrt();
    let (s, c) = (TAU * t).sin_cos();
    Point2::new(center.x() + r * c, center.y() + r * s)
}

/// Per-node location stream. Anchors use stream 0, so regenerating locations
/// for the same seed reproduces what [`generate_random`] produced.
fn location_rng(seed: u64, id: NodeId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(id.0) + 1);
    rng
}

fn fresh_locations(seed: u64, id: NodeId, anchor: Point2, k: usize, eps: f64) -> Vec<Point2> {
    let mut rng = location_rng(seed, id);
    (0..k).map(|_| sample_in_disk(&mut rng, anchor, eps)).collect()
}

/// The whole uncertain network. Immutable once built; edits return new values.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    nodes: Vec<SensorNode>,
    rc: f64,
    rc_max: f64,
    eps: f64,
    k: usize,
    seed: u64,
    domain: Domain,
}

/// Everything but the nodes, for building configurations piecewise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    pub rc: f64,
    pub rc_max: f64,
    pub eps: f64,
    pub k: usize,
    pub seed: u64,
    pub domain: Domain,
}

impl NetworkConfig {
    /// Validates and assembles a configuration. Nodes are kept sorted by id.
    pub fn new(params: NetworkParams, mut nodes: Vec<SensorNode>) -> Result<Self, NetworkError> {
        let NetworkParams { rc, rc_max, eps, k, seed, domain } = params;
        check_radii(rc, eps)?;
        if !(rc_max.is_finite() && rc_max > 0.0) {
            return Err(NetworkError::InvalidParameter { name: "rcMax", value: rc_max });
        }
        if k == 0 {
            return Err(NetworkError::InvalidParameter { name: "k", value: 0.0 });
        }
        let domain = Domain::new(domain.x, domain.y, domain.width, domain.height)?;
        nodes.sort_by_key(|n| n.id);
        for pair in nodes.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(NetworkError::DuplicateId(pair[0].id));
            }
        }
        let slack = eps * (1.0 + DISK_TOLERANCE) + DISK_TOLERANCE * rc;
        for node in &nodes {
            if node.locations.len() != k {
                return Err(NetworkError::LocationCount {
                    id: node.id,
                    expected: k,
                    got: node.locations.len(),
                });
            }
            if !domain.contains(node.anchor) {
                return Err(NetworkError::AnchorOutsideDomain(node.id));
            }
            if let Some(index) = node
                .locations
                .iter()
                .position(|p| p.distance(node.anchor) > slack)
            {
                return Err(NetworkError::LocationOutsideDisk { id: node.id, index });
            }
        }
        Ok(NetworkConfig { nodes, rc, rc_max, eps, k, seed, domain })
    }

    /// Builds a configuration from anchors, drawing `k` locations per node
    /// from the per-node seeded streams.
    pub fn from_anchors(
        params: NetworkParams,
        anchors: impl IntoIterator<Item = (NodeId, Point2)>,
    ) -> Result<Self, NetworkError> {
        check_radii(params.rc, params.eps)?;
        let nodes = anchors
            .into_iter()
            .map(|(id, anchor)| SensorNode {
                id,
                anchor,
                locations: fresh_locations(params.seed, id, anchor, params.k, params.eps),
            })
            .collect();
        NetworkConfig::new(params, nodes)
    }

    pub fn params(&self) -> NetworkParams {
        NetworkParams {
            rc: self.rc,
            rc_max: self.rc_max,
            eps: self.eps,
            k: self.k,
            seed: self.seed,
            domain: self.domain,
        }
    }

    pub fn nodes(&self) -> &[SensorNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&SensorNode> {
        self.nodes
            .binary_search_by_key(&id, |n| n.id)
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rc(&self) -> f64 {
        self.rc
    }

    pub fn rc_max(&self) -> f64 {
        self.rc_max
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn next_id(&self) -> NodeId {
        self.nodes.last().map_or(NodeId(0), |n| NodeId(n.id.0 + 1))
    }

    pub fn anchors(&self) -> BTreeMap<NodeId, Point2> {
        self.nodes.iter().map(|n| (n.id, n.anchor)).collect()
    }

    /// `k^n`, or `None` when it does not fit in a `u64`.
    pub fn instance_count(&self) -> Option<u64> {
        let k = u64::try_from(self.k).ok()?;
        let n = u32::try_from(self.nodes.len()).ok()?;
        k.checked_pow(n)
    }

    fn with_nodes(&self, nodes: Vec<SensorNode>) -> Result<Self, NetworkError> {
        NetworkConfig::new(self.params(), nodes)
    }

    fn regenerated(&self, params: NetworkParams) -> Result<Self, NetworkError> {
        NetworkConfig::from_anchors(params, self.nodes.iter().map(|n| (n.id, n.anchor)))
    }
}

/// Uniform random network. Deterministic in `seed`.
pub fn generate_random(
    n: usize,
    k: usize,
    rc: f64,
    eps: f64,
    domain: Domain,
    seed: u64,
) -> Result<NetworkConfig, NetworkError> {
    check_radii(rc, eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let anchors: Vec<_> = (0..n)
        .map(|i| (NodeId(i as u32), domain.sample(&mut rng)))
        .collect();
    let params = NetworkParams {
        rc,
        rc_max: rc.max(half_x_extent(anchors.iter().map(|(_, p)| *p))),
        eps,
        k,
        seed,
        domain,
    };
    NetworkConfig::from_anchors(params, anchors)
}

/// Half of the largest distance between anchors along the x-axis; the usual
/// upper bound for the coverage radius slider. Zero for fewer than two points.
pub fn half_x_extent(points: impl IntoIterator<Item = Point2>) -> f64 {
    let (lo, hi) = points
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.x()), hi.max(p.x())));
    if hi > lo {
        0.5 * (hi - lo)
    } else {
        0.0
    }
}

/// All `k^2` ordered location pairs of two nodes.
pub fn enumerate_pair_instances<'a>(
    a: &'a SensorNode,
    b: &'a SensorNode,
) -> impl Iterator<Item = (Point2, Point2)> + 'a {
    a.locations
        .iter()
        .flat_map(move |&p| b.locations.iter().map(move |&q| (p, q)))
}

/// Which location each node takes in one realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realization {
    /// Every sensor sits exactly on its anchor.
    Anchors,
    /// Index into `locations`, one per node in config order.
    Choice(Vec<usize>),
}

/// One deterministic realization of an uncertain network.
#[derive(Debug, Clone)]
pub struct NetworkInstance<'a> {
    config: &'a NetworkConfig,
    realization: Realization,
}

impl<'a> NetworkInstance<'a> {
    pub fn new(config: &'a NetworkConfig, choice: Vec<usize>) -> Result<Self, NetworkError> {
        if choice.len() != config.len() {
            return Err(NetworkError::ChoiceLength { expected: config.len(), got: choice.len() });
        }
        for (node, &index) in config.nodes.iter().zip(&choice) {
            if index >= node.k() {
                return Err(NetworkError::ChoiceOutOfRange { id: node.id, index });
            }
        }
        Ok(NetworkInstance { config, realization: Realization::Choice(choice) })
    }

    pub fn anchors(config: &'a NetworkConfig) -> Self {
        NetworkInstance { config, realization: Realization::Anchors }
    }

    /// Instance number `index` in mixed radix `k` (first node is the least
    /// significant digit). `index` must be below `k^n`.
    pub fn from_index(config: &'a NetworkConfig, mut index: u64) -> Self {
        let k = config.k as u64;
        let choice = (0..config.len())
            .map(|_| {
                let digit = index % k;
                index /= k;
                digit as usize
            })
            .collect();
        NetworkInstance { config, realization: Realization::Choice(choice) }
    }

    /// Draws each node's location uniformly from its `k` candidates.
    pub fn sample<R: Rng>(config: &'a NetworkConfig, rng: &mut R) -> Self {
        let choice = (0..config.len()).map(|_| rng.random_range(0..config.k)).collect();
        NetworkInstance { config, realization: Realization::Choice(choice) }
    }

    /// [`NetworkInstance::sample`] driven by a ChaCha8 generator seeded
    /// with `seed`.
    pub fn seeded(config: &'a NetworkConfig, seed: u64) -> Self {
        NetworkInstance::sample(config, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn config(&self) -> &'a NetworkConfig {
        self.config
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn choice_for(&self, id: NodeId) -> Option<usize> {
        let pos = self.config.nodes.binary_search_by_key(&id, |n| n.id).ok()?;
        match &self.realization {
            Realization::Anchors => None,
            Realization::Choice(c) => Some(c[pos]),
        }
    }

    pub fn points(&self) -> Vec<(NodeId, Point2)> {
        match &self.realization {
            Realization::Anchors => self.config.nodes.iter().map(|n| (n.id, n.anchor)).collect(),
            Realization::Choice(c) => self
                .config
                .nodes
                .iter()
                .zip(c)
                .map(|(n, &i)| (n.id, n.locations[i]))
                .collect(),
        }
    }

    pub fn point_map(&self) -> BTreeMap<NodeId, Point2> {
        self.points().into_iter().collect()
    }
}

/// Uniform square bucketing of points, keyed by `floor(coordinate / width)`.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    cell_width: f64,
    cells: BTreeMap<(i64, i64), Vec<NodeId>>,
}

impl SpatialGrid {
    pub fn new(cell_width: f64, points: impl IntoIterator<Item = (NodeId, Point2)>) -> Self {
        assert!(cell_width > 0.0 && cell_width.is_finite(), "cell width must be positive");
        let mut cells: BTreeMap<(i64, i64), Vec<NodeId>> = BTreeMap::new();
        for (id, p) in points {
            cells.entry(cell_key(cell_width, p)).or_default().push(id);
        }
        SpatialGrid { cell_width, cells }
    }

    /// Grid over anchors with cells as wide as the largest possible coverage
    /// diameter `2(r_c + eps)`.
    pub fn for_config(config: &NetworkConfig) -> Self {
        SpatialGrid::new(
            2.0 * (config.rc + config.eps),
            config.nodes.iter().map(|n| (n.id, n.anchor)),
        )
    }

    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    pub fn cell_of(&self, p: Point2) -> (i64, i64) {
        cell_key(self.cell_width, p)
    }

    pub fn cells(&self) -> &BTreeMap<(i64, i64), Vec<NodeId>> {
        &self.cells
    }

    /// Unordered pairs `(a, b)` with `a < b` whose cells coincide or touch
    /// (8-neighborhood).
    pub fn candidate_pairs(&self) -> BTreeSet<(NodeId, NodeId)> {
        const FORWARD: [(i64, i64); 4] = [(1, -1), (1, 0), (1, 1), (0, 1)];
        let mut pairs = BTreeSet::new();
        let mut push = |a: NodeId, b: NodeId| {
            pairs.insert(if a < b { (a, b) } else { (b, a) });
        };
        for (&(cx, cy), ids) in &self.cells {
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    push(a, b);
                }
            }
            for (dx, dy) in FORWARD {
                if let Some(other) = self.cells.get(&(cx + dx, cy + dy)) {
                    for &a in ids {
                        for &b in other {
                            push(a, b);
                        }
                    }
                }
            }
        }
        pairs
    }
}

fn cell_key(width: f64, p: Point2) -> (i64, i64) {
    ((p.x() / width).floor() as i64, (p.y() / width).floor() as i64)
}

pub fn candidate_pairs(grid: &SpatialGrid) -> BTreeSet<(NodeId, NodeId)> {
    grid.candidate_pairs()
}

/// A single modification of a network.
#[derive(Debug, Clone, PartialEq)]
pub enum Edit {
    /// Translate the anchor and all indecisive locations together.
    Move { id: NodeId, dx: f64, dy: f64 },
    /// New node at `anchor` with id [`NetworkConfig::next_id`].
    Add { anchor: Point2 },
    Delete { id: NodeId },
    SetRc(f64),
    /// Changes eps and redraws every node's locations.
    SetEps(f64),
    /// Changes k and redraws every node's locations.
    SetK(usize),
    /// Redraws every node's locations from a new seed.
    Regenerate { seed: u64 },
}

pub fn apply_edit(config: &NetworkConfig, edit: &Edit) -> Result<NetworkConfig, NetworkError> {
    match *edit {
        Edit::Move { id, dx, dy } => {
            let mut nodes = config.nodes.clone();
            let node = nodes
                .iter_mut()
                .find(|n| n.id == id)
                .ok_or(NetworkError::NodeNotFound(id))?;
            *node = node.translate(dx, dy)?;
            config.with_nodes(nodes)
        }
        Edit::Add { anchor } => {
            let id = config.next_id();
            let mut nodes = config.nodes.clone();
            nodes.push(SensorNode {
                id,
                anchor,
                locations: fresh_locations(config.seed, id, anchor, config.k, config.eps),
            });
            config.with_nodes(nodes)
        }
        Edit::Delete { id } => {
            config.node(id).ok_or(NetworkError::NodeNotFound(id))?;
            let nodes = config.nodes.iter().filter(|n| n.id != id).cloned().collect();
            config.with_nodes(nodes)
        }
        Edit::SetRc(rc) => {
            let mut params = config.params();
            params.rc = rc;
            if rc.is_finite() {
                params.rc_max = params.rc_max.max(rc);
            }
            config.with_params(params)
        }
        Edit::SetEps(eps) => {
            let mut params = config.params();
            params.eps = eps;
            check_radii(params.rc, eps)?;
            config.regenerated(params)
        }
        Edit::SetK(k) => {
            let mut params = config.params();
            params.k = k;
            if k == 0 {
                return Err(NetworkError::InvalidParameter { name: "k", value: 0.0 });
            }
            config.regenerated(params)
        }
        Edit::Regenerate { seed } => {
            let mut params = config.params();
            params.seed = seed;
            config.regenerated(params)
        }
    }
}

impl NetworkConfig {
    fn with_params(&self, params: NetworkParams) -> Result<Self, NetworkError> {
        NetworkConfig::new(params, self.nodes.clone())
    }
}
