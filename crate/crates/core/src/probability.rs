//! Exact appearance probabilities of edges and faces over the `k^n` instance
//! space, plus point coverage and global coverage estimates.
//!
//! Probabilities are integer counts over a finite enumeration: an edge is
//! `m / k^2`, a face is `m / k^3`, a single-node point query is `m / k`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexes::{ComplexKind, Edge, Triangle};
use crate::geometry::{triple_fits_in_ball, Point2};
use crate::network::{NetworkConfig, NetworkInstance, NodeId, SensorNode, SpatialGrid};
use crate::topology::{grid_cover_oracle, GridLayout, TopologyError};

/// Relative slack applied to the annulus fast paths so that a pair sitting on
/// a threshold (up to rounding) is always enumerated instead of shortcut.
const FAST_PATH_SLACK: f64 = 1e-9;

/// Networks with at most this many instances are enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000;

pub const DEFAULT_SAMPLES: u64 = 1000;

/// An exact fraction `num / den` with `num <= den`. Not reduced: the
/// denominator records the size of the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "ProbabilityRepr", try_from = "ProbabilityRepr")]
pub struct Probability {
    num: u64,
    den: u64,
}

#[derive(Serialize, Deserialize)]
struct ProbabilityRepr {
    num: u64,
    den: u64,
    value: f64,
}

impl From<Probability> for ProbabilityRepr {
    fn from(p: Probability) -> Self {
        ProbabilityRepr { num: p.num, den: p.den, value: p.value() }
    }
}

impl TryFrom<ProbabilityRepr> for Probability {
    type Error = String;

    fn try_from(r: ProbabilityRepr) -> Result<Self, Self::Error> {
        Probability::try_new(r.num, r.den).ok_or_else(|| format!("invalid probability {}/{}", r.num, r.den))
    }
}

impl Probability {
    #[track_caller]
    pub fn new(num: u64, den: u64) -> Self {
        Probability::try_new(num, den).expect("probability needs 0 <= num <= den and den > 0")
    }

    pub fn try_new(num: u64, den: u64) -> Option<Self> {
        (den > 0 && num <= den).then_some(Probability { num, den })
    }

    pub fn zero(den: u64) -> Self {
        Probability::new(0, den)
    }

    pub fn one(den: u64) -> Self {
        Probability::new(den, den)
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_one(self) -> bool {
        self.num == self.den
    }

    /// Same value over `den * factor`.
    pub fn scale_den(self, factor: u64) -> Self {
        Probability::new(self.num * factor, self.den * factor)
    }
}

impl PartialOrd for Probability {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Probability {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.num) * u128::from(other.den))
            .cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn slack(scale: f64, a: Point2, b: Point2) -> f64 {
    let magnitude = a.x().abs().max(a.y().abs()).max(b.x().abs()).max(b.y().abs());
    FAST_PATH_SLACK * (scale + magnitude)
}

/// Classifies a pair of nodes whose locations each stray at most `eps` from
/// their anchors: `Some(true)` when every location pair is within `2 r_c`,
/// `Some(false)` when none is, `None` when enumeration is needed.
fn pair_fast_path(a: &SensorNode, b: &SensorNode, rc: f64, eps: f64) -> Option<bool> {
    let d = a.anchor.distance(b.anchor);
    let s = slack(rc + eps, a.anchor, b.anchor);
    if d + s < 2.0 * rc - 2.0 * eps {
        Some(true)
    } else if d - s > 2.0 * rc + 2.0 * eps {
        Some(false)
    } else {
        None
    }
}

fn den_of(a: &SensorNode, b: &SensorNode) -> u64 {
    (a.k() * b.k()) as u64
}

/// Number of location pairs within `2 r_c`.
fn count_connected_pairs(a: &SensorNode, b: &SensorNode, rc: f64) -> u64 {
    let reach_sq = 4.0 * rc * rc;
    a.locations
        .iter()
        .map(|p| b.locations.iter().filter(|q| p.distance_sq(**q) <= reach_sq).count() as u64)
        .sum()
}

/// Fraction of the `k^2` location pairs of `a` and `b` that are within
/// `2 r_c` of each other.
pub fn edge_probability(a: &SensorNode, b: &SensorNode, rc: f64, eps: f64) -> Probability {
    let den = den_of(a, b);
    match pair_fast_path(a, b, rc, eps) {
        Some(true) => Probability::one(den),
        Some(false) => Probability::zero(den),
        None => Probability::new(count_connected_pairs(a, b, rc), den),
    }
}

/// Fraction of the node's locations within `r_c` of `q`.
pub fn point_coverage_probability(node: &SensorNode, q: Point2, rc: f64, eps: f64) -> Probability {
    let den = node.k() as u64;
    let d = node.anchor.distance(q);
    let s = slack(rc + eps, node.anchor, q);
    if d + s < rc - eps {
        return Probability::one(den);
    }
    if d - s > rc + eps {
        return Probability::zero(den);
    }
    let rc_sq = rc * rc;
    let hits = node.locations.iter().filter(|p| p.distance_sq(q) <= rc_sq).count();
    Probability::new(hits as u64, den)
}

/// Probability that at least one sensor covers `q`, using independence of the
/// nodes: `1 - prod(1 - p_i)`.
pub fn union_point_coverage(config: &NetworkConfig, q: Point2) -> f64 {
    let mut uncovered = 1.0;
    for node in config.nodes() {
        let p = point_coverage_probability(node, q, config.rc(), config.eps());
        if p.is_one() {
            return 1.0;
        }
        uncovered *= (p.den() - p.num()) as f64 / p.den() as f64;
    }
    1.0 - uncovered
}

/// The three inference rules for a Rips face from its boundary edge
/// probabilities, in order. Returns the face probability over `k^3` when a
/// rule applies.
pub fn rips_face_shortcut(edges: [Probability; 3], k: u64) -> Option<Probability> {
    let den = k * k * k;
    if edges.iter().all(|e| e.is_one()) {
        return Some(Probability::one(den));
    }
    if edges.iter().any(|e| e.is_zero()) {
        return Some(Probability::zero(den));
    }
    let ones = edges.iter().filter(|e| e.is_one()).count();
    if ones >= 2 {
        let third = edges.iter().find(|e| !e.is_one()).copied()?;
        return Some(third.scale_den(den / third.den()));
    }
    None
}

/// Row-major `k_a x k_b` table of which location pairs are within `2 r_c`.
fn pair_table(a: &SensorNode, b: &SensorNode, rc: f64) -> Vec<bool> {
    let reach_sq = 4.0 * rc * rc;
    a.locations
        .iter()
        .flat_map(|p| b.locations.iter().map(move |q| p.distance_sq(*q) <= reach_sq))
        .collect()
}

struct TripleTables {
    ab: Vec<bool>,
    ac: Vec<bool>,
    bc: Vec<bool>,
}

impl TripleTables {
    fn new(a: &SensorNode, b: &SensorNode, c: &SensorNode, rc: f64) -> Self {
        TripleTables { ab: pair_table(a, b, rc), ac: pair_table(a, c, rc), bc: pair_table(b, c, rc) }
    }

    fn any_empty(&self) -> bool {
        [&self.ab, &self.ac, &self.bc].iter().any(|t| !t.contains(&true))
    }
}

/// Counts `(i, j, l)` location triples whose pairs are all connected and that
/// pass `accept`.
fn count_triples(
    a: &SensorNode,
    b: &SensorNode,
    c: &SensorNode,
    tables: &TripleTables,
    mut accept: impl FnMut(usize, usize, usize) -> bool,
) -> u64 {
    let (kb, kc) = (b.k(), c.k());
    let mut count = 0;
    for i in 0..a.k() {
        for j in 0..kb {
            if !tables.ab[i * kb + j] {
                continue;
            }
            for l in 0..kc {
                if tables.ac[i * kc + l] && tables.bc[j * kc + l] && accept(i, j, l) {
                    count += 1;
                }
            }
        }
    }
    count
}

fn triple_den(a: &SensorNode, b: &SensorNode, c: &SensorNode) -> u64 {
    (a.k() * b.k() * c.k()) as u64
}

/// Rips face probability. `edges` are the probabilities of `ab`, `ac`, `bc`
/// at the same `r_c`. Falls back to enumerating all `k^3` joint choices; the
/// product of edge probabilities would be wrong since the edges share
/// endpoints.
pub fn rips_face_probability(
    edges: [Probability; 3],
    a: &SensorNode,
    b: &SensorNode,
    c: &SensorNode,
    rc: f64,
) -> Probability {
    let den = triple_den(a, b, c);
    if a.k() == b.k() && b.k() == c.k() {
        if let Some(p) = rips_face_shortcut(edges, a.k() as u64) {
            return p;
        }
    }
    let tables = TripleTables::new(a, b, c, rc);
    Probability::new(count_triples(a, b, c, &tables, |_, _, _| true), den)
}

/// Čech face probability: the fraction of joint choices whose minimum
/// enclosing ball has radius at most `r_c`.
pub fn cech_face_probability(
    a: &SensorNode,
    b: &SensorNode,
    c: &SensorNode,
    rc: f64,
) -> Probability {
    let den = triple_den(a, b, c);
    let tables = TripleTables::new(a, b, c, rc);
    if tables.any_empty() {
        return Probability::zero(den);
    }
    let count = count_triples(a, b, c, &tables, |i, j, l| {
        triple_fits_in_ball(a.locations[i], b.locations[j], c.locations[l], rc)
    });
    Probability::new(count, den)
}

/// Edges and faces of a Čech or Rips complex with their appearance
/// probabilities. Edges with probability 0 are omitted; faces are stored for
/// every triple whose three edges all have positive probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilisticComplex {
    pub kind: ComplexKind,
    pub k: usize,
    pub vertices: BTreeSet<NodeId>,
    pub edges: BTreeMap<Edge, Probability>,
    pub faces: BTreeMap<Triangle, Probability>,
}

impl ProbabilisticComplex {
    pub fn edge(&self, a: NodeId, b: NodeId) -> Probability {
        let key = if a < b { [a, b] } else { [b, a] };
        let den = (self.k * self.k) as u64;
        self.edges.get(&key).copied().unwrap_or(Probability::zero(den))
    }

    pub fn face(&self, mut t: Triangle) -> Probability {
        t.sort();
        let den = (self.k * self.k * self.k) as u64;
        self.faces.get(&t).copied().unwrap_or(Probability::zero(den))
    }
}

pub fn build_probabilistic_complex(config: &NetworkConfig, kind: ComplexKind) -> ProbabilisticComplex {
    let (rc, eps) = (config.rc(), config.eps());
    let node = |id: NodeId| config.node(id).expect("candidate ids come from the config");

    let pairs: Vec<(NodeId, NodeId)> = SpatialGrid::for_config(config).candidate_pairs().into_iter().collect();
    let edges: BTreeMap<Edge, Probability> = pairs
        .par_iter()
        .map(|&(a, b)| ([a, b], edge_probability(node(a), node(b), rc, eps)))
        .filter(|(_, p)| !p.is_zero())
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let mut adjacency: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for [a, b] in edges.keys() {
        adjacency.entry(*a).or_default().insert(*b);
    }
    let mut triples = Vec::new();
    for (&a, above) in &adjacency {
        for &b in above {
            let Some(b_above) = adjacency.get(&b) else { continue };
            for &c in above.range(b..).skip(1) {
                if b_above.contains(&c) {
                    triples.push([a, b, c]);
                }
            }
        }
    }
    let faces: BTreeMap<Triangle, Probability> = triples
        .par_iter()
        .map(|&[a, b, c]| {
            let (na, nb, nc) = (node(a), node(b), node(c));
            let p = match kind {
                ComplexKind::Rips => {
                    let e = [edges[&[a, b]], edges[&[a, c]], edges[&[b, c]]];
                    rips_face_probability(e, na, nb, nc, rc)
                }
                ComplexKind::Cech => cech_face_probability(na, nb, nc, rc),
            };
            ([a, b, c], p)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    ProbabilisticComplex {
        kind,
        k: config.k(),
        vertices: config.nodes().iter().map(|n| n.id).collect(),
        edges,
        faces,
    }
}

/// Aggregate coverage of the domain over instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageEstimate {
    /// Instances evaluated (all `k^n` when `exhaustive`).
    pub samples: u64,
    /// Instances whose disk union covers every grid sample.
    pub full_cover_count: u64,
    pub full_cover_prob: f64,
    pub mean_covered_fraction: f64,
    pub seed: u64,
    pub exhaustive: bool,
}

#[derive(Default)]
struct Tally {
    instances: u64,
    full: u64,
    covered_samples: u128,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.full += other.full;
        self.covered_samples += other.covered_samples;
        self
    }

    fn finish(self, samples_per_instance: usize, seed: u64, exhaustive: bool) -> CoverageEstimate {
        let n = self.instances.max(1);
        CoverageEstimate {
            samples: self.instances,
            full_cover_count: self.full,
            full_cover_prob: self.full as f64 / n as f64,
            mean_covered_fraction: self.covered_samples as f64
                / (u128::from(n) * samples_per_instance as u128) as f64,
            seed,
            exhaustive,
        }
    }
}

fn tally_one(instance: &NetworkInstance<'_>, resolution: f64) -> Result<Tally, TopologyError> {
    let report = grid_cover_oracle(instance, resolution)?;
    Ok(Tally {
        instances: 1,
        full: u64::from(report.fully_covered),
        covered_samples: report.covered_samples as u128,
    })
}

/// Global coverage over all `k^n` instances. Fails when there are more than
/// [`EXHAUSTIVE_LIMIT`] of them.
pub fn enumerate_global_coverage(
    config: &NetworkConfig,
    resolution: f64,
) -> Result<CoverageEstimate, TopologyError> {
    let count = config
        .instance_count()
        .filter(|&c| c <= EXHAUSTIVE_LIMIT)
        .ok_or(TopologyError::TooManyInstances)?;
    let layout = GridLayout::new(config, resolution)?;
    let tally = (0..count)
        .into_par_iter()
        .map(|i| tally_one(&NetworkInstance::from_index(config, i), resolution))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(tally.finish(layout.len(), 0, true))
}

/// Sample RNG for instance number `index`; independent of thread scheduling.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FE_7A6E_5EED_0001);
    rng.set_stream(index);
    rng
}

/// Monte-Carlo global coverage over `samples` independently drawn instances.
pub fn sample_global_coverage(
    config: &NetworkConfig,
    samples: u64,
    resolution: f64,
    seed: u64,
) -> Result<CoverageEstimate, TopologyError> {
    if samples == 0 {
        return Err(TopologyError::InvalidSampleCount);
    }
    let layout = GridLayout::new(config, resolution)?;
    let tally = (0..samples)
        .into_par_iter()
        .map(|i| {
            let instance = NetworkInstance::sample(config, &mut sample_rng(seed, i));
            tally_one(&instance, resolution)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(tally.finish(layout.len(), seed, false))
}

/// Exhaustive when `k^n <= EXHAUSTIVE_LIMIT`, Monte-Carlo otherwise.
pub fn estimate_global_coverage(
    config: &NetworkConfig,
    samples: u64,
    resolution: f64,
    seed: u64,
) -> Result<CoverageEstimate, TopologyError> {
    if samples == 0 {
        return Err(TopologyError::InvalidSampleCount);
    }
    match config.instance_count() {
        Some(c) if c <= EXHAUSTIVE_LIMIT => {
            enumerate_global_coverage(config, resolution).map(|e| CoverageEstimate { seed, ..e })
        }
        _ => sample_global_coverage(config, samples, resolution, seed),
    }
}
