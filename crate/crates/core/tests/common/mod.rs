//! Brute-force reference computations shared by the integration tests.
//! Nothing here reuses the library's pruning, shortcuts or ball code.

#![allow(dead_code)]

use covertop_core::{Domain, NetworkConfig, NetworkParams, NodeId, Point2, SensorNode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn within(p: Point2, q: Point2, r: f64) -> bool {
    let (dx, dy) = (p.x() - q.x(), p.y() - q.y());
    dx * dx + dy * dy <= r * r
}

/// Edge count over all `k_a * k_b` location pairs.
pub fn brute_edge(a: &SensorNode, b: &SensorNode, rc: f64) -> u64 {
    let mut m = 0;
    for p in &a.locations {
        for q in &b.locations {
            m += u64::from(within(*p, *q, 2.0 * rc));
        }
    }
    m
}

/// Smallest `max_i |x - p_i|` over the candidate centres of three points:
/// the three side midpoints and the circumcentre. The optimum is always one
/// of them.
pub fn minimax_radius(a: Point2, b: Point2, c: Point2) -> f64 {
    let far = |x: (f64, f64)| {
        [a, b, c]
            .iter()
            .map(|p| (p.x() - x.0).hypot(p.y() - x.1))
            .fold(0.0, f64::max)
    };
    let mid = |p: Point2, q: Point2| ((p.x() + q.x()) / 2.0, (p.y() + q.y()) / 2.0);
    let mut best = far(mid(a, b)).min(far(mid(a, c))).min(far(mid(b, c)));
    let (bx, by) = (b.x() - a.x(), b.y() - a.y());
    let (cx, cy) = (c.x() - a.x(), c.y() - a.y());
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() > 1e-12 {
        let (b2, c2) = (bx * bx + by * by, cx * cx + cy * cy);
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        best = best.min(far((a.x() + ux, a.y() + uy)));
    }
    best
}

/// Face count over all `k^3` joint choices.
pub fn brute_face(a: &SensorNode, b: &SensorNode, c: &SensorNode, rc: f64, cech: bool) -> u64 {
    let mut m = 0;
    for p in &a.locations {
        for q in &b.locations {
            for s in &c.locations {
                let rips = within(*p, *q, 2.0 * rc) && within(*p, *s, 2.0 * rc) && within(*q, *s, 2.0 * rc);
                let ok = if cech { minimax_radius(*p, *q, *s) <= rc } else { rips };
                m += u64::from(ok);
            }
        }
    }
    m
}

/// Random network whose spacing puts many pairs near the `2 r_c` threshold.
pub fn random_network(rng: &mut ChaCha8Rng, max_n: usize, max_k: usize) -> NetworkConfig {
    let n = rng.random_range(1..=max_n);
    let k = rng.random_range(1..=max_k);
    let rc = rng.random_range(0.5..3.0);
    let eps = rc * rng.random_range(0.0..1.0);
    let side = 2.0 * rc * (n as f64).sqrt() * rng.random_range(0.6..1.4);
    let seed = rng.random();
    covertop_core::generate_random(n, k, rc, eps, Domain::square(side), seed).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn config_from_anchors(rc: f64, eps: f64, k: usize, side: f64, anchors: &[(f64, f64)], seed: u64) -> NetworkConfig {
    let params = NetworkParams { rc, rc_max: rc, eps, k, seed, domain: Domain::square(side) };
    NetworkConfig::from_anchors(
        params,
        anchors.iter().enumerate().map(|(i, &(x, y))| (NodeId(i as u32), Point2::new(x, y))),
    )
    .unwrap()
}

/// Every location choice in mixed radix, first node fastest.
pub fn all_choices(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (k as u64).pow(n as u32);
    (0..total).map(move |mut idx| {
        (0..n)
            .map(|_| {
                let c = (idx % k as u64) as usize;
                idx /= k as u64;
                c
            })
            .collect()
    })
}
