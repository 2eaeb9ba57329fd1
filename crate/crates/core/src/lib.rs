//! Coverage certification for sensor networks whose sensor locations are
//! uncertain.
//!
//! Each sensor has `k` equally likely candidate locations inside a disk of
//! radius `eps` around an anchor. The crate builds Čech and Rips complexes,
//! attaches exact appearance probabilities to their edges and faces,
//! certifies coverage of individual instances through GF(2) homology, and
//! provides the file formats and session state used by the planner service.

pub mod complexes;
pub mod geometry;
mod gf2;
pub mod interface;
pub mod network;
pub mod probability;
pub mod topology;

pub use complexes::{build_cech, build_complex, build_rips, ComplexKind, SimplicialComplex};
pub use geometry::{annulus_class, distance, min_enclosing_ball, AnnulusClass, Ball2, Point2};
pub use network::{
    apply_edit, candidate_pairs, enumerate_pair_instances, generate_random, Domain, Edit,
    NetworkConfig, NetworkError, NetworkInstance, NetworkParams, NodeId, SensorNode, SpatialGrid,
};
pub use probability::{
    build_probabilistic_complex, cech_face_probability, edge_probability,
    estimate_global_coverage, point_coverage_probability, rips_face_probability,
    union_point_coverage, CoverageEstimate, Probability, ProbabilisticComplex,
};
pub use topology::{
    betti_numbers, certify_instance_coverage, check_interleaving, critical_radii,
    grid_cover_oracle, sparsify, BettiNumbers, CoverageCertificate, CoverageReport,
    CoverageVerdict, TopologyError,
};
