//! In-memory planner sessions: the current network plus cached complexes.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::complexes::ComplexKind;
use crate::geometry::check_radii;
use crate::network::{apply_edit, generate_random, Domain, Edit, NetworkConfig, NetworkError};
use crate::probability::{build_probabilistic_complex, ProbabilisticComplex};

pub const DEFAULT_N: usize = 30;
pub const DEFAULT_K: usize = 8;
pub const DEFAULT_EPS: f64 = 10.0;
pub const DEFAULT_EPS_MAX: f64 = 50.0;
pub const DEFAULT_RC: f64 = 50.0;
pub const DEFAULT_DOMAIN_SIDE: f64 = 500.0;

/// Network every fresh session starts with.
pub fn default_network(seed: u64) -> NetworkConfig {
    generate_random(
        DEFAULT_N,
        DEFAULT_K,
        DEFAULT_RC,
        DEFAULT_EPS,
        Domain::square(DEFAULT_DOMAIN_SIDE),
        seed,
    )
    .expect("default parameters are valid")
}

/// Partial parameter update; absent fields keep their value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamsUpdate {
    pub rc: Option<f64>,
    pub eps: Option<f64>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

/// Applies a parameter update. Changing `k`, `eps` or `seed` redraws every
/// node's indecisive locations from the (new) seed.
pub fn apply_params(config: &NetworkConfig, update: &ParamsUpdate) -> Result<NetworkConfig, NetworkError> {
    let mut params = config.params();
    params.rc = update.rc.unwrap_or(params.rc);
    params.eps = update.eps.unwrap_or(params.eps);
    params.k = update.k.unwrap_or(params.k);
    params.seed = update.seed.unwrap_or(params.seed);
    check_radii(params.rc, params.eps)?;
    if params.k == 0 {
        return Err(NetworkError::InvalidParameter { name: "k", value: 0.0 });
    }
    params.rc_max = params.rc_max.max(params.rc);
    let regenerate = params.k != config.k() || params.eps != config.eps() || params.seed != config.seed();
    if regenerate {
        NetworkConfig::from_anchors(params, config.nodes().iter().map(|n| (n.id, n.anchor)))
    } else {
        NetworkConfig::new(params, config.nodes().to_vec())
    }
}

/// One planner session. Every edit bumps `version` and drops cached
/// complexes, so a served complex always matches the current network.
#[derive(Debug, Clone)]
pub struct SessionState {
    id: String,
    config: Arc<NetworkConfig>,
    version: u64,
    complexes: BTreeMap<ComplexKind, Arc<ProbabilisticComplex>>,
}

impl SessionState {
    pub fn new(id: impl Into<String>, config: NetworkConfig) -> Self {
        SessionState { id: id.into(), config: Arc::new(config), version: 0, complexes: BTreeMap::new() }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &Arc<NetworkConfig> {
        &self.config
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn is_dirty(&self, kind: ComplexKind) -> bool {
        !self.complexes.contains_key(&kind)
    }

    pub fn replace(&mut self, config: NetworkConfig) {
        self.config = Arc::new(config);
        self.version += 1;
        self.complexes.clear();
    }

    pub fn apply(&mut self, edit: &Edit) -> Result<(), NetworkError> {
        let next = apply_edit(&self.config, edit)?;
        self.replace(next);
        Ok(())
    }

    pub fn apply_params(&mut self, update: &ParamsUpdate) -> Result<(), NetworkError> {
        let next = apply_params(&self.config, update)?;
        self.replace(next);
        Ok(())
    }

    pub fn cached(&self, kind: ComplexKind) -> Option<Arc<ProbabilisticComplex>> {
        self.complexes.get(&kind).cloned()
    }

    /// Stores a complex computed from `version`; ignored if the network has
    /// changed since.
    pub fn store(&mut self, kind: ComplexKind, version: u64, complex: Arc<ProbabilisticComplex>) -> bool {
        if version != self.version {
            return false;
        }
        self.complexes.insert(kind, complex);
        true
    }

    /// Cached complex, computing it first if needed.
    pub fn complex(&mut self, kind: ComplexKind) -> Arc<ProbabilisticComplex> {
        if let Some(c) = self.cached(kind) {
            return c;
        }
        let c = Arc::new(build_probabilistic_complex(&self.config, kind));
        self.complexes.insert(kind, c.clone());
        c
    }
}

pub type SharedSession = Arc<RwLock<SessionState>>;

/// All live sessions. Each session has its own lock, so edits to one session
/// never wait on another.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, SharedSession>>,
}

impl SessionStore {
    pub fn new() -> Self {
        SessionStore::default()
    }

    pub fn insert(&self, state: SessionState) -> SharedSession {
        let id = state.id.clone();
        let shared = Arc::new(RwLock::new(state));
        self.sessions.write().expect("session map poisoned").insert(id, shared.clone());
        shared
    }

    pub fn get(&self, id: &str) -> Option<SharedSession> {
        self.sessions.read().expect("session map poisoned").get(id).cloned()
    }

    pub fn remove(&self, id: &str) -> Option<SharedSession> {
        self.sessions.write().expect("session map poisoned").remove(id)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
