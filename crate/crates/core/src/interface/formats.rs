//! CSV anchor import, the JSON network document, and the JSON payload for
//! probabilistic complexes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::ComplexKind;
use crate::geometry::Point2;
use crate::network::{half_x_extent, Domain, NetworkConfig, NetworkError, NetworkParams, NodeId, SensorNode};
use crate::probability::{Probability, ProbabilisticComplex};

pub const FORMAT_VERSION: &str = "1";

/// Coverage radius used for CSV files whose anchors give no x-extent.
pub const FALLBACK_RC: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

impl FormatError {
    pub fn field(&self) -> Option<&str> {
        match self {
            FormatError::Schema { field, .. } => Some(field),
            _ => None,
        }
    }
}

/// Settings applied to anchors read from CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvOptions {
    pub k: usize,
    pub eps: f64,
    pub seed: u64,
    /// Coverage radius; derived from the anchors when `None`.
    pub rc: Option<f64>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions { k: 8, eps: 10.0, seed: 0, rc: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvLoad {
    pub config: NetworkConfig,
    pub warnings: Vec<String>,
}

/// Reads anchors from CSV with a mandatory `x,y` header.
///
/// Without an explicit radius, `rcMax` is half the x-extent of the anchors and
/// `rc` is half of that. `eps` is clamped to `rc`. The domain is the anchors'
/// bounding box grown by `rcMax` on every side.
pub fn load_csv(text: &str, options: &CsvOptions) -> Result<CsvLoad, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| FormatError::Csv { line: 1, message: e.to_string() })?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(xi), Some(yi)) = (column("x"), column("y")) else {
        return Err(FormatError::Csv { line: 1, message: "header must contain `x` and `y` columns".into() });
    };
    let mut warnings = Vec::new();
    let extra: Vec<&str> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != xi && *i != yi)
        .map(|(_, h)| h)
        .collect();
    if !extra.is_empty() {
        warnings.push(format!("ignoring extra columns: {}", extra.join(", ")));
    }

    let mut anchors = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| FormatError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |i: usize, name: &str| -> Result<f64, FormatError> {
            let raw = record.get(i).ok_or_else(|| FormatError::Csv { line, message: format!("missing `{name}` value") })?;
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| FormatError::Csv { line, message: format!("invalid `{name}` value `{raw}`") })
        };
        let p = Point2::new(field(xi, "x")?, field(yi, "y")?);
        anchors.push((NodeId(anchors.len() as u32), p));
    }
    if anchors.is_empty() {
        warnings.push("no sensor rows; the network is empty".into());
    }

    let half_extent = half_x_extent(anchors.iter().map(|(_, p)| *p));
    let (rc, rc_max) = match options.rc {
        Some(rc) => (rc, rc.max(half_extent)),
        None if half_extent > 0.0 => (0.5 * half_extent, half_extent),
        None => {
            warnings.push(format!("cannot derive a coverage radius; using {FALLBACK_RC}"));
            (FALLBACK_RC, FALLBACK_RC)
        }
    };
    let mut eps = options.eps;
    if eps > rc {
        warnings.push(format!("uncertainty radius {eps} exceeds coverage radius {rc}; clamped"));
        eps = rc;
    }

    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (_, p) in &anchors {
        x0 = x0.min(p.x());
        y0 = y0.min(p.y());
        x1 = x1.max(p.x());
        y1 = y1.max(p.y());
    }
    if anchors.is_empty() {
        (x0, y0, x1, y1) = (0.0, 0.0, 0.0, 0.0);
    }
    let domain = Domain::new(x0 - rc_max, y0 - rc_max, x1 - x0 + 2.0 * rc_max, y1 - y0 + 2.0 * rc_max)?;
    let params = NetworkParams { rc, rc_max, eps, k: options.k, seed: options.seed, domain };
    let config = NetworkConfig::from_anchors(params, anchors)?;
    Ok(CsvLoad { config, warnings })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NodeDocument {
    id: NodeId,
    anchor: Point2,
    locations: Vec<Point2>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct NetworkDocument {
    version: String,
    domain: Domain,
    rc: f64,
    rc_max: f64,
    eps: f64,
    k: usize,
    seed: u64,
    nodes: Vec<NodeDocument>,
}

pub fn save_json(config: &NetworkConfig) -> String {
    let p = config.params();
    let doc = NetworkDocument {
        version: FORMAT_VERSION.into(),
        domain: p.domain,
        rc: p.rc,
        rc_max: p.rc_max,
        eps: p.eps,
        k: p.k,
        seed: p.seed,
        nodes: config
            .nodes()
            .iter()
            .map(|n| NodeDocument { id: n.id, anchor: n.anchor, locations: n.locations.clone() })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("network documents always serialize")
}

/// Turns a serde error into a schema error naming the offending field.
fn schema_error<E: std::fmt::Display>(path: String, err: E) -> FormatError {
    let message = err.to_string();
    let mut field = if path == "." { String::new() } else { path };
    if let Some(rest) = message.strip_prefix("missing field `") {
        if let Some(name) = rest.split('`').next() {
            if !field.is_empty() {
                field.push('.');
            }
            field.push_str(name);
        }
    }
    FormatError::Schema { field, message }
}

/// Parses any JSON document, reporting syntax errors by position and type
/// errors by the path of the offending field.
pub fn parse_document<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema_error(path, e.into_inner())
    })
}

pub fn load_json(text: &str) -> Result<NetworkConfig, FormatError> {
    let doc: NetworkDocument = parse_document(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(FormatError::Schema {
            field: "version".into(),
            message: format!("unsupported version `{}`", doc.version),
        });
    }
    let params = NetworkParams {
        rc: doc.rc,
        rc_max: doc.rc_max,
        eps: doc.eps,
        k: doc.k,
        seed: doc.seed,
        domain: doc.domain,
    };
    let nodes = doc
        .nodes
        .into_iter()
        .map(|n| SensorNode { id: n.id, anchor: n.anchor, locations: n.locations })
        .collect();
    Ok(NetworkConfig::new(params, nodes)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexEntry<const N: usize> {
    #[serde(with = "serde_arrays")]
    pub nodes: [NodeId; N],
    pub num: u64,
    pub den: u64,
    pub value: f64,
}

mod serde_arrays {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::network::NodeId;

    pub fn serialize<S: Serializer, const N: usize>(v: &[NodeId; N], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[NodeId; N], D::Error> {
        let v = Vec::<NodeId>::deserialize(d)?;
        let len = v.len();
        v.try_into()
            .map_err(|_| serde::de::Error::invalid_length(len, &"a simplex of the right size"))
    }
}

impl<const N: usize> SimplexEntry<N> {
    fn new(nodes: [NodeId; N], p: Probability) -> Self {
        SimplexEntry { nodes, num: p.num(), den: p.den(), value: p.value() }
    }

    pub fn probability(&self) -> Option<Probability> {
        Probability::try_new(self.num, self.den)
    }
}

/// Wire form of a [`ProbabilisticComplex`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub kind: ComplexKind,
    pub k: usize,
    pub rc: f64,
    pub eps: f64,
    pub vertices: Vec<NodeId>,
    pub edges: Vec<SimplexEntry<2>>,
    pub faces: Vec<SimplexEntry<3>>,
}

impl ComplexDocument {
    pub fn new(config: &NetworkConfig, complex: &ProbabilisticComplex) -> Self {
        ComplexDocument {
            kind: complex.kind,
            k: complex.k,
            rc: config.rc(),
            eps: config.eps(),
            vertices: complex.vertices.iter().copied().collect(),
            edges: complex.edges.iter().map(|(e, p)| SimplexEntry::new(*e, *p)).collect(),
            faces: complex.faces.iter().map(|(t, p)| SimplexEntry::new(*t, *p)).collect(),
        }
    }
}

/// The complex payload shared by the CLI and the HTTP API.
pub fn complex_json(config: &NetworkConfig, complex: &ProbabilisticComplex) -> String {
    serde_json::to_string_pretty(&ComplexDocument::new(config, complex)).expect("complex documents always serialize")
}
