//! Verification reports. Keys inside each section are sorted and every real
//! is a 17-significant-digit string, so equal inputs give equal bytes.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::format::{fmt_real, Kind};

pub const TOOL: &str = "qdiscord";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    DvExact,
    DvTomo,
    CvMoyal,
    GaussianPeak,
    GaussianCov,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub kind: &'static str,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(kind: Kind, bytes: &[u8]) -> Self {
        Self { kind: kind.as_str(), sha256: crate::format::sha256_hex(bytes) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub pipeline: Pipeline,
    pub inputs: Vec<InputDigest>,
    pub verdict: &'static str,
    pub witness: Map<String, Value>,
    pub thresholds: Map<String, Value>,
    pub seeds: Map<String, Value>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(pipeline: Pipeline, inputs: Vec<InputDigest>, verdict: &'static str) -> Self {
        Self {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            pipeline,
            inputs,
            verdict,
            witness: Map::new(),
            thresholds: Map::new(),
            seeds: Map::new(),
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn real(x: f64) -> Value {
    Value::String(fmt_real(x))
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

pub fn pair(p: (usize, usize)) -> Value {
    Value::from(vec![p.0, p.1])
}

/// Seeds are integers; emitted as strings so that 64-bit values survive
/// readers that parse JSON numbers as doubles.
pub fn seed(s: u64) -> Value {
    Value::String(s.to_string())
}
