//! JSON report documents and the run manifest embedded in each of them.
//!
//! The manifest records how a report was produced (command line, version,
//! seeds, input digests, wall clock, worker count). Everything outside the
//! `manifest` key is the payload; reruns with equal arguments produce
//! byte-identical payload sections regardless of worker count.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::enumerate::SolverCensus;
use crate::graph::NetworkMetrics;
use crate::verify::{ConvergenceProfile, DctVerdict};

pub const VERDICT_FORMAT: &str = "mban-verdict-v1";
pub const CENSUS_FORMAT: &str = "mban-census-v1";
pub const STATS_FORMAT: &str = "mban-stats-v1";

/// Provenance of one toolkit run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub inputs: Vec<InputDigest>,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, contents: &[u8]) -> Self {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(contents);
        Self {
            path: path.to_string(),
            sha256: format!("{:x}", hasher.finalize()),
        }
    }
}

/// Payload section of a verdict report.
pub fn verdict_payload(v: &DctVerdict) -> Value {
    let histogram: Vec<Value> = v
        .histogram
        .iter()
        .enumerate()
        .map(|(d, s)| json!([d, s.count, s.max_transient]))
        .collect();
    let counterexample = v.counterexample.as_ref().map(|c| {
        json!({
            "config": c.config.to_text(),
            "transient": c.outcome.transient,
            "cycle_length": c.outcome.cycle_length,
        })
    });
    json!({
        "format": VERDICT_FORMAT,
        "solves": v.solves,
        "mode": v.mode,
        "max_transient": v.max_transient,
        "counterexample": counterexample,
        "histogram": histogram,
        "configs_checked": v.configs_checked,
    })
}

/// Payload section of a census report; `include_codes = false` drops the
/// per-class code listing (`--count-only`).
pub fn census_payload(c: &SolverCensus, include_codes: bool) -> Value {
    let mut doc = json!({
        "format": CENSUS_FORMAT,
        "n": c.n,
        "universe": c.universe_size,
        "raw": c.raw_solver_count,
        "canonical": c.canonical_solver_count,
        "options": c.options,
    });
    if include_codes {
        doc["codes"] = json!(c.canonical_codes);
    }
    doc
}

/// Payload section of a stats report; the profile is absent for even sizes
/// where the classification task (and hence convergence) is undefined.
pub fn stats_payload(
    n: usize,
    metrics: &NetworkMetrics,
    profile: Option<&ConvergenceProfile>,
) -> Value {
    let profile = profile.map(|p| {
        p.rows
            .iter()
            .map(|(d, max, mean)| json!([d, max, mean]))
            .collect::<Vec<Value>>()
    });
    json!({
        "format": STATS_FORMAT,
        "n": n,
        "metrics": metrics,
        "profile": profile,
    })
}

/// Attaches the manifest to a payload document.
pub fn with_manifest(mut payload: Value, manifest: &RunManifest) -> Value {
    payload["manifest"] = serde_json::to_value(manifest).expect("manifest serializes");
    payload
}

/// Strips the manifest, leaving only the payload section. Used to compare
/// reports across reruns and worker counts.
pub fn strip_manifest(mut doc: Value) -> Value {
    if let Some(obj) = doc.as_object_mut() {
        obj.remove("manifest");
    }
    doc
}
