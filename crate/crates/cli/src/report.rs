use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

/// What a subcommand was asked to do.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timeout: Option<f64>,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub subcommand: String,
    pub inputs: Inputs,
    pub results: Value,
    /// Seconds per phase, plus `total`.
    pub timing: BTreeMap<String, f64>,
    pub exit_code: i32,
    pub version: String,
    pub schema_version: String,
}

/// Wall-clock phases of one run.
pub struct Timer {
    start: Instant,
    phase: Instant,
    pub phases: BTreeMap<String, f64>,
}

impl Timer {
    pub fn new() -> Self {
        let now = Instant::now();
        Timer {
            start: now,
            phase: now,
            phases: BTreeMap::new(),
        }
    }

    pub fn lap(&mut self, name: &str) {
        let now = Instant::now();
        *self.phases.entry(name.to_string()).or_default() += (now - self.phase).as_secs_f64();
        self.phase = now;
    }

    pub fn finish(mut self) -> BTreeMap<String, f64> {
        self.phases
            .insert("total".into(), self.start.elapsed().as_secs_f64());
        self.phases
    }
}
