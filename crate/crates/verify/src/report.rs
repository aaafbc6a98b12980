//! Machine-readable suite results.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value as Json;

/// Failures beyond this many are counted but not recorded.
pub const MAX_RECORDED: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub inputs: Json,
    pub trace: Json,
    pub violated: String,
}

/// Outcome of one suite on one format (or one group of formats).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub format: String,
    pub spec: String,
    pub cases: u64,
    pub failures: Vec<Failure>,
    pub failures_total: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Json>,
    pub ms: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures_total == 0
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Accumulates cases and failures for one report.
#[derive(Debug)]
pub struct Tally {
    report: Report,
    started: Instant,
}

impl Tally {
    pub fn new(suite: &str, format: impl ToString, spec: impl Into<String>) -> Tally {
        Tally {
            report: Report {
                suite: suite.to_string(),
                format: format.to_string(),
                spec: spec.into(),
                cases: 0,
                failures: Vec::new(),
                failures_total: 0,
                witnesses: Vec::new(),
                ms: 0,
            },
            started: Instant::now(),
        }
    }

    pub fn case(&mut self) {
        self.report.cases += 1;
    }

    /// Counts one case and records a failure unless `ok`.
    pub fn check(&mut self, ok: bool, violated: &str, inputs: impl FnOnce() -> Json, trace: impl FnOnce() -> Json) {
        self.report.cases += 1;
        if !ok {
            self.fail(violated, inputs(), trace());
        }
    }

    pub fn fail(&mut self, violated: &str, inputs: Json, trace: Json) {
        self.report.failures_total += 1;
        if self.report.failures.len() < MAX_RECORDED {
            self.report.failures.push(Failure {
                inputs,
                trace,
                violated: violated.to_string(),
            });
        }
    }

    pub fn witness(&mut self, w: Json) {
        if self.report.witnesses.len() < MAX_RECORDED {
            self.report.witnesses.push(w);
        }
    }

    pub fn witness_count(&self) -> usize {
        self.report.witnesses.len()
    }

    pub fn finish(mut self) -> Report {
        self.report.ms = self.started.elapsed().as_millis() as u64;
        self.report
    }
}
