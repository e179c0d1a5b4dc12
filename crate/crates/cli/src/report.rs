//! Run report payload. Serialized as pretty JSON; the schema is documented
//! in docs/report.schema.json. `wall_time_seconds` is the only field that
//! varies between identical runs.

use serde::Serialize;

#[derive(Serialize)]
pub struct Report {
    pub method: &'static str,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub cut_weight: f64,
    pub block_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relaxation_weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_status: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounding_rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounding_status: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback_randomized: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmeans_objective: Option<f64>,
    pub wall_time_seconds: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
