use std::time::Duration;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Ambiguous,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stages {
    pub selector: Status,
    pub keystream: Status,
    pub posmap: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct Difference {
    pub d1: u8,
    pub d2: u8,
    pub d: i32,
    pub period: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmbiguityEvent {
    pub d1: u8,
    pub d2: u8,
    pub step: usize,
    pub candidates: Vec<u8>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TimingsMs {
    pub selector: f64,
    pub keystream: f64,
    pub posmap: f64,
}

impl TimingsMs {
    pub fn from_stages(selector: Duration, keystream: Duration, posmap: Duration) -> Self {
        let ms = |d: Duration| d.as_secs_f64() * 1e3;
        TimingsMs {
            selector: ms(selector),
            keystream: ms(keystream),
            posmap: ms(posmap),
        }
    }
}

/// Outcome of one `attack` invocation. `queries` counts the chosen images of
/// the attempt that produced the key; `oracle_queries` includes retries.
#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub dims: [usize; 2],
    pub queries: usize,
    pub oracle_queries: usize,
    pub expected_queries: usize,
    pub difference: Difference,
    pub stages: Stages,
    pub ambiguity: Vec<AmbiguityEvent>,
    pub outputs: Vec<String>,
    pub timings_ms: TimingsMs,
    pub error: Option<String>,
}
