use serde::Serialize;

use crate::oracle::KripkeModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Sat,
    Unsat,
}

impl Verdict {
    pub fn is_sat(self) -> bool {
        self == Verdict::Sat
    }
}

/// Counters from one run of the fixpoint procedure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FixpointStats {
    pub subformulas: usize,
    pub initial_tips: usize,
    pub final_tips: usize,
    pub final_edges: usize,
    pub iterations: usize,
}

/// Counters from one run of the window/continuation search.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub ccs_enumerated: u64,
    pub sat_calls: u64,
    pub memo_hits: u64,
    pub windows_explored: u64,
    pub continuations_explored: u64,
    pub max_depth: usize,
    pub continuation_checks: u64,
    pub continuation_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Stats {
    Fixpoint(FixpointStats),
    Search(SearchStats),
}

/// A verdict, the model backing it when satisfiable, and search counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatResult {
    pub verdict: Verdict,
    pub witness: Option<KripkeModel>,
    pub stats: Stats,
}

impl SatResult {
    pub fn stats_json(&self) -> String {
        serde_json::to_string(&self.stats).expect("stats serialize")
    }
}
