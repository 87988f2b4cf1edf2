//! JSON documents printed by the CLI. Field order is declaration order.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub system: String,
    pub word: String,
    /// `accepted`, `rejected` or `inconclusive`.
    pub verdict: String,
    pub algorithm: String,
    /// Rewrite ids of an accepting derivation.
    pub witness: Option<Vec<String>>,
    pub timing_ms: f64,
    pub limits_hit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub system: String,
    pub max_len: usize,
    pub algorithm: String,
    pub words: Vec<String>,
    /// Words the oracle could not decide within its limits.
    pub inconclusive: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteInfo {
    pub id: String,
    pub g1: String,
    pub g2: String,
    pub net_effect: Vec<i64>,
    pub psi: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub i: Vec<String>,
    pub h: Vec<String>,
    pub l: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentInfo {
    /// `alpha` or `beta`.
    pub kind: String,
    pub start: usize,
    pub len: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub segments: Vec<SegmentInfo>,
    pub eta3: Vec<u64>,
    pub eta5: Vec<u64>,
    pub sequence_check: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub system: String,
    pub kind: String,
    pub family: String,
    pub real_time: bool,
    pub g1_nonterminals: usize,
    pub g2_nonterminals: usize,
    pub rewrites: Vec<RewriteInfo>,
    /// Terminal to the ψ-kinds producing it (one-state families only).
    pub producers: Option<Vec<(String, Vec<String>)>>,
    pub partition: Option<Partition>,
    pub word: Option<String>,
    pub case: Option<String>,
    /// Absent when the word has an unproducible symbol.
    pub segments: Option<SegmentReport>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_report_key_order_and_round_trip() {
        let r = RunReport {
            command: "member".into(),
            system: "ex52".into(),
            word: "ab".into(),
            verdict: "accepted".into(),
            algorithm: "counter".into(),
            witness: None,
            timing_ms: 0.5,
            limits_hit: None,
        };
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(
            text,
            r#"{"command":"member","system":"ex52","word":"ab","verdict":"accepted","algorithm":"counter","witness":null,"timing_ms":0.5,"limits_hit":null}"#
        );
        assert_eq!(serde_json::from_str::<RunReport>(&text).unwrap(), r);
    }
}
