use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub rounds: Vec<RoundReport>,
    pub rows_raw: usize,
    pub rows_pruned: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<Vec<BinReport>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundReport {
    pub groups: Vec<GroupReport>,
    pub satisfied: usize,
    /// Active clients at the start of the round.
    pub active: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    pub s: usize,
    pub messages: Vec<usize>,
    pub sat: usize,
    pub eff: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinReport {
    pub s: usize,
    pub clients: usize,
    pub rows: usize,
    pub probability: f64,
}

// `BinReport` carries an f64 that is always a finite ratio.
impl Eq for BinReport {}

impl RunReport {
    pub fn round_count(&self) -> usize {
        if let Some(bins) = &self.bins {
            bins.iter().filter(|b| b.clients > 0).count()
        } else {
            self.rounds.len()
        }
    }
}
