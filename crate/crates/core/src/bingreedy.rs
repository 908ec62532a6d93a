//! The deterministic BinGreedy encoder.
//!
//! Each round sorts the messages by effective degree against the clients that
//! are still active, buckets them into groups whose effective degrees fall in
//! `(n/2^s, n/2^(s-1)]`, and spends two binary transmissions per nonempty
//! group. Inside a group the messages are visited in sorted order and each is
//! given one of the coding vectors `(1,0)`, `(0,1)`, `(1,1)`, greedily keeping
//! as many already-satisfied clients decodable as possible.
//!
//! Ties are broken by smallest message index during sorting and by the
//! preference `(1,0) ≻ (0,1) ≻ (1,1)` when assigning vectors.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FMatrix, Field};
use crate::instance::{ActiveSet, PliableInstance};
use crate::report::{GroupReport, RoundReport, RunReport};

/// Which client count sets the grouping thresholds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ThresholdBase {
    /// Clients still active at the start of the round.
    #[default]
    Active,
    /// All clients of the instance.
    Original,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BinGreedyConfig {
    pub threshold_base: ThresholdBase,
    /// Drop all-zero rows from the returned matrix.
    pub prune_zero_rows: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MessageGroup {
    pub s: usize,
    pub messages: Vec<usize>,
    /// `(n/2^s, n/2^(s-1)]`
    pub threshold: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SortingResult {
    /// Client count used for the thresholds.
    pub base: usize,
    /// Messages in the order they were picked; only messages with a
    /// positive effective degree appear.
    pub order: Vec<usize>,
    /// Effective clients of `order[l]`.
    pub eff_clients: Vec<Vec<usize>>,
    pub eff_degree: Vec<usize>,
    /// One entry per `s = 1..=floor(log2 base)+1`, possibly empty.
    pub groups: Vec<MessageGroup>,
}

impl SortingResult {
    fn position(&self, message: usize) -> Option<usize> {
        self.order.iter().position(|&j| j == message)
    }

    pub fn effective_clients_of(&self, message: usize) -> Option<&[usize]> {
        self.position(message).map(|l| self.eff_clients[l].as_slice())
    }

    pub fn effective_degree_of(&self, message: usize) -> Option<usize> {
        self.position(message).map(|l| self.eff_degree[l])
    }
}

pub fn group_count(base: usize) -> usize {
    if base == 0 {
        0
    } else {
        base.ilog2() as usize + 1
    }
}

/// The `s` with `base/2^s < degree <= base/2^(s-1)`, if any.
pub fn group_of(degree: usize, base: usize) -> Option<usize> {
    if degree == 0 || degree > base {
        return None;
    }
    let (d, n) = (degree as u128, base as u128);
    (1..=group_count(base)).find(|&s| d << s > n && d << (s - 1) <= n)
}

pub fn sort_and_group(instance: &PliableInstance, active: &ActiveSet) -> SortingResult {
    sort_and_group_with(instance, active, active.len())
}

/// Greedy max-degree ordering restricted to `active`, grouped against
/// thresholds computed from `base` clients.
pub fn sort_and_group_with(instance: &PliableInstance, active: &ActiveSet, base: usize) -> SortingResult {
    let neighbors = instance.neighbor_lists();
    let mut remaining = vec![false; instance.n()];
    for &i in active.clients() {
        remaining[i] = true;
    }
    let mut degree: Vec<usize> = neighbors
        .iter()
        .map(|list| list.iter().filter(|&&i| remaining[i]).count())
        .collect();
    let mut chosen = vec![false; instance.m()];

    let mut order = Vec::new();
    let mut eff_clients = Vec::new();
    let mut eff_degree = Vec::new();
    loop {
        // First maximum wins, i.e. the smallest index among ties.
        let best = (0..instance.m())
            .filter(|&j| !chosen[j])
            .fold(None::<usize>, |best, j| match best {
                Some(b) if degree[b] >= degree[j] => Some(b),
                _ => Some(j),
            });
        let Some(j) = best.filter(|&j| degree[j] > 0) else {
            break;
        };
        chosen[j] = true;
        let eff: Vec<usize> = neighbors[j].iter().copied().filter(|&i| remaining[i]).collect();
        for &i in &eff {
            remaining[i] = false;
            for &k in instance.requirement(i) {
                degree[k] -= 1;
            }
        }
        order.push(j);
        eff_degree.push(eff.len());
        eff_clients.push(eff);
    }

    let mut groups: Vec<MessageGroup> = (1..=group_count(base))
        .map(|s| MessageGroup {
            s,
            messages: Vec::new(),
            threshold: (base as f64 / 2f64.powi(s as i32), base as f64 / 2f64.powi(s as i32 - 1)),
        })
        .collect();
    for (&j, &d) in order.iter().zip(&eff_degree) {
        if let Some(s) = group_of(d, base) {
            groups[s - 1].messages.push(j);
        }
    }

    SortingResult {
        base,
        order,
        eff_clients,
        eff_degree,
        groups,
    }
}

/// A nonzero binary coding vector of length two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodingVector {
    /// `(1,0)`
    First,
    /// `(0,1)`
    Second,
    /// `(1,1)`
    Both,
}

impl CodingVector {
    /// In tie-break preference order.
    pub const ALL: [CodingVector; 3] = [CodingVector::First, CodingVector::Second, CodingVector::Both];

    pub fn entries(self) -> [u32; 2] {
        match self {
            CodingVector::First => [1, 0],
            CodingVector::Second => [0, 1],
            CodingVector::Both => [1, 1],
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// How many times each nonzero vector was assigned to one client's visited
/// messages.
///
/// Over `F_2^2` a vector `u` is outside the span of the others iff it occurs
/// once and the others all equal one vector `v != u`, so decodability only
/// depends on these counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VectorCounts([u32; 3]);

impl VectorCounts {
    pub fn single(v: CodingVector) -> Self {
        Self::default().with(v)
    }

    pub fn with(mut self, v: CodingVector) -> Self {
        self.0[v.slot()] += 1;
        self
    }

    pub fn counts(&self) -> [u32; 3] {
        self.0
    }

    pub fn satisfied(&self) -> bool {
        let kinds = self.0.iter().filter(|&&c| c > 0).count();
        self.0.contains(&1) && kinds <= 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCode {
    pub s: usize,
    pub messages: Vec<usize>,
    /// Coding vector of `messages[k]`.
    pub assignment: Vec<CodingVector>,
    pub sat: Vec<usize>,
    pub unsat: Vec<usize>,
}

impl GroupCode {
    pub fn effective_clients(&self) -> usize {
        self.sat.len() + self.unsat.len()
    }

    /// The group's two transmissions as rows of length `m`.
    pub fn rows(&self, m: usize) -> [Vec<u32>; 2] {
        let mut rows = [vec![0; m], vec![0; m]];
        for (&j, v) in self.messages.iter().zip(&self.assignment) {
            let [top, bottom] = v.entries();
            rows[0][j] = top;
            rows[1][j] = bottom;
        }
        rows
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Membership {
    Sat,
    Unsat,
}

/// Greedy vector assignment for one group. `eff[k]` are the effective
/// clients of `group[k]`, and `group` is in sorted order.
pub fn greedy_assign(instance: &PliableInstance, s: usize, group: &[usize], eff: &[Vec<usize>]) -> GroupCode {
    assign_with_neighbors(&instance.neighbor_lists(), s, group, eff)
}

fn assign_with_neighbors(neighbors: &[Vec<usize>], s: usize, group: &[usize], eff: &[Vec<usize>]) -> GroupCode {
    assert_eq!(group.len(), eff.len(), "one effective-client list per message");
    let mut state: BTreeMap<usize, (VectorCounts, Membership)> = BTreeMap::new();
    let mut assignment = Vec::with_capacity(group.len());

    for (&j, new_clients) in group.iter().zip(eff) {
        let touched: Vec<usize> = neighbors[j]
            .iter()
            .copied()
            .filter(|i| state.contains_key(i))
            .collect();

        let mut best = CodingVector::First;
        let mut best_kept = None;
        for v in CodingVector::ALL {
            let kept = touched
                .iter()
                .filter(|i| {
                    let (counts, member) = state[*i];
                    member == Membership::Sat && counts.with(v).satisfied()
                })
                .count();
            if best_kept.is_none_or(|b| kept > b) {
                best = v;
                best_kept = Some(kept);
            }
        }

        for i in touched {
            let entry = state.get_mut(&i).expect("touched clients are tracked");
            entry.0 = entry.0.with(best);
            if entry.1 == Membership::Sat && !entry.0.satisfied() {
                entry.1 = Membership::Unsat;
            }
        }
        for &i in new_clients {
            state.insert(i, (VectorCounts::single(best), Membership::Sat));
        }
        assignment.push(best);
    }

    let (mut sat, mut unsat) = (Vec::new(), Vec::new());
    for (i, (_, member)) in state {
        match member {
            Membership::Sat => sat.push(i),
            Membership::Unsat => unsat.push(i),
        }
    }
    GroupCode {
        s,
        messages: group.to_vec(),
        assignment,
        sat,
        unsat,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    pub active_before: usize,
    pub sorting: SortingResult,
    /// Nonempty groups only.
    pub groups: Vec<GroupCode>,
    /// Two rows per entry of `groups`.
    pub rows: Vec<Vec<u32>>,
    pub satisfied: Vec<usize>,
}

impl Round {
    fn report(&self) -> RoundReport {
        RoundReport {
            groups: self
                .groups
                .iter()
                .map(|g| GroupReport {
                    s: g.s,
                    messages: g.messages.clone(),
                    sat: g.sat.len(),
                    eff: g.effective_clients(),
                })
                .collect(),
            satisfied: self.satisfied.len(),
            active: self.active_before,
        }
    }
}

/// One round: sort, group, code each group, and drop the satisfied clients
/// from `active`.
pub fn run_round(instance: &PliableInstance, active: &mut ActiveSet, config: &BinGreedyConfig) -> Round {
    let base = match config.threshold_base {
        ThresholdBase::Active => active.len(),
        ThresholdBase::Original => instance.n(),
    };
    let sorting = sort_and_group_with(instance, active, base);
    let neighbors = instance.neighbor_lists();

    let mut groups = Vec::new();
    let mut rows = Vec::new();
    let mut satisfied = Vec::new();
    for group in sorting.groups.iter().filter(|g| !g.messages.is_empty()) {
        let eff: Vec<Vec<usize>> = group
            .messages
            .iter()
            .map(|&j| sorting.effective_clients_of(j).expect("grouped messages are ordered").to_vec())
            .collect();
        let code = assign_with_neighbors(&neighbors, group.s, &group.messages, &eff);
        rows.extend(code.rows(instance.m()));
        satisfied.extend_from_slice(&code.sat);
        groups.push(code);
    }
    satisfied.sort_unstable();

    let active_before = active.len();
    active.remove_sorted(&satisfied);
    Round {
        active_before,
        sorting,
        groups,
        rows,
        satisfied,
    }
}

/// Full run with every round retained.
#[derive(Clone, Debug)]
pub struct Trace {
    pub matrix: FMatrix,
    pub report: RunReport,
    pub rounds: Vec<Round>,
}

pub fn bingreedy(instance: &PliableInstance) -> Result<(FMatrix, RunReport)> {
    bingreedy_with(instance, &BinGreedyConfig::default())
}

pub fn bingreedy_with(instance: &PliableInstance, config: &BinGreedyConfig) -> Result<(FMatrix, RunReport)> {
    let trace = bingreedy_trace(instance, config)?;
    Ok((trace.matrix, trace.report))
}

pub fn bingreedy_trace(instance: &PliableInstance, config: &BinGreedyConfig) -> Result<Trace> {
    let mut active = instance.active_set();
    let mut matrix = FMatrix::zeros(Field::binary(), 0, instance.m());
    let mut rounds = Vec::new();
    while !active.is_empty() {
        let round = run_round(instance, &mut active, config);
        if round.satisfied.is_empty() {
            return Err(Error::NoProgress {
                round: rounds.len() + 1,
                active: active.len(),
            });
        }
        for row in &round.rows {
            matrix.push_row(row)?;
        }
        rounds.push(round);
    }

    let rows_raw = matrix.rows();
    let rows_pruned = matrix.nonzero_rows();
    if config.prune_zero_rows {
        matrix = matrix.without_zero_rows();
    }
    let report = RunReport {
        rounds: rounds.iter().map(Round::report).collect(),
        rows_raw,
        rows_pruned,
        bins: None,
    };
    Ok(Trace { matrix, report, rounds })
}

/// `2·(floor(log2 n)+1)·(ceil(log_1.5 n)+1)`: two rows per group, at most
/// `floor(log2 n)+1` groups per round, and at most `ceil(log_1.5 n)+1`
/// rounds when each round satisfies a third of the active clients.
pub fn transmission_cap(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    2 * group_count(n) * (round_cap(n))
}

pub fn round_cap(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    ((n as f64).ln() / 1.5f64.ln()).ceil() as usize + 1
}
