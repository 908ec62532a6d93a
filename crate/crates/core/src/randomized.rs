//! Randomized baseline: clients are binned by degree and each bin is served
//! with random binary rows until every client in it is satisfied.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bingreedy::{group_count, group_of};
use crate::decode::decodable_messages;
use crate::error::{Error, Result};
use crate::field::{FMatrix, Field};
use crate::instance::PliableInstance;
use crate::report::{BinReport, RunReport};

pub const DEFAULT_ROW_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StoppingRule {
    /// A row satisfies a client when exactly one of its required messages
    /// has a 1 in that row.
    #[default]
    ExactlyOne,
    /// A client is satisfied once it can decode from the bin's rows so far.
    Cumulative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomizedConfig {
    pub stopping: StoppingRule,
    pub row_cap: usize,
}

impl Default for RandomizedConfig {
    fn default() -> Self {
        Self {
            stopping: StoppingRule::default(),
            row_cap: DEFAULT_ROW_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bin {
    pub s: usize,
    pub clients: Vec<usize>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinPlan {
    pub n: usize,
    pub bins: Vec<Bin>,
}

/// Bins `s = 1..=floor(log2 n)+1`; client `i` lands in bin `s` when
/// `n/2^s < |R_i| <= n/2^(s-1)`, with bit probability `min(2^s/n, 1/2)`.
/// Degrees above `n` (only possible when `m > n`) go to bin 1.
pub fn plan_bins(instance: &PliableInstance) -> BinPlan {
    let n = instance.n();
    let mut bins: Vec<Bin> = (1..=group_count(n))
        .map(|s| Bin {
            s,
            clients: Vec::new(),
            probability: (2f64.powi(s as i32) / n as f64).min(0.5),
        })
        .collect();
    for i in 0..n {
        let d = instance.requirement(i).len();
        if d == 0 {
            continue;
        }
        let s = group_of(d, n).unwrap_or(1);
        bins[s - 1].clients.push(i);
    }
    BinPlan { n, bins }
}

fn stream_for(seed: u64, s: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s as u64);
    rng
}

fn exactly_one(row: &[u32], req: &[usize]) -> bool {
    req.iter().filter(|&&j| row[j] == 1).count() == 1
}

pub fn randomized_code(instance: &PliableInstance, seed: u64) -> Result<(FMatrix, RunReport)> {
    randomized_code_with(instance, seed, &RandomizedConfig::default())
}

pub fn randomized_code_with(
    instance: &PliableInstance,
    seed: u64,
    config: &RandomizedConfig,
) -> Result<(FMatrix, RunReport)> {
    let m = instance.m();
    let plan = plan_bins(instance);
    let mut matrix = FMatrix::zeros(Field::binary(), 0, m);
    let mut bin_reports = Vec::new();

    for bin in &plan.bins {
        let mut rng = stream_for(seed, bin.s);
        let mut pending: Vec<usize> = bin.clients.clone();
        let mut bin_rows = FMatrix::zeros(Field::binary(), 0, m);
        while !pending.is_empty() {
            if bin_rows.rows() == config.row_cap {
                return Err(Error::IterationCap {
                    bin: bin.s,
                    cap: config.row_cap,
                    unsatisfied: pending.len(),
                });
            }
            let row: Vec<u32> = (0..m).map(|_| rng.gen_bool(bin.probability) as u32).collect();
            bin_rows.push_row(&row)?;
            match config.stopping {
                StoppingRule::ExactlyOne => {
                    pending.retain(|&i| !exactly_one(&row, instance.requirement(i)));
                }
                StoppingRule::Cumulative => {
                    let mut still = Vec::with_capacity(pending.len());
                    for &i in &pending {
                        if decodable_messages(&bin_rows, instance, i)?.is_empty() {
                            still.push(i);
                        }
                    }
                    pending = still;
                }
            }
        }
        for r in 0..bin_rows.rows() {
            matrix.push_row(bin_rows.row(r))?;
        }
        bin_reports.push(BinReport {
            s: bin.s,
            clients: bin.clients.len(),
            rows: bin_rows.rows(),
            probability: bin.probability,
        });
    }

    let report = RunReport {
        rounds: Vec::new(),
        rows_raw: matrix.rows(),
        rows_pruned: matrix.nonzero_rows(),
        bins: Some(bin_reports),
    };
    Ok((matrix, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::is_valid_code;

    #[test]
    fn bin_intervals() {
        let inst = PliableInstance::new(
            8,
            vec![(0..8).collect(), vec![0], vec![], vec![], vec![], vec![], vec![], vec![]],
        )
        .unwrap();
        let plan = plan_bins(&inst);
        assert_eq!(plan.bins.len(), 4);
        assert_eq!(plan.bins[0].clients, vec![0]);
        assert_eq!(plan.bins[3].clients, vec![1]);
        assert_eq!(plan.bins[3].probability, 0.5);
    }

    #[test]
    fn same_degree_single_bin() {
        let inst = PliableInstance::new(4, vec![vec![0, 1]; 6]).unwrap();
        let plan = plan_bins(&inst);
        assert_eq!(plan.bins.iter().filter(|b| !b.clients.is_empty()).count(), 1);
    }

    #[test]
    fn hundred_clients_degree_thirty() {
        let mut reqs = vec![(0..30).collect::<Vec<_>>()];
        reqs.extend(std::iter::repeat_n(vec![0], 99));
        let inst = PliableInstance::new(32, reqs).unwrap();
        let plan = plan_bins(&inst);
        assert_eq!(plan.bins[1].s, 2);
        assert_eq!(plan.bins[1].clients, vec![0]);
        assert!((plan.bins[1].probability - 0.04).abs() < 1e-15);
    }

    #[test]
    fn oversized_degree_goes_to_first_bin() {
        let inst = PliableInstance::new(5, vec![vec![0, 1, 2, 3, 4], vec![0]]).unwrap();
        let plan = plan_bins(&inst);
        assert_eq!(plan.bins[0].clients, vec![0]);
    }

    #[test]
    fn single_client_is_deterministic() {
        let inst = PliableInstance::new(1, vec![vec![0]]).unwrap();
        let (a, report) = randomized_code(&inst, 5).unwrap();
        let (b, _) = randomized_code(&inst, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(a.rows() - 1, 0), 1);
        assert!(report.bins.unwrap()[0].rows >= 1);
        assert!(is_valid_code(&a, &inst).unwrap());
    }

    #[test]
    fn random_instances_are_valid_and_reproducible() {
        for seed in 0..5 {
            let inst = PliableInstance::random(60, 20, 0.3, seed).unwrap();
            let (a, report) = randomized_code(&inst, seed + 100).unwrap();
            assert!(is_valid_code(&a, &inst).unwrap());
            assert_eq!(a, randomized_code(&inst, seed + 100).unwrap().0);
            assert_eq!(report.rows_raw, a.rows());
            let total: usize = report.bins.unwrap().iter().map(|b| b.rows).sum();
            assert_eq!(total, a.rows());
        }
    }

    #[test]
    fn cumulative_rule_is_valid() {
        let inst = PliableInstance::random(40, 12, 0.3, 3).unwrap();
        let config = RandomizedConfig { stopping: StoppingRule::Cumulative, ..Default::default() };
        let (a, _) = randomized_code_with(&inst, 9, &config).unwrap();
        assert!(is_valid_code(&a, &inst).unwrap());
    }

    #[test]
    fn row_cap_is_enforced() {
        let inst = PliableInstance::random(50, 16, 0.5, 1).unwrap();
        let config = RandomizedConfig { row_cap: 1, ..Default::default() };
        assert!(matches!(
            randomized_code_with(&inst, 1, &config),
            Err(Error::IterationCap { cap: 1, .. })
        ));
    }
}
