//! Experiment harness comparing the encoders on random instances.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bingreedy::bingreedy;
use crate::decode::is_valid_code;
use crate::error::{Error, Result};
use crate::field::FMatrix;
use crate::instance::PliableInstance;
use crate::randomized::randomized_code;
use crate::report::RunReport;

pub const CSV_HEADER: &str = "n,m,p,seed,algorithm,code_length_raw,code_length_pruned,rounds,satisfied,runtime_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    BinGreedy,
    Randomized,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::BinGreedy => "bingreedy",
            Algorithm::Randomized => "randomized",
        }
    }

    pub fn run(self, instance: &PliableInstance, seed: u64) -> Result<(FMatrix, RunReport)> {
        match self {
            Algorithm::BinGreedy => bingreedy(instance),
            Algorithm::Randomized => randomized_code(instance, encoder_seed(seed)),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bingreedy" => Ok(Algorithm::BinGreedy),
            "randomized" => Ok(Algorithm::Randomized),
            other => Err(Error::InvalidParameter(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Seed handed to the randomized encoder, kept apart from the instance
/// generator's stream.
pub fn encoder_seed(instance_seed: u64) -> u64 {
    instance_seed ^ 0x9e37_79b9_7f4a_7c15
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MessageRule {
    Fixed(usize),
    /// `m = round(n^e)`
    Power(f64),
}

impl MessageRule {
    pub fn messages(&self, n: usize) -> usize {
        match *self {
            MessageRule::Fixed(m) => m,
            MessageRule::Power(e) => ((n as f64).powf(e).round() as usize).max(1),
        }
    }
}

impl FromStr for MessageRule {
    type Err = Error;

    /// `fixed:32` or `power:0.75`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad m rule {s:?}; expected fixed:M or power:E"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "fixed" => Ok(MessageRule::Fixed(value.parse().map_err(|_| bad())?)),
            "power" => Ok(MessageRule::Power(value.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub ns: Vec<usize>,
    pub m_rule: MessageRule,
    pub p: f64,
    pub instances: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// Record wall-clock time; when off `runtime_ms` is written as 0 so
    /// repeated runs give identical files.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            ns: vec![100, 316, 1000],
            m_rule: MessageRule::Power(0.75),
            p: 0.3,
            instances: 20,
            base_seed: 1,
            algorithms: vec![Algorithm::BinGreedy, Algorithm::Randomized],
            timing: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.ns.contains(&0) {
            return Err(Error::InvalidParameter("every n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p = {} not in [0, 1]", self.p)));
        }
        if self.instances == 0 {
            return Err(Error::InvalidParameter("instances must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidParameter("no algorithms selected".into()));
        }
        if self.ns.iter().any(|&n| self.m_rule.messages(n) == 0) {
            return Err(Error::InvalidParameter("m rule yields m = 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub seed: u64,
    pub algorithm: String,
    pub code_length_raw: usize,
    pub code_length_pruned: usize,
    pub rounds: usize,
    pub satisfied: usize,
    pub runtime_ms: f64,
    /// Fingerprint of the instance the row was computed on.
    #[serde(skip)]
    pub instance_hash: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub algorithm: String,
    pub instances: usize,
    pub mean_pruned: f64,
    pub max_pruned: usize,
    pub worst_over_mean: f64,
    pub mean_raw: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkResult {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

impl BenchmarkResult {
    pub fn summary_for(&self, n: usize, algorithm: Algorithm) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|s| s.n == n && s.algorithm == algorithm.name())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows, out)
    }

    pub fn write_summary<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.summary, out)
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn instance_hash(instance: &PliableInstance) -> u64 {
    let mut h = DefaultHasher::new();
    instance.hash(&mut h);
    h.finish()
}

fn run_point(config: &ExperimentConfig, n: usize, seed: u64) -> Result<Vec<ResultRow>> {
    let m = config.m_rule.messages(n);
    let instance = PliableInstance::random(n, m, config.p, seed)?;
    let hash = instance_hash(&instance);
    let mut rows = Vec::with_capacity(config.algorithms.len());
    for &alg in &config.algorithms {
        let start = Instant::now();
        let (matrix, report) = alg.run(&instance, seed)?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        if !is_valid_code(&matrix, &instance)? {
            return Err(Error::InvalidCode(format!("{alg} on n={n} seed={seed}")));
        }
        rows.push(ResultRow {
            n,
            m,
            p: config.p,
            seed,
            algorithm: alg.name().to_string(),
            code_length_raw: report.rows_raw,
            code_length_pruned: report.rows_pruned,
            rounds: report.round_count(),
            satisfied: instance.non_vacuous(),
            runtime_ms: if config.timing { elapsed } else { 0.0 },
            instance_hash: hash,
        });
    }
    Ok(rows)
}

/// Runs every `(n, seed)` point, feeding the same instance to each
/// algorithm. Points run in parallel; rows come back sorted by
/// `(n, seed, algorithm)`.
pub fn run_benchmark(config: &ExperimentConfig) -> Result<BenchmarkResult> {
    config.validate()?;
    let points: Vec<(usize, u64)> = config
        .ns
        .iter()
        .flat_map(|&n| (0..config.instances as u64).map(move |k| (n, config.base_seed.wrapping_add(k))))
        .collect();
    let mut rows: Vec<ResultRow> = points
        .par_iter()
        .map(|&(n, seed)| run_point(config, n, seed))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| (a.n, a.seed, &a.algorithm).cmp(&(b.n, b.seed, &b.algorithm)));
    let summary = summarize(&rows);
    Ok(BenchmarkResult { rows, summary })
}

/// Mean and worst pruned code length per `(n, algorithm)`.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut buckets: BTreeMap<(usize, &str), Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        buckets.entry((row.n, row.algorithm.as_str())).or_default().push(row);
    }
    buckets
        .into_iter()
        .map(|((n, alg), group)| {
            let count = group.len() as f64;
            let mean_pruned = group.iter().map(|r| r.code_length_pruned as f64).sum::<f64>() / count;
            let mean_raw = group.iter().map(|r| r.code_length_raw as f64).sum::<f64>() / count;
            let max_pruned = group.iter().map(|r| r.code_length_pruned).max().unwrap_or(0);
            SummaryRow {
                n,
                algorithm: alg.to_string(),
                instances: group.len(),
                mean_pruned,
                max_pruned,
                worst_over_mean: if mean_pruned > 0.0 { max_pruned as f64 / mean_pruned } else { 0.0 },
                mean_raw,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(instances: usize) -> ExperimentConfig {
        ExperimentConfig {
            ns: vec![40],
            instances,
            timing: false,
            ..Default::default()
        }
    }

    #[test]
    fn message_rules() {
        assert_eq!(MessageRule::Power(0.75).messages(100), 32);
        assert_eq!(MessageRule::Power(0.75).messages(316), 75);
        assert_eq!(MessageRule::Power(0.75).messages(1000), 178);
        assert_eq!(MessageRule::Fixed(7).messages(1000), 7);
        assert_eq!("fixed:32".parse::<MessageRule>().unwrap(), MessageRule::Fixed(32));
        assert_eq!("power:0.5".parse::<MessageRule>().unwrap(), MessageRule::Power(0.5));
        assert!("linear:1".parse::<MessageRule>().is_err());
    }

    #[test]
    fn single_instance_csv() {
        let result = run_benchmark(&small(1)).unwrap();
        assert_eq!(result.rows.len(), 2);
        let csv = result.csv_string().unwrap();
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = run_benchmark(&small(4)).unwrap().csv_string().unwrap();
        let b = run_benchmark(&small(4)).unwrap().csv_string().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn algorithms_share_instances() {
        let result = run_benchmark(&small(5)).unwrap();
        for pair in result.rows.chunks(2) {
            assert_eq!(pair[0].seed, pair[1].seed);
            assert_eq!(pair[0].instance_hash, pair[1].instance_hash);
            assert!(pair[0].code_length_pruned <= pair[0].code_length_raw);
        }
        let s = result.summary_for(40, Algorithm::BinGreedy).unwrap();
        assert_eq!(s.instances, 5);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = small(1);
        c.p = 1.5;
        assert!(run_benchmark(&c).is_err());
        let mut c = small(1);
        c.instances = 0;
        assert!(run_benchmark(&c).is_err());
        let mut c = small(1);
        c.ns = vec![0];
        assert!(run_benchmark(&c).is_err());
    }
}
