//! Acceptance suite. Runs every criterion in order and prints one
//! `PASS`/`FAIL` line per criterion; exits nonzero if any fails.

use std::time::{Duration, Instant};

use pliable::bench::{run_benchmark, Algorithm, ExperimentConfig, MessageRule};
use pliable::bingreedy::{bingreedy, bingreedy_trace, sort_and_group, transmission_cap, BinGreedyConfig};
use pliable::decode::{decodable_messages, decode_value, is_valid_code};
use pliable::field::{rank, FMatrix, Field};
use pliable::instance::fixtures;
use pliable::oracle::{
    count_pairwise_independent, enumerate_codes, min_field_for_length2, minrank_fitted, optimal_code_length,
    pairwise_independent_exhaustive,
};
use pliable::randomized::randomized_code;
use pliable::PliableInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seven_client_regression() -> Check {
    let inst = fixtures::seven_clients();
    let sorting = sort_and_group(&inst, &inst.active_set());
    ensure(sorting.order == [0, 1, 2], || format!("order {:?}", sorting.order))?;
    ensure(sorting.eff_degree == [4, 2, 1], || format!("d† {:?}", sorting.eff_degree))?;
    // {1,4,5,7} in 1-indexed clients
    ensure(sorting.eff_clients[0] == [0, 3, 4, 6], || format!("N†[1] {:?}", sorting.eff_clients[0]))?;
    let groups: Vec<Vec<usize>> = sorting.groups.iter().map(|g| g.messages.clone()).collect();
    ensure(groups == [vec![0], vec![1], vec![2]], || format!("groups {groups:?}"))?;
    let (a, report) = bingreedy(&inst).map_err(|e| e.to_string())?;
    ensure(report.rounds.len() == 1, || format!("{} rounds", report.rounds.len()))?;
    ensure(report.rows_pruned == 3, || format!("pruned length {}", report.rows_pruned))?;
    ensure(is_valid_code(&a, &inst).unwrap(), || "code invalid".into())?;
    Ok("order (b1,b2,b3), d†=(4,2,1), 1 round, pruned length 3".into())
}

fn random_invertible(field: Field, k: usize, rng: &mut ChaCha8Rng) -> FMatrix {
    loop {
        let data = (0..k * k).map(|_| rng.gen_range(0..field.order())).collect();
        let p = FMatrix::new(field, k, k, data).unwrap();
        if rank(&p) == k {
            return p;
        }
    }
}

fn mat_mul(p: &FMatrix, a: &FMatrix) -> FMatrix {
    let f = a.field();
    let mut data = Vec::with_capacity(p.rows() * a.cols());
    for r in 0..p.rows() {
        for c in 0..a.cols() {
            data.push((0..p.cols()).fold(0, |acc, k| f.add(acc, f.mul(p.get(r, k), a.get(k, c)))));
        }
    }
    FMatrix::new(f, p.rows(), a.cols(), data).unwrap()
}

fn decodability_engine() -> Check {
    let inst = fixtures::seven_clients();
    let dec = decodable_messages(&fixtures::three_row_code(), &inst, 3).unwrap();
    ensure(dec == [0, 1], || format!("client 4 decodes {dec:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut triples = 0;
    let mut decoded = 0;
    while triples < 200 {
        let q = if triples % 2 == 0 { 2 } else { 3 };
        let field = Field::new(q).unwrap();
        let code = if q == 2 {
            let n = rng.gen_range(5..40);
            let m = rng.gen_range(2..12);
            let inst = PliableInstance::random(n, m, 0.3, rng.gen()).unwrap();
            let a = if rng.gen_bool(0.5) {
                bingreedy(&inst).unwrap().0
            } else {
                randomized_code(&inst, rng.gen()).unwrap().0
            };
            (inst, a)
        } else {
            let n = rng.gen_range(1..=6);
            let m = rng.gen_range(1..=4);
            let inst = PliableInstance::random(n, m, 0.5, rng.gen()).unwrap();
            let w = optimal_code_length(&inst, field, m).unwrap().witness;
            let p = random_invertible(field, w.rows(), &mut rng);
            (inst, mat_mul(&p, &w))
        };
        let (inst, a) = code;
        ensure(is_valid_code(&a, &inst).unwrap(), || "generated code invalid".into())?;
        let b: Vec<u32> = (0..inst.m()).map(|_| rng.gen_range(0..q)).collect();
        let x = a.mul_vec(&b).unwrap();
        for i in 0..inst.n() {
            if inst.is_vacuous(i) {
                continue;
            }
            let side: Vec<u32> = inst.side_information(i).iter().map(|&j| b[j]).collect();
            let (j, v) = decode_value(&a, &inst, i, &x, &side).map_err(|e| e.to_string())?;
            ensure(v == b[j], || format!("client {i} decoded b{j}={v}, truth {}", b[j]))?;
            decoded += 1;
        }
        triples += 1;
    }
    Ok(format!("client 4 decodes b1,b2; {triples} triples, {decoded} client decodes correct"))
}

fn random_suite() -> Vec<PliableInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let ps = [0.1, 0.3, 0.5];
    (0..120)
        .map(|k| {
            let n = rng.gen_range(50..=500);
            let m = MessageRule::Power(0.75).messages(n);
            PliableInstance::random(n, m, ps[k % 3], rng.gen()).unwrap()
        })
        .collect()
}

fn one_third_per_group(suite: &[PliableInstance]) -> Check {
    let mut groups = 0;
    let mut worst = f64::INFINITY;
    for (k, inst) in suite.iter().enumerate() {
        let trace = bingreedy_trace(inst, &BinGreedyConfig::default()).map_err(|e| e.to_string())?;
        for round in &trace.report.rounds {
            ensure(3 * round.satisfied >= round.active, || {
                format!("instance {k}: round satisfied {} of {}", round.satisfied, round.active)
            })?;
            for g in &round.groups {
                ensure(3 * g.sat >= g.eff, || format!("instance {k}: group s={} sat {} of {}", g.s, g.sat, g.eff))?;
                worst = worst.min(g.sat as f64 / g.eff as f64);
                groups += 1;
            }
        }
    }
    Ok(format!("{} instances, {groups} groups, min group fraction {worst:.3}", suite.len()))
}

fn transmission_cap_holds(suite: &[PliableInstance]) -> Check {
    let mut tightest = 0.0f64;
    for (k, inst) in suite.iter().enumerate() {
        let (_, report) = bingreedy(inst).map_err(|e| e.to_string())?;
        let cap = transmission_cap(inst.n());
        ensure(report.rows_raw <= cap, || format!("instance {k}: {} rows > cap {cap}", report.rows_raw))?;
        tightest = tightest.max(report.rows_raw as f64 / cap as f64);
    }
    Ok(format!("max raw/cap {tightest:.3}"))
}

fn minrank_matches_optimal() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut agreed = 0;
    for k in 0..60 {
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=6);
        let q = if k % 2 == 0 { 2 } else { 3 };
        let p = rng.gen_range(0.2..0.8);
        let inst = PliableInstance::random(n, m, p, rng.gen()).unwrap();
        let field = Field::new(q).unwrap();
        let opt = optimal_code_length(&inst, field, m).map_err(|e| e.to_string())?;
        let mr = minrank_fitted(&inst, field, m).map_err(|e| e.to_string())?;
        ensure(opt.k == mr.r, || format!("instance {k}: optimal {} vs minrank {}", opt.k, mr.r))?;
        ensure(is_valid_code(&opt.witness, &inst).unwrap(), || "witness invalid".into())?;
        agreed += 1;
    }
    let inst = PliableInstance::all_pairs(4).unwrap();
    let f3 = Field::new(3).unwrap();
    let opt = optimal_code_length(&inst, f3, 4).map_err(|e| e.to_string())?.k;
    let mr = minrank_fitted(&inst, f3, 4).map_err(|e| e.to_string())?.r;
    ensure(opt == 2 && mr == 2, || format!("all-pairs(4) over F_3: optimal {opt}, minrank {mr}"))?;
    Ok(format!("{agreed} random instances agree; all-pairs(4)/F_3 both 2"))
}

fn field_size() -> Check {
    let inst = PliableInstance::all_pairs(4).unwrap();
    let census = enumerate_codes(&inst, Field::binary(), 2).map_err(|e| e.to_string())?;
    ensure(census.enumerated == 256 && census.valid == 0, || format!("binary census {census:?}"))?;
    let ternary = optimal_code_length(&inst, Field::new(3).unwrap(), 2).map_err(|e| e.to_string())?;
    ensure(ternary.k == 2, || format!("ternary length {}", ternary.k))?;
    ensure(is_valid_code(&fixtures::ternary_all_pairs_code(), &inst).unwrap(), || {
        "explicit F_3 code failed".into()
    })?;
    let q4 = min_field_for_length2(4, &[2, 3, 5, 7]).map_err(|e| e.to_string())?;
    let q6 = min_field_for_length2(6, &[2, 3, 5, 7]).map_err(|e| e.to_string())?;
    ensure(q4 == Some(3) && q6 == Some(5), || format!("min fields {q4:?} {q6:?}"))?;
    for q in [2u32, 3, 5] {
        let count = count_pairwise_independent(q).unwrap();
        let brute = pairwise_independent_exhaustive(Field::new(q).unwrap()).len();
        ensure(count == 2 + (q as usize - 1) && brute == count, || format!("q={q}: {count} vs {brute}"))?;
    }
    Ok("no binary length-2 code in 256; F_3 code verifies; m=4→3, m=6→5; 3,4,6 independent".into())
}

fn trend() -> Check {
    let config = ExperimentConfig {
        ns: vec![100, 316, 1000],
        m_rule: MessageRule::Power(0.75),
        p: 0.3,
        instances: 20,
        base_seed: 1,
        algorithms: vec![Algorithm::BinGreedy, Algorithm::Randomized],
        timing: false,
    };
    let result = run_benchmark(&config).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for &n in &config.ns {
        let g = result.summary_for(n, Algorithm::BinGreedy).unwrap();
        let r = result.summary_for(n, Algorithm::Randomized).unwrap();
        let ratio = g.mean_pruned / r.mean_pruned;
        notes.push(format!(
            "n={n}: greedy {:.1} (w/m {:.2}) vs random {:.1} (w/m {:.2}), ratio {ratio:.3}",
            g.mean_pruned, g.worst_over_mean, r.mean_pruned, r.worst_over_mean
        ));
        if ratio > 0.90 {
            failures.push(format!("n={n}: mean ratio {ratio:.3} > 0.90"));
        }
        if g.worst_over_mean >= r.worst_over_mean {
            failures.push(format!(
                "n={n}: greedy worst/mean {:.3} >= random {:.3}",
                g.worst_over_mean, r.worst_over_mean
            ));
        }
    }
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{} [{}]", failures.join("; "), notes.join("; ")))
    }
}

fn determinism() -> Check {
    let inst = PliableInstance::random(300, 72, 0.3, 5).unwrap();
    let a = serde_json::to_string(&bingreedy(&inst).unwrap()).unwrap();
    let b = serde_json::to_string(&bingreedy(&inst).unwrap()).unwrap();
    ensure(a == b, || "bingreedy output differs".into())?;

    let small = PliableInstance::random(6, 4, 0.5, 11).unwrap();
    let f3 = Field::new(3).unwrap();
    let o1 = serde_json::to_string(&optimal_code_length(&small, f3, 4).unwrap()).unwrap();
    let o2 = serde_json::to_string(&optimal_code_length(&small, f3, 4).unwrap()).unwrap();
    let m1 = serde_json::to_string(&minrank_fitted(&small, f3, 4).unwrap()).unwrap();
    let m2 = serde_json::to_string(&minrank_fitted(&small, f3, 4).unwrap()).unwrap();
    ensure(o1 == o2 && m1 == m2, || "oracle output differs".into())?;

    let r1 = serde_json::to_string(&randomized_code(&inst, 9).unwrap()).unwrap();
    let r2 = serde_json::to_string(&randomized_code(&inst, 9).unwrap()).unwrap();
    ensure(r1 == r2, || "seeded randomized output differs".into())?;

    let config = ExperimentConfig {
        ns: vec![100, 316],
        instances: 5,
        timing: false,
        ..Default::default()
    };
    let c1 = run_benchmark(&config).unwrap().csv_string().unwrap();
    let c2 = run_benchmark(&config).unwrap().csv_string().unwrap();
    ensure(c1 == c2, || "benchmark CSV differs".into())?;
    Ok(format!("bingreedy, oracles, randomized(seeded) and a {}-byte CSV identical", c1.len()))
}

type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Check + 'a>);

fn main() {
    let suite = random_suite();
    let criteria: Vec<Criterion> = vec![
        ("1 seven-client regression", Duration::from_secs(1), Box::new(seven_client_regression)),
        ("2 decodability engine", Duration::from_secs(10), Box::new(decodability_engine)),
        ("3 per-group one-third property", Duration::from_secs(120), Box::new(|| one_third_per_group(&suite))),
        ("4 transmission cap", Duration::from_secs(120), Box::new(|| transmission_cap_holds(&suite))),
        ("5 minrank equals optimal length", Duration::from_secs(120), Box::new(minrank_matches_optimal)),
        ("6 field-size suite", Duration::from_secs(60), Box::new(field_size)),
        ("7 comparison trend", Duration::from_secs(900), Box::new(trend)),
        ("8 determinism", Duration::from_secs(600), Box::new(determinism)),
    ];

    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > limit => Err(format!("took {elapsed:.2?} > {limit:?} ({msg})")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name} [{elapsed:.2?}]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} [{elapsed:.2?}]: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
