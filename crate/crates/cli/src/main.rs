use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pliable::bench::{run_benchmark, Algorithm, ExperimentConfig, MessageRule};
use pliable::bingreedy::{bingreedy_with, BinGreedyConfig, ThresholdBase};
use pliable::decode::{is_valid_code, satisfaction_report};
use pliable::instance::fixtures;
use pliable::oracle::{
    count_pairwise_independent, enumerate_codes, min_field_for_length2, minrank_fitted, optimal_code_length,
    pairwise_independent_exhaustive,
};
use pliable::randomized::{randomized_code_with, RandomizedConfig, StoppingRule};
use pliable::{FMatrix, Field, PliableInstance};

#[derive(Parser)]
#[command(name = "pliable", version, about = "Pliable index coding encoders, verifier and oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance file.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::Random)]
        kind: Kind,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        m: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, env = "PLIABLE_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a code for an instance file.
    Encode {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Encoder::Bingreedy)]
        alg: Encoder,
        #[arg(long, env = "PLIABLE_SEED", default_value_t = 1)]
        seed: u64,
        /// Field order for the optimal search.
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Longest code the optimal search tries.
        #[arg(long, default_value_t = 4)]
        max_k: usize,
        /// Drop all-zero rows from the written matrix.
        #[arg(long)]
        prune: bool,
        /// BinGreedy thresholds from the original client count.
        #[arg(long)]
        original_n: bool,
        /// Randomized stopping on cumulative decodability.
        #[arg(long)]
        cumulative: bool,
        #[arg(long)]
        matrix_out: Option<PathBuf>,
        #[arg(long)]
        report_out: Option<PathBuf>,
        #[arg(long)]
        no_timing: bool,
    },
    /// Check a matrix file against an instance file.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Minimum rank over fitted matrices.
    Minrank {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 4)]
        max_r: usize,
        #[arg(long)]
        no_timing: bool,
    },
    /// Compare encoders on random instances and write a CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![100usize, 316, 1000])]
        n: Vec<usize>,
        /// `power:E` for m = round(n^E) or `fixed:M`.
        #[arg(long, default_value = "power:0.75")]
        m_rule: String,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, env = "PLIABLE_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = vec!["bingreedy".to_string(), "randomized".to_string()])]
        alg: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Summary CSV path; printed to stdout when omitted.
        #[arg(long)]
        summary_out: Option<PathBuf>,
        #[arg(long)]
        no_timing: bool,
    },
    /// Run the field-size counterexample checks.
    Counterexample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Random,
    AllPairs,
    /// The 3-message, 7-client example.
    Fixture,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Encoder {
    Bingreedy,
    Randomized,
    Optimal,
}

fn read_instance(path: &Path) -> Result<PliableInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading instance file {}", path.display()))?;
    let parsed = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        PliableInstance::from_text(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("parsing instance file {}", path.display()))
}

fn read_matrix(path: &Path) -> Result<FMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading matrix file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing matrix file {}", path.display()))
}

fn emit(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn pretty(value: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn elapsed_ms(start: Instant, timing: bool) -> f64 {
    if timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

fn counterexample() -> Result<bool> {
    let mut all = true;
    let mut line = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        all &= ok;
    };
    let inst = PliableInstance::all_pairs(4)?;
    let census = enumerate_codes(&inst, Field::binary(), 2)?;
    line(
        &format!("all-pairs(4): {} of {} binary 2-row matrices are codes", census.valid, census.enumerated),
        census.valid == 0 && census.enumerated == 256,
    );
    let f3 = Field::new(3)?;
    line("all-pairs(4): optimal length over F_3 is 2", optimal_code_length(&inst, f3, 2)?.k == 2);
    line("all-pairs(4): optimal length over F_2 is 3", optimal_code_length(&inst, Field::binary(), 4)?.k == 3);
    line(
        "all-pairs(4): (b1+b2+b4, b2+b3+2b4) over F_3 is valid",
        is_valid_code(&fixtures::ternary_all_pairs_code(), &inst)?,
    );
    line("all-pairs(4): minrank over F_3 is 2", minrank_fitted(&inst, f3, 4)?.r == 2);
    let primes = [2, 3, 5, 7];
    for (m, want) in [(3, 2), (4, 3), (6, 5)] {
        let got = min_field_for_length2(m, &primes)?;
        line(&format!("all-pairs({m}): smallest prime field with a length-2 code is {got:?}"), got == Some(want));
    }
    for q in [2, 3, 5] {
        let count = count_pairwise_independent(q)?;
        let brute = pairwise_independent_exhaustive(Field::new(q)?).len();
        line(
            &format!("F_{q}^2: {count} pairwise independent vectors (exhaustive {brute})"),
            count == brute && count == q as usize + 1,
        );
    }
    Ok(all)
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { kind, n, m, p, seed, format, out } => {
            let inst = match kind {
                Kind::Random => PliableInstance::random(n, m, p, seed).context("invalid --n/--m/--p")?,
                Kind::AllPairs => PliableInstance::all_pairs(m).context("invalid --m")?,
                Kind::Fixture => fixtures::seven_clients(),
            };
            let body = match format {
                Format::Json => serde_json::to_string(&inst)? + "\n",
                Format::Text => inst.to_text(),
            };
            emit(out.as_deref(), &body)?;
        }
        Command::Encode {
            instance,
            alg,
            seed,
            q,
            max_k,
            prune,
            original_n,
            cumulative,
            matrix_out,
            report_out,
            no_timing,
        } => {
            let inst = read_instance(&instance)?;
            let start = Instant::now();
            let (matrix, report) = match alg {
                Encoder::Bingreedy => {
                    let config = BinGreedyConfig {
                        threshold_base: if original_n { ThresholdBase::Original } else { ThresholdBase::Active },
                        prune_zero_rows: prune,
                    };
                    let (a, report) = bingreedy_with(&inst, &config)?;
                    (a, serde_json::to_value(report)?)
                }
                Encoder::Randomized => {
                    let config = RandomizedConfig {
                        stopping: if cumulative { StoppingRule::Cumulative } else { StoppingRule::ExactlyOne },
                        ..Default::default()
                    };
                    let (a, report) = randomized_code_with(&inst, seed, &config)?;
                    let a = if prune { a.without_zero_rows() } else { a };
                    (a, serde_json::to_value(report)?)
                }
                Encoder::Optimal => {
                    let field = Field::new(q).context("invalid --q")?;
                    let code = optimal_code_length(&inst, field, max_k).context("optimal search (--max-k)")?;
                    let mut value = serde_json::to_value(&code)?;
                    value["elapsed_ms"] = json!(elapsed_ms(start, !no_timing));
                    (code.witness, value)
                }
            };
            if !is_valid_code(&matrix, &inst)? {
                bail!("encoder produced an invalid code for {}", instance.display());
            }
            if let Some(path) = &matrix_out {
                emit(Some(path), &(serde_json::to_string(&matrix)? + "\n"))?;
            }
            emit(report_out.as_deref(), &pretty(&report)?)?;
        }
        Command::Verify { instance, matrix, report_out } => {
            let inst = read_instance(&instance)?;
            let a = read_matrix(&matrix)?;
            let report = satisfaction_report(&a, &inst)
                .with_context(|| format!("{} does not fit {}", matrix.display(), instance.display()))?;
            let valid = is_valid_code(&a, &inst)?;
            emit(report_out.as_deref(), &pretty(&json!({ "valid": valid, "clients": report }))?)?;
            if !valid {
                bail!(
                    "verification failed: {} unsatisfied clients ({})",
                    report.unsatisfied().len(),
                    matrix.display()
                );
            }
        }
        Command::Minrank { instance, q, max_r, no_timing } => {
            let inst = read_instance(&instance)?;
            let field = Field::new(q).context("invalid --q")?;
            let start = Instant::now();
            let mr = minrank_fitted(&inst, field, max_r).context("minrank search (--max-r)")?;
            let mut value = serde_json::to_value(&mr)?;
            value["elapsed_ms"] = json!(elapsed_ms(start, !no_timing));
            print!("{}", pretty(&value)?);
        }
        Command::Bench { n, m_rule, p, instances, seed, alg, out, summary_out, no_timing } => {
            let algorithms = alg
                .iter()
                .map(|a| a.parse::<Algorithm>())
                .collect::<pliable::Result<Vec<_>>>()
                .context("invalid --alg")?;
            let config = ExperimentConfig {
                ns: n,
                m_rule: m_rule.parse::<MessageRule>().context("invalid --m-rule")?,
                p,
                instances,
                base_seed: seed,
                algorithms,
                timing: !no_timing,
            };
            config.validate().context("invalid benchmark flags")?;
            let result = run_benchmark(&config)?;
            let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            result.write_csv(file)?;
            match summary_out {
                Some(path) => {
                    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    result.write_summary(file)?;
                }
                None => result.write_summary(std::io::stdout())?,
            }
        }
        Command::Counterexample => {
            if !counterexample()? {
                bail!("counterexample suite failed");
            }
        }
    }
    Ok(())
}
