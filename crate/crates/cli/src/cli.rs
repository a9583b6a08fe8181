//! The `ahp` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ahp_core::bench::{run_calibration, run_comparison, scatter_export, write_scatter, SCATTER_ORDERS};
use ahp_core::consistency::{cr_threshold, RandomIndexTable};
use ahp_core::evaluate::{evaluate, EvaluationResponse};
use ahp_core::ml::{read_rows, save_model, train_pipeline, DEFAULT_SPLIT};
use ahp_core::pcm::{Format, MAX_ORDER, MIN_ORDER};
use ahp_core::simulate::{generate_batch_with_pcms, harker_coerce, write_archive, write_dataset};
use ahp_core::{Category, Error, Pcm, Registry, SimConfig};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "ahp", version, about = "Consistency analysis for AHP pairwise comparison matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// Logistic model JSON; defaults to the bundled reference model.
    #[arg(long, env = "AHP_MODEL_PATH")]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyse one PCM given as CSV or JSON.
    Evaluate {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArg,
        /// Print the full response as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Generate a batch of PCMs and write their feature rows as CSV.
    Simulate {
        /// Single order `N` or inclusive range `A-B`.
        #[arg(long, value_parser = parse_orders)]
        order: RangeInclusive<usize>,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// logical, random or coerced.
        #[arg(long, default_value = "logical")]
        kind: String,
        /// Candidate pool of the logical generator.
        #[arg(long, default_value_t = ahp_core::simulate::DEFAULT_CANDIDATE_POOL)]
        pool: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the matrices themselves, one JSON document per line.
        #[arg(long)]
        archive: Option<PathBuf>,
    },
    /// Coerce a PCM towards CR-consistency by replacing its worst entries.
    Coerce {
        file: PathBuf,
        /// Target CR; defaults to the order's usual threshold.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        json: bool,
    },
    /// Fit the logistic model on a simulated dataset.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SPLIT)]
        split: f64,
    },
    /// Ab-initio consistent share per order on a fresh logical batch.
    Calibrate(BatchArgs),
    /// Compare the CR rule and the logistic model against ab-initio labels.
    Benchmark(BatchArgs),
    /// Emit (prop3Rev, max3Rev) for logical and coerced PCMs.
    Scatter {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "AHP_ADDR", default_value = "127.0.0.1:8080")]
        addr: String,
        #[command(flatten)]
        model: ModelArg,
    },
    /// Simulate the Random Index table.
    RiTable {
        #[arg(long, default_value_t = 500_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_parser = parse_orders, default_value = "4-12")]
    pub orders: RangeInclusive<usize>,
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long)]
    pub json: bool,
}

fn parse_orders(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad order {t:?}"));
    let range = match s.split_once('-') {
        Some((a, b)) => parse(a)?..=parse(b)?,
        None => {
            let n = parse(s)?;
            n..=n
        }
    };
    if range.is_empty() || *range.start() < MIN_ORDER || *range.end() > MAX_ORDER {
        return Err(format!("orders must lie within {MIN_ORDER}..={MAX_ORDER}"));
    }
    Ok(range)
}

pub fn exit_code(category: Category) -> u8 {
    match category {
        Category::Validation | Category::UnsupportedOrder => 1,
        Category::Io => 2,
        Category::Numerical => 3,
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[validation]: {first}");
            return ExitCode::from(1);
        }
    };
    let stdout = std::io::stdout();
    match run(cli.command, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let category = e.category();
            eprintln!("error[{}]: {e}", category.as_str());
            ExitCode::from(exit_code(category))
        }
    }
}

fn read_pcm(path: &Path) -> ahp_core::Result<Pcm> {
    let text = std::fs::read_to_string(path)?;
    Pcm::parse(&text, Format::from_path(path))
}

fn create(path: &Path) -> ahp_core::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn run<W: Write>(command: Command, out: &mut W) -> ahp_core::Result<()> {
    match command {
        Command::Evaluate { file, model, json } => {
            let model = crate::resolve_model(model.model.as_deref())?;
            let pcm = read_pcm(&file)?;
            let response = evaluate(&pcm, &model)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&response)?)?;
            } else {
                write!(out, "{}", render_evaluation(&response))?;
            }
        }
        Command::Simulate {
            order,
            count,
            seed,
            kind,
            pool,
            out: path,
            archive,
        } => {
            let registry = Registry::with_model(ahp_core::LogitModel::paper());
            let generator = registry.generator(&kind)?;
            let mut config = SimConfig::new(order, count, seed);
            config.candidate_pool = pool;
            let batch = generate_batch_with_pcms(&config, generator.as_ref())?;
            let rows: Vec<_> = batch.iter().map(|(r, _)| r.clone()).collect();
            let mut w = create(&path)?;
            write_dataset(&rows, &mut w)?;
            w.flush()?;
            if let Some(a) = archive {
                let pcms: Vec<Pcm> = batch.into_iter().map(|(_, p)| p).collect();
                let mut w = create(&a)?;
                write_archive(&pcms, &mut w)?;
                w.flush()?;
            }
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
        }
        Command::Coerce {
            file,
            threshold,
            max_iter,
            json,
        } => {
            let pcm = read_pcm(&file)?;
            let threshold = threshold.unwrap_or_else(|| cr_threshold(pcm.order()));
            let c = harker_coerce(&pcm, threshold, max_iter)?;
            if json {
                let v = json!({
                    "schema": 1,
                    "iterations": c.iterations,
                    "converged": c.converged,
                    "crTrace": c.cr_trace,
                    "matrix": c.pcm.to_document(),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                writeln!(
                    out,
                    "{} after {} step(s); CR {:.4} -> {:.4} (threshold {threshold})",
                    if c.converged { "converged" } else { "not converged" },
                    c.iterations,
                    c.cr_trace[0],
                    c.final_cr()
                )?;
                write!(out, "{}", c.pcm.to_csv())?;
            }
            if !c.converged {
                return Err(Error::NoConvergence { iterations: c.iterations });
            }
        }
        Command::Train { data, seed, out: path, split } => {
            let (rows, labels) = read_rows(File::open(&data)?)?;
            let outcome = train_pipeline(&rows, labels.as_deref(), seed, split)?;
            let mut model = outcome.fit.model.clone();
            model.provenance.rows = Some(outcome.train.len());
            save_model(&model, &path)?;
            let names = ["intercept", "order", "prop3Rev", "max3Rev"];
            writeln!(out, "{:<10} {:>14} {:>12}", "term", "estimate", "std.error")?;
            for ((name, b), se) in names.iter().zip(model.coefficients()).zip(outcome.fit.std_errors) {
                writeln!(out, "{name:<10} {b:>14.5} {se:>12.5}")?;
            }
            writeln!(out, "deviance {:.3} (null {:.3}), {} iterations", outcome.fit.deviance, outcome.fit.null_deviance, outcome.fit.iterations)?;
            writeln!(out, "held-out accuracy {:.4} on {} rows", outcome.holdout_accuracy, outcome.test.len())?;
            writeln!(out, "model written to {}", path.display())?;
        }
        Command::Calibrate(args) => {
            let cal = run_calibration(&SimConfig::new(args.orders, args.count, args.seed))?;
            if args.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&cal)?)?;
            } else {
                writeln!(out, "{:>7} {:>12}", "order", "consistent%")?;
                for (o, f) in &cal.consistent_fraction {
                    writeln!(out, "{o:>7} {:>12.2}", 100.0 * f)?;
                }
                writeln!(out, "{:>7} {:>12.2}", "all", 100.0 * cal.overall)?;
            }
        }
        Command::Benchmark(args) => {
            let model = crate::resolve_model(args.model.model.as_deref())?;
            let registry = Registry::with_model(model);
            let report = run_comparison(&SimConfig::new(args.orders, args.count, args.seed), &registry, &["cr", "pr"])?;
            if args.json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                write!(out, "{}", report.to_text())?;
            }
        }
        Command::Scatter { count, seed, out: path } => {
            let rows = scatter_export(&SCATTER_ORDERS, count, seed)?;
            let mut w = create(&path)?;
            write_scatter(&rows, &mut w)?;
            w.flush()?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
        }
        Command::Serve { addr, model } => {
            let model = crate::resolve_model(model.model.as_deref())?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(crate::server::serve(&addr, model))?;
        }
        Command::RiTable { samples, seed, out: path } => {
            let table = RandomIndexTable::simulate(samples, seed)?;
            std::fs::write(&path, serde_json::to_string_pretty(&table)? + "\n")?;
            for n in MIN_ORDER..=MAX_ORDER {
                writeln!(out, "{n:>3} {:.5}", table.get(n).unwrap_or(f64::NAN))?;
            }
        }
    }
    Ok(())
}

fn label(e: &EvaluationResponse, i: usize) -> String {
    match &e.labels {
        Some(l) => l[i].clone(),
        None => char::from(b'a' + i as u8).to_string(),
    }
}

pub fn render_evaluation(e: &EvaluationResponse) -> String {
    let verdict = |c: bool| if c { "consistent" } else { "inconsistent" };
    let mut s = String::new();
    let _ = writeln!(s, "order          {}", e.order);
    let vec: Vec<String> = e.eigenvector.iter().map(|x| format!("{x:.4}")).collect();
    let _ = writeln!(s, "eigenvector    ({})", vec.join(", "));
    let _ = writeln!(s, "lambdaMax      {:.4}", e.lambda_max);
    let _ = writeln!(s, "CI / RI        {:.5} / {:.4}", e.ci, e.ri);
    let _ = writeln!(s, "CR             {:.4} -> {} (threshold {:.2})", e.cr, verdict(e.cr_consistent), e.cr_threshold);
    let _ = writeln!(s, "Koczkodaj      {:.4}", e.koczkodaj);
    let r = &e.reversal_report;
    let _ = writeln!(
        s,
        "reversals      {} of {} (prop3Rev {:.4}, max3Rev {:.4})",
        r.count, r.max_possible, r.prop3_rev, r.max3_rev
    );
    for ev in &r.events {
        let t: String = ev.triad.iter().map(|&i| label(e, i)).collect::<Vec<_>>().join(",");
        let _ = writeln!(
            s,
            "  ({},{}) in ({t}): full {:.4}, triad {:.4}, magnitude {:.3}{}",
            label(e, ev.pair[0]),
            label(e, ev.pair[1]),
            ev.full_ratio,
            ev.triad_ratio,
            ev.magnitude,
            if ev.magnitude == r.max3_rev { "  *" } else { "" }
        );
    }
    let _ = writeln!(
        s,
        "P(consistent)  {:.6} -> {}",
        e.probability_consistent,
        verdict(e.pr_consistent)
    );
    s
}
