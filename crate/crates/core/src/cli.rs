//! The `oncodss` command line.

use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use crate::casebase::{self, CaseBase, PatientRecord, Sex};
use crate::eval::{self, CvConfig};
use crate::ontology::Ontology;
use crate::service::{self, Config, ConsultAnswer, ConsultRequest, Knowledge};

#[derive(Debug, Parser)]
#[command(name = "oncodss", version, about = "Ontology-backed case-based reasoning for oncology consults")]
pub struct Cli {
    /// Service configuration (TOML). Defaults to the bundled fixtures.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Use this OBO file instead of the configured ontology.
    #[arg(long, global = true)]
    pub ontology: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate an OBO ontology, then print a summary.
    LoadOntology { path: PathBuf },
    /// Validate cases from a JSONL file and add them to the case store.
    Ingest {
        cases: PathBuf,
        /// Store to write instead of the configured one.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Run one consult.
    Query {
        #[arg(long, default_value = "")]
        text: String,
        #[arg(long)]
        age: u32,
        #[arg(long)]
        sex: Sex,
        #[arg(long)]
        stage: Option<String>,
        #[arg(short = 'k')]
        k: Option<usize>,
        /// Comma-separated clinical findings.
        #[arg(long, value_delimiter = ',')]
        findings: Vec<String>,
        /// Print the full answer as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Cross-validate the nearest-neighbour classifier on a labeled dataset.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        /// Exact-id diagnosis matching and no keyword expansion.
        #[arg(long)]
        no_ontology: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Neighbours consulted per test case.
        #[arg(short = 'k', default_value_t = 5)]
        k: usize,
        /// Also write ROC points to this CSV file.
        #[arg(long)]
        roc_csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Print the effective configuration and similarity weights.
    Explain,
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

fn config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::bundled(),
    };
    if let Some(o) = &cli.ontology {
        cfg.ontology_path = o.clone();
    }
    Ok(cfg)
}

fn knowledge(cfg: &Config, bundled: bool) -> Result<Knowledge> {
    let mut k = Knowledge::load(cfg)?;
    if bundled {
        k.case_store_path = None;
    }
    Ok(k)
}

/// Human-readable consult answer.
pub fn render_answer(a: &ConsultAnswer) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Diagnoses:");
    if a.diagnoses.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for d in &a.diagnoses {
        let _ = writeln!(out, "  {} {}", d.code, d.label);
    }
    let _ = writeln!(out, "Therapy:");
    if a.therapy.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for t in &a.therapy {
        let _ = writeln!(out, "  {}", t.render());
    }
    let p = &a.prognosis;
    let _ = write!(out, "Prognosis: {} precedents", p.n_cases);
    if let Some(m) = p.median_survival_months {
        let _ = write!(out, ", median survival {m} months");
    }
    if let Some((lo, hi)) = p.range_survival_months {
        let _ = write!(out, " (range {lo}-{hi})");
    }
    out.push('\n');
    let _ = writeln!(out, "Similar cases:");
    for (rank, s) in a.similar_cases.iter().enumerate() {
        let r = &s.case.result;
        let _ = writeln!(
            out,
            "  {:>2}. {:<12} {:.4}  {:?}{}",
            rank + 1,
            s.ranked.case_id,
            s.ranked.score,
            r.outcome,
            r.survival_months
                .map(|m| format!(", {m} months"))
                .unwrap_or_default()
        );
    }
    let states: Vec<String> = a.supervisor_trace.iter().map(|e| e.state.to_string()).collect();
    let _ = writeln!(out, "Trace: {}", states.join(" -> "));
    out
}

fn run(cli: Cli) -> Result<()> {
    let cfg = config(&cli)?;
    let bundled = cli.config.is_none();
    match cli.command {
        Command::LoadOntology { path } => {
            let o = Ontology::load(&path).with_context(|| format!("loading {}", path.display()))?;
            let max_depth = o.terms().filter_map(|t| o.depth(&t.id).ok()).max().unwrap_or(0);
            println!("terms\t{}", o.len());
            println!("roots\t{}", o.roots().iter().cloned().collect::<Vec<_>>().join(","));
            println!("max_depth\t{max_depth}");
            println!("triples\t{}", o.triples().len());
        }
        Command::Ingest { cases, store } => {
            let o = Ontology::load(&cfg.ontology_path)?;
            let target = match store {
                Some(p) => p,
                None if bundled => bail!("refusing to write into the bundled fixtures; pass --store or --config"),
                None => cfg.case_store_path.clone(),
            };
            let mut cb = if target.exists() {
                casebase::load_checked(&target, &o)?
            } else {
                CaseBase::new()
            };
            let text = std::fs::read_to_string(&cases)
                .with_context(|| format!("reading {}", cases.display()))?;
            let parsed = casebase::parse_jsonl(&text)?;
            let before = cb.len();
            for (line, case) in parsed {
                cb.add_case(case, Some(&o))
                    .with_context(|| format!("{}:{line}", cases.display()))?;
            }
            casebase::save(&cb, &target)?;
            println!(
                "ingested {} cases into {} ({} total, revision {})",
                cb.len() - before,
                target.display(),
                cb.len(),
                cb.revision()
            );
        }
        Command::Query {
            text,
            age,
            sex,
            stage,
            k,
            findings,
            json,
        } => {
            let know = knowledge(&cfg, bundled)?;
            let req = ConsultRequest {
                text,
                patient: PatientRecord::new(age, sex).with_findings(findings),
                stage,
                k,
            };
            let answer = service::consult(&req, &know)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&answer)?);
            } else {
                print!("{}", render_answer(&answer));
            }
        }
        Command::Evaluate {
            dataset,
            no_ontology,
            seed,
            folds,
            k,
            roc_csv,
            json,
        } => {
            let o = Ontology::load(&cfg.ontology_path)?;
            let data = eval::load_labeled(&dataset)?;
            let cv = CvConfig {
                folds,
                k_neighbors: k,
                weights: cfg.weights,
                use_ontology: !no_ontology,
                seed,
            };
            let out = service::evaluate(&data, &cv, &o)?;
            if let Some(path) = roc_csv {
                std::fs::write(&path, eval::roc_csv(&out.roc))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                print!("{}", out.table);
                println!("AUC\t{:.4}", out.roc.auc);
            }
        }
        Command::Explain => {
            let [d, kw, a, s] = cfg.weights.as_array();
            println!("ontology_path\t{}", cfg.ontology_path.display());
            println!("case_store_path\t{}", cfg.case_store_path.display());
            println!("rules_dir\t{}", cfg.rules_dir.display());
            println!("k_default\t{}", cfg.k_default);
            println!("weights.diagnosis\t{d}");
            println!("weights.keywords\t{kw}");
            println!("weights.age\t{a}");
            println!("weights.stage\t{s}");
        }
        Command::Serve { port, host } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| "info".into()),
                )
                .init();
            let know = Arc::new(knowledge(&cfg, bundled)?);
            let addr = SocketAddr::new(host, port.unwrap_or(cfg.port));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(service::http::serve(know, addr, cfg.static_assets_dir.as_deref()))?;
        }
    }
    Ok(())
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
