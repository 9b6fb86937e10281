use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use valq::suite::{run_suites, Suite, SuiteConfig, VerifyReport};
use valq::table::{bounds_table, sig12};
use valq::valq::{exact_valq_anchored, ratio};
use valq::witness::{build_witness, witness_ratio_closed_form};
use valq::{Error, FamilySpec, QueryFamily, WitnessKind};

const DEFAULT_TOL: f64 = 1e-9;
const DEFAULT_EXACT_TOL: f64 = 1e-4;

#[derive(Parser)]
#[command(name = "valq")]
#[command(about = "Substring-query adversary bounds for parity")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessArg {
    Hamming,
    Block,
    Prefix,
    TwoPoint,
    Dictator,
}

#[derive(Subcommand)]
enum Command {
    /// Witness ratios, upper bounds and exact values for the standard families
    Table {
        #[arg(long)]
        n: usize,
        /// Relative tolerance of the exact solver
        #[arg(long, default_value_t = DEFAULT_EXACT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run the identity suites and report pass/fail
    Verify {
        /// Suite to run; all suites when omitted
        suite: Option<String>,
        #[arg(long = "suite", conflicts_with = "suite")]
        suite_flag: Option<String>,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Build a witness function and report its ratio on a family
    Witness {
        #[arg(value_enum)]
        kind: WitnessArg,
        /// Number of variables; defaults to m*k for block witnesses
        #[arg(long)]
        n: Option<usize>,
        /// Number of blocks
        #[arg(long)]
        m: Option<usize>,
        /// Block width
        #[arg(long)]
        k: Option<usize>,
        /// Family spec: bounded:<k>, contiguous[:wrap], prefixes, full, singletons, custom:<path>
        #[arg(long)]
        family: Option<String>,
        /// Where to write the function JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Solve the val_Q program exactly for small n
    Exact {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = DEFAULT_EXACT_TOL)]
        tol: f64,
        /// Index of the input whose value is maximized
        #[arg(long, default_value_t = 0)]
        anchor: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(msg) => Failure::Usage(msg),
            e => Failure::Engine(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Engine(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Engine(e.into())
    }
}

fn to_json(value: &impl Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn positive(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("tol must be positive, got {tol}")))
    }
}

fn verify_csv(report: &VerifyReport) -> String {
    let mut out = String::from("suite,n,passed,checks,failure\n");
    for s in &report.suites {
        let failure = s.failure.as_deref().unwrap_or("").replace('"', "\"\"");
        out.push_str(&format!(
            "{},{},{},{},\"{failure}\"\n",
            s.suite, s.n, s.passed, s.checks
        ));
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Table {
            n,
            tol,
            format,
            out,
        } => {
            positive(tol)?;
            let table = bounds_table(n, tol)?;
            let text = match format {
                Format::Json => to_json(&table)?,
                Format::Csv => table.to_csv(),
            };
            emit(&text, out.as_ref())
        }
        Command::Verify {
            suite,
            suite_flag,
            n,
            tol,
            seed,
            format,
            out,
        } => {
            positive(tol)?;
            let suites = match suite.or(suite_flag) {
                Some(name) => vec![name.parse::<Suite>()?],
                None => Suite::ALL.to_vec(),
            };
            let cfg = SuiteConfig {
                n,
                tol,
                seed,
                ..SuiteConfig::default()
            };
            let report = run_suites(&suites, &cfg)?;
            let text = match format {
                Format::Json => to_json(&report)?,
                Format::Csv => verify_csv(&report),
            };
            emit(&text, out.as_ref())?;
            match report.first_failure {
                Some(f) => Err(Failure::Verification(f)),
                None => Ok(()),
            }
        }
        Command::Witness {
            kind,
            n,
            m,
            k,
            family,
            out,
        } => {
            let (kind, n) = match kind {
                WitnessArg::Block => {
                    let (m, k) = m.zip(k).ok_or_else(|| {
                        Failure::Usage("block witness needs --m and --k".into())
                    })?;
                    (WitnessKind::Block { m, k }, n.unwrap_or(m * k))
                }
                other => {
                    let n = n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
                    let kind = match other {
                        WitnessArg::Hamming => WitnessKind::Hamming,
                        WitnessArg::Prefix => WitnessKind::PrefixDecisionList,
                        WitnessArg::TwoPoint => WitnessKind::TwoPoint,
                        _ => WitnessKind::DictatorIndex,
                    };
                    (kind, n)
                }
            };
            let f = build_witness(kind, n)?;
            let family = match (family, kind) {
                (Some(spec), _) => Some(spec),
                (None, WitnessKind::Hamming) => Some(format!("bounded:{n}")),
                (None, WitnessKind::Block { .. }) => Some("contiguous".into()),
                (None, WitnessKind::PrefixDecisionList) => Some("prefixes".into()),
                (None, WitnessKind::TwoPoint) => Some("full".into()),
                (None, WitnessKind::DictatorIndex) => None,
            };
            let q: Option<QueryFamily> = family
                .map(|s| s.parse::<FamilySpec>()?.build(Some(n)))
                .transpose()?;
            let summary = match &q {
                Some(q) => {
                    let report = ratio(&f, q)?;
                    json!({
                        "witness": kind.to_string(),
                        "n": n,
                        "family": q.to_string(),
                        "ratio": report.value,
                        "closed_form": witness_ratio_closed_form(kind, n, q).ok(),
                        "argmax_subcube": report.argmax_subcube,
                        "sup_norm": f.sup_norm(),
                    })
                }
                None => json!({
                    "witness": kind.to_string(),
                    "n": n,
                    "family": null,
                    "ratio": null,
                    "sup_norm": f.sup_norm(),
                }),
            };
            let mut summary = summary;
            match &out {
                Some(path) => fs::write(path, to_json(&f)?)?,
                None => summary["function"] = serde_json::to_value(&f)?,
            }
            if let Some(r) = summary["ratio"].as_f64() {
                eprintln!("ratio {}", sig12(r));
            }
            print!("{}", to_json(&summary)?);
            Ok(())
        }
        Command::Exact {
            n,
            family,
            tol,
            anchor,
            out,
        } => {
            positive(tol)?;
            let q = family.parse::<FamilySpec>()?.build(n)?;
            let report = exact_valq_anchored(q.n(), &q, tol, anchor)?;
            emit(&to_json(&report)?, out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
