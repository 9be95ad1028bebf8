//! `qmarkov` command-line front end.
//!
//! Every verb reads JSON inputs, validates them, and prints a JSON report.
//! Exit codes: 0 when a report was computed (verdicts live in the report),
//! 1 for malformed input or flags, 2 for numerical failures.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use qmarkov::graph::{chordal_structure, ChordalStructure, Graph};
use qmarkov::info::{entropy, gi_divergence_identity, global_information, GiIdentity, InfoReport};
use qmarkov::json::{parse, FamilyFile, StateFile};
use qmarkov::markov::{trace_criterion, MarginalFamily, Verdict};
use qmarkov::maxent::{solve_maxent, MaxentOptions};
use qmarkov::modular::{intersection_check, petz_equality_check};
use qmarkov::operator::DensityOperator;
use qmarkov::pauli::{basic_qubit_family, ClosedForms};
use qmarkov::{tol, Error};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "qmarkov",
    version,
    about = "Quantum Markov completions of marginal families"
)]
struct Cli {
    /// Write the report (or CSV, for `sweep`) to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise overlap consistency of a marginal family.
    Check {
        #[arg(long, value_name = "F.json")]
        family: PathBuf,
    },
    /// Build T(R) and classify 1 - Tr T. Without a graph the family's
    /// subsets must be the cliques of a chordal graph (two entries give the
    /// two-clique case).
    TraceCriterion {
        #[arg(long, value_name = "F.json")]
        family: PathBuf,
        #[arg(long, value_name = "G.json")]
        graph: Option<PathBuf>,
    },
    /// Global information of a state on a chordal graph, with the residual of
    /// its divergence identity.
    Gi {
        #[arg(long, value_name = "S.json")]
        state: PathBuf,
        #[arg(long, value_name = "G.json")]
        graph: PathBuf,
    },
    /// Maximum-entropy completion by dual gradient descent.
    Maxent {
        #[arg(long, value_name = "F.json")]
        family: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = tol::MAXENT)]
        tol: f64,
    },
    /// Compare D(rho||tau) = D(rho_A||tau_A) with exact Petz recovery.
    Petz {
        #[arg(long, value_name = "R.json")]
        rho: PathBuf,
        #[arg(long, value_name = "T.json")]
        tau: PathBuf,
        /// Comma-separated labels of the retained subsystem.
        #[arg(long, value_delimiter = ',', required = true)]
        retained: Vec<String>,
    },
    /// Premises and conclusion of the intersection property.
    Intersection {
        #[arg(long, value_name = "S.json")]
        state: PathBuf,
        /// Four `;`-separated parts A;B;C;D, each a comma-separated label list.
        #[arg(long)]
        parts: String,
        #[arg(long, default_value_t = tol::CI)]
        tol: f64,
    },
    /// Emit a built-in family together with its closed forms.
    #[command(subcommand)]
    Example(ExampleKind),
    /// Tabulate a built-in family over a parameter grid.
    #[command(subcommand)]
    Sweep(SweepKind),
}

#[derive(Subcommand)]
enum ExampleKind {
    /// rho_12 = (I + eps XX)/4 and rho_23 = (I + delta ZZ)/4 on three qubits.
    BasicQubit {
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
    },
}

#[derive(Subcommand)]
enum SweepKind {
    /// CSV over the grid eps, delta in {(k - (N-1)/2) 1.8/N : k < N}.
    ///
    /// Columns, in order:
    ///   eps, delta      grid point
    ///   TrT             numerically computed Tr T(R)
    ///   closed_form     closed-form value of Tr T(R)
    ///   markov_feasible trace-criterion verdict (true/false)
    ///   maxent_entropy  entropy of the maximum-entropy completion, NaN
    ///                   where no strictly positive completion exists
    ///
    /// Floats are printed with 17 significant digits.
    #[command(verbatim_doc_comment)]
    BasicQubit {
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
    /// JSON error object emitted on numerical failures.
    detail: Option<serde_json::Value>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
            detail: None,
        }
    }

    fn from_error(context: &str, e: Error) -> Self {
        let message = format!("{context}: {e}");
        let kind = match &e {
            Error::NotPositive { .. } => "not_positive",
            Error::NotConverged(_) => "not_converged",
            Error::EigNotConverged { .. } => "eig_not_converged",
            Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
            Error::MarginalMismatch { .. } => "marginal_mismatch",
            _ => return Failure::input(message),
        };
        let result = match &e {
            Error::NotConverged(r) => serde_json::to_value(r).ok(),
            _ => None,
        };
        let detail =
            serde_json::json!({ "kind": kind, "message": e.to_string(), "result": result });
        Failure {
            code: 2,
            message,
            detail: Some(serde_json::json!({ "error": detail })),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(flag: &str, path: &Path) -> Outcome<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("--{flag} {}: {e}", path.display())))
}

fn tagged<T>(flag: &str, path: &Path, r: qmarkov::Result<T>) -> Outcome<T> {
    r.map_err(|e| Failure::from_error(&format!("--{flag} {}", path.display()), e))
}

fn load_family(path: &Path) -> Outcome<MarginalFamily> {
    let text = read("family", path)?;
    let file = tagged("family", path, parse::<FamilyFile>(&text))?;
    tagged("family", path, file.to_family())
}

fn load_state(flag: &str, path: &Path) -> Outcome<DensityOperator> {
    let text = read(flag, path)?;
    let file = tagged(flag, path, StateFile::parse(&text))?;
    tagged(flag, path, file.to_state())
}

fn load_structure(path: &Path) -> Outcome<ChordalStructure> {
    let text = read("graph", path)?;
    let g = tagged("graph", path, parse::<Graph>(&text))?;
    tagged("graph", path, chordal_structure(&g))
}

fn computed<T>(verb: &str, r: qmarkov::Result<T>) -> Outcome<T> {
    r.map_err(|e| Failure::from_error(verb, e))
}

fn positive(flag: &str, x: f64) -> Outcome<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Failure::input(format!(
            "--{flag} must be a positive number, got {x}"
        )))
    }
}

fn parse_parts(text: &str) -> Outcome<Vec<Vec<String>>> {
    let parts: Vec<Vec<String>> = text
        .split(';')
        .map(|p| {
            p.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
        .collect();
    if parts.len() != 4 {
        return Err(Failure::input(format!(
            "--parts: expected four ';'-separated parts, got {}",
            parts.len()
        )));
    }
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Failure::input(
            "--parts: every part needs at least one label",
        ));
    }
    Ok(parts)
}

#[derive(Serialize)]
struct GiOutput {
    global_information: InfoReport,
    identity: GiIdentity,
}

#[derive(Serialize)]
struct ExampleOutput {
    #[serde(flatten)]
    family: FamilyFile,
    closed_forms: ClosedForms,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Cell-centred grid on (-0.9, 0.9).
fn grid(n: usize) -> Vec<f64> {
    let mid = (n as f64 - 1.0) / 2.0;
    (0..n).map(|k| (k as f64 - mid) * 1.8 / n as f64).collect()
}

fn sweep_row(eps: f64, delta: f64) -> qmarkov::Result<String> {
    let (family, closed) = basic_qubit_family(eps, delta)?;
    let report = trace_criterion(&family, None)?;
    let entropy = if closed.strictly_feasible {
        let res = solve_maxent(&family, &MaxentOptions::default())?;
        res.rho_hat.as_ref().map(entropy).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    Ok(format!(
        "{eps:.16e},{delta:.16e},{:.16e},{:.16e},{},{entropy:.16e}\n",
        report.trace_of_t,
        closed.trace_of_t,
        report.verdict == Verdict::MarkovFeasible
    ))
}

fn sweep(n: usize) -> Outcome<String> {
    if n == 0 {
        return Err(Failure::input("--grid must be at least 1"));
    }
    let g = grid(n);
    let points: Vec<(f64, f64)> = g
        .iter()
        .flat_map(|&e| g.iter().map(move |&d| (e, d)))
        .collect();
    let rows: Vec<qmarkov::Result<String>> =
        points.par_iter().map(|&(e, d)| sweep_row(e, d)).collect();
    let mut csv = String::from("eps,delta,TrT,closed_form,markov_feasible,maxent_entropy\n");
    for (row, (e, d)) in rows.into_iter().zip(points) {
        csv.push_str(&computed(&format!("sweep at eps={e}, delta={d}"), row)?);
    }
    Ok(csv)
}

fn run(command: &Command) -> Outcome<String> {
    match command {
        Command::Check { family } => Ok(json(&load_family(family)?.check_consistency())),
        Command::TraceCriterion { family, graph } => {
            let f = load_family(family)?;
            let cs = graph.as_deref().map(load_structure).transpose()?;
            Ok(json(&computed(
                "trace-criterion",
                trace_criterion(&f, cs.as_ref()),
            )?))
        }
        Command::Gi { state, graph } => {
            let rho = load_state("state", state)?;
            let cs = load_structure(graph)?;
            let global_information = computed("gi", global_information(&rho, &cs))?;
            let identity = computed("gi", gi_divergence_identity(&rho, &cs))?;
            Ok(json(&GiOutput {
                global_information,
                identity,
            }))
        }
        Command::Maxent {
            family,
            max_iter,
            tol,
        } => {
            if *max_iter == 0 {
                return Err(Failure::input("--max-iter must be at least 1"));
            }
            let opts = MaxentOptions {
                max_iter: *max_iter,
                tol: positive("tol", *tol)?,
                ..MaxentOptions::default()
            };
            let f = load_family(family)?;
            Ok(json(&computed("maxent", solve_maxent(&f, &opts))?))
        }
        Command::Petz { rho, tau, retained } => {
            let r = load_state("rho", rho)?;
            let t = load_state("tau", tau)?;
            Ok(json(&computed(
                "petz",
                petz_equality_check(&r, &t, retained),
            )?))
        }
        Command::Intersection { state, parts, tol } => {
            let p = parse_parts(parts)?;
            let tol = positive("tol", *tol)?;
            let rho = load_state("state", state)?;
            Ok(json(&computed(
                "intersection",
                intersection_check(&rho, &p[0], &p[1], &p[2], &p[3], tol),
            )?))
        }
        Command::Example(ExampleKind::BasicQubit { eps, delta }) => {
            let (family, closed_forms) =
                computed("example basic-qubit", basic_qubit_family(*eps, *delta))?;
            Ok(json(&ExampleOutput {
                family: FamilyFile::from_family(&family),
                closed_forms,
            }))
        }
        Command::Sweep(SweepKind::BasicQubit { grid }) => sweep(*grid),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("--out {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli.command).and_then(|text| emit(cli.out.as_deref(), &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            if let Some(detail) = &f.detail {
                let _ = emit(cli.out.as_deref(), &json(detail));
            }
            ExitCode::from(f.code)
        }
    }
}
