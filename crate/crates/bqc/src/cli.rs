//! Batch front-end: check proofs, extract realizers, evaluate codes, decide
//! realizability, and run the randomized soundness campaign.
//!
//! Exit codes are stable: 0 success (or Holds), 1 check failure or Fails,
//! 2 Unknown, 3 input error. Reports are line-oriented `key: value` pairs;
//! `extract` and `eval` print their payload bare so it can be piped into the
//! next command.

use crate::calculus::check_derivation;
use crate::campaign::{validate_corpus, CampaignConfig};
use crate::extraction::{extract, sentence_realizer};
use crate::formats::{parse_derivation_file, parse_evaluation_file, parse_witness_file};
use crate::numbering::{decode, eval, EvalOutcome, Nat, UndefinedReason};
use crate::semantics::{
    check, check_formula_with_witnesses, check_sequent, check_with_witnesses, FailTrace, Verdict,
    WitnessMap,
};
use crate::syntax::{parse_formula, parse_sequent, VarList, VarName};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

/// Stable, machine-parseable process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    /// Success; for realizability commands, the verdict Holds.
    Success,
    /// A check failure or a Fails verdict.
    Failed,
    /// An Unknown verdict (including fuel exhaustion).
    Unknown,
    /// Unreadable or ill-formed input.
    InputError,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Failed => 1,
            ExitStatus::Unknown => 2,
            ExitStatus::InputError => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "bqc",
    about = "Check derivations, extract numeric realizers, and validate them over finite domains"
)]
pub struct Cli {
    /// Only emit key: value lines (no decorative output).
    #[arg(long, global = true)]
    pub machine: bool,
    /// Evaluation fuel per eval call.
    #[arg(long, global = true, env = "BQC_FUEL", default_value_t = 1_000_000)]
    pub fuel: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every node of a derivation file.
    Check {
        /// Derivation file (.bqc).
        proof: PathBuf,
    },
    /// Extract the realizer of a checked derivation and print its index.
    Extract {
        /// Derivation file (.bqc).
        proof: PathBuf,
        /// Comma-separated admissible variable list; empty for sentences.
        #[arg(long, default_value = "")]
        vars: String,
        /// Write the decimal index to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also print the decoded program term.
        #[arg(long)]
        show_term: bool,
        /// Extract the sentence realizer (conclusion must be top => A with
        /// A closed): apply the sequent realizer to 0 first.
        #[arg(long)]
        sentence: bool,
    },
    /// Evaluate a code on arguments and print the resulting value.
    Eval {
        /// Decimal code.
        #[arg(long)]
        code: String,
        /// Comma-separated natural numbers.
        #[arg(long, default_value = "")]
        args: String,
        /// Also print the decoded program term.
        #[arg(long)]
        show_term: bool,
    },
    /// Decide whether a code realizes a sequent or formula over an
    /// evaluation.
    Realize {
        /// Decimal code to check; alternative to --proof.
        #[arg(long, conflicts_with = "proof")]
        code: Option<String>,
        /// Extract the code from this derivation file first.
        #[arg(long)]
        proof: Option<PathBuf>,
        /// Sequent text, e.g. "P(x) => Q(x)"; checked over --vars.
        #[arg(long, conflicts_with = "formula")]
        sequent: Option<String>,
        /// Closed formula text; checked directly.
        #[arg(long)]
        formula: Option<String>,
        /// Comma-separated admissible variable list for the sequent.
        #[arg(long, default_value = "")]
        vars: String,
        /// Evaluation file.
        #[arg(long = "eval")]
        evaluation: PathBuf,
        /// Candidate sweep bound for implication antecedents that are not
        /// exactly enumerable.
        #[arg(long, default_value_t = 16)]
        bound: u64,
        /// Witness file; switches antecedent sweeps to witness mode.
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Extract and validate every proof in a corpus directory against
    /// seeded random evaluations.
    Validate {
        /// Directory of .bqc files.
        corpus: PathBuf,
        /// Random evaluations per proof per admissible list.
        #[arg(long, default_value_t = 50)]
        trials: u64,
        /// Seed fixing all randomness.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Antecedent sweep bound.
        #[arg(long, default_value_t = 16)]
        bound: u64,
    },
}

struct Report {
    machine: bool,
}

impl Report {
    fn kv(&self, key: &str, value: impl std::fmt::Display) {
        println!("{key}: {value}");
    }

    fn note(&self, text: impl std::fmt::Display) {
        if !self.machine {
            println!("{text}");
        }
    }
}

fn input_error(message: impl std::fmt::Display) -> ExitStatus {
    eprintln!("error: {message}");
    ExitStatus::InputError
}

fn parse_code(text: &str) -> Result<Nat, String> {
    let text = text.trim();
    if text.is_empty() || !text.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("'{text}' is not a decimal natural number"));
    }
    Ok(text.parse().expect("digits"))
}

fn parse_args_list(text: &str) -> Result<Vec<Nat>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|p| parse_code(p)).collect()
}

fn parse_vars(text: &str) -> Result<VarList, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(VarList::empty());
    }
    let names: Vec<VarName> = text
        .split(',')
        .map(|p| VarName::new(p.trim()))
        .collect();
    VarList::new(names).map_err(|e| e.to_string())
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_fail_trace(report: &Report, trace: &FailTrace, fuel: u64) {
    for frame in &trace.frames {
        report.kv("trace", frame);
    }
    if let Some(w) = &trace.witness {
        let args = w
            .args
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",");
        report.kv(
            "replay",
            format!("bqc eval --fuel {fuel} --code {} --args {args}", w.code),
        );
    }
}

fn verdict_status(report: &Report, verdict: &Verdict, fuel: u64) -> ExitStatus {
    report.kv("verdict", verdict);
    match verdict {
        Verdict::Holds => ExitStatus::Success,
        Verdict::Unknown(_) => ExitStatus::Unknown,
        Verdict::Fails(trace) => {
            print_fail_trace(report, trace, fuel);
            ExitStatus::Failed
        }
    }
}

/// Executes one parsed command.
pub fn run(cli: Cli) -> ExitStatus {
    let report = Report {
        machine: cli.machine,
    };
    let fuel = cli.fuel;
    match cli.command {
        Command::Check { proof } => {
            let text = match read_file(&proof) {
                Ok(t) => t,
                Err(e) => return input_error(e),
            };
            let file = match parse_derivation_file(&text) {
                Ok(f) => f,
                Err(e) => return input_error(format!("{}: {e}", proof.display())),
            };
            let result = check_derivation(&file.derivation);
            report.kv("nodes", file.derivation.node_count());
            if result.ok() {
                report.kv("report", "ok");
                ExitStatus::Success
            } else {
                report.kv("report", "failed");
                for failure in &result.failures {
                    report.kv("failure", failure);
                }
                ExitStatus::Failed
            }
        }
        Command::Extract {
            proof,
            vars,
            output,
            show_term,
            sentence,
        } => {
            let text = match read_file(&proof) {
                Ok(t) => t,
                Err(e) => return input_error(e),
            };
            let file = match parse_derivation_file(&text) {
                Ok(f) => f,
                Err(e) => return input_error(format!("{}: {e}", proof.display())),
            };
            let rs = match parse_vars(&vars) {
                Ok(v) => v,
                Err(e) => return input_error(e),
            };
            let code = if sentence {
                match sentence_realizer(&file.derivation, fuel) {
                    Ok(v) => v,
                    Err(e) => return input_error(e),
                }
            } else {
                match extract(&file.derivation, &rs) {
                    Ok(ix) => ix.into_code(),
                    Err(e) => return input_error(e),
                }
            };
            if show_term {
                match decode(&code) {
                    Ok(term) => report.kv("term", term),
                    Err(e) => report.kv("term-error", e),
                }
            }
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, format!("{code}\n")) {
                        return input_error(format!("{}: {e}", path.display()));
                    }
                    report.note(format!("wrote index to {}", path.display()));
                }
                None => println!("{code}"),
            }
            ExitStatus::Success
        }
        Command::Eval {
            code,
            args,
            show_term,
        } => {
            let code = match parse_code(&code) {
                Ok(c) => c,
                Err(e) => return input_error(e),
            };
            let args = match parse_args_list(&args) {
                Ok(a) => a,
                Err(e) => return input_error(e),
            };
            if show_term {
                match decode(&code) {
                    Ok(term) => report.kv("term", term),
                    Err(e) => report.kv("term-error", e),
                }
            }
            match eval(&code, &args, fuel) {
                EvalOutcome::Value(v) => {
                    println!("{v}");
                    ExitStatus::Success
                }
                EvalOutcome::Undefined(UndefinedReason::DecodeFailure) => {
                    report.kv("outcome", "undefined (decode failure)");
                    ExitStatus::InputError
                }
                EvalOutcome::Undefined(UndefinedReason::FuelExhausted) => {
                    report.kv("outcome", "undefined (fuel exhausted)");
                    ExitStatus::Unknown
                }
            }
        }
        Command::Realize {
            code,
            proof,
            sequent,
            formula,
            vars,
            evaluation,
            bound,
            witnesses,
        } => {
            let eval_text = match read_file(&evaluation) {
                Ok(t) => t,
                Err(e) => return input_error(e),
            };
            let eval_file = match parse_evaluation_file(&eval_text) {
                Ok(f) => f,
                Err(e) => return input_error(format!("{}: {e}", evaluation.display())),
            };
            let rs = match parse_vars(&vars) {
                Ok(v) => v,
                Err(e) => return input_error(e),
            };
            let code = match (code, proof) {
                (Some(text), None) => match parse_code(&text) {
                    Ok(c) => c,
                    Err(e) => return input_error(e),
                },
                (None, Some(path)) => {
                    let text = match read_file(&path) {
                        Ok(t) => t,
                        Err(e) => return input_error(e),
                    };
                    let file = match parse_derivation_file(&text) {
                        Ok(f) => f,
                        Err(e) => return input_error(format!("{}: {e}", path.display())),
                    };
                    match extract(&file.derivation, &rs) {
                        Ok(ix) => ix.into_code(),
                        Err(e) => return input_error(e),
                    }
                }
                _ => return input_error("exactly one of --code or --proof is required"),
            };
            let witness_map: Option<WitnessMap> = match witnesses {
                None => None,
                Some(path) => {
                    let text = match read_file(&path) {
                        Ok(t) => t,
                        Err(e) => return input_error(e),
                    };
                    match parse_witness_file(&text) {
                        Ok(m) => Some(m),
                        Err(e) => return input_error(format!("{}: {e}", path.display())),
                    }
                }
            };
            let sig = &eval_file.signature;
            let verdict = match (sequent, formula) {
                (Some(text), None) => {
                    let s = match parse_sequent(&text, sig) {
                        Ok(s) => s,
                        Err(e) => return input_error(e),
                    };
                    let result = match &witness_map {
                        Some(map) => {
                            check_with_witnesses(&code, &s, &rs, &eval_file.evaluation, map, fuel)
                        }
                        None => check_sequent(&code, &s, &rs, &eval_file.evaluation, bound, fuel),
                    };
                    match result {
                        Ok(v) => v,
                        Err(e) => return input_error(e),
                    }
                }
                (None, Some(text)) => {
                    let f = match parse_formula(&text, sig) {
                        Ok(f) => f,
                        Err(e) => return input_error(e),
                    };
                    let result = match &witness_map {
                        Some(map) => check_formula_with_witnesses(
                            &code,
                            &f,
                            &eval_file.evaluation,
                            map,
                            fuel,
                        ),
                        None => check(&code, &f, &eval_file.evaluation, bound, fuel),
                    };
                    match result {
                        Ok(v) => v,
                        Err(e) => return input_error(e),
                    }
                }
                _ => return input_error("exactly one of --sequent or --formula is required"),
            };
            verdict_status(&report, &verdict, fuel)
        }
        Command::Validate {
            corpus,
            trials,
            seed,
            bound,
        } => {
            let config = CampaignConfig {
                trials,
                seed,
                bound,
                fuel,
            };
            let outcome = match validate_corpus(&corpus, &config) {
                Ok(o) => o,
                Err(e) => return input_error(e),
            };
            report.note("proof results (holds/unknown/fails per trial):");
            for p in &outcome.proofs {
                report.kv("proof", p);
                for failure in &p.failures {
                    report.kv("failure", failure);
                }
            }
            report.kv("proofs", outcome.proofs.len());
            report.kv("total-unknown", outcome.total_unknown());
            report.kv("total-fails", outcome.total_fails());
            report.kv("seed", seed);
            if outcome.total_fails() > 0 {
                report.kv("result", "fails");
                ExitStatus::Failed
            } else if !outcome.sound() {
                report.kv("result", "unexpected-unknown");
                ExitStatus::Unknown
            } else {
                report.kv("result", "ok");
                ExitStatus::Success
            }
        }
    }
}

/// Entry point for the binary: parse the process arguments and run.
pub fn main_from_args() -> i32 {
    let cli = Cli::parse();
    run(cli).code()
}
