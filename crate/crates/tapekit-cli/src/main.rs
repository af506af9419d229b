//! Batch front end for the tape workbench: evaluate codes on tapes, trace
//! them symbolically, compute laws, check and transport entailments,
//! extract numeric bounds, and run the worked examples. All output is
//! JSON; identical inputs produce byte-identical output.
//!
//! Exit codes: 0 the command succeeded (and any verdict holds), 1 a
//! checked verdict fails, 2 usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use tapekit::casebook;
use tapekit::jsonio;
use tapekit::lang::parse_code;
use tapekit::modality::{check_entailment, transport_entailment};
use tapekit::tape::{ProductMeasure, Tape, TapeSpace};
use tapekit::tapemap::TapeMapSpec;
use tapekit::trace::trace;
use tapekit::Error as TapekitError;

const DEFAULT_FUEL: u64 = 1024;

#[derive(Parser)]
#[command(name = "tapekit", version, about = "exact workbench for tape-consuming probabilistic codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Step budget; falls back to TAPEKIT_DEFAULT_FUEL, then 1024.
    #[arg(long)]
    fuel: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a code file on a tape literal.
    Eval {
        code: PathBuf,
        /// Tape literal, e.g. `0110:0`, `:(01)*`, components joined by `;`.
        #[arg(long)]
        tape: String,
        #[command(flatten)]
        common: Common,
    },
    /// Symbolically execute a code file into its decision tree.
    Trace {
        code: PathBuf,
        /// Arity of the tape space.
        #[arg(long, default_value_t = 1)]
        arity: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Output distribution of a code under a measure.
    Law {
        code: PathBuf,
        /// Measure config JSON file; defaults to the fair measure.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        arity: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Check an entailment judgment file.
    Entail {
        judgment: PathBuf,
        /// Override the judgment's mode: pointwise | as.
        #[arg(long)]
        mode: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Transport a holding judgment along a built-in tape map.
    Transport {
        judgment: PathBuf,
        /// Map name: `identity[:k]`, `flip`, `drop:<d>`, `split:<k>`, `block:<b>`, `proj:<i>/<k>`.
        #[arg(long)]
        map: String,
        #[command(flatten)]
        common: Common,
    },
    /// Expectation bounds extracted from a holding judgment.
    Extract {
        judgment: PathBuf,
        /// Measure config JSON file; defaults to the judgment's measure,
        /// then to the fair measure.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Worked examples with exact reports.
    Casebook {
        #[command(subcommand)]
        example: CasebookCommand,
    },
}

#[derive(Subcommand)]
enum CasebookCommand {
    /// Von Neumann unbiasing at a pair budget.
    Vn {
        #[arg(long)]
        pairs: u32,
        #[arg(long)]
        measure: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Majority-of-k amplification of a one-bit verifier.
    Majority {
        /// Acceptance bias of the base verifier, e.g. `2/3`.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        t: u32,
        #[command(flatten)]
        common: Common,
    },
}

enum CmdError {
    Usage(String),
    VerdictFails,
}

impl From<TapekitError> for CmdError {
    fn from(e: TapekitError) -> Self {
        CmdError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::VerdictFails) => ExitCode::from(1),
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn default_fuel(cli: Option<u64>) -> u64 {
    cli.or_else(|| std::env::var("TAPEKIT_DEFAULT_FUEL").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_FUEL)
}

fn read_code(path: &PathBuf) -> Result<tapekit::Code, CmdError> {
    let text = fs::read_to_string(path)?;
    Ok(parse_code(&text)?)
}

fn read_json(path: &PathBuf) -> Result<Value, CmdError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CmdError::Usage(format!("bad json: {e}")))
}

fn read_measure(path: &Option<PathBuf>) -> Result<ProductMeasure, CmdError> {
    match path {
        Some(p) => Ok(jsonio::measure_from_json(&read_json(p)?)?),
        None => Ok(ProductMeasure::fair()),
    }
}

fn emit(common: &Common, value: &Value) -> Result<(), CmdError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CmdError::Usage(format!("serialization failed: {e}")))?;
    text.push('\n');
    match &common.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Eval { code, tape, common } => {
            let code = read_code(&code)?;
            let tape = Tape::parse(&tape)?;
            let outcome = tapekit::eval(&code, &tape, default_fuel(common.fuel));
            emit(&common, &jsonio::outcome_to_json(&outcome))
        }
        Command::Trace { code, arity, common } => {
            if arity == 0 {
                return Err(CmdError::Usage("arity must be at least 1".into()));
            }
            let code = read_code(&code)?;
            let tree = trace(&code, TapeSpace::new(arity), default_fuel(common.fuel));
            emit(&common, &jsonio::trace_tree_to_json(&tree))
        }
        Command::Law { code, measure, arity, common } => {
            if arity == 0 {
                return Err(CmdError::Usage("arity must be at least 1".into()));
            }
            let code = read_code(&code)?;
            let measure = read_measure(&measure)?;
            let tree = trace(&code, TapeSpace::new(arity), default_fuel(common.fuel));
            let law = tapekit::extract::law(&tree, &measure);
            emit(&common, &jsonio::findist_to_json(&law)?)
        }
        Command::Entail { judgment, mode, common } => {
            let spec = jsonio::judgment_spec_from_json(&read_json(&judgment)?)?;
            let mode = match mode {
                Some(m) => jsonio::mode_from_str(&m)?,
                None => spec.mode,
            };
            let fuel = common.fuel.or(spec.fuel).unwrap_or_else(|| default_fuel(None));
            let j = check_entailment(
                spec.space,
                &spec.phi,
                &spec.evidence,
                &spec.psi,
                &spec.universe,
                fuel,
                mode,
                spec.measure.as_ref(),
            )?;
            emit(&common, &jsonio::judgment_to_json(&j))?;
            if j.holds {
                Ok(())
            } else {
                Err(CmdError::VerdictFails)
            }
        }
        Command::Transport { judgment, map, common } => {
            let spec = jsonio::judgment_spec_from_json(&read_json(&judgment)?)?;
            let fuel = common.fuel.or(spec.fuel).unwrap_or_else(|| default_fuel(None));
            let j = check_entailment(
                spec.space,
                &spec.phi,
                &spec.evidence,
                &spec.psi,
                &spec.universe,
                fuel,
                spec.mode,
                spec.measure.as_ref(),
            )?;
            if !j.holds {
                // report the failing original so the caller sees why
                emit(&common, &jsonio::judgment_to_json(&j))?;
                return Err(CmdError::VerdictFails);
            }
            let spec_map = TapeMapSpec::builtin(&map)?;
            let out = transport_entailment(&j, &spec_map)?;
            emit(&common, &jsonio::judgment_to_json(&out))
        }
        Command::Extract { judgment, measure, common } => {
            let spec = jsonio::judgment_spec_from_json(&read_json(&judgment)?)?;
            let fuel = common.fuel.or(spec.fuel).unwrap_or_else(|| default_fuel(None));
            let j = check_entailment(
                spec.space,
                &spec.phi,
                &spec.evidence,
                &spec.psi,
                &spec.universe,
                fuel,
                spec.mode,
                spec.measure.as_ref(),
            )?;
            if !j.holds {
                emit(&common, &jsonio::judgment_to_json(&j))?;
                return Err(CmdError::VerdictFails);
            }
            let m = match measure {
                Some(path) => jsonio::measure_from_json(&read_json(&path)?)?,
                None => spec.measure.clone().unwrap_or_else(ProductMeasure::fair),
            };
            let report = tapekit::extract::extraction_soundness(&j, &m)?;
            emit(&common, &jsonio::extraction_report_to_json(&report))?;
            if report.sound {
                Ok(())
            } else {
                Err(CmdError::VerdictFails)
            }
        }
        Command::Casebook { example } => match example {
            CasebookCommand::Vn { pairs, measure, common } => {
                if pairs == 0 || pairs > 10 {
                    return Err(CmdError::Usage("pairs must be between 1 and 10".into()));
                }
                let measure = read_measure(&measure)?;
                let report = casebook::vn_fairness_report(pairs, &measure)?;
                let ok = report.flip_pullback_matches
                    && report.swap_conjugation
                    && report.closed_form_matches.unwrap_or(true);
                emit(&common, &jsonio::vn_report_to_json(&report)?)?;
                if ok {
                    Ok(())
                } else {
                    Err(CmdError::VerdictFails)
                }
            }
            CasebookCommand::Majority { p, k, t, common } => {
                if k == 0 || t == 0 || t > k || k > 5 {
                    return Err(CmdError::Usage(
                        "need 1 <= t <= k <= 5 for exact enumeration".into(),
                    ));
                }
                let bias = tapekit::rat::parse_unit_rational(&p)?;
                let (base, accept, reads) = casebook::one_bit_verifier();
                let fixture = casebook::build_majority(k, t, base, accept, reads);
                let report = casebook::majority_report(&fixture, bias)?;
                let ok = report.k_tape_holds
                    && report.transported_holds
                    && report.amplified == report.closed_form;
                emit(&common, &jsonio::majority_report_to_json(&report))?;
                if ok {
                    Ok(())
                } else {
                    Err(CmdError::VerdictFails)
                }
            }
        },
    }
}
