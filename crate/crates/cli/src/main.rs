use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use strmach_core::analysis::{check_duplication, check_output_bound, family_growth, output_degree};
use strmach_core::document::{parse_document, validate_document, Document};
use strmach_core::freecat::Morphism;
use strmach_core::machine::{ipd, palindrome_machine, EvalTrace, LegType, StringMachine, Value};
use strmach_core::tape::{encode_word, TapeCategory};
use strmach_core::Error;

#[derive(Parser)]
#[command(name = "strmach", version, about = "Run and analyse deterministic string machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every definition in a document.
    Validate { file: PathBuf },
    /// Run a machine on a word.
    Run {
        file: PathBuf,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        input: String,
        /// Values for state inputs, in order.
        #[arg(long = "state")]
        states: Vec<String>,
        #[arg(long)]
        trace: bool,
    },
    /// Print the total primary input degree of a run.
    Ipd {
        file: PathBuf,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        input: String,
        #[arg(long = "state")]
        states: Vec<String>,
    },
    /// Print output-degree triples and check the duplication bound.
    Bounds {
        file: PathBuf,
        #[arg(long)]
        transducer: String,
        #[arg(long = "max-degree")]
        max_degree: u64,
    },
    /// Measure IPD along a machine family.
    Family {
        file: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long = "n-max")]
        n_max: usize,
        #[arg(long)]
        input: String,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Decide palindromes with a machine that builds and runs a machine.
    Palindrome {
        #[arg(long)]
        alphabet: String,
        #[arg(long)]
        input: String,
    },
}

/// Failure classes and their exit codes.
enum Failure {
    Validation(String),
    Evaluation(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Evaluation(_) => 2,
            Failure::Usage(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Evaluation(m) | Failure::Usage(m) => m,
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn execute(command: Command) -> Outcome {
    match command {
        Command::Validate { file } => validate(&file),
        Command::Run { file, machine, input, states, trace } => {
            let doc = load(&file)?;
            let m = doc.machine(&machine).map_err(usage)?;
            let run = m.evaluate(&inputs(&doc, m, &input, &states)?).map_err(evaluation)?;
            let mut out = String::new();
            for ((name, _), value) in m.outputs().iter().zip(&run.outputs) {
                let _ = writeln!(out, "{name} = {value}");
            }
            if let Some(accepted) = run.accepted {
                out.push_str(if accepted { "accept\n" } else { "reject\n" });
            }
            if trace {
                write_trace(&mut out, &run.trace, 0);
                let _ = writeln!(out, "ipd={}", ipd(&run.trace));
            }
            Ok(out)
        }
        Command::Ipd { file, machine, input, states } => {
            let doc = load(&file)?;
            let m = doc.machine(&machine).map_err(usage)?;
            let run = m.evaluate(&inputs(&doc, m, &input, &states)?).map_err(evaluation)?;
            Ok(format!("{}\n", ipd(&run.trace)))
        }
        Command::Bounds { file, transducer, max_degree } => {
            let doc = load(&file)?;
            let t = doc.transducer(&transducer).map_err(usage)?;
            let mut out = String::new();
            for j in 0..t.outputs().len() {
                let triple = output_degree(t, j).map_err(evaluation)?;
                let _ = writeln!(out, "output {j}: {triple}");
            }
            let dup = check_duplication(t, max_degree).map_err(evaluation)?;
            let _ = writeln!(
                out,
                "duplication: max {} <= bound {} over {} cases, {} violations",
                dup.max_observed,
                dup.bound,
                dup.cases,
                dup.violations.len()
            );
            for v in &dup.violations {
                let _ = writeln!(out, "  {v}");
            }
            match check_output_bound(t, max_degree, &[0, 1, max_degree]) {
                Ok(report) => {
                    let _ = writeln!(
                        out,
                        "output bound: {} cases, {} tight, {} violations",
                        report.cases,
                        report.tight,
                        report.violations.len()
                    );
                    for v in &report.violations {
                        let _ = writeln!(out, "  {v}");
                    }
                }
                Err(Error::Unsupported(why)) => {
                    let _ = writeln!(out, "output bound: not checked ({why})");
                }
                Err(e) => return Err(evaluation(e)),
            }
            Ok(out)
        }
        Command::Family { file, family, n_max, input } => {
            let doc = load(&file)?;
            let f = doc.family(&family).map_err(usage)?;
            let word = encode_word(&input, f.base.input_cat()).map_err(usage)?;
            let report = family_growth(f, n_max, &word).map_err(evaluation)?;
            let mut out = String::from("N IPD ratio\n");
            for row in &report.rows {
                let ratio = row.ratio.map_or("-".to_string(), |r| format!("{r:.3}"));
                let _ = writeln!(out, "{} {} {ratio}", row.n, row.ipd);
            }
            let at: Vec<String> = report.expansions.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "stages with a+b > 1: {} [{}]", report.expansions.len(), at.join(" "));
            let _ = writeln!(out, "fitted exponent: {:.3}", report.fitted_exponent);
            Ok(out)
        }
        Command::Demo { demo: Demo::Palindrome { alphabet, input } } => {
            if alphabet.contains('r') {
                return Err(Failure::Usage("`r` is reserved for the rejection output".into()));
            }
            let cat = Arc::new(TapeCategory::alphabet("sigma", &format!("{alphabet}r")).map_err(usage)?);
            if let Some(c) = input.chars().find(|c| !alphabet.contains(*c)) {
                return Err(Failure::Usage(format!("character {c:?} is not in the alphabet")));
            }
            let m = palindrome_machine(&cat, "r").map_err(evaluation)?;
            let word = encode_word(&input, &cat).map_err(usage)?;
            let run = m.evaluate(&[Value::Morphism(Morphism::Tape(word))]).map_err(evaluation)?;
            Ok(format!("{}\n", run.outputs[0]))
        }
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn evaluation(e: Error) -> Failure {
    Failure::Evaluation(e.to_string())
}

fn read(file: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(file).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))
}

fn load(file: &PathBuf) -> Result<Document, Failure> {
    parse_document(&read(file)?).map_err(|e| Failure::Validation(e.to_string()))
}

fn validate(file: &PathBuf) -> Outcome {
    let errors = validate_document(&read(file)?);
    if errors.is_empty() {
        let doc = load(file)?;
        return Ok(format!(
            "ok: {} tape categories, {} transducers, {} machines, {} families\n",
            doc.categories.len(),
            doc.transducers.len(),
            doc.machines.len(),
            doc.families.len()
        ));
    }
    let mut lines = Vec::new();
    for e in &errors {
        match e.root() {
            Error::InvalidTransducer { name, violations } => {
                lines.extend(violations.iter().map(|v| format!("transducer `{name}`: {v}")));
            }
            _ => lines.push(e.to_string()),
        }
    }
    Err(Failure::Validation(lines.join("\n")))
}

/// Values for the machine's free inputs: the word for morphism inputs and
/// the `--state` values, in order, for state inputs.
fn inputs(doc: &Document, m: &StringMachine, word: &str, states: &[String]) -> Result<Vec<Value>, Failure> {
    let mut states = states.iter();
    let mut values = Vec::new();
    let mut word_used = false;
    for (name, ty) in m.inputs() {
        match ty {
            LegType::State(_) => {
                let s = states.next().ok_or_else(|| Failure::Usage(format!("missing --state for input `{name}`")))?;
                values.push(Value::State(s.clone()));
            }
            LegType::Morphism(sig) => {
                let Some((cat, 1, 1)) = sig.tape_widths() else {
                    return Err(Failure::Usage(format!("input `{name}` of type {sig} cannot be given on the command line")));
                };
                if word_used {
                    return Err(Failure::Usage(format!("machine has more than one word input (`{name}`)")));
                }
                word_used = true;
                let cat = doc.category(cat).map_err(usage)?;
                values.push(Value::Morphism(Morphism::Tape(encode_word(word, cat).map_err(usage)?)));
            }
        }
    }
    if states.next().is_some() {
        return Err(Failure::Usage("more --state values than state inputs".into()));
    }
    Ok(values)
}

fn write_trace(out: &mut String, trace: &EvalTrace, depth: usize) {
    let indent = "  ".repeat(depth);
    for n in &trace.nodes {
        let _ = write!(out, "{indent}{} {}", n.node, n.kind);
        if let Some(d) = n.primary_degree {
            let _ = write!(out, " primary={d}");
        }
        if let Some((from, to)) = &n.states {
            let _ = write!(out, " {from}->{to}");
        }
        out.push('\n');
        if let Some(inner) = &n.inner {
            write_trace(out, inner, depth + 1);
        }
    }
}
