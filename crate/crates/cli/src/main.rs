//! `founded`: evaluate rule programs under founded, constraint and reference
//! semantics, compare them side by side, benchmark and fuzz the engine.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 declaration error,
//! 3 inconsistent founded model or failed verification (golden mismatch,
//! fuzz counterexample, linearity verdict), 4 oracle budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use founded_rules::closed::wfs_by_closure;
use founded_rules::compare::{compare, CompareOptions};
use founded_rules::constraint::{constraint_models, sms_filter, EnumerationLimit, ModelSet};
use founded_rules::founded::{linear_lfp, FiringOrder, Interpretation};
use founded_rules::fuzz::{fuzz, FuzzConfig};
use founded_rules::language::{DeclarationError, Program};
use founded_rules::oracles::{fitting_oracle, fo_oracle, supported_oracle, OracleBudget, OracleError};
use founded_rules::parser::parse_program;
use founded_rules::pipeline::{all_closed, Prepared};
use founded_rules::workloads::Family;

#[derive(Parser)]
#[command(name = "founded", version, about = "Founded and constraint semantics for rules with negation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the 3-valued model of a program.
    Eval {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EvalSemantics::Founded)]
        semantics: EvalSemantics,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Print every derivation with the rule and hypothesis values behind it.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        dump_ground: bool,
        #[arg(long)]
        dump_completed: bool,
    },
    /// Enumerate 2-valued models.
    Models {
        file: PathBuf,
        #[arg(long, value_enum)]
        semantics: ModelSemantics,
        /// Print at most this many models.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Herbrand-base size accepted by the reference semantics.
        #[arg(long, default_value_t = OracleBudget::default().max_ground_atoms)]
        max_atoms: usize,
    },
    /// Print the program's results under every declaration regime and reference semantics.
    Compare {
        file: PathBuf,
        /// Expected table; exit 3 if the output differs.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Measure evaluation steps against ground program size.
    Bench {
        #[arg(long)]
        family: Family,
        /// Target Herbrand-base sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    /// Check random small programs against the reference semantics.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// Generate only stratified programs.
        #[arg(long)]
        stratified: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalSemantics {
    Founded,
    Wfs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelSemantics {
    Constraint,
    Sms,
    Supported,
    Fitting,
    Fo,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

struct Exit {
    code: u8,
    message: String,
}

impl Exit {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Exit { code, message: message.into() }
    }
}

impl From<DeclarationError> for Exit {
    fn from(e: DeclarationError) -> Self {
        Exit::new(2, format!("declaration error: {e}"))
    }
}

impl From<OracleError> for Exit {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BudgetExceeded(_) => Exit::new(4, e.to_string()),
            _ => Exit::new(2, e.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Program, Exit> {
    let text = fs::read_to_string(path)
        .map_err(|e| Exit::new(1, format!("cannot read {}: {e}", path.display())))?;
    let program =
        parse_program(&text).map_err(|e| Exit::new(1, format!("{}:{e}", path.display())))?;
    for w in program.shadowing_warnings() {
        eprintln!("warning: {w}");
    }
    Ok(program)
}

fn warn_if_declared(program: &Program) {
    if !program.decls.is_empty() {
        eprintln!(
            "warning: declarations replaced by defaults with every uncertain complete predicate closed"
        );
    }
}

fn interpretation_json(itp: &Interpretation) -> Value {
    let atoms: Map<String, Value> =
        itp.values.iter().map(|(a, v)| (a.to_string(), Value::from(v.name()))).collect();
    json!({ "atoms": atoms, "consistent": itp.is_consistent() })
}

fn print_interpretation(itp: &Interpretation, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&interpretation_json(itp)).unwrap()),
        Format::Text => {
            for (a, v) in &itp.values {
                println!("{a}: {}", v.name());
            }
        }
    }
}

fn check_consistent(itp: &Interpretation) -> Result<(), Exit> {
    if itp.is_consistent() {
        Ok(())
    } else {
        let atoms: Vec<String> = itp.conflicts.iter().map(|a| a.to_string()).collect();
        Err(Exit::new(3, format!("inconsistent: derived both true and false: {}", atoms.join(", "))))
    }
}

fn cmd_eval(
    file: &Path,
    semantics: EvalSemantics,
    format: Format,
    trace: bool,
    dump_ground: bool,
    dump_completed: bool,
) -> Result<(), Exit> {
    let program = load(file)?;
    let prepared = match semantics {
        EvalSemantics::Founded => Prepared::new(&program)?,
        EvalSemantics::Wfs => {
            warn_if_declared(&program);
            Prepared::new(&all_closed(&program)?)?
        }
    };
    // Auxiliary sections go to stderr when stdout carries JSON.
    let section = |title: &str, body: String| {
        if format == Format::Json {
            eprint!("% {title}\n{body}");
        } else {
            print!("% {title}\n{body}");
        }
    };
    if dump_ground {
        section("ground program", prepared.ground.render());
    }
    let mut completed = prepared.completed.clone();
    let itp = match semantics {
        EvalSemantics::Founded => prepared.founded().interpretation,
        EvalSemantics::Wfs => {
            let run = wfs_by_closure(&prepared);
            eprintln!("self-false rounds: {}", run.iterations);
            completed.assumed_false = run.self_false;
            run.interpretation
        }
    };
    if dump_completed {
        section("completed program", completed.render());
    }
    if trace {
        let run = linear_lfp(&completed, &prepared.sccs, FiringOrder::Fifo);
        section(&format!("trace, {} steps", run.trace.steps), run.trace.render());
    }
    if format == Format::Text && (dump_ground || dump_completed || trace) {
        println!("% model");
    }
    print_interpretation(&itp, format);
    check_consistent(&itp)
}

fn print_models(ms: &ModelSet, limit: Option<usize>, format: Format) {
    let shown = &ms.models[..limit.unwrap_or(usize::MAX).min(ms.models.len())];
    match format {
        Format::Json => {
            let models: Vec<Vec<String>> = shown
                .iter()
                .map(|m| m.true_atoms().iter().map(|a| a.to_string()).collect())
                .collect();
            let out = json!({ "count": ms.count, "models": models });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Format::Text => {
            for m in shown {
                println!("{m}");
            }
            match ms.count {
                0 => println!("no model"),
                1 => println!("1 model"),
                n => println!("{n} models"),
            }
        }
    }
    if !ms.exact {
        eprintln!("note: enumeration stopped early; {} is a lower bound on the model count", ms.count);
    }
}

fn cmd_models(
    file: &Path,
    semantics: ModelSemantics,
    limit: Option<usize>,
    format: Format,
    max_atoms: usize,
) -> Result<(), Exit> {
    let program = load(file)?;
    let budget = OracleBudget { max_ground_atoms: max_atoms, ..OracleBudget::default() };
    let enum_limit = EnumerationLimit { max_models: limit, ..EnumerationLimit::default() };
    let models = match semantics {
        ModelSemantics::Constraint => {
            let prepared = Prepared::new(&program)?;
            let itp = prepared.founded().interpretation;
            check_consistent(&itp)?;
            constraint_models(&prepared.completed, &prepared.ground, &itp, enum_limit)
        }
        ModelSemantics::Sms => {
            warn_if_declared(&program);
            let prepared = Prepared::new(&all_closed(&program)?)?;
            let itp = wfs_by_closure(&prepared).interpretation;
            check_consistent(&itp)?;
            let all = constraint_models(&prepared.completed, &prepared.ground, &itp, EnumerationLimit::default());
            sms_filter(&all, &prepared.completed)
        }
        ModelSemantics::Supported => supported_oracle(&Prepared::new(&program)?.ground, budget)?,
        ModelSemantics::Fo => fo_oracle(&Prepared::new(&program)?.ground, budget)?,
        ModelSemantics::Fitting => {
            let itp = fitting_oracle(&Prepared::new(&program)?.ground, budget)?;
            print_interpretation(&itp, format);
            return Ok(());
        }
    };
    print_models(&models, limit, format);
    Ok(())
}

fn cmd_compare(file: &Path, golden: Option<&Path>) -> Result<(), Exit> {
    let program = load(file)?;
    let table = compare(&program, &CompareOptions::default())?.render();
    print!("{table}");
    let Some(golden) = golden else {
        return Ok(());
    };
    let expected = fs::read_to_string(golden)
        .map_err(|e| Exit::new(1, format!("cannot read {}: {e}", golden.display())))?;
    if expected == table {
        return Ok(());
    }
    let mut diff = String::new();
    let (old, new): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), table.lines().collect());
    for i in 0..old.len().max(new.len()) {
        match (old.get(i), new.get(i)) {
            (Some(a), Some(b)) if a == b => {}
            (a, b) => {
                if let Some(a) = a {
                    diff.push_str(&format!("- {a}\n"));
                }
                if let Some(b) = b {
                    diff.push_str(&format!("+ {b}\n"));
                }
            }
        }
    }
    Err(Exit::new(3, format!("output differs from {}:\n{}", golden.display(), diff.trim_end())))
}

fn cmd_bench(family: Family, sizes: &[usize]) -> Result<(), Exit> {
    println!(
        "{:>8} {:>6} {:>10} {:>10} {:>10} {:>8} {:>9} {:>9}",
        "atoms", "n", "ground", "completed", "steps", "ratio", "eval-ms", "total-ms"
    );
    let mut ratios = Vec::new();
    for &size in sizes {
        let n = family.parameter_for(size);
        let start = Instant::now();
        let program = parse_program(&family.program(n)).expect("generated programs parse");
        let prepared = Prepared::new(&program)?;
        let eval_start = Instant::now();
        let run = prepared.founded();
        let eval_ms = eval_start.elapsed().as_secs_f64() * 1e3;
        let total_ms = start.elapsed().as_secs_f64() * 1e3;
        let ratio = run.trace.steps as f64 / prepared.ground.size as f64;
        ratios.push(ratio);
        println!(
            "{:>8} {:>6} {:>10} {:>10} {:>10} {:>8.3} {:>9.1} {:>9.1}",
            prepared.ground.herbrand_size(),
            n,
            prepared.ground.size,
            prepared.completed.size(),
            run.trace.steps,
            ratio,
            eval_ms,
            total_ms
        );
    }
    if ratios.len() < 2 {
        println!("verdict: none (need at least two sizes)");
        return Ok(());
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let spread = max / min;
    if spread <= 2.0 {
        println!("verdict: linear (steps/size ratios within {spread:.3}x)");
        Ok(())
    } else {
        println!("verdict: not linear (steps/size ratios spread {spread:.3}x)");
        Err(Exit::new(3, "step/size ratio varies by more than 2x"))
    }
}

fn cmd_fuzz(seed: u64, count: usize, stratified: bool) -> Result<(), Exit> {
    let report = fuzz(FuzzConfig { seed, count, stratified });
    for c in &report.counterexamples {
        print!("{c}");
    }
    println!(
        "checked {} programs ({} all-certain), {} counterexamples",
        report.programs,
        report.all_certain,
        report.counterexamples.len()
    );
    if report.counterexamples.is_empty() {
        Ok(())
    } else {
        Err(Exit::new(3, "counterexamples found"))
    }
}

fn run(cli: Cli) -> Result<(), Exit> {
    match cli.command {
        Command::Eval { file, semantics, format, trace, dump_ground, dump_completed } => {
            cmd_eval(&file, semantics, format, trace, dump_ground, dump_completed)
        }
        Command::Models { file, semantics, limit, format, max_atoms } => {
            cmd_models(&file, semantics, limit, format, max_atoms)
        }
        Command::Compare { file, golden } => cmd_compare(&file, golden.as_deref()),
        Command::Bench { family, sizes } => cmd_bench(family, &sizes),
        Command::Fuzz { seed, count, stratified } => cmd_fuzz(seed, count, stratified),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message);
            ExitCode::from(e.code)
        }
    }
}
