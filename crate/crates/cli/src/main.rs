use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use treelab_core::antichains::{DEFAULT_ITEM_CAP, DEFAULT_MAXIMAL_DEPTH_CAP, DEFAULT_SUBSET_CAP};
use treelab_core::patterns::DEFAULT_VERIFY_CAP;
use treelab_core::qftype::DEFAULT_PAIR_CAP;
use treelab_core::*;

#[derive(Parser)]
#[command(name = "treelab", version, about = "Finite-scale tree property lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print α₀ … α_N
    Alpha {
        #[arg(long)]
        n: usize,
    },
    /// List (maximal) nonempty antichains of b^{<n}
    EnumAntichains {
        #[arg(long, default_value_t = 2)]
        b: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        maximal: bool,
        #[arg(long)]
        count_only: bool,
    },
    /// Build an exact witness for a pattern
    Synth {
        /// atp, katp:K, sop1, sop2, tp:K or tp2
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        b: u32,
        #[arg(long, value_enum)]
        backend: BackendArg,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a witness file against its pattern
    Verify {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = DEFAULT_VERIFY_CAP)]
        cap: u64,
    },
    /// Fatten, elongate, or run the k-ATP reduction on a witness file
    Transform {
        #[arg(value_enum)]
        op: TransformOp,
        /// Fattening multiplicity m, elongation factor, or the k of k-ATP
        #[arg(long)]
        k: usize,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Target depth for fatten/elongate
        #[arg(long)]
        depth: Option<usize>,
        /// Largest probe K_M tried by reduce
        #[arg(long)]
        probe_bound: Option<usize>,
        /// Pattern recorded in the output file
        #[arg(long, default_value = "atp")]
        pattern: String,
    },
    /// Exhaustive finite checks of combinatorial lemmas
    CheckLemma {
        #[command(subcommand)]
        lemma: Lemma,
    },
    /// Graphviz rendering of a witness file
    ExportDot {
        #[arg(long)]
        witness: PathBuf,
    },
    /// Evaluate a sentence in a finite structure
    Eval(EvalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Skolem,
    Boolean,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformOp {
    Fatten,
    Elongate,
    Reduce,
}

#[derive(Subcommand)]
enum Lemma {
    /// ∼_δ on leaf tuples versus ∼₀ on their closures
    SsLl {
        /// Leaf depth
        #[arg(long)]
        n: usize,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 2)]
        b: u32,
        #[arg(long, default_value_t = DEFAULT_PAIR_CAP)]
        cap: u64,
    },
}

#[derive(Args)]
struct EvalArgs {
    /// Structure JSON file, or `divisors:N`
    #[arg(long)]
    structure: String,
    #[arg(long)]
    formula: String,
    /// Free variable assignments, `x=e,y=f`
    #[arg(long, default_value = "")]
    assign: String,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource_cap() { 3 } else { 2 })
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Alpha { n } => {
            let values: Vec<String> = (0..=n).map(|i| alpha(i).to_string()).collect();
            println!("{}", values.join(" "));
        }
        Command::EnumAntichains { b, n, maximal, count_only } => {
            let domain = TreeDomain::new(b, n)?;
            let mut out = json!({ "branching": b, "depth": n, "maximal": maximal });
            if count_only {
                let count = if maximal {
                    maximal_antichain_count(b, n)
                } else {
                    antichain_count(b, n) - 1u32
                };
                out["count"] = Value::String(count.to_string());
            } else {
                let sets = if maximal && b == 2 {
                    maximal_antichains(n, DEFAULT_MAXIMAL_DEPTH_CAP)?.items
                } else if maximal {
                    maximal_chain_bounded(b, n, 2, DEFAULT_ITEM_CAP)?
                } else {
                    enumerate_antichains(&domain, true, DEFAULT_SUBSET_CAP)?.items
                };
                let texts: Vec<Vec<String>> = sets.iter().map(|s| s.to_texts(b)).collect();
                out["count"] = Value::String(texts.len().to_string());
                out["antichains"] = json!(texts);
            }
            print_json(&out);
        }
        Command::Synth { pattern, depth, b, backend, out } => {
            let kind = PatternKind::parse(&pattern)?;
            let spec = pattern_for(kind, b, depth)?;
            let family = exact_family(&spec)?;
            let witness = match backend {
                BackendArg::Skolem => synth_skolem(&family)?,
                BackendArg::Boolean => synth_boolean(&family)?,
            };
            let file = WitnessFile::plain(spec, witness)?;
            emit(out.as_deref(), &file.to_json())?;
        }
        Command::Verify { witness, exhaustive, cap } => {
            let file = load_witness(&witness)?;
            let mode = if exhaustive { VerifyMode::Exhaustive } else { VerifyMode::Pattern };
            let report = verify(&file.witness, &file.pattern, mode, cap)?;
            let mut out = serde_json::to_value(&report).expect("report serializes");
            out["pattern"] = Value::String(file.pattern.kind.to_string());
            if exhaustive {
                out["subsets"] = json!(report.checked_consistent + report.checked_inconsistent);
            }
            print_json(&out);
            return Ok(report.pass);
        }
        Command::Transform { op, k, witness, out, depth, probe_bound, pattern } => {
            let file = load_witness(&witness)?;
            let kind = PatternKind::parse(&pattern)?;
            let mut summary = json!({ "op": op_name(op), "k": k });
            let result = match op {
                TransformOp::Fatten => fatten(&file.witness, k, depth)?,
                TransformOp::Elongate => elongate(&file.witness, k, depth)?,
                TransformOp::Reduce => {
                    if depth.is_some() {
                        return Err(Failure::Usage("--depth does not apply to reduce".into()));
                    }
                    let r = reduce_katp(&file.witness, k, probe_bound)?;
                    if let Value::Object(fields) = serde_json::to_value(r.case).expect("case serializes") {
                        summary.as_object_mut().unwrap().extend(fields);
                    }
                    summary["probes"] = serde_json::to_value(&r.probes).expect("probes serialize");
                    r.witness
                }
            };
            let spec = make_pattern(kind, *result.space())?;
            summary["index"] = treelab_core::witness_file::index_descriptor(result.space());
            let text = WitnessFile::new(spec, result)?.to_json();
            emit(Some(&out), &text)?;
            print_json(&summary);
        }
        Command::CheckLemma { lemma: Lemma::SsLl { n, len, b, cap } } => {
            let report = verify_ss_ll(b, n, len, cap)?;
            print_json(&serde_json::to_value(&report).expect("report serializes"));
            return Ok(report.pass);
        }
        Command::ExportDot { witness } => {
            let file = load_witness(&witness)?;
            print!("{}", export_dot(&file));
        }
        Command::Eval(args) => {
            let structure = load_structure(&args.structure)?;
            let formula = parse_formula(&args.formula)?;
            let assignment = parse_assignment(&args.assign)?;
            println!("{}", eval_formula(&structure, &formula, &assignment)?);
        }
    }
    Ok(true)
}

fn op_name(op: TransformOp) -> &'static str {
    match op {
        TransformOp::Fatten => "fatten",
        TransformOp::Elongate => "elongate",
        TransformOp::Reduce => "reduce",
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json serializes"));
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_witness(path: &Path) -> std::result::Result<WitnessFile, Failure> {
    Ok(WitnessFile::from_json(&read(path)?)?)
}

fn load_structure(spec: &str) -> std::result::Result<FiniteStructure, Failure> {
    if let Some(n) = spec.strip_prefix("divisors:") {
        let n: u64 = n
            .parse()
            .map_err(|_| Failure::Usage(format!("bad divisor lattice size {n:?}")))?;
        return Ok(divisor_lattice(n)?);
    }
    Ok(FiniteStructure::from_json(&read(Path::new(spec))?)?)
}

fn parse_assignment(text: &str) -> std::result::Result<BTreeMap<String, String>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (var, value) = pair
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("assignment {pair:?} is not var=element")))?;
            Ok((var.trim().to_string(), value.trim().to_string()))
        })
        .collect()
}
