//! `hrd`: command-line front end for the hrdialogue toolkit.
//!
//! Every subcommand prints a JSON report (`schema`, `tool`, `inputs`,
//! `findings`, `exit_code`) on stdout, or TSV where `--tsv` is offered.
//! Exit status is 0 when nothing was found, 1 when violations or errors
//! were reported, 2 on bad usage or unreadable input.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{CliError, Exit, Outcome, RunReport, SCHEMA};

#[derive(Parser)]
#[command(name = "hrd", version, about = "Annotated human-robot dialogue toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// PENMAN graphs
    #[command(subcommand)]
    Amr(AmrCmd),
    /// Smatch between two AMR files, graph by graph
    Smatch(SmatchArgs),
    /// Dialogue-AMR
    #[command(subcommand)]
    Damr(DamrCmd),
    /// Dialogue-structure transcripts
    #[command(subcommand)]
    Struct(StructCmd),
    /// Inter-annotator agreement
    #[command(subcommand)]
    Iaa(IaaCmd),
    /// Exploration maps
    #[command(subcommand)]
    Map(MapCmd),
    /// Photo-request strategies
    #[command(subcommand)]
    Strategy(StrategyCmd),
    /// Dialogue-manager policy
    #[command(subcommand)]
    Dm(DmCmd),
}

#[derive(Subcommand)]
enum AmrCmd {
    /// Parse and print triples and normalized PENMAN
    Parse { files: Vec<PathBuf> },
    /// Report parse, reachability and cycle problems per graph
    Check {
        files: Vec<PathBuf>,
        /// Report cycles as warnings rather than errors
        #[arg(long)]
        allow_cycles: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Method {
    /// Exhaustive search, falling back to hill-climbing on large graphs
    Auto,
    Exact,
    Hillclimb,
}

#[derive(Args)]
pub struct SmatchArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest smaller-graph size searched exhaustively
    #[arg(long, default_value_t = hrdialogue::smatch::DEFAULT_EXHAUSTIVE_LIMIT)]
    limit: usize,
}

#[derive(Args)]
pub struct LexiconArg {
    /// Robot lexicon TSV replacing the built-in one
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TenseArg {
    Past,
    Present,
    Future,
    Imperative,
}

#[derive(Subcommand)]
enum DamrCmd {
    /// Validate Dialogue-AMR graphs against the schema
    Validate {
        files: Vec<PathBuf>,
        #[command(flatten)]
        lexicon: LexiconArg,
    },
    /// Convert Standard-AMR graphs to Dialogue-AMR
    Convert {
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        tense: Option<TenseArg>,
        #[arg(long, default_value = "commander")]
        speaker: String,
        #[arg(long, default_value = "robot")]
        addressee: String,
        /// Read first-person future statements as promises
        #[arg(long)]
        promise: bool,
        #[command(flatten)]
        lexicon: LexiconArg,
    },
}

#[derive(Subcommand)]
enum StructCmd {
    /// Check TU, antecedent and relation annotations
    Validate {
        files: Vec<PathBuf>,
        /// Load unknown relation labels and report them as V8
        #[arg(long)]
        lenient: bool,
        #[arg(long)]
        tsv: bool,
    },
    /// TU trees
    Tus {
        file: PathBuf,
        #[arg(long)]
        tu: Option<i64>,
    },
    /// Instruction-response pairs
    Pairs {
        file: PathBuf,
        /// Print a pairs TSV usable as `dm respond --train`
        #[arg(long)]
        tsv: bool,
    },
    /// Stretches where several TUs are open at once
    Interleave { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Markable {
    Tu,
    Antecedent,
    Relation,
}

#[derive(Subcommand)]
enum IaaCmd {
    /// Krippendorff's alpha over one annotation file per coder
    Alpha {
        files: Vec<PathBuf>,
        #[arg(long, default_value = "nominal")]
        distance: hrdialogue::agreement::Distance,
        /// Defaults to `tu` under MASI and `relation` otherwise
        #[arg(long, value_enum)]
        markable: Option<Markable>,
    },
}

#[derive(Subcommand)]
enum MapCmd {
    /// Scanned share of exploration-map items
    Coverage {
        files: Vec<PathBuf>,
        #[arg(long)]
        category: Option<hrdialogue::visual::Category>,
        #[arg(long)]
        tsv: bool,
    },
}

#[derive(Subcommand)]
enum StrategyCmd {
    /// Classify instructions given as arguments or one per line in `--file`
    Classify {
        texts: Vec<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        tsv: bool,
    },
    /// Trace photo events back to their requests
    Trace { file: PathBuf },
}

#[derive(Subcommand)]
enum DmCmd {
    /// Decide how to answer an utterance
    Respond {
        utterance: String,
        /// Transcript TSV or pairs TSV
        #[arg(long)]
        train: PathBuf,
        #[arg(long, default_value_t = hrdialogue::policy::DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Dialogue-AMR of the utterance (first graph of the file)
        #[arg(long)]
        damr: Option<PathBuf>,
        /// Number of ranked matches to include
        #[arg(short, long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        lexicon: LexiconArg,
    },
}

fn paths(files: &[PathBuf]) -> Vec<String> {
    files.iter().map(|p| p.display().to_string()).collect()
}

fn dispatch(cmd: Command) -> (String, Vec<String>, Result<Outcome, CliError>) {
    use commands as c;
    match cmd {
        Command::Amr(AmrCmd::Parse { files }) => ("amr parse".into(), paths(&files), c::amr_parse(&files)),
        Command::Amr(AmrCmd::Check { files, allow_cycles }) => {
            ("amr check".into(), paths(&files), c::amr_check(&files, allow_cycles))
        }
        Command::Smatch(args) => {
            let inputs = paths(&[args.left.clone(), args.right.clone()]);
            ("smatch".into(), inputs, c::smatch(&args))
        }
        Command::Damr(DamrCmd::Validate { files, lexicon }) => {
            ("damr validate".into(), paths(&files), c::damr_validate(&files, &lexicon))
        }
        Command::Damr(DamrCmd::Convert {
            files,
            tense,
            speaker,
            addressee,
            promise,
            lexicon,
        }) => (
            "damr convert".into(),
            paths(&files),
            c::damr_convert(&files, tense, speaker, addressee, promise, &lexicon),
        ),
        Command::Struct(StructCmd::Validate { files, lenient, tsv }) => {
            ("struct validate".into(), paths(&files), c::struct_validate(&files, lenient, tsv))
        }
        Command::Struct(StructCmd::Tus { file, tu }) => {
            ("struct tus".into(), paths(std::slice::from_ref(&file)), c::struct_tus(&file, tu))
        }
        Command::Struct(StructCmd::Pairs { file, tsv }) => {
            ("struct pairs".into(), paths(std::slice::from_ref(&file)), c::struct_pairs(&file, tsv))
        }
        Command::Struct(StructCmd::Interleave { file }) => {
            ("struct interleave".into(), paths(std::slice::from_ref(&file)), c::struct_interleave(&file))
        }
        Command::Iaa(IaaCmd::Alpha {
            files,
            distance,
            markable,
        }) => ("iaa alpha".into(), paths(&files), c::iaa_alpha(&files, distance, markable)),
        Command::Map(MapCmd::Coverage { files, category, tsv }) => {
            ("map coverage".into(), paths(&files), c::map_coverage(&files, category, tsv))
        }
        Command::Strategy(StrategyCmd::Classify { texts, file, tsv }) => {
            let inputs = file.iter().map(|p| p.display().to_string()).collect();
            ("strategy classify".into(), inputs, c::strategy_classify(texts, file.as_deref(), tsv))
        }
        Command::Strategy(StrategyCmd::Trace { file }) => {
            ("strategy trace".into(), paths(std::slice::from_ref(&file)), c::strategy_trace(&file))
        }
        Command::Dm(DmCmd::Respond {
            utterance,
            train,
            threshold,
            damr,
            k,
            lexicon,
        }) => {
            let mut inputs = paths(std::slice::from_ref(&train));
            inputs.extend(damr.iter().map(|p| p.display().to_string()));
            (
                "dm respond".into(),
                inputs,
                c::dm_respond(&utterance, &train, threshold, damr.as_deref(), k, &lexicon),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (tool, inputs, result) = dispatch(cli.command);
    let (findings, exit, tsv) = match result {
        Ok(o) => (o.findings, if o.problems { Exit::Findings } else { Exit::Ok }, o.tsv),
        Err(CliError(reason)) => {
            eprintln!("hrd {tool}: {reason}");
            (serde_json::json!({ "error": reason }), Exit::Error, None)
        }
    };
    // a closed pipe (`hrd ... | head`) is not worth a panic
    let mut stdout = std::io::stdout().lock();
    let _ = match tsv {
        Some(t) => write!(stdout, "{t}"),
        None => {
            let report = RunReport {
                schema: SCHEMA,
                tool,
                inputs,
                findings,
                exit_code: exit as i32,
            };
            writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))
        }
    };
    ExitCode::from(exit as u8)
}
