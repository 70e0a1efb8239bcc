//! `relhyp`: classify mapping tori of free-group automorphisms and run the
//! individual checks behind the classification.
//!
//! Exit codes: 0 completed, 2 precondition violated, 3 unreadable input.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relhyp::classify::graph_json::GraphMapError;
use relhyp::classify::parse::AutomorphismTextError;
use relhyp::classify::*;
use relhyp::electric::ElectricSpace;
use relhyp::flaring::{
    conjugacy_flaring_search, standing_assumptions_check, strict_flaring_search,
    three_of_four_test, FlareSide, LaminationPair,
};
use relhyp::graph::GraphSelfMap;
use relhyp::laminations::{build_nas, nonattracting_subgraph, select_sigma, NonattractingData};
use relhyp::par::{self, Execution};
use relhyp::subgroups::{FoldedImmersion, SubgroupSystem};
use relhyp::words::{Basis, CyclicWord, FreeAutomorphism, ReducedWord};
use serde::Serialize;

const WORKERS_ENV: &str = "RELHYP_WORKERS";

#[derive(Parser)]
#[command(
    name = "relhyp",
    version,
    about = "Relative hyperbolicity checks for free-by-cyclic groups"
)]
struct Cli {
    /// run every corpus loop on the calling thread
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full classification report for one automorphism
    Classify(ClassifyArgs),
    /// Nonattracting subgroup system of a representative at stratum r
    Nas(NasArgs),
    /// Flaring searches
    Flare {
        #[command(subcommand)]
        kind: FlareKind,
    },
    /// Electric length of a word or conjugacy class
    ElectricDist(ElectricArgs),
    /// Re-render a saved JSON report
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    automorphism: PathBuf,
    #[arg(long)]
    graph_map: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// EG stratum to analyze; defaults to the topmost one
    #[arg(long)]
    stratum: Option<usize>,
    /// JSON list of restrictions to peripheral subgroups
    #[arg(long)]
    restrictions: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct NasArgs {
    graph_map: PathBuf,
    #[arg(long)]
    stratum: usize,
    /// analyze the k-th power of the map
    #[arg(long, default_value_t = 1)]
    power: usize,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlareCommon {
    /// automorphism file; defaults to the map's induced automorphism
    #[arg(long)]
    automorphism: Option<PathBuf>,
    /// peripheral system = nonattracting system of this map
    #[arg(long)]
    graph_map: Option<PathBuf>,
    #[arg(long)]
    stratum: Option<usize>,
    /// peripheral system given directly (JSON list of generator lists)
    #[arg(long, conflicts_with = "graph_map")]
    peripherals: Option<PathBuf>,
    /// one word per line; generated from the config when absent
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FlareKind {
    /// Conjugacy flaring, factor 3
    Conj(FlareCommon),
    /// Strict flaring, factor 2
    Strict(FlareCommon),
    /// Three-of-four stretch for a pair of automorphisms
    ThreeOfFour(FourArgs),
}

#[derive(Args)]
struct FourArgs {
    #[arg(long)]
    phi_map: PathBuf,
    #[arg(long)]
    phi_inverse_map: PathBuf,
    #[arg(long)]
    psi_map: PathBuf,
    #[arg(long)]
    psi_inverse_map: PathBuf,
    /// run even when a standing assumption fails
    #[arg(long = "override")]
    allow_override: bool,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ElectricArgs {
    word: String,
    #[arg(long)]
    peripherals: PathBuf,
    /// ambient rank; inferred from the inputs when absent
    #[arg(long)]
    rank: Option<usize>,
    /// measure the conjugacy class instead of the element
    #[arg(long)]
    conjugacy: bool,
    #[arg(long, default_value_t = 1)]
    conjugator_bound: usize,
    #[arg(long, default_value_t = 2)]
    enumeration_bound: usize,
    #[arg(long, default_value_t = 100_000)]
    ball_radius: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON report; stdin when absent
    input: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug)]
enum CliError {
    Parse(String),
    Precondition(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 3,
            CliError::Precondition(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Precondition(m) => write!(f, "{m}"),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e.exit_code() {
            3 => CliError::Parse(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

fn precondition(e: impl std::fmt::Display) -> CliError {
    CliError::Precondition(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| precondition(format!("{}: {e}", p.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{}", text.trim_end()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(precondition(e)),
                _ => Ok(()),
            }
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    emit(
        &serde_json::to_string_pretty(value).expect("plain data"),
        out,
    )
}

fn load_config(path: Option<&Path>) -> Result<AnalysisConfig, CliError> {
    let cfg = match path {
        Some(p) => AnalysisConfig::from_json(&read(p)?).map_err(CliError::Parse)?,
        None => AnalysisConfig::default(),
    };
    cfg.validate().map_err(CliError::Precondition)?;
    Ok(cfg)
}

fn load_automorphism(path: &Path) -> Result<ParsedAutomorphism, CliError> {
    parse_automorphism(&read(path)?).map_err(|e| match e {
        AutomorphismTextError::Syntax(p) => CliError::Parse(format!("{}: {p}", path.display())),
        other => precondition(other),
    })
}

fn load_map(path: &Path) -> Result<GraphSelfMap, CliError> {
    let spec = GraphMapSpec::from_json(&read(path)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    spec.build().map_err(|e| match e {
        GraphMapError::Graph(g) => precondition(format!("{}: {g}", path.display())),
        other => CliError::Parse(format!("{}: {other}", path.display())),
    })
}

fn nas_of(
    f: &GraphSelfMap,
    stratum: Option<usize>,
    cfg: &AnalysisConfig,
) -> Result<NonattractingData, CliError> {
    let r = match stratum.or_else(|| f.topmost_eg()) {
        Some(r) => r,
        None => return Err(precondition("the map has no exponentially growing stratum")),
    };
    let z = nonattracting_subgraph(f, r, cfg.n_attraction).map_err(precondition)?;
    let sigma = select_sigma(f, r, cfg.nielsen_length_bound).map_err(precondition)?;
    build_nas(f, r, &z, sigma.as_ref()).map_err(precondition)
}

fn parse_lines<T>(
    text: &str,
    mut parse: impl FnMut(&str) -> Result<T, ParseError>,
) -> Result<Vec<T>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        out.push(
            parse(body)
                .map_err(|e| CliError::Parse(format!("corpus line {}: {}", i + 1, e.message)))?,
        );
    }
    Ok(out)
}

/// `[["c"], ["a b", "b a"]]`, folded in the given rank.
fn load_peripherals(text: &str, rank: usize) -> Result<SubgroupSystem, CliError> {
    let lists: Vec<Vec<String>> =
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut comps = Vec::new();
    for gens in lists {
        let words = gens
            .iter()
            .map(|g| parse_word(g, rank))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Parse(e.to_string()))?;
        comps.push(FoldedImmersion::fold(&words, rank).map_err(precondition)?);
    }
    Ok(SubgroupSystem::new(comps))
}

fn run_classify(a: &ClassifyArgs, exec: Execution) -> Result<(), CliError> {
    let cfg = load_config(a.config.as_deref())?;
    let text = read(&a.automorphism)?;
    let map = a.graph_map.as_deref().map(load_map).transpose()?;
    let rank = load_automorphism(&a.automorphism)?.phi.rank();
    let restrictions = match &a.restrictions {
        Some(p) => parse_restrictions(&read(p)?, rank)?,
        None => Vec::new(),
    };
    let report = classify(&text, map, a.stratum, &restrictions, &cfg, exec)?;
    let body = match a.output.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    emit(&body, a.output.out.as_deref())
}

fn run_nas(a: &NasArgs) -> Result<(), CliError> {
    let cfg = load_config(a.config.as_deref())?;
    let f = load_map(&a.graph_map)?
        .power(a.power)
        .map_err(precondition)?;
    let nas = nas_of(&f, Some(a.stratum), &cfg)?;
    emit_json(
        &nas.summary(&Basis::standard(f.induced().rank())),
        a.out.as_deref(),
    )
}

fn run_flare(kind: &FlareKind, exec: Execution) -> Result<(), CliError> {
    let (a, strict) = match kind {
        FlareKind::Conj(a) => (a, false),
        FlareKind::Strict(a) => (a, true),
        FlareKind::ThreeOfFour(a) => return run_three_of_four(a, exec),
    };
    let cfg = load_config(a.config.as_deref())?;
    let map = a.graph_map.as_deref().map(load_map).transpose()?;
    let phi: FreeAutomorphism = match (&a.automorphism, &map) {
        (Some(p), _) => load_automorphism(p)?.phi,
        (None, Some(f)) => f.induced().clone(),
        (None, None) => return Err(precondition("give --automorphism or --graph-map")),
    };
    let rank = phi.rank();
    let system = match (&map, &a.peripherals) {
        (Some(f), _) => nas_of(f, a.stratum, &cfg)?.system,
        (None, Some(p)) => load_peripherals(&read(p)?, rank)?,
        (None, None) => {
            return Err(precondition(
                "give --graph-map or --peripherals for the peripheral system",
            ))
        }
    };
    let s = ElectricSpace::new(
        rank,
        system,
        cfg.ball_radius,
        cfg.peripheral_enumeration_bound,
    );
    let corpus_text = a.corpus.as_deref().map(read).transpose()?;
    if strict {
        let words = match &corpus_text {
            Some(t) => parse_lines(t, |l| parse_word(l, rank))?,
            None => {
                let cons = Constraints {
                    cyclically_reduced: false,
                    not_carried_by: Some(s.peripherals()),
                };
                corpus_generate(rank, &cfg.corpus, &cons)
                    .map_err(precondition)?
                    .0
            }
        };
        let v =
            strict_flaring_search(&words, &phi, &s, cfg.n_strict, exec).map_err(precondition)?;
        emit_json(&v, a.out.as_deref())
    } else {
        let classes = class_list(corpus_text.as_deref(), rank, &cfg, Some(s.peripherals()))?;
        let v =
            conjugacy_flaring_search(&classes, &phi, &s, cfg.m_flare, cfg.conjugator_bound, exec)
                .map_err(precondition)?;
        emit_json(&v, a.out.as_deref())
    }
}

fn class_list(
    text: Option<&str>,
    rank: usize,
    cfg: &AnalysisConfig,
    avoid: Option<&SubgroupSystem>,
) -> Result<Vec<CyclicWord>, CliError> {
    match text {
        Some(t) => parse_lines(t, |l| parse_class(l, rank)),
        None => Ok(class_corpus(rank, &cfg.corpus, avoid)
            .map_err(precondition)?
            .0),
    }
}

fn run_three_of_four(a: &FourArgs, exec: Execution) -> Result<(), CliError> {
    let cfg = load_config(a.config.as_deref())?;
    let side = |p: &Path| -> Result<FlareSide, CliError> {
        let f = load_map(p)?;
        let nas = nas_of(&f, None, &cfg)?;
        FlareSide::new(nas, cfg.leaf_library_depth, None).map_err(precondition)
    };
    let phi = LaminationPair {
        plus: side(&a.phi_map)?,
        minus: side(&a.phi_inverse_map)?,
    };
    let psi = LaminationPair {
        plus: side(&a.psi_map)?,
        minus: side(&a.psi_inverse_map)?,
    };
    let standing = standing_assumptions_check(&phi, &psi);
    let phi_aut = phi.plus.map().induced().clone();
    let psi_aut = psi.plus.map().induced().clone();
    let rank = phi_aut.rank();
    if psi_aut.rank() != rank {
        return Err(precondition("φ and ψ act on free groups of different rank"));
    }
    let mut comps: Vec<FoldedImmersion> = phi.plus.nas.system.components().to_vec();
    comps.extend(psi.plus.nas.system.components().iter().cloned());
    let s = ElectricSpace::new(
        rank,
        SubgroupSystem::new(comps),
        cfg.ball_radius,
        cfg.peripheral_enumeration_bound,
    );
    let text = a.corpus.as_deref().map(read).transpose()?;
    let classes = class_list(text.as_deref(), rank, &cfg, Some(s.peripherals()))?;
    match three_of_four_test(
        &phi_aut,
        &psi_aut,
        &standing,
        a.allow_override,
        &classes,
        &s,
        cfg.m_flare,
        exec,
    ) {
        Ok(v) => emit_json(
            &serde_json::json!({ "standing": standing, "verdict": v }),
            a.out.as_deref(),
        ),
        Err(e) => {
            emit_json(
                &serde_json::json!({ "standing": standing, "refused": e.to_string() }),
                a.out.as_deref(),
            )?;
            Err(precondition(e))
        }
    }
}

fn run_electric(a: &ElectricArgs) -> Result<(), CliError> {
    let ptext = read(&a.peripherals)?;
    // infer the rank from every letter mentioned
    let probe = 26.max(a.rank.unwrap_or(0));
    let mut rank = a.rank.unwrap_or(1);
    let lists: Vec<Vec<String>> =
        serde_json::from_str(&ptext).map_err(|e| CliError::Parse(e.to_string()))?;
    for t in lists.iter().flatten().chain(std::iter::once(&a.word)) {
        let w = parse_word(t, probe).map_err(|e| CliError::Parse(e.to_string()))?;
        rank = rank.max(w.letters().iter().map(|l| l.generator()).max().unwrap_or(1));
    }
    if a.rank.is_some_and(|r| r < rank) {
        return Err(precondition(format!(
            "inputs use generators beyond rank {}",
            a.rank.unwrap()
        )));
    }
    let system = load_peripherals(&ptext, rank)?;
    let s = ElectricSpace::new(rank, system, a.ball_radius, a.enumeration_bound);
    let w: ReducedWord = parse_word(&a.word, rank).map_err(|e| CliError::Parse(e.to_string()))?;
    let len = if a.conjugacy {
        s.electric_conjugacy_length(&CyclicWord::from_word(&w), a.conjugator_bound)
    } else {
        s.electric_length(&w)
    }
    .map_err(precondition)?;
    let mut out = serde_json::json!({ "word": a.word, "rank": rank, "conjugacy": a.conjugacy, "length": len });
    if a.conjugacy {
        out["conjugator_bound"] = a.conjugator_bound.into();
    }
    out["enumeration_bound"] = a.enumeration_bound.into();
    emit_json(&out, None)
}

fn run_report(a: &ReportArgs) -> Result<(), CliError> {
    let text = match &a.input {
        Some(p) => read(p)?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            s
        }
    };
    let report: ClassificationReport =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let body = match a.output.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    emit(&body, a.output.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                par::init_workers(n);
            }
            _ => eprintln!("warning: ignoring {WORKERS_ENV}={v}"),
        }
    }
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = match &cli.command {
        Command::Classify(a) => run_classify(a, exec),
        Command::Nas(a) => run_nas(a),
        Command::Flare { kind } => run_flare(kind, exec),
        Command::ElectricDist(a) => run_electric(a),
        Command::Report(a) => run_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
