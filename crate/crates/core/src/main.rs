use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use iad::dynamics::{run, DynamicsConfig, Mode, Sampling};
use iad::experiment::{self, Experiment, ExperimentConfig};
use iad::generators::{
    er_endorsement, er_endorsement_with, mirror_attack, planted_scenario, tree_condition_instance,
    CheaterStrategy, HonestStrategy, MirrorAccusations, ScenarioSpec,
};
use iad::io::{self as iio, Dedup, SymbolTable};
use iad::motif::{census_report, Depth};
use iad::observer::{
    identify_by_largest_scc, identify_by_scc_candidates, implication_screen,
    largest_self_consistent_insular_set, largest_self_consistent_set, SearchBudget, Verdict,
    VerdictLabels,
};
use iad::{Error, Partition, Result, SignedDigraph};

#[derive(Parser)]
#[command(
    name = "iad",
    version,
    about = "Signed endorsement/accusation networks: motifs, observers and implication-avoiding dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Motif census against the Erdős–Rényi baseline.
    Census(CensusArgs),
    /// One dynamics trajectory.
    Simulate(SimulateArgs),
    /// Final accusation fraction over a grid of edge probabilities.
    Sweep(SweepArgs),
    /// Label nodes as credible or implicated.
    Identify(IdentifyArgs),
    /// Write a generated graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "keep-latest")]
    dedup: DedupArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum DedupArg {
    KeepLatest,
    KeepFirst,
    Error,
}

impl From<DedupArg> for Dedup {
    fn from(d: DedupArg) -> Self {
        match d {
            DedupArg::KeepLatest => Dedup::KeepLatest,
            DedupArg::KeepFirst => Dedup::KeepFirst,
            DedupArg::Error => Dedup::Error,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Local,
    Strong,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Local => Mode::Local,
            ModeArg::Strong => Mode::Strong,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    AllNodes,
    ImplicatedOnly,
}

impl From<SamplingArg> for Sampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::AllNodes => Sampling::AllNodes,
            SamplingArg::ImplicatedOnly => Sampling::ImplicatedOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DepthArg {
    Local,
    Deep,
}

impl From<DepthArg> for Depth {
    fn from(d: DepthArg) -> Self {
        match d {
            DepthArg::Local => Depth::Local,
            DepthArg::Deep => Depth::Deep,
        }
    }
}

#[derive(Args)]
struct DynamicsArgs {
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Local)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1500)]
    steps: u64,
    #[arg(long, value_enum, default_value_t = SamplingArg::AllNodes)]
    sampling: SamplingArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Start from this edge list instead of a generated graph.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "keep-latest")]
    dedup: DedupArg,
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 0.27)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    accusations: usize,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    #[arg(long, default_value_t = 1)]
    thinning: u64,
    /// Trajectory CSV; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the starting graph here.
    #[arg(long)]
    initial_graph: Option<PathBuf>,
    /// Also write the final graph here.
    #[arg(long)]
    final_graph: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 30)]
    n: usize,
    /// Comma-separated edge probabilities.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5"
    )]
    p_grid: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    accusations: usize,
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    /// Summary CSV; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-replicate outcomes CSV.
    #[arg(long)]
    outcomes: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    /// Implicated nodes and their upstream endorsers.
    Screen,
    /// Downstream set of the largest endorsement component.
    Scc,
    /// Downstream set of the one component whose split meets the
    /// identification hypothesis.
    SccCandidates,
    /// Largest self-consistent set.
    SelfConsistent,
    /// Largest self-consistent insular set.
    Insular,
}

#[derive(Args)]
struct IdentifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "keep-latest")]
    dedup: DedupArg,
    #[arg(long, value_enum, default_value_t = Strategy::Screen)]
    strategy: Strategy,
    #[arg(long, value_enum, default_value_t = DepthArg::Local)]
    depth: DepthArg,
    /// Node cap for exact searches.
    #[arg(long, default_value_t = 128)]
    budget: usize,
    /// Wall-clock cap for exact searches, in seconds.
    #[arg(long)]
    time_cap: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Er,
    Planted,
    Mirror,
    Tree,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 0.27)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    accusations: usize,
    #[arg(long, default_value_t = 6)]
    n_honest: usize,
    #[arg(long, default_value_t = 2)]
    n_cheaters: usize,
    /// Honest strategies, comma-separated: `random:<degree>`, `path`, `coverage`.
    #[arg(long, value_delimiter = ',', default_value = "random:2")]
    honest: Vec<String>,
    /// `silent`, `mixed:<p_pos>:<p_neg>`, `mirror` or `accuse:<rate>`.
    #[arg(long, default_value = "silent")]
    cheater: String,
    /// Mirror attack: honest node and double accuse each other.
    #[arg(long)]
    doppelganger: bool,
    /// Mirror attack: probability of each mirrored cross accusation.
    #[arg(long, default_value_t = 0.0)]
    cross_rate: f64,
    #[arg(long)]
    no_shuffle: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Roles CSV (node,role) for generators with a planted partition.
    #[arg(long)]
    partition: Option<PathBuf>,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &PathBuf, dedup: DedupArg) -> Result<iio::LoadedGraph> {
    let loaded = iio::load_edge_list(path, dedup.into())?;
    for w in &loaded.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(loaded)
}

fn dynamics_config(a: &DynamicsArgs, thinning: u64) -> DynamicsConfig {
    DynamicsConfig {
        alpha: a.alpha,
        beta: a.beta,
        mode: a.mode.into(),
        max_steps: a.steps,
        seed: a.seed,
        stream: 0,
        thinning,
        sampling: a.sampling.into(),
    }
}

fn census(a: CensusArgs) -> Result<()> {
    let loaded = load(&a.input, a.dedup)?;
    let report = census_report(&loaded.graph)?;
    let cfg = ExperimentConfig {
        experiment: Experiment::CensusTable {
            input: a.input.clone(),
            dedup: a.dedup.into(),
        },
        ..ExperimentConfig::default()
    };
    let mut out = sink(&a.output)?;
    match a.format {
        Format::Csv => iio::write_census_report(&report, &cfg.metadata(), &mut out)?,
        Format::Text => out.write_all(iio::render_census_text(&report).as_bytes())?,
    }
    out.flush()?;
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let cfg = dynamics_config(&a.dynamics, a.thinning);
    cfg.validate()?;
    let (initial, labels) = match &a.input {
        Some(path) => {
            let l = load(path, a.dedup)?;
            (l.graph, Some(l.labels))
        }
        None => {
            let mut rng = cfg.rng();
            rng.set_stream(u64::MAX);
            (
                er_endorsement_with(a.n, a.p, a.accusations, &mut rng)?,
                None,
            )
        }
    };
    let (last, stats) = run(&initial, &cfg)?;
    let mut meta = vec![
        (
            "software".to_string(),
            format!("iad {}", env!("CARGO_PKG_VERSION")),
        ),
        ("seed".to_string(), a.dynamics.seed.to_string()),
        ("alpha".to_string(), cfg.alpha.to_string()),
        ("beta".to_string(), cfg.beta.to_string()),
        ("mode".to_string(), format!("{:?}", cfg.mode)),
        ("sampling".to_string(), format!("{:?}", cfg.sampling)),
        ("steps".to_string(), cfg.max_steps.to_string()),
    ];
    match &a.input {
        Some(p) => meta.push(("input".into(), p.display().to_string())),
        None => meta.extend([
            ("n".to_string(), a.n.to_string()),
            ("p".to_string(), a.p.to_string()),
            ("accusations".to_string(), a.accusations.to_string()),
        ]),
    }
    let mut out = sink(&a.output)?;
    iio::write_trajectory(&stats, &meta, &mut out)?;
    out.flush()?;
    if let Some(p) = &a.initial_graph {
        iio::save_edge_list(&initial, labels.as_ref(), p)?;
    }
    if let Some(p) = &a.final_graph {
        iio::save_edge_list(&last, labels.as_ref(), p)?;
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let d = &a.dynamics;
    let cfg = ExperimentConfig {
        experiment: Experiment::PhaseSweep,
        n: a.n,
        p_grid: a.p_grid.clone(),
        accusations: a.accusations,
        replicates: a.replicates,
        steps: d.steps,
        alpha: d.alpha,
        beta: d.beta,
        mode: d.mode.into(),
        sampling: d.sampling.into(),
        seed: d.seed,
        ..ExperimentConfig::default()
    };
    cfg.validate()?;
    let outcomes = experiment::replicate_outcomes(&cfg, &cfg.p_grid)?;
    if let Some(p) = &a.outcomes {
        experiment::write_outcomes(&outcomes, &cfg.metadata(), BufWriter::new(File::create(p)?))?;
    }
    let points = experiment::summarize(&outcomes, cfg.replicates);
    let mut out = sink(&a.output)?;
    experiment::write_sweep(&points, &cfg.metadata(), &mut out)?;
    out.flush()?;
    Ok(())
}

fn labels_from_set(n: usize, credible: &iad::NodeSet) -> VerdictLabels {
    let mut v = VerdictLabels::uniform(n, Verdict::ImplicatedC);
    for &u in credible {
        v.set(u, Verdict::CredibleH);
    }
    v
}

fn identify(a: IdentifyArgs) -> Result<()> {
    let loaded = load(&a.input, a.dedup)?;
    let g = &loaded.graph;
    let budget = SearchBudget {
        max_nodes_exact: a.budget,
        time_cap: a.time_cap.map(Duration::from_secs_f64),
        ..SearchBudget::default()
    };
    let verdicts = match a.strategy {
        Strategy::Screen => implication_screen(g, a.depth.into()),
        Strategy::Scc => identify_by_largest_scc(g)?,
        Strategy::SccCandidates => identify_by_scc_candidates(g)?,
        Strategy::SelfConsistent => labels_from_set(
            g.node_count(),
            &largest_self_consistent_set(g, None, &budget)?,
        ),
        Strategy::Insular => labels_from_set(
            g.node_count(),
            &largest_self_consistent_insular_set(g, &budget)?,
        ),
    };
    let meta = vec![
        (
            "software".to_string(),
            format!("iad {}", env!("CARGO_PKG_VERSION")),
        ),
        ("input".to_string(), a.input.display().to_string()),
        (
            "strategy".to_string(),
            a.strategy
                .to_possible_value()
                .map_or_else(String::new, |v| v.get_name().to_string()),
        ),
    ];
    let mut out = sink(&a.output)?;
    iio::write_verdicts(&verdicts, Some(&loaded.labels), &meta, &mut out)?;
    out.flush()?;
    Ok(())
}

fn parse_honest(spec: &str) -> Result<HonestStrategy> {
    let bad = || Error::InvalidConfig(format!("unknown honest strategy {spec:?}"));
    let mut parts = spec.split(':');
    match parts.next() {
        Some("random") => {
            let deg = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            Ok(HonestStrategy::RandomEndorse {
                expected_degree: deg,
            })
        }
        Some("path") => Ok(HonestStrategy::HamiltonianAccusePath),
        Some("coverage") => Ok(HonestStrategy::FullAccuseCoverage),
        _ => Err(bad()),
    }
}

fn parse_cheater(spec: &str) -> Result<CheaterStrategy> {
    let bad = || Error::InvalidConfig(format!("unknown cheater strategy {spec:?}"));
    let nums: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| -> Result<f64> { nums.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
    match nums[0] {
        "silent" => Ok(CheaterStrategy::Silent),
        "mirror" => Ok(CheaterStrategy::Mirror),
        "mixed" => Ok(CheaterStrategy::RandomMixed {
            p_pos: num(1)?,
            p_neg: num(2)?,
        }),
        "accuse" => Ok(CheaterStrategy::AccuseHonest { rate: num(1)? }),
        _ => Err(bad()),
    }
}

fn write_partition(part: &Partition, path: &PathBuf) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["node", "role"])?;
    for u in 0..part.len() {
        let role = if part.is_honest(u) {
            "honest"
        } else {
            "cheater"
        };
        w.write_record([u.to_string(), role.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<()> {
    let (g, part): (SignedDigraph, Option<Partition>) = match a.kind {
        Kind::Er => (er_endorsement(a.n, a.p, a.accusations, a.seed)?, None),
        Kind::Planted => {
            let honest = a
                .honest
                .iter()
                .map(|s| parse_honest(s))
                .collect::<Result<Vec<_>>>()?;
            let spec = ScenarioSpec {
                n_honest: a.n_honest,
                n_cheaters: a.n_cheaters,
                honest,
                cheater: parse_cheater(&a.cheater)?,
                shuffle: !a.no_shuffle,
                seed: a.seed,
            };
            let (g, p) = planted_scenario(&spec)?;
            (g, Some(p))
        }
        Kind::Mirror => {
            let g_h = er_endorsement(a.n, a.p, 0, a.seed)?;
            let pattern = MirrorAccusations {
                doppelganger: a.doppelganger,
                random_rate: a.cross_rate,
            };
            let (g, p, _) = mirror_attack(&g_h, pattern, a.seed)?;
            (g, Some(p))
        }
        Kind::Tree => {
            let (g, p) = tree_condition_instance(a.seed)?;
            (g, Some(p))
        }
    };
    let mut out = sink(&a.output)?;
    iio::write_edge_list(&g, Some(&SymbolTable::numeric(g.node_count())), &mut out)?;
    out.flush()?;
    if let Some(path) = &a.partition {
        let part = part.ok_or_else(|| {
            Error::InvalidConfig("this generator has no planted partition".into())
        })?;
        write_partition(&part, path)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Census(a) => census(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Identify(a) => identify(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
