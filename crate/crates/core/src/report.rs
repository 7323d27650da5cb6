//! End-to-end orchestration: run a matrix of policy matchups under one or
//! both analysis methods and emit the aggregated report.
//!
//! The JSON report is byte-stable for a fixed configuration: wall-clock
//! timings are kept in memory (and printed by the CLI) but never
//! serialized, so identical runs produce identical files regardless of
//! thread count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::arena::{arena_analysis, arena_hkg, PolicyKind};
use crate::coalition::PlayerId;
use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::rollout::{
    rollout_myerson_with, rollout_shapley_with, RolloutOptions, RolloutRun,
};
use crate::stats::{mann_whitney_u, zero_atom_test};

pub const ARENA_PLAYERS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MethodSelection {
    Shapley,
    Myerson,
    #[default]
    Both,
}

impl MethodSelection {
    pub fn includes_shapley(self) -> bool {
        matches!(self, MethodSelection::Shapley | MethodSelection::Both)
    }

    pub fn includes_myerson(self) -> bool {
        matches!(self, MethodSelection::Myerson | MethodSelection::Both)
    }
}

impl std::str::FromStr for MethodSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "shapley" => Ok(MethodSelection::Shapley),
            "myerson" => Ok(MethodSelection::Myerson),
            "both" => Ok(MethodSelection::Both),
            other => Err(Error::MatchConfig(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matchup {
    pub team_a: PolicyKind,
    pub team_b: PolicyKind,
}

impl Matchup {
    pub fn new(team_a: PolicyKind, team_b: PolicyKind) -> Self {
        Matchup { team_a, team_b }
    }

    pub fn label(&self) -> String {
        format!("{}-vs-{}", self.team_a, self.team_b)
    }
}

impl std::str::FromStr for Matchup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::MatchConfig(format!("matchup `{s}` must look like a:b")))?;
        Ok(Matchup {
            team_a: a.trim().parse()?,
            team_b: b.trim().parse()?,
        })
    }
}

/// Where the interaction graph for the Myerson side comes from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GraphSource {
    /// The built-in Arena knowledge graph.
    #[default]
    BuiltinHkg,
    /// A complete graph; collapses the Myerson analysis onto Shapley.
    Complete,
    /// An edge-list or JSON graph file.
    File(PathBuf),
}

impl From<GraphSource> for String {
    fn from(source: GraphSource) -> String {
        match source {
            GraphSource::BuiltinHkg => "hkg".into(),
            GraphSource::Complete => "complete".into(),
            GraphSource::File(path) => path.display().to_string(),
        }
    }
}

impl TryFrom<String> for GraphSource {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl std::str::FromStr for GraphSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hkg" => Ok(GraphSource::BuiltinHkg),
            "complete" => Ok(GraphSource::Complete),
            path => Ok(GraphSource::File(PathBuf::from(path))),
        }
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", String::from(self.clone()))
    }
}

pub const DEFAULT_SIMULATIONS: usize = 72;

fn default_simulations() -> usize {
    DEFAULT_SIMULATIONS
}

/// The full 4x4 policy matrix.
pub fn all_matchups() -> Vec<Matchup> {
    let kinds = [
        PolicyKind::Random,
        PolicyKind::Smart,
        PolicyKind::NoOp,
        PolicyKind::ScriptedRl,
    ];
    let mut out = Vec::with_capacity(16);
    for a in kinds {
        for b in kinds {
            out.push(Matchup::new(a, b));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub matchups: Vec<Matchup>,
    pub simulations: usize,
    pub master_seed: u64,
    pub methods: MethodSelection,
    pub graph: GraphSource,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            matchups: all_matchups(),
            simulations: default_simulations(),
            master_seed: 0,
            methods: MethodSelection::Both,
            graph: GraphSource::BuiltinHkg,
            out_csv: None,
            out_json: None,
            trace: None,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MatchConfig(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayerAttribution {
    pub player: String,
    pub mean: f64,
    pub p_zero: f64,
    pub stars: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub method: String,
    /// Mean full-coalition score over all simulations.
    pub total_score: f64,
    pub distinct_evaluations_per_simulation: u64,
    pub total_simulator_calls: u64,
    /// Kept out of the serialized report so files stay byte-stable.
    #[serde(skip)]
    pub wall_time: Duration,
    pub players: Vec<PlayerAttribution>,
    /// Full per-simulation matrix, one row per simulation index.
    pub samples: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossTest {
    pub player: String,
    pub p_value: f64,
    pub stars: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchupReport {
    pub team_a: String,
    pub team_b: String,
    pub methods: Vec<MethodReport>,
    /// Shapley-vs-Myerson distribution tests, present when both ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_tests: Option<Vec<CrossTest>>,
    /// Shapley wall time over Myerson wall time, when both ran.
    #[serde(skip)]
    pub speedup: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttributionReport {
    pub tool_version: String,
    pub config: RunConfig,
    pub matchups: Vec<MatchupReport>,
}

fn method_report(label: &str, labels: &[String], run: &RolloutRun) -> Result<MethodReport> {
    let samples = &run.samples;
    let means = samples.means();
    let mut players = Vec::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        let column = samples.player_samples(PlayerId::new(i));
        let test = zero_atom_test(&column)?;
        players.push(PlayerAttribution {
            player: label.clone(),
            mean: means[i],
            p_zero: test.p_value,
            stars: test.stars.as_str().to_string(),
        });
    }
    let matrix: Vec<Vec<f64>> = (0..samples.n_simulations())
        .map(|s| samples.row(s).to_vec())
        .collect();
    Ok(MethodReport {
        method: label.to_string(),
        total_score: samples.mean_full_score(),
        distinct_evaluations_per_simulation: run.counter.distinct_evaluations_per_simulation,
        total_simulator_calls: run.counter.total_simulator_calls,
        wall_time: run.counter.wall_time,
        players,
        samples: matrix,
    })
}

fn resolve_graph(source: &GraphSource) -> Result<InteractionGraph> {
    let graph = match source {
        GraphSource::BuiltinHkg => arena_hkg().graph().clone(),
        GraphSource::Complete => InteractionGraph::complete(ARENA_PLAYERS),
        GraphSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            InteractionGraph::from_text(&text)?
        }
    };
    if graph.node_count() != ARENA_PLAYERS {
        return Err(Error::GraphSizeMismatch {
            graph: graph.node_count(),
            game: ARENA_PLAYERS,
        });
    }
    Ok(graph)
}

/// Run every configured matchup under the selected methods and aggregate
/// means, zero-atom significance, cross-method tests and evaluation counts.
/// Writes the CSV/JSON/trace outputs when paths are configured.
pub fn run_analysis(config: &RunConfig) -> Result<AttributionReport> {
    if config.simulations == 0 {
        return Err(Error::NoSimulations);
    }
    if config.matchups.is_empty() {
        return Err(Error::NoMatchups);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    let report = pool.install(|| analyze(config))?;
    emit_report(&report, config.out_csv.as_deref(), config.out_json.as_deref())?;
    Ok(report)
}

fn analyze(config: &RunConfig) -> Result<AttributionReport> {
    let graph = resolve_graph(&config.graph)?;
    let options = RolloutOptions {
        collect_trace: config.trace.is_some(),
    };
    let mut trace_lines: Vec<String> = Vec::new();
    let mut matchups = Vec::with_capacity(config.matchups.len());

    for matchup in &config.matchups {
        let analysis = arena_analysis(matchup.team_a, matchup.team_b);
        let labels = analysis.game.labels().to_vec();
        let mut methods = Vec::new();
        let mut shapley_run = None;
        let mut myerson_run = None;

        if config.methods.includes_shapley() {
            let run = rollout_shapley_with(
                &analysis.game,
                &analysis.baselines,
                &analysis.real_values,
                &analysis.binding,
                config.simulations,
                config.master_seed,
                &options,
            )?;
            methods.push(method_report("shapley", &labels, &run)?);
            collect_trace(&mut trace_lines, matchup, "shapley", &run);
            shapley_run = Some(run);
        }
        if config.methods.includes_myerson() {
            let run = rollout_myerson_with(
                &analysis.game,
                &graph,
                &analysis.baselines,
                &analysis.real_values,
                &analysis.binding,
                config.simulations,
                config.master_seed,
                &options,
            )?;
            log::info!(
                "{}: myerson evaluates {} distinct coalitions per simulation",
                matchup.label(),
                run.counter.distinct_evaluations_per_simulation
            );
            methods.push(method_report("myerson", &labels, &run)?);
            collect_trace(&mut trace_lines, matchup, "myerson", &run);
            myerson_run = Some(run);
        }

        let (cross_tests, speedup) = match (&shapley_run, &myerson_run) {
            (Some(shap), Some(mye)) => {
                let mut tests = Vec::with_capacity(labels.len());
                for (i, label) in labels.iter().enumerate() {
                    let a = shap.samples.player_samples(PlayerId::new(i));
                    let b = mye.samples.player_samples(PlayerId::new(i));
                    let t = mann_whitney_u(&a, &b)?;
                    tests.push(CrossTest {
                        player: label.clone(),
                        p_value: t.p_value,
                        stars: t.stars.as_str().to_string(),
                    });
                }
                let ratio = shap.counter.wall_time.as_secs_f64()
                    / mye.counter.wall_time.as_secs_f64().max(f64::MIN_POSITIVE);
                (Some(tests), Some(ratio))
            }
            _ => (None, None),
        };

        matchups.push(MatchupReport {
            team_a: matchup.team_a.to_string(),
            team_b: matchup.team_b.to_string(),
            methods,
            cross_tests,
            speedup,
        });
    }

    if let Some(path) = &config.trace {
        let body = trace_lines.join("\n") + "\n";
        fs::write(path, body).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }

    // worker-pool sizing is an execution detail, not part of the analysis
    // identity, so the echoed config drops it and reports stay byte-stable
    // across thread counts
    let mut echo = config.clone();
    echo.threads = None;
    Ok(AttributionReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: echo,
        matchups,
    })
}

fn collect_trace(lines: &mut Vec<String>, matchup: &Matchup, method: &str, run: &RolloutRun) {
    if run.trace.is_empty() {
        return;
    }
    lines.extend(run.trace.iter().map(|entry| {
        format!(
            "matchup={} method={} {}",
            matchup.label(),
            method,
            entry.to_line()
        )
    }));
}

pub const CSV_HEADER: &str = "team_a,team_b,method,player,mean,stars,cross_stars,total_score";

/// One row per (matchup, player, method); the cross-test column is empty
/// unless both methods ran. Decimal points, no locale.
pub fn report_csv(report: &AttributionReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for matchup in &report.matchups {
        for method in &matchup.methods {
            for (i, player) in method.players.iter().enumerate() {
                let cross = matchup
                    .cross_tests
                    .as_ref()
                    .map(|tests| tests[i].stars.as_str())
                    .unwrap_or("");
                out.push_str(&format!(
                    "{},{},{},{},{:.6},{},{},{:.6}\n",
                    matchup.team_a,
                    matchup.team_b,
                    method.method,
                    player.player,
                    player.mean,
                    player.stars,
                    cross,
                    method.total_score,
                ));
            }
        }
    }
    out
}

/// Pretty-printed JSON, byte-stable for a fixed configuration and seed.
pub fn report_json(report: &AttributionReport) -> String {
    let mut text =
        serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    text.push('\n');
    text
}

pub fn emit_report(
    report: &AttributionReport,
    csv_path: Option<&Path>,
    json_path: Option<&Path>,
) -> Result<()> {
    if let Some(path) = csv_path {
        fs::write(path, report_csv(report)).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    if let Some(path) = json_path {
        fs::write(path, report_json(report)).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}
