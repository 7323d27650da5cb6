use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mas_attribution::arena::{
    arena_hkg, run_match, run_match_with_events, MatchConfig, MatchEvent, PolicyKind, TeamSetup,
};
use mas_attribution::hkg::{build_hkg, parse_roster, HkgGraph};
use mas_attribution::report::{
    run_analysis, AttributionReport, GraphSource, Matchup, MethodSelection, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "mas-attribution",
    version,
    about = "Shapley and Myerson attribution of agent policies and attributes in the Arena environment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the attribution analysis over a matchup matrix and emit reports.
    Run(RunArgs),
    /// Play a single Arena match and print its outcome.
    Play(PlayArgs),
    /// Build a knowledge graph from a roster and print or save it.
    Hkg(HkgArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags below override individual fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated matchups, e.g. "smart:random,noop:noop".
    /// Policies: random, smart, noop, rl. Default: the full 4x4 matrix.
    #[arg(long)]
    matchups: Option<String>,
    /// Number of rollout simulations per coalition analysis.
    #[arg(long = "n")]
    simulations: Option<usize>,
    /// Master seed for all rollouts.
    #[arg(long)]
    seed: Option<u64>,
    /// Analysis method: shapley, myerson or both.
    #[arg(long, value_parser = parse_method)]
    method: Option<MethodSelection>,
    /// Interaction graph: "hkg" (built-in), "complete", or a graph file.
    #[arg(long, value_parser = parse_graph)]
    graph: Option<GraphSource>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Write one line per simulator call to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct PlayArgs {
    /// Match configuration as JSON; alternatively use --team-a/--team-b.
    #[arg(long, conflicts_with_all = ["team_a", "team_b"])]
    config: Option<PathBuf>,
    /// Policy of team A (default attributes).
    #[arg(long, value_parser = parse_policy)]
    team_a: Option<PolicyKind>,
    /// Policy of team B (default attributes).
    #[arg(long, value_parser = parse_policy)]
    team_b: Option<PolicyKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the per-action event log as CSV.
    #[arg(long)]
    events: Option<PathBuf>,
}

#[derive(Args)]
struct HkgArgs {
    /// Roster JSON ({"agents": [...]}); defaults to the built-in Arena roster.
    #[arg(long)]
    roster: Option<PathBuf>,
    /// Print the graph as JSON instead of a plain edge list.
    #[arg(long)]
    json: bool,
    /// Write the graph here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the player-index table (JSON) here.
    #[arg(long)]
    table: Option<PathBuf>,
}

fn parse_policy(s: &str) -> Result<PolicyKind, String> {
    s.parse().map_err(|e: mas_attribution::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<MethodSelection, String> {
    s.parse().map_err(|e: mas_attribution::Error| e.to_string())
}

fn parse_graph(s: &str) -> Result<GraphSource, String> {
    s.parse().map_err(|e: mas_attribution::Error| e.to_string())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Play(args) => cmd_play(args),
        Command::Hkg(args) => cmd_hkg(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(matchups) = &args.matchups {
        config.matchups = matchups
            .split(',')
            .map(|m| m.trim().parse::<Matchup>())
            .collect::<mas_attribution::Result<_>>()?;
    }
    if let Some(n) = args.simulations {
        config.simulations = n;
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(method) = args.method {
        config.methods = method;
    }
    if let Some(graph) = args.graph {
        config.graph = graph;
    }
    if args.out_csv.is_some() {
        config.out_csv = args.out_csv;
    }
    if args.out_json.is_some() {
        config.out_json = args.out_json;
    }
    if args.trace.is_some() {
        config.trace = args.trace;
    }
    if args.threads.is_some() {
        config.threads = args.threads;
    }

    let report = run_analysis(&config)?;
    print_report(&report);
    for path in [&config.out_csv, &config.out_json, &config.trace]
        .into_iter()
        .flatten()
    {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_report(report: &AttributionReport) {
    for matchup in &report.matchups {
        println!();
        println!("=== {} vs {} ===", matchup.team_a, matchup.team_b);
        for method in &matchup.methods {
            println!(
                "{:<8} sigma = {:>7.2}   {} distinct evals/sim, {} calls, {:.2}s",
                method.method,
                method.total_score,
                method.distinct_evaluations_per_simulation,
                method.total_simulator_calls,
                method.wall_time.as_secs_f64(),
            );
        }
        if let Some(speedup) = matchup.speedup {
            println!("myerson speedup: {speedup:.1}x");
        }
        println!("{:<28} {:>10}  stars", "player", "mean");
        let reference = &matchup.methods[0];
        for (i, player) in reference.players.iter().enumerate() {
            let cross = matchup
                .cross_tests
                .as_ref()
                .map(|t| t[i].stars.as_str())
                .unwrap_or("");
            let mut line = format!(
                "{:<28} {:>10.2}  {}",
                player.player, player.mean, player.stars
            );
            if !cross.is_empty() {
                line.push_str(&format!("  [methods differ {cross}]"));
            }
            println!("{line}");
        }
    }
}

fn cmd_play(args: PlayArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let mut config: MatchConfig =
                serde_json::from_str(&text).with_context(|| "parsing match configuration")?;
            if args.seed != 0 {
                config.seed = args.seed;
            }
            config
        }
        None => {
            let (Some(a), Some(b)) = (args.team_a, args.team_b) else {
                bail!("either --config or both --team-a and --team-b are required");
            };
            MatchConfig {
                team_a: TeamSetup::uniform(a),
                team_b: TeamSetup::uniform(b),
                seed: args.seed,
                t_max: mas_attribution::arena::ROUND_LIMIT,
            }
        }
    };
    config.validate()?;

    if let Some(path) = &args.events {
        let (outcome, events) = run_match_with_events(&config);
        let mut body = String::from(MatchEvent::CSV_HEADER);
        body.push('\n');
        for event in &events {
            body.push_str(&event.to_csv_row());
            body.push('\n');
        }
        fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
        println!("r={} T={} S={}", outcome.result, outcome.rounds, outcome.score);
        println!("wrote {} events to {}", events.len(), path.display());
    } else {
        let outcome = run_match(&config);
        println!("r={} T={} S={}", outcome.result, outcome.rounds, outcome.score);
    }
    Ok(())
}

fn cmd_hkg(args: HkgArgs) -> Result<()> {
    let hkg: HkgGraph = match &args.roster {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            build_hkg(&parse_roster(&text)?)?
        }
        None => arena_hkg(),
    };
    let body = if args.json {
        hkg.graph().to_json()
    } else {
        hkg.graph().to_edge_list()
    };
    match &args.out {
        Some(path) => {
            fs::write(path, &body).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{body}"),
    }
    if let Some(path) = &args.table {
        fs::write(path, hkg.player_table_json())
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
