//! Simulator-backed characteristic functions: the replacement rule, rollout
//! seeding, per-simulation memoization and the sampled Shapley/Myerson
//! computations.
//!
//! A simulator can only run fully specified systems, so a coalition is
//! completed into a full assignment by substituting each absent player's
//! baseline value. The all-baseline assignment must simulate to exactly 0;
//! that contract is probed once before any analysis.
//!
//! Each simulation index `n` keeps its own memo of coalition scores so the
//! `N` samples stay independent draws, and every rollout seed is a stable
//! hash of `(master_seed, n, coalition bits)`. Both methods key seeds the
//! same way, which makes a complete graph reproduce the plain Shapley
//! rollout bit for bit.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::coalition::{
    accumulate_player, shapley_weights, sorted_masks, Coalition, GameSpec, PlayerId,
};
use crate::error::{Error, Result, SimulatorError};
use crate::graph::{DecompositionPlan, InteractionGraph};

/// Per-player baseline values; substituting all of them must neutralize the
/// system (`f(Ξ) = 0`).
#[derive(Debug, Clone)]
pub struct BaselineSet<V> {
    values: Vec<V>,
}

impl<V> BaselineSet<V> {
    pub fn new(values: Vec<V>) -> Self {
        BaselineSet { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }
}

/// A complete, simulatable per-player assignment: each player carries either
/// its real value or its baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct FullAssignment<V> {
    values: Vec<V>,
}

impl<V> FullAssignment<V> {
    pub fn new(values: Vec<V>) -> Self {
        FullAssignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn get(&self, player: PlayerId) -> &V {
        &self.values[player.index()]
    }
}

/// Deterministic simulator: same assignment and seed, same score.
pub trait Simulator: Sync {
    type Value: Clone + Send + Sync;

    fn simulate(
        &self,
        assignment: &FullAssignment<Self::Value>,
        seed: u64,
    ) -> std::result::Result<f64, SimulatorError>;
}

/// Complete a coalition into a full assignment: members keep their real
/// values, everyone else drops to the baseline.
pub fn apply_replacement<V: Clone>(
    baselines: &BaselineSet<V>,
    coalition: Coalition,
    real_values: &FullAssignment<V>,
) -> FullAssignment<V> {
    debug_assert_eq!(baselines.len(), real_values.len());
    let values = real_values
        .values
        .iter()
        .zip(&baselines.values)
        .enumerate()
        .map(|(j, (real, baseline))| {
            if coalition.bits() & (1 << j) != 0 {
                real.clone()
            } else {
                baseline.clone()
            }
        })
        .collect();
    FullAssignment { values }
}

fn replace_into<V: Clone>(
    baselines: &BaselineSet<V>,
    bits: u32,
    real_values: &FullAssignment<V>,
    buf: &mut FullAssignment<V>,
) {
    buf.values.clear();
    for (j, (real, baseline)) in real_values
        .values
        .iter()
        .zip(&baselines.values)
        .enumerate()
    {
        buf.values.push(if bits & (1 << j) != 0 {
            real.clone()
        } else {
            baseline.clone()
        });
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable 64-bit rollout seed for one coalition of one simulation index.
/// Both analysis methods use this same keying, so a coalition that happens
/// to be evaluated by both receives the identical stochastic rollout.
pub fn rollout_seed(master_seed: u64, simulation: usize, coalition: Coalition) -> u64 {
    let a = splitmix64(master_seed ^ (simulation as u64).wrapping_mul(0xA076_1D64_78BD_642F));
    splitmix64(a ^ u64::from(coalition.bits()).wrapping_mul(0xE703_7ED1_A0B4_28DB))
}

/// Seed used for the one-off `f(Ξ) = 0` contract probe.
pub const BASELINE_PROBE_SEED: u64 = 0xBA5E_11E0_5EED_0001;

/// Instrumentation for one rollout analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalCounter {
    /// Distinct characteristic evaluations per simulation index.
    pub distinct_evaluations_per_simulation: u64,
    /// Total simulator invocations across all simulation indices.
    pub total_simulator_calls: u64,
    pub wall_time: Duration,
}

/// One simulator call, for the audit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub simulation: usize,
    pub coalition: Coalition,
    pub seed: u64,
    pub score: f64,
}

impl TraceEntry {
    pub fn to_line(&self) -> String {
        format!(
            "sim={} coalition={:#06x} seed={} score={}",
            self.simulation, self.coalition, self.seed, self.score
        )
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RolloutOptions {
    pub collect_trace: bool,
}

/// `N × |C|` matrix of per-simulation attribution values. Each row sums,
/// in player order, to exactly that simulation's full-coalition score.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    n_players: usize,
    values: Vec<f64>,
    full_scores: Vec<f64>,
}

impl SampleMatrix {
    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn n_simulations(&self) -> usize {
        self.full_scores.len()
    }

    pub fn row(&self, simulation: usize) -> &[f64] {
        let lo = simulation * self.n_players;
        &self.values[lo..lo + self.n_players]
    }

    /// Full-coalition score of one simulation index.
    pub fn full_score(&self, simulation: usize) -> f64 {
        self.full_scores[simulation]
    }

    pub fn full_scores(&self) -> &[f64] {
        &self.full_scores
    }

    /// The sample distribution of one player across all simulations.
    pub fn player_samples(&self, player: PlayerId) -> Vec<f64> {
        (0..self.n_simulations())
            .map(|s| self.values[s * self.n_players + player.index()])
            .collect()
    }

    /// Per-player mean over all simulations.
    pub fn means(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_players];
        for s in 0..self.n_simulations() {
            for (acc, v) in out.iter_mut().zip(self.row(s)) {
                *acc += v;
            }
        }
        let n = self.n_simulations() as f64;
        for acc in &mut out {
            *acc /= n;
        }
        out
    }

    /// Mean full-coalition score: the headline score of the analysis.
    pub fn mean_full_score(&self) -> f64 {
        self.full_scores.iter().sum::<f64>() / self.full_scores.len() as f64
    }
}

/// Result of one rollout analysis.
#[derive(Debug, Clone)]
pub struct RolloutRun {
    pub samples: SampleMatrix,
    pub counter: EvalCounter,
    /// Present when trace collection was requested; sorted by simulation
    /// index, then coalition bit pattern.
    pub trace: Vec<TraceEntry>,
}

struct SimRow {
    row: Vec<f64>,
    full_score: f64,
    trace: Vec<TraceEntry>,
}

/// Nudge the row until a fixed-order float sum lands exactly on the target
/// score. The raw accumulation error is a handful of ulps of the total; it
/// is absorbed by preference into the entry of largest magnitude so exact
/// zeros of null players stay exact. Per candidate entry: one coarse step,
/// then single-ulp refinement. A candidate whose granularity steps over the
/// target (its own ulp exceeds the sum's) is restored and the next one
/// tried; any entry smaller than the total cannot step over, so the walk
/// terminates.
fn renormalize_row(row: &mut [f64], target: f64) {
    let fold = |row: &[f64]| row.iter().sum::<f64>();
    if row.is_empty() || fold(row) == target {
        return;
    }
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| {
        row[b]
            .abs()
            .partial_cmp(&row[a].abs())
            .expect("attribution values are finite")
            .then(a.cmp(&b))
    });
    for &idx in &order {
        let saved = row[idx];
        let coarse = row[idx] + (target - fold(row));
        if coarse.is_finite() {
            row[idx] = coarse;
        }
        for _ in 0..256 {
            let residual = target - fold(row);
            if residual == 0.0 {
                return;
            }
            let upward = residual > 0.0;
            row[idx] = if upward {
                row[idx].next_up()
            } else {
                row[idx].next_down()
            };
            let after = target - fold(row);
            if after == 0.0 {
                return;
            }
            if (after > 0.0) != upward {
                break;
            }
        }
        row[idx] = saved;
    }
}

fn assemble_row(n: usize, table: &[f64], weights: &[f64], masks: &[u32]) -> Vec<f64> {
    let mut row: Vec<f64> = (0..n)
        .map(|i| accumulate_player(table, weights, masks, i))
        .collect();
    renormalize_row(&mut row, table[table.len() - 1]);
    row
}

fn probe_baseline<S: Simulator>(
    game: &GameSpec,
    baselines: &BaselineSet<S::Value>,
    real_values: &FullAssignment<S::Value>,
    simulator: &S,
) -> Result<()> {
    let n = game.player_count();
    if baselines.len() != n {
        return Err(Error::AssignmentLength {
            got: baselines.len(),
            expected: n,
        });
    }
    if real_values.len() != n {
        return Err(Error::AssignmentLength {
            got: real_values.len(),
            expected: n,
        });
    }
    let all_baseline = apply_replacement(baselines, Coalition::EMPTY, real_values);
    let score = simulator
        .simulate(&all_baseline, BASELINE_PROBE_SEED)
        .map_err(|source| Error::Simulator {
            simulation: 0,
            coalition: Coalition::EMPTY,
            source,
        })?;
    if score != 0.0 {
        return Err(Error::BaselineNotNull(score));
    }
    Ok(())
}

fn finish(
    n: usize,
    simulations: usize,
    rows: Vec<SimRow>,
    distinct: u64,
    wall_time: Duration,
) -> RolloutRun {
    let mut values = Vec::with_capacity(simulations * n);
    let mut full_scores = Vec::with_capacity(simulations);
    let mut trace = Vec::new();
    for sim in rows {
        values.extend_from_slice(&sim.row);
        full_scores.push(sim.full_score);
        trace.extend(sim.trace);
    }
    RolloutRun {
        samples: SampleMatrix {
            n_players: n,
            values,
            full_scores,
        },
        counter: EvalCounter {
            distinct_evaluations_per_simulation: distinct,
            total_simulator_calls: distinct * simulations as u64,
            wall_time,
        },
        trace,
    }
}

/// Sampled exact Shapley values through a simulator: for each simulation
/// index every one of the `2^n` coalitions is simulated exactly once, and
/// the per-index attribution row is assembled from that memo.
pub fn rollout_shapley<S: Simulator>(
    game: &GameSpec,
    baselines: &BaselineSet<S::Value>,
    real_values: &FullAssignment<S::Value>,
    simulator: &S,
    simulations: usize,
    master_seed: u64,
) -> Result<(SampleMatrix, EvalCounter)> {
    let run = rollout_shapley_with(
        game,
        baselines,
        real_values,
        simulator,
        simulations,
        master_seed,
        &RolloutOptions::default(),
    )?;
    Ok((run.samples, run.counter))
}

pub fn rollout_shapley_with<S: Simulator>(
    game: &GameSpec,
    baselines: &BaselineSet<S::Value>,
    real_values: &FullAssignment<S::Value>,
    simulator: &S,
    simulations: usize,
    master_seed: u64,
    options: &RolloutOptions,
) -> Result<RolloutRun> {
    if simulations == 0 {
        return Err(Error::NoSimulations);
    }
    let started = Instant::now();
    probe_baseline(game, baselines, real_values, simulator)?;
    let n = game.player_count();
    let size = 1usize << n;
    let weights = shapley_weights(n);
    let masks = sorted_masks(n);

    let rows: Vec<SimRow> = (0..simulations)
        .into_par_iter()
        .map(|sim| -> Result<SimRow> {
            let mut table = vec![0.0f64; size];
            let mut trace = Vec::new();
            let mut buf = FullAssignment {
                values: Vec::with_capacity(n),
            };
            for bits in 0..size as u32 {
                let coalition = Coalition::from_bits(bits);
                let seed = rollout_seed(master_seed, sim, coalition);
                replace_into(baselines, bits, real_values, &mut buf);
                let score = simulator.simulate(&buf, seed).map_err(|source| {
                    Error::Simulator {
                        simulation: sim,
                        coalition,
                        source,
                    }
                })?;
                table[bits as usize] = score;
                if options.collect_trace {
                    trace.push(TraceEntry {
                        simulation: sim,
                        coalition,
                        seed,
                        score,
                    });
                }
            }
            Ok(SimRow {
                row: assemble_row(n, &table, &weights, &masks),
                full_score: table[size - 1],
                trace,
            })
        })
        .collect::<Result<_>>()?;

    Ok(finish(n, simulations, rows, size as u64, started.elapsed()))
}

/// Sampled exact Myerson values through a simulator: per simulation index
/// the simulator only runs on the distinct connected coalitions of the
/// graph (plus the empty assignment); everything else is synthesized by
/// component summation.
pub fn rollout_myerson<S: Simulator>(
    game: &GameSpec,
    graph: &InteractionGraph,
    baselines: &BaselineSet<S::Value>,
    real_values: &FullAssignment<S::Value>,
    simulator: &S,
    simulations: usize,
    master_seed: u64,
) -> Result<(SampleMatrix, EvalCounter)> {
    let run = rollout_myerson_with(
        game,
        graph,
        baselines,
        real_values,
        simulator,
        simulations,
        master_seed,
        &RolloutOptions::default(),
    )?;
    Ok((run.samples, run.counter))
}

#[allow(clippy::too_many_arguments)]
pub fn rollout_myerson_with<S: Simulator>(
    game: &GameSpec,
    graph: &InteractionGraph,
    baselines: &BaselineSet<S::Value>,
    real_values: &FullAssignment<S::Value>,
    simulator: &S,
    simulations: usize,
    master_seed: u64,
    options: &RolloutOptions,
) -> Result<RolloutRun> {
    if simulations == 0 {
        return Err(Error::NoSimulations);
    }
    let n = game.player_count();
    if graph.node_count() != n {
        return Err(Error::GraphSizeMismatch {
            graph: graph.node_count(),
            game: n,
        });
    }
    let started = Instant::now();
    probe_baseline(game, baselines, real_values, simulator)?;
    let weights = shapley_weights(n);
    let masks = sorted_masks(n);
    let plan = DecompositionPlan::build(graph);

    let rows: Vec<SimRow> = (0..simulations)
        .into_par_iter()
        .map(|sim| -> Result<SimRow> {
            let mut trace = Vec::new();
            let mut buf = FullAssignment {
                values: Vec::with_capacity(n),
            };
            let mut run_one = |bits: u32,
                               trace: &mut Vec<TraceEntry>|
             -> Result<f64> {
                let coalition = Coalition::from_bits(bits);
                let seed = rollout_seed(master_seed, sim, coalition);
                replace_into(baselines, bits, real_values, &mut buf);
                let score = simulator.simulate(&buf, seed).map_err(|source| {
                    Error::Simulator {
                        simulation: sim,
                        coalition,
                        source,
                    }
                })?;
                if options.collect_trace {
                    trace.push(TraceEntry {
                        simulation: sim,
                        coalition,
                        seed,
                        score,
                    });
                }
                Ok(score)
            };

            let empty_score = run_one(0, &mut trace)?;
            let mut component_scores = Vec::with_capacity(plan.component_masks.len());
            for idx in 0..plan.component_masks.len() {
                let bits = plan.component_masks[idx];
                component_scores.push(run_one(bits, &mut trace)?);
            }
            let mut table = plan.extend_table(&component_scores);
            table[0] = empty_score;
            Ok(SimRow {
                row: assemble_row(n, &table, &weights, &masks),
                full_score: table[table.len() - 1],
                trace,
            })
        })
        .collect::<Result<_>>()?;

    let distinct = plan.component_masks.len() as u64 + 1;
    Ok(finish(n, simulations, rows, distinct, started.elapsed()))
}


#[cfg(test)]
mod renorm_tests {
    use super::renormalize_row;

    // row whose fold skips a representable value under coarse correction;
    // the coarse-then-ulp-walk scheme must still land exactly
    const STUBBORN: [f64; 8] = [
        1.0535877205756705,
        3.9913994011187435,
        9.010894125000878,
        4.036742174470769,
        10.061062618363287,
        18.037574080407765,
        7.046071806155924,
        16.080001130280586,
    ];

    #[test]
    fn lands_exactly_on_a_stubborn_row() {
        let target = 69.31733305637364_f64;
        let mut row = STUBBORN;
        renormalize_row(&mut row, target);
        assert_eq!(row.iter().sum::<f64>(), target);
    }

    #[test]
    fn zero_rows_stay_zero() {
        let mut row = [0.0_f64; 5];
        renormalize_row(&mut row, 0.0);
        assert_eq!(row, [0.0; 5]);
    }

    #[test]
    fn null_entries_are_not_disturbed() {
        let mut row = [33.333333333333336, 0.0, 33.33333333333333, 0.0, 33.3333333333333];
        let target = 100.0_f64;
        renormalize_row(&mut row, target);
        assert_eq!(row.iter().sum::<f64>(), target);
        assert_eq!(row[1], 0.0);
        assert_eq!(row[3], 0.0);
    }
}
