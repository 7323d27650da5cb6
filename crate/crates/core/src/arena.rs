//! The Arena environment: two teams of Warrior, Mage and Priest fight in
//! rounds until one side is wiped out or the round limit is hit.
//!
//! The warrior deals flat damage, the mage rolls to put an enemy to sleep
//! for one activation, the priest restores health up to the target's
//! maximum. A match is a pure function of its configuration and seed, which
//! is what makes the rollout analyses reproducible.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coalition::GameSpec;
use crate::error::{Error, Result, SimulatorError};
use crate::graph::InteractionGraph;
use crate::hkg::{build_hkg, AgentFeatureSpec, AttributeClass, FeatureSpec, HkgGraph};
use crate::rollout::{BaselineSet, FullAssignment, Simulator};

pub const ROUND_LIMIT: u32 = 1000;

pub const DEFAULT_MAX_HP: f64 = 100.0;
pub const DEFAULT_ATTACK_POWER: f64 = 10.0;
pub const DEFAULT_HEALING_POWER: f64 = 5.0;
pub const DEFAULT_CONTROL_CHANCE: f64 = 0.5;

/// Static attributes of one agent. Current health lives in the match state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentStats {
    pub max_hp: f64,
    pub attack_power: f64,
    pub healing_power: f64,
    pub control_chance: f64,
}

impl Default for AgentStats {
    fn default() -> Self {
        AgentStats {
            max_hp: DEFAULT_MAX_HP,
            attack_power: DEFAULT_ATTACK_POWER,
            healing_power: DEFAULT_HEALING_POWER,
            control_chance: DEFAULT_CONTROL_CHANCE,
        }
    }
}

impl AgentStats {
    /// All zero: the baseline an absent attribute drops to.
    pub fn zeroed() -> Self {
        AgentStats {
            max_hp: 0.0,
            attack_power: 0.0,
            healing_power: 0.0,
            control_chance: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("max_hp", self.max_hp, 100.0),
            ("attack_power", self.attack_power, 20.0),
            ("healing_power", self.healing_power, 100.0),
            ("control_chance", self.control_chance, 0.5),
        ];
        for (name, value, hi) in checks {
            if !value.is_finite() || value < 0.0 || value > hi {
                return Err(Error::MatchConfig(format!(
                    "{name} = {value} outside [0, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Random,
    Smart,
    #[serde(alias = "no-op", alias = "nothing")]
    NoOp,
    #[serde(rename = "rl", alias = "scriptedrl", alias = "scripted-rl")]
    ScriptedRl,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PolicyKind::Random => "Random",
            PolicyKind::Smart => "Smart",
            PolicyKind::NoOp => "NoOp",
            PolicyKind::ScriptedRl => "ScriptedRL",
        };
        write!(f, "{name}")
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(PolicyKind::Random),
            "smart" => Ok(PolicyKind::Smart),
            "noop" | "no-op" | "nothing" => Ok(PolicyKind::NoOp),
            "rl" | "scriptedrl" | "scripted-rl" => Ok(PolicyKind::ScriptedRl),
            other => Err(Error::MatchConfig(format!("unknown policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    Warrior,
    Mage,
    Priest,
}

impl Role {
    pub const ORDER: [Role; 3] = [Role::Warrior, Role::Mage, Role::Priest];

    fn of(index: usize) -> Role {
        Role::ORDER[index]
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Role::Warrior => "Warrior",
            Role::Mage => "Mage",
            Role::Priest => "Priest",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentSetup {
    #[serde(default)]
    pub stats: AgentStats,
    #[serde(default = "noop_policy")]
    pub policy: PolicyKind,
}

fn noop_policy() -> PolicyKind {
    PolicyKind::NoOp
}

impl AgentSetup {
    pub fn new(stats: AgentStats, policy: PolicyKind) -> Self {
        AgentSetup { stats, policy }
    }
}

/// Three agents in fixed role order: warrior, mage, priest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeamSetup {
    pub warrior: AgentSetup,
    pub mage: AgentSetup,
    pub priest: AgentSetup,
}

impl TeamSetup {
    /// Default attributes throughout, one shared policy.
    pub fn uniform(policy: PolicyKind) -> Self {
        let setup = AgentSetup::new(AgentStats::default(), policy);
        TeamSetup {
            warrior: setup,
            mage: setup,
            priest: setup,
        }
    }

    pub fn agents(&self) -> [AgentSetup; 3] {
        [self.warrior, self.mage, self.priest]
    }

    pub fn validate(&self) -> Result<()> {
        for agent in self.agents() {
            agent.stats.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub team_a: TeamSetup,
    pub team_b: TeamSetup,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "round_limit")]
    pub t_max: u32,
}

fn round_limit() -> u32 {
    ROUND_LIMIT
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_max == 0 {
            return Err(Error::MatchConfig("t_max must be at least 1".into()));
        }
        self.team_a.validate()?;
        self.team_b.validate()
    }
}

/// Result `r`, elapsed rounds `T` and final score of one match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationOutcome {
    /// +1 when team B was eliminated, -1 when team A was, 0 on a draw.
    pub result: i8,
    pub rounds: u32,
    pub score: f64,
}

/// Final score `100 (r/T + 1)`: 200 for a first-round win of team A,
/// 0 for a first-round loss, tending to 100 as matches drag on.
pub fn score(result: i8, rounds: u32) -> f64 {
    100.0 * (f64::from(result) / f64::from(rounds) + 1.0)
}

/// Warrior damage: the target's health drops by the attacker's power,
/// clamped at zero.
pub fn warrior_attack(target_hp: f64, attack_power: f64) -> f64 {
    (target_hp - attack_power).max(0.0)
}

/// Mage sleep probability, boosted by attack power up to a factor of two.
pub fn mage_control_prob(control_chance: f64, attack_power: f64) -> f64 {
    control_chance * (1.0 + attack_power / 20.0)
}

/// Priest heal: the target's health rises by the healer's power, clamped
/// at the target's maximum.
pub fn priest_heal(target_hp: f64, healing_power: f64, target_max_hp: f64) -> f64 {
    (target_hp + healing_power).min(target_max_hp)
}

/// Arithmetic mean score over a batch of outcomes.
pub fn mean_score(outcomes: &[SimulationOutcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(outcomes.iter().map(|o| o.score).sum::<f64>() / outcomes.len() as f64)
}

/// Live state of one agent during a match.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub stats: AgentStats,
    pub policy: PolicyKind,
    pub current_hp: f64,
    pub sleeping: bool,
}

impl AgentState {
    fn from_setup(setup: AgentSetup) -> Self {
        AgentState {
            stats: setup.stats,
            policy: setup.policy,
            current_hp: setup.stats.max_hp,
            sleeping: false,
        }
    }

    pub fn alive(&self) -> bool {
        self.current_hp > 0.0
    }
}

/// What an agent decided to do; targets index the relevant team.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Attack { target: usize },
    Control { target: usize },
    Heal { target: usize },
}

fn living(team: &[AgentState; 3]) -> ([usize; 3], usize) {
    let mut out = [0usize; 3];
    let mut count = 0;
    for (i, agent) in team.iter().enumerate() {
        if agent.alive() {
            out[count] = i;
            count += 1;
        }
    }
    (out, count)
}

fn pick_uniform(rng: &mut impl Rng, candidates: &[usize; 3], count: usize) -> Option<usize> {
    if count == 0 {
        None
    } else {
        Some(candidates[rng.gen_range(0..count)])
    }
}

/// Priority targeting: priest first, then mage, then warrior.
fn priority_target(team: &[AgentState; 3]) -> Option<usize> {
    [2usize, 1, 0].into_iter().find(|&i| team[i].alive())
}

fn least_hp_target(team: &[AgentState; 3]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, agent) in team.iter().enumerate() {
        if !agent.alive() {
            continue;
        }
        // ties break toward the earlier role
        if best.is_none_or(|b| agent.current_hp < team[b].current_hp) {
            best = Some(i);
        }
    }
    best
}

fn largest_deficit_target(team: &[AgentState; 3]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, agent) in team.iter().enumerate() {
        if !agent.alive() {
            continue;
        }
        let deficit = agent.stats.max_hp - agent.current_hp;
        if deficit > 0.0 && best.is_none_or(|(_, d)| deficit > d) {
            best = Some((i, deficit));
        }
    }
    best.map(|(i, _)| i)
}

/// Target selection for one activation. Warriors attack, mages control,
/// priests heal; the policy only decides whom. Returns `None` when there is
/// no legal target (or the policy never acts).
pub fn select_action(
    policy: PolicyKind,
    role: Role,
    own_team: &[AgentState; 3],
    enemy_team: &[AgentState; 3],
    rng: &mut impl Rng,
) -> Option<Action> {
    match (policy, role) {
        (PolicyKind::NoOp, _) => None,
        (PolicyKind::Random, Role::Warrior) => {
            let (c, k) = living(enemy_team);
            pick_uniform(rng, &c, k).map(|target| Action::Attack { target })
        }
        (PolicyKind::Random, Role::Mage) => {
            let (c, k) = living(enemy_team);
            pick_uniform(rng, &c, k).map(|target| Action::Control { target })
        }
        (PolicyKind::Random, Role::Priest) => {
            // the healer's own pool includes itself
            let (c, k) = living(own_team);
            pick_uniform(rng, &c, k).map(|target| Action::Heal { target })
        }
        (PolicyKind::Smart, Role::Warrior) => {
            priority_target(enemy_team).map(|target| Action::Attack { target })
        }
        (PolicyKind::Smart, Role::Mage) => {
            priority_target(enemy_team).map(|target| Action::Control { target })
        }
        (PolicyKind::Smart, Role::Priest) => {
            least_hp_target(own_team).map(|target| Action::Heal { target })
        }
        (PolicyKind::ScriptedRl, Role::Warrior) => {
            if enemy_team[0].alive() {
                Some(Action::Attack { target: 0 })
            } else {
                let (c, k) = living(enemy_team);
                pick_uniform(rng, &c, k).map(|target| Action::Attack { target })
            }
        }
        (PolicyKind::ScriptedRl, Role::Mage) => {
            if enemy_team[0].alive() {
                Some(Action::Control { target: 0 })
            } else if enemy_team[2].alive() {
                Some(Action::Control { target: 2 })
            } else {
                None
            }
        }
        (PolicyKind::ScriptedRl, Role::Priest) => {
            largest_deficit_target(own_team).map(|target| Action::Heal { target })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TeamId {
    A,
    B,
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == TeamId::A { "A" } else { "B" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ActionKind {
    Attack,
    Control,
    Heal,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ActionKind::Attack => "attack",
            ActionKind::Control => "control",
            ActionKind::Heal => "heal",
        };
        write!(f, "{name}")
    }
}

/// One applied action, for the per-match event log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchEvent {
    pub round: u32,
    pub team: TeamId,
    pub role: Role,
    pub action: ActionKind,
    pub target_team: TeamId,
    pub target_role: Role,
    /// Damage dealt, health restored, or 1/0 for a control roll.
    pub value: f64,
}

impl MatchEvent {
    pub const CSV_HEADER: &'static str = "round,team,role,action,target,value";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}.{},{}",
            self.round, self.team, self.role, self.action, self.target_team, self.target_role,
            self.value
        )
    }
}

trait EventSink {
    fn record(&mut self, event: MatchEvent);
}

struct NoEvents;

impl EventSink for NoEvents {
    fn record(&mut self, _event: MatchEvent) {}
}

impl EventSink for Vec<MatchEvent> {
    fn record(&mut self, event: MatchEvent) {
        self.push(event);
    }
}

fn team_eliminated(team: &[AgentState; 3]) -> bool {
    team.iter().all(|a| !a.alive())
}

fn victory(teams: &[[AgentState; 3]; 2]) -> Option<i8> {
    if team_eliminated(&teams[0]) {
        Some(-1)
    } else if team_eliminated(&teams[1]) {
        Some(1)
    } else {
        None
    }
}

/// Nobody left alive can ever act again: the match is a guaranteed draw.
fn static_draw(teams: &[[AgentState; 3]; 2]) -> bool {
    teams
        .iter()
        .flatten()
        .all(|a| !a.alive() || a.policy == PolicyKind::NoOp)
}

/// Play one match. Teams alternate (the starter drawn from the seed), agents
/// act in warrior-mage-priest order, dead agents skip, a slept agent loses
/// exactly its next activation, and victory is checked after every applied
/// action so first-round eliminations terminate immediately.
pub fn run_match(config: &MatchConfig) -> SimulationOutcome {
    run_with_sink(config, &mut NoEvents)
}

/// Same as [`run_match`], additionally returning the per-action event log.
pub fn run_match_with_events(config: &MatchConfig) -> (SimulationOutcome, Vec<MatchEvent>) {
    let mut events = Vec::new();
    let outcome = run_with_sink(config, &mut events);
    (outcome, events)
}

fn run_with_sink(config: &MatchConfig, sink: &mut impl EventSink) -> SimulationOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut teams = [
        config.team_a.agents().map(AgentState::from_setup),
        config.team_b.agents().map(AgentState::from_setup),
    ];
    let first = rng.gen_range(0..2usize);

    let finish = |result: i8, rounds: u32| SimulationOutcome {
        result,
        rounds,
        score: score(result, rounds),
    };

    for round in 1..=config.t_max {
        // catches teams that are dead on arrival (first check at T = 1)
        if let Some(result) = victory(&teams) {
            return finish(result, round);
        }
        if static_draw(&teams) {
            return finish(0, config.t_max);
        }
        for side in [first, 1 - first] {
            for idx in 0..3 {
                if !teams[side][idx].alive() {
                    continue;
                }
                if teams[side][idx].sleeping {
                    // the flag suppresses exactly this activation
                    teams[side][idx].sleeping = false;
                    continue;
                }
                let actor = teams[side][idx];
                let action = select_action(
                    actor.policy,
                    Role::of(idx),
                    &teams[side],
                    &teams[1 - side],
                    &mut rng,
                );
                let Some(action) = action else { continue };
                let team_id = if side == 0 { TeamId::A } else { TeamId::B };
                let enemy_id = if side == 0 { TeamId::B } else { TeamId::A };
                match action {
                    Action::Attack { target } => {
                        let before = teams[1 - side][target].current_hp;
                        let after = warrior_attack(before, actor.stats.attack_power);
                        debug_assert!(after >= 0.0 && after <= teams[1 - side][target].stats.max_hp);
                        teams[1 - side][target].current_hp = after;
                        sink.record(MatchEvent {
                            round,
                            team: team_id,
                            role: Role::of(idx),
                            action: ActionKind::Attack,
                            target_team: enemy_id,
                            target_role: Role::of(target),
                            value: before - after,
                        });
                    }
                    Action::Control { target } => {
                        let p = mage_control_prob(
                            actor.stats.control_chance,
                            actor.stats.attack_power,
                        );
                        let success = rng.gen::<f64>() < p;
                        if success {
                            teams[1 - side][target].sleeping = true;
                        }
                        sink.record(MatchEvent {
                            round,
                            team: team_id,
                            role: Role::of(idx),
                            action: ActionKind::Control,
                            target_team: enemy_id,
                            target_role: Role::of(target),
                            value: f64::from(success),
                        });
                    }
                    Action::Heal { target } => {
                        let before = teams[side][target].current_hp;
                        let after = priest_heal(
                            before,
                            actor.stats.healing_power,
                            teams[side][target].stats.max_hp,
                        );
                        debug_assert!(after >= before && after <= teams[side][target].stats.max_hp);
                        teams[side][target].current_hp = after;
                        sink.record(MatchEvent {
                            round,
                            team: team_id,
                            role: Role::of(idx),
                            action: ActionKind::Heal,
                            target_team: team_id,
                            target_role: Role::of(target),
                            value: after - before,
                        });
                    }
                }
                if let Some(result) = victory(&teams) {
                    return finish(result, round);
                }
            }
        }
    }
    finish(0, config.t_max)
}

// --- binding of the Arena onto the attribution engine ---------------------

pub const LABEL_MAX_HP: &str = "MaxHealthPoints";
pub const LABEL_ATTACK: &str = "AttackPower";
pub const LABEL_HEALING: &str = "HealingPower";
pub const LABEL_CONTROL: &str = "ControlChance";
pub const LABEL_POLICY: &str = "Policy";

pub const AGENT_NAMES: [&str; 3] = ["Warrior", "Mage", "Priest"];

/// The built-in roster: three agents, each with its policy, one necessary
/// attribute, three active attributes and a dynamic current-health entry
/// that never becomes a player.
pub fn arena_roster() -> Vec<AgentFeatureSpec> {
    AGENT_NAMES
        .iter()
        .enumerate()
        .map(|(id, name)| AgentFeatureSpec {
            id: id as u32,
            name: Some((*name).to_string()),
            features: vec![
                FeatureSpec {
                    label: LABEL_MAX_HP.into(),
                    class: AttributeClass::Necessary,
                },
                FeatureSpec {
                    label: LABEL_ATTACK.into(),
                    class: AttributeClass::Active,
                },
                FeatureSpec {
                    label: LABEL_HEALING.into(),
                    class: AttributeClass::Active,
                },
                FeatureSpec {
                    label: LABEL_CONTROL.into(),
                    class: AttributeClass::Active,
                },
                FeatureSpec {
                    label: LABEL_POLICY.into(),
                    class: AttributeClass::Policy,
                },
                FeatureSpec {
                    label: "CurrentHealthPoints".into(),
                    class: AttributeClass::Dynamic,
                },
            ],
        })
        .collect()
}

/// Knowledge graph of the built-in roster: 15 players, 24 edges.
pub fn arena_hkg() -> HkgGraph {
    build_hkg(&arena_roster()).expect("the built-in roster is valid")
}

/// Value carried by one Arena player: a numeric attribute or a policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureValue {
    Stat(f64),
    Policy(PolicyKind),
}

#[derive(Debug, Clone, Copy)]
struct AgentSlots {
    max_hp: usize,
    attack: usize,
    healing: usize,
    control: usize,
    policy: usize,
}

/// Simulator binding: turns a 15-player assignment into a match
/// configuration against a fixed default-attribute opponent and returns the
/// final score.
#[derive(Debug, Clone)]
pub struct ArenaBinding {
    team_b: TeamSetup,
    slots: [AgentSlots; 3],
    t_max: u32,
}

impl ArenaBinding {
    pub fn new(hkg: &HkgGraph, team_b: TeamSetup) -> Result<Self> {
        let slot = |agent: u32, label: &str| {
            hkg.player_id(agent, label)
                .map(|p| p.index())
                .ok_or_else(|| Error::MatchConfig(format!("missing player {agent}/{label}")))
        };
        let mut slots = Vec::with_capacity(3);
        for agent in 0..3u32 {
            slots.push(AgentSlots {
                max_hp: slot(agent, LABEL_MAX_HP)?,
                attack: slot(agent, LABEL_ATTACK)?,
                healing: slot(agent, LABEL_HEALING)?,
                control: slot(agent, LABEL_CONTROL)?,
                policy: slot(agent, LABEL_POLICY)?,
            });
        }
        Ok(ArenaBinding {
            team_b,
            slots: [slots[0], slots[1], slots[2]],
            t_max: ROUND_LIMIT,
        })
    }

    fn agent_setup(
        &self,
        assignment: &FullAssignment<FeatureValue>,
        slots: &AgentSlots,
    ) -> std::result::Result<AgentSetup, SimulatorError> {
        let stat = |index: usize| match assignment.values()[index] {
            FeatureValue::Stat(x) => Ok(x),
            FeatureValue::Policy(_) => Err(SimulatorError::new(format!(
                "player {index} should carry an attribute value"
            ))),
        };
        let policy = match assignment.values()[slots.policy] {
            FeatureValue::Policy(p) => p,
            FeatureValue::Stat(_) => {
                return Err(SimulatorError::new(format!(
                    "player {} should carry a policy",
                    slots.policy
                )))
            }
        };
        Ok(AgentSetup {
            stats: AgentStats {
                max_hp: stat(slots.max_hp)?,
                attack_power: stat(slots.attack)?,
                healing_power: stat(slots.healing)?,
                control_chance: stat(slots.control)?,
            },
            policy,
        })
    }
}

impl Simulator for ArenaBinding {
    type Value = FeatureValue;

    fn simulate(
        &self,
        assignment: &FullAssignment<FeatureValue>,
        seed: u64,
    ) -> std::result::Result<f64, SimulatorError> {
        if assignment.len() != 15 {
            return Err(SimulatorError::new(format!(
                "expected 15 players, got {}",
                assignment.len()
            )));
        }
        let config = MatchConfig {
            team_a: TeamSetup {
                warrior: self.agent_setup(assignment, &self.slots[0])?,
                mage: self.agent_setup(assignment, &self.slots[1])?,
                priest: self.agent_setup(assignment, &self.slots[2])?,
            },
            team_b: self.team_b,
            seed,
            t_max: self.t_max,
        };
        Ok(run_match(&config).score)
    }
}

/// Everything needed to run one Arena attribution: the knowledge graph, the
/// game roster, the simulator binding and the replacement-rule endpoints.
#[derive(Debug, Clone)]
pub struct ArenaAnalysis {
    pub hkg: HkgGraph,
    pub game: GameSpec,
    pub binding: ArenaBinding,
    pub baselines: BaselineSet<FeatureValue>,
    pub real_values: FullAssignment<FeatureValue>,
}

impl ArenaAnalysis {
    pub fn graph(&self) -> &InteractionGraph {
        self.hkg.graph()
    }
}

/// Set up the 15-player Arena game: team A carries `team_a_policy` and the
/// default attributes as its real values, the opponent plays
/// `team_b_policy` with default attributes throughout. Baselines are zeroed
/// attributes and the do-nothing policy.
pub fn arena_analysis(team_a_policy: PolicyKind, team_b_policy: PolicyKind) -> ArenaAnalysis {
    let hkg = arena_hkg();
    let game = hkg.game_spec().expect("built-in labels are distinct");
    let binding = ArenaBinding::new(&hkg, TeamSetup::uniform(team_b_policy))
        .expect("built-in roster has all slots");

    let defaults = AgentStats::default();
    let mut real = vec![FeatureValue::Stat(0.0); 15];
    let mut base = vec![FeatureValue::Stat(0.0); 15];
    for agent in 0..3u32 {
        let id = |label: &str| hkg.player_id(agent, label).unwrap().index();
        real[id(LABEL_MAX_HP)] = FeatureValue::Stat(defaults.max_hp);
        real[id(LABEL_ATTACK)] = FeatureValue::Stat(defaults.attack_power);
        real[id(LABEL_HEALING)] = FeatureValue::Stat(defaults.healing_power);
        real[id(LABEL_CONTROL)] = FeatureValue::Stat(defaults.control_chance);
        real[id(LABEL_POLICY)] = FeatureValue::Policy(team_a_policy);
        base[id(LABEL_POLICY)] = FeatureValue::Policy(PolicyKind::NoOp);
    }
    ArenaAnalysis {
        game,
        binding,
        baselines: BaselineSet::new(base),
        real_values: FullAssignment::new(real),
        hkg,
    }
}
