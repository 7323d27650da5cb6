//! Hierarchical knowledge graph construction from an expert classification
//! of agent features.
//!
//! Each agent contributes its policy and its static attributes as players.
//! Edges come from six independent connectivity rules:
//!
//! 1. clique over an agent's active attributes;
//! 2. every active attribute ↔ that agent's policy;
//! 3. every necessary attribute ↔ that agent's policy;
//! 4. clique over the necessary attributes of all agents;
//! 5. clique over an agent's passive attributes;
//! 6. every passive attribute ↔ every necessary attribute of the same agent.
//!
//! Nothing else. Dynamic attributes are accepted in the roster but never
//! become players. Passive attributes of different agents are deliberately
//! not interconnected.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, GameSpec, PlayerId};
use crate::error::{Error, Result};
use crate::graph::{components, ComponentCover, InteractionGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeClass {
    Necessary,
    Active,
    Passive,
    Policy,
    Dynamic,
}

impl AttributeClass {
    /// Ordering rank inside an agent: necessary < policy < active < passive.
    fn rank(self) -> u8 {
        match self {
            AttributeClass::Necessary => 0,
            AttributeClass::Policy => 1,
            AttributeClass::Active => 2,
            AttributeClass::Passive => 3,
            AttributeClass::Dynamic => u8::MAX,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub label: String,
    pub class: AttributeClass,
}

/// One agent's policy and classified attributes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentFeatureSpec {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub features: Vec<FeatureSpec>,
}

impl AgentFeatureSpec {
    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("agent{}", self.id))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RosterFile {
    agents: Vec<AgentFeatureSpec>,
}

pub fn parse_roster(json: &str) -> Result<Vec<AgentFeatureSpec>> {
    let file: RosterFile =
        serde_json::from_str(json).map_err(|e| Error::RosterFormat(e.to_string()))?;
    Ok(file.agents)
}

pub fn roster_to_json(roster: &[AgentFeatureSpec]) -> String {
    serde_json::to_string_pretty(&RosterFile {
        agents: roster.to_vec(),
    })
    .expect("roster serialization cannot fail")
}

/// One node of the knowledge graph.
#[derive(Debug, Clone, Serialize)]
pub struct HkgPlayer {
    pub player: usize,
    pub agent_id: u32,
    pub label: String,
    pub class: AttributeClass,
    /// Globally unique `{agent}.{label}` name used as the game label.
    pub qualified: String,
}

/// Interaction graph plus the player-index table mapping agent features to
/// node ids.
#[derive(Debug, Clone)]
pub struct HkgGraph {
    graph: InteractionGraph,
    players: Vec<HkgPlayer>,
}

impl HkgGraph {
    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn players(&self) -> &[HkgPlayer] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn player_id(&self, agent_id: u32, label: &str) -> Option<PlayerId> {
        self.players
            .iter()
            .position(|p| p.agent_id == agent_id && p.label == label)
            .map(PlayerId::new)
    }

    pub fn game_spec(&self) -> Result<GameSpec> {
        GameSpec::new(self.players.iter().map(|p| p.qualified.clone()).collect())
    }

    /// Coalition of one agent's necessary attributes.
    pub fn necessary_of(&self, agent_id: u32) -> Coalition {
        let mut bits = 0u32;
        for p in &self.players {
            if p.agent_id == agent_id && p.class == AttributeClass::Necessary {
                bits |= 1 << p.player;
            }
        }
        Coalition::from_bits(bits)
    }

    pub fn player_table_json(&self) -> String {
        serde_json::to_string_pretty(&self.players).expect("player table serialization cannot fail")
    }
}

/// Node ids of one agent, grouped by class, in final numbering.
struct AgentNodes {
    agent_id: u32,
    policy: usize,
    necessary: Vec<usize>,
    active: Vec<usize>,
    passive: Vec<usize>,
}

fn clique(nodes: &[usize], out: &mut BTreeSet<(usize, usize)>) {
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            out.insert((a.min(b), a.max(b)));
        }
    }
}

fn join(left: &[usize], right: &[usize], out: &mut BTreeSet<(usize, usize)>) {
    for &a in left {
        for &b in right {
            out.insert((a.min(b), a.max(b)));
        }
    }
}

/// The six rule generators, kept separate so every edge can be attributed
/// to exactly one rule.
fn rule_edge_sets(agents: &[AgentNodes]) -> [BTreeSet<(usize, usize)>; 6] {
    let mut rules: [BTreeSet<(usize, usize)>; 6] = Default::default();
    for agent in agents {
        clique(&agent.active, &mut rules[0]);
        join(&agent.active, &[agent.policy], &mut rules[1]);
        join(&agent.necessary, &[agent.policy], &mut rules[2]);
        clique(&agent.passive, &mut rules[4]);
        join(&agent.passive, &agent.necessary, &mut rules[5]);
    }
    let all_necessary: Vec<usize> = agents
        .iter()
        .flat_map(|a| a.necessary.iter().copied())
        .collect();
    clique(&all_necessary, &mut rules[3]);
    rules
}

#[cfg(test)]
pub(crate) fn rule_edges_for_test(hkg: &HkgGraph) -> [BTreeSet<(usize, usize)>; 6] {
    rule_edge_sets(&group_nodes(&hkg.players))
}

fn group_nodes(players: &[HkgPlayer]) -> Vec<AgentNodes> {
    let mut agents: Vec<AgentNodes> = Vec::new();
    for p in players {
        if agents.last().map(|a| a.agent_id) != Some(p.agent_id) {
            agents.push(AgentNodes {
                agent_id: p.agent_id,
                policy: usize::MAX,
                necessary: Vec::new(),
                active: Vec::new(),
                passive: Vec::new(),
            });
        }
        let agent = agents.last_mut().unwrap();
        match p.class {
            AttributeClass::Policy => agent.policy = p.player,
            AttributeClass::Necessary => agent.necessary.push(p.player),
            AttributeClass::Active => agent.active.push(p.player),
            AttributeClass::Passive => agent.passive.push(p.player),
            AttributeClass::Dynamic => unreachable!("dynamic features are not players"),
        }
    }
    agents
}

/// Build the knowledge graph for a roster. Node numbering is stable:
/// agents in roster order, within an agent necessary < policy < active <
/// passive, alphabetical within a class.
pub fn build_hkg(roster: &[AgentFeatureSpec]) -> Result<HkgGraph> {
    if roster.is_empty() {
        return Err(Error::EmptyRoster);
    }
    let mut seen_ids = BTreeSet::new();
    let mut seen_names = BTreeSet::new();
    let mut players: Vec<HkgPlayer> = Vec::new();
    for agent in roster {
        if agent.features.is_empty() {
            return Err(Error::AgentWithoutFeatures(agent.id));
        }
        if !seen_ids.insert(agent.id) {
            return Err(Error::DuplicateAgentId(agent.id));
        }
        let name = agent.display_name();
        if !seen_names.insert(name.clone()) {
            return Err(Error::DuplicateAgentName(name));
        }
        let mut labels = BTreeSet::new();
        for f in &agent.features {
            if !labels.insert(f.label.as_str()) {
                return Err(Error::DuplicateFeature {
                    agent: agent.id,
                    label: f.label.clone(),
                });
            }
        }
        let policies = agent
            .features
            .iter()
            .filter(|f| f.class == AttributeClass::Policy)
            .count();
        if policies != 1 {
            return Err(Error::PolicyCount {
                agent: agent.id,
                found: policies,
            });
        }
        if !agent
            .features
            .iter()
            .any(|f| f.class == AttributeClass::Necessary)
        {
            log::warn!(
                "agent {} has no necessary attribute; its subtree never detaches",
                name
            );
        }
        let mut nodes: Vec<&FeatureSpec> = agent
            .features
            .iter()
            .filter(|f| f.class != AttributeClass::Dynamic)
            .collect();
        nodes.sort_by(|a, b| {
            a.class
                .rank()
                .cmp(&b.class.rank())
                .then_with(|| a.label.cmp(&b.label))
        });
        for f in nodes {
            players.push(HkgPlayer {
                player: players.len(),
                agent_id: agent.id,
                label: f.label.clone(),
                class: f.class,
                qualified: format!("{}.{}", name, f.label),
            });
        }
    }

    let agents = group_nodes(&players);
    let rules = rule_edge_sets(&agents);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for rule in &rules {
        edges.extend(rule.iter().copied());
    }
    let graph = InteractionGraph::new(players.len(), &edges)?;
    Ok(HkgGraph { graph, players })
}

/// Components left after removing one agent's necessary attributes from the
/// grand coalition: the agent's policy and actives detach as their own part.
pub fn decomposability_probe(hkg: &HkgGraph, agent_id: u32) -> Result<ComponentCover> {
    if !hkg.players.iter().any(|p| p.agent_id == agent_id) {
        return Err(Error::UnknownAgent(agent_id));
    }
    let necessary = hkg.necessary_of(agent_id);
    let full = Coalition::full(hkg.player_count());
    let probe = Coalition::from_bits(full.bits() & !necessary.bits());
    Ok(components(hkg.graph(), probe))
}
