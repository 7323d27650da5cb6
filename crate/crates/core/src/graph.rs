//! Interaction graphs over players, connected-component decomposition and
//! the exact Myerson value computation.
//!
//! A coalition of a graph-restricted game decomposes into the connected
//! components of the induced subgraph; the characteristic function over an
//! arbitrary coalition is the sum over its components. Exploiting that
//! property, an exact Myerson run only ever evaluates the characteristic
//! function on distinct connected coalitions, which for structured graphs
//! is a small fraction of the full power set.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalition::{
    accumulate_player, shapley_weights, sorted_masks, AttributionVector, CharacteristicOracle,
    Coalition, GameSpec, PlayerId, MAX_PLAYERS,
};
use crate::error::{Error, Result};

/// Undirected graph over the players of a game. No self-loops, no weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    n: usize,
    adjacency: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl InteractionGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_PLAYERS {
            return Err(Error::TooManyPlayers(n));
        }
        let mut adjacency = vec![0u32; n];
        for &(a, b) in edges {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            for node in [a, b] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        }
        Ok(InteractionGraph { n, adjacency })
    }

    pub fn edgeless(n: usize) -> Self {
        InteractionGraph {
            n,
            adjacency: vec![0; n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let full = Coalition::full(n).bits();
        let adjacency = (0..n).map(|i| full & !(1 << i)).collect();
        InteractionGraph { n, adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, player: PlayerId) -> Coalition {
        Coalition::from_bits(self.adjacency[player.index()])
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adjacency[a] & (1 << b) != 0
    }

    /// Edges as ordered pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            let mut bits = self.adjacency[a] >> (a + 1) << (a + 1);
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out.push((a, b));
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        let full = Coalition::full(self.n).bits();
        (0..self.n).all(|i| self.adjacency[i] == full & !(1 << i))
    }

    /// Induced subgraph over `keep`, with nodes renumbered to `0..keep.len()`
    /// in the order given.
    pub fn induced(&self, keep: &[PlayerId]) -> Result<Self> {
        let mut index = HashMap::new();
        for (new, p) in keep.iter().enumerate() {
            if p.index() >= self.n {
                return Err(Error::NodeOutOfRange {
                    node: p.index(),
                    n: self.n,
                });
            }
            index.insert(p.index(), new);
        }
        let mut edges = Vec::new();
        for (a, b) in self.edges() {
            if let (Some(&na), Some(&nb)) = (index.get(&a), index.get(&b)) {
                edges.push((na, nb));
            }
        }
        InteractionGraph::new(keep.len(), &edges)
    }

    /// Plain-text exchange form: a header line with the node count, then one
    /// `a b` pair per line, 0-based.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.n);
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::GraphFormat("missing node-count header".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::GraphFormat(format!("bad node count `{header}`")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let a = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::GraphFormat(format!("bad edge line `{line}`")))?;
            let b = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::GraphFormat(format!("bad edge line `{line}`")))?;
            if parts.next().is_some() {
                return Err(Error::GraphFormat(format!("bad edge line `{line}`")));
            }
            edges.push((a, b));
        }
        InteractionGraph::new(n, &edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphFile {
            n: self.n,
            edges: self.edges(),
        })
        .expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| Error::GraphFormat(e.to_string()))?;
        InteractionGraph::new(file.n, &file.edges)
    }

    /// Accepts either exchange form, sniffing JSON by its leading brace.
    pub fn from_text(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_edge_list(text)
        }
    }
}

/// Partition of a coalition into the connected components of its induced
/// subgraph, ordered by smallest member index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCover {
    parts: Vec<Coalition>,
}

impl ComponentCover {
    pub fn parts(&self) -> &[Coalition] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Connected components of the subgraph induced by `coalition`. The parts
/// are pairwise disjoint, each connected, and union back to the coalition.
pub fn components(graph: &InteractionGraph, coalition: Coalition) -> ComponentCover {
    let mut parts = Vec::new();
    decompose_bits(&graph.adjacency, coalition.bits(), |mask| {
        parts.push(Coalition::from_bits(mask))
    });
    ComponentCover { parts }
}

/// Breadth-first sweep over adjacency bit masks; allocation-free so the
/// full 2^n coalition sweep stays cheap.
fn decompose_bits(adjacency: &[u32], coalition: u32, mut emit: impl FnMut(u32)) {
    let mut remaining = coalition;
    while remaining != 0 {
        let seed = remaining & remaining.wrapping_neg();
        let mut comp = seed;
        let mut frontier = seed;
        while frontier != 0 {
            let mut reach = 0u32;
            let mut f = frontier;
            while f != 0 {
                let node = f.trailing_zeros() as usize;
                f &= f - 1;
                reach |= adjacency[node];
            }
            frontier = reach & remaining & !comp;
            comp |= frontier;
        }
        emit(comp);
        remaining &= !comp;
    }
}

/// Worth of a coalition in the graph-restricted game: the sum of `v` over
/// the connected components of the induced subgraph. Collapses to `v(K)`
/// when the coalition is connected, and to 0 on the empty coalition.
pub fn graph_value<O>(graph: &InteractionGraph, oracle: &O, coalition: Coalition) -> Result<f64>
where
    O: CharacteristicOracle + ?Sized,
{
    let mut total = 0.0;
    for part in components(graph, coalition).parts() {
        total += oracle
            .evaluate(*part)
            .map_err(|source| Error::Oracle {
                coalition: *part,
                source,
            })?;
    }
    Ok(total)
}

/// Precomputed decomposition of every coalition of an `n`-player game into
/// indices over the distinct connected coalitions of the graph. Built once
/// per graph and shared across simulations and methods.
pub(crate) struct DecompositionPlan {
    n: usize,
    /// Distinct nonempty connected induced subgraphs, as bit masks, in
    /// first-touched (mask-ascending) order.
    pub(crate) component_masks: Vec<u32>,
    offsets: Vec<u32>,
    indices: Vec<u32>,
}

impl DecompositionPlan {
    pub(crate) fn build(graph: &InteractionGraph) -> Self {
        let n = graph.node_count();
        let size = 1usize << n;
        let mut component_masks = Vec::new();
        let mut index_of: HashMap<u32, u32> = HashMap::new();
        let mut offsets = Vec::with_capacity(size + 1);
        let mut indices = Vec::new();
        offsets.push(0u32);
        for mask in 0..size as u32 {
            decompose_bits(&graph.adjacency, mask, |comp| {
                let next = component_masks.len() as u32;
                let idx = *index_of.entry(comp).or_insert_with(|| {
                    component_masks.push(comp);
                    next
                });
                indices.push(idx);
            });
            offsets.push(indices.len() as u32);
        }
        DecompositionPlan {
            n,
            component_masks,
            offsets,
            indices,
        }
    }

    pub(crate) fn components_of(&self, mask: u32) -> &[u32] {
        let lo = self.offsets[mask as usize] as usize;
        let hi = self.offsets[mask as usize + 1] as usize;
        &self.indices[lo..hi]
    }

    /// Extended worth table over the full power set, given one value per
    /// distinct connected coalition.
    pub(crate) fn extend_table(&self, component_values: &[f64]) -> Vec<f64> {
        let size = 1usize << self.n;
        let mut table = vec![0.0; size];
        for mask in 1..size as u32 {
            let comps = self.components_of(mask);
            table[mask as usize] = if comps.len() == 1 {
                component_values[comps[0] as usize]
            } else {
                comps
                    .iter()
                    .map(|&i| component_values[i as usize])
                    .sum()
            };
        }
        table
    }
}

/// Outcome of an exact Myerson run: the values plus the number of distinct
/// characteristic-function invocations the decomposition allowed.
#[derive(Debug, Clone)]
pub struct MyersonResult {
    pub values: AttributionVector,
    pub distinct_evaluations: u64,
}

/// Exact Myerson values: the Shapley values of the graph-restricted game.
/// `v` is invoked at most once per distinct connected coalition across the
/// whole run; every non-connected coalition is synthesized by summing its
/// components. Deterministic across thread counts.
pub fn exact_myerson<O>(
    game: &GameSpec,
    graph: &InteractionGraph,
    oracle: &O,
) -> Result<MyersonResult>
where
    O: CharacteristicOracle + ?Sized,
{
    let n = game.player_count();
    if graph.node_count() != n {
        return Err(Error::GraphSizeMismatch {
            graph: graph.node_count(),
            game: n,
        });
    }
    let plan = DecompositionPlan::build(graph);
    let component_values: Vec<f64> = plan
        .component_masks
        .par_iter()
        .map(|&mask| {
            let coalition = Coalition::from_bits(mask);
            oracle
                .evaluate(coalition)
                .map_err(|source| Error::Oracle { coalition, source })
        })
        .collect::<Result<_>>()?;
    let table = plan.extend_table(&component_values);
    let weights = shapley_weights(n);
    let masks = sorted_masks(n);
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| accumulate_player(&table, &weights, &masks, i))
        .collect();
    Ok(MyersonResult {
        values: AttributionVector::new(values),
        distinct_evaluations: plan.component_masks.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalition::exact_shapley;
    use crate::test_support::{permutation_shapley, random_edges, random_table};

    /// Two triangles joined through node 3.
    fn bridge_graph() -> InteractionGraph {
        InteractionGraph::new(
            6,
            &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)],
        )
        .unwrap()
    }

    fn coalition_of(bits: &[usize]) -> Coalition {
        Coalition::from_bits(bits.iter().fold(0u32, |m, b| m | (1 << b)))
    }

    #[test]
    fn removing_the_bridge_splits_two_components() {
        let graph = bridge_graph();
        let cover = components(&graph, coalition_of(&[0, 1, 2, 4, 5]));
        assert_eq!(
            cover.parts(),
            &[coalition_of(&[0, 1, 2]), coalition_of(&[4, 5])]
        );
    }

    #[test]
    fn empty_coalition_has_empty_cover() {
        assert!(components(&bridge_graph(), Coalition::EMPTY).is_empty());
    }

    #[test]
    fn complete_graph_never_splits() {
        let graph = InteractionGraph::complete(6);
        for mask in 1u32..64 {
            let cover = components(&graph, Coalition::from_bits(mask));
            assert_eq!(cover.parts(), &[Coalition::from_bits(mask)]);
        }
    }

    #[test]
    fn cover_is_a_partition_for_every_coalition() {
        for seed in 0..4u64 {
            let n = 10;
            let graph = InteractionGraph::new(n, &random_edges(n, 0.25, seed)).unwrap();
            for mask in 0u32..(1 << n) {
                let cover = components(&graph, Coalition::from_bits(mask));
                let mut union = 0u32;
                for (i, part) in cover.parts().iter().enumerate() {
                    assert!(!part.is_empty());
                    assert_eq!(union & part.bits(), 0, "parts must be disjoint");
                    union |= part.bits();
                    // connectivity: the part is one component of itself
                    let sub = components(&graph, *part);
                    assert_eq!(sub.parts(), &[*part]);
                    if i > 0 {
                        let prev = cover.parts()[i - 1].bits();
                        assert!(
                            prev.trailing_zeros() < part.bits().trailing_zeros(),
                            "parts ordered by smallest member"
                        );
                    }
                }
                assert_eq!(union, mask, "parts must union to the coalition");
            }
        }
    }

    #[test]
    fn graph_value_sums_component_worth() {
        let graph = bridge_graph();
        let v = |c: Coalition| c.cardinality() as f64 * c.cardinality() as f64;
        let k = coalition_of(&[0, 1, 2, 4, 5]);
        // v({0,1,2}) + v({4,5})
        assert_eq!(graph_value(&graph, &v, k).unwrap(), 9.0 + 4.0);
        assert_eq!(graph_value(&graph, &v, Coalition::EMPTY).unwrap(), 0.0);
        // connected coalitions collapse to a single term
        assert_eq!(
            graph_value(&graph, &v, coalition_of(&[0, 1, 2])).unwrap(),
            9.0
        );
    }

    #[test]
    fn graph_value_on_complete_graph_is_plain_worth() {
        let graph = InteractionGraph::complete(5);
        let table = random_table(5, 11);
        let v = move |c: Coalition| table[c.bits() as usize];
        for mask in 0u32..32 {
            let c = Coalition::from_bits(mask);
            assert_eq!(graph_value(&graph, &v, c).unwrap(), v(c));
        }
    }

    #[test]
    fn edgeless_two_player_game_decomposes_additively() {
        let game = GameSpec::unnamed(2).unwrap();
        let graph = InteractionGraph::edgeless(2);
        let (a, b) = (3.25, -1.5);
        let v = move |c: Coalition| match c.bits() {
            0b01 => a,
            0b10 => b,
            0b00 => 0.0,
            // the engine must never ask for the disconnected pair
            _ => panic!("queried a non-connected coalition"),
        };
        let result = exact_myerson(&game, &graph, &v).unwrap();
        assert!((result.values.get(PlayerId::new(0)) - a).abs() < 1e-12);
        assert!((result.values.get(PlayerId::new(1)) - b).abs() < 1e-12);
        assert_eq!(result.distinct_evaluations, 2);
    }

    #[test]
    fn complete_graph_myerson_matches_shapley() {
        for seed in 0..4u64 {
            for n in [3usize, 6, 8] {
                let game = GameSpec::unnamed(n).unwrap();
                let table = random_table(n, seed * 31 + n as u64);
                let v = {
                    let table = table.clone();
                    move |c: Coalition| table[c.bits() as usize]
                };
                let myerson = exact_myerson(&game, &InteractionGraph::complete(n), &v).unwrap();
                let shapley = exact_shapley(&game, &v).unwrap();
                for (m, s) in myerson.values.values().iter().zip(shapley.values()) {
                    assert!((m - s).abs() <= 1e-9);
                }
                assert_eq!(myerson.distinct_evaluations, (1 << n) - 1);
            }
        }
    }

    #[test]
    fn bridge_graph_matches_brute_force_on_extended_game() {
        let game = GameSpec::unnamed(6).unwrap();
        let graph = bridge_graph();
        let connected = |c: Coalition| (c.cardinality() * c.cardinality()) as f64;
        let result = exact_myerson(&game, &graph, &connected).unwrap();

        // brute force over the decomposition-extended table
        let extended: Vec<f64> = (0..1u32 << 6)
            .map(|mask| {
                components(&graph, Coalition::from_bits(mask))
                    .parts()
                    .iter()
                    .map(|p| connected(*p))
                    .sum()
            })
            .collect();
        let brute = permutation_shapley(6, &|m| extended[m as usize]);
        for (a, b) in result.values.values().iter().zip(&brute) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn myerson_efficiency_on_restricted_game() {
        let n = 7;
        let game = GameSpec::unnamed(n).unwrap();
        let graph = InteractionGraph::new(n, &random_edges(n, 0.3, 5)).unwrap();
        let table = random_table(n, 17);
        let v = move |c: Coalition| table[c.bits() as usize];
        let result = exact_myerson(&game, &graph, &v).unwrap();
        let total = result.values.total();
        let full = graph_value(&graph, &v, game.full_coalition()).unwrap();
        assert!((total - full).abs() <= 1e-9);
    }

    #[test]
    fn isolated_player_gets_singleton_worth() {
        let n = 5;
        let game = GameSpec::unnamed(n).unwrap();
        // node 4 has no edges
        let graph = InteractionGraph::new(n, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let table = random_table(n, 23);
        let v = move |c: Coalition| table[c.bits() as usize];
        let solo = v(Coalition::from_bits(1 << 4));
        let result = exact_myerson(&game, &graph, &v).unwrap();
        // every marginal contribution equals the singleton worth; the
        // weighted sum reassembles it up to float accumulation
        assert!((result.values.get(PlayerId::new(4)) - solo).abs() <= 1e-12 * solo.abs().max(1.0));
    }

    #[test]
    fn eval_count_is_the_number_of_distinct_connected_subgraphs() {
        let n = 8;
        let game = GameSpec::unnamed(n).unwrap();
        let graph = InteractionGraph::new(n, &random_edges(n, 0.25, 9)).unwrap();
        // count connected induced subgraphs by brute force
        let mut connected = 0u64;
        for mask in 1u32..(1 << n) {
            let cover = components(&graph, Coalition::from_bits(mask));
            if cover.len() == 1 {
                connected += 1;
            }
        }
        let table = random_table(n, 29);
        let v = move |c: Coalition| table[c.bits() as usize];
        let result = exact_myerson(&game, &graph, &v).unwrap();
        assert_eq!(result.distinct_evaluations, connected);
        assert!(result.distinct_evaluations <= 1 << n);
    }

    #[test]
    fn extra_edges_do_not_change_values_when_the_oracle_decomposes() {
        // an oracle that genuinely decomposes over a graph keeps its Myerson
        // values under any supergraph: misplacing a feature lower in the
        // hierarchy costs speed, never correctness
        let n = 7;
        let game = GameSpec::unnamed(n).unwrap();
        let sparse = InteractionGraph::new(n, &random_edges(n, 0.25, 3)).unwrap();
        let worth = random_table(n, 7);
        let oracle = {
            let sparse = sparse.clone();
            move |c: Coalition| {
                components(&sparse, c)
                    .parts()
                    .iter()
                    .map(|p| worth[p.bits() as usize])
                    .sum::<f64>()
            }
        };
        let base = exact_myerson(&game, &sparse, &oracle).unwrap();
        let mut edges = sparse.edges();
        edges.extend_from_slice(&[(0, 4), (1, 5), (2, 6), (0, 6)]);
        let denser = InteractionGraph::new(n, &edges).unwrap();
        let extended = exact_myerson(&game, &denser, &oracle).unwrap();
        for (a, b) in base.values.values().iter().zip(extended.values.values()) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
        assert!(extended.distinct_evaluations >= base.distinct_evaluations);
    }

    #[test]
    fn graph_validation() {
        assert!(matches!(
            InteractionGraph::new(3, &[(1, 1)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            InteractionGraph::new(3, &[(0, 3)]),
            Err(Error::NodeOutOfRange { node: 3, n: 3 })
        ));
    }

    #[test]
    fn edge_list_and_json_round_trip() {
        let graph = bridge_graph();
        let text = graph.to_edge_list();
        assert!(text.starts_with("6\n"));
        assert_eq!(InteractionGraph::from_text(&text).unwrap(), graph);
        let json = graph.to_json();
        assert_eq!(InteractionGraph::from_text(&json).unwrap(), graph);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn covers_partition_random_graphs(
                n in 1usize..=8,
                density in 0.0f64..=1.0,
                seed in any::<u64>(),
            ) {
                let graph =
                    InteractionGraph::new(n, &random_edges(n, density, seed)).unwrap();
                for mask in 0u32..(1 << n) {
                    let cover = components(&graph, Coalition::from_bits(mask));
                    let mut union = 0u32;
                    for part in cover.parts() {
                        prop_assert!(!part.is_empty());
                        prop_assert_eq!(union & part.bits(), 0);
                        union |= part.bits();
                        let again = components(&graph, *part);
                        prop_assert_eq!(again.parts(), &[*part]);
                    }
                    prop_assert_eq!(union, mask);
                }
            }

            #[test]
            fn graph_text_forms_round_trip(n in 0usize..=12, density in 0.0f64..=1.0, seed in any::<u64>()) {
                let graph =
                    InteractionGraph::new(n, &random_edges(n, density, seed)).unwrap();
                prop_assert_eq!(
                    InteractionGraph::from_text(&graph.to_edge_list()).unwrap(),
                    graph.clone()
                );
                prop_assert_eq!(InteractionGraph::from_text(&graph.to_json()).unwrap(), graph);
            }
        }
    }
}
