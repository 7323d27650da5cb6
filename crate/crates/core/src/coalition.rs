//! Players, coalitions and the exact Shapley value computation.
//!
//! A coalition is a subset of the player set packed into a `u32` bit
//! pattern, which keeps power-set sweeps allocation-free. Every
//! characteristic-function evaluation is memoized on that bit pattern, so
//! an exact run touches each of the `2^n` coalitions exactly once.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, OracleError, Result};

/// Hard cap on the player count so coalitions fit in a `u32` bit pattern.
pub const MAX_PLAYERS: usize = 24;

/// Index of a player within a [`GameSpec`], in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlayerId(usize);

impl PlayerId {
    pub fn new(index: usize) -> Self {
        PlayerId(index)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subset of the player set: bit `j` set means player `j` is a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_bits(bits: u32) -> Self {
        Coalition(bits)
    }

    /// The grand coalition of an `n`-player game.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_PLAYERS);
        if n == 0 {
            Coalition(0)
        } else {
            Coalition(u32::MAX >> (32 - n))
        }
    }

    pub fn singleton(player: PlayerId) -> Self {
        Coalition(1 << player.index())
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, player: PlayerId) -> bool {
        self.0 & (1 << player.index()) != 0
    }

    pub fn with(self, player: PlayerId) -> Self {
        Coalition(self.0 | (1 << player.index()))
    }

    pub fn without(self, player: PlayerId) -> Self {
        Coalition(self.0 & !(1 << player.index()))
    }

    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Self {
        Coalition(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn cardinality(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn players(self) -> impl Iterator<Item = PlayerId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let idx = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(PlayerId(idx))
            }
        })
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for p in self.players() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{}", p.index())?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl fmt::LowerHex for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Player roster of a transferable-utility game: a count and stable labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    labels: Vec<String>,
}

impl GameSpec {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::NoPlayers);
        }
        if labels.len() > MAX_PLAYERS {
            return Err(Error::TooManyPlayers(labels.len()));
        }
        let mut seen = std::collections::HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(GameSpec { labels })
    }

    /// Convenience roster with labels `p0..p{n-1}`.
    pub fn unnamed(n: usize) -> Result<Self> {
        GameSpec::new((0..n).map(|i| format!("p{i}")).collect())
    }

    pub fn player_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, player: PlayerId) -> &str {
        &self.labels[player.index()]
    }

    pub fn players(&self) -> impl Iterator<Item = PlayerId> {
        (0..self.player_count()).map(PlayerId)
    }

    pub fn full_coalition(&self) -> Coalition {
        Coalition::full(self.player_count())
    }
}

/// Coalition worth. Must map the empty coalition to exactly 0; within one
/// analysis run evaluation must be a pure function of the coalition, so
/// results may be cached freely.
pub trait CharacteristicOracle: Sync {
    fn evaluate(&self, coalition: Coalition) -> std::result::Result<f64, OracleError>;
}

impl<F> CharacteristicOracle for F
where
    F: Fn(Coalition) -> f64 + Sync,
{
    fn evaluate(&self, coalition: Coalition) -> std::result::Result<f64, OracleError> {
        Ok(self(coalition))
    }
}

/// Per-player attribution values, indexed by [`PlayerId`].
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionVector {
    values: Vec<f64>,
}

impl AttributionVector {
    pub fn new(values: Vec<f64>) -> Self {
        AttributionVector { values }
    }

    pub fn get(&self, player: PlayerId) -> f64 {
        self.values[player.index()]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Shapley coefficient `k!(n-k-1)!/n!` for a subset of size `k` in an
/// `n`-player game, computed as the exact rational `1/(n * C(n-1, k))` and
/// rounded to `f64` once. Naive factorial arithmetic overflows past n≈20;
/// this form stays exact for every `n` up to [`MAX_PLAYERS`].
pub fn shapley_weight(k: usize, n: usize) -> Result<f64> {
    if n == 0 || k >= n {
        return Err(Error::WeightDomain { k, n });
    }
    Ok(1.0 / (n as f64 * binomial(n - 1, k) as f64))
}

/// Weight per subset cardinality, `weights[k] = k!(n-k-1)!/n!`.
pub(crate) fn shapley_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 1.0 / (n as f64 * binomial(n - 1, k) as f64))
        .collect()
}

/// Iterator over all subsets of a base bit mask, ordered by nondecreasing
/// cardinality and numerically within each cardinality class. The order is
/// part of the public contract: it fixes summation order and hence makes
/// results reproducible across thread counts.
pub(crate) struct MaskSubsets {
    positions: [u8; MAX_PLAYERS],
    m: u32,
    k: u32,
    current: u32,
    done: bool,
}

impl MaskSubsets {
    pub(crate) fn new(base: u32) -> Self {
        let mut positions = [0u8; MAX_PLAYERS];
        let mut m = 0u32;
        let mut bits = base;
        while bits != 0 {
            positions[m as usize] = bits.trailing_zeros() as u8;
            bits &= bits - 1;
            m += 1;
        }
        MaskSubsets {
            positions,
            m,
            k: 0,
            current: 0,
            done: false,
        }
    }

    fn expand(&self, compressed: u32) -> u32 {
        let mut out = 0u32;
        let mut bits = compressed;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out |= 1u32 << self.positions[j];
        }
        out
    }
}

impl Iterator for MaskSubsets {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.done {
            return None;
        }
        let out = self.expand(self.current);
        // advance with Gosper's hack within the cardinality class
        if self.k == 0 {
            self.k = 1;
            self.current = 1;
        } else {
            let c = self.current;
            let lo = c & c.wrapping_neg();
            let lz = c.wrapping_add(lo);
            self.current = lz | (((c ^ lz) / lo) >> 2);
        }
        if self.k > self.m || self.current >= (1u32 << self.m) {
            self.k += 1;
            if self.k > self.m {
                self.done = true;
            } else {
                self.current = (1u32 << self.k) - 1;
            }
        }
        Some(out)
    }
}

/// All coalitions `K ⊆ C \ {player}`, each exactly once, ordered by
/// nondecreasing `|K|` and numerically within a cardinality class.
pub fn subsets_excluding(
    game: &GameSpec,
    player: PlayerId,
) -> impl Iterator<Item = Coalition> {
    let base = game.full_coalition().bits() & !(1u32 << player.index());
    MaskSubsets::new(base).map(Coalition::from_bits)
}

/// Every coalition mask of an `n`-player game, ordered by nondecreasing
/// cardinality and numerically within each class. Computed once per
/// analysis: the per-player sweeps below only skip entries, which keeps
/// their summation order identical to [`subsets_excluding`].
pub(crate) fn sorted_masks(n: usize) -> Vec<u32> {
    let full = Coalition::full(n).bits();
    let mut out = Vec::with_capacity(1usize << n);
    out.push(0);
    for k in 1..=n {
        let mut c = (1u32 << k) - 1;
        while c <= full {
            out.push(c);
            let lo = c & c.wrapping_neg();
            let lz = c.wrapping_add(lo);
            c = lz | (((c ^ lz) / lo) >> 2);
        }
    }
    out
}

/// One player's Shapley sum over a fully materialized worth table, with a
/// fixed summation order.
pub(crate) fn accumulate_player(
    table: &[f64],
    weights: &[f64],
    masks: &[u32],
    player: usize,
) -> f64 {
    let bit = 1u32 << player;
    let mut phi = 0.0;
    for &mask in masks {
        if mask & bit != 0 {
            continue;
        }
        let k = mask.count_ones() as usize;
        phi += weights[k] * (table[(mask | bit) as usize] - table[mask as usize]);
    }
    phi
}

/// Exact Shapley values of `v`: the weighted average marginal contribution
/// of each player over the full power set. Each of the `2^n` coalitions is
/// evaluated exactly once; distinct coalitions are evaluated concurrently
/// and the per-player summation order is fixed, so the output is bitwise
/// identical across thread counts.
pub fn exact_shapley<O>(game: &GameSpec, oracle: &O) -> Result<AttributionVector>
where
    O: CharacteristicOracle + ?Sized,
{
    let n = game.player_count();
    let table = evaluate_table(n, oracle)?;
    if table[0] != 0.0 {
        return Err(Error::NonZeroEmptyCoalition(table[0]));
    }
    let weights = shapley_weights(n);
    let masks = sorted_masks(n);
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| accumulate_player(&table, &weights, &masks, i))
        .collect();
    Ok(AttributionVector::new(values))
}

pub(crate) fn evaluate_table<O>(n: usize, oracle: &O) -> Result<Vec<f64>>
where
    O: CharacteristicOracle + ?Sized,
{
    let size = 1usize << n;
    (0..size)
        .into_par_iter()
        .map(|mask| {
            let coalition = Coalition::from_bits(mask as u32);
            oracle
                .evaluate(coalition)
                .map_err(|source| Error::Oracle { coalition, source })
        })
        .collect()
}
