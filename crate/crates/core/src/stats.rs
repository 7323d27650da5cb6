//! Nonparametric significance machinery: two-sided Mann-Whitney U tests
//! with tie and continuity corrections, the zero-atom relevance test, star
//! annotation and pruning of the knowledge graph down to relevant players.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::coalition::PlayerId;
use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::hkg::HkgGraph;

/// Significance stars, thresholded at p < 0.05, 0.01 and 0.001.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stars {
    None,
    One,
    Two,
    Three,
}

impl Stars {
    pub fn from_p(p: f64) -> Stars {
        if p < 0.001 {
            Stars::Three
        } else if p < 0.01 {
            Stars::Two
        } else if p < 0.05 {
            Stars::One
        } else {
            Stars::None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stars::None => "",
            Stars::One => "*",
            Stars::Two => "**",
            Stars::Three => "***",
        }
    }
}

impl std::fmt::Display for Stars {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// The smaller of the two U statistics.
    pub u_statistic: f64,
    pub p_value: f64,
    pub stars: Stars,
}

/// Average ranks of the concatenation of `a` and `b`, plus the tie term
/// `Σ (t³ - t)` over tie groups.
fn ranks_with_ties(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let n = a.len() + b.len();
    let mut order: Vec<usize> = (0..n).collect();
    let value = |i: usize| if i < a.len() { a[i] } else { b[i - a.len()] };
    order.sort_by(|&x, &y| value(x).partial_cmp(&value(y)).expect("samples must not contain NaN"));

    let mut ranks = vec![0.0; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && value(order[j]) == value(order[i]) {
            j += 1;
        }
        // average rank of positions i..j (1-based)
        let rank = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    (ranks, tie_term)
}

/// Two-sided Mann-Whitney U test under the normal approximation, with tie
/// correction in the variance and a continuity correction of 1/2. When the
/// rank variance degenerates (every value tied), there is no expressible
/// evidence of a difference and p = 1.
pub fn mann_whitney_u(sample_a: &[f64], sample_b: &[f64]) -> Result<TestResult> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample_a.len() < 20 || sample_b.len() < 20 {
        static SMALL_SAMPLE_WARNING: std::sync::Once = std::sync::Once::new();
        let (a, b) = (sample_a.len(), sample_b.len());
        SMALL_SAMPLE_WARNING.call_once(|| {
            log::warn!(
                "Mann-Whitney samples of size {a} and {b}: the normal approximation is crude below 20"
            );
        });
    }
    let n1 = sample_a.len() as f64;
    let n2 = sample_b.len() as f64;
    let n = n1 + n2;

    let (ranks, tie_term) = ranks_with_ties(sample_a, sample_b);
    let r1: f64 = ranks[..sample_a.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let u2 = n1 * n2 - u1;
    let u = u1.min(u2);

    let mean = n1 * n2 / 2.0;
    let variance = (n1 * n2 / 12.0) * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let p_value = if variance <= 0.0 {
        1.0
    } else {
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let z = (u - mean + 0.5) / variance.sqrt();
        (2.0 * normal.cdf(z)).clamp(0.0, 1.0)
    };
    Ok(TestResult {
        u_statistic: u,
        p_value,
        stars: Stars::from_p(p_value),
    })
}

/// Test a sample against an all-zero reference of equal length: "is this
/// distribution distinguishable from a null contribution?"
pub fn zero_atom_test(sample: &[f64]) -> Result<TestResult> {
    let zeros = vec![0.0; sample.len()];
    mann_whitney_u(sample, &zeros)
}

/// Relevance decision per player plus the knowledge graph induced on the
/// players that survived.
#[derive(Debug, Clone)]
pub struct RelevanceVerdict {
    /// Flag per original player, in player order.
    pub relevant: Vec<bool>,
    /// Original ids of the kept players, ascending.
    pub kept: Vec<PlayerId>,
    /// Induced subgraph over the kept players, renumbered to `0..kept.len()`.
    pub pruned: InteractionGraph,
}

/// Keep the players whose zero-atom test clears p < 0.001 and prune the
/// knowledge graph down to them.
pub fn prune_relevant(hkg: &HkgGraph, per_player_samples: &[Vec<f64>]) -> Result<RelevanceVerdict> {
    let n = hkg.player_count();
    if per_player_samples.len() != n {
        return Err(Error::SampleCount {
            got: per_player_samples.len(),
            expected: n,
        });
    }
    let mut relevant = Vec::with_capacity(n);
    let mut kept = Vec::new();
    for (i, sample) in per_player_samples.iter().enumerate() {
        let keep = zero_atom_test(sample)?.p_value < 0.001;
        relevant.push(keep);
        if keep {
            kept.push(PlayerId::new(i));
        }
    }
    let pruned = hkg.graph().induced(&kept)?;
    Ok(RelevanceVerdict {
        relevant,
        kept,
        pruned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hkg::{build_hkg, AgentFeatureSpec, AttributeClass, FeatureSpec};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_samples_are_indistinguishable() {
        let a: Vec<f64> = (1..=30).map(f64::from).collect();
        let result = mann_whitney_u(&a, &a).unwrap();
        assert_eq!(result.u_statistic, 30.0 * 30.0 / 2.0);
        assert!(result.p_value >= 0.95);
        assert_eq!(result.stars, Stars::None);
    }

    #[test]
    fn complete_separation_is_significant() {
        let a: Vec<f64> = (1..=30).map(f64::from).collect();
        let b: Vec<f64> = (31..=60).map(f64::from).collect();
        let result = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(result.u_statistic, 0.0);
        assert!(result.p_value < 0.001);
        assert_eq!(result.stars, Stars::Three);
    }

    #[test]
    fn all_ties_degenerate_to_p_one() {
        let zeros = vec![0.0; 72];
        let result = mann_whitney_u(&zeros, &zeros).unwrap();
        assert_eq!(result.p_value, 1.0);
    }

    #[test]
    fn empty_samples_are_domain_errors() {
        assert!(matches!(mann_whitney_u(&[], &[1.0]), Err(Error::EmptySample)));
        assert!(matches!(mann_whitney_u(&[1.0], &[]), Err(Error::EmptySample)));
    }

    #[test]
    fn known_p_value_matches_reference() {
        // scipy.stats.mannwhitneyu({1..5}, {6..10}, two-sided, continuity)
        let a: Vec<f64> = (1..=5).map(f64::from).collect();
        let b: Vec<f64> = (6..=10).map(f64::from).collect();
        let result = mann_whitney_u(&a, &b).unwrap();
        assert!((result.p_value - 0.012185).abs() < 1e-5, "p = {}", result.p_value);
    }

    #[test]
    fn zero_atom_on_constant_sample() {
        let sample = vec![32.30; 72];
        let result = zero_atom_test(&sample).unwrap();
        assert!(result.p_value < 0.001);
        assert_eq!(result.stars, Stars::Three);
    }

    #[test]
    fn zero_atom_on_zero_sample() {
        let sample = vec![0.0; 72];
        let result = zero_atom_test(&sample).unwrap();
        assert!(result.p_value >= 0.95);
        assert_eq!(result.stars, Stars::None);
    }

    #[test]
    fn alternating_noise_is_not_significant() {
        let sample: Vec<f64> = (0..72)
            .map(|i| if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let result = zero_atom_test(&sample).unwrap();
        assert!(result.p_value >= 0.001);
    }

    #[test]
    fn p_is_symmetric_in_the_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a: Vec<f64> = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..31).map(|_| rng.gen_range(-0.5..1.5)).collect();
            let ab = mann_whitney_u(&a, &b).unwrap();
            let ba = mann_whitney_u(&b, &a).unwrap();
            assert_eq!(ab.p_value, ba.p_value);
            assert_eq!(ab.u_statistic, ba.u_statistic);
        }
    }

    #[test]
    fn star_thresholds_are_exact() {
        assert_eq!(Stars::from_p(0.0009999), Stars::Three);
        assert_eq!(Stars::from_p(0.001), Stars::Two);
        assert_eq!(Stars::from_p(0.009999), Stars::Two);
        assert_eq!(Stars::from_p(0.01), Stars::One);
        assert_eq!(Stars::from_p(0.049999), Stars::One);
        assert_eq!(Stars::from_p(0.05), Stars::None);
        assert_eq!(Stars::from_p(1.0), Stars::None);
    }

    #[test]
    fn unit_shift_of_two_sigma_is_detected() {
        // standard-normal pairs via Box-Muller, mean shift of 2
        let mut detected = 0;
        let trials = 1000;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut gauss = || {
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            };
            let a: Vec<f64> = (0..72).map(|_| gauss()).collect();
            let b: Vec<f64> = (0..72).map(|_| gauss() + 2.0).collect();
            if mann_whitney_u(&a, &b).unwrap().p_value < 0.001 {
                detected += 1;
            }
        }
        assert!(
            detected * 100 >= trials * 99,
            "detected only {detected}/{trials}"
        );
    }

    fn toy_hkg() -> HkgGraph {
        let agents: Vec<AgentFeatureSpec> = (0..2)
            .map(|id| AgentFeatureSpec {
                id,
                name: None,
                features: vec![
                    FeatureSpec {
                        label: "Core".into(),
                        class: AttributeClass::Necessary,
                    },
                    FeatureSpec {
                        label: "Policy".into(),
                        class: AttributeClass::Policy,
                    },
                    FeatureSpec {
                        label: "Skill".into(),
                        class: AttributeClass::Active,
                    },
                ],
            })
            .collect();
        build_hkg(&agents).unwrap()
    }

    #[test]
    fn all_zero_samples_prune_everything() {
        let hkg = toy_hkg();
        let samples = vec![vec![0.0; 40]; hkg.player_count()];
        let verdict = prune_relevant(&hkg, &samples).unwrap();
        assert!(verdict.kept.is_empty());
        assert_eq!(verdict.pruned.node_count(), 0);
    }

    #[test]
    fn single_relevant_player_survives_alone() {
        let hkg = toy_hkg();
        let mut samples = vec![vec![0.0; 40]; hkg.player_count()];
        samples[2] = vec![5.0; 40];
        let verdict = prune_relevant(&hkg, &samples).unwrap();
        assert_eq!(verdict.kept, vec![PlayerId::new(2)]);
        assert_eq!(verdict.pruned.node_count(), 1);
        assert!(verdict.pruned.edges().is_empty());
        assert!(verdict.relevant[2]);
        assert_eq!(verdict.relevant.iter().filter(|&&r| r).count(), 1);
    }

    #[test]
    fn sample_count_must_match_players() {
        let hkg = toy_hkg();
        let samples = vec![vec![0.0; 40]; 2];
        assert!(matches!(
            prune_relevant(&hkg, &samples),
            Err(Error::SampleCount { .. })
        ));
    }
}
