//! Helpers shared by unit tests. Compiled only for `cfg(test)`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Average marginal contribution over all `n!` player orderings, straight
/// from the definition. Deliberately independent of the production path.
pub(crate) fn permutation_shapley(n: usize, v: &dyn Fn(u32) -> f64) -> Vec<f64> {
    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for (i, &head) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }

    let order: Vec<usize> = (0..n).collect();
    let perms = permutations(&order);
    let mut phi = vec![0.0; n];
    for perm in &perms {
        let mut mask = 0u32;
        for &p in perm {
            let before = v(mask);
            mask |= 1 << p;
            phi[p] += v(mask) - before;
        }
    }
    for x in &mut phi {
        *x /= perms.len() as f64;
    }
    phi
}

/// Random worth table over the full power set with `v(∅) = 0`.
pub(crate) fn random_table(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table: Vec<f64> = (0..1usize << n)
        .map(|_| rng.gen_range(-10.0..10.0))
        .collect();
    table[0] = 0.0;
    table
}

/// Random undirected edge set over `n` nodes.
pub(crate) fn random_edges(n: usize, density: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    edges
}
