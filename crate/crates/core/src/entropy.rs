//! Empirical entropy of integer sequences.
//!
//! `H_k(S) = (1/n) * sum_w |S_w| * H_0(S_w)`, where `S_w` collects the symbols
//! that follow each occurrence of the length-`k` context `w`. Only positions
//! with a full context to their left contribute; there is no wrap-around.

use std::collections::BTreeMap;

/// Basic shape of a sequence over `[0, sigma)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SequenceStats {
    pub n: usize,
    pub sigma: u32,
    pub max_value: u32,
    pub total: u64,
}

impl SequenceStats {
    /// Computes the stats; `sigma` defaults to `max_value + 1` when `None`.
    pub fn of(seq: &[u32], sigma: Option<u32>) -> Self {
        let max_value = seq.iter().copied().max().unwrap_or(0);
        let total = seq.iter().map(|&x| x as u64).sum();
        let sigma = sigma.unwrap_or(max_value + 1).max(max_value + 1);
        SequenceStats {
            n: seq.len(),
            sigma,
            max_value,
            total,
        }
    }
}

/// Follower counts for every length-`k` context of a sequence.
#[derive(Clone, Debug)]
pub struct ContextTable {
    k: usize,
    n: usize,
    followers: BTreeMap<Vec<u32>, BTreeMap<u32, u64>>,
}

impl ContextTable {
    pub fn build(seq: &[u32], k: usize) -> Self {
        let mut followers: BTreeMap<Vec<u32>, BTreeMap<u32, u64>> = BTreeMap::new();
        if k < seq.len() {
            for window in seq.windows(k + 1) {
                let (ctx, next) = window.split_at(k);
                *followers
                    .entry(ctx.to_vec())
                    .or_default()
                    .entry(next[0])
                    .or_default() += 1;
            }
        }
        ContextTable {
            k,
            n: seq.len(),
            followers,
        }
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn contexts(&self) -> usize {
        self.followers.len()
    }

    /// Number of (context, follower) pairs; `n - k` when `k < n`.
    pub fn total_followers(&self) -> u64 {
        self.followers.values().flat_map(|m| m.values()).sum()
    }

    /// `n * H_k`, the empirical entropy in bits for the whole sequence.
    pub fn entropy_bits(&self) -> f64 {
        self.followers
            .values()
            .map(|counts| counts_entropy_bits(counts.values().copied()))
            .sum()
    }

    pub fn entropy(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.entropy_bits() / self.n as f64
        }
    }
}

/// `m * H_0` for a multiset given by its symbol counts (`m` = sum of counts).
fn counts_entropy_bits(counts: impl Iterator<Item = u64> + Clone) -> f64 {
    let m: u64 = counts.clone().sum();
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let c = c as f64;
            c * (m / c).log2()
        })
        .sum()
}

/// Zeroth-order empirical entropy in bits per symbol; 0 for an empty sequence.
pub fn h0(seq: &[u32]) -> f64 {
    hk(seq, 0)
}

/// `k`-th order empirical entropy in bits per symbol.
pub fn hk(seq: &[u32], k: usize) -> f64 {
    ContextTable::build(seq, k).entropy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-9;

    /// Second route: for each position compare its context to every other
    /// position's context directly, no maps.
    fn brute_hk(seq: &[u32], k: usize) -> f64 {
        let n = seq.len();
        if n == 0 || k >= n {
            return 0.0;
        }
        let mut bits = 0.0f64;
        for i in k..n {
            let ctx = &seq[i - k..i];
            let mut same_ctx = 0.0f64;
            let mut same_both = 0.0;
            for t in k..n {
                if &seq[t - k..t] == ctx {
                    same_ctx += 1.0;
                    if seq[t] == seq[i] {
                        same_both += 1.0;
                    }
                }
            }
            // Each position contributes -lg Pr[symbol | context].
            bits += (same_ctx / same_both).log2();
        }
        bits / n as f64
    }

    #[test]
    fn h0_examples() {
        assert!((h0(&[1, 1, 2, 2]) - 1.0).abs() < EPS);
        assert_eq!(h0(&[5, 5, 5, 5]), 0.0);
        let expected = -(0.75f64 * 0.75f64.log2()) - 0.25 * 0.25f64.log2();
        assert!((h0(&[1, 1, 1, 2]) - expected).abs() < EPS);
        assert!((h0(&[1, 1, 1, 2]) - 0.811_278_124_459_132_8).abs() < EPS);
        assert_eq!(h0(&[]), 0.0);
    }

    #[test]
    fn alternating_is_deterministic_at_order_one() {
        let seq: Vec<u32> = [0, 1].repeat(4);
        assert!((h0(&seq) - 1.0).abs() < EPS);
        assert_eq!(hk(&seq, 1), 0.0);
        assert_eq!(brute_hk(&seq, 1), 0.0);
        let table = ContextTable::build(&seq, 1);
        assert_eq!(table.contexts(), 2);
        assert_eq!(table.total_followers(), 7);
    }

    #[test]
    fn order_at_least_length_is_zero() {
        assert_eq!(hk(&[1, 2, 3], 3), 0.0);
        assert_eq!(hk(&[1, 2, 3], 10), 0.0);
        assert_eq!(ContextTable::build(&[1, 2, 3], 5).total_followers(), 0);
    }

    #[test]
    fn matches_brute_force_and_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n: usize = rng.gen_range(1..=1000);
            let sigma = rng.gen_range(1..=6);
            let seq: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
            let mut prev = f64::INFINITY;
            for k in 0..=3 {
                let h = hk(&seq, k);
                assert!((h - brute_hk(&seq, k)).abs() < EPS, "k={k}");
                assert!(h <= prev + EPS);
                assert!(h <= (sigma as f64).log2() + EPS);
                prev = h;
            }
            assert_eq!(
                ContextTable::build(&seq, 2).total_followers(),
                n.saturating_sub(2) as u64
            );
        }
    }

    #[test]
    fn stats() {
        let s = SequenceStats::of(&[1, 1, 2, 0, 3], Some(4));
        assert_eq!(s.n, 5);
        assert_eq!(s.max_value, 3);
        assert_eq!(s.total, 7);
        assert!(s.total <= (s.sigma as u64 - 1) * s.n as u64);
        assert_eq!(SequenceStats::of(&[2, 7], None).sigma, 8);
    }

    proptest! {
        #[test]
        fn relabelling_preserves_entropy(
            seq in prop::collection::vec(0u32..5, 0..300),
            k in 0usize..4,
            shift in 1u32..5,
        ) {
            let perm = |x: u32| (x + shift) % 5;
            let relabelled: Vec<u32> = seq.iter().map(|&x| perm(x)).collect();
            prop_assert!((hk(&seq, k) - hk(&relabelled, k)).abs() < EPS);
        }
    }
}
