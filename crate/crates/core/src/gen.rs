//! Seeded workloads: integer sequences and graphs that are Wheeler by
//! construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::wheeler::{Edge, LabeledGraph};

pub type WorkloadRng = ChaCha8Rng;

pub fn rng(seed: u64) -> WorkloadRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distribution {
    /// Uniform over `1..sigma`.
    Uniform,
    /// `1` with probability 0.9, otherwise uniform over `2..sigma`.
    Skewed,
}

/// `n` values in `1..sigma` (`sigma >= 2`).
pub fn positive_sequence<R: Rng>(rng: &mut R, n: usize, sigma: u32, dist: Distribution) -> Vec<u32> {
    assert!(sigma >= 2, "need at least one positive symbol");
    (0..n)
        .map(|_| match dist {
            Distribution::Uniform => rng.gen_range(1..sigma),
            Distribution::Skewed if sigma == 2 || rng.gen_bool(0.9) => 1,
            Distribution::Skewed => rng.gen_range(2..sigma),
        })
        .collect()
}

/// A forest of `roots` tries with `nodes` vertices in total, edges labelled
/// `0..sigma`. Vertices are ranked by reversed root-to-vertex label string,
/// ties (equal strings in different tries) broken by root, with every root
/// first; this order satisfies all three axioms.
pub fn trie_forest<R: Rng>(rng: &mut R, roots: usize, nodes: usize, sigma: u32) -> LabeledGraph {
    assert!(roots >= 1 && nodes >= roots && sigma >= 1);
    build_forest(rng, roots, nodes, sigma, usize::MAX)
}

/// Like [`trie_forest`] with every vertex having at most one child.
pub fn path_forest<R: Rng>(rng: &mut R, roots: usize, nodes: usize, sigma: u32) -> LabeledGraph {
    assert!(roots >= 1 && nodes >= roots && sigma >= 1);
    build_forest(rng, roots, nodes, sigma, 1)
}

fn build_forest<R: Rng>(
    rng: &mut R,
    roots: usize,
    nodes: usize,
    sigma: u32,
    max_children: usize,
) -> LabeledGraph {
    // Per vertex: root id, parent, in-label, children labels.
    let mut root_of: Vec<usize> = (0..roots).collect();
    let mut parent: Vec<Option<(usize, u32)>> = vec![None; roots];
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); roots];
    let mut open: Vec<usize> = (0..roots).collect();
    while root_of.len() < nodes && !open.is_empty() {
        let slot = rng.gen_range(0..open.len());
        let p = open[slot];
        let free: Vec<u32> = (0..sigma).filter(|a| !children[p].contains(a)).collect();
        let &label = free.choose(rng).expect("open vertices have a free label");
        let v = root_of.len();
        root_of.push(root_of[p]);
        parent.push(Some((p, label)));
        children.push(Vec::new());
        children[p].push(label);
        open.push(v);
        if children[p].len() >= max_children.min(sigma as usize) {
            open.swap_remove(slot);
        }
    }

    // Sort key: labels shifted by one, read from the vertex up, then 0 and the root.
    let key = |mut v: usize| -> Vec<u64> {
        let mut k = Vec::new();
        while let Some((p, a)) = parent[v] {
            k.push(a as u64 + 1);
            v = p;
        }
        k.push(0);
        k.push(root_of[v] as u64);
        k
    };
    let mut order: Vec<(Vec<u64>, usize)> = (0..root_of.len()).map(|v| (key(v), v)).collect();
    order.sort_unstable();
    let mut rank = vec![0usize; root_of.len()];
    for (r, (_, v)) in order.iter().enumerate() {
        rank[*v] = r + 1;
    }

    let mut edges: Vec<Edge> = parent
        .iter()
        .enumerate()
        .filter_map(|(v, p)| {
            p.map(|(p, a)| Edge {
                origin: rank[p],
                dest: rank[v],
                label: a,
            })
        })
        .collect();
    edges.shuffle(rng);
    let labels = (0..sigma).map(symbol_name).collect();
    LabeledGraph::new(root_of.len(), edges, labels).expect("generated graph is well formed")
}

/// Token for symbol `a`: `A`..`Z` for the first 26, then zero-padded numbers
/// so that lexicographic order matches numeric order.
pub fn symbol_name(a: u32) -> String {
    if a < 26 {
        char::from(b'A' + a as u8).to_string()
    } else {
        format!("~{a:010}")
    }
}

/// Median over batches of `batch` consecutive queries of the mean time per
/// query, in nanoseconds. Batching keeps clock overhead out of the measurement.
pub fn median_ns_per_query<T: Copy, F: FnMut(T) -> u64>(queries: &[T], batch: usize, mut f: F) -> f64 {
    assert!(batch > 0);
    let mut means: Vec<f64> = queries
        .chunks(batch)
        .map(|chunk| {
            let start = std::time::Instant::now();
            let mut acc = 0u64;
            for &q in chunk {
                acc = acc.wrapping_add(f(q));
            }
            std::hint::black_box(acc);
            start.elapsed().as_nanos() as f64 / chunk.len() as f64
        })
        .collect();
    if means.is_empty() {
        return 0.0;
    }
    means.sort_by(|a, b| a.total_cmp(b));
    means[means.len() / 2]
}
