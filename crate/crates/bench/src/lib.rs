//! Shared workloads for the criterion benchmarks.

use rand::Rng;
use wheeler_sums::gen::{self, Distribution};
use wheeler_sums::{AnyPartialSums, Backend};

pub const SIGMA: u32 = 4;
pub const QUERY_POOL: usize = 1 << 16;

/// A built structure plus pools of random `sum` and `search` arguments.
pub struct Workload {
    pub sums: AnyPartialSums,
    pub sum_args: Vec<usize>,
    pub search_args: Vec<u64>,
}

impl Workload {
    pub fn new(backend: Backend, n: usize, dist: Distribution, seed: u64) -> Self {
        let mut rng = gen::rng(seed ^ n as u64);
        let seq = gen::positive_sequence(&mut rng, n, SIGMA, dist);
        let sums = AnyPartialSums::build(backend, &seq, Some(SIGMA)).expect("positive workload");
        let u: u64 = seq.iter().map(|&x| x as u64).sum();
        Workload {
            sum_args: (0..QUERY_POOL).map(|_| rng.gen_range(0..=n)).collect(),
            search_args: (0..QUERY_POOL).map(|_| rng.gen_range(1..=u)).collect(),
            sums,
        }
    }
}
