//! Sampling split across a rayon pool. Sample `i` depends only on
//! `(seed, i)`, so the output is the same for every worker count.

use innerlab_core::clt::{simulate_into, EmpiricalDistribution, NormalizedSum};
use innerlab_core::C64;
use rayon::prelude::*;

/// Samples per task.
pub const CHUNK: usize = 1 << 12;

pub fn pool(workers: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        anyhow::ensure!(w > 0, "worker count must be positive");
        builder = builder.num_threads(w);
    }
    Ok(builder.build()?)
}

pub fn fill(
    sum: &NormalizedSum<'_>,
    m: usize,
    seed: u64,
    workers: Option<usize>,
) -> anyhow::Result<Vec<C64>> {
    let mut out = vec![C64::new(0.0, 0.0); m];
    pool(workers)?.install(|| {
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(i, chunk)| {
                simulate_into(sum, seed, (i * CHUNK) as u64, chunk);
            });
    });
    Ok(out)
}

pub fn simulate(
    sum: &NormalizedSum<'_>,
    m: usize,
    seed: u64,
    workers: Option<usize>,
) -> anyhow::Result<EmpiricalDistribution> {
    let samples = fill(sum, m, seed, workers)?;
    Ok(EmpiricalDistribution::from_samples(sum, seed, samples)?)
}
