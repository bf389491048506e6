//! Replicated sample → graph → statistic pipelines.

use crate::error::Result;
use crate::geometry::{GeomGraph, Shape};
use crate::intensity::{IntensityModel, ThinningSampler, Window};
use crate::scalar::Real;
use crate::seed::par_replicate;

/// Runs `f` on the graph of each of `n` independent replications and
/// returns the results in replication order.
pub fn replicate_graphs<T, R, F>(
    model: &IntensityModel<T>,
    window: &Window<T>,
    shape: &Shape<T>,
    n: usize,
    master_seed: u64,
    f: F,
) -> Result<Vec<R>>
where
    T: Real,
    R: Send,
    F: Fn(&GeomGraph<T>) -> Result<R> + Sync,
{
    let sampler = ThinningSampler::new(model, window)?;
    par_replicate(master_seed, n, |i, _| {
        let config = sampler.sample_replication(master_seed, i)?;
        let graph = GeomGraph::build(&config, shape)?;
        f(&graph)
    })
    .into_iter()
    .collect()
}
