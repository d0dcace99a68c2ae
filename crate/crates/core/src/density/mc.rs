use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::MotifGraph;
use crate::graphon::{Kernel, TypeMeasure};
use crate::rng::{rng_from_seed, stream_seed, SimRng};
use crate::stats::RunningStats;

use super::{DensityEstimate, Method};

/// Samples per parallel block. Fixed so results do not depend on the thread count.
const BLOCK: u64 = 4096;

/// Law of the vertex labels `x_1, ..., x_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexMeasure {
    Uniform,
    /// Atoms at the type points, sampled by inverse transform through the
    /// generalised inverse of the distribution function.
    Types(TypeMeasure<f64>),
    Point(f64),
}

impl VertexMeasure {
    fn sample(&self, rng: &mut SimRng) -> f64 {
        match self {
            VertexMeasure::Uniform => rng.random(),
            VertexMeasure::Types(mu) => {
                let u: f64 = rng.random();
                mu.atom(mu.inverse_index(&u))
            }
            VertexMeasure::Point(x) => *x,
        }
    }
}

/// Monte Carlo estimate of `int prod_{ij in E(F)} h(x_i, x_j) mu(dx_1) ... mu(dx_k)`.
pub fn mc_density<K: Kernel + ?Sized>(
    f: &MotifGraph,
    h: &K,
    mu: &VertexMeasure,
    samples: u64,
    seed: u64,
) -> Result<DensityEstimate> {
    if samples < 2 {
        return Err(Error::config("monte carlo density needs at least 2 samples"));
    }
    let blocks = samples.div_ceil(BLOCK);
    let partials: Vec<RunningStats> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_from_seed(stream_seed(seed, b));
            let len = BLOCK.min(samples - b * BLOCK);
            let mut xs = vec![0.0; f.k()];
            let mut stats = RunningStats::new();
            for _ in 0..len {
                for x in xs.iter_mut() {
                    *x = mu.sample(&mut rng);
                }
                let value: f64 = f.edges().iter().map(|&(a, c)| h.eval(xs[a], xs[c])).product();
                stats.push(value);
            }
            stats
        })
        .collect();
    let stats = partials.iter().fold(RunningStats::new(), |acc, s| acc.merge(s));
    Ok(DensityEstimate {
        value: stats.mean(),
        std_error: stats.std_error(),
        method: Method::MonteCarlo,
        samples,
    })
}
