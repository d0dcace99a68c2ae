use crate::error::Result;
use crate::graph::{MotifCatalog, MotifGraph};
use crate::graphon::{ConnectionFunction, Graphon};
use crate::rng::stream_seed;

use super::{mc_density, step_density_estimate, DensityEstimate, Method, VertexMeasure};

#[derive(Debug, Clone, PartialEq)]
pub struct DsubEstimate {
    /// `sum_{i <= M} 2^{-i} |t_{F_i}(h1) - t_{F_i}(h2)|`
    pub value: f64,
    /// Truncation tail `2^{-M}` plus the weighted Monte Carlo standard errors.
    pub error_bound: f64,
    pub terms: Vec<(DensityEstimate, DensityEstimate)>,
}

/// `t_F(h)`: exact when `h` is a step graphon within budget or a constant,
/// Monte Carlo under the uniform vertex measure otherwise.
pub fn density_of(f: &MotifGraph, h: &Graphon, samples: u64, seed: u64) -> Result<DensityEstimate> {
    match h {
        Graphon::Step(step) => match step_density_estimate(f, step) {
            Ok(est) => Ok(est),
            Err(crate::Error::Budget { .. }) => mc_density(f, step, &VertexMeasure::Uniform, samples, seed),
            Err(e) => Err(e),
        },
        Graphon::Function(ConnectionFunction::Constant { c }) => Ok(DensityEstimate::exact(
            c.powi(f.edge_count() as i32),
            Method::BlockSum,
        )),
        other => mc_density(f, other, &VertexMeasure::Uniform, samples, seed),
    }
}

/// Subgraph distance truncated to the first `motifs` catalogue entries.
///
/// Both graphons share the Monte Carlo stream of each motif, so the
/// estimate is symmetric and vanishes for identical inputs.
pub fn d_sub_truncated(h1: &Graphon, h2: &Graphon, motifs: usize, samples: u64, seed: u64) -> Result<DsubEstimate> {
    let catalog = MotifCatalog::standard();
    if motifs > catalog.len() {
        return Err(crate::Error::Config(format!(
            "d_sub truncation {motifs} exceeds the catalogue size {}",
            catalog.len()
        )));
    }
    let mut value = 0.0;
    let mut error_bound = MotifCatalog::weight(motifs);
    let mut terms = Vec::with_capacity(motifs);
    for (i, f) in catalog.motifs().iter().take(motifs).enumerate() {
        let index = i + 1;
        let motif_seed = stream_seed(seed, index as u64);
        let a = density_of(f, h1, samples, motif_seed)?;
        let b = density_of(f, h2, samples, motif_seed)?;
        let w = MotifCatalog::weight(index);
        value += w * (a.value - b.value).abs();
        error_bound += w * (a.std_error + b.std_error);
        terms.push((a, b));
    }
    Ok(DsubEstimate {
        value,
        error_bound,
        terms,
    })
}
