use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{MotifCatalog, MotifGraph};
use crate::stats::RunningStats;

/// Runs `count` replicates in parallel; results come back in replicate order,
/// so later reductions do not depend on the thread count.
pub(crate) fn par_replicates<T: Send>(count: usize, run: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..count).into_par_iter().map(&run).collect()
}

/// `2^{-i}` with `i` the catalogue index of the motif, or `8 + position`
/// for motifs outside the catalogue.
pub(crate) fn motif_weights(motifs: &[MotifGraph]) -> Vec<f64> {
    let catalog = MotifCatalog::standard();
    motifs
        .iter()
        .enumerate()
        .map(|(pos, f)| {
            let index = f
                .name()
                .and_then(|name| catalog.index_of(name))
                .unwrap_or(catalog.len() + pos + 1);
            MotifCatalog::weight(index)
        })
        .collect()
}

pub(crate) fn stats_of(values: impl IntoIterator<Item = f64>) -> RunningStats {
    values.into_iter().collect()
}

pub(crate) fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}
