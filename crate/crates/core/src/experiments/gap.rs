use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::density::{density_gap_bound, hom_density, inj_density};
use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, MotifGraph};
use crate::rng::{replicate_seed, rng_from_seed, stream_seed};
use crate::stats::loglog_slope;

use super::params::Params;
use super::report::{Cell, Check, ExperimentReport};

/// Erdos-Renyi graph `G(n, p)`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> FiniteGraph {
    let mut rng = rng_from_seed(seed);
    let mut g = FiniteGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Largest `|t_inj - t|` over the motifs for one graph, and whether every
/// motif respected the gap bound.
pub fn max_gap(motifs: &[MotifGraph], g: &FiniteGraph) -> (f64, bool) {
    motifs.iter().fold((0.0f64, true), |(worst, ok), f| {
        let gap = (inj_density(f, g).value - hom_density(f, g).value).abs();
        (worst.max(gap), ok && gap <= density_gap_bound(f, g))
    })
}

/// Homomorphism versus injective density gap on random graphs: bounded by
/// `B(F, n)` and shrinking like `1/n`.
///
/// Keys: `n_list` (`25,50,100,200`), `graphs` (per size and edge
/// probability, 20), `p_list` (`0.2,0.5,0.8`), `motifs` (all catalogue
/// motifs), `seed`.
pub fn gap_rate_check(params: &Params) -> Result<ExperimentReport> {
    let started = Instant::now();
    let n_list = params.list_usize_or("n_list", &[25, 50, 100, 200])?;
    let graphs = params.usize_or("graphs", 20)?;
    let p_list = params.list_f64_or("p_list", &[0.2, 0.5, 0.8])?;
    let motifs = params.motifs_or(
        "motifs",
        &["edge", "path2", "triangle", "path3", "star3", "cycle4", "k4minus", "k4"],
    )?;
    let seed = params.u64_or("seed", 1)?;
    if p_list.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::config("parameter 'p_list': probabilities must lie in [0, 1]"));
    }
    if graphs == 0 || n_list.is_empty() {
        return Err(Error::config("parameters 'graphs' and 'n_list' must be non-empty"));
    }

    let mut report = ExperimentReport::new("gap_rate", "n", params.clone());
    let mut maxima = Vec::new();
    let mut bound_ok = true;
    for &n in &n_list {
        let jobs: Vec<(usize, f64)> = p_list.iter().flat_map(|&p| (0..graphs).map(move |i| (i, p))).collect();
        let results: Vec<(f64, bool)> = jobs
            .par_iter()
            .enumerate()
            .map(|(j, &(_, p))| {
                let g = random_graph(n, p, stream_seed(replicate_seed(seed, j as u64), n as u64));
                max_gap(&motifs, &g)
            })
            .collect();
        let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
        bound_ok &= results.iter().all(|r| r.1);
        maxima.push(worst);
        report.cells.push(Cell {
            x: n as f64,
            series: "max_gap".into(),
            mean: worst,
            std_error: 0.0,
            replicates: results.len() as u64,
        });
    }
    let xs: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&xs, &maxima);
    report.metric("loglog_slope", slope);
    report.checks.push(Check::flag("gap_within_bound", bound_ok));
    report.checks.push(Check::at_most("loglog_slope", if slope.is_nan() { 0.0 } else { slope }, -0.8));
    report.elapsed_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::motif_from_name;

    #[test]
    fn small_rate_check() {
        let mut p = Params::new();
        p.set_text("n_list", "20,40,80");
        p.set_text("graphs", "5");
        p.set_text("motifs", "edge,path2,triangle");
        let report = gap_rate_check(&p).unwrap();
        assert!(report.passed(), "{}", report.summary());
    }

    #[test]
    fn complete_graph_gap() {
        let g = FiniteGraph::complete(10);
        let (gap, ok) = max_gap(&[motif_from_name("triangle").unwrap()], &g);
        // t_inj = 1, t = 10*9*8 / 1000
        assert!((gap - 0.28).abs() < 1e-12);
        assert!(ok);
    }
}
