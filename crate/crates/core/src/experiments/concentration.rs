use std::time::Instant;

use crate::density::inj_density;
use crate::dynamics::{evaluate_landscape, snapshot_graph, EdgeNoise, MoranSim, MoranState};
use crate::error::{Error, Result};
use crate::rng::{replicate_seed, stream_seed};

use super::common::{par_replicates, stats_of};
use super::params::{scenario, Params};
use super::report::{Cell, Check, ExperimentReport};
use super::urn::conditional_mean_inj;

/// `2 exp(-2 eps^2 C(n,2) / C(k,2)^2)`: changing the edges at one vertex
/// pair moves `t_inj` by at most `C(k,2) / C(n,2)`.
pub fn mcdiarmid_bound(n: usize, k: usize, eps: f64) -> f64 {
    let pairs_n = (n * n.saturating_sub(1) / 2) as f64;
    let pairs_k = (k * k.saturating_sub(1) / 2) as f64;
    if pairs_k == 0.0 {
        return 0.0;
    }
    (2.0 * (-2.0 * eps * eps * pairs_n / (pairs_k * pairs_k)).exp()).min(2.0)
}

/// Deviation of the snapshot's injective density from its conditional mean
/// given the types, against the bounded-differences tail bound.
///
/// Keys: `scenario` (default `example1`) and its parameters, `n` (500),
/// `motifs` (`edge`), `s` (0.5), `replicates` (200, at least 50),
/// `epsilon` (0.05), `seed`.
pub fn concentration_check(params: &Params) -> Result<ExperimentReport> {
    let started = Instant::now();
    let sc = scenario(&params.str_or("scenario", "example1")?, params)?;
    let n = params.usize_or("n", 500)?;
    let motifs = params.motifs_or("motifs", &["edge"])?;
    let s = params.f64_or("s", 0.5)?;
    let replicates = params.usize_or("replicates", 200)?;
    let eps = params.f64_or("epsilon", 0.05)?;
    let seed = params.u64_or("seed", 1)?;
    if replicates < 50 {
        return Err(Error::config(format!("parameter 'replicates': at least 50 required, got {replicates}")));
    }
    if !(s >= 0.0) {
        return Err(Error::config(format!("parameter 's': must be non-negative, got {s}")));
    }
    if !(eps > 0.0) {
        return Err(Error::config(format!("parameter 'epsilon': must be positive, got {eps}")));
    }
    let initial = MoranState::from_measure(n, &sc.y0)?;

    // per replicate: |t_inj - E'[t_inj]| for every motif
    let deviations = par_replicates(replicates, |rep| {
        let rs = replicate_seed(seed, rep as u64);
        let mut sim = MoranSim::new(initial.clone(), stream_seed(rs, 0));
        sim.advance_to(s);
        let state = sim.state();
        let h = evaluate_landscape(&sc.landscape, &state.frequencies());
        let g = snapshot_graph(state, &h, &sc.r, &EdgeNoise::new(stream_seed(rs, 1)))?;
        motifs
            .iter()
            .map(|f| Ok((inj_density(f, &g).value - conditional_mean_inj(f, state, &h, &sc.r)?).abs()))
            .collect::<Result<Vec<f64>>>()
    })?;

    let mut report = ExperimentReport::new("concentration", "n", params.clone());
    for (i, f) in motifs.iter().enumerate() {
        let label = f.label();
        let devs: Vec<f64> = deviations.iter().map(|d| d[i]).collect();
        let exceed = stats_of(devs.iter().map(|&d| if d > eps { 1.0 } else { 0.0 }));
        report.cells.push(Cell::from_stats(n as f64, format!("{label}:abs_deviation"), &stats_of(devs.iter().copied())));
        report.cells.push(Cell::from_stats(n as f64, format!("{label}:exceedance"), &exceed));
        let bound = mcdiarmid_bound(n, f.k(), eps);
        let b = bound.min(1.0);
        let binomial_se = (b * (1.0 - b) / replicates as f64).sqrt();
        report.metric(format!("{label}:bound"), bound);
        report.metric(format!("{label}:max_deviation"), devs.iter().copied().fold(0.0, f64::max));
        report.checks.push(Check::at_most(
            format!("{label}:exceedance_within_bound"),
            exceed.mean(),
            bound + 3.0 * binomial_se,
        ));
    }
    report.elapsed_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}
