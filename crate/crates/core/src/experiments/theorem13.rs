use std::time::Instant;

use crate::density::{inj_density, step_density};
use crate::dynamics::{evaluate_landscape, snapshot_graph, EdgeNoise, MoranSim, MoranState};
use crate::error::{Error, Result};
use crate::graphon::step_graphon_at;
use crate::rng::{replicate_seed, stream_seed};
use crate::stats::{loglog_slope, RunningStats};

use super::common::{motif_weights, par_replicates, stats_of, strictly_decreasing};
use super::params::{scenario, Params};
use super::report::{Cell, Check, ExperimentReport};

/// Discrepancy between the snapshot graph and the block graphon of the same
/// realised frequencies, as `n` grows.
///
/// For every `n` in `n_list` and replicate, a Moran population is run through
/// `s_grid`; at each time the snapshot graph `G` and the step graphon `h` built
/// from the realised frequencies give
/// `D = sum_F 2^{-i_F} |t_inj(F, G) - t(F, h)|`. Each replicate contributes the
/// mean of `D` over `s_grid`.
///
/// Keys: `scenario` and its parameters, `motifs` (`edge,triangle`), `s_grid`
/// (`0.25,0.5`), `n_list` (`100,400,1600`), `replicates` (20), `tolerance`
/// (0.05), `seed`.
pub fn theorem13_experiment(params: &Params) -> Result<ExperimentReport> {
    let started = Instant::now();
    let sc = scenario(&params.str_or("scenario", "example1")?, params)?;
    let motifs = params.motifs_or("motifs", &["edge", "triangle"])?;
    let weights = motif_weights(&motifs);
    let mut s_grid = params.list_f64_or("s_grid", &[0.25, 0.5])?;
    let n_list = params.list_usize_or("n_list", &[100, 400, 1600])?;
    let replicates = params.usize_or("replicates", 20)?;
    let tolerance = params.f64_or("tolerance", 0.05)?;
    let seed = params.u64_or("seed", 1)?;
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) || n_list[0] == 0 {
        return Err(Error::config("parameter 'n_list': must be a non-empty increasing list of positive sizes"));
    }
    if s_grid.is_empty() || s_grid.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::config("parameter 's_grid': must be a non-empty list of non-negative times"));
    }
    if replicates < 2 {
        return Err(Error::config("parameter 'replicates': at least 2 required"));
    }
    s_grid.sort_by(f64::total_cmp);

    let mut report = ExperimentReport::new("theorem13", "n", params.clone());
    let mut means = Vec::with_capacity(n_list.len());
    for &n in &n_list {
        let initial = MoranState::from_measure(n, &sc.y0)?;
        // per replicate: (mean D over s, per-motif mean |gap| over s)
        let rows = par_replicates(replicates, |rep| {
            let rs = stream_seed(replicate_seed(seed, rep as u64), n as u64);
            let mut sim = MoranSim::new(initial.clone(), stream_seed(rs, 0));
            let noise = EdgeNoise::new(stream_seed(rs, 1));
            let mut d_total = 0.0;
            let mut gaps = vec![0.0; motifs.len()];
            for &s in &s_grid {
                sim.advance_to(s);
                let state = sim.state();
                let y = state.frequencies();
                let h_values = evaluate_landscape(&sc.landscape, &y);
                let g = snapshot_graph(state, &h_values, &sc.r, &noise)?;
                let limit = step_graphon_at(&y, &h_values, &sc.r)?;
                for (i, f) in motifs.iter().enumerate() {
                    let gap = (inj_density(f, &g).value - step_density(f, &limit)?).abs();
                    gaps[i] += gap / s_grid.len() as f64;
                    d_total += weights[i] * gap;
                }
            }
            Ok((d_total / s_grid.len() as f64, gaps))
        })?;
        let d_stats = stats_of(rows.iter().map(|r| r.0));
        means.push(d_stats.mean());
        report.cells.push(Cell::from_stats(n as f64, "D", &d_stats));
        for (i, f) in motifs.iter().enumerate() {
            let stats: RunningStats = rows.iter().map(|r| r.1[i]).collect();
            report.cells.push(Cell::from_stats(n as f64, f.label(), &stats));
        }
        log::info!("theorem13: n = {n}, mean D = {:.4e}", d_stats.mean());
    }
    let xs: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
    report.metric("D_loglog_slope", loglog_slope(&xs, &means));
    report.checks.push(Check::flag("D_strictly_decreasing", strictly_decreasing(&means)));
    report.checks.push(Check::below("final_D", *means.last().expect("n_list is non-empty"), tolerance));
    report.elapsed_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}
