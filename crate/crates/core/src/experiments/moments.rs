use std::time::Instant;

use crate::dynamics::{MoranSim, MoranState, RateModulator, WrightFisherSim, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::graphon::TypeMeasure;
use crate::rng::replicate_seed;
use crate::stats::RunningStats;

use super::common::par_replicates;
use super::params::Params;
use super::report::{Cell, Check, ExperimentReport};

/// Two-type moment check: `E[Y_0(s)] = Y_0(0)` (no drift) and
/// `E[Y_0(1 - Y_0)](s) = Y_0(0)(1 - Y_0(0)) e^{-2s}`.
///
/// Keys: `simulator` (`moran` or `wf`), `n` (1000), `y0` (0.3), `s_grid`
/// (`0.25,0.5`), `replicates` (400), `dt` (1e-4), `seed`.
pub fn heterozygosity_check(params: &Params) -> Result<ExperimentReport> {
    let started = Instant::now();
    let simulator = params.str_or("simulator", "moran")?;
    let n = params.usize_or("n", 1000)?;
    let y0 = params.f64_or("y0", 0.3)?;
    let mut s_grid = params.list_f64_or("s_grid", &[0.25, 0.5])?;
    let replicates = params.usize_or("replicates", 400)?;
    let dt = params.f64_or("dt", DEFAULT_DT)?;
    let seed = params.u64_or("seed", 1)?;
    if !(0.0..=1.0).contains(&y0) {
        return Err(Error::config(format!("parameter 'y0': must lie in [0, 1], got {y0}")));
    }
    if s_grid.is_empty() || s_grid.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::config("parameter 's_grid': must be a non-empty list of non-negative times"));
    }
    if replicates < 2 {
        return Err(Error::config("parameter 'replicates': at least 2 required"));
    }
    s_grid.sort_by(f64::total_cmp);
    let mu = TypeMeasure::new(vec![y0, 1.0 - y0]).map_err(|e| Error::config(format!("parameter 'y0': {e}")))?;

    let paths: Vec<Vec<f64>> = match simulator.as_str() {
        "moran" => {
            let initial = MoranState::from_measure(n, &mu)?;
            par_replicates(replicates, |rep| {
                let mut sim = MoranSim::new(initial.clone(), replicate_seed(seed, rep as u64));
                Ok(s_grid
                    .iter()
                    .map(|&s| {
                        sim.advance_to(s);
                        sim.state().counts()[0] as f64 / n as f64
                    })
                    .collect())
            })?
        }
        "wf" | "wright_fisher" => par_replicates(replicates, |rep| {
            let mut sim = WrightFisherSim::new(&mu, dt, RateModulator::None, replicate_seed(seed, rep as u64))?;
            Ok(s_grid
                .iter()
                .map(|&s| {
                    sim.advance_to(s);
                    sim.frequencies()[0]
                })
                .collect())
        })?,
        other => {
            return Err(Error::config(format!(
                "parameter 'simulator': unknown simulator '{other}' (expected moran or wf)"
            )))
        }
    };

    // the Moran start is rounded to a multiple of 1/n
    let start = match simulator.as_str() {
        "moran" => MoranState::from_measure(n, &mu)?.counts()[0] as f64 / n as f64,
        _ => y0,
    };
    let h0 = start * (1.0 - start);
    let mut report = ExperimentReport::new(format!("moments_{simulator}"), "s", params.clone());
    for (i, &s) in s_grid.iter().enumerate() {
        let mean: RunningStats = paths.iter().map(|p| p[i]).collect();
        let het: RunningStats = paths.iter().map(|p| p[i] * (1.0 - p[i])).collect();
        let oracle = h0 * (-2.0 * s).exp();
        report.cells.push(Cell::from_stats(s, "mean_Y0", &mean));
        report.cells.push(exact_cell(s, "martingale_oracle", start, replicates));
        report.cells.push(Cell::from_stats(s, "empirical", &het));
        report.cells.push(exact_cell(s, "e^{-2s} oracle", oracle, replicates));
        report.checks.push(Check::at_most(
            format!("mean_within_4se@s={s}"),
            (mean.mean() - start).abs(),
            4.0 * mean.std_error(),
        ));
        report.checks.push(Check::at_most(
            format!("heterozygosity_within_4se@s={s}"),
            (het.mean() - oracle).abs(),
            4.0 * het.std_error(),
        ));
    }
    report.elapsed_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

fn exact_cell(x: f64, series: &str, value: f64, replicates: usize) -> Cell {
    Cell {
        x,
        series: series.into(),
        mean: value,
        std_error: 0.0,
        replicates: replicates as u64,
    }
}
