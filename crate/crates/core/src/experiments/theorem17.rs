use std::time::Instant;

use crate::density::{mc_density, step_density, VertexMeasure};
use crate::dynamics::{evaluate_landscape, LandscapeSpec, RateModulator, WrightFisherSim, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::graphon::{step_graphon_at, ComposedKernel, Landscape, TypeMeasure};
use crate::rng::{replicate_seed, stream_seed};
use crate::stats::RunningStats;

use super::common::{par_replicates, strictly_decreasing};
use super::params::{initial_measure, scenario, Params};
use super::report::{Cell, Check, ExperimentReport};

/// Merges consecutive runs of `group` fine types into one coarse type.
pub fn lump(y: &[f64], group: usize) -> Vec<f64> {
    y.chunks(group).map(|c| c.iter().sum()).collect()
}

/// Stabilisation of `t(F, h^m)` as the number of types grows.
///
/// One Wright-Fisher path with `m_max + 1` types is simulated per replicate
/// and lumped into `m + 1` consecutive groups for every `m` in `m_list`, so all
/// resolutions see the same population (the lumped process is again a
/// Wright-Fisher diffusion). At each time in `s_grid` the block graphon with
/// the scenario's landscape gives exact densities; the report holds the means
/// of `|t(F, h^{m_i}) - t(F, h^{m_{i+1}})|`, which must decrease along
/// `m_list` and end below `tolerance`. At the last time and the finest `m`,
/// the block sum is cross-checked against Monte Carlo integration with
/// vertex labels drawn from the type measure, pooled over replicates.
///
/// Keys: `scenario` (`example3`) and its parameters, `m_list`
/// (`4,9,19,39`; every `m+1` must divide `m_max+1`), `motifs`
/// (`edge,triangle`), `s_grid` (`0.1,0.25`), `replicates` (20), `dt` (1e-4),
/// `mc_budget` (200000), `tolerance` (0.02), `y0` (`beta22`, at `m_max`),
/// `seed`.
pub fn theorem17_experiment(params: &Params) -> Result<ExperimentReport> {
    let started = Instant::now();
    let m_list = params.list_usize_or("m_list", &[4, 9, 19, 39])?;
    if m_list.len() < 2 || m_list.windows(2).any(|w| w[1] <= w[0]) || m_list[0] == 0 {
        return Err(Error::config("parameter 'm_list': must be an increasing list of at least two positive values"));
    }
    let m_max = *m_list.last().expect("checked non-empty");
    let fine = m_max + 1;
    if let Some(m) = m_list.iter().find(|&&m| fine % (m + 1) != 0) {
        return Err(Error::config(format!(
            "parameter 'm_list': m + 1 = {} does not divide m_max + 1 = {fine}",
            m + 1
        )));
    }
    let mut sc_params = params.clone();
    sc_params.set("m", m_max as u64);
    sc_params.set_default("y0", "beta22");
    let sc = scenario(&params.str_or("scenario", "example3")?, &sc_params)?;
    let y0 = initial_measure(&sc_params, m_max)?;
    let motifs = params.motifs_or("motifs", &["edge", "triangle"])?;
    let mut s_grid = params.list_f64_or("s_grid", &[0.1, 0.25])?;
    let replicates = params.usize_or("replicates", 20)?;
    let dt = params.f64_or("dt", DEFAULT_DT)?;
    let mc_budget = params.u64_or("mc_budget", 200_000)?;
    let tolerance = params.f64_or("tolerance", 0.02)?;
    let seed = params.u64_or("seed", 1)?;
    let modulator = RateModulator::parse(&params.str_or("modulator", "none")?)?;
    if s_grid.is_empty() || s_grid.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::config("parameter 's_grid': must be a non-empty list of non-negative times"));
    }
    if replicates < 2 {
        return Err(Error::config("parameter 'replicates': at least 2 required"));
    }
    s_grid.sort_by(f64::total_cmp);
    let last_s = s_grid.len() - 1;

    struct Replicate {
        /// densities[m index][motif], averaged over s
        densities: Vec<Vec<f64>>,
        /// gaps[pair index][motif], averaged over s
        gaps: Vec<Vec<f64>>,
        /// (block sum, mc value, mc std error) per motif
        cross: Vec<(f64, f64, f64)>,
    }

    let runs = par_replicates(replicates, |rep| {
        let rs = replicate_seed(seed, rep as u64);
        let mut sim = WrightFisherSim::new(&y0, dt, modulator, stream_seed(rs, 0))?;
        let mut densities = vec![vec![0.0; motifs.len()]; m_list.len()];
        let mut gaps = vec![vec![0.0; motifs.len()]; m_list.len() - 1];
        let mut cross = Vec::new();
        let weight = 1.0 / s_grid.len() as f64;
        for (si, &s) in s_grid.iter().enumerate() {
            sim.advance_to(s);
            let mut current = Vec::with_capacity(m_list.len());
            for (mi, &m) in m_list.iter().enumerate() {
                let y = TypeMeasure::new(lump(sim.frequencies(), fine / (m + 1)))?;
                let h_values = evaluate_landscape(&sc.landscape, &y);
                let h = step_graphon_at(&y, &h_values, &sc.r)?;
                let t: Vec<f64> = motifs.iter().map(|f| step_density(f, &h)).collect::<Result<_>>()?;
                if si == last_s && mi + 1 == m_list.len() {
                    let kernel = ComposedKernel::new(sc.r.clone(), Landscape::at_type_points(&h_values)?, None);
                    let mu = VertexMeasure::Types(y.clone());
                    for (fi, f) in motifs.iter().enumerate() {
                        let est = mc_density(f, &kernel, &mu, mc_budget, stream_seed(rs, 2 + fi as u64))?;
                        cross.push((t[fi], est.value, est.std_error));
                    }
                }
                for (fi, v) in t.iter().enumerate() {
                    densities[mi][fi] += weight * v;
                }
                current.push(t);
            }
            for pair in 0..m_list.len() - 1 {
                for fi in 0..motifs.len() {
                    gaps[pair][fi] += weight * (current[pair][fi] - current[pair + 1][fi]).abs();
                }
            }
        }
        Ok(Replicate { densities, gaps, cross })
    })?;

    let mut report = ExperimentReport::new("theorem17", "m", params.clone());
    for (fi, f) in motifs.iter().enumerate() {
        let label = f.label();
        for (mi, &m) in m_list.iter().enumerate() {
            let stats: RunningStats = runs.iter().map(|r| r.densities[mi][fi]).collect();
            report.cells.push(Cell::from_stats(m as f64, format!("density:{label}"), &stats));
        }
        let mut gap_means = Vec::new();
        for pair in 0..m_list.len() - 1 {
            let stats: RunningStats = runs.iter().map(|r| r.gaps[pair][fi]).collect();
            gap_means.push(stats.mean());
            // x is the finer of the two resolutions
            report.cells.push(Cell::from_stats(m_list[pair + 1] as f64, label.clone(), &stats));
        }
        report.checks.push(Check::flag(format!("{label}:gaps_strictly_decreasing"), strictly_decreasing(&gap_means)));
        report.checks.push(Check::below(
            format!("{label}:final_gap"),
            *gap_means.last().expect("at least one pair"),
            tolerance,
        ));
        // pooled over replicates: per-replicate standard errors understate the
        // spread when the integrand is dominated by rare heavy blocks
        let mut diff = 0.0;
        let mut var = 0.0;
        let mut within = 0usize;
        for r in &runs {
            let (exact, mc, se) = r.cross[fi];
            diff += mc - exact;
            var += se * se;
            within += usize::from((exact - mc).abs() <= 4.0 * se + 1e-12);
        }
        let z = if var > 0.0 {
            diff.abs() / var.sqrt()
        } else if diff.abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        report.metric(format!("{label}:mc_replicates_within_4se"), within as f64 / runs.len() as f64);
        report.checks.push(Check::at_most(format!("{label}:mc_cross_check_z"), z, 4.0));
    }
    if let LandscapeSpec::Threshold { c, .. } = sc.landscape {
        report.metric("threshold_c", c);
    }
    report.elapsed_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lumping() {
        assert_eq!(lump(&[0.1, 0.2, 0.3, 0.4], 2), vec![0.30000000000000004, 0.7]);
        assert_eq!(lump(&[0.25; 4], 1), vec![0.25; 4]);
    }

    #[test]
    fn degenerate_threshold_gives_zero_gaps() {
        let mut p = Params::new();
        for (k, v) in [
            ("m_list", "1,3,7"),
            ("landscape.c", "0.5"),
            ("r.kind", "product"),
            ("replicates", "3"),
            ("dt", "0.001"),
            ("mc_budget", "5000"),
        ] {
            p.set_text(k, v);
        }
        // f = 1 everywhere: every partner set is full, H = 1
        let grid = std::env::temp_dir().join(format!("ones-{}.csv", std::process::id()));
        std::fs::write(&grid, "1,1\n1,1\n").unwrap();
        p.set("landscape.f_grid", grid.to_str().unwrap());
        let report = theorem17_experiment(&p).unwrap();
        std::fs::remove_file(&grid).ok();
        for cell in report.cells.iter().filter(|c| !c.series.starts_with("density")) {
            assert!(cell.mean.abs() < 1e-12, "{cell:?}");
        }
        for cell in report.cells.iter().filter(|c| c.series.starts_with("density")) {
            assert!((cell.mean - 1.0).abs() < 1e-12, "{cell:?}");
        }
    }

    #[test]
    fn nested_resolutions_required() {
        let mut p = Params::new();
        p.set_text("m_list", "4,6");
        p.set_text("landscape.c", "0.3");
        let err = theorem17_experiment(&p).unwrap_err().to_string();
        assert!(err.contains("'m_list'"), "{err}");
    }
}
