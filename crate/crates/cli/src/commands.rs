use std::fmt::Write as _;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use graphonflow::density::{
    d_sub_truncated, hom_density, inj_density, mc_density, step_density_estimate, DensityEstimate, VertexMeasure,
};
use graphonflow::dynamics::{
    empirical_measure, evaluate_landscape, simulate_moran, simulate_wright_fisher, snapshot_graph, write_paths_csv,
    EdgeNoise, MoranSim, MoranState, PopulationPath, RateModulator, DEFAULT_DT,
};
use graphonflow::experiments::{
    concentration_check, emit_plot_data, gap_rate_check, heterozygosity_check, initial_measure, scenario,
    theorem13_experiment, theorem17_experiment, urn_rate_check, ExperimentReport, Params,
};
use graphonflow::graph::{canonical_graphon, FiniteGraph, MotifGraph};
use graphonflow::graphon::{step_graphon_at, Graphon, StepGraphon};
use graphonflow::rng::{replicate_seed, stream_seed};
use rayon::prelude::*;

use crate::Command;

pub struct Outcome {
    pub summary: String,
    pub passed: bool,
}

impl Outcome {
    fn ok(summary: String) -> Self {
        Self { summary, passed: true }
    }
}

pub fn dispatch(command: Command, params: &mut Params, out: Option<&Path>) -> Result<Outcome> {
    match command {
        Command::Moran => moran(params, out),
        Command::Wf => wf(params, out),
        Command::Snapshot => snapshot(params, out),
        Command::Density => density(params, out),
        Command::Dsub => dsub(params, out),
        Command::Exp13 => {
            params.set_default("scenario", "example1");
            experiment(vec![theorem13_experiment(params)?], out)
        }
        Command::Exp17 => {
            params.set_default("scenario", "example3");
            experiment(vec![theorem17_experiment(params)?], out)
        }
        Command::Checks => checks(params, out),
        Command::Scenario => show_scenario(params, out),
    }
}

/// Writes `name` under the output directory, or prints it when there is none
/// and `primary` is set.
fn emit(out: Option<&Path>, name: &str, bytes: &[u8], primary: bool) -> Result<()> {
    match out {
        Some(dir) => {
            let path = dir.join(name);
            std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
        }
        None if primary => {
            print!("{}", String::from_utf8_lossy(bytes));
            Ok(())
        }
        None => Ok(()),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn seed(params: &Params) -> Result<u64> {
    Ok(params.u64_or("seed", 1)?)
}

fn paths_summary(kind: &str, paths: &[PopulationPath]) -> String {
    let rows = paths.first().map_or(0, |p| p.len());
    let mean_y0: f64 = paths
        .iter()
        .filter_map(|p| p.last().map(|y| *y.weight(0)))
        .sum::<f64>()
        / paths.len().max(1) as f64;
    format!(
        "{kind}: {} replicate(s), {rows} rows each, mean final Y_0 = {mean_y0:.6}",
        paths.len()
    )
}

fn moran(params: &mut Params, out: Option<&Path>) -> Result<Outcome> {
    params.set_default("n", 100u64);
    params.set_default("m", 1u64);
    params.set_default("y0", "uniform");
    params.set_default("horizon", 1.0);
    params.set_default("grid_ds", 0.05);
    params.set_default("replicates", 1u64);
    let n = params.usize_or("n", 100)?;
    let m = params.usize_or("m", 1)?;
    if m < 1 {
        bail!("parameter 'm': at least two types are required (m >= 1)");
    }
    let y0 = initial_measure(params, m)?;
    let horizon = params.f64_or("horizon", 1.0)?;
    let grid = params.f64_or("grid_ds", 0.05)?;
    let replicates = params.usize_or("replicates", 1)?;
    let base = seed(params)?;
    let initial = MoranState::from_measure(n, &y0)?;
    let paths = (0..replicates)
        .into_par_iter()
        .map(|i| simulate_moran(&initial, horizon, grid, stream_seed(replicate_seed(base, i as u64), 0)))
        .collect::<graphonflow::Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_paths_csv(&mut buf, &paths)?;
    emit(out, "path.csv", &buf, true)?;
    Ok(Outcome::ok(paths_summary("moran", &paths)))
}

fn wf(params: &mut Params, out: Option<&Path>) -> Result<Outcome> {
    params.set_default("m", 1u64);
    params.set_default("y0", "uniform");
    params.set_default("horizon", 1.0);
    params.set_default("grid_ds", 0.05);
    params.set_default("dt", DEFAULT_DT);
    params.set_default("modulator", "none");
    params.set_default("replicates", 1u64);
    let m = params.usize_or("m", 1)?;
    if m < 1 {
        bail!("parameter 'm': at least two types are required (m >= 1)");
    }
    let y0 = initial_measure(params, m)?;
    let horizon = params.f64_or("horizon", 1.0)?;
    let grid = params.f64_or("grid_ds", 0.05)?;
    let dt = params.f64_or("dt", DEFAULT_DT)?;
    let modulator = RateModulator::parse(&params.str_or("modulator", "none")?)?;
    let replicates = params.usize_or("replicates", 1)?;
    let base = seed(params)?;
    let paths = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let rs = stream_seed(replicate_seed(base, i as u64), 0);
            simulate_wright_fisher(&y0, horizon, dt, grid, rs, modulator)
        })
        .collect::<graphonflow::Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_paths_csv(&mut buf, &paths)?;
    emit(out, "path.csv", &buf, true)?;
    Ok(Outcome::ok(paths_summary("wf", &paths)))
}

const DENSITY_HEADER: &str = "motif,method,value,std_error,samples,seconds\n";

fn density_row(table: &mut String, f: &MotifGraph, est: &DensityEstimate, seconds: f64) {
    let _ = writeln!(
        table,
        "{},{},{},{},{},{seconds:.6}",
        csv_field(&f.label()),
        est.method,
        est.value,
        est.std_error,
        est.samples
    );
}

/// Moran population at time `s`, snapshot graph through the scenario's
/// landscape and connection function, and its densities next to the block
/// sums of the type-space graphon.
fn snapshot(params: &mut Params, out: Option<&Path>) -> Result<Outcome> {
    params.set_default("scenario", "example2");
    params.set_default("n", 200u64);
    params.set_default("s", 0.5);
    params.set_default("motifs", "edge,triangle");
    let sc = scenario(&params.str_or("scenario", "example2")?, params)?;
    let n = params.usize_or("n", 200)?;
    let s = params.f64_or("s", 0.5)?;
    if !(s >= 0.0) {
        bail!("parameter 's': must be a non-negative time");
    }
    let motifs = params.motifs_or("motifs", &["edge", "triangle"])?;
    let rs = replicate_seed(seed(params)?, 0);

    let mut sim = MoranSim::new(MoranState::from_measure(n, &sc.y0)?, stream_seed(rs, 0));
    sim.advance_to(s);
    let state = sim.into_state();
    let y = empirical_measure(&state);
    let h_values = evaluate_landscape(&sc.landscape, &y);
    let g = snapshot_graph(&state, &h_values, &sc.r, &EdgeNoise::new(stream_seed(rs, 1)))?;
    let h = step_graphon_at(&y, &h_values, &sc.r)?;

    let mut graph_text = Vec::new();
    g.write_text(&mut graph_text)?;
    emit(out, "graph.txt", &graph_text, false)?;
    let mut table = String::from(DENSITY_HEADER);
    for f in &motifs {
        let start = Instant::now();
        let est = hom_density(f, &g);
        density_row(&mut table, f, &est, start.elapsed().as_secs_f64());
        let start = Instant::now();
        let est = step_density_estimate(f, &h)?;
        density_row(&mut table, f, &est, start.elapsed().as_secs_f64());
    }
    emit(out, "density.csv", table.as_bytes(), true)?;
    Ok(Outcome::ok(format!(
        "snapshot: {} at s = {s}, n = {n}, {} edges",
        sc.name,
        g.edge_count()
    )))
}

fn read_graph(path: &str) -> Result<FiniteGraph> {
    let file = std::fs::File::open(path).with_context(|| format!("opening graph file {path}"))?;
    FiniteGraph::read_text(BufReader::new(file)).with_context(|| format!("reading graph file {path}"))
}

fn read_step_graphon(path: &str) -> Result<StepGraphon<f64>> {
    let file = std::fs::File::open(path).with_context(|| format!("opening graphon file {path}"))?;
    StepGraphon::read_csv(BufReader::new(file)).with_context(|| format!("reading graphon file {path}"))
}

enum Source {
    Graph(FiniteGraph),
    Step(StepGraphon<f64>),
}

/// Exactly one of `graph<suffix>` (edge list) or `graphon<suffix>` (step CSV).
fn load_source(params: &Params, suffix: &str) -> Result<Source> {
    let graph_key = format!("graph{suffix}");
    let graphon_key = format!("graphon{suffix}");
    match (params.str(&graph_key)?, params.str(&graphon_key)?) {
        (Some(path), None) => Ok(Source::Graph(read_graph(&path)?)),
        (None, Some(path)) => Ok(Source::Step(read_step_graphon(&path)?)),
        (Some(_), Some(_)) => bail!("parameters '{graph_key}' and '{graphon_key}': give only one"),
        (None, None) => bail!("missing parameter '{graph_key}' (or '{graphon_key}')"),
    }
}

fn density(params: &mut Params, out: Option<&Path>) -> Result<Outcome> {
    // `--motif` reads better for a single pattern
    if !params.contains("motifs") {
        if let Some(v) = params.raw("motif").cloned() {
            params.set("motifs", v);
        }
    }
    params.set_default("motifs", "edge");
    params.set_default("method", "exact");
    params.set_default("samples", 100_000u64);
    let source = load_source(params, "")?;
    let motifs = params.motifs_or("motifs", &["edge"])?;
    let method = params.str_or("method", "exact")?;
    let samples = params.u64_or("samples", 100_000)?;
    let base = seed(params)?;

    let mut table = String::from(DENSITY_HEADER);
    for (i, f) in motifs.iter().enumerate() {
        let mc_seed = stream_seed(base, i as u64);
        let start = Instant::now();
        let est = match (&source, method.as_str()) {
            (Source::Graph(g), "exact") => hom_density(f, g),
            (Source::Graph(g), "injective") => inj_density(f, g),
            (Source::Graph(g), "mc") => {
                mc_density(f, &canonical_graphon::<f64>(g), &VertexMeasure::Uniform, samples, mc_seed)?
            }
            (Source::Step(h), "exact") => step_density_estimate(f, h)?,
            (Source::Step(h), "mc") => mc_density(f, h, &VertexMeasure::Uniform, samples, mc_seed)?,
            (Source::Step(_), "injective") => bail!("parameter 'method': 'injective' needs a finite graph"),
            (_, other) => bail!("parameter 'method': unknown method '{other}' (expected exact, injective or mc)"),
        };
        density_row(&mut table, f, &est, start.elapsed().as_secs_f64());
    }
    emit(out, "density.csv", table.as_bytes(), true)?;
    Ok(Outcome::ok(format!("density: {} motif(s), method {method}", motifs.len())))
}

fn dsub(params: &mut Params, out: Option<&Path>) -> Result<Outcome> {
    params.set_default("truncation", 8u64);
    params.set_default("samples", 100_000u64);
    let as_graphon = |s: Source| -> Graphon {
        match s {
            Source::Graph(g) => Graphon::Step(canonical_graphon(&g)),
            Source::Step(h) => Graphon::Step(h),
        }
    };
    let h1 = as_graphon(load_source(params, "1")?);
    let h2 = as_graphon(load_source(params, "2")?);
    let truncation = params.usize_or("truncation", 8)?;
    let samples = params.u64_or("samples", 100_000)?;
    let d = d_sub_truncated(&h1, &h2, truncation, samples, seed(params)?)
        .map_err(|e| anyhow::anyhow!("parameter 'truncation': {e}"))?;
    let mut table = String::from("index,motif,weight,t1,t2,std_error1,std_error2\n");
    let catalog = graphonflow::graph::MotifCatalog::standard();
    for (i, (a, b)) in d.terms.iter().enumerate() {
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{}",
            i + 1,
            catalog.motifs()[i].label(),
            graphonflow::graph::MotifCatalog::weight(i + 1),
            a.value,
            b.value,
            a.std_error,
            b.std_error
        );
    }
    let _ = writeln!(table, "total,d_sub,,{},,{},", d.value, d.error_bound);
    emit(out, "dsub.csv", table.as_bytes(), true)?;
    Ok(Outcome::ok(format!(
        "dsub: {:.6e} (error bound {:.3e}, {truncation} motifs)",
        d.value, d.error_bound
    )))
}

/// `report.csv`, `checks.csv` and `plot.csv` for one or more reports.
fn experiment(reports: Vec<ExperimentReport>, out: Option<&Path>) -> Result<Outcome> {
    let mut report_csv = Vec::new();
    let mut checks_csv = String::from("experiment,kind,name,value,threshold,pass\n");
    let mut plot_csv = String::from("experiment,x,series,mean,stderr\n");
    for (i, r) in reports.iter().enumerate() {
        let mut buf = Vec::new();
        r.write_csv(&mut buf)?;
        let skip = if i == 0 { 0 } else { header_len(&buf) };
        report_csv.extend_from_slice(&buf[skip..]);

        let mut buf = Vec::new();
        r.write_checks_csv(&mut buf)?;
        for line in String::from_utf8_lossy(&buf).lines().skip(1) {
            let _ = writeln!(checks_csv, "{},{line}", r.name);
        }
        let mut buf = Vec::new();
        emit_plot_data(r, &mut buf)?;
        for line in String::from_utf8_lossy(&buf).lines().skip(1) {
            let _ = writeln!(plot_csv, "{},{line}", r.name);
        }
        log::info!("{}", r.summary());
    }
    emit(out, "report.csv", &report_csv, true)?;
    emit(out, "checks.csv", checks_csv.as_bytes(), false)?;
    emit(out, "plot.csv", plot_csv.as_bytes(), false)?;

    let mut lines = Vec::new();
    for r in &reports {
        let passed = r.checks.iter().filter(|c| c.pass).count();
        lines.push(format!(
            "{}: {} ({passed}/{} checks, {:.1}s)",
            r.name,
            if r.passed() { "PASS" } else { "FAIL" },
            r.checks.len(),
            r.elapsed_seconds
        ));
        for c in r.checks.iter().filter(|c| !c.pass) {
            eprintln!("{}: check '{}' failed: {} vs threshold {}", r.name, c.name, c.value, c.threshold);
        }
    }
    Ok(Outcome {
        summary: lines.join("; "),
        passed: reports.iter().all(ExperimentReport::passed),
    })
}

fn header_len(csv: &[u8]) -> usize {
    csv.iter().position(|&b| b == b'\n').map_or(csv.len(), |p| p + 1)
}

fn checks(params: &mut Params, out: Option<&Path>) -> Result<Outcome> {
    params.set_default("check", "concentration,moments,urn,gap");
    let names = params.str_or("check", "")?;
    let mut reports = Vec::new();
    for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let report = match name {
            "concentration" => concentration_check(params)?,
            "moments" => heterozygosity_check(params)?,
            "urn" => urn_rate_check(params)?,
            "gap" => gap_rate_check(params)?,
            other => bail!("parameter 'check': unknown check '{other}' (expected concentration, moments, urn or gap)"),
        };
        reports.push(report);
    }
    if reports.is_empty() {
        bail!("parameter 'check': no checks selected");
    }
    experiment(reports, out)
}

fn show_scenario(params: &mut Params, out: Option<&Path>) -> Result<Outcome> {
    params.set_default("scenario", "example1");
    let sc = scenario(&params.str_or("scenario", "example1")?, params)?;
    let h0 = evaluate_landscape(&sc.landscape, &sc.y0);
    let mut landscape = serde_json::json!({ "variant": sc.landscape.name() });
    if let graphonflow::dynamics::LandscapeSpec::Threshold { f, c } = &sc.landscape {
        landscape["f"] = serde_json::to_value(f)?;
        landscape["c"] = serde_json::json!(c);
    }
    let resolved = serde_json::json!({
        "scenario": sc.name,
        "m": sc.m,
        "landscape": landscape,
        "r": serde_json::to_value(&sc.r)?,
        "y0": sc.y0.weights(),
        "landscape_at_y0": h0,
    });
    let text = serde_json::to_string_pretty(&resolved)? + "\n";
    emit(out, "scenario.json", text.as_bytes(), true)?;
    Ok(Outcome::ok(format!(
        "scenario: {} with m = {}, {} landscape",
        sc.name,
        sc.m,
        sc.landscape.name()
    )))
}
