//! Acceptance gate: one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::time::{Duration, Instant};

use graphonflow::density::{
    density_gap_bound, hom_count_backtrack, hom_count_matrix, hom_density, inj_density, step_density,
};
use graphonflow::dynamics::{MoranSim, MoranState};
use graphonflow::experiments::{
    concentration_check, gap_rate_check, heterozygosity_check, random_graph, theorem13_experiment,
    theorem17_experiment, urn_rate_check, ExperimentReport, Params,
};
use graphonflow::graph::{canonical_graphon, motif_from_name, MotifGraph};
use graphonflow::graphon::{step_graphon_at, ConnectionFunction, TypeMeasure};
use graphonflow::rng::replicate_seed;
use graphonflow::stats::RunningStats;

struct Outcome {
    pass: bool,
    detail: String,
}

fn params(pairs: &[(&str, &str)]) -> Params {
    let mut p = Params::new();
    for (k, v) in pairs {
        p.set_text(k, v);
    }
    p
}

fn motifs(names: &[&str]) -> Vec<MotifGraph> {
    names.iter().map(|n| motif_from_name(n).unwrap()).collect()
}

const K_LE_4: [&str; 8] = ["edge", "path2", "triangle", "path3", "star3", "cycle4", "k4minus", "k4"];

fn criterion1() -> Outcome {
    let y = TypeMeasure::new(vec![0.7, 0.3]).unwrap();
    let r = ConnectionFunction::two_type(1.0, 1.0, 0.0).unwrap();
    let h = step_graphon_at(&y, &[0.0, 0.5], &r).unwrap();
    let mut worst: f64 = 0.0;
    for f in motifs(&K_LE_4) {
        let expect = 0.7f64.powi(f.k() as i32) + 0.3f64.powi(f.k() as i32);
        worst = worst.max((step_density(&f, &h).unwrap() - expect).abs());
    }
    for (name, stated) in [("edge", 0.58), ("triangle", 0.37), ("k4", 0.2482)] {
        worst = worst.max((step_density(&motif_from_name(name).unwrap(), &h).unwrap() - stated).abs());
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max |t - (0.7^k + 0.3^k)| = {worst:.2e} over 8 motifs"),
    }
}

/// Random graphs shared by criteria 2 and 3.
fn criterion2_graphs() -> Vec<graphonflow::graph::FiniteGraph> {
    (0..200)
        .map(|i| {
            let n = 5 + (i * 7) % 56;
            let p = [0.2, 0.5, 0.8][i % 3];
            random_graph(n, p, replicate_seed(2024, i as u64))
        })
        .collect()
}

fn criterion2(graphs: &[graphonflow::graph::FiniteGraph]) -> Outcome {
    let fs = motifs(&K_LE_4);
    let mut count_mismatch = 0;
    let mut worst: f64 = 0.0;
    for g in graphs {
        let canon = canonical_graphon::<f64>(g);
        for f in &fs {
            let back = hom_count_backtrack(f, g);
            if let Some(matrix) = hom_count_matrix(f, g) {
                count_mismatch += usize::from(matrix != back);
            }
            let t = hom_density(f, g).value;
            worst = worst.max((t - step_density(f, &canon).unwrap()).abs());
        }
    }
    Outcome {
        pass: count_mismatch == 0 && worst <= 1e-12,
        detail: format!(
            "{} graphs: {count_mismatch} count mismatches, max |hom - block sum| = {worst:.2e}",
            graphs.len()
        ),
    }
}

fn criterion3(graphs: &[graphonflow::graph::FiniteGraph]) -> Outcome {
    let fs = motifs(&K_LE_4);
    let mut violations = 0;
    for g in graphs {
        for f in &fs {
            let gap = (inj_density(f, g).value - hom_density(f, g).value).abs();
            violations += usize::from(gap > density_gap_bound(f, g));
        }
    }
    let report = gap_rate_check(&params(&[("n_list", "25,50,100,200"), ("seed", "3")])).unwrap();
    let slope = report.metric_value("loglog_slope").unwrap();
    Outcome {
        pass: violations == 0 && report.passed(),
        detail: format!("bound violations {violations}; max-gap log-log slope {slope:.3} (<= -0.8)"),
    }
}

fn criterion4() -> Outcome {
    let report = urn_rate_check(&params(&[("n_list", "10,100,1000"), ("states", "1000"), ("seed", "4")])).unwrap();
    let maxima: Vec<String> = report.series("max_n_gap").iter().map(|c| format!("{:.3}", c.mean)).collect();
    Outcome {
        pass: report.passed(),
        detail: format!(
            "max n|urn - prod Y| at n = 10/100/1000: {}; slope {:.3}",
            maxima.join("/"),
            report.metric_value("loglog_slope").unwrap()
        ),
    }
}

fn concentration_params() -> Params {
    params(&[
        ("scenario", "example1"),
        ("alpha", "0.8"),
        ("beta", "0.5"),
        ("delta", "0.2"),
        ("y0", "0.5"),
        ("n", "500"),
        ("motifs", "edge,triangle"),
        ("s", "0.5"),
        ("replicates", "200"),
        ("epsilon", "0.05"),
        ("seed", "5"),
    ])
}

fn criterion5(report: &ExperimentReport) -> Outcome {
    let exceed: Vec<f64> = ["edge", "triangle"]
        .iter()
        .map(|f| report.series(&format!("{f}:exceedance"))[0].mean)
        .collect();
    let zero = exceed.iter().all(|&e| e == 0.0);
    Outcome {
        pass: zero && report.passed(),
        detail: format!(
            "exceedance edge {}, triangle {}; bounds {:.1e} / {:.1e}; max deviation {:.2e}",
            exceed[0],
            exceed[1],
            report.metric_value("edge:bound").unwrap(),
            report.metric_value("triangle:bound").unwrap(),
            report
                .metric_value("edge:max_deviation")
                .unwrap()
                .max(report.metric_value("triangle:max_deviation").unwrap())
        ),
    }
}

fn moment_params(sim: &str) -> Params {
    params(&[
        ("simulator", sim),
        ("n", "1000"),
        ("y0", "0.3"),
        ("s_grid", "0.25,0.5"),
        ("replicates", "400"),
        ("dt", "0.0001"),
        ("seed", "6"),
    ])
}

/// `exp(Q t)` by scaling and squaring with a Taylor core.
fn expm(q: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    let d = q.len();
    let norm: f64 = q.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max) * t;
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = t / 2f64.powi(squarings);
    let mul = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    };
    let a: Vec<Vec<f64>> = q.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
    let mut result: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| f64::from(i == j)).collect()).collect();
    let mut term = result.clone();
    for k in 1..=30 {
        term = mul(&term, &a).into_iter().map(|r| r.into_iter().map(|x| x / k as f64).collect()).collect();
        for i in 0..d {
            for j in 0..d {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mul(&result, &result);
    }
    result
}

/// Exact `E[Y(1-Y)]` and `E[Y]` for the Moran chain with `n` individuals,
/// from the birth-death generator in rescaled time (jump rates `k (n-k)`).
fn moran_oracle(n: usize, k0: usize, s: f64) -> (f64, f64) {
    let mut q = vec![vec![0.0; n + 1]; n + 1];
    for k in 1..n {
        let rate = (k * (n - k)) as f64;
        q[k][k + 1] = rate;
        q[k][k - 1] = rate;
        q[k][k] = -2.0 * rate;
    }
    let p = expm(&q, s);
    let mut mean = 0.0;
    let mut het = 0.0;
    for (k, &prob) in p[k0].iter().enumerate() {
        let y = k as f64 / n as f64;
        mean += prob * y;
        het += prob * y * (1.0 - y);
    }
    (mean, het)
}

fn criterion6() -> Outcome {
    let moran = heterozygosity_check(&moment_params("moran")).unwrap();
    let wf = heterozygosity_check(&moment_params("wf")).unwrap();

    // n = 6 exact chain versus e^{-2s} and versus simulation
    let (n, k0) = (6usize, 2usize);
    let h0 = (k0 * (n - k0)) as f64 / (n * n) as f64;
    let initial = MoranState::from_counts(&[k0 as u64, (n - k0) as u64]).unwrap();
    let mut oracle_ok = true;
    let mut notes = Vec::new();
    for s in [0.25, 0.5] {
        let (mean, het) = moran_oracle(n, k0, s);
        let closed = h0 * (-2.0 * s).exp();
        oracle_ok &= (het - closed).abs() < 1e-10 && (mean - k0 as f64 / n as f64).abs() < 1e-10;
        let sims: RunningStats = (0..20_000u64)
            .map(|rep| {
                let mut sim = MoranSim::new(initial.clone(), replicate_seed(66, rep));
                sim.advance_to(s);
                let y = sim.state().counts()[0] as f64 / n as f64;
                y * (1.0 - y)
            })
            .collect();
        let z = (sims.mean() - het).abs() / sims.std_error();
        oracle_ok &= z <= 4.0;
        notes.push(format!("s={s}: exact {het:.6} vs closed form {closed:.6}, sim z={z:.2}"));
    }
    let pass = moran.passed() && wf.passed() && oracle_ok;
    let worst = |r: &ExperimentReport| {
        r.checks
            .iter()
            .map(|c| c.value / c.threshold * 4.0)
            .fold(0.0f64, f64::max)
    };
    Outcome {
        pass,
        detail: format!(
            "Moran worst z {:.2}, WF worst z {:.2}; n=6 oracle: {}",
            worst(&moran),
            worst(&wf),
            notes.join("; ")
        ),
    }
}

fn theorem13_params(example: &str) -> Params {
    let mut p = params(&[
        ("scenario", example),
        ("n_list", "100,400,1600"),
        ("replicates", "20"),
        ("motifs", "edge,triangle"),
        ("s_grid", "0.25,0.5"),
        ("tolerance", "0.05"),
        ("seed", "7"),
    ]);
    match example {
        "example1" => {
            p.set_text("alpha", "1");
            p.set_text("beta", "1");
            p.set_text("delta", "0");
            p.set_text("y0", "0.5");
        }
        _ => p.set_text("m", "3"),
    }
    p
}

fn criterion7(reports: &[ExperimentReport]) -> Outcome {
    let pass = reports.iter().all(ExperimentReport::passed);
    let detail = reports
        .iter()
        .map(|r| {
            let d: Vec<String> = r.series("D").iter().map(|c| format!("{:.2e}", c.mean)).collect();
            format!("{}: D = {}", r.config.str("scenario").unwrap().unwrap(), d.join(" > "))
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { pass, detail }
}

fn theorem17_params() -> Params {
    params(&[
        ("scenario", "example3"),
        ("landscape.f", "product"),
        ("landscape.c", "0.3"),
        ("m_list", "4,9,19,39"),
        ("replicates", "20"),
        ("motifs", "edge,triangle"),
        ("s_grid", "0.1,0.25"),
        ("mc_budget", "200000"),
        ("tolerance", "0.02"),
        ("seed", "8"),
    ])
}

fn criterion8(report: &ExperimentReport) -> Outcome {
    let detail = ["edge", "triangle"]
        .iter()
        .map(|f| {
            let gaps: Vec<String> = report.series(f).iter().map(|c| format!("{:.2e}", c.mean)).collect();
            format!(
                "{f}: gaps {}; pooled MC z {:.2}",
                gaps.join(", "),
                report.check(&format!("{f}:mc_cross_check_z")).unwrap().value
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome {
        pass: report.passed(),
        detail,
    }
}

fn csv_bytes(report: &ExperimentReport) -> Vec<u8> {
    let mut out = Vec::new();
    report.write_csv(&mut out).unwrap();
    report.write_checks_csv(&mut out).unwrap();
    out
}

fn run_all_seeded() -> Vec<ExperimentReport> {
    vec![
        concentration_check(&concentration_params()).unwrap(),
        heterozygosity_check(&moment_params("moran")).unwrap(),
        heterozygosity_check(&moment_params("wf")).unwrap(),
        theorem13_experiment(&theorem13_params("example1")).unwrap(),
        theorem13_experiment(&theorem13_params("example2")).unwrap(),
        theorem17_experiment(&theorem17_params()).unwrap(),
    ]
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn report_line(id: usize, limit: Duration, (outcome, took): (Outcome, Duration)) -> bool {
    let in_time = took <= limit;
    let pass = outcome.pass && in_time;
    println!(
        "criterion {id}: {} ({:.1}s, limit {}s) {}{}",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs(),
        outcome.detail,
        if in_time { "" } else { " [over time limit]" }
    );
    pass
}

fn main() {
    let mut all = true;
    all &= report_line(1, Duration::from_secs(1), timed(criterion1));

    let (graphs, gen_time) = timed(criterion2_graphs);
    let (c2, t2) = timed(|| criterion2(&graphs));
    all &= report_line(2, Duration::from_secs(60), (c2, t2 + gen_time));
    let (c3, t3) = timed(|| criterion3(&graphs));
    all &= report_line(3, Duration::from_secs(120), (c3, t3 + gen_time));
    all &= report_line(4, Duration::from_secs(30), timed(criterion4));

    let (first, t_first) = timed(run_all_seeded);
    let per = |i: usize| Duration::from_secs_f64(first[i].elapsed_seconds);
    all &= report_line(5, Duration::from_secs(300), (criterion5(&first[0]), per(0)));
    all &= report_line(6, Duration::from_secs(300), timed(criterion6));
    all &= report_line(7, Duration::from_secs(900), (criterion7(&first[3..5]), per(3) + per(4)));
    all &= report_line(8, Duration::from_secs(900), (criterion8(&first[5]), per(5)));

    // rerun on a pool of a different size: outputs must not change
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let (second, t_second) = timed(|| pool.install(run_all_seeded));
    let identical = first.iter().zip(&second).filter(|(a, b)| csv_bytes(a) == csv_bytes(b)).count();
    all &= report_line(
        9,
        t_first + Duration::from_secs(1800),
        (
            Outcome {
                pass: identical == first.len(),
                detail: format!("{identical}/{} report files byte-identical across runs and thread counts", first.len()),
            },
            t_second,
        ),
    );

    if !all {
        std::process::exit(1);
    }
}
