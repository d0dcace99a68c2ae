use graphonflow::density::{
    d_sub_truncated, hom_count_backtrack, hom_count_matrix, hom_density, hom_density_exact, mc_density,
    step_density, VertexMeasure,
};
use graphonflow::graph::{canonical_graphon, sample_graph_from_graphon, FiniteGraph, MotifCatalog, MotifGraph};
use graphonflow::graphon::{
    step_graphon_at, ComposedKernel, ConnectionFunction, Graphon, Kernel, StepGraphon, TypeMeasure,
};
use graphonflow::rng::{replicate_seed, rng_from_seed};
use graphonflow::stats::RunningStats;
use graphonflow::{Exact, Scalar};
use proptest::prelude::*;
use rand::Rng;

fn catalogue() -> Vec<MotifGraph> {
    MotifCatalog::standard().motifs().to_vec()
}

fn graph_strategy(max_n: usize, max_edges: usize) -> impl Strategy<Value = FiniteGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..max_edges).prop_map(move |pairs| {
            let edges: Vec<(usize, usize)> = pairs.into_iter().filter(|(a, b)| a != b).collect();
            FiniteGraph::from_edges(n, &edges).unwrap()
        })
    })
}

/// Breakpoints on multiples of 1/12, values on multiples of 1/10.
fn exact_step_graphon(max_blocks: usize) -> impl Strategy<Value = StepGraphon<Exact>> {
    (prop::collection::btree_set(1u128..12, 0..max_blocks), prop::collection::vec(0u128..=10, 49)).prop_map(
        |(cuts, raw)| {
            let mut bp = vec![Exact::ratio(0, 1)];
            bp.extend(cuts.iter().map(|&c| Exact::ratio(c, 12)));
            bp.push(Exact::ratio(1, 1));
            let b = bp.len() - 1;
            let mut values = vec![Exact::ratio(0, 1); b * b];
            for i in 0..b {
                for j in i..b {
                    let v = Exact::ratio(raw[i * 7 + j], 10);
                    values[i * b + j] = v.clone();
                    values[j * b + i] = v;
                }
            }
            StepGraphon::new(bp, values).unwrap()
        },
    )
}

fn as_f64(h: &StepGraphon<Exact>) -> StepGraphon<f64> {
    h.map(|x| x.to_f64())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graph_and_canonical_graphon_agree_exactly(g in graph_strategy(8, 20)) {
        let h = canonical_graphon::<Exact>(&g);
        for f in catalogue() {
            let direct: Exact = hom_density_exact(&f, &g);
            prop_assert_eq!(direct, step_density(&f, &h).unwrap(), "{}", f.label());
        }
    }

    #[test]
    fn matrix_counts_equal_backtracking(g in graph_strategy(60, 400)) {
        for f in catalogue() {
            if let Some(count) = hom_count_matrix(&f, &g) {
                prop_assert_eq!(count, hom_count_backtrack(&f, &g), "{}", f.label());
            }
        }
    }

    #[test]
    fn disjoint_union_multiplies(h in exact_step_graphon(4), a in 0usize..8, b in 0usize..8) {
        let fs = catalogue();
        let (f1, f2) = (&fs[a], &fs[b]);
        prop_assume!(f1.k() + f2.k() <= 7);
        let union = f1.disjoint_union(f2).unwrap();
        let lhs = step_density(&union, &h).unwrap();
        let rhs = step_density(f1, &h).unwrap() * step_density(f2, &h).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dsub_symmetric_and_triangle(
        h1 in exact_step_graphon(4),
        h2 in exact_step_graphon(4),
        h3 in exact_step_graphon(4),
    ) {
        let [g1, g2, g3] = [&h1, &h2, &h3].map(|h| Graphon::Step(as_f64(h)));
        let d12 = d_sub_truncated(&g1, &g2, 8, 1000, 0).unwrap();
        let d21 = d_sub_truncated(&g2, &g1, 8, 1000, 0).unwrap();
        prop_assert_eq!(d12.value, d21.value);
        let d13 = d_sub_truncated(&g1, &g3, 8, 1000, 0).unwrap().value;
        let d23 = d_sub_truncated(&g2, &g3, 8, 1000, 0).unwrap().value;
        prop_assert!(d13 <= d12.value + d23 + 1e-12);
    }

    #[test]
    fn type_graphon_matches_composed_kernel(
        raw in prop::collection::vec(0u32..6, 2..9),
        landscape_seed in any::<u64>(),
        kind in 0usize..3,
    ) {
        let total: u32 = raw.iter().sum();
        prop_assume!(total > 0);
        let mu = TypeMeasure::new(raw.iter().map(|&r| r as f64 / total as f64).collect()).unwrap();
        let mut rng = rng_from_seed(landscape_seed);
        let landscape: Vec<f64> = (0..raw.len()).map(|_| rng.random()).collect();
        let r = match kind {
            0 => ConnectionFunction::Product,
            1 => ConnectionFunction::Min,
            _ => ConnectionFunction::tabulate(11, |u, v| 1.0 - (u - v).abs()).unwrap(),
        };
        let step = step_graphon_at(&mu, &landscape, &r).unwrap();
        let kernel = ComposedKernel::at_types(&mu, &landscape, &r).unwrap();
        prop_assert!((step.widths().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for _ in 0..1000 {
            let (x, y): (f64, f64) = (rng.random(), rng.random());
            prop_assert_eq!(step.eval(x, y), kernel.eval(x, y));
        }
    }
}

#[test]
fn monte_carlo_is_calibrated_on_step_graphons() {
    let fs = catalogue();
    let mut rng = rng_from_seed(404);
    let mut covered = 0;
    for trial in 0..100u64 {
        let blocks = rng.random_range(1..5);
        let mut values = vec![0.0; blocks * blocks];
        for i in 0..blocks {
            for j in i..blocks {
                let v: f64 = rng.random();
                values[i * blocks + j] = v;
                values[j * blocks + i] = v;
            }
        }
        let h = StepGraphon::equipartition(blocks, values).unwrap();
        let f = &fs[trial as usize % fs.len()];
        let exact = step_density(f, &h).unwrap();
        let est = mc_density(f, &h, &VertexMeasure::Uniform, 20_000, replicate_seed(9, trial)).unwrap();
        covered += usize::from((est.value - exact).abs() <= 4.0 * est.std_error);
    }
    assert!(covered >= 95, "{covered}/100 within 4 standard errors");
}

#[test]
fn sampled_graph_densities_approach_the_graphon() {
    // h(x, y) = x y: t_edge = 1/4, t_triangle = (1/3)^3
    let h = Graphon::Function(ConnectionFunction::Product);
    let targets = [("edge", 0.25), ("triangle", 1.0 / 27.0)];
    for (name, target) in targets {
        let f = graphonflow::graph::motif_from_name(name).unwrap();
        let mut previous: Option<(f64, f64)> = None;
        let mut first = None;
        for n in [50usize, 100, 200, 400] {
            let stats: RunningStats = (0..20u64)
                .map(|rep| {
                    let g = sample_graph_from_graphon(n, &h, replicate_seed(n as u64, rep));
                    (hom_density(&f, &g).value - target).abs()
                })
                .collect();
            if let Some((mean, se)) = previous {
                assert!(
                    stats.mean() <= mean + 2.0 * (se + stats.std_error()),
                    "{name}: n = {n} mean deviation {} after {mean}",
                    stats.mean()
                );
            }
            first.get_or_insert(stats.mean());
            previous = Some((stats.mean(), stats.std_error()));
        }
        assert!(previous.unwrap().0 < first.unwrap());
    }
}
