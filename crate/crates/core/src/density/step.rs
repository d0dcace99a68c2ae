use crate::error::{Error, Result};
use crate::graph::MotifGraph;
use crate::graphon::StepGraphon;
use crate::scalar::Scalar;

use super::{DensityEstimate, Method, Plan};

/// Cap on the number of block tuples, `blocks^k`, an exact block sum may visit.
const TUPLE_BUDGET: u128 = 1 << 24;

/// Largest number of positive-width blocks the exact block sum accepts for a
/// `k`-vertex motif: the largest `b` with `b^k <= 2^24` (4096 blocks for an
/// edge, 256 for a triangle, 64 for four vertices, 27 for five).
pub fn step_budget(k: usize) -> usize {
    if k <= 1 {
        return TUPLE_BUDGET as usize;
    }
    let mut b = (TUPLE_BUDGET as f64).powf(1.0 / k as f64).floor() as usize;
    while (b as u128 + 1).pow(k as u32) <= TUPLE_BUDGET {
        b += 1;
    }
    while b > 1 && (b as u128).pow(k as u32) > TUPLE_BUDGET {
        b -= 1;
    }
    b
}

/// `t_F(h) = sum over block tuples of prod_i w_{l_i} * prod_{ij in E(F)} V_{l_i l_j}`.
pub fn step_density<T: Scalar>(f: &MotifGraph, h: &StepGraphon<T>) -> Result<T> {
    let live: Vec<usize> = h
        .breakpoints()
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0])
        .map(|(i, _)| i)
        .collect();
    let limit = step_budget(f.k());
    if live.len() > limit {
        return Err(Error::Budget {
            k: f.k(),
            blocks: live.len(),
            limit,
        });
    }
    let all_widths = h.widths();
    let widths: Vec<T> = live.iter().map(|&i| all_widths[i].clone()).collect();
    let b = live.len();
    let values: Vec<T> = (0..b * b)
        .map(|idx| h.value(live[idx / b], live[idx % b]).clone())
        .collect();
    let plan = Plan::new(f);
    let mut chosen = vec![0usize; f.k()];
    Ok(block_sum(&plan, &widths, &values, 0, &mut chosen))
}

/// Sum over blocks for positions `level..k`, given the blocks already chosen before `level`.
fn block_sum<T: Scalar>(plan: &Plan, widths: &[T], values: &[T], level: usize, chosen: &mut [usize]) -> T {
    let b = widths.len();
    let last = level + 1 == chosen.len();
    let mut total = T::zero();
    for block in 0..b {
        let mut factor = widths[block].clone();
        for &q in &plan.back[level] {
            if factor.is_zero() {
                break;
            }
            factor = factor * values[chosen[q] * b + block].clone();
        }
        if factor.is_zero() {
            continue;
        }
        if last {
            total = total + factor;
        } else {
            chosen[level] = block;
            total = total + factor * block_sum(plan, widths, values, level + 1, chosen);
        }
    }
    total
}

pub fn step_density_estimate(f: &MotifGraph, h: &StepGraphon<f64>) -> Result<DensityEstimate> {
    Ok(DensityEstimate::exact(step_density(f, h)?, Method::BlockSum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{canonical_graphon, motif_from_name, FiniteGraph};
    use crate::graphon::{step_graphon_at, ConnectionFunction, TypeMeasure};
    use num_rational::BigRational;

    fn two_block(y: f64, alpha: f64, beta: f64, delta: f64) -> StepGraphon<f64> {
        let mu = TypeMeasure::new(vec![y, 1.0 - y]).unwrap();
        let r = ConnectionFunction::two_type(alpha, beta, delta).unwrap();
        step_graphon_at(&mu, &[0.0, 0.5], &r).unwrap()
    }

    #[test]
    fn same_type_cliques_give_power_sums() {
        let h = two_block(0.7, 1.0, 1.0, 0.0);
        for (name, k) in [("edge", 2), ("triangle", 3), ("path3", 4), ("k4", 4), ("cycle5", 5)] {
            let t = step_density(&motif_from_name(name).unwrap(), &h).unwrap();
            let expected = 0.7f64.powi(k) + 0.3f64.powi(k);
            assert!((t - expected).abs() < 1e-12, "{name}: {t} vs {expected}");
        }
    }

    #[test]
    fn two_block_edge_density_by_hand() {
        let (y, a, b, d) = (0.35, 0.9, 0.2, 0.45);
        let t = step_density(&motif_from_name("edge").unwrap(), &two_block(y, a, b, d)).unwrap();
        let expected = a * y * y + 2.0 * d * y * (1.0 - y) + b * (1.0 - y) * (1.0 - y);
        assert!((t - expected).abs() < 1e-15);
    }

    #[test]
    fn constant_graphon_gives_power_of_edge_count() {
        let h = StepGraphon::constant(BigRational::ratio(2, 5)).unwrap();
        for name in ["vertex", "edge", "star3", "k4", "k5"] {
            let f = motif_from_name(name).unwrap();
            let expected = (0..f.edge_count()).fold(BigRational::ratio(1, 1), |acc, _| acc * BigRational::ratio(2, 5));
            assert_eq!(step_density(&f, &h).unwrap(), expected);
        }
    }

    #[test]
    fn exact_consistency_with_canonical_graphon() {
        let g = FiniteGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 1)]).unwrap();
        let h: StepGraphon<BigRational> = canonical_graphon(&g);
        for name in ["edge", "path2", "triangle", "cycle4", "k4minus", "star4"] {
            let f = motif_from_name(name).unwrap();
            let hom = crate::density::hom_density_exact::<BigRational>(&f, &g);
            assert_eq!(step_density(&f, &h).unwrap(), hom, "{name}");
        }
    }

    #[test]
    fn single_precision_instance() {
        let h = StepGraphon::<f32>::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let t = step_density(&motif_from_name("triangle").unwrap(), &h).unwrap();
        assert!((t - 0.25).abs() < 1e-6);
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(
            (2..=7).map(step_budget).collect::<Vec<_>>(),
            vec![4096, 256, 64, 27, 16, 10]
        );
        let big = StepGraphon::<f64>::equipartition(28, vec![0.5; 784]).unwrap();
        assert!(step_density(&motif_from_name("triangle").unwrap(), &big).is_ok());
        let err = step_density(&motif_from_name("cycle5").unwrap(), &big).unwrap_err();
        assert!(matches!(err, Error::Budget { k: 5, blocks: 28, limit: 27 }));
        assert!(err.to_string().contains("monte_carlo"));
    }

    #[test]
    fn zero_width_blocks_are_ignored() {
        let mu = TypeMeasure::new(vec![0.6, 0.0, 0.4]).unwrap();
        let h = step_graphon_at(&mu, &[0.2, 0.9, 0.7], &ConnectionFunction::Product).unwrap();
        let t = step_density(&motif_from_name("edge").unwrap(), &h).unwrap();
        let mean: f64 = 0.6 * 0.2 + 0.4 * 0.7;
        assert!((t - mean * mean).abs() < 1e-15);
    }
}
