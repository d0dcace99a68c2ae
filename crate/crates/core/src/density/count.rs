use rayon::prelude::*;

use crate::graph::{FiniteGraph, MotifGraph};
use crate::scalar::Scalar;

use super::{DensityEstimate, Method, Plan};

/// Motifs with a closed-form count in terms of adjacency-matrix powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// `sum_i deg(i)`
    Edge,
    /// `sum_i deg(i)^2`
    Path2,
    /// `tr(A^3)`
    Triangle,
    /// `tr(A^4)`
    Cycle4,
}

impl MatrixKind {
    pub fn detect(f: &MotifGraph) -> Option<Self> {
        match (f.k(), f.edge_count()) {
            (2, 1) => Some(Self::Edge),
            (3, 2) => Some(Self::Path2),
            (3, 3) => Some(Self::Triangle),
            (4, 4) if (0..4).all(|v| f.degree(v) == 2) => Some(Self::Cycle4),
            _ => None,
        }
    }
}

fn common(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum()
}

/// `|hom(F, G)|` from matrix identities, or `None` when `F` has no specialisation.
pub fn hom_count_matrix(f: &MotifGraph, g: &FiniteGraph) -> Option<u128> {
    let n = g.n();
    let count = match MatrixKind::detect(f)? {
        MatrixKind::Edge => (0..n).map(|i| g.degree(i) as u128).sum(),
        MatrixKind::Path2 => (0..n).map(|i| (g.degree(i) as u128).pow(2)).sum(),
        MatrixKind::Triangle => (0..n)
            .into_par_iter()
            .map(|i| {
                let row = g.row(i);
                (0..n)
                    .filter(|&j| g.has_edge(i, j))
                    .map(|j| common(row, g.row(j)) as u128)
                    .sum::<u128>()
            })
            .sum(),
        MatrixKind::Cycle4 => (0..n)
            .into_par_iter()
            .map(|i| {
                let row = g.row(i);
                (0..n).map(|j| (common(row, g.row(j)) as u128).pow(2)).sum::<u128>()
            })
            .sum(),
    };
    Some(count)
}

struct Counter<'a> {
    g: &'a FiniteGraph,
    plan: &'a Plan,
    full: Vec<u64>,
    injective: bool,
}

impl Counter<'_> {
    fn count_from(&self, first: usize) -> u128 {
        let k = self.plan.order.len();
        let mut chosen = vec![0usize; k];
        chosen[0] = first;
        let mut scratch = vec![0u64; (k - 1) * self.g.words()];
        self.descend(1, &mut chosen, &mut scratch)
    }

    /// `scratch` holds one candidate row per remaining level.
    fn descend(&self, level: usize, chosen: &mut [usize], scratch: &mut [u64]) -> u128 {
        let (cand, deeper) = scratch.split_at_mut(self.g.words());
        let back = &self.plan.back[level];
        match back.split_first() {
            Some((&q, rest)) => {
                cand.copy_from_slice(self.g.row(chosen[q]));
                for &q in rest {
                    for (c, r) in cand.iter_mut().zip(self.g.row(chosen[q])) {
                        *c &= r;
                    }
                }
            }
            None => cand.copy_from_slice(&self.full),
        }
        if self.injective {
            for &v in &chosen[..level] {
                cand[v / 64] &= !(1u64 << (v % 64));
            }
        }
        if level + 1 == chosen.len() {
            return cand.iter().map(|w| w.count_ones() as u128).sum();
        }
        let mut total = 0u128;
        for wi in 0..cand.len() {
            let mut bits = cand[wi];
            while bits != 0 {
                chosen[level] = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                total += self.descend(level + 1, chosen, deeper);
            }
        }
        total
    }
}

fn backtrack(f: &MotifGraph, g: &FiniteGraph, injective: bool) -> u128 {
    let n = g.n();
    let k = f.k();
    if n == 0 || (injective && k > n) {
        return 0;
    }
    if k == 1 {
        return n as u128;
    }
    let plan = Plan::new(f);
    let counter = Counter {
        g,
        plan: &plan,
        full: g.full_row(),
        injective,
    };
    (0..n).into_par_iter().map(|v| counter.count_from(v)).sum()
}

/// `|hom(F, G)|` by ordered-tuple backtracking with adjacency pruning.
pub fn hom_count_backtrack(f: &MotifGraph, g: &FiniteGraph) -> u128 {
    backtrack(f, g, false)
}

/// `|hom(F, G)|`, through a matrix identity when one exists.
pub fn hom_count(f: &MotifGraph, g: &FiniteGraph) -> (u128, Method) {
    match hom_count_matrix(f, g) {
        Some(c) => (c, Method::MatrixSpecial),
        None => (hom_count_backtrack(f, g), Method::ExactBacktrack),
    }
}

/// `|inj(F, G)|`
pub fn inj_count(f: &MotifGraph, g: &FiniteGraph) -> u128 {
    backtrack(f, g, true)
}

fn power(n: usize, k: usize) -> u128 {
    (n as u128).pow(k as u32)
}

fn falling(n: usize, k: usize) -> u128 {
    (0..k).map(|i| (n - i) as u128).product()
}

/// `t_F(G) = |hom(F, G)| / n^k`
pub fn hom_density(f: &MotifGraph, g: &FiniteGraph) -> DensityEstimate {
    let (count, method) = hom_count(f, g);
    let value = if g.n() == 0 {
        0.0
    } else {
        count as f64 / power(g.n(), f.k()) as f64
    };
    DensityEstimate::exact(value, method)
}

pub fn hom_density_exact<T: Scalar>(f: &MotifGraph, g: &FiniteGraph) -> T {
    if g.n() == 0 {
        return T::zero();
    }
    T::ratio(hom_count(f, g).0, power(g.n(), f.k()))
}

/// `t^inj_F(G) = |inj(F, G)| / n_(k)`, zero when `k > n`.
pub fn inj_density(f: &MotifGraph, g: &FiniteGraph) -> DensityEstimate {
    let value = if f.k() > g.n() {
        0.0
    } else {
        inj_count(f, g) as f64 / falling(g.n(), f.k()) as f64
    };
    DensityEstimate::exact(value, Method::ExactBacktrack)
}

pub fn inj_density_exact<T: Scalar>(f: &MotifGraph, g: &FiniteGraph) -> T {
    if f.k() > g.n() {
        T::zero()
    } else {
        T::ratio(inj_count(f, g), falling(g.n(), f.k()))
    }
}

/// Upper bound on `|t^inj_F(G) - t_F(G)|` for a `k`-vertex motif and `n >= k`:
/// `(1 - n_(k) / n^k) + k^2 / n`.
///
/// Writing `hom = inj + rest` with `rest <= n^k - n_(k)` non-injective tuples,
/// `t - t^inj = rest / n^k - t^inj (1 - n_(k) / n^k)`, and both terms lie in
/// `[0, 1 - n_(k) / n^k]`; the second summand is slack. The first is at most
/// `C(k,2) / n`, so `n * B` stays bounded.
pub fn gap_bound(k: usize, n: usize) -> f64 {
    let ratio: f64 = (0..k).map(|i| (n - i) as f64 / n as f64).product();
    (1.0 - ratio) + (k * k) as f64 / n as f64
}

pub fn density_gap_bound(f: &MotifGraph, g: &FiniteGraph) -> f64 {
    gap_bound(f.k(), g.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{motif_from_name, sample_graph_from_graphon};
    use crate::graphon::ConnectionFunction;
    use num_rational::BigRational;

    fn motif(name: &str) -> MotifGraph {
        motif_from_name(name).unwrap()
    }

    /// Enumerates all `n^k` maps.
    fn brute_force(f: &MotifGraph, g: &FiniteGraph, injective: bool) -> u128 {
        let (n, k) = (g.n(), f.k());
        let mut map = vec![0usize; k];
        let mut total = 0;
        loop {
            let distinct = !injective || (0..k).all(|a| (a + 1..k).all(|b| map[a] != map[b]));
            if distinct && f.edges().iter().all(|&(a, b)| g.has_edge(map[a], map[b])) {
                total += 1;
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    return total;
                }
                map[pos] += 1;
                if map[pos] < n {
                    break;
                }
                map[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn edge_density_examples() {
        let k3 = FiniteGraph::complete(3);
        let e = motif("edge");
        assert_eq!(hom_density_exact::<BigRational>(&e, &k3), BigRational::ratio(2, 3));
        assert_eq!(inj_density(&e, &k3).value, 1.0);
        for n in 1..12 {
            let d = hom_density(&e, &FiniteGraph::complete(n)).value;
            assert!((d - (1.0 - 1.0 / n as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_free_graphs() {
        let t = motif("triangle");
        assert_eq!(hom_density(&t, &FiniteGraph::empty(5)).value, 0.0);
        let path = FiniteGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(inj_density(&t, &path).value, 0.0);
    }

    #[test]
    fn injective_density_vanishes_when_motif_is_larger() {
        let g = FiniteGraph::complete(3);
        assert_eq!(inj_density(&motif("k4"), &g).value, 0.0);
        assert_eq!(inj_density(&motif("path3"), &g).value, 0.0);
    }

    #[test]
    fn backtracking_matches_enumeration() {
        let names = ["vertex", "edge", "path2", "triangle", "path3", "star3", "cycle4", "k4minus", "k4", "two_edges"];
        for seed in 0..12 {
            let n = 3 + seed as usize % 6;
            let g = sample_graph_from_graphon(n, &ConnectionFunction::constant(0.55).unwrap(), seed);
            for name in names {
                let f = motif(name);
                assert_eq!(hom_count_backtrack(&f, &g), brute_force(&f, &g, false), "{name} hom");
                assert_eq!(inj_count(&f, &g), brute_force(&f, &g, true), "{name} inj");
            }
        }
    }

    #[test]
    fn matrix_forms_match_backtracking_across_word_boundaries() {
        for (seed, n) in [(1u64, 63usize), (2, 64), (3, 65), (4, 130)] {
            let g = sample_graph_from_graphon(n, &ConnectionFunction::constant(0.4).unwrap(), seed);
            for name in ["edge", "path2", "triangle", "cycle4"] {
                let f = motif(name);
                assert_eq!(hom_count_matrix(&f, &g), Some(hom_count_backtrack(&f, &g)), "{name}, n={n}");
            }
        }
        assert_eq!(hom_count_matrix(&motif("path3"), &FiniteGraph::complete(4)), None);
    }

    #[test]
    fn gap_bound_on_k3() {
        let e = motif("edge");
        let g = FiniteGraph::complete(3);
        let gap = (inj_density(&e, &g).value - hom_density(&e, &g).value).abs();
        assert!((gap - 1.0 / 3.0).abs() < 1e-15);
        assert!(gap <= density_gap_bound(&e, &g));
    }

    #[test]
    fn gap_bound_decays_like_one_over_n() {
        for k in 1..=7 {
            let scaled: Vec<f64> = [10usize, 100, 1000, 10000].iter().map(|&n| gap_bound(k, n) * n as f64).collect();
            let cap = (k * (k - 1) / 2 + k * k) as f64;
            assert!(scaled.iter().all(|&s| s <= cap + 1e-9), "k={k}: {scaled:?}");
        }
    }

    #[test]
    fn complete_motif_in_complete_graph() {
        let g = FiniteGraph::complete(40);
        let f = motif("k5");
        assert_eq!(hom_count_backtrack(&f, &g), falling(40, 5));
        assert_eq!(inj_count(&f, &g), falling(40, 5));
    }
}
