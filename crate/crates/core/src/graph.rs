//! Finite simple graphs, motif patterns and the graph <-> graphon maps.

use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graphon::{Kernel, StepGraphon};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// Simple undirected graph on vertices `0..n`, adjacency packed into `u64` rows.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl FiniteGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::config(format!("edge ({i},{j}) out of range for n = {n}")));
            }
            if i == j {
                return Err(Error::config(format!("self-loop at vertex {i}")));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Words per adjacency row.
    pub fn words(&self) -> usize {
        self.words
    }

    /// Adds `{i, j}`; self-loops are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.row(i).iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn edge_count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum::<u64>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    /// Mask with the low `n` bits set, one row wide.
    pub fn full_row(&self) -> Vec<u64> {
        let mut row = vec![u64::MAX; self.words];
        let tail = self.n % 64;
        if tail != 0 {
            row[self.words - 1] = (1u64 << tail) - 1;
        }
        if self.n == 0 {
            row.fill(0);
        }
        row
    }

    /// Plain text: `n <count>` then one `i j` line per edge with `i < j`.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n {}", self.n)?;
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut graph: Option<FiniteGraph> = None;
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            match &mut graph {
                None => {
                    let n = match (parts.next(), parts.next(), parts.next()) {
                        (Some("n"), Some(count), None) => count
                            .parse::<usize>()
                            .map_err(|e| Error::parse(lineno, format!("vertex count: {e}")))?,
                        _ => return Err(Error::parse(lineno, "expected header `n <count>`")),
                    };
                    graph = Some(FiniteGraph::empty(n));
                }
                Some(g) => {
                    let mut endpoint = || -> Result<usize> {
                        parts
                            .next()
                            .ok_or_else(|| Error::parse(lineno, "expected `i j`"))?
                            .parse::<usize>()
                            .map_err(|e| Error::parse(lineno, e.to_string()))
                    };
                    let (i, j) = (endpoint()?, endpoint()?);
                    if parts.next().is_some() {
                        return Err(Error::parse(lineno, "trailing tokens after `i j`"));
                    }
                    if i >= j || j >= g.n {
                        return Err(Error::parse(lineno, format!("edge `{i} {j}` must satisfy i < j < n")));
                    }
                    g.add_edge(i, j);
                }
            }
        }
        graph.ok_or_else(|| Error::parse(1, "empty graph file"))
    }
}

impl fmt::Debug for FiniteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGraph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

/// Largest supported motif.
pub const MAX_MOTIF_VERTICES: usize = 7;

/// Small pattern graph `F` on vertices `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
    name: Option<String>,
}

impl MotifGraph {
    pub fn new(k: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if k == 0 || k > MAX_MOTIF_VERTICES {
            return Err(Error::config(format!(
                "motif must have 1..={MAX_MOTIF_VERTICES} vertices, got {k}"
            )));
        }
        let mut canonical = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= k || b >= k {
                return Err(Error::config(format!("motif edge {a}-{b} out of range for k = {k}")));
            }
            if a == b {
                return Err(Error::config(format!("motif self-loop at {a}")));
            }
            let e = (a.min(b), a.max(b));
            if canonical.contains(&e) {
                return Err(Error::config(format!("duplicate motif edge {}-{}", e.0, e.1)));
            }
            canonical.push(e);
        }
        Ok(Self {
            k,
            edges: canonical,
            name: None,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Name if present, otherwise the edge-list literal.
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.literal())
    }

    /// `k=3;edges=0-1,1-2`
    pub fn literal(&self) -> String {
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        format!("k={};edges={}", self.k, edges.join(","))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Disjoint union, vertices of `other` shifted by `self.k()`.
    pub fn disjoint_union(&self, other: &MotifGraph) -> Result<MotifGraph> {
        let shift = self.k;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(a, b)| (a + shift, b + shift)))
            .collect();
        MotifGraph::new(self.k + other.k, edges)
    }
}

/// Parses a catalogue name or an edge-list literal such as `k=3;edges=0-1,1-2`.
pub fn motif_from_name(name: &str) -> Result<MotifGraph> {
    let key = name.trim();
    if key.starts_with("k=") {
        return parse_literal(key);
    }
    let (k, edges): (usize, &[(usize, usize)]) = match key.to_ascii_lowercase().as_str() {
        "vertex" => (1, &[]),
        "edge" => (2, &[(0, 1)]),
        "path2" => (3, &[(0, 1), (1, 2)]),
        "triangle" | "k3" => (3, &[(0, 1), (1, 2), (0, 2)]),
        "path3" => (4, &[(0, 1), (1, 2), (2, 3)]),
        "star3" => (4, &[(0, 1), (0, 2), (0, 3)]),
        "cycle4" => (4, &[(0, 1), (1, 2), (2, 3), (0, 3)]),
        "k4minus" | "diamond" => (4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]),
        "k4" => (4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        "two_edges" => (4, &[(0, 1), (2, 3)]),
        "path4" => (5, &[(0, 1), (1, 2), (2, 3), (3, 4)]),
        "star4" => (5, &[(0, 1), (0, 2), (0, 3), (0, 4)]),
        "cycle5" => (5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]),
        "k5" => (5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]),
        _ => return Err(Error::config(format!("unknown motif {name:?}"))),
    };
    let canonical = match key.to_ascii_lowercase().as_str() {
        "k3" => "triangle".to_string(),
        "diamond" => "k4minus".to_string(),
        other => other.to_string(),
    };
    Ok(MotifGraph::new(k, edges.to_vec())?.named(canonical))
}

fn parse_literal(text: &str) -> Result<MotifGraph> {
    let bad = |msg: &str| Error::config(format!("motif literal {text:?}: {msg}"));
    let (k_part, edge_part) = text.split_once(';').ok_or_else(|| bad("expected `k=<count>;edges=<a-b,...>`"))?;
    let k: usize = k_part
        .trim()
        .strip_prefix("k=")
        .ok_or_else(|| bad("missing `k=`"))?
        .parse()
        .map_err(|_| bad("vertex count is not an integer"))?;
    let list = edge_part
        .trim()
        .strip_prefix("edges=")
        .ok_or_else(|| bad("missing `edges=`"))?;
    let mut edges = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = item.split_once('-').ok_or_else(|| bad("edges are written `a-b`"))?;
        let a = a.trim().parse().map_err(|_| bad("bad edge endpoint"))?;
        let b = b.trim().parse().map_err(|_| bad("bad edge endpoint"))?;
        edges.push((a, b));
    }
    MotifGraph::new(k, edges)
}

/// Fixed enumeration `F_1, F_2, ...` of isomorphism classes used by the
/// subgraph distance; motif `F_i` carries weight `2^{-i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifCatalog {
    motifs: Vec<MotifGraph>,
}

/// Order of [`MotifCatalog::standard`].
pub const STANDARD_CATALOG: [&str; 8] = [
    "edge", "path2", "triangle", "path3", "star3", "cycle4", "k4minus", "k4",
];

impl MotifCatalog {
    pub fn standard() -> Self {
        Self {
            motifs: STANDARD_CATALOG
                .iter()
                .map(|name| motif_from_name(name).expect("catalogue names parse"))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.motifs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.motifs.is_empty()
    }

    pub fn motifs(&self) -> &[MotifGraph] {
        &self.motifs
    }

    /// `F_i` for 1-based `i`.
    pub fn get(&self, index: usize) -> Option<&MotifGraph> {
        index.checked_sub(1).and_then(|i| self.motifs.get(i))
    }

    /// 1-based position of a motif with the given name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        let canonical = motif_from_name(name).ok()?;
        self.motifs.iter().position(|m| m.name() == canonical.name()).map(|i| i + 1)
    }

    /// `2^{-i}`
    pub fn weight(index: usize) -> f64 {
        0.5f64.powi(index as i32)
    }
}

/// Canonical step graphon of `G`: `n` equal blocks, block `(i, j)` equal to `adj[i][j]`.
pub fn canonical_graphon<T: Scalar>(g: &FiniteGraph) -> StepGraphon<T> {
    let n = g.n();
    let values = (0..n * n)
        .map(|idx| {
            if g.has_edge(idx / n, idx % n) {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    StepGraphon::equipartition(n, values).expect("adjacency is symmetric 0/1")
}

/// `G(n, h)`: i.i.d. uniform labels `U_i`, edge `{i, j}` independently with probability `h(U_i, U_j)`.
pub fn sample_graph_from_graphon<K: Kernel + ?Sized>(n: usize, h: &K, seed: u64) -> FiniteGraph {
    let mut rng = rng_from_seed(seed);
    let labels: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let mut g = FiniteGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            let p = h.eval(labels[i], labels[j]);
            if rng.random::<f64>() < p {
                g.add_edge(i, j);
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::ConnectionFunction;
    use crate::stats::RunningStats;
    use proptest::prelude::*;

    #[test]
    fn catalogue_names() {
        let e = motif_from_name("edge").unwrap();
        assert_eq!((e.k(), e.edges()), (2, &[(0, 1)][..]));
        let t = motif_from_name("triangle").unwrap();
        assert_eq!((t.k(), t.edges()), (3, &[(0, 1), (1, 2), (0, 2)][..]));
        let p = motif_from_name("path2").unwrap();
        assert_eq!((p.k(), p.edges()), (3, &[(0, 1), (1, 2)][..]));
        assert!(matches!(motif_from_name("hexagon"), Err(Error::Config(_))));
    }

    #[test]
    fn literal_motifs() {
        let m = motif_from_name("k=3;edges=0-1,1-2").unwrap();
        assert_eq!(m.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(m.literal(), "k=3;edges=0-1,1-2");
        assert!(motif_from_name("k=3;edges=0-0").is_err());
        assert!(motif_from_name("k=3;edges=0-1,1-0").is_err());
        assert!(motif_from_name("k=9;edges=0-1").is_err());
        assert!(motif_from_name("k=2;edges=0-2").is_err());
    }

    #[test]
    fn standard_catalogue_order_is_frozen() {
        let cat = MotifCatalog::standard();
        assert_eq!(cat.len(), 8);
        assert_eq!(cat.index_of("edge"), Some(1));
        assert_eq!(cat.index_of("triangle"), Some(3));
        assert_eq!(cat.index_of("K4"), Some(8));
        assert_eq!(cat.index_of("diamond"), Some(7));
        assert_eq!(cat.get(2).unwrap().name(), Some("path2"));
        assert_eq!(MotifCatalog::weight(3), 0.125);
    }

    #[test]
    fn canonical_graphon_examples() {
        let g = FiniteGraph::from_edges(2, &[(0, 1)]).unwrap();
        let h: StepGraphon<f64> = canonical_graphon(&g);
        assert_eq!(h.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(h.values(), &[0.0, 1.0, 1.0, 0.0]);

        let empty: StepGraphon<f64> = canonical_graphon(&FiniteGraph::empty(3));
        assert!(empty.values().iter().all(|&v| v == 0.0));

        let k4: StepGraphon<f64> = canonical_graphon(&FiniteGraph::complete(4));
        let ones = k4.values().iter().filter(|&&v| v == 1.0).count();
        assert_eq!(ones, 12);
    }

    #[test]
    fn graph_text_round_trip() {
        let g = FiniteGraph::from_edges(5, &[(0, 3), (1, 2), (3, 4)]).unwrap();
        let mut buf = Vec::new();
        g.write_text(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "n 5\n0 3\n1 2\n3 4\n");
        assert_eq!(FiniteGraph::read_text(&buf[..]).unwrap(), g);
    }

    #[test]
    fn graph_text_errors_name_the_line() {
        let err = FiniteGraph::read_text(&b"n 3\n0 1\n2 1\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(FiniteGraph::read_text(&b"3\n"[..]).is_err());
    }

    #[test]
    fn sampling_extremes() {
        let one = ConnectionFunction::constant(1.0).unwrap();
        let zero = ConnectionFunction::constant(0.0).unwrap();
        for seed in 0..3 {
            assert_eq!(sample_graph_from_graphon(17, &one, seed), FiniteGraph::complete(17));
            assert_eq!(sample_graph_from_graphon(17, &zero, seed).edge_count(), 0);
        }
    }

    #[test]
    fn sampled_edge_count_matches_binomial_moments() {
        let h = ConnectionFunction::constant(0.3).unwrap();
        let n = 200u64;
        let pairs = (n * (n - 1) / 2) as f64;
        let stats: RunningStats = (0..100)
            .map(|seed| sample_graph_from_graphon(n as usize, &h, seed).edge_count() as f64)
            .collect();
        let sd = (0.3 * 0.7 * pairs).sqrt();
        assert!((stats.mean() - 0.3 * pairs).abs() < 4.0 * sd);
    }

    proptest! {
        #[test]
        fn adjacency_is_symmetric(n in 1usize..130, edges in prop::collection::vec((0usize..130, 0usize..130), 0..300)) {
            let mut g = FiniteGraph::empty(n);
            for (a, b) in edges {
                g.add_edge(a % n, b % n);
            }
            for i in 0..n {
                prop_assert!(!g.has_edge(i, i));
                for j in 0..n {
                    prop_assert_eq!(g.has_edge(i, j), g.has_edge(j, i));
                }
            }
            let degree_sum: u64 = (0..n).map(|i| g.degree(i)).sum();
            prop_assert_eq!(degree_sum, 2 * g.edge_count());
        }

        #[test]
        fn sampling_is_reproducible(n in 1usize..60, seed in any::<u64>()) {
            let h = ConnectionFunction::Product;
            prop_assert_eq!(sample_graph_from_graphon(n, &h, seed), sample_graph_from_graphon(n, &h, seed));
        }
    }
}
