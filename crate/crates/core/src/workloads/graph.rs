//! Matching index of vertex pairs over adjacency bit rows.

use super::host::HostCostModel;
use crate::backends::{Backend, BackendKind, RowAddr, RunStats};
use crate::bits::BitRow;
use crate::dram::SimConfig;
use crate::error::{Error, Result};
use crate::isa::{allocate_pinned, execute, load_vector, lower, store_vector, BbopInstruction, Operand, Pins};
use crate::threshold::TlpeFunc;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};

/// An undirected graph kept as sorted neighbour lists; adjacency rows are
/// built on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDataset {
    pub name: String,
    adj: Vec<Vec<u32>>,
    edges: usize,
}

/// Vertex and edge counts of the public datasets used for the graph
/// experiments; [`GraphDataset::synthetic`] reproduces their sizes.
pub const DATASETS: [(&str, usize, usize); 3] = [
    ("facebook", 4039, 88234),
    ("amazon", 334863, 925872),
    ("dblp", 317080, 1049866),
];

impl GraphDataset {
    /// Undirected graph on `vertices` vertices. Duplicate edges collapse;
    /// a self-loop sets the vertex's own bit.
    pub fn from_edges(name: &str, vertices: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); vertices];
        for &(u, v) in edges {
            for x in [u, v] {
                if x as usize >= vertices {
                    return Err(Error::Argument(format!("edge ({u}, {v}) names vertex {x} of {vertices}")));
                }
            }
            adj[u as usize].push(v);
            if u != v {
                adj[v as usize].push(u);
            }
        }
        let mut count = 0;
        for (u, n) in adj.iter_mut().enumerate() {
            n.sort_unstable();
            n.dedup();
            count += n.iter().filter(|&&v| v as usize >= u).count();
        }
        Ok(GraphDataset {
            name: name.to_string(),
            adj,
            edges: count,
        })
    }

    /// One `u v` pair per line; `#` and `%` start comments. Vertex ids are
    /// taken as given, so the graph has `max id + 1` vertices.
    pub fn parse_edge_list(name: &str, text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split(['#', '%']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<u32>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => {
                    return Err(Error::Config {
                        line: n + 1,
                        msg: format!("expected two vertex ids, got {line:?}"),
                    })
                }
            }
        }
        let n = edges.iter().map(|&(u, v)| u.max(v) as usize + 1).max().unwrap_or(0);
        Self::from_edges(name, n, &edges)
    }

    /// Uniform random simple graph with exactly `edges` edges.
    pub fn synthetic(name: &str, vertices: usize, edges: usize, seed: u64) -> Result<Self> {
        let max = vertices.saturating_mul(vertices.saturating_sub(1)) / 2;
        if edges > max {
            return Err(Error::Argument(format!("{vertices} vertices hold at most {max} edges")));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut seen = HashSet::with_capacity(edges);
        let mut list = Vec::with_capacity(edges);
        while list.len() < edges {
            let u = rng.gen_range(0..vertices as u32);
            let v = rng.gen_range(0..vertices as u32);
            if u != v && seen.insert((u.min(v), u.max(v))) {
                list.push((u, v));
            }
        }
        Self::from_edges(name, vertices, &list)
    }

    /// A synthetic stand-in with the size of one of [`DATASETS`].
    pub fn dataset(name: &str, seed: u64) -> Result<Self> {
        let (n, v, e) = DATASETS
            .iter()
            .find(|d| d.0 == name)
            .ok_or_else(|| Error::Argument(format!("unknown dataset {name:?}")))?;
        Self::synthetic(n, *v, *e, seed)
    }

    pub fn vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    /// Adjacency row of `v`: lane `u` is set when `u` is a neighbour.
    pub fn row(&self, v: usize) -> BitRow {
        let mut r = BitRow::zeros(self.vertices());
        for &u in &self.adj[v] {
            r.set(u as usize, true);
        }
        r
    }
}

/// Split vertices into `parts` pieces of near-equal size (they differ by at
/// most one vertex), cutting a breadth-first order so neighbours tend to
/// share a piece. Deterministic.
pub fn partition_graph(g: &GraphDataset, parts: usize) -> Vec<u32> {
    let n = g.vertices();
    let parts = parts.max(1);
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in g.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    queue.push_back(u as usize);
                }
            }
        }
    }
    let (q, r) = (n / parts, n % parts);
    let mut out = vec![0u32; n];
    let mut at = 0;
    for p in 0..parts {
        let size = q + usize::from(p < r);
        for &v in &order[at..at + size] {
            out[v] = p as u32;
        }
        at += size;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingResult {
    pub i: usize,
    pub j: usize,
    pub common: u64,
    pub union: u64,
}

impl MatchingResult {
    /// `common / union`, with an empty union giving 0.
    pub fn value(&self) -> f64 {
        if self.union == 0 {
            0.0
        } else {
            self.common as f64 / self.union as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingRun {
    pub results: Vec<MatchingResult>,
    pub stats: RunStats,
    /// Popcounts and divisions on the host.
    pub host_ns: f64,
}

/// Matching index of one vertex pair.
pub fn matching_index(
    g: &GraphDataset,
    i: usize,
    j: usize,
    backend: BackendKind,
    config: &SimConfig,
    host: &HostCostModel,
) -> Result<MatchingRun> {
    let part = partition_graph(g, config.geometry.banks_per_chip as usize);
    matching_index_batch(g, &[(i, j)], &part, backend, config, host)
}

/// Matching indices of many pairs. A pair is evaluated in the bank group
/// holding `i` under `partition`; pairs in different groups overlap.
pub fn matching_index_batch(
    g: &GraphDataset,
    pairs: &[(usize, usize)],
    partition: &[u32],
    backend: BackendKind,
    config: &SimConfig,
    host: &HostCostModel,
) -> Result<MatchingRun> {
    host.validate()?;
    if pairs.is_empty() {
        return Err(Error::Argument("no vertex pairs".into()));
    }
    if partition.len() != g.vertices() {
        return Err(Error::Argument("partition does not cover the graph".into()));
    }
    let n = g.vertices();
    for &(i, j) in pairs {
        if i >= n || j >= n || i == j {
            return Err(Error::Argument(format!("bad vertex pair ({i}, {j}) in a graph of {n}")));
        }
    }
    let geo = config.geometry;
    let be = Backend::new(backend, config.clone())?;
    let mut mem = be.memory()?;
    let chunks = n.div_ceil(geo.row_bits()) as u32;
    let mut cursor = vec![0u32; geo.groups() as usize];
    let mut calls = Vec::new();
    let mut outputs = Vec::new();
    for &(i, j) in pairs {
        let group = geo.group_of(partition[i] % geo.banks_per_chip);
        let base = group * geo.bank_group_size;
        let row0 = cursor[group as usize];
        // CIDAN spreads operands over four banks; the others keep one bank
        let at = |slot: u32| match backend {
            BackendKind::Cidan => RowAddr::new(base + slot, row0),
            _ => RowAddr::new(base, row0 + slot * chunks),
        };
        cursor[group as usize] += if backend == BackendKind::Cidan { chunks } else { 4 * chunks };
        let mut dests = Vec::new();
        for (func, dest) in [(TlpeFunc::And, at(2)), (TlpeFunc::Or, at(3))] {
            let instr = BbopInstruction {
                func,
                dest: 0,
                src1: 0,
                src2: Some(0),
                len_bits: Some(n as u64),
                backend,
            };
            let pins = Pins {
                dest,
                src1: at(0),
                src2: Some(at(1)),
            };
            let p = allocate_pinned(&instr, &geo, pins)?;
            p.validate(&geo)?;
            if dests.is_empty() {
                store_vector(&mut mem, &p.rows(Operand::Src1), &g.row(i))?;
                store_vector(&mut mem, &p.rows(Operand::Src2), &g.row(j))?;
            }
            dests.push(p.rows(Operand::Dest));
            calls.extend(lower(&p));
        }
        outputs.push((i, j, dests));
    }
    let stats = execute(&be, &mut mem, &calls)?;
    let mut results = Vec::with_capacity(pairs.len());
    for (i, j, dests) in outputs {
        let common = load_vector(&mem, &dests[0], n)?.count_ones();
        let union = load_vector(&mem, &dests[1], n)?.count_ones();
        results.push(MatchingResult { i, j, common, union });
    }
    let words = n.div_ceil(64) as f64;
    let host_ns = pairs.len() as f64 * (2.0 * words * host.ns_per_popcount_word + host.ns_per_divide);
    Ok(MatchingRun { results, stats, host_ns })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let g = GraphDataset::from_edges("k3", 3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let r = matching_index(&g, 1, 2, BackendKind::Cidan, &SimConfig::default(), &HostCostModel::ZERO).unwrap();
        let m = &r.results[0];
        assert_eq!((m.common, m.union), (1, 3));
        assert!((m.value() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn isolated_pair_is_zero() {
        let g = GraphDataset::from_edges("empty", 4, &[(2, 3)]).unwrap();
        let r = matching_index(&g, 0, 1, BackendKind::Ambit, &SimConfig::default(), &HostCostModel::ZERO).unwrap();
        assert_eq!(r.results[0].value(), 0.0);
        assert!(matching_index(&g, 1, 1, BackendKind::Ambit, &SimConfig::default(), &HostCostModel::ZERO).is_err());
        assert!(matching_index(&g, 0, 9, BackendKind::Ambit, &SimConfig::default(), &HostCostModel::ZERO).is_err());
    }

    #[test]
    fn edge_list_parsing() {
        let g = GraphDataset::parse_edge_list("t", "# header\n0 1\n1 2 % note\n\n2 0\n").unwrap();
        assert_eq!((g.vertices(), g.edge_count()), (3, 3));
        match GraphDataset::parse_edge_list("t", "0 1\n1 x\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn partitions_balance() {
        let path: Vec<(u32, u32)> = (0..7).map(|v| (v, v + 1)).collect();
        let g = GraphDataset::from_edges("p8", 8, &path).unwrap();
        let p = partition_graph(&g, 2);
        assert_eq!(p.iter().filter(|&&x| x == 0).count(), 4);
        assert_eq!(p, partition_graph(&g, 2));
        let g = GraphDataset::synthetic("r", 1000, 3000, 5).unwrap();
        let p = partition_graph(&g, 8);
        let sizes: Vec<usize> = (0..8).map(|k| p.iter().filter(|&&x| x == k).count()).collect();
        let (max, min) = (*sizes.iter().max().unwrap(), *sizes.iter().min().unwrap());
        assert!(max as f64 / min as f64 <= 1.1);
        assert_eq!(g.edge_count(), 3000);
    }
}
