//! Enumeration of correspondence configurations.
//!
//! A set of `n` correspondences is a directed multigraph on the cameras:
//! each correspondence is an edge from its view-1 camera to its view-2
//! camera, loops and parallel edges allowed. Two configurations are the same
//! case when the graphs are isomorphic, possibly after reversing every edge
//! (swapping the two views).

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Edge list with 0-based vertex labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirectedMultigraph {
    pub edges: Vec<(usize, usize)>,
}

impl DirectedMultigraph {
    pub fn new(edges: Vec<(usize, usize)>) -> Self {
        Self { edges }
    }

    /// Builds a graph from 1-based labels as used in printed tables.
    pub fn from_one_based(edges: &[(usize, usize)]) -> Self {
        Self::new(edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of distinct vertices that carry at least one edge.
    pub fn vertex_count(&self) -> usize {
        let mut seen: Vec<usize> = self.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn reverse(&self) -> Self {
        Self::new(self.edges.iter().map(|&(u, v)| (v, u)).collect())
    }

    /// Multiplicity of every distinct directed edge.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &e in &self.edges {
            *counts.entry(e).or_default() += 1;
        }
        let mut m: Vec<usize> = counts.into_values().collect();
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }

    /// Canonical representative of the graph's class under isomorphism
    /// and edge reversal: vertices labelled `0..V` by first appearance in the
    /// lexicographically smallest edge sequence.
    pub fn canonical(&self) -> Self {
        let a = oriented_canonical(&self.edges);
        let b = oriented_canonical(&self.reverse().edges);
        Self::new(a.min(b))
    }
}

impl fmt::Display for DirectedMultigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let top: Vec<String> = self.edges.iter().map(|e| (e.0 + 1).to_string()).collect();
        let bottom: Vec<String> = self.edges.iter().map(|e| (e.1 + 1).to_string()).collect();
        write!(f, "[{}; {}]", top.join(" "), bottom.join(" "))
    }
}

fn oriented_canonical(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let n_vertices = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut map = vec![usize::MAX; n_vertices];
    let mut used = vec![false; edges.len()];
    let mut seq = Vec::with_capacity(edges.len());
    search(edges, &mut used, &mut map, 0, &mut seq, &mut best);
    best.unwrap_or_default()
}

fn relabel(e: (usize, usize), map: &[usize], next: usize) -> (usize, usize) {
    let a = if map[e.0] == usize::MAX { next } else { map[e.0] };
    let next = if map[e.0] == usize::MAX { next + 1 } else { next };
    let b = if e.1 == e.0 {
        a
    } else if map[e.1] == usize::MAX {
        next
    } else {
        map[e.1]
    };
    (a, b)
}

fn search(
    edges: &[(usize, usize)],
    used: &mut [bool],
    map: &mut [usize],
    next: usize,
    seq: &mut Vec<(usize, usize)>,
    best: &mut Option<Vec<(usize, usize)>>,
) {
    if seq.len() == edges.len() {
        if best.as_ref().is_none_or(|b| *seq < *b) {
            *best = Some(seq.clone());
        }
        return;
    }
    // Smallest relabelled edge available from this state.
    let mut min: Option<(usize, usize)> = None;
    for (i, &e) in edges.iter().enumerate() {
        if !used[i] {
            let r = relabel(e, map, next);
            if min.is_none_or(|m| r < m) {
                min = Some(r);
            }
        }
    }
    let Some(min) = min else { return };
    if let Some(b) = best.as_ref() {
        let depth = seq.len();
        match seq[..].cmp(&b[..depth]) {
            std::cmp::Ordering::Greater => return,
            std::cmp::Ordering::Equal if min > b[depth] => return,
            _ => {}
        }
    }
    let mut tried: Vec<(usize, usize)> = Vec::new();
    for i in 0..edges.len() {
        let e = edges[i];
        if used[i] || tried.contains(&e) || relabel(e, map, next) != min {
            continue;
        }
        tried.push(e);
        let saved = (map[e.0], map[e.1]);
        let mut n = next;
        if map[e.0] == usize::MAX {
            map[e.0] = n;
            n += 1;
        }
        if map[e.1] == usize::MAX {
            map[e.1] = n;
            n += 1;
        }
        used[i] = true;
        seq.push(min);
        search(edges, used, map, n, seq, best);
        seq.pop();
        used[i] = false;
        map[e.0] = saved.0;
        map[e.1] = saved.1;
    }
}

/// Multiplicity-aware isomorphism test by backtracking over vertex maps,
/// pruned by (out-degree, in-degree, loop count) signatures.
fn isomorphic(g: &DirectedMultigraph, h: &DirectedMultigraph) -> bool {
    if g.edges.len() != h.edges.len() {
        return false;
    }
    let (gv, ga) = compact(g);
    let (hv, ha) = compact(h);
    if gv != hv {
        return false;
    }
    let sig = |a: &[Vec<usize>], v: usize| {
        let out: usize = a[v].iter().sum();
        let inn: usize = a.iter().map(|row| row[v]).sum();
        (out, inn, a[v][v])
    };
    let gs: Vec<_> = (0..gv).map(|v| sig(&ga, v)).collect();
    let hs: Vec<_> = (0..hv).map(|v| sig(&ha, v)).collect();
    let mut a = gs.clone();
    let mut b = hs.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return false;
    }
    let mut map = vec![usize::MAX; gv];
    let mut taken = vec![false; hv];
    extend(0, &ga, &ha, &gs, &hs, &mut map, &mut taken)
}

fn compact(g: &DirectedMultigraph) -> (usize, Vec<Vec<usize>>) {
    let mut labels: Vec<usize> = g.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    labels.sort_unstable();
    labels.dedup();
    let n = labels.len();
    let idx = |x: usize| labels.binary_search(&x).unwrap();
    let mut adj = vec![vec![0; n]; n];
    for &(u, v) in &g.edges {
        adj[idx(u)][idx(v)] += 1;
    }
    (n, adj)
}

fn extend(
    v: usize,
    ga: &[Vec<usize>],
    ha: &[Vec<usize>],
    gs: &[(usize, usize, usize)],
    hs: &[(usize, usize, usize)],
    map: &mut [usize],
    taken: &mut [bool],
) -> bool {
    if v == ga.len() {
        return true;
    }
    for w in 0..ha.len() {
        if taken[w] || gs[v] != hs[w] {
            continue;
        }
        let consistent = (0..v).all(|u| {
            ga[u][v] == ha[map[u]][w] && ga[v][u] == ha[w][map[u]]
        });
        if !consistent {
            continue;
        }
        map[v] = w;
        taken[w] = true;
        if extend(v + 1, ga, ha, gs, hs, map, taken) {
            return true;
        }
        taken[w] = false;
    }
    map[v] = usize::MAX;
    false
}

/// True when the graphs are isomorphic, directly or after reversing `h`.
pub fn graphs_equivalent(g: &DirectedMultigraph, h: &DirectedMultigraph) -> bool {
    isomorphic(g, h) || isomorphic(g, &h.reverse())
}

/// All distinct configurations with `n` edges, generated by extending each
/// `(n-1)`-edge configuration with one edge that touches existing vertices,
/// at most one new vertex, or two new vertices.
pub fn enumerate_configs(n: usize) -> Vec<DirectedMultigraph> {
    assert!(n >= 1, "at least one edge is required");
    let mut level = vec![
        DirectedMultigraph::new(vec![(0, 0)]),
        DirectedMultigraph::new(vec![(0, 1)]),
    ];
    for _ in 1..n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            let v = g.vertex_count();
            let mut candidates: Vec<(usize, usize)> = Vec::new();
            for a in 0..=v {
                for b in 0..=v {
                    candidates.push((a, b));
                }
            }
            candidates.push((v, v + 1));
            for e in candidates {
                let mut edges = g.edges.clone();
                edges.push(e);
                let c = DirectedMultigraph::new(edges).canonical();
                if seen.insert(c.clone()) {
                    next.push(c);
                }
            }
        }
        level = next;
    }
    level
}

/// Histogram of vertex counts: entry `k` counts graphs with `k + 1` cameras.
pub fn count_by_cameras(graphs: &[DirectedMultigraph]) -> Vec<usize> {
    let max = graphs.iter().map(|g| g.vertex_count()).max().unwrap_or(0);
    let mut hist = vec![0; max];
    for g in graphs {
        hist[g.vertex_count() - 1] += 1;
    }
    hist
}

/// Class of a six-correspondence configuration by its camera-pair
/// multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MatchType {
    /// All six correspondences share one camera pair.
    SixPair,
    /// Five share a pair.
    FivePair,
    /// Four share a pair.
    FourPair,
    /// Two disjoint triples, each sharing a pair.
    ThreeThree,
    /// One triple shares a pair.
    ThreePair,
    /// No camera pair is shared by three or more correspondences.
    Distinct,
}

impl MatchType {
    pub const ALL: [MatchType; 6] = [
        MatchType::SixPair,
        MatchType::FivePair,
        MatchType::FourPair,
        MatchType::ThreeThree,
        MatchType::ThreePair,
        MatchType::Distinct,
    ];

    pub fn from_multiplicities(m: &[usize]) -> Self {
        let max = m.iter().copied().max().unwrap_or(0);
        let threes = m.iter().filter(|&&k| k == 3).count();
        match max {
            k if k >= 6 => Self::SixPair,
            5 => Self::FivePair,
            4 => Self::FourPair,
            3 if threes >= 2 => Self::ThreeThree,
            3 => Self::ThreePair,
            _ => Self::Distinct,
        }
    }

    /// Number of complex solutions of the six-point problem of this class.
    pub fn solution_count(self) -> usize {
        match self {
            Self::SixPair => 0,
            Self::FivePair => 20,
            Self::FourPair => 40,
            Self::ThreeThree => 48,
            Self::ThreePair => 56,
            Self::Distinct => 64,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::SixPair => "6∪φ",
            Self::FivePair => "5∪x",
            Self::FourPair => "4∪x",
            Self::ThreeThree => "3∪3",
            Self::ThreePair => "3∪x",
            Self::Distinct => "∪xᵢ",
        }
    }
}

impl fmt::Display for MatchType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MatchType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        MatchType::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| format!("unknown match type {s:?}"))
    }
}

pub fn classify_match_type(g: &DirectedMultigraph) -> MatchType {
    MatchType::from_multiplicities(&g.multiplicities())
}
