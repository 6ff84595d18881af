//! Cayley graphs, strongly regular parameters, and canonical labelling.
//!
//! The canonical form is the graph6 string of a relabelled copy of the
//! graph, chosen by an individualization-refinement search: vertex colours
//! are refined to an equitable partition, a vertex of the first non-singleton
//! cell is individualized, and the process repeats until the partition is
//! discrete. Among all leaves the least (refinement trace, graph6) pair wins.
//! Automorphisms found as coincident leaves prune sibling branches in the
//! same orbit.

use sha2::{Digest, Sha256};

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::graph6::emit_graph6;
use crate::group::GroupTable;
use crate::ring::inverse_closed;

/// Simple undirected graph with bitset adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<ElementSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { n, adj: vec![ElementSet::empty(n); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Adds `{a, b}`; loops are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adj[v].to_vec()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Copy with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut g = Self::empty(self.n);
        for a in 0..self.n {
            for b in self.neighbors(a) {
                if a < b {
                    g.add_edge(perm[a], perm[b]);
                }
            }
        }
        g
    }
}

/// Vertices are group elements; `g ~ h` when `g·h⁻¹ ∈ d`.
pub fn cayley_graph(group: &GroupTable, d: &[usize]) -> Result<Graph> {
    if d.contains(&0) || !inverse_closed(group, d) {
        return Err(Error::NotInverseClosed);
    }
    let n = group.order();
    let mut g = Graph::empty(n);
    for h in 0..n {
        for &s in d {
            g.add_edge(group.mul(s, h), h);
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SrgParams {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
}

impl SrgParams {
    /// `k(k − λ − 1) = (v − k − 1)μ`
    pub fn feasible(&self) -> bool {
        let (v, k, l, m) = (self.v as i64, self.k as i64, self.lambda as i64, self.mu as i64);
        k * (k - l - 1) == (v - k - 1) * m
    }
}

/// Exact parameters, or `None` if the graph is irregular or some pair of
/// vertices has the wrong number of common neighbours. Complete and edgeless
/// graphs report `mu` (resp. `lambda`) as 0.
pub fn srg_params(g: &Graph) -> Option<SrgParams> {
    let n = g.order();
    if n == 0 {
        return None;
    }
    let k = g.degree(0);
    if (1..n).any(|v| g.degree(v) != k) {
        return None;
    }
    let mut lambda = None;
    let mut mu = None;
    for a in 0..n {
        for b in a + 1..n {
            let common = g.adj[a].to_vec().iter().filter(|&&c| g.adj[b].contains(c)).count();
            let slot = if g.has_edge(a, b) { &mut lambda } else { &mut mu };
            match *slot {
                None => *slot = Some(common),
                Some(x) if x != common => return None,
                _ => {}
            }
        }
    }
    let p = SrgParams { v: n, k, lambda: lambda.unwrap_or(0), mu: mu.unwrap_or(0) };
    debug_assert!(p.feasible());
    Some(p)
}

fn mix(h: u64, x: u64) -> u64 {
    let mut z = h ^ x.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Ordered partition as a colour per vertex; colours are dense `0..cells`.
#[derive(Clone)]
struct Partition {
    color: Vec<usize>,
    cells: usize,
}

impl Partition {
    fn unit(n: usize) -> Self {
        Self { color: vec![0; n], cells: usize::from(n > 0) }
    }

    /// First non-singleton cell, as (colour, members).
    fn target_cell(&self) -> Option<(usize, Vec<usize>)> {
        let mut size = vec![0usize; self.cells];
        for &c in &self.color {
            size[c] += 1;
        }
        let c = size.iter().position(|&s| s > 1)?;
        Some((c, (0..self.color.len()).filter(|&v| self.color[v] == c).collect()))
    }

    fn individualize(&self, v: usize) -> Self {
        let c = self.color[v];
        let color = self
            .color
            .iter()
            .enumerate()
            .map(|(u, &x)| if x > c || (x == c && u != v) { x + 1 } else { x })
            .collect();
        Self { color, cells: self.cells + 1 }
    }

    /// Refines to the coarsest equitable partition below `self`, returning a
    /// relabelling-invariant hash of the refinement steps.
    fn refine(&mut self, nbrs: &[Vec<usize>]) -> u64 {
        let n = self.color.len();
        let mut trace = mix(0, self.cells as u64);
        loop {
            let mut sigs: Vec<(Vec<usize>, usize)> = (0..n)
                .map(|v| {
                    let mut s = Vec::with_capacity(nbrs[v].len() + 1);
                    s.push(self.color[v]);
                    let mut nc: Vec<usize> = nbrs[v].iter().map(|&u| self.color[u]).collect();
                    nc.sort_unstable();
                    s.extend(nc);
                    (s, v)
                })
                .collect();
            sigs.sort_unstable();
            let mut next = vec![0usize; n];
            let mut cells = 0;
            for i in 0..n {
                if i > 0 && sigs[i].0 != sigs[i - 1].0 {
                    cells += 1;
                    trace = mix(trace, i as u64);
                    for &x in &sigs[i - 1].0 {
                        trace = mix(trace, x as u64);
                    }
                }
                next[sigs[i].1] = cells;
            }
            if let Some(last) = sigs.last() {
                for &x in &last.0 {
                    trace = mix(trace, x as u64);
                }
            }
            let cells = if n > 0 { cells + 1 } else { 0 };
            trace = mix(trace, cells as u64);
            let stable = cells == self.cells;
            self.color = next;
            self.cells = cells;
            if stable {
                return trace;
            }
        }
    }
}

struct Leaf {
    trace: Vec<u64>,
    code: String,
    /// `labelling[v]` is the new name of vertex `v`.
    labelling: Vec<usize>,
}

struct Canon<'a> {
    g: &'a Graph,
    nbrs: Vec<Vec<usize>>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    automorphisms: Vec<Vec<usize>>,
}

impl Canon<'_> {
    fn leaf(&mut self, p: &Partition, trace: &[u64]) {
        let code = emit_graph6(&self.g.relabel(&p.color));
        let leaf = Leaf { trace: trace.to_vec(), code, labelling: p.color.clone() };
        for other in [&self.first, &self.best].into_iter().flatten() {
            if other.trace == leaf.trace && other.code == leaf.code {
                // u ↦ w with other.labelling[w] = leaf.labelling[u]
                let mut inv = vec![0; leaf.labelling.len()];
                for (w, &l) in other.labelling.iter().enumerate() {
                    inv[l] = w;
                }
                let sigma: Vec<usize> = leaf.labelling.iter().map(|&l| inv[l]).collect();
                if sigma.iter().enumerate().any(|(i, &x)| i != x) {
                    self.automorphisms.push(sigma);
                }
                return;
            }
        }
        let better = match &self.best {
            None => true,
            Some(b) => (&leaf.trace, &leaf.code) < (&b.trace, &b.code),
        };
        if self.first.is_none() {
            self.first = Some(Leaf { trace: leaf.trace.clone(), code: leaf.code.clone(), labelling: leaf.labelling.clone() });
        }
        if better {
            self.best = Some(leaf);
        }
    }

    /// True when the node's trace already exceeds the best leaf's prefix.
    fn dominated(&self, trace: &[u64]) -> bool {
        match &self.best {
            Some(b) => trace > &b.trace[..trace.len().min(b.trace.len())],
            None => false,
        }
    }

    fn search(&mut self, p: Partition, trace: &mut Vec<u64>, fixed: &mut Vec<usize>) {
        if self.dominated(trace) {
            return;
        }
        let Some((_, cell)) = p.target_cell() else {
            self.leaf(&p, trace);
            return;
        };
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit(fixed, &explored, v) {
                continue;
            }
            explored.push(v);
            let mut child = p.individualize(v);
            let t = child.refine(&self.nbrs);
            trace.push(t);
            fixed.push(v);
            self.search(child, trace, fixed);
            fixed.pop();
            trace.pop();
        }
    }

    /// Whether `v` is in the orbit of an explored vertex under the known
    /// automorphisms fixing `fixed` pointwise.
    fn same_orbit(&self, fixed: &[usize], explored: &[usize], v: usize) -> bool {
        let gens: Vec<&Vec<usize>> =
            self.automorphisms.iter().filter(|s| fixed.iter().all(|&f| s[f] == f)).collect();
        if gens.is_empty() {
            return false;
        }
        let n = self.g.order();
        let mut seen = vec![false; n];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(x) = stack.pop() {
            if explored.contains(&x) {
                return true;
            }
            for s in &gens {
                let y = s[x];
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }
}

/// Canonical graph6 string: equal for two graphs exactly when they are
/// isomorphic.
pub fn canonical_form(g: &Graph) -> Vec<u8> {
    canonical_labelling(g).0.into_bytes()
}

/// The canonical string together with a labelling producing it.
pub fn canonical_labelling(g: &Graph) -> (String, Vec<usize>) {
    let nbrs: Vec<Vec<usize>> = (0..g.order()).map(|v| g.neighbors(v)).collect();
    let mut canon = Canon { g, nbrs, first: None, best: None, automorphisms: Vec::new() };
    let mut root = Partition::unit(g.order());
    let mut trace = vec![root.refine(&canon.nbrs)];
    canon.search(root, &mut trace, &mut Vec::new());
    let best = canon.best.expect("search reaches a leaf");
    (best.code, best.labelling)
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.order() == b.order() && a.edge_count() == b.edge_count() && canonical_form(a) == canonical_form(b)
}

/// Hex SHA-256 of the canonical form.
pub fn canonical_hash(g: &Graph) -> String {
    Sha256::digest(canonical_form(g)).iter().map(|b| format!("{b:02x}")).collect()
}
