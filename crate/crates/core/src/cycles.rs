//! Bounded-length simple cycles of a kernel.
//!
//! Every simple cycle of the underlying graph that meets a vertex of degree
//! at least three is a closed walk in the kernel visiting distinct kernel
//! vertices. The search starts at each kernel vertex `s`, only visits
//! vertices larger than `s`, and keeps a cycle only when its first edge has
//! a smaller id than its closing edge, so each unoriented cycle is produced
//! once. Bounded single-source distances prune branches that cannot return
//! to `s` within the cap.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::maps::Kernel;
use crate::{Error, Result};

/// Cycle enumeration stops once this many cycles are found.
pub const DEFAULT_MAX_CYCLES: usize = 1_000_000;

const INF: u32 = u32::MAX;

/// A simple cycle: length in tree edges and number of σ-junctions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CycleRecord {
    pub len: u32,
    pub k: u32,
    /// A single edge whose endpoints lie in the same class.
    #[serde(rename = "loop")]
    pub is_loop: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub cap: u32,
    pub prune: bool,
    pub max_cycles: usize,
}

impl EnumerationOptions {
    pub fn new(cap: u32) -> Self {
        EnumerationOptions {
            cap,
            prune: true,
            max_cycles: DEFAULT_MAX_CYCLES,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleList {
    /// Sorted by length, then junction count.
    pub records: Vec<CycleRecord>,
    pub truncated: bool,
}

impl CycleList {
    pub fn without_loops(&self) -> impl Iterator<Item = &CycleRecord> + '_ {
        self.records.iter().filter(|r| !r.is_loop)
    }

    /// Shortest cycle, ties broken by the smaller junction count.
    pub fn shortest(&self, include_loops: bool) -> Option<CycleRecord> {
        self.records
            .iter()
            .filter(|r| include_loops || !r.is_loop)
            .min()
            .copied()
    }
}

/// A cycle as the list of half-edges it leaves its vertices through.
pub type HalfEdgeCycle = Vec<u32>;

/// All-pairs distances capped at `cap` (larger distances become `INF`).
fn bounded_distances(kernel: &Kernel, cap: u32) -> Vec<u32> {
    let nv = kernel.n_vertices();
    let mut dist = vec![INF; nv * nv];
    let mut heap = BinaryHeap::new();
    for s in 0..nv {
        let row = &mut dist[s * nv..(s + 1) * nv];
        row[s] = 0;
        heap.push(Reverse((0u32, s as u32)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > row[v as usize] {
                continue;
            }
            for &h in kernel.half_edges(v as usize) {
                let e = &kernel.edges()[(h / 2) as usize];
                let w = kernel.half_edge_end(h ^ 1).0 as usize;
                let nd = d.saturating_add(e.weight);
                if nd <= cap && nd < row[w] {
                    row[w] = nd;
                    heap.push(Reverse((nd, w as u32)));
                }
            }
        }
    }
    dist
}

struct Search<'a> {
    kernel: &'a Kernel,
    cap: u32,
    dist: Option<Vec<u32>>,
    visited: Vec<bool>,
    path: Vec<u32>,
    max_cycles: usize,
    truncated: bool,
    keep_edges: bool,
    out: Vec<(CycleRecord, HalfEdgeCycle)>,
}

impl Search<'_> {
    fn push(&mut self, rec: CycleRecord, edges: &[u32]) -> bool {
        if self.out.len() >= self.max_cycles {
            self.truncated = true;
            return false;
        }
        let edges = if self.keep_edges { edges.to_vec() } else { Vec::new() };
        self.out.push((rec, edges));
        true
    }

    fn dist_back(&self, w: usize, s: usize) -> u32 {
        match &self.dist {
            Some(d) => d[w * self.kernel.n_vertices() + s],
            None => 0,
        }
    }

    /// Extends the path at `v`, which was entered at tree vertex `tree_in`.
    fn extend(&mut self, s: usize, v: usize, tree_in: u32, len: u32, k: u32) -> bool {
        let kernel = self.kernel;
        for &h in kernel.half_edges(v) {
            let e = &kernel.edges()[(h / 2) as usize];
            if e.is_loop() {
                continue;
            }
            let (_, tree_out) = kernel.half_edge_end(h);
            let (w, tree_next) = kernel.half_edge_end(h ^ 1);
            let w = w as usize;
            let new_len = len + e.weight;
            if new_len > self.cap {
                continue;
            }
            let here = u32::from(!self.path.is_empty() && tree_in != tree_out);
            let new_k = k + here + e.internal_junctions;
            if w == s {
                let Some(&first) = self.path.first() else {
                    continue;
                };
                if first / 2 >= h / 2 {
                    continue;
                }
                let start_tree = kernel.half_edge_end(first).1;
                let k_total = new_k + u32::from(tree_next != start_tree);
                self.path.push(h);
                let path = std::mem::take(&mut self.path);
                let ok = self.push(
                    CycleRecord {
                        len: new_len,
                        k: k_total,
                        is_loop: false,
                    },
                    &path,
                );
                self.path = path;
                self.path.pop();
                if !ok {
                    return false;
                }
                continue;
            }
            if w < s || self.visited[w] {
                continue;
            }
            if self.dist.is_some() {
                let back = self.dist_back(w, s);
                if back == INF || new_len + back > self.cap {
                    continue;
                }
            }
            self.visited[w] = true;
            self.path.push(h);
            let ok = self.extend(s, w, tree_next, new_len, new_k);
            self.path.pop();
            self.visited[w] = false;
            if !ok {
                return false;
            }
        }
        true
    }
}

fn run(kernel: &Kernel, opts: &EnumerationOptions, keep_edges: bool) -> (Vec<(CycleRecord, HalfEdgeCycle)>, bool) {
    let mut search = Search {
        kernel,
        cap: opts.cap,
        dist: opts.prune.then(|| bounded_distances(kernel, opts.cap)),
        visited: vec![false; kernel.n_vertices()],
        path: Vec::new(),
        max_cycles: opts.max_cycles,
        truncated: false,
        keep_edges,
        out: Vec::new(),
    };
    'outer: {
        for (i, e) in kernel.edges().iter().enumerate() {
            if e.is_loop() && e.weight <= opts.cap {
                let rec = CycleRecord {
                    len: e.weight,
                    k: e.internal_junctions + u32::from(e.tree_ends[0] != e.tree_ends[1]),
                    is_loop: e.weight == 1,
                };
                if !search.push(rec, &[2 * i as u32]) {
                    break 'outer;
                }
            }
        }
        for s in 0..kernel.n_vertices() {
            search.visited[s] = true;
            let ok = search.extend(s, s, u32::MAX, 0, 0);
            search.visited[s] = false;
            if !ok {
                break;
            }
        }
    }
    let mut out = search.out;
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    (out, search.truncated)
}

/// Every simple cycle of length at most `opts.cap`, loops included.
pub fn enumerate_short_cycles(kernel: &Kernel, opts: &EnumerationOptions) -> CycleList {
    let (out, truncated) = run(kernel, opts, false);
    CycleList {
        records: out.into_iter().map(|(r, _)| r).collect(),
        truncated,
    }
}

/// Like [`enumerate_short_cycles`] but also returns each cycle's half-edges.
pub fn enumerate_short_cycles_with_edges(
    kernel: &Kernel,
    opts: &EnumerationOptions,
) -> (Vec<(CycleRecord, HalfEdgeCycle)>, bool) {
    run(kernel, opts, true)
}

/// Junction count of a closed simple walk given by the half-edges it leaves
/// each vertex through.
pub fn junction_count(cycle: &[u32], kernel: &Kernel) -> Result<u32> {
    if cycle.is_empty() {
        return Err(Error::invalid("empty edge sequence"));
    }
    let m = kernel.n_edges() as u32;
    if cycle.iter().any(|&h| h / 2 >= m) {
        return Err(Error::invalid("half-edge out of range"));
    }
    let mut seen_v = vec![false; kernel.n_vertices()];
    let mut seen_e = vec![false; kernel.n_edges()];
    let mut k = 0;
    for (i, &h) in cycle.iter().enumerate() {
        let e = (h / 2) as usize;
        let (v, _) = kernel.half_edge_end(h);
        if seen_e[e] || seen_v[v as usize] {
            return Err(Error::invalid("edge sequence is not simple"));
        }
        seen_e[e] = true;
        seen_v[v as usize] = true;
        let next = cycle[(i + 1) % cycle.len()];
        let (w, tree_in) = kernel.half_edge_end(h ^ 1);
        let (w2, tree_out) = kernel.half_edge_end(next);
        if w != w2 {
            return Err(Error::invalid("edge sequence is not closed"));
        }
        k += kernel.edges()[e].internal_junctions + u32::from(tree_in != tree_out);
    }
    Ok(k)
}

/// Shortest cycle with its junction count (smallest `k` among ties),
/// doubling the search cap from `start_cap` until one is found.
pub fn shortest_cycle(kernel: &Kernel, start_cap: u32, include_loops: bool) -> Option<CycleRecord> {
    let total = kernel.total_weight().min(u32::MAX as u64) as u32;
    if total == 0 {
        return None;
    }
    let mut cap = start_cap.max(1);
    loop {
        let list = enumerate_short_cycles(kernel, &EnumerationOptions::new(cap.min(total)));
        if let Some(r) = list.shortest(include_loops) {
            return Some(r);
        }
        if cap >= total {
            return None;
        }
        cap = cap.saturating_mul(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cperm::{CPermSampler, CPermutation};
    use crate::maps::{build_underlying_graph, kernelize, CDecoratedTree};
    use crate::rng::stream_from_seed;
    use crate::trees::PlaneTree;

    fn kernel_of(dyck: &str, cycles: &[Vec<u32>]) -> Kernel {
        let tree = PlaneTree::from_dyck(dyck).unwrap();
        let sigma = CPermutation::from_cycles(tree.n_vertices(), cycles).unwrap();
        Kernel::from_decorated_tree(&CDecoratedTree::new(tree, sigma).unwrap())
    }

    #[test]
    fn empty_kernel_has_no_cycles() {
        let k = kernel_of("(())", &[]);
        let list = enumerate_short_cycles(&k, &EnumerationOptions::new(10));
        assert!(list.records.is_empty() && !list.truncated);
        assert_eq!(shortest_cycle(&k, 4, true), None);
    }

    #[test]
    fn double_loop_has_only_loops() {
        let k = kernel_of("()()", &[vec![0, 1, 2]]);
        let list = enumerate_short_cycles(&k, &EnumerationOptions::new(10));
        let loop_rec = CycleRecord { len: 1, k: 1, is_loop: true };
        assert_eq!(list.records, vec![loop_rec, loop_rec]);
        assert_eq!(list.shortest(false), None);
    }

    #[test]
    fn parallel_edges_through_one_tree_vertex() {
        // Star centre 0, leaves 1..=3 in one class: three parallel edges of
        // weight one between {0} and {1,2,3}. Each 2-cycle is a single tree
        // path between two leaves, so k = 1.
        let k = kernel_of("()()()", &[vec![1, 2, 3]]);
        let list = enumerate_short_cycles(&k, &EnumerationOptions::new(5));
        assert_eq!(list.records, vec![CycleRecord { len: 2, k: 1, is_loop: false }; 3]);
    }

    #[test]
    fn junctions_of_hand_cycle() {
        // Path 0-1-2-3 with classes {0,2,x}: here σ = (0 2 3) on the path.
        let k = kernel_of("((()))", &[vec![0, 2, 3]]);
        let (cycles, _) = enumerate_short_cycles_with_edges(&k, &EnumerationOptions::new(10));
        assert!(!cycles.is_empty());
        for (rec, edges) in &cycles {
            assert_eq!(junction_count(edges, &k).unwrap(), rec.k);
            assert!(1 <= rec.k && rec.k <= rec.len);
        }
        assert!(junction_count(&[], &k).is_err());
    }

    #[test]
    fn junction_count_rejects_open_walks() {
        let k = kernel_of("()()()()", &[vec![1, 2, 3]]);
        let e0 = 0u32;
        assert!(junction_count(&[2 * e0], &k).is_err());
        assert!(junction_count(&[0, 0], &k).is_err());
    }

    #[test]
    fn pruning_and_caps_are_consistent() {
        let mut rng = stream_from_seed(3);
        for (n, g) in [(30, 3), (60, 6), (200, 8)] {
            let sampler = CPermSampler::auto(n + 1, g).unwrap();
            for _ in 0..50 {
                let dt = CDecoratedTree::sample(&sampler, &mut rng).unwrap();
                let k = Kernel::from_decorated_tree(&dt);
                let cap = (n / 3) as u32;
                let mut pruned = EnumerationOptions::new(cap);
                let full = enumerate_short_cycles(&k, &pruned);
                pruned.prune = false;
                assert_eq!(full, enumerate_short_cycles(&k, &pruned));
                let half = enumerate_short_cycles(&k, &EnumerationOptions::new(cap / 2));
                let expect: Vec<_> = full.records.iter().copied().filter(|r| r.len <= cap / 2).collect();
                assert_eq!(half.records, expect);
                for r in &full.records {
                    assert!(1 <= r.k && r.k <= r.len && r.len <= cap);
                }
                let via_graph = kernelize(&build_underlying_graph(&dt.tree, &dt.sigma).unwrap());
                assert_eq!(enumerate_short_cycles(&via_graph, &EnumerationOptions::new(cap)), full);
            }
        }
    }

    #[test]
    fn truncation_guard() {
        let k = kernel_of("()()()()()()()", &[vec![1, 2, 3], vec![4, 5, 6]]);
        let mut opts = EnumerationOptions::new(100);
        let all = enumerate_short_cycles(&k, &opts);
        assert!(!all.truncated && all.records.len() > 3);
        opts.max_cycles = 3;
        let cut = enumerate_short_cycles(&k, &opts);
        assert!(cut.truncated);
        assert_eq!(cut.records.len(), 3);
    }

    #[test]
    fn shortest_cycle_grows_the_cap() {
        let k = kernel_of("((((()))))", &[vec![0, 3, 5]]);
        let s = shortest_cycle(&k, 1, false).unwrap();
        let all = enumerate_short_cycles(&k, &EnumerationOptions::new(100));
        assert_eq!(Some(s), all.shortest(false));
    }

    #[test]
    fn record_json_shape() {
        let r = CycleRecord { len: 3, k: 2, is_loop: false };
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"len":3,"k":2,"loop":false}"#);
    }
}
