//! Decorated trees, their underlying multigraphs and kernels.
//!
//! Tree vertices carry their depth-first labels `0..=n`. The underlying
//! graph has one vertex per cycle of `σ` (identified by its smallest tree
//! vertex) and one edge per tree edge. The kernel is the 2-core of that graph
//! with every vertex of degree two suppressed; its edges remember their
//! length in tree edges and how many times the suppressed path switches tree
//! vertex inside a class.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cperm::{CPermSampler, CPermutation};
use crate::trees::{sample_plane_tree, PlaneTree};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// A plane tree together with a C-permutation of its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CDecoratedTree {
    pub tree: PlaneTree,
    pub sigma: CPermutation,
}

impl CDecoratedTree {
    pub fn new(tree: PlaneTree, sigma: CPermutation) -> Result<Self> {
        if sigma.n() != tree.n_vertices() {
            return Err(Error::SizeMismatch(format!(
                "permutation on {} elements for a tree with {} vertices",
                sigma.n(),
                tree.n_vertices()
            )));
        }
        Ok(CDecoratedTree { tree, sigma })
    }

    /// Samples a uniform tree with `sampler.n() - 1` edges and a uniform σ.
    pub fn sample<R: Rng + ?Sized>(sampler: &CPermSampler, rng: &mut R) -> Result<Self> {
        let n = sampler
            .n()
            .checked_sub(1)
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::invalid("a decorated tree needs at least one edge"))?;
        let tree = sample_plane_tree(n, rng)?;
        let sigma = sampler.sample(rng);
        Ok(CDecoratedTree { tree, sigma })
    }

    pub fn n_edges(&self) -> usize {
        self.tree.n_edges()
    }

    pub fn genus(&self) -> usize {
        self.sigma.genus()
    }
}

/// One edge of the underlying graph with the tree vertices it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub u: u32,
    pub v: u32,
    pub tree_u: u32,
    pub tree_v: u32,
}

impl GraphEdge {
    fn end(&self, side: usize) -> (u32, u32) {
        if side == 0 {
            (self.u, self.tree_u)
        } else {
            (self.v, self.tree_v)
        }
    }
}

/// Underlying multigraph; vertex `i` is the σ-class whose smallest tree
/// vertex is `reps[i]`. Half-edge `2e + s` is side `s` of edge `e`.
#[derive(Clone, Debug)]
pub struct UnderlyingGraph {
    reps: Vec<u32>,
    class_of: Vec<u32>,
    edges: Vec<GraphEdge>,
    adj_start: Vec<u32>,
    adj: Vec<u32>,
}

fn csr(n_vertices: usize, ends: impl Iterator<Item = (u32, u32)> + Clone) -> (Vec<u32>, Vec<u32>) {
    let mut start = vec![0u32; n_vertices + 1];
    for (v, _) in ends.clone() {
        start[v as usize + 1] += 1;
    }
    for i in 0..n_vertices {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut adj = vec![0u32; start[n_vertices] as usize];
    for (v, h) in ends {
        adj[fill[v as usize] as usize] = h;
        fill[v as usize] += 1;
    }
    (start, adj)
}

impl UnderlyingGraph {
    pub fn n_vertices(&self) -> usize {
        self.reps.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    /// Graph vertex of each tree vertex.
    pub fn class_of(&self) -> &[u32] {
        &self.class_of
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Half-edges incident to `v`; a loop contributes both of its halves.
    pub fn half_edges(&self, v: usize) -> &[u32] {
        &self.adj[self.adj_start[v] as usize..self.adj_start[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.half_edges(v).len()
    }

    /// `(graph vertex, tree vertex)` at half-edge `h`.
    pub fn half_edge_end(&self, h: u32) -> (u32, u32) {
        self.edges[(h / 2) as usize].end((h % 2) as usize)
    }

    pub fn cyclomatic_number(&self) -> usize {
        self.n_edges() + 1 - self.n_vertices()
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices() == 0 {
            return true;
        }
        let mut seen = vec![false; self.n_vertices()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &h in self.half_edges(v) {
                let w = self.half_edge_end(h ^ 1).0 as usize;
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n_vertices()
    }

    /// Graph dump: vertex count and `[u, v, tree_u, tree_v]` per edge.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.n_vertices(),
            "edges": self.edges.iter().map(|e| [e.u, e.v, e.tree_u, e.tree_v]).collect::<Vec<_>>(),
        })
    }
}

/// Merges the vertices of each σ-cycle; edge `i` is the tree edge from
/// vertex `i + 1` to its parent, with `tree_u` the parent.
pub fn build_underlying_graph(tree: &PlaneTree, sigma: &CPermutation) -> Result<UnderlyingGraph> {
    if sigma.n() != tree.n_vertices() {
        return Err(Error::SizeMismatch(format!(
            "permutation on {} elements for a tree with {} vertices",
            sigma.n(),
            tree.n_vertices()
        )));
    }
    let labels = sigma.class_labels();
    let mut class_of = vec![NONE; labels.len()];
    let mut reps = Vec::new();
    for v in 0..labels.len() {
        if labels[v] as usize == v {
            class_of[v] = reps.len() as u32;
            reps.push(v as u32);
        }
    }
    for v in 0..labels.len() {
        class_of[v] = class_of[labels[v] as usize];
    }
    let edges: Vec<GraphEdge> = (1..tree.n_vertices())
        .map(|c| {
            let p = tree.parent(c).expect("non-root vertex") as u32;
            GraphEdge {
                u: class_of[p as usize],
                v: class_of[c],
                tree_u: p,
                tree_v: c as u32,
            }
        })
        .collect();
    let (adj_start, adj) = csr(
        reps.len(),
        edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| [(e.u, 2 * i as u32), (e.v, 2 * i as u32 + 1)]),
    );
    Ok(UnderlyingGraph {
        reps,
        class_of,
        edges,
        adj_start,
        adj,
    })
}

/// A suppressed path of the 2-core between two kernel vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelEdge {
    /// Kernel vertex indices at either end.
    pub ends: [u32; 2],
    /// Tree vertices where the path attaches at either end.
    pub tree_ends: [u32; 2],
    /// Number of tree edges on the path.
    pub weight: u32,
    /// Class switches at suppressed degree-two vertices.
    pub internal_junctions: u32,
}

impl KernelEdge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }
}

/// Weighted kernel; vertex `i` is identified by the smallest tree vertex
/// `reps[i]` of its class, and `reps` is increasing.
#[derive(Clone, Debug, Default)]
pub struct Kernel {
    reps: Vec<u32>,
    edges: Vec<KernelEdge>,
    adj_start: Vec<u32>,
    adj: Vec<u32>,
}

/// Sorted, orientation-free description of a kernel used for comparisons.
pub type CanonicalEdge = (u32, u32, u32, u32, u32, u32);

impl Kernel {
    fn assemble(reps: Vec<u32>, edges: Vec<KernelEdge>) -> Self {
        let (adj_start, adj) = csr(
            reps.len(),
            edges.iter().enumerate().flat_map(|(i, e)| {
                [(e.ends[0], 2 * i as u32), (e.ends[1], 2 * i as u32 + 1)]
            }),
        );
        Kernel {
            reps,
            edges,
            adj_start,
            adj,
        }
    }

    /// Builds the kernel straight from a decorated tree without materializing
    /// the underlying graph.
    ///
    /// Every class of size at least three is a kernel vertex, so the 2-core is
    /// the union of the tree paths between moved vertices: the tree edge above
    /// `v` survives iff the subtree of `v` holds some but not all of them.
    /// Unmoved vertices are never merged, so no suppressed vertex can carry an
    /// internal junction.
    pub fn from_decorated_tree(dt: &CDecoratedTree) -> Self {
        let tree = &dt.tree;
        let nv = tree.n_vertices();
        let total = dt.sigma.support_size() as u32;
        if total == 0 {
            return Kernel::assemble(Vec::new(), Vec::new());
        }
        let mut label = vec![NONE; nv];
        for c in dt.sigma.nontrivial_cycles() {
            for &x in c {
                label[x as usize] = c[0];
            }
        }
        let parents = tree.parents();
        let mut below = vec![0u32; nv];
        for v in (0..nv).rev() {
            if label[v] != NONE {
                below[v] += 1;
            }
            if v > 0 {
                below[parents[v] as usize] += below[v];
            }
        }
        let up_kept = |v: usize| v > 0 && below[v] > 0 && below[v] < total;
        let mut sdeg = vec![0u8; nv];
        for v in 1..nv {
            if up_kept(v) {
                sdeg[v] = sdeg[v].saturating_add(1);
                let p = parents[v] as usize;
                sdeg[p] = sdeg[p].saturating_add(1);
            }
        }
        let is_kernel = |v: usize| label[v] != NONE || sdeg[v] >= 3;

        let mut kid = vec![NONE; nv];
        let mut reps = Vec::new();
        for v in 0..nv {
            if (label[v] != NONE && label[v] as usize == v) || (label[v] == NONE && sdeg[v] >= 3) {
                kid[v] = reps.len() as u32;
                reps.push(v as u32);
            }
        }
        for v in 0..nv {
            if label[v] != NONE {
                kid[v] = kid[label[v] as usize];
            }
        }

        let kept_neighbors = |v: usize| {
            let up = up_kept(v).then(|| parents[v] as usize);
            up.into_iter().chain(
                tree.children(v)
                    .iter()
                    .map(|&c| c as usize)
                    .filter(move |&c| up_kept(c)),
            )
        };

        let mut edges = Vec::new();
        for a in 0..nv {
            if !is_kernel(a) {
                continue;
            }
            for first in kept_neighbors(a) {
                let (mut prev, mut cur, mut weight) = (a, first, 1u32);
                while !is_kernel(cur) {
                    let next = kept_neighbors(cur)
                        .find(|&w| w != prev)
                        .expect("suppressed vertex has two kept neighbours");
                    prev = cur;
                    cur = next;
                    weight += 1;
                }
                if a < cur {
                    edges.push(KernelEdge {
                        ends: [kid[a], kid[cur]],
                        tree_ends: [a as u32, cur as u32],
                        weight,
                        internal_junctions: 0,
                    });
                }
            }
        }
        Kernel::assemble(reps, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.reps.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    pub fn edges(&self) -> &[KernelEdge] {
        &self.edges
    }

    pub fn half_edges(&self, v: usize) -> &[u32] {
        &self.adj[self.adj_start[v] as usize..self.adj_start[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.half_edges(v).len()
    }

    /// `(kernel vertex, tree vertex)` at half-edge `h`.
    pub fn half_edge_end(&self, h: u32) -> (u32, u32) {
        let e = &self.edges[(h / 2) as usize];
        let s = (h % 2) as usize;
        (e.ends[s], e.tree_ends[s])
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight as u64).sum()
    }

    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.n_vertices()];
        let mut count = 0;
        for s in 0..self.n_vertices() {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &h in self.half_edges(v) {
                    let w = self.half_edge_end(h ^ 1).0 as usize;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Edges described by representatives rather than indices, each oriented
    /// so that `(rep, tree end)` is smaller at the first end, then sorted.
    pub fn canonical_edges(&self) -> Vec<CanonicalEdge> {
        let mut out: Vec<CanonicalEdge> = self
            .edges
            .iter()
            .map(|e| {
                let a = (self.reps[e.ends[0] as usize], e.tree_ends[0]);
                let b = (self.reps[e.ends[1] as usize], e.tree_ends[1]);
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                (a.0, b.0, a.1, b.1, e.weight, e.internal_junctions)
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Kernel dump: graph format plus weight and internal junctions per edge.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.n_vertices(),
            "reps": self.reps,
            "edges": self.edges.iter().map(|e| {
                serde_json::json!([e.ends[0], e.ends[1], e.tree_ends[0], e.tree_ends[1], e.weight, e.internal_junctions])
            }).collect::<Vec<_>>(),
        })
    }
}

/// Prunes degree-one vertices, then suppresses the degree-two ones.
///
/// A component of the 2-core that is a bare cycle keeps its smallest vertex,
/// which then carries a single loop.
pub fn kernelize(g: &UnderlyingGraph) -> Kernel {
    let nv = g.n_vertices();
    let mut deg: Vec<u32> = (0..nv).map(|v| g.degree(v) as u32).collect();
    let mut alive = vec![true; g.n_edges()];
    let mut queue: VecDeque<usize> = (0..nv).filter(|&v| deg[v] == 1).collect();
    while let Some(v) = queue.pop_front() {
        if deg[v] != 1 {
            continue;
        }
        let h = *g
            .half_edges(v)
            .iter()
            .find(|&&h| alive[(h / 2) as usize])
            .expect("degree-one vertex keeps one edge");
        alive[(h / 2) as usize] = false;
        deg[v] = 0;
        let w = g.half_edge_end(h ^ 1).0 as usize;
        deg[w] -= 1;
        if deg[w] == 1 {
            queue.push_back(w);
        }
    }

    let mut is_kernel: Vec<bool> = deg.iter().map(|&d| d >= 3).collect();
    let mut used = vec![false; g.n_edges()];
    let mut chains: Vec<(u32, u32, KernelEdge)> = Vec::new();

    let trace = |start: usize,
                 is_kernel: &[bool],
                 used: &mut [bool],
                 chains: &mut Vec<(u32, u32, KernelEdge)>| {
        for &h0 in g.half_edges(start) {
            if !alive[(h0 / 2) as usize] {
                continue;
            }
            let mut h = h0;
            let mut weight = 1u32;
            let mut junctions = 0u32;
            loop {
                used[(h / 2) as usize] = true;
                let (w, tw) = g.half_edge_end(h ^ 1);
                if is_kernel[w as usize] {
                    if h0 < (h ^ 1) {
                        chains.push((
                            h0,
                            h ^ 1,
                            KernelEdge {
                                ends: [start as u32, w],
                                tree_ends: [g.half_edge_end(h0).1, tw],
                                weight,
                                internal_junctions: junctions,
                            },
                        ));
                    }
                    break;
                }
                let next = *g
                    .half_edges(w as usize)
                    .iter()
                    .find(|&&x| x != (h ^ 1) && alive[(x / 2) as usize])
                    .expect("suppressed vertex keeps two edges");
                if g.half_edge_end(next).1 != tw {
                    junctions += 1;
                }
                h = next;
                weight += 1;
            }
        }
    };

    for v in 0..nv {
        if is_kernel[v] {
            trace(v, &is_kernel, &mut used, &mut chains);
        }
    }
    for v in 0..nv {
        if deg[v] == 2
            && !is_kernel[v]
            && g.half_edges(v).iter().any(|&h| alive[(h / 2) as usize] && !used[(h / 2) as usize])
        {
            is_kernel[v] = true;
            trace(v, &is_kernel, &mut used, &mut chains);
        }
    }

    let mut kid = vec![NONE; nv];
    let mut reps = Vec::new();
    for v in 0..nv {
        if is_kernel[v] {
            kid[v] = reps.len() as u32;
            reps.push(g.reps()[v]);
        }
    }
    let edges = chains
        .into_iter()
        .map(|(_, _, mut e)| {
            e.ends = [kid[e.ends[0] as usize], kid[e.ends[1] as usize]];
            e
        })
        .collect();
    Kernel::assemble(reps, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiameterMode {
    Exact,
    DoubleSweep,
}

/// Largest graph on which the all-sources diameter is attempted.
pub const EXACT_DIAMETER_LIMIT: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Diameter {
    pub value: u32,
    /// True when `value` is the diameter, false when it is only a lower bound.
    pub exact: bool,
}

fn bfs(g: &UnderlyingGraph, src: usize, dist: &mut [u32]) -> (usize, u32) {
    dist.fill(NONE);
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    let mut far = (src, 0);
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        if d > far.1 {
            far = (v, d);
        }
        for &h in g.half_edges(v) {
            let w = g.half_edge_end(h ^ 1).0 as usize;
            if dist[w] == NONE {
                dist[w] = d + 1;
                queue.push_back(w);
            }
        }
    }
    far
}

/// Graph diameter, exactly or as the double-sweep lower bound.
pub fn diameter_estimate(g: &UnderlyingGraph, mode: DiameterMode) -> Result<Diameter> {
    let nv = g.n_vertices();
    if nv == 0 {
        return Ok(Diameter { value: 0, exact: true });
    }
    let mut dist = vec![NONE; nv];
    match mode {
        DiameterMode::Exact => {
            if g.n_edges() > EXACT_DIAMETER_LIMIT {
                return Err(Error::GuardExceeded {
                    what: "exact diameter graph size",
                    limit: EXACT_DIAMETER_LIMIT,
                    got: g.n_edges(),
                });
            }
            let value = (0..nv).map(|s| bfs(g, s, &mut dist).1).max().unwrap_or(0);
            Ok(Diameter { value, exact: true })
        }
        DiameterMode::DoubleSweep => {
            let (far, _) = bfs(g, 0, &mut dist);
            let (_, value) = bfs(g, far, &mut dist);
            Ok(Diameter { value, exact: false })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_from_seed;

    fn double_loop() -> CDecoratedTree {
        let tree = PlaneTree::from_dyck("()()").unwrap();
        let sigma = CPermutation::from_cycles(3, &[vec![0u32, 1, 2]]).unwrap();
        CDecoratedTree::new(tree, sigma).unwrap()
    }

    #[test]
    fn identity_gives_the_tree() {
        let tree = PlaneTree::from_dyck("(()(()))").unwrap();
        let g = build_underlying_graph(&tree, &CPermutation::identity(5)).unwrap();
        assert_eq!(g.n_vertices(), 5);
        assert_eq!(g.n_edges(), 4);
        assert_eq!(g.cyclomatic_number(), 0);
        assert!(g.is_connected());
        assert!(kernelize(&g).is_empty());
        let dt = CDecoratedTree::new(tree, CPermutation::identity(5)).unwrap();
        assert!(Kernel::from_decorated_tree(&dt).is_empty());
    }

    #[test]
    fn size_mismatch_rejected() {
        let tree = PlaneTree::from_dyck("()").unwrap();
        assert!(build_underlying_graph(&tree, &CPermutation::identity(3)).is_err());
        assert!(CDecoratedTree::new(tree, CPermutation::identity(3)).is_err());
    }

    #[test]
    fn double_loop_instance() {
        let dt = double_loop();
        let g = build_underlying_graph(&dt.tree, &dt.sigma).unwrap();
        assert_eq!(g.n_vertices(), 1);
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.cyclomatic_number(), 2);
        for k in [kernelize(&g), Kernel::from_decorated_tree(&dt)] {
            assert_eq!(k.n_vertices(), 1);
            assert_eq!(k.n_edges(), 2);
            assert!(k.edges().iter().all(|e| e.is_loop() && e.weight == 1));
            assert_eq!(k.degree(0), 4);
        }
        assert_eq!(
            diameter_estimate(&g, DiameterMode::Exact).unwrap(),
            Diameter { value: 0, exact: true }
        );
    }

    #[test]
    fn path_diameter() {
        let tree = PlaneTree::from_dyck("((((()))))").unwrap();
        let g = build_underlying_graph(&tree, &CPermutation::identity(6)).unwrap();
        assert_eq!(diameter_estimate(&g, DiameterMode::Exact).unwrap().value, 5);
        assert_eq!(diameter_estimate(&g, DiameterMode::DoubleSweep).unwrap().value, 5);
    }

    #[test]
    fn class_with_loop_on_a_path() {
        let tree = PlaneTree::from_dyck("((()))").unwrap();
        let sigma = CPermutation::from_cycles(4, &[vec![1u32, 3, 0]]).unwrap();
        let g = build_underlying_graph(&tree, &sigma).unwrap();
        let k = kernelize(&g);
        assert_eq!(k.n_vertices(), 1);
        let mut weights: Vec<u32> = k.edges().iter().map(|e| e.weight).collect();
        weights.sort_unstable();
        assert_eq!(weights, [1, 2]);
        let dt = CDecoratedTree::new(tree, sigma).unwrap();
        assert_eq!(k.canonical_edges(), Kernel::from_decorated_tree(&dt).canonical_edges());
    }

    #[test]
    fn bare_cycle_core_keeps_one_vertex() {
        // Triangle 0-1-2 with a pendant vertex 3 at 2.
        let edges = vec![
            GraphEdge { u: 1, v: 0, tree_u: 1, tree_v: 0 },
            GraphEdge { u: 1, v: 2, tree_u: 1, tree_v: 2 },
            GraphEdge { u: 2, v: 0, tree_u: 5, tree_v: 4 },
            GraphEdge { u: 2, v: 3, tree_u: 2, tree_v: 3 },
        ];
        let (adj_start, adj) = csr(
            4,
            edges
                .iter()
                .enumerate()
                .flat_map(|(i, e)| [(e.u, 2 * i as u32), (e.v, 2 * i as u32 + 1)]),
        );
        let g = UnderlyingGraph {
            reps: vec![0, 1, 2, 3],
            class_of: vec![0, 1, 2, 3, 0, 2],
            edges,
            adj_start,
            adj,
        };
        let k = kernelize(&g);
        assert_eq!(k.reps(), &[0]);
        assert_eq!(k.n_edges(), 1);
        let e = k.edges()[0];
        assert!(e.is_loop());
        assert_eq!(e.weight, 3);
        // Vertex 2 is entered at tree vertex 2 and left at tree vertex 5.
        assert_eq!(e.internal_junctions, 1);
    }

    #[test]
    fn fast_kernel_matches_general_kernel() {
        let mut rng = stream_from_seed(77);
        for (n, g) in [(8, 1), (20, 2), (40, 5), (120, 4), (400, 10)] {
            let sampler = CPermSampler::auto(n + 1, g).unwrap();
            for _ in 0..200 {
                let dt = CDecoratedTree::sample(&sampler, &mut rng).unwrap();
                let graph = build_underlying_graph(&dt.tree, &dt.sigma).unwrap();
                assert_eq!(graph.n_vertices(), n + 1 - 2 * g);
                assert_eq!(graph.cyclomatic_number(), 2 * g);
                assert!(graph.is_connected());
                let slow = kernelize(&graph);
                let fast = Kernel::from_decorated_tree(&dt);
                assert_eq!(slow.reps(), fast.reps());
                assert_eq!(slow.canonical_edges(), fast.canonical_edges());
                assert_eq!(fast.n_edges() + 1, fast.n_vertices() + 2 * g);
                assert_eq!(fast.components(), 1);
                assert!((0..fast.n_vertices()).all(|v| fast.degree(v) >= 3));
            }
        }
    }

    #[test]
    fn internal_junctions_on_merged_leaves() {
        // Star with centre 0 and leaves 1..=4; σ = (1 2 3) makes a class of
        // three leaves, giving two parallel pairs through 0.
        let tree = PlaneTree::from_dyck("()()()()").unwrap();
        let sigma = CPermutation::from_cycles(5, &[vec![1u32, 2, 3]]).unwrap();
        let g = build_underlying_graph(&tree, &sigma).unwrap();
        let k = kernelize(&g);
        assert_eq!(k.n_vertices(), 2);
        assert_eq!(k.n_edges(), 3);
        assert!(k.edges().iter().all(|e| e.internal_junctions == 0 && e.weight == 1));
    }

    #[test]
    fn json_dumps() {
        let dt = double_loop();
        let g = build_underlying_graph(&dt.tree, &dt.sigma).unwrap();
        let j = g.to_json();
        assert_eq!(j["vertices"], 1);
        assert_eq!(j["edges"][0], serde_json::json!([0, 0, 0, 1]));
        let k = Kernel::from_decorated_tree(&dt).to_json();
        assert_eq!(k["edges"].as_array().unwrap().len(), 2);
    }
}
