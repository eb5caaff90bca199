//! Exhaustive enumerations on small instances, used as ground truth.
//!
//! Everything here is deliberately naive: trees come from all balanced
//! words, permutations from all of `S_n`, cycles from an unpruned search on
//! the full multigraph with canonical-form deduplication. Each entry point
//! has a hard size guard.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::combin::binomial;
use crate::cperm::CPermutation;
use crate::cycles::CycleRecord;
use crate::maps::{build_underlying_graph, UnderlyingGraph};
use crate::trees::PlaneTree;
use crate::{Error, Result};

pub const MAX_TREE_EDGES: usize = 12;
pub const MAX_PERM_SIZE: usize = 9;
pub const MAX_GRAPH_EDGES: usize = 200;
pub const MAX_MAP_EDGES: usize = 7;
pub const MAX_PAIR_TREE_EDGES: usize = 8;
pub const MAX_PAIR_PATH_LEN: usize = 4;
pub const MAX_WALK_LEN: usize = 30;

fn guard(what: &'static str, limit: usize, got: usize) -> Result<()> {
    if got > limit {
        return Err(Error::GuardExceeded { what, limit, got });
    }
    Ok(())
}

/// A law with exact rational probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution<K: Ord> {
    pub probs: BTreeMap<K, BigRational>,
}

impl<K: Ord> ExactDistribution<K> {
    pub fn total(&self) -> BigRational {
        self.probs.values().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn support(&self) -> impl Iterator<Item = &K> + '_ {
        self.probs.keys()
    }

    /// Probabilities as floats, in key order.
    pub fn float_probs(&self) -> Vec<f64> {
        self.probs.values().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Every plane tree with `n` edges, in lexicographic order of their words.
pub fn enumerate_plane_trees(n: usize) -> Result<Vec<PlaneTree>> {
    guard("oracle tree size", MAX_TREE_EDGES, n)?;
    fn rec(open: usize, close: usize, n: usize, word: &mut Vec<bool>, out: &mut Vec<PlaneTree>) {
        if word.len() == 2 * n {
            out.push(PlaneTree::from_word(word.clone()).expect("balanced word"));
            return;
        }
        if open < n {
            word.push(true);
            rec(open + 1, close, n, word, out);
            word.pop();
        }
        if close < open {
            word.push(false);
            rec(open, close + 1, n, word, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, 0, n, &mut Vec::with_capacity(2 * n), &mut out);
    Ok(out)
}

fn cycles_of(images: &[u32]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; images.len()];
    let mut out = Vec::new();
    for s in 0..images.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x as u32);
            x = images[x] as usize;
        }
        out.push(c);
    }
    out
}

/// Visits every permutation of `0..n` in lexicographic order.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[u32])) {
    let mut p: Vec<u32> = (0..n as u32).collect();
    loop {
        f(&p);
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Every permutation of `n` elements with only odd cycles and `n - 2g` of
/// them, found by scanning all of `S_n`.
pub fn enumerate_cperms(n: usize, g: usize) -> Result<Vec<CPermutation>> {
    guard("oracle permutation size", MAX_PERM_SIZE, n)?;
    let mut out = Vec::new();
    for_each_permutation(n, |p| {
        let cycles = cycles_of(p);
        if cycles.len() + 2 * g == n && cycles.iter().all(|c| c.len() % 2 == 1) {
            out.push(CPermutation::from_cycles(n, &cycles).expect("valid cycles"));
        }
    });
    Ok(out)
}

/// Counts of odd-cycle permutations of `n` elements by genus.
pub fn cperm_counts_by_genus(n: usize) -> Result<Vec<u64>> {
    guard("oracle permutation size", MAX_PERM_SIZE, n)?;
    let mut counts = vec![0u64; n / 2 + 1];
    for_each_permutation(n, |p| {
        let cycles = cycles_of(p);
        if cycles.iter().all(|c| c.len() % 2 == 1) {
            counts[(n - cycles.len()) / 2] += 1;
        }
    });
    Ok(counts)
}

/// Lexicographically least rotation or reflection of a cyclic sequence.
fn canonical_cyclic(seq: &[u32]) -> Vec<u32> {
    let len = seq.len();
    let mut best: Option<Vec<u32>> = None;
    let rev: Vec<u32> = seq.iter().rev().copied().collect();
    for s in [seq, &rev[..]] {
        for r in 0..len {
            let cand: Vec<u32> = s[r..].iter().chain(&s[..r]).copied().collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// Simple cycles of length at most `cap` by plain search on the full graph.
///
/// `k` is the number of visited classes where the cycle enters and leaves
/// through different tree vertices.
pub fn naive_cycle_enumeration(g: &UnderlyingGraph, cap: usize) -> Result<Vec<CycleRecord>> {
    guard("oracle graph edges", MAX_GRAPH_EDGES, g.n_edges())?;
    let mut out = Vec::new();
    for e in g.edges() {
        if e.u == e.v && cap >= 1 {
            out.push(CycleRecord {
                len: 1,
                k: u32::from(e.tree_u != e.tree_v),
                is_loop: true,
            });
        }
    }
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut visited = vec![false; g.n_vertices()];
    let mut path: Vec<u32> = Vec::new();

    fn junctions(g: &UnderlyingGraph, path: &[u32]) -> u32 {
        let len = path.len();
        (0..len)
            .filter(|&i| {
                let tree_in = g.half_edge_end(path[i] ^ 1).1;
                let tree_out = g.half_edge_end(path[(i + 1) % len]).1;
                tree_in != tree_out
            })
            .count() as u32
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        g: &UnderlyingGraph,
        s: usize,
        v: usize,
        cap: usize,
        visited: &mut [bool],
        path: &mut Vec<u32>,
        seen: &mut HashSet<Vec<u32>>,
        out: &mut Vec<CycleRecord>,
    ) {
        for &h in g.half_edges(v) {
            let e = &g.edges()[(h / 2) as usize];
            if e.u == e.v {
                continue;
            }
            let w = g.half_edge_end(h ^ 1).0 as usize;
            if w == s && !path.is_empty() && path[0] / 2 != h / 2 {
                path.push(h);
                let ids: Vec<u32> = path.iter().map(|x| x / 2).collect();
                if seen.insert(canonical_cyclic(&ids)) {
                    out.push(CycleRecord {
                        len: path.len() as u32,
                        k: junctions(g, path),
                        is_loop: false,
                    });
                }
                path.pop();
                continue;
            }
            if visited[w] || path.len() + 1 >= cap {
                continue;
            }
            visited[w] = true;
            path.push(h);
            dfs(g, s, w, cap, visited, path, seen, out);
            path.pop();
            visited[w] = false;
        }
    }

    for s in 0..g.n_vertices() {
        visited[s] = true;
        dfs(g, s, s, cap, &mut visited, &mut path, &mut seen, &mut out);
        visited[s] = false;
    }
    out.sort_unstable();
    Ok(out)
}

/// Sorted list of all cycles (loops included) of a graph: its profile.
pub type Profile = Vec<CycleRecord>;

/// Exact law of the cycle profile of the underlying graph of a uniform
/// (tree, σ) pair with `n` edges and genus `g`.
pub fn exact_map_statistics(n: usize, g: usize) -> Result<ExactDistribution<Profile>> {
    guard("oracle map size", MAX_MAP_EDGES, n)?;
    let trees = enumerate_plane_trees(n)?;
    let perms = enumerate_cperms(n + 1, g)?;
    if perms.is_empty() {
        return Err(Error::Infeasible { n, g });
    }
    let mut counts: BTreeMap<Profile, u64> = BTreeMap::new();
    for t in &trees {
        for s in &perms {
            let graph = build_underlying_graph(t, s)?;
            *counts.entry(naive_cycle_enumeration(&graph, n)?).or_insert(0) += 1;
        }
    }
    let total = BigUint::from(trees.len()) * BigUint::from(perms.len());
    let probs = counts
        .into_iter()
        .map(|(k, c)| (k, BigRational::new(BigUint::from(c).into(), total.clone().into())))
        .collect();
    Ok(ExactDistribution { probs })
}

/// Oriented paths of exactly `len` edges as vertex sequences.
pub fn oriented_paths(tree: &PlaneTree, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(len + 1);
    fn rec(tree: &PlaneTree, len: usize, path: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if path.len() == len + 1 {
            out.push(path.clone());
            return;
        }
        let v = *path.last().expect("non-empty") as usize;
        let prev = (path.len() >= 2).then(|| path[path.len() - 2] as usize);
        for w in tree.neighbors(v) {
            if Some(w) != prev {
                path.push(w as u32);
                rec(tree, len, path, out);
                path.pop();
            }
        }
    }
    for v in 0..tree.n_vertices() {
        path.push(v as u32);
        rec(tree, len, &mut path, &mut out);
        path.pop();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPairReport {
    pub n: usize,
    pub len1: usize,
    pub len2: usize,
    /// Trees with an ordered pair of vertex-disjoint oriented paths.
    pub disjoint_pairs: BigUint,
    /// `4 ℓ1 ℓ2 (n + ℓ) C(2n, n + ℓ)` with `ℓ = ℓ1 + ℓ2`.
    pub disjoint_bound: BigUint,
    /// Distinct unions of two intersecting paths, as edge-coloured plane trees.
    pub union_shapes: usize,
    /// `16 (ℓ1 + 1) (ℓ2 + 1) (min(ℓ1, ℓ2) + 1)`.
    pub union_bound: usize,
}

impl PathPairReport {
    pub fn bounds_hold(&self) -> bool {
        self.disjoint_pairs <= self.disjoint_bound && self.union_shapes <= self.union_bound
    }
}

/// Plane neighbour order of a tree vertex: parent first, then children.
fn rotation(tree: &PlaneTree, v: usize) -> Vec<u32> {
    tree.parent(v)
        .map(|p| p as u32)
        .into_iter()
        .chain(tree.children(v).iter().copied())
        .collect()
}

/// Canonical word of a coloured subtree of `tree` (edge colour 1, 2 or 3,
/// keyed by child vertex), minimised over all root corners.
fn canonical_coloured_subtree(tree: &PlaneTree, colour: &BTreeMap<u32, u8>) -> Vec<u8> {
    let edge_colour = |a: u32, b: u32| -> Option<u8> {
        let child = if tree.parent(a as usize) == Some(b as usize) {
            a
        } else if tree.parent(b as usize) == Some(a as usize) {
            b
        } else {
            return None;
        };
        colour.get(&child).copied()
    };
    let sub_rotation = |v: u32| -> Vec<u32> {
        rotation(tree, v as usize)
            .into_iter()
            .filter(|&w| edge_colour(v, w).is_some())
            .collect()
    };
    fn encode(
        v: u32,
        from: u32,
        sub_rotation: &dyn Fn(u32) -> Vec<u32>,
        edge_colour: &dyn Fn(u32, u32) -> Option<u8>,
        out: &mut Vec<u8>,
    ) {
        let rot = sub_rotation(v);
        let at = rot.iter().position(|&w| w == from).expect("arrival edge present");
        for i in 1..rot.len() {
            let w = rot[(at + i) % rot.len()];
            out.push(edge_colour(v, w).expect("coloured edge"));
            encode(w, v, sub_rotation, edge_colour, out);
            out.push(0);
        }
    }
    let mut best: Option<Vec<u8>> = None;
    for &child in colour.keys() {
        let parent = tree.parent(child as usize).expect("edge below a parent") as u32;
        for (a, b) in [(parent, child), (child, parent)] {
            // Root corner just before the directed edge a -> b.
            let mut word = vec![edge_colour(a, b).expect("coloured edge")];
            encode(b, a, &sub_rotation, &edge_colour, &mut word);
            word.push(0);
            let rot = sub_rotation(a);
            let at = rot.iter().position(|&w| w == b).expect("edge present");
            for i in 1..rot.len() {
                let w = rot[(at + i) % rot.len()];
                word.push(edge_colour(a, w).expect("coloured edge"));
                encode(w, a, &sub_rotation, &edge_colour, &mut word);
                word.push(0);
            }
            if best.as_ref().is_none_or(|x| word < *x) {
                best = Some(word);
            }
        }
    }
    best.unwrap_or_default()
}

fn path_edges(tree: &PlaneTree, path: &[u32]) -> Vec<u32> {
    path.windows(2)
        .map(|w| {
            if tree.parent(w[1] as usize) == Some(w[0] as usize) {
                w[1]
            } else {
                w[0]
            }
        })
        .collect()
}

/// Exhaustive pair counts over all trees with `n` edges.
pub fn enumerate_path_pairs_and_unions(n: usize, len1: usize, len2: usize) -> Result<PathPairReport> {
    guard("oracle pair tree size", MAX_PAIR_TREE_EDGES, n)?;
    guard("oracle pair path length", MAX_PAIR_PATH_LEN, len1.max(len2))?;
    if len1 == 0 || len2 == 0 {
        return Err(Error::invalid("path lengths must be positive"));
    }
    let mut disjoint = 0u64;
    let mut shapes: HashSet<Vec<u8>> = HashSet::new();
    for tree in enumerate_plane_trees(n)? {
        let p1 = oriented_paths(&tree, len1);
        let p2 = oriented_paths(&tree, len2);
        let mut seen_unions: HashSet<(Vec<u32>, Vec<u32>)> = HashSet::new();
        for a in &p1 {
            let mut ea = path_edges(&tree, a);
            ea.sort_unstable();
            for b in &p2 {
                if a.iter().all(|x| !b.contains(x)) {
                    disjoint += 1;
                    continue;
                }
                let mut eb = path_edges(&tree, b);
                eb.sort_unstable();
                if !seen_unions.insert((ea.clone(), eb.clone())) {
                    continue;
                }
                let mut colour: BTreeMap<u32, u8> = BTreeMap::new();
                for &e in &ea {
                    *colour.entry(e).or_insert(0) |= 1;
                }
                for &e in &eb {
                    *colour.entry(e).or_insert(0) |= 2;
                }
                shapes.insert(canonical_coloured_subtree(&tree, &colour));
            }
        }
    }
    let l = len1 + len2;
    let disjoint_bound = if l > n {
        BigUint::zero()
    } else {
        BigUint::from(4 * len1 * len2 * (n + l)) * binomial(2 * n, n + l)
    };
    Ok(PathPairReport {
        n,
        len1,
        len2,
        disjoint_pairs: BigUint::from(disjoint),
        disjoint_bound,
        union_shapes: shapes.len(),
        union_bound: 16 * (len1 + 1) * (len2 + 1) * (len1.min(len2) + 1),
    })
}

/// Cyclically reduced closed walks of length at most `cap` that are not
/// powers of a shorter walk and revisit some vertex, counted up to rotation
/// and reversal. Returned as a length histogram (index = length).
pub fn nonsimple_primitive_walks(g: &UnderlyingGraph, cap: usize) -> Result<Vec<u64>> {
    guard("oracle graph edges", MAX_GRAPH_EDGES, g.n_edges())?;
    guard("oracle walk length", MAX_WALK_LEN, cap)?;
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut hist = vec![0u64; cap + 1];
    let mut walk: Vec<u32> = Vec::new();

    fn is_power(seq: &[u32]) -> bool {
        let len = seq.len();
        (1..len).any(|d| len % d == 0 && (d..len).all(|i| seq[i] == seq[i - d]))
    }

    // Directed edges: half-edge h leaves its own end; a walk is a sequence of
    // half-edges with `end(h_i ^ 1) == start(h_{i+1})`, never reversing.
    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &UnderlyingGraph,
        start: u32,
        cap: usize,
        walk: &mut Vec<u32>,
        seen: &mut HashSet<Vec<u32>>,
        hist: &mut [u64],
    ) {
        let last = *walk.last().expect("non-empty");
        let v = g.half_edge_end(last ^ 1).0;
        if v == start && walk[0] != (last ^ 1) {
            let verts: Vec<u32> = walk.iter().map(|&h| g.half_edge_end(h).0).collect();
            let mut sorted = verts.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() < verts.len() && !is_power(walk) {
                let len = walk.len();
                let rotations = (0..len).map(|r| walk[r..].iter().chain(&walk[..r]).copied().collect::<Vec<_>>());
                let rev: Vec<u32> = walk.iter().rev().map(|h| h ^ 1).collect();
                let reversed = (0..len).map(|r| rev[r..].iter().chain(&rev[..r]).copied().collect::<Vec<_>>());
                let canon = rotations.chain(reversed).min().expect("non-empty");
                if seen.insert(canon) {
                    hist[len] += 1;
                }
            }
        }
        if walk.len() == cap {
            return;
        }
        for &h in g.half_edges(v as usize) {
            if h == (last ^ 1) {
                continue;
            }
            walk.push(h);
            rec(g, start, cap, walk, seen, hist);
            walk.pop();
        }
    }

    for v in 0..g.n_vertices() {
        for &h in g.half_edges(v) {
            walk.push(h);
            rec(g, v as u32, cap, &mut walk, &mut seen, &mut hist);
            walk.pop();
        }
    }
    Ok(hist)
}

/// Whether the probabilities sum to exactly one.
pub fn is_probability<K: Ord>(d: &ExactDistribution<K>) -> bool {
    d.total() == BigRational::one()
}
