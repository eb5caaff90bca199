//! Rooted plane trees.
//!
//! A tree with `n` edges is stored as its Dyck word (`true` for a step away
//! from the root) together with parent pointers and ordered child lists.
//! Vertices are identified with their depth-first, left-to-right preorder
//! label, so the root is `0` and every parent label is smaller than the
//! labels of its children.

use std::ops::Range;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combin::binomial;
use crate::{Error, Result};

const NO_PARENT: u32 = u32::MAX;

/// Above this size, counting paths of every length is refused.
pub const FULL_PATH_COUNT_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneTree {
    word: Vec<bool>,
    parent: Vec<u32>,
    child_start: Vec<u32>,
    children: Vec<u32>,
}

impl PlaneTree {
    /// Builds the tree of a balanced word; `true` is an up step.
    pub fn from_word(word: Vec<bool>) -> Result<Self> {
        if word.len() % 2 != 0 {
            return Err(Error::Malformed("odd-length Dyck word".into()));
        }
        let n = word.len() / 2;
        if n >= NO_PARENT as usize {
            return Err(Error::invalid("tree too large"));
        }
        let mut parent = Vec::with_capacity(n + 1);
        parent.push(NO_PARENT);
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        let mut current = 0u32;
        for &up in &word {
            if up {
                let child = parent.len() as u32;
                parent.push(current);
                stack.push(current);
                current = child;
            } else {
                current = stack
                    .pop()
                    .ok_or_else(|| Error::Malformed("Dyck word goes below zero".into()))?;
            }
        }
        if !stack.is_empty() || parent.len() != n + 1 {
            return Err(Error::Malformed("unbalanced Dyck word".into()));
        }

        let mut child_start = vec![0u32; n + 2];
        for &p in &parent[1..] {
            child_start[p as usize + 1] += 1;
        }
        for v in 0..=n {
            child_start[v + 1] += child_start[v];
        }
        let mut fill = child_start.clone();
        let mut children = vec![0u32; n];
        for v in 1..=n {
            let p = parent[v] as usize;
            children[fill[p] as usize] = v as u32;
            fill[p] += 1;
        }
        Ok(PlaneTree {
            word,
            parent,
            child_start,
            children,
        })
    }

    pub fn from_dyck(s: &str) -> Result<Self> {
        let word = s
            .chars()
            .map(|c| match c {
                '(' => Ok(true),
                ')' => Ok(false),
                other => Err(Error::Malformed(format!("unexpected {other:?} in Dyck word"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_word(word)
    }

    pub fn to_dyck(&self) -> String {
        self.word.iter().map(|&u| if u { '(' } else { ')' }).collect()
    }

    pub fn word(&self) -> &[bool] {
        &self.word
    }

    pub fn n_edges(&self) -> usize {
        self.word.len() / 2
    }

    pub fn n_vertices(&self) -> usize {
        self.parent.len()
    }

    /// Preorder label of `v`; vertex ids already are preorder labels.
    pub fn dfs_label(&self, v: usize) -> usize {
        v
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p as usize),
        }
    }

    /// Raw parent array, `u32::MAX` at the root.
    pub fn parents(&self) -> &[u32] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[u32] {
        &self.children[self.child_start[v] as usize..self.child_start[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.children(v).len() + usize::from(v != 0)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.parent(v)
            .into_iter()
            .chain(self.children(v).iter().map(|&c| c as usize))
    }

    /// Edges as `(parent, child)`, ordered by child label.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.n_vertices()).map(|v| (self.parent[v] as usize, v))
    }
}

impl Serialize for PlaneTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_dyck())
    }
}

impl<'de> Deserialize<'de> for PlaneTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PlaneTree::from_dyck(&s).map_err(serde::de::Error::custom)
    }
}

/// The `n`-th Catalan number, the number of plane trees with `n` edges.
pub fn catalan(n: usize) -> BigUint {
    binomial(2 * n, n) / (n as u64 + 1)
}

/// Uniform plane tree with `n` edges.
///
/// A uniformly shuffled sequence of `n + 1` up steps and `n` down steps is
/// drawn step by step; by the cycle lemma exactly one of its `2n + 1`
/// rotations has all partial sums positive, and dropping its leading up
/// step leaves a uniform Dyck word.
pub fn sample_plane_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PlaneTree> {
    if n == 0 {
        return Err(Error::invalid("a sampled tree needs at least one edge"));
    }
    let total = 2 * n + 1;
    let mut steps = Vec::with_capacity(total);
    let mut ups_left = n + 1;
    for remaining in (1..=total).rev() {
        let up = rng.random_range(0..remaining) < ups_left;
        ups_left -= usize::from(up);
        steps.push(up);
    }

    // Last position of the minimum of the prefix sums S_0..S_{2n}.
    let mut height = 0i64;
    let mut min = 0i64;
    let mut start = 0usize;
    for (j, &up) in steps[..total - 1].iter().enumerate() {
        height += if up { 1 } else { -1 };
        if height <= min {
            min = height;
            start = j + 1;
        }
    }
    debug_assert!(steps[start]);
    let mut word = Vec::with_capacity(2 * n);
    word.extend_from_slice(&steps[start + 1..]);
    word.extend_from_slice(&steps[..start]);
    let tree = PlaneTree::from_word(word)?;
    debug_assert_eq!(tree.n_edges(), n);
    Ok(tree)
}

/// `2ℓ·C(2n, n-ℓ)`: rooted trees of size `n` with a marked occurrence of a
/// given pattern of size `ℓ`; for paths this is the total number of oriented
/// paths of length `ℓ` over all trees of size `n`. Zero when `ℓ > n` or `ℓ = 0`.
pub fn marked_pattern_count_formula(n: usize, len: usize) -> BigUint {
    if len > n {
        return BigUint::ZERO;
    }
    binomial(2 * n, n - len) * (2 * len as u64)
}

/// `c[ℓ]` = number of oriented simple paths of length exactly `ℓ`, for
/// `1 <= ℓ <= cap`; index 0 is unused and always zero.
pub fn count_oriented_paths(tree: &PlaneTree, cap: usize) -> Result<Vec<u64>> {
    if cap == 0 {
        return Err(Error::invalid("path length cap must be at least 1"));
    }
    let n = tree.n_edges();
    if cap >= n && n > FULL_PATH_COUNT_LIMIT {
        return Err(Error::GuardExceeded {
            what: "full-length path counting (tree size)",
            limit: FULL_PATH_COUNT_LIMIT,
            got: n,
        });
    }
    let reach = cap.min(n);
    let mut counts = vec![0u64; cap + 1];
    let mut stack: Vec<(u32, u32, u32)> = Vec::new();
    for v in 0..tree.n_vertices() {
        stack.push((v as u32, NO_PARENT, 0));
        while let Some((u, from, depth)) = stack.pop() {
            counts[depth as usize] += 1;
            if depth as usize == reach {
                continue;
            }
            for w in tree.neighbors(u as usize) {
                if w as u32 != from {
                    stack.push((w as u32, u, depth + 1));
                }
            }
        }
    }
    counts[0] = 0;
    Ok(counts)
}

fn smallest_at_least(target: f64, m: usize) -> usize {
    // Smallest integer ℓ >= 0 with ℓ·m >= target, comparing products.
    let m = m as f64;
    let mut l = (target / m).ceil().max(0.0) as usize;
    while l > 0 && ((l - 1) as f64) * m >= target {
        l -= 1;
    }
    while (l as f64) * m < target {
        l += 1;
    }
    l
}

/// Integer lengths in the half-open window `[i·L/M, (i+1)·L/M)`.
pub fn window_lengths(i: usize, m: usize, scale: f64) -> Result<Range<usize>> {
    if m == 0 || !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::invalid("window needs M >= 1 and L > 0"));
    }
    let lo = smallest_at_least(i as f64 * scale, m);
    let hi = smallest_at_least((i + 1) as f64 * scale, m);
    Ok(lo..hi)
}

/// `P_i(T)`: oriented paths whose length lies in window `i`.
pub fn window_path_count(tree: &PlaneTree, i: usize, m: usize, scale: f64) -> Result<u64> {
    let range = window_lengths(i, m, scale)?;
    let lo = range.start.max(1);
    if lo >= range.end {
        return Ok(0);
    }
    let counts = count_oriented_paths(tree, range.end - 1)?;
    Ok(counts[lo..range.end].iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_from_seed;
    use proptest::prelude::*;

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0), BigUint::from(1u32));
        assert_eq!(catalan(3), BigUint::from(5u32));
        // Recurrence Cat_{n+1} = sum Cat_i Cat_{n-i}.
        let mut cat = vec![BigUint::from(1u32)];
        for n in 0..20 {
            let next: BigUint = (0..=n).map(|i| &cat[i] * &cat[n - i]).sum();
            cat.push(next);
        }
        for (n, c) in cat.iter().enumerate() {
            assert_eq!(&catalan(n), c);
        }
        assert_eq!(catalan(10), BigUint::from(16_796u32));
    }

    #[test]
    fn dyck_round_trip_and_structure() {
        let t = PlaneTree::from_dyck("(()())()").unwrap();
        assert_eq!(t.n_edges(), 4);
        assert_eq!(t.to_dyck(), "(()())()");
        assert_eq!(t.children(0), &[1, 4]);
        assert_eq!(t.children(1), &[2, 3]);
        assert_eq!(t.parent(3), Some(1));
        assert_eq!(t.parent(0), None);
        assert_eq!(t.degree(1), 3);
        assert!(PlaneTree::from_dyck("())(").is_err());
        assert!(PlaneTree::from_dyck("((").is_err());
        assert!(PlaneTree::from_dyck("(x)").is_err());
    }

    #[test]
    fn serde_as_dyck_string() {
        let t = PlaneTree::from_dyck("(())()").unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, "\"(())()\"");
        let back: PlaneTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn sampler_rejects_empty_and_handles_one_edge() {
        let mut rng = stream_from_seed(1);
        assert!(sample_plane_tree(0, &mut rng).is_err());
        for _ in 0..10 {
            assert_eq!(sample_plane_tree(1, &mut rng).unwrap().to_dyck(), "()");
        }
    }

    #[test]
    fn two_edge_trees_equally_likely() {
        let mut rng = stream_from_seed(11);
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|_| sample_plane_tree(2, &mut rng).unwrap().to_dyck() == "(())")
            .count() as f64;
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((hits - draws as f64 / 2.0).abs() < 3.0 * sigma, "{hits}");
    }

    #[test]
    fn path_counts_on_small_trees() {
        let star = PlaneTree::from_dyck("()()()").unwrap();
        assert_eq!(count_oriented_paths(&star, 2).unwrap(), vec![0, 6, 6]);
        let path = PlaneTree::from_dyck("(())").unwrap();
        assert_eq!(count_oriented_paths(&path, 2).unwrap(), vec![0, 4, 2]);
        assert_eq!(count_oriented_paths(&path, 5).unwrap(), vec![0, 4, 2, 0, 0, 0]);
        assert!(count_oriented_paths(&path, 0).is_err());
    }

    #[test]
    fn full_length_guard() {
        let mut rng = stream_from_seed(2);
        let t = sample_plane_tree(FULL_PATH_COUNT_LIMIT + 1, &mut rng).unwrap();
        assert!(count_oriented_paths(&t, FULL_PATH_COUNT_LIMIT + 1).is_err());
        assert!(count_oriented_paths(&t, 3).is_ok());
    }

    #[test]
    fn pattern_formula_small_cases() {
        assert_eq!(marked_pattern_count_formula(2, 1), BigUint::from(8u32));
        assert_eq!(marked_pattern_count_formula(2, 2), BigUint::from(4u32));
        assert_eq!(marked_pattern_count_formula(7, 7), BigUint::from(14u32));
        assert_eq!(marked_pattern_count_formula(3, 4), BigUint::ZERO);
    }

    #[test]
    fn windows_use_exact_boundaries() {
        assert_eq!(window_lengths(1, 2, 10.0).unwrap(), 5..10);
        assert_eq!(window_lengths(0, 1, 10.0).unwrap(), 0..10);
        assert_eq!(window_lengths(2, 3, 3.0).unwrap(), 2..3);
        assert!(window_lengths(0, 0, 1.0).is_err());
        let t = PlaneTree::from_dyck("((()))").unwrap();
        // window [0.5, 1) contains no integer
        assert_eq!(window_path_count(&t, 1, 2, 1.0).unwrap(), 0);
        // window containing only length 1
        assert_eq!(window_path_count(&t, 1, 1, 1.0).unwrap(), 6);
    }

    proptest! {
        #[test]
        fn sampled_trees_are_well_formed(n in 1usize..300, seed in any::<u64>()) {
            let mut rng = stream_from_seed(seed);
            let t = sample_plane_tree(n, &mut rng).unwrap();
            prop_assert_eq!(t.n_edges(), n);
            prop_assert_eq!(t.n_vertices(), n + 1);
            let mut h = 0i64;
            for &u in t.word() {
                h += if u { 1 } else { -1 };
                prop_assert!(h >= 0);
            }
            prop_assert_eq!(h, 0);
            for v in 1..=n {
                prop_assert!(t.parent(v).unwrap() < v);
            }
            let c = count_oriented_paths(&t, 6).unwrap();
            prop_assert_eq!(c[1], 2 * n as u64);
            prop_assert!(c.iter().all(|x| x % 2 == 0));
        }
    }
}
