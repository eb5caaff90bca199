//! C-permutations: permutations whose cycles all have odd length.
//!
//! `h(n, g)` denotes the number of C-permutations of `n` elements with
//! `n - 2g` cycles. Two counting routes are provided:
//!
//! * [`ExactCountTable`] evaluates `h` with big integers through the
//!   recurrence obtained by conditioning on the cycle of the smallest
//!   element, `h(n, g) = Σ_j (n-1)_{2j} h(n-1-2j, g-j)`.
//! * [`LogCountTable`] works in the log domain by summing over cycle types.
//!   Writing `d = Σ_{ν≥5} x_ν (ν-1)/2` and `e = Σ_{ν≥5} x_ν`, the number of
//!   3-cycles and fixed points are `g - d` and `n - 3g + d - e`, so
//!   `h(n, g) = n! Σ_{d,e} W(d, e) / ((g-d)! 3^{g-d} (n-3g+d-e)!)` where
//!   `W(d, e) = [z^d] S(z)^e / e!` and `S(z) = Σ_{j≥2} z^j / (2j+1)`.
//!
//! The exact route backs the sequential sampler ([`CountMode::Exact`]); the
//! log route backs a cycle-type sampler ([`CountMode::Log`]) whose setup is
//! `O(g^3)` and whose per-sample cost only depends on the number of
//! non-fixed points, which is what makes `n = 10^6` affordable.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combin::{binomial, factorial, falling, log_sum_exp, CompensatedSum, LnFactorial};
use crate::rng::uniform_biguint_below;
use crate::{Error, Result};

/// Largest ground set handled by the big-integer table.
pub const EXACT_LIMIT: usize = 2000;

/// Largest genus handled by the log-domain table (`O(g^3)` setup).
pub const LOG_GENUS_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Exact,
    Log,
}

/// `m = n - 2g >= 1`, or the empty permutation.
pub fn feasible(n: usize, g: usize) -> bool {
    if n == 0 {
        return g == 0;
    }
    2 * g < n
}

/// A C-permutation of `{0, .., n-1}` stored through its non-trivial cycles;
/// every element not listed is a fixed point. Cycles are rotated to start at
/// their smallest element and sorted by it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CPermutation {
    n: usize,
    elems: Vec<u32>,
    bounds: Vec<u32>,
}

impl CPermutation {
    pub fn identity(n: usize) -> Self {
        CPermutation {
            n,
            elems: Vec::new(),
            bounds: vec![0],
        }
    }

    /// Builds from a list of cycles; fixed points may be listed or omitted.
    pub fn from_cycles<C: AsRef<[u32]>>(n: usize, cycles: &[C]) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut nontrivial: Vec<Vec<u32>> = Vec::new();
        for c in cycles {
            let c = c.as_ref();
            if c.is_empty() || c.len() % 2 == 0 {
                return Err(Error::Malformed(format!(
                    "cycle of length {} is not odd",
                    c.len()
                )));
            }
            for &x in c {
                let x = x as usize;
                if x >= n || seen[x] {
                    return Err(Error::Malformed(format!(
                        "element {x} out of range or repeated"
                    )));
                }
                seen[x] = true;
            }
            if c.len() > 1 {
                nontrivial.push(c.to_vec());
            }
        }
        Ok(Self::from_nontrivial(n, nontrivial))
    }

    fn from_nontrivial(n: usize, mut cycles: Vec<Vec<u32>>) -> Self {
        for c in cycles.iter_mut() {
            let pos = c
                .iter()
                .enumerate()
                .min_by_key(|&(_, x)| *x)
                .map(|(i, _)| i)
                .unwrap_or(0);
            c.rotate_left(pos);
        }
        cycles.sort_unstable_by_key(|c| c[0]);
        let mut elems = Vec::with_capacity(cycles.iter().map(Vec::len).sum());
        let mut bounds = Vec::with_capacity(cycles.len() + 1);
        bounds.push(0);
        for c in &cycles {
            elems.extend_from_slice(c);
            bounds.push(elems.len() as u32);
        }
        CPermutation { n, elems, bounds }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nontrivial_cycles(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.bounds
            .windows(2)
            .map(|w| &self.elems[w[0] as usize..w[1] as usize])
    }

    pub fn nontrivial_count(&self) -> usize {
        self.bounds.len() - 1
    }

    /// Number of elements moved.
    pub fn support_size(&self) -> usize {
        self.elems.len()
    }

    pub fn cycle_count(&self) -> usize {
        self.nontrivial_count() + self.n - self.elems.len()
    }

    /// `(n - #cycles) / 2`.
    pub fn genus(&self) -> usize {
        (self.n - self.cycle_count()) / 2
    }

    /// All cycles including fixed points, ordered by smallest element.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = Vec::with_capacity(self.cycle_count());
        let mut moved = vec![false; self.n];
        for &x in &self.elems {
            moved[x as usize] = true;
        }
        let mut nt = self.nontrivial_cycles().peekable();
        for x in 0..self.n as u32 {
            if let Some(c) = nt.peek() {
                if c[0] == x {
                    out.push(c.to_vec());
                    nt.next();
                    continue;
                }
            }
            if !moved[x as usize] {
                out.push(vec![x]);
            }
        }
        out
    }

    /// For each element, the smallest element of its cycle.
    pub fn class_labels(&self) -> Vec<u32> {
        let mut labels: Vec<u32> = (0..self.n as u32).collect();
        for c in self.nontrivial_cycles() {
            for &x in c {
                labels[x as usize] = c[0];
            }
        }
        labels
    }

    /// `images[x] = σ(x)`.
    pub fn images(&self) -> Vec<u32> {
        let mut img: Vec<u32> = (0..self.n as u32).collect();
        for c in self.nontrivial_cycles() {
            for (i, &x) in c.iter().enumerate() {
                img[x as usize] = c[(i + 1) % c.len()];
            }
        }
        img
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut counts = BTreeMap::new();
        let fixed = (self.n - self.elems.len()) as u64;
        if fixed > 0 {
            counts.insert(1, fixed);
        }
        for c in self.nontrivial_cycles() {
            *counts.entry(c.len() as u32).or_insert(0) += 1;
        }
        CycleType { counts }
    }
}

impl Serialize for CPermutation {
    /// JSON list of cycles with 1-based element ids.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cycles: Vec<Vec<u32>> = self
            .cycles()
            .into_iter()
            .map(|c| c.into_iter().map(|x| x + 1).collect())
            .collect();
        cycles.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CPermutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cycles: Vec<Vec<u32>> = Vec::deserialize(d)?;
        let n = cycles.iter().map(Vec::len).sum();
        let zero_based = cycles
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|x| x.checked_sub(1).ok_or("element ids are 1-based"))
                    .collect::<std::result::Result<Vec<u32>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        CPermutation::from_cycles(n, &zero_based).map_err(serde::de::Error::custom)
    }
}

/// Cycle type `ν -> x_ν` of a permutation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CycleType {
    pub counts: BTreeMap<u32, u64>,
}

impl CycleType {
    pub fn from_pairs(pairs: &[(u32, u64)]) -> Self {
        CycleType {
            counts: pairs.iter().copied().filter(|&(_, x)| x > 0).collect(),
        }
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().map(|(&nu, &x)| nu as u64 * x).sum()
    }

    pub fn cycles(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_odd(&self) -> bool {
        self.counts.keys().all(|&nu| nu % 2 == 1)
    }

    pub fn genus(&self) -> Option<u64> {
        let (n, m) = (self.n(), self.cycles());
        (self.is_odd() && n >= m).then(|| (n - m) / 2)
    }
}

/// Number of permutations with cycle type `x`: `n! / Π x_ν! ν^{x_ν}`; zero
/// for types with an even or zero cycle length.
pub fn count_by_cycle_type(x: &CycleType) -> BigUint {
    if x.counts.keys().any(|&nu| nu == 0 || nu % 2 == 0) {
        return BigUint::ZERO;
    }
    let mut denom = BigUint::one();
    for (&nu, &cnt) in &x.counts {
        denom *= factorial(cnt as usize);
        denom *= BigUint::from(nu).pow(cnt as u32);
    }
    factorial(x.n() as usize) / denom
}

/// All odd cycle types of C-permutations of `n` elements with genus `g`.
pub fn valid_cycle_types(n: usize, g: usize) -> Vec<CycleType> {
    fn rec(
        nu: u32,
        budget: usize,
        acc: &mut Vec<(u32, u64)>,
        out: &mut Vec<Vec<(u32, u64)>>,
    ) {
        let half = ((nu - 1) / 2) as usize;
        if half > budget {
            out.push(acc.clone());
            return;
        }
        for x in 0..=budget / half {
            if x > 0 {
                acc.push((nu, x as u64));
            }
            rec(nu + 2, budget - x * half, acc, out);
            if x > 0 {
                acc.pop();
            }
        }
    }
    if !feasible(n, g) {
        return Vec::new();
    }
    let mut big = Vec::new();
    rec(5, g, &mut Vec::new(), &mut big);
    let mut out = Vec::new();
    for parts in big {
        let d: usize = parts
            .iter()
            .map(|&(nu, x)| ((nu - 1) / 2) as usize * x as usize)
            .sum();
        let e: usize = parts.iter().map(|&(_, x)| x as usize).sum();
        let x3 = g - d;
        let Some(x1) = (n + d).checked_sub(3 * g + e) else {
            continue;
        };
        let mut pairs = parts;
        pairs.push((1, x1 as u64));
        pairs.push((3, x3 as u64));
        out.push(CycleType::from_pairs(&pairs));
    }
    out
}

/// Big-integer table of `h(r, g')` for `r <= n_max`, `g' <= g_max`.
#[derive(Clone, Debug)]
pub struct ExactCountTable {
    g_max: usize,
    rows: Vec<Vec<BigUint>>,
}

impl ExactCountTable {
    pub fn new(n_max: usize, g_max: usize) -> Result<Self> {
        if n_max > EXACT_LIMIT {
            return Err(Error::GuardExceeded {
                what: "exact counting ground set",
                limit: EXACT_LIMIT,
                got: n_max,
            });
        }
        let g_max = g_max.min(n_max / 2);
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
        let mut base = vec![BigUint::ZERO; g_max + 1];
        base[0] = BigUint::one();
        rows.push(base);
        for r in 1..=n_max {
            let mut row = vec![BigUint::ZERO; g_max + 1];
            for (gg, slot) in row.iter_mut().enumerate() {
                let mut acc = BigUint::ZERO;
                let mut fall = BigUint::one();
                for j in 0..=gg {
                    if 2 * j > r - 1 {
                        break;
                    }
                    if j > 0 {
                        fall *= ((r - 2 * j + 1) * (r - 2 * j)) as u64;
                    }
                    let rest = &rows[r - 1 - 2 * j][gg - j];
                    if !rest.is_zero() {
                        acc += &fall * rest;
                    }
                }
                *slot = acc;
            }
            rows.push(row);
        }
        Ok(ExactCountTable { g_max, rows })
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn g_max(&self) -> usize {
        self.g_max
    }

    /// `h(r, g)`, zero outside the feasible range.
    pub fn get(&self, r: usize, g: usize) -> &BigUint {
        static ZERO: BigUint = BigUint::ZERO;
        assert!(r <= self.n_max(), "row {r} not tabulated");
        if g > self.g_max {
            assert!(2 * g >= r, "genus {g} not tabulated at size {r}");
            return &ZERO;
        }
        &self.rows[r][g]
    }
}

/// Log-domain counts built from the cycle-type decomposition.
#[derive(Clone, Debug)]
pub struct LogCountTable {
    g_max: usize,
    /// `ln W(d, e)`, indexed `[e][d]`.
    ln_w: Vec<Vec<f64>>,
    ln_fact: LnFactorial,
}

impl LogCountTable {
    pub fn new(n_max: usize, g_max: usize) -> Result<Self> {
        if g_max > LOG_GENUS_LIMIT {
            return Err(Error::GuardExceeded {
                what: "log-domain genus",
                limit: LOG_GENUS_LIMIT,
                got: g_max,
            });
        }
        let e_max = g_max / 2;
        let mut ln_w = vec![vec![f64::NEG_INFINITY; g_max + 1]; e_max + 1];
        ln_w[0][0] = 0.0;
        let ln_part: Vec<f64> = (0..=g_max).map(|j| -((2 * j + 1) as f64).ln()).collect();
        let mut terms = Vec::with_capacity(g_max);
        for e in 1..=e_max {
            let ln_e = (e as f64).ln();
            for d in 2 * e..=g_max {
                terms.clear();
                for j in 2..=d - 2 * (e - 1) {
                    let prev = ln_w[e - 1][d - j];
                    if prev > f64::NEG_INFINITY {
                        terms.push(prev + ln_part[j]);
                    }
                }
                ln_w[e][d] = log_sum_exp(&terms) - ln_e;
            }
        }
        Ok(LogCountTable {
            g_max,
            ln_w,
            ln_fact: LnFactorial::new(n_max),
        })
    }

    pub fn ln_factorial(&self) -> &LnFactorial {
        &self.ln_fact
    }

    fn check(&self, n: usize, g: usize) {
        assert!(n <= self.ln_fact.n_max(), "size {n} not tabulated");
        assert!(g <= self.g_max, "genus {g} not tabulated");
    }

    /// Log-weights of the `(d, e)` classes of cycle types. Returns an offset
    /// such that `ln(h(n, g) / n!) = offset + ln Σ exp(term)`.
    ///
    /// When `n >= 3g` the large factorial `(n - 3g + d - e)!` is split as
    /// `(n - 3g)!` (folded into the offset) times a short rising product, so
    /// the terms never carry the rounding error of a huge `ln x!`.
    fn class_terms(&self, n: usize, g: usize, out: &mut Vec<(usize, usize, f64)>) -> f64 {
        out.clear();
        let ln3 = 3f64.ln();
        let base = (n >= 3 * g).then(|| n - 3 * g);
        let rising = base.map(|b| ln_rising(b, g)).unwrap_or_default();
        for d in 0..=g {
            for e in 0..=d / 2 {
                let lw = self.ln_w[e][d];
                if lw == f64::NEG_INFINITY {
                    continue;
                }
                let Some(x1) = (n + d).checked_sub(3 * g + e) else {
                    continue;
                };
                let tail = match base {
                    Some(_) => rising[d - e],
                    None => self.ln_fact.get(x1),
                };
                let t = lw - self.ln_fact.get(g - d) - (g - d) as f64 * ln3 - tail;
                out.push((d, e, t));
            }
        }
        base.map_or(0.0, |b| -self.ln_fact.get(b))
    }

    /// `(offset, ln Σ exp(term))` as produced by `class_terms`.
    fn ln_scaled_parts(&self, n: usize, g: usize) -> (f64, f64) {
        self.check(n, g);
        let mut terms = Vec::new();
        let offset = self.class_terms(n, g, &mut terms);
        let ln: Vec<f64> = terms.iter().map(|t| t.2).collect();
        (offset, log_sum_exp(&ln))
    }

    /// `ln(h(n, g) / n!)`; `-inf` when infeasible.
    pub fn ln_scaled(&self, n: usize, g: usize) -> f64 {
        if !feasible(n, g) {
            return f64::NEG_INFINITY;
        }
        let (offset, lse) = self.ln_scaled_parts(n, g);
        offset + lse
    }

    /// `ln h(n, g)`; `-inf` when infeasible.
    pub fn ln_count(&self, n: usize, g: usize) -> f64 {
        let s = self.ln_scaled(n, g);
        if s == f64::NEG_INFINITY {
            return s;
        }
        self.ln_fact.get(n) + s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Count {
    Exact(BigUint),
    /// Natural logarithm of the count; `-inf` for zero.
    Ln(f64),
}

impl Count {
    pub fn ln(&self) -> f64 {
        match self {
            Count::Exact(x) if x.is_zero() => f64::NEG_INFINITY,
            Count::Exact(x) => big_ln(x),
            Count::Ln(v) => *v,
        }
    }
}

/// Natural log of a big integer without overflowing `f64`.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `|fsc_{n, n-2g}|`, zero (or `-inf`) when infeasible.
pub fn count_cperms(n: usize, g: usize, mode: CountMode) -> Result<Count> {
    match mode {
        CountMode::Exact => {
            if !feasible(n, g) {
                return Ok(Count::Exact(BigUint::ZERO));
            }
            let table = ExactCountTable::new(n, g)?;
            Ok(Count::Exact(table.get(n, g).clone()))
        }
        CountMode::Log => {
            if !feasible(n, g) {
                return Ok(Count::Ln(f64::NEG_INFINITY));
            }
            let table = LogCountTable::new(n, g)?;
            Ok(Count::Ln(table.ln_count(n, g)))
        }
    }
}

/// Exact `E N_ν = C(n, ν) (ν-1)! h(n-ν, g-(ν-1)/2) / h(n, g)`.
pub fn expected_cycle_count_exact(
    n: usize,
    g: usize,
    nu: usize,
    table: &ExactCountTable,
) -> Result<BigRational> {
    check_length(nu)?;
    if !feasible(n, g) {
        return Err(Error::Infeasible { n, g });
    }
    let k = (nu - 1) / 2;
    if k > g || nu > n {
        return Ok(BigRational::zero());
    }
    let num = binomial(n, nu) * factorial(nu - 1) * table.get(n - nu, g - k);
    let den = table.get(n, g).clone();
    Ok(BigRational::new(num.into(), den.into()))
}

/// Log-domain `E N_ν = S(n-ν, g-k) / (ν S(n, g))` with `S = h / n!`.
pub fn expected_cycle_count_log(n: usize, g: usize, nu: usize, table: &LogCountTable) -> Result<f64> {
    check_length(nu)?;
    if !feasible(n, g) {
        return Err(Error::Infeasible { n, g });
    }
    let k = (nu - 1) / 2;
    if k > g || nu > n {
        return Ok(0.0);
    }
    if !feasible(n - nu, g - k) {
        return Ok(0.0);
    }
    if n >= 3 * g {
        // Both sums share the factor (n - 3g)! up to a rising product.
        let (_, num) = table.ln_scaled_parts(n - nu, g - k);
        let (_, den) = table.ln_scaled_parts(n, g);
        let shift = ln_rising(n - 3 * g, k.saturating_sub(1))[k.saturating_sub(1)];
        return Ok((num - den - shift).exp() / nu as f64);
    }
    let num = table.ln_scaled(n - nu, g - k);
    Ok((num - table.ln_scaled(n, g)).exp() / nu as f64)
}

/// `[ln((b+1)(b+2)...(b+m)) for m in 0..=len]`.
fn ln_rising(b: usize, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len + 1);
    let mut acc = CompensatedSum::default();
    out.push(0.0);
    for i in 1..=len {
        acc.add(((b + i) as f64).ln());
        out.push(acc.value());
    }
    out
}

/// Expected number of `ν`-cycles of a uniform element of `fsc_{n, n-2g}`.
pub fn expected_cycle_count(n: usize, g: usize, nu: usize, mode: CountMode) -> Result<f64> {
    match mode {
        CountMode::Exact => {
            let table = ExactCountTable::new(n, g)?;
            Ok(expected_cycle_count_exact(n, g, nu, &table)?
                .to_f64()
                .unwrap_or(f64::NAN))
        }
        CountMode::Log => {
            let table = LogCountTable::new(n, g)?;
            expected_cycle_count_log(n, g, nu, &table)
        }
    }
}

fn check_length(nu: usize) -> Result<()> {
    if nu % 2 == 0 {
        return Err(Error::invalid(format!("cycle length {nu} is not odd")));
    }
    Ok(())
}

/// Exact `W(d, e)` for `d <= g_max`, indexed `[e][d]`.
fn exact_class_weights(g_max: usize) -> Vec<Vec<BigRational>> {
    let e_max = g_max / 2;
    let mut w = vec![vec![BigRational::zero(); g_max + 1]; e_max + 1];
    w[0][0] = BigRational::one();
    for e in 1..=e_max {
        for d in 2 * e..=g_max {
            let mut acc = BigRational::zero();
            for j in 2..=d - 2 * (e - 1) {
                let prev = &w[e - 1][d - j];
                if !prev.is_zero() {
                    acc += prev / BigRational::from_integer(((2 * j + 1) as u64).into());
                }
            }
            w[e][d] = acc / BigRational::from_integer((e as u64).into());
        }
    }
    w
}

/// `(n - 3g)! h(n, g) / n!`, exactly; needs `n >= 3g`.
fn scaled_class_sum(n: usize, g: usize, w: &[Vec<BigRational>]) -> BigRational {
    let base = n - 3 * g;
    let mut acc = BigRational::zero();
    for d in 0..=g {
        let den_d = factorial(g - d) * BigUint::from(3u32).pow((g - d) as u32);
        for e in 0..=d / 2 {
            let we = &w[e][d];
            if we.is_zero() {
                continue;
            }
            let rising: BigUint = (base + 1..=base + d - e).map(BigUint::from).product();
            acc += we / BigRational::from_integer((&den_d * rising).into());
        }
    }
    acc
}

/// Exact `E N_ν` through the cycle-type decomposition, usable far beyond
/// [`EXACT_LIMIT`] as long as `g` is moderate; needs `n >= 3g`.
pub fn expected_cycle_count_rational(n: usize, g: usize, nu: usize) -> Result<BigRational> {
    check_length(nu)?;
    if !feasible(n, g) {
        return Err(Error::Infeasible { n, g });
    }
    if n < 3 * g {
        return Err(Error::invalid("the cycle-type route needs n >= 3g"));
    }
    let k = (nu - 1) / 2;
    if k > g || nu > n {
        return Ok(BigRational::zero());
    }
    let w = exact_class_weights(g);
    let num = scaled_class_sum(n - nu, g - k, &w);
    let base = n - 3 * g;
    let rising: BigUint = (base + 1..base + k).map(BigUint::from).product();
    let den = scaled_class_sum(n, g, &w) * BigRational::from_integer((rising * BigUint::from(nu)).into());
    Ok(num / den)
}

/// `λ_ν` as an exact rational.
pub fn lambda_bound_rational(n: usize, g: usize, nu: usize) -> Result<BigRational> {
    lambda_bound(n, g, nu)?;
    let k = ((nu - 1) / 2) as u32;
    let num = BigUint::from(3 * g).pow(k);
    let den = BigUint::from(nu) * BigUint::from(n - 3 * g).pow(k - 1);
    Ok(BigRational::new(num.into(), den.into()))
}

/// `λ_ν = (3g)^{(ν-1)/2} / (ν (n-3g)^{(ν-3)/2})`, an upper bound on `E N_ν`.
pub fn lambda_bound(n: usize, g: usize, nu: usize) -> Result<f64> {
    if nu < 3 || nu % 2 == 0 {
        return Err(Error::invalid("ν must be odd and at least 3"));
    }
    if 3 * g >= n {
        return Err(Error::invalid("the bound needs g < n/3"));
    }
    let k = ((nu - 1) / 2) as i32;
    let three_g = 3.0 * g as f64;
    let rest = (n - 3 * g) as f64;
    Ok(three_g.powi(k) / (nu as f64 * rest.powi(k - 1)))
}

/// Uniform sampler over `fsc_{n, n-2g}`.
#[derive(Clone, Debug)]
pub enum CPermSampler {
    /// Sequential big-integer sampler, exactly uniform.
    Exact {
        n: usize,
        g: usize,
        table: Arc<ExactCountTable>,
    },
    /// Cycle-type sampler with log-domain class probabilities.
    Log(CycleTypeSampler),
}

impl CPermSampler {
    pub fn new(n: usize, g: usize, mode: CountMode) -> Result<Self> {
        if !feasible(n, g) {
            return Err(Error::Infeasible { n, g });
        }
        Ok(match mode {
            CountMode::Exact => CPermSampler::Exact {
                n,
                g,
                table: Arc::new(ExactCountTable::new(n, g)?),
            },
            CountMode::Log => CPermSampler::Log(CycleTypeSampler::new(n, g)?),
        })
    }

    /// Exact mode up to [`EXACT_LIMIT`] elements, log mode above.
    pub fn auto(n: usize, g: usize) -> Result<Self> {
        let mode = if n <= EXACT_LIMIT {
            CountMode::Exact
        } else {
            CountMode::Log
        };
        Self::new(n, g, mode)
    }

    pub fn mode(&self) -> CountMode {
        match self {
            CPermSampler::Exact { .. } => CountMode::Exact,
            CPermSampler::Log(_) => CountMode::Log,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            CPermSampler::Exact { n, .. } => *n,
            CPermSampler::Log(s) => s.n,
        }
    }

    pub fn genus(&self) -> usize {
        match self {
            CPermSampler::Exact { g, .. } => *g,
            CPermSampler::Log(s) => s.g,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CPermutation {
        match self {
            CPermSampler::Exact { n, g, table } => sample_sequential(*n, *g, table, rng),
            CPermSampler::Log(s) => s.sample(rng),
        }
    }
}

/// Uniform C-permutation of `n` elements with genus `g`.
pub fn sample_cperm<R: Rng + ?Sized>(
    n: usize,
    g: usize,
    mode: CountMode,
    rng: &mut R,
) -> Result<CPermutation> {
    Ok(CPermSampler::new(n, g, mode)?.sample(rng))
}

/// The cycle through the smallest unassigned element has length `2j+1` with
/// probability `(r-1)_{2j} h(r-1-2j, g'-j) / h(r, g')`; its companions are an
/// ordered uniform draw from the unassigned pool.
fn sample_sequential<R: Rng + ?Sized>(
    n: usize,
    g: usize,
    table: &ExactCountTable,
    rng: &mut R,
) -> CPermutation {
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut pos: Vec<u32> = (0..n as u32).collect();
    let mut cycles: Vec<Vec<u32>> = Vec::new();
    let mut genus_left = g;

    fn take(pool: &mut Vec<u32>, pos: &mut [u32], at: usize) -> u32 {
        let x = pool.swap_remove(at);
        if at < pool.len() {
            pos[pool[at] as usize] = at as u32;
        }
        x
    }

    let mut assigned = vec![false; n];
    let mut next = 0usize;
    while genus_left > 0 {
        while assigned[next] {
            next += 1;
        }
        let r = pool.len();
        let at = pos[next] as usize;
        let first = take(&mut pool, &mut pos, at);
        assigned[first as usize] = true;

        let total = table.get(r, genus_left);
        let mut u = uniform_biguint_below(rng, total);
        let mut fall = BigUint::one();
        let mut chosen = None;
        for j in 0..=genus_left {
            if 2 * j > r - 1 {
                break;
            }
            if j > 0 {
                fall *= ((r - 2 * j + 1) * (r - 2 * j)) as u64;
            }
            let w = &fall * table.get(r - 1 - 2 * j, genus_left - j);
            if u < w {
                chosen = Some(j);
                break;
            }
            u -= w;
        }
        let j = chosen.expect("weights sum to the total count");
        if j > 0 {
            let mut cycle = Vec::with_capacity(2 * j + 1);
            cycle.push(first);
            for _ in 0..2 * j {
                let at = rng.random_range(0..pool.len());
                let x = take(&mut pool, &mut pos, at);
                assigned[x as usize] = true;
                cycle.push(x);
            }
            cycles.push(cycle);
            genus_left -= j;
        }
    }
    CPermutation::from_nontrivial(n, cycles)
}

/// Cycle-type sampler: draws the class `(d, e)`, then the `e` large cycle
/// lengths, then places the non-fixed elements uniformly.
#[derive(Clone, Debug)]
pub struct CycleTypeSampler {
    n: usize,
    g: usize,
    classes: Vec<(usize, usize)>,
    cumulative: Vec<f64>,
    ln_w: Vec<Vec<f64>>,
}

impl CycleTypeSampler {
    pub fn new(n: usize, g: usize) -> Result<Self> {
        if !feasible(n, g) {
            return Err(Error::Infeasible { n, g });
        }
        let table = LogCountTable::new(n, g)?;
        let mut terms = Vec::new();
        table.class_terms(n, g, &mut terms);
        let ln_total = log_sum_exp(&terms.iter().map(|t| t.2).collect::<Vec<_>>());
        let mut classes = Vec::with_capacity(terms.len());
        let mut cumulative = Vec::with_capacity(terms.len());
        let mut acc = 0.0;
        for &(d, e, t) in &terms {
            acc += (t - ln_total).exp();
            classes.push((d, e));
            cumulative.push(acc);
        }
        Ok(CycleTypeSampler {
            n,
            g,
            classes,
            cumulative,
            ln_w: table.ln_w,
        })
    }

    /// Probability of each `(d, e)` class, for diagnostics.
    pub fn class_probabilities(&self) -> Vec<((usize, usize), f64)> {
        let mut prev = 0.0;
        self.classes
            .iter()
            .zip(&self.cumulative)
            .map(|(&c, &cum)| {
                let p = cum - prev;
                prev = cum;
                (c, p / self.cumulative.last().copied().unwrap_or(1.0))
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CPermutation {
        if self.g == 0 {
            return CPermutation::identity(self.n);
        }
        let total = *self.cumulative.last().expect("feasible class set");
        let u: f64 = rng.random::<f64>() * total;
        let at = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.classes.len() - 1);
        let (d, e) = self.classes[at];

        let mut lengths = Vec::with_capacity(e + self.g - d);
        let mut rem = d;
        for parts_left in (1..=e).rev() {
            let ln_here = self.ln_w[parts_left][rem] + (parts_left as f64).ln();
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let max_j = rem - 2 * (parts_left - 1);
            let mut pick = max_j;
            for j in 2..=max_j {
                let rest = self.ln_w[parts_left - 1][rem - j];
                if rest == f64::NEG_INFINITY {
                    continue;
                }
                acc += (rest - ((2 * j + 1) as f64).ln() - ln_here).exp();
                if u < acc {
                    pick = j;
                    break;
                }
            }
            lengths.push(2 * pick + 1);
            rem -= pick;
        }
        lengths.extend(std::iter::repeat_n(3, self.g - d));

        let moved: usize = lengths.iter().sum();
        let picks = index::sample(rng, self.n, moved);
        let mut it = picks.iter();
        let cycles = lengths
            .iter()
            .map(|&len| (0..len).map(|_| it.next().unwrap() as u32).collect())
            .collect();
        CPermutation::from_nontrivial(self.n, cycles)
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
}

impl Estimate {
    pub fn from_hits(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Estimate {
            mean: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
            hits,
            samples,
        }
    }
}

/// Whether elements `2i, 2i+1` (0-based) share a cycle for every `i < r`,
/// with the `r` cycles pairwise distinct.
pub fn pairs_in_distinct_cycles(sigma: &CPermutation, r: usize) -> bool {
    let mut cycle_of = BTreeMap::new();
    for (ci, c) in sigma.nontrivial_cycles().enumerate() {
        for &x in c {
            if (x as usize) < 2 * r {
                cycle_of.insert(x, ci);
            }
        }
    }
    let mut used = Vec::with_capacity(r);
    for i in 0..r as u32 {
        match (cycle_of.get(&(2 * i)), cycle_of.get(&(2 * i + 1))) {
            (Some(a), Some(b)) if a == b && !used.contains(a) => used.push(*a),
            _ => return false,
        }
    }
    true
}

/// Monte Carlo estimate of `P^{(r)}_{n,g}` with the log-mode sampler.
pub fn pairing_probability<R: Rng + ?Sized>(
    n: usize,
    g: usize,
    r: usize,
    samples: u64,
    rng: &mut R,
) -> Result<Estimate> {
    if 2 * r > n {
        return Err(Error::invalid("pairing needs 2r <= n"));
    }
    if samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    let sampler = CPermSampler::new(n, g, CountMode::Log)?;
    let hits = (0..samples)
        .filter(|_| pairs_in_distinct_cycles(&sampler.sample(rng), r))
        .count() as u64;
    Ok(Estimate::from_hits(hits, samples))
}

/// `Λ = 6g ((1 - 3g/n) / (1 - 6g/n))^2`, so that `P^{(r)} <= Λ^r / (n)_{2r}`.
pub fn pairing_lambda(n: usize, g: usize) -> f64 {
    let (n, g) = (n as f64, g as f64);
    6.0 * g * ((1.0 - 3.0 * g / n) / (1.0 - 6.0 * g / n)).powi(2)
}

/// Exact `P^{(1)}_{n,g} = Σ_ν ν(ν-1) E N_ν / (n(n-1))`.
pub fn pairing_probability_exact_r1(n: usize, g: usize, table: &ExactCountTable) -> Result<BigRational> {
    let mut acc = BigRational::zero();
    for nu in (3..=n).step_by(2) {
        let e = expected_cycle_count_exact(n, g, nu, table)?;
        acc += e * BigRational::from_integer(((nu * (nu - 1)) as u64).into());
    }
    Ok(acc / BigRational::from_integer(((n * (n - 1)) as u64).into()))
}

/// Multiplicities `ν -> N_ν` of the non-trivial cycle lengths.
pub fn cycle_length_counts(sigma: &CPermutation) -> BTreeMap<usize, u64> {
    let mut out = BTreeMap::new();
    for c in sigma.nontrivial_cycles() {
        *out.entry(c.len()).or_insert(0) += 1;
    }
    out
}

/// `Π_ν (N_ν)_{α_ν}`, the mixed falling-factorial statistic.
pub fn mixed_falling_factorial(counts: &BTreeMap<usize, u64>, alpha: &[(usize, u32)]) -> f64 {
    alpha
        .iter()
        .map(|&(nu, a)| {
            let x = counts.get(&nu).copied().unwrap_or(0);
            falling(x as usize, a as usize).to_f64().unwrap_or(f64::INFINITY)
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_from_seed;

    #[test]
    fn small_exact_counts() {
        let t = ExactCountTable::new(12, 6).unwrap();
        assert_eq!(t.get(3, 1), &BigUint::from(2u32));
        assert_eq!(t.get(5, 1), &BigUint::from(20u32));
        for n in 0..=12 {
            assert_eq!(t.get(n, 0), &BigUint::one());
        }
        assert_eq!(t.get(2, 1), &BigUint::ZERO);
        assert_eq!(t.get(3, 2), &BigUint::ZERO);
    }

    #[test]
    fn count_modes_agree() {
        for (n, g) in [(3, 1), (5, 1), (9, 3), (40, 7), (301, 10), (2000, 12)] {
            let exact = count_cperms(n, g, CountMode::Exact).unwrap().ln();
            let log = count_cperms(n, g, CountMode::Log).unwrap().ln();
            assert!(
                (exact - log).abs() <= 1e-10 * exact.abs().max(1.0),
                "{n} {g}: {exact} vs {log}"
            );
        }
    }

    #[test]
    fn infeasible_counts_are_zero() {
        assert_eq!(
            count_cperms(4, 2, CountMode::Exact).unwrap(),
            Count::Exact(BigUint::ZERO)
        );
        assert_eq!(count_cperms(4, 2, CountMode::Log).unwrap().ln(), f64::NEG_INFINITY);
    }

    #[test]
    fn exact_table_guard() {
        assert!(ExactCountTable::new(EXACT_LIMIT + 1, 1).is_err());
        assert!(LogCountTable::new(10, LOG_GENUS_LIMIT + 1).is_err());
    }

    #[test]
    fn cycle_type_counts() {
        let id = CycleType::from_pairs(&[(1, 7)]);
        assert_eq!(count_by_cycle_type(&id), BigUint::one());
        assert_eq!(
            count_by_cycle_type(&CycleType::from_pairs(&[(3, 1)])),
            BigUint::from(2u32)
        );
        assert_eq!(
            count_by_cycle_type(&CycleType::from_pairs(&[(1, 2), (3, 1)])),
            BigUint::from(20u32)
        );
        assert_eq!(
            count_by_cycle_type(&CycleType::from_pairs(&[(2, 1)])),
            BigUint::ZERO
        );
    }

    #[test]
    fn types_sum_to_table() {
        let t = ExactCountTable::new(11, 5).unwrap();
        for n in 1..=11 {
            for g in 0..=(n - 1) / 2 {
                let sum: BigUint = valid_cycle_types(n, g).iter().map(count_by_cycle_type).sum();
                assert_eq!(&sum, t.get(n, g), "n={n} g={g}");
            }
        }
    }

    #[test]
    fn expected_counts_small() {
        let t = ExactCountTable::new(5, 2).unwrap();
        assert_eq!(
            expected_cycle_count_exact(3, 1, 3, &t).unwrap(),
            BigRational::one()
        );
        assert_eq!(
            expected_cycle_count_exact(5, 1, 3, &t).unwrap(),
            BigRational::one()
        );
        assert_eq!(
            expected_cycle_count_exact(5, 1, 5, &t).unwrap(),
            BigRational::zero()
        );
        assert!(expected_cycle_count_exact(5, 1, 4, &t).is_err());
    }

    #[test]
    fn expected_counts_log_vs_exact() {
        let exact = ExactCountTable::new(1000, 10).unwrap();
        let log = LogCountTable::new(1000, 10).unwrap();
        for nu in [3, 5, 7, 9] {
            let a = expected_cycle_count_exact(1000, 10, nu, &exact)
                .unwrap()
                .to_f64()
                .unwrap();
            let b = expected_cycle_count_log(1000, 10, nu, &log).unwrap();
            assert!((a - b).abs() <= 1e-9 * a, "{nu}: {a} {b}");
        }
    }

    #[test]
    fn rational_route_matches_table() {
        let t = ExactCountTable::new(300, 12).unwrap();
        for (n, g) in [(5, 1), (40, 7), (300, 12)] {
            for nu in [3, 5, 7, 9] {
                assert_eq!(
                    expected_cycle_count_rational(n, g, nu).unwrap(),
                    expected_cycle_count_exact(n, g, nu, &t).unwrap(),
                    "n={n} g={g} nu={nu}"
                );
            }
        }
    }

    #[test]
    fn log_mode_precision_at_scale() {
        let log = LogCountTable::new(100_000, 30).unwrap();
        for nu in [3, 5, 7] {
            let exact = expected_cycle_count_rational(100_000, 30, nu)
                .unwrap()
                .to_f64()
                .unwrap();
            let approx = expected_cycle_count_log(100_000, 30, nu, &log).unwrap();
            assert!((exact - approx).abs() <= 1e-10 * exact, "{nu}: {exact} {approx}");
        }
    }

    #[test]
    fn lambda_bound_values() {
        assert!((lambda_bound(1000, 10, 3).unwrap() - 10.0).abs() < 1e-12);
        assert!((lambda_bound(1000, 10, 5).unwrap() - 900.0 / (5.0 * 970.0)).abs() < 1e-12);
        assert!((lambda_bound(1000, 10, 7).unwrap() - 27000.0 / (7.0 * 970.0 * 970.0)).abs() < 1e-12);
        assert!(lambda_bound(30, 10, 5).is_err());
        assert!(lambda_bound(100, 1, 4).is_err());
        assert_eq!(
            lambda_bound_rational(1000, 10, 5).unwrap(),
            BigRational::new(900.into(), 4850.into())
        );
    }

    #[test]
    fn genus_zero_is_identity() {
        let mut rng = stream_from_seed(5);
        for mode in [CountMode::Exact, CountMode::Log] {
            let s = sample_cperm(9, 0, mode, &mut rng).unwrap();
            assert_eq!(s, CPermutation::identity(9));
        }
    }

    #[test]
    fn samplers_respect_invariants() {
        let mut rng = stream_from_seed(9);
        for mode in [CountMode::Exact, CountMode::Log] {
            for (n, g) in [(3, 1), (8, 3), (51, 10), (200, 33)] {
                let sampler = CPermSampler::new(n, g, mode).unwrap();
                for _ in 0..200 {
                    let s = sampler.sample(&mut rng);
                    assert_eq!(s.n(), n);
                    assert_eq!(s.cycle_count(), n - 2 * g);
                    assert_eq!(s.genus(), g);
                    assert!(s.nontrivial_cycles().all(|c| c.len() % 2 == 1));
                    let mut seen = vec![false; n];
                    for c in s.cycles() {
                        for x in c {
                            assert!(!seen[x as usize]);
                            seen[x as usize] = true;
                        }
                    }
                    assert!(seen.into_iter().all(|b| b));
                }
            }
        }
    }

    #[test]
    fn three_cycles_equally_likely() {
        let mut rng = stream_from_seed(21);
        let sampler = CPermSampler::new(3, 1, CountMode::Exact).unwrap();
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|_| sampler.sample(&mut rng).images()[0] == 1)
            .count() as f64;
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((hits - draws as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn serde_uses_one_based_cycles() {
        let s = CPermutation::from_cycles(4, &[vec![2u32, 0, 3]]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[[1,4,3],[2]]");
        let back: CPermutation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(CPermutation::from_cycles(3, &[vec![0u32, 1]]).is_err());
        assert!(CPermutation::from_cycles(3, &[vec![0u32], vec![0]]).is_err());
    }

    #[test]
    fn pairing_event() {
        let s = CPermutation::from_cycles(6, &[vec![0u32, 1, 4], vec![2, 3, 5]]).unwrap();
        assert!(pairs_in_distinct_cycles(&s, 2));
        let s = CPermutation::from_cycles(6, &[vec![0u32, 1, 2, 3, 4]]).unwrap();
        assert!(pairs_in_distinct_cycles(&s, 1));
        assert!(!pairs_in_distinct_cycles(&s, 2));
        assert!(!pairs_in_distinct_cycles(&CPermutation::identity(6), 1));
    }

    #[test]
    fn pairing_probability_zero_genus() {
        let mut rng = stream_from_seed(4);
        let est = pairing_probability(20, 0, 2, 1000, &mut rng).unwrap();
        assert_eq!(est.hits, 0);
        assert!(pairing_probability(3, 0, 2, 10, &mut rng).is_err());
    }
}
