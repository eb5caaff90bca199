//! Self-check suites: exact counters against brute force, sampler
//! uniformity, kernel enumeration against the naive oracle and the
//! deterministic and Monte Carlo checks on permutation and tree statistics.
//!
//! Every check is a plain function with explicit sizes so that the test
//! suites can run the same code at their own scale.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use crate::cperm::{
    count_cperms, expected_cycle_count_rational, lambda_bound_rational, pairing_probability,
    pairing_probability_exact_r1, Count, CountMode, CPermSampler, ExactCountTable, EXACT_LIMIT,
};
use crate::cycles::{enumerate_short_cycles, EnumerationOptions};
use crate::maps::{build_underlying_graph, kernelize, CDecoratedTree, Kernel};
use crate::oracle::{
    cperm_counts_by_genus, enumerate_cperms, enumerate_path_pairs_and_unions, enumerate_plane_trees,
    naive_cycle_enumeration,
};
use crate::rng::{stream, stream_from_seed};
use crate::stats::{
    chi_square_gof, intensity, intensity_k, lambda_k_window, mean_stderr, pk, systole_cdf, TOL,
};
use crate::trees::{catalan, count_oriented_paths, marked_pattern_count_formula, sample_plane_tree};
use crate::{Error, Result};

/// One named comparison of an observed value with its expectation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub observed: String,
    pub expected: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, observed: impl fmt::Display, expected: impl fmt::Display) -> Self {
        Check {
            name: name.into(),
            passed,
            observed: observed.to_string(),
            expected: expected.to_string(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: observed {}, expected {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            self.expected
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Counters,
    Samplers,
    Kernel,
    Lemmas,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counters" => Ok(Suite::Counters),
            "samplers" => Ok(Suite::Samplers),
            "kernel" => Ok(Suite::Kernel),
            "lemmas" => Ok(Suite::Lemmas),
            "all" => Ok(Suite::All),
            other => Err(Error::invalid(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Counters => counts_vs_brute_force(9)?,
        Suite::Samplers => sampler_checks(7, 100_000, seed)?,
        Suite::Kernel => vec![kernel_vs_naive(1000, 40, 5, seed)?],
        Suite::Lemmas => lemma_checks(seed)?,
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Counters, Suite::Samplers, Suite::Kernel, Suite::Lemmas] {
                all.extend(run_suite(s, seed)?.checks);
            }
            all
        }
    };
    Ok(SuiteReport {
        suite,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// `h(n, g)` in both counting modes against a scan of all permutations.
pub fn counts_vs_brute_force(n_max: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        let brute = cperm_counts_by_genus(n)?;
        for (g, &b) in brute.iter().enumerate() {
            let Count::Exact(exact) = count_cperms(n, g, CountMode::Exact)? else {
                unreachable!()
            };
            out.push(Check::new(
                format!("exact count h({n},{g})"),
                exact == BigUint::from(b),
                &exact,
                b,
            ));
            let ln = count_cperms(n, g, CountMode::Log)?.ln();
            let ok = if b == 0 {
                ln == f64::NEG_INFINITY
            } else {
                ((ln - (b as f64).ln()).exp() - 1.0).abs() <= 1e-10
            };
            out.push(Check::new(
                format!("log count h({n},{g})"),
                ok,
                format!("{:.12e}", ln.exp()),
                b,
            ));
        }
    }
    for (n, g, want) in [(3usize, 1usize, 2u32), (5, 1, 20)] {
        let got = count_cperms(n, g, CountMode::Exact)?;
        let ok = matches!(&got, Count::Exact(x) if *x == BigUint::from(want));
        out.push(Check::new(format!("h({n},{g}) value"), ok, format!("{got:?}"), want));
    }
    Ok(out)
}

fn uniformity_check<K: Ord + Clone>(name: String, support: Vec<K>, draws: &BTreeMap<K, u64>) -> Result<Check> {
    let total: u64 = draws.values().sum();
    let known: u64 = support.iter().map(|k| draws.get(k).copied().unwrap_or(0)).sum();
    if known != total || support.is_empty() {
        return Ok(Check::new(name, false, format!("{} draws outside support", total - known), "0"));
    }
    let observed: Vec<u64> = support.iter().map(|k| draws.get(k).copied().unwrap_or(0)).collect();
    let probs = vec![1.0 / support.len() as f64; support.len()];
    let r = chi_square_gof(&observed, &probs, 5.0)?;
    Ok(Check::new(
        name,
        r.passes_999(),
        format!("chi2 {:.2} on {} dof", r.statistic, r.dof),
        format!("<= {:.2}", r.critical_999),
    ))
}

/// Chi-square of the plane tree sampler against all `Cat_n` trees.
pub fn tree_sampler_uniformity(n: usize, draws: u64, seed: u64) -> Result<Check> {
    let support: Vec<Vec<bool>> = enumerate_plane_trees(n)?.iter().map(|t| t.word().to_vec()).collect();
    let mut rng = stream_from_seed(seed);
    let mut hist = BTreeMap::new();
    for _ in 0..draws {
        *hist.entry(sample_plane_tree(n, &mut rng)?.word().to_vec()).or_insert(0u64) += 1;
    }
    uniformity_check(format!("tree sampler n={n}"), support, &hist)
}

/// Chi-square of the permutation sampler against all of `fsc_{n, n-2g}`.
pub fn cperm_sampler_uniformity(n: usize, g: usize, mode: CountMode, draws: u64, seed: u64) -> Result<Check> {
    let support: Vec<Vec<u32>> = enumerate_cperms(n, g)?.iter().map(|s| s.images()).collect();
    let sampler = CPermSampler::new(n, g, mode)?;
    let mut rng = stream_from_seed(seed);
    let mut hist = BTreeMap::new();
    for _ in 0..draws {
        *hist.entry(sampler.sample(&mut rng).images()).or_insert(0u64) += 1;
    }
    uniformity_check(format!("{mode:?} permutation sampler n={n} g={g}"), support, &hist)
}

pub fn sampler_checks(n_max: usize, draws: u64, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        out.push(tree_sampler_uniformity(n, draws, seed ^ n as u64)?);
    }
    for n in 1..=n_max {
        for g in 0..=(n - 1) / 2 {
            for (i, mode) in [CountMode::Exact, CountMode::Log].into_iter().enumerate() {
                let s = seed ^ ((n as u64) << 8 | (g as u64) << 4 | i as u64);
                out.push(cperm_sampler_uniformity(n, g, mode, draws, s)?);
            }
        }
    }
    Ok(out)
}

/// Random decorated tree with `1 <= n <= n_max` edges and genus at most `g_max`.
pub fn random_small_instance<R: Rng + ?Sized>(n_max: usize, g_max: usize, rng: &mut R) -> Result<CDecoratedTree> {
    let n = rng.random_range(1..=n_max);
    let g = rng.random_range(0..=g_max.min(n / 2));
    CDecoratedTree::sample(&CPermSampler::new(n + 1, g, CountMode::Exact)?, rng)
}

/// All cycles found by the kernel (both constructions) against the naive
/// search on the full multigraph.
pub fn kernel_vs_naive(instances: u64, n_max: usize, g_max: usize, seed: u64) -> Result<Check> {
    let mut mismatches = 0u64;
    let mut first = None;
    let mut cycles = 0usize;
    for i in 0..instances {
        let mut rng = stream(seed, i);
        let dt = random_small_instance(n_max, g_max, &mut rng)?;
        let cap = dt.n_edges();
        let graph = build_underlying_graph(&dt.tree, &dt.sigma)?;
        let naive = naive_cycle_enumeration(&graph, cap)?;
        let opts = EnumerationOptions::new(cap as u32);
        let fast = enumerate_short_cycles(&Kernel::from_decorated_tree(&dt), &opts);
        let general = enumerate_short_cycles(&kernelize(&graph), &opts);
        cycles += naive.len();
        if fast.truncated || fast.records != naive || general.records != naive {
            mismatches += 1;
            first.get_or_insert(i);
        }
    }
    Ok(Check::new(
        format!("kernel vs naive enumeration, {instances} instances"),
        mismatches == 0,
        match first {
            Some(i) => format!("{mismatches} mismatches (first at instance {i})"),
            None => format!("0 mismatches over {cycles} cycles"),
        },
        "0 mismatches",
    ))
}

/// `E N_3 ∈ [g - 5g²/(n-6g), g]`, in exact arithmetic.
pub fn three_cycle_interval(n: usize, g: usize) -> Result<Check> {
    let e = expected_cycle_count_rational(n, g, 3)?;
    let gr = BigRational::from_integer(g.into());
    let lo = &gr - BigRational::new((5 * g * g).into(), (n - 6 * g).into());
    Ok(Check::new(
        format!("three-cycle mean interval n={n} g={g}"),
        lo <= e && e <= gr,
        format!("{:.9}", e.to_f64().unwrap_or(f64::NAN)),
        format!("[{:.9}, {g}]", lo.to_f64().unwrap_or(f64::NAN)),
    ))
}

/// `E N_ν <= λ_ν`, in exact arithmetic.
pub fn cycle_bound(n: usize, g: usize, nu: usize) -> Result<Check> {
    let e = expected_cycle_count_rational(n, g, nu)?;
    let b = lambda_bound_rational(n, g, nu)?;
    Ok(Check::new(
        format!("cycle mean bound n={n} g={g} nu={nu}"),
        e <= b,
        format!("{:.6e}", e.to_f64().unwrap_or(f64::NAN)),
        format!("<= {:.6e}", b.to_f64().unwrap_or(f64::NAN)),
    ))
}

/// Probability that the pairs `(1,2)` land in distinct cycles, against
/// `6g/n²` (±25%) and the hard bound `2200 g/n²`.
pub fn pairing_checks(n: usize, g: usize, samples: u64, seed: u64) -> Result<Vec<Check>> {
    let est = pairing_probability(n, g, 1, samples, &mut stream_from_seed(seed))?;
    let (nf, gf) = (n as f64, g as f64);
    let target = 6.0 * gf / (nf * nf);
    let hard = 2200.0 * gf / (nf * nf);
    let mut out = Vec::new();
    if n <= EXACT_LIMIT {
        let exact = pairing_probability_exact_r1(n, g, &ExactCountTable::new(n, g)?)?
            .to_f64()
            .unwrap_or(f64::NAN);
        out.push(Check::new(
            format!("pairing probability vs exact n={n} g={g}"),
            (est.mean - exact).abs() <= 4.0 * est.stderr,
            format!("{:.6e} ± {:.1e}", est.mean, est.stderr),
            format!("{exact:.6e}"),
        ));
    }
    out.extend([
        Check::new(
            format!("pairing probability n={n} g={g}"),
            (0.8 * target..=1.25 * target).contains(&est.mean),
            format!("{:.6e} ± {:.1e}", est.mean, est.stderr),
            format!("[{:.6e}, {:.6e}]", 0.8 * target, 1.25 * target),
        ),
        Check::new(
            format!("pairing hard bound n={n} g={g}"),
            est.mean <= hard + 4.0 * est.stderr,
            format!("{:.6e}", est.mean),
            format!("<= {hard:.6e} + 4 se"),
        ),
    ]);
    Ok(out)
}

/// Mean oriented path counts per length against `2ℓ C(2n, n-ℓ) / Cat_n`.
pub fn path_means(n: usize, trees: u64, len_max: usize, seed: u64) -> Result<Vec<Check>> {
    let mut per_len = vec![Vec::with_capacity(trees as usize); len_max + 1];
    for i in 0..trees {
        let t = sample_plane_tree(n, &mut stream(seed, i))?;
        let c = count_oriented_paths(&t, len_max)?;
        for (l, v) in per_len.iter_mut().enumerate().skip(1) {
            v.push(c[l] as f64);
        }
    }
    let cat = BigRational::from_integer(catalan(n).into());
    let mut out = Vec::new();
    for (l, xs) in per_len.iter().enumerate().skip(1) {
        let exact = BigRational::from_integer(marked_pattern_count_formula(n, l).into()) / &cat;
        let exact = exact.to_f64().unwrap_or(f64::NAN);
        let (mean, se) = mean_stderr(xs);
        out.push(Check::new(
            format!("path count mean n={n} len={l}"),
            (mean - exact).abs() <= 4.0 * se,
            format!("{mean:.4} ± {se:.4}"),
            format!("{exact:.4}"),
        ));
    }
    Ok(out)
}

/// Identities between the limit intensities.
pub fn identity_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (x, y) in [(0.0, 1.0), (1.0, 2.0), (0.5, 3.0), (0.0, 4.0)] {
        let total = intensity(x, y, TOL)?;
        let mut sum = 0.0;
        for k in 1..=50 {
            sum += intensity_k(x, y, k)?;
        }
        out.push(Check::new(
            format!("sum over k of intensities on [{x}, {y})"),
            (sum - total).abs() <= 1e-12,
            format!("{sum:.15}"),
            format!("{total:.15}"),
        ));
    }
    for big_m in [1usize, 10, 100] {
        let s = lambda_k_window(0, big_m, 1, big_m)?;
        out.push(Check::new(
            format!("discrete one-junction mass M={big_m}"),
            s == BigRational::new(1.into(), 4.into()),
            &s,
            "1/4",
        ));
    }
    for k in 1..=3usize {
        let limit = intensity_k(0.0, 1.0, k as u32)?;
        let errs = [10usize, 100, 1000]
            .into_iter()
            .map(|m| {
                let s = lambda_k_window(0, m, k, m)?;
                Ok((s.to_f64().unwrap_or(f64::NAN) - limit).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let decreasing = errs.windows(2).all(|w| w[1] < w[0]) || errs.iter().all(|&e| e <= 1e-15);
        out.push(Check::new(
            format!("discrete intensity convergence k={k}"),
            decreasing,
            format!("errors {:.3e} {:.3e} {:.3e}", errs[0], errs[1], errs[2]),
            "decreasing in M",
        ));
    }
    let total_pk: f64 = (1..=40).map(|k| pk(k, 1e-9)).sum::<Result<f64>>()?;
    out.push(Check::new(
        "shortest-cycle junction law sums to one",
        (total_pk - 1.0).abs() <= 1e-4,
        format!("{total_pk:.8}"),
        "1",
    ));
    for z in [0.5, 1.0, 2.0, 3.0] {
        let c = systole_cdf(z)?;
        let d = 1.0 - (-intensity(0.0, z, TOL)?).exp();
        out.push(Check::new(format!("systole law at {z}"), c == d, c, d));
    }
    Ok(out)
}

/// Exhaustive disjoint path pair and union shape bounds for small trees.
pub fn path_pair_checks(n_max: usize, len_max: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for l1 in 1..=len_max {
            for l2 in l1..=len_max {
                let r = enumerate_path_pairs_and_unions(n, l1, l2)?;
                out.push(Check::new(
                    format!("path pair bounds n={n} lens={l1},{l2}"),
                    r.bounds_hold(),
                    format!("{} pairs, {} shapes", r.disjoint_pairs, r.union_shapes),
                    format!("<= {} pairs, <= {} shapes", r.disjoint_bound, r.union_bound),
                ));
            }
        }
    }
    Ok(out)
}

/// The grid shared by the exact permutation-statistic checks.
pub const LEMMA_GRID: [(usize, usize); 3] = [(1_000, 10), (10_000, 30), (100_000, 100)];

pub fn lemma_checks(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (n, g) in LEMMA_GRID {
        out.push(three_cycle_interval(n, g)?);
        for nu in [5, 7, 9, 11] {
            out.push(cycle_bound(n, g, nu)?);
        }
    }
    out.extend(pairing_checks(300, 10, 1_000_000, seed)?);
    out.extend(path_means(200, 10_000, 12, seed)?);
    out.extend(identity_checks()?);
    out.extend(path_pair_checks(6, 3)?);
    Ok(out)
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
