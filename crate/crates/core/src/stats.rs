//! Limit intensities, the systole law and goodness-of-fit tools.
//!
//! The limiting intensity of cycles with rescaled length in `[x, y)` is
//! `λ(x, y) = ∫_x^y (cosh t - 1) / t dt`, which splits by junction count as
//! `Σ_k λ_k(x, y)` with `λ_k(x, y) = (y^{2k} - x^{2k}) / ((2k) (2k)!)`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};
use statrs::function::gamma::ln_gamma;

use crate::combin::{binomial, CompensatedSum};
use crate::{Error, Result};

/// `n`, `g` and the length scale `L = sqrt(n / (12 g))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub n: u64,
    pub g: u64,
    pub scale: f64,
}

impl ScalingParams {
    pub fn new(n: u64, g: u64) -> Result<Self> {
        if g == 0 || n == 0 {
            return Err(Error::invalid("scaling needs n >= 1 and g >= 1"));
        }
        Ok(ScalingParams {
            n,
            g,
            scale: (n as f64 / (12.0 * g as f64)).sqrt(),
        })
    }

    /// `L <= 1`: rescaled lengths are then too coarse to be meaningful.
    pub fn is_degenerate(&self) -> bool {
        self.n <= 12 * self.g
    }

    pub fn rescaled(&self, len: u32) -> f64 {
        len as f64 / self.scale
    }

    /// `ceil(x_max L)`, the largest length any window can contain.
    pub fn cap(&self, x_max: f64) -> u32 {
        let mut c = (x_max * self.scale).ceil().max(1.0) as u32;
        while c > 1 && self.at_least(c - 1, x_max) {
            c -= 1;
        }
        while !self.at_least(c, x_max) {
            c += 1;
        }
        c
    }

    /// `len / L >= x`, decided as `12 g len^2 >= x^2 n`.
    pub fn at_least(&self, len: u32, x: f64) -> bool {
        12.0 * self.g as f64 * (len as f64).powi(2) >= x * x * self.n as f64
    }
}

/// Disjoint half-open windows `[x_i, y_i)` on the rescaled length axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    windows: Vec<(f64, f64)>,
}

impl WindowSpec {
    pub fn new(windows: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, y) in &windows {
            if !(x >= 0.0 && x < y && y.is_finite()) {
                return Err(Error::invalid(format!("bad window [{x}, {y})")));
            }
        }
        let mut sorted = windows.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::invalid("windows overlap"));
        }
        Ok(WindowSpec { windows })
    }

    pub fn unit_windows(count: usize) -> Self {
        WindowSpec {
            windows: (0..count).map(|i| (i as f64, i as f64 + 1.0)).collect(),
        }
    }

    pub fn windows(&self) -> &[(f64, f64)] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn x_max(&self) -> f64 {
        self.windows.iter().map(|w| w.1).fold(0.0, f64::max)
    }

    /// Index of the window containing `len / L`.
    pub fn locate(&self, len: u32, scaling: &ScalingParams) -> Option<usize> {
        self.windows
            .iter()
            .position(|&(x, y)| scaling.at_least(len, x) && !scaling.at_least(len, y))
    }
}

fn check_range(x: f64, y: f64) -> Result<()> {
    if !(0.0 <= x && x <= y && y.is_finite()) {
        return Err(Error::invalid(format!("need 0 <= x <= y, got ({x}, {y})")));
    }
    Ok(())
}

/// `λ(x, y)` by its power series, stopped once the remaining tail is
/// provably below `tol`.
pub fn intensity(x: f64, y: f64, tol: f64) -> Result<f64> {
    check_range(x, y)?;
    if tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let (x2, y2) = (x * x, y * y);
    // ty = y^{2k} / (2k)!, likewise tx.
    let (mut tx, mut ty) = (x2 / 2.0, y2 / 2.0);
    let mut sum = CompensatedSum::default();
    let mut k = 1.0f64;
    loop {
        sum.add((ty - tx) / (2.0 * k));
        let next = (2.0 * k + 1.0) * (2.0 * k + 2.0);
        tx *= x2 / next;
        ty *= y2 / next;
        k += 1.0;
        let ratio = y2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        if ratio < 0.5 && ty / (2.0 * k) / (1.0 - ratio) < tol {
            break;
        }
    }
    Ok(sum.value())
}

/// Default tolerance for [`intensity`].
pub const TOL: f64 = 1e-14;

/// `λ_k(x, y) = (y^{2k} - x^{2k}) / ((2k) (2k)!)`.
pub fn intensity_k(x: f64, y: f64, k: u32) -> Result<f64> {
    check_range(x, y)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let two_k = 2.0 * k as f64;
    let ln_den = two_k.ln() + ln_gamma(two_k + 1.0);
    let term = |t: f64| {
        if t == 0.0 {
            0.0
        } else {
            (two_k * t.ln() - ln_den).exp()
        }
    };
    if k <= 40 {
        let den = two_k * (1..=2 * k).map(f64::from).product::<f64>();
        return Ok((y.powi(2 * k as i32) - x.powi(2 * k as i32)) / den);
    }
    Ok(term(y) - term(x))
}

/// `[z^m] ((1 + z) / (1 - z)^2)^k`, the number of weighted compositions of
/// `m` into `k` parts with weight `Π (2 m_i + 1)`.
pub fn composition_weight(m: usize, k: usize) -> BigUint {
    if k == 0 {
        return BigUint::from(u8::from(m == 0));
    }
    (0..=k.min(m))
        .map(|i| binomial(k, i) * binomial(m - i + 2 * k - 1, 2 * k - 1))
        .sum()
}

/// `Λ_k(m; M)` as an exact rational.
pub fn lambda_k_m_exact(m: usize, k: usize, big_m: usize) -> Result<BigRational> {
    if k == 0 || big_m == 0 {
        return Err(Error::invalid("need k >= 1 and M >= 1"));
    }
    let den = BigUint::from(2 * k) * BigUint::from(2 * big_m * big_m).pow(k as u32);
    Ok(BigRational::new(
        composition_weight(m, k).into(),
        den.into(),
    ))
}

/// `Λ_k(m; M) = Σ_{|m| = m} Π(2 m_i + 1) / (2k) (2 M^2)^{-k}`.
pub fn lambda_k_m(m: usize, k: usize, big_m: usize) -> Result<f64> {
    Ok(lambda_k_m_exact(m, k, big_m)?
        .to_f64()
        .unwrap_or(f64::NAN))
}

/// `Σ_{m=a}^{b-1} Λ_k(m; M)` exactly.
pub fn lambda_k_window(a: usize, b: usize, k: usize, big_m: usize) -> Result<BigRational> {
    let mut acc = BigRational::zero();
    for m in a..b {
        acc += lambda_k_m_exact(m, k, big_m)?;
    }
    Ok(acc)
}

/// `P(Z <= z) = 1 - exp(-λ(0, z))` for the rescaled systole `Z`.
pub fn systole_cdf(z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::invalid("z must be non-negative"));
    }
    Ok(1.0 - (-intensity(0.0, z, TOL)?).exp())
}

/// Upper end of the integration range for [`pk`].
pub const PK_CUTOFF: f64 = 30.0;

/// Limit probability that the shortest cycle is made of `k` tree paths:
/// `∫_0^∞ z^{2k-1} / (2k)! exp(-λ(0, z)) dz`.
pub fn pk(k: u32, tol: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let two_k = 2.0 * k as f64;
    let ln_fact = ln_gamma(two_k + 1.0);
    let f = |z: f64| -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        let lam = intensity(0.0, z, 1e-16).unwrap_or(f64::INFINITY);
        ((two_k - 1.0) * z.ln() - ln_fact - lam).exp()
    };
    // Split at integers so each piece is smooth on a modest scale.
    let mut total = CompensatedSum::default();
    let pieces = PK_CUTOFF as usize;
    for i in 0..pieces {
        let (a, b) = (i as f64, i as f64 + 1.0);
        total.add(adaptive_simpson(&f, a, b, tol / pieces as f64, 40));
    }
    Ok(total.value())
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn step(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// Chi-square goodness of fit after pooling sparse cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// 99.9th percentile of the reference distribution.
    pub critical_999: f64,
    pub bins: usize,
}

impl ChiSquareReport {
    pub fn passes_999(&self) -> bool {
        self.statistic <= self.critical_999
    }
}

/// Pearson's test of `observed` against the cell probabilities `probs`.
///
/// Cells whose expected count falls below `min_expected` are pooled; if the
/// pool is still too small it is merged with the smallest remaining cell.
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> Result<ChiSquareReport> {
    if observed.len() != probs.len() {
        return Err(Error::SizeMismatch("observed and expected cells differ".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::invalid("no observations"));
    }
    let n = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        if p < 0.0 {
            return Err(Error::invalid("negative probability"));
        }
        let e = p * n;
        if e < min_expected {
            pool.0 += o as f64;
            pool.1 += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pool.1 > 0.0 || pool.0 > 0.0 {
        if pool.1 >= min_expected || cells.is_empty() {
            cells.push(pool);
        } else {
            let smallest = cells
                .iter_mut()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty");
            smallest.0 += pool.0;
            smallest.1 += pool.1;
        }
    }
    Ok(chi_square_from_cells(&cells))
}

fn chi_square_from_cells(cells: &[(f64, f64)]) -> ChiSquareReport {
    let statistic: f64 = cells
        .iter()
        .map(|&(o, e)| {
            if e > 0.0 {
                (o - e).powi(2) / e
            } else if o > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    let dof = cells.len().saturating_sub(1);
    let (p_value, critical_999) = if dof == 0 {
        (1.0, 0.0)
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        (dist.sf(statistic), dist.inverse_cdf(0.999))
    };
    ChiSquareReport {
        statistic,
        dof,
        p_value,
        critical_999,
        bins: cells.len(),
    }
}

/// Fewest samples accepted by [`poisson_gof`].
pub const MIN_GOF_SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonReport {
    pub samples: usize,
    pub lambda: f64,
    pub mean: f64,
    pub variance: f64,
    /// `variance / mean`; 1 for the degenerate all-zero case.
    pub dispersion: f64,
    /// Standard error of the mean under the Poisson hypothesis.
    pub mean_stderr: f64,
    /// Empirical `E[X (X - 1)]`, to be compared with `λ^2`.
    pub factorial_moment_2: f64,
    pub chi_square: ChiSquareReport,
    pub degenerate: bool,
}

/// Compares per-sample counts with `Poisson(λ)`.
///
/// Cells are `{0, 1, 2, ≥3}`, merged from the top until each holds an
/// expected count of at least five.
pub fn poisson_gof(counts: &[u64], lambda: f64) -> Result<PoissonReport> {
    if counts.len() < MIN_GOF_SAMPLES {
        return Err(Error::invalid(format!(
            "need at least {MIN_GOF_SAMPLES} samples, got {}",
            counts.len()
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("λ must be finite and non-negative"));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let variance = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let fm2 = counts.iter().map(|&c| (c as f64) * (c as f64 - 1.0)).sum::<f64>() / n;
    if lambda == 0.0 {
        let degenerate = counts.iter().all(|&c| c == 0);
        let chi_square = ChiSquareReport {
            statistic: if degenerate { 0.0 } else { f64::INFINITY },
            dof: 0,
            p_value: if degenerate { 1.0 } else { 0.0 },
            critical_999: 0.0,
            bins: 1,
        };
        return Ok(PoissonReport {
            samples: counts.len(),
            lambda,
            mean,
            variance,
            dispersion: if degenerate { 1.0 } else { f64::INFINITY },
            mean_stderr: 0.0,
            factorial_moment_2: fm2,
            chi_square,
            degenerate,
        });
    }
    let pois = Poisson::new(lambda).map_err(|e| Error::invalid(e.to_string()))?;
    let probs = [pois.pmf(0), pois.pmf(1), pois.pmf(2)];
    let mut cells: Vec<(f64, f64)> = vec![(0.0, 0.0); 4];
    for (i, p) in probs.iter().enumerate() {
        cells[i].1 = p * n;
    }
    cells[3].1 = (1.0 - probs.iter().sum::<f64>()).max(0.0) * n;
    for &c in counts {
        cells[(c as usize).min(3)].0 += 1.0;
    }
    while cells.len() > 1 && cells.last().is_some_and(|c| c.1 < 5.0) {
        let last = cells.pop().expect("non-empty");
        let prev = cells.last_mut().expect("non-empty");
        prev.0 += last.0;
        prev.1 += last.1;
    }
    while cells.len() > 1 && cells[0].1 < 5.0 {
        let first = cells.remove(0);
        cells[0].0 += first.0;
        cells[0].1 += first.1;
    }
    Ok(PoissonReport {
        samples: counts.len(),
        lambda,
        mean,
        variance,
        dispersion: if mean > 0.0 { variance / mean } else { f64::INFINITY },
        mean_stderr: (lambda / n).sqrt(),
        factorial_moment_2: fm2,
        chi_square: chi_square_from_cells(&cells),
        degenerate: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CovarianceReport {
    pub covariance: f64,
    pub stderr: f64,
}

impl CovarianceReport {
    /// `|cov| / stderr`; zero when both vanish.
    pub fn z_score(&self) -> f64 {
        if self.stderr > 0.0 {
            self.covariance.abs() / self.stderr
        } else if self.covariance == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Sample covariance with the standard error of the mean cross product.
pub fn covariance(xs: &[u64], ys: &[u64]) -> Result<CovarianceReport> {
    if xs.len() != ys.len() {
        return Err(Error::SizeMismatch("covariance inputs differ in length".into()));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("covariance needs two samples"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().map(|&v| v as f64).sum::<f64>() / n;
    let my = ys.iter().map(|&v| v as f64).sum::<f64>() / n;
    let prods: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (x as f64 - mx) * (y as f64 - my))
        .collect();
    let cov = prods.iter().sum::<f64>() / (n - 1.0);
    let mp = prods.iter().sum::<f64>() / n;
    let var_p = prods.iter().map(|p| (p - mp).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(CovarianceReport {
        covariance: cov,
        stderr: (var_p / n).sqrt(),
    })
}

/// Mean and standard error of a sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_from_seed;
    use num_traits::One;
    use rand_distr::Distribution;

    #[test]
    fn intensity_values() {
        assert_eq!(intensity(0.7, 0.7, TOL).unwrap(), 0.0);
        assert!((intensity(0.0, 1.0, TOL).unwrap() - 0.2606513).abs() < 1e-6);
        assert!((intensity(1.0, 2.0, TOL).unwrap() - 0.9216528).abs() < 1e-6);
        assert!(intensity(2.0, 1.0, TOL).is_err());
        assert!(intensity(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn intensity_is_additive() {
        for (x, y, z) in [(0.0, 0.5, 1.0), (0.3, 1.7, 4.0), (1.0, 2.0, 3.5), (2.0, 9.0, 20.0)] {
            let lhs = intensity(x, z, TOL).unwrap();
            let rhs = intensity(x, y, TOL).unwrap() + intensity(y, z, TOL).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1.0), "{x} {y} {z}");
        }
    }

    #[test]
    fn intensity_k_values_and_sum() {
        assert!((intensity_k(0.0, 1.0, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((intensity_k(0.0, 1.0, 2).unwrap() - 1.0 / 96.0).abs() < 1e-15);
        for (x, y) in [(0.0, 1.0), (1.0, 2.0), (0.5, 3.0)] {
            let s: f64 = (1..=50).map(|k| intensity_k(x, y, k).unwrap()).sum();
            assert!((s - intensity(x, y, TOL).unwrap()).abs() < 1e-12);
        }
        let big = intensity_k(0.0, 5.0, 60).unwrap();
        assert!(big > 0.0 && big < 1e-60);
    }

    #[test]
    fn lambda_k_m_values() {
        assert!((lambda_k_m(0, 1, 10).unwrap() - 0.0025).abs() < 1e-15);
        for big_m in [1usize, 3, 10] {
            let want = BigRational::new(1.into(), (16 * big_m.pow(4)).into());
            assert_eq!(lambda_k_m_exact(0, 2, big_m).unwrap(), want);
        }
        for m in 0..6 {
            assert_eq!(composition_weight(m, 1), BigUint::from(2 * m + 1));
        }
        // (2·0+1)(2·2+1)·2 + (2·1+1)^2 = 19.
        assert_eq!(composition_weight(2, 2), BigUint::from(19u32));
        for big_m in [1, 10, 57] {
            let s = lambda_k_window(0, big_m, 1, big_m).unwrap();
            assert_eq!(s, BigRational::new(BigUint::one().into(), 4u32.into()));
        }
    }

    #[test]
    fn systole_cdf_values() {
        assert_eq!(systole_cdf(0.0).unwrap(), 0.0);
        assert!((systole_cdf(1.0).unwrap() - 0.22945).abs() < 1e-5);
        assert!((systole_cdf(2.0).unwrap() - 0.6934284).abs() < 1e-6);
        let z = 1.3;
        assert_eq!(
            systole_cdf(z).unwrap(),
            1.0 - (-intensity(0.0, z, TOL).unwrap()).exp()
        );
    }

    #[test]
    fn pk_values() {
        let p: Vec<f64> = (1..=4).map(|k| pk(k, 1e-10).unwrap()).collect();
        assert!((p[0] - 0.792).abs() < 0.002, "{p:?}");
        assert!((p[1] - 0.177).abs() < 0.002);
        assert!((p[2] - 0.028).abs() < 0.002);
        let total: f64 = (1..=25).map(|k| pk(k, 1e-10).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-4, "{total}");
    }

    #[test]
    fn scaling_and_windows() {
        let s = ScalingParams::new(1_000_000, 100).unwrap();
        assert!((s.scale - (1e6f64 / 1200.0).sqrt()).abs() < 1e-12);
        assert_eq!(s.cap(2.0), 58);
        let w = WindowSpec::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(w.locate(28, &s), Some(0));
        assert_eq!(w.locate(29, &s), Some(1));
        assert_eq!(w.locate(58, &s), None);
        assert!(WindowSpec::new(vec![(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(WindowSpec::new(vec![(1.0, 1.0)]).is_err());
        // L = 1 exactly: length 1 sits at the boundary of [0,1) and [1,2).
        let s = ScalingParams::new(12, 1).unwrap();
        assert_eq!(w.locate(1, &s), Some(1));
        assert!(ScalingParams::new(10, 0).is_err());
    }

    #[test]
    fn poisson_gof_on_synthetic_draws() {
        let mut rng = stream_from_seed(12);
        let pois = rand_distr::Poisson::new(0.26).unwrap();
        let counts: Vec<u64> = (0..10_000).map(|_| pois.sample(&mut rng) as u64).collect();
        let r = poisson_gof(&counts, 0.26).unwrap();
        assert!((0.9..=1.1).contains(&r.dispersion), "{r:?}");
        assert!(r.chi_square.p_value > 1e-3);
        assert!((r.factorial_moment_2 - 0.26f64.powi(2)).abs() < 0.02);
        assert!(poisson_gof(&counts[..50], 0.26).is_err());
    }

    #[test]
    fn poisson_gof_degenerate() {
        let r = poisson_gof(&[0; 200], 0.0).unwrap();
        assert!(r.degenerate && r.chi_square.p_value == 1.0);
    }

    #[test]
    fn chi_square_pools_sparse_cells() {
        let r = chi_square_gof(&[50, 50, 0, 0], &[0.5, 0.5, 0.0, 0.0], 5.0).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 1);
        let r = chi_square_gof(&[100, 0], &[0.5, 0.5], 5.0).unwrap();
        assert!(!r.passes_999());
    }

    #[test]
    fn covariance_of_independent_draws() {
        let mut rng = stream_from_seed(8);
        let pois = rand_distr::Poisson::new(1.0).unwrap();
        let xs: Vec<u64> = (0..10_000).map(|_| pois.sample(&mut rng) as u64).collect();
        let ys: Vec<u64> = (0..10_000).map(|_| pois.sample(&mut rng) as u64).collect();
        let c = covariance(&xs, &ys).unwrap();
        assert!(c.z_score() < 4.0);
        let c = covariance(&xs, &xs).unwrap();
        assert!(c.z_score() > 10.0);
    }
}
