//! Reproducible Monte Carlo runs over uniform unicellular maps.
//!
//! Sample `s` draws from its own ChaCha stream seeded by
//! [`derive_seed`](crate::rng::derive_seed)`(master_seed, s)`, so results do
//! not depend on scheduling or the number of workers. Samples are processed
//! in chunks; after each chunk the output file is brought up to date, so an
//! interrupted run leaves a valid partial file behind.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cperm::{feasible, CPermSampler};
use crate::cycles::{enumerate_short_cycles, shortest_cycle, CycleRecord, EnumerationOptions};
use crate::maps::{CDecoratedTree, Kernel};
use crate::rng::{derive_seed, stream_from_seed};
use crate::stats::{
    covariance, intensity, intensity_k, mean_stderr, pk, poisson_gof, systole_cdf, CovarianceReport,
    PoissonReport, ScalingParams, WindowSpec, MIN_GOF_SAMPLES, TOL,
};
use crate::{par, Error, Result};

/// Samples between two flushes of the output file.
pub const CHUNK: u64 = 1000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub g: usize,
    pub samples: u64,
    pub x_max: f64,
    pub windows: WindowSpec,
    pub master_seed: u64,
    pub workers: Option<usize>,
    pub include_loops: bool,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Keep searching beyond the cap until the shortest cycle is found.
    pub full_systole: bool,
}

impl ExperimentConfig {
    /// Windows `[0, 1)` and `[1, 2)`, loops excluded, no output file.
    pub fn new(n: usize, g: usize, samples: u64) -> Self {
        ExperimentConfig {
            n,
            g,
            samples,
            x_max: 2.0,
            windows: WindowSpec::unit_windows(2),
            master_seed: 0,
            workers: None,
            include_loops: false,
            output: None,
            format: OutputFormat::Json,
            full_systole: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("at least one sample is required"));
        }
        if !(self.x_max > 0.0 && self.x_max.is_finite()) {
            return Err(Error::invalid("x_max must be positive"));
        }
        if self.windows.windows().iter().any(|w| w.1 > self.x_max) {
            return Err(Error::invalid("windows must lie inside [0, x_max)"));
        }
        if self.n == 0 || !feasible(self.n + 1, self.g) {
            return Err(Error::Infeasible { n: self.n, g: self.g });
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be positive"));
        }
        Ok(())
    }
}

/// Outcome of one sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleResult {
    pub sample_id: u64,
    pub seed: u64,
    /// Length of the shortest cycle, if any was found.
    pub systole: Option<u32>,
    /// Junction count of that cycle (smallest among equally short ones).
    pub shortest_k: Option<u32>,
    pub window_counts: Vec<u64>,
    /// Cycles of length at most the cap, sorted.
    pub cycles: Vec<CycleRecord>,
    pub truncated: bool,
}

/// Read-only state shared by all samples of a run.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub scaling: Option<ScalingParams>,
    pub cap: u32,
    pub sampler: CPermSampler,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let scaling = (cfg.g > 0)
            .then(|| ScalingParams::new(cfg.n as u64, cfg.g as u64))
            .transpose()?;
        let cap = scaling.map_or(0, |s| s.cap(cfg.x_max));
        Ok(Prepared {
            scaling,
            cap,
            sampler: CPermSampler::auto(cfg.n + 1, cfg.g)?,
        })
    }
}

/// Draws the decorated tree of sample `index`.
pub fn sample_instance(prep: &Prepared, master_seed: u64, index: u64) -> Result<CDecoratedTree> {
    let mut rng = stream_from_seed(derive_seed(master_seed, index));
    CDecoratedTree::sample(&prep.sampler, &mut rng)
}

pub fn run_sample(prep: &Prepared, cfg: &ExperimentConfig, index: u64) -> Result<SampleResult> {
    let seed = derive_seed(cfg.master_seed, index);
    let dt = sample_instance(prep, cfg.master_seed, index)?;
    let kernel = Kernel::from_decorated_tree(&dt);
    let list = enumerate_short_cycles(&kernel, &EnumerationOptions::new(prep.cap));
    let cycles: Vec<CycleRecord> = list
        .records
        .into_iter()
        .filter(|r| cfg.include_loops || !r.is_loop)
        .collect();
    let mut window_counts = vec![0u64; cfg.windows.len()];
    if let Some(scaling) = &prep.scaling {
        for r in &cycles {
            if let Some(w) = cfg.windows.locate(r.len, scaling) {
                window_counts[w] += 1;
            }
        }
    }
    let mut shortest = cycles.iter().min().copied();
    if shortest.is_none() && cfg.full_systole && !kernel.is_empty() {
        shortest = shortest_cycle(&kernel, prep.cap.max(1).saturating_mul(2), cfg.include_loops);
    }
    Ok(SampleResult {
        sample_id: index,
        seed,
        systole: shortest.map(|r| r.len),
        shortest_k: shortest.map(|r| r.k),
        window_counts,
        cycles,
        truncated: list.truncated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub scale: Option<f64>,
    pub cap: u32,
    pub results: Vec<SampleResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KReport {
    pub k: u32,
    pub mean: f64,
    pub stderr: f64,
    pub lambda_k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowReport {
    pub window: (f64, f64),
    pub lambda: f64,
    pub mean: f64,
    pub poisson: Option<PoissonReport>,
    pub by_k: Vec<KReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCovariance {
    pub first: usize,
    pub second: usize,
    pub report: CovarianceReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CdfPoint {
    pub z: f64,
    pub empirical: f64,
    pub theory: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KShare {
    pub k: u32,
    pub empirical: f64,
    pub theory: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub samples: usize,
    pub windows: Vec<WindowReport>,
    pub covariances: Vec<PairCovariance>,
    pub systole_cdf: Vec<CdfPoint>,
    pub shortest_k: Vec<KShare>,
    pub truncated_samples: usize,
    pub samples_without_cycle: usize,
}

impl ExperimentSummary {
    pub fn window_counts(&self, w: usize) -> Vec<u64> {
        self.results.iter().map(|r| r.window_counts[w]).collect()
    }

    /// Per-sample number of cycles in window `w` with junction count `k`.
    pub fn window_k_counts(&self, w: usize, k: u32) -> Vec<u64> {
        let Some(scaling) = self.scaling() else {
            return vec![0; self.results.len()];
        };
        self.results
            .iter()
            .map(|r| {
                r.cycles
                    .iter()
                    .filter(|c| c.k == k && self.config.windows.locate(c.len, &scaling) == Some(w))
                    .count() as u64
            })
            .collect()
    }

    fn scaling(&self) -> Option<ScalingParams> {
        (self.config.g > 0).then(|| {
            ScalingParams::new(self.config.n as u64, self.config.g as u64).expect("validated config")
        })
    }

    /// Fraction of samples whose systole is at most `z L`.
    pub fn systole_fraction(&self, z: f64) -> f64 {
        let Some(scaling) = self.scaling() else {
            return 0.0;
        };
        let hits = self
            .results
            .iter()
            .filter(|r| {
                r.systole
                    .is_some_and(|s| 12.0 * scaling.g as f64 * (s as f64).powi(2) <= z * z * scaling.n as f64)
            })
            .count();
        hits as f64 / self.results.len() as f64
    }

    /// Fraction of samples (among those with a cycle) whose shortest cycle
    /// has junction count `k`.
    pub fn shortest_k_fraction(&self, k: u32) -> f64 {
        let with: Vec<u32> = self.results.iter().filter_map(|r| r.shortest_k).collect();
        if with.is_empty() {
            return 0.0;
        }
        with.iter().filter(|&&x| x == k).count() as f64 / with.len() as f64
    }

    pub fn report(&self) -> Result<ExperimentReport> {
        let nw = self.config.windows.len();
        let mut windows = Vec::with_capacity(nw);
        let max_k = self
            .results
            .iter()
            .flat_map(|r| r.cycles.iter().map(|c| c.k))
            .max()
            .unwrap_or(0)
            .max(3);
        for (w, &(x, y)) in self.config.windows.windows().iter().enumerate() {
            let counts = self.window_counts(w);
            let lambda = intensity(x, y, TOL)?;
            let mean = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
            let poisson = if counts.len() >= MIN_GOF_SAMPLES && self.config.g > 0 {
                Some(poisson_gof(&counts, lambda)?)
            } else {
                None
            };
            let by_k = (1..=max_k)
                .map(|k| {
                    let xs: Vec<f64> = self.window_k_counts(w, k).into_iter().map(|c| c as f64).collect();
                    let (mean, stderr) = mean_stderr(&xs);
                    Ok(KReport {
                        k,
                        mean,
                        stderr,
                        lambda_k: intensity_k(x, y, k)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            windows.push(WindowReport {
                window: (x, y),
                lambda,
                mean,
                poisson,
                by_k,
            });
        }
        let mut covariances = Vec::new();
        if self.results.len() >= 2 {
            for i in 0..nw {
                for j in i + 1..nw {
                    covariances.push(PairCovariance {
                        first: i,
                        second: j,
                        report: covariance(&self.window_counts(i), &self.window_counts(j))?,
                    });
                }
            }
        }
        let mut zs: Vec<f64> = self
            .config
            .windows
            .windows()
            .iter()
            .flat_map(|w| [w.0, w.1])
            .filter(|&z| z > 0.0)
            .collect();
        zs.sort_by(f64::total_cmp);
        zs.dedup();
        let systole_cdf = zs
            .into_iter()
            .map(|z| {
                Ok(CdfPoint {
                    z,
                    empirical: self.systole_fraction(z),
                    theory: systole_cdf(z)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let shortest_k = (1..=4)
            .map(|k| {
                Ok(KShare {
                    k,
                    empirical: self.shortest_k_fraction(k),
                    theory: pk(k, 1e-9)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExperimentReport {
            samples: self.results.len(),
            windows,
            covariances,
            systole_cdf,
            shortest_k,
            truncated_samples: self.results.iter().filter(|r| r.truncated).count(),
            samples_without_cycle: self.results.iter().filter(|r| r.systole.is_none()).count(),
        })
    }
}

fn csv_header(cfg: &ExperimentConfig) -> String {
    let mut h = String::from("sample_id,seed,systole,shortest_k");
    for &(x, y) in cfg.windows.windows() {
        h.push_str(&format!(",count_{x}_{y}"));
    }
    h
}

fn csv_row(r: &SampleResult) -> String {
    let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut row = format!("{},{},{},{}", r.sample_id, r.seed, opt(r.systole), opt(r.shortest_k));
    for c in &r.window_counts {
        row.push_str(&format!(",{c}"));
    }
    row
}

/// Writes `value` to `path` through a temporary file and a rename.
fn write_json_atomic(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn json_document(summary: &ExperimentSummary, report: Option<&ExperimentReport>) -> Result<serde_json::Value> {
    Ok(serde_json::json!({
        "config": summary.config,
        "scale": summary.scale,
        "cap": summary.cap,
        "completed": summary.results.len(),
        "samples": summary.results,
        "report": report,
    }))
}

/// Runs the experiment, writing the selected output file as it goes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let prep = Prepared::new(cfg)?;
    run_prepared(cfg, &prep)
}

pub fn run_prepared(cfg: &ExperimentConfig, prep: &Prepared) -> Result<ExperimentSummary> {
    let mut summary = ExperimentSummary {
        config: cfg.clone(),
        scale: prep.scaling.map(|s| s.scale),
        cap: prep.cap,
        results: Vec::with_capacity(cfg.samples.min(1 << 20) as usize),
    };
    let mut csv = match (&cfg.output, cfg.format) {
        (Some(path), OutputFormat::Csv) => {
            let mut f = BufWriter::new(
                OpenOptions::new()
                    .create(true)
                    .write(true)
                    .truncate(true)
                    .open(path)?,
            );
            writeln!(f, "{}", csv_header(cfg))?;
            f.flush()?;
            Some(f)
        }
        _ => None,
    };
    let mut start = 0;
    while start < cfg.samples {
        let end = (start + CHUNK).min(cfg.samples);
        let chunk = par::with_workers(cfg.workers, || {
            par::map(start..end, |i| run_sample(prep, cfg, i))
        });
        for r in chunk {
            let r = r?;
            if let Some(f) = csv.as_mut() {
                writeln!(f, "{}", csv_row(&r))?;
            }
            summary.results.push(r);
        }
        if let Some(f) = csv.as_mut() {
            f.flush()?;
        }
        if let (Some(path), OutputFormat::Json) = (&cfg.output, cfg.format) {
            let report = if end == cfg.samples {
                Some(summary.report()?)
            } else {
                None
            };
            write_json_atomic(path, &json_document(&summary, report.as_ref())?)?;
        }
        start = end;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new(10, 1, 5).validate().is_ok());
        assert!(ExperimentConfig::new(10, 6, 5).validate().is_err());
        assert!(ExperimentConfig::new(10, 1, 0).validate().is_err());
        let mut c = ExperimentConfig::new(10, 1, 5);
        c.x_max = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn genus_zero_has_no_cycles() {
        let s = run_experiment(&ExperimentConfig::new(50, 0, 20)).unwrap();
        assert!(s.results.iter().all(|r| r.cycles.is_empty() && r.systole.is_none()));
    }

    #[test]
    fn double_loop_samples() {
        let mut c = ExperimentConfig::new(2, 1, 10);
        c.include_loops = true;
        let s = run_experiment(&c).unwrap();
        for r in &s.results {
            assert_eq!(r.cycles.iter().filter(|c| c.is_loop).count(), 2);
            assert_eq!(r.systole, Some(1));
        }
    }

    #[test]
    fn results_do_not_depend_on_workers() {
        let mut c = ExperimentConfig::new(300, 4, 60);
        c.master_seed = 11;
        c.workers = Some(1);
        let a = run_experiment(&c).unwrap();
        c.workers = Some(3);
        let b = run_experiment(&c).unwrap();
        assert_eq!(a, ExperimentSummary { config: a.config.clone(), ..b });
    }

    #[test]
    fn csv_and_json_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::new(200, 3, 30);
        c.output = Some(dir.path().join("run.csv"));
        c.format = OutputFormat::Csv;
        run_experiment(&c).unwrap();
        let text = fs::read_to_string(dir.path().join("run.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "sample_id,seed,systole,shortest_k,count_0_1,count_1_2");
        assert_eq!(lines.len(), 31);

        c.output = Some(dir.path().join("run.json"));
        c.format = OutputFormat::Json;
        run_experiment(&c).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
        assert_eq!(v["completed"], 30);
        assert!(v["report"].is_object());
    }
}
