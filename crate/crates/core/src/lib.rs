//! Random unicellular maps of high genus.
//!
//! A uniform unicellular map of size `n` and genus `g` is sampled as a
//! C-decorated tree: a uniform plane tree with `n` edges together with a
//! uniform permutation of its `n + 1` vertices whose cycles all have odd
//! length and number `n + 1 - 2g`. Merging the vertices of each cycle gives
//! the underlying multigraph of the map. This crate samples those objects,
//! counts them exactly, enumerates the short simple cycles of the resulting
//! graphs and compares the rescaled cycle lengths with their Poisson limit.
//!
//! Module map:
//!
//! * [`trees`]: plane trees, the cycle-lemma sampler and path counting.
//! * [`cperm`]: odd-cycle permutations, exact and log-domain counting and
//!   sampling, cycle statistics.
//! * [`maps`]: decorated trees, underlying multigraphs and their kernels.
//! * [`cycles`]: bounded-length simple cycle enumeration on kernels.
//! * [`stats`]: limit intensities, systole law and goodness-of-fit tools.
//! * [`oracle`]: exhaustive enumerations used as ground truth.
//! * [`experiment`]: the reproducible, parallel Monte Carlo harness.
//! * [`validate`]: the self-check suites exposed by the command line.

pub mod combin;
pub mod cperm;
pub mod cycles;
pub mod error;
pub mod experiment;
pub mod maps;
pub mod oracle;
pub mod par;
pub mod rng;
pub mod stats;
pub mod trees;
pub mod validate;

pub use error::{Error, Result};
