//! Mergeable sufficient statistics for ensemble moments, and the
//! checkpoint container that makes runs resumable and re-analysable.
//!
//! For each sample time the accumulator keeps three raw sums over
//! trajectories: `S1[i] = sum a_i`, `S2[i][j] = sum a_i a_j`, and
//! `H2[i][j] = sum conj(a_i) a_j`. `S2` is symmetric and `H2` Hermitian
//! bit-for-bit because complex multiplication commutes componentwise.
//! Sums are kept per batch: the batch spread provides statistical error
//! bars, and batch-wise addition makes merging deterministic.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{EngineError, EnsemblePlan};
use crate::correlations::CorrelationSnapshot;
use crate::model::ChainConfig;
use crate::C64;

/// Raw moment sums at one sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MomentSumsRepr", into = "MomentSumsRepr")]
pub struct MomentSums {
    n_wells: usize,
    s1: Vec<C64>,
    s2: Vec<C64>,
    h2: Vec<C64>,
}

impl MomentSums {
    pub fn zeros(n_wells: usize) -> Self {
        Self {
            n_wells,
            s1: vec![C64::new(0.0, 0.0); n_wells],
            s2: vec![C64::new(0.0, 0.0); n_wells * n_wells],
            h2: vec![C64::new(0.0, 0.0); n_wells * n_wells],
        }
    }

    pub fn n_wells(&self) -> usize {
        self.n_wells
    }

    pub fn s1(&self, i: usize) -> C64 {
        self.s1[i]
    }

    pub fn s2(&self, i: usize, j: usize) -> C64 {
        self.s2[i * self.n_wells + j]
    }

    pub fn h2(&self, i: usize, j: usize) -> C64 {
        self.h2[i * self.n_wells + j]
    }

    /// Add one trajectory's amplitudes.
    pub fn add_state(&mut self, amps: &[C64]) {
        let n = self.n_wells;
        debug_assert_eq!(amps.len(), n);
        for i in 0..n {
            self.s1[i] += amps[i];
            let ai = amps[i];
            let ai_conj = ai.conj();
            let row = i * n;
            for j in 0..n {
                self.s2[row + j] += ai * amps[j];
                self.h2[row + j] += ai_conj * amps[j];
            }
        }
    }

    fn add_sums(&mut self, other: &MomentSums) {
        for (a, b) in self.s1.iter_mut().zip(&other.s1) {
            *a += b;
        }
        for (a, b) in self.s2.iter_mut().zip(&other.s2) {
            *a += b;
        }
        for (a, b) in self.h2.iter_mut().zip(&other.h2) {
            *a += b;
        }
    }

    fn snapshot(&self, count: u64) -> CorrelationSnapshot {
        let n = self.n_wells;
        let nf = count as f64;
        let m: Vec<C64> = self.s1.iter().map(|s| s / nf).collect();
        let mut c = vec![C64::new(0.0, 0.0); n * n];
        let mut d = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                c[i * n + j] = self.s2[i * n + j] / nf - m[i] * m[j];
                d[i * n + j] = self.h2[i * n + j] / nf - m[i].conj() * m[j];
            }
        }
        CorrelationSnapshot::new(m, c, d, count)
    }
}

/// Flat serialization layout: interleaved `[re, im, re, im, ...]`,
/// row-major for the matrix blocks.
#[derive(Serialize, Deserialize)]
struct MomentSumsRepr {
    s1: Vec<f64>,
    s2: Vec<f64>,
    h2: Vec<f64>,
}

fn flatten(v: &[C64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn unflatten(v: &[f64]) -> Vec<C64> {
    v.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect()
}

impl From<MomentSums> for MomentSumsRepr {
    fn from(m: MomentSums) -> Self {
        Self {
            s1: flatten(&m.s1),
            s2: flatten(&m.s2),
            h2: flatten(&m.h2),
        }
    }
}

impl TryFrom<MomentSumsRepr> for MomentSums {
    type Error = String;

    fn try_from(r: MomentSumsRepr) -> Result<Self, Self::Error> {
        if r.s1.len() % 2 != 0 {
            return Err("odd-length complex array".into());
        }
        let n = r.s1.len() / 2;
        if r.s2.len() != 2 * n * n || r.h2.len() != 2 * n * n {
            return Err(format!(
                "moment block sizes inconsistent with {n} wells: s2 = {}, h2 = {}",
                r.s2.len(),
                r.h2.len()
            ));
        }
        Ok(Self {
            n_wells: n,
            s1: unflatten(&r.s1),
            s2: unflatten(&r.s2),
            h2: unflatten(&r.h2),
        })
    }
}

/// A value with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// Standard error of the mean from batch means: the spread of the batch
/// values divided by sqrt(n_batches). NaN with fewer than two batches.
pub fn batch_std_err(batch_values: &[f64]) -> f64 {
    let b = batch_values.len();
    if b < 2 {
        return f64::NAN;
    }
    let bf = b as f64;
    let mean = batch_values.iter().sum::<f64>() / bf;
    let var = batch_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (bf - 1.0);
    (var / bf).sqrt()
}

/// Per-time, per-batch moment sums for a whole ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentAccumulator {
    n_wells: usize,
    sample_times: Vec<f64>,
    counts: Vec<u64>,
    batches: Vec<Vec<MomentSums>>,
}

impl MomentAccumulator {
    pub fn empty(n_wells: usize, sample_times: Vec<f64>, n_batches: u64) -> Self {
        let n_times = sample_times.len();
        Self {
            n_wells,
            sample_times,
            counts: vec![0; n_batches as usize],
            batches: vec![vec![MomentSums::zeros(n_wells); n_times]; n_batches as usize],
        }
    }

    pub fn n_wells(&self) -> usize {
        self.n_wells
    }

    pub fn n_batches(&self) -> usize {
        self.batches.len()
    }

    pub fn sample_times(&self) -> &[f64] {
        &self.sample_times
    }

    /// Total number of accumulated trajectories.
    pub fn count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub(crate) fn absorb_batch(&mut self, batch: usize, count: u64, sums: Vec<MomentSums>) {
        debug_assert_eq!(sums.len(), self.sample_times.len());
        self.counts[batch] += count;
        for (acc, add) in self.batches[batch].iter_mut().zip(&sums) {
            acc.add_sums(add);
        }
    }

    /// Merge another accumulator over the same sample grid and batch
    /// layout, batch by batch. When each batch of a partition is produced
    /// wholly by one side (the canonical scheme), the merged result is
    /// bit-identical regardless of merge order.
    pub fn merge(&mut self, other: &MomentAccumulator) -> Result<(), EngineError> {
        if self.n_wells != other.n_wells
            || self.sample_times != other.sample_times
            || self.batches.len() != other.batches.len()
        {
            return Err(EngineError::MergeMismatch(
                "well count, sample times, and batch count must match".into(),
            ));
        }
        for b in 0..self.batches.len() {
            self.counts[b] += other.counts[b];
            for (acc, add) in self.batches[b].iter_mut().zip(&other.batches[b]) {
                acc.add_sums(add);
            }
        }
        Ok(())
    }

    pub fn time_index(&self, t: f64) -> Result<usize, EngineError> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.sample_times
            .iter()
            .position(|&s| (s - t).abs() <= tol)
            .ok_or(EngineError::UnknownSampleTime(t))
    }

    /// Sum of all batch sums at one sample time, folded in batch order.
    pub fn totals(&self, time_index: usize) -> MomentSums {
        let mut total = MomentSums::zeros(self.n_wells);
        for batch in &self.batches {
            total.add_sums(&batch[time_index]);
        }
        total
    }

    /// Population of one well at a sample time: `<|a_i|^2> - 1/2` with a
    /// batch-means standard error.
    pub fn population(&self, well: usize, t: f64) -> Result<Estimate, EngineError> {
        let ti = self.time_index(t)?;
        let totals = self.totals(ti);
        let value = totals.h2(well, well).re / self.count() as f64 - 0.5;
        let batch_values: Vec<f64> = self
            .batches
            .iter()
            .zip(&self.counts)
            .map(|(sums, &c)| sums[ti].h2(well, well).re / c as f64 - 0.5)
            .collect();
        Ok(Estimate {
            value,
            std_err: batch_std_err(&batch_values),
        })
    }

    /// Populations of every well at a sample time.
    pub fn populations(&self, t: f64) -> Result<Vec<Estimate>, EngineError> {
        (0..self.n_wells).map(|w| self.population(w, t)).collect()
    }

    /// Gaussian moment snapshot (means plus both central covariance
    /// blocks) at a sample time, from the full ensemble.
    pub fn snapshot(&self, t: f64) -> Result<CorrelationSnapshot, EngineError> {
        let ti = self.time_index(t)?;
        Ok(self.totals(ti).snapshot(self.count()))
    }

    /// One snapshot per batch, for error propagation through derived
    /// quantities.
    pub fn batch_snapshots(&self, t: f64) -> Result<Vec<CorrelationSnapshot>, EngineError> {
        let ti = self.time_index(t)?;
        Ok(self
            .batches
            .iter()
            .zip(&self.counts)
            .map(|(sums, &c)| sums[ti].snapshot(c))
            .collect())
    }

    fn validate(&self) -> Result<(), String> {
        if self.counts.len() != self.batches.len() {
            return Err("count/batch length mismatch".into());
        }
        for batch in &self.batches {
            if batch.len() != self.sample_times.len() {
                return Err("batch time-series length mismatch".into());
            }
            for sums in batch {
                if sums.n_wells != self.n_wells {
                    return Err("well count mismatch in moment sums".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid checkpoint: {0}")]
    Invalid(String),
}

/// Self-describing dump of a (possibly partial) ensemble run.
///
/// Serialized as JSON; field layout is documented in the README and kept
/// stable under `format_version`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub config: ChainConfig,
    pub config_sha256: String,
    pub plan: EnsemblePlan,
    pub completed_trajectories: u64,
    pub accumulator: MomentAccumulator,
}

impl Checkpoint {
    pub const FORMAT_VERSION: u32 = 1;

    pub fn new(config: ChainConfig, plan: EnsemblePlan, accumulator: MomentAccumulator) -> Self {
        let config_sha256 = Self::config_hash(&config);
        let completed_trajectories = accumulator.count();
        Self {
            format_version: Self::FORMAT_VERSION,
            config,
            config_sha256,
            plan,
            completed_trajectories,
            accumulator,
        }
    }

    /// Hex SHA-256 of the canonical JSON encoding of the configuration.
    pub fn config_hash(config: &ChainConfig) -> String {
        let json = serde_json::to_string(config).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let json = serde_json::to_string(self)?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        let raw = fs::read_to_string(path)?;
        let cp: Checkpoint = serde_json::from_str(&raw)?;
        if cp.format_version != Self::FORMAT_VERSION {
            return Err(CheckpointError::Invalid(format!(
                "unsupported format version {}",
                cp.format_version
            )));
        }
        if cp.config_sha256 != Self::config_hash(&cp.config) {
            return Err(CheckpointError::Invalid(
                "configuration hash does not match stored configuration".into(),
            ));
        }
        cp.accumulator.validate().map_err(CheckpointError::Invalid)?;
        if cp.accumulator.n_wells() != cp.config.n_wells()
            || cp.accumulator.sample_times() != cp.config.sample_times()
        {
            return Err(CheckpointError::Invalid(
                "accumulator shape does not match configuration".into(),
            ));
        }
        if cp.accumulator.count() != cp.completed_trajectories {
            return Err(CheckpointError::Invalid(
                "trajectory count does not match accumulator".into(),
            ));
        }
        if cp.accumulator.n_batches() as u64 != cp.plan.n_batches() {
            return Err(CheckpointError::Invalid(
                "batch count does not match plan".into(),
            ));
        }
        Ok(cp)
    }
}
