//! Experiment definition files: TOML documents with explicit keys
//! mirroring the chain configuration and ensemble plan.
//!
//! Minimal example (all omitted keys take the defaults shown in the
//! README; `damp_well` and `t_final` are required):
//!
//! ```toml
//! [chain]
//! chi = 0.01
//! damp_well = 3
//! t_final = 80.0
//! sample_interval = 0.5
//!
//! [ensemble]
//! n_trajectories = 100000
//! base_seed = 42
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::commands::CliError;
use crate::correlations::CriterionFamily;
use crate::engine::EnsemblePlan;
use crate::model::{ChainConfig, ChainParams};

fn default_n_wells() -> usize {
    3
}

fn default_one() -> f64 {
    1.0
}

fn default_pump_rate() -> f64 {
    10.0
}

fn default_pump_well() -> usize {
    1
}

fn default_dt() -> f64 {
    1e-3
}

fn default_trajectories() -> u64 {
    100_000
}

fn default_seed() -> u64 {
    42
}

fn default_batches() -> u64 {
    EnsemblePlan::DEFAULT_BATCHES
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    #[serde(default = "default_n_wells")]
    pub n_wells: usize,
    #[serde(default)]
    pub chi: f64,
    #[serde(default = "default_one")]
    pub tunneling: f64,
    #[serde(default = "default_pump_rate")]
    pub pump_rate: f64,
    #[serde(default = "default_one")]
    pub damp_rate: f64,
    #[serde(default = "default_pump_well")]
    pub pump_well: usize,
    pub damp_well: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_final: f64,
    /// Explicit sample times; merged with the interval grid and the
    /// analysis times.
    #[serde(default)]
    pub sample_times: Option<Vec<f64>>,
    /// Even sampling grid `0, dt_s, 2 dt_s, ... <= t_final`.
    #[serde(default)]
    pub sample_interval: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(default = "default_trajectories")]
    pub n_trajectories: u64,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    #[serde(default = "default_batches")]
    pub n_batches: u64,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            n_trajectories: default_trajectories(),
            base_seed: default_seed(),
            n_batches: default_batches(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Measurement times for criteria reports; defaults to `[t_final]`.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    /// Criterion families to report; defaults to all six.
    #[serde(default)]
    pub criteria: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; overridden by `--out`.
    #[serde(default)]
    pub dir: Option<String>,
}

/// Raw deserialized spec file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub chain: ChainSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Validated experiment: configuration, plan, measurement times, and the
/// requested criterion families.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub config: ChainConfig,
    pub plan: EnsemblePlan,
    pub analysis_times: Vec<f64>,
    pub criteria: Vec<CriterionFamily>,
    pub output_dir: Option<String>,
}

impl ExperimentSpec {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let raw = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read spec file {}: {e}", path.display())))?;
        Self::from_toml(&raw)
    }

    pub fn from_toml(raw: &str) -> Result<Self, CliError> {
        let file: SpecFile =
            toml::from_str(raw).map_err(|e| CliError::Io(format!("spec parse error: {e}")))?;
        Self::from_file(file)
    }

    pub fn from_file(file: SpecFile) -> Result<Self, CliError> {
        let chain = &file.chain;

        let analysis_times = match &file.analysis.times {
            Some(times) if !times.is_empty() => times.clone(),
            _ => vec![chain.t_final],
        };

        let mut sample_times = chain.sample_times.clone().unwrap_or_default();
        if let Some(interval) = chain.sample_interval {
            if interval <= 0.0 {
                return Err(CliError::Config(format!(
                    "sample_interval must be > 0, got {interval}"
                )));
            }
            let mut k = 0u64;
            loop {
                let t = k as f64 * interval;
                if t > chain.t_final * (1.0 + 1e-12) {
                    break;
                }
                sample_times.push(t.min(chain.t_final));
                k += 1;
            }
        }
        sample_times.extend_from_slice(&analysis_times);
        sample_times.sort_by(|a, b| a.partial_cmp(b).expect("finite sample times"));
        sample_times.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + a.abs()));

        let config = ChainConfig::new(ChainParams {
            n_wells: chain.n_wells,
            chi: chain.chi,
            tunneling: chain.tunneling,
            pump_rate: chain.pump_rate,
            damp_rate: chain.damp_rate,
            pump_well: chain.pump_well,
            damp_well: chain.damp_well,
            dt: chain.dt,
            t_final: chain.t_final,
            sample_times,
        })
        .map_err(|e| CliError::Config(e.to_string()))?;

        for &t in &analysis_times {
            if config.sample_index(t).is_none() {
                return Err(CliError::Config(format!(
                    "analysis time {t} is not among the sample times"
                )));
            }
        }

        let plan = EnsemblePlan::new(
            file.ensemble.n_trajectories,
            file.ensemble.base_seed,
            file.ensemble.n_batches,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;

        let criteria = match &file.analysis.criteria {
            Some(names) => names
                .iter()
                .map(|s| s.parse::<CriterionFamily>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::Config)?,
            None => CriterionFamily::ALL.to_vec(),
        };

        Ok(Self {
            config,
            plan,
            analysis_times,
            criteria,
            output_dir: file.output.dir,
        })
    }

    /// Same experiment with a different ensemble size.
    pub fn with_trajectories(mut self, n: u64) -> Result<Self, CliError> {
        self.plan = self
            .plan
            .with_trajectories(n)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(self)
    }

    /// Same experiment with a different base seed.
    pub fn with_seed(mut self, seed: u64) -> Result<Self, CliError> {
        self.plan = EnsemblePlan::new(
            self.plan.n_trajectories(),
            seed,
            self.plan.n_batches(),
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(self)
    }
}
