//! Physical configuration of an open pumped/damped inline Bose-Hubbard
//! chain, the deterministic drift of its phase-space equations of motion,
//! the noise placement, and the exact non-interacting coupling structure.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

/// Relative tolerance used when snapping times onto the step grid.
const GRID_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
    #[error("no closed-form fixed point for chi != 0 (chi = {0})")]
    NonZeroChi(f64),
    #[error("coupling matrix is singular; no classical fixed point exists")]
    Singular,
}

/// Raw, unvalidated chain parameters as they appear in config files.
///
/// Well indices are 1-based here, matching the usual labelling of the
/// wells; [`ChainConfig`] stores them 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub n_wells: usize,
    pub chi: f64,
    pub tunneling: f64,
    pub pump_rate: f64,
    pub damp_rate: f64,
    pub pump_well: usize,
    pub damp_well: usize,
    pub dt: f64,
    pub t_final: f64,
    pub sample_times: Vec<f64>,
}

/// Validated experiment definition for one chain.
///
/// Rates are dimensionless: time is measured in units of the inverse loss
/// rate, so `damp_rate = 1` is the usual normalisation. Construction
/// rejects configurations whose step size cannot resolve the fastest rate
/// or whose sample times do not lie on the integration grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainParams", into = "ChainParams")]
pub struct ChainConfig {
    n_wells: usize,
    chi: f64,
    tunneling: f64,
    pump_rate: f64,
    damp_rate: f64,
    pump_well: usize,
    damp_well: usize,
    dt: f64,
    t_final: f64,
    sample_times: Vec<f64>,
    sample_steps: Vec<u64>,
    n_steps: u64,
}

impl ChainConfig {
    pub fn new(params: ChainParams) -> Result<Self, ModelError> {
        let ChainParams {
            n_wells,
            chi,
            tunneling,
            pump_rate,
            damp_rate,
            pump_well,
            damp_well,
            dt,
            t_final,
            sample_times,
        } = params;

        if n_wells < 2 {
            return Err(ModelError::InvalidConfig(format!(
                "n_wells must be >= 2, got {n_wells}"
            )));
        }
        if !(chi >= 0.0 && chi.is_finite()) {
            return Err(ModelError::InvalidConfig(format!("chi must be >= 0, got {chi}")));
        }
        if !tunneling.is_finite() {
            return Err(ModelError::InvalidConfig("tunneling must be finite".into()));
        }
        if !(pump_rate >= 0.0 && pump_rate.is_finite()) {
            return Err(ModelError::InvalidConfig(format!(
                "pump_rate must be >= 0, got {pump_rate}"
            )));
        }
        if !(damp_rate >= 0.0 && damp_rate.is_finite()) {
            return Err(ModelError::InvalidConfig(format!(
                "damp_rate must be >= 0, got {damp_rate}"
            )));
        }
        if pump_well == 0 || pump_well > n_wells {
            return Err(ModelError::InvalidConfig(format!(
                "pump_well must be in 1..={n_wells}, got {pump_well}"
            )));
        }
        if damp_well == 0 || damp_well > n_wells {
            return Err(ModelError::InvalidConfig(format!(
                "damp_well must be in 1..={n_wells}, got {damp_well}"
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(ModelError::InvalidConfig(format!("dt must be > 0, got {dt}")));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(ModelError::InvalidConfig(format!(
                "t_final must be > 0, got {t_final}"
            )));
        }

        // The step must resolve the fastest rate in the problem; the
        // nonlinear rate is estimated from the expected steady-state
        // population (pump_rate / damp_rate)^2, with the time unit itself
        // as fallback when damp_rate = 0.
        let n_est = if damp_rate > 0.0 {
            (pump_rate / damp_rate).powi(2)
        } else {
            pump_rate * pump_rate
        };
        let fastest = tunneling.abs().max(damp_rate).max(chi * n_est);
        if fastest > 0.0 && dt > 0.1 / fastest {
            return Err(ModelError::InvalidConfig(format!(
                "dt = {dt} too large: must be <= {} to resolve the fastest rate {fastest}",
                0.1 / fastest
            )));
        }

        let n_steps = grid_step(t_final, dt).ok_or_else(|| {
            ModelError::InvalidConfig(format!(
                "t_final = {t_final} is not an integer multiple of dt = {dt}"
            ))
        })?;

        if sample_times.is_empty() {
            return Err(ModelError::InvalidConfig("sample_times must be non-empty".into()));
        }
        let mut sample_steps = Vec::with_capacity(sample_times.len());
        for (k, &t) in sample_times.iter().enumerate() {
            if !(0.0..=t_final).contains(&t) {
                return Err(ModelError::InvalidConfig(format!(
                    "sample time {t} outside [0, {t_final}]"
                )));
            }
            if k > 0 && t <= sample_times[k - 1] {
                return Err(ModelError::InvalidConfig(
                    "sample_times must be strictly increasing".into(),
                ));
            }
            let step = grid_step(t, dt).ok_or_else(|| {
                ModelError::InvalidConfig(format!(
                    "sample time {t} is not an integer multiple of dt = {dt}"
                ))
            })?;
            sample_steps.push(step);
        }

        Ok(Self {
            n_wells,
            chi,
            tunneling,
            pump_rate,
            damp_rate,
            pump_well: pump_well - 1,
            damp_well: damp_well - 1,
            dt,
            t_final,
            sample_times,
            sample_steps,
            n_steps,
        })
    }

    pub fn n_wells(&self) -> usize {
        self.n_wells
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn tunneling(&self) -> f64 {
        self.tunneling
    }

    pub fn pump_rate(&self) -> f64 {
        self.pump_rate
    }

    pub fn damp_rate(&self) -> f64 {
        self.damp_rate
    }

    /// 0-based index of the pumped well.
    pub fn pump_well(&self) -> usize {
        self.pump_well
    }

    /// 0-based index of the damped well.
    pub fn damp_well(&self) -> usize {
        self.damp_well
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn sample_times(&self) -> &[f64] {
        &self.sample_times
    }

    /// Step indices at which states are recorded (parallel to `sample_times`).
    pub fn sample_steps(&self) -> &[u64] {
        &self.sample_steps
    }

    pub fn n_steps(&self) -> u64 {
        self.n_steps
    }

    /// Index into `sample_times` of the sample closest to `t`, if `t`
    /// matches one within grid tolerance.
    pub fn sample_index(&self, t: f64) -> Option<usize> {
        let tol = GRID_TOL * self.dt.max(t.abs());
        self.sample_times
            .iter()
            .position(|&s| (s - t).abs() <= tol.max(GRID_TOL))
    }

    /// Amplitude magnitude beyond which a trajectory is declared divergent.
    /// Physical amplitudes stay near pump_rate / damp_rate, so this only
    /// trips on stepsize or parameter pathologies.
    pub fn divergence_threshold(&self) -> f64 {
        let scale = if self.damp_rate > 0.0 {
            self.pump_rate / self.damp_rate
        } else {
            self.pump_rate
        };
        1e6 * (scale + 1.0)
    }

    /// The same chain with wells relabelled `i <-> n+1-i`.
    pub fn mirrored(&self) -> ChainConfig {
        let mut params = ChainParams::from(self.clone());
        params.pump_well = self.n_wells - self.pump_well;
        params.damp_well = self.n_wells - self.damp_well;
        ChainConfig::new(params).expect("mirror of a valid config is valid")
    }
}

impl TryFrom<ChainParams> for ChainConfig {
    type Error = ModelError;

    fn try_from(params: ChainParams) -> Result<Self, Self::Error> {
        ChainConfig::new(params)
    }
}

impl From<ChainConfig> for ChainParams {
    fn from(cfg: ChainConfig) -> Self {
        ChainParams {
            n_wells: cfg.n_wells,
            chi: cfg.chi,
            tunneling: cfg.tunneling,
            pump_rate: cfg.pump_rate,
            damp_rate: cfg.damp_rate,
            pump_well: cfg.pump_well + 1,
            damp_well: cfg.damp_well + 1,
            dt: cfg.dt,
            t_final: cfg.t_final,
            sample_times: cfg.sample_times,
        }
    }
}

fn grid_step(t: f64, dt: f64) -> Option<u64> {
    let k = (t / dt).round();
    if k < 0.0 || k > u64::MAX as f64 {
        return None;
    }
    let tol = GRID_TOL * (1.0 + k.abs());
    if (t / dt - k).abs() <= tol {
        Some(k as u64)
    } else {
        None
    }
}

/// Complex mode amplitudes of one trajectory at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerState {
    amplitudes: Vec<C64>,
}

impl WignerState {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn zeros(n_wells: usize) -> Self {
        Self {
            amplitudes: vec![C64::new(0.0, 0.0); n_wells],
        }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// Deterministic part of the equations of motion, `d alpha / dt`.
///
/// Per well `i`: `-2i chi |a_i|^2 a_i + i J (a_{i-1} + a_{i+1})`, plus the
/// pump amplitude at the pumped well and `-damp_rate * a_i` at the damped
/// well. The chain is open: end wells couple to a single neighbour.
pub fn drift(state: &WignerState, cfg: &ChainConfig) -> WignerState {
    let mut out = vec![C64::new(0.0, 0.0); cfg.n_wells()];
    drift_into(state.amplitudes(), cfg, &mut out);
    WignerState::new(out)
}

pub(crate) fn drift_into(amps: &[C64], cfg: &ChainConfig, out: &mut [C64]) {
    let n = amps.len();
    let chi2 = 2.0 * cfg.chi;
    let j = cfg.tunneling;
    for i in 0..n {
        let a = amps[i];
        let mut nb = C64::new(0.0, 0.0);
        if i > 0 {
            nb += amps[i - 1];
        }
        if i + 1 < n {
            nb += amps[i + 1];
        }
        // i J nb
        let mut d = C64::new(-j * nb.im, j * nb.re);
        // -2i chi |a|^2 a
        let t = chi2 * a.norm_sqr();
        d.re += t * a.im;
        d.im -= t * a.re;
        if i == cfg.pump_well {
            d.re += cfg.pump_rate;
        }
        if i == cfg.damp_well {
            d -= a * cfg.damp_rate;
        }
        out[i] = d;
    }
}

/// Per-well noise amplitudes: `sqrt(damp_rate)` at the damped well, zero
/// elsewhere. The engine multiplies this by a unit-intensity complex white
/// noise increment.
pub fn noise_vector(cfg: &ChainConfig) -> Vec<f64> {
    let mut v = vec![0.0; cfg.n_wells()];
    v[cfg.damp_well()] = cfg.damp_rate().sqrt();
    v
}

/// Linear coupling matrix `A` of the non-interacting equations:
/// `i J` on nearest-neighbour entries, `-damp_rate` on the damped well's
/// diagonal. For `chi = 0`, `drift(a) = A a + pump_vector`.
pub fn coupling_matrix(cfg: &ChainConfig) -> DMatrix<C64> {
    let n = cfg.n_wells();
    DMatrix::from_fn(n, n, |r, c| {
        if r.abs_diff(c) == 1 {
            Complex::new(0.0, cfg.tunneling())
        } else if r == c && r == cfg.damp_well() {
            Complex::new(-cfg.damp_rate(), 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}

/// Pump vector: `pump_rate` at the pumped well, zero elsewhere.
pub fn pump_vector(cfg: &ChainConfig) -> DVector<C64> {
    let mut v = DVector::from_element(cfg.n_wells(), C64::new(0.0, 0.0));
    v[cfg.pump_well()] = C64::new(cfg.pump_rate(), 0.0);
    v
}

/// Classical steady state of the non-interacting chain, solving
/// `A alpha = -pump_vector`.
///
/// Only defined for `chi = 0`; returns [`ModelError::Singular`] when the
/// coupling matrix has no inverse (damping at a middle well of an
/// odd-length chain), in which case no fixed point exists.
pub fn classical_fixed_point(cfg: &ChainConfig) -> Result<Vec<C64>, ModelError> {
    if cfg.chi() != 0.0 {
        return Err(ModelError::NonZeroChi(cfg.chi()));
    }
    let a = coupling_matrix(cfg);
    let det = a.clone().lu().determinant();
    if det.norm() < 1e-10 {
        return Err(ModelError::Singular);
    }
    let rhs = -pump_vector(cfg);
    let sol = a.lu().solve(&rhs).ok_or(ModelError::Singular)?;
    Ok(sol.iter().copied().collect())
}
