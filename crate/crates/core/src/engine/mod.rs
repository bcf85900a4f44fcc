//! Stochastic trajectory integration over large ensembles.
//!
//! Trajectories are integrated with classical RK4 on the deterministic
//! drift followed by an additive Gaussian increment on the damped well
//! (the noise is additive, so the Ito and Stratonovich forms coincide and
//! no stochastic-calculus correction is needed). Every trajectory draws
//! from its own counter-derived RNG stream keyed by `(base_seed,
//! trajectory index)`, so results are bit-identical for any parallel
//! schedule.

mod accumulator;

pub use accumulator::{
    batch_std_err, Checkpoint, CheckpointError, Estimate, MomentAccumulator, MomentSums,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{drift_into, ChainConfig, WignerState};
use crate::C64;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid ensemble plan: {0}")]
    InvalidPlan(String),
    #[error(
        "{count} trajectories diverged (first: trajectory {first_trajectory} at step {first_step}); \
         diverged paths would bias the moments"
    )]
    Diverged {
        count: u64,
        first_trajectory: u64,
        first_step: u64,
    },
    #[error("t = {0} is not a sample time of this run")]
    UnknownSampleTime(f64),
    #[error("cannot merge accumulators: {0}")]
    MergeMismatch(String),
}

/// Ensemble size, seeding, and batch split for error estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsemblePlan {
    n_trajectories: u64,
    base_seed: u64,
    n_batches: u64,
}

impl EnsemblePlan {
    /// Default number of batch means used for statistical error bars.
    pub const DEFAULT_BATCHES: u64 = 100;

    pub fn new(n_trajectories: u64, base_seed: u64, n_batches: u64) -> Result<Self, EngineError> {
        if n_trajectories == 0 {
            return Err(EngineError::InvalidPlan("n_trajectories must be >= 1".into()));
        }
        if n_batches == 0 {
            return Err(EngineError::InvalidPlan("n_batches must be >= 1".into()));
        }
        if n_trajectories % n_batches != 0 {
            return Err(EngineError::InvalidPlan(format!(
                "n_batches = {n_batches} must divide n_trajectories = {n_trajectories}"
            )));
        }
        Ok(Self {
            n_trajectories,
            base_seed,
            n_batches,
        })
    }

    pub fn n_trajectories(&self) -> u64 {
        self.n_trajectories
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn n_batches(&self) -> u64 {
        self.n_batches
    }

    /// Plan for the same seed and batch count but a larger ensemble.
    pub fn with_trajectories(&self, n_trajectories: u64) -> Result<Self, EngineError> {
        Self::new(n_trajectories, self.base_seed, self.n_batches)
    }
}

/// Tuning knobs that are not part of the physics. `noise_scale` rescales
/// the stochastic increment and exists for fault-injection self-tests of
/// the oracle comparison; leave at 1.0 for real runs.
#[derive(Debug, Clone, Copy)]
pub struct EngineOptions {
    pub noise_scale: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { noise_scale: 1.0 }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent RNG stream for one trajectory.
///
/// The 256-bit key is expanded from `base_seed`; the trajectory index
/// selects the ChaCha stream, so any two indices give statistically
/// independent streams without coordination between workers.
pub fn trajectory_rng(base_seed: u64, traj_index: u64) -> ChaCha12Rng {
    let mut state = base_seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(traj_index);
    rng
}

/// Draw a Wigner vacuum sample: each amplitude is `(g1 + i g2) / 2` with
/// independent standard normals, so the ensemble satisfies
/// `<|a|^2> = 1/2` and `<a> = <a^2> = 0`.
pub fn sample_vacuum<R: Rng>(n_wells: usize, rng: &mut R) -> WignerState {
    let amps = (0..n_wells)
        .map(|_| {
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            C64::new(0.5 * g1, 0.5 * g2)
        })
        .collect();
    WignerState::new(amps)
}

/// RK4 stepper with preallocated scratch, reusable across trajectories.
pub(crate) struct Stepper<'a> {
    cfg: &'a ChainConfig,
    /// Per-component standard deviation of the additive increment,
    /// `noise_scale * sqrt(damp_rate * dt / 2)`; realizes a unit-intensity
    /// complex white noise scaled by sqrt(damp_rate).
    noise_std: f64,
    draw_noise: bool,
    thresh_sqr: f64,
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(cfg: &'a ChainConfig, noise_scale: f64) -> Self {
        let n = cfg.n_wells();
        let thresh = cfg.divergence_threshold();
        Self {
            cfg,
            noise_std: noise_scale * (cfg.damp_rate() * cfg.dt() / 2.0).sqrt(),
            draw_noise: cfg.damp_rate() > 0.0,
            thresh_sqr: thresh * thresh,
            k1: vec![C64::new(0.0, 0.0); n],
            k2: vec![C64::new(0.0, 0.0); n],
            k3: vec![C64::new(0.0, 0.0); n],
            k4: vec![C64::new(0.0, 0.0); n],
            tmp: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// Advance one step in place. Returns `false` when the state left the
    /// divergence guard (including NaN/Inf contamination).
    #[inline]
    pub(crate) fn step<R: Rng>(&mut self, amps: &mut [C64], rng: &mut R) -> bool {
        let n = amps.len();
        let h = self.cfg.dt();
        let half = 0.5 * h;

        drift_into(amps, self.cfg, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = amps[i] + self.k1[i] * half;
        }
        drift_into(&self.tmp, self.cfg, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = amps[i] + self.k2[i] * half;
        }
        drift_into(&self.tmp, self.cfg, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = amps[i] + self.k3[i] * h;
        }
        drift_into(&self.tmp, self.cfg, &mut self.k4);

        let w = h / 6.0;
        for i in 0..n {
            amps[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * w;
        }

        if self.draw_noise {
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            let d = self.cfg.damp_well();
            amps[d].re += self.noise_std * g1;
            amps[d].im += self.noise_std * g2;
        }

        for a in amps.iter() {
            // Negated comparison so NaN also trips the guard.
            if !(a.norm_sqr() <= self.thresh_sqr) {
                return false;
            }
        }
        true
    }
}

/// Advance a state by one step of `cfg.dt()` using the given RNG stream.
///
/// One-shot convenience wrapper; ensemble runs reuse scratch internally.
/// The trajectory/step fields of a divergence error are zero here since
/// no trajectory context exists.
pub fn step<R: Rng>(
    state: &WignerState,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<WignerState, EngineError> {
    let mut amps = state.amplitudes().to_vec();
    let mut stepper = Stepper::new(cfg, 1.0);
    if stepper.step(&mut amps, rng) {
        Ok(WignerState::new(amps))
    } else {
        Err(EngineError::Diverged {
            count: 1,
            first_trajectory: 0,
            first_step: 0,
        })
    }
}

/// Integrate one trajectory, feeding `(sample_index, amplitudes)` to the
/// sink at each sample time. Returns the diverging step on failure.
fn integrate_trajectory<R: Rng, F: FnMut(usize, &[C64])>(
    cfg: &ChainConfig,
    rng: &mut R,
    stepper: &mut Stepper,
    mut sink: F,
) -> Result<(), u64> {
    let state = sample_vacuum(cfg.n_wells(), rng);
    let mut amps = state.amplitudes().to_vec();

    let sample_steps = cfg.sample_steps();
    let mut next = 0usize;
    if sample_steps.first() == Some(&0) {
        sink(0, &amps);
        next = 1;
    }
    for k in 1..=cfg.n_steps() {
        if !stepper.step(&mut amps, rng) {
            return Err(k);
        }
        if next < sample_steps.len() && sample_steps[next] == k {
            sink(next, &amps);
            next += 1;
        }
    }
    Ok(())
}

/// Integrate trajectory `traj_index` of the stream family `base_seed` and
/// return its states at the configured sample times.
///
/// The output is a pure function of `(base_seed, traj_index, cfg)`.
pub fn run_trajectory(
    cfg: &ChainConfig,
    base_seed: u64,
    traj_index: u64,
) -> Result<Vec<WignerState>, EngineError> {
    let mut rng = trajectory_rng(base_seed, traj_index);
    let mut stepper = Stepper::new(cfg, 1.0);
    let mut out = Vec::with_capacity(cfg.sample_times().len());
    integrate_trajectory(cfg, &mut rng, &mut stepper, |_, amps| {
        out.push(WignerState::new(amps.to_vec()))
    })
    .map_err(|step| EngineError::Diverged {
        count: 1,
        first_trajectory: traj_index,
        first_step: step,
    })?;
    Ok(out)
}

struct BatchOutcome {
    sums: Vec<MomentSums>,
    count: u64,
    diverged: u64,
    first_divergence: Option<(u64, u64)>,
}

/// Run the full ensemble and accumulate moment statistics at the sample
/// times. The trajectory-to-batch assignment (`trajectory % n_batches`)
/// and the in-batch accumulation order are fixed, so the result is
/// bit-identical for any number of worker threads.
pub fn run_ensemble(cfg: &ChainConfig, plan: &EnsemblePlan) -> Result<MomentAccumulator, EngineError> {
    run_ensemble_with_options(cfg, plan, EngineOptions::default())
}

/// [`run_ensemble`] with explicit engine options.
pub fn run_ensemble_with_options(
    cfg: &ChainConfig,
    plan: &EnsemblePlan,
    opts: EngineOptions,
) -> Result<MomentAccumulator, EngineError> {
    let acc = MomentAccumulator::empty(
        cfg.n_wells(),
        cfg.sample_times().to_vec(),
        plan.n_batches(),
    );
    extend_ensemble(cfg, plan, 0, acc, opts)
}

/// Add trajectories `start..plan.n_trajectories()` to an existing
/// accumulator (resume support). `start` must be the number of
/// trajectories already in `acc` and a multiple of the batch count.
pub fn extend_ensemble(
    cfg: &ChainConfig,
    plan: &EnsemblePlan,
    start: u64,
    mut acc: MomentAccumulator,
    opts: EngineOptions,
) -> Result<MomentAccumulator, EngineError> {
    let n_batches = plan.n_batches();
    if start % n_batches != 0 {
        return Err(EngineError::InvalidPlan(format!(
            "resume point {start} is not a multiple of n_batches = {n_batches}"
        )));
    }
    if acc.count() != start {
        return Err(EngineError::InvalidPlan(format!(
            "accumulator holds {} trajectories but resume point is {start}",
            acc.count()
        )));
    }
    if start > plan.n_trajectories() {
        return Err(EngineError::InvalidPlan(format!(
            "resume point {start} exceeds planned ensemble size {}",
            plan.n_trajectories()
        )));
    }

    let outcomes: Vec<BatchOutcome> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let n_times = cfg.sample_times().len();
            let mut sums = vec![MomentSums::zeros(cfg.n_wells()); n_times];
            let mut stepper = Stepper::new(cfg, opts.noise_scale);
            let mut count = 0u64;
            let mut diverged = 0u64;
            let mut first_divergence = None;

            let mut traj = start + b;
            while traj < plan.n_trajectories() {
                let mut rng = trajectory_rng(plan.base_seed(), traj);
                match integrate_trajectory(cfg, &mut rng, &mut stepper, |ti, amps| {
                    sums[ti].add_state(amps)
                }) {
                    Ok(()) => count += 1,
                    Err(step) => {
                        diverged += 1;
                        if first_divergence.is_none() {
                            first_divergence = Some((traj, step));
                        }
                    }
                }
                traj += n_batches;
            }
            BatchOutcome {
                sums,
                count,
                diverged,
                first_divergence,
            }
        })
        .collect();

    let total_diverged: u64 = outcomes.iter().map(|o| o.diverged).sum();
    if total_diverged > 0 {
        let (first_trajectory, first_step) = outcomes
            .iter()
            .filter_map(|o| o.first_divergence)
            .min()
            .expect("divergence recorded");
        return Err(EngineError::Diverged {
            count: total_diverged,
            first_trajectory,
            first_step,
        });
    }

    for (b, outcome) in outcomes.into_iter().enumerate() {
        acc.absorb_batch(b, outcome.count, outcome.sums);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{quad_cov, CorrelationSnapshot};
    use crate::model::ChainParams;
    use approx::assert_abs_diff_eq;

    fn cfg_with(params: ChainParams) -> ChainConfig {
        ChainConfig::new(params).unwrap()
    }

    fn base_params() -> ChainParams {
        ChainParams {
            n_wells: 3,
            chi: 0.0,
            tunneling: 1.0,
            pump_rate: 10.0,
            damp_rate: 1.0,
            pump_well: 1,
            damp_well: 3,
            dt: 1e-3,
            t_final: 1.0,
            sample_times: vec![1.0],
        }
    }

    #[test]
    fn vacuum_sample_moments() {
        let mut rng = trajectory_rng(7, 0);
        let n = 1_000_000usize;
        let mut sum_n = 0.0;
        let mut sum_a = C64::new(0.0, 0.0);
        let mut sum_a2 = C64::new(0.0, 0.0);
        for _ in 0..n {
            let s = sample_vacuum(1, &mut rng);
            let a = s.amplitudes()[0];
            sum_n += a.norm_sqr();
            sum_a += a;
            sum_a2 += a * a;
        }
        let nf = n as f64;
        // <|a|^2> = 1/2, sd(|a|^2) = 1/2  =>  3 sigma of the mean:
        let sigma_n = 0.5 / nf.sqrt();
        assert!((sum_n / nf - 0.5).abs() < 3.0 * sigma_n);
        // <a> = <a^2> = 0 with per-component sd 1/(2 sqrt n) and ~1/(2 sqrt n).
        let sigma_a = 0.5 / nf.sqrt();
        assert!(sum_a.norm() / nf < 4.0 * sigma_a);
        assert!(sum_a2.norm() / nf < 4.0 * sigma_a * 2.0);
    }

    #[test]
    fn vacuum_quadrature_variance_is_one() {
        // Build a snapshot from raw vacuum samples and check V(X(theta)) = 1
        // for all angles, through the same quadrature algebra used by the
        // analysis layer.
        let mut rng = trajectory_rng(11, 3);
        let n = 200_000usize;
        let mut s1 = C64::new(0.0, 0.0);
        let mut s2 = C64::new(0.0, 0.0);
        let mut h2 = 0.0;
        for _ in 0..n {
            let a = sample_vacuum(1, &mut rng).amplitudes()[0];
            s1 += a;
            s2 += a * a;
            h2 += a.norm_sqr();
        }
        let nf = n as f64;
        let m = s1 / nf;
        let c = s2 / nf - m * m;
        let d = h2 / nf - m.norm_sqr();
        let snap = CorrelationSnapshot::new(vec![m], vec![c], vec![C64::new(d, 0.0)], n as u64);
        for k in 0..12 {
            let theta = k as f64 * std::f64::consts::PI / 12.0;
            let v = quad_cov(&snap, 0, theta, 0, theta);
            assert!((v - 1.0).abs() < 0.02, "V(X({k} pi/12)) = {v}");
        }
    }

    #[test]
    fn constant_drift_is_integrated_exactly() {
        let cfg = cfg_with(ChainParams {
            chi: 0.0,
            tunneling: 0.0,
            damp_rate: 0.0,
            ..base_params()
        });
        let mut rng = trajectory_rng(0, 0);
        let mut state = WignerState::zeros(3);
        for _ in 0..1000 {
            state = step(&state, &cfg, &mut rng).unwrap();
        }
        // RK4 has no truncation error for a constant right-hand side.
        assert_abs_diff_eq!(state.amplitudes()[0].re, 10.0, epsilon = 1e-10);
        assert_abs_diff_eq!(state.amplitudes()[0].im, 0.0, epsilon = 1e-15);
        assert_eq!(state.amplitudes()[1], C64::new(0.0, 0.0));
        assert_eq!(state.amplitudes()[2], C64::new(0.0, 0.0));
    }

    #[test]
    fn pure_decay_matches_exponential() {
        // Decoupled damped well, noise scaled to zero: a(t) = a(0) e^{-t}.
        let cfg = cfg_with(ChainParams {
            n_wells: 2,
            tunneling: 0.0,
            pump_rate: 0.0,
            pump_well: 2,
            damp_well: 1,
            ..base_params()
        });
        let mut stepper = Stepper::new(&cfg, 0.0);
        let mut rng = trajectory_rng(0, 0);
        let mut amps = vec![C64::new(2.0, -1.0), C64::new(0.3, 0.0)];
        for _ in 0..1000 {
            assert!(stepper.step(&mut amps, &mut rng));
        }
        let expect = C64::new(2.0, -1.0) * (-1.0f64).exp();
        assert!((amps[0] - expect).norm() < 1e-10);
        assert_eq!(amps[1], C64::new(0.3, 0.0));
    }

    #[test]
    fn damped_well_reaches_half_quantum() {
        // Ornstein-Uhlenbeck balance: d<|a|^2>/dt = -2 gamma <|a|^2> + gamma
        // has the stationary point 1/2, i.e. zero population.
        let cfg = cfg_with(ChainParams {
            n_wells: 2,
            tunneling: 0.0,
            pump_rate: 0.0,
            pump_well: 1,
            damp_well: 2,
            t_final: 8.0,
            sample_times: vec![8.0],
            ..base_params()
        });
        let plan = EnsemblePlan::new(10_000, 42, 100).unwrap();
        let acc = run_ensemble(&cfg, &plan).unwrap();
        let est = acc.population(1, 8.0).unwrap();
        assert!(
            est.value.abs() < 3.0 * est.std_err,
            "population {} +- {}",
            est.value,
            est.std_err
        );
    }

    #[test]
    fn trajectories_are_deterministic() {
        let cfg = cfg_with(ChainParams {
            t_final: 0.1,
            sample_times: vec![0.05, 0.1],
            ..base_params()
        });
        let a = run_trajectory(&cfg, 99, 17).unwrap();
        let b = run_trajectory(&cfg, 99, 17).unwrap();
        assert_eq!(a, b);
        let c = run_trajectory(&cfg, 99, 18).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn initial_samples_are_uncorrelated_across_indices() {
        let n = 2000;
        let xs: Vec<f64> = (0..n)
            .map(|i| {
                let mut rng = trajectory_rng(4, i);
                sample_vacuum(1, &mut rng).amplitudes()[0].re
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let cov = (0..n as usize - 1)
            .map(|i| (xs[i] - mean) * (xs[i + 1] - mean))
            .sum::<f64>()
            / (n as f64 - 1.0);
        let corr = cov / var;
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "lag-1 corr {corr}");
    }

    #[test]
    fn sampling_only_at_zero_returns_initial_state() {
        let cfg = cfg_with(ChainParams {
            sample_times: vec![0.0],
            ..base_params()
        });
        let states = run_trajectory(&cfg, 5, 2).unwrap();
        assert_eq!(states.len(), 1);
        let mut rng = trajectory_rng(5, 2);
        assert_eq!(states[0], sample_vacuum(3, &mut rng));
    }

    #[test]
    fn ensemble_is_invariant_under_worker_count() {
        let cfg = cfg_with(ChainParams {
            t_final: 0.1,
            sample_times: vec![0.05, 0.1],
            ..base_params()
        });
        let plan = EnsemblePlan::new(200, 7, 10).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_ensemble(&cfg, &plan).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_ensemble(&cfg, &plan).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn batch_one_matches_manual_accumulation() {
        let cfg = cfg_with(ChainParams {
            t_final: 0.05,
            sample_times: vec![0.05],
            ..base_params()
        });
        let plan = EnsemblePlan::new(50, 3, 1).unwrap();
        let acc = run_ensemble(&cfg, &plan).unwrap();

        let mut manual = MomentAccumulator::empty(3, vec![0.05], 1);
        let mut sums = vec![MomentSums::zeros(3)];
        for traj in 0..50 {
            let states = run_trajectory(&cfg, 3, traj).unwrap();
            sums[0].add_state(states[0].amplitudes());
        }
        manual.absorb_batch(0, 50, sums);
        assert_eq!(acc, manual);
    }

    #[test]
    fn divergence_is_detected_and_counted() {
        // A huge Kerr rate with a coarse step is far outside RK4 stability;
        // amplitudes blow past the guard within a few steps. The validity
        // estimate in the config cannot see this (it scales with the pump),
        // which is exactly why the runtime guard exists.
        let cfg = cfg_with(ChainParams {
            chi: 1e4,
            tunneling: 0.0,
            pump_rate: 0.0,
            damp_rate: 0.0,
            dt: 1e-2,
            t_final: 1.0,
            sample_times: vec![1.0],
            ..base_params()
        });
        let plan = EnsemblePlan::new(8, 1, 1).unwrap();
        match run_ensemble(&cfg, &plan) {
            Err(EngineError::Diverged { count, .. }) => assert!(count >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn halving_the_step_is_within_statistical_error() {
        // Trajectory-level discretization bias must sit well below the
        // sampling error; checked on a short strongly nonlinear run.
        let coarse = cfg_with(ChainParams {
            chi: 1e-2,
            t_final: 4.0,
            sample_times: vec![4.0],
            ..base_params()
        });
        let fine = cfg_with(ChainParams {
            dt: 5e-4,
            ..ChainParams::from(coarse.clone())
        });
        let plan = EnsemblePlan::new(4000, 55, 100).unwrap();
        let pop_coarse = run_ensemble(&coarse, &plan).unwrap().populations(4.0).unwrap();
        let pop_fine = run_ensemble(&fine, &plan).unwrap().populations(4.0).unwrap();
        for w in 0..3 {
            let sigma = (pop_coarse[w].std_err.powi(2) + pop_fine[w].std_err.powi(2)).sqrt();
            let diff = (pop_coarse[w].value - pop_fine[w].value).abs();
            assert!(
                diff < 3.0 * sigma,
                "well {w}: dt bias {diff:.4} vs sigma {sigma:.4}"
            );
        }
    }

    #[test]
    fn population_lookup_rejects_unknown_time() {
        let cfg = cfg_with(base_params());
        let plan = EnsemblePlan::new(10, 0, 1).unwrap();
        let acc = run_ensemble(&cfg, &plan).unwrap();
        assert!(matches!(
            acc.population(0, 0.123),
            Err(EngineError::UnknownSampleTime(_))
        ));
    }

    #[test]
    fn accumulated_sums_have_exact_symmetries() {
        let cfg = cfg_with(ChainParams {
            t_final: 0.2,
            sample_times: vec![0.2],
            ..base_params()
        });
        let plan = EnsemblePlan::new(40, 12, 4).unwrap();
        let acc = run_ensemble(&cfg, &plan).unwrap();
        let totals = acc.totals(0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(totals.s2(i, j), totals.s2(j, i));
                assert_eq!(totals.h2(i, j), totals.h2(j, i).conj());
            }
        }
    }
}
