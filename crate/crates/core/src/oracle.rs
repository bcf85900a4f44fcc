//! Mean-field and exact linear-regime references used to validate the
//! stochastic engine.
//!
//! For `chi = 0` the equations of motion are linear with additive noise,
//! so the first and second moments obey closed ODEs that can be
//! integrated exactly (up to integrator error) and, when the coupling
//! matrix is invertible, solved algebraically in steady state. The
//! comparison against the Monte Carlo engine is the main correctness
//! oracle of the whole artifact.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::correlations::CorrelationSnapshot;
use crate::engine::batch_std_err;
use crate::model::{coupling_matrix, drift_into, pump_vector, ChainConfig, WignerState};
use crate::C64;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("linear moment evolution requires chi = 0 (chi = {0})")]
    NonZeroChi(f64),
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("time {0} is not on the oracle grid")]
    UnknownTime(f64),
    #[error("mean-field trajectory diverged at step {0}")]
    Diverged(u64),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
}

/// Algebraic steady state of the linear moment system.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryMoments {
    pub mean: DVector<C64>,
    pub c: DMatrix<C64>,
    pub d: DMatrix<C64>,
}

impl StationaryMoments {
    /// Population `<|a_i|^2> - 1/2 = |m_i|^2 + D_ii - 1/2`.
    pub fn population(&self, well: usize) -> f64 {
        self.mean[well].norm_sqr() + self.d[(well, well)].re - 0.5
    }

    pub fn snapshot(&self) -> CorrelationSnapshot {
        moments_to_snapshot(&self.mean, &self.c, &self.d)
    }
}

/// Exact first and second moments of the `chi = 0` chain on a time grid.
#[derive(Debug, Clone)]
pub struct LinearMoments {
    times: Vec<f64>,
    mean: Vec<DVector<C64>>,
    c: Vec<DMatrix<C64>>,
    d: Vec<DMatrix<C64>>,
    stationary: Option<StationaryMoments>,
}

impl LinearMoments {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time_index(&self, t: f64) -> Result<usize, OracleError> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= tol)
            .ok_or(OracleError::UnknownTime(t))
    }

    pub fn mean_at(&self, t: f64) -> Result<&DVector<C64>, OracleError> {
        Ok(&self.mean[self.time_index(t)?])
    }

    /// Population `<|a_i|^2> - 1/2` at a grid time.
    pub fn population(&self, well: usize, t: f64) -> Result<f64, OracleError> {
        let i = self.time_index(t)?;
        Ok(self.mean[i][well].norm_sqr() + self.d[i][(well, well)].re - 0.5)
    }

    /// Exact moments in the same snapshot shape the engine produces, so
    /// the full correlation stack runs on oracle output unchanged.
    pub fn snapshot_at(&self, t: f64) -> Result<CorrelationSnapshot, OracleError> {
        let i = self.time_index(t)?;
        Ok(moments_to_snapshot(&self.mean[i], &self.c[i], &self.d[i]))
    }

    /// Algebraic steady state, present when the coupling matrix (and the
    /// associated covariance equation) is invertible.
    pub fn stationary(&self) -> Option<&StationaryMoments> {
        self.stationary.as_ref()
    }
}

fn moments_to_snapshot(m: &DVector<C64>, c: &DMatrix<C64>, d: &DMatrix<C64>) -> CorrelationSnapshot {
    let n = m.len();
    let mv: Vec<C64> = m.iter().copied().collect();
    let mut cv = vec![C64::new(0.0, 0.0); n * n];
    let mut dv = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            cv[i * n + j] = c[(i, j)];
            dv[i * n + j] = d[(i, j)];
        }
    }
    CorrelationSnapshot::new(mv, cv, dv, 0)
}

fn grid_steps(cfg: &ChainConfig, t_grid: &[f64]) -> Result<Vec<u64>, OracleError> {
    if t_grid.is_empty() {
        return Err(OracleError::InvalidGrid("time grid is empty".into()));
    }
    let dt = cfg.dt();
    let mut steps = Vec::with_capacity(t_grid.len());
    for (i, &t) in t_grid.iter().enumerate() {
        if i > 0 && t <= t_grid[i - 1] {
            return Err(OracleError::InvalidGrid(
                "time grid must be strictly increasing".into(),
            ));
        }
        let k = (t / dt).round();
        if k < 0.0 || (t / dt - k).abs() > 1e-6 * (1.0 + k.abs()) {
            return Err(OracleError::InvalidGrid(format!(
                "time {t} is not an integer multiple of dt = {dt}"
            )));
        }
        steps.push(k as u64);
    }
    Ok(steps)
}

/// Noise-free classical trajectory from an empty chain: RK4 on the drift
/// with the configuration's own step size, recorded at the grid times.
/// Valid for any `chi`.
pub fn meanfield_evolve(cfg: &ChainConfig, t_grid: &[f64]) -> Result<Vec<WignerState>, OracleError> {
    let steps = grid_steps(cfg, t_grid)?;
    let n = cfg.n_wells();
    let h = cfg.dt();
    let thresh_sqr = cfg.divergence_threshold().powi(2);

    let mut y = vec![C64::new(0.0, 0.0); n];
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = vec![C64::new(0.0, 0.0); n];
    let mut k3 = vec![C64::new(0.0, 0.0); n];
    let mut k4 = vec![C64::new(0.0, 0.0); n];
    let mut tmp = vec![C64::new(0.0, 0.0); n];

    let mut out = Vec::with_capacity(t_grid.len());
    let mut next = 0usize;
    if steps.first() == Some(&0) {
        out.push(WignerState::new(y.clone()));
        next = 1;
    }
    let last = *steps.last().expect("non-empty grid");
    for step in 1..=last {
        drift_into(&y, cfg, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (h / 2.0);
        }
        drift_into(&tmp, cfg, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (h / 2.0);
        }
        drift_into(&tmp, cfg, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * h;
        }
        drift_into(&tmp, cfg, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            if !(y[i].norm_sqr() <= thresh_sqr) {
                return Err(OracleError::Diverged(step));
            }
        }
        if next < steps.len() && steps[next] == step {
            out.push(WignerState::new(y.clone()));
            next += 1;
        }
    }
    Ok(out)
}

struct MomentDerivCtx {
    a: DMatrix<C64>,
    a_t: DMatrix<C64>,
    a_conj: DMatrix<C64>,
    pump: DVector<C64>,
    noise: DMatrix<C64>,
}

struct MomentState {
    m: DVector<C64>,
    c: DMatrix<C64>,
    d: DMatrix<C64>,
}

impl MomentState {
    fn deriv(&self, ctx: &MomentDerivCtx) -> MomentState {
        MomentState {
            m: &ctx.a * &self.m + &ctx.pump,
            c: &ctx.a * &self.c + &self.c * &ctx.a_t,
            d: &ctx.a_conj * &self.d + &self.d * &ctx.a_t + &ctx.noise,
        }
    }

    fn add_scaled(&self, k: &MomentState, f: f64) -> MomentState {
        let f = C64::new(f, 0.0);
        MomentState {
            m: &self.m + &k.m * f,
            c: &self.c + &k.c * f,
            d: &self.d + &k.d * f,
        }
    }
}

/// Exact moment evolution of the linear (`chi = 0`) chain from vacuum:
/// `dm/dt = A m + pump`, `dC/dt = A C + C A^T`, and
/// `dD/dt = conj(A) D + D A^T + N` with `N` the loss-well noise intensity.
/// Integrated with the same RK4 step as the engine so discretization
/// biases cancel in comparisons. Includes the algebraic steady state when
/// the coupling matrix is invertible.
pub fn linear_moments(cfg: &ChainConfig, t_grid: &[f64]) -> Result<LinearMoments, OracleError> {
    if cfg.chi() != 0.0 {
        return Err(OracleError::NonZeroChi(cfg.chi()));
    }
    let steps = grid_steps(cfg, t_grid)?;
    let n = cfg.n_wells();
    let h = cfg.dt();

    let a = coupling_matrix(cfg);
    let mut noise = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    noise[(cfg.damp_well(), cfg.damp_well())] = C64::new(cfg.damp_rate(), 0.0);
    let ctx = MomentDerivCtx {
        a_t: a.transpose(),
        a_conj: a.map(|z| z.conj()),
        pump: pump_vector(cfg),
        noise,
        a,
    };

    let mut state = MomentState {
        m: DVector::from_element(n, C64::new(0.0, 0.0)),
        c: DMatrix::from_element(n, n, C64::new(0.0, 0.0)),
        d: DMatrix::from_diagonal(&DVector::from_element(n, C64::new(0.5, 0.0))),
    };

    let mut times = Vec::with_capacity(t_grid.len());
    let mut mean = Vec::with_capacity(t_grid.len());
    let mut c = Vec::with_capacity(t_grid.len());
    let mut d = Vec::with_capacity(t_grid.len());
    let mut record = |state: &MomentState, t: f64| {
        times.push(t);
        mean.push(state.m.clone());
        c.push(state.c.clone());
        d.push(state.d.clone());
    };

    let mut next = 0usize;
    if steps.first() == Some(&0) {
        record(&state, 0.0);
        next = 1;
    }
    let last = *steps.last().expect("non-empty grid");
    for step in 1..=last {
        let k1 = state.deriv(&ctx);
        let k2 = state.add_scaled(&k1, h / 2.0).deriv(&ctx);
        let k3 = state.add_scaled(&k2, h / 2.0).deriv(&ctx);
        let k4 = state.add_scaled(&k3, h).deriv(&ctx);
        state = state
            .add_scaled(&k1, h / 6.0)
            .add_scaled(&k2, h / 3.0)
            .add_scaled(&k3, h / 3.0)
            .add_scaled(&k4, h / 6.0);
        if next < steps.len() && steps[next] == step {
            record(&state, step as f64 * h);
            next += 1;
        }
    }

    Ok(LinearMoments {
        times,
        mean,
        c,
        d,
        stationary: stationary_moments(&ctx, n),
    })
}

/// Solve `A m = -pump` and the covariance balance
/// `conj(A) D + D A^T = -N` (via the Kronecker-product form); `C = 0` in
/// steady state. Returns None when the system is singular.
fn stationary_moments(ctx: &MomentDerivCtx, n: usize) -> Option<StationaryMoments> {
    let det = ctx.a.clone().lu().determinant();
    if det.norm() < 1e-10 {
        return None;
    }
    let mean = ctx.a.clone().lu().solve(&(-&ctx.pump))?;

    let eye = DMatrix::<C64>::identity(n, n);
    let lyap = eye.kronecker(&ctx.a_conj) + ctx.a.kronecker(&eye);
    let rhs = DVector::from_iterator(n * n, ctx.noise.iter().map(|z| -z));
    let d_vec = lyap.lu().solve(&rhs)?;
    let d = DMatrix::from_iterator(n, n, d_vec.iter().copied());

    Some(StationaryMoments {
        mean,
        c: DMatrix::from_element(n, n, C64::new(0.0, 0.0)),
        d,
    })
}

/// Element-wise z-scores of the engine moments against the exact linear
/// moments, using the engine's batch errors.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub max_abs_z: f64,
    pub worst_component: String,
    pub n_components: usize,
}

/// Compare an engine snapshot (with its batch snapshots for errors)
/// against the exact linear moments at time `t`.
pub fn compare(
    snap: &CorrelationSnapshot,
    batch_snapshots: &[CorrelationSnapshot],
    oracle: &LinearMoments,
    t: f64,
) -> Result<DeviationReport, OracleError> {
    let idx = oracle.time_index(t)?;
    let n = snap.n_wells();
    if oracle.mean[idx].len() != n {
        return Err(OracleError::ConfigMismatch(format!(
            "engine has {n} wells, oracle has {}",
            oracle.mean[idx].len()
        )));
    }
    if batch_snapshots.len() < 2 {
        return Err(OracleError::ConfigMismatch(
            "need at least two batch snapshots for error estimates".into(),
        ));
    }

    let mut max_abs_z = 0.0f64;
    let mut worst = String::new();
    let mut count = 0usize;

    let check = &mut |name: String, mc: f64, exact: f64, batch: Vec<f64>| {
        let err = batch_std_err(&batch).max(1e-12 * (1.0 + exact.abs()));
        let z = (mc - exact) / err;
        count += 1;
        if z.abs() > max_abs_z {
            max_abs_z = z.abs();
            worst = name;
        }
    };

    for i in 0..n {
        let exact = oracle.mean[idx][i];
        check(
            format!("Re m[{i}]"),
            snap.mean(i).re,
            exact.re,
            batch_snapshots.iter().map(|b| b.mean(i).re).collect(),
        );
        check(
            format!("Im m[{i}]"),
            snap.mean(i).im,
            exact.im,
            batch_snapshots.iter().map(|b| b.mean(i).im).collect(),
        );
        for j in i..n {
            let ce = oracle.c[idx][(i, j)];
            check(
                format!("Re C[{i}][{j}]"),
                snap.c(i, j).re,
                ce.re,
                batch_snapshots.iter().map(|b| b.c(i, j).re).collect(),
            );
            check(
                format!("Im C[{i}][{j}]"),
                snap.c(i, j).im,
                ce.im,
                batch_snapshots.iter().map(|b| b.c(i, j).im).collect(),
            );
            let de = oracle.d[idx][(i, j)];
            check(
                format!("Re D[{i}][{j}]"),
                snap.d(i, j).re,
                de.re,
                batch_snapshots.iter().map(|b| b.d(i, j).re).collect(),
            );
            if i != j {
                check(
                    format!("Im D[{i}][{j}]"),
                    snap.d(i, j).im,
                    de.im,
                    batch_snapshots.iter().map(|b| b.d(i, j).im).collect(),
                );
            }
        }
    }

    Ok(DeviationReport {
        max_abs_z,
        worst_component: worst,
        n_components: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_ensemble, run_ensemble_with_options, EngineOptions, EnsemblePlan};
    use crate::model::ChainParams;
    use approx::assert_abs_diff_eq;

    fn trimer(chi: f64, damp_well: usize, t_final: f64, sample_times: Vec<f64>) -> ChainConfig {
        ChainConfig::new(ChainParams {
            n_wells: 3,
            chi,
            tunneling: 1.0,
            pump_rate: 10.0,
            damp_rate: 1.0,
            pump_well: 1,
            damp_well,
            dt: 1e-3,
            t_final,
            sample_times,
        })
        .unwrap()
    }

    #[test]
    fn meanfield_reaches_end_damped_fixed_point() {
        let cfg = trimer(0.0, 3, 40.0, vec![40.0]);
        let states = meanfield_evolve(&cfg, &[40.0]).unwrap();
        let a = states[0].amplitudes();
        assert!((a[0] - C64::new(10.0, 0.0)).norm() < 0.01);
        assert!((a[1] - C64::new(0.0, 10.0)).norm() < 0.01);
        assert!((a[2] - C64::new(-10.0, 0.0)).norm() < 0.01);
    }

    #[test]
    fn meanfield_middle_damped_grows_quadratically() {
        let cfg = trimer(0.0, 2, 40.0, vec![40.0]);
        let states = meanfield_evolve(&cfg, &[10.0, 20.0, 40.0]).unwrap();
        let n1 = |s: &WignerState| s.amplitudes()[0].norm_sqr();
        let n2 = |s: &WignerState| s.amplitudes()[1].norm_sqr();
        // N1 ~ t^2 at late times; N2 plateaus near 25.
        let ratio = n1(&states[2]) / n1(&states[1]);
        assert!((ratio - 4.0).abs() < 0.4, "quadratic ratio {ratio}");
        assert!((n2(&states[2]) - 25.0).abs() < 2.0, "N2 {}", n2(&states[2]));
    }

    #[test]
    fn meanfield_middle_damped_stays_oscillatory_with_kerr() {
        let cfg = trimer(1e-2, 2, 80.0, vec![80.0]);
        let grid: Vec<f64> = (120..=160).map(|k| k as f64 * 0.5).collect();
        let states = meanfield_evolve(&cfg, &grid).unwrap();
        let n1: Vec<f64> = states.iter().map(|s| s.amplitudes()[0].norm_sqr()).collect();
        let max = n1.iter().cloned().fold(f64::MIN, f64::max);
        let min = n1.iter().cloned().fold(f64::MAX, f64::min);
        // No classical steady state at this interaction strength: the
        // populations keep swinging over the last 20 time units.
        assert!(
            max - min > 0.2 * max,
            "expected persistent oscillation, got range {min}..{max}"
        );
    }

    #[test]
    fn linear_moments_rejects_nonzero_chi() {
        let cfg = trimer(1e-3, 3, 1.0, vec![1.0]);
        assert!(matches!(
            linear_moments(&cfg, &[1.0]),
            Err(OracleError::NonZeroChi(_))
        ));
    }

    #[test]
    fn stationary_end_damped_matches_classical_solution() {
        let cfg = trimer(0.0, 3, 40.0, vec![40.0]);
        let lm = linear_moments(&cfg, &[40.0]).unwrap();
        let ss = lm.stationary().expect("invertible coupling");
        assert!((ss.mean[0] - C64::new(10.0, 0.0)).norm() < 1e-10);
        assert!((ss.mean[1] - C64::new(0.0, 10.0)).norm() < 1e-10);
        assert!((ss.mean[2] - C64::new(-10.0, 0.0)).norm() < 1e-10);
        for w in 0..3 {
            assert_abs_diff_eq!(ss.population(w), 100.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn stationary_covariance_is_vacuum() {
        // The loss-well noise exactly re-fills what the damping removes:
        // D = I/2 solves the stationary covariance equation, for either
        // invertible placement.
        for damp in [1, 3] {
            let cfg = trimer(0.0, damp, 40.0, vec![40.0]);
            let lm = linear_moments(&cfg, &[40.0]).unwrap();
            let ss = lm.stationary().unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { 0.5 } else { 0.0 };
                    assert!((ss.d[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-10);
                    assert!(ss.c[(i, j)].norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn middle_damped_has_no_stationary_solution() {
        let cfg = trimer(0.0, 2, 1.0, vec![1.0]);
        let lm = linear_moments(&cfg, &[1.0]).unwrap();
        assert!(lm.stationary().is_none());
    }

    #[test]
    fn evolved_moments_converge_to_stationary() {
        // The slowest relaxation mode of these chains decays at about
        // 0.215 of the loss rate, so the 1e-6 relative gap needs roughly
        // eighty loss times.
        for damp in [1, 3] {
            let cfg = trimer(0.0, damp, 80.0, vec![80.0]);
            let lm = linear_moments(&cfg, &[40.0, 80.0]).unwrap();
            let ss = lm.stationary().unwrap();
            let gap40: f64 = (lm.mean_at(40.0).unwrap() - &ss.mean).norm() / ss.mean.norm();
            let gap80: f64 = (lm.mean_at(80.0).unwrap() - &ss.mean).norm() / ss.mean.norm();
            assert!(gap40 < 1e-3, "damp {damp}: relative gap {gap40} at t=40");
            assert!(gap80 < 1e-6, "damp {damp}: relative gap {gap80} at t=80");
        }
    }

    #[test]
    fn second_moments_stay_at_vacuum_during_evolution() {
        // With vacuum initial moments the covariance blocks never move:
        // C stays 0 and D stays I/2 for the whole linear evolution.
        let cfg = trimer(0.0, 1, 20.0, vec![20.0]);
        let lm = linear_moments(&cfg, &[5.0, 10.0, 20.0]).unwrap();
        for &t in lm.times() {
            let snap = lm.snapshot_at(t).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { 0.5 } else { 0.0 };
                    assert!(snap.c(i, j).norm() < 1e-12);
                    assert!((snap.d(i, j) - C64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn undriven_chain_keeps_vacuum_covariance() {
        let cfg = ChainConfig::new(ChainParams {
            n_wells: 3,
            chi: 0.0,
            tunneling: 1.0,
            pump_rate: 0.0,
            damp_rate: 0.0,
            pump_well: 1,
            damp_well: 1,
            dt: 1e-3,
            t_final: 5.0,
            sample_times: vec![5.0],
        })
        .unwrap();
        let lm = linear_moments(&cfg, &[5.0]).unwrap();
        let snap = lm.snapshot_at(5.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert!((snap.d(i, j) - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn meanfield_matches_linear_mean() {
        let cfg = trimer(0.0, 1, 10.0, vec![10.0]);
        let states = meanfield_evolve(&cfg, &[2.0, 10.0]).unwrap();
        let lm = linear_moments(&cfg, &[2.0, 10.0]).unwrap();
        for (k, &t) in [2.0, 10.0].iter().enumerate() {
            let m = lm.mean_at(t).unwrap();
            for i in 0..3 {
                assert!(
                    (states[k].amplitudes()[i] - m[i]).norm() < 1e-9,
                    "mismatch at t={t}, well {i}"
                );
            }
        }
    }

    #[test]
    fn healthy_engine_passes_comparison() {
        // Every damping placement, including the singular middle-well case
        // where only the time-domain comparison is available.
        for damp in [1, 2, 3] {
            let cfg = trimer(0.0, damp, 5.0, vec![0.0, 5.0]);
            let plan = EnsemblePlan::new(4000, 2024, 100).unwrap();
            let acc = run_ensemble(&cfg, &plan).unwrap();
            let lm = linear_moments(&cfg, &[0.0, 5.0]).unwrap();
            for t in [0.0, 5.0] {
                let report = compare(
                    &acc.snapshot(t).unwrap(),
                    &acc.batch_snapshots(t).unwrap(),
                    &lm,
                    t,
                )
                .unwrap();
                assert!(
                    report.max_abs_z < 5.0,
                    "damp={damp} t={t}: max |z| = {} at {}",
                    report.max_abs_z,
                    report.worst_component
                );
            }
        }
    }

    #[test]
    fn doubled_noise_fails_comparison() {
        let cfg = trimer(0.0, 3, 5.0, vec![5.0]);
        let plan = EnsemblePlan::new(4000, 2024, 100).unwrap();
        let acc =
            run_ensemble_with_options(&cfg, &plan, EngineOptions { noise_scale: 2.0 }).unwrap();
        let lm = linear_moments(&cfg, &[5.0]).unwrap();
        let report = compare(
            &acc.snapshot(5.0).unwrap(),
            &acc.batch_snapshots(5.0).unwrap(),
            &lm,
            5.0,
        )
        .unwrap();
        // The damped well's variance sits at 1 instead of 1/2.
        assert!(
            report.max_abs_z > 10.0,
            "expected a gross deviation, got {} at {}",
            report.max_abs_z,
            report.worst_component
        );
        assert!(report.worst_component.contains('D'));
    }

    #[test]
    fn comparison_rejects_unknown_time() {
        let cfg = trimer(0.0, 3, 1.0, vec![1.0]);
        let plan = EnsemblePlan::new(200, 0, 2).unwrap();
        let acc = run_ensemble(&cfg, &plan).unwrap();
        let lm = linear_moments(&cfg, &[1.0]).unwrap();
        assert!(matches!(
            compare(
                &acc.snapshot(1.0).unwrap(),
                &acc.batch_snapshots(1.0).unwrap(),
                &lm,
                0.5
            ),
            Err(OracleError::UnknownTime(_))
        ));
    }
}
