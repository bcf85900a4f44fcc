//! Quadrature-based correlation criteria computed from Gaussian moment
//! snapshots: angle-resolved variances, Duan-Simon inseparability, Reid
//! EPR-steering products, van Loock-Furusawa pairwise and triple forms
//! with optimized gains, tripartite inferred-variance steering products,
//! and the mixed-state threshold classifications.
//!
//! Quadratures are `X_j(theta) = a_j e^{-i theta} + conj(a_j) e^{i theta}`
//! with `Y_j(theta) = X_j(theta + pi/2)`; a variance below 1 signals
//! squeezing. Angles are radians at this layer; reports use degrees.

mod report;

pub use report::{
    analyze, family_criteria, scan_angles, write_report_csv, CriteriaReport, Criterion,
    CriterionEval, CriterionFamily, CriterionResult,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

use crate::C64;

#[derive(Debug, Error)]
pub enum CriterionError {
    #[error("inferring quadrature variance {variance:.3e} is below the degeneracy floor {floor:.3e}")]
    DegenerateInferrer { variance: f64, floor: f64 },
    #[error("criterion family '{family}' requires exactly 3 modes, chain has {n_wells}")]
    UnsupportedModeCount { family: String, n_wells: usize },
}

/// Derived Gaussian moment set at one time: complex means `m`, the
/// symmetric central block `C[i][j] = <a_i a_j> - m_i m_j`, and the
/// Hermitian central block `D[i][j] = <conj(a_i) a_j> - conj(m_i) m_j`.
/// These two blocks determine every quadrature covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSnapshot {
    n_wells: usize,
    m: Vec<C64>,
    c: Vec<C64>,
    d: Vec<C64>,
    n_samples: u64,
}

impl CorrelationSnapshot {
    pub fn new(m: Vec<C64>, c: Vec<C64>, d: Vec<C64>, n_samples: u64) -> Self {
        let n = m.len();
        assert_eq!(c.len(), n * n, "C block must be n x n");
        assert_eq!(d.len(), n * n, "D block must be n x n");
        Self {
            n_wells: n,
            m,
            c,
            d,
            n_samples,
        }
    }

    /// The vacuum (equivalently, any coherent-state) snapshot: `C = 0`,
    /// `D = I/2`. Every criterion sits exactly on its classical baseline
    /// here.
    pub fn vacuum(n_wells: usize) -> Self {
        let mut d = vec![C64::new(0.0, 0.0); n_wells * n_wells];
        for i in 0..n_wells {
            d[i * n_wells + i] = C64::new(0.5, 0.0);
        }
        Self {
            n_wells,
            m: vec![C64::new(0.0, 0.0); n_wells],
            c: vec![C64::new(0.0, 0.0); n_wells * n_wells],
            d,
            n_samples: 0,
        }
    }

    pub fn n_wells(&self) -> usize {
        self.n_wells
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    pub fn mean(&self, i: usize) -> C64 {
        self.m[i]
    }

    pub fn c(&self, i: usize, j: usize) -> C64 {
        self.c[i * self.n_wells + j]
    }

    pub fn d(&self, i: usize, j: usize) -> C64 {
        self.d[i * self.n_wells + j]
    }

    /// Snapshot with wells relabelled `i <-> n+1-i`.
    pub fn mirrored(&self) -> Self {
        let n = self.n_wells;
        let r = |i: usize| n - 1 - i;
        let mut m = vec![C64::new(0.0, 0.0); n];
        let mut c = vec![C64::new(0.0, 0.0); n * n];
        let mut d = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            m[i] = self.m[r(i)];
            for j in 0..n {
                c[i * n + j] = self.c(r(i), r(j));
                d[i * n + j] = self.d(r(i), r(j));
            }
        }
        Self {
            n_wells: n,
            m,
            c,
            d,
            n_samples: self.n_samples,
        }
    }

    /// Degeneracy floor for inferred-variance denominators, scaled to the
    /// snapshot's own variance magnitude.
    fn variance_floor(&self) -> f64 {
        let scale = (0..self.n_wells)
            .map(|i| self.d(i, i).re.abs())
            .fold(0.0, f64::max);
        1e-12 * (1.0 + 2.0 * scale)
    }
}

/// Covariance of two angle-resolved quadratures,
/// `V(X_i(theta_i), X_j(theta_j))`, from the central moment blocks:
///
/// `2 Re[C_ij e^{-i(theta_i+theta_j)}] + 2 Re[D_ij e^{+i(theta_i-theta_j)}]`
///
/// which reproduces the per-trajectory covariance statistic exactly. For
/// `i = j` this is the (real, nonnegative) variance `V(X_i(theta))`.
pub fn quad_cov(snap: &CorrelationSnapshot, i: usize, theta_i: f64, j: usize, theta_j: f64) -> f64 {
    let e_sum = C64::from_polar(1.0, -(theta_i + theta_j));
    let e_diff = C64::from_polar(1.0, theta_i - theta_j);
    2.0 * ((snap.c(i, j) * e_sum).re + (snap.d(i, j) * e_diff).re)
}

#[inline]
fn var_x(snap: &CorrelationSnapshot, i: usize, theta: f64) -> f64 {
    quad_cov(snap, i, theta, i, theta)
}

/// Duan-Simon combination `V(X_i + X_j) + V(Y_i - Y_j)` at a common
/// angle. Separable states satisfy `>= 4`.
pub fn duan_simon(snap: &CorrelationSnapshot, i: usize, j: usize, theta: f64) -> f64 {
    let vx = var_x(snap, i, theta) + var_x(snap, j, theta) + 2.0 * quad_cov(snap, i, theta, j, theta);
    let ty = theta + FRAC_PI_2;
    let vy = var_x(snap, i, ty) + var_x(snap, j, ty) - 2.0 * quad_cov(snap, i, ty, j, ty);
    vx + vy
}

fn inferred_variance(
    snap: &CorrelationSnapshot,
    target: usize,
    inferrer_var: f64,
    cross_cov: f64,
    theta: f64,
) -> Result<f64, CriterionError> {
    let floor = snap.variance_floor();
    if inferrer_var <= floor {
        return Err(CriterionError::DegenerateInferrer {
            variance: inferrer_var,
            floor,
        });
    }
    Ok(var_x(snap, target, theta) - cross_cov * cross_cov / inferrer_var)
}

/// Reid EPR product for mode `inferred` as inferred by measurements on
/// mode `inferring`, at a common angle:
/// `V_inf(X_i) V_inf(Y_i)` with
/// `V_inf(X_i) = V(X_i) - V(X_i, X_j)^2 / V(X_j)`.
/// A value below 1 demonstrates EPR-steering of `inferred` by `inferring`.
pub fn reid_epr(
    snap: &CorrelationSnapshot,
    inferred: usize,
    inferring: usize,
    theta: f64,
) -> Result<f64, CriterionError> {
    let part = |t: f64| {
        inferred_variance(
            snap,
            inferred,
            var_x(snap, inferring, t),
            quad_cov(snap, inferred, t, inferring, t),
            t,
        )
    };
    Ok(part(theta)? * part(theta + FRAC_PI_2)?)
}

/// Pairwise van Loock-Furusawa combination
/// `V_ij = V(X_i - X_j) + V(Y_i + Y_j + g_k Y_k)` at a common angle, with
/// the third-mode gain chosen analytically to minimise the second term:
/// `g_k = -[V(Y_k, Y_i) + V(Y_k, Y_j)] / V(Y_k)`.
/// Separable triples satisfy `>= 4`. Returns `(value, gain)`.
pub fn vlf_pair(
    snap: &CorrelationSnapshot,
    i: usize,
    j: usize,
    k: usize,
    theta: f64,
) -> Result<(f64, f64), CriterionError> {
    let vx = var_x(snap, i, theta) + var_x(snap, j, theta) - 2.0 * quad_cov(snap, i, theta, j, theta);

    let ty = theta + FRAC_PI_2;
    let vyk = var_x(snap, k, ty);
    let floor = snap.variance_floor();
    if vyk <= floor {
        return Err(CriterionError::DegenerateInferrer {
            variance: vyk,
            floor,
        });
    }
    let cki = quad_cov(snap, k, ty, i, ty);
    let ckj = quad_cov(snap, k, ty, j, ty);
    let mut g = -(cki + ckj) / vyk;
    if g == 0.0 {
        g = 0.0; // normalise -0.0
    }
    let vy = var_x(snap, i, ty)
        + var_x(snap, j, ty)
        + g * g * vyk
        + 2.0 * quad_cov(snap, i, ty, j, ty)
        + 2.0 * g * cki
        + 2.0 * g * ckj;
    Ok((vx + vy, g))
}

/// Triple van Loock-Furusawa combination
/// `V_ijk = V(X_i - (X_j + X_k)/sqrt 2) + V(Y_i + (Y_j + Y_k)/sqrt 2)`.
/// Below 4 proves tripartite inseparability on its own; below 2 genuine
/// tripartite entanglement; below 1 genuine tripartite EPR-steering
/// (mixed-state thresholds).
pub fn vlf_triple(snap: &CorrelationSnapshot, i: usize, j: usize, k: usize, theta: f64) -> f64 {
    let sqrt2 = std::f64::consts::SQRT_2;
    let part = |t: f64, sign: f64| {
        var_x(snap, i, t)
            + 0.5 * (var_x(snap, j, t) + var_x(snap, k, t) + 2.0 * quad_cov(snap, j, t, k, t))
            + sign * sqrt2 * (quad_cov(snap, i, t, j, t) + quad_cov(snap, i, t, k, t))
    };
    part(theta, -1.0) + part(theta + FRAC_PI_2, 1.0)
}

/// Sign choice in the two-mode inferrer combination `X_j +/- X_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Tripartite inferred-variance steering product for mode `steered`
/// inferred by the combination `X_j +/- X_k` (same sign for the Y part):
/// `V_inf(X_i) V_inf(Y_i)` with
/// `V_inf(X_i) = V(X_i) - V(X_i, X_j +/- X_k)^2 / V(X_j +/- X_k)`.
/// Below 1 means modes `j` and `k` jointly steer mode `i`.
///
/// With `force_sign = None` both signs are evaluated and the smaller
/// product is returned along with the sign that achieved it.
pub fn obr(
    snap: &CorrelationSnapshot,
    steered: usize,
    j: usize,
    k: usize,
    theta: f64,
    force_sign: Option<Sign>,
) -> Result<(f64, Sign), CriterionError> {
    match force_sign {
        Some(s) => Ok((obr_weighted(snap, steered, j, k, theta, s.factor())?, s)),
        None => {
            let plus = obr_weighted(snap, steered, j, k, theta, 1.0)?;
            let minus = obr_weighted(snap, steered, j, k, theta, -1.0)?;
            if minus < plus {
                Ok((minus, Sign::Minus))
            } else {
                Ok((plus, Sign::Plus))
            }
        }
    }
}

/// OBR product with an arbitrary weight `w` on the second inferrer mode
/// (`u = X_j + w X_k`). `w = +/-1` gives the published combinations;
/// `w = 0` reduces to the two-mode Reid product exactly.
fn obr_weighted(
    snap: &CorrelationSnapshot,
    steered: usize,
    j: usize,
    k: usize,
    theta: f64,
    w: f64,
) -> Result<f64, CriterionError> {
    let part = |t: f64| {
        let vu = var_x(snap, j, t) + w * w * var_x(snap, k, t) + 2.0 * w * quad_cov(snap, j, t, k, t);
        let ciu = quad_cov(snap, steered, t, j, t) + w * quad_cov(snap, steered, t, k, t);
        inferred_variance(snap, steered, vu, ciu, t)
    };
    Ok(part(theta)? * part(theta + FRAC_PI_2)?)
}

/// Optimized values feeding the tripartite classification. Any subset may
/// be provided; absent routes simply cannot assert their flags.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct TripartiteInput {
    /// `[V_12, V_13, V_23]` pairwise combinations.
    pub pairwise: Option<[f64; 3]>,
    /// `[V_123, V_231, V_312]` triple combinations.
    pub triple: Option<[f64; 3]>,
    /// `[OBR_123, OBR_231, OBR_312]` steering products.
    pub obr: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartiteClassification {
    pub inseparable: bool,
    pub genuine_entanglement: bool,
    pub genuine_steering: bool,
}

/// Mixed-state threshold classification of a mode triple.
///
/// Pairwise route: two of the three `V_ij` below 4 prove inseparability;
/// their sum below 8 genuine tripartite entanglement; below 4 genuine
/// tripartite EPR-steering. Triple route: any `V_ijk` below 4 / 2 / 1
/// respectively. Any OBR product below 1 proves genuine tripartite
/// entanglement (steering is a subset of entanglement).
pub fn teh_reid_classify(input: &TripartiteInput) -> TripartiteClassification {
    let mut class = TripartiteClassification::default();
    if let Some(v) = input.pairwise {
        if v.iter().filter(|&&x| x < 4.0).count() >= 2 {
            class.inseparable = true;
        }
        let sum: f64 = v.iter().sum();
        if sum < 8.0 {
            class.genuine_entanglement = true;
        }
        if sum < 4.0 {
            class.genuine_steering = true;
        }
    }
    if let Some(v) = input.triple {
        if v.iter().any(|&x| x < 4.0) {
            class.inseparable = true;
        }
        if v.iter().any(|&x| x < 2.0) {
            class.genuine_entanglement = true;
        }
        if v.iter().any(|&x| x < 1.0) {
            class.genuine_steering = true;
        }
    }
    if let Some(v) = input.obr {
        if v.iter().any(|&x| x < 1.0) {
            class.genuine_entanglement = true;
        }
    }
    // Stronger properties imply the weaker ones.
    if class.genuine_steering {
        class.genuine_entanglement = true;
    }
    if class.genuine_entanglement {
        class.inseparable = true;
    }
    class
}

/// Minimizing quadrature angle of a criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizedAngle {
    pub theta_deg: f64,
    pub value: f64,
}

/// Minimise a criterion over the quadrature angle: a half-degree grid
/// scan over `[0, 180)` followed by golden-section refinement of the best
/// bracket down to 0.01 degrees. Ties break toward the smallest angle.
/// The evaluator takes radians.
pub fn optimize_angle<F: FnMut(f64) -> f64>(mut eval: F) -> OptimizedAngle {
    let mut best_deg = 0.0;
    let mut best = eval(0.0);
    for step in 1..360 {
        let deg = step as f64 * 0.5;
        let v = eval(deg.to_radians());
        if v < best {
            best = v;
            best_deg = deg;
        }
    }
    let (refined_deg, refined) =
        golden_min(|d| eval(d.to_radians()), best_deg - 0.5, best_deg + 0.5, 0.01);
    if refined < best {
        OptimizedAngle {
            theta_deg: refined_deg.rem_euclid(180.0),
            value: refined,
        }
    } else {
        OptimizedAngle {
            theta_deg: best_deg,
            value: best,
        }
    }
}

/// Golden-section search for the minimum of `f` on `[a, b]` to the given
/// x tolerance. Returns `(x_min, f_min)`.
fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    /// Snapshot built from raw samples, plus the samples themselves, for
    /// two-path consistency checks.
    fn sampled_snapshot(seed: u64, n_samples: usize) -> (CorrelationSnapshot, Vec<Vec<C64>>) {
        let mut rng = crate::engine::trajectory_rng(seed, 0);
        // Correlated non-Gaussian-ish raw samples: mix a shared complex
        // normal into each mode with different phases.
        let samples: Vec<Vec<C64>> = (0..n_samples)
            .map(|_| {
                let shared = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                (0..3)
                    .map(|m| {
                        let own = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                        own + shared * C64::from_polar(1.0, 0.7 * m as f64) * (1.0 + m as f64 * 0.3)
                    })
                    .collect()
            })
            .collect();
        let nf = n_samples as f64;
        let mut m = vec![C64::new(0.0, 0.0); 3];
        for s in &samples {
            for i in 0..3 {
                m[i] += s[i];
            }
        }
        for mi in m.iter_mut() {
            *mi /= nf;
        }
        let mut c = vec![C64::new(0.0, 0.0); 9];
        let mut d = vec![C64::new(0.0, 0.0); 9];
        for s in &samples {
            for i in 0..3 {
                for j in 0..3 {
                    c[i * 3 + j] += (s[i] - m[i]) * (s[j] - m[j]);
                    d[i * 3 + j] += (s[i] - m[i]).conj() * (s[j] - m[j]);
                }
            }
        }
        for z in c.iter_mut() {
            *z /= nf;
        }
        for z in d.iter_mut() {
            *z /= nf;
        }
        (
            CorrelationSnapshot::new(m, c, d, n_samples as u64),
            samples,
        )
    }

    #[test]
    fn vacuum_baselines_are_exact() {
        let snap = CorrelationSnapshot::vacuum(3);
        for theta in [0.0, 0.3, 1.1, 2.9] {
            assert_eq!(var_x(&snap, 0, theta), 1.0);
            assert_eq!(duan_simon(&snap, 0, 1, theta), 4.0);
            assert_eq!(reid_epr(&snap, 0, 1, theta).unwrap(), 1.0);
            let (v, g) = vlf_pair(&snap, 0, 1, 2, theta).unwrap();
            assert_eq!(v, 4.0);
            assert_eq!(g, 0.0);
            assert_eq!(vlf_triple(&snap, 0, 1, 2, theta), 4.0);
            let (o, _) = obr(&snap, 0, 1, 2, theta, None).unwrap();
            assert_eq!(o, 1.0);
        }
    }

    #[test]
    fn two_mode_squeezed_state_closed_forms() {
        // Two-mode squeezed vacuum in modes 1 and 2 (vacuum in mode 3):
        // D_11 = D_22 = cosh(2r)/2, C_12 = sinh(2r)/2, D_33 = 1/2.
        // Closed forms: V(X_1) = cosh 2r at every angle, the pair
        // combinations reach 4 e^{-2r}, the Reid product 1/cosh^2(2r) at
        // theta = 0, and diluting the inferrer with the vacuum mode makes
        // the tripartite product exactly 1.
        let r: f64 = 0.4;
        let ch = (2.0 * r).cosh();
        let sh = (2.0 * r).sinh();
        let mut c = vec![C64::new(0.0, 0.0); 9];
        let mut d = vec![C64::new(0.0, 0.0); 9];
        let at = |i: usize, j: usize| i * 3 + j;
        c[at(0, 1)] = C64::new(sh / 2.0, 0.0);
        c[at(1, 0)] = C64::new(sh / 2.0, 0.0);
        d[at(0, 0)] = C64::new(ch / 2.0, 0.0);
        d[at(1, 1)] = C64::new(ch / 2.0, 0.0);
        d[at(2, 2)] = C64::new(0.5, 0.0);
        let snap = CorrelationSnapshot::new(vec![C64::new(0.0, 0.0); 3], c, d, 0);

        for theta in [0.0, 0.9, 2.2] {
            assert_abs_diff_eq!(var_x(&snap, 0, theta), ch, epsilon = 1e-12);
        }
        let ds = optimize_angle(|t| duan_simon(&snap, 0, 1, t));
        assert_abs_diff_eq!(ds.value, 4.0 * (-2.0 * r).exp(), epsilon = 1e-9);
        assert_abs_diff_eq!(ds.theta_deg, 90.0, epsilon = 0.05);

        let (v12, g) = vlf_pair(&snap, 0, 1, 2, 0.0).unwrap();
        assert_abs_diff_eq!(v12, 4.0 * (-2.0 * r).exp(), epsilon = 1e-12);
        assert_eq!(g, 0.0);

        assert_abs_diff_eq!(
            reid_epr(&snap, 0, 1, 0.0).unwrap(),
            1.0 / (ch * ch),
            epsilon = 1e-12
        );
        let epr_opt = optimize_angle(|t| reid_epr(&snap, 0, 1, t).unwrap());
        assert_abs_diff_eq!(epr_opt.value, 1.0 / (ch * ch), epsilon = 1e-9);
        assert_eq!(epr_opt.theta_deg, 0.0);

        // Diluting the inferrer with the vacuum mode: at theta = 0 the
        // inferred variances reduce to exactly 1 (cosh - sinh^2/(cosh+1)),
        // and no other angle does better.
        let (o, _) = obr(&snap, 0, 1, 2, 0.0, None).unwrap();
        assert_abs_diff_eq!(o, 1.0, epsilon = 1e-12);
        let obr_opt = optimize_angle(|t| obr(&snap, 0, 1, 2, t, None).unwrap().0);
        assert_abs_diff_eq!(obr_opt.value, 1.0, epsilon = 1e-9);
        assert_eq!(obr_opt.theta_deg, 0.0);
    }

    #[test]
    fn two_path_consistency_with_raw_samples() {
        // quad_cov from (m, C, D) must equal the direct covariance of the
        // per-sample quadrature values.
        let (snap, samples) = sampled_snapshot(91, 400);
        let nf = samples.len() as f64;
        for &(i, ti, j, tj) in &[
            (0usize, 0.0f64, 1usize, 0.0f64),
            (0, 0.7, 2, 1.9),
            (1, 2.2, 1, 2.2),
            (2, 0.3, 0, 4.4),
        ] {
            let x = |s: &Vec<C64>, mode: usize, th: f64| {
                2.0 * (s[mode] * C64::from_polar(1.0, -th)).re
            };
            let mean_i: f64 = samples.iter().map(|s| x(s, i, ti)).sum::<f64>() / nf;
            let mean_j: f64 = samples.iter().map(|s| x(s, j, tj)).sum::<f64>() / nf;
            let direct: f64 = samples
                .iter()
                .map(|s| (x(s, i, ti) - mean_i) * (x(s, j, tj) - mean_j))
                .sum::<f64>()
                / nf;
            let from_moments = quad_cov(&snap, i, ti, j, tj);
            assert_abs_diff_eq!(direct, from_moments, epsilon = 1e-10 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn obr_with_zero_weight_reduces_to_reid() {
        let (snap, _) = sampled_snapshot(17, 300);
        for theta in [0.0, 0.5, 1.3] {
            let epr = reid_epr(&snap, 1, 0, theta).unwrap();
            let reduced = obr_weighted(&snap, 1, 0, 2, theta, 0.0).unwrap();
            assert_eq!(epr, reduced);
        }
    }

    #[test]
    fn obr_reports_the_smaller_sign() {
        let (snap, _) = sampled_snapshot(23, 300);
        for theta in [0.2, 1.0, 2.5] {
            let (best, sign) = obr(&snap, 0, 1, 2, theta, None).unwrap();
            let (plus, _) = obr(&snap, 0, 1, 2, theta, Some(Sign::Plus)).unwrap();
            let (minus, _) = obr(&snap, 0, 1, 2, theta, Some(Sign::Minus)).unwrap();
            assert_eq!(best, plus.min(minus));
            let expect = if minus < plus { Sign::Minus } else { Sign::Plus };
            assert_eq!(sign, expect);
        }
    }

    #[test]
    fn analytic_gain_is_locally_optimal() {
        let (snap, _) = sampled_snapshot(5, 500);
        let theta = 0.8;
        let ty = theta + FRAC_PI_2;
        let (_, g) = vlf_pair(&snap, 0, 1, 2, theta).unwrap();
        let vy = |g: f64| {
            var_x(&snap, 0, ty)
                + var_x(&snap, 1, ty)
                + g * g * var_x(&snap, 2, ty)
                + 2.0 * quad_cov(&snap, 0, ty, 1, ty)
                + 2.0 * g * quad_cov(&snap, 2, ty, 0, ty)
                + 2.0 * g * quad_cov(&snap, 2, ty, 1, ty)
        };
        assert!(vy(g) <= vy(0.0));
        assert!(vy(g) <= vy(g + 0.01));
        assert!(vy(g) <= vy(g - 0.01));
    }

    #[test]
    fn classify_threshold_arithmetic() {
        let class = teh_reid_classify(&TripartiteInput {
            pairwise: Some([3.9, 3.9, 3.9]),
            ..Default::default()
        });
        assert!(class.inseparable);
        assert!(!class.genuine_entanglement); // sum 11.7 >= 8
        assert!(!class.genuine_steering);

        // Only one pairwise value below 4 is not sufficient.
        let class = teh_reid_classify(&TripartiteInput {
            pairwise: Some([2.9, 5.2, 4.2]),
            ..Default::default()
        });
        assert!(!class.inseparable);

        // A triple-form value below 4 is sufficient on its own.
        let class = teh_reid_classify(&TripartiteInput {
            triple: Some([4.3, 3.9, 4.9]),
            ..Default::default()
        });
        assert!(class.inseparable);
        assert!(!class.genuine_entanglement);

        // Any steering product below 1 proves genuine entanglement.
        let class = teh_reid_classify(&TripartiteInput {
            obr: Some([0.39, 1.2, 3.0]),
            ..Default::default()
        });
        assert!(class.genuine_entanglement);
        assert!(class.inseparable);
        assert!(!class.genuine_steering);
    }

    #[test]
    fn optimizer_finds_sinusoid_minimum() {
        // V = 2 + cos(2 theta + 0.9) has its minimum where the cosine hits
        // -1: 2 theta + 0.9 = pi.
        let f = |t: f64| 2.0 + (2.0 * t + 0.9).cos();
        let opt = optimize_angle(f);
        let expect_deg = ((std::f64::consts::PI - 0.9) / 2.0).to_degrees();
        assert_abs_diff_eq!(opt.theta_deg, expect_deg, epsilon = 0.02);
        assert_abs_diff_eq!(opt.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn optimizer_ties_break_to_zero() {
        let opt = optimize_angle(|_| 1.0);
        assert_eq!(opt.theta_deg, 0.0);
        assert_eq!(opt.value, 1.0);
    }

    #[test]
    fn mirrored_snapshot_transports_criteria() {
        let (snap, _) = sampled_snapshot(37, 200);
        let mir = snap.mirrored();
        let theta = 0.55;
        // Relabelled indices give identical values (same arithmetic on the
        // same numbers).
        assert_eq!(
            quad_cov(&snap, 0, theta, 2, theta),
            quad_cov(&mir, 2, theta, 0, theta)
        );
        assert_eq!(
            duan_simon(&snap, 0, 1, theta),
            duan_simon(&mir, 2, 1, theta)
        );
        assert_eq!(
            reid_epr(&snap, 0, 1, theta).unwrap(),
            reid_epr(&mir, 2, 1, theta).unwrap()
        );
        assert_eq!(
            vlf_triple(&snap, 1, 0, 2, theta),
            vlf_triple(&mir, 1, 2, 0, theta)
        );
    }

    proptest! {
        #[test]
        fn criteria_are_pi_periodic(seed in 0u64..500, theta in 0.0f64..std::f64::consts::PI) {
            let (snap, _) = sampled_snapshot(seed, 60);
            let tol = |v: f64| 1e-9 * (1.0 + v.abs());

            let v0 = var_x(&snap, 0, theta);
            let v1 = var_x(&snap, 0, theta + std::f64::consts::PI);
            prop_assert!((v0 - v1).abs() <= tol(v0));

            let d0 = duan_simon(&snap, 0, 2, theta);
            let d1 = duan_simon(&snap, 0, 2, theta + std::f64::consts::PI);
            prop_assert!((d0 - d1).abs() <= tol(d0));

            let e0 = reid_epr(&snap, 1, 2, theta).unwrap();
            let e1 = reid_epr(&snap, 1, 2, theta + std::f64::consts::PI).unwrap();
            prop_assert!((e0 - e1).abs() <= tol(e0));

            let t0 = vlf_triple(&snap, 2, 0, 1, theta);
            let t1 = vlf_triple(&snap, 2, 0, 1, theta + std::f64::consts::PI);
            prop_assert!((t0 - t1).abs() <= tol(t0));

            let (o0, _) = obr(&snap, 1, 0, 2, theta, Some(Sign::Minus)).unwrap();
            let (o1, _) = obr(&snap, 1, 0, 2, theta + std::f64::consts::PI, Some(Sign::Minus)).unwrap();
            prop_assert!((o0 - o1).abs() <= tol(o0));
        }

        #[test]
        fn variance_is_symmetric_and_nonnegative(seed in 0u64..500, theta in 0.0f64..std::f64::consts::PI) {
            let (snap, _) = sampled_snapshot(seed, 60);
            for i in 0..3 {
                let v = var_x(&snap, i, theta);
                prop_assert!(v >= -1e-12);
                for j in 0..3 {
                    let a = quad_cov(&snap, i, theta, j, theta);
                    let b = quad_cov(&snap, j, theta, i, theta);
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
                }
            }
        }
    }
}
