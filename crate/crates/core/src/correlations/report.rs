//! Criterion catalogue and angle-optimized report assembly.
//!
//! A [`Criterion`] names one inequality at fixed mode indices; reports
//! optimize each over the common quadrature angle, attach batch-means
//! errors, and classify the mode triple with the mixed-state thresholds.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    duan_simon, obr, optimize_angle, quad_cov, reid_epr, teh_reid_classify, vlf_pair, vlf_triple,
    CorrelationSnapshot, CriterionError, Sign, TripartiteClassification, TripartiteInput,
};
use crate::engine::batch_std_err;

/// One inequality at fixed mode indices (0-based; labels are 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Single-mode quadrature variance; below 1 is squeezing.
    QuadVariance { mode: usize },
    /// Duan-Simon pair combination; below 4 proves inseparability.
    DuanSimon { a: usize, b: usize },
    /// Reid product for `inferred` as inferred by `inferring`; below 1
    /// demonstrates EPR-steering.
    ReidEpr { inferred: usize, inferring: usize },
    /// Pairwise van Loock-Furusawa combination with an optimized gain on
    /// `gain_mode`; below 4 contributes to tripartite inseparability.
    VlfPair { a: usize, b: usize, gain_mode: usize },
    /// Triple van Loock-Furusawa combination centred on `target`.
    VlfTriple { target: usize, rest: (usize, usize) },
    /// Tripartite steering product for `steered` inferred by the pair.
    Obr { steered: usize, pair: (usize, usize) },
}

/// Detailed evaluation outcome: the value plus any auxiliary choices the
/// criterion made (gain, sign).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionEval {
    pub value: f64,
    pub gain: Option<f64>,
    pub sign: Option<Sign>,
}

impl Criterion {
    pub fn label(&self) -> String {
        match *self {
            Criterion::QuadVariance { mode } => format!("V(X{})", mode + 1),
            Criterion::DuanSimon { a, b } => format!("DS{}{}", a + 1, b + 1),
            Criterion::ReidEpr {
                inferred,
                inferring,
            } => format!("EPR{}{}", inferred + 1, inferring + 1),
            Criterion::VlfPair { a, b, .. } => format!("V{}{}", a + 1, b + 1),
            Criterion::VlfTriple { target, rest } => {
                format!("V{}{}{}", target + 1, rest.0 + 1, rest.1 + 1)
            }
            Criterion::Obr { steered, pair } => {
                format!("OBR{}{}{}", steered + 1, pair.0 + 1, pair.1 + 1)
            }
        }
    }

    /// Classical bound: values strictly below it violate the inequality.
    pub fn classical_bound(&self) -> f64 {
        match self {
            Criterion::QuadVariance { .. } | Criterion::ReidEpr { .. } | Criterion::Obr { .. } => {
                1.0
            }
            Criterion::DuanSimon { .. }
            | Criterion::VlfPair { .. }
            | Criterion::VlfTriple { .. } => 4.0,
        }
    }

    /// Exact period of the criterion in the common quadrature angle. The
    /// inferred-variance products are 90-degree periodic (advancing the
    /// angle by a quarter turn swaps their X and Y factors), so their
    /// optimizing angle is only defined modulo 90 degrees.
    pub fn angle_period_deg(&self) -> f64 {
        match self {
            Criterion::ReidEpr { .. } | Criterion::Obr { .. } => 90.0,
            _ => 180.0,
        }
    }

    /// Evaluate at a common quadrature angle (radians).
    pub fn evaluate(
        &self,
        snap: &CorrelationSnapshot,
        theta: f64,
    ) -> Result<f64, CriterionError> {
        self.evaluate_detailed(snap, theta, None).map(|e| e.value)
    }

    /// Evaluate, reporting the gain/sign actually used. `force_sign`
    /// pins the OBR sign choice (used for batch error propagation).
    pub fn evaluate_detailed(
        &self,
        snap: &CorrelationSnapshot,
        theta: f64,
        force_sign: Option<Sign>,
    ) -> Result<CriterionEval, CriterionError> {
        let plain = |value: f64| CriterionEval {
            value,
            gain: None,
            sign: None,
        };
        match *self {
            Criterion::QuadVariance { mode } => Ok(plain(quad_cov(snap, mode, theta, mode, theta))),
            Criterion::DuanSimon { a, b } => Ok(plain(duan_simon(snap, a, b, theta))),
            Criterion::ReidEpr {
                inferred,
                inferring,
            } => Ok(plain(reid_epr(snap, inferred, inferring, theta)?)),
            Criterion::VlfPair { a, b, gain_mode } => {
                let (value, gain) = vlf_pair(snap, a, b, gain_mode, theta)?;
                Ok(CriterionEval {
                    value,
                    gain: Some(gain),
                    sign: None,
                })
            }
            Criterion::VlfTriple { target, rest } => {
                Ok(plain(vlf_triple(snap, target, rest.0, rest.1, theta)))
            }
            Criterion::Obr { steered, pair } => {
                let (value, sign) = obr(snap, steered, pair.0, pair.1, theta, force_sign)?;
                Ok(CriterionEval {
                    value,
                    gain: None,
                    sign: Some(sign),
                })
            }
        }
    }
}

/// A family of criteria expanded over mode indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriterionFamily {
    Quad,
    DuanSimon,
    Epr,
    VlfPair,
    VlfTriple,
    Obr,
}

impl CriterionFamily {
    pub const ALL: [CriterionFamily; 6] = [
        CriterionFamily::Quad,
        CriterionFamily::DuanSimon,
        CriterionFamily::Epr,
        CriterionFamily::VlfPair,
        CriterionFamily::VlfTriple,
        CriterionFamily::Obr,
    ];
}

impl fmt::Display for CriterionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CriterionFamily::Quad => "quad",
            CriterionFamily::DuanSimon => "ds",
            CriterionFamily::Epr => "epr",
            CriterionFamily::VlfPair => "vlf-pair",
            CriterionFamily::VlfTriple => "vlf-triple",
            CriterionFamily::Obr => "obr",
        };
        f.write_str(s)
    }
}

impl FromStr for CriterionFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quad" | "squeezing" => Ok(CriterionFamily::Quad),
            "ds" | "duan-simon" => Ok(CriterionFamily::DuanSimon),
            "epr" | "reid" => Ok(CriterionFamily::Epr),
            "vlf-pair" | "vlf2" => Ok(CriterionFamily::VlfPair),
            "vlf-triple" | "vlf3" => Ok(CriterionFamily::VlfTriple),
            "obr" => Ok(CriterionFamily::Obr),
            other => Err(format!(
                "unknown criterion family '{other}' (expected quad, ds, epr, vlf-pair, vlf-triple, or obr)"
            )),
        }
    }
}

/// Expand a family over the modes of an `n_wells` chain. The tripartite
/// families are defined for exactly three modes.
pub fn family_criteria(
    family: CriterionFamily,
    n_wells: usize,
) -> Result<Vec<Criterion>, CriterionError> {
    let tripartite = |family: CriterionFamily| -> Result<(), CriterionError> {
        if n_wells == 3 {
            Ok(())
        } else {
            Err(CriterionError::UnsupportedModeCount {
                family: family.to_string(),
                n_wells,
            })
        }
    };
    let mut out = Vec::new();
    match family {
        CriterionFamily::Quad => {
            for mode in 0..n_wells {
                out.push(Criterion::QuadVariance { mode });
            }
        }
        CriterionFamily::DuanSimon => {
            for a in 0..n_wells {
                for b in a + 1..n_wells {
                    out.push(Criterion::DuanSimon { a, b });
                }
            }
        }
        CriterionFamily::Epr => {
            for a in 0..n_wells {
                for b in a + 1..n_wells {
                    out.push(Criterion::ReidEpr {
                        inferred: a,
                        inferring: b,
                    });
                    out.push(Criterion::ReidEpr {
                        inferred: b,
                        inferring: a,
                    });
                }
            }
        }
        CriterionFamily::VlfPair => {
            tripartite(family)?;
            out.push(Criterion::VlfPair { a: 0, b: 1, gain_mode: 2 });
            out.push(Criterion::VlfPair { a: 0, b: 2, gain_mode: 1 });
            out.push(Criterion::VlfPair { a: 1, b: 2, gain_mode: 0 });
        }
        CriterionFamily::VlfTriple => {
            tripartite(family)?;
            out.push(Criterion::VlfTriple { target: 0, rest: (1, 2) });
            out.push(Criterion::VlfTriple { target: 1, rest: (2, 0) });
            out.push(Criterion::VlfTriple { target: 2, rest: (0, 1) });
        }
        CriterionFamily::Obr => {
            tripartite(family)?;
            out.push(Criterion::Obr { steered: 0, pair: (1, 2) });
            out.push(Criterion::Obr { steered: 1, pair: (2, 0) });
            out.push(Criterion::Obr { steered: 2, pair: (0, 1) });
        }
    }
    Ok(out)
}

/// One optimized criterion in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub criterion: Criterion,
    pub label: String,
    pub value: f64,
    pub angle_deg: f64,
    pub std_err: f64,
    pub gain: Option<f64>,
    pub sign: Option<Sign>,
    pub bound: f64,
    pub violates_bound: bool,
}

/// Angle-optimized values for a set of criteria at one sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub time: f64,
    pub n_samples: u64,
    pub entries: Vec<CriterionResult>,
    pub tripartite: Option<TripartiteClassification>,
}

/// Optimize every requested criterion over the quadrature angle and
/// attach batch-means standard errors (each batch snapshot is pushed
/// through the same formulas at the optimal angle, with the sign choice
/// pinned to the full-ensemble one).
pub fn analyze(
    snap: &CorrelationSnapshot,
    batch_snapshots: &[CorrelationSnapshot],
    criteria: &[Criterion],
    time: f64,
) -> Result<CriteriaReport, CriterionError> {
    let mut entries = Vec::with_capacity(criteria.len());
    for &criterion in criteria {
        let opt = optimize_angle(|t| criterion.evaluate(snap, t).unwrap_or(f64::INFINITY));
        let theta = opt.theta_deg.to_radians();
        let detail = criterion.evaluate_detailed(snap, theta, None)?;
        let batch_values: Vec<f64> = batch_snapshots
            .iter()
            .map(|b| {
                criterion
                    .evaluate_detailed(b, theta, detail.sign)
                    .map(|e| e.value)
            })
            .collect::<Result<_, _>>()?;
        let bound = criterion.classical_bound();
        entries.push(CriterionResult {
            criterion,
            label: criterion.label(),
            value: detail.value,
            angle_deg: opt.theta_deg,
            std_err: batch_std_err(&batch_values),
            gain: detail.gain,
            sign: detail.sign,
            bound,
            violates_bound: detail.value < bound,
        });
    }
    let tripartite = classification_from_entries(&entries);
    Ok(CriteriaReport {
        time,
        n_samples: snap.n_samples(),
        entries,
        tripartite,
    })
}

/// Evaluate a criterion over a fixed angle grid (degrees), with batch
/// errors per point.
pub fn scan_angles(
    criterion: &Criterion,
    snap: &CorrelationSnapshot,
    batch_snapshots: &[CorrelationSnapshot],
    thetas_deg: &[f64],
) -> Result<Vec<(f64, f64)>, CriterionError> {
    thetas_deg
        .iter()
        .map(|deg| {
            let theta = deg.to_radians();
            let detail = criterion.evaluate_detailed(snap, theta, None)?;
            let batch_values: Vec<f64> = batch_snapshots
                .iter()
                .map(|b| {
                    criterion
                        .evaluate_detailed(b, theta, detail.sign)
                        .map(|e| e.value)
                })
                .collect::<Result<_, _>>()?;
            Ok((detail.value, batch_std_err(&batch_values)))
        })
        .collect()
}

fn classification_from_entries(entries: &[CriterionResult]) -> Option<TripartiteClassification> {
    let collect3 = |pick: &dyn Fn(&CriterionResult) -> bool| -> Option<[f64; 3]> {
        let vals: Vec<f64> = entries
            .iter()
            .filter(|e| pick(e))
            .map(|e| e.value)
            .collect();
        <[f64; 3]>::try_from(vals).ok()
    };
    let pairwise = collect3(&|e| matches!(e.criterion, Criterion::VlfPair { .. }));
    let triple = collect3(&|e| matches!(e.criterion, Criterion::VlfTriple { .. }));
    let obr = collect3(&|e| matches!(e.criterion, Criterion::Obr { .. }));
    if pairwise.is_none() && triple.is_none() && obr.is_none() {
        return None;
    }
    Some(teh_reid_classify(&TripartiteInput {
        pairwise,
        triple,
        obr,
    }))
}

/// Stable CSV layout: one row per criterion,
/// `criterion,value,angle_deg,std_err,gain,sign,bound,violates_bound`.
pub fn write_report_csv<W: Write>(report: &CriteriaReport, out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "criterion,value,angle_deg,std_err,gain,sign,bound,violates_bound"
    )?;
    for e in &report.entries {
        let gain = e.gain.map(|g| g.to_string()).unwrap_or_default();
        let sign = e
            .sign
            .map(|s| match s {
                Sign::Plus => "+".to_string(),
                Sign::Minus => "-".to_string(),
            })
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            e.label, e.value, e.angle_deg, e.std_err, gain, sign, e.bound, e.violates_bound
        )?;
    }
    Ok(())
}
