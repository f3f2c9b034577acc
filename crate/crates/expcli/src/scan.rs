//! Noise scans of `p·1/d² + (1-p)|Ψ_r><Ψ_r|` with `|Ψ_r>` the rank-`r`
//! maximally entangled vector embedded in `d x d`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use schmidt_core::criteria::{
    ppt_check, reduction_check, schmidt_hierarchy_margin, unfaithful_margin, CriteriaOptions,
};
use schmidt_core::qstate::{embed, maximally_entangled, noisy_state, BipartiteState, PureBipartiteState};

use crate::CliError;

pub const MIN_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Schmidt rank of the maximally entangled target.
    pub target_rank: usize,
    /// Local dimension of the embedding.
    pub d: usize,
    /// Dimension `D` of the unfaithfulness test; the entanglement side uses
    /// `S_{D-1}^1` (PPT for `D = 2`).
    pub dim: usize,
    #[serde(default)]
    pub lo: f64,
    #[serde(default = "one")]
    pub hi: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Number of evenly spaced grid points for the margin table.
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn one() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    1e-4
}

impl ScanConfig {
    pub fn new(target_rank: usize, d: usize, dim: usize) -> Self {
        Self {
            target_rank,
            d,
            dim,
            lo: 0.0,
            hi: 1.0,
            tolerance: default_tolerance(),
            grid: None,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.tolerance < MIN_TOLERANCE {
            return Err(CliError::Input(format!(
                "bisection tolerance {} below {MIN_TOLERANCE}",
                self.tolerance
            )));
        }
        if !(0.0 <= self.lo && self.lo < self.hi && self.hi <= 1.0) {
            return Err(CliError::Input(format!("bounds [{}, {}] not inside [0, 1]", self.lo, self.hi)));
        }
        if self.target_rank < 1 || self.target_rank > self.d {
            return Err(CliError::Input(format!(
                "target rank {} does not fit in d = {}",
                self.target_rank, self.d
            )));
        }
        if self.dim < 2 || self.dim > self.d {
            return Err(CliError::Input(format!("dimension {} outside 2..={}", self.dim, self.d)));
        }
        Ok(())
    }

    pub fn target(&self) -> Result<PureBipartiteState, CliError> {
        Ok(embed(&maximally_entangled(self.target_rank), self.d, self.d)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanCriterion {
    Ppt,
    /// `S_{D-1}^1`.
    Schmidt,
    /// `Ũ_D`.
    Unfaithful,
    Reduction,
}

impl ScanCriterion {
    pub const ALL: [ScanCriterion; 4] = [
        ScanCriterion::Ppt,
        ScanCriterion::Schmidt,
        ScanCriterion::Unfaithful,
        ScanCriterion::Reduction,
    ];
}

/// Margin of one criterion on `ρ(p)`.
pub fn margin(
    criterion: ScanCriterion,
    rho: &BipartiteState,
    dim: usize,
    opts: &CriteriaOptions,
) -> Result<f64, CliError> {
    Ok(match criterion {
        ScanCriterion::Ppt => ppt_check(rho).margin,
        ScanCriterion::Schmidt => schmidt_hierarchy_margin(rho, dim - 1, 1, opts)?.margin,
        ScanCriterion::Unfaithful => unfaithful_margin(rho, dim, opts)?.margin,
        ScanCriterion::Reduction => reduction_check(rho).margin,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    /// Sign change located in `[lo, hi]`, `hi - lo < tolerance`.
    Found { p: f64, lo: f64, hi: f64 },
    NonBracketing { margin_lo: f64, margin_hi: f64 },
}

impl Threshold {
    pub fn p(&self) -> Option<f64> {
        match self {
            Threshold::Found { p, .. } => Some(*p),
            Threshold::NonBracketing { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionThreshold {
    pub criterion: ScanCriterion,
    pub threshold: Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    /// Unfaithful (inside `Ũ_D`) yet certified entangled for `p` in
    /// `(lower, upper)`.
    Open { lower: f64, upper: f64 },
    /// The edges coincide within twice the tolerance, or cross.
    Empty { lower: f64, upper: f64 },
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: f64,
    pub ppt_margin: f64,
    pub schmidt_margin: f64,
    pub unfaithful_margin: f64,
    pub reduction_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: ScanConfig,
    pub thresholds: Vec<CriterionThreshold>,
    pub window: Window,
    pub grid: Vec<ScanRow>,
}

impl ScanReport {
    pub fn threshold(&self, c: ScanCriterion) -> Option<f64> {
        self.thresholds.iter().find(|t| t.criterion == c)?.threshold.p()
    }
}

/// Bisects for the sign change of `f` on `[lo, hi]`.
pub fn bisect(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut f: impl FnMut(f64) -> Result<f64, CliError>,
) -> Result<Threshold, CliError> {
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Ok(Threshold::NonBracketing {
            margin_lo: f_lo,
            margin_hi: f_hi,
        });
    }
    let lo_positive = f_lo > 0.0;
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold::Found {
        p: 0.5 * (lo + hi),
        lo,
        hi,
    })
}

pub fn run_scan(cfg: &ScanConfig) -> Result<ScanReport, CliError> {
    cfg.validate()?;
    let psi = cfg.target()?;
    let opts = CriteriaOptions::default();
    let eval = |c: ScanCriterion, p: f64| -> Result<f64, CliError> {
        margin(c, &noisy_state(&psi, p)?, cfg.dim, &opts)
    };
    crate::with_workers(cfg.workers, || {
        let thresholds = ScanCriterion::ALL
            .par_iter()
            .map(|&c| {
                Ok(CriterionThreshold {
                    criterion: c,
                    threshold: bisect(cfg.lo, cfg.hi, cfg.tolerance, |p| eval(c, p))?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let points: Vec<f64> = match cfg.grid {
            Some(n) if n >= 2 => (0..n)
                .map(|i| cfg.lo + (cfg.hi - cfg.lo) * i as f64 / (n - 1) as f64)
                .collect(),
            Some(1) => vec![cfg.lo],
            _ => Vec::new(),
        };
        let grid = points
            .par_iter()
            .map(|&p| {
                Ok(ScanRow {
                    p,
                    ppt_margin: eval(ScanCriterion::Ppt, p)?,
                    schmidt_margin: eval(ScanCriterion::Schmidt, p)?,
                    unfaithful_margin: eval(ScanCriterion::Unfaithful, p)?,
                    reduction_margin: eval(ScanCriterion::Reduction, p)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut report = ScanReport {
            config: cfg.clone(),
            thresholds,
            window: Window::Undetermined,
            grid,
        };
        report.window = match (
            report.threshold(ScanCriterion::Unfaithful),
            report.threshold(ScanCriterion::Schmidt),
        ) {
            (Some(lower), Some(upper)) if upper - lower > 2.0 * cfg.tolerance => Window::Open { lower, upper },
            (Some(lower), Some(upper)) => Window::Empty { lower, upper },
            _ => Window::Undetermined,
        };
        Ok(report)
    })
}

/// Twelve significant digits.
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

impl ScanRow {
    /// The row as it survives a CSV round trip.
    pub fn rounded(&self) -> Self {
        let r = |x: f64| format_sig12(x).parse::<f64>().expect("own format");
        Self {
            p: r(self.p),
            ppt_margin: r(self.ppt_margin),
            schmidt_margin: r(self.schmidt_margin),
            unfaithful_margin: r(self.unfaithful_margin),
            reduction_margin: r(self.reduction_margin),
        }
    }
}

pub fn write_grid_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(["p", "ppt_margin", "schmidt_margin", "unfaithful_margin", "reduction_margin"])
        .map_err(to_io)?;
    for r in rows {
        w.write_record(
            [r.p, r.ppt_margin, r.schmidt_margin, r.unfaithful_margin, r.reduction_margin].map(format_sig12),
        )
        .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_csv(text: &str) -> Result<Vec<ScanRow>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| row.map_err(|e| CliError::Input(format!("grid CSV: {e}"))))
        .collect()
}
