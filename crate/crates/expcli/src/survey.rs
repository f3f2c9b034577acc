//! Monte-Carlo estimate of how often random states are PPT, or NPT yet
//! certified unfaithful.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use schmidt_core::criteria::{ppt_check, reduction_check, unfaithful_margin, CriteriaOptions};
use schmidt_core::qstate::{BipartiteState, Ensemble, RngStream};

use crate::stats::{wilson, Interval, Z95};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Hs,
    Bures,
    Real,
}

impl Measure {
    pub fn ensemble(self) -> Ensemble {
        match self {
            Measure::Hs => Ensemble::Hs,
            Measure::Bures => Ensemble::Bures,
            Measure::Real => Ensemble::Real,
        }
    }
}

/// Criteria evaluated per sample. `ppt` and `unfaithful` define the table
/// cells; `reduction` adds a tally only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyCriterion {
    Ppt,
    Unfaithful,
    Reduction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub d: usize,
    pub measure: Measure,
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_criteria")]
    pub criteria: Vec<SurveyCriterion>,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_criteria() -> Vec<SurveyCriterion> {
    vec![SurveyCriterion::Ppt, SurveyCriterion::Unfaithful]
}

impl SurveyConfig {
    pub fn new(d: usize, measure: Measure, samples: u64, seed: u64) -> Self {
        Self {
            d,
            measure,
            samples,
            seed,
            criteria: default_criteria(),
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.samples == 0 {
            return Err(CliError::Input("samples must be at least 1".into()));
        }
        if self.criteria.is_empty() {
            return Err(CliError::Input("criteria list is empty".into()));
        }
        if self.d < 2 {
            return Err(CliError::Input(format!("local dimension {} below 2", self.d)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    /// PPT.
    pub s1: u64,
    /// NPT and inside the unfaithfulness approximation.
    pub u2_not_s1: u64,
    pub other: u64,
    /// Solver failures.
    pub error: u64,
}

impl CellCounts {
    pub fn total(&self) -> u64 {
        self.s1 + self.u2_not_s1 + self.other + self.error
    }

    fn add(self, o: Self) -> Self {
        Self {
            s1: self.s1 + o.s1,
            u2_not_s1: self.u2_not_s1 + o.u2_not_s1,
            other: self.other + o.other,
            error: self.error + o.error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub count: u64,
    pub fraction: f64,
    pub ci95: Interval,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyResult {
    pub d: usize,
    pub measure: Measure,
    pub samples: u64,
    pub seed: u64,
    pub counts: CellCounts,
    pub s1: CellSummary,
    pub u2_not_s1: CellSummary,
    /// Samples inside the reduction criterion, when requested.
    pub reduction_inside: Option<u64>,
    pub wall_clock_secs: f64,
}

#[derive(Clone, Debug, Default)]
struct Tally {
    cells: CellCounts,
    reduction: u64,
    unfaithful: Vec<u64>,
}

/// Sample `index` of the survey described by `cfg`.
pub fn sample_state(cfg: &SurveyConfig, index: u64) -> Result<BipartiteState, CliError> {
    let mut rng = RngStream::new(cfg.seed, index).generator();
    Ok(cfg.measure.ensemble().sample(cfg.d, &mut rng)?)
}

fn classify(cfg: &SurveyConfig, opts: &CriteriaOptions, index: u64) -> Tally {
    let mut t = Tally::default();
    let rho = match sample_state(cfg, index) {
        Ok(r) => r,
        Err(_) => {
            t.cells.error = 1;
            return t;
        }
    };
    let has = |c| cfg.criteria.contains(&c);
    if has(SurveyCriterion::Reduction) && reduction_check(&rho).inside() {
        t.reduction = 1;
    }
    let ppt = ppt_check(&rho);
    if has(SurveyCriterion::Ppt) && ppt.inside() {
        t.cells.s1 = 1;
        return t;
    }
    if has(SurveyCriterion::Unfaithful) && (ppt.outside() || !has(SurveyCriterion::Ppt)) {
        match unfaithful_margin(&rho, 2, opts) {
            Ok(v) if v.inside() => {
                t.unfaithful.push(index);
                if ppt.outside() {
                    t.cells.u2_not_s1 = 1;
                } else {
                    t.cells.other = 1;
                }
            }
            Ok(_) => t.cells.other = 1,
            Err(_) => t.cells.error = 1,
        }
        return t;
    }
    t.cells.other = 1;
    t
}

/// Runs the survey. Sample `i` draws from stream `(seed, i)`, so the counts
/// do not depend on `workers`.
pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyResult, CliError> {
    run_survey_detailed(cfg).map(|(r, _)| r)
}

/// Like [`run_survey`], also returning the indices of the samples certified
/// inside `Ũ_2`, in increasing order.
pub fn run_survey_detailed(cfg: &SurveyConfig) -> Result<(SurveyResult, Vec<u64>), CliError> {
    cfg.validate()?;
    let opts = CriteriaOptions::default();
    let start = Instant::now();
    let tally = crate::with_workers(cfg.workers, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| classify(cfg, &opts, i))
            .reduce(Tally::default, |mut a, b| {
                a.unfaithful.extend(b.unfaithful);
                Tally {
                    cells: a.cells.add(b.cells),
                    reduction: a.reduction + b.reduction,
                    unfaithful: a.unfaithful,
                }
            })
    });
    let n = cfg.samples;
    let summary = |k: u64| CellSummary {
        count: k,
        fraction: k as f64 / n as f64,
        ci95: wilson(k, n, Z95),
    };
    let mut unfaithful = tally.unfaithful;
    unfaithful.sort_unstable();
    let result = SurveyResult {
        d: cfg.d,
        measure: cfg.measure,
        samples: n,
        seed: cfg.seed,
        counts: tally.cells,
        s1: summary(tally.cells.s1),
        u2_not_s1: summary(tally.cells.u2_not_s1),
        reduction_inside: cfg.criteria.contains(&SurveyCriterion::Reduction).then_some(tally.reduction),
        wall_clock_secs: start.elapsed().as_secs_f64(),
    };
    Ok((result, unfaithful))
}
