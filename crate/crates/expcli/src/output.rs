//! Rendering of reports as aligned text, JSON or CSV.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::activation::ActivationReport;
use crate::certify::{CertifyReport, Entry};
use crate::scan::{format_sig12, write_grid_csv, ScanReport, Threshold, Window};
use crate::stats::Interval;
use crate::survey::{CellCounts, CellSummary, Measure, SurveyResult};
use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Flat survey record for CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub d: usize,
    pub measure: Measure,
    pub samples: u64,
    pub seed: u64,
    pub s1: u64,
    pub u2_not_s1: u64,
    pub other: u64,
    pub error: u64,
    pub s1_fraction: f64,
    pub s1_lower: f64,
    pub s1_upper: f64,
    pub u2_fraction: f64,
    pub u2_lower: f64,
    pub u2_upper: f64,
    pub reduction_inside: Option<u64>,
    pub wall_clock_secs: f64,
}

impl From<&SurveyResult> for SurveyRow {
    fn from(r: &SurveyResult) -> Self {
        Self {
            d: r.d,
            measure: r.measure,
            samples: r.samples,
            seed: r.seed,
            s1: r.counts.s1,
            u2_not_s1: r.counts.u2_not_s1,
            other: r.counts.other,
            error: r.counts.error,
            s1_fraction: r.s1.fraction,
            s1_lower: r.s1.ci95.lower,
            s1_upper: r.s1.ci95.upper,
            u2_fraction: r.u2_not_s1.fraction,
            u2_lower: r.u2_not_s1.ci95.lower,
            u2_upper: r.u2_not_s1.ci95.upper,
            reduction_inside: r.reduction_inside,
            wall_clock_secs: r.wall_clock_secs,
        }
    }
}

impl From<SurveyRow> for SurveyResult {
    fn from(r: SurveyRow) -> Self {
        Self {
            d: r.d,
            measure: r.measure,
            samples: r.samples,
            seed: r.seed,
            counts: CellCounts {
                s1: r.s1,
                u2_not_s1: r.u2_not_s1,
                other: r.other,
                error: r.error,
            },
            s1: CellSummary {
                count: r.s1,
                fraction: r.s1_fraction,
                ci95: Interval {
                    lower: r.s1_lower,
                    upper: r.s1_upper,
                },
            },
            u2_not_s1: CellSummary {
                count: r.u2_not_s1,
                fraction: r.u2_fraction,
                ci95: Interval {
                    lower: r.u2_lower,
                    upper: r.u2_upper,
                },
            },
            reduction_inside: r.reduction_inside,
            wall_clock_secs: r.wall_clock_secs,
        }
    }
}

pub fn survey_csv(results: &[SurveyResult]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in results {
        w.serialize(SurveyRow::from(r)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn read_survey_csv(text: &str) -> Result<Vec<SurveyResult>, CliError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize::<SurveyRow>()
        .map(|r| r.map(SurveyResult::from).map_err(|e| CliError::Input(format!("survey CSV: {e}"))))
        .collect()
}

fn pct(i: &Interval) -> String {
    format!("[{:.2}, {:.2}]", 100.0 * i.lower, 100.0 * i.upper)
}

pub fn survey_text(results: &[SurveyResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>3} {:>7} {:>8} {:>8} {:>18} {:>10} {:>18} {:>7} {:>6} {:>9}",
        "d", "measure", "samples", "S1 %", "95% CI", "U2\\S1 %", "95% CI", "other", "error", "seconds"
    );
    for r in results {
        let _ = writeln!(
            s,
            "{:>3} {:>7} {:>8} {:>8.2} {:>18} {:>10.2} {:>18} {:>7} {:>6} {:>9.1}",
            r.d,
            format!("{:?}", r.measure).to_lowercase(),
            r.samples,
            100.0 * r.s1.fraction,
            pct(&r.s1.ci95),
            100.0 * r.u2_not_s1.fraction,
            pct(&r.u2_not_s1.ci95),
            r.counts.other,
            r.counts.error,
            r.wall_clock_secs
        );
    }
    s
}

pub fn scan_text(r: &ScanReport) -> String {
    let c = &r.config;
    let mut s = format!(
        "target |Psi_{}> in {}x{}, D = {}, p in [{}, {}], tolerance {}\n",
        c.target_rank, c.d, c.d, c.dim, c.lo, c.hi, c.tolerance
    );
    for t in &r.thresholds {
        let name = format!("{:?}", t.criterion).to_lowercase();
        match &t.threshold {
            Threshold::Found { p, .. } => {
                let _ = writeln!(s, "  {name:<11} threshold p* = {p:.6}");
            }
            Threshold::NonBracketing { margin_lo, margin_hi } => {
                let _ = writeln!(
                    s,
                    "  {name:<11} no sign change (margin {} at lo, {} at hi)",
                    format_sig12(*margin_lo),
                    format_sig12(*margin_hi)
                );
            }
        }
    }
    let _ = match &r.window {
        Window::Open { lower, upper } => writeln!(s, "  unfaithful but entangled for p in ({lower:.4}, {upper:.4})"),
        Window::Empty { lower, upper } => writeln!(s, "  window empty (edges {lower:.4} and {upper:.4})"),
        Window::Undetermined => writeln!(s, "  window undetermined"),
    };
    if !r.grid.is_empty() {
        let _ = writeln!(s, "{:>10} {:>20} {:>20} {:>20} {:>20}", "p", "ppt", "schmidt", "unfaithful", "reduction");
        for g in &r.grid {
            let _ = writeln!(
                s,
                "{:>10.6} {:>20} {:>20} {:>20} {:>20}",
                g.p,
                format_sig12(g.ppt_margin),
                format_sig12(g.schmidt_margin),
                format_sig12(g.unfaithful_margin),
                format_sig12(g.reduction_margin)
            );
        }
    }
    s
}

pub fn scan_csv(r: &ScanReport) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_grid_csv(&r.grid, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn entry_cells(e: &Entry) -> (String, String, String) {
    match e {
        Entry::Done(v) => (
            format_sig12(v.margin),
            format!("{:?}", v.band).to_lowercase(),
            format!("{:?}", v.interpretation),
        ),
        Entry::NotApplicable { reason } => ("-".into(), "n/a".into(), reason.clone()),
    }
}

fn certify_rows(r: &CertifyReport) -> Vec<(String, (String, String, String))> {
    let k = r.level;
    let d = r.dim;
    let mut rows = vec![
        ("ppt".to_string(), entry_cells(&r.ppt)),
        (format!("dps(k={k})"), entry_cells(&r.dps)),
        (format!("schmidt(D={},k={k})", d - 1), entry_cells(&r.schmidt)),
        (format!("unfaithful(D={d})"), entry_cells(&r.unfaithful)),
        ("reduction".to_string(), entry_cells(&r.reduction)),
    ];
    if let Some(w) = &r.witness {
        rows.push((
            format!("witness(D={})", w.dim),
            (format_sig12(w.violation), String::new(), format!("{} restarts", w.restarts)),
        ));
    }
    rows
}

pub fn certify_text(r: &CertifyReport) -> String {
    let mut s = format!("{}x{} state\n", r.d_a, r.d_b);
    for (name, (m, band, interp)) in certify_rows(r) {
        let _ = writeln!(s, "  {name:<20} {m:>20} {band:>13}  {interp}");
    }
    s
}

pub fn certify_csv(r: &CertifyReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["criterion", "margin", "band", "interpretation"]).map_err(csv_err)?;
    for (name, (m, band, interp)) in certify_rows(r) {
        w.write_record([name, m, band, interp]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn activation_text(r: &ActivationReport) -> String {
    format!(
        "single copy: unfaithfulness margin {}, best witness violation {}\n\
         tensor square: best witness violation {} ({} restarts)\n\
         control (reduction margin {}): square violation {}\n\
         {}\n",
        format_sig12(r.single_copy_margin),
        format_sig12(r.single_copy_violation),
        format_sig12(r.square_violation),
        r.restarts,
        format_sig12(r.control_reduction_margin),
        format_sig12(r.control_square_violation),
        if r.reproduced { "activation reproduced" } else { "activation NOT reproduced" }
    )
}

pub fn activation_csv(r: &ActivationReport) -> String {
    format!(
        "single_copy_margin,single_copy_violation,square_violation,control_reduction_margin,control_square_violation,restarts,reproduced\n{},{},{},{},{},{},{}\n",
        format_sig12(r.single_copy_margin),
        format_sig12(r.single_copy_violation),
        format_sig12(r.square_violation),
        format_sig12(r.control_reduction_margin),
        format_sig12(r.control_square_violation),
        r.restarts,
        r.reproduced
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::{run_survey, SurveyConfig};

    #[test]
    fn survey_round_trips() {
        let r = run_survey(&SurveyConfig::new(2, Measure::Bures, 20, 7)).unwrap();
        let back = read_survey_csv(&survey_csv(std::slice::from_ref(&r)).unwrap()).unwrap();
        assert_eq!(back, vec![r.clone()]);
        let from_json: SurveyResult = serde_json::from_str(&json(&r)).unwrap();
        assert_eq!(from_json, r);
        assert!(survey_text(&[r]).contains("bures"));
    }
}
