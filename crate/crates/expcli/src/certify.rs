//! Every criterion on a single state.

use serde::{Deserialize, Serialize};

use schmidt_core::criteria::{
    dps_margin, ppt_check, reduction_check, schmidt_hierarchy_margin, unfaithful_margin, CriteriaError,
    CriteriaOptions, CriterionVerdict,
};
use schmidt_core::qstate::{read_state_json, BipartiteState, RngStream};
use schmidt_core::witness::search_witness;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// `D`: tests `Ũ_D` and `S_{D-1}^k`.
    pub dim: usize,
    /// Hierarchy level `k` for DPS and `S_{D-1}^k`.
    pub level: usize,
    /// Witness dimension and restart count, when a search is requested.
    pub witness: Option<(usize, usize)>,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            dim: 2,
            level: 1,
            witness: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Entry {
    Done(CriterionVerdict),
    NotApplicable { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub dim: usize,
    pub restarts: usize,
    pub violation: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub d_a: usize,
    pub d_b: usize,
    pub dim: usize,
    pub level: usize,
    pub ppt: Entry,
    pub dps: Entry,
    pub schmidt: Entry,
    pub unfaithful: Entry,
    pub reduction: Entry,
    pub witness: Option<WitnessEntry>,
}

fn entry(r: Result<CriterionVerdict, CriteriaError>) -> Result<Entry, CliError> {
    match r {
        Ok(v) => Ok(Entry::Done(v)),
        Err(CriteriaError::InvalidArgument(reason)) => Ok(Entry::NotApplicable { reason }),
        Err(CriteriaError::MemoryGuard { estimated, cap }) => Ok(Entry::NotApplicable {
            reason: format!("estimated {estimated} bytes exceeds the {cap}-byte cap"),
        }),
        Err(e) => Err(e.into()),
    }
}

pub fn certify_state(rho: &BipartiteState, opts: &CertifyOptions) -> Result<CertifyReport, CliError> {
    if opts.dim < 2 || opts.level < 1 {
        return Err(CliError::Input(format!(
            "need D >= 2 and k >= 1 (got D = {}, k = {})",
            opts.dim, opts.level
        )));
    }
    let copts = CriteriaOptions::default();
    let witness = match opts.witness {
        Some((dim, restarts)) => {
            let w = search_witness(rho, dim, restarts, RngStream::new(opts.seed, 0))?;
            Some(WitnessEntry {
                dim,
                restarts,
                violation: w.violation,
                re: w.psi.amplitudes().iter().map(|z| z.re).collect(),
                im: w.psi.amplitudes().iter().map(|z| z.im).collect(),
            })
        }
        None => None,
    };
    Ok(CertifyReport {
        d_a: rho.d_a(),
        d_b: rho.d_b(),
        dim: opts.dim,
        level: opts.level,
        ppt: Entry::Done(ppt_check(rho)),
        dps: entry(dps_margin(rho, opts.level, &copts))?,
        schmidt: entry(schmidt_hierarchy_margin(rho, opts.dim - 1, opts.level, &copts))?,
        unfaithful: entry(unfaithful_margin(rho, opts.dim, &copts))?,
        reduction: Entry::Done(reduction_check(rho)),
        witness,
    })
}

/// Parses a state file (JSON with `d_a`, `d_b`, `re`, `im`) and certifies it.
pub fn certify_text(text: &str, opts: &CertifyOptions) -> Result<CertifyReport, CliError> {
    let rho = read_state_json(text)?;
    certify_state(&rho, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use schmidt_core::qstate::{maximally_entangled, write_state_json};

    #[test]
    fn bell_state_report() {
        let rho = BipartiteState::pure(&maximally_entangled(2));
        let opts = CertifyOptions {
            witness: Some((2, 4)),
            ..Default::default()
        };
        let r = certify_text(&write_state_json(&rho), &opts).unwrap();
        let Entry::Done(ppt) = &r.ppt else { panic!() };
        assert!((ppt.margin + 0.5).abs() < 1e-12);
        let w = r.witness.unwrap();
        assert!((w.violation - 0.5).abs() < 1e-6);
        assert!(matches!(r.unfaithful, Entry::Done(v) if !v.inside()));
    }

    #[test]
    fn malformed_input_is_exit_two() {
        let e = certify_text("{\"d_a\": 2}", &CertifyOptions::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let bad = r#"{"d_a":1,"d_b":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}"#;
        let e = certify_text(bad, &CertifyOptions::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("unit_trace"), "{e}");
    }
}
