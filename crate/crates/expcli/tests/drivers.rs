use std::process::Command;

use schmidt_core::criteria::CriteriaOptions;
use schmidt_core::qstate::{maximally_entangled, noisy_state, write_state_json, BipartiteState};
use schmidt_scope::certify::{certify_text, CertifyOptions, Entry};
use schmidt_scope::output::{read_survey_csv, survey_csv};
use schmidt_scope::scan::{margin, run_scan, ScanConfig, ScanCriterion, ScanReport, Threshold};
use schmidt_scope::survey::{run_survey, Measure, SurveyConfig, SurveyResult};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schmidt-scope"))
}

#[test]
fn survey_counts_ignore_worker_count() {
    let mut a = SurveyConfig::new(3, Measure::Bures, 60, 17);
    a.workers = Some(1);
    let mut b = a.clone();
    b.workers = Some(3);
    let (ra, rb) = (run_survey(&a).unwrap(), run_survey(&b).unwrap());
    assert_eq!(ra.counts, rb.counts);
    assert_eq!(ra.counts.total(), 60);
}

#[test]
fn survey_results_round_trip() {
    let r = run_survey(&SurveyConfig::new(2, Measure::Hs, 40, 5)).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: SurveyResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    let csv = survey_csv(std::slice::from_ref(&r)).unwrap();
    assert_eq!(read_survey_csv(&csv).unwrap(), vec![r]);
}

#[test]
fn bisection_output_brackets_the_sign_change() {
    let mut cfg = ScanConfig::new(2, 3, 2);
    cfg.tolerance = 1e-3;
    cfg.grid = Some(3);
    let report = run_scan(&cfg).unwrap();
    let psi = cfg.target().unwrap();
    for t in &report.thresholds {
        let Threshold::Found { p, .. } = t.threshold else {
            panic!("{:?} did not bracket", t.criterion);
        };
        let at = |q: f64| margin(t.criterion, &noisy_state(&psi, q).unwrap(), cfg.dim, &CriteriaOptions::default()).unwrap();
        assert!(at(p - cfg.tolerance) * at(p + cfg.tolerance) < 0.0, "{:?}", t.criterion);
    }
    let json = serde_json::to_string(&report).unwrap();
    let back: ScanReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(report.grid.len(), 3);
}

#[test]
fn scan_rejects_fine_tolerance() {
    let mut cfg = ScanConfig::new(2, 3, 2);
    cfg.tolerance = 1e-7;
    assert!(run_scan(&cfg).is_err());
    assert!(ScanCriterion::ALL.len() == 4);
}

#[test]
fn certify_mixed_state_inside_everything() {
    let text = write_state_json(&BipartiteState::maximally_mixed(3, 3));
    let opts = CertifyOptions {
        witness: Some((2, 8)),
        ..Default::default()
    };
    let r = certify_text(&text, &opts).unwrap();
    for e in [&r.ppt, &r.dps, &r.schmidt, &r.unfaithful, &r.reduction] {
        let Entry::Done(v) = e else { panic!("{e:?}") };
        assert!(v.inside(), "{v:?}");
    }
    assert!(r.witness.unwrap().violation <= 0.0);
}

#[test]
fn cli_certify_exit_codes() {
    let dir = std::env::temp_dir().join(format!("schmidt-scope-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("bell.json");
    std::fs::write(&good, write_state_json(&BipartiteState::pure(&maximally_entangled(2)))).unwrap();
    let out = bin().args(["--format", "json", "certify"]).arg(&good).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ppt"]["band"], "outside");

    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"d_a":2,"d_b":2,"re":[[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,1]],"im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#).unwrap();
    let out = bin().arg("certify").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unit_trace"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cli_seed_environment_precedence() {
    let run = |flag: Option<&str>, env: Option<&str>| {
        let mut c = bin();
        c.args(["--format", "json"]);
        if let Some(f) = flag {
            c.args(["--seed", f]);
        }
        c.args(["survey", "--d", "2", "--samples", "3"]);
        c.env_remove("SCHMIDT_SCOPE_SEED");
        if let Some(e) = env {
            c.env("SCHMIDT_SCOPE_SEED", e);
        }
        let out = c.output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v[0]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(None, Some("9")), 9);
    assert_eq!(run(Some("4"), Some("9")), 4);
}
