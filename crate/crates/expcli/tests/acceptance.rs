//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use schmidt_core::criteria::{
    dps_margin, eval_fidelity_witness, lift_schmidt_certificate, ppt_check, schmidt_hierarchy_direct,
    schmidt_hierarchy_margin, unfaithful_margin, CriteriaOptions, FidelityWitness,
};
use schmidt_core::hermlin::{hermitian_eigenvalues, min_eigenvalue, real_embed, Complex64, ComplexMatrix};
use schmidt_core::qstate::{
    embed, maximally_entangled, mix, noisy_state, sample_haar_pure, sample_hs, sample_real, BipartiteState,
    PureBipartiteState, RngStream, StreamRng,
};
use schmidt_core::sdpsolve::{
    reset_solve_stats, solve, solve_stats, BlockSparse, SdpProblem, Sense, SolveStatus, SolverOptions,
};
use schmidt_core::witness::search_witness;
use schmidt_scope::activation::run_activation;
use schmidt_scope::named::schmidt_three_example;
use schmidt_scope::scan::{run_scan, ScanConfig, ScanCriterion, ScanReport, Window};
use schmidt_scope::survey::{run_survey_detailed, sample_state, Measure, SurveyConfig};

const SURVEY_SAMPLES: u64 = 10_000;
const SURVEY_SEED: u64 = 1;
/// Survey tolerance in percentage points.
const TABLE_BAND: f64 = 1.5;
const WINDOW_BAND: f64 = 0.005;
const THRESHOLD_BAND: f64 = 1e-4;
const KKT_BOUND: f64 = 1e-8;
const EIG_BAND: f64 = 1e-7;
/// Ũ₂ members per survey cell re-examined by the witness search.
const SOUNDNESS_PER_CELL: usize = 250;
const SOUNDNESS_RESTARTS: usize = 4;

struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }
}

/// Reference survey fractions, in percent: (d, S¹ HS, Ũ₂\S¹ HS, S¹ B, Ũ₂\S¹ B).
const REFERENCE_FRACTIONS: [(usize, f64, f64, f64, f64); 4] = [
    (2, 24.2, 21.2, 7.4, 15.4),
    (3, 0.01, 94.5, 0.0, 54.8),
    (4, 0.0, 100.0, 0.0, 97.0),
    (5, 0.0, 100.0, 0.0, 100.0),
];

fn opts() -> CriteriaOptions {
    CriteriaOptions::default()
}

/// Ũ₂ members collected for the soundness check.
type Members = Vec<(String, BipartiteState)>;

fn criterion_1(members: &mut Members) -> Verdict {
    let mut pass = true;
    let mut details = Vec::new();
    for &(d, hs_s1, hs_u2, b_s1, b_u2) in &REFERENCE_FRACTIONS {
        for (measure, s1_ref, u2_ref) in [(Measure::Hs, hs_s1, hs_u2), (Measure::Bures, b_s1, b_u2)] {
            let cfg = SurveyConfig::new(d, measure, SURVEY_SAMPLES, SURVEY_SEED);
            let (r, inside) = match run_survey_detailed(&cfg) {
                Ok(x) => x,
                Err(e) => {
                    pass = false;
                    details.push(format!("d={d} {measure:?}: {e}"));
                    continue;
                }
            };
            let s1 = 100.0 * r.s1.fraction;
            let u2 = 100.0 * r.u2_not_s1.fraction;
            let ok = (s1 - s1_ref).abs() <= TABLE_BAND && (u2 - u2_ref).abs() <= TABLE_BAND && r.counts.error == 0;
            pass &= ok;
            details.push(format!(
                "d={d} {:<5} S1 {s1:6.2}% (ref {s1_ref}%)  U2\\S1 {u2:6.2}% (ref {u2_ref}%)  errors {}  {:.0}s  {}",
                format!("{measure:?}"),
                r.counts.error,
                r.wall_clock_secs,
                if ok { "ok" } else { "off" }
            ));
            let step = (inside.len() / SOUNDNESS_PER_CELL).max(1);
            for &i in inside.iter().step_by(step).take(SOUNDNESS_PER_CELL) {
                members.push((format!("survey d={d} {measure:?} #{i}"), sample_state(&cfg, i).unwrap()));
            }
        }
    }
    let mut v = Verdict::new(pass, format!("survey fractions at {SURVEY_SAMPLES} samples per cell within ±{TABLE_BAND} pp"));
    v.details = details;
    v
}

fn criterion_2() -> Verdict {
    let rho = schmidt_three_example();
    let s21 = schmidt_hierarchy_margin(&rho, 2, 1, &opts()).unwrap();
    let u3 = unfaithful_margin(&rho, 3, &opts()).unwrap();
    let psi3 = embed(&maximally_entangled(3), 4, 4).unwrap();
    let w = FidelityWitness::minimal(psi3.clone(), 2).unwrap();
    let value = eval_fidelity_witness(&w, &rho).unwrap();
    // direct arithmetic: tr[(1/3 · 1 - |Ψ3><Ψ3|) ρ]
    let mut op = psi3.projector().scale(-1.0);
    for i in 0..16 {
        op[(i, i)] += Complex64::new(1.0 / 3.0, 0.0);
    }
    let direct = (&op * rho.rho()).trace().re;
    let search = search_witness(&rho, 2, 16, RngStream::new(5, 0)).unwrap();
    let pass = s21.outside()
        && u3.inside()
        && (value + 1.0 / 6.0).abs() <= 1e-9
        && (direct + 1.0 / 6.0).abs() <= 1e-9
        && search.violation >= 1.0 / 6.0 - 1e-6;
    let mut v = Verdict::new(pass, "rank-three example: outside S_2^1, inside Ũ_3, W_2 = -1/6");
    v.details = vec![
        format!("S_2^1 margin {:.6e} ({:?})", s21.margin, s21.band),
        format!("Ũ_3 margin {:.6e} ({:?})", u3.margin, u3.band),
        format!("W_2 value {value:.12} (direct {direct:.12}, expected {:.12})", -1.0 / 6.0),
        format!("witness search violation {:.9}", search.violation),
    ];
    v
}

fn scan(rank: usize, d: usize, dim: usize) -> ScanReport {
    run_scan(&ScanConfig::new(rank, d, dim)).unwrap()
}

fn criterion_3() -> Verdict {
    let mut pass = true;
    let mut details = Vec::new();
    for (d, expect) in [(3usize, None), (4, Some((0.364, 0.449))), (5, Some((0.357, 0.493)))] {
        let r = scan(3, d, 3);
        let ok = match (&r.window, expect) {
            (Window::Empty { .. }, None) => true,
            (Window::Open { lower, upper }, Some((lo, hi))) => {
                (lower - lo).abs() <= WINDOW_BAND && (upper - hi).abs() <= WINDOW_BAND
            }
            _ => false,
        };
        pass &= ok;
        details.push(format!("d={d} window {:?} (ref {expect:?}) {}", r.window, if ok { "ok" } else { "off" }));
    }
    let mut v = Verdict::new(pass, format!("noisy |Ψ_3> windows within ±{WINDOW_BAND}, d = 3 empty"));
    v.details = details;
    v
}

fn criterion_4() -> Verdict {
    let mut pass = true;
    let mut details = Vec::new();
    // brute-force check of the analytic partial-transpose eigenvalue
    let mut worst: f64 = 0.0;
    for d in [2usize, 3] {
        let psi = embed(&maximally_entangled(2), d, d).unwrap();
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let rho = noisy_state(&psi, p).unwrap();
            let brute = min_eigenvalue(&rho.partial_transpose_b()).unwrap();
            let analytic = (p / (d * d) as f64 - (1.0 - p) / 2.0).min(p / (d * d) as f64);
            worst = worst.max((brute - analytic).abs());
        }
    }
    pass &= worst < 1e-12;
    details.push(format!("analytic PT eigenvalue vs eigendecomposition: max deviation {worst:.2e}"));
    let reports: Vec<(usize, ScanReport)> = (2..=5).map(|d| (d, scan(2, d, 2))).collect();
    for (d, expect) in [(2usize, 2.0 / 3.0), (3, 9.0 / 11.0)] {
        let got = reports[d - 2].1.threshold(ScanCriterion::Ppt);
        let ok = got.is_some_and(|p| (p - expect).abs() <= THRESHOLD_BAND);
        pass &= ok;
        details.push(format!("d={d} PPT threshold {got:?} (expected {expect:.6})"));
    }
    let u2: Vec<Option<f64>> = reports[1..].iter().map(|(_, r)| r.threshold(ScanCriterion::Unfaithful)).collect();
    let red: Vec<Option<f64>> = reports[1..].iter().map(|(_, r)| r.threshold(ScanCriterion::Reduction)).collect();
    let decreasing = matches!(u2[..], [Some(a), Some(b), Some(c)] if a > b && b > c);
    let ordered = u2.iter().zip(&red).all(|(u, r)| matches!((u, r), (Some(u), Some(r)) if r > u));
    pass &= decreasing && ordered;
    for (i, d) in (3..=5).enumerate() {
        details.push(format!("d={d} Ũ_2 threshold {:?}  reduction threshold {:?}", u2[i], red[i]));
    }
    let mut v = Verdict::new(pass, "PPT thresholds 2/3 and 9/11, Ũ_2 threshold decreasing, reduction above Ũ_2");
    v.details = details;
    v
}

fn criterion_5(members: &mut Members) -> Verdict {
    let start = Instant::now();
    let r = run_activation(512, 7, None).unwrap();
    let secs = start.elapsed().as_secs_f64();
    if r.single_copy_margin > 1e-7 {
        members.push(("activation state".into(), schmidt_scope::named::activation_state()));
    }
    let pass = r.single_copy_margin > 1e-7 && r.square_violation > 1e-7 && secs <= 600.0;
    let mut v = Verdict::new(pass, "activation: single copy in Ũ_2, tensor square violates a witness");
    v.details = vec![
        format!("Ũ_2 margin {:.6e}", r.single_copy_margin),
        format!("square violation {:.6e} with {} restarts", r.square_violation, r.restarts),
        format!(
            "control: reduction margin {:.4e}, square violation {:.4e}",
            r.control_reduction_margin, r.control_square_violation
        ),
        format!("{secs:.0}s"),
    ];
    v
}

fn low_rank_pure(d: usize, rank: usize, rng: &mut StreamRng) -> PureBipartiteState {
    let c = &rng.ginibre(d, rank) * &rng.ginibre(rank, d);
    let amps: Vec<Complex64> = (0..d * d).map(|k| c[(k / d, k % d)]).collect();
    PureBipartiteState::normalized(amps, d, d).unwrap()
}

/// Uniformly weighted mixture of `terms` random pure states of Schmidt rank
/// at most `rank`.
fn low_rank_mixture(d: usize, rank: usize, terms: usize, rng: &mut StreamRng) -> BipartiteState {
    let states: Vec<BipartiteState> =
        (0..terms).map(|_| BipartiteState::pure(&low_rank_pure(d, rank, rng))).collect();
    let w = 1.0 / terms as f64;
    let mut parts: Vec<(f64, &BipartiteState)> = states.iter().map(|s| (w, s)).collect();
    let head: f64 = parts[..terms - 1].iter().map(|p| p.0).sum();
    parts[terms - 1].0 = 1.0 - head;
    mix(&parts).unwrap()
}

fn criterion_6(members: &Members) -> Verdict {
    let mut details = Vec::new();
    // (a)
    let mut a_in = 0;
    for i in 0..200 {
        let rho = low_rank_mixture(3, 2, 18, &mut RngStream::new(61, i).generator());
        a_in += schmidt_hierarchy_margin(&rho, 2, 1, &opts()).unwrap().inside() as usize;
    }
    details.push(format!("(a) {a_in}/200 Schmidt-rank-2 mixtures inside S_2^1"));
    // (b)
    let mut b_in = 0;
    for i in 0..200 {
        let rho = low_rank_mixture(3, 1, 18, &mut RngStream::new(62, i).generator());
        b_in += dps_margin(&rho, 2, &opts()).unwrap().inside() as usize;
    }
    details.push(format!("(b) {b_in}/200 separable mixtures inside S^2"));
    // (c)
    let mut worst = f64::NEG_INFINITY;
    let mut offender = None;
    for (k, (label, rho)) in members.iter().enumerate() {
        let w = search_witness(rho, 2, SOUNDNESS_RESTARTS, RngStream::new(63, k as u64)).unwrap();
        if w.violation > worst {
            worst = w.violation;
            offender = Some(label.clone());
        }
    }
    let c_ok = worst <= 1e-7;
    details.push(format!(
        "(c) {} Ũ_2 members searched, largest violation {worst:.3e} ({})",
        members.len(),
        offender.unwrap_or_default()
    ));
    // (d): 80 Hilbert-Schmidt states and 20 noisy random pure states
    let mut d_ok = true;
    let (mut dps_pairs, mut lifted, mut s21_inside) = (0, 0, 0);
    for i in 0..100u64 {
        let mut rng = RngStream::new(64, i).generator();
        let rho = if i < 80 {
            sample_hs(3, &mut rng).unwrap()
        } else {
            let psi = sample_haar_pure(3, 3, &mut rng).unwrap();
            let noise = sample_hs(3, &mut rng).unwrap();
            mix(&[(0.85, &BipartiteState::pure(&psi)), (0.15, &noise)]).unwrap()
        };
        let k1 = ppt_check(&rho);
        let k2 = dps_margin(&rho, 2, &opts()).unwrap();
        if k2.inside() && !k1.inside() || k1.outside() && !k2.outside() {
            d_ok = false;
            details.push(format!("(d) state {i}: S^1 {:.3e}, S^2 {:.3e}", k1.margin, k2.margin));
        }
        dps_pairs += 1;
        let reduced = schmidt_hierarchy_margin(&rho, 2, 1, &opts()).unwrap();
        if reduced.inside() {
            s21_inside += 1;
        } else if reduced.outside() {
            // the lift needs the dual of the explicit level-one problem
            let level_one = schmidt_hierarchy_direct(&rho, 2, 1, &opts()).unwrap();
            let c = lift_schmidt_certificate(&level_one, &opts()).unwrap();
            if c.certifies_outside() {
                lifted += 1;
            } else {
                d_ok = false;
                details.push(format!("(d) state {i}: lifted certificate failed {c:?}"));
            }
        } else {
            d_ok = false;
            details.push(format!("(d) state {i}: S_2^1 inconclusive {:.3e}", reduced.margin));
        }
    }
    details.push(format!(
        "(d) S^2 ⊆ S^1 on {dps_pairs} states; S_2^2 ⊆ S_2^1: {s21_inside} inside S_2^1, {lifted} outside S_2^2 by lifted certificate"
    ));
    let mut full = 0;
    for i in 0..3u64 {
        let rho = sample_hs(2, &mut RngStream::new(65, i).generator()).unwrap();
        let s22 = schmidt_hierarchy_margin(&rho, 2, 2, &opts()).unwrap();
        let s21 = schmidt_hierarchy_margin(&rho, 2, 1, &opts()).unwrap();
        if s22.inside() && s21.inside() {
            full += 1;
        } else {
            d_ok = false;
        }
    }
    details.push(format!("(d) full S_2^2 solves at d = 2: {full}/3 inside both levels"));
    let pass = a_in == 200 && b_in == 200 && c_ok && d_ok && lifted > 0;
    let mut v = Verdict::new(pass, "hierarchy soundness (a)-(d)");
    v.details = details;
    v
}

/// `min <embed(H), X>` over unit-trace `X ⪰ 0`.
fn eigenvalue_sdp(h: &ComplexMatrix) -> Option<f64> {
    let e = real_embed(h).ok()?;
    let n = e.nrows();
    let mut p = SdpProblem::new(vec![n], Sense::Minimize).with_objective(BlockSparse::from_dense(0, &e).ok()?);
    p.add_constraint(BlockSparse::identity(0, n), 1.0);
    let s = solve(&p, &SolverOptions::default()).ok()?;
    (s.status == SolveStatus::Optimal).then_some(s.primal_objective)
}

fn criterion_7() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut failed = 0;
    for i in 0..100u64 {
        let n = 1 + (i as usize % 25);
        let g = RngStream::new(71, i).generator().ginibre(n, n);
        let h = (&g + &g.adjoint()).scale(0.5);
        let direct = *hermitian_eigenvalues(&h).unwrap().last().unwrap();
        match eigenvalue_sdp(&h) {
            Some(v) => worst = worst.max((v - direct).abs()),
            None => failed += 1,
        }
    }
    let stats = solve_stats();
    let kkt_ok = stats.failed == 0 && stats.stopped == 0 && stats.max_kkt <= KKT_BOUND;
    let pass = kkt_ok && failed == 0 && worst <= EIG_BAND;
    let mut v = Verdict::new(pass, "solver: KKT residuals and the eigenvalue program");
    v.details = vec![
        format!(
            "{} solves: {} optimal, {} stopped, {} failed, {} infeasibility certificates; max KKT residual {:.3e}",
            stats.solves, stats.optimal, stats.stopped, stats.failed, stats.certificates, stats.max_kkt
        ),
        format!("eigenvalue program vs eigensolver on 100 matrices (dim 1..25): max deviation {worst:.3e}, {failed} failures"),
    ];
    v
}

fn criterion_8() -> Verdict {
    let mut hs_in = 0;
    let mut real_in = 0;
    for i in 0..1000u64 {
        let rho = sample_hs(3, &mut RngStream::new(81, i).generator()).unwrap();
        hs_in += schmidt_hierarchy_margin(&rho, 2, 1, &opts()).unwrap().inside() as usize;
        let rho = sample_real(4, &mut RngStream::new(82, i).generator()).unwrap();
        real_in += schmidt_hierarchy_margin(&rho, 2, 1, &opts()).unwrap().inside() as usize;
    }
    let mut v = Verdict::new(hs_in == 1000 && real_in == 1000, "sampled states inside S_2^1");
    v.details = vec![
        format!("{hs_in}/1000 Hilbert-Schmidt d = 3"),
        format!("{real_in}/1000 real d = 4"),
    ];
    v
}

fn report(n: usize, v: &Verdict, secs: f64) {
    println!("{} {n}: {} [{secs:.0}s]", if v.pass { "PASS" } else { "FAIL" }, v.summary);
    for d in &v.details {
        println!("    {d}");
    }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    reset_solve_stats();
    let mut members = Members::new();
    let mut all = true;
    let mut run = |n: usize, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        report(n, &v, start.elapsed().as_secs_f64());
        all &= v.pass;
    };
    run(1, &mut || criterion_1(&mut members));
    run(2, &mut criterion_2);
    run(3, &mut criterion_3);
    run(4, &mut criterion_4);
    run(5, &mut || criterion_5(&mut members));
    run(6, &mut || criterion_6(&members));
    run(8, &mut criterion_8);
    // last, so the residual audit covers every solve above
    run(7, &mut criterion_7);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
