//! Process-wide solve counters, for auditing batches of solves.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::{SdpSolution, SolveStatus};

static SOLVES: AtomicU64 = AtomicU64::new(0);
static OPTIMAL: AtomicU64 = AtomicU64::new(0);
static CERTIFICATES: AtomicU64 = AtomicU64::new(0);
static STOPPED: AtomicU64 = AtomicU64::new(0);
static FAILED: AtomicU64 = AtomicU64::new(0);
// bit pattern of a non-negative f64; integer order matches float order
static MAX_KKT: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub solves: u64,
    pub optimal: u64,
    /// Runs ending in an infeasibility certificate.
    pub certificates: u64,
    /// Runs that hit the iteration limit or stalled.
    pub stopped: u64,
    /// Runs that returned an error from the iteration itself.
    pub failed: u64,
    /// Largest KKT residual over the runs that returned a point
    /// (optimal or stopped).
    pub max_kkt: f64,
}

pub(crate) fn record(sol: &SdpSolution) {
    SOLVES.fetch_add(1, Ordering::Relaxed);
    match sol.status {
        SolveStatus::Optimal => {
            OPTIMAL.fetch_add(1, Ordering::Relaxed);
        }
        SolveStatus::InfeasibleCertificate(_) => {
            CERTIFICATES.fetch_add(1, Ordering::Relaxed);
            return;
        }
        SolveStatus::MaxIterations => {
            STOPPED.fetch_add(1, Ordering::Relaxed);
        }
    }
    let k = sol.kkt.max();
    let k = if k.is_nan() { f64::INFINITY } else { k.max(0.0) };
    MAX_KKT.fetch_max(k.to_bits(), Ordering::Relaxed);
}

pub(crate) fn record_failure() {
    SOLVES.fetch_add(1, Ordering::Relaxed);
    FAILED.fetch_add(1, Ordering::Relaxed);
}

pub fn solve_stats() -> SolveStats {
    SolveStats {
        solves: SOLVES.load(Ordering::Relaxed),
        optimal: OPTIMAL.load(Ordering::Relaxed),
        certificates: CERTIFICATES.load(Ordering::Relaxed),
        stopped: STOPPED.load(Ordering::Relaxed),
        failed: FAILED.load(Ordering::Relaxed),
        max_kkt: f64::from_bits(MAX_KKT.load(Ordering::Relaxed)),
    }
}

pub fn reset_solve_stats() {
    for c in [&SOLVES, &OPTIMAL, &CERTIFICATES, &STOPPED, &FAILED, &MAX_KKT] {
        c.store(0, Ordering::Relaxed);
    }
}
