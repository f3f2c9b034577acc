//! Certification of entanglement dimension and unfaithfulness for bipartite
//! quantum states.
//!
//! The crate is layered bottom-up:
//!
//! * [`hermlin`]: dense complex linear algebra on composite systems.
//! * [`sdpsolve`]: a primal-dual interior-point solver for small dense SDPs
//!   plus feasibility-margin front-ends.
//! * [`qstate`]: bipartite states, Schmidt decompositions and samplers.
//! * [`criteria`]: PPT, DPS, Schmidt-number hierarchy, unfaithfulness and
//!   reduction criteria, fidelity witnesses.
//! * [`witness`]: nonconvex search for violated fidelity witnesses.

pub mod criteria;
pub mod hermlin;
pub mod qstate;
pub mod sdpsolve;
pub mod witness;
