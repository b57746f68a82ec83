//! Operators, geometric margins, boundary behaviour, coefficient and growth
//! bounds, and the conjecture explorer.
//!
//! Every verifier samples a [`GridSpec`] and reports extremes rather than a
//! bare verdict, so a failing property also says where and by how much.

mod boundary;
mod bounds;
pub mod conjecture;
mod grid;
mod margins;

pub use boundary::{boundary_trace, cluster_stats, covering, covering_radius, Covering, TracePoint};
pub use bounds::{
    clh_bounds, clh_margins_at, clh_margins_on_real_axis, coeff_certificate, growth_distortion_certificate,
    sufficient_starlike, BoundItem, CoeffCertificate, GrowthReport, SufficientReport, BOUND_NAMES, COEFF_TOL,
};
pub use conjecture::{conjecture_scan, ScanConfig, ScanSummary, TrialRecord};
pub use grid::{GridSpec, MarginReport, EXCLUSION, MAX_TAIL};
pub use margins::{
    convex_margin, counterexample_v, d, d2, identity_check, jacobian_margin, starlike_margin, table1, v_value,
    IdentityKind, TABLE1_POINTS,
};
