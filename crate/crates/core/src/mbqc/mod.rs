//! Adaptive measurement protocols on spin-1 resource chains.

pub mod basis;
pub mod engine;
pub mod frame;
pub mod plan;
pub mod teleport;

pub use basis::{boundary_basis, rotated_spin1_basis};
pub use engine::{
    enumerate_path_records, enumerate_paths, measure_site, monte_carlo, run_round, McEstimate, MeasurementPath,
    PathSums, RoundOutcome,
};
pub use frame::{adaptive_angle, ByproductFrame};
pub use plan::{MeasurementPlan, SitePlan};
pub use teleport::{teleport_step, BellOutcome, TeleportBranch};
