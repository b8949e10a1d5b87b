#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod dataset;
pub mod encoding;
pub mod error;
pub mod grid;
pub mod io;
pub mod region;
pub mod scalar;
pub mod search;
pub mod terrain;

pub use error::{Error, NoPathReason, Result};
pub use grid::{Cell, Dims, Raster};
pub use scalar::Real;

pub type DemF64 = terrain::Dem<f64>;
pub type DemF32 = terrain::Dem<f32>;
pub type CostMapF64 = terrain::CostMap<f64>;
pub type CostMapF32 = terrain::CostMap<f32>;
pub type ProbabilityMapF64 = region::ProbabilityMap<f64>;
pub type ProbabilityMapF32 = region::ProbabilityMap<f32>;
pub type PlannerConfigF64 = search::PlannerConfig<f64>;
pub type PlannerConfigF32 = search::PlannerConfig<f32>;
pub type PlanOutcomeF64 = search::PlanOutcome<f64>;
pub type PlanOutcomeF32 = search::PlanOutcome<f32>;
