//! Multi-truck, multi-drone routing on road networks.
//!
//! The solver core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the command-line tool uses.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod scalar;

pub mod baselines;
pub mod bench;
pub mod decode;
pub mod eval;
pub mod export;
pub mod fullmilp;
pub mod milp;
pub mod partition;
pub mod pipeline;
pub mod roadnet;
pub mod settsp;
pub mod solution;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Instance = roadnet::Instance<f64>;
pub type RoadNetwork = roadnet::RoadNetwork<f64>;
pub type DistanceOracle = roadnet::DistanceOracle<f64>;
pub type Solution = solution::Solution<f64>;
pub type TruckGroupRoute = solution::TruckGroupRoute<f64>;
pub type TimingTrace = eval::TimingTrace<f64>;
pub type SetTour = settsp::SetTour<f64>;
