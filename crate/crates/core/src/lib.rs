//! Tools for random regular r-in-k occupation problems: configuration-model
//! instances, exact solution counting, short-cycle censuses, first/second
//! moment formulas and KL contraction coefficients.
//!
//! The numeric modules are generic over [`Real`]; the aliases below fix the
//! scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cycles;
pub mod error;
pub mod instances;
pub mod moments;
pub mod num_kernel;
pub mod occupancy;
pub mod sdpi;
pub mod seed;

pub use error::{Error, Result};
pub use num_kernel::Real;

pub type LogReal = num_kernel::LogReal<f64>;
pub type Pmf = num_kernel::Pmf<f64>;
pub type Channel = num_kernel::Channel<f64>;
pub type OverlapPoint = moments::OverlapPoint<f64>;
pub type Hessian2 = moments::Hessian2<f64>;
pub type ThresholdReport = moments::ThresholdReport<f64>;
pub type OccupationChannel = sdpi::OccupationChannel<f64>;
pub type OccupationSup = sdpi::OccupationSup<f64>;
pub type Contraction = sdpi::Contraction<f64>;
pub type K4Certificate = sdpi::K4Certificate<f64>;
