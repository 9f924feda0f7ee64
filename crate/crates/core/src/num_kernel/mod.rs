//! Log-space combinatorics, divergences and deterministic 1-d optimizers.

mod combin;
mod info;
mod logreal;
mod optim;
mod scalar;

pub use combin::{log_binomial, log_choose, log_factorial, log_falling};
pub use info::{binary_entropy, kl_divergence, relative_entropy, xlnx_over, Channel, Pmf};
pub use logreal::LogReal;
pub use optim::{find_root, maximize_1d, GRID_INTERVALS};
pub use scalar::Real;
