//! KL contraction coefficients: generic finite channels, the occupation
//! channel and its conjectured supremum, and the k = 4 grid certificate.

mod files;
mod generic;
mod k4;
mod occupation;

pub use files::{parse_channel_file, ChannelFile};
pub use generic::{contraction_generic, Contraction};
pub use k4::{d1, d2, d_min, d_minus, d_plus, r_max, r_plus, verify_k4, w2_min, K4Certificate, K4Margins};
pub use occupation::{contraction_occupation, ratio_along_ray, ratio_r, OccupationChannel, OccupationSup};

use crate::num_kernel::Real;

/// Two scores closer than this (relative) count as a tie; the earlier point wins.
pub(crate) fn improves<T: Real>(candidate: T, best: T) -> bool {
    candidate > best + T::lit(1e-12) * best.abs()
}
