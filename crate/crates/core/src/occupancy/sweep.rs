use super::is_satisfiable;
use crate::error::{Error, Result};
use crate::instances::{sample_configuration, Params};
use crate::seed::split_seed;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

/// One row of a satisfiability sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SatRow {
    pub n: usize,
    pub trials: u32,
    pub sat_count: u32,
    pub sat_fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

/// Wilson score interval at 95% coverage.
pub fn wilson_interval(successes: u32, trials: u32) -> (f64, f64) {
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Fraction of satisfiable configurations per `n`. Trial `t` at size `n`
/// samples with seed `split_seed(split_seed(seed, n), t)`, so rows do not
/// depend on the rest of `n_list` or on the thread count.
pub fn estimate_sat_probability(
    k: usize,
    d: usize,
    r: usize,
    n_list: &[usize],
    trials: u32,
    seed: u64,
    cap: usize,
) -> Result<Vec<SatRow>> {
    if trials == 0 {
        return Err(Error::Contract("trials must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let params = Params::new(n, d, k, r)?;
        if n > cap {
            return Err(Error::Capacity { n, cap });
        }
        let base = split_seed(seed, n as u64);
        let sat: Vec<bool> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let cfg = sample_configuration(&params, split_seed(base, t as u64));
                is_satisfiable(&cfg, cap)
            })
            .collect::<Result<_>>()?;
        let sat_count = sat.iter().filter(|&&s| s).count() as u32;
        let (ci_low, ci_high) = wilson_interval(sat_count, trials);
        rows.push(SatRow {
            n,
            trials,
            sat_count,
            sat_fraction: sat_count as f64 / trials as f64,
            ci_low,
            ci_high,
            seed,
        });
    }
    Ok(rows)
}

/// Writes rows under the header `n,trials,sat_count,sat_fraction,ci_low,ci_high,seed`.
pub fn write_sat_csv<W: Write>(rows: &[SatRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
