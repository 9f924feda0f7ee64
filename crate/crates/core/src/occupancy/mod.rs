//! Solutions of the r-in-k occupation problem on a configuration: quota,
//! checking, exact counting, overlaps and Monte Carlo satisfiability sweeps.

mod enumerate;
mod sweep;

pub use enumerate::{count_solutions, count_solutions_capped, for_each_solution, is_satisfiable, revolving_door, DEFAULT_CAP};
pub use sweep::{estimate_sat_probability, wilson_interval, write_sat_csv, SatRow};

use crate::error::{Error, Result};
use crate::instances::{Configuration, Params};

/// Number of ones `n1 = r·n/k` every solution must have, if integral.
pub fn ones_quota(params: &Params) -> Option<usize> {
    let num = params.r * params.n;
    num.is_multiple_of(params.k).then_some(num / params.k)
}

/// Binary assignment to the variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    pub fn from_ones(n: usize, ones: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &i in ones {
            bits[i] = true;
        }
        Assignment { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

fn check_len(cfg: &Configuration, x: &Assignment) -> Result<()> {
    if x.len() != cfg.params().n {
        return Err(Error::Contract(format!(
            "assignment has length {}, expected n = {}",
            x.len(),
            cfg.params().n
        )));
    }
    Ok(())
}

/// Number of one-valued v-edges landing in each constraint.
fn tallies(cfg: &Configuration, x: &Assignment) -> Vec<usize> {
    let p = cfg.params();
    let mut t = vec![0usize; p.m];
    for (v, &f) in cfg.wiring().iter().enumerate() {
        if x.bits[v / p.d] {
            t[f as usize / p.k] += 1;
        }
    }
    t
}

/// True iff every constraint sees exactly `r` ones (with multiplicity).
pub fn is_solution(cfg: &Configuration, x: &Assignment) -> Result<bool> {
    check_len(cfg, x)?;
    let r = cfg.params().r;
    Ok(tallies(cfg, x).iter().all(|&t| t == r))
}

/// Overlap of two solutions: `r1` shared ones, `r2` constraints with exactly
/// two f-edges wired to shared-one variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OverlapProfile {
    pub r1: usize,
    pub r2: usize,
}

impl OverlapProfile {
    /// Region constraints on `(r1, r2)` for given `n1`, `d`, `m`.
    pub fn is_feasible(&self, n1: usize, d: usize, m: usize) -> bool {
        let dr1 = d * self.r1;
        self.r1 <= n1 && self.r2 + m >= dr1 && self.r2 <= dr1 / 2
    }
}

/// Overlap profile and its normalization `w = (r1/n1, r2/m)`.
pub fn overlap(cfg: &Configuration, x: &Assignment, y: &Assignment) -> Result<(OverlapProfile, (f64, f64))> {
    if !is_solution(cfg, x)? || !is_solution(cfg, y)? {
        return Err(Error::Contract("overlap requires two solutions".into()));
    }
    let p = cfg.params();
    let shared = Assignment::new(x.bits.iter().zip(&y.bits).map(|(&a, &b)| a && b).collect());
    let r1 = shared.count_ones();
    let r2 = tallies(cfg, &shared).iter().filter(|&&t| t == 2).count();
    let n1 = ones_quota(p).expect("a solution exists, so the quota is integral");
    Ok((OverlapProfile { r1, r2 }, (r1 as f64 / n1 as f64, r2 as f64 / p.m as f64)))
}
