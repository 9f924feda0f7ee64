use super::overlap::p_star;
use crate::error::{Error, Result};
use crate::instances::Params;
use crate::num_kernel::{log_binomial, log_choose, log_factorial, log_falling, LogReal, Real};
use crate::occupancy::ones_quota;
use rayon::prelude::*;

/// A moment in log scale. `quota_absent` marks parameter sets where the
/// number of ones r·n/k is not integral, so Z = 0 surely and `value` is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMoment<T> {
    pub value: LogReal<T>,
    pub quota_absent: bool,
}

impl<T: Real> LogMoment<T> {
    fn absent() -> Self {
        LogMoment { value: LogReal::zero(), quota_absent: true }
    }

    fn of(value: LogReal<T>) -> Self {
        LogMoment { value, quota_absent: false }
    }

    pub fn ln(&self) -> T {
        self.value.ln()
    }
}

fn lnu<T: Real>(x: u64) -> T {
    T::from_count(x).ln()
}

/// ln(base^e) with 0^0 = 1.
fn ln_pow<T: Real>(base: u64, e: u64) -> T {
    if e == 0 {
        T::zero()
    } else {
        lnu::<T>(base) * T::from_count(e)
    }
}

fn require_r2(params: &Params) -> Result<()> {
    if params.r != 2 {
        return Err(Error::Domain(format!(
            "this moment formula is implemented for r = 2 only, got r = {}",
            params.r
        )));
    }
    Ok(())
}

/// Exact ln E[Z] = ln[C(n,n1)·C(k,r)^m·(rm)!·(dn−rm)!/(dn)!].
pub fn first_moment_exact<T: Real>(params: &Params) -> Result<LogMoment<T>> {
    let Some(n1) = ones_quota(params) else {
        return Ok(LogMoment::absent());
    };
    let (n, d, k, r, m) = (params.n as u64, params.d as u64, params.k as u64, params.r as u64, params.m as u64);
    let dn = d * n;
    let ln = log_choose::<T>(n, n1 as u64).ln() + T::from_count(m) * log_choose::<T>(k, r).ln()
        + log_factorial::<T>(r * m).ln()
        + log_factorial::<T>(dn - r * m).ln()
        - log_factorial::<T>(dn).ln();
    Ok(LogMoment::of(LogReal::from_ln(ln)))
}

/// Exact ln(E[Z²]/E[Z]²) as a sum over overlap classes (r1, r2) of
/// p_v(r1)·p_f(t)/p_e(d·r1): two hypergeometric laws and one multinomial
/// with cell probabilities p*.
pub fn second_moment_exact_ratio<T: Real>(params: &Params) -> Result<LogMoment<T>> {
    require_r2(params)?;
    let Some(n1) = ones_quota(params) else {
        return Ok(LogMoment::absent());
    };
    let (n, d, m) = (params.n as u64, params.d as u64, params.m as u64);
    let n1 = n1 as u64;
    let dn = d * n;
    let dn1 = d * n1;
    let ln_ps = p_star::<T>(params.k).map(|p| p.ln());
    let lc_v = log_choose::<T>(n, n1).ln();
    let lc_e = log_choose::<T>(dn, dn1).ln();
    let r1_min = (2 * n1).saturating_sub(n);
    let rows: Vec<LogReal<T>> = (r1_min..=n1)
        .into_par_iter()
        .map(|r1| {
            let lpv = log_choose::<T>(n1, r1).ln() + log_choose::<T>(n - n1, n1 - r1).ln() - lc_v;
            let dr1 = d * r1;
            let lpe = log_choose::<T>(dn1, dr1).ln() + log_choose::<T>(dn - dn1, dn1 - dr1).ln() - lc_e;
            let lo = dr1.saturating_sub(m);
            let hi = dr1 / 2;
            if lo > hi {
                return LogReal::zero();
            }
            LogReal::sum((lo..=hi).map(|r2| {
                let t = [m + r2 - dr1, dr1 - 2 * r2, r2];
                let mut lpf = log_binomial::<T>(m, &t).expect("parts sum to m").ln();
                for (ti, lp) in t.iter().zip(&ln_ps) {
                    if *ti > 0 {
                        lpf = lpf + T::from_count(*ti) * *lp;
                    }
                }
                LogReal::from_ln(lpv + lpf - lpe)
            }))
        })
        .collect();
    Ok(LogMoment::of(LogReal::sum(rows)))
}

/// Number of cyclic binary words of length `l` by (ones, cyclically adjacent
/// one-pairs); index `[r1][r2]`.
fn cyclic_word_classes(l: usize) -> Vec<Vec<u128>> {
    let mut out = vec![vec![0u128; l + 1]; l + 1];
    for first in 0..2usize {
        // state[last][ones][adj]
        let mut state = vec![vec![vec![0u128; l + 1]; l + 1]; 2];
        state[first][first][0] = 1;
        for _ in 1..l {
            let mut next = vec![vec![vec![0u128; l + 1]; l + 1]; 2];
            for last in 0..2 {
                for ones in 0..=l {
                    for adj in 0..=l {
                        let c = state[last][ones][adj];
                        if c == 0 {
                            continue;
                        }
                        next[0][ones][adj] += c;
                        next[1][ones + 1][adj + usize::from(last == 1)] += c;
                    }
                }
            }
            state = next;
        }
        for last in 0..2 {
            for ones in 0..=l {
                for adj in 0..=l {
                    let c = state[last][ones][adj];
                    if c > 0 {
                        out[ones][adj + usize::from(last == 1 && first == 1)] += c;
                    }
                }
            }
        }
    }
    out
}

const MAX_CYCLE_HALF_LENGTH: usize = 100;

/// Exact ln(E[Z·X_ℓ]/E[Z]): sum over words y ∈ {0,1}^ℓ on the canonical 2ℓ-cycle,
/// grouped by (r1(y), r2(y)) with the cyclic successor convention.
pub fn joint_moment_ratio<T: Real>(params: &Params, l: usize) -> Result<LogMoment<T>> {
    require_r2(params)?;
    let Some(n1) = ones_quota(params) else {
        return Ok(LogMoment::absent());
    };
    if l == 0 || l > MAX_CYCLE_HALF_LENGTH {
        return Err(Error::Domain(format!("need 1 <= l <= {MAX_CYCLE_HALF_LENGTH}, got {l}")));
    }
    let (n, d, k, m) = (params.n as u64, params.d as u64, params.k as u64, params.m as u64);
    let n1 = n1 as u64;
    let lu = l as u64;
    if d * n1 < 2 * lu || d * (n - n1) < 2 * lu {
        return Err(Error::Domain(format!(
            "need d*n1 >= 2l and d*(n-n1) >= 2l, got d*n1 = {}, d*(n-n1) = {}, l = {l}",
            d * n1,
            d * (n - n1)
        )));
    }
    let classes = cyclic_word_classes(l);
    let denom = lnu::<T>(2 * lu) + log_factorial::<T>(2 * m).ln() + log_factorial::<T>(d * n - 2 * m).ln();
    let mut terms = Vec::new();
    for (r1, row) in classes.iter().enumerate() {
        for (r2, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let (r1, r2) = (r1 as u64, r2 as u64);
            if r1 > n1 || lu - r1 > n - n1 {
                continue;
            }
            let e1 = log_falling::<T>(n1, r1).ln()
                + log_falling::<T>(n - n1, lu - r1).ln()
                + ln_pow::<T>(d * (d - 1), lu);
            let e2 = log_falling::<T>(m, lu).ln()
                + ln_pow::<T>(2, r2)
                + ln_pow::<T>(2 * (k - 2), 2 * (r1 - r2))
                + ln_pow::<T>((k - 2) * (k - 3), lu + r2 - 2 * r1);
            let e3 = log_factorial::<T>(d * n1 - 2 * r1).ln()
                + log_factorial::<T>(d * (n - n1) - 2 * (lu - r1)).ln();
            let ln_count = T::from_u128(count).unwrap().ln();
            let v = ln_count + e1 + e2 + e3 - denom;
            if !v.is_nan() {
                terms.push(LogReal::from_ln(v));
            }
        }
    }
    Ok(LogMoment::of(LogReal::sum(terms)))
}

/// Exact ln E[Z·X_ℓ].
pub fn joint_moment_exact<T: Real>(params: &Params, l: usize) -> Result<LogMoment<T>> {
    let ratio = joint_moment_ratio::<T>(params, l)?;
    if ratio.quota_absent {
        return Ok(ratio);
    }
    let first = first_moment_exact::<T>(params)?;
    Ok(LogMoment::of(ratio.value * first.value))
}
