use super::{LogReal, Real};
use crate::error::{Error, Result};

fn ln_factorial_f64(n: u64) -> f64 {
    if n <= 20 {
        let mut p: u64 = 1;
        for i in 2..=n {
            p *= i;
        }
        return (p as f64).ln();
    }
    // ln Gamma(z) with z = n + 1 >= 22: Stirling series truncated after z^-11.
    let z = n as f64 + 1.0;
    let z2 = z * z;
    let series = (1.0 / 12.0
        + (-1.0 / 360.0
            + (1.0 / 1260.0 + (-1.0 / 1680.0 + (1.0 / 1188.0 - 691.0 / 360360.0 / z2) / z2) / z2)
                / z2)
            / z2)
        / z;
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// ln(n!). Exact up to rounding for n <= 20; Stirling series beyond.
pub fn log_factorial<T: Real>(n: u64) -> LogReal<T> {
    LogReal::from_ln(T::lit(ln_factorial_f64(n)))
}

/// ln of the multinomial coefficient n! / (k_1! ... k_j!).
pub fn log_binomial<T: Real>(n: u64, parts: &[u64]) -> Result<LogReal<T>> {
    let total: u64 = parts.iter().sum();
    if total != n {
        return Err(Error::Contract(format!(
            "multinomial parts sum to {total}, expected {n}"
        )));
    }
    let mut acc = log_factorial::<T>(n).ln();
    for &k in parts {
        acc = acc - log_factorial::<T>(k).ln();
    }
    Ok(LogReal::from_ln(acc))
}

/// ln C(n, k); zero (−inf) when k > n.
pub fn log_choose<T: Real>(n: u64, k: u64) -> LogReal<T> {
    if k > n {
        return LogReal::zero();
    }
    LogReal::from_ln(
        log_factorial::<T>(n).ln() - log_factorial::<T>(k).ln() - log_factorial::<T>(n - k).ln(),
    )
}

/// ln of the falling factorial (n)_k = n!/(n−k)!; zero when k > n.
pub fn log_falling<T: Real>(n: u64, k: u64) -> LogReal<T> {
    if k > n {
        return LogReal::zero();
    }
    LogReal::from_ln(log_factorial::<T>(n).ln() - log_factorial::<T>(n - k).ln())
}
