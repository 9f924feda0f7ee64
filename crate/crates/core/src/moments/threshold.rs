use crate::error::{Error, Result};
use crate::num_kernel::{binary_entropy, Real};
use serde::Serialize;

/// Threshold degree d* for given k together with its sanity checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport<T> {
    pub k: usize,
    pub w1_star: T,
    pub w2_star: T,
    pub d_star: T,
    pub is_integer: bool,
    pub bounds_ok: bool,
    /// Value of [`lemma_f`] at d*; equals one when the two characterizations agree.
    pub f_at_d_star: T,
}

fn stars<T: Real>(k: usize) -> (T, T) {
    let kk = T::from_usize(k).unwrap();
    let pairs = T::from_usize(k * (k - 1) / 2).unwrap();
    (T::lit(2.0) / kk, T::one() / pairs)
}

/// φ₁(d) = (d/k)·ln C(k,2) − (d−1)·H(2/k).
pub fn phi1<T: Real>(k: usize, d: T) -> T {
    let (w1, w2) = stars::<T>(k);
    let h = binary_entropy(w1).expect("2/k lies in [0,1]");
    d / T::from_usize(k).unwrap() * (-w2.ln()) - (d - T::one()) * h
}

/// f(d) = (2/(k(k−1)))·(k^{k−1} / (2(k−2)^{k−2}(k−1)))^{d−1}, evaluated in logs.
pub fn lemma_f<T: Real>(k: usize, d: T) -> T {
    let kf = T::from_usize(k).unwrap();
    let one = T::one();
    let two = T::lit(2.0);
    let ln_base = (kf - one) * kf.ln() - two.ln() - (kf - two) * (kf - two).ln() - (kf - one).ln();
    ((two / (kf * (kf - one))).ln() + (d - one) * ln_base).exp()
}

pub fn threshold_dstar<T: Real>(k: usize) -> Result<ThresholdReport<T>> {
    if k < 4 {
        return Err(Error::Domain(format!("threshold needs k >= 4, got {k}")));
    }
    let (w1, w2) = stars::<T>(k);
    let kf = T::from_usize(k).unwrap();
    let kh = kf * binary_entropy(w1)?;
    let d_star = kh / (kh + w2.ln());
    let f_at = lemma_f(k, d_star);
    let is_integer = (d_star - d_star.round()).abs() <= T::lit(1e-9);
    Ok(ThresholdReport {
        k,
        w1_star: w1,
        w2_star: w2,
        d_star,
        is_integer,
        bounds_ok: d_star > T::one() && d_star < kf,
        f_at_d_star: f_at,
    })
}
