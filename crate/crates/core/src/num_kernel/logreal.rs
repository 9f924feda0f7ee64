use super::Real;
use crate::error::{Error, Result};
use std::ops::{Add, Div, Mul};

/// A nonnegative quantity stored by its natural logarithm.
///
/// `ln = -inf` represents zero. Addition is log-sum-exp.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogReal<T>(T);

impl<T: Real> LogReal<T> {
    pub fn from_ln(ln: T) -> Self {
        debug_assert!(!ln.is_nan());
        LogReal(ln)
    }

    pub fn from_linear(x: T) -> Result<Self> {
        if x.is_nan() || x < T::zero() {
            return Err(Error::Domain(format!("{x} is not a nonnegative number")));
        }
        Ok(LogReal(x.ln()))
    }

    pub fn zero() -> Self {
        LogReal(T::neg_infinity())
    }

    pub fn one() -> Self {
        LogReal(T::zero())
    }

    pub fn ln(self) -> T {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == T::neg_infinity()
    }

    /// Linear value; may overflow to `+inf`.
    pub fn exp(self) -> T {
        self.0.exp()
    }

    /// Linear value if it is finite in `T`.
    pub fn to_linear(self) -> Option<T> {
        let v = self.0.exp();
        v.is_finite().then_some(v)
    }

    pub fn powi(self, e: i32) -> Self {
        if e == 0 {
            return Self::one();
        }
        LogReal(self.0 * T::from_i32(e).unwrap())
    }

    /// Ordered log-sum-exp over an iterator. The result depends only on the
    /// sequence order, never on scheduling.
    pub fn sum<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        let mut max = T::neg_infinity();
        let mut acc = T::zero();
        for x in iter {
            let v = x.0;
            if v == T::neg_infinity() {
                continue;
            }
            if v > max {
                acc = acc * (max - v).exp() + T::one();
                max = v;
            } else {
                acc = acc + (v - max).exp();
            }
        }
        if max == T::neg_infinity() {
            Self::zero()
        } else {
            LogReal(max + acc.ln())
        }
    }
}

impl<T: Real> Add for LogReal<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self.0 >= rhs.0 { (self.0, rhs.0) } else { (rhs.0, self.0) };
        if lo == T::neg_infinity() {
            return LogReal(hi);
        }
        LogReal(hi + (lo - hi).exp().ln_1p())
    }
}

impl<T: Real> Mul for LogReal<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        LogReal(self.0 + rhs.0)
    }
}

impl<T: Real> Div for LogReal<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division of LogReal by zero");
        if self.is_zero() {
            return Self::zero();
        }
        LogReal(self.0 - rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_matches_linear() {
        let a = LogReal::from_linear(3.0f64).unwrap();
        let b = LogReal::from_linear(5.0f64).unwrap();
        assert!(((a + b).exp() - 8.0).abs() < 1e-14);
        assert!(((a * b).exp() - 15.0).abs() < 1e-13);
        assert!(((b / a).exp() - 5.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_is_neutral() {
        let a = LogReal::from_linear(2.5f64).unwrap();
        assert_eq!(a + LogReal::zero(), a);
        assert!((a * LogReal::zero()).is_zero());
        assert!(LogReal::<f64>::sum(std::iter::empty()).is_zero());
    }

    #[test]
    fn sum_of_huge_terms() {
        let terms = (0..1000).map(|i| LogReal::from_ln(1000.0f64 + i as f64 * 1e-3));
        let s = LogReal::sum(terms);
        let expect = 1000.0 + (0..1000).map(|i| (i as f64 * 1e-3).exp()).sum::<f64>().ln();
        assert!((s.ln() - expect).abs() < 1e-12);
        assert!(s.to_linear().is_none());
    }

    #[test]
    fn negative_rejected() {
        assert!(LogReal::from_linear(-1.0f64).is_err());
    }
}
