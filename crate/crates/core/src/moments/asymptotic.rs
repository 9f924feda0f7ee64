use super::overlap::{hessian_phi2, p_star};
use crate::cycles::{delta_l, lambda_l};
use crate::error::{Error, Result};
use crate::num_kernel::Real;

/// Limit of E[Z²]/E[Z]² and the Laplace-method form it is derived from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondMomentAsymptotic<T> {
    /// √((k−1)/(k−d)).
    pub value: T,
    /// f(w*)·√((2π)² / det((k/√(2d))·H)) with f(w*) = √(2/((2π)²·p₀*p₁*p₂*)).
    pub laplace_form: T,
    pub prefactor: T,
}

pub fn second_moment_asymptotic<T: Real>(k: usize, d: T) -> Result<SecondMomentAsymptotic<T>> {
    let kf = T::from_usize(k).unwrap();
    if d >= kf {
        return Err(Error::Domain(format!("need d < k, got d = {d}, k = {k}")));
    }
    if d <= T::one() {
        return Err(Error::Domain(format!("need d > 1, got {d}")));
    }
    let two_pi = T::lit(2.0) * T::PI();
    let ps = p_star::<T>(k);
    let prefactor = (T::lit(2.0) / (two_pi * two_pi * ps[0] * ps[1] * ps[2])).sqrt();
    let h = hessian_phi2(k, d)?;
    let scale2 = kf * kf / (T::lit(2.0) * d);
    let laplace_form = prefactor * (two_pi * two_pi / (scale2 * h.det())).sqrt();
    let value = ((kf - T::one()) / (kf - d)).sqrt();
    // det H is formed by cancellation; allow for its conditioning near d = k.
    let cond = (h.h11 * h.h22 + h.h12 * h.h12) / h.det().abs();
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0)) + T::epsilon() * T::lit(64.0) * cond;
    if (laplace_form - value).abs() > tol * value {
        return Err(Error::Contract(format!(
            "Laplace form {laplace_form} disagrees with closed form {value}"
        )));
    }
    Ok(SecondMomentAsymptotic { value, laplace_form, prefactor })
}

/// Partial variance-explained series Σ_{ℓ≤l_max} λ_ℓδ_ℓ² against ln√((k−1)/(k−d)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceExplained<T> {
    pub partial_sum: T,
    pub closed_form: T,
    pub residual: T,
}

pub fn variance_explained<T: Real>(k: usize, d: usize, l_max: usize) -> Result<VarianceExplained<T>> {
    if d >= k {
        return Err(Error::SeriesDivergence(format!(
            "ratio (d-1)/(k-1) = {}/{} is not below one",
            d - 1,
            k - 1
        )));
    }
    if d < 2 {
        return Err(Error::Domain(format!("need d >= 2, got {d}")));
    }
    let partial_sum = (1..=l_max).fold(T::zero(), |acc, l| {
        let dl = delta_l::<T>(l, k);
        acc + lambda_l::<T>(l, k, d) * dl * dl
    });
    let kf = T::from_usize(k).unwrap();
    let closed_form = T::lit(0.5) * ((kf - T::one()) / (kf - T::from_usize(d).unwrap())).ln();
    Ok(VarianceExplained { partial_sum, closed_form, residual: closed_form - partial_sum })
}
