use super::{first_moment_exact, joint_moment_exact, phi1, second_moment_exact_ratio};
use crate::cycles::mu_l;
use crate::error::{Error, Result};
use crate::instances::Params;
use serde::Serialize;

/// Summary of exact and asymptotic moments for one (k, d[, n]).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub k: usize,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "ln_EZ_exact", skip_serializing_if = "Option::is_none")]
    pub ln_ez_exact: Option<f64>,
    #[serde(rename = "ln_EZ_asymptotic", skip_serializing_if = "Option::is_none")]
    pub ln_ez_asymptotic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ln_ratio_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ln_ratio_asymptotic: Option<f64>,
    pub l: usize,
    #[serde(rename = "ln_EZXl", skip_serializing_if = "Option::is_none")]
    pub ln_ezxl: Option<f64>,
    pub mu_l: f64,
}

/// Builds a report. Exact fields need `n` and `exact = true`; the asymptotic
/// ratio is omitted when d ≥ k.
pub fn moment_report(k: usize, d: usize, n: Option<usize>, l: usize, exact: bool) -> Result<MomentReport> {
    if k < 4 {
        return Err(Error::Domain(format!("moments need k >= 4, got {k}")));
    }
    if d < 2 || l == 0 {
        return Err(Error::Domain(format!("need d >= 2 and l >= 1, got d = {d}, l = {l}")));
    }
    if exact && n.is_none() {
        return Err(Error::Contract("exact moments need n".into()));
    }
    let df = d as f64;
    let ln_ratio_asymptotic = (d < k).then(|| 0.5 * ((k as f64 - 1.0) / (k as f64 - df)).ln());
    let mut report = MomentReport {
        k,
        d,
        n,
        ln_ez_exact: None,
        ln_ez_asymptotic: n.map(|n| 0.5 * df.ln() + n as f64 * phi1(k, df)),
        ln_ratio_exact: None,
        ln_ratio_asymptotic,
        l,
        ln_ezxl: None,
        mu_l: mu_l::<f64>(l, k, d),
    };
    if let (true, Some(n)) = (exact, n) {
        let params = Params::new(n, d, k, 2)?;
        report.ln_ez_exact = Some(first_moment_exact::<f64>(&params)?.ln());
        report.ln_ratio_exact = Some(second_moment_exact_ratio::<f64>(&params)?.ln());
        report.ln_ezxl = Some(joint_moment_exact::<f64>(&params, l)?.ln());
    }
    Ok(report)
}
