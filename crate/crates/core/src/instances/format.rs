//! Text form of a configuration:
//!
//! ```text
//! n = 4
//! d = 2
//! k = 4
//! r = 2
//! m = 2
//! wiring = [0, 1, 2, 3, 4, 5, 6, 7]
//! ```

use super::{first_permutation_defect, Configuration, Params};
use crate::error::{Error, Result};
use serde::Deserialize;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfiguration {
    n: usize,
    d: usize,
    k: usize,
    r: usize,
    m: usize,
    wiring: Vec<u32>,
}

pub fn serialize(cfg: &Configuration) -> String {
    let p = cfg.params();
    let wiring: Vec<String> = cfg.wiring().iter().map(|w| w.to_string()).collect();
    format!(
        "n = {}\nd = {}\nk = {}\nr = {}\nm = {}\nwiring = [{}]\n",
        p.n,
        p.d,
        p.k,
        p.r,
        p.m,
        wiring.join(", ")
    )
}

fn line_col(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    format!("line {line}, column {col}")
}

pub fn deserialize(text: &str) -> Result<Configuration> {
    let raw: RawConfiguration = toml::from_str(text).map_err(|e| Error::Parse {
        position: e.span().map_or_else(|| "document".to_string(), |s| line_col(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    if raw.d * raw.n != raw.k * raw.m {
        return Err(Error::Parameter(format!(
            "d*n = {} differs from k*m = {}",
            raw.d * raw.n,
            raw.k * raw.m
        )));
    }
    let params = Params::new(raw.n, raw.d, raw.k, raw.r).map_err(|e| Error::Parameter(e.to_string()))?;
    if raw.wiring.len() != params.edges() {
        return Err(Error::Parse {
            position: "wiring".into(),
            message: format!("expected {} entries, found {}", params.edges(), raw.wiring.len()),
        });
    }
    if let Some((i, msg)) = first_permutation_defect(&raw.wiring) {
        return Err(Error::Parse { position: format!("wiring[{i}]"), message: msg });
    }
    Configuration::new(params, raw.wiring)
}
