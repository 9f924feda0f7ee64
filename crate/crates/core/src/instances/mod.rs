//! Configuration-model instances: parameters, wirings, factor-graph views,
//! sampling, two-cycles and redundant constraints.

mod format;

pub use format::{deserialize, serialize};

use crate::error::{Error, Result};
use crate::num_kernel::{log_factorial, log_falling, LogReal, Real};
use crate::seed::{rng_from_seed, Rng};
use rand::Rng as _;
use std::collections::HashMap;

/// Instance parameters: `n` variables of degree `d`, `m = dn/k` constraints of
/// arity `k`, each requiring exactly `r` ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub r: usize,
    pub m: usize,
}

impl Params {
    pub fn new(n: usize, d: usize, k: usize, r: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Domain(format!("need n >= 1 and d >= 1, got n = {n}, d = {d}")));
        }
        if k < 2 {
            return Err(Error::Domain(format!("need k >= 2, got {k}")));
        }
        if r == 0 || r >= k {
            return Err(Error::Domain(format!("need 1 <= r <= k-1, got r = {r}, k = {k}")));
        }
        let dn = d * n;
        if !dn.is_multiple_of(k) {
            return Err(Error::EmptyFamily { dn: dn as u64, k: k as u64 });
        }
        Ok(Params { n, d, k, r, m: dn / k })
    }

    /// Number of half-edges on either side, `d·n = k·m`.
    pub fn edges(&self) -> usize {
        self.d * self.n
    }
}

/// A bijection from v-edges `(i, h)` to f-edges `(a, h')`, both flattened
/// row-major and zero-based: `wiring[i*d + h] = a*k + h'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    params: Params,
    wiring: Vec<u32>,
}

fn first_permutation_defect(wiring: &[u32]) -> Option<(usize, String)> {
    let len = wiring.len();
    let mut seen = vec![false; len];
    for (i, &w) in wiring.iter().enumerate() {
        let w = w as usize;
        if w >= len {
            return Some((i, format!("entry {w} out of range 0..{len}")));
        }
        if seen[w] {
            return Some((i, format!("duplicate entry {w}")));
        }
        seen[w] = true;
    }
    None
}

impl Configuration {
    pub fn new(params: Params, wiring: Vec<u32>) -> Result<Self> {
        if wiring.len() != params.edges() {
            return Err(Error::Contract(format!(
                "wiring has length {}, expected d*n = {}",
                wiring.len(),
                params.edges()
            )));
        }
        if let Some((i, msg)) = first_permutation_defect(&wiring) {
            return Err(Error::Contract(format!("wiring is not a permutation at index {i}: {msg}")));
        }
        Ok(Configuration { params, wiring })
    }

    pub fn identity(params: Params) -> Self {
        Configuration { params, wiring: (0..params.edges() as u32).collect() }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn wiring(&self) -> &[u32] {
        &self.wiring
    }

    /// Inverse permutation: f-edge -> v-edge.
    pub fn inverse(&self) -> Vec<u32> {
        let mut inv = vec![0u32; self.wiring.len()];
        for (v, &f) in self.wiring.iter().enumerate() {
            inv[f as usize] = v as u32;
        }
        inv
    }

    /// Constraint attached to v-edge `h` of variable `i`.
    pub fn constraint_of(&self, i: usize, h: usize) -> usize {
        self.wiring[i * self.params.d + h] as usize / self.params.k
    }
}

/// For each constraint, the variables behind its `k` f-edges (multiset, slot order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGraph {
    params: Params,
    slots: Vec<u32>,
}

impl FactorGraph {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn neighbors(&self, a: usize) -> &[u32] {
        let k = self.params.k;
        &self.slots[a * k..(a + 1) * k]
    }

    /// Number of slots (over all constraints) occupied by variable `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.slots.iter().filter(|&&v| v as usize == i).count()
    }
}

pub fn to_factor_graph(cfg: &Configuration) -> FactorGraph {
    let d = cfg.params.d;
    let mut slots = vec![0u32; cfg.wiring.len()];
    for (v, &f) in cfg.wiring.iter().enumerate() {
        slots[f as usize] = (v / d) as u32;
    }
    FactorGraph { params: cfg.params, slots }
}

/// Fisher-Yates shuffle of the identity wiring driven by `rng`.
pub fn sample_configuration_with(params: &Params, rng: &mut Rng) -> Configuration {
    let mut wiring: Vec<u32> = (0..params.edges() as u32).collect();
    for i in (1..wiring.len()).rev() {
        let j = rng.random_range(0..=i);
        wiring.swap(i, j);
    }
    Configuration { params: *params, wiring }
}

/// Uniformly random configuration; identical seeds give identical wirings.
pub fn sample_configuration(params: &Params, seed: u64) -> Configuration {
    sample_configuration_with(params, &mut rng_from_seed(seed))
}

/// Unordered pairs of v-edges of one variable that land in one constraint.
pub fn count_two_cycles(cfg: &Configuration) -> u64 {
    let d = cfg.params.d;
    let mut total = 0u64;
    let mut cons = Vec::with_capacity(d);
    for i in 0..cfg.params.n {
        cons.clear();
        cons.extend((0..d).map(|h| cfg.constraint_of(i, h)));
        for x in 0..d {
            for y in x + 1..d {
                if cons[x] == cons[y] {
                    total += 1;
                }
            }
        }
    }
    total
}

/// Rejection sampler for configurations without two-cycles. Returns the
/// configuration and the number of attempts used.
pub fn sample_simple_counted(params: &Params, seed: u64, max_attempts: u32) -> Result<(Configuration, u32)> {
    if max_attempts == 0 {
        return Err(Error::Contract("max_attempts must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    for attempt in 1..=max_attempts {
        let cfg = sample_configuration_with(params, &mut rng);
        if count_two_cycles(&cfg) == 0 {
            return Ok((cfg, attempt));
        }
    }
    Err(Error::RetryLimit { attempts: max_attempts })
}

pub fn sample_simple(params: &Params, seed: u64, max_attempts: u32) -> Result<Configuration> {
    sample_simple_counted(params, seed, max_attempts).map(|(c, _)| c)
}

/// Unordered pairs of constraints with the same neighbour set of `k` distinct variables.
pub fn count_redundant_constraints(fg: &FactorGraph) -> u64 {
    let k = fg.params.k;
    let mut groups: HashMap<Vec<u32>, u64> = HashMap::new();
    for a in 0..fg.params.m {
        let mut key = fg.neighbors(a).to_vec();
        key.sort_unstable();
        key.dedup();
        if key.len() == k {
            *groups.entry(key).or_insert(0) += 1;
        }
    }
    groups.values().map(|&c| c * (c - 1) / 2).sum()
}

/// ln of C(m,2)·(n)_k·k!·(d(d−1))^k·(dn−2k)!/(dn)!, the exact expected number
/// of redundant constraint pairs.
pub fn expected_redundant_exact<T: Real>(params: &Params) -> Result<LogReal<T>> {
    let (n, d, k, m) = (params.n as u64, params.d as u64, params.k as u64, params.m as u64);
    if d * n < 2 * k {
        return Err(Error::Domain(format!("need d*n >= 2k, got d*n = {}, k = {k}", d * n)));
    }
    if m < 2 || n < k || d < 2 {
        return Ok(LogReal::zero());
    }
    let pairs = LogReal::from_ln(T::from_count(m * (m - 1) / 2).ln());
    let dd = LogReal::from_ln(T::from_count(d * (d - 1)).ln()).powi(k as i32);
    Ok(pairs
        * log_falling::<T>(n, k)
        * log_factorial::<T>(k)
        * dd
        * log_factorial::<T>(d * n - 2 * k)
        / log_factorial::<T>(d * n))
}
