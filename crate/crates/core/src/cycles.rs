//! Short-cycle censuses of configurations and the Poisson constants
//! λ_ℓ, δ_ℓ, μ_ℓ governing them.

use crate::error::{Error, Result};
use crate::instances::{sample_configuration, sample_simple, Configuration, Params};
use crate::num_kernel::Real;
use crate::seed::split_seed;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

/// `counts[ℓ-1]` is the number X_ℓ of 2ℓ-cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCensus {
    pub counts: Vec<u64>,
}

impl CycleCensus {
    pub fn get(&self, l: usize) -> u64 {
        self.counts[l - 1]
    }

    pub fn l_max(&self) -> usize {
        self.counts.len()
    }
}

struct Walk<'a> {
    d: usize,
    k: usize,
    l_max: usize,
    wiring: &'a [u32],
    inverse: Vec<u32>,
    var_seen: Vec<bool>,
    con_seen: Vec<bool>,
    root: usize,
    directed: Vec<u64>,
}

impl Walk<'_> {
    /// We stand in constraint `a`, entered through f-edge `entry`; `depth`
    /// constraints have been visited so far.
    fn enter_constraint(&mut self, a: usize, entry: usize, depth: usize) {
        for s in a * self.k..(a + 1) * self.k {
            if s == entry {
                continue;
            }
            let ve = self.inverse[s] as usize;
            let u = ve / self.d;
            if u == self.root {
                self.directed[depth - 1] += 1;
                continue;
            }
            if self.var_seen[u] || depth == self.l_max {
                continue;
            }
            self.var_seen[u] = true;
            for h in 0..self.d {
                let out = u * self.d + h;
                if out == ve {
                    continue;
                }
                let f = self.wiring[out] as usize;
                let b = f / self.k;
                if self.con_seen[b] {
                    continue;
                }
                self.con_seen[b] = true;
                self.enter_constraint(b, f, depth + 1);
                self.con_seen[b] = false;
            }
            self.var_seen[u] = false;
        }
    }
}

/// Counts 2ℓ-cycles for ℓ = 1..=l_max by enumerating directed rooted cycles
/// (depth-first over alternating variable/constraint walks) and dividing by 2ℓ.
pub fn count_cycles(cfg: &Configuration, l_max: usize) -> Result<CycleCensus> {
    if l_max == 0 {
        return Err(Error::Contract("l_max must be at least 1".into()));
    }
    let p = cfg.params();
    let mut w = Walk {
        d: p.d,
        k: p.k,
        l_max,
        wiring: cfg.wiring(),
        inverse: cfg.inverse(),
        var_seen: vec![false; p.n],
        con_seen: vec![false; p.m],
        root: 0,
        directed: vec![0; l_max],
    };
    for root in 0..p.n {
        w.root = root;
        w.var_seen[root] = true;
        for h in 0..p.d {
            let f = w.wiring[root * p.d + h] as usize;
            let a = f / p.k;
            w.con_seen[a] = true;
            w.enter_constraint(a, f, 1);
            w.con_seen[a] = false;
        }
        w.var_seen[root] = false;
    }
    let counts = w
        .directed
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let div = 2 * (i as u64 + 1);
            assert_eq!(c % div, 0, "directed {}-cycle count {c} not divisible by {div}", 2 * (i + 1));
            c / div
        })
        .collect();
    Ok(CycleCensus { counts })
}

/// Censuses of `samples` independent configurations; sample `i` uses seed
/// `split_seed(seed, i)`. With `simple = Some(max_attempts)` each sample is
/// drawn from the two-cycle-free ensemble instead.
pub fn census_sweep(
    params: &Params,
    samples: usize,
    l_max: usize,
    seed: u64,
    simple: Option<u32>,
) -> Result<Vec<CycleCensus>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = split_seed(seed, i as u64);
            let cfg = match simple {
                Some(max) => sample_simple(params, s, max)?,
                None => sample_configuration(params, s),
            };
            count_cycles(&cfg, l_max)
        })
        .collect()
}

/// λ_ℓ = ((k−1)(d−1))^ℓ / (2ℓ).
pub fn lambda_l<T: Real>(l: usize, k: usize, d: usize) -> T {
    let base = T::from_usize((k - 1) * (d - 1)).unwrap();
    base.powi(l as i32) / T::from_usize(2 * l).unwrap()
}

/// δ_ℓ = (−1/(k−1))^ℓ.
pub fn delta_l<T: Real>(l: usize, k: usize) -> T {
    (-T::one() / T::from_usize(k - 1).unwrap()).powi(l as i32)
}

/// μ_ℓ = λ_ℓ(1 + δ_ℓ).
pub fn mu_l<T: Real>(l: usize, k: usize, d: usize) -> T {
    lambda_l::<T>(l, k, d) * (T::one() + delta_l::<T>(l, k))
}

type Mat2<T> = [[T; 2]; 2];

fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut c = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Tr(W^ℓ) − 1 for the two-state chain with W₁₁ = 1/(k−1), W₁₀ = 2/(k−1)
/// (columns stochastic), computed by repeated squaring.
pub fn markov_trace_delta<T: Real>(l: usize, k: usize) -> T {
    let q = T::one() / T::from_usize(k - 1).unwrap();
    let two = T::lit(2.0);
    let w: Mat2<T> = [[T::one() - two * q, T::one() - q], [two * q, q]];
    let mut result: Mat2<T> = [[T::one(), T::zero()], [T::zero(), T::one()]];
    let mut base = w;
    let mut e = l;
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        base = mat_mul(&base, &base);
        e >>= 1;
    }
    result[0][0] + result[1][1] - T::one()
}

/// Per-ℓ comparison of sampled cycle counts against Poisson(λ_ℓ).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GofRow {
    pub l: usize,
    pub empirical_mean: f64,
    pub lambda: f64,
    pub z_score: f64,
    pub empirical_var: f64,
    pub chi2: f64,
    pub dof: usize,
}

fn poisson_chi2(values: &[u64], lambda: f64) -> (f64, usize) {
    let n = values.len() as f64;
    // Bin upper bounds, each bin holding expected count >= 5; the last bin is open.
    let mut uppers: Vec<u64> = Vec::new();
    let mut expected: Vec<f64> = Vec::new();
    let mut pj = (-lambda).exp();
    let mut cdf = 0.0;
    let mut acc = 0.0;
    let mut j = 0u64;
    loop {
        acc += n * pj;
        cdf += pj;
        let tail = n * (1.0 - cdf).max(0.0);
        if tail < 5.0 {
            expected.push(acc + tail);
            break;
        }
        if acc >= 5.0 {
            uppers.push(j);
            expected.push(acc);
            acc = 0.0;
        }
        j += 1;
        pj *= lambda / j as f64;
    }
    let mut observed = vec![0u64; expected.len()];
    for &v in values {
        let b = uppers.iter().position(|&u| v <= u).unwrap_or(expected.len() - 1);
        observed[b] += 1;
    }
    let chi2 = observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    (chi2, expected.len() - 1)
}

/// Mean, z-score, variance and a binned chi-square statistic per ℓ.
pub fn poisson_gof(samples: &[CycleCensus], k: usize, d: usize) -> Result<Vec<GofRow>> {
    if samples.len() < 2 {
        return Err(Error::Contract("poisson_gof needs at least two samples".into()));
    }
    let l_max = samples.iter().map(|c| c.l_max()).min().unwrap();
    let n = samples.len() as f64;
    Ok((1..=l_max)
        .map(|l| {
            let values: Vec<u64> = samples.iter().map(|c| c.get(l)).collect();
            let mean = values.iter().sum::<u64>() as f64 / n;
            let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let lambda = lambda_l::<f64>(l, k, d);
            let (chi2, dof) = poisson_chi2(&values, lambda);
            GofRow {
                l,
                empirical_mean: mean,
                lambda,
                z_score: (mean - lambda) / (lambda / n).sqrt(),
                empirical_var: var,
                chi2,
                dof,
            }
        })
        .collect())
}

/// Sample Pearson correlation of X_{l1} and X_{l2}.
pub fn census_correlation(samples: &[CycleCensus], l1: usize, l2: usize) -> f64 {
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|c| c.get(l1) as f64).collect();
    let ys: Vec<f64> = samples.iter().map(|c| c.get(l2) as f64).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Writes rows under the header `l,empirical_mean,lambda,z_score,empirical_var,chi2,dof`.
pub fn write_gof_csv<W: Write>(rows: &[GofRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::count_two_cycles;

    #[test]
    fn identity_two_cycles() {
        let c = Configuration::identity(Params::new(4, 2, 4, 2).unwrap());
        assert_eq!(count_cycles(&c, 1).unwrap().counts, vec![4]);
    }

    #[test]
    fn single_ring() {
        let params = Params::new(8, 2, 2, 1).unwrap();
        let mut wiring = vec![0u32; 16];
        for i in 0..8u32 {
            wiring[(2 * i + 1) as usize] = 2 * i;
            wiring[(2 * i) as usize] = 2 * ((i + 7) % 8) + 1;
        }
        let c = Configuration::new(params, wiring).unwrap();
        let census = count_cycles(&c, 8).unwrap();
        assert_eq!(census.counts, vec![0, 0, 0, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn agrees_with_two_cycle_scan() {
        for (n, d, k) in [(40, 3, 4), (30, 2, 4), (25, 4, 5), (12, 3, 3)] {
            let params = Params::new(n, d, k, 1).unwrap();
            for s in 0..40 {
                let c = sample_configuration(&params, s);
                assert_eq!(count_cycles(&c, 1).unwrap().get(1), count_two_cycles(&c));
            }
        }
    }

    fn brute_four_cycles(c: &Configuration) -> u64 {
        // Two distinct variables u < v and two distinct constraints a, b joined
        // by four distinct edges u-a, a-v, v-b, b-u; counted as unordered cycles.
        let p = c.params();
        let mut count = 0;
        let cons = |ve: usize| c.wiring()[ve] as usize / p.k;
        for u in 0..p.n {
            for v in u + 1..p.n {
                for eu1 in 0..p.d {
                    for eu2 in 0..p.d {
                        if eu1 == eu2 {
                            continue;
                        }
                        for ev1 in 0..p.d {
                            for ev2 in 0..p.d {
                                if ev1 == ev2 {
                                    continue;
                                }
                                let a = cons(u * p.d + eu1);
                                let b = cons(u * p.d + eu2);
                                if a != b && cons(v * p.d + ev1) == a && cons(v * p.d + ev2) == b {
                                    count += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        // Each cycle is seen twice (the roles of a and b swap with the edge pairs).
        count / 2
    }

    #[test]
    fn four_cycles_brute_force() {
        let params = Params::new(12, 3, 4, 2).unwrap();
        for s in 0..60 {
            let c = sample_configuration(&params, s);
            assert_eq!(count_cycles(&c, 2).unwrap().get(2), brute_four_cycles(&c), "seed {s}");
        }
    }

    #[test]
    fn relabeling_invariance() {
        let params = Params::new(32, 3, 4, 2).unwrap();
        for s in 0..20 {
            let c = sample_configuration(&params, s);
            let base = count_cycles(&c, 4).unwrap();
            let m = params.m as u32;
            let relabeled: Vec<u32> = c.wiring().iter().map(|&f| (m - 1 - f / 4) * 4 + (3 - f % 4)).collect();
            assert_eq!(count_cycles(&Configuration::new(params, relabeled).unwrap(), 4).unwrap(), base);
            let mut w = c.wiring().to_vec();
            w[3..6].reverse();
            assert_eq!(count_cycles(&Configuration::new(params, w).unwrap(), 4).unwrap(), base);
        }
    }

    #[test]
    fn constants() {
        assert_eq!(lambda_l::<f64>(1, 4, 3), 3.0);
        assert_eq!(lambda_l::<f64>(2, 4, 3), 9.0);
        assert_eq!(lambda_l::<f64>(1, 4, 2), 1.5);
        assert!((delta_l::<f64>(1, 4) + 1.0 / 3.0).abs() < 1e-16);
        assert!((delta_l::<f64>(2, 4) - 1.0 / 9.0).abs() < 1e-16);
        assert!((mu_l::<f64>(1, 4, 3) - 2.0).abs() < 1e-14);
        assert!((mu_l::<f64>(1, 4, 2) - 1.0).abs() < 1e-14);
        assert!((mu_l::<f64>(2, 4, 3) - 10.0).abs() < 1e-13);
        for k in 4..=12 {
            for l in 1..=10 {
                assert!(delta_l::<f64>(l, k) > -1.0);
            }
        }
    }

    #[test]
    fn trace_identity() {
        assert!((markov_trace_delta::<f64>(1, 4) + 1.0 / 3.0).abs() < 1e-15);
        assert!((markov_trace_delta::<f64>(3, 4) + 1.0 / 27.0).abs() < 1e-15);
        for k in 4..=12 {
            for l in 1..=10 {
                let diff = markov_trace_delta::<f64>(l, k) - delta_l::<f64>(l, k);
                assert!(diff.abs() < 1e-12, "k={k} l={l} diff={diff}");
            }
        }
    }

    #[test]
    fn gof_on_exact_poisson_sample() {
        // Counts drawn to match Poisson(1.5) frequencies closely give a small chi2.
        let pmf = |j: u64| (-1.5f64).exp() * 1.5f64.powi(j as i32) / (1..=j).product::<u64>() as f64;
        let mut samples = Vec::new();
        for j in 0..10u64 {
            let reps = (pmf(j) * 10_000.0).round() as usize;
            samples.extend(std::iter::repeat_n(CycleCensus { counts: vec![j] }, reps));
        }
        let rows = poisson_gof(&samples, 4, 2).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].z_score.abs() < 0.5);
        assert!(rows[0].chi2 < 1.0);
        assert!(rows[0].dof >= 4);
        assert!(poisson_gof(&samples[..1], 4, 2).is_err());
    }

    #[test]
    fn sweep_deterministic_across_threads() {
        let params = Params::new(60, 3, 4, 2).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| census_sweep(&params, 50, 3, 5, None).unwrap())
        };
        assert_eq!(run(1), run(3));
        let simple = census_sweep(&params, 10, 2, 5, Some(10_000)).unwrap();
        assert!(simple.iter().all(|c| c.get(1) == 0));
    }
}
