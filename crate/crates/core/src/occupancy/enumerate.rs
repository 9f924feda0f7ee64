use super::ones_quota;
use crate::error::{Error, Result};
use crate::instances::Configuration;
use std::ops::ControlFlow;

/// Largest `n` the exact enumerators accept unless told otherwise.
pub const DEFAULT_CAP: usize = 32;

/// Visits every `t`-subset of `{0..n}` in revolving-door order (Knuth's
/// Algorithm R). Consecutive subsets differ by one swap, passed as
/// `(removed, added)`; the first visit gets `None`.
pub fn revolving_door<F>(n: usize, t: usize, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(&[usize], Option<(usize, usize)>) -> ControlFlow<()>,
{
    if t > n {
        return ControlFlow::Continue(());
    }
    // c[0] is padding so that indices follow the 1-based description.
    let mut c: Vec<usize> = (0..=t + 1).map(|j| j.saturating_sub(1)).collect();
    c[t + 1] = n;
    visit(&c[1..=t], None)?;
    if t == 0 || t == n {
        return ControlFlow::Continue(());
    }
    loop {
        let mut j;
        if t % 2 == 1 {
            if c[1] + 1 < c[2] {
                let old = c[1];
                c[1] += 1;
                visit(&c[1..=t], Some((old, c[1])))?;
                continue;
            }
            j = 2;
            if j > t {
                return ControlFlow::Continue(());
            }
        } else {
            if c[1] > 0 {
                let old = c[1];
                c[1] -= 1;
                visit(&c[1..=t], Some((old, c[1])))?;
                continue;
            }
            j = 2;
            if c[j] + 1 < c[j + 1] {
                let old = c[j - 1];
                c[j - 1] = c[j];
                c[j] += 1;
                visit(&c[1..=t], Some((old, c[j])))?;
                continue;
            }
            j += 1;
            if j > t {
                return ControlFlow::Continue(());
            }
        }
        // Alternate R4 (try to decrease c_j) and R5 (try to increase c_{j}).
        loop {
            if c[j] >= j {
                let old = c[j];
                c[j] = c[j - 1];
                c[j - 1] = j - 2;
                visit(&c[1..=t], Some((old, j - 2)))?;
                break;
            }
            j += 1;
            if c[j] + 1 < c[j + 1] {
                let old = c[j - 1];
                c[j - 1] = c[j];
                c[j] += 1;
                visit(&c[1..=t], Some((old, c[j])))?;
                break;
            }
            j += 1;
            if j > t {
                return ControlFlow::Continue(());
            }
        }
    }
}

/// Per-constraint one-counts maintained under single-variable flips.
struct Tallies<'a> {
    cons: Vec<u32>,
    d: usize,
    r: u32,
    tally: &'a mut [u32],
    bad: usize,
}

impl Tallies<'_> {
    #[inline]
    fn add(&mut self, i: usize, delta_up: bool) {
        for h in 0..self.d {
            let a = self.cons[i * self.d + h] as usize;
            let before = self.tally[a] == self.r;
            if delta_up {
                self.tally[a] += 1;
            } else {
                self.tally[a] -= 1;
            }
            let after = self.tally[a] == self.r;
            if before && !after {
                self.bad += 1;
            } else if after && !before {
                self.bad -= 1;
            }
        }
    }
}

/// Calls `visit` with the sorted one-positions of every solution.
pub fn for_each_solution<F>(cfg: &Configuration, cap: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let p = cfg.params();
    if p.n > cap {
        return Err(Error::Capacity { n: p.n, cap });
    }
    let Some(n1) = ones_quota(p) else {
        return Ok(());
    };
    let cons: Vec<u32> = cfg.wiring().iter().map(|&f| f / p.k as u32).collect();
    let mut tally = vec![0u32; p.m];
    let mut st = Tallies { cons, d: p.d, r: p.r as u32, tally: &mut tally, bad: p.m };
    let _ = revolving_door(p.n, n1, |set, swap| {
        match swap {
            None => {
                for &i in set {
                    st.add(i, true);
                }
            }
            Some((out, inn)) => {
                st.add(out, false);
                st.add(inn, true);
            }
        }
        if st.bad == 0 {
            visit(set)
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(())
}

/// Exact number of solutions with the enumeration cap `cap`.
pub fn count_solutions_capped(cfg: &Configuration, cap: usize) -> Result<u64> {
    let mut z = 0u64;
    for_each_solution(cfg, cap, |_| {
        z += 1;
        ControlFlow::Continue(())
    })?;
    Ok(z)
}

/// Exact number of solutions (cap [`DEFAULT_CAP`]).
pub fn count_solutions(cfg: &Configuration) -> Result<u64> {
    count_solutions_capped(cfg, DEFAULT_CAP)
}

struct Search<'a> {
    cons: &'a [u32],
    d: usize,
    r: u32,
    n: usize,
    n1: usize,
    ones: Vec<u32>,
    open: Vec<u32>,
}

impl Search<'_> {
    /// Assigns variable `i` and reports whether every touched constraint can
    /// still reach exactly r ones.
    fn set(&mut self, i: usize, one: bool) -> bool {
        let mut ok = true;
        for &a in &self.cons[i * self.d..(i + 1) * self.d] {
            let a = a as usize;
            self.open[a] -= 1;
            if one {
                self.ones[a] += 1;
            }
            ok &= self.ones[a] <= self.r && self.ones[a] + self.open[a] >= self.r;
        }
        ok
    }

    fn unset(&mut self, i: usize, one: bool) {
        for &a in &self.cons[i * self.d..(i + 1) * self.d] {
            let a = a as usize;
            self.open[a] += 1;
            if one {
                self.ones[a] -= 1;
            }
        }
    }

    fn extend(&mut self, i: usize, used: usize) -> bool {
        if i == self.n {
            return used == self.n1;
        }
        for one in [false, true] {
            let used = used + one as usize;
            if used > self.n1 || used + (self.n - i - 1) < self.n1 {
                continue;
            }
            let ok = self.set(i, one);
            let found = ok && self.extend(i + 1, used);
            self.unset(i, one);
            if found {
                return true;
            }
        }
        false
    }
}

/// Whether at least one solution exists. Uses a depth-first search that
/// prunes as soon as a constraint can no longer hit exactly r ones.
pub fn is_satisfiable(cfg: &Configuration, cap: usize) -> Result<bool> {
    let p = cfg.params();
    if p.n > cap {
        return Err(Error::Capacity { n: p.n, cap });
    }
    let Some(n1) = ones_quota(p) else {
        return Ok(false);
    };
    let cons: Vec<u32> = cfg.wiring().iter().map(|&f| f / p.k as u32).collect();
    let mut s = Search {
        cons: &cons,
        d: p.d,
        r: p.r as u32,
        n: p.n,
        n1,
        ones: vec![0; p.m],
        open: vec![p.k as u32; p.m],
    };
    Ok(s.extend(0, 0))
}
