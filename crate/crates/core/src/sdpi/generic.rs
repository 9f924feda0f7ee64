use super::improves;
use crate::error::{Error, Result};
use crate::num_kernel::{relative_entropy, Channel, Pmf, Real};
use rayon::prelude::*;

/// Supremum estimate and the input pmf attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct Contraction<T> {
    pub d_star: T,
    pub argmax: Pmf<T>,
}

const EXCLUSION_TV: f64 = 1e-9;
const MAX_MOVES: usize = 200_000;

struct Scorer<'a, T> {
    p_star: &'a [T],
    q_star: Vec<T>,
    w: &'a Channel<T>,
}

impl<T: Real> Scorer<'_, T> {
    fn score(&self, p: &[T]) -> Option<T> {
        // Refinement moves round; rescale so rounding drift in Σp does not
        // show up as a spurious divergence of Q from Q*.
        let total = p.iter().fold(T::zero(), |a, &x| a + x);
        let p: Vec<T> = p.iter().map(|&x| x / total).collect();
        let p = &p[..];
        let tv = p
            .iter()
            .zip(self.p_star)
            .fold(T::zero(), |a, (&x, &y)| a + (x - y).abs())
            * T::lit(0.5);
        if tv <= T::lit(EXCLUSION_TV) {
            return None;
        }
        let den = relative_entropy(p, self.p_star);
        let num = relative_entropy(&self.w.apply(p), &self.q_star);
        if den.is_infinite() {
            return num.is_finite().then(T::zero);
        }
        (den > T::zero()).then(|| num / den)
    }
}

/// Calls `visit` on every composition of `total` into `parts.len()` parts with
/// the given prefix, in lexicographic order.
fn compositions<F: FnMut(&[usize])>(parts: &mut Vec<usize>, fixed: usize, total: usize, visit: &mut F) {
    let len = parts.len();
    if fixed == len - 1 {
        parts[fixed] = total;
        visit(parts);
        return;
    }
    for a in 0..=total {
        parts[fixed] = a;
        compositions(parts, fixed + 1, total - a, visit);
    }
}

/// d_*(P*, W) = sup over P ≠ P* of D(WP‖WP*)/D(P‖P*), by a full composition
/// grid of depth `grid_depth` and coordinate-wise refinement down to `refine_tol`.
pub fn contraction_generic<T: Real>(
    p_star: &Pmf<T>,
    w: &Channel<T>,
    grid_depth: usize,
    refine_tol: T,
) -> Result<Contraction<T>> {
    let m = p_star.len();
    if w.n_in() != m {
        return Err(Error::Contract(format!(
            "channel has {} inputs but the reference pmf has {m} outcomes",
            w.n_in()
        )));
    }
    if grid_depth < 2 {
        return Err(Error::Contract(format!("grid depth must be at least 2, got {grid_depth}")));
    }
    if !(refine_tol > T::zero()) {
        return Err(Error::Contract("refine_tol must be positive".into()));
    }
    let scorer = Scorer { p_star: p_star.weights(), q_star: w.apply(p_star.weights()), w };
    let depth = T::from_usize(grid_depth).unwrap();
    let to_pmf = |c: &[usize]| -> Vec<T> { c.iter().map(|&a| T::from_usize(a).unwrap() / depth).collect() };

    // One stripe per value of the first coordinate; stripes merge in order.
    let stripes: Vec<Option<(T, Vec<usize>)>> = (0..=grid_depth)
        .into_par_iter()
        .map(|a0| {
            let mut best: Option<(T, Vec<usize>)> = None;
            if m == 1 {
                return best;
            }
            let mut parts = vec![0usize; m];
            parts[0] = a0;
            compositions(&mut parts, 1, grid_depth - a0, &mut |c| {
                if let Some(v) = scorer.score(&to_pmf(c)) {
                    if best.as_ref().is_none_or(|(b, _)| improves(v, *b)) {
                        best = Some((v, c.to_vec()));
                    }
                }
            });
            best
        })
        .collect();
    let mut best: Option<(T, Vec<usize>)> = None;
    for s in stripes.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| improves(s.0, *b)) {
            best = Some(s);
        }
    }
    let Some((mut best_v, grid_point)) = best else {
        // Single outcome or every grid point excluded: nothing to contract.
        return Ok(Contraction { d_star: T::zero(), argmax: p_star.clone() });
    };
    let mut x = to_pmf(&grid_point);

    let mut step = T::one() / depth;
    let mut moves = 0;
    while step >= refine_tol && moves < MAX_MOVES {
        let mut moved = false;
        'search: for i in 0..m {
            for j in 0..m {
                if i == j || x[j] < step {
                    continue;
                }
                let mut cand = x.clone();
                cand[i] = cand[i] + step;
                cand[j] = (cand[j] - step).max(T::zero());
                if let Some(v) = scorer.score(&cand) {
                    if improves(v, best_v) {
                        best_v = v;
                        x = cand;
                        moved = true;
                        break 'search;
                    }
                }
            }
        }
        moves += 1;
        if !moved {
            step = step / T::lit(2.0);
        }
    }
    Ok(Contraction { d_star: best_v, argmax: Pmf::new(x)? })
}
