use super::improves;
use crate::error::{Error, Result};
use crate::moments::{p_main, p_star, q_main, q_star, OverlapPoint};
use crate::num_kernel::{binary_entropy, relative_entropy, Channel, Pmf, Real};
use rayon::prelude::*;
use serde::Serialize;

/// The 3×3 channel mapping the constraint-type pmf P(w) to Q(w), with its
/// reference input P* and output Q*.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupationChannel<T> {
    pub k: usize,
    pub w: Channel<T>,
    pub p_star: Pmf<T>,
    pub q_star: Pmf<T>,
}

impl<T: Real> OccupationChannel<T> {
    pub fn new(k: usize) -> Result<Self> {
        if k < 4 {
            return Err(Error::Domain(format!("occupation channel needs k >= 4, got {k}")));
        }
        let a = T::lit(2.0) / T::from_usize(k).unwrap();
        let one = T::one();
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let w = Channel::from_column_major(
            3,
            3,
            vec![
                one - two * a, two * a, T::zero(),
                one - T::lit(1.5) * a, a, half * a,
                one - a, T::zero(), a,
            ],
        )?;
        let p_star = Pmf::new(p_star::<T>(k).to_vec())?;
        let q_star = w.apply_pmf(&p_star);
        Ok(OccupationChannel { k, w, p_star, q_star })
    }

    pub fn q(&self, w: &OverlapPoint<T>) -> Vec<T> {
        self.w.apply(&p_main(w))
    }
}

fn ratio_unchecked<T: Real>(w: &OverlapPoint<T>, k: usize) -> Option<T> {
    let den = relative_entropy(&p_main(w), &p_star::<T>(k));
    if !(den > T::zero()) {
        return None;
    }
    let num = relative_entropy(&q_main(w.to_main().w1, k), &q_star::<T>(k));
    Some(num / den)
}

/// R(w) = D(Q(w)‖Q*)/D(P(w)‖P*).
pub fn ratio_r<T: Real>(w: &OverlapPoint<T>, k: usize) -> Result<T> {
    if k < 4 {
        return Err(Error::Domain(format!("ratio needs k >= 4, got {k}")));
    }
    let main = w.checked_main()?;
    let star = OverlapPoint::<T>::star(k);
    if main.w1 == star.w1 && main.w2 == star.w2 {
        return Err(Error::UndefinedRatio);
    }
    ratio_unchecked(&main, k).ok_or(Error::UndefinedRatio)
}

/// R along w* + t·dir for each t (records the approach to w*).
pub fn ratio_along_ray<T: Real>(k: usize, dir: (T, T), ts: &[T]) -> Result<Vec<T>> {
    let star = OverlapPoint::<T>::star(k);
    ts.iter()
        .map(|&t| ratio_r(&OverlapPoint::main(star.w1 + t * dir.0, star.w2 + t * dir.1), k))
        .collect()
}

/// Measured supremum of R over the overlap domain against the conjectured
/// value H(2/k)/ln C(k,2) attained at w = (1,1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OccupationSup<T> {
    pub k: usize,
    pub sup: T,
    pub argmax_w1: T,
    pub argmax_w2: T,
    pub conjectured: T,
    pub gap: T,
}

impl<T: Real> OccupationSup<T> {
    pub fn argmax(&self) -> OverlapPoint<T> {
        OverlapPoint::main(self.argmax_w1, self.argmax_w2)
    }
}

const EXCLUSION: f64 = 1e-9;

fn score<T: Real>(w: &OverlapPoint<T>, k: usize) -> Option<T> {
    let star = OverlapPoint::<T>::star(k);
    if !w.in_domain() {
        return None;
    }
    let pw = p_main(w);
    let ps = p_star::<T>(k);
    let tv = (0..3).fold(T::zero(), |a, i| a + (pw[i] - ps[i]).abs()) * T::lit(0.5);
    if tv <= T::lit(EXCLUSION) || (w.w1 == star.w1 && w.w2 == star.w2) {
        return None;
    }
    ratio_unchecked(w, k)
}

/// Grid over all pmfs (p0, p1, p2) with denominators `grid`, in lexicographic
/// order of (p0, p1, p2), then coordinate search in (w1, w2) down to `refine_tol`.
/// Near-equal scores keep the earlier point, so w = (1,1), which is p = (0,0,1),
/// wins exact ties.
pub fn contraction_occupation<T: Real>(k: usize, grid: usize, refine_tol: T) -> Result<OccupationSup<T>> {
    if k < 4 {
        return Err(Error::Domain(format!("occupation supremum needs k >= 4, got {k}")));
    }
    if grid < 2 || !(refine_tol > T::zero()) {
        return Err(Error::Contract("need grid >= 2 and refine_tol > 0".into()));
    }
    let g = T::from_usize(grid).unwrap();
    let point = |a1: usize, a2: usize| {
        let p1 = T::from_usize(a1).unwrap() / g;
        let p2 = T::from_usize(a2).unwrap() / g;
        OverlapPoint::main(p2 + p1 / T::lit(2.0), p2)
    };
    let stripes: Vec<Option<(T, usize, usize)>> = (0..=grid)
        .into_par_iter()
        .map(|a0| {
            let mut best: Option<(T, usize, usize)> = None;
            for a1 in 0..=grid - a0 {
                let a2 = grid - a0 - a1;
                if let Some(v) = score(&point(a1, a2), k) {
                    if best.is_none_or(|(b, _, _)| improves(v, b)) {
                        best = Some((v, a1, a2));
                    }
                }
            }
            best
        })
        .collect();
    let mut best: Option<(T, usize, usize)> = None;
    for s in stripes.into_iter().flatten() {
        if best.is_none_or(|(b, _, _)| improves(s.0, b)) {
            best = Some(s);
        }
    }
    let (mut best_v, a1, a2) = best.expect("grid has points away from w*");
    let mut x = point(a1, a2);

    let mut step = T::one() / g;
    let mut moves = 0;
    while step >= refine_tol && moves < 100_000 {
        let mut moved = false;
        for (d1, d2) in [(step, T::zero()), (-step, T::zero()), (T::zero(), step), (T::zero(), -step)] {
            let cand = OverlapPoint::main(x.w1 + d1, x.w2 + d2);
            if let Some(v) = score(&cand, k) {
                if improves(v, best_v) {
                    best_v = v;
                    x = cand;
                    moved = true;
                    break;
                }
            }
        }
        moves += 1;
        if !moved {
            step = step / T::lit(2.0);
        }
    }

    let kf = T::from_usize(k).unwrap();
    let conjectured = binary_entropy(T::lit(2.0) / kf)? / (kf * (kf - T::one()) / T::lit(2.0)).ln();
    Ok(OccupationSup { k, sup: best_v, argmax_w1: x.w1, argmax_w2: x.w2, conjectured, gap: best_v - conjectured })
}
