//! Curves of the k = 4 occupation ratio in the cell coordinates, where
//! w1 is the shared-one fraction and w2 the mass of each off-diagonal cell.
//! The reference cells are (1/6, 1/3, 1/3, 1/6).

use super::improves;
use crate::error::{Error, Result};
use crate::num_kernel::{find_root, relative_entropy, Real};
use serde::Serialize;

fn check_unit<T: Real>(w1: T, what: &str) -> Result<()> {
    if w1 >= T::zero() && w1 <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} needs w1 in [0, 1], got {w1}")))
    }
}

fn star_cells<T: Real>() -> [T; 4] {
    let sixth = T::one() / T::lit(6.0);
    let third = T::one() / T::lit(3.0);
    [sixth, third, third, sixth]
}

/// D1(w1, w2) = KL of the 2×2 cells (1−w1−w2, w2, w2, w1−w2) to the reference.
pub fn d1<T: Real>(w1: T, w2: T) -> Result<T> {
    check_unit(w1, "d1")?;
    if !(w2 >= T::zero() && w2 <= w1.min(T::one() - w1)) {
        return Err(Error::Domain(format!("d1 needs 0 <= w2 <= min(w1, 1-w1), got ({w1}, {w2})")));
    }
    let cells = [T::one() - w1 - w2, w2, w2, w1 - w2];
    Ok(relative_entropy(&cells, &star_cells::<T>()))
}

fn d2_raw<T: Real>(w1: T) -> T {
    let x = T::lit(2.0) * w1 - T::one();
    if x.abs() < T::lit(0.1) {
        let x2 = x * x;
        let mut term = x2;
        let mut sum = T::zero();
        for j in 1..=20 {
            let j2 = T::from_usize(2 * j).unwrap();
            sum = sum + term / (j2 * (j2 - T::one()));
            term = term * x2;
        }
        return sum;
    }
    let half = T::lit(0.5);
    let side = |y: T| if y == -T::one() { T::zero() } else { (T::one() + y) * y.ln_1p() };
    half * (side(x) + side(-x))
}

/// D2(w1) = w1·ln(2w1) + (1−w1)·ln(2(1−w1)).
pub fn d2<T: Real>(w1: T) -> Result<T> {
    check_unit(w1, "d2")?;
    Ok(d2_raw(w1))
}

fn w2_min_raw<T: Real>(w1: T) -> T {
    let u = w1 - T::lit(0.5);
    let disc = T::lit(12.0) * u * u + T::one();
    (T::lit(2.0) - disc.sqrt()) / T::lit(3.0)
}

/// Minimizer of D1 in w2 at fixed w1: (2 − √D)/3 with D = 12(w1 − ½)² + 1.
pub fn w2_min<T: Real>(w1: T) -> Result<T> {
    check_unit(w1, "w2_min")?;
    Ok(w2_min_raw(w1))
}

fn d_min_raw<T: Real>(w1: T) -> T {
    let u = w1 - T::lit(0.5);
    let disc = T::lit(12.0) * u * u + T::one();
    // 6·p11 − 1 and 6·p00 − 1 without the cancellation in 2 − √D.
    let e = T::lit(24.0) * u * u / (disc.sqrt() + T::one());
    let six_u = T::lit(6.0) * u;
    let term = |wt: T, y: T| if wt == T::zero() { T::zero() } else { wt * y.ln_1p() };
    term(w1, six_u + e) + term(T::one() - w1, e - six_u)
}

/// D1 along w2 = w2_min(w1): w1·ln(6p11) + (1−w1)·ln(6p00).
pub fn d_min<T: Real>(w1: T) -> Result<T> {
    check_unit(w1, "d_min")?;
    Ok(d_min_raw(w1))
}

fn r_max_raw<T: Real>(w1: T) -> T {
    if w1 == T::lit(0.5) {
        return T::one() / T::lit(3.0);
    }
    d2_raw(w1) / d_min_raw(w1)
}

/// D2/D_min, with the limit 1/3 at w1 = ½.
pub fn r_max<T: Real>(w1: T) -> Result<T> {
    check_unit(w1, "r_max")?;
    Ok(r_max_raw(w1))
}

fn d_plus_raw<T: Real>(w1: T) -> T {
    let u = T::lit(0.5) - w1;
    T::lit(6.0) * u * u
}

/// Quadratic lower bound 6(½ − w1)² for D_min.
pub fn d_plus<T: Real>(w1: T) -> Result<T> {
    check_unit(w1, "d_plus")?;
    Ok(d_plus_raw(w1))
}

fn d_minus_raw<T: Real>(w1: T) -> T {
    let two_w = T::lit(2.0) * w1;
    let left = if w1 == T::zero() { T::zero() } else { two_w * (T::lit(12.0) * w1 / T::lit(5.0)).ln() };
    left + (T::one() - two_w) * (T::lit(6.0) - T::lit(12.0) * w1).ln()
}

/// Lower bound for D_min near the boundary, 2w1·ln(12w1/5) + (1−2w1)·ln(6−12w1)
/// on [0, 5/12].
pub fn d_minus<T: Real>(w1: T) -> Result<T> {
    if !(w1 >= T::zero() && w1 <= T::lit(5.0) / T::lit(12.0)) {
        return Err(Error::Domain(format!("d_minus needs w1 in [0, 5/12], got {w1}")));
    }
    Ok(d_minus_raw(w1))
}

fn r_plus_raw<T: Real>(w1: T) -> T {
    if w1 == T::lit(0.5) {
        return T::one() / T::lit(3.0);
    }
    d2_raw(w1) / d_plus_raw(w1)
}

/// D2/D_plus, with the limit 1/3 at w1 = ½.
pub fn r_plus<T: Real>(w1: T) -> Result<T> {
    check_unit(w1, "r_plus")?;
    Ok(r_plus_raw(w1))
}

/// Worst-case slack of each check on its grid. Nonnegative means it passed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct K4Margins<T> {
    /// min of d_min − d_plus on [0, 1]
    pub dmin_over_dplus: T,
    /// min of d_min − d_minus on [0, w_bar]
    pub dmin_over_dminus: T,
    /// max of R+(w) − R+(w') over consecutive grid points w < w' on [w_bar, ½]
    pub rplus_max_rise: T,
    pub f_first: T,
    pub f_at_w_bar: T,
    pub f_at_end: T,
    pub f_sign_changes: usize,
    /// d_* + 1e−6 − max r_max
    pub ratio_slack: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct K4Certificate<T> {
    pub w_bar: T,
    pub w_0: T,
    pub d_plus_at_w_bar: T,
    pub r_plus_at_w_bar: T,
    pub grid_resolution: usize,
    pub root_tol: T,
    pub max_ratio_found: T,
    pub argmax_w1: T,
    pub conjectured_d_star: T,
    pub margins: K4Margins<T>,
}

const EQUALITY_SLACK: f64 = 1e-13;
const RATIO_SLACK: f64 = 1e-6;

fn fail<T: Real>(check: &str, witness: T, detail: String) -> Error {
    Error::CertificateFailure { check: check.into(), witness: witness.as_f64(), detail }
}

fn grid<T: Real>(lo: T, hi: T, n: usize) -> impl Iterator<Item = T> {
    let nf = T::from_usize(n).unwrap();
    (0..=n).map(move |i| if i == n { hi } else { lo + (hi - lo) * T::from_usize(i).unwrap() / nf })
}

/// Grid certificate that the k = 4 ratio never exceeds ln2/ln6. Each of the
/// five checks is run on `grid_points` intervals of its range; the first
/// failing check is returned as an error with its witness.
pub fn verify_k4<T: Real>(grid_points: usize, root_tol: T) -> Result<K4Certificate<T>> {
    if grid_points < 10_000 {
        return Err(Error::Contract(format!("verify_k4 needs at least 10^4 grid points, got {grid_points}")));
    }
    if !(root_tol > T::zero()) {
        return Err(Error::Contract("root_tol must be positive".into()));
    }
    let n = grid_points;
    let d_star = T::LN_2() / T::lit(6.0).ln();
    let slack = T::lit(EQUALITY_SLACK);
    let half = T::lit(0.5);
    let end = T::lit(5.0) / T::lit(12.0);

    // (i)
    let mut m1 = T::infinity();
    for w in grid(T::zero(), T::one(), n) {
        let gap = d_min_raw(w) - d_plus_raw(w);
        m1 = m1.min(gap);
        if gap < -slack {
            return Err(fail("dmin >= dplus", w, format!("d_min - d_plus = {gap}")));
        }
    }

    let w_bar = find_root(|w| d_plus_raw(w) - d_minus_raw(w), T::lit(0.05), T::lit(0.2), root_tol)?;

    // (ii)
    let mut m2 = T::infinity();
    for w in grid(T::zero(), w_bar, n) {
        let gap = d_min_raw(w) - d_minus_raw(w);
        m2 = m2.min(gap);
        if gap < -slack {
            return Err(fail("dmin >= dminus", w, format!("d_min - d_minus = {gap}")));
        }
    }

    // (iii)
    let r_bar = r_plus_raw(w_bar);
    if !(r_bar < d_star) {
        return Err(fail("rplus decreasing", w_bar, format!("R+(w_bar) = {r_bar} >= {d_star}")));
    }
    let mut rise = T::neg_infinity();
    let mut prev = r_bar;
    for w in grid(w_bar, half, n).skip(1) {
        let r = r_plus_raw(w);
        let step = r - prev;
        rise = rise.max(step);
        if step > T::lit(4.0) * T::epsilon() * prev {
            return Err(fail("rplus decreasing", w, format!("R+ rises by {step}")));
        }
        prev = r;
    }

    // (iv)
    let f = |w: T| d2_raw(w) - d_star * d_minus_raw(w);
    let pts: Vec<T> = grid(T::zero(), end, n).skip(1).collect();
    let vals: Vec<T> = pts.iter().map(|&w| f(w)).collect();
    let f_first = vals[0];
    let f_at_end = *vals.last().unwrap();
    let f_at_w_bar = f(w_bar);
    if !(f_first < T::zero()) {
        return Err(fail("f roots", pts[0], format!("f = {f_first} is not negative next to 0")));
    }
    let changes: Vec<usize> = (1..vals.len()).filter(|&i| (vals[i - 1] < T::zero()) != (vals[i] < T::zero())).collect();
    if changes.len() != 1 {
        let at = changes.get(1).map_or(end, |&i| pts[i]);
        return Err(fail("f roots", at, format!("{} sign changes on (0, 5/12]", changes.len())));
    }
    if !(f_at_w_bar < T::zero() && f_at_end > T::zero()) {
        return Err(fail("f roots", w_bar, format!("f(w_bar) = {f_at_w_bar}, f(5/12) = {f_at_end}")));
    }
    let c = changes[0];
    let w_0 = find_root(f, pts[c - 1], pts[c], root_tol)?;
    if !(w_0 > w_bar) {
        return Err(fail("f roots", w_0, format!("second root {w_0} is not above w_bar = {w_bar}")));
    }

    // (v)
    let mut best = (r_max_raw(T::zero()), T::zero());
    for w in grid(T::zero(), T::one(), n).skip(1) {
        let r = r_max_raw(w);
        if improves(r, best.0) {
            best = (r, w);
        }
    }
    let ratio_slack = d_star + T::lit(RATIO_SLACK) - best.0;
    if ratio_slack < T::zero() {
        return Err(fail("rmax bound", best.1, format!("r_max = {} exceeds {d_star}", best.0)));
    }

    Ok(K4Certificate {
        w_bar,
        w_0,
        d_plus_at_w_bar: d_plus_raw(w_bar),
        r_plus_at_w_bar: r_bar,
        grid_resolution: n,
        root_tol,
        max_ratio_found: best.0,
        argmax_w1: best.1,
        conjectured_d_star: d_star,
        margins: K4Margins {
            dmin_over_dplus: m1,
            dmin_over_dminus: m2,
            rplus_max_rise: rise,
            f_first,
            f_at_w_bar,
            f_at_end,
            f_sign_changes: changes.len(),
            ratio_slack,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{p_main, p_star, q_main, q_star, OverlapPoint};

    #[test]
    fn closed_form_values() {
        assert!((w2_min(0.5f64).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((d_minus(0.0f64).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert!((d2(0.0f64).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((r_max(0.5f64).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((r_max(0.0f64).unwrap() - 2f64.ln() / 6f64.ln()).abs() < 1e-15);
        assert!(d_minus(0.5f64).is_err());
        assert!(d2(1.5f64).is_err());
        assert!(d1(0.2f64, 0.3).is_err());
    }

    #[test]
    fn curves_match_direct_forms() {
        for i in 0..=1000 {
            let w = i as f64 / 1000.0;
            let direct_d2 = {
                let t = |a: f64| if a == 0.0 { 0.0 } else { a * (2.0 * a).ln() };
                t(w) + t(1.0 - w)
            };
            assert!((d2(w).unwrap() - direct_d2).abs() < 1e-14);
            let w2 = w2_min(w).unwrap();
            let (p11, p00) = (w - w2, 1.0 - w - w2);
            let t = |wt: f64, p: f64| if wt == 0.0 { 0.0 } else { wt * (6.0 * p).ln() };
            let direct_dmin = t(w, p11) + t(1.0 - w, p00);
            assert!((d_min(w).unwrap() - direct_dmin).abs() < 1e-12, "{w}");
            assert!((d_min(w).unwrap() - d1(w, w2).unwrap()).abs() < 1e-12, "{w}");
        }
    }

    #[test]
    fn w2_min_is_stationary() {
        for i in 0..100 {
            let w1 = 0.05 + 0.9 * i as f64 / 99.0;
            let w2 = w2_min(w1).unwrap();
            // Step scaled to the smallest cell so the truncation error stays small.
            let h = 1e-4 * (w1 - w2).min(w2).min(1.0 - w1 - w2);
            let slope = (d1(w1, w2 + h).unwrap() - d1(w1, w2 - h).unwrap()) / (2.0 * h);
            assert!(slope.abs() < 1e-8, "{w1}: {slope}");
        }
    }

    #[test]
    fn cell_form_matches_main_ratio() {
        // R in the cell coordinates agrees with the 3-outcome ratio.
        for i in 1..20 {
            let w1 = i as f64 / 20.0;
            let w2 = w2_min(w1).unwrap();
            let p = p_main(&OverlapPoint::cells(w1, w2).to_main());
            let den = relative_entropy(&p, &p_star::<f64>(4));
            let num = relative_entropy(&q_main(w1, 4), &q_star::<f64>(4));
            assert!((den - d1(w1, w2).unwrap()).abs() < 1e-12);
            assert!((num - d2(w1).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn certificate() {
        let c = verify_k4(100_000, 1e-13f64).unwrap();
        assert!(c.w_bar > 0.108 && c.w_bar < 0.1087, "{}", c.w_bar);
        assert!((c.w_bar - 0.10831).abs() < 1e-5);
        assert!((c.d_plus_at_w_bar - 0.92052).abs() < 1e-5);
        assert!((d_minus(c.w_bar).unwrap() - c.d_plus_at_w_bar).abs() < 1e-10);
        assert!((c.r_plus_at_w_bar - 0.380).abs() < 1e-3);
        assert!(c.w_0 > c.w_bar && c.w_0 < 5.0 / 12.0);
        assert!((c.max_ratio_found - 2f64.ln() / 6f64.ln()).abs() < 1e-12, "{c:?}");
        assert_eq!(c.argmax_w1, 0.0);
        assert_eq!(c.margins.f_sign_changes, 1);
        assert!(verify_k4(999, 1e-12f64).is_err());
    }
}
