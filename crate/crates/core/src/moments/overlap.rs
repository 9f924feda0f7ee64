use crate::error::{Error, Result};
use crate::num_kernel::{relative_entropy, Real};

/// Coordinate system of an overlap point.
///
/// `Main`: w1 = shared-ones fraction, w2 = fraction of constraints with both
/// one-edges shared; domain 2w1−1 ≤ w2 ≤ w1.
/// `Cells`: w2 is the (1,0) cell mass; domain w2 ≤ w1, w2 ≤ 1−w1.
/// Conversion: w2_main = w1 − w2_cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parametrization {
    Main,
    Cells,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapPoint<T> {
    pub w1: T,
    pub w2: T,
    pub parametrization: Parametrization,
}

fn slack<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(16.0))
}

impl<T: Real> OverlapPoint<T> {
    pub fn main(w1: T, w2: T) -> Self {
        OverlapPoint { w1, w2, parametrization: Parametrization::Main }
    }

    pub fn cells(w1: T, w2: T) -> Self {
        OverlapPoint { w1, w2, parametrization: Parametrization::Cells }
    }

    /// The reference point w* = (2/k, 1/C(k,2)) in main coordinates.
    pub fn star(k: usize) -> Self {
        let kf = T::from_usize(k).unwrap();
        Self::main(T::lit(2.0) / kf, T::lit(2.0) / (kf * (kf - T::one())))
    }

    pub fn to_main(self) -> Self {
        match self.parametrization {
            Parametrization::Main => self,
            Parametrization::Cells => Self::main(self.w1, self.w1 - self.w2),
        }
    }

    pub fn to_cells(self) -> Self {
        match self.parametrization {
            Parametrization::Cells => self,
            Parametrization::Main => Self::cells(self.w1, self.w1 - self.w2),
        }
    }

    pub fn in_domain(&self) -> bool {
        let (w1, w2) = (self.w1, self.w2);
        let s = slack::<T>();
        let unit = |x: T| x >= -s && x <= T::one() + s;
        if !unit(w1) || !unit(w2) {
            return false;
        }
        match self.parametrization {
            Parametrization::Main => w2 >= T::lit(2.0) * w1 - T::one() - s && w2 <= w1 + s,
            Parametrization::Cells => w2 <= w1 + s && w2 <= T::one() - w1 + s,
        }
    }

    pub(crate) fn checked_main(self) -> Result<Self> {
        if !self.in_domain() {
            return Err(Error::Domain(format!(
                "overlap point ({}, {}) outside the {:?} domain",
                self.w1, self.w2, self.parametrization
            )));
        }
        Ok(self.to_main())
    }
}

fn clamp0<T: Real>(x: T) -> T {
    x.max(T::zero())
}

/// P(w) = (1 − 2w1 + w2, 2(w1 − w2), w2) for a main-coordinate point.
pub fn p_main<T: Real>(w: &OverlapPoint<T>) -> [T; 3] {
    let w = w.to_main();
    let two = T::lit(2.0);
    [clamp0(T::one() - two * w.w1 + w.w2), clamp0(two * (w.w1 - w.w2)), clamp0(w.w2)]
}

/// Q(w1) = (1 − 2a + a·w1, 2a(1 − w1), a·w1) with a = 2/k.
pub fn q_main<T: Real>(w1: T, k: usize) -> [T; 3] {
    let a = T::lit(2.0) / T::from_usize(k).unwrap();
    let two = T::lit(2.0);
    [clamp0(T::one() - two * a + a * w1), clamp0(two * a * (T::one() - w1)), clamp0(a * w1)]
}

pub fn p_star<T: Real>(k: usize) -> [T; 3] {
    let kf = T::from_usize(k).unwrap();
    let one = T::one();
    let two = T::lit(2.0);
    let denom = kf * (kf - one);
    [
        (kf - two) * (kf - T::lit(3.0)) / denom,
        T::lit(4.0) * (kf - two) / denom,
        two / denom,
    ]
}

pub fn q_star<T: Real>(k: usize) -> [T; 3] {
    q_main(T::lit(2.0) / T::from_usize(k).unwrap(), k)
}

/// 2×2 cell pmfs (00, 01, 10, 11) of the cell form.
fn cells<T: Real>(w1: T, w2_app: T) -> [T; 4] {
    [clamp0(T::one() - w1 - w2_app), clamp0(w2_app), clamp0(w2_app), clamp0(w1 - w2_app)]
}

fn q_cells<T: Real>(w1: T, k: usize) -> [T; 4] {
    let a = T::lit(2.0) / T::from_usize(k).unwrap();
    let off = a * (T::one() - w1);
    [clamp0(T::one() - T::lit(2.0) * a + a * w1), off, off, a * w1]
}

/// φ₂(w) = (d/k)·D(P‖P*) − (d−1)·D(Q‖Q*). Main points use the 3-outcome
/// pmfs; cell-form points use the 2×2 cell pmfs.
pub fn phi2<T: Real>(w: &OverlapPoint<T>, k: usize, d: T) -> Result<T> {
    if k < 3 {
        return Err(Error::Domain(format!("phi2 needs k >= 3, got {k}")));
    }
    w.checked_main()?;
    let kf = T::from_usize(k).unwrap();
    let (dp, dq) = match w.parametrization {
        Parametrization::Main => (
            relative_entropy(&p_main(w), &p_star::<T>(k)),
            relative_entropy(&q_main(w.w1, k), &q_star::<T>(k)),
        ),
        Parametrization::Cells => {
            let star = OverlapPoint::<T>::star(k).to_cells();
            (
                relative_entropy(&cells(w.w1, w.w2), &cells(star.w1, star.w2)),
                relative_entropy(&q_cells(w.w1, k), &q_cells(star.w1, k)),
            )
        }
    };
    Ok(d / kf * dp - (d - T::one()) * dq)
}

/// Symmetric 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hessian2<T> {
    pub h11: T,
    pub h12: T,
    pub h22: T,
}

impl<T: Real> Hessian2<T> {
    pub fn det(&self) -> T {
        self.h11 * self.h22 - self.h12 * self.h12
    }

    pub fn trace(&self) -> T {
        self.h11 + self.h22
    }

    pub fn is_positive_definite(&self) -> bool {
        self.trace() > T::zero() && self.det() > T::zero()
    }
}

fn check_k_for_hessian(k: usize) -> Result<()> {
    match k {
        3 => Err(Error::SingularParameter("k = 3 makes the Hessian singular (division by k-3)".into())),
        k if k < 4 => Err(Error::Domain(format!("Hessian needs k >= 4, got {k}"))),
        _ => Ok(()),
    }
}

/// Closed-form Hessian of φ₂ at w* in main coordinates.
pub fn hessian_phi2<T: Real>(k: usize, d: T) -> Result<Hessian2<T>> {
    check_k_for_hessian(k)?;
    let kf = T::from_usize(k).unwrap();
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let km1 = kf - one;
    let km2 = kf - two;
    let km3 = kf - three;
    Ok(Hessian2 {
        h11: (d * (kf * kf - kf + two) + kf * kf * km3) / (km2 * km2 * km3),
        h12: -d * km1 * km1 / (km2 * km3),
        h22: d * km1 * km1 / (two * km3),
    })
}

/// det H = d·k·(k−1)²·(k−d) / (2(k−2)²(k−3)).
pub fn hessian_det_formula<T: Real>(k: usize, d: T) -> Result<T> {
    check_k_for_hessian(k)?;
    let kf = T::from_usize(k).unwrap();
    let km1 = kf - T::one();
    let km2 = kf - T::lit(2.0);
    Ok(d * kf * km1 * km1 * (kf - d) / (T::lit(2.0) * km2 * km2 * (kf - T::lit(3.0))))
}
