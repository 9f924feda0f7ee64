use super::Real;
use crate::error::{Error, Result};

/// Probability mass function on outcomes 0..len.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf<T> {
    weights: Vec<T>,
}

impl<T: Real> Pmf<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Contract("pmf needs at least one outcome".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= T::zero()) || !w.is_finite()) {
            return Err(Error::Domain(format!("pmf weight {w} is not a finite nonnegative number")));
        }
        let s = weights.iter().fold(T::zero(), |a, &b| a + b);
        if (s - T::one()).abs() > T::unit_sum_tol() {
            return Err(Error::Domain(format!("pmf weights sum to {s}")));
        }
        Ok(Pmf { weights })
    }

    pub fn uniform(m: usize) -> Self {
        let w = T::one() / T::from_usize(m).unwrap();
        Pmf { weights: vec![w; m] }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Total-variation distance.
    pub fn tv_distance(&self, other: &Pmf<T>) -> T {
        let s = self
            .weights
            .iter()
            .zip(&other.weights)
            .fold(T::zero(), |a, (&x, &y)| a + (x - y).abs());
        s * T::lit(0.5)
    }
}

/// Column-stochastic matrix; entry (y, x) is the probability of output y given input x.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T> {
    n_out: usize,
    n_in: usize,
    data: Vec<T>,
}

impl<T: Real> Channel<T> {
    /// Builds a channel from its entries in column-major order.
    pub fn from_column_major(n_out: usize, n_in: usize, data: Vec<T>) -> Result<Self> {
        if n_out == 0 || n_in == 0 || data.len() != n_out * n_in {
            return Err(Error::Contract(format!(
                "channel of shape {n_out}x{n_in} needs {} entries, got {}",
                n_out * n_in,
                data.len()
            )));
        }
        for x in 0..n_in {
            let col = &data[x * n_out..(x + 1) * n_out];
            if let Some(v) = col.iter().find(|v| !(**v >= T::zero()) || !v.is_finite()) {
                return Err(Error::Domain(format!("column {x} has invalid entry {v}")));
            }
            let s = col.iter().fold(T::zero(), |a, &b| a + b);
            if (s - T::one()).abs() > T::unit_sum_tol() {
                return Err(Error::Domain(format!("column {x} sums to {s}")));
            }
        }
        Ok(Channel { n_out, n_in, data })
    }

    /// Builds a channel from rows, `rows[y][x] = W(y|x)`.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n_out = rows.len();
        let n_in = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_in) {
            return Err(Error::Contract("ragged channel rows".into()));
        }
        let mut data = Vec::with_capacity(n_out * n_in);
        for x in 0..n_in {
            for row in rows {
                data.push(row[x]);
            }
        }
        Self::from_column_major(n_out, n_in, data)
    }

    pub fn identity(m: usize) -> Self {
        let mut data = vec![T::zero(); m * m];
        for i in 0..m {
            data[i * m + i] = T::one();
        }
        Channel { n_out: m, n_in: m, data }
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn get(&self, y: usize, x: usize) -> T {
        self.data[x * self.n_out + y]
    }

    pub fn column_major(&self) -> &[T] {
        &self.data
    }

    /// Output distribution for the input weights `p` (length `n_in`).
    pub fn apply(&self, p: &[T]) -> Vec<T> {
        assert_eq!(p.len(), self.n_in, "input length mismatch");
        let mut q = vec![T::zero(); self.n_out];
        for (x, &px) in p.iter().enumerate() {
            if px == T::zero() {
                continue;
            }
            let col = &self.data[x * self.n_out..(x + 1) * self.n_out];
            for (qy, &w) in q.iter_mut().zip(col) {
                *qy = *qy + w * px;
            }
        }
        q
    }

    pub fn apply_pmf(&self, p: &Pmf<T>) -> Pmf<T> {
        Pmf { weights: self.apply(p.weights()) }
    }
}

/// p·ln(p/q) with 0·ln(0/q) = 0 and +inf when p > 0 = q.
pub fn xlnx_over<T: Real>(p: T, q: T) -> T {
    if p == T::zero() {
        T::zero()
    } else if q == T::zero() {
        T::infinity()
    } else {
        p * (p / q).ln()
    }
}

/// Binary entropy in nats.
pub fn binary_entropy<T: Real>(p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::Domain(format!("binary entropy needs p in [0,1], got {p}")));
    }
    let h = |x: T| if x == T::zero() { T::zero() } else { -x * x.ln() };
    Ok(h(p) + h(T::one() - p))
}

/// (1+x)·ln(1+x) − x, accurate for small |x|.
fn bregman_kernel<T: Real>(x: T) -> T {
    if x.abs() < T::lit(0.05) {
        // Σ_{j≥2} (−1)^j x^j / (j(j−1)); 12 terms reach full precision here.
        let mut term = x * x;
        let mut sum = T::zero();
        for j in 2..14 {
            let jf = T::from_usize(j).unwrap();
            sum = sum + term / (jf * (jf - T::one()));
            term = -term * x;
        }
        sum
    } else if x == -T::one() {
        T::one()
    } else {
        (T::one() + x) * x.ln_1p() - x
    }
}

/// KL divergence of raw weight slices of equal length, summed as
/// Σ q·((1+δ)ln(1+δ) − δ) with δ = p/q − 1. Every term is nonnegative, which
/// keeps the result accurate when p is close to q. Equals Σ p·ln(p/q) for
/// normalized inputs.
pub fn relative_entropy<T: Real>(p: &[T], q: &[T]) -> T {
    assert_eq!(p.len(), q.len(), "length mismatch");
    let mut acc = T::zero();
    for (&a, &b) in p.iter().zip(q) {
        if b == T::zero() {
            if a > T::zero() {
                return T::infinity();
            }
            continue;
        }
        acc = acc + b * bregman_kernel((a - b) / b);
    }
    acc
}

/// KL divergence D(p‖p*); `+inf` when p puts mass outside the support of p*.
pub fn kl_divergence<T: Real>(p: &Pmf<T>, p_star: &Pmf<T>) -> Result<T> {
    if p.len() != p_star.len() {
        return Err(Error::Contract(format!(
            "pmfs have {} and {} outcomes",
            p.len(),
            p_star.len()
        )));
    }
    Ok(relative_entropy(p.weights(), p_star.weights()))
}
