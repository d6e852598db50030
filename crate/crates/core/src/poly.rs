//! Exact rational polynomials recovered from integer samples.

use num::{BigInt, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::NotStabilized;
use crate::exact::Rational;

/// Polynomial with rational coefficients (lowest degree first) that matches
/// its samples for every `K ≥ threshold`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactPolynomial {
    #[serde(with = "crate::exact::serde_str_vec")]
    coeffs: Vec<Rational>,
    threshold: i64,
}

impl ExactPolynomial {
    pub fn new(mut coeffs: Vec<Rational>, threshold: i64) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs, threshold }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new(), threshold: 0 }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `K^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn threshold(&self) -> i64 {
        self.threshold
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: i64) -> Rational {
        self.eval(&Rational::from_integer(BigInt::from(x)))
    }

    pub fn mul(&self, other: &ExactPolynomial) -> ExactPolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return ExactPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ExactPolynomial::new(out, self.threshold.max(other.threshold))
    }

    pub fn scale(&self, c: &Rational) -> ExactPolynomial {
        ExactPolynomial::new(self.coeffs.iter().map(|a| a * c).collect(), self.threshold)
    }

    pub fn sub(&self, other: &ExactPolynomial) -> ExactPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        ExactPolynomial::new(
            (0..len).map(|i| self.coeff(i) - other.coeff(i)).collect(),
            self.threshold.max(other.threshold),
        )
    }

    /// `p(K/r)`, i.e. the same function in the variable `k = rK`.
    pub fn rescale_argument(&self, r: i64) -> ExactPolynomial {
        let inv = Rational::new(BigInt::one(), BigInt::from(r));
        let mut factor = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * &factor;
                factor *= &inv;
                out
            })
            .collect();
        ExactPolynomial::new(coeffs, self.threshold * r)
    }
}

/// Fits a polynomial of degree at most `max_degree` to consecutive integer
/// samples by Newton forward differences.
///
/// The `(max_degree + 1)`-th differences must vanish on a trailing window of
/// at least `guard + 1` entries; the polynomial is read off the earliest
/// sample from which all later differences vanish. Samples must be at
/// consecutive arguments in increasing order.
pub fn fit_polynomial(
    samples: &[(i64, BigInt)],
    max_degree: usize,
    guard: usize,
) -> Result<ExactPolynomial, NotStabilized> {
    let range = |s: &[(i64, BigInt)]| (s.first().map_or(0, |p| p.0) as u32, s.last().map_or(0, |p| p.0) as u32);
    debug_assert!(samples.windows(2).all(|w| w[1].0 == w[0].0 + 1));
    let not_stabilized = |quasi_period| NotStabilized { k_range: range(samples), degree: max_degree, quasi_period };
    if samples.len() < max_degree + 2 + guard {
        return Err(not_stabilized(None));
    }
    let values: Vec<BigInt> = samples.iter().map(|s| s.1.clone()).collect();
    let top = nth_differences(&values, max_degree + 1);
    let vanishing = top.iter().rev().take_while(|d| d.is_zero()).count();
    if vanishing < guard + 1 {
        let period = (2..=4u32).find(|&p| is_quasi_polynomial(&values, p as usize, max_degree, guard));
        return Err(not_stabilized(period));
    }
    let start = top.len() - vanishing;
    let tail = &samples[start..];
    Ok(newton_form(tail, max_degree))
}

fn nth_differences(values: &[BigInt], order: usize) -> Vec<BigInt> {
    let mut cur = values.to_vec();
    for _ in 0..order {
        cur = cur.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    cur
}

/// Every residue class mod `period` is polynomial on the window.
fn is_quasi_polynomial(values: &[BigInt], period: usize, degree: usize, guard: usize) -> bool {
    (0..period).all(|res| {
        let class: Vec<BigInt> = values.iter().skip(res).step_by(period).cloned().collect();
        class.len() >= degree + 2 + guard && nth_differences(&class, degree + 1).iter().all(Zero::is_zero)
    })
}

/// Monomial coefficients of the interpolant `Σ Δⁱv₀·C(K − K₀, i)`.
fn newton_form(tail: &[(i64, BigInt)], degree: usize) -> ExactPolynomial {
    let k0 = tail[0].0;
    let values: Vec<BigInt> = tail.iter().map(|s| s.1.clone()).collect();
    let mut out = vec![Rational::zero(); degree + 1];
    // basis = (K − K₀)(K − K₀ − 1)⋯(K − K₀ − i + 1) / i!
    let mut basis = vec![Rational::one()];
    for i in 0..=degree {
        let lead = nth_differences(&values, i).into_iter().next().unwrap_or_default();
        let lead = Rational::from_integer(lead);
        for (o, b) in out.iter_mut().zip(&basis) {
            *o += &lead * b;
        }
        // multiply by (K − K₀ − i)/(i + 1)
        let shift = Rational::from_integer(BigInt::from(-(k0 + i as i64)));
        let denom = Rational::from_integer(BigInt::from(i as i64 + 1));
        let mut next = vec![Rational::zero(); basis.len() + 1];
        for (d, b) in basis.iter().enumerate() {
            next[d + 1] += b / &denom;
            next[d] += b * &shift / &denom;
        }
        basis = next;
    }
    ExactPolynomial::new(out, k0)
}
