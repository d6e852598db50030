//! Counting route: exact Gₘ-weights of flag-ideal configurations.
//!
//! The central fibre weight at power `K` is minus the colength of `𝒥^K`
//! in the sections of `L^{rK}` tensored with polynomials in `t`, which for
//! monomial data is `W(K) = −Σ_{u ∈ KrP} g_K(u)` with `g_K` the filtration
//! level of `x^u`. `W` and the Hilbert function `h(K) = #(KrP ∩ ℤⁿ)` are
//! polynomial for large `K`; the fitted coefficients give the invariant.

use num::{BigInt, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, NotStabilized, Result};
use crate::exact::{factorial, Rational};
use crate::flag::{FlagIdeal, Mode, TDegree};
use crate::lattice::PolarizedToricVariety;
use crate::poly::{fit_polynomial, ExactPolynomial};

/// Sampling window for the fits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Initial `K` window; defaults to `[1, n + 6]`.
    pub k_range: Option<(u32, u32)>,
    /// Extra vanishing differences demanded beyond the minimum.
    pub guard: usize,
    /// Upper end beyond which the window is never extended.
    pub k_cap: u32,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { k_range: None, guard: 2, k_cap: 48 }
    }
}

impl FitOptions {
    pub fn initial_range(&self, n: usize) -> (u32, u32) {
        self.k_range.unwrap_or((1, n as u32 + 6))
    }
}

fn rat(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

/// `W(K)` for `K` in `ks` (inclusive); entries are independent and computed
/// in parallel.
pub fn weight_sequence(
    variety: &PolarizedToricVariety,
    flag: &FlagIdeal,
    r: u32,
    ks: (u32, u32),
) -> Result<Vec<BigInt>> {
    let mut eval = TDegree::new(variety, flag)?;
    eval.extend_to(ks.1 as usize);
    let shift = flag.t_shift() as u64;
    let eval = &eval;
    Ok((ks.0..=ks.1)
        .into_par_iter()
        .map(|k| {
            let scale = k as i64 * r as i64;
            let points = variety.polytope().lattice_points(scale);
            let total: u64 = points.iter().map(|u| eval.normalized_level(k as usize, u, scale) as u64).sum();
            -(BigInt::from(total) + BigInt::from(shift * k as u64 * points.len() as u64))
        })
        .collect())
}

/// `h(K) = P(rK)` for `K` in `ks`.
pub fn hilbert_sequence(variety: &PolarizedToricVariety, r: u32, ks: (u32, u32)) -> Vec<BigInt> {
    (ks.0..=ks.1)
        .into_par_iter()
        .map(|k| BigInt::from(variety.ehrhart_count(k as u64 * r as u64)))
        .collect()
}

/// Fitted weight and Hilbert polynomials in the variable `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingFit {
    pub weight: ExactPolynomial,
    pub hilbert: ExactPolynomial,
    /// Window actually sampled.
    pub k_range: (u32, u32),
    /// `W(1)`, the weight at the base exponent.
    #[serde(with = "crate::exact::serde_str")]
    pub base_weight: Rational,
    /// `h(1) = P(r)`.
    #[serde(with = "crate::exact::serde_str")]
    pub base_hilbert: Rational,
}

/// Samples and fits `W` and `h`, doubling the window up to the cap while the
/// differences have not settled. A detected quasi-period stops the search:
/// more samples cannot help, only a larger `r`.
pub fn fit_counting(
    variety: &PolarizedToricVariety,
    flag: &FlagIdeal,
    r: u32,
    options: &FitOptions,
) -> Result<CountingFit> {
    if r == 0 {
        return Err(Error::InvalidInput("the exponent r must be positive".into()));
    }
    let n = variety.dim();
    let (lo, mut hi) = options.initial_range(n);
    if lo == 0 || lo > hi {
        return Err(Error::InvalidInput(format!("invalid K range [{lo}, {hi}]")));
    }
    let mut weights = weight_sequence(variety, flag, r, (lo, hi))?;
    loop {
        let samples: Vec<(i64, BigInt)> =
            weights.iter().enumerate().map(|(i, w)| (lo as i64 + i as i64, w.clone())).collect();
        match fit_polynomial(&samples, n + 1, options.guard) {
            Ok(weight) => {
                let hs = hilbert_sequence(variety, r, (lo, hi));
                let hsamples: Vec<(i64, BigInt)> =
                    hs.into_iter().enumerate().map(|(i, h)| (lo as i64 + i as i64, h)).collect();
                let hilbert = fit_polynomial(&hsamples, n, options.guard)?;
                let base_weight = if lo == 1 { weights[0].clone() } else { weight_sequence(variety, flag, r, (1, 1))?[0].clone() };
                return Ok(CountingFit {
                    weight,
                    hilbert,
                    k_range: (lo, hi),
                    base_weight: rat(base_weight),
                    base_hilbert: rat(variety.ehrhart_count(r as u64)),
                });
            }
            Err(e) if e.quasi_period.is_some() || hi >= options.k_cap => return Err(e.into()),
            Err(_) => {
                let next = (hi.saturating_mul(2)).min(options.k_cap).max(hi + 1);
                weights.extend(weight_sequence(variety, flag, r, (hi + 1, next))?);
                hi = next;
            }
        }
    }
}

/// `A_{n+1}·h_{n−1} − A_n·h_n`, a positive multiple of the invariant.
pub fn df_from_fit(n: usize, weight: &ExactPolynomial, hilbert: &ExactPolynomial) -> Rational {
    weight.coeff(n + 1) * hilbert.coeff(n - 1) - weight.coeff(n) * hilbert.coeff(n)
}

/// `h(1)·A_{n+1} − W(1)·h_n`, a positive multiple of the Chow weight at `r`.
pub fn chow_from_fit(n: usize, fit: &CountingFit) -> Rational {
    &fit.base_hilbert * fit.weight.coeff(n + 1) - &fit.base_weight * fit.hilbert.coeff(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingResult {
    pub fit: CountingFit,
    pub df: Rational,
    pub chow: Rational,
}

impl CountingResult {
    pub fn from_fit(n: usize, fit: CountingFit) -> Self {
        let df = df_from_fit(n, &fit.weight, &fit.hilbert);
        let chow = chow_from_fit(n, &fit);
        Self { fit, df, chow }
    }
}

/// Whether a (possibly cached) fit reproduces freshly counted samples at
/// every `K` of its window from the threshold on.
pub fn fit_matches_samples(
    variety: &PolarizedToricVariety,
    flag: &FlagIdeal,
    r: u32,
    fit: &CountingFit,
) -> Result<bool> {
    let lo = (fit.weight.threshold().max(fit.hilbert.threshold()).max(1)) as u32;
    let hi = fit.k_range.1.max(lo);
    let ws = weight_sequence(variety, flag, r, (lo, hi))?;
    let hs = hilbert_sequence(variety, r, (lo, hi));
    let base_ok = fit.base_weight == rat(weight_sequence(variety, flag, r, (1, 1))?[0].clone())
        && fit.base_hilbert == rat(variety.ehrhart_count(r as u64));
    Ok(base_ok
        && (lo..=hi).zip(ws.iter().zip(&hs)).all(|(k, (w, h))| {
            fit.weight.eval_int(k as i64) == rat(w.clone()) && fit.hilbert.eval_int(k as i64) == rat(h.clone())
        }))
}

pub fn df_counting(
    variety: &PolarizedToricVariety,
    flag: &FlagIdeal,
    r: u32,
    options: &FitOptions,
) -> Result<CountingResult> {
    Ok(CountingResult::from_fit(variety.dim(), fit_counting(variety, flag, r, options)?))
}

pub fn chow_number(variety: &PolarizedToricVariety, flag: &FlagIdeal, r: u32, options: &FitOptions) -> Result<Rational> {
    Ok(df_counting(variety, flag, r, options)?.chow)
}

/// `w̃_{a,b} = w(b)·a·P(a) − w(a)·b·P(b)` with `w(k) = A(k/r)`, `P(k) = h(k/r)`.
fn normalized(w: &ExactPolynomial, p: &ExactPolynomial, a: i64, b: i64) -> Rational {
    let (a, b) = (rat(a), rat(b));
    w.eval(&b) * &a * p.eval(&a) - w.eval(&a) * &b * p.eval(&b)
}

/// Checks, in exact arithmetic, the identity
/// `w̃_{r,kk′}/(kk′P(kk′)) − w̃_{r,k}/(kP(k)) = rP(r)/(k²k′P(kk′)P(k))·w̃_{k,kk′}`.
pub fn mabuchi_check(a: &ExactPolynomial, h: &ExactPolynomial, r: i64, k: i64, k2: i64) -> bool {
    if r <= 0 || k <= 0 || k2 <= 0 || k % r != 0 {
        return false;
    }
    let w = a.rescale_argument(r);
    let p = h.rescale_argument(r);
    let kk = k * k2;
    let pk = p.eval_int(k);
    let pkk = p.eval_int(kk);
    if pk.is_zero() || pkk.is_zero() {
        return false;
    }
    let lhs = normalized(&w, &p, r, kk) / (rat(kk) * &pkk) - normalized(&w, &p, r, k) / (rat(k) * &pk);
    let rhs = rat(r) * p.eval_int(r) / (rat(k * k * k2) * &pkk * &pk) * normalized(&w, &p, k, kk);
    lhs == rhs && normalized(&w, &p, r, r).is_zero()
}

/// `W̃(K) = A(K)·r·h(1) − W(1)·rK·h(K)` as a polynomial in `K`.
pub fn normalized_weight(fit: &CountingFit, r: i64) -> ExactPolynomial {
    let rq = rat(r);
    let first = fit.weight.scale(&(&rq * &fit.base_hilbert));
    let k_times_h = ExactPolynomial::new(vec![Rational::zero(), Rational::from_integer(1.into())], 0).mul(&fit.hilbert);
    first.sub(&k_times_h.scale(&(&rq * &fit.base_weight)))
}

/// The top coefficient of `W̃` vanishes at degree `n + 2` and equals
/// `r·chow` at degree `n + 1`.
pub fn normalized_weight_check(n: usize, fit: &CountingFit, r: i64) -> bool {
    let wt = normalized_weight(fit, r);
    wt.coeff(n + 2).is_zero() && wt.coeff(n + 1) == rat(r) * chow_from_fit(n, fit)
}

/// Leading Hilbert coefficients against the polytope:
/// `h_n = (Lⁿ)rⁿ/n!` and `h_{n−1} = −(L^{n−1}.K_X)r^{n−1}/(2(n−1)!)`.
pub fn weak_riemann_roch_check(variety: &PolarizedToricVariety, hilbert: &ExactPolynomial, r: u32) -> bool {
    let n = variety.dim();
    let nums = variety.intersection_numbers();
    let r = BigInt::from(r);
    let top = rat(BigInt::from(nums.top) * num::pow(r.clone(), n)) / rat(factorial(n));
    let sub = -rat(BigInt::from(nums.canonical) * num::pow(r, n - 1)) / rat(BigInt::from(2) * factorial(n - 1));
    hilbert.degree() == Some(n) && hilbert.coeff(n) == top && hilbert.coeff(n - 1) == sub
}

/// Sufficient condition for the exponent: in chart mode every generator
/// exponent fits inside `rP`. Returns a warning when it fails.
pub fn semiample_warning(variety: &PolarizedToricVariety, flag: &FlagIdeal, r: u32) -> Option<String> {
    if flag.mode() != Mode::Chart || flag.is_trivial() {
        return None;
    }
    let extent = variety.chart_extent();
    for (i, e) in extent.iter().enumerate() {
        let need = flag.ideals().iter().map(|m| m.max_exponent(i)).max().unwrap_or(0) as i64;
        if need > e * r as i64 {
            return Some(format!(
                "chart axis {i}: generator exponent {need} exceeds r·extent = {}; the exponent r may be too small",
                e * r as i64
            ));
        }
    }
    None
}

/// Error for a failed fit, with the window that was tried.
pub fn not_stabilized(err: &Error) -> Option<&NotStabilized> {
    match err {
        Error::NotStabilized(e) => Some(e),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int};
    use crate::flag::RawFlagIdeal;
    use crate::lattice::library;
    use crate::monomial::MonomialIdeal;

    fn setup(n: usize, d: i64, chain: &[&[&[u32]]]) -> (PolarizedToricVariety, FlagIdeal) {
        let v = library::projective_space(n, d).unwrap();
        let ideals = chain
            .iter()
            .map(|gens| MonomialIdeal::from_exponents(n, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()))
            .collect();
        let f = FlagIdeal::validate(RawFlagIdeal::new(Mode::Chart, ideals), &v).unwrap();
        (v, f)
    }

    #[test]
    fn weight_sequences() {
        let (v, f) = setup(1, 2, &[&[&[2]]]);
        let ws = weight_sequence(&v, &f, 1, (1, 3)).unwrap();
        assert_eq!(ws, vec![BigInt::from(-2), BigInt::from(-6), BigInt::from(-12)]);
        let (v, f) = setup(1, 1, &[&[&[1]]]);
        assert_eq!(weight_sequence(&v, &f, 1, (2, 2)).unwrap(), vec![BigInt::from(-3)]);
        let (v, f) = setup(2, 1, &[&[&[0, 0]]]);
        assert!(weight_sequence(&v, &f, 1, (1, 4)).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn worked_values() {
        let opts = FitOptions::default();
        let (v, f) = setup(1, 1, &[&[&[1]]]);
        let res = df_counting(&v, &f, 1, &opts).unwrap();
        assert_eq!(res.fit.weight.coeffs(), &[int(0), frac(-1, 2), frac(-1, 2)]);
        assert_eq!((res.df, res.chow), (int(0), int(0)));

        let (v, f) = setup(1, 2, &[&[&[2]]]);
        let res = df_counting(&v, &f, 1, &opts).unwrap();
        assert_eq!(res.fit.hilbert.coeffs(), &[int(1), int(2)]);
        assert_eq!((res.df, res.chow), (int(1), int(1)));

        let (v, f) = setup(2, 2, &[&[&[2, 0], &[1, 1], &[0, 2]]]);
        let res = df_counting(&v, &f, 1, &opts).unwrap();
        assert_eq!(res.fit.weight.coeffs(), &[int(0), frac(-5, 6), frac(-3, 2), frac(-2, 3)]);
        assert_eq!(res.df, int(1));
    }

    #[test]
    fn quasi_period_guard() {
        let (v, f) = setup(1, 1, &[&[&[2]]]);
        let err = df_counting(&v, &f, 1, &FitOptions::default()).unwrap_err();
        assert_eq!(not_stabilized(&err).unwrap().quasi_period, Some(2));
        assert!(semiample_warning(&v, &f, 1).is_some());
        assert!(semiample_warning(&v, &f, 2).is_none());
        assert!(df_counting(&v, &f, 2, &FitOptions::default()).is_ok());
    }

    #[test]
    fn identities() {
        let (v, f) = setup(2, 2, &[&[&[2, 0], &[1, 1], &[0, 2]]]);
        for r in [1u32, 2] {
            let res = df_counting(&v, &f, r, &FitOptions::default()).unwrap();
            assert!(weak_riemann_roch_check(&v, &res.fit.hilbert, r));
            assert!(normalized_weight_check(2, &res.fit, r as i64));
            for k in [2, 4, 6] {
                for k2 in [2, 3] {
                    assert!(mabuchi_check(&res.fit.weight, &res.fit.hilbert, r as i64, k, k2));
                }
            }
        }
    }

    #[test]
    fn corrupted_polynomial_fails_identity() {
        let (v, f) = setup(1, 2, &[&[&[2]]]);
        let res = df_counting(&v, &f, 1, &FitOptions::default()).unwrap();
        let bad = ExactPolynomial::new(vec![int(2), int(2)], 1);
        assert!(!weak_riemann_roch_check(&v, &bad, 1));
        let bad = ExactPolynomial::new(vec![int(1), int(2), int(3)], 1);
        assert!(!weak_riemann_roch_check(&v, &bad, 1));
        assert!(weak_riemann_roch_check(&v, &res.fit.hilbert, 1));
    }
}
