//! Intersection-number route to the Donaldson-Futaki invariant.
//!
//! With `𝓛 = L^r` pulled back to the normalized blow-up `𝓑` of `X × ℙ¹`
//! along `𝒥`, and `E` the exceptional Cartier divisor,
//!
//! ```text
//! 2·n!·(n+1)!·DF = −n(L^{n−1}.K_X)(𝓛(−E))^{n+1}
//!                 + (n+1)(Lⁿ)((𝓛(−E))ⁿ.Π*p₁*K_X)
//!                 + (n+1)(Lⁿ)((𝓛(−E))ⁿ.K_{𝓑/X×𝔸¹}).
//! ```
//!
//! For ideals supported at the chart origin every exceptional divisor maps
//! to a point, the middle term vanishes, and the remaining numbers are read
//! off the Newton polyhedron: `(𝓛(−E))^{n+1} = −(n+1)!∫Φ` over the chart
//! image of `rP`, and `((𝓛(−E))ⁿ.E_w)` is the normalized lattice volume of
//! the facet dual to `w`.

use num::{BigInt, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, Rational};
use crate::flag::{FlagIdeal, Mode, PowerTable};
use crate::lattice::PolarizedToricVariety;
use crate::linalg;
use crate::newton::{ExceptionalFacet, NewtonPolyhedron};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayContribution {
    pub w: Vec<i64>,
    pub ord: i64,
    pub a: i64,
    #[serde(with = "crate::exact::serde_str")]
    pub face_degree: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    #[serde(rename = "T1", with = "crate::exact::serde_str")]
    pub t1: Rational,
    #[serde(rename = "T2", with = "crate::exact::serde_str")]
    pub t2: Rational,
    #[serde(rename = "T3", with = "crate::exact::serde_str")]
    pub t3: Rational,
    #[serde(rename = "DF", with = "crate::exact::serde_str")]
    pub df: Rational,
    /// `(𝓛(−E))^{n+1}`.
    #[serde(with = "crate::exact::serde_str")]
    pub self_intersection: Rational,
    /// `∫Φ` over the chart image of `rP`.
    #[serde(with = "crate::exact::serde_str")]
    pub integral: Rational,
    pub rays: Vec<RayContribution>,
}

fn rat(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

fn check_supported(flag: &FlagIdeal) -> Result<()> {
    if flag.mode() != Mode::Chart {
        return Err(Error::UnsupportedMode("the decomposition is computed in chart mode only".into()));
    }
    if !flag.is_trivial() && !flag.is_point_supported() {
        return Err(Error::UnsupportedMode(
            "the decomposition needs an ideal supported at the chart origin".into(),
        ));
    }
    Ok(())
}

/// Every projected vertex of every exceptional facet must lie in `rP`.
fn check_exponent(variety: &PolarizedToricVariety, np: &NewtonPolyhedron, r: u32) -> Result<()> {
    let n = variety.dim();
    for f in np.facets() {
        for v in &f.vertices {
            if !variety.chart_contains(&v[..n], r as i64) {
                return Err(Error::ExponentTooSmall {
                    r,
                    detail: format!("exceptional facet with normal {:?} reaches chart point {:?}", f.normal, &v[..n]),
                });
            }
        }
    }
    Ok(())
}

/// Simplices of a facet as lifted lattice points in `ℤ^{n+1}`.
fn facet_simplices(facet: &ExceptionalFacet) -> Result<Vec<Vec<Vec<i64>>>> {
    let (proj, heights) = facet.projection()?;
    Ok(proj
        .triangulation()
        .into_iter()
        .map(|s| {
            s.into_iter()
                .map(|i| {
                    let mut p = proj.vertices()[i].clone();
                    p.push(heights[i]);
                    p
                })
                .collect()
        })
        .collect())
}

/// `∫Φ` over the chart image of `rP`.
pub fn lower_hull_integral(variety: &PolarizedToricVariety, flag: &FlagIdeal, r: u32) -> Result<Rational> {
    check_supported(flag)?;
    let np = NewtonPolyhedron::new(flag)?;
    check_exponent(variety, &np, r)?;
    integral_of(&np)
}

fn integral_of(np: &NewtonPolyhedron) -> Result<Rational> {
    let n = np.dim() - 1;
    let mut total = Rational::zero();
    for facet in np.facets() {
        for simplex in facet_simplices(facet)? {
            // vol = |det|/n!, mean height = Σh/(n+1)
            let base = &simplex[0][..n];
            let rows: Vec<Vec<i64>> = simplex[1..].iter().map(|p| linalg::sub(&p[..n], base)).collect();
            let vol = linalg::det(&rows).abs();
            let heights: i64 = simplex.iter().map(|p| p[n]).sum();
            total += rat(vol) * rat(heights);
        }
    }
    Ok(total / rat(factorial(n) * BigInt::from(n + 1)))
}

/// Compact facets of the Newton polyhedron, i.e. the exceptional divisors.
pub fn exceptional_data(flag: &FlagIdeal) -> Result<Vec<ExceptionalFacet>> {
    check_supported(flag)?;
    Ok(NewtonPolyhedron::new(flag)?.facets().to_vec())
}

/// `((𝓛(−E))ⁿ.E_w)`: normalized volume of the facet in its affine lattice.
pub fn face_degree(variety: &PolarizedToricVariety, flag: &FlagIdeal, r: u32, w: &[i64]) -> Result<Rational> {
    check_supported(flag)?;
    let np = NewtonPolyhedron::new(flag)?;
    check_exponent(variety, &np, r)?;
    let facet = np
        .facet(w)
        .ok_or_else(|| Error::InvalidInput(format!("{w:?} is not an exceptional ray of this ideal")))?;
    facet_volume(facet)
}

fn facet_volume(facet: &ExceptionalFacet) -> Result<Rational> {
    let z = linalg::unit_solution(&facet.normal);
    let mut total: i128 = 0;
    for simplex in facet_simplices(facet)? {
        let mut rows: Vec<Vec<i64>> = simplex[1..].iter().map(|p| linalg::sub(p, &simplex[0])).collect();
        rows.push(z.clone());
        total += linalg::det(&rows).abs();
    }
    Ok(rat(total))
}

/// Assembles `T₁`, `T₂ = 0`, `T₃` and `DF = (T₁+T₂+T₃)/(2·n!·(n+1)!)`.
pub fn df_intersection(variety: &PolarizedToricVariety, flag: &FlagIdeal, r: u32) -> Result<DecompositionReport> {
    check_supported(flag)?;
    let n = variety.dim();
    let np = NewtonPolyhedron::new(flag)?;
    check_exponent(variety, &np, r)?;
    let integral = integral_of(&np)?;
    let self_intersection = -rat(factorial(n + 1)) * &integral;

    let rays: Vec<RayContribution> = np
        .facets()
        .par_iter()
        .map(|f| {
            Ok(RayContribution { w: f.normal.clone(), ord: f.order, a: f.discrepancy, face_degree: facet_volume(f)? })
        })
        .collect::<Result<_>>()?;

    let numbers = variety.intersection_numbers();
    let r = BigInt::from(r);
    let top = rat(BigInt::from(numbers.top) * num::pow(r.clone(), n));
    let canonical = rat(BigInt::from(numbers.canonical) * num::pow(r, n - 1));
    let t1 = -rat(n) * canonical * &self_intersection;
    let t2 = Rational::zero();
    let discrepancy: Rational = rays.iter().map(|ray| rat(ray.a) * &ray.face_degree).sum();
    let t3 = rat(n + 1) * top * discrepancy;
    let df = (&t1 + &t2 + &t3) / rat(BigInt::from(2) * factorial(n) * factorial(n + 1));
    Ok(DecompositionReport { t1, t2, t3, df, self_intersection, integral, rays })
}

/// Whether `𝒥` is normal, i.e. the Newton-polyhedron route describes the
/// configuration as given rather than its normalization.
///
/// For monomial ideals in `n + 1` variables it suffices that `𝒥^K` is
/// integrally closed for `K = 1..n`. A power is integrally closed when every
/// lattice point of `K·NP` lies in `𝒥^K`; only the box below the pure
/// powers of `I₀` and below `t^{KN}` needs checking.
pub fn is_normal(flag: &FlagIdeal) -> Result<bool> {
    check_supported(flag)?;
    if flag.is_trivial() {
        return Ok(true);
    }
    let np = NewtonPolyhedron::new(flag)?;
    let n = flag.nvars();
    let bounds: Vec<u32> = (0..n)
        .map(|i| flag.ideals()[0].pure_power(i).expect("point-supported ideals contain pure powers"))
        .collect();
    let mut table = PowerTable::new(flag.ideals());
    let top = n.max(1);
    table.extend_to(top);
    for k in 1..=top {
        let kq = rat(k as i64);
        let limits: Vec<u32> = bounds.iter().map(|b| b * k as u32).collect();
        let mut x = vec![0u32; n];
        loop {
            let scaled: Vec<Rational> = x.iter().map(|&c| rat(c as i64) / &kq).collect();
            // least s with (x, s) ∈ K·NP
            let hull = (np.phi_value(&scaled) * &kq).ceil().to_integer();
            if BigInt::from(table.t_degree(k, &x)) > hull {
                return Ok(false);
            }
            // odometer over the box
            let mut i = 0;
            while i < n {
                x[i] += 1;
                if x[i] < limits[i] {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    Ok(true)
}

/// Sanity helper used by tests and reports: every face degree is
/// nonnegative and `T₃ ≥ 0`.
pub fn discrepancy_term_nonnegative(report: &DecompositionReport) -> bool {
    !report.t3.is_negative() && report.rays.iter().all(|r| !r.face_degree.is_negative())
}
