//! Combined report for one configuration and one exponent.

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, Rational};
use crate::flag::{FlagIdeal, Mode};
use crate::intersection::{self, DecompositionReport};
use crate::lattice::PolarizedToricVariety;
use crate::weight::{self, CountingFit, CountingResult, FitOptions};

/// Formula used for the reported counting value, in terms of the fitted
/// coefficients of `A(K) = W(K)` and `h(K)`.
pub const DF_NORMALIZATION: &str = "A[n+1]*h[n-1] - A[n]*h[n]";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Counting,
    Intersection,
    #[default]
    Both,
}

impl std::str::FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counting" => Ok(Pipeline::Counting),
            "intersection" => Ok(Pipeline::Intersection),
            "both" => Ok(Pipeline::Both),
            other => Err(Error::InvalidInput(format!("unknown pipeline {other:?}"))),
        }
    }
}

/// Which configuration the decomposition describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Configuration {
    AsGiven,
    /// The ideal is not normal; the intersection route sees its normalization.
    Normalized,
}

/// Outcome of each exact consistency check; `None` when not applicable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityChecks {
    pub weak_riemann_roch: Option<bool>,
    pub normalized_weight: Option<bool>,
    /// `(𝓛(−E))^{n+1} = (n+1)!·A_{n+1}` after removing the `t`-shift.
    pub leading_term: Option<bool>,
    /// Equality (normal ideals) or `DF_B ≤ DF_A` (otherwise).
    pub pipelines: Option<bool>,
}

impl IdentityChecks {
    pub fn all_pass(&self) -> bool {
        [self.weak_riemann_roch, self.normalized_weight, self.leading_term, self.pipelines]
            .iter()
            .all(|c| c.unwrap_or(true))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfReport {
    pub n: usize,
    pub r: u32,
    pub flag_ideal: String,
    pub mode: Mode,
    pub pipeline: Pipeline,
    #[serde(rename = "DF", with = "crate::exact::serde_str")]
    pub df: Rational,
    pub df_normalization: String,
    #[serde(with = "crate::exact::serde_str_opt")]
    pub df_counting: Option<Rational>,
    #[serde(with = "crate::exact::serde_str_opt")]
    pub df_intersection: Option<Rational>,
    #[serde(with = "crate::exact::serde_str_opt")]
    pub chow: Option<Rational>,
    /// Fitted `A(K)` and `h(K)` with the sampled window.
    pub fit: Option<CountingFit>,
    pub decomposition: Option<DecompositionReport>,
    pub configuration: Configuration,
    pub trivial: bool,
    pub consistent: bool,
    pub checks: IdentityChecks,
    pub warnings: Vec<String>,
}

impl DfReport {
    /// Whether an exact check failed; maps to exit code 3.
    pub fn cross_check_failed(&self) -> bool {
        !self.consistent
    }
}

fn rat(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

/// Runs the requested pipelines. With [`Pipeline::Both`] an input outside the
/// intersection route's scope falls back to counting, with a warning.
pub fn compute(
    variety: &PolarizedToricVariety,
    flag: &FlagIdeal,
    r: u32,
    pipeline: Pipeline,
    options: &FitOptions,
) -> Result<DfReport> {
    compute_with_fit(variety, flag, r, pipeline, options, None)
}

/// As [`compute`], reusing a previously fitted counting result when given.
pub fn compute_with_fit(
    variety: &PolarizedToricVariety,
    flag: &FlagIdeal,
    r: u32,
    pipeline: Pipeline,
    options: &FitOptions,
    fit: Option<CountingFit>,
) -> Result<DfReport> {
    let n = variety.dim();
    let mut warnings = Vec::new();
    if let Some(w) = weight::semiample_warning(variety, flag, r) {
        warnings.push(w);
    }

    let mut pipeline = pipeline;
    let decomposition = match pipeline {
        Pipeline::Counting => None,
        Pipeline::Intersection => Some(intersection::df_intersection(variety, flag, r)?),
        Pipeline::Both => match intersection::df_intersection(variety, flag, r) {
            Ok(d) => Some(d),
            Err(Error::UnsupportedMode(msg)) => {
                warnings.push(format!("intersection route skipped: {msg}"));
                pipeline = Pipeline::Counting;
                None
            }
            Err(e) => return Err(e),
        },
    };
    let counting = match pipeline {
        Pipeline::Intersection => None,
        _ => Some(match fit {
            Some(fit) => CountingResult::from_fit(variety.dim(), fit),
            None => weight::df_counting(variety, flag, r, options)?,
        }),
    };

    let normal = match &decomposition {
        Some(_) => intersection::is_normal(flag)?,
        None => true,
    };
    let configuration = if normal { Configuration::AsGiven } else { Configuration::Normalized };
    if !normal {
        warnings.push("the ideal is not normal; the decomposition describes its normalization".into());
    }

    let mut checks = IdentityChecks::default();
    if let Some(c) = &counting {
        checks.weak_riemann_roch = Some(weight::weak_riemann_roch_check(variety, &c.fit.hilbert, r));
        checks.normalized_weight = Some(weight::normalized_weight_check(n, &c.fit, r as i64));
    }
    if let (Some(c), Some(d)) = (&counting, &decomposition) {
        let shift = rat(flag.t_shift() as i64);
        let lead = c.fit.weight.coeff(n + 1) + shift * c.fit.hilbert.coeff(n);
        checks.leading_term = Some(d.self_intersection == rat(factorial(n + 1)) * lead);
        checks.pipelines = Some(if normal { d.df == c.df } else { d.df <= c.df });
    }

    let df = match (&counting, &decomposition) {
        (Some(c), _) => c.df.clone(),
        (None, Some(d)) => d.df.clone(),
        (None, None) => Rational::zero(),
    };
    Ok(DfReport {
        n,
        r,
        flag_ideal: flag.to_string(),
        mode: flag.mode(),
        pipeline,
        df,
        df_normalization: DF_NORMALIZATION.into(),
        df_counting: counting.as_ref().map(|c| c.df.clone()),
        df_intersection: decomposition.as_ref().map(|d| d.df.clone()),
        chow: counting.as_ref().map(|c| c.chow.clone()),
        fit: counting.map(|c| c.fit),
        decomposition,
        configuration,
        trivial: flag.is_trivial(),
        consistent: checks.all_pass(),
        checks,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::flag::RawFlagIdeal;
    use crate::lattice::library;
    use crate::monomial::MonomialIdeal;

    fn setup(n: usize, d: i64, mode: Mode, chain: &[&[&[u32]]]) -> (PolarizedToricVariety, FlagIdeal) {
        let v = library::projective_space(n, d).unwrap();
        let m = if mode == Mode::Chart { n } else { n + 1 };
        let ideals = chain
            .iter()
            .map(|gens| MonomialIdeal::from_exponents(m, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()))
            .collect();
        let f = FlagIdeal::validate(RawFlagIdeal::new(mode, ideals), &v).unwrap();
        (v, f)
    }

    #[test]
    fn both_pipelines_agree() {
        let (v, f) = setup(1, 2, Mode::Chart, &[&[&[2]]]);
        let rep = compute(&v, &f, 1, Pipeline::Both, &FitOptions::default()).unwrap();
        assert_eq!(rep.df, int(1));
        assert!(rep.consistent);
        assert_eq!(rep.pipeline, Pipeline::Both);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["DF"], "1");
        assert_eq!(json["decomposition"]["T1"], "-4");
        assert_eq!(json["decomposition"]["T2"], "0");
        assert_eq!(json["decomposition"]["T3"], "8");
        let back: DfReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn cox_mode_falls_back() {
        // the divisor at infinity on ℙ¹ is X₁
        let (v, f) = setup(1, 2, Mode::Cox, &[&[&[2, 0]]]);
        let rep = compute(&v, &f, 1, Pipeline::Both, &FitOptions::default()).unwrap();
        assert_eq!(rep.pipeline, Pipeline::Counting);
        assert_eq!(rep.df, int(1));
        assert!(rep.decomposition.is_none());
    }

    #[test]
    fn normalized_configuration_label() {
        let (v, f) = setup(2, 2, Mode::Chart, &[&[&[2, 0], &[0, 2]]]);
        let rep = compute(&v, &f, 1, Pipeline::Both, &FitOptions::default()).unwrap();
        assert_eq!(rep.configuration, Configuration::Normalized);
        assert!(rep.consistent);
        assert!(rep.df_intersection.unwrap() <= rep.df_counting.unwrap());
    }
}
