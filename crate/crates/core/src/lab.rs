//! Bounded search over monomial flag ideals.
//!
//! Candidates are enumerated in a canonical order, evaluated in parallel in
//! fixed-size batches, and emitted in order, so a search is reproducible and
//! resumable from a partial stream.

use std::collections::{BTreeMap, BTreeSet};

use num::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::flag::{FlagIdeal, Mode, RawFlagIdeal, TDegree};
use crate::lattice::PolarizedToricVariety;
use crate::monomial::{minimalize, Monomial, MonomialIdeal};
use crate::report::{self, Pipeline};
use crate::weight::FitOptions;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    #[serde(rename = "N_max")]
    pub n_max: usize,
    pub d_max: u32,
    pub g_max: usize,
    #[serde(rename = "r")]
    pub r_list: Vec<u32>,
    #[serde(default)]
    pub mode: Mode,
}

impl SearchBounds {
    fn validate(&self) -> Result<()> {
        if self.r_list.is_empty() || self.r_list.contains(&0) {
            return Err(Error::InvalidInput("search needs a nonempty list of positive exponents".into()));
        }
        Ok(())
    }
}

/// All monomials in `nvars` variables with total degree in `1..=d_max`.
fn monomials(nvars: usize, d_max: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            if cur.iter().any(|&e| e > 0) {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d_max, &mut cur, &mut out);
    out.sort();
    out
}

/// Monomial ideals generated by antichains of at most `g_max` monomials.
fn ideals(nvars: usize, d_max: u32, g_max: usize, point_supported: bool) -> Vec<MonomialIdeal> {
    let mons = monomials(nvars, d_max);
    let mut out = BTreeSet::new();
    fn rec(
        start: usize,
        mons: &[Monomial],
        chosen: &mut Vec<Monomial>,
        g_max: usize,
        nvars: usize,
        point_supported: bool,
        out: &mut BTreeSet<MonomialIdeal>,
    ) {
        if !chosen.is_empty() {
            let ideal = minimalize(nvars, chosen.iter().cloned());
            if !point_supported || ideal.is_primary_to_origin() {
                out.insert(ideal);
            }
        }
        if chosen.len() == g_max {
            return;
        }
        for i in start..mons.len() {
            let m = &mons[i];
            if chosen.iter().any(|c| c.divides(&m.0) || m.divides(&c.0)) {
                continue;
            }
            chosen.push(m.clone());
            rec(i + 1, mons, chosen, g_max, nvars, point_supported, out);
            chosen.pop();
        }
    }
    rec(0, &mons, &mut Vec::new(), g_max, nvars, point_supported, &mut out);
    out.into_iter().collect()
}

type ChartKey = (usize, Vec<usize>, Vec<MonomialIdeal>);

/// Canonical identity of a validated flag ideal: its chain on every chart
/// where it is not the unit ideal, tagged with the chart.
fn canonical_key(flag: &FlagIdeal) -> Vec<ChartKey> {
    match flag.mode() {
        Mode::Chart => vec![(0, Vec::new(), flag.ideals().to_vec())],
        Mode::Cox => flag.charts().iter().map(|c| (c.vertex, c.coords.clone(), c.ideals.clone())).collect(),
    }
}

/// Every nontrivial normalized flag ideal within the bounds, once each, in
/// canonical order.
pub fn enumerate_flag_ideals(variety: &PolarizedToricVariety, bounds: &SearchBounds) -> Result<Vec<FlagIdeal>> {
    if bounds.d_max == 0 || bounds.g_max == 0 || bounds.n_max == 0 {
        return Ok(Vec::new());
    }
    let nvars = match bounds.mode {
        Mode::Chart => variety.dim(),
        Mode::Cox => variety.cox_rank(),
    };
    let base = ideals(nvars, bounds.d_max, bounds.g_max, bounds.mode == Mode::Chart);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut chain: Vec<usize> = Vec::new();
    fn rec(
        chain: &mut Vec<usize>,
        base: &[MonomialIdeal],
        bounds: &SearchBounds,
        variety: &PolarizedToricVariety,
        seen: &mut BTreeSet<Vec<ChartKey>>,
        out: &mut Vec<FlagIdeal>,
    ) -> Result<()> {
        if !chain.is_empty() {
            let raw = RawFlagIdeal::new(bounds.mode, chain.iter().map(|&i| base[i].clone()).collect());
            match FlagIdeal::validate(raw, variety) {
                Ok(flag) if !flag.is_trivial() && flag.levels() == chain.len() => {
                    if seen.insert(canonical_key(&flag)) {
                        out.push(flag);
                    }
                }
                Ok(_) => {}
                // a broken inclusion cannot be repaired by extending the chain
                Err(Error::ChainViolation { .. }) => return Ok(()),
                Err(e) => return Err(e),
            }
        }
        if chain.len() == bounds.n_max {
            return Ok(());
        }
        for i in 0..base.len() {
            if let Some(&last) = chain.last() {
                if !base[i].contains_ideal(&base[last]) && bounds.mode == Mode::Chart {
                    continue;
                }
            }
            chain.push(i);
            rec(chain, base, bounds, variety, seen, out)?;
            chain.pop();
        }
        Ok(())
    }
    rec(&mut chain, &base, bounds, variety, &mut seen, &mut out)?;
    Ok(out)
}

/// `I + (t)`.
pub fn preset_normal_cone(variety: &PolarizedToricVariety, ideal: MonomialIdeal, mode: Mode) -> Result<FlagIdeal> {
    if ideal.is_unit() || ideal.is_zero() {
        return Err(Error::InvalidInput("the deformation to the normal cone needs a proper nonzero ideal".into()));
    }
    let flag = FlagIdeal::validate(RawFlagIdeal::new(mode, vec![ideal]), variety)?;
    if flag.is_trivial() {
        return Err(Error::InvalidInput("the ideal is the unit ideal on every chart".into()));
    }
    Ok(flag)
}

/// Whether `g_K(u)` is affine in `u` on `K·r·P` for `K = 2, 3`, i.e. the
/// filtration is induced by a one-parameter subgroup.
pub fn is_product_type(variety: &PolarizedToricVariety, flag: &FlagIdeal, r: u32) -> Result<bool> {
    if flag.is_trivial() {
        return Ok(true);
    }
    let mut eval = TDegree::new(variety, flag)?;
    eval.extend_to(3);
    let n = variety.dim();
    for k in 2..=3usize {
        let scale = k as i64 * r as i64;
        let points: BTreeSet<Vec<i64>> = variety.polytope().lattice_points(scale).into_iter().collect();
        let g: BTreeMap<&Vec<i64>, i64> =
            points.iter().map(|u| (u, eval.normalized_level(k, u, scale) as i64)).collect();
        let step = |u: &[i64], i: usize| {
            let mut v = u.to_vec();
            v[i] += 1;
            v
        };
        for u in &points {
            for i in 0..n {
                for j in i..n {
                    let ui = step(u, i);
                    let uj = step(u, j);
                    let uij = step(&ui, j);
                    if let (Some(a), Some(b), Some(c)) = (g.get(&ui), g.get(&uj), g.get(&uij)) {
                        if c - a - b + g[u] != 0 {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStatus {
    Ok,
    /// Fits did not settle within the capped window.
    Undecided,
    Error,
}

/// One line of the result stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub index: usize,
    pub flag_ideal: String,
    pub r: u32,
    pub status: CandidateStatus,
    #[serde(rename = "DF", with = "crate::exact::serde_str_opt")]
    pub df: Option<Rational>,
    #[serde(with = "crate::exact::serde_str_opt")]
    pub df_intersection: Option<Rational>,
    pub consistent: Option<bool>,
    pub product_type: Option<bool>,
    pub detail: Option<String>,
}

impl CandidateResult {
    pub fn key(&self) -> (usize, u32) {
        (self.index, self.r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub flag_ideal: String,
    pub r: u32,
    pub product_type: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub candidates: usize,
    pub evaluations: usize,
    #[serde(rename = "min_DF", with = "crate::exact::serde_str_opt")]
    pub min_df: Option<Rational>,
    pub witnesses: Vec<Witness>,
    pub negatives: usize,
    pub undecided: Vec<CandidateResult>,
    pub errors: Vec<CandidateResult>,
    pub mismatches: Vec<CandidateResult>,
}

pub fn evaluate(
    variety: &PolarizedToricVariety,
    flag: &FlagIdeal,
    index: usize,
    r: u32,
    options: &FitOptions,
) -> CandidateResult {
    let mut result = CandidateResult {
        index,
        flag_ideal: flag.to_string(),
        r,
        status: CandidateStatus::Ok,
        df: None,
        df_intersection: None,
        consistent: None,
        product_type: None,
        detail: None,
    };
    let rep = match report::compute(variety, flag, r, Pipeline::Both, options) {
        Err(Error::ExponentTooSmall { detail, .. }) => {
            result.detail = Some(format!("intersection route skipped: {detail}"));
            report::compute(variety, flag, r, Pipeline::Counting, options)
        }
        other => other,
    };
    match rep {
        Ok(rep) => {
            result.df = Some(rep.df);
            result.df_intersection = rep.df_intersection;
            result.consistent = Some(rep.consistent);
            result.product_type = is_product_type(variety, flag, r).ok();
        }
        Err(e @ Error::NotStabilized(_)) => {
            result.status = CandidateStatus::Undecided;
            result.detail = Some(e.to_string());
        }
        Err(e) => {
            result.status = CandidateStatus::Error;
            result.detail = Some(e.to_string());
        }
    }
    result
}

/// Batch size for ordered parallel evaluation.
const BATCH: usize = 32;

/// Evaluates every candidate for every exponent. Results already present in
/// `done` (keyed by candidate index and `r`) are reused; fresh results are
/// passed to `sink` in canonical order.
pub fn search_destabilizers_with(
    variety: &PolarizedToricVariety,
    bounds: &SearchBounds,
    options: &FitOptions,
    done: &BTreeMap<(usize, u32), CandidateResult>,
    sink: &mut dyn FnMut(&CandidateResult) -> Result<()>,
) -> Result<SearchReport> {
    bounds.validate()?;
    let candidates = enumerate_flag_ideals(variety, bounds)?;
    let jobs: Vec<(usize, u32)> =
        (0..candidates.len()).flat_map(|i| bounds.r_list.iter().map(move |&r| (i, r))).collect();
    let mut results = Vec::with_capacity(jobs.len());
    for batch in jobs.chunks(BATCH) {
        let fresh: Vec<Option<CandidateResult>> = batch
            .par_iter()
            .map(|&(i, r)| match done.get(&(i, r)) {
                Some(prev) if prev.flag_ideal == candidates[i].to_string() => None,
                _ => Some(evaluate(variety, &candidates[i], i, r, options)),
            })
            .collect();
        for (job, res) in batch.iter().zip(fresh) {
            match res {
                Some(res) => {
                    sink(&res)?;
                    results.push(res);
                }
                None => results.push(done[job].clone()),
            }
        }
    }
    Ok(summarize(candidates.len(), &results))
}

pub fn search_destabilizers(variety: &PolarizedToricVariety, bounds: &SearchBounds) -> Result<SearchReport> {
    search_destabilizers_with(variety, bounds, &FitOptions::default(), &BTreeMap::new(), &mut |_| Ok(()))
}

pub fn summarize(candidates: usize, results: &[CandidateResult]) -> SearchReport {
    let ok: Vec<&CandidateResult> = results.iter().filter(|r| r.status == CandidateStatus::Ok).collect();
    let min_df = ok.iter().filter_map(|r| r.df.clone()).min();
    let witnesses = match &min_df {
        Some(m) => ok
            .iter()
            .filter(|r| r.df.as_ref() == Some(m))
            .map(|r| Witness { flag_ideal: r.flag_ideal.clone(), r: r.r, product_type: r.product_type })
            .collect(),
        None => Vec::new(),
    };
    let pick = |s: CandidateStatus| results.iter().filter(|r| r.status == s).cloned().collect::<Vec<_>>();
    SearchReport {
        candidates,
        evaluations: results.len(),
        negatives: ok.iter().filter(|r| r.df.as_ref().is_some_and(Signed::is_negative)).count(),
        min_df,
        witnesses,
        undecided: pick(CandidateStatus::Undecided),
        errors: pick(CandidateStatus::Error),
        mismatches: ok.iter().filter(|r| r.consistent == Some(false)).map(|r| (*r).clone()).collect(),
    }
}

/// `min DF ≥ 0` among decided candidates.
pub fn no_destabilizer(report: &SearchReport) -> bool {
    report.min_df.as_ref().is_none_or(|m| !m.is_negative())
}
