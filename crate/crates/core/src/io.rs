//! JSON job documents and deterministic output.
//!
//! ```json
//! {
//!   "variety": {"type": "polytope", "vertices": [[0,0],[2,0],[0,2]], "chart_vertex": [0,0]},
//!   "flag_ideal": {"N": 1, "mode": "chart", "ideals": [{"gens": [[2,0],[1,1],[0,2]]}]},
//!   "r": 1,
//!   "pipeline": "both"
//! }
//! ```
//!
//! `variety` may also be `{"type": "projective_space", "n": 2, "d": 2}`.
//! Optional keys: `K_range`, `guard`, `K_cap`, `format`, `search`, `verify`,
//! `workers`, `cache_dir`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::flag::{FlagIdeal, Mode, RawFlagIdeal};
use crate::lab::SearchBounds;
use crate::lattice::PolarizedToricVariety;
use crate::monomial::MonomialIdeal;
use crate::report::Pipeline;
use crate::weight::FitOptions;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Table,
}

/// Grid for the identity checks of `verify`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyGrid {
    #[serde(default = "default_verify_r")]
    pub r: Vec<u32>,
    #[serde(default = "default_verify_k")]
    pub k: Vec<i64>,
    #[serde(default = "default_verify_k_prime")]
    pub k_prime: Vec<i64>,
    /// `t`-powers for the shift invariance check.
    #[serde(default = "default_verify_t")]
    pub t_powers: Vec<usize>,
    /// Also run the Ehrhart cross-check on the built-in polytope library.
    #[serde(default)]
    pub library: bool,
}

fn default_verify_r() -> Vec<u32> {
    vec![1, 2]
}
fn default_verify_k() -> Vec<i64> {
    vec![2, 4, 6]
}
fn default_verify_k_prime() -> Vec<i64> {
    vec![2, 3]
}
fn default_verify_t() -> Vec<usize> {
    vec![1, 2]
}

impl Default for VerifyGrid {
    fn default() -> Self {
        Self {
            r: default_verify_r(),
            k: default_verify_k(),
            k_prime: default_verify_k_prime(),
            t_powers: default_verify_t(),
            library: false,
        }
    }
}

/// A parsed and validated job.
#[derive(Clone, Debug)]
pub struct Job {
    pub variety: PolarizedToricVariety,
    pub flag: Option<FlagIdeal>,
    /// The chain exactly as given (before stripping), for cache keys.
    pub raw_flag: Option<RawFlagIdeal>,
    pub r: Vec<u32>,
    pub options: FitOptions,
    pub pipeline: Pipeline,
    pub format: Format,
    pub search: Option<SearchBounds>,
    pub verify: VerifyGrid,
    pub workers: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn as_int(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| invalid(format!("{what} must be an integer, found {v}")))
}

fn lattice_vector(v: &Value) -> Result<Vec<i64>> {
    let arr = v.as_array().ok_or_else(|| invalid(format!("expected a coordinate array, found {v}")))?;
    arr.iter()
        .map(|c| match c.as_i64() {
            Some(i) => Ok(i),
            None if c.is_number() => Err(Error::NonLatticeVertex(c.to_string())),
            None => Err(invalid(format!("coordinate {c} is not a number"))),
        })
        .collect()
}

pub fn parse_variety(v: &Value) -> Result<PolarizedToricVariety> {
    match v.get("type").and_then(Value::as_str) {
        Some("polytope") => {
            let verts = v
                .get("vertices")
                .and_then(Value::as_array)
                .ok_or_else(|| invalid("polytope needs a \"vertices\" array"))?
                .iter()
                .map(lattice_vector)
                .collect::<Result<Vec<_>>>()?;
            let chart = match v.get("chart_vertex") {
                Some(c) => lattice_vector(c)?,
                None => verts.first().cloned().ok_or_else(|| invalid("empty vertex list"))?,
            };
            PolarizedToricVariety::new(&verts, &chart)
        }
        Some("projective_space") => {
            let n = as_int(v.get("n").unwrap_or(&Value::Null), "n")?;
            let d = as_int(v.get("d").unwrap_or(&Value::from(1)), "d")?;
            if n < 1 || d < 1 {
                return Err(invalid("projective_space needs n ≥ 1 and d ≥ 1"));
            }
            PolarizedToricVariety::projective_space(n as usize, d)
        }
        Some(other) => Err(invalid(format!("unknown variety type {other:?}"))),
        None => Err(invalid("variety needs a \"type\"")),
    }
}

pub fn parse_mode(v: Option<&Value>) -> Result<Mode> {
    match v.map(|m| m.as_str()) {
        None | Some(Some("chart")) => Ok(Mode::Chart),
        Some(Some("cox")) => Ok(Mode::Cox),
        Some(other) => Err(invalid(format!("unknown mode {other:?}"))),
    }
}

pub fn parse_flag(v: &Value, variety: &PolarizedToricVariety) -> Result<RawFlagIdeal> {
    let mode = parse_mode(v.get("mode"))?;
    let nvars = match mode {
        Mode::Chart => variety.dim(),
        Mode::Cox => variety.cox_rank(),
    };
    let ideals_v = v
        .get("ideals")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("flag_ideal needs an \"ideals\" array"))?;
    let mut ideals = Vec::with_capacity(ideals_v.len());
    for ideal in ideals_v {
        let gens_v = ideal
            .get("gens")
            .or(Some(ideal))
            .and_then(Value::as_array)
            .ok_or_else(|| invalid(format!("ideal {ideal} needs a \"gens\" array")))?;
        let mut gens = Vec::with_capacity(gens_v.len());
        for g in gens_v {
            let e = lattice_vector(g).map_err(|_| invalid(format!("bad exponent {g}")))?;
            if e.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: e.len() });
            }
            if e.iter().any(|&x| x < 0 || x > u32::MAX as i64) {
                return Err(invalid(format!("exponent {g} must be nonnegative")));
            }
            gens.push(e.into_iter().map(|x| x as u32).collect());
        }
        ideals.push(MonomialIdeal::from_exponents(nvars, &gens));
    }
    let levels = match v.get("N") {
        Some(n) => as_int(n, "N")? as usize,
        None => ideals.len(),
    };
    if levels != ideals.len() {
        return Err(invalid(format!("N = {levels} but {} ideals were given", ideals.len())));
    }
    Ok(RawFlagIdeal { levels, mode, ideals })
}

fn parse_pair(v: &Value, what: &str) -> Result<(u32, u32)> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([a, b]) => {
            let (a, b) = (as_int(a, what)?, as_int(b, what)?);
            if a < 1 || b < a {
                return Err(invalid(format!("{what} must be [lo, hi] with 1 ≤ lo ≤ hi")));
            }
            Ok((a as u32, b as u32))
        }
        _ => Err(invalid(format!("{what} must be a two-element array"))),
    }
}

fn parse_r(v: Option<&Value>) -> Result<Vec<u32>> {
    let list = match v {
        None => vec![1],
        Some(Value::Array(a)) => a.iter().map(|x| as_int(x, "r")).collect::<Result<Vec<_>>>()?,
        Some(x) => vec![as_int(x, "r")?],
    };
    if list.is_empty() || list.iter().any(|&r| r < 1 || r > u32::MAX as i64) {
        return Err(invalid("r must be a positive integer or a nonempty list of them"));
    }
    Ok(list.into_iter().map(|r| r as u32).collect())
}

impl Job {
    pub fn from_json(text: &str) -> Result<Job> {
        let v: Value = serde_json::from_str(text).map_err(|e| invalid(format!("malformed JSON: {e}")))?;
        Job::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Job> {
        if !v.is_object() {
            return Err(invalid("a job must be a JSON object"));
        }
        let variety = parse_variety(v.get("variety").ok_or_else(|| invalid("job needs a \"variety\""))?)?;
        let raw_flag = v.get("flag_ideal").map(|f| parse_flag(f, &variety)).transpose()?;
        let flag = raw_flag.clone().map(|raw| FlagIdeal::validate(raw, &variety)).transpose()?;
        let mut options = FitOptions::default();
        if let Some(k) = v.get("K_range") {
            options.k_range = Some(parse_pair(k, "K_range")?);
        }
        if let Some(g) = v.get("guard") {
            options.guard = as_int(g, "guard")?.max(0) as usize;
        }
        if let Some(c) = v.get("K_cap") {
            options.k_cap = as_int(c, "K_cap")?.max(1) as u32;
        }
        let pipeline = match v.get("pipeline") {
            Some(p) => p.as_str().ok_or_else(|| invalid("pipeline must be a string"))?.parse()?,
            None => Pipeline::Both,
        };
        let format = match v.get("format").map(|f| f.as_str()) {
            None | Some(Some("json")) => Format::Json,
            Some(Some("table")) => Format::Table,
            Some(other) => return Err(invalid(format!("unknown format {other:?}"))),
        };
        let search = v
            .get("search")
            .map(|s| serde_json::from_value::<SearchBounds>(s.clone()).map_err(|e| invalid(format!("bad search bounds: {e}"))))
            .transpose()?;
        let verify = match v.get("verify") {
            Some(g) => serde_json::from_value(g.clone()).map_err(|e| invalid(format!("bad verify grid: {e}")))?,
            None => VerifyGrid::default(),
        };
        let workers = v.get("workers").map(|w| as_int(w, "workers")).transpose()?.map(|w| w.max(1) as usize);
        let cache_dir = v.get("cache_dir").and_then(Value::as_str).map(PathBuf::from);
        Ok(Job {
            variety,
            flag,
            raw_flag,
            r: parse_r(v.get("r"))?,
            options,
            pipeline,
            format,
            search,
            verify,
            workers,
            cache_dir,
        })
    }

    pub fn require_flag(&self) -> Result<&FlagIdeal> {
        self.flag.as_ref().ok_or_else(|| invalid("job needs a \"flag_ideal\""))
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    // serde_json's default map is ordered, so going through Value sorts keys
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

/// Compact single-line JSON with sorted keys.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    serde_json::to_string(&v).expect("values serialize")
}

/// Every number in a JSON document is an integer and every string that
/// looks numeric is `p` or `p/q` in lowest terms.
pub fn exact_numbers_only(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_i64() || n.is_u64(),
        Value::String(s) => {
            let looks_numeric = s.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-')
                && s.chars().all(|c| c.is_ascii_digit() || c == '-' || c == '/' || c == '.' || c == 'e' || c == 'E');
            !looks_numeric || is_exact_rational_string(s)
        }
        Value::Array(a) => a.iter().all(exact_numbers_only),
        Value::Object(o) => o.values().all(exact_numbers_only),
        _ => true,
    }
}

/// `-?\d+` or `-?\d+/\d+` with positive denominator in lowest terms.
pub fn is_exact_rational_string(s: &str) -> bool {
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let body = s.strip_prefix('-').unwrap_or(s);
    match body.split_once('/') {
        None => digits(body) && (body == "0" || !body.starts_with('0')) && s != "-0",
        Some((p, q)) => {
            digits(p)
                && digits(q)
                && !q.starts_with('0')
                && q != "1"
                && crate::exact::parse(s).is_some_and(|r| crate::exact::to_string(&r) == s)
        }
    }
}
