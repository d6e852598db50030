//! Flag ideals `𝒥 = I₀ + I₁t + … + I_{N−1}t^{N−1} + (t^N)` on `X × 𝔸¹`.
//!
//! Ideals are monomial. In chart mode they live in the affine chart at the
//! variety's distinguished vertex; in Cox mode they are given in homogeneous
//! coordinates (one variable per facet) and act on every vertex chart at
//! once through dehomogenization.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::PolarizedToricVariety;
use crate::monomial::{chart_names, cox_names, monomial_string, MonomialIdeal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Chart,
    Cox,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportClass {
    /// `V(I_j) ⊆ {chart origin}` for every non-unit `I_j`.
    PointSupported,
    General,
}

/// Unvalidated chain as read from input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawFlagIdeal {
    pub levels: usize,
    pub mode: Mode,
    pub ideals: Vec<MonomialIdeal>,
}

impl RawFlagIdeal {
    pub fn new(mode: Mode, ideals: Vec<MonomialIdeal>) -> Self {
        Self { levels: ideals.len(), mode, ideals }
    }

    /// `t^c·𝒥`: prepend `c` zero ideals.
    pub fn times_t_power(&self, c: usize) -> Self {
        let nvars = self.ideals.first().map(MonomialIdeal::nvars).unwrap_or(0);
        let mut ideals = vec![MonomialIdeal::zero(nvars); c];
        ideals.extend(self.ideals.iter().cloned());
        Self { levels: self.levels + c, mode: self.mode, ideals }
    }
}

/// The chain restricted to one affine vertex chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalChain {
    /// Vertex index in the polytope.
    pub vertex: usize,
    /// Cox indices of the chart coordinates (chart mode: unused, empty).
    pub coords: Vec<usize>,
    pub ideals: Vec<MonomialIdeal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagIdeal {
    levels: usize,
    mode: Mode,
    ideals: Vec<MonomialIdeal>,
    t_shift: usize,
    support: SupportClass,
    charts: Vec<LocalChain>,
}

impl FlagIdeal {
    /// Checks the chain, strips `t`-powers and trailing unit ideals, and
    /// classifies the support. A chain that becomes empty is the trivial
    /// configuration (`levels() == 0`).
    pub fn validate(raw: RawFlagIdeal, variety: &PolarizedToricVariety) -> Result<Self> {
        if raw.levels == 0 {
            return Err(Error::InvalidInput("a flag ideal needs N ≥ 1".into()));
        }
        if raw.ideals.len() != raw.levels {
            return Err(Error::InvalidInput(format!("N = {} but {} ideals were given", raw.levels, raw.ideals.len())));
        }
        let nvars = match raw.mode {
            Mode::Chart => variety.dim(),
            Mode::Cox => variety.cox_rank(),
        };
        if let Some(bad) = raw.ideals.iter().find(|i| i.nvars() != nvars) {
            return Err(Error::DimensionMismatch { expected: nvars, found: bad.nvars() });
        }
        if raw.mode == Mode::Cox && !variety.is_smooth() {
            return Err(Error::UnsupportedMode("cox mode needs a smooth polytope".into()));
        }

        let layout: Vec<(usize, Vec<usize>)> = match raw.mode {
            Mode::Chart => vec![(variety.chart_vertex_index(), Vec::new())],
            Mode::Cox => {
                let p = variety.polytope();
                (0..p.vertices().len()).map(|v| (v, p.facets_at(v))).collect()
            }
        };
        let localize = |ideals: &[MonomialIdeal]| -> Vec<LocalChain> {
            layout
                .iter()
                .map(|(v, coords)| LocalChain {
                    vertex: *v,
                    coords: coords.clone(),
                    ideals: ideals
                        .iter()
                        .map(|i| if coords.is_empty() { i.clone() } else { i.restrict(coords) })
                        .collect(),
                })
                .collect()
        };
        let charts = localize(&raw.ideals);
        for j in 0..raw.levels.saturating_sub(1) {
            if charts.iter().any(|c| !c.ideals[j + 1].contains_ideal(&c.ideals[j])) {
                return Err(Error::ChainViolation { lower: j, upper: j + 1 });
            }
        }

        let t_shift = raw.ideals.iter().take_while(|i| i.is_zero()).count();
        let mut ideals: Vec<MonomialIdeal> = raw.ideals[t_shift..].to_vec();
        let mut charts: Vec<LocalChain> = charts
            .into_iter()
            .map(|mut c| {
                c.ideals.drain(..t_shift);
                c
            })
            .collect();
        while let Some(last) = ideals.len().checked_sub(1) {
            if charts.iter().all(|c| c.ideals[last].is_unit()) {
                ideals.pop();
                charts.iter_mut().for_each(|c| {
                    c.ideals.pop();
                });
            } else {
                break;
            }
        }
        charts.retain(|c| !c.ideals.iter().all(MonomialIdeal::is_unit));

        let support = match raw.mode {
            Mode::Chart
                if ideals.iter().all(|i| i.is_unit() || i.is_primary_to_origin()) =>
            {
                SupportClass::PointSupported
            }
            _ => SupportClass::General,
        };
        Ok(Self { levels: ideals.len(), mode: raw.mode, ideals, t_shift, support, charts })
    }

    /// `N` after normalization; `0` for the trivial configuration.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn ideals(&self) -> &[MonomialIdeal] {
        &self.ideals
    }

    /// Number of `t`-factors stripped during validation.
    pub fn t_shift(&self) -> usize {
        self.t_shift
    }

    pub fn support(&self) -> SupportClass {
        self.support
    }

    pub fn is_trivial(&self) -> bool {
        self.levels == 0
    }

    pub fn is_point_supported(&self) -> bool {
        self.support == SupportClass::PointSupported
    }

    /// Vertex charts on which the ideal is not the unit ideal.
    pub fn charts(&self) -> &[LocalChain] {
        &self.charts
    }

    pub fn nvars(&self) -> usize {
        self.ideals.first().map(MonomialIdeal::nvars).unwrap_or(0)
    }

    /// The normalized chain as raw input again (no `t`-shift).
    pub fn to_raw(&self) -> RawFlagIdeal {
        RawFlagIdeal::new(self.mode, self.ideals.clone())
    }

    /// Same ideal without the stripped `t`-power.
    pub fn without_shift(&self) -> FlagIdeal {
        FlagIdeal { t_shift: 0, ..self.clone() }
    }

    fn names(&self) -> Vec<String> {
        match self.mode {
            Mode::Chart => chart_names(self.nvars()),
            Mode::Cox => cox_names(self.nvars()),
        }
    }
}

impl fmt::Display for FlagIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names();
        let mut parts = Vec::new();
        for (j, ideal) in self.ideals.iter().enumerate() {
            let t = match j {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{j}"),
            };
            let body = if ideal.is_unit() {
                "(1)".to_string()
            } else {
                format!("{}", ideal.display_with(&names))
            };
            parts.push(format!("{body}{t}"));
        }
        parts.push(match self.levels {
            0 => "(1)".to_string(),
            1 => "(t)".to_string(),
            l => format!("(t^{l})"),
        });
        let body = parts.join(" + ");
        let mode = match self.mode {
            Mode::Chart => "",
            Mode::Cox => "cox: ",
        };
        match self.t_shift {
            0 => write!(f, "{mode}{body}"),
            1 => write!(f, "{mode}t·[{body}]"),
            c => write!(f, "{mode}t^{c}·[{body}]"),
        }
    }
}

/// Graded pieces `M_{k,j} = Σ_{j₁+…+j_k ≤ j} I_{j₁}⋯I_{j_k}` of `𝒥^k`,
/// with `I_j` the unit ideal for `j ≥ N`, memoized by dynamic programming
/// over `k`.
#[derive(Clone, Debug)]
pub struct PowerTable {
    levels: usize,
    nvars: usize,
    base: Vec<MonomialIdeal>,
    /// `powers[k-1][j]` for `j < k·N`.
    powers: Vec<Vec<MonomialIdeal>>,
}

impl PowerTable {
    pub fn new(ideals: &[MonomialIdeal]) -> Self {
        let nvars = ideals.first().map(MonomialIdeal::nvars).unwrap_or(0);
        Self { levels: ideals.len(), nvars, base: ideals.to_vec(), powers: Vec::new() }
    }

    fn base(&self, b: usize) -> Option<&MonomialIdeal> {
        self.base.get(b)
    }

    /// Ensure pieces up to power `k` are available.
    pub fn extend_to(&mut self, k: usize) {
        let n = self.levels;
        while self.powers.len() < k {
            let next = self.powers.len() + 1;
            let row: Vec<MonomialIdeal> = if next == 1 {
                self.base.clone()
            } else {
                let prev = &self.powers[next - 2];
                let prev_len = (next - 1) * n;
                (0..next * n)
                    .map(|j| {
                        let mut acc = MonomialIdeal::zero(self.nvars);
                        for b in 0..=j.min(n) {
                            let a = j - b;
                            let term = match (prev.get(a).filter(|_| a < prev_len), self.base(b)) {
                                (None, None) => MonomialIdeal::unit(self.nvars),
                                (None, Some(i)) => i.clone(),
                                (Some(m), None) => m.clone(),
                                (Some(m), Some(i)) => m.product(i),
                            };
                            if term.is_unit() {
                                return term;
                            }
                            acc = acc.sum(&term);
                        }
                        acc
                    })
                    .collect()
            };
            self.powers.push(row);
        }
    }

    /// `M_{k,j}`; call [`extend_to`](Self::extend_to) first.
    pub fn piece(&self, k: usize, j: usize) -> MonomialIdeal {
        assert!(k >= 1 && k <= self.powers.len(), "power {k} not tabulated");
        if j >= k * self.levels {
            MonomialIdeal::unit(self.nvars)
        } else {
            self.powers[k - 1][j].clone()
        }
    }

    /// Least `j` with `x ∈ M_{k,j}`; pieces up to `k` must be tabulated.
    pub fn t_degree(&self, k: usize, x: &[u32]) -> usize {
        let row = &self.powers[k - 1];
        // pieces increase with j and M_{k,kN} is the unit ideal
        row.partition_point(|m| !m.contains(x))
    }
}

/// `M_{k,j}` of the ideals as given (ring level, before dehomogenization).
pub fn graded_piece(flag: &FlagIdeal, k: usize, j: usize) -> MonomialIdeal {
    assert!(k >= 1, "k must be positive");
    if flag.is_trivial() {
        return MonomialIdeal::unit(flag.nvars());
    }
    let mut table = PowerTable::new(flag.ideals());
    table.extend_to(k);
    table.piece(k, j)
}

/// Filtration level of `x^u` in `𝒥^k`, where `u ∈ k·r·P`. Includes the
/// stripped `t`-power, so it is the level for the ideal as originally given.
pub fn t_degree(variety: &PolarizedToricVariety, flag: &FlagIdeal, r: u32, k: usize, u: &[i64]) -> Result<usize> {
    let evaluator = TDegree::new(variety, flag)?;
    let mut evaluator = evaluator;
    evaluator.extend_to(k);
    evaluator.level(k, u, (k as i64) * (r as i64))
}

/// Multi-chart filtration evaluator shared by the weight engine.
#[derive(Clone, Debug)]
pub struct TDegree<'a> {
    variety: &'a PolarizedToricVariety,
    flag: &'a FlagIdeal,
    tables: Vec<PowerTable>,
}

impl<'a> TDegree<'a> {
    pub fn new(variety: &'a PolarizedToricVariety, flag: &'a FlagIdeal) -> Result<Self> {
        if flag.mode() == Mode::Chart && !flag.is_point_supported() && !flag.is_trivial() {
            return Err(Error::UnsupportedMode(
                "chart mode needs an ideal supported at the chart origin; use cox mode".into(),
            ));
        }
        let tables = flag.charts().iter().map(|c| PowerTable::new(&c.ideals)).collect();
        Ok(Self { variety, flag, tables })
    }

    pub fn extend_to(&mut self, k: usize) {
        self.tables.iter_mut().for_each(|t| t.extend_to(k));
    }

    /// Level of the normalized ideal (no `t`-shift) for `u ∈ scale·P`.
    pub(crate) fn normalized_level(&self, k: usize, u: &[i64], scale: i64) -> usize {
        if self.flag.is_trivial() {
            return 0;
        }
        match self.flag.mode() {
            Mode::Chart => {
                let x = self.variety.chart_coords_unchecked(u, scale);
                self.tables[0].t_degree(k, &x)
            }
            Mode::Cox => {
                let cox = self.variety.cox_coords(u, scale);
                self.flag
                    .charts()
                    .iter()
                    .zip(&self.tables)
                    .map(|(chart, table)| {
                        let x: Vec<u32> = chart.coords.iter().map(|&i| cox[i]).collect();
                        table.t_degree(k, &x)
                    })
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    pub fn level(&self, k: usize, u: &[i64], scale: i64) -> Result<usize> {
        if !self.variety.polytope().contains(u, scale) {
            return Err(Error::PointOutsidePolytope { point: u.to_vec(), scale });
        }
        Ok(self.normalized_level(k, u, scale) + k * self.flag.t_shift())
    }
}

/// Human-readable monomial, used in reports.
pub fn describe_monomial(flag: &FlagIdeal, exp: &[u32]) -> String {
    monomial_string(exp, &flag.names())
}
