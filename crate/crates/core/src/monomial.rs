//! Monomial ideals represented by their minimal generators.

use std::fmt;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `self | other`, i.e. componentwise `≤`.
    pub fn divides(&self, other: &[u32]) -> bool {
        self.0.iter().zip(other).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Keep only the coordinates listed in `coords` (set the others to 1).
    pub fn restrict(&self, coords: &[usize]) -> Monomial {
        Monomial(coords.iter().map(|&i| self.0[i]).collect())
    }
}

/// A monomial ideal in `nvars` variables. Generators are minimal and sorted
/// lexicographically, so structural equality is ideal equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialIdeal {
    nvars: usize,
    gens: Vec<Monomial>,
}

/// Minimal generators of the ideal generated by `gens`.
pub fn minimalize(nvars: usize, gens: impl IntoIterator<Item = Monomial>) -> MonomialIdeal {
    let mut all: Vec<Monomial> = gens.into_iter().collect();
    all.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
    all.dedup();
    let mut kept: Vec<Monomial> = Vec::with_capacity(all.len());
    for g in all {
        if !kept.iter().any(|k| k.divides(&g.0)) {
            kept.push(g);
        }
    }
    kept.sort();
    MonomialIdeal { nvars, gens: kept }
}

impl MonomialIdeal {
    pub fn new(nvars: usize, gens: impl IntoIterator<Item = Monomial>) -> Self {
        minimalize(nvars, gens)
    }

    pub fn from_exponents(nvars: usize, gens: &[Vec<u32>]) -> Self {
        minimalize(nvars, gens.iter().cloned().map(Monomial))
    }

    pub fn zero(nvars: usize) -> Self {
        MonomialIdeal { nvars, gens: Vec::new() }
    }

    pub fn unit(nvars: usize) -> Self {
        MonomialIdeal { nvars, gens: vec![Monomial::one(nvars)] }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gens(&self) -> &[Monomial] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_one()
    }

    pub fn contains(&self, exponent: &[u32]) -> bool {
        self.gens.iter().any(|g| g.divides(exponent))
    }

    /// `other ⊆ self`.
    pub fn contains_ideal(&self, other: &MonomialIdeal) -> bool {
        other.gens.iter().all(|g| self.contains(&g.0))
    }

    pub fn product(&self, other: &MonomialIdeal) -> MonomialIdeal {
        if self.is_unit() {
            return other.clone();
        }
        if other.is_unit() {
            return self.clone();
        }
        minimalize(self.nvars, self.gens.iter().flat_map(|a| other.gens.iter().map(move |b| a.mul(b))))
    }

    pub fn sum(&self, other: &MonomialIdeal) -> MonomialIdeal {
        minimalize(self.nvars, self.gens.iter().chain(&other.gens).cloned())
    }

    pub fn power(&self, k: u32) -> MonomialIdeal {
        (0..k).fold(MonomialIdeal::unit(self.nvars), |acc, _| acc.product(self))
    }

    /// Dehomogenize onto the coordinates `coords`.
    pub fn restrict(&self, coords: &[usize]) -> MonomialIdeal {
        minimalize(coords.len(), self.gens.iter().map(|g| g.restrict(coords)))
    }

    /// Smallest `a` with `x_i^a` in the ideal.
    pub fn pure_power(&self, i: usize) -> Option<u32> {
        self.gens
            .iter()
            .filter(|g| g.0.iter().enumerate().all(|(j, &e)| j == i || e == 0))
            .map(|g| g.0[i])
            .min()
    }

    /// Contains a power of every variable (finite colength).
    pub fn is_primary_to_origin(&self) -> bool {
        (0..self.nvars).all(|i| self.pure_power(i).is_some())
    }

    pub fn max_degree(&self) -> u32 {
        self.gens.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest exponent of variable `i` among the generators.
    pub fn max_exponent(&self, i: usize) -> u32 {
        self.gens.iter().map(|g| g.0[i]).max().unwrap_or(0)
    }

    pub fn exponents(&self) -> Vec<Vec<u32>> {
        self.gens.iter().map(|g| g.0.clone()).collect()
    }

    /// Renders with the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        IdealDisplay { ideal: self, names }
    }
}

struct IdealDisplay<'a> {
    ideal: &'a MonomialIdeal,
    names: &'a [String],
}

impl fmt::Display for IdealDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ideal.is_zero() {
            return write!(f, "(0)");
        }
        let parts: Vec<String> = self.ideal.gens.iter().rev().map(|g| monomial_string(&g.0, self.names)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub(crate) fn monomial_string(exp: &[u32], names: &[String]) -> String {
    let s: String = exp
        .iter()
        .zip(names)
        .filter(|(&e, _)| e > 0)
        .map(|(&e, n)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect::<Vec<_>>()
        .join("*");
    if s.is_empty() {
        "1".to_string()
    } else {
        s
    }
}

/// `x, y, z, w` for up to four chart variables, `x1, x2, …` beyond.
pub fn chart_names(n: usize) -> Vec<String> {
    if n <= 4 {
        ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

pub fn cox_names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("X{i}")).collect()
}
