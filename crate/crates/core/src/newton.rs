//! Newton polyhedra of point-supported flag ideals.
//!
//! For `𝒥 = Σ I_j t^j + (t^N)` in the chart `𝔸ⁿ × 𝔸¹` the Newton polyhedron
//! is `conv(⋃_j gens(I_j)×{j} ∪ {(0,N)}) + ℝ^{n+1}_{≥0}`. Its compact facets
//! are the exceptional divisors of the normalized blow-up: the facet with
//! primitive normal `w` carries multiplicity `ord_w = min ⟨w, NP⟩` in `E` and
//! discrepancy `|w|₁ − 1` over the smooth chart. The lower envelope
//! `Φ(x) = min{s : (x, s) ∈ NP}` is the asymptotic `t`-degree.

use std::collections::BTreeSet;

use itertools::Itertools;
use num::{BigInt, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::flag::{FlagIdeal, Mode};
use crate::lattice::LatticePolytope;
use crate::linalg;

/// A compact facet of the Newton polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalFacet {
    /// Primitive inner normal `w ∈ ℤ^{n+1}`, `t`-coordinate last.
    pub normal: Vec<i64>,
    /// `ord_w(𝒥) = min ⟨w, NP⟩`.
    pub order: i64,
    /// `a_w = Σᵢ wᵢ − 1`.
    pub discrepancy: i64,
    /// Vertices of the facet, lexicographically sorted.
    pub vertices: Vec<Vec<i64>>,
}

impl ExceptionalFacet {
    /// Value of the affine piece `(ord − ⟨w_x, x⟩)/w_t` at a chart point.
    pub fn envelope_at(&self, x: &[Rational]) -> Rational {
        let n = self.normal.len() - 1;
        let mut acc = Rational::from_integer(BigInt::from(self.order));
        for (w, xi) in self.normal[..n].iter().zip(x) {
            acc -= xi * Rational::from_integer(BigInt::from(*w));
        }
        acc / Rational::from_integer(BigInt::from(self.normal[n]))
    }

    /// The facet projected to chart space, as a full-dimensional polytope,
    /// with the `t`-height of each projected vertex.
    pub(crate) fn projection(&self) -> Result<(LatticePolytope, Vec<i64>)> {
        let n = self.normal.len() - 1;
        let xs: Vec<Vec<i64>> = self.vertices.iter().map(|v| v[..n].to_vec()).collect();
        let poly = LatticePolytope::from_points(&xs)?;
        let heights = poly
            .vertices()
            .iter()
            .map(|x| {
                let lifted = self.vertices.iter().find(|v| &v[..n] == x.as_slice()).expect("projection is injective");
                lifted[n]
            })
            .collect();
        Ok((poly, heights))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolyhedron {
    /// Ambient dimension `n + 1`.
    dim: usize,
    levels: usize,
    vertices: Vec<Vec<i64>>,
    facets: Vec<ExceptionalFacet>,
}

impl NewtonPolyhedron {
    pub fn new(flag: &FlagIdeal) -> Result<Self> {
        if flag.mode() != Mode::Chart {
            return Err(Error::UnsupportedMode("the Newton polyhedron is built in chart mode".into()));
        }
        let n = flag.nvars();
        if flag.is_trivial() {
            return Ok(Self { dim: n + 1, levels: 0, vertices: Vec::new(), facets: Vec::new() });
        }
        if !flag.is_point_supported() {
            return Err(Error::UnsupportedMode("the Newton polyhedron needs a point-supported ideal".into()));
        }
        let levels = flag.levels();
        let mut points: BTreeSet<Vec<i64>> = BTreeSet::new();
        for (j, ideal) in flag.ideals().iter().enumerate() {
            for g in ideal.gens() {
                let mut p: Vec<i64> = g.0.iter().map(|&e| e as i64).collect();
                p.push(j as i64);
                points.insert(p);
            }
        }
        let mut apex = vec![0i64; n + 1];
        apex[n] = levels as i64;
        points.insert(apex);
        // dominated points never lie on a compact face
        let points: Vec<Vec<i64>> = points
            .iter()
            .filter(|p| !points.iter().any(|q| q != *p && q.iter().zip(p.iter()).all(|(a, b)| a <= b)))
            .cloned()
            .collect();

        let dim = n + 1;
        let mut facets: Vec<ExceptionalFacet> = Vec::new();
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        for subset in (0..points.len()).combinations(dim) {
            let base = &points[subset[0]];
            let diffs: Vec<Vec<i64>> = subset[1..].iter().map(|&i| linalg::sub(&points[i], base)).collect();
            let mut w = linalg::primitive(&linalg::cofactor_normal(&diffs, dim));
            if w.iter().all(|&c| c == 0) {
                continue;
            }
            if w.iter().any(|&c| c < 0) {
                w.iter_mut().for_each(|c| *c = -*c);
            }
            // mixed signs: not a supporting hyperplane of anything bounded below
            if w.iter().any(|&c| c < 0) || seen.contains(&w) {
                continue;
            }
            let order = linalg::dot(&w, base);
            if points.iter().any(|p| linalg::dot(&w, p) < order) {
                continue;
            }
            seen.insert(w.clone());
            if order == 0 {
                // coordinate facet
                continue;
            }
            if w.contains(&0) {
                return Err(Error::NonPositiveExceptionalRay(w));
            }
            let on: Vec<Vec<i64>> = points.iter().filter(|p| linalg::dot(&w, p) == order).cloned().collect();
            let xs: Vec<Vec<i64>> = on.iter().map(|p| p[..n].to_vec()).collect();
            let hull = LatticePolytope::from_points(&xs)?;
            let mut verts: Vec<Vec<i64>> = on.into_iter().filter(|p| hull.vertex_index(&p[..n]).is_some()).collect();
            verts.sort();
            let discrepancy = w.iter().sum::<i64>() - 1;
            facets.push(ExceptionalFacet { normal: w, order, discrepancy, vertices: verts });
        }
        facets.sort_by(|a, b| a.normal.cmp(&b.normal));
        let vertices: Vec<Vec<i64>> =
            facets.iter().flat_map(|f| f.vertices.iter().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        Ok(Self { dim, levels, vertices, facets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    /// Compact facets sorted lexicographically by normal.
    pub fn facets(&self) -> &[ExceptionalFacet] {
        &self.facets
    }

    pub fn facet(&self, normal: &[i64]) -> Option<&ExceptionalFacet> {
        self.facets.iter().find(|f| f.normal == normal)
    }

    /// `Φ(x) = max(0, maxᵥ (ord_w − ⟨w_x, x⟩)/w_t)` for `x ≥ 0`.
    pub fn phi_value(&self, x: &[Rational]) -> Rational {
        self.facets.iter().map(|f| f.envelope_at(x)).fold(Rational::zero(), |a, b| if b > a { b } else { a })
    }

    /// Whether the lattice point `p ∈ ℤ^{n+1}_{≥0}` lies in the polyhedron.
    pub fn contains(&self, p: &[i64]) -> bool {
        if p.iter().any(|&c| c < 0) {
            return false;
        }
        let n = self.dim - 1;
        let x: Vec<Rational> = p[..n].iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect();
        Rational::from_integer(BigInt::from(p[n])) >= self.phi_value(&x)
    }
}

/// Free-function form of [`NewtonPolyhedron::new`].
pub fn newton_polyhedron(flag: &FlagIdeal) -> Result<NewtonPolyhedron> {
    NewtonPolyhedron::new(flag)
}

pub fn phi_value(np: &NewtonPolyhedron, x: &[Rational]) -> Rational {
    np.phi_value(x)
}
