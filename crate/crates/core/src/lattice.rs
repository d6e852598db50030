//! Lattice polytopes and the polarized toric varieties they describe.
//!
//! A full-dimensional lattice polytope `P ⊂ ℝⁿ` encodes a projective toric
//! variety `X` with an ample line bundle `L`. Sections of `L^k` are the
//! lattice points of `kP`, facets are the torus-invariant prime divisors, and
//! smooth vertices are affine charts `𝔸ⁿ` with coordinates given by the
//! lattice distances to the facets through that vertex.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg;

/// Facet inequality `⟨normal, x⟩ ≥ offset` with a primitive inner normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    /// Lattice distance of `x` from the facet hyperplane of `scale·P`.
    pub fn distance(&self, x: &[i64], scale: i64) -> i64 {
        linalg::dot(&self.normal, x) - scale * self.offset
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<Vec<i64>>,
    facets: Vec<Facet>,
    /// `incidence[f][v]`: vertex `v` lies on facet `f`.
    incidence: Vec<Vec<bool>>,
}

impl LatticePolytope {
    /// Convex hull of a finite set of lattice points. Points that are not
    /// vertices are dropped; the result must be full-dimensional.
    pub fn from_points(points: &[Vec<i64>]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::NotFullDimensional);
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::NotFullDimensional);
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        let points: Vec<Vec<i64>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let refs: Vec<&[i64]> = points.iter().map(Vec::as_slice).collect();
        if linalg::affine_dim(&refs) != dim {
            return Err(Error::NotFullDimensional);
        }

        let mut facets: Vec<Facet> = Vec::new();
        for subset in (0..points.len()).combinations(dim) {
            let base = &points[subset[0]];
            let diffs: Vec<Vec<i64>> = subset[1..].iter().map(|&i| linalg::sub(&points[i], base)).collect();
            let normal = linalg::cofactor_normal(&diffs, dim);
            if normal.iter().all(|&c| c == 0) {
                continue;
            }
            let normal = linalg::primitive(&normal);
            let level = linalg::dot(&normal, base);
            let (mut above, mut below) = (false, false);
            for p in &points {
                let v = linalg::dot(&normal, p) - level;
                above |= v > 0;
                below |= v < 0;
            }
            let facet = match (above, below) {
                (true, false) => Facet { normal, offset: level },
                (false, true) => Facet { normal: normal.iter().map(|c| -c).collect(), offset: -level },
                _ => continue,
            };
            if !facets.contains(&facet) {
                facets.push(facet);
            }
        }
        // descending lexicographic order of normals fixes the Cox variable order
        facets.sort_by(|a, b| b.normal.cmp(&a.normal));

        let vertices: Vec<Vec<i64>> = points
            .into_iter()
            .filter(|p| {
                let tight: Vec<Vec<i64>> =
                    facets.iter().filter(|f| f.distance(p, 1) == 0).map(|f| f.normal.clone()).collect();
                linalg::rank(&tight) == dim
            })
            .collect();
        let incidence = facets
            .iter()
            .map(|f| vertices.iter().map(|v| f.distance(v, 1) == 0).collect())
            .collect();
        Ok(Self { dim, vertices, facets, incidence })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices in ascending lexicographic order.
    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    /// Facets in descending lexicographic order of their normals.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn vertex_index(&self, v: &[i64]) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }

    /// Facet indices through vertex `v`.
    pub fn facets_at(&self, v: usize) -> Vec<usize> {
        (0..self.facets.len()).filter(|&f| self.incidence[f][v]).collect()
    }

    pub fn contains(&self, x: &[i64], scale: i64) -> bool {
        x.len() == self.dim && self.facets.iter().all(|f| f.distance(x, scale) >= 0)
    }

    /// Bounding box of `scale·P` as per-axis inclusive ranges.
    fn bounding_box(&self, scale: i64) -> Vec<(i64, i64)> {
        (0..self.dim)
            .map(|i| {
                let lo = self.vertices.iter().map(|v| v[i]).min().unwrap_or(0);
                let hi = self.vertices.iter().map(|v| v[i]).max().unwrap_or(0);
                (lo * scale, hi * scale)
            })
            .collect()
    }

    /// All lattice points of `scale·P` in lexicographic order.
    pub fn lattice_points(&self, scale: i64) -> Vec<Vec<i64>> {
        let bbox = self.bounding_box(scale);
        let mut out = Vec::new();
        let mut cur: Vec<i64> = bbox.iter().map(|r| r.0).collect();
        loop {
            if self.contains(&cur, scale) {
                out.push(cur.clone());
            }
            // odometer increment, last axis fastest
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if cur[axis] < bbox[axis].1 {
                    cur[axis] += 1;
                    for (c, r) in cur.iter_mut().zip(&bbox).skip(axis + 1) {
                        *c = r.0;
                    }
                    break;
                }
            }
        }
    }

    pub fn count_lattice_points(&self, scale: i64) -> u64 {
        self.lattice_points(scale).len() as u64
    }

    /// Pulling triangulation from the lowest vertex; simplices are lists of
    /// vertex indices.
    pub fn triangulation(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut out = Vec::new();
        self.triangulate_face(&all, self.dim, &mut out);
        out
    }

    /// Triangulation of the facet `f` (simplices of dimension `n − 1`).
    pub fn facet_triangulation(&self, f: usize) -> Vec<Vec<usize>> {
        let face: Vec<usize> = (0..self.vertices.len()).filter(|&v| self.incidence[f][v]).collect();
        let mut out = Vec::new();
        self.triangulate_face(&face, self.dim - 1, &mut out);
        out
    }

    fn triangulate_face(&self, face: &[usize], dim: usize, out: &mut Vec<Vec<usize>>) {
        if dim == 0 {
            out.push(vec![face[0]]);
            return;
        }
        let apex = face[0];
        let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for row in &self.incidence {
            let sub: Vec<usize> = face.iter().copied().filter(|&v| row[v]).collect();
            if sub.len() < dim || sub.contains(&apex) || sub.len() == face.len() {
                continue;
            }
            let pts: Vec<&[i64]> = sub.iter().map(|&v| self.vertices[v].as_slice()).collect();
            if linalg::affine_dim(&pts) == dim - 1 {
                subfaces.insert(sub);
            }
        }
        for sub in subfaces {
            let mut inner = Vec::new();
            self.triangulate_face(&sub, dim - 1, &mut inner);
            for mut simplex in inner {
                simplex.insert(0, apex);
                out.push(simplex);
            }
        }
    }

    /// `n!·vol(P)`, the lattice-normalized volume.
    pub fn normalized_volume(&self) -> i64 {
        self.triangulation()
            .iter()
            .map(|s| {
                let base = &self.vertices[s[0]];
                let rows: Vec<Vec<i64>> = s[1..].iter().map(|&i| linalg::sub(&self.vertices[i], base)).collect();
                linalg::det(&rows).abs() as i64
            })
            .sum()
    }

    /// `(n−1)!·vol(F)` measured in the affine lattice of facet `f`.
    pub fn facet_normalized_volume(&self, f: usize) -> i64 {
        let z = linalg::unit_solution(&self.facets[f].normal);
        self.facet_triangulation(f)
            .iter()
            .map(|s| {
                let base = &self.vertices[s[0]];
                let mut rows: Vec<Vec<i64>> =
                    s[1..].iter().map(|&i| linalg::sub(&self.vertices[i], base)).collect();
                rows.push(z.clone());
                linalg::det(&rows).abs() as i64
            })
            .sum()
    }

    /// Whether the cone at vertex `v` is unimodular.
    pub fn is_smooth_vertex(&self, v: usize) -> bool {
        let fs = self.facets_at(v);
        if fs.len() != self.dim {
            return false;
        }
        let rows: Vec<Vec<i64>> = fs.iter().map(|&f| self.facets[f].normal.clone()).collect();
        linalg::det(&rows).abs() == 1
    }

    /// Image under `x ↦ M·x + t` for unimodular `M`.
    pub fn transform(&self, m: &[Vec<i64>], shift: &[i64]) -> Result<Self> {
        let pts: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .map(|v| linalg::mat_vec(m, v).iter().zip(shift).map(|(a, b)| a + b).collect())
            .collect();
        Self::from_points(&pts)
    }
}

/// `(Lⁿ)` and `(L^{n−1}.K_X)` of a polarized toric variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntersectionNumbers {
    /// `(Lⁿ) = n!·vol(P)`.
    pub top: i64,
    /// `(L^{n−1}.K_X) = −(n−1)!·Σ_F vol(F)`.
    pub canonical: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizedToricVariety {
    polytope: LatticePolytope,
    chart_vertex: usize,
    /// Rows: inner normals of the facets through the chart vertex.
    chart_basis: Vec<Vec<i64>>,
    smooth: bool,
}

impl PolarizedToricVariety {
    pub fn new(vertices: &[Vec<i64>], chart_vertex: &[i64]) -> Result<Self> {
        let polytope = LatticePolytope::from_points(vertices)?;
        Self::from_polytope(polytope, chart_vertex)
    }

    pub fn from_polytope(polytope: LatticePolytope, chart_vertex: &[i64]) -> Result<Self> {
        if chart_vertex.len() != polytope.dim() {
            return Err(Error::DimensionMismatch { expected: polytope.dim(), found: chart_vertex.len() });
        }
        let v0 = polytope
            .vertex_index(chart_vertex)
            .ok_or_else(|| Error::NotAVertex(chart_vertex.to_vec()))?;
        if !polytope.is_smooth_vertex(v0) {
            return Err(Error::NonUnimodularChartVertex(chart_vertex.to_vec()));
        }
        let rows: Vec<Vec<i64>> = polytope.facets_at(v0).iter().map(|&f| polytope.facets()[f].normal.clone()).collect();
        // order chart coordinates by their dual edge directions, descending
        let inv = linalg::inverse_unimodular(&rows);
        let n = polytope.dim();
        let mut pairs: Vec<(Vec<i64>, Vec<i64>)> = (0..n)
            .map(|i| (inv.iter().map(|r| r[i]).collect::<Vec<i64>>(), rows[i].clone()))
            .collect();
        pairs.sort_by(|a, b| b.0.cmp(&a.0));
        let chart_basis = pairs.into_iter().map(|p| p.1).collect();
        let smooth = (0..polytope.vertices().len()).all(|v| polytope.is_smooth_vertex(v));
        Ok(Self { polytope, chart_vertex: v0, chart_basis, smooth })
    }

    /// `(ℙⁿ, 𝒪(d))` as the simplex `d·Δₙ`, charted at the origin.
    pub fn projective_space(n: usize, d: i64) -> Result<Self> {
        if n == 0 || d <= 0 {
            return Err(Error::InvalidInput(format!("projective space needs n ≥ 1 and d ≥ 1, got n={n}, d={d}")));
        }
        let mut verts = vec![vec![0; n]];
        for i in 0..n {
            let mut v = vec![0; n];
            v[i] = d;
            verts.push(v);
        }
        Self::new(&verts, &vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.polytope
    }

    pub fn chart_vertex(&self) -> &[i64] {
        &self.polytope.vertices()[self.chart_vertex]
    }

    pub fn chart_vertex_index(&self) -> usize {
        self.chart_vertex
    }

    /// Unimodular matrix `U` of the chart at the distinguished vertex.
    pub fn chart_basis(&self) -> &[Vec<i64>] {
        &self.chart_basis
    }

    /// All vertex cones unimodular.
    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    /// Number of torus-invariant prime divisors, i.e. Cox variables.
    pub fn cox_rank(&self) -> usize {
        self.polytope.facets().len()
    }

    /// `P(k) = #(kP ∩ ℤⁿ)`.
    pub fn ehrhart_count(&self, k: u64) -> u64 {
        self.polytope.count_lattice_points(k as i64)
    }

    pub fn intersection_numbers(&self) -> IntersectionNumbers {
        let p = &self.polytope;
        let boundary: i64 = (0..p.facets().len()).map(|f| p.facet_normalized_volume(f)).sum();
        IntersectionNumbers { top: p.normalized_volume(), canonical: -boundary }
    }

    /// Chart exponent `U·(u − scale·v₀)` of a lattice point of `scale·P`.
    pub fn chart_coords(&self, u: &[i64], scale: i64) -> Result<Vec<u32>> {
        if !self.polytope.contains(u, scale) {
            return Err(Error::PointOutsidePolytope { point: u.to_vec(), scale });
        }
        Ok(self.chart_coords_unchecked(u, scale))
    }

    pub(crate) fn chart_coords_unchecked(&self, u: &[i64], scale: i64) -> Vec<u32> {
        let v0 = self.chart_vertex();
        self.chart_basis
            .iter()
            .map(|row| row.iter().zip(u.iter().zip(v0)).map(|(a, (x, v))| a * (x - scale * v)).sum::<i64>() as u32)
            .collect()
    }

    /// Inverse of [`chart_coords`](Self::chart_coords) on rational points:
    /// whether chart point `x` lies in `scale·P`.
    pub(crate) fn chart_contains(&self, x: &[i64], scale: i64) -> bool {
        let inv = linalg::inverse_unimodular(&self.chart_basis);
        let y: Vec<i64> = linalg::mat_vec(&inv, x)
            .iter()
            .zip(self.chart_vertex())
            .map(|(a, v)| a + scale * v)
            .collect();
        self.polytope.contains(&y, scale)
    }

    /// Homogeneous (Cox) exponent: lattice distances to every facet.
    pub fn cox_coords(&self, u: &[i64], scale: i64) -> Vec<u32> {
        self.polytope.facets().iter().map(|f| f.distance(u, scale) as u32).collect()
    }

    /// Largest chart coordinate reached on `P`, per chart axis.
    pub fn chart_extent(&self) -> Vec<i64> {
        let v0 = self.chart_vertex();
        self.chart_basis
            .iter()
            .map(|row| {
                self.polytope
                    .vertices()
                    .iter()
                    .map(|v| linalg::dot(row, &linalg::sub(v, v0)))
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    /// Same variety polarized by `L^r`.
    pub fn scaled(&self, r: i64) -> Result<Self> {
        let verts: Vec<Vec<i64>> = self.polytope.vertices().iter().map(|v| v.iter().map(|x| x * r).collect()).collect();
        let chart: Vec<i64> = self.chart_vertex().iter().map(|x| x * r).collect();
        Self::new(&verts, &chart)
    }
}

/// Named polytopes used by the verification commands.
pub mod library {
    use super::PolarizedToricVariety;
    use crate::error::Result;

    pub fn projective_space(n: usize, d: i64) -> Result<PolarizedToricVariety> {
        PolarizedToricVariety::projective_space(n, d)
    }

    /// `∏ [0, sᵢ]`: a product of projective lines.
    pub fn product_of_lines(sides: &[i64]) -> Result<PolarizedToricVariety> {
        let n = sides.len();
        let verts: Vec<Vec<i64>> = (0..1u32 << n)
            .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { sides[i] } else { 0 }).collect())
            .collect();
        PolarizedToricVariety::new(&verts, &vec![0; n])
    }

    /// Hirzebruch surface `F_a` as `conv{(0,0), (b + a·c, 0), (b, c), (0, c)}`.
    pub fn hirzebruch(a: i64, b: i64, c: i64) -> Result<PolarizedToricVariety> {
        PolarizedToricVariety::new(&[vec![0, 0], vec![b + a * c, 0], vec![b, c], vec![0, c]], &[0, 0])
    }

    /// `F₁` with its anticanonical polarization; the (−1)-curve is the facet
    /// `x + y ≥ 1`.
    pub fn hirzebruch_one_anticanonical() -> Result<PolarizedToricVariety> {
        PolarizedToricVariety::new(&[vec![1, 0], vec![3, 0], vec![0, 3], vec![0, 1]], &[3, 0])
    }

    pub fn all() -> Vec<(&'static str, PolarizedToricVariety)> {
        let mut out = Vec::new();
        let mut push = |name, v: Result<PolarizedToricVariety>| {
            if let Ok(v) = v {
                out.push((name, v));
            }
        };
        push("P1(1)", projective_space(1, 1));
        push("P1(3)", projective_space(1, 3));
        push("P2(1)", projective_space(2, 1));
        push("P2(2)", projective_space(2, 2));
        push("P3(1)", projective_space(3, 1));
        push("P1xP1(2,1)", product_of_lines(&[2, 1]));
        push("P1xP1xP1", product_of_lines(&[1, 1, 1]));
        push("F1", hirzebruch(1, 1, 1));
        push("F2", hirzebruch(2, 1, 1));
        push("F1(-K)", hirzebruch_one_anticanonical());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(v: &PolarizedToricVariety, k: i64) -> u64 {
        // independent enumeration for simplices d·Δ: points with xᵢ ≥ 0, Σxᵢ ≤ dk
        let n = v.dim();
        let d = v.polytope().vertices().iter().flatten().copied().max().unwrap();
        let bound = d * k;
        let mut count = 0;
        let mut cur = vec![0i64; n];
        loop {
            if cur.iter().sum::<i64>() <= bound {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return count;
                }
                cur[i] += 1;
                if cur[i] <= bound {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn projective_line_descriptor() {
        let v = PolarizedToricVariety::new(&[vec![0], vec![5]], &[0]).unwrap();
        assert_eq!(v.dim(), 1);
        assert!(v.is_smooth());
        assert_eq!(v.chart_basis(), &[vec![1]]);
    }

    #[test]
    fn projective_plane_descriptor() {
        let v = PolarizedToricVariety::new(&[vec![0, 0], vec![2, 0], vec![0, 2]], &[0, 0]).unwrap();
        assert!(v.is_smooth());
        assert_eq!(v.chart_basis(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(v.cox_rank(), 3);
        // cox order puts the chart coordinates first and the divisor at infinity last
        assert_eq!(v.polytope().facets()[2].normal, vec![-1, -1]);
    }

    #[test]
    fn rejects_degenerate_input() {
        let err = PolarizedToricVariety::new(&[vec![0, 0], vec![1, 1], vec![2, 2]], &[0, 0]).unwrap_err();
        assert_eq!(err, Error::NotFullDimensional);
        // singular chart vertex: the cone at the origin of conv{0, (2,1), (0,1)} has det 2
        let err = PolarizedToricVariety::new(&[vec![0, 0], vec![2, 1], vec![0, 1]], &[0, 0]).unwrap_err();
        assert!(matches!(err, Error::NonUnimodularChartVertex(_)));
        let err = PolarizedToricVariety::new(&[vec![0, 0], vec![2, 0], vec![0, 2]], &[1, 0]).unwrap_err();
        assert!(matches!(err, Error::NotAVertex(_)));
        // interior points are dropped, not rejected
        let v = PolarizedToricVariety::new(&[vec![0, 0], vec![2, 0], vec![0, 2], vec![1, 0], vec![0, 1]], &[0, 0]).unwrap();
        assert_eq!(v.polytope().vertices().len(), 3);
    }

    #[test]
    fn ehrhart_examples() {
        let p1 = PolarizedToricVariety::projective_space(1, 2).unwrap();
        assert_eq!(p1.ehrhart_count(3), 7);
        let p2 = PolarizedToricVariety::projective_space(2, 2).unwrap();
        assert_eq!(p2.ehrhart_count(1), 6);
        for (_, v) in library::all() {
            assert_eq!(v.ehrhart_count(0), 1);
        }
        for k in 0..6 {
            assert_eq!(p2.ehrhart_count(k), brute_count(&p2, k as i64));
            let p3 = PolarizedToricVariety::projective_space(3, 1).unwrap();
            assert_eq!(p3.ehrhart_count(k), brute_count(&p3, k as i64));
        }
    }

    #[test]
    fn intersection_number_examples() {
        let p2 = PolarizedToricVariety::projective_space(2, 2).unwrap();
        assert_eq!(p2.intersection_numbers(), IntersectionNumbers { top: 4, canonical: -6 });
        let p1 = PolarizedToricVariety::projective_space(1, 1).unwrap();
        assert_eq!(p1.intersection_numbers(), IntersectionNumbers { top: 1, canonical: -2 });
        for d in 1..5 {
            let v = PolarizedToricVariety::projective_space(1, d).unwrap();
            assert_eq!(v.intersection_numbers(), IntersectionNumbers { top: d, canonical: -2 });
        }
        // ℙ³, 𝒪(1): deg 1, K = 𝒪(−4)
        let p3 = PolarizedToricVariety::projective_space(3, 1).unwrap();
        assert_eq!(p3.intersection_numbers(), IntersectionNumbers { top: 1, canonical: -4 });
        // anticanonical F₁: (−K)² = 8
        let f1 = library::hirzebruch_one_anticanonical().unwrap();
        assert_eq!(f1.intersection_numbers(), IntersectionNumbers { top: 8, canonical: -8 });
    }

    #[test]
    fn chart_coordinate_examples() {
        let p2 = PolarizedToricVariety::projective_space(2, 2).unwrap();
        assert_eq!(p2.chart_coords(&[1, 1], 1).unwrap(), vec![1, 1]);
        let p1 = PolarizedToricVariety::new(&[vec![0], vec![2]], &[2]).unwrap();
        assert_eq!(p1.chart_basis(), &[vec![-1]]);
        assert_eq!(p1.chart_coords(&[2], 1).unwrap(), vec![0]);
        assert_eq!(p1.chart_coords(&[0], 1).unwrap(), vec![2]);
        assert!(matches!(p2.chart_coords(&[2, 1], 1), Err(Error::PointOutsidePolytope { .. })));
        assert!(p2.chart_contains(&[2, 0], 1));
        assert!(!p2.chart_contains(&[2, 1], 1));
    }

    #[test]
    fn unimodular_invariance() {
        let f1 = library::hirzebruch(1, 1, 1).unwrap();
        let m = vec![vec![1, 1], vec![0, 1]];
        let moved = f1.polytope().transform(&m, &[3, -2]).unwrap();
        let chart: Vec<i64> = vec![3, -2];
        let moved = PolarizedToricVariety::from_polytope(moved, &chart).unwrap();
        assert_eq!(moved.intersection_numbers(), f1.intersection_numbers());
        for k in 0..5 {
            assert_eq!(moved.ehrhart_count(k), f1.ehrhart_count(k));
        }
    }

    #[test]
    fn scaling_law() {
        for (_, v) in library::all() {
            let v3 = v.scaled(3).unwrap();
            for k in 0..4 {
                assert_eq!(v3.ehrhart_count(k), v.ehrhart_count(3 * k));
            }
        }
    }
}
