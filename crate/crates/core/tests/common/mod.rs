//! Brute-force oracle. Shares no code with the library: polytopes are
//! half-space lists, `𝒥^K` is expanded from generator products, and
//! polynomials are recovered by Lagrange interpolation.

#![allow(dead_code)]

use num::{BigInt, BigRational, One, Zero};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// `{u : a·u + b·s ≥ 0}` for every `(a, b)`, inside the box `[lo·s, hi·s]`.
#[derive(Clone, Debug)]
pub struct HalfSpaces {
    pub ineqs: Vec<(Vec<i64>, i64)>,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl HalfSpaces {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// `d·Δₙ`.
    pub fn simplex(n: usize, d: i64) -> Self {
        let mut ineqs: Vec<(Vec<i64>, i64)> = (0..n)
            .map(|i| {
                let mut a = vec![0; n];
                a[i] = 1;
                (a, 0)
            })
            .collect();
        ineqs.push((vec![-1; n], d));
        Self { ineqs, lo: vec![0; n], hi: vec![d; n] }
    }

    /// `∏ [0, sᵢ]`.
    pub fn boxed(sides: &[i64]) -> Self {
        let n = sides.len();
        let mut ineqs = Vec::new();
        for (i, &s) in sides.iter().enumerate() {
            let mut a = vec![0; n];
            a[i] = 1;
            ineqs.push((a.clone(), 0));
            a[i] = -1;
            ineqs.push((a, s));
        }
        Self { ineqs, lo: vec![0; n], hi: sides.to_vec() }
    }

    /// `F₁` with `−K`: `x ≥ 0, y ≥ 0, 1 ≤ x + y ≤ 3`. The first inequality
    /// is the (−1)-curve.
    pub fn f1_anticanonical() -> Self {
        Self {
            ineqs: vec![(vec![1, 1], -1), (vec![1, 0], 0), (vec![0, 1], 0), (vec![-1, -1], 3)],
            lo: vec![0, 0],
            hi: vec![3, 3],
        }
    }

    pub fn points(&self, s: i64) -> Vec<Vec<i64>> {
        let n = self.dim();
        let mut out = Vec::new();
        let mut cur: Vec<i64> = self.lo.iter().map(|l| l * s).collect();
        loop {
            if self.ineqs.iter().all(|(a, b)| a.iter().zip(&cur).map(|(x, y)| x * y).sum::<i64>() + b * s >= 0) {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                cur[i] += 1;
                if cur[i] <= self.hi[i] * s {
                    break;
                }
                cur[i] = self.lo[i] * s;
                i += 1;
            }
        }
    }

    /// Lattice distances to every inequality.
    pub fn distances(&self, u: &[i64], s: i64) -> Vec<u32> {
        self.ineqs
            .iter()
            .map(|(a, b)| (a.iter().zip(u).map(|(x, y)| x * y).sum::<i64>() + b * s) as u32)
            .collect()
    }
}

/// A generator `x^e·t^j` of `𝒥`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Gen {
    pub e: Vec<u32>,
    pub t: u32,
}

/// Generators of `I₀ + I₁t + … + I_{N−1}t^{N−1} + (t^N)`.
pub fn flag_generators(nvars: usize, ideals: &[Vec<Vec<u32>>]) -> Vec<Gen> {
    let mut gens: Vec<Gen> = ideals
        .iter()
        .enumerate()
        .flat_map(|(j, gs)| gs.iter().map(move |e| Gen { e: e.clone(), t: j as u32 }))
        .collect();
    gens.push(Gen { e: vec![0; nvars], t: ideals.len() as u32 });
    gens
}

fn dominates(a: &Gen, b: &Gen) -> bool {
    a.t <= b.t && a.e.iter().zip(&b.e).all(|(x, y)| x <= y)
}

fn prune(mut v: Vec<Gen>) -> Vec<Gen> {
    v.sort();
    v.dedup();
    let keep: Vec<bool> = (0..v.len()).map(|i| !(0..v.len()).any(|j| j != i && dominates(&v[j], &v[i]))).collect();
    v.into_iter().zip(keep).filter(|(_, k)| *k).map(|(g, _)| g).collect()
}

/// Generators of `𝒥^K`, by repeated multiplication.
pub fn power_generators(gens: &[Gen], k: u32) -> Vec<Gen> {
    let n = gens[0].e.len();
    let mut cur = vec![Gen { e: vec![0; n], t: 0 }];
    for _ in 0..k {
        let mut next = Vec::with_capacity(cur.len() * gens.len());
        for a in &cur {
            for b in gens {
                next.push(Gen { e: a.e.iter().zip(&b.e).map(|(x, y)| x + y).collect(), t: a.t + b.t });
            }
        }
        cur = prune(next);
    }
    cur
}

/// Least `j` with `x^a·t^j ∈ 𝒥^K`.
pub fn level(power: &[Gen], a: &[u32]) -> u32 {
    power
        .iter()
        .filter(|g| g.e.iter().zip(a).all(|(x, y)| x <= y))
        .map(|g| g.t)
        .min()
        .expect("t^{KN} is always a generator")
}

/// `(W(K), h(K))` where exponents of points of `rK·P` come from `coords`.
pub fn sample(
    p: &HalfSpaces,
    gens: &[Gen],
    r: i64,
    k: u32,
    coords: &dyn Fn(&[i64], i64) -> Vec<u32>,
) -> (BigInt, BigInt) {
    let power = power_generators(gens, k);
    let s = r * k as i64;
    let pts = p.points(s);
    let w: i64 = pts.iter().map(|u| level(&power, &coords(u, s)) as i64).sum();
    (BigInt::from(-w), BigInt::from(pts.len()))
}

/// Coefficients, lowest first, of the degree ≤ `deg` interpolant through
/// `(xᵢ, yᵢ)`.
pub fn lagrange(xs: &[i64], ys: &[BigInt], deg: usize) -> Vec<Q> {
    assert_eq!(xs.len(), deg + 1);
    let mut out = vec![Q::zero(); deg + 1];
    for (i, &xi) in xs.iter().enumerate() {
        let mut basis = vec![Q::one()];
        let mut denom = Q::one();
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![Q::zero(); basis.len() + 1];
            for (d, c) in basis.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * q(xj);
            }
            basis = next;
            denom *= q(xi - xj);
        }
        let scale = Q::from_integer(ys[i].clone()) / denom;
        for (d, c) in basis.iter().enumerate() {
            out[d] += c * &scale;
        }
    }
    out
}

pub fn eval(c: &[Q], x: i64) -> Q {
    c.iter().rev().fold(Q::zero(), |acc, a| acc * q(x) + a)
}

pub struct OracleFit {
    pub weight: Vec<Q>,
    pub hilbert: Vec<Q>,
    pub df: Q,
}

/// Fits `W` (degree `n+1`) and `h` (degree `n`) on `K ∈ [k0, k0+n+1]` and
/// confirms the fit on `extra` further samples.
pub fn oracle_fit(
    p: &HalfSpaces,
    gens: &[Gen],
    r: i64,
    k0: u32,
    extra: u32,
    coords: &dyn Fn(&[i64], i64) -> Vec<u32>,
) -> OracleFit {
    let n = p.dim();
    let ks: Vec<u32> = (k0..k0 + n as u32 + 2 + extra).collect();
    let samples: Vec<(BigInt, BigInt)> = ks.iter().map(|&k| sample(p, gens, r, k, coords)).collect();
    let xs: Vec<i64> = ks.iter().map(|&k| k as i64).collect();
    let ws: Vec<BigInt> = samples.iter().map(|s| s.0.clone()).collect();
    let hs: Vec<BigInt> = samples.iter().map(|s| s.1.clone()).collect();
    let weight = lagrange(&xs[..n + 2], &ws[..n + 2], n + 1);
    let hilbert = lagrange(&xs[..n + 1], &hs[..n + 1], n);
    for (i, &x) in xs.iter().enumerate() {
        assert_eq!(eval(&weight, x), Q::from_integer(ws[i].clone()), "oracle weight not polynomial at K = {x}");
        assert_eq!(eval(&hilbert, x), Q::from_integer(hs[i].clone()), "oracle Hilbert not polynomial at K = {x}");
    }
    let df = &weight[n + 1] * &hilbert[n - 1] - &weight[n] * &hilbert[n];
    OracleFit { weight, hilbert, df }
}

/// Chart exponent for polytopes charted at the origin with the coordinate
/// axes as edges.
pub fn identity_coords(u: &[i64], _s: i64) -> Vec<u32> {
    u.iter().map(|&x| x as u32).collect()
}

/// `"p"` or `"p/q"`.
pub fn qs(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
