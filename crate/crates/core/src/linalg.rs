//! Small exact integer linear algebra for lattice computations.

#![allow(clippy::needless_range_loop)]

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Returns `(g, x, y)` with `a·x + b·y = g = gcd(a, b) ≥ 0`.
pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Divide by the gcd of the entries. The zero vector is returned unchanged.
pub(crate) fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Determinant by fraction-free Gaussian elimination (Bareiss).
pub(crate) fn det(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Rank over ℚ.
pub(crate) fn rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            if m[i][c] != 0 {
                let (a, b) = (m[rank][c], m[i][c]);
                for j in c..cols {
                    m[i][j] = m[i][j] * a - m[rank][j] * b;
                }
                let g = m[i].iter().fold(0i128, |g, &x| gcd128(g, x));
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Affine dimension of a point set (−1 for the empty set is reported as 0).
pub(crate) fn affine_dim(points: &[&[i64]]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let diffs: Vec<Vec<i64>> = points[1..].iter().map(|p| sub(p, points[0])).collect();
    rank(&diffs)
}

/// Generalized cross product of `dim - 1` vectors in ℤ^dim: the vector of
/// signed maximal minors, orthogonal to every input row.
pub(crate) fn cofactor_normal(rows: &[Vec<i64>], dim: usize) -> Vec<i64> {
    debug_assert_eq!(rows.len() + 1, dim);
    (0..dim)
        .map(|skip| {
            let minor: Vec<Vec<i64>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != skip)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let d = det(&minor) as i64;
            if skip % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Some integer `z` with `⟨u, z⟩ = 1`; `u` must be primitive.
pub(crate) fn unit_solution(u: &[i64]) -> Vec<i64> {
    let mut coeffs = vec![0i64; u.len()];
    let mut g = 0i64;
    for (i, &ui) in u.iter().enumerate() {
        let (ng, a, b) = ext_gcd(g, ui);
        for c in coeffs.iter_mut().take(i) {
            *c *= a;
        }
        coeffs[i] = b;
        g = ng;
    }
    debug_assert_eq!(g, 1, "unit_solution needs a primitive vector");
    coeffs
}

/// Inverse of an integer matrix with determinant ±1 (via the adjugate).
pub(crate) fn inverse_unimodular(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    let d = det(m) as i64;
    debug_assert!(d == 1 || d == -1);
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != j)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != i)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let c = det(&minor) as i64;
            let c = if (i + j) % 2 == 0 { c } else { -c };
            inv[i][j] = c * d;
        }
    }
    inv
}

pub(crate) fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| dot(row, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(det(&[vec![2, 0], vec![0, 3]]), 6);
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(det(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), -3);
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), 0);
        assert_eq!(det(&[]), 1);
    }

    #[test]
    fn ranks_and_normals() {
        assert_eq!(rank(&[vec![1, 2, 3], vec![2, 4, 6]]), 1);
        assert_eq!(rank(&[vec![0, 0], vec![0, 1]]), 1);
        let n = cofactor_normal(&[vec![1, 0, 0], vec![0, 1, 0]], 3);
        assert_eq!(n, vec![0, 0, 1]);
        assert_eq!(cofactor_normal(&[], 1), vec![1]);
    }

    #[test]
    fn unit_solutions() {
        for u in [vec![1, 2], vec![3, 5], vec![-2, 3, 7], vec![0, -1], vec![1, 1, 2]] {
            assert_eq!(dot(&u, &unit_solution(&u)), 1, "{u:?}");
        }
    }

    #[test]
    fn unimodular_inverse() {
        let m = vec![vec![1, 1], vec![0, -1]];
        let inv = inverse_unimodular(&m);
        for (i, row) in m.iter().enumerate() {
            for j in 0..2 {
                let v: i64 = (0..2).map(|k| row[k] * inv[k][j]).sum();
                assert_eq!(v, i64::from(i == j));
            }
        }
    }
}
