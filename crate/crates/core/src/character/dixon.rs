//! Dixon's method: simultaneous eigenvectors of the class matrices over a
//! prime field `F_l` with `l = 1 (mod e)`, lifted to exact cyclotomic values.

use crate::arith::{ceil_sqrt, inv_mod, is_prime, pow_mod, primitive_root};
use crate::cyclo::CycloNumber;
use crate::error::{Error, Result};
use crate::group::{ConjClassData, FiniteGroup};

/// Upper limit for the multiplier `k` in the search `l = k e + 1`.
pub const DIXON_SEARCH_LIMIT: u64 = 1_000_000;

/// Least prime `l = 1 (mod e)` with `l > 2 sqrt(n)`.
pub fn dixon_prime(n: u64, e: u64) -> Result<u64> {
    let floor = 2 * ceil_sqrt(n);
    (1..DIXON_SEARCH_LIMIT)
        .map(|k| k * e + 1)
        .find(|&l| l > floor && is_prime(l))
        .ok_or_else(|| {
            Error::Internal(format!(
                "no Dixon prime l = 1 mod {e} below {}",
                DIXON_SEARCH_LIMIT * e + 1
            ))
        })
}

/// Subspace of `F_l^r` kept in reduced row echelon form.
#[derive(Clone, Debug)]
struct Space {
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

fn rref(mut rows: Vec<Vec<u64>>, l: u64) -> Space {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = inv_mod(rows[rank][c], l).unwrap();
        for x in rows[rank].iter_mut() {
            *x = *x * inv % l;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != 0 {
                let f = rows[i][c];
                for k in 0..cols {
                    rows[i][k] = (rows[i][k] + l - f * rows[rank][k] % l) % l;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    rows.truncate(rank);
    Space {
        basis: rows,
        pivots,
    }
}

/// Basis of the null space of a square matrix.
fn nullspace(a: &[Vec<u64>], l: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let s = rref(a.to_vec(), l);
    let free: Vec<usize> = (0..n).filter(|c| !s.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; n];
            v[f] = 1;
            for (row, &p) in s.basis.iter().zip(&s.pivots) {
                v[p] = (l - row[f]) % l;
            }
            v
        })
        .collect()
}

/// Characteristic polynomial via reduction to Hessenberg form (low
/// coefficients first, monic).
fn charpoly(a: &[Vec<u64>], l: u64) -> Vec<u64> {
    let n = a.len();
    let mut h: Vec<Vec<u64>> = a.to_vec();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| h[i][m - 1] != 0) else {
            continue;
        };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let inv = inv_mod(h[m][m - 1], l).unwrap();
        for j in m + 1..n {
            let u = h[j][m - 1] * inv % l;
            if u == 0 {
                continue;
            }
            for k in 0..n {
                h[j][k] = (h[j][k] + l - u * h[m][k] % l) % l;
            }
            for row in h.iter_mut() {
                row[m] = (row[m] + u * row[j]) % l;
            }
        }
    }
    let mut p: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        // (x - h[m-1][m-1]) p[m-1]
        let prev = &p[m - 1];
        let mut cur = vec![0u64; m + 1];
        for (i, &c) in prev.iter().enumerate() {
            cur[i + 1] = (cur[i + 1] + c) % l;
            cur[i] = (cur[i] + l - c * h[m - 1][m - 1] % l) % l;
        }
        let mut t = 1u64;
        for i in 1..m {
            t = t * h[m - i][m - i - 1] % l;
            let coef = t * h[m - i - 1][m - 1] % l;
            if coef != 0 {
                for (k, &c) in p[m - i - 1].iter().enumerate() {
                    cur[k] = (cur[k] + l - coef * c % l) % l;
                }
            }
        }
        p.push(cur);
    }
    p.pop().unwrap()
}

fn roots(poly: &[u64], l: u64) -> Vec<u64> {
    (0..l)
        .filter(|&x| poly.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % l) == 0)
        .collect()
}

/// Class matrix `M_i` with `M_i[j][k] = #{x in C_i : x^{-1} z_k in C_j}`,
/// reduced mod `l`.
fn class_matrix(g: &FiniteGroup, cls: &ConjClassData, i: usize, l: u64) -> Vec<Vec<u64>> {
    let r = cls.len();
    let mut m = vec![vec![0u64; r]; r];
    for (k, &z) in cls.representatives.iter().enumerate() {
        for &x in &cls.classes[i] {
            let j = cls.class_of[g.mul(g.inv(x), z)];
            m[j][k] += 1;
        }
    }
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x %= l;
        }
    }
    m
}

/// Splits `w` into common eigenspaces of `m`.
fn split(w: &Space, m: &[Vec<u64>], l: u64) -> Vec<Space> {
    let d = w.basis.len();
    let r = m.len();
    let images: Vec<Vec<u64>> = w
        .basis
        .iter()
        .map(|b| {
            (0..r)
                .map(|j| {
                    m[j].iter()
                        .zip(b)
                        .fold(0u64, |acc, (&x, &y)| (acc + x * y) % l)
                })
                .collect()
        })
        .collect();
    // a[s][t] = coordinate s of M b_t
    let a: Vec<Vec<u64>> = (0..d)
        .map(|s| (0..d).map(|t| images[t][w.pivots[s]]).collect())
        .collect();
    let eig = roots(&charpoly(&a, l), l);
    if eig.len() <= 1 {
        return vec![w.clone()];
    }
    eig.iter()
        .map(|&lam| {
            let shifted: Vec<Vec<u64>> = (0..d)
                .map(|s| {
                    (0..d)
                        .map(|t| {
                            if s == t {
                                (a[s][t] + l - lam) % l
                            } else {
                                a[s][t]
                            }
                        })
                        .collect()
                })
                .collect();
            let coords = nullspace(&shifted, l);
            let vecs: Vec<Vec<u64>> = coords
                .iter()
                .map(|c| {
                    (0..r)
                        .map(|k| {
                            c.iter()
                                .zip(&w.basis)
                                .fold(0u64, |acc, (&x, b)| (acc + x * b[k]) % l)
                        })
                        .collect()
                })
                .collect();
            rref(vecs, l)
        })
        .collect()
}

/// Irreducible characters (unsorted) as value rows over the classes, and
/// their degrees.
pub(crate) fn dixon(
    g: &FiniteGroup,
    cls: &ConjClassData,
    power_maps: &[Vec<usize>],
    e: usize,
) -> Result<Vec<(u64, Vec<CycloNumber>)>> {
    let n = g.order() as u64;
    let r = cls.len();
    let l = dixon_prime(n, e as u64)?;
    let mut open = vec![rref(
        (0..r)
            .map(|i| (0..r).map(|j| (i == j) as u64).collect())
            .collect(),
        l,
    )];
    let mut found: Vec<Vec<u64>> = Vec::new();
    if r == 1 {
        found.push(vec![1]);
        open.clear();
    }
    for i in 1..r {
        if open.is_empty() {
            break;
        }
        let m = class_matrix(g, cls, i, l);
        let mut next = Vec::new();
        for w in &open {
            for s in split(w, &m, l) {
                if s.basis.len() == 1 {
                    found.push(s.basis[0].clone());
                } else {
                    next.push(s);
                }
            }
        }
        open = next;
    }
    if !open.is_empty() || found.len() != r {
        return Err(Error::Internal(format!(
            "class matrices did not separate the characters mod {l}"
        )));
    }
    let omega = pow_mod(primitive_root(l), (l - 1) / e as u64, l);
    let inv_h: Vec<u64> = (0..r)
        .map(|j| inv_mod(cls.size(j) as u64, l).unwrap())
        .collect();
    let mut out = Vec::with_capacity(r);
    for v in found {
        if v[0] != 1 {
            return Err(Error::Internal(
                "eigenvector not normalized at the identity class".into(),
            ));
        }
        let s = (0..r).fold(0u64, |acc, j| {
            (acc + v[j] * v[cls.inverse_class[j]] % l * inv_h[j]) % l
        });
        let target =
            n % l * inv_mod(s, l).ok_or_else(|| Error::Internal("degenerate norm".into()))? % l;
        let d = (1..=ceil_sqrt(n))
            .find(|&d| n % d == 0 && d * d % l == target)
            .ok_or_else(|| Error::Internal("no degree matches the eigenvector norm".into()))?;
        let theta: Vec<u64> = (0..r).map(|j| v[j] * (d % l) % l * inv_h[j] % l).collect();
        let mut row = Vec::with_capacity(r);
        for j in 0..r {
            let o = cls.rep_order(j);
            let step = e / o;
            let w = pow_mod(omega, step as u64, l);
            let inv_o = inv_mod(o as u64, l).unwrap();
            let wpow: Vec<u64> = (0..o as u64).map(|t| pow_mod(w, t, l)).collect();
            let mut buf = vec![0i128; e];
            for k in 0..o {
                // m_k = (1/o) sum_t theta(z^t) w^{-kt}
                let mut acc = 0u64;
                for t in 0..o {
                    acc = (acc + theta[power_maps[j][t]] * wpow[(o - k) * t % o]) % l;
                }
                let mk = acc * inv_o % l;
                if mk > d {
                    return Err(Error::Internal(format!(
                        "eigenvalue multiplicity {mk} exceeds degree {d}"
                    )));
                }
                buf[k * step] += mk as i128;
            }
            row.push(CycloNumber::from_cyclic_i128(e, &buf));
        }
        out.push((d, row));
    }
    let total: u64 = out.iter().map(|(d, _)| d * d).sum();
    if total != n {
        return Err(Error::Internal(format!(
            "degree squares sum to {total}, expected {n}"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dixon_primes() {
        assert_eq!(dixon_prime(6, 6).unwrap(), 7);
        assert_eq!(dixon_prime(24, 12).unwrap(), 13);
        assert_eq!(dixon_prime(60, 30).unwrap(), 31);
        assert_eq!(dixon_prime(1, 1).unwrap(), 3);
    }

    #[test]
    fn charpoly_of_small_matrices() {
        let l = 101;
        // [[2, 1], [0, 3]] -> x^2 - 5x + 6
        let p = charpoly(&[vec![2, 1], vec![0, 3]], l);
        assert_eq!(p, vec![6, l - 5, 1]);
        let a = vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]];
        let p = charpoly(&a, l);
        // det(xI - A) = x^3 - 16x^2 - 12x + 3
        assert_eq!(p, vec![3, l - 12, l - 16, 1]);
    }
}
