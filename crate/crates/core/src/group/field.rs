//! Finite fields `F_q` built as `F_p[x]/(f)` where `f` is the
//! lexicographically least monic irreducible polynomial of the right degree.
//! Elements are encoded as integers whose base-`p` digits are the
//! coefficients, constant term first.

use crate::arith::{is_prime_power, prime_divisors};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u32,
    degree: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

/// Coefficients `c_0..c_{k-1}` of the least monic irreducible
/// `x^k + c_{k-1} x^{k-1} + ... + c_0` over `F_p`, ordered by the integer
/// `sum c_i p^i` (equivalently lexicographically from the top coefficient).
pub fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0];
    }
    for code in 0u64.. {
        let coeffs = digits(code, p, k as usize);
        let mut poly = coeffs.clone();
        poly.push(1);
        if is_irreducible(&poly, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn digits(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out
}

fn trim(poly: &mut Vec<u32>) {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0);
    }
    trim(&mut r);
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    poly_rem(&prod, m, p)
}

/// `h^p mod m`.
fn poly_pow_p(h: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut acc = vec![1];
    let mut base = h.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut acc, mut base, mut e) = (1u64, a as u64 % p as u64, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn is_zero_poly(a: &[u32]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn poly_gcd_is_one(a: &[u32], b: &[u32], p: u32) -> bool {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !is_zero_poly(&b) {
        let lead = inv_mod(*b.last().unwrap(), p);
        let monic: Vec<u32> = b
            .iter()
            .map(|&c| (c as u64 * lead as u64 % p as u64) as u32)
            .collect();
        let r = poly_rem(&a, &monic, p);
        a = monic;
        b = r;
    }
    a.len() == 1 && a[0] != 0
}

/// Rabin's test: `f | x^{p^k} - x` and `gcd(x^{p^{k/r}} - x, f) = 1` for
/// every prime `r | k`.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let k = poly.len() - 1;
    let x = if k == 1 {
        poly_rem(&[0, 1], poly, p)
    } else {
        vec![0, 1]
    };
    let sub_x = |h: &[u32]| -> Vec<u32> {
        let mut d = h.to_vec();
        d.resize(d.len().max(x.len()), 0);
        for (i, &c) in x.iter().enumerate() {
            d[i] = (d[i] + p - c) % p;
        }
        trim(&mut d);
        d
    };
    let mut frob = vec![x.clone()];
    for _ in 0..k {
        let next = poly_pow_p(frob.last().unwrap(), poly, p);
        frob.push(next);
    }
    if !is_zero_poly(&sub_x(&frob[k])) {
        return false;
    }
    prime_divisors(k as u64)
        .into_iter()
        .all(|r| poly_gcd_is_one(&sub_x(&frob[k / r as usize]), poly, p))
}

impl FiniteField {
    pub fn new(q: u32) -> Result<Self> {
        let (p, k) = is_prime_power(q as u64)
            .ok_or_else(|| Error::Parameter(format!("field order {q} is not a prime power")))?;
        let (p, k) = (p as u32, k);
        let modulus = least_irreducible(p, k);
        let mut full = modulus.clone();
        full.push(1);
        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        let elems: Vec<Vec<u32>> = (0..q as u64).map(|c| digits(c, p, k as usize)).collect();
        let encode = |v: &[u32]| -> u32 { v.iter().rev().fold(0u32, |acc, &c| acc * p + c) };
        for a in 0..qs {
            for b in 0..qs {
                let s: Vec<u32> = elems[a]
                    .iter()
                    .zip(&elems[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * qs + b] = encode(&s);
                let mut prod = vec![0u32; 2 * k as usize];
                for (i, &x) in elems[a].iter().enumerate() {
                    for (j, &y) in elems[b].iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&prod, &full, p);
                r.resize(k as usize, 0);
                mul[a * qs + b] = encode(&r);
            }
        }
        let mut inv = vec![0; qs];
        for a in 1..qs {
            inv[a] = (1..qs).find(|&b| mul[a * qs + b] == 1).unwrap() as u32;
        }
        Ok(FiniteField {
            p,
            degree: k,
            q,
            modulus,
            add,
            mul,
            inv,
        })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Low coefficients of the defining monic polynomial.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    pub fn neg(&self, a: u32) -> u32 {
        (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "zero has no inverse");
        self.inv[a as usize]
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut acc = 1;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The Frobenius map `x -> x^p`.
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    pub fn mult_order(&self, a: u32) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Least generator of the multiplicative group.
    pub fn primitive_element(&self) -> u32 {
        let n = (self.q - 1) as u64;
        if n == 1 {
            return 1;
        }
        let qs = prime_divisors(n);
        (2..self.q)
            .find(|&g| qs.iter().all(|&r| self.pow(g, n / r) != 1))
            .expect("multiplicative group of a finite field is cyclic")
    }

    /// Nonzero elements in integer-code order (1 comes first).
    pub fn units(&self) -> Vec<u32> {
        (1..self.q).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_field_moduli() {
        assert_eq!(least_irreducible(2, 2), vec![1, 1]);
        assert_eq!(least_irreducible(2, 3), vec![1, 1, 0]);
        assert_eq!(least_irreducible(3, 2), vec![1, 0]);
    }

    fn has_factor_by_trial(poly: &[u32], p: u32) -> bool {
        let k = poly.len() - 1;
        (1..=k / 2).any(|d| {
            (0..(p as u64).pow(d as u32)).any(|code| {
                let mut divisor = digits(code, p, d);
                divisor.push(1);
                poly_rem(poly, &divisor, p) == [0]
            })
        })
    }

    #[test]
    fn rabin_test_matches_trial_division() {
        for (p, max_k) in [(2u32, 7u32), (3, 5), (5, 4), (7, 3)] {
            for k in 1..=max_k {
                for code in 0..(p as u64).pow(k) {
                    let mut poly = digits(code, p, k as usize);
                    poly.push(1);
                    assert_eq!(
                        is_irreducible(&poly, p),
                        !has_factor_by_trial(&poly, p),
                        "p = {p}, {poly:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn large_degree_moduli() {
        // ord_97(3) = 48, ord_79(13) = 39
        for (p, k) in [(3u32, 48u32), (13, 39), (2, 60)] {
            let mut poly = least_irreducible(p, k);
            assert_eq!(poly.len(), k as usize);
            poly.push(1);
            assert!(is_irreducible(&poly, p));
        }
    }

    #[test]
    fn field_axioms_hold() {
        for q in [2, 3, 4, 5, 8, 9, 16, 25, 27] {
            let f = FiniteField::new(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
            }
            assert_eq!(f.mult_order(f.primitive_element()), (q - 1) as u64);
        }
    }
}
