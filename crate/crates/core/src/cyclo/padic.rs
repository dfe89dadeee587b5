//! Decomposition groups of `p` in `(Z/e)^x` and integrality at a fixed
//! prime above `p`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::CycloNumber;
use crate::arith::{gcd, mult_order, prime_divisors, split_prime_part};
use crate::group::field::least_irreducible;

/// Image of `Gal(Q_p(z_e)/Q_p)` in `(Z/e)^x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PadicGaloisGroup {
    pub e: usize,
    pub p: u64,
    /// All residues in the subgroup, increasing.
    pub elements: Vec<usize>,
    /// Greedy generating set (least residues first).
    pub generators: Vec<usize>,
}

impl PadicGaloisGroup {
    /// `[Q_p(z_e) : Q_p]`.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.elements.binary_search(&(k % self.e.max(1))).is_ok()
    }
}

/// The residues `k mod e` with `k = p^j (mod m)` for some `j`, where
/// `e = p^a m` and `p` does not divide `m`.
pub fn padic_galois_group(e: usize, p: u64) -> PadicGaloisGroup {
    if e == 1 {
        return PadicGaloisGroup {
            e,
            p,
            elements: vec![0],
            generators: vec![],
        };
    }
    let (_, m) = split_prime_part(e as u64, p);
    let m = m as usize;
    let mut powers = vec![false; m];
    let mut x = 1 % m;
    loop {
        if powers[x] {
            break;
        }
        powers[x] = true;
        x = (x * p as usize) % m;
    }
    let elements: Vec<usize> = (1..e)
        .filter(|&k| gcd(k as u64, e as u64) == 1 && powers[k % m])
        .collect();
    let mut generators = Vec::new();
    let mut span = vec![false; e];
    span[1] = true;
    for &k in &elements {
        if !span[k] {
            generators.push(k);
            span = closure(e, &generators);
        }
    }
    PadicGaloisGroup {
        e,
        p,
        elements,
        generators,
    }
}

fn closure(e: usize, gens: &[usize]) -> Vec<bool> {
    let mut span = vec![false; e];
    span[1] = true;
    let mut stack = vec![1usize];
    while let Some(x) = stack.pop() {
        for &g in gens {
            let y = (x * g) % e;
            if !span[y] {
                span[y] = true;
                stack.push(y);
            }
        }
    }
    span
}

/// `[Q_p(values) : Q_p]`: the index in the decomposition group of the
/// stabilizer of the value tuple.
pub fn field_degree_over_qp(values: &[CycloNumber], p: u64) -> usize {
    let e = values.iter().fold(1usize, |acc, v| acc.lcm(&v.modulus()));
    let lifted: Vec<CycloNumber> = values.iter().map(|v| v.lift(e)).collect();
    let g = padic_galois_group(e, p);
    let stab = g
        .elements
        .iter()
        .filter(|&&k| lifted.iter().all(|v| v.galois_unchecked(k) == *v))
        .count();
    g.order() / stab
}

/// Arithmetic in `GR(p^s, f)[z] / Phi_{p^a}(z)`, the reduction of the
/// completion of `Z[z_e]` at a fixed prime above `p` modulo `p^s`.
struct LocalRing {
    modulus: u64,
    /// monic defining polynomial of the Galois ring, low coefficients
    gr_poly: Vec<u64>,
    f: usize,
}

type GrElem = Vec<u64>;

impl LocalRing {
    fn gr_mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let f = self.f;
        let n = self.modulus as u128;
        let mut prod = vec![0u128; 2 * f];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % n;
            }
        }
        for k in (f..2 * f).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &g) in self.gr_poly.iter().enumerate() {
                prod[k - f + i] = (prod[k - f + i] + n - (c * g as u128) % n) % n;
            }
        }
        prod[..f].iter().map(|&x| x as u64).collect()
    }

    fn gr_pow(&self, a: &GrElem, mut e: u64) -> GrElem {
        let mut acc = self.gr_one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.gr_mul(&acc, &base);
            }
            base = self.gr_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn gr_pow_big(&self, a: &GrElem, e: &BigUint) -> GrElem {
        let mut acc = self.gr_one();
        for i in (0..e.bits()).rev() {
            acc = self.gr_mul(&acc, &acc);
            if e.bit(i) {
                acc = self.gr_mul(&acc, a);
            }
        }
        acc
    }

    fn gr_one(&self) -> GrElem {
        let mut v = vec![0; self.f];
        v[0] = 1 % self.modulus;
        v
    }
}

/// Reduction of `Z[z_e]` modulo `p^s` at the fixed prime above `p`.
struct Embedding {
    ring: LocalRing,
    theta_pows: Vec<GrElem>,
    m: usize,
    pa: usize,
    p: u64,
}

static EMBEDDINGS: OnceLock<Mutex<HashMap<(usize, u64, u32), Arc<Embedding>>>> = OnceLock::new();

fn embedding(e: usize, p: u64, s: u32) -> Arc<Embedding> {
    let map = EMBEDDINGS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(emb) = map.lock().unwrap().get(&(e, p, s)) {
        return emb.clone();
    }
    let (a, m) = split_prime_part(e as u64, p);
    let m = m as usize;
    let f = if m == 1 {
        1
    } else {
        mult_order(p % m as u64, m as u64) as usize
    };
    let gr_poly: Vec<u64> = least_irreducible(p as u32, f as u32)
        .iter()
        .map(|&c| c as u64)
        .collect();
    let ring = LocalRing {
        modulus: p.pow(s),
        gr_poly,
        f,
    };
    let theta = teichmueller_root(&ring, p, m, s);
    let mut theta_pows = vec![ring.gr_one()];
    for i in 1..m {
        let next = ring.gr_mul(&theta_pows[i - 1], &theta);
        theta_pows.push(next);
    }
    let emb = Arc::new(Embedding {
        ring,
        theta_pows,
        m,
        pa: p.pow(a) as usize,
        p,
    });
    map.lock().unwrap().entry((e, p, s)).or_insert(emb).clone()
}

/// Whether `x` is integral at the prime above `p` singled out by sending
/// `z_e` to `theta * z`, with `theta` the Teichmueller lift of a fixed
/// primitive `m`-th root of unity and `z` a primitive `p^a`-th root
/// (`e = p^a m`). Writing `x = num / (p^s u)`, this holds iff the image of
/// `num` vanishes in `GR(p^s, f)[z] / Phi_{p^a}(z)`.
pub fn is_p_integral(x: &CycloNumber, p: u64) -> bool {
    let s = big_valuation(x.denominator(), p);
    if s == 0 {
        return true;
    }
    let emb = embedding(x.modulus(), p, s);
    let (f, pa, modulus) = (emb.ring.f, emb.pa, emb.ring.modulus);
    let mut buf: Vec<Vec<u64>> = vec![vec![0; f]; pa];
    let big_mod = BigInt::from(modulus);
    for (i, c) in x.numerators().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let c = c.mod_floor(&big_mod).to_u64().unwrap();
        let t = &emb.theta_pows[i % emb.m];
        let slot = &mut buf[i % pa];
        for (k, &tv) in t.iter().enumerate() {
            slot[k] = ((slot[k] as u128 + c as u128 * tv as u128) % modulus as u128) as u64;
        }
    }
    if pa > 1 {
        // z^{phi(p^a)} = -(1 + z^{p^{a-1}} + ... + z^{(p-2) p^{a-1}})
        let step = pa / emb.p as usize;
        let phi = pa - step;
        for j in (phi..pa).rev() {
            let c = std::mem::replace(&mut buf[j], vec![0; f]);
            if c.iter().all(|&v| v == 0) {
                continue;
            }
            for t in 0..(emb.p as usize - 1) {
                let target = &mut buf[j - phi + t * step];
                for k in 0..f {
                    target[k] = (target[k] + modulus - c[k]) % modulus;
                }
            }
        }
    }
    buf.iter().all(|v| v.iter().all(|&c| c == 0))
}

fn big_valuation(n: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
        k += 1;
    }
    k
}

/// Teichmueller lift (mod `p^s`) of `y^{(q-1)/m}`, where `y` is the least
/// residue-field element (by digit code) for which that power has exact
/// order `m`.
fn teichmueller_root(ring: &LocalRing, p: u64, m: usize, s: u32) -> GrElem {
    if m == 1 {
        return ring.gr_one();
    }
    let f = ring.f;
    let q = BigUint::from(p).pow(f as u32);
    let cofactor = (&q - 1u32) / BigUint::from(m);
    let residue = LocalRing {
        modulus: p,
        gr_poly: ring.gr_poly.iter().map(|&c| c % p).collect(),
        f,
    };
    let primes = prime_divisors(m as u64);
    let decode = |mut code: u64| -> GrElem {
        let mut v = vec![0; f];
        for slot in v.iter_mut() {
            *slot = code % p;
            code /= p;
        }
        v
    };
    let one = residue.gr_one();
    let y = (1u64..)
        .map(decode)
        .find(|y| {
            if y.iter().all(|&c| c == 0) {
                return false;
            }
            let r = residue.gr_pow_big(y, &cofactor);
            primes
                .iter()
                .all(|&l| residue.gr_pow(&r, (m as u64) / l) != one)
        })
        .expect("the residue field contains primitive m-th roots of unity");
    // x^{q^{s-1}} is the Teichmueller representative of x mod p^s
    let mut t = y;
    for _ in 1..s {
        for _ in 0..f {
            t = ring.gr_pow(&t, p);
        }
    }
    ring.gr_pow_big(&t, &cofactor)
}
