//! Small integer helpers: primality, factorization, valuations, modular powers.

use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization in increasing order of primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Exponent of `p` in `n` (with `v_p(0)` reported as `u32::MAX`).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// Splits `n = p^a * m` with `p` not dividing `m`.
pub fn split_prime_part(n: u64, p: u64) -> (u32, u64) {
    let a = valuation(n, p);
    (a, n / p.pow(a))
}

pub fn is_prime_power(n: u64) -> Option<(u64, u32)> {
    let f = factorize(n);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

pub fn is_power_of(n: u64, p: u64) -> bool {
    n >= 1 && n / p.pow(valuation(n, p)) == 1
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn mult_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let mut k = 1;
    let mut x = a % m;
    while x != 1 {
        x = mul_mod(x, a, m);
        k += 1;
    }
    k
}

/// Least primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let qs = prime_divisors(p - 1);
    (2..p)
        .find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("prime modulus has a primitive root")
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Smallest integer `d >= 1` with `d * d >= n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let mut d = (n as f64).sqrt() as u64;
    while d * d < n {
        d += 1;
    }
    while d > 0 && (d - 1) * (d - 1) >= n {
        d -= 1;
    }
    d.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_and_phi() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(97), 96);
        for n in 1..200u64 {
            let brute = (1..=n).filter(|k| gcd(*k, n) == 1).count() as u64;
            assert_eq!(euler_phi(n), brute);
        }
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(mult_order(2, 7), 3);
        assert_eq!(mult_order(3, 8), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        assert_eq!(split_prime_part(24, 2), (3, 3));
        assert_eq!(ceil_sqrt(24), 5);
        assert_eq!(ceil_sqrt(25), 5);
        assert!(is_power_of(27, 3) && !is_power_of(12, 2));
    }
}
