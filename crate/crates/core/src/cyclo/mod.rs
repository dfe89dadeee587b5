//! Exact arithmetic in cyclotomic fields `Q(z)` with `z = exp(2 pi i / e)`.
//!
//! A value is stored as `num / den` where `num` holds integer coefficients in
//! the power basis `1, z, ..., z^{phi(e)-1}` and `den > 0` is coprime to the
//! content of `num`. This form is canonical, so structural equality is value
//! equality.

mod padic;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd};
use crate::error::{Error, Result};

pub use padic::{field_degree_over_qp, is_p_integral, padic_galois_group, PadicGaloisGroup};

/// Reduction data for `Q(z_e)`.
#[derive(Debug)]
pub struct CycloField {
    e: usize,
    phi: usize,
    /// `Phi_e`, constant term first.
    poly: Vec<i64>,
    /// `z^k mod Phi_e` for `phi <= k < e`, as sparse `(exponent, coefficient)` lists.
    reduction: Vec<Vec<(u32, i64)>>,
}

/// Integer coefficients of the cyclotomic polynomial `Phi_n`.
pub fn cyclotomic_polynomial(n: usize) -> Vec<i64> {
    let divs: Vec<usize> = divisors(n as u64).into_iter().map(|d| d as usize).collect();
    let mut known: HashMap<usize, Vec<i64>> = HashMap::new();
    for &d in &divs {
        // x^d - 1 divided exactly by Phi_c for every proper divisor c of d
        let mut poly = vec![0i64; d + 1];
        poly[0] = -1;
        poly[d] = 1;
        for &c in &divs {
            if c < d && d % c == 0 {
                poly = exact_div(&poly, &known[&c]);
            }
        }
        known.insert(d, poly);
    }
    known.remove(&n).unwrap()
}

fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let dq = a.len() - 1 - db;
    let mut q = vec![0i64; dq + 1];
    for i in (0..=dq).rev() {
        let c = r[i + db];
        q[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] -= c * bj;
            }
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

static FIELDS: OnceLock<Mutex<HashMap<usize, Arc<CycloField>>>> = OnceLock::new();

impl CycloField {
    /// Shared instance for `Q(z_e)`.
    pub fn get(e: usize) -> Arc<CycloField> {
        assert!(e >= 1, "cyclotomic modulus must be positive");
        let map = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = map.lock().unwrap().get(&e) {
            return f.clone();
        }
        let f = Arc::new(CycloField::build(e));
        map.lock().unwrap().entry(e).or_insert(f).clone()
    }

    fn build(e: usize) -> Self {
        let poly = cyclotomic_polynomial(e);
        let phi = poly.len() - 1;
        let mut reduction = Vec::with_capacity(e - phi);
        // z^phi = -(Phi_e - z^phi)
        let mut cur: Vec<i64> = poly[..phi].iter().map(|&c| -c).collect();
        for _ in phi..e {
            reduction.push(
                cur.iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| (i as u32, c))
                    .collect(),
            );
            // multiply by z
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..phi {
                    cur[i] -= top * poly[i];
                }
            }
        }
        CycloField {
            e,
            phi,
            poly,
            reduction,
        }
    }

    pub fn modulus(&self) -> usize {
        self.e
    }

    pub fn degree(&self) -> usize {
        self.phi
    }

    pub fn minimal_polynomial(&self) -> &[i64] {
        &self.poly
    }

    /// Reduces a vector indexed by exponents `0..e` to the power basis.
    fn reduce_i128(&self, buf: &[i128]) -> Vec<i128> {
        let mut out: Vec<i128> = buf[..self.phi].to_vec();
        for (k, row) in buf[self.phi..].iter().zip(&self.reduction) {
            if *k != 0 {
                for &(i, c) in row {
                    out[i as usize] += k * c as i128;
                }
            }
        }
        out
    }

    fn reduce_big(&self, buf: &[BigInt]) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = buf[..self.phi].to_vec();
        for (k, row) in buf[self.phi..].iter().zip(&self.reduction) {
            if !k.is_zero() {
                for &(i, c) in row {
                    out[i as usize] += k * c;
                }
            }
        }
        out
    }
}

/// An exact element of a cyclotomic field.
#[derive(Clone)]
pub struct CycloNumber {
    field: Arc<CycloField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloNumber(e={}, {})", self.field.e, self)
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.field.e == other.field.e {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = common(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycloNumber {}

fn common(a: &CycloNumber, b: &CycloNumber) -> (CycloNumber, CycloNumber) {
    let e = num_integer::lcm(a.field.e, b.field.e);
    (a.lift(e), b.lift(e))
}

fn normalize(field: Arc<CycloField>, mut num: Vec<BigInt>, mut den: BigInt) -> CycloNumber {
    if den.is_negative() {
        den = -den;
        for c in num.iter_mut() {
            *c = -&*c;
        }
    }
    let mut g = den.clone();
    for c in &num {
        if g.is_one() {
            break;
        }
        g = g.gcd(c);
    }
    if num.iter().all(Zero::is_zero) {
        den = BigInt::one();
    } else if !g.is_one() {
        den /= &g;
        for c in num.iter_mut() {
            *c /= &g;
        }
    }
    CycloNumber { field, num, den }
}

impl CycloNumber {
    pub fn zero(e: usize) -> Self {
        let field = CycloField::get(e);
        let num = vec![BigInt::zero(); field.phi];
        CycloNumber {
            field,
            num,
            den: BigInt::one(),
        }
    }

    pub fn one(e: usize) -> Self {
        Self::from_integer(e, 1)
    }

    pub fn from_integer(e: usize, n: i64) -> Self {
        let mut x = Self::zero(e);
        x.num[0] = BigInt::from(n);
        x
    }

    pub fn from_rational(e: usize, q: &BigRational) -> Self {
        let field = CycloField::get(e);
        let mut num = vec![BigInt::zero(); field.phi];
        num[0] = q.numer().clone();
        normalize(field, num, q.denom().clone())
    }

    /// `z_e^k`.
    pub fn root_of_unity(e: usize, k: usize) -> Self {
        let mut buf = vec![0i128; e];
        buf[k % e] = 1;
        Self::from_cyclic_i128(e, &buf)
    }

    /// Canonical form of `sum_k c_k z_e^k` with arbitrary exponents.
    pub fn from_terms(e: usize, terms: &[(usize, BigRational)]) -> Self {
        let den = terms
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut buf = vec![BigInt::zero(); e];
        for (k, c) in terms {
            buf[k % e] += c.numer() * (&den / c.denom());
        }
        let field = CycloField::get(e);
        let num = field.reduce_big(&buf);
        normalize(field, num, den)
    }

    /// Canonical form of an integer combination `sum_k buf[k] z_e^k`, `buf.len() == e`.
    pub fn from_cyclic_i128(e: usize, buf: &[i128]) -> Self {
        let field = CycloField::get(e);
        let red = field.reduce_i128(buf);
        let num = red.into_iter().map(BigInt::from).collect();
        CycloNumber {
            field,
            num,
            den: BigInt::one(),
        }
    }

    pub fn modulus(&self) -> usize {
        self.field.e
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    /// Power-basis coefficients as exact rationals.
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    /// Integer value if the number is a rational integer that fits in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_rational() && self.den.is_one() {
            self.num[0].to_i64()
        } else {
            None
        }
    }

    /// Coefficients are integral, i.e. the value lies in `Z[z_e]`.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Value in `Q(z_{e'})` for a multiple `e'` of the modulus.
    pub fn lift(&self, e2: usize) -> Self {
        let e = self.field.e;
        assert!(e2 % e == 0, "cannot lift from modulus {e} to {e2}");
        if e2 == e {
            return self.clone();
        }
        let step = e2 / e;
        let mut buf = vec![BigInt::zero(); e2];
        for (i, c) in self.num.iter().enumerate() {
            buf[i * step] = c.clone();
        }
        let field = CycloField::get(e2);
        let num = field.reduce_big(&buf);
        CycloNumber {
            field,
            num,
            den: self.den.clone(),
        }
    }

    /// The automorphism `z -> z^k`.
    pub fn galois_apply(&self, k: usize) -> Result<Self> {
        let e = self.field.e;
        if gcd(k as u64, e as u64) != 1 {
            return Err(Error::Parameter(format!(
                "galois residue {k} is not a unit mod {e}"
            )));
        }
        Ok(self.galois_unchecked(k))
    }

    pub(crate) fn galois_unchecked(&self, k: usize) -> Self {
        let e = self.field.e;
        let mut buf = vec![BigInt::zero(); e];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                buf[(i * k) % e] += c;
            }
        }
        let num = self.field.reduce_big(&buf);
        CycloNumber {
            field: self.field.clone(),
            num,
            den: self.den.clone(),
        }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        let e = self.field.e;
        self.galois_unchecked(if e == 1 { 0 } else { e - 1 })
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        normalize(self.field.clone(), num, &self.den * q.denom())
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact decimal-free comparison used for deterministic sorting.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        if self.field.e != other.field.e {
            let (a, b) = common(self, other);
            return a.canonical_cmp(&b);
        }
        for (a, b) in self.num.iter().zip(&other.num) {
            let l = a * &other.den;
            let r = b * &self.den;
            match l.cmp(&r) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Numerical value as `(re, im)`, for display only.
    pub fn approx(&self) -> (f64, f64) {
        let e = self.field.e as f64;
        let den = self.den.to_f64().unwrap_or(f64::NAN);
        let (mut re, mut im) = (0.0, 0.0);
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = 2.0 * std::f64::consts::PI * i as f64 / e;
            let c = c.to_f64().unwrap_or(f64::NAN) / den;
            re += c * t.cos();
            im += c * t.sin();
        }
        (re, im)
    }

    pub fn approx_string(&self) -> String {
        let (re, im) = self.approx();
        let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
        let (re, im) = (clean(re), clean(im));
        if im == 0.0 {
            format!("{re:.6}")
        } else if im < 0.0 {
            format!("{re:.6}-{:.6}i", -im)
        } else {
            format!("{re:.6}+{im:.6}i")
        }
    }

    /// Parses the exact format produced by `Display`, e.g. `1 - 1/2·z^3 + z`.
    pub fn parse(e: usize, text: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("cannot parse cyclotomic value `{text}`"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes: Vec<char> = s.chars().collect();
        let mut pieces = Vec::new();
        for i in 1..bytes.len() {
            if (bytes[i] == '+' || bytes[i] == '-') && bytes[i - 1] != '^' {
                pieces.push(bytes[start..i].iter().collect::<String>());
                start = i;
            }
        }
        pieces.push(bytes[start..].iter().collect::<String>());
        for piece in pieces {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(rest) => (-1, rest.to_string()),
                None => (1, piece.strip_prefix('+').unwrap_or(&piece).to_string()),
            };
            let (coef, exp) = if let Some(pos) = body.find('z') {
                let c = body[..pos].trim_end_matches('·').trim_end_matches('*');
                let c = if c.is_empty() { "1" } else { c };
                let k = match body[pos + 1..].strip_prefix('^') {
                    Some(k) => k.parse::<usize>().map_err(|_| bad())?,
                    None if body[pos + 1..].is_empty() => 1,
                    None => return Err(bad()),
                };
                (c.to_string(), k)
            } else {
                (body.clone(), 0)
            };
            let q: BigRational = coef.parse().map_err(|_| bad())?;
            terms.push((exp, q * BigInt::from(sign)));
        }
        Ok(Self::from_terms(e, &terms))
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = BigRational::new(c.clone(), self.den.clone());
            let neg = q.is_negative();
            let a = q.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}·")?;
                    }
                    if i == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for CycloNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CycloNumber", 3)?;
        st.serialize_field("e", &self.field.e)?;
        st.serialize_field("exact", &self.to_string())?;
        st.serialize_field("approx", &self.approx_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            e: usize,
            exact: String,
        }
        let raw = Raw::deserialize(d)?;
        if raw.e == 0 {
            return Err(serde::de::Error::custom("modulus must be positive"));
        }
        CycloNumber::parse(raw.e, &raw.exact).map_err(serde::de::Error::custom)
    }
}

fn binary<F>(a: &CycloNumber, b: &CycloNumber, op: F) -> CycloNumber
where
    F: Fn(&CycloNumber, &CycloNumber) -> CycloNumber,
{
    if a.field.e == b.field.e {
        op(a, b)
    } else {
        let (x, y) = common(a, b);
        op(&x, &y)
    }
}

fn add_same(a: &CycloNumber, b: &CycloNumber, sign: i32) -> CycloNumber {
    if a.den == b.den {
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| if sign > 0 { x + y } else { x - y })
            .collect();
        return normalize(a.field.clone(), num, a.den.clone());
    }
    let den = a.den.lcm(&b.den);
    let (fa, fb) = (&den / &a.den, &den / &b.den);
    let num = a
        .num
        .iter()
        .zip(&b.num)
        .map(|(x, y)| {
            if sign > 0 {
                x * &fa + y * &fb
            } else {
                x * &fa - y * &fb
            }
        })
        .collect();
    normalize(a.field.clone(), num, den)
}

fn mul_same(a: &CycloNumber, b: &CycloNumber) -> CycloNumber {
    let e = a.field.e;
    let mut buf = vec![BigInt::zero(); e];
    for (i, x) in a.num.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.num.iter().enumerate() {
            if !y.is_zero() {
                buf[(i + j) % e] += x * y;
            }
        }
    }
    let num = a.field.reduce_big(&buf);
    normalize(a.field.clone(), num, &a.den * &b.den)
}

impl<'a> Add<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        binary(self, rhs, |a, b| add_same(a, b, 1))
    }
}

impl<'a> Sub<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        binary(self, rhs, |a, b| add_same(a, b, -1))
    }
}

impl<'a> Mul<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        binary(self, rhs, mul_same)
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Sums of products of algebraic integers in an unreduced `i128` buffer,
/// reduced once at the end. Falls back to exact field arithmetic when an
/// operand has a denominator or a coefficient does not fit.
pub struct CycloAccumulator {
    e: usize,
    buf: Vec<i128>,
    fallback: Option<CycloNumber>,
}

impl CycloAccumulator {
    pub fn new(e: usize) -> Self {
        CycloAccumulator {
            e,
            buf: vec![0; e],
            fallback: None,
        }
    }

    fn small(x: &CycloNumber) -> Option<Vec<(usize, i128)>> {
        if !x.den.is_one() {
            return None;
        }
        let mut out = Vec::new();
        for (i, c) in x.num.iter().enumerate() {
            if !c.is_zero() {
                let v = c.to_i64()?;
                out.push((i, v as i128));
            }
        }
        Some(out)
    }

    fn step(&self, x: &CycloNumber) -> Option<usize> {
        (self.e % x.field.e == 0).then(|| self.e / x.field.e)
    }

    /// Adds `n * a * b`.
    pub fn add_product(&mut self, a: &CycloNumber, b: &CycloNumber, n: i64) {
        if let (Some(sa), Some(sb), Some(ta), Some(tb)) =
            (Self::small(a), Self::small(b), self.step(a), self.step(b))
        {
            if sa.iter().chain(&sb).all(|(_, c)| c.abs() < (1 << 40)) {
                for &(i, x) in &sa {
                    for &(j, y) in &sb {
                        self.buf[(i * ta + j * tb) % self.e] += x * y * n as i128;
                    }
                }
                return;
            }
        }
        let term = (a * b).scale_int(n);
        self.add_slow(term);
    }

    /// Adds `n * a`.
    pub fn add_scaled(&mut self, a: &CycloNumber, n: i64) {
        if let (Some(sa), Some(ta)) = (Self::small(a), self.step(a)) {
            for &(i, x) in &sa {
                self.buf[(i * ta) % self.e] += x * n as i128;
            }
            return;
        }
        self.add_slow(a.scale_int(n));
    }

    fn add_slow(&mut self, term: CycloNumber) {
        self.fallback = Some(match self.fallback.take() {
            None => term,
            Some(acc) => &acc + &term,
        });
    }

    pub fn finish(self) -> CycloNumber {
        let fast = CycloNumber::from_cyclic_i128(self.e, &self.buf);
        match self.fallback {
            None => fast,
            Some(f) => &fast + &f,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.len() - 1, 48);
        assert_eq!(p105[7], -2);
        for n in 1..60u64 {
            assert_eq!(
                cyclotomic_polynomial(n as usize).len() as u64 - 1,
                crate::arith::euler_phi(n)
            );
        }
    }

    #[test]
    fn reductions() {
        let z4 = CycloNumber::root_of_unity(4, 1);
        assert_eq!(&z4 * &z4, CycloNumber::from_integer(4, -1));
        let s = &CycloNumber::root_of_unity(3, 1) + &CycloNumber::root_of_unity(3, 2);
        assert_eq!(s, CycloNumber::from_integer(3, -1));
        // z5 + z5^4 satisfies x^2 + x - 1 = 0
        let t = &CycloNumber::root_of_unity(5, 1) + &CycloNumber::root_of_unity(5, 4);
        let lhs = &(&(&t * &t) + &t) - &CycloNumber::one(5);
        assert!(lhs.is_zero());
        assert!(!t.is_rational());
    }

    #[test]
    fn galois_and_lifting() {
        let z8 = CycloNumber::root_of_unity(8, 1);
        assert_eq!(
            z8.galois_apply(3).unwrap(),
            CycloNumber::root_of_unity(8, 3)
        );
        assert!(z8.galois_apply(2).is_err());
        let z3 = CycloNumber::root_of_unity(3, 1);
        assert_eq!(z3.lift(12), CycloNumber::root_of_unity(12, 4));
        assert_eq!(
            &z3 * &CycloNumber::root_of_unity(4, 1),
            CycloNumber::root_of_unity(12, 7)
        );
    }

    #[test]
    fn display_and_parse_round_trip() {
        let x = CycloNumber::from_terms(7, &[(0, q(1, 2)), (3, q(-2, 3)), (1, q(1, 1))]);
        let text = x.to_string();
        assert_eq!(text, "1/2 + z - 2/3·z^3");
        assert_eq!(CycloNumber::parse(7, &text).unwrap(), x);
        assert_eq!(
            CycloNumber::parse(7, "-z^6").unwrap(),
            -&CycloNumber::root_of_unity(7, 6)
        );
        assert!(CycloNumber::parse(7, "1 + w").is_err());
        let json = serde_json::to_string(&x).unwrap();
        let back: CycloNumber = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn accumulator_matches_field_arithmetic() {
        let a = &CycloNumber::root_of_unity(15, 2) + &CycloNumber::from_integer(15, 3);
        let b = &CycloNumber::root_of_unity(5, 3) - &CycloNumber::root_of_unity(3, 1);
        let half = CycloNumber::from_rational(15, &q(1, 2));
        let mut acc = CycloAccumulator::new(15);
        acc.add_product(&a, &b, 2);
        acc.add_product(&half, &a, 1);
        acc.add_scaled(&b, -1);
        let expect = &(&(&a * &b).scale_int(2) + &(&half * &a)) - &b;
        assert_eq!(acc.finish(), expect);
    }
}
