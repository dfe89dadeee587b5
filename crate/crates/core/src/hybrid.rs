//! Hybridness of `Z_p[G]`: central idempotents, defect-zero tests, the
//! N-hybrid certificate, Wedderburn shapes and the base-change checks.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{split_prime_part, valuation};
use crate::character::{padic_orbits, CharacterTable, ClassFunction, OrbitScope, SubgroupView};
use crate::cyclo::{is_p_integral, padic_galois_group, CycloAccumulator, CycloNumber};
use crate::error::{Error, Result};
use crate::group::{structure_name, FiniteGroup, SubgroupRef};

/// A central element of `Q(z_e)[G]`, stored by its coefficient on each
/// conjugacy class.
#[derive(Debug, Clone)]
pub struct IdempotentElement {
    table: Arc<CharacterTable>,
    coeffs: Vec<CycloNumber>,
}

impl PartialEq for IdempotentElement {
    fn eq(&self, other: &Self) -> bool {
        self.table.group_fingerprint() == other.table.group_fingerprint()
            && self.coeffs == other.coeffs
    }
}

impl Serialize for IdempotentElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl IdempotentElement {
    pub fn from_class_coefficients(
        table: Arc<CharacterTable>,
        coeffs: Vec<CycloNumber>,
    ) -> Result<Self> {
        if coeffs.len() != table.classes().len() {
            return Err(Error::GroupMismatch(
                "one coefficient per class is required".into(),
            ));
        }
        Ok(IdempotentElement { table, coeffs })
    }

    pub fn zero(table: Arc<CharacterTable>) -> Self {
        let e = table.exponent();
        let coeffs = vec![CycloNumber::zero(e); table.classes().len()];
        IdempotentElement { table, coeffs }
    }

    pub fn one(table: Arc<CharacterTable>) -> Self {
        let mut z = Self::zero(table);
        z.coeffs[0] = CycloNumber::one(z.table.exponent());
        z
    }

    /// Coefficient on each class.
    pub fn class_coefficients(&self) -> &[CycloNumber] {
        &self.coeffs
    }

    /// Coefficient of the group element `x`.
    pub fn coefficient(&self, x: usize) -> &CycloNumber {
        &self.coeffs[self.table.classes().class_of[x]]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CycloNumber::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].to_i64() == Some(1) && self.coeffs[1..].iter().all(CycloNumber::is_zero)
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.table.group_fingerprint() != other.table.group_fingerprint() {
            return Err(Error::GroupMismatch(
                "group algebra elements of different groups".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(IdempotentElement {
            table: self.table.clone(),
            coeffs,
        })
    }

    /// Convolution product, computed from the multiplication table.
    pub fn convolve(&self, other: &Self, g: &FiniteGroup) -> Result<Self> {
        self.same_group(other)?;
        if g.fingerprint() != self.table.group_fingerprint() {
            return Err(Error::GroupMismatch(
                "group does not match the element".into(),
            ));
        }
        let cls = g.classes();
        let r = cls.len();
        let e = self.table.exponent();
        let mut coeffs = Vec::with_capacity(r);
        let mut counts = vec![0i64; r * r];
        for &z in &cls.representatives {
            counts.iter_mut().for_each(|c| *c = 0);
            for x in 0..g.order() {
                let i = cls.class_of[x];
                let j = cls.class_of[g.mul(g.inv(x), z)];
                counts[i * r + j] += 1;
            }
            let mut acc = CycloAccumulator::new(e);
            for i in 0..r {
                if self.coeffs[i].is_zero() {
                    continue;
                }
                for j in 0..r {
                    let n = counts[i * r + j];
                    if n != 0 {
                        acc.add_product(&self.coeffs[i], &other.coeffs[j], n);
                    }
                }
            }
            coeffs.push(acc.finish());
        }
        Ok(IdempotentElement {
            table: self.table.clone(),
            coeffs,
        })
    }

    pub fn is_idempotent(&self, g: &FiniteGroup) -> Result<bool> {
        Ok(self.convolve(self, g)? == *self)
    }

    /// All coefficients lie in `Z_p` (at the fixed prime above `p`).
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.coeffs.iter().all(|c| is_p_integral(c, p))
    }
}

/// `e_N` with its integrality flag.
#[derive(Debug, Clone, Serialize)]
pub struct TraceIdempotent {
    pub element: IdempotentElement,
    pub p: u64,
    pub p_integral: bool,
}

/// `e_N = |N|^{-1} sum_{n in N} n`.
pub fn trace_idempotent(g: &FiniteGroup, n: &SubgroupRef, p: u64) -> Result<TraceIdempotent> {
    g.require_normal(n, "N")?;
    let table = g.character_table()?;
    let e = table.exponent();
    let cls = g.classes();
    let w = BigRational::new(BigInt::from(1), BigInt::from(n.order()));
    let coeffs = (0..cls.len())
        .map(|j| {
            if n.contains(cls.representatives[j]) {
                CycloNumber::from_rational(e, &w)
            } else {
                CycloNumber::zero(e)
            }
        })
        .collect();
    Ok(TraceIdempotent {
        element: IdempotentElement { table, coeffs },
        p,
        p_integral: n.order() as u64 % p != 0,
    })
}

pub(crate) fn character_coefficients(table: &CharacterTable, i: usize) -> Vec<CycloNumber> {
    let cls = table.classes();
    let f = BigRational::new(
        BigInt::from(table.degree(i)),
        BigInt::from(table.group_order()),
    );
    (0..cls.len())
        .map(|j| table.value(i, cls.inverse_class[j]).scale(&f))
        .collect()
}

/// `e_chi = chi(1)/|G| sum_g chi(g^{-1}) g`, checked to be idempotent.
pub fn character_idempotent(chi: &ClassFunction, g: &FiniteGroup) -> Result<IdempotentElement> {
    let table = chi.table().clone();
    let i = table
        .index_of(chi.values())
        .ok_or_else(|| Error::NotCharacter("not an irreducible character".into()))?;
    let el = IdempotentElement {
        coeffs: character_coefficients(&table, i),
        table,
    };
    if !el.is_idempotent(g)? {
        return Err(Error::Internal("character idempotent fails e*e = e".into()));
    }
    Ok(el)
}

/// `epsilon_chi`: sum of `e_{sigma chi}` over the p-adic Galois orbit.
#[derive(Debug, Clone, Serialize)]
pub struct RationalIdempotent {
    pub character: usize,
    pub p: u64,
    pub orbit: Vec<usize>,
    pub element: IdempotentElement,
    pub p_integral: bool,
}

pub fn rational_idempotent(g: &FiniteGroup, i: usize, p: u64) -> Result<RationalIdempotent> {
    let table = g.character_table()?;
    if i >= table.len() {
        return Err(Error::NotCharacter(format!(
            "no irreducible character with index {i}"
        )));
    }
    let orbits = padic_orbits(g, p, &OrbitScope::All)?;
    let orbit = orbits.orbits[orbits.orbit_of(i)].clone();
    let e = table.exponent();
    let mut coeffs = vec![CycloNumber::zero(e); table.classes().len()];
    for &k in &orbit {
        for (c, x) in coeffs.iter_mut().zip(character_coefficients(&table, k)) {
            *c = &*c + &x;
        }
    }
    let element = IdempotentElement { table, coeffs };
    let p_integral = element.is_p_integral(p);
    Ok(RationalIdempotent {
        character: i,
        p,
        orbit,
        element,
        p_integral,
    })
}

/// `v_p(chi(1)) = v_p(|G|)`.
pub fn is_defect_zero(group_order: usize, degree: u64, p: u64) -> bool {
    valuation(degree, p) == valuation(group_order as u64, p)
}

/// `N <= ker chi_i`.
pub fn kernel_contains(g: &FiniteGroup, table: &CharacterTable, i: usize, n: &SubgroupRef) -> bool {
    let d = table.value(i, 0);
    let cls = g.classes();
    n.members()
        .iter()
        .all(|&x| table.value(i, cls.class_of[x]) == d)
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Witness {
    pub character: usize,
    pub degree: u64,
    pub vp_degree: u32,
    pub vp_order: u32,
}

impl Witness {
    pub fn defect_zero(&self) -> bool {
        self.vp_degree == self.vp_order
    }
}

/// Outcome of the N-hybrid test for `Z_p[G]`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct HybridCertificate {
    pub group: String,
    pub group_order: usize,
    pub n_order: usize,
    pub p: u64,
    pub verdict: bool,
    pub reason: String,
    /// One entry per irreducible character whose kernel misses `N`.
    pub witnesses: Vec<Witness>,
    pub failing: Vec<usize>,
}

#[allow(non_snake_case)]
pub fn is_N_hybrid(g: &FiniteGroup, n: &SubgroupRef, p: u64) -> Result<HybridCertificate> {
    is_n_hybrid(g, n, p)
}

/// `Z_p[G]` is N-hybrid iff `p` does not divide `|N|` and every irreducible
/// character with `N` outside its kernel has defect zero.
pub fn is_n_hybrid(g: &FiniteGroup, n: &SubgroupRef, p: u64) -> Result<HybridCertificate> {
    if !crate::arith::is_prime(p) {
        return Err(Error::Parameter(format!("{p} is not prime")));
    }
    g.require_normal(n, "N")?;
    let mut cert = HybridCertificate {
        group: g.label().to_string(),
        group_order: g.order(),
        n_order: n.order(),
        p,
        verdict: false,
        reason: String::new(),
        witnesses: Vec::new(),
        failing: Vec::new(),
    };
    if n.order() as u64 % p == 0 {
        cert.reason = format!("condition (i) fails: {p} divides |N| = {}", n.order());
        return Ok(cert);
    }
    let table = g.character_table()?;
    let vp_order = valuation(g.order() as u64, p);
    for i in 0..table.len() {
        if kernel_contains(g, &table, i, n) {
            continue;
        }
        let w = Witness {
            character: i,
            degree: table.degree(i),
            vp_degree: valuation(table.degree(i), p),
            vp_order,
        };
        if !w.defect_zero() {
            cert.failing.push(i);
        }
        cert.witnesses.push(w);
    }
    cert.verdict = cert.failing.is_empty();
    cert.reason = if cert.verdict {
        format!(
            "all {} characters with N outside the kernel have defect zero",
            cert.witnesses.len()
        )
    } else {
        format!(
            "{} characters with N outside the kernel have positive defect",
            cert.failing.len()
        )
    };
    Ok(cert)
}

/// Center of a matrix component.
#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Center {
    /// Unramified extension of `Q_p` of the given degree.
    Unramified { degree: usize },
    /// Degree known, ramification not determined.
    Undetermined { degree: usize },
}

impl Center {
    pub fn degree(&self) -> usize {
        match *self {
            Center::Unramified { degree } | Center::Undetermined { degree } => degree,
        }
    }
}

/// Center of `Q_p(chi)` from the stabilizer of the character in the
/// decomposition group: unramified iff the inertia subgroup
/// `{k = 1 mod m}` (with `e = p^a m`) fixes the character.
pub fn orbit_center(table: &CharacterTable, i: usize, p: u64, degree: usize) -> Center {
    let e = table.exponent();
    let (_, m) = split_prime_part(e as u64, p);
    let dec = padic_galois_group(e, p);
    let row = table.row(i);
    let fixed = |k: usize| (0..row.len()).all(|j| row[table.power_class(j, k)] == row[j]);
    let inertia_fixes = dec
        .elements
        .iter()
        .filter(|&&k| k as u64 % m == 1 % m)
        .all(|&k| fixed(k));
    if inertia_fixes {
        Center::Unramified { degree }
    } else {
        Center::Undetermined { degree }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component {
    /// `Z_p[G/N]`.
    GroupAlgebra {
        quotient: String,
        quotient_order: usize,
    },
    /// `M_size(O)` for one p-adic orbit of characters.
    Matrix {
        size: u64,
        center: Center,
        characters: Vec<usize>,
    },
}

/// `Z_p[G] = Z_p[G/N] + (maximal order)`, component by component.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct WedderburnShape {
    pub group: String,
    pub p: u64,
    pub n_order: usize,
    pub components: Vec<Component>,
    /// `dim Q_p[G/N] + sum n^2 [center : Q_p]`, equal to `|G|`.
    pub described_dimension: usize,
}

impl WedderburnShape {
    /// Matrix sizes, in component order.
    pub fn matrix_sizes(&self) -> Vec<u64> {
        self.components
            .iter()
            .filter_map(|c| match c {
                Component::Matrix { size, .. } => Some(*size),
                _ => None,
            })
            .collect()
    }
}

pub(crate) fn render_matrix(size: u64, center: &Center, p: u64, ring: &str) -> String {
    match center {
        Center::Unramified { degree: 1 } => format!("M{size}({ring})"),
        Center::Unramified { degree } => format!("M{size}({ring}^ur{degree})"),
        Center::Undetermined { degree } => format!("M{size}(O[{degree}/Q{p}])"),
    }
}

impl fmt::Display for WedderburnShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| match c {
                Component::GroupAlgebra { quotient, .. } => format!("Z{p}[{quotient}]"),
                Component::Matrix { size, center, .. } => {
                    render_matrix(*size, center, p, &format!("Z{p}"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Decomposition of an N-hybrid group ring.
pub fn group_ring_shape(g: &FiniteGroup, n: &SubgroupRef, p: u64) -> Result<WedderburnShape> {
    let cert = is_n_hybrid(g, n, p)?;
    if !cert.verdict {
        return Err(Error::Precondition(format!(
            "Z_{p}[G] is not N-hybrid: {}",
            cert.reason
        )));
    }
    let q = g.quotient(n)?;
    let table = g.character_table()?;
    let mut components = vec![Component::GroupAlgebra {
        quotient: structure_name(&q.group),
        quotient_order: q.group.order(),
    }];
    let mut dim = q.group.order();
    let orbits = padic_orbits(g, p, &OrbitScope::All)?;
    for (orbit, &degree) in orbits.orbits.iter().zip(&orbits.field_degrees) {
        let i = orbit[0];
        if kernel_contains(g, &table, i, n) {
            continue;
        }
        let size = table.degree(i);
        dim += (size * size) as usize * degree;
        components.push(Component::Matrix {
            size,
            center: orbit_center(&table, i, p, degree),
            characters: orbit.clone(),
        });
    }
    if dim != g.order() {
        return Err(Error::Internal(format!(
            "shape describes dimension {dim}, expected {}",
            g.order()
        )));
    }
    Ok(WedderburnShape {
        group: g.label().to_string(),
        p,
        n_order: n.order(),
        components,
        described_dimension: dim,
    })
}

/// `Z_p[G]` N-hybrid implies `Z_p[H]` K-hybrid.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ImplicationReport {
    pub lhs: bool,
    pub rhs: bool,
    pub respected: bool,
}

/// Both sides of the downward base change, evaluated independently.
/// `H`, `N` normal in `G`; `K` normal in `H` with `K <= N`.
pub fn check_basechange_down(
    g: &FiniteGroup,
    h: &SubgroupRef,
    n: &SubgroupRef,
    k: &SubgroupRef,
    p: u64,
) -> Result<ImplicationReport> {
    g.require_normal(h, "H")?;
    g.require_normal(n, "N")?;
    if !k.is_subset_of(n) || !k.is_subset_of(h) {
        return Err(Error::NotSubgroup("K must lie in both H and N".into()));
    }
    let view = SubgroupView::new(g, h)?;
    let k_local = view.localize(k)?;
    view.group.require_normal(&k_local, "K in H")?;
    let lhs = is_n_hybrid(g, n, p)?.verdict;
    let rhs = is_n_hybrid(&view.group, &k_local, p)?.verdict;
    Ok(ImplicationReport {
        lhs,
        rhs,
        respected: !lhs || rhs,
    })
}

/// `Z_p[G]` N-hybrid iff `Z_p[H]` N-hybrid, when `p` does not divide `[G:H]`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EquivalenceReport {
    Inapplicable { index: usize },
    Checked { lhs: bool, rhs: bool, agree: bool },
}

pub fn check_basechange_up(
    g: &FiniteGroup,
    h: &SubgroupRef,
    n: &SubgroupRef,
    p: u64,
) -> Result<EquivalenceReport> {
    g.require_normal(h, "H")?;
    g.require_normal(n, "N")?;
    if !n.is_subset_of(h) {
        return Err(Error::NotSubgroup("N must lie in H".into()));
    }
    let index = g.order() / h.order();
    if index as u64 % p == 0 {
        return Ok(EquivalenceReport::Inapplicable { index });
    }
    let view = SubgroupView::new(g, h)?;
    let n_local = view.localize(n)?;
    let lhs = is_n_hybrid(g, n, p)?.verdict;
    let rhs = is_n_hybrid(&view.group, &n_local, p)?.verdict;
    Ok(EquivalenceReport::Checked {
        lhs,
        rhs,
        agree: lhs == rhs,
    })
}
