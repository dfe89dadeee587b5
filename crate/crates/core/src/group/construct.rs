//! Group constructors and the serialized `GroupSpec` record.

use std::collections::HashMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::field::FiniteField;
use super::{check_cap, FiniteGroup, GroupAutomorphism};
use crate::arith::{is_prime, is_prime_power, pow_mod, primitive_root, valuation};
use crate::error::{Error, Result};

/// One generator of the acting group in a semidirect product together with
/// the images of chosen elements of the normal factor under its action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionGen {
    pub element: usize,
    pub images: Vec<(usize, usize)>,
}

/// Named constructors with their parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    tag = "construct",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum Construct {
    Cyclic {
        n: u64,
    },
    /// Dihedral group of order `2n`.
    Dihedral {
        n: u64,
    },
    Symmetric {
        n: u64,
    },
    Alternating {
        n: u64,
    },
    Quaternion,
    /// Dicyclic group of order `4n`.
    Dicyclic {
        n: u64,
    },
    Affine {
        q: u64,
    },
    Klein,
    /// `C_l ⋊ C_q` with `C_q` acting faithfully.
    Metacyclic {
        l: u64,
        q: u64,
    },
    /// Upper unitriangular `n x n` matrices over `F_{p^f}` extended by a
    /// diagonal element of prime order `q`.
    Unitriangular {
        p: u64,
        f: u64,
        n: u64,
        q: u64,
    },
    /// `F_q ⋊ (M ⋊ <phi>)` with `M` all of `F_q^x`, or only its Sylow
    /// subgroup for the prime `restrict` when given.
    AffineFrobenius {
        q: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        restrict: Option<u64>,
    },
    /// `(F_l)^2 ⋊ Dic_p` with a fixed-point-free action; `l` searched when absent.
    DicyclicFrobenius {
        p: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<u64>,
    },
    Semidirect {
        normal: Box<GroupSpec>,
        complement: Box<GroupSpec>,
        action: Vec<ActionGen>,
    },
    DirectProduct {
        factors: Vec<GroupSpec>,
    },
}

const CONSTRUCTORS: &[&str] = &[
    "cyclic",
    "dihedral",
    "symmetric",
    "alternating",
    "quaternion",
    "dicyclic",
    "affine",
    "klein",
    "metacyclic",
    "unitriangular",
    "affine_frobenius",
    "dicyclic_frobenius",
    "semidirect",
    "direct_product",
];

/// Serialized description of a group: either a named constructor or an
/// explicit multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Construct(Construct),
    Table(Vec<Vec<u32>>),
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GroupSpec::Construct(c) => c.serialize(s),
            GroupSpec::Table(t) => {
                #[derive(Serialize)]
                struct T<'a> {
                    table: &'a Vec<Vec<u32>>,
                }
                T { table: t }.serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = Value::deserialize(d)?;
        GroupSpec::from_value(v).map_err(D::Error::custom)
    }
}

impl GroupSpec {
    pub fn from_value(v: Value) -> std::result::Result<Self, String> {
        if let Some(name) = v.as_str() {
            return GroupSpec::from_shortcut(name).map_err(|e| e.to_string());
        }
        let obj = v
            .as_object()
            .ok_or("group spec must be a shortcut string or a JSON object")?;
        if let Some(t) = obj.get("table") {
            if obj.len() != 1 {
                return Err("a table spec has only the key `table`".into());
            }
            let table: Vec<Vec<u32>> =
                serde_json::from_value(t.clone()).map_err(|e| format!("table: {e}"))?;
            return Ok(GroupSpec::Table(table));
        }
        let name = obj
            .get("construct")
            .and_then(Value::as_str)
            .ok_or("group spec needs `construct` or `table`")?;
        if !CONSTRUCTORS.contains(&name) {
            return Err(format!("unknown constructor `{name}`"));
        }
        let c: Construct = serde_json::from_value(v.clone()).map_err(|e| format!("{name}: {e}"))?;
        Ok(GroupSpec::Construct(c))
    }

    /// Resolves a named shortcut such as `S4`, `A4`, `Q8`, `V4`, `Dic3`,
    /// `Aff4`, `C12`, `D10`, `7:3` (metacyclic) or `trivial`.
    pub fn from_shortcut(name: &str) -> Result<Self> {
        let c = |k: Construct| Ok(GroupSpec::Construct(k));
        let num = |s: &str| -> Result<u64> {
            s.parse::<u64>()
                .map_err(|_| Error::UnknownConstructor(name.to_string()))
        };
        match name {
            "trivial" | "1" => return c(Construct::Cyclic { n: 1 }),
            "Q8" => return c(Construct::Quaternion),
            "V4" => return c(Construct::Klein),
            _ => {}
        }
        if let Some((l, q)) = name.split_once(':') {
            return c(Construct::Metacyclic {
                l: num(l)?,
                q: num(q)?,
            });
        }
        for (prefix, mk) in [
            (
                "Dic",
                (|n| Construct::Dicyclic { n }) as fn(u64) -> Construct,
            ),
            ("Aff", |q| Construct::Affine { q }),
            ("C", |n| Construct::Cyclic { n }),
            ("S", |n| Construct::Symmetric { n }),
            ("A", |n| Construct::Alternating { n }),
        ] {
            if let Some(rest) = name.strip_prefix(prefix) {
                if !rest.is_empty() && rest.chars().all(|ch| ch.is_ascii_digit()) {
                    return c(mk(num(rest)?));
                }
            }
        }
        if let Some(rest) = name.strip_prefix('D') {
            let m = num(rest)?;
            if m % 2 != 0 || m == 0 {
                return Err(Error::Parameter(format!(
                    "dihedral shortcut D{m} needs an even order"
                )));
            }
            return c(Construct::Dihedral { n: m / 2 });
        }
        Err(Error::UnknownConstructor(name.to_string()))
    }

    pub fn cyclic(n: u64) -> Self {
        GroupSpec::Construct(Construct::Cyclic { n })
    }
    pub fn dihedral(n: u64) -> Self {
        GroupSpec::Construct(Construct::Dihedral { n })
    }
    pub fn symmetric(n: u64) -> Self {
        GroupSpec::Construct(Construct::Symmetric { n })
    }
    pub fn alternating(n: u64) -> Self {
        GroupSpec::Construct(Construct::Alternating { n })
    }
    pub fn quaternion() -> Self {
        GroupSpec::Construct(Construct::Quaternion)
    }
    pub fn dicyclic(n: u64) -> Self {
        GroupSpec::Construct(Construct::Dicyclic { n })
    }
    pub fn affine(q: u64) -> Self {
        GroupSpec::Construct(Construct::Affine { q })
    }
    pub fn klein() -> Self {
        GroupSpec::Construct(Construct::Klein)
    }
    pub fn metacyclic(l: u64, q: u64) -> Self {
        GroupSpec::Construct(Construct::Metacyclic { l, q })
    }
    pub fn unitriangular(p: u64, f: u64, n: u64, q: u64) -> Self {
        GroupSpec::Construct(Construct::Unitriangular { p, f, n, q })
    }
    pub fn affine_frobenius(q: u64, restrict: Option<u64>) -> Self {
        GroupSpec::Construct(Construct::AffineFrobenius { q, restrict })
    }
    pub fn dicyclic_frobenius(p: u64, l: Option<u64>) -> Self {
        GroupSpec::Construct(Construct::DicyclicFrobenius { p, l })
    }
    pub fn direct_product(factors: Vec<GroupSpec>) -> Self {
        GroupSpec::Construct(Construct::DirectProduct { factors })
    }
    pub fn semidirect(normal: GroupSpec, complement: GroupSpec, action: Vec<ActionGen>) -> Self {
        GroupSpec::Construct(Construct::Semidirect {
            normal: Box::new(normal),
            complement: Box::new(complement),
            action,
        })
    }

    /// Order of the group the spec describes, computed without building it
    /// where the formula is cheap.
    pub fn expected_order(&self) -> Option<u64> {
        let GroupSpec::Construct(c) = self else {
            return None;
        };
        Some(match c {
            Construct::Cyclic { n } => *n,
            Construct::Dihedral { n } => 2 * n,
            Construct::Symmetric { n } => (1..=*n).product(),
            Construct::Alternating { n } => ((1..=*n).product::<u64>() / 2).max(1),
            Construct::Quaternion => 8,
            Construct::Dicyclic { n } => 4 * n,
            Construct::Affine { q } => q * (q - 1),
            Construct::Klein => 4,
            Construct::Metacyclic { l, q } => l * q,
            Construct::Unitriangular { p, f, n, q } => {
                q.checked_mul(p.checked_pow((f * n * (n - 1) / 2) as u32)?)?
            }
            _ => return None,
        })
    }

    /// Short display name.
    pub fn name(&self) -> String {
        match self {
            GroupSpec::Table(t) => format!("table({})", t.len()),
            GroupSpec::Construct(c) => match c {
                Construct::Cyclic { n: 1 } => "trivial".into(),
                Construct::Cyclic { n } => format!("C{n}"),
                Construct::Dihedral { n } => format!("D{}", 2 * n),
                Construct::Symmetric { n } => format!("S{n}"),
                Construct::Alternating { n } => format!("A{n}"),
                Construct::Quaternion => "Q8".into(),
                Construct::Dicyclic { n } => format!("Dic{n}"),
                Construct::Affine { q } => format!("Aff({q})"),
                Construct::Klein => "V4".into(),
                Construct::Metacyclic { l, q } => format!("C{l}:C{q}"),
                Construct::Unitriangular { p, f, n, q } => format!("UT{n}(F_{p}^{f}):C{q}"),
                Construct::AffineFrobenius { q, restrict: None } => format!("AGammaL(1,{q})"),
                Construct::AffineFrobenius {
                    q,
                    restrict: Some(p),
                } => format!("F{q}:(mu_{p}:Frob)"),
                Construct::DicyclicFrobenius { p, l: Some(l) } => format!("F{l}^2:Dic{p}"),
                Construct::DicyclicFrobenius { p, l: None } => format!("F_l^2:Dic{p}"),
                Construct::Semidirect {
                    normal, complement, ..
                } => {
                    format!("({}):({})", normal.name(), complement.name())
                }
                Construct::DirectProduct { factors } => factors
                    .iter()
                    .map(|f| f.name())
                    .collect::<Vec<_>>()
                    .join("x"),
            },
        }
    }
}

/// Builds and validates the group described by `spec`.
pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    if let Some(order) = spec.expected_order() {
        validate_params(spec)?;
        check_cap(order)?;
    }
    let label = spec.name();
    let g = match spec {
        GroupSpec::Table(rows) => {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidTable("table is not square".into()));
            }
            FiniteGroup::from_table(rows.concat(), n, label, Some(spec.clone()))?
        }
        GroupSpec::Construct(c) => build_construct(c, label, spec)?,
    };
    Ok(g)
}

fn validate_params(spec: &GroupSpec) -> Result<()> {
    let GroupSpec::Construct(c) = spec else {
        return Ok(());
    };
    let bad = |m: String| Err(Error::Parameter(m));
    match c {
        Construct::Cyclic { n } if *n == 0 => bad("cyclic order must be positive".into()),
        Construct::Dihedral { n } if *n == 0 => bad("dihedral parameter must be positive".into()),
        Construct::Symmetric { n } | Construct::Alternating { n } if *n == 0 || *n > 6 => {
            bad(format!("symmetric/alternating degree {n} outside 1..=6"))
        }
        Construct::Dicyclic { n } if *n < 2 => bad("dicyclic parameter must be at least 2".into()),
        Construct::Affine { q } if *q < 2 || *q > 64 || is_prime_power(*q).is_none() => {
            bad(format!("Aff(q) needs a prime power 2 <= q <= 64, got {q}"))
        }
        Construct::Metacyclic { l, q } if !is_prime(*l) || *q < 2 || (*l - 1) % *q != 0 => bad(
            format!("metacyclic needs l prime and q >= 2 dividing l-1, got l={l}, q={q}"),
        ),
        Construct::Unitriangular { p, f, n, q } => {
            if !is_prime(*p) || *f == 0 || !is_prime(*q) {
                return bad("unitriangular needs primes p, q and f >= 1".into());
            }
            if !(*q > *n && *n > 1) {
                return bad(format!("unitriangular needs q > n > 1, got q={q}, n={n}"));
            }
            let pf = p
                .checked_pow(*f as u32)
                .ok_or_else(|| Error::Parameter("p^f too large".into()))?;
            if (pf - 1) % q != 0 {
                return bad(format!("q={q} does not divide p^f - 1 = {}", pf - 1));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn build_construct(c: &Construct, label: String, spec: &GroupSpec) -> Result<FiniteGroup> {
    let meta = Some(spec.clone());
    match c {
        Construct::Cyclic { n } => {
            let n = *n as usize;
            from_index_fn(n, |a, b| (a + b) % n, label, meta)
        }
        Construct::Dihedral { n } => {
            let n = *n as usize;
            // r^k s^j stored at j*n + k
            from_index_fn(
                2 * n,
                |x, y| {
                    let (j1, k1) = (x / n, x % n);
                    let (j2, k2) = (y / n, y % n);
                    let k = if j1 == 0 { k1 + k2 } else { k1 + n - k2 };
                    ((j1 + j2) % 2) * n + k % n
                },
                label,
                meta,
            )
        }
        Construct::Symmetric { n } => permutation_group(*n as usize, false, label, meta),
        Construct::Alternating { n } => permutation_group(*n as usize, true, label, meta),
        Construct::Quaternion => dicyclic(2, label, meta),
        Construct::Dicyclic { n } => dicyclic(*n as usize, label, meta),
        Construct::Klein => from_index_fn(4, |a, b| a ^ b, label, meta),
        Construct::Affine { q } => affine(*q as u32, label, meta),
        Construct::Metacyclic { l, q } => {
            let (l, q) = (*l as usize, *q as usize);
            let r = pow_mod(primitive_root(l as u64), ((l - 1) / q) as u64, l as u64) as usize;
            let rp: Vec<usize> = (0..q)
                .map(|y| pow_mod(r as u64, y as u64, l as u64) as usize)
                .collect();
            // (x, y) = a^x b^y stored at y*l + x, with b a b^{-1} = a^r
            from_index_fn(
                l * q,
                |u, v| {
                    let (x1, y1) = (u % l, u / l);
                    let (x2, y2) = (v % l, v / l);
                    ((y1 + y2) % q) * l + (x1 + rp[y1] * x2) % l
                },
                label,
                meta,
            )
        }
        Construct::Unitriangular { p, f, n, q } => {
            unitriangular(*p, *f, *n as usize, *q, label, meta)
        }
        Construct::AffineFrobenius { q, restrict } => affine_frobenius(*q, *restrict, label, meta),
        Construct::DicyclicFrobenius { p, l } => dicyclic_frobenius(*p, *l, label, meta),
        Construct::DirectProduct { factors } => {
            let groups: Vec<FiniteGroup> =
                factors.iter().map(build_group).collect::<Result<_>>()?;
            let order: u64 = groups.iter().map(|g| g.order() as u64).product();
            check_cap(order)?;
            let sizes: Vec<usize> = groups.iter().map(|g| g.order()).collect();
            let decode = |mut x: usize| -> Vec<usize> {
                let mut out = vec![0; sizes.len()];
                for i in (0..sizes.len()).rev() {
                    out[i] = x % sizes[i];
                    x /= sizes[i];
                }
                out
            };
            from_index_fn(
                order as usize,
                |a, b| {
                    let (u, v) = (decode(a), decode(b));
                    u.iter()
                        .zip(&v)
                        .enumerate()
                        .fold(0, |acc, (i, (&s, &t))| acc * sizes[i] + groups[i].mul(s, t))
                },
                label,
                meta,
            )
        }
        Construct::Semidirect {
            normal,
            complement,
            action,
        } => {
            let n = build_group(normal)?;
            let h = build_group(complement)?;
            check_cap((n.order() * h.order()) as u64)?;
            let mut autos: Vec<(usize, GroupAutomorphism)> = Vec::new();
            for a in action {
                if a.element >= h.order() {
                    return Err(Error::Parameter(format!(
                        "acting element {} out of range",
                        a.element
                    )));
                }
                autos.push((a.element, GroupAutomorphism::from_images(&n, &a.images)?));
            }
            let phi = extend_action(&n, &h, &autos)?;
            semidirect_product(&n, &h, &phi, label, meta)
        }
    }
}

/// Builds a group on `0..n` from an index-level product.
pub(crate) fn from_index_fn(
    n: usize,
    product: impl Fn(usize, usize) -> usize,
    label: String,
    meta: Option<GroupSpec>,
) -> Result<FiniteGroup> {
    check_cap(n as u64)?;
    let mut table = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            table[a * n + b] = product(a, b) as u32;
        }
    }
    FiniteGroup::from_table(table, n, label, meta)
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, used: &mut Vec<bool>, n: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i as u8);
                rec(prefix, used, n, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], n, &mut out);
    out
}

fn is_even(p: &[u8]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// Permutations in lexicographic order; the product applies the right
/// factor first.
fn permutation_group(
    n: usize,
    even_only: bool,
    label: String,
    meta: Option<GroupSpec>,
) -> Result<FiniteGroup> {
    let perms: Vec<Vec<u8>> = permutations(n)
        .into_iter()
        .filter(|p| !even_only || is_even(p))
        .collect();
    FiniteGroup::from_elements(
        perms,
        |s, t| t.iter().map(|&i| s[i as usize]).collect::<Vec<u8>>(),
        label,
        meta,
    )
}

fn dicyclic(n: usize, label: String, meta: Option<GroupSpec>) -> Result<FiniteGroup> {
    let m = 2 * n;
    // a^k x^j stored at j*m + k, with x^2 = a^n and x a x^{-1} = a^{-1}
    from_index_fn(
        4 * n,
        |u, v| {
            let (j1, k1) = (u / m, u % m);
            let (j2, k2) = (v / m, v % m);
            if j1 == 0 {
                j2 * m + (k1 + k2) % m
            } else {
                let k = k1 + m - k2;
                if j2 == 0 {
                    m + k % m
                } else {
                    (k + n) % m
                }
            }
        },
        label,
        meta,
    )
}

fn affine(q: u32, label: String, meta: Option<GroupSpec>) -> Result<FiniteGroup> {
    let f = FiniteField::new(q)?;
    let units = f.units();
    let pos: HashMap<u32, usize> = units.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let qs = q as usize;
    // x -> a x + b stored at index(a)*q + b; composition applies the right factor first
    from_index_fn(
        qs * (qs - 1),
        |u, v| {
            let (a1, b1) = (units[u / qs], (u % qs) as u32);
            let (a2, b2) = (units[v / qs], (v % qs) as u32);
            let a = f.mul(a1, a2);
            let b = f.add(f.mul(a1, b2), b1);
            pos[&a] * qs + b as usize
        },
        label,
        meta,
    )
}

fn unitriangular(
    p: u64,
    f: u64,
    n: usize,
    q: u64,
    label: String,
    meta: Option<GroupSpec>,
) -> Result<FiniteGroup> {
    let field = FiniteField::new(p.pow(f as u32) as u32)?;
    let fq = field.order() as usize;
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let ksize = fq.pow(slots.len() as u32);
    let qs = q as usize;
    let omega = field.pow(field.primitive_element(), (fq as u64 - 1) / q);
    let b: Vec<u32> = (0..n).map(|j| field.pow(omega, j as u64)).collect();
    // scale[k][slot] = (b_i / b_j)^k
    let scale: Vec<Vec<u32>> = (0..qs)
        .map(|k| {
            slots
                .iter()
                .map(|&(i, j)| field.pow(field.mul(b[i], field.inv(b[j])), k as u64))
                .collect()
        })
        .collect();
    let decode = |mut x: usize| -> Vec<u32> {
        let mut m = vec![0u32; slots.len()];
        for s in m.iter_mut() {
            *s = (x % fq) as u32;
            x /= fq;
        }
        m
    };
    let encode =
        |m: &[u32]| -> usize { m.iter().rev().fold(0usize, |acc, &c| acc * fq + c as usize) };
    let slot_of = |i: usize, j: usize| slots.iter().position(|&s| s == (i, j)).unwrap();
    let slot_table: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i < j { slot_of(i, j) } else { 0 })
                .collect()
        })
        .collect();
    let entry = |m: &[u32], i: usize, j: usize| -> u32 {
        if i == j {
            1
        } else if i < j {
            m[slot_table[i][j]]
        } else {
            0
        }
    };
    // kernel product first, as a table
    let mut ktab = vec![0u32; ksize * ksize];
    let mats: Vec<Vec<u32>> = (0..ksize).map(decode).collect();
    for x in 0..ksize {
        for y in 0..ksize {
            let mut out = vec![0u32; slots.len()];
            for (s, &(i, j)) in slots.iter().enumerate() {
                let mut acc = 0;
                for t in i..=j {
                    acc = field.add(acc, field.mul(entry(&mats[x], i, t), entry(&mats[y], t, j)));
                }
                out[s] = acc;
            }
            ktab[x * ksize + y] = encode(&out) as u32;
        }
    }
    // conjugation by h^k on the kernel
    let conj: Vec<Vec<u32>> = (0..qs)
        .map(|k| {
            mats.iter()
                .map(|m| {
                    let c: Vec<u32> = m
                        .iter()
                        .zip(&scale[k])
                        .map(|(&a, &s)| field.mul(a, s))
                        .collect();
                    encode(&c) as u32
                })
                .collect()
        })
        .collect();
    from_index_fn(
        ksize * qs,
        |u, v| {
            let (x1, k1) = (u % ksize, u / ksize);
            let (x2, k2) = (v % ksize, v / ksize);
            let x = ktab[x1 * ksize + conj[k1][x2] as usize] as usize;
            ((k1 + k2) % qs) * ksize + x
        },
        label,
        meta,
    )
}

fn affine_frobenius(
    q: u64,
    restrict: Option<u64>,
    label: String,
    meta: Option<GroupSpec>,
) -> Result<FiniteGroup> {
    let (ell, n) =
        is_prime_power(q).ok_or_else(|| Error::Parameter(format!("{q} is not a prime power")))?;
    let field = FiniteField::new(q as u32)?;
    let mult: Vec<u32> = match restrict {
        None => field.units(),
        Some(p) => {
            if !is_prime(p) || (q - 1) % p != 0 {
                return Err(Error::Parameter(format!(
                    "restriction prime {p} must divide q-1 = {}",
                    q - 1
                )));
            }
            let pk = p.pow(valuation(q - 1, p));
            field
                .units()
                .into_iter()
                .filter(|&a| field.pow(a, pk) == 1)
                .collect()
        }
    };
    let order = q * mult.len() as u64 * n as u64;
    check_cap(order)?;
    let pos: HashMap<u32, usize> = mult.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let frob_pow = |x: u32, j: usize| -> u32 { field.pow(x, ell.pow(j as u32)) };
    let qs = q as usize;
    let ms = mult.len();
    let ns = n as usize;
    // x -> a * phi^j(x) + b stored at (j*|M| + index(a))*q + b
    from_index_fn(
        order as usize,
        |u, v| {
            let (b1, rest1) = ((u % qs) as u32, u / qs);
            let (a1, j1) = (mult[rest1 % ms], rest1 / ms);
            let (b2, rest2) = ((v % qs) as u32, v / qs);
            let (a2, j2) = (mult[rest2 % ms], rest2 / ms);
            let a = field.mul(a1, frob_pow(a2, j1));
            let b = field.add(field.mul(a1, frob_pow(b2, j1)), b1);
            (((j1 + j2) % ns) * ms + pos[&a]) * qs + b as usize
        },
        label,
        meta,
    )
}

type Mat2 = [u64; 4];

fn mat_mul(a: &Mat2, b: &Mat2, l: u64) -> Mat2 {
    [
        (a[0] * b[0] + a[1] * b[2]) % l,
        (a[0] * b[1] + a[1] * b[3]) % l,
        (a[2] * b[0] + a[3] * b[2]) % l,
        (a[2] * b[1] + a[3] * b[3]) % l,
    ]
}

fn mat_order(a: &Mat2, l: u64, limit: u64) -> Option<u64> {
    let id = [1, 0, 0, 1];
    let mut x = *a;
    for k in 1..=limit {
        if x == id {
            return Some(k);
        }
        x = mat_mul(&x, a, l);
    }
    None
}

/// Search bound for the auxiliary prime in the dicyclic construction.
pub const DICYCLIC_SEARCH_BOUND: u64 = 10_000;

/// Least prime `l` not dividing `2p` with `l = ±1 mod 2p`.
pub fn dicyclic_frobenius_prime(p: u64) -> Result<u64> {
    (3..DICYCLIC_SEARCH_BOUND)
        .find(|&l| {
            is_prime(l) && (2 * p) % l != 0 && (l % (2 * p) == 1 || l % (2 * p) == 2 * p - 1)
        })
        .ok_or_else(|| {
            Error::SearchExhausted(format!(
                "no prime l = ±1 mod {} below {DICYCLIC_SEARCH_BOUND}",
                2 * p
            ))
        })
}

fn dicyclic_frobenius(
    p: u64,
    l: Option<u64>,
    label: String,
    meta: Option<GroupSpec>,
) -> Result<FiniteGroup> {
    if p < 3 || !is_prime(p) {
        return Err(Error::Parameter(format!(
            "dicyclic Frobenius needs an odd prime p, got {p}"
        )));
    }
    let l = match l {
        Some(l) => {
            if !is_prime(l) || (2 * p) % l == 0 || !(l % (2 * p) == 1 || l % (2 * p) == 2 * p - 1) {
                return Err(Error::Parameter(format!(
                    "l={l} must be a prime with l = ±1 mod {}",
                    2 * p
                )));
            }
            l
        }
        None => dicyclic_frobenius_prime(p)?,
    };
    check_cap(4 * p * l * l)?;
    let all: Vec<Mat2> = (0..l.pow(4))
        .map(|c| [c % l, (c / l) % l, (c / (l * l)) % l, c / (l * l * l)])
        .filter(|m| (m[0] * m[3] + l * l - (m[1] * m[2]) % l) % l == 1)
        .collect();
    let a = *all
        .iter()
        .find(|m| mat_order(m, l, 2 * p) == Some(2 * p))
        .ok_or_else(|| {
            Error::SearchExhausted(format!("no element of order {} in SL2(F_{l})", 2 * p))
        })?;
    let minus_one = [l - 1, 0, 0, l - 1];
    // a^{2p-1}
    let a_inv = (1..2 * p).fold([1, 0, 0, 1], |acc, _| mat_mul(&acc, &a, l));
    let j = *all
        .iter()
        .find(|m| mat_mul(m, m, l) == minus_one && mat_mul(m, &a, l) == mat_mul(&a_inv, m, l))
        .ok_or_else(|| Error::SearchExhausted(format!("no quaternionic element in SL2(F_{l})")))?;
    // close <a, j>, identity first
    let mut dic: Vec<Mat2> = vec![[1, 0, 0, 1]];
    let mut i = 0;
    while i < dic.len() {
        for g in [a, j] {
            let y = mat_mul(&dic[i], &g, l);
            if !dic.contains(&y) {
                dic.push(y);
            }
        }
        i += 1;
    }
    if dic.len() as u64 != 4 * p {
        return Err(Error::Internal(format!(
            "dicyclic closure has order {}",
            dic.len()
        )));
    }
    dic[1..].sort();
    let pos: HashMap<Mat2, usize> = dic.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let ls = l as usize;
    let vs = ls * ls;
    // (v, m) stored at index(m) * l^2 + v, product (v1 + m1 v2, m1 m2)
    from_index_fn(
        vs * dic.len(),
        |u, v| {
            let (v1, m1) = (u % vs, &dic[u / vs]);
            let (v2, m2) = (v % vs, &dic[v / vs]);
            let (x2, y2) = ((v2 % ls) as u64, (v2 / ls) as u64);
            let x = ((v1 % ls) as u64 + m1[0] * x2 + m1[1] * y2) % l;
            let y = ((v1 / ls) as u64 + m1[2] * x2 + m1[3] * y2) % l;
            pos[&mat_mul(m1, m2, l)] * vs + (y as usize) * ls + x as usize
        },
        label,
        meta,
    )
}

/// Extends automorphisms attached to generators of `h` to the full action
/// `h -> Aut(n)`, returned as permutations indexed by elements of `h`.
pub(crate) fn extend_action(
    n: &FiniteGroup,
    h: &FiniteGroup,
    gens: &[(usize, GroupAutomorphism)],
) -> Result<Vec<Vec<usize>>> {
    let mut phi: Vec<Option<Vec<usize>>> = vec![None; h.order()];
    phi[0] = Some((0..n.order()).collect());
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (g, a) in gens {
            let y = h.mul(x, *g);
            let px = phi[x].as_ref().unwrap();
            let img: Vec<usize> = (0..n.order()).map(|e| px[a.apply(e)]).collect();
            match &phi[y] {
                None => {
                    phi[y] = Some(img);
                    queue.push_back(y);
                }
                Some(existing) if *existing != img => {
                    return Err(Error::NotAutomorphism(
                        "action is not a homomorphism from the complement".into(),
                    ))
                }
                _ => {}
            }
        }
    }
    phi.into_iter()
        .map(|p| {
            p.ok_or_else(|| {
                Error::Parameter("acting elements do not generate the complement".into())
            })
        })
        .collect()
}

/// `N ⋊ H` with `phi[h]` the automorphism of `N` attached to `h`;
/// elements `(n, h)` are stored at `h * |N| + n`.
pub fn semidirect_product(
    n: &FiniteGroup,
    h: &FiniteGroup,
    phi: &[Vec<usize>],
    label: String,
    meta: Option<GroupSpec>,
) -> Result<FiniteGroup> {
    let ns = n.order();
    for a in 0..h.order() {
        for b in 0..h.order() {
            let ab = h.mul(a, b);
            if (0..ns).any(|x| phi[ab][x] != phi[a][phi[b][x]]) {
                return Err(Error::NotAutomorphism(
                    "action is not a homomorphism".into(),
                ));
            }
        }
    }
    from_index_fn(
        ns * h.order(),
        |u, v| {
            let (n1, h1) = (u % ns, u / ns);
            let (n2, h2) = (v % ns, v / ns);
            h.mul(h1, h2) * ns + n.mul(n1, phi[h1][n2])
        },
        label,
        meta,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_constructors() {
        let cases = [
            (GroupSpec::cyclic(1), 1),
            (GroupSpec::dihedral(5), 10),
            (GroupSpec::symmetric(4), 24),
            (GroupSpec::alternating(5), 60),
            (GroupSpec::quaternion(), 8),
            (GroupSpec::dicyclic(3), 12),
            (GroupSpec::affine(8), 56),
            (GroupSpec::klein(), 4),
            (GroupSpec::metacyclic(7, 3), 21),
            (GroupSpec::unitriangular(2, 2, 2, 3), 12),
            (GroupSpec::affine_frobenius(4, None), 24),
            (GroupSpec::affine_frobenius(8, Some(7)), 168),
            (GroupSpec::dicyclic_frobenius(3, None), 300),
            (GroupSpec::dicyclic_frobenius(3, Some(7)), 588),
            (
                GroupSpec::direct_product(vec![GroupSpec::cyclic(2), GroupSpec::symmetric(3)]),
                12,
            ),
        ];
        for (spec, order) in cases {
            let g = build_group(&spec).unwrap();
            assert_eq!(g.order(), order, "{}", spec.name());
        }
    }

    #[test]
    fn spec_round_trip() {
        let specs = vec![
            GroupSpec::affine(5),
            GroupSpec::quaternion(),
            GroupSpec::affine_frobenius(16, Some(5)),
            GroupSpec::Table(vec![vec![0, 1], vec![1, 0]]),
            GroupSpec::semidirect(
                GroupSpec::cyclic(7),
                GroupSpec::cyclic(3),
                vec![ActionGen {
                    element: 1,
                    images: vec![(1, 2)],
                }],
            ),
        ];
        for s in specs {
            let text = serde_json::to_string(&s).unwrap();
            let back: GroupSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s);
        }
        let v: std::result::Result<GroupSpec, _> =
            serde_json::from_str(r#"{"construct":"bogus","params":{}}"#);
        assert!(v.unwrap_err().to_string().contains("unknown constructor"));
    }

    #[test]
    fn parameter_checks() {
        assert!(matches!(
            build_group(&GroupSpec::symmetric(7)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            build_group(&GroupSpec::metacyclic(7, 4)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            build_group(&GroupSpec::unitriangular(2, 2, 3, 3)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            build_group(&GroupSpec::affine(6)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            build_group(&GroupSpec::dicyclic_frobenius(5, Some(7))),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            build_group(&GroupSpec::dicyclic_frobenius(3, Some(13))),
            Err(Error::OrderCap { order: 2028, .. })
        ));
    }

    #[test]
    fn shortcuts() {
        assert_eq!(
            GroupSpec::from_shortcut("S4").unwrap(),
            GroupSpec::symmetric(4)
        );
        assert_eq!(
            GroupSpec::from_shortcut("Dic3").unwrap(),
            GroupSpec::dicyclic(3)
        );
        assert_eq!(
            GroupSpec::from_shortcut("Aff4").unwrap(),
            GroupSpec::affine(4)
        );
        assert_eq!(
            GroupSpec::from_shortcut("D8").unwrap(),
            GroupSpec::dihedral(4)
        );
        assert_eq!(
            GroupSpec::from_shortcut("7:3").unwrap(),
            GroupSpec::metacyclic(7, 3)
        );
        assert!(GroupSpec::from_shortcut("Foo").is_err());
    }
}
