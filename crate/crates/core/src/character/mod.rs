//! Complex irreducible characters with exact cyclotomic values.
//!
//! Tables are computed by Dixon's method (or directly for abelian groups)
//! and ordered deterministically: trivial character first, then by degree,
//! then by the value tuple.

mod dixon;
mod ops;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::cyclo::{CycloAccumulator, CycloNumber};
use crate::error::{Error, Result};
use crate::group::{ConjClassData, FiniteGroup};

pub use dixon::{dixon_prime, DIXON_SEARCH_LIMIT};
pub use ops::{
    clifford_report, induce, inflate, padic_orbits, restrict, CliffordRow, GaloisOrbitPartition,
    OrbitScope, SubgroupView,
};

/// The irreducible characters of a finite group.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    fingerprint: u64,
    label: String,
    order: usize,
    exponent: usize,
    classes: ConjClassData,
    /// `power_maps[j][t]` is the class of `rep_j^t` for `t < ord(rep_j)`.
    power_maps: Vec<Vec<usize>>,
    chars: Vec<Vec<CycloNumber>>,
    degrees: Vec<u64>,
}

fn cmp_rows(a: &[CycloNumber], b: &[CycloNumber]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.canonical_cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

/// Hash key for a value row inside one table (all values share a modulus).
fn row_key(row: &[CycloNumber]) -> Vec<(Vec<BigInt>, BigInt)> {
    row.iter()
        .map(|v| (v.numerators().to_vec(), v.denominator().clone()))
        .collect()
}

impl CharacterTable {
    pub fn compute(g: &FiniteGroup) -> Result<Self> {
        let classes = g.classes().clone();
        let e = g.exponent();
        let power_maps: Vec<Vec<usize>> = classes
            .representatives
            .iter()
            .map(|&z| {
                let o = classes.orders[z];
                let mut out = Vec::with_capacity(o);
                let mut x = 0;
                for _ in 0..o {
                    out.push(classes.class_of[x]);
                    x = g.mul(x, z);
                }
                out
            })
            .collect();
        let mut rows: Vec<(u64, Vec<CycloNumber>)> = if g.is_abelian() {
            abelian_characters(g, e)
        } else {
            dixon::dixon(g, &classes, &power_maps, e)?
        };
        rows.sort_by(|(da, ra), (db, rb)| {
            let ta = ra.iter().all(|v| v.to_i64() == Some(1));
            let tb = rb.iter().all(|v| v.to_i64() == Some(1));
            tb.cmp(&ta).then(da.cmp(db)).then_with(|| cmp_rows(ra, rb))
        });
        let degrees = rows.iter().map(|(d, _)| *d).collect();
        let chars = rows.into_iter().map(|(_, r)| r).collect();
        Ok(CharacterTable {
            fingerprint: g.fingerprint(),
            label: g.label().to_string(),
            order: g.order(),
            exponent: e,
            classes,
            power_maps,
            chars,
            degrees,
        })
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn group_fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    /// Modulus `e` of the ambient field `Q(z_e)`.
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn classes(&self) -> &ConjClassData {
        &self.classes
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.degrees[i]
    }

    pub fn row(&self, i: usize) -> &[CycloNumber] {
        &self.chars[i]
    }

    pub fn rows(&self) -> &[Vec<CycloNumber>] {
        &self.chars
    }

    pub fn value(&self, i: usize, j: usize) -> &CycloNumber {
        &self.chars[i][j]
    }

    /// Class of `rep_j^k`.
    pub fn power_class(&self, j: usize, k: usize) -> usize {
        let pm = &self.power_maps[j];
        pm[k % pm.len()]
    }

    pub fn character(self: &Arc<Self>, i: usize) -> ClassFunction {
        ClassFunction {
            table: self.clone(),
            values: self.chars[i].clone(),
        }
    }

    pub fn trivial(self: &Arc<Self>) -> ClassFunction {
        self.character(0)
    }

    /// `|G|` at the identity and `0` elsewhere.
    pub fn regular(self: &Arc<Self>) -> ClassFunction {
        let e = self.exponent;
        let values = (0..self.classes.len())
            .map(|j| CycloNumber::from_integer(e, if j == 0 { self.order as i64 } else { 0 }))
            .collect();
        ClassFunction {
            table: self.clone(),
            values,
        }
    }

    /// Index of the character with the given value row.
    pub fn index_of(&self, row: &[CycloNumber]) -> Option<usize> {
        self.chars.iter().position(|r| r.as_slice() == row)
    }

    /// Permutation `i -> index of sigma_k(chi_i)`, using
    /// `sigma_k(chi)(g) = chi(g^k)`.
    pub fn galois_permutation(&self, k: usize) -> Vec<usize> {
        let index: HashMap<_, usize> = self
            .chars
            .iter()
            .enumerate()
            .map(|(i, r)| (row_key(r), i))
            .collect();
        self.chars
            .iter()
            .map(|row| {
                let image: Vec<CycloNumber> = (0..row.len())
                    .map(|j| row[self.power_class(j, k)].clone())
                    .collect();
                index[&row_key(&image)]
            })
            .collect()
    }

    /// Classes on which the character takes the value `chi(1)`.
    pub fn kernel_classes(&self, i: usize) -> Vec<usize> {
        let d = &self.chars[i][0];
        (0..self.classes.len())
            .filter(|&j| &self.chars[i][j] == d)
            .collect()
    }

    /// Checks row and column orthogonality and the degree sum exactly.
    pub fn verify_orthogonality(&self) -> Result<()> {
        let r = self.len();
        let e = self.exponent;
        let fail = |what: String| Err(Error::Internal(format!("orthogonality fails: {what}")));
        let total: u64 = self.degrees.iter().map(|d| d * d).sum();
        if total != self.order as u64 {
            return fail(format!("degree squares sum to {total}"));
        }
        for a in 0..r {
            for b in a..r {
                let mut acc = CycloAccumulator::new(e);
                for j in 0..r {
                    acc.add_product(
                        &self.chars[a][j],
                        &self.chars[b][self.classes.inverse_class[j]],
                        self.classes.size(j) as i64,
                    );
                }
                let expect = if a == b { self.order as i64 } else { 0 };
                if acc.finish().to_i64() != Some(expect) {
                    return fail(format!("rows {a}, {b}"));
                }
            }
        }
        for j in 0..r {
            for k in j..r {
                let mut acc = CycloAccumulator::new(e);
                for row in &self.chars {
                    acc.add_product(&row[j], &row[self.classes.inverse_class[k]], 1);
                }
                let expect = if j == k {
                    (self.order / self.classes.size(j)) as i64
                } else {
                    0
                };
                if acc.finish().to_i64() != Some(expect) {
                    return fail(format!("columns {j}, {k}"));
                }
            }
        }
        Ok(())
    }
}

/// Linear characters of an abelian group, built along the greedy generator
/// chain: each character on `<g_1..g_i>` extends to `g_{i+1}` in `r` ways,
/// `r` being the least power of `g_{i+1}` already in the subgroup.
fn abelian_characters(g: &FiniteGroup, e: usize) -> Vec<(u64, Vec<CycloNumber>)> {
    let n = g.order();
    let mut members = vec![0usize];
    let mut inside = vec![false; n];
    inside[0] = true;
    // exponents of z_e, indexed by element
    let mut chars: Vec<Vec<usize>> = vec![vec![0; n]];
    for &gen in g.generators() {
        if inside[gen] {
            continue;
        }
        let mut r = 1;
        let mut x = gen;
        while !inside[x] {
            x = g.mul(x, gen);
            r += 1;
        }
        let gr = x;
        let mut new_members = Vec::with_capacity(members.len() * r);
        let mut coset = vec![(0usize, 0usize); 0];
        let mut pw = 0usize;
        for s in 0..r {
            for &y in &members {
                let z = g.mul(y, pw);
                new_members.push(z);
                coset.push((y, s));
            }
            pw = g.mul(pw, gen);
        }
        let mut next = Vec::with_capacity(chars.len() * r);
        for chi in &chars {
            let a = chi[gr];
            for i in 0..r {
                let b = (a / r + i * (e / r)) % e;
                let mut ext = chi.clone();
                for (&z, &(y, s)) in new_members.iter().zip(&coset) {
                    ext[z] = (chi[y] + s * b) % e;
                }
                next.push(ext);
            }
        }
        chars = next;
        for &z in &new_members {
            inside[z] = true;
        }
        members = new_members;
    }
    let roots: Vec<CycloNumber> = (0..e).map(|k| CycloNumber::root_of_unity(e, k)).collect();
    let cls = g.classes();
    chars
        .into_iter()
        .map(|chi| {
            (
                1,
                cls.representatives
                    .iter()
                    .map(|&z| roots[chi[z]].clone())
                    .collect(),
            )
        })
        .collect()
}

/// A class function on the group of a character table.
#[derive(Debug, Clone)]
pub struct ClassFunction {
    table: Arc<CharacterTable>,
    values: Vec<CycloNumber>,
}

impl PartialEq for ClassFunction {
    fn eq(&self, other: &Self) -> bool {
        self.table.fingerprint == other.table.fingerprint && self.values == other.values
    }
}

impl Serialize for ClassFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl ClassFunction {
    pub fn new(table: Arc<CharacterTable>, values: Vec<CycloNumber>) -> Result<Self> {
        if values.len() != table.classes.len() {
            return Err(Error::GroupMismatch(format!(
                "class function has {} values for {} classes",
                values.len(),
                table.classes.len()
            )));
        }
        Ok(ClassFunction { table, values })
    }

    pub fn table(&self) -> &Arc<CharacterTable> {
        &self.table
    }

    pub fn values(&self) -> &[CycloNumber] {
        &self.values
    }

    pub fn value(&self, j: usize) -> &CycloNumber {
        &self.values[j]
    }

    /// Value at the identity.
    pub fn degree(&self) -> &CycloNumber {
        &self.values[0]
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.table.fingerprint != other.table.fingerprint {
            return Err(Error::GroupMismatch(
                "class functions live on different groups".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ClassFunction {
            table: self.table.clone(),
            values,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ClassFunction {
            table: self.table.clone(),
            values,
        })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(ClassFunction {
            table: self.table.clone(),
            values,
        })
    }

    pub fn scale(&self, n: i64) -> Self {
        ClassFunction {
            table: self.table.clone(),
            values: self.values.iter().map(|v| v.scale_int(n)).collect(),
        }
    }

    /// `|G|^{-1} sum_g a(g) b(g^{-1})`.
    pub fn inner_product(&self, other: &Self) -> Result<CycloNumber> {
        self.same_group(other)?;
        let cls = &self.table.classes;
        let mut acc = CycloAccumulator::new(self.table.exponent);
        for j in 0..cls.len() {
            acc.add_product(
                &self.values[j],
                &other.values[cls.inverse_class[j]],
                cls.size(j) as i64,
            );
        }
        let order = BigRational::new(BigInt::from(1), BigInt::from(self.table.order));
        Ok(acc.finish().scale(&order))
    }

    /// Inner products with every irreducible character.
    pub fn decompose(&self) -> Vec<CycloNumber> {
        (0..self.table.len())
            .map(|i| {
                let chi = self.table.character(i);
                self.inner_product(&chi).expect("same table")
            })
            .collect()
    }

    /// Integer multiplicities when this is a character (all inner products
    /// with irreducibles are nonnegative integers, not all zero).
    pub fn multiplicities(&self) -> Option<Vec<u64>> {
        let m: Vec<Option<i64>> = self.decompose().iter().map(CycloNumber::to_i64).collect();
        let m: Option<Vec<i64>> = m.into_iter().collect();
        let m = m?;
        if m.iter().any(|&x| x < 0) || m.iter().all(|&x| x == 0) {
            return None;
        }
        Some(m.into_iter().map(|x| x as u64).collect())
    }

    pub fn is_character(&self) -> bool {
        self.multiplicities().is_some()
    }

    pub fn is_irreducible(&self) -> bool {
        self.multiplicities()
            .is_some_and(|m| m.iter().sum::<u64>() == 1)
    }

    /// `ker chi = {g : chi(g) = chi(1)}`, verified to be a normal subgroup.
    pub fn kernel(&self, g: &FiniteGroup) -> Result<crate::group::SubgroupRef> {
        if g.fingerprint() != self.table.fingerprint {
            return Err(Error::GroupMismatch(
                "class function belongs to another group".into(),
            ));
        }
        if !self.is_character() {
            return Err(Error::NotCharacter(
                "inner products with irreducibles are not nonnegative integers".into(),
            ));
        }
        let cls = &self.table.classes;
        let d = self.degree();
        let members: Vec<usize> = (0..cls.len())
            .filter(|&j| &self.values[j] == d)
            .flat_map(|j| cls.classes[j].iter().copied())
            .collect();
        let k = g.subgroup_from_members(&members)?;
        g.require_normal(&k, "kernel")?;
        Ok(k)
    }
}

/// JSON form of a character table with exact value strings.
#[derive(Debug, Clone, Serialize, serde::Deserialize, PartialEq)]
pub struct TableExport {
    pub group: String,
    pub order: usize,
    pub exponent: usize,
    pub class_sizes: Vec<usize>,
    pub class_representatives: Vec<usize>,
    pub class_orders: Vec<usize>,
    pub degrees: Vec<u64>,
    /// Rows of exact values in the power basis of `Q(z_e)`.
    pub values: Vec<Vec<String>>,
}

impl CharacterTable {
    pub fn export(&self) -> TableExport {
        TableExport {
            group: self.label.clone(),
            order: self.order,
            exponent: self.exponent,
            class_sizes: (0..self.classes.len())
                .map(|j| self.classes.size(j))
                .collect(),
            class_representatives: self.classes.representatives.clone(),
            class_orders: (0..self.classes.len())
                .map(|j| self.classes.rep_order(j))
                .collect(),
            degrees: self.degrees.clone(),
            values: self
                .chars
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect())
                .collect(),
        }
    }

    /// Checks an exported table (e.g. a golden fixture) against this one.
    pub fn matches_export(&self, ex: &TableExport) -> Result<bool> {
        if ex.order != self.order || ex.values.len() != self.len() {
            return Ok(false);
        }
        for (row, ex_row) in self.chars.iter().zip(&ex.values) {
            for (v, s) in row.iter().zip(ex_row) {
                if *v != CycloNumber::parse(ex.exponent, s)? {
                    return Ok(false);
                }
            }
        }
        Ok(ex.degrees == self.degrees)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec};

    fn table(name: &str) -> Arc<CharacterTable> {
        build_group(&GroupSpec::from_shortcut(name).unwrap())
            .unwrap()
            .character_table()
            .unwrap()
    }

    #[test]
    fn degrees_of_small_groups() {
        assert_eq!(table("trivial").degrees(), &[1]);
        assert_eq!(table("S3").degrees(), &[1, 1, 2]);
        assert_eq!(table("S4").degrees(), &[1, 1, 2, 3, 3]);
        assert_eq!(table("A5").degrees(), &[1, 3, 3, 4, 5]);
        assert_eq!(table("Q8").degrees(), &[1, 1, 1, 1, 2]);
        assert_eq!(table("Aff5").degrees(), &[1, 1, 1, 1, 4]);
        assert_eq!(table("C6").degrees(), &[1; 6]);
    }

    #[test]
    fn orthogonality_on_small_groups() {
        for name in [
            "S3", "S4", "A4", "A5", "Q8", "D10", "Dic3", "Aff7", "7:3", "C12", "V4", "S5",
        ] {
            table(name).verify_orthogonality().unwrap();
        }
    }

    #[test]
    fn aff5_large_character_is_rational() {
        let t = table("Aff5");
        assert!(t.row(4).iter().all(CycloNumber::is_rational));
    }

    #[test]
    fn kernels() {
        let g = build_group(&GroupSpec::symmetric(4)).unwrap();
        let t = g.character_table().unwrap();
        assert_eq!(t.character(2).kernel(&g).unwrap().order(), 4);
        assert_eq!(t.trivial().kernel(&g).unwrap().order(), 24);
        let q = build_group(&GroupSpec::quaternion()).unwrap();
        let tq = q.character_table().unwrap();
        assert!(tq.character(4).kernel(&q).unwrap().is_trivial());
        let bad = t.character(1).sub(&t.character(2)).unwrap();
        assert!(matches!(bad.kernel(&g), Err(Error::NotCharacter(_))));
    }

    #[test]
    fn export_round_trip() {
        let t = table("Dic3");
        let ex = t.export();
        let json = serde_json::to_string(&ex).unwrap();
        let back: TableExport = serde_json::from_str(&json).unwrap();
        assert!(t.matches_export(&back).unwrap());
    }
}
