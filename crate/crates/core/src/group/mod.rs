//! Finite groups stored as complete multiplication tables.
//!
//! Element `0` is always the identity. Every structural query (classes,
//! normal subgroups, quotients, Sylow subgroups, commutators, automorphisms)
//! works directly on the table, so all results are exact.

mod construct;
pub mod field;
mod names;

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith::{is_power_of, valuation};
use crate::character::CharacterTable;
use crate::error::{Error, Result};

pub use construct::{build_group, semidirect_product, GroupSpec};
pub use names::{structure_name, Fingerprint};

/// Environment variable overriding the default order cap.
pub const CAP_ENV: &str = "HYBRID_ORDER_CAP";
pub const DEFAULT_CAP: usize = 2000;

/// Largest group order any constructor will build.
pub fn order_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

pub(crate) fn check_cap(order: u64) -> Result<()> {
    let cap = order_cap();
    if order > cap as u64 {
        return Err(Error::OrderCap { order, cap });
    }
    Ok(())
}

#[derive(Default, Clone)]
struct Cache {
    generators: OnceLock<Vec<usize>>,
    orders: OnceLock<Vec<usize>>,
    classes: OnceLock<ConjClassData>,
    normals: OnceLock<Vec<SubgroupRef>>,
    table: OnceLock<Result<Arc<CharacterTable>>>,
}

/// A finite group given by its multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    label: String,
    spec: Option<GroupSpec>,
    fingerprint: u64,
    cache: Cache,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("label", &self.label)
            .field("order", &self.order)
            .finish()
    }
}

/// Conjugacy class partition. Class 0 is the identity class and every
/// representative is the least element index in its class.
#[derive(Debug, Clone, Serialize)]
pub struct ConjClassData {
    pub classes: Vec<Vec<usize>>,
    pub representatives: Vec<usize>,
    pub class_of: Vec<usize>,
    /// Element orders, indexed by element.
    pub orders: Vec<usize>,
    /// Class containing the inverses of each class.
    pub inverse_class: Vec<usize>,
}

impl ConjClassData {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn size(&self, j: usize) -> usize {
        self.classes[j].len()
    }

    pub fn rep_order(&self, j: usize) -> usize {
        self.orders[self.representatives[j]]
    }
}

/// A subgroup, recorded as the sorted list of member indices together with
/// the fingerprint of the parent table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubgroupRef {
    members: Vec<usize>,
    parent: u64,
}

impl SubgroupRef {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn parent_fingerprint(&self) -> u64 {
        self.parent
    }

    pub fn is_subset_of(&self, other: &SubgroupRef) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn intersection(&self, other: &SubgroupRef) -> SubgroupRef {
        SubgroupRef {
            members: self
                .members
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
            parent: self.parent,
        }
    }
}

/// Result of [`FiniteGroup::sylow_subgroup`].
#[derive(Debug, Clone)]
pub struct SylowData {
    pub subgroup: SubgroupRef,
    pub is_normal: bool,
}

/// Quotient group together with the projection `G -> G/N`.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: FiniteGroup,
    pub projection: Vec<usize>,
    /// Least element of each coset, indexed by quotient element.
    pub coset_reps: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from a multiplication table, checking the axioms.
    /// Associativity uses Light's test against a generating set, which is
    /// equivalent to the exhaustive check.
    pub fn from_table(
        table: Vec<u32>,
        order: usize,
        label: impl Into<String>,
        spec: Option<GroupSpec>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        check_cap(order as u64)?;
        if table.len() != order * order {
            return Err(Error::InvalidTable(format!(
                "expected {} entries, found {}",
                order * order,
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&x| x as usize >= order) {
            return Err(Error::InvalidTable(format!("entry {bad} out of range")));
        }
        for x in 0..order {
            if table[x] as usize != x || table[x * order] as usize != x {
                return Err(Error::InvalidTable(
                    "element 0 is not a two-sided identity".into(),
                ));
            }
        }
        let mut seen = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                let c = table[a * order + b] as usize;
                if seen[c] == a {
                    return Err(Error::InvalidTable(format!("row {a} repeats entry {c}")));
                }
                seen[c] = a;
            }
        }
        let mut seen = vec![usize::MAX; order];
        for b in 0..order {
            for a in 0..order {
                let c = table[a * order + b] as usize;
                if seen[c] == b {
                    return Err(Error::InvalidTable(format!("column {b} repeats entry {c}")));
                }
                seen[c] = b;
            }
        }
        let mut inv = vec![0u32; order];
        for a in 0..order {
            let b = (0..order).find(|&b| table[a * order + b] == 0).unwrap();
            if table[b * order + a] != 0 {
                return Err(Error::InvalidTable(format!(
                    "element {a} has no two-sided inverse"
                )));
            }
            inv[a] = b as u32;
        }
        let mut hasher = DefaultHasher::new();
        order.hash(&mut hasher);
        table.hash(&mut hasher);
        let g = FiniteGroup {
            order,
            mul: table,
            inv,
            label: label.into(),
            spec,
            fingerprint: hasher.finish(),
            cache: Cache::default(),
        };
        let gens = g.generators().to_vec();
        for &m in &gens {
            for x in 0..order {
                let xm = g.mul(x, m);
                for y in 0..order {
                    if g.mul(xm, y) != g.mul(x, g.mul(m, y)) {
                        return Err(Error::InvalidTable(format!(
                            "associativity fails at ({x}, {m}, {y})"
                        )));
                    }
                }
            }
        }
        Ok(g)
    }

    /// Builds a group from a list of concrete elements (identity first) and
    /// their product, looking products up in a hash index.
    pub fn from_elements<T, F>(
        elements: Vec<T>,
        product: F,
        label: impl Into<String>,
        spec: Option<GroupSpec>,
    ) -> Result<Self>
    where
        T: Eq + Hash + Clone,
        F: Fn(&T, &T) -> T,
    {
        let n = elements.len();
        check_cap(n as u64)?;
        let index: std::collections::HashMap<T, u32> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i as u32))
            .collect();
        if index.len() != n {
            return Err(Error::InvalidTable(
                "duplicate elements in enumeration".into(),
            ));
        }
        let mut table = vec![0u32; n * n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                let c = product(a, b);
                table[i * n + j] = *index.get(&c).ok_or_else(|| {
                    Error::InvalidTable("enumeration is not closed under the product".into())
                })?;
            }
        }
        FiniteGroup::from_table(table, n, label, spec)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spec(&self) -> Option<&GroupSpec> {
        self.spec.as_ref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Row-major multiplication table.
    pub fn table(&self) -> &[u32] {
        &self.mul
    }

    pub fn table_rows(&self) -> Vec<Vec<u32>> {
        self.mul.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        let mut acc = 0;
        for _ in 0..k {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// `g x g^{-1}`.
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// `a^{-1} b^{-1} a b`.
    #[inline]
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter()
            .all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_orders(&self) -> &[usize] {
        self.cache.orders.get_or_init(|| {
            (0..self.order)
                .map(|a| {
                    let mut k = 1;
                    let mut x = a;
                    while x != 0 {
                        x = self.mul(x, a);
                        k += 1;
                    }
                    k
                })
                .collect()
        })
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.element_orders()[a]
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        self.element_orders()
            .iter()
            .fold(1usize, |acc, &o| num_integer::lcm(acc, o))
    }

    /// Greedy generating set: scan elements in index order and keep those
    /// not already in the span of the earlier ones.
    pub fn generators(&self) -> &[usize] {
        self.cache
            .generators
            .get_or_init(|| self.greedy_generators(0..self.order))
    }

    fn greedy_generators(&self, candidates: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut inside = vec![false; self.order];
        inside[0] = true;
        for x in candidates {
            if !inside[x] {
                gens.push(x);
                inside = self.closure_mask(&gens);
            }
        }
        gens
    }

    fn closure_mask(&self, gens: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.order];
        inside[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        inside
    }

    fn mask_to_subgroup(&self, mask: &[bool]) -> SubgroupRef {
        SubgroupRef {
            members: (0..self.order).filter(|&x| mask[x]).collect(),
            parent: self.fingerprint,
        }
    }

    /// Subgroup generated by the given elements.
    pub fn subgroup_generated(&self, gens: &[usize]) -> SubgroupRef {
        self.mask_to_subgroup(&self.closure_mask(gens))
    }

    pub fn whole(&self) -> SubgroupRef {
        SubgroupRef {
            members: (0..self.order).collect(),
            parent: self.fingerprint,
        }
    }

    pub fn trivial_subgroup(&self) -> SubgroupRef {
        SubgroupRef {
            members: vec![0],
            parent: self.fingerprint,
        }
    }

    /// Validates a member list as a subgroup of this group.
    pub fn subgroup_from_members(&self, members: &[usize]) -> Result<SubgroupRef> {
        let mut m = members.to_vec();
        m.sort_unstable();
        m.dedup();
        if m.iter().any(|&x| x >= self.order) {
            return Err(Error::NotSubgroup("element index out of range".into()));
        }
        let s = SubgroupRef {
            members: m,
            parent: self.fingerprint,
        };
        if !s.contains(0) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        for &a in &s.members {
            for &b in &s.members {
                if !s.contains(self.mul(a, b)) {
                    return Err(Error::NotSubgroup(format!("not closed: {a}*{b}")));
                }
            }
        }
        Ok(s)
    }

    pub fn check_owned(&self, s: &SubgroupRef) -> Result<()> {
        if s.parent != self.fingerprint {
            return Err(Error::GroupMismatch(format!(
                "subgroup does not belong to {}",
                self.label
            )));
        }
        Ok(())
    }

    pub fn is_normal(&self, s: &SubgroupRef) -> bool {
        let gens = self.generators();
        s.members
            .iter()
            .all(|&x| gens.iter().all(|&g| s.contains(self.conj(g, x))))
    }

    pub fn require_normal(&self, s: &SubgroupRef, what: &str) -> Result<()> {
        self.check_owned(s)?;
        if !self.is_normal(s) {
            return Err(Error::NotNormal(format!(
                "{what} is not normal in {}",
                self.label
            )));
        }
        Ok(())
    }

    /// Conjugacy classes via orbits under the generating set.
    pub fn classes(&self) -> &ConjClassData {
        self.cache.classes.get_or_init(|| {
            let n = self.order;
            let gens = self.generators().to_vec();
            let mut class_of = vec![usize::MAX; n];
            let mut classes = Vec::new();
            let mut reps = Vec::new();
            for x in 0..n {
                if class_of[x] != usize::MAX {
                    continue;
                }
                let id = classes.len();
                let mut cell = vec![x];
                class_of[x] = id;
                let mut i = 0;
                while i < cell.len() {
                    let y = cell[i];
                    for &g in &gens {
                        let z = self.conj(g, y);
                        if class_of[z] == usize::MAX {
                            class_of[z] = id;
                            cell.push(z);
                        }
                    }
                    i += 1;
                }
                cell.sort_unstable();
                reps.push(x);
                classes.push(cell);
            }
            let inverse_class = reps.iter().map(|&r| class_of[self.inv(r)]).collect();
            ConjClassData {
                classes,
                representatives: reps,
                class_of,
                orders: self.element_orders().to_vec(),
                inverse_class,
            }
        })
    }

    /// Class of `rep_j^k`.
    pub fn power_class(&self, j: usize, k: usize) -> usize {
        let c = self.classes();
        let r = c.representatives[j];
        c.class_of[self.pow(r, k % c.orders[r])]
    }

    /// Normal closure of a set of elements.
    pub fn normal_closure(&self, elems: &[usize]) -> SubgroupRef {
        let c = self.classes();
        let mut gens = Vec::new();
        let mut inside = vec![false; self.order];
        inside[0] = true;
        for &x in elems {
            for &y in &c.classes[c.class_of[x]] {
                if !inside[y] {
                    gens.push(y);
                    inside = self.closure_mask(&gens);
                }
            }
        }
        self.mask_to_subgroup(&inside)
    }

    /// All normal subgroups, sorted by order and then lexicographically.
    /// Every normal subgroup is a join of normal closures of single classes,
    /// so the list is the join-closure of those.
    pub fn normal_subgroups(&self) -> &[SubgroupRef] {
        self.cache.normals.get_or_init(|| {
            let c = self.classes();
            let mut found: Vec<SubgroupRef> = vec![self.trivial_subgroup()];
            let mut seen: HashSet<Vec<usize>> = HashSet::from([vec![0]]);
            for j in 1..c.len() {
                let s = self.normal_closure(&[c.representatives[j]]);
                if seen.insert(s.members.clone()) {
                    found.push(s);
                }
            }
            let mut gens_of: Vec<Vec<usize>> =
                found.iter().map(|s| self.subgroup_generators(s)).collect();
            let mut frontier_start = 0;
            loop {
                let len = found.len();
                let mut added = Vec::new();
                for i in 0..len {
                    for j in frontier_start.max(i + 1)..len {
                        if found[i].is_subset_of(&found[j]) || found[j].is_subset_of(&found[i]) {
                            continue;
                        }
                        let mut gens = gens_of[i].clone();
                        gens.extend(&gens_of[j]);
                        let s = self.subgroup_generated(&gens);
                        if seen.insert(s.members.clone()) {
                            added.push(s);
                        }
                    }
                }
                if added.is_empty() {
                    break;
                }
                frontier_start = len;
                for s in added {
                    gens_of.push(self.subgroup_generators(&s));
                    found.push(s);
                }
            }
            found.sort_by(|a, b| {
                a.order()
                    .cmp(&b.order())
                    .then_with(|| a.members.cmp(&b.members))
            });
            found
        })
    }

    /// Greedy generating set of a subgroup.
    pub fn subgroup_generators(&self, s: &SubgroupRef) -> Vec<usize> {
        self.greedy_generators(s.members.iter().copied())
    }

    /// `[A, B]`, the subgroup generated by commutators `[a, b]`.
    pub fn commutator_subgroup(&self, a: &SubgroupRef, b: &SubgroupRef) -> SubgroupRef {
        let bg = self.subgroup_generators(b);
        let ag = self.subgroup_generators(a);
        let mut comms: Vec<usize> = Vec::new();
        for &x in &a.members {
            for &y in &bg {
                comms.push(self.commutator(x, y));
            }
        }
        for &x in &ag {
            for &y in &b.members {
                comms.push(self.commutator(x, y));
            }
        }
        comms.sort_unstable();
        comms.dedup();
        let base = self.subgroup_generated(&comms);
        // close under conjugation by A and B so the result is [A, B] itself
        let mut gens = self.subgroup_generators(&base);
        let mut mask = self.closure_mask(&gens);
        loop {
            let mut grew = false;
            let members: Vec<usize> = (0..self.order).filter(|&x| mask[x]).collect();
            for &x in &members {
                for &g in ag.iter().chain(&bg) {
                    let y = self.conj(g, x);
                    if !mask[y] {
                        gens.push(y);
                        mask = self.closure_mask(&gens);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        self.mask_to_subgroup(&mask)
    }

    pub fn derived_subgroup(&self) -> SubgroupRef {
        let gens = self.generators();
        let mut comms = Vec::new();
        for &a in gens {
            for &b in gens {
                comms.push(self.commutator(a, b));
            }
        }
        self.normal_closure(&comms)
    }

    pub fn center(&self) -> SubgroupRef {
        let gens = self.generators();
        SubgroupRef {
            members: (0..self.order)
                .filter(|&x| gens.iter().all(|&g| self.mul(g, x) == self.mul(x, g)))
                .collect(),
            parent: self.fingerprint,
        }
    }

    /// Lower central series `G = g_1 > g_2 > ...`, stopping when it
    /// stabilizes.
    pub fn lower_central_series(&self) -> Vec<SubgroupRef> {
        let whole = self.whole();
        let mut series = vec![whole.clone()];
        loop {
            let next = self.commutator_subgroup(series.last().unwrap(), &whole);
            if next.order() == series.last().unwrap().order() {
                break;
            }
            let done = next.is_trivial();
            series.push(next);
            if done {
                break;
            }
        }
        series
    }

    /// Nilpotency class, or `None` when the group is not nilpotent.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let series = self.lower_central_series();
        if series.last().unwrap().is_trivial() {
            Some(series.len() - 1)
        } else {
            None
        }
    }

    /// Quotient by a normal subgroup; cosets are numbered by their least
    /// element, so the identity coset is `0`.
    pub fn quotient(&self, n: &SubgroupRef) -> Result<Quotient> {
        self.require_normal(n, "quotient subgroup")?;
        let mut projection = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for x in 0..self.order {
            if projection[x] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(x);
            for &m in &n.members {
                projection[self.mul(x, m)] = id;
            }
        }
        let k = reps.len();
        let mut table = vec![0u32; k * k];
        for i in 0..k {
            for j in 0..k {
                table[i * k + j] = projection[self.mul(reps[i], reps[j])] as u32;
            }
        }
        let group =
            FiniteGroup::from_table(table, k, format!("{}/N{}", self.label, n.order()), None)?;
        Ok(Quotient {
            group,
            projection,
            coset_reps: reps,
        })
    }

    /// Subgroup relabelled as a group in its own right; returns the group
    /// and the embedding (new index -> old index).
    pub fn subgroup_as_group(&self, s: &SubgroupRef) -> Result<(FiniteGroup, Vec<usize>)> {
        self.check_owned(s)?;
        let k = s.order();
        let pos = |x: usize| s.members.binary_search(&x).unwrap();
        let mut table = vec![0u32; k * k];
        for (i, &a) in s.members.iter().enumerate() {
            for (j, &b) in s.members.iter().enumerate() {
                table[i * k + j] = pos(self.mul(a, b)) as u32;
            }
        }
        let g = FiniteGroup::from_table(table, k, format!("{}<{}>", self.label, k), None)?;
        Ok((g, s.members.clone()))
    }

    /// A Sylow `p`-subgroup built greedily from least-index `p`-elements,
    /// with its normality flag.
    pub fn sylow_subgroup(&self, p: u64) -> SylowData {
        let target = (p as usize).pow(valuation(self.order as u64, p));
        let orders = self.element_orders();
        let mut gens: Vec<usize> = Vec::new();
        let mut mask = vec![false; self.order];
        mask[0] = true;
        let mut size = 1;
        while size < target {
            let mut progressed = false;
            for x in 0..self.order {
                if mask[x] || !is_power_of(orders[x] as u64, p) {
                    continue;
                }
                let mut trial = gens.clone();
                trial.push(x);
                let m = self.closure_mask(&trial);
                let s = m.iter().filter(|&&b| b).count();
                if is_power_of(s as u64, p) {
                    gens = trial;
                    mask = m;
                    size = s;
                    progressed = true;
                    if size == target {
                        break;
                    }
                }
            }
            assert!(
                progressed,
                "a p-subgroup always extends inside a Sylow subgroup"
            );
        }
        let subgroup = self.mask_to_subgroup(&mask);
        let is_normal = self.is_normal(&subgroup);
        SylowData {
            subgroup,
            is_normal,
        }
    }

    /// `g S g^{-1}`.
    pub fn conjugate_subgroup(&self, g: usize, s: &SubgroupRef) -> SubgroupRef {
        let mut members: Vec<usize> = s.members.iter().map(|&x| self.conj(g, x)).collect();
        members.sort_unstable();
        SubgroupRef {
            members,
            parent: self.fingerprint,
        }
    }

    /// Character table (computed once and cached).
    pub fn character_table(&self) -> Result<Arc<CharacterTable>> {
        self.cache
            .table
            .get_or_init(|| CharacterTable::compute(self).map(Arc::new))
            .clone()
    }

    /// Invariant fingerprint used for isomorphism checks in tests.
    pub fn invariants(&self) -> Fingerprint {
        Fingerprint::of(self)
    }
}

/// Automorphism of a finite group given by its permutation of elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAutomorphism {
    images: Vec<usize>,
    order: usize,
    parent: u64,
}

impl GroupAutomorphism {
    pub fn identity(g: &FiniteGroup) -> Self {
        GroupAutomorphism {
            images: (0..g.order()).collect(),
            order: 1,
            parent: g.fingerprint(),
        }
    }

    /// Conjugation `x -> h x h^{-1}`.
    pub fn inner(g: &FiniteGroup, h: usize) -> Self {
        let images = (0..g.order()).map(|x| g.conj(h, x)).collect();
        Self::from_permutation(g, images).expect("conjugation is an automorphism")
    }

    /// Extends images of generators to an automorphism, rejecting maps that
    /// are not well defined, not multiplicative, or not bijective.
    pub fn from_images(g: &FiniteGroup, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = g.order();
        if pairs.iter().any(|&(a, b)| a >= n || b >= n) {
            return Err(Error::NotAutomorphism("element index out of range".into()));
        }
        let mut images = vec![usize::MAX; n];
        images[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &(a, b) in pairs {
                let y = g.mul(x, a);
                let img = g.mul(images[x], b);
                if images[y] == usize::MAX {
                    images[y] = img;
                    queue.push_back(y);
                } else if images[y] != img {
                    return Err(Error::NotAutomorphism(format!(
                        "images are inconsistent with the relations (element {y})"
                    )));
                }
            }
        }
        if images.iter().any(|&x| x == usize::MAX) {
            return Err(Error::NotAutomorphism(
                "the given elements do not generate the group".into(),
            ));
        }
        Self::from_permutation(g, images)
    }

    pub fn from_permutation(g: &FiniteGroup, images: Vec<usize>) -> Result<Self> {
        let n = g.order();
        if images.len() != n {
            return Err(Error::NotAutomorphism("wrong length".into()));
        }
        let mut hit = vec![false; n];
        for &y in &images {
            if y >= n || hit[y] {
                return Err(Error::NotAutomorphism("map is not bijective".into()));
            }
            hit[y] = true;
        }
        for a in 0..n {
            for b in 0..n {
                if images[g.mul(a, b)] != g.mul(images[a], images[b]) {
                    return Err(Error::NotAutomorphism(format!(
                        "not multiplicative at ({a}, {b})"
                    )));
                }
            }
        }
        let mut order = 1;
        let mut cur = images.clone();
        while cur.iter().enumerate().any(|(i, &x)| i != x) {
            cur = cur.iter().map(|&x| images[x]).collect();
            order += 1;
        }
        Ok(GroupAutomorphism {
            images,
            order,
            parent: g.fingerprint(),
        })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1
    }

    pub fn parent_fingerprint(&self) -> u64 {
        self.parent
    }

    /// `self^k`.
    pub fn power(&self, k: usize) -> Self {
        let k = k % self.order;
        let mut images: Vec<usize> = (0..self.images.len()).collect();
        for _ in 0..k {
            images = images.iter().map(|&x| self.images[x]).collect();
        }
        let order = self.order / num_integer::gcd(self.order, k);
        GroupAutomorphism {
            images,
            order,
            parent: self.parent,
        }
    }

    pub fn inverse(&self) -> Self {
        self.power(self.order - 1)
    }

    pub fn stabilizes(&self, s: &SubgroupRef) -> bool {
        s.members().iter().all(|&x| s.contains(self.images[x]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> FiniteGroup {
        let table = (0..n * n).map(|i| ((i / n + i % n) % n) as u32).collect();
        FiniteGroup::from_table(table, n, format!("C{n}"), None).unwrap()
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table(vec![0, 1, 1, 1], 2, "bad", None).is_err());
        assert!(FiniteGroup::from_table(vec![0, 1, 2], 2, "bad", None).is_err());
        // a loop of order 5 that is not associative
        let t: Vec<u32> = vec![
            0, 1, 2, 3, 4, //
            1, 0, 3, 4, 2, //
            2, 4, 0, 1, 3, //
            3, 2, 4, 0, 1, //
            4, 3, 1, 2, 0,
        ];
        assert!(matches!(
            FiniteGroup::from_table(t, 5, "loop", None),
            Err(Error::InvalidTable(_))
        ));
    }

    #[test]
    fn cyclic_structure() {
        let g = cyclic(12);
        assert_eq!(g.classes().len(), 12);
        assert_eq!(g.normal_subgroups().len(), 6);
        assert!(g.derived_subgroup().is_trivial());
        assert_eq!(g.sylow_subgroup(2).subgroup.order(), 4);
        assert!(g.sylow_subgroup(5).subgroup.is_trivial());
        assert_eq!(g.exponent(), 12);
        let q = g.quotient(&g.subgroup_generated(&[4])).unwrap();
        assert_eq!(q.group.order(), 4);
    }

    #[test]
    fn automorphism_power_map() {
        let g = cyclic(7);
        let a = GroupAutomorphism::from_images(&g, &[(1, 2)]).unwrap();
        assert_eq!(a.order(), 3);
        assert_eq!(a.power(3), GroupAutomorphism::identity(&g));
        assert_eq!(a.inverse().apply(2), 1);
        assert!(GroupAutomorphism::from_images(&g, &[(1, 0)]).is_err());
    }
}
