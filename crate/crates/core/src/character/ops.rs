//! Restriction, induction, inflation, p-adic Galois orbits and the Clifford
//! check.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::{row_key, CharacterTable, ClassFunction};
use crate::cyclo::{field_degree_over_qp, padic_galois_group, CycloAccumulator, CycloNumber};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Quotient, SubgroupRef};

/// A subgroup `H <= G` relabelled as a group, with its character table and
/// the map from `H`-classes to `G`-classes.
#[derive(Debug, Clone)]
pub struct SubgroupView {
    pub subgroup: SubgroupRef,
    pub group: FiniteGroup,
    /// New index -> element of `G`.
    pub embedding: Vec<usize>,
    /// `H`-class -> `G`-class.
    pub class_map: Vec<usize>,
    pub table: Arc<CharacterTable>,
    parent_table: Arc<CharacterTable>,
}

impl SubgroupView {
    pub fn new(g: &FiniteGroup, h: &SubgroupRef) -> Result<Self> {
        let (group, embedding) = g.subgroup_as_group(h)?;
        let gcls = g.classes();
        let class_map = group
            .classes()
            .representatives
            .iter()
            .map(|&r| gcls.class_of[embedding[r]])
            .collect();
        let table = group.character_table()?;
        Ok(SubgroupView {
            subgroup: h.clone(),
            group,
            embedding,
            class_map,
            table,
            parent_table: g.character_table()?,
        })
    }

    pub fn parent_table(&self) -> &Arc<CharacterTable> {
        &self.parent_table
    }

    /// Index in the relabelled group of an element of `G` lying in `H`.
    pub fn local_index(&self, x: usize) -> Option<usize> {
        self.embedding.binary_search(&x).ok()
    }

    /// A subgroup of `G` contained in `H`, as a subgroup of the relabelled
    /// group.
    pub fn localize(&self, s: &SubgroupRef) -> Result<SubgroupRef> {
        let members: Option<Vec<usize>> =
            s.members().iter().map(|&x| self.local_index(x)).collect();
        let members = members
            .ok_or_else(|| Error::NotSubgroup("subgroup is not contained in the view".into()))?;
        self.group.subgroup_from_members(&members)
    }

    /// `[G : H]`.
    pub fn index(&self) -> usize {
        self.parent_table.group_order() / self.group.order()
    }
}

/// `res^G_H chi`.
pub fn restrict(chi: &ClassFunction, view: &SubgroupView) -> Result<ClassFunction> {
    if chi.table().group_fingerprint() != view.parent_table.group_fingerprint() {
        return Err(Error::GroupMismatch(
            "restriction from a different group".into(),
        ));
    }
    let values = view
        .class_map
        .iter()
        .map(|&j| chi.value(j).clone())
        .collect();
    ClassFunction::new(view.table.clone(), values)
}

/// `ind_H^G psi(z_j) = |G| / (|H| h_j) * sum_{c in C_j cap H} |c| psi(c)`.
pub fn induce(psi: &ClassFunction, view: &SubgroupView) -> Result<ClassFunction> {
    if psi.table().group_fingerprint() != view.table.group_fingerprint() {
        return Err(Error::GroupMismatch(
            "induced function does not live on the subgroup".into(),
        ));
    }
    let gt = &view.parent_table;
    let hcls = view.group.classes();
    let e = gt.exponent();
    let r = gt.classes().len();
    let mut accs: Vec<CycloAccumulator> = (0..r).map(|_| CycloAccumulator::new(e)).collect();
    for (c, &j) in view.class_map.iter().enumerate() {
        accs[j].add_scaled(&psi.value(c).lift(e), hcls.size(c) as i64);
    }
    let values = accs
        .into_iter()
        .enumerate()
        .map(|(j, acc)| {
            let f = BigRational::new(
                BigInt::from(gt.group_order()),
                BigInt::from(view.group.order() * gt.classes().size(j)),
            );
            acc.finish().scale(&f)
        })
        .collect();
    ClassFunction::new(gt.clone(), values)
}

/// `infl^G_{G/N} chi_bar = chi_bar o projection`.
pub fn inflate(
    chi_bar: &ClassFunction,
    g: &FiniteGroup,
    quotient: &Quotient,
) -> Result<ClassFunction> {
    if chi_bar.table().group_fingerprint() != quotient.group.fingerprint() {
        return Err(Error::GroupMismatch(
            "class function is not on this quotient".into(),
        ));
    }
    if quotient.projection.len() != g.order() {
        return Err(Error::GroupMismatch(
            "projection does not start at this group".into(),
        ));
    }
    let table = g.character_table()?;
    let qcls = quotient.group.classes();
    let e = table.exponent();
    let values = g
        .classes()
        .representatives
        .iter()
        .map(|&z| chi_bar.value(qcls.class_of[quotient.projection[z]]).lift(e))
        .collect();
    ClassFunction::new(table, values)
}

/// Which values define the Galois orbit of a character.
#[derive(Debug, Clone)]
pub enum OrbitScope {
    All,
    /// Values on the subgroup only.
    Restricted(SubgroupRef),
}

/// Partition of `Irr(G)` into orbits of `Gal(Q_p(z_e)/Q_p)`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GaloisOrbitPartition {
    pub p: u64,
    /// Orbits as increasing index lists, ordered by least member.
    pub orbits: Vec<Vec<usize>>,
    /// `[Q_p(values) : Q_p]` per orbit, with values taken in the scope.
    pub field_degrees: Vec<usize>,
}

impl GaloisOrbitPartition {
    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbits
            .iter()
            .position(|o| o.contains(&i))
            .expect("partition covers all characters")
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Orbits of `chi -> chi^{sigma_k}` for `k` in the decomposition group at
/// `p`. With a restricted scope two characters are equivalent when some
/// `sigma_k` carries one restriction to the other.
pub fn padic_orbits(g: &FiniteGroup, p: u64, scope: &OrbitScope) -> Result<GaloisOrbitPartition> {
    if !crate::arith::is_prime(p) {
        return Err(Error::Parameter(format!("{p} is not prime")));
    }
    let table = g.character_table()?;
    let n = table.len();
    let cols: Vec<usize> = match scope {
        OrbitScope::All => (0..table.classes().len()).collect(),
        OrbitScope::Restricted(h) => {
            g.check_owned(h)?;
            let mut c: Vec<usize> = h
                .members()
                .iter()
                .map(|&x| table.classes().class_of[x])
                .collect();
            c.sort_unstable();
            c.dedup();
            c
        }
    };
    let restricted = |i: usize| -> Vec<CycloNumber> {
        cols.iter().map(|&j| table.value(i, j).clone()).collect()
    };
    let mut parent: Vec<usize> = (0..n).collect();
    let mut by_key: HashMap<_, usize> = HashMap::new();
    for i in 0..n {
        let key = row_key(&restricted(i));
        match by_key.get(&key) {
            Some(&j) => union(&mut parent, i, j),
            None => {
                by_key.insert(key, i);
            }
        }
    }
    let dec = padic_galois_group(table.exponent(), p);
    for &k in &dec.generators {
        for (i, j) in table.galois_permutation(k).into_iter().enumerate() {
            union(&mut parent, i, j);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        let s = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[s].push(i);
    }
    let field_degrees = groups
        .iter()
        .map(|o| field_degree_over_qp(&restricted(o[0]), p))
        .collect();
    Ok(GaloisOrbitPartition {
        p,
        orbits: groups,
        field_degrees,
    })
}

/// One row of the Clifford check for `N` normal in `G`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CliffordRow {
    pub character: usize,
    /// Least constituent of the restriction (index in `Irr(N)`).
    pub constituent: usize,
    pub multiplicity: u64,
    /// `[G : G_eta]`.
    pub orbit_size: usize,
    pub constituent_degree: u64,
    /// Constituents form one `G`-orbit with constant multiplicity and
    /// `chi(1) = e [G:G_eta] eta(1)`.
    pub holds: bool,
}

/// Action of `G` on `Irr(N)`: `eta^g(n) = eta(g n g^{-1})`, as a permutation
/// of `Irr(N)` for each generator of `G`.
pub fn conjugation_action(g: &FiniteGroup, view: &SubgroupView) -> Vec<Vec<usize>> {
    let ncls = view.group.classes();
    let nt = &view.table;
    let index: HashMap<_, usize> = nt
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| (row_key(r), i))
        .collect();
    g.generators()
        .iter()
        .map(|&s| {
            let cmap: Vec<usize> = ncls
                .representatives
                .iter()
                .map(|&r| {
                    let y = g.conj(s, view.embedding[r]);
                    ncls.class_of[view.local_index(y).expect("normal subgroup")]
                })
                .collect();
            nt.rows()
                .iter()
                .map(|row| {
                    let image: Vec<CycloNumber> = cmap.iter().map(|&c| row[c].clone()).collect();
                    index[&row_key(&image)]
                })
                .collect()
        })
        .collect()
}

/// Orbit of `start` under the permutations.
pub fn orbit(perms: &[Vec<usize>], start: usize) -> Vec<usize> {
    let mut seen = vec![start];
    let mut i = 0;
    while i < seen.len() {
        let x = seen[i];
        for p in perms {
            if !seen.contains(&p[x]) {
                seen.push(p[x]);
            }
        }
        i += 1;
    }
    seen.sort_unstable();
    seen
}

/// Clifford data for every irreducible character of `G` over `N`.
pub fn clifford_report(g: &FiniteGroup, n: &SubgroupRef) -> Result<Vec<CliffordRow>> {
    g.require_normal(n, "Clifford subgroup")?;
    let view = SubgroupView::new(g, n)?;
    let table = g.character_table()?;
    let perms = conjugation_action(g, &view);
    let mut rows = Vec::with_capacity(table.len());
    for i in 0..table.len() {
        let res = restrict(&table.character(i), &view)?;
        let mult = res.multiplicities().ok_or_else(|| {
            Error::Internal("restriction of a character is not a character".into())
        })?;
        let support: Vec<usize> = (0..mult.len()).filter(|&k| mult[k] > 0).collect();
        let eta = support[0];
        let orb = orbit(&perms, eta);
        let e = mult[eta];
        let eta_deg = view.table.degree(eta);
        let holds = orb == support
            && support.iter().all(|&k| mult[k] == e)
            && table.degree(i) == e * orb.len() as u64 * eta_deg;
        rows.push(CliffordRow {
            character: i,
            constituent: eta,
            multiplicity: e,
            orbit_size: orb.len(),
            constituent_degree: eta_deg,
            holds,
        });
    }
    Ok(rows)
}
