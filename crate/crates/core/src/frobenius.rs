//! Frobenius groups: detection, kernel and complement, and the standard
//! structural checks on the kernel.

use serde::Serialize;

use crate::arith::gcd;
use crate::character::{induce, restrict, SubgroupView};
use crate::error::{Error, Result};
use crate::group::{build_group, FiniteGroup, GroupSpec, SubgroupRef};
use crate::hybrid::kernel_contains;

/// `H ∩ gHg^{-1} = {1}` for every `g` outside `H`.
pub fn is_frobenius_with_complement(g: &FiniteGroup, h: &SubgroupRef) -> Result<bool> {
    g.check_owned(h)?;
    if h.is_trivial() || h.order() == g.order() {
        return Err(Error::Precondition(
            "a Frobenius complement must be proper and nontrivial".into(),
        ));
    }
    Ok(is_malnormal(g, h))
}

fn is_malnormal(g: &FiniteGroup, h: &SubgroupRef) -> bool {
    // gHg^{-1} only depends on the coset gH
    let mut seen = vec![false; g.order()];
    for x in 0..g.order() {
        if seen[x] {
            continue;
        }
        for &y in h.members() {
            seen[g.mul(x, y)] = true;
        }
        if h.contains(x) {
            continue;
        }
        let hit = h
            .members()
            .iter()
            .skip(1)
            .any(|&y| h.contains(g.conj(x, y)));
        if hit {
            return false;
        }
    }
    true
}

/// Results of the four structural checks.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FrobeniusChecks {
    /// `gcd(|N|, [G:N]) = 1`.
    pub coprime: bool,
    pub kernel_nilpotency_class: Option<usize>,
    /// Every normal subgroup contains or is contained in `N`.
    pub normal_comparability: bool,
    /// Every irreducible character with `N` outside its kernel is induced
    /// from a nontrivial irreducible character of `N`.
    pub induced_characters: bool,
}

impl FrobeniusChecks {
    pub fn all_pass(&self) -> bool {
        self.coprime
            && self.kernel_nilpotency_class.is_some()
            && self.normal_comparability
            && self.induced_characters
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrobeniusStructure {
    pub group: String,
    pub order: usize,
    pub kernel: SubgroupRef,
    pub complement: SubgroupRef,
    pub checks: FrobeniusChecks,
}

impl FrobeniusStructure {
    pub fn kernel_order(&self) -> usize {
        self.kernel.order()
    }

    pub fn complement_order(&self) -> usize {
        self.complement.order()
    }
}

/// `(G - U_g (gHg^{-1} - 1)) ∪ {1}`.
pub fn kernel_from_complement(g: &FiniteGroup, h: &SubgroupRef) -> Result<SubgroupRef> {
    let mut covered = vec![false; g.order()];
    for x in 0..g.order() {
        for &y in &h.members()[1..] {
            covered[g.conj(x, y)] = true;
        }
    }
    let members: Vec<usize> = (0..g.order()).filter(|&x| !covered[x]).collect();
    g.subgroup_from_members(&members)
}

fn centralizer_in(g: &FiniteGroup, x: usize) -> impl Iterator<Item = usize> + '_ {
    (0..g.order()).filter(move |&y| g.mul(x, y) == g.mul(y, x))
}

/// `C_G(k) <= K` for every `1 != k` in `K`; for a proper nontrivial normal
/// `K` this characterizes the Frobenius kernel.
fn centralizers_inside(g: &FiniteGroup, k: &SubgroupRef) -> bool {
    let cls = g.classes();
    cls.representatives[1..]
        .iter()
        .filter(|&&z| k.contains(z))
        .all(|&z| centralizer_in(g, z).all(|y| k.contains(y)))
}

/// Grows a subgroup from `C_G(x)` by adjoining centralizers of its
/// nonidentity elements. Inside a Frobenius group this stays within the
/// complement containing `x`.
fn grow_complement(g: &FiniteGroup, x: usize, target: usize) -> Option<SubgroupRef> {
    let mut s = g.subgroup_generated(&centralizer_in(g, x).collect::<Vec<_>>());
    loop {
        if s.order() > target {
            return None;
        }
        let mut gens: Vec<usize> = s.members().to_vec();
        for &y in &s.members()[1..] {
            gens.extend(centralizer_in(g, y).filter(|z| !s.contains(*z)));
        }
        gens.sort_unstable();
        gens.dedup();
        let next = g.subgroup_generated(&gens);
        if next.order() == s.order() {
            return (s.order() == target).then_some(s);
        }
        s = next;
    }
}

/// Kernel and complement of a Frobenius group, with the structural checks,
/// or `None` when the group is not Frobenius.
pub fn frobenius_structure(g: &FiniteGroup) -> Result<Option<FrobeniusStructure>> {
    let n = g.order();
    let candidates: Vec<SubgroupRef> = g
        .normal_subgroups()
        .iter()
        .filter(|k| {
            !k.is_trivial() && k.order() < n && gcd(k.order() as u64, (n / k.order()) as u64) == 1
        })
        .cloned()
        .collect();
    let Some(kernel) = candidates.into_iter().find(|k| centralizers_inside(g, k)) else {
        return Ok(None);
    };
    let m = n / kernel.order();
    let complement = (0..n)
        .filter(|&x| !kernel.contains(x))
        .find_map(|x| grow_complement(g, x, m))
        .filter(|h| h.intersection(&kernel).is_trivial() && is_malnormal(g, h))
        .ok_or_else(|| Error::Internal("kernel found but no malnormal complement".into()))?;
    if kernel_from_complement(g, &complement)? != kernel {
        return Err(Error::Internal(
            "complement does not reproduce the kernel".into(),
        ));
    }
    let checks = run_checks(g, &kernel)?;
    Ok(Some(FrobeniusStructure {
        group: g.label().to_string(),
        order: n,
        kernel,
        complement,
        checks,
    }))
}

fn run_checks(g: &FiniteGroup, kernel: &SubgroupRef) -> Result<FrobeniusChecks> {
    let n = g.order();
    let coprime = gcd(kernel.order() as u64, (n / kernel.order()) as u64) == 1;
    let view = SubgroupView::new(g, kernel)?;
    let kernel_nilpotency_class = view.group.nilpotency_class();
    let normal_comparability = g
        .normal_subgroups()
        .iter()
        .all(|l| l.is_subset_of(kernel) || kernel.is_subset_of(l));
    let table = g.character_table()?;
    let induced: Vec<_> = (1..view.table.len())
        .map(|j| induce(&view.table.character(j), &view))
        .collect::<Result<_>>()?;
    let mut induced_characters = true;
    for i in 0..table.len() {
        if kernel_contains(g, &table, i, kernel) {
            continue;
        }
        let chi = table.character(i);
        let res = restrict(&chi, &view)?;
        let constituents = res.multiplicities().unwrap_or_default();
        let ok = (1..view.table.len())
            .any(|j| constituents.get(j).is_some_and(|&m| m > 0) && induced[j - 1] == chi);
        induced_characters &= ok;
    }
    Ok(FrobeniusChecks {
        coprime,
        kernel_nilpotency_class,
        normal_comparability,
        induced_characters,
    })
}

/// `F_l^2 x| Dic_p`, returned with its verified Frobenius structure.
pub fn build_dicyclic_frobenius(
    p: u64,
    l: Option<u64>,
) -> Result<(FiniteGroup, FrobeniusStructure)> {
    let g = build_group(&GroupSpec::dicyclic_frobenius(p, l))?;
    let s = frobenius_structure(&g)?
        .ok_or_else(|| Error::Internal("dicyclic construction is not a Frobenius group".into()))?;
    if s.complement_order() as u64 != 4 * p || !s.checks.all_pass() {
        return Err(Error::Internal(
            "dicyclic construction has an unexpected structure".into(),
        ));
    }
    Ok((g, s))
}

/// `UT_n(F_{p^f}) x| <h>` with `h` diagonal of order `q`; the kernel
/// class is checked to be `n - 1`.
pub fn build_unitriangular_frobenius(
    p: u64,
    f: u64,
    n: u64,
    q: u64,
) -> Result<(FiniteGroup, FrobeniusStructure)> {
    let g = build_group(&GroupSpec::unitriangular(p, f, n, q))?;
    let s = frobenius_structure(&g)?.ok_or_else(|| {
        Error::Internal("unitriangular construction is not a Frobenius group".into())
    })?;
    if s.checks.kernel_nilpotency_class != Some(n as usize - 1) || !s.checks.all_pass() {
        return Err(Error::Internal(format!(
            "kernel class {:?}, expected {}",
            s.checks.kernel_nilpotency_class,
            n - 1
        )));
    }
    Ok((g, s))
}
