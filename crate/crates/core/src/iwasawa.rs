//! One-dimensional p-adic Lie groups `H x| Gamma` and their Iwasawa
//! algebras. Everything is computed on `H` and on the finite quotient
//! `G_n = H x| C_{p^n}`, where `alpha^{p^n} = 1`.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::{is_prime, valuation};
use crate::character::{padic_orbits, restrict, OrbitScope, SubgroupView};
use crate::cyclo::field_degree_over_qp;
use crate::error::{Error, Result};
use crate::group::{
    build_group, semidirect_product, structure_name, FiniteGroup, GroupAutomorphism, GroupSpec,
    SubgroupRef,
};
use crate::hybrid::{
    character_coefficients, is_defect_zero, is_n_hybrid, kernel_contains, HybridCertificate,
    IdempotentElement,
};

/// `H`, the action `alpha` of a topological generator of `Gamma`, the odd
/// prime `p`, and the least `n` with `alpha^{p^n} = 1`.
#[derive(Debug, Clone)]
pub struct LieGroupData {
    h: FiniteGroup,
    alpha: GroupAutomorphism,
    p: u64,
    n: u32,
    finite_quotient: FiniteGroup,
}

impl Serialize for LieGroupData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            group: &'a str,
            order: usize,
            p: u64,
            n: u32,
            alpha_order: usize,
            alpha: &'a [usize],
            finite_quotient_order: usize,
        }
        View {
            group: self.h.label(),
            order: self.h.order(),
            p: self.p,
            n: self.n,
            alpha_order: self.alpha.order(),
            alpha: self.alpha.images(),
            finite_quotient_order: self.finite_quotient.order(),
        }
        .serialize(s)
    }
}

impl LieGroupData {
    pub fn h(&self) -> &FiniteGroup {
        &self.h
    }

    pub fn alpha(&self) -> &GroupAutomorphism {
        &self.alpha
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `G_n = H x| C_{p^n}`; `H` sits inside as the elements `0..|H|`.
    pub fn finite_quotient(&self) -> &FiniteGroup {
        &self.finite_quotient
    }

    /// `H` as a subgroup of `G_n`.
    pub fn h_in_quotient(&self) -> SubgroupRef {
        self.finite_quotient
            .subgroup_from_members(&(0..self.h.order()).collect::<Vec<_>>())
            .expect("H is a subgroup")
    }

    fn require_stable_normal(&self, n: &SubgroupRef) -> Result<()> {
        self.h.require_normal(n, "N")?;
        if !self.alpha.stabilizes(n) {
            return Err(Error::NotNormal("N is not stable under alpha".into()));
        }
        Ok(())
    }
}

pub fn make_lie_group(h: FiniteGroup, alpha: GroupAutomorphism, p: u64) -> Result<LieGroupData> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Parameter(format!("p = {p} must be an odd prime")));
    }
    if alpha.parent_fingerprint() != h.fingerprint() {
        return Err(Error::GroupMismatch(
            "alpha is not an automorphism of H".into(),
        ));
    }
    let ord = alpha.order() as u64;
    let n = valuation(ord, p);
    if p.pow(n) != ord {
        return Err(Error::Parameter(format!(
            "alpha has order {ord}, not a power of {p}"
        )));
    }
    let m = p.pow(n);
    let c = build_group(&GroupSpec::cyclic(m))?;
    let phi: Vec<Vec<usize>> = (0..m as usize)
        .map(|k| alpha.power(k).images().to_vec())
        .collect();
    let label = if n == 0 {
        h.label().to_string()
    } else {
        format!("{} x| C{m}", h.label())
    };
    let finite_quotient = semidirect_product(&h, &c, &phi, label, None)?;
    Ok(LieGroupData {
        h,
        alpha,
        p,
        n,
        finite_quotient,
    })
}

/// Normal subgroups of `H` stable under `alpha`: the finite normal
/// subgroups of `H x| Gamma`.
pub fn finite_normal_subgroups(gdata: &LieGroupData) -> Vec<SubgroupRef> {
    gdata
        .h
        .normal_subgroups()
        .iter()
        .filter(|s| gdata.alpha.stabilizes(s))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GammaOrbit {
    /// Indices into the character table of `H`, increasing.
    pub characters: Vec<usize>,
    /// Orbit size `w = [G : St(eta)]`.
    pub w: usize,
    /// `log_p w`.
    pub stabilizer_exponent: u32,
    pub degree: u64,
    pub defect_zero: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GammaOrbitData {
    pub p: u64,
    pub orbits: Vec<GammaOrbit>,
}

impl GammaOrbitData {
    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbits
            .iter()
            .position(|o| o.characters.contains(&i))
            .expect("orbits cover Irr(H)")
    }
}

/// Permutation of `Irr(H)` induced by `eta -> eta o alpha^{-1}`.
fn alpha_permutation(gdata: &LieGroupData) -> Result<Vec<usize>> {
    let h = &gdata.h;
    let table = h.character_table()?;
    let cls = h.classes();
    let inv = gdata.alpha.inverse();
    let cperm: Vec<usize> = cls
        .representatives
        .iter()
        .map(|&x| cls.class_of[inv.apply(x)])
        .collect();
    (0..table.len())
        .map(|i| {
            let row: Vec<_> = cperm.iter().map(|&j| table.value(i, j).clone()).collect();
            table
                .index_of(&row)
                .ok_or_else(|| Error::Internal("alpha does not permute Irr(H)".into()))
        })
        .collect()
}

pub fn gamma_orbits(gdata: &LieGroupData) -> Result<GammaOrbitData> {
    let table = gdata.h.character_table()?;
    let perm = alpha_permutation(gdata)?;
    let mut seen = vec![false; table.len()];
    let mut orbits = Vec::new();
    for i in 0..table.len() {
        if seen[i] {
            continue;
        }
        let mut chars = vec![i];
        seen[i] = true;
        let mut j = perm[i];
        while j != i {
            seen[j] = true;
            chars.push(j);
            j = perm[j];
        }
        chars.sort_unstable();
        let w = chars.len();
        let k = valuation(w as u64, gdata.p);
        if gdata.p.pow(k) != w as u64 {
            return Err(Error::Internal(format!(
                "orbit of size {w} is not a power of {}",
                gdata.p
            )));
        }
        let degree = table.degree(i);
        orbits.push(GammaOrbit {
            characters: chars,
            w,
            stabilizer_exponent: k,
            degree,
            defect_zero: is_defect_zero(gdata.h.order(), degree, gdata.p),
        });
    }
    Ok(GammaOrbitData { p: gdata.p, orbits })
}

/// One class of `~`: a union of alpha-orbits closed under the p-adic Galois
/// action on `Irr(H)`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SimClass {
    pub characters: Vec<usize>,
    pub representative: usize,
    pub w: usize,
    pub degree: u64,
    /// `[K_chi : Q_p]` with `K_chi` generated by the values of `res_H chi`.
    pub field_degree: usize,
}

impl SimClass {
    /// `chi(1) = w eta(1)`.
    pub fn size(&self) -> u64 {
        self.w as u64 * self.degree
    }
}

pub fn sim_classes(gdata: &LieGroupData) -> Result<Vec<SimClass>> {
    let table = gdata.h.character_table()?;
    let gamma = gamma_orbits(gdata)?;
    let galois = padic_orbits(&gdata.h, gdata.p, &OrbitScope::All)?;
    let r = table.len();
    let mut label: Vec<usize> = (0..r).collect();
    // both partitions are small; merge labels to a fixed point
    loop {
        let mut changed = false;
        for cells in [
            gamma
                .orbits
                .iter()
                .map(|o| o.characters.clone())
                .collect::<Vec<_>>(),
            galois.orbits.clone(),
        ] {
            for cell in cells {
                let m = cell.iter().map(|&i| label[i]).min().unwrap();
                for &i in &cell {
                    if label[i] != m {
                        label[i] = m;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = HashMap::new();
    for (i, &l) in label.iter().enumerate() {
        let s = *slot.entry(l).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[s].push(i);
    }
    let cls = table.classes();
    groups
        .into_iter()
        .map(|chars| {
            let rep = chars[0];
            let orbit = &gamma.orbits[gamma.orbit_of(rep)];
            let w = orbit.w;
            if chars.len() % w != 0 {
                return Err(Error::Internal(
                    "class is not a union of equal alpha-orbits".into(),
                ));
            }
            let field_degree = chars.len() / w;
            let res: Vec<_> = (0..cls.len())
                .map(|j| {
                    orbit.characters.iter().fold(
                        crate::cyclo::CycloNumber::zero(table.exponent()),
                        |a, &k| &a + table.value(k, j),
                    )
                })
                .collect();
            if field_degree_over_qp(&res, gdata.p) != field_degree {
                return Err(Error::Internal(format!(
                    "class of {} characters with w = {w} disagrees with [K_chi : Q_p]",
                    chars.len()
                )));
            }
            Ok(SimClass {
                representative: rep,
                w,
                degree: table.degree(rep),
                field_degree,
                characters: chars,
            })
        })
        .collect()
}

/// `epsilon_chi = sum of e(eta)` over a `~`-class, in `Q(z_e)[H]`.
pub fn epsilon_idempotent(gdata: &LieGroupData, class: &SimClass) -> Result<IdempotentElement> {
    let table = gdata.h.character_table()?;
    let mut acc = IdempotentElement::zero(table.clone());
    for &i in &class.characters {
        let e = IdempotentElement::from_class_coefficients(
            table.clone(),
            character_coefficients(&table, i),
        )?;
        acc = acc.add(&e)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct EpsilonCheck {
    pub class: SimClass,
    pub defect_zero: bool,
    pub epsilon_integral: bool,
}

/// Verdict for `Lambda(G)` computed from `Z_p[H]` and, independently, from
/// the integrality of the `epsilon_chi` with `N` outside the kernel.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LambdaHybridCertificate {
    pub p: u64,
    pub n_order: usize,
    pub verdict: bool,
    pub group_ring: HybridCertificate,
    pub classes: Vec<EpsilonCheck>,
}

#[allow(non_snake_case)]
pub fn is_lambda_N_hybrid(
    gdata: &LieGroupData,
    n: &SubgroupRef,
) -> Result<LambdaHybridCertificate> {
    is_lambda_n_hybrid(gdata, n)
}

pub fn is_lambda_n_hybrid(
    gdata: &LieGroupData,
    n: &SubgroupRef,
) -> Result<LambdaHybridCertificate> {
    gdata.require_stable_normal(n)?;
    let p = gdata.p;
    let group_ring = is_n_hybrid(&gdata.h, n, p)?;
    let table = gdata.h.character_table()?;
    let mut classes = Vec::new();
    for class in sim_classes(gdata)? {
        if kernel_contains(&gdata.h, &table, class.representative, n) {
            continue;
        }
        let epsilon_integral = epsilon_idempotent(gdata, &class)?.is_p_integral(p);
        let defect_zero = is_defect_zero(gdata.h.order(), class.degree, p);
        if epsilon_integral != defect_zero {
            return Err(Error::Internal(format!(
                "epsilon integrality {epsilon_integral} but defect zero {defect_zero} for character {}",
                class.representative
            )));
        }
        classes.push(EpsilonCheck {
            class,
            defect_zero,
            epsilon_integral,
        });
    }
    let direct = n.order() as u64 % p != 0 && classes.iter().all(|c| c.epsilon_integral);
    if direct != group_ring.verdict {
        return Err(Error::Internal(format!(
            "Z_p[H] verdict {} disagrees with the epsilon route {direct}",
            group_ring.verdict
        )));
    }
    Ok(LambdaHybridCertificate {
        p,
        n_order: n.order(),
        verdict: direct,
        group_ring,
        classes,
    })
}

/// `Lambda(G) e_N = Lambda(G/N)`, recorded by name.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Remainder {
    pub quotient: String,
    pub quotient_order: usize,
    /// Order of the automorphism induced on `H/N`.
    pub action_order: usize,
}

/// `M_size(S)` with `S` a power series ring over a local ring whose
/// fraction field has the given degree over `Q_p`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LambdaComponent {
    pub size: u64,
    pub w: usize,
    pub eta_degree: u64,
    pub field_degree: usize,
    pub representative: usize,
    pub characters: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LambdaShape {
    pub group: String,
    pub p: u64,
    pub n_order: usize,
    pub remainder: Option<Remainder>,
    pub components: Vec<LambdaComponent>,
    pub is_maximal: bool,
    pub is_matrix_over_commutative: bool,
    /// Rank over `Z_p[[Gamma_0]]` of the described algebra, `|H| p^n`.
    pub described_rank: usize,
}

impl fmt::Display for LambdaShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        let mut parts = Vec::new();
        if let Some(r) = &self.remainder {
            if r.quotient_order == 1 {
                parts.push(format!("Z{p}[[Γ]]"));
            } else {
                parts.push(format!("Z{p}[[{}⋊Γ]]", r.quotient));
            }
        }
        for c in &self.components {
            if c.field_degree == 1 {
                parts.push(format!("M{}(Z{p}[[T]])", c.size));
            } else {
                parts.push(format!("M{}(O{}[[T]])", c.size, c.field_degree));
            }
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Structure of an N-hybrid `Lambda(G)`. When `p` does not divide `|H|`
/// the whole algebra is maximal and every class contributes a component.
pub fn lambda_shape(gdata: &LieGroupData, n: &SubgroupRef) -> Result<LambdaShape> {
    let cert = is_lambda_n_hybrid(gdata, n)?;
    if !cert.verdict {
        return Err(Error::Precondition(format!(
            "Lambda(G) is not N-hybrid: {}",
            cert.group_ring.reason
        )));
    }
    let h = &gdata.h;
    let p = gdata.p;
    let pn = p.pow(gdata.n) as usize;
    let is_maximal = h.order() as u64 % p != 0;
    let table = h.character_table()?;
    let mut rank = 0;
    let remainder = if is_maximal {
        None
    } else {
        let q = h.quotient(n)?;
        let images: Vec<usize> = q
            .coset_reps
            .iter()
            .map(|&x| q.projection[gdata.alpha.apply(x)])
            .collect();
        let action = GroupAutomorphism::from_permutation(&q.group, images)?;
        rank += q.group.order() * pn;
        Some(Remainder {
            quotient: structure_name(&q.group),
            quotient_order: q.group.order(),
            action_order: action.order(),
        })
    };
    let mut components = Vec::new();
    for c in sim_classes(gdata)? {
        if !is_maximal && kernel_contains(h, &table, c.representative, n) {
            continue;
        }
        let size = c.size();
        rank += (size * size) as usize * c.field_degree * pn / c.w;
        components.push(LambdaComponent {
            size,
            w: c.w,
            eta_degree: c.degree,
            field_degree: c.field_degree,
            representative: c.representative,
            characters: c.characters,
        });
    }
    if rank != h.order() * pn {
        return Err(Error::Internal(format!(
            "shape describes rank {rank}, expected {}",
            h.order() * pn
        )));
    }
    let (_, flags) = commutator_and_commutativity(gdata)?;
    Ok(LambdaShape {
        group: h.label().to_string(),
        p,
        n_order: n.order(),
        remainder,
        components,
        is_maximal,
        is_matrix_over_commutative: flags.matrix_over_commutative,
        described_rank: rank,
    })
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct CommutativityFlags {
    /// `p` does not divide `|G'|`.
    pub matrix_over_commutative: bool,
    /// Implied by the first flag; `false` means undecided.
    pub no_skewfields: bool,
}

/// `G' = <[H, H], h^{-1} alpha(h)>`, cross-checked against the derived
/// subgroup of `G_n`.
pub fn commutator_and_commutativity(
    gdata: &LieGroupData,
) -> Result<(SubgroupRef, CommutativityFlags)> {
    let h = &gdata.h;
    let mut gens: Vec<usize> = h.derived_subgroup().members().to_vec();
    gens.extend((0..h.order()).map(|x| h.mul(h.inv(x), gdata.alpha.apply(x))));
    let mut s = h.normal_closure(&gens);
    while !gdata.alpha.stabilizes(&s) {
        let mut more = s.members().to_vec();
        more.extend(s.members().iter().map(|&x| gdata.alpha.apply(x)));
        s = h.normal_closure(&more);
    }
    let dq = gdata.finite_quotient.derived_subgroup();
    if dq.members() != s.members() {
        return Err(Error::Internal(
            "G' disagrees with the derived subgroup of G_n".into(),
        ));
    }
    let ok = s.order() as u64 % gdata.p != 0;
    Ok((
        s,
        CommutativityFlags {
            matrix_over_commutative: ok,
            no_skewfields: ok,
        },
    ))
}

/// `N <= ker chi` iff `N <= ker eta` for every `chi` in `Irr(G_n)` and every
/// constituent `eta` of its restriction to `H`.
pub fn kernel_criterion_holds(gdata: &LieGroupData, n: &SubgroupRef) -> Result<bool> {
    gdata.require_stable_normal(n)?;
    let g = &gdata.finite_quotient;
    let hq = gdata.h_in_quotient();
    let nq = g.subgroup_from_members(n.members())?;
    let view = SubgroupView::new(g, &hq)?;
    let local_n = view.localize(&nq)?;
    let table = g.character_table()?;
    for i in 0..table.len() {
        let big = kernel_contains(g, &table, i, &nq);
        let res = restrict(&table.character(i), &view)?;
        let mult = res
            .multiplicities()
            .ok_or_else(|| Error::Internal("restriction is not a character".into()))?;
        for (j, &m) in mult.iter().enumerate() {
            if m > 0 && kernel_contains(&view.group, &view.table, j, &local_n) != big {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(H, alpha)` extracted from a finite Galois group `G` with `G/H` cyclic
/// of p-power order.
#[derive(Debug, Clone, Serialize)]
pub struct CodescentData {
    pub h: SubgroupRef,
    /// Element of `G` of p-power order generating `G/H`.
    pub preimage: usize,
    pub lie: LieGroupData,
    /// Parent index of each element of `H` as a group.
    pub embedding: Vec<usize>,
}

fn cyclic_p_quotient(g: &FiniteGroup, h: &SubgroupRef, p: u64) -> Result<Option<usize>> {
    let q = g.quotient(h)?;
    let m = q.group.order() as u64;
    if p.pow(valuation(m, p)) != m {
        return Ok(None);
    }
    let gen = (0..g.order()).find(|&x| {
        let o = g.element_order(x) as u64;
        p.pow(valuation(o, p)) == o && q.group.element_order(q.projection[x]) as u64 == m
    });
    Ok(gen)
}

/// Default `H`: the least-order normal subgroup with `G/H` cyclic of
/// p-power order (first in enumeration order on ties).
pub fn codescent_from_number_field(
    g: &FiniteGroup,
    h: Option<&SubgroupRef>,
    p: u64,
) -> Result<CodescentData> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Parameter(format!("p = {p} must be an odd prime")));
    }
    let (h, preimage) = match h {
        Some(h) => {
            g.require_normal(h, "H")?;
            let x = cyclic_p_quotient(g, h, p)?.ok_or_else(|| {
                Error::Precondition(format!("G/H is not cyclic of {p}-power order"))
            })?;
            (h.clone(), x)
        }
        None => {
            let mut best: Option<(SubgroupRef, usize)> = None;
            for s in g.normal_subgroups() {
                if best.as_ref().is_some_and(|(b, _)| b.order() <= s.order()) {
                    continue;
                }
                if let Some(x) = cyclic_p_quotient(g, s, p)? {
                    best = Some((s.clone(), x));
                }
            }
            best.expect("G itself qualifies")
        }
    };
    let (hg, embedding) = g.subgroup_as_group(&h)?;
    let pos: HashMap<usize, usize> = embedding.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let images: Vec<usize> = embedding
        .iter()
        .map(|&x| pos[&g.conj(preimage, x)])
        .collect();
    let alpha = GroupAutomorphism::from_permutation(&hg, images)?;
    let lie = make_lie_group(hg, alpha, p)?;
    Ok(CodescentData {
        h,
        preimage,
        lie,
        embedding,
    })
}

/// `Z_p[G]` N-hybrid implies `N <= H` and both `Z_p[H]` and `Lambda(G)`
/// N-hybrid.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CodescentReport {
    pub group_ring: bool,
    pub n_in_h: bool,
    pub subgroup_ring: Option<bool>,
    pub lambda: Option<bool>,
    pub respected: bool,
}

pub fn check_codescent(
    g: &FiniteGroup,
    data: &CodescentData,
    n: &SubgroupRef,
) -> Result<CodescentReport> {
    let p = data.lie.p;
    let group_ring = is_n_hybrid(g, n, p)?.verdict;
    let n_in_h = n.is_subset_of(&data.h);
    let (subgroup_ring, lambda) = if n_in_h {
        let pos: HashMap<usize, usize> = data
            .embedding
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i))
            .collect();
        let local: Vec<usize> = n.members().iter().map(|x| pos[x]).collect();
        let nl = data.lie.h.subgroup_from_members(&local)?;
        (
            Some(is_n_hybrid(&data.lie.h, &nl, p)?.verdict),
            Some(is_lambda_n_hybrid(&data.lie, &nl)?.verdict),
        )
    } else {
        (None, None)
    };
    let respected = !group_ring || (n_in_h && subgroup_ring == Some(true) && lambda == Some(true));
    Ok(CodescentReport {
        group_ring,
        n_in_h,
        subgroup_ring,
        lambda,
        respected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybrid::{group_ring_shape, trace_idempotent, Component};

    fn group(name: &str) -> FiniteGroup {
        build_group(&GroupSpec::from_shortcut(name).unwrap()).unwrap()
    }

    fn c7_squaring() -> LieGroupData {
        let h = group("C7");
        let alpha = GroupAutomorphism::from_images(&h, &[(1, 2)]).unwrap();
        make_lie_group(h, alpha, 3).unwrap()
    }

    fn find_order(s: &[SubgroupRef], order: usize) -> SubgroupRef {
        s.iter().find(|x| x.order() == order).unwrap().clone()
    }

    #[test]
    fn construction() {
        let s4 = group("S4");
        let d = make_lie_group(s4.clone(), GroupAutomorphism::identity(&s4), 3).unwrap();
        assert_eq!((d.n(), d.finite_quotient().order()), (0, 24));
        let c = c7_squaring();
        assert_eq!((c.n(), c.finite_quotient().order()), (1, 21));
        assert!(matches!(
            make_lie_group(s4.clone(), GroupAutomorphism::identity(&s4), 2),
            Err(Error::Parameter(_))
        ));
        let t = (0..24).find(|&x| s4.element_order(x) == 2).unwrap();
        assert!(make_lie_group(s4.clone(), GroupAutomorphism::inner(&s4, t), 3).is_err());
        let x = (0..24).find(|&x| s4.element_order(x) == 3).unwrap();
        assert_eq!(
            make_lie_group(s4.clone(), GroupAutomorphism::inner(&s4, x), 3)
                .unwrap()
                .n(),
            1
        );
    }

    #[test]
    fn stable_normal_subgroups() {
        let s4 = group("S4");
        let d = make_lie_group(s4.clone(), GroupAutomorphism::identity(&s4), 3).unwrap();
        let orders: Vec<usize> = finite_normal_subgroups(&d)
            .iter()
            .map(SubgroupRef::order)
            .collect();
        assert_eq!(orders.len(), 4);
        for o in [1, 4, 12, 24] {
            assert!(orders.contains(&o));
        }
        let c = c7_squaring();
        assert_eq!(finite_normal_subgroups(&c).len(), 2);
        let h5 = build_group(&GroupSpec::direct_product(vec![
            GroupSpec::cyclic(5),
            GroupSpec::cyclic(5),
        ]))
        .unwrap();
        let a = 1;
        let b = (0..25)
            .find(|&y| !h5.subgroup_generated(&[a]).contains(y))
            .unwrap();
        // (a, b) -> (b, a^{-1} b^{-1}) has order 3 and fixes no line of F_5^2
        let rot = GroupAutomorphism::from_images(&h5, &[(a, b), (b, h5.mul(h5.inv(a), h5.inv(b)))])
            .unwrap();
        assert_eq!(rot.order(), 3);
        let d = make_lie_group(h5, rot, 3).unwrap();
        let orders: Vec<usize> = finite_normal_subgroups(&d)
            .iter()
            .map(SubgroupRef::order)
            .collect();
        assert_eq!(orders.len(), 2);
        assert!(orders.contains(&1) && orders.contains(&25));
    }

    #[test]
    fn orbits_under_gamma() {
        let c = c7_squaring();
        let o = gamma_orbits(&c).unwrap();
        let mut sizes: Vec<usize> = o.orbits.iter().map(|x| x.w).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 3]);
        let aff = group("Aff7");
        let x = (0..42).find(|&x| aff.element_order(x) == 3).unwrap();
        let d = make_lie_group(aff.clone(), GroupAutomorphism::inner(&aff, x), 3).unwrap();
        let o = gamma_orbits(&d).unwrap();
        let big = o.orbits.iter().find(|x| x.degree == 6).unwrap();
        assert_eq!(big.w, 1);
        let s4 = group("S4");
        let d = make_lie_group(s4.clone(), GroupAutomorphism::identity(&s4), 3).unwrap();
        assert!(gamma_orbits(&d).unwrap().orbits.iter().all(|x| x.w == 1));
    }

    #[test]
    fn hybrid_criterion() {
        let s4 = group("S4");
        let d = make_lie_group(s4.clone(), GroupAutomorphism::identity(&s4), 3).unwrap();
        let normals = finite_normal_subgroups(&d);
        let v4 = find_order(&normals, 4);
        assert!(is_lambda_n_hybrid(&d, &v4).unwrap().verdict);
        assert!(
            is_lambda_n_hybrid(&d, &s4.trivial_subgroup())
                .unwrap()
                .verdict
        );
        assert!(
            !is_lambda_n_hybrid(&d, &find_order(&normals, 12))
                .unwrap()
                .verdict
        );
        for n in &normals {
            assert!(kernel_criterion_holds(&d, n).unwrap());
        }
        let aff = group("Aff7");
        let x = (0..42).find(|&x| aff.element_order(x) == 3).unwrap();
        let d = make_lie_group(aff.clone(), GroupAutomorphism::inner(&aff, x), 3).unwrap();
        let k = crate::frobenius::frobenius_structure(&aff)
            .unwrap()
            .unwrap()
            .kernel;
        assert!(finite_normal_subgroups(&d).contains(&k));
        assert!(is_lambda_n_hybrid(&d, &k).unwrap().verdict);
        assert!(kernel_criterion_holds(&d, &k).unwrap());
        let s3 = group("S3");
        let t = (0..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let d = make_lie_group(s3.clone(), GroupAutomorphism::identity(&s3), 3).unwrap();
        assert!(matches!(
            is_lambda_n_hybrid(&d, &s3.subgroup_generated(&[t])),
            Err(Error::NotNormal(_))
        ));
    }

    #[test]
    fn shapes() {
        let s4 = group("S4");
        let d = make_lie_group(s4.clone(), GroupAutomorphism::identity(&s4), 3).unwrap();
        let v4 = find_order(&finite_normal_subgroups(&d), 4);
        let shape = lambda_shape(&d, &v4).unwrap();
        assert_eq!(shape.to_string(), "Z3[[S3⋊Γ]] ⊕ M3(Z3[[T]]) ⊕ M3(Z3[[T]])");
        assert!(!shape.is_maximal && !shape.is_matrix_over_commutative);

        let aff = group("Aff7");
        let x = (0..42).find(|&x| aff.element_order(x) == 3).unwrap();
        let d = make_lie_group(aff.clone(), GroupAutomorphism::inner(&aff, x), 3).unwrap();
        let k = crate::frobenius::frobenius_structure(&aff)
            .unwrap()
            .unwrap()
            .kernel;
        let shape = lambda_shape(&d, &k).unwrap();
        assert_eq!(shape.to_string(), "Z3[[C6⋊Γ]] ⊕ M6(Z3[[T]])");
        // inner automorphisms act trivially on the abelian quotient
        assert_eq!(shape.remainder.as_ref().unwrap().action_order, 1);

        let c = c7_squaring();
        let shape = lambda_shape(&c, &c.h().whole()).unwrap();
        assert!(shape.is_maximal && shape.remainder.is_none());
        assert_eq!(shape.to_string(), "M1(Z3[[T]]) ⊕ M3(O2[[T]])");

        assert!(matches!(
            lambda_shape(
                &make_lie_group(s4.clone(), GroupAutomorphism::identity(&s4), 3).unwrap(),
                &find_order(s4.normal_subgroups(), 12)
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn shape_matches_group_ring_for_trivial_action() {
        for (name, p) in [("S4", 3), ("A4", 3), ("Aff5", 5), ("D10", 3), ("7:3", 7)] {
            let h = group(name);
            let d = make_lie_group(h.clone(), GroupAutomorphism::identity(&h), p).unwrap();
            for n in finite_normal_subgroups(&d) {
                let Ok(gr) = group_ring_shape(&h, &n, p) else {
                    continue;
                };
                let ls = lambda_shape(&d, &n).unwrap();
                let mut a: Vec<(u64, usize)> = gr
                    .components
                    .iter()
                    .filter_map(|c| match c {
                        Component::Matrix { size, center, .. } => Some((*size, center.degree())),
                        _ => None,
                    })
                    .collect();
                let table = h.character_table().unwrap();
                let mut b: Vec<(u64, usize)> = ls
                    .components
                    .iter()
                    .filter(|c| !kernel_contains(&h, &table, c.representative, &n))
                    .map(|c| (c.size, c.field_degree))
                    .collect();
                a.sort_unstable();
                b.sort_unstable();
                assert_eq!(a, b, "{name} p={p} |N|={}", n.order());
            }
        }
    }

    #[test]
    fn epsilon_completeness() {
        let s4 = group("S4");
        let d = make_lie_group(s4.clone(), GroupAutomorphism::identity(&s4), 3).unwrap();
        let c = c7_squaring();
        for gd in [d, c] {
            let table = gd.h().character_table().unwrap();
            for n in finite_normal_subgroups(&gd) {
                let mut acc = trace_idempotent(gd.h(), &n, gd.p()).unwrap().element;
                for class in sim_classes(&gd).unwrap() {
                    if !kernel_contains(gd.h(), &table, class.representative, &n) {
                        acc = acc.add(&epsilon_idempotent(&gd, &class).unwrap()).unwrap();
                    }
                }
                assert!(acc.is_one());
            }
        }
    }

    #[test]
    fn commutators() {
        let c6 = group("C6");
        let (s, f) = commutator_and_commutativity(
            &make_lie_group(c6.clone(), GroupAutomorphism::identity(&c6), 3).unwrap(),
        )
        .unwrap();
        assert!(s.is_trivial() && f.matrix_over_commutative);
        let s4 = group("S4");
        let (s, f) = commutator_and_commutativity(
            &make_lie_group(s4.clone(), GroupAutomorphism::identity(&s4), 3).unwrap(),
        )
        .unwrap();
        assert_eq!(s.order(), 12);
        assert!(!f.matrix_over_commutative);
        let (s, f) = commutator_and_commutativity(&c7_squaring()).unwrap();
        assert_eq!(s.order(), 7);
        assert!(f.matrix_over_commutative && f.no_skewfields);
    }

    #[test]
    fn codescent() {
        let s4 = group("S4");
        let c = codescent_from_number_field(&s4, None, 3).unwrap();
        assert_eq!(c.h.order(), 24);
        assert!(c.lie.alpha().is_identity());
        let c9 = group("C9");
        let c3 = c9.subgroup_generated(&[3]);
        let c = codescent_from_number_field(&c9, Some(&c3), 3).unwrap();
        assert!(c.lie.alpha().is_identity());
        let m = group("7:3");
        let c7 = m.sylow_subgroup(7).subgroup;
        let c = codescent_from_number_field(&m, Some(&c7), 3).unwrap();
        assert_eq!(c.lie.alpha().order(), 3);
        assert!(
            codescent_from_number_field(&s4, Some(&find_order(s4.normal_subgroups(), 4)), 3)
                .is_err()
        );
        let r = check_codescent(&m, &c, &c7).unwrap();
        assert!(r.group_ring && r.respected && r.lambda == Some(true));
        let v4 = find_order(s4.normal_subgroups(), 4);
        let c = codescent_from_number_field(&s4, None, 3).unwrap();
        assert!(check_codescent(&s4, &c, &v4).unwrap().respected);
    }
}
