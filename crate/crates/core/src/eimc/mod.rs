//! EIMC verdicts for one-dimensional admissible extensions.
//!
//! Group-theoretic hypotheses are computed; arithmetic facts (abelianness of
//! fixed fields over `Q`, vanishing of `mu`) come in as assertions. Each rule
//! that fires leaves a [`TraceEntry`] holding exactly the facts it consumed, so
//! a verdict can be replayed without the group.

mod census;
mod schur;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, is_prime_power};
use crate::frobenius::frobenius_structure;
use crate::group::{build_group, FiniteGroup, GroupAutomorphism, GroupSpec, SubgroupRef};
use crate::hybrid::{is_n_hybrid, HybridCertificate};
use crate::iwasawa::{is_lambda_n_hybrid, make_lie_group, LieGroupData};
use crate::{Error, Result};

pub use census::{census, CensusFamily, CensusRow, CensusTable};
pub use schur::{rational_schur_certificate, SchurWitness};

/// Verdict lattice, totally ordered.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    #[default]
    Unknown,
    ConditionalOnMu,
    Holds,
    HoldsWithUniqueness,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Unknown => "unknown",
            Level::ConditionalOnMu => "conditional-on-mu",
            Level::Holds => "holds",
            Level::HoldsWithUniqueness => "holds-with-uniqueness",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CaseMode {
    /// `G = Gal(L/K)` for a finite extension of totally real fields.
    FiniteExtension { group: GroupSpec },
    /// `H x| Gamma` with `gamma` acting on `H` through `alpha`, given by
    /// generator images `[x, alpha(x)]`. Empty means `alpha = id`.
    LieGroup {
        h: GroupSpec,
        #[serde(default)]
        alpha: Vec<[usize; 2]>,
    },
}

/// A subgroup `S`, standing for the fixed field `L^S`.
///
/// In Lie mode subgroups live in `G_n = H x| C_{p^n}`, where `H` is
/// `0..|H|` and `gamma` is `|H|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldRef {
    Members {
        members: Vec<usize>,
    },
    Whole,
    Trivial,
    Sylow,
    Derived,
    /// The unique normal subgroup of that order.
    NormalOrder {
        order: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub field: FieldRef,
    pub abelian_over_q: Tri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EimcCase {
    #[serde(flatten)]
    pub mode: CaseMode,
    pub p: u64,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
    #[serde(default)]
    pub mu_zero_known: Tri,
    #[serde(default)]
    pub no_skewfields: Tri,
    #[serde(default)]
    pub base_field_is_q: bool,
}

impl EimcCase {
    pub fn finite(group: GroupSpec, p: u64) -> Self {
        EimcCase {
            mode: CaseMode::FiniteExtension { group },
            p,
            assertions: Vec::new(),
            mu_zero_known: Tri::Unknown,
            no_skewfields: Tri::Unknown,
            base_field_is_q: false,
        }
    }

    pub fn lie(h: GroupSpec, alpha: Vec<[usize; 2]>, p: u64) -> Self {
        EimcCase {
            mode: CaseMode::LieGroup { h, alpha },
            ..EimcCase::finite(GroupSpec::cyclic(1), p)
        }
    }

    /// Sets `K = Q`.
    pub fn over_q(mut self) -> Self {
        self.base_field_is_q = true;
        self
    }

    pub fn assert_field(mut self, field: FieldRef, abelian_over_q: Tri) -> Self {
        self.assertions.push(Assertion {
            field,
            abelian_over_q,
        });
        self
    }

    pub fn with_mu(mut self, mu: Tri) -> Self {
        self.mu_zero_known = mu;
        self
    }

    pub fn with_no_skewfields(mut self, v: Tri) -> Self {
        self.no_skewfields = v;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "R-MAX")]
    Max,
    #[serde(rename = "R-ABEL-SYLOW")]
    AbelSylow,
    #[serde(rename = "R-HYBRID-ABEL")]
    HybridAbel,
    #[serde(rename = "R-HYBRID-SYLOW")]
    HybridSylow,
    #[serde(rename = "R-BREAKDOWN")]
    Breakdown,
    #[serde(rename = "R-MU")]
    Mu,
    #[serde(rename = "R-FROB")]
    Frob,
    #[serde(rename = "R-UNIQ-UP")]
    UniqUp,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Max => "R-MAX",
            RuleId::AbelSylow => "R-ABEL-SYLOW",
            RuleId::HybridAbel => "R-HYBRID-ABEL",
            RuleId::HybridSylow => "R-HYBRID-SYLOW",
            RuleId::Breakdown => "R-BREAKDOWN",
            RuleId::Mu => "R-MU",
            RuleId::Frob => "R-FROB",
            RuleId::UniqUp => "R-UNIQ-UP",
        }
    }

    /// The implication the rule applies.
    pub fn statement(self) -> &'static str {
        match self {
            RuleId::Max => "p does not divide |H|  =>  EIMC with uniqueness",
            RuleId::AbelSylow => "L^P/Q abelian, P a Sylow p-subgroup  =>  EIMC",
            RuleId::HybridAbel => "Z_p[G] N-hybrid and L^N/Q abelian  =>  EIMC with uniqueness",
            RuleId::HybridSylow => "Z_p[G] N-hybrid and L^(NP)/Q abelian  =>  EIMC",
            RuleId::Breakdown => "Lambda(G) N-hybrid  =>  EIMC (with uniqueness) for G iff for G/N",
            RuleId::Mu => "mu = 0  =>  EIMC",
            RuleId::Frob => {
                "G = N x| V Frobenius, V abelian, L^N/Q abelian  =>  EIMC with uniqueness if p does not divide |N|, \
                 EIMC if N has prime-power order"
            }
            RuleId::UniqUp => "EIMC and no skewfields in Q(G)  =>  SK_1(Q(G)) = 0  =>  EIMC with uniqueness",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbelianSource {
    /// `K = Q`, `S` normal and the quotient abelian.
    Derived,
    /// Asserted for `L^T` with `T <= S`.
    Asserted { by_order: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SkewReason {
    /// `p` does not divide the order of the commutator subgroup.
    CommutatorCoprime {
        order: usize,
    },
    Asserted,
    /// `alpha = id` and every irreducible of `H` is rational with Schur
    /// index 1 over `Q`.
    RationalSplit {
        characters: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "fact", rename_all = "snake_case")]
pub enum Fact {
    CoprimeOrder {
        of: String,
        order: usize,
        p: u64,
    },
    AbelianOverQ {
        field: String,
        members: Vec<usize>,
        source: AbelianSource,
    },
    Hybrid {
        ring: String,
        members: Vec<usize>,
        p: u64,
    },
    SylowProduct {
        n_order: usize,
        order: usize,
    },
    Frobenius {
        kernel_order: usize,
        complement_order: usize,
        complement_abelian: bool,
        p_divides_kernel: bool,
    },
    MuZero {
        known: Tri,
    },
    NoSkewfields {
        reason: SkewReason,
    },
    PriorLevel {
        level: Level,
    },
    QuotientLevel {
        n_order: usize,
        level: Level,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub rule: RuleId,
    pub statement: String,
    pub facts: Vec<Fact>,
    pub conclusion: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<Box<EimcVerdict>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blocked {
    pub rule: RuleId,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EimcVerdict {
    pub group: String,
    pub order: usize,
    pub p: u64,
    pub mode: String,
    pub level: Level,
    pub decisive_rule: Option<RuleId>,
    pub trace: Vec<TraceEntry>,
    pub blocked: Vec<Blocked>,
}

impl EimcVerdict {
    pub fn fired(&self, rule: RuleId) -> bool {
        self.trace.iter().any(|e| e.rule == rule)
    }

    pub fn rules(&self) -> Vec<RuleId> {
        self.trace.iter().map(|e| e.rule).collect()
    }

    /// Re-derives the level from the recorded facts alone.
    pub fn replay(&self) -> Result<Level> {
        let mut level = Level::Unknown;
        for e in &self.trace {
            let c = conclude(e.rule, &e.facts)
                .ok_or_else(|| Error::Internal(format!("{} fired without its premises", e.rule)))?;
            if c != e.conclusion {
                return Err(Error::Internal(format!(
                    "{} recorded {} but its facts give {c}",
                    e.rule, e.conclusion
                )));
            }
            for f in &e.facts {
                match f {
                    Fact::PriorLevel { level: prior } if *prior > level => {
                        return Err(Error::Internal(format!(
                            "{} relies on unestablished level {prior}",
                            e.rule
                        )));
                    }
                    Fact::QuotientLevel { level: q, .. } => {
                        let sub = e
                            .quotient
                            .as_ref()
                            .ok_or_else(|| Error::Internal("missing quotient verdict".into()))?;
                        if sub.replay()? != *q {
                            return Err(Error::Internal("quotient verdict does not replay".into()));
                        }
                    }
                    _ => {}
                }
            }
            level = level.max(c);
        }
        Ok(level)
    }
}

/// What a rule concludes from the given facts, if its premises are present.
pub fn conclude(rule: RuleId, facts: &[Fact]) -> Option<Level> {
    let has = |pred: &dyn Fn(&Fact) -> bool| facts.iter().any(pred);
    let abelian = has(&|f| matches!(f, Fact::AbelianOverQ { .. }));
    let hybrid = has(&|f| matches!(f, Fact::Hybrid { .. }));
    match rule {
        RuleId::Max => {
            has(&|f| matches!(f, Fact::CoprimeOrder { .. })).then_some(Level::HoldsWithUniqueness)
        }
        RuleId::AbelSylow => abelian.then_some(Level::Holds),
        RuleId::HybridAbel => (hybrid && abelian).then_some(Level::HoldsWithUniqueness),
        RuleId::HybridSylow => {
            (hybrid && abelian && has(&|f| matches!(f, Fact::SylowProduct { .. })))
                .then_some(Level::Holds)
        }
        RuleId::Frob => {
            let frob = facts.iter().find_map(|f| match f {
                Fact::Frobenius {
                    kernel_order,
                    complement_abelian: true,
                    p_divides_kernel,
                    ..
                } => Some((*kernel_order, *p_divides_kernel)),
                _ => None,
            });
            match (frob, abelian) {
                (Some((_, false)), true) => Some(Level::HoldsWithUniqueness),
                (Some((k, true)), true) if is_prime_power(k as u64).is_some() => Some(Level::Holds),
                _ => None,
            }
        }
        RuleId::Mu => facts.iter().find_map(|f| match f {
            Fact::MuZero { known: Tri::Yes } => Some(Level::Holds),
            Fact::MuZero {
                known: Tri::Unknown,
            } => Some(Level::ConditionalOnMu),
            _ => None,
        }),
        RuleId::UniqUp => {
            let prior = facts
                .iter()
                .any(|f| matches!(f, Fact::PriorLevel { level } if *level >= Level::Holds));
            (prior && has(&|f| matches!(f, Fact::NoSkewfields { .. })))
                .then_some(Level::HoldsWithUniqueness)
        }
        RuleId::Breakdown => {
            if !hybrid {
                return None;
            }
            facts.iter().find_map(|f| match f {
                Fact::QuotientLevel { level, .. } => Some(*level),
                _ => None,
            })
        }
    }
}

/// A normal subgroup with a positive N-hybrid certificate.
#[derive(Debug, Clone, Serialize)]
pub struct HybridWitness {
    pub n: SubgroupRef,
    pub order: usize,
    pub certificate: HybridCertificate,
}

/// Every `N` with `Z_p[G]` N-hybrid, largest first. `{1}` always qualifies.
pub fn best_hybrid_witness(g: &FiniteGroup, p: u64) -> Result<Vec<HybridWitness>> {
    let mut out = Vec::new();
    for n in g.normal_subgroups() {
        let certificate = is_n_hybrid(g, n, p)?;
        if certificate.verdict {
            out.push(HybridWitness {
                n: n.clone(),
                order: n.order(),
                certificate,
            });
        }
    }
    out.sort_by(|a, b| {
        b.order
            .cmp(&a.order)
            .then_with(|| a.n.members().cmp(b.n.members()))
    });
    Ok(out)
}

/// Derives the strongest verdict the rules allow, with its trace.
pub fn evaluate(case: &EimcCase) -> Result<EimcVerdict> {
    let frame = Frame::from_case(case)?;
    frame.check_assertions()?;
    frame.run()
}

/// The group data a verdict is computed from: an ambient finite group `A`
/// (`G`, or `G_n` in Lie mode), the subgroup `H` and the image of `gamma`.
struct Frame {
    lie: bool,
    a: FiniteGroup,
    h: SubgroupRef,
    gamma: usize,
    p: u64,
    yes: Vec<SubgroupRef>,
    no: Vec<SubgroupRef>,
    base_q: bool,
    mu: Tri,
    no_skew: Tri,
}

fn resolve(a: &FiniteGroup, p: u64, field: &FieldRef) -> Result<SubgroupRef> {
    Ok(match field {
        FieldRef::Members { members } => a.subgroup_from_members(members)?,
        FieldRef::Whole => a.whole(),
        FieldRef::Trivial => a.trivial_subgroup(),
        FieldRef::Sylow => a.sylow_subgroup(p).subgroup,
        FieldRef::Derived => a.derived_subgroup(),
        FieldRef::NormalOrder { order } => {
            let hits: Vec<&SubgroupRef> = a
                .normal_subgroups()
                .iter()
                .filter(|n| n.order() == *order)
                .collect();
            match hits.as_slice() {
                [one] => (*one).clone(),
                [] => {
                    return Err(Error::Parameter(format!(
                        "no normal subgroup of order {order}"
                    )))
                }
                _ => {
                    return Err(Error::Parameter(format!(
                        "normal subgroup of order {order} is not unique"
                    )))
                }
            }
        }
    })
}

fn describe(a: &FiniteGroup, s: &SubgroupRef) -> String {
    if s.is_trivial() {
        "L".to_string()
    } else if s.order() == a.order() {
        "K".to_string()
    } else {
        format!("L^S, |S| = {}", s.order())
    }
}

impl Frame {
    fn from_case(case: &EimcCase) -> Result<Frame> {
        let p = case.p;
        if p == 2 || !is_prime(p) {
            return Err(Error::Parameter(format!("p = {p} must be an odd prime")));
        }
        let (lie, a, h, gamma) = match &case.mode {
            CaseMode::FiniteExtension { group } => {
                let g = build_group(group)?;
                let h = g.whole();
                (false, g, h, 0)
            }
            CaseMode::LieGroup { h, alpha } => {
                let hg = build_group(h)?;
                let alpha = if alpha.is_empty() {
                    GroupAutomorphism::identity(&hg)
                } else {
                    let pairs: Vec<(usize, usize)> = alpha.iter().map(|&[x, y]| (x, y)).collect();
                    GroupAutomorphism::from_images(&hg, &pairs)?
                };
                let gdata = make_lie_group(hg, alpha, p)?;
                let gamma = if gdata.n() == 0 { 0 } else { gdata.h().order() };
                (
                    true,
                    gdata.finite_quotient().clone(),
                    gdata.h_in_quotient(),
                    gamma,
                )
            }
        };
        let mut yes = Vec::new();
        let mut no = Vec::new();
        for asn in &case.assertions {
            let s = resolve(&a, p, &asn.field)?;
            match asn.abelian_over_q {
                Tri::Yes => yes.push(s),
                Tri::No => no.push(s),
                Tri::Unknown => {}
            }
        }
        Ok(Frame {
            lie,
            a,
            h,
            gamma,
            p,
            yes,
            no,
            base_q: case.base_field_is_q,
            mu: case.mu_zero_known,
            no_skew: case.no_skewfields,
        })
    }

    fn derived_abelian(&self, s: &SubgroupRef) -> bool {
        self.a.is_normal(s) && self.a.derived_subgroup().is_subset_of(s)
    }

    fn abelian(&self, s: &SubgroupRef) -> Option<AbelianSource> {
        if self.base_q && self.derived_abelian(s) {
            return Some(AbelianSource::Derived);
        }
        self.yes
            .iter()
            .filter(|t| t.is_subset_of(s))
            .map(|t| t.order())
            .max()
            .map(|by_order| AbelianSource::Asserted { by_order })
    }

    fn abelian_fact(&self, s: &SubgroupRef) -> Option<Fact> {
        self.abelian(s).map(|source| Fact::AbelianOverQ {
            field: describe(&self.a, s),
            members: s.members().to_vec(),
            source,
        })
    }

    /// `L^S/Q` abelian forces `L^S/K` abelian, so `S` must be normal with
    /// abelian quotient.
    fn check_assertions(&self) -> Result<()> {
        for s in &self.yes {
            if !self.a.is_normal(s) {
                return Err(Error::Contradiction(format!(
                    "{} is asserted abelian over Q, but S is not normal, so L^S/K is not Galois",
                    describe(&self.a, s)
                )));
            }
            if !self.derived_abelian(s) {
                return Err(Error::Contradiction(format!(
                    "{} is asserted abelian over Q, but Gal(L^S/K) = G/S is nonabelian",
                    describe(&self.a, s)
                )));
            }
        }
        if self.base_q {
            for s in &self.no {
                if self.derived_abelian(s) {
                    return Err(Error::Contradiction(format!(
                        "{} is asserted not abelian over Q, but K = Q and G/S is abelian",
                        describe(&self.a, s)
                    )));
                }
            }
        }
        if self.no_skew == Tri::No && self.commutator_order() as u64 % self.p != 0 {
            return Err(Error::Contradiction(format!(
                "skewfields asserted, but p = {} does not divide |G'| = {}",
                self.p,
                self.commutator_order()
            )));
        }
        Ok(())
    }

    fn commutator_order(&self) -> usize {
        self.a.derived_subgroup().order()
    }

    fn h_group(&self) -> Result<(FiniteGroup, Vec<usize>)> {
        self.a.subgroup_as_group(&self.h)
    }

    /// `Lambda(H x| Gamma)` rebuilt from this frame, with `alpha` the
    /// conjugation action of `gamma` on `H`.
    fn lie_data(&self) -> Result<(LieGroupData, Vec<usize>)> {
        let (hg, emb) = self.h_group()?;
        let mut back = vec![usize::MAX; self.a.order()];
        for (i, &x) in emb.iter().enumerate() {
            back[x] = i;
        }
        let images: Vec<usize> = emb
            .iter()
            .map(|&x| back[self.a.conj(self.gamma, x)])
            .collect();
        let alpha = GroupAutomorphism::from_permutation(&hg, images)?;
        Ok((make_lie_group(hg, alpha, self.p)?, back))
    }

    /// Nontrivial `N`, normal in `A` and inside `H`, for which the relevant
    /// ring is N-hybrid; largest first.
    fn hybrids(&self) -> Result<Vec<SubgroupRef>> {
        let mut cands: Vec<SubgroupRef> = self
            .a
            .normal_subgroups()
            .iter()
            .filter(|n| {
                !n.is_trivial() && n.is_subset_of(&self.h) && n.order() as u64 % self.p != 0
            })
            .cloned()
            .collect();
        cands.sort_by(|x, y| {
            y.order()
                .cmp(&x.order())
                .then_with(|| x.members().cmp(y.members()))
        });
        let mut out = Vec::new();
        if self.lie {
            let (gdata, back) = self.lie_data()?;
            for n in cands {
                let local: Vec<usize> = n.members().iter().map(|&x| back[x]).collect();
                let local = gdata.h().subgroup_from_members(&local)?;
                if is_lambda_n_hybrid(&gdata, &local)?.verdict {
                    out.push(n);
                }
            }
        } else {
            for n in cands {
                if is_n_hybrid(&self.a, &n, self.p)?.verdict {
                    out.push(n);
                }
            }
        }
        Ok(out)
    }

    fn ring_name(&self) -> &'static str {
        if self.lie {
            "Lambda(G)"
        } else {
            "Z_p[G]"
        }
    }

    fn quotient(&self, n: &SubgroupRef) -> Result<Frame> {
        let q = self.a.quotient(n)?;
        let image = |s: &SubgroupRef| -> Result<SubgroupRef> {
            let mut m: Vec<usize> = s.members().iter().map(|&x| q.projection[x]).collect();
            m.sort_unstable();
            m.dedup();
            q.group.subgroup_from_members(&m)
        };
        let carry = |list: &[SubgroupRef]| -> Result<Vec<SubgroupRef>> {
            list.iter()
                .filter(|s| n.is_subset_of(s))
                .map(image)
                .collect()
        };
        Ok(Frame {
            lie: self.lie,
            h: image(&self.h)?,
            gamma: q.projection[self.gamma],
            p: self.p,
            yes: carry(&self.yes)?,
            no: carry(&self.no)?,
            base_q: self.base_q,
            mu: self.mu,
            no_skew: self.no_skew,
            a: q.group,
        })
    }

    /// A certificate that `Q(G)` has no skewfields, if one is available.
    fn no_skewfields(&self) -> Result<Option<SkewReason>> {
        let comm = self.commutator_order();
        if comm as u64 % self.p != 0 {
            return Ok(Some(SkewReason::CommutatorCoprime { order: comm }));
        }
        if self.no_skew == Tri::Yes {
            return Ok(Some(SkewReason::Asserted));
        }
        if self.alpha_trivial() {
            let (hg, _) = self.h_group()?;
            if let Some(w) = rational_schur_certificate(&hg)? {
                return Ok(Some(SkewReason::RationalSplit {
                    characters: w.len(),
                }));
            }
        }
        Ok(None)
    }

    /// Whether `G` is `H x Gamma`. In finite mode that happens exactly when
    /// `G` has no nontrivial cyclic quotient of `p`-power order.
    fn alpha_trivial(&self) -> bool {
        if self.lie {
            self.h
                .members()
                .iter()
                .all(|&x| self.a.mul(self.gamma, x) == self.a.mul(x, self.gamma))
        } else {
            (self.a.order() / self.commutator_order()) as u64 % self.p != 0
        }
    }

    fn run(&self) -> Result<EimcVerdict> {
        let mut t = Tracer::default();
        let p = self.p;
        let h_order = self.h.order();

        if h_order as u64 % p != 0 {
            let of = if self.lie { "H" } else { "G" }.to_string();
            t.fire(
                RuleId::Max,
                vec![Fact::CoprimeOrder {
                    of,
                    order: h_order,
                    p,
                }],
                None,
                None,
            );
        }

        let sylow = self.a.sylow_subgroup(p).subgroup;
        if let Some(f) = self.abelian_fact(&sylow) {
            t.fire(RuleId::AbelSylow, vec![f], None, None);
        }

        let hybrids = if t.level < Level::HoldsWithUniqueness || !self.lie {
            self.hybrids()?
        } else {
            Vec::new()
        };
        let hybrid_fact = |n: &SubgroupRef| Fact::Hybrid {
            ring: self.ring_name().into(),
            members: n.members().to_vec(),
            p,
        };

        if !self.lie {
            if let Some((n, f)) = hybrids
                .iter()
                .find_map(|n| self.abelian_fact(n).map(|f| (n, f)))
            {
                t.fire(RuleId::HybridAbel, vec![hybrid_fact(n), f], None, None);
            }
            let sylow_gens = self.a.subgroup_generators(&sylow);
            let with_sylow = hybrids.iter().find_map(|n| {
                let mut gens = self.a.subgroup_generators(n);
                gens.extend(&sylow_gens);
                let np = self.a.subgroup_generated(&gens);
                self.abelian_fact(&np).map(|f| (n, np.order(), f))
            });
            if let Some((n, np_order, f)) = with_sylow {
                let facts = vec![
                    hybrid_fact(n),
                    Fact::SylowProduct {
                        n_order: n.order(),
                        order: np_order,
                    },
                    f,
                ];
                t.fire(RuleId::HybridSylow, facts, None, None);
            }
            self.frobenius_rule(&mut t)?;
        }

        if self.mu != Tri::No {
            t.fire(
                RuleId::Mu,
                vec![Fact::MuZero { known: self.mu }],
                None,
                None,
            );
        }

        self.uniqueness_rule(&mut t)?;

        if t.level < Level::HoldsWithUniqueness {
            let mut best: Option<(&SubgroupRef, EimcVerdict)> = None;
            for n in &hybrids {
                let sub = self.quotient(n)?.run()?;
                if best.as_ref().map_or(true, |(_, b)| sub.level > b.level) {
                    let top = sub.level == Level::HoldsWithUniqueness;
                    best = Some((n, sub));
                    if top {
                        break;
                    }
                }
            }
            if let Some((n, sub)) = best {
                if sub.level > t.level {
                    let note = (sub.level == Level::ConditionalOnMu).then(|| {
                        "conditional level carried across the equivalence for G/N".to_string()
                    });
                    let facts = vec![
                        hybrid_fact(n),
                        Fact::QuotientLevel {
                            n_order: n.order(),
                            level: sub.level,
                        },
                    ];
                    t.fire(RuleId::Breakdown, facts, note, Some(Box::new(sub)));
                }
            }
            self.uniqueness_rule(&mut t)?;
        }

        if t.level == Level::Holds && !t.fired(RuleId::UniqUp) {
            t.blocked.push(Blocked {
                rule: RuleId::UniqUp,
                reason: format!(
                    "p = {p} divides |G'| = {} and no certificate excludes skewfields",
                    self.commutator_order()
                ),
            });
        }

        let verdict = EimcVerdict {
            group: self.a.label().to_string(),
            order: self.a.order(),
            p,
            mode: if self.lie {
                "lie_group"
            } else {
                "finite_extension"
            }
            .to_string(),
            level: t.level,
            decisive_rule: t
                .entries
                .iter()
                .find(|e| e.conclusion == t.level)
                .map(|e| e.rule),
            trace: t.entries,
            blocked: t.blocked,
        };
        self.audit(&verdict)?;
        Ok(verdict)
    }

    fn frobenius_rule(&self, t: &mut Tracer) -> Result<()> {
        let Some(fs) = frobenius_structure(&self.a)? else {
            return Ok(());
        };
        let v = fs.complement.members();
        let complement_abelian = v
            .iter()
            .all(|&x| v.iter().all(|&y| self.a.mul(x, y) == self.a.mul(y, x)));
        let k = fs.kernel.order();
        let p_divides_kernel = k as u64 % self.p == 0;
        if !complement_abelian {
            t.blocked.push(Blocked {
                rule: RuleId::Frob,
                reason: format!("Frobenius complement of order {} is non-abelian", v.len()),
            });
            return Ok(());
        }
        let Some(abel) = self.abelian_fact(&fs.kernel) else {
            t.blocked.push(Blocked {
                rule: RuleId::Frob,
                reason: "L^N/Q is not known to be abelian".into(),
            });
            return Ok(());
        };
        let facts = vec![
            Fact::Frobenius {
                kernel_order: k,
                complement_order: v.len(),
                complement_abelian,
                p_divides_kernel,
            },
            abel,
        ];
        if conclude(RuleId::Frob, &facts).is_some() {
            t.fire(RuleId::Frob, facts, None, None);
        } else {
            t.blocked.push(Blocked {
                rule: RuleId::Frob,
                reason: format!("p divides |N| = {k} and N does not have prime-power order"),
            });
        }
        Ok(())
    }

    fn uniqueness_rule(&self, t: &mut Tracer) -> Result<()> {
        if t.level != Level::Holds {
            return Ok(());
        }
        if let Some(reason) = self.no_skewfields()? {
            let facts = vec![
                Fact::PriorLevel { level: t.level },
                Fact::NoSkewfields { reason },
            ];
            t.fire(RuleId::UniqUp, facts, None, None);
        }
        Ok(())
    }

    /// Re-checks every consumed fact against the group data.
    fn audit(&self, v: &EimcVerdict) -> Result<()> {
        let bad = |what: String| Err(Error::Internal(format!("audit: {what}")));
        for e in &v.trace {
            for f in &e.facts {
                match f {
                    Fact::CoprimeOrder { order, p, .. } => {
                        if *order != self.h.order() || *order as u64 % p == 0 {
                            return bad(format!("{} coprime-order fact", e.rule));
                        }
                    }
                    Fact::AbelianOverQ { members, .. } => {
                        let s = self.a.subgroup_from_members(members)?;
                        if self.abelian(&s).is_none() {
                            return bad(format!("{} abelian fact for |S| = {}", e.rule, s.order()));
                        }
                    }
                    Fact::Hybrid { members, .. } => {
                        let n = self.a.subgroup_from_members(members)?;
                        let ok = if self.lie {
                            let (gdata, back) = self.lie_data()?;
                            let local: Vec<usize> = members.iter().map(|&x| back[x]).collect();
                            is_lambda_n_hybrid(&gdata, &gdata.h().subgroup_from_members(&local)?)?
                                .verdict
                        } else {
                            is_n_hybrid(&self.a, &n, self.p)?.verdict
                        };
                        if !ok || !self.a.is_normal(&n) {
                            return bad(format!("{} hybrid fact for |N| = {}", e.rule, n.order()));
                        }
                    }
                    Fact::NoSkewfields {
                        reason: SkewReason::CommutatorCoprime { order },
                    } => {
                        if *order != self.commutator_order() || *order as u64 % self.p == 0 {
                            return bad("commutator order".into());
                        }
                    }
                    Fact::NoSkewfields {
                        reason: SkewReason::RationalSplit { .. },
                    } => {
                        if !self.alpha_trivial() {
                            return bad("alpha is not trivial".into());
                        }
                    }
                    Fact::Frobenius {
                        kernel_order,
                        complement_abelian,
                        ..
                    } => {
                        let fs = frobenius_structure(&self.a)?;
                        if fs.map(|s| s.kernel.order()) != Some(*kernel_order)
                            || !complement_abelian
                        {
                            return bad("Frobenius fact".into());
                        }
                    }
                    _ => {}
                }
            }
        }
        let replayed = v.replay()?;
        if replayed != v.level {
            return bad(format!("replay gives {replayed}, verdict says {}", v.level));
        }
        Ok(())
    }
}

#[derive(Default)]
struct Tracer {
    level: Level,
    entries: Vec<TraceEntry>,
    blocked: Vec<Blocked>,
}

impl Tracer {
    fn fire(
        &mut self,
        rule: RuleId,
        facts: Vec<Fact>,
        note: Option<String>,
        quotient: Option<Box<EimcVerdict>>,
    ) {
        let conclusion = conclude(rule, &facts).expect("rule fired with its premises");
        self.level = self.level.max(conclusion);
        self.entries.push(TraceEntry {
            rule,
            statement: rule.statement().to_string(),
            facts,
            conclusion,
            note,
            quotient,
        });
    }

    fn fired(&self, rule: RuleId) -> bool {
        self.entries.iter().any(|e| e.rule == rule)
    }
}
