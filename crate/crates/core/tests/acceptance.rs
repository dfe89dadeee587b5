//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary
//! (`harness = false`) and exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hybrid_core::character::{clifford_report, padic_orbits, OrbitScope};
use hybrid_core::eimc::{evaluate, EimcCase, Level, RuleId};
use hybrid_core::frobenius::{
    build_dicyclic_frobenius, build_unitriangular_frobenius, frobenius_structure,
    FrobeniusStructure,
};
use hybrid_core::group::{
    build_group, structure_name, FiniteGroup, GroupAutomorphism, GroupSpec, SubgroupRef, CAP_ENV,
};
use hybrid_core::hybrid::{
    check_basechange_down, check_basechange_up, group_ring_shape, is_defect_zero, is_n_hybrid,
    kernel_contains, rational_idempotent, trace_idempotent, EquivalenceReport,
};
use hybrid_core::iwasawa::{
    epsilon_idempotent, finite_normal_subgroups, is_lambda_n_hybrid, lambda_shape, make_lie_group,
    sim_classes, LieGroupData,
};

use common::{affine_qs, census_names, family_groups, group, lie_alphas, metacyclic_pairs, PRIMES};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || {
        format!("{what} took {t:.1?}, limit {limit:?}")
    })
}

fn unique_normal(g: &FiniteGroup, order: usize) -> SubgroupRef {
    let hits: Vec<_> = g
        .normal_subgroups()
        .iter()
        .filter(|n| n.order() == order)
        .cloned()
        .collect();
    assert_eq!(
        hits.len(),
        1,
        "{}: {} normal subgroups of order {order}",
        g.label(),
        hits.len()
    );
    hits.into_iter().next().unwrap()
}

fn c1_group_ring_goldens() -> Outcome {
    let start = Instant::now();
    let mut cases = vec![(
        "S3".to_string(),
        2u64,
        3usize,
        "Z2[C2] ⊕ M2(Z2)".to_string(),
    )];
    cases.push(("A4".into(), 3, 4, "Z3[C3] ⊕ M3(Z3)".into()));
    for q in affine_qs().into_iter().filter(|q| *q <= 9) {
        for p in PRIMES.into_iter().filter(|p| q % p != 0) {
            cases.push((
                format!("Aff{q}"),
                p,
                q as usize,
                format!("Z{p}[C{}] ⊕ M{}(Z{p})", q - 1, q - 1),
            ));
        }
    }
    for (name, p, n_order, want) in &cases {
        let g = group(name);
        let n = unique_normal(&g, *n_order);
        let shape = group_ring_shape(&g, &n, *p).map_err(|e| format!("{name} p={p}: {e}"))?;
        ensure(shape.to_string() == *want, || {
            format!("{name} p={p}: got {shape}, want {want}")
        })?;
    }
    within(start, Duration::from_secs(10), "golden decompositions")?;
    Ok(format!("{} decompositions", cases.len()))
}

fn lie(h: FiniteGroup, alpha_by: Option<usize>, p: u64) -> LieGroupData {
    let alpha = match alpha_by {
        None => GroupAutomorphism::identity(&h),
        Some(x) => GroupAutomorphism::inner(&h, x),
    };
    make_lie_group(h, alpha, p).unwrap()
}

fn c2_iwasawa_shapes() -> Outcome {
    let s4 = group("S4");
    let v4 = unique_normal(&s4, 4);
    let shape = lambda_shape(&lie(s4, None, 3), &v4).map_err(|e| e.to_string())?;
    let want = "Z3[[S3⋊Γ]] ⊕ M3(Z3[[T]]) ⊕ M3(Z3[[T]])";
    ensure(shape.to_string() == want, || format!("S4: got {shape}"))?;
    let mut sizes: Vec<(u64, usize, usize)> = shape
        .components
        .iter()
        .map(|c| (c.size, c.w, c.field_degree))
        .collect();
    sizes.sort();
    ensure(sizes == [(3, 1, 1), (3, 1, 1)], || {
        format!("S4 components {sizes:?}")
    })?;
    let mut count = 1;
    for q in affine_qs() {
        // p | q - 1, so that p divides |H| and the remainder is nonzero.
        for p in PRIMES.into_iter().filter(|p| (q - 1) % p == 0) {
            let h = group(&format!("Aff{q}"));
            let n = unique_normal(&h, q as usize);
            // Nontrivial alpha: conjugation by an element of order p, if any.
            let of_order_p = (0..h.order()).find(|&x| h.element_order(x) as u64 == p);
            ensure(of_order_p.is_some(), || {
                format!("Aff{q} has no element of order {p}")
            })?;
            for by in [None, of_order_p] {
                let gd = lie(h.clone(), by, p);
                let shape = lambda_shape(&gd, &n).map_err(|e| format!("Aff{q} p={p}: {e}"))?;
                let r = shape
                    .remainder
                    .as_ref()
                    .ok_or_else(|| format!("Aff{q}: no remainder"))?;
                let parts: Vec<(u64, usize)> = shape
                    .components
                    .iter()
                    .map(|c| (c.size, c.field_degree))
                    .collect();
                ensure(
                    r.quotient_order as u64 == q - 1 && parts == [(q - 1, 1)],
                    || format!("Aff{q} p={p} alpha {by:?}: {shape}"),
                )?;
                let want = format!("Z{p}[[{}⋊Γ]] ⊕ M{}(Z{p}[[T]])", r.quotient, q - 1);
                ensure(
                    shape.to_string() == want && r.quotient == format!("C{}", q - 1),
                    || format!("Aff{q} p={p}: got {shape}"),
                )?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} shapes"))
}

fn c3_two_paths() -> Outcome {
    let start = Instant::now();
    let names = [
        "C3", "C5", "C7", "C9", "C13", "C15", "C21", "C25", "C27", "V4", "S3", "D8", "D10", "D14",
        "Q8", "A4", "S4", "Dic3", "Aff4", "Aff5", "Aff7", "Aff8", "7:3", "13:3", "11:5", "A5",
    ];
    let (mut total, mut hybrid, mut nontrivial_alpha) = (0usize, 0usize, 0usize);
    for name in names {
        let h = group(name);
        let cyclic = name.starts_with('C');
        for p in PRIMES {
            for alpha in lie_alphas(&h, p, cyclic) {
                let trivial = alpha.is_identity();
                let gd = make_lie_group(h.clone(), alpha, p).map_err(|e| format!("{name}: {e}"))?;
                let table = h.character_table().map_err(|e| e.to_string())?;
                let classes = sim_classes(&gd).map_err(|e| e.to_string())?;
                for n in finite_normal_subgroups(&gd) {
                    let cert =
                        is_lambda_n_hybrid(&gd, &n).map_err(|e| format!("{name} p={p}: {e}"))?;
                    let path_a = cert.group_ring.verdict;
                    let mut path_b = n.order() as u64 % p != 0;
                    for c in &classes {
                        if path_b && !kernel_contains(&h, &table, c.representative, &n) {
                            path_b &= epsilon_idempotent(&gd, c)
                                .map_err(|e| e.to_string())?
                                .is_p_integral(p);
                        }
                    }
                    ensure(path_a == path_b && cert.verdict == path_a, || {
                        format!(
                            "{name} p={p} |N|={}: reduction {path_a}, epsilon route {path_b}",
                            n.order()
                        )
                    })?;
                    total += 1;
                    hybrid += path_a as usize;
                    nontrivial_alpha += !trivial as usize;
                }
            }
        }
    }
    ensure(total >= 200, || format!("only {total} instances"))?;
    within(start, Duration::from_secs(300), "two-path census")?;
    Ok(format!(
        "{total} instances agree ({hybrid} hybrid, {nontrivial_alpha} with nontrivial alpha)"
    ))
}

fn c4_character_tables() -> Outcome {
    let (mut groups, mut pairs) = (0, 0);
    for g in family_groups() {
        let t = g
            .character_table()
            .map_err(|e| format!("{}: {e}", g.label()))?;
        t.verify_orthogonality()
            .map_err(|e| format!("{}: {e}", g.label()))?;
        let squares: u64 = (0..t.len()).map(|i| t.degree(i) * t.degree(i)).sum();
        ensure(squares == g.order() as u64, || {
            format!("{}: sum of squares {squares}", g.label())
        })?;
        for n in g.normal_subgroups() {
            let rows = clifford_report(&g, n).map_err(|e| format!("{}: {e}", g.label()))?;
            ensure(
                rows.len() == t.len() && rows.iter().all(|r| r.holds),
                || format!("{}: Clifford fails for |N| = {}", g.label(), n.order()),
            )?;
            pairs += 1;
        }
        groups += 1;
    }
    Ok(format!("{groups} groups, {pairs} normal subgroups"))
}

fn frobenius_kernel(
    g: &FiniteGroup,
    kernel_order: usize,
    abelian_kernel: bool,
) -> Result<FrobeniusStructure, String> {
    let s = frobenius_structure(g)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| format!("{}: none found", g.label()))?;
    ensure(
        s.kernel_order() == kernel_order && s.checks.all_pass(),
        || {
            format!(
                "{}: kernel {} checks {:?}",
                g.label(),
                s.kernel_order(),
                s.checks
            )
        },
    )?;
    let (k, _) = g.subgroup_as_group(&s.kernel).map_err(|e| e.to_string())?;
    ensure(k.is_abelian() == abelian_kernel, || {
        format!("{}: kernel abelian = {}", g.label(), k.is_abelian())
    })?;
    Ok(s)
}

fn c5_frobenius() -> Outcome {
    frobenius_kernel(&group("A4"), 4, true)?;
    frobenius_kernel(&group("S3"), 3, true)?;
    for q in affine_qs() {
        let g = group(&format!("Aff{q}"));
        let s = frobenius_kernel(&g, q as usize, true)?;
        let (k, _) = g.subgroup_as_group(&s.kernel).unwrap();
        let exponent_prime = (2..=q).find(|d| q % d == 0).unwrap() as usize;
        ensure(
            (0..k.order()).all(|x| x == 0 || k.element_order(x) == exponent_prime),
            || format!("Aff{q}: kernel is not the translations"),
        )?;
    }
    let metacyclic = metacyclic_pairs(200);
    for &(l, q) in &metacyclic {
        let g = build_group(&GroupSpec::metacyclic(l, q)).map_err(|e| e.to_string())?;
        let s = frobenius_kernel(&g, l as usize, true)?;
        let kernel = structure_name(&g.subgroup_as_group(&s.kernel).unwrap().0);
        ensure(kernel == format!("C{l}"), || {
            format!("{}: kernel {kernel}", g.label())
        })?;
    }
    let (dic, s) = build_dicyclic_frobenius(3, None).map_err(|e| e.to_string())?;
    frobenius_kernel(&dic, s.kernel_order(), true)?;
    let comp = dic.subgroup_as_group(&s.complement).unwrap().0;
    ensure(!comp.is_abelian() && s.complement_order() == 12, || {
        "dicyclic complement".into()
    })?;

    // The smallest unitriangular instance with a non-abelian kernel has order 3584.
    let old = std::env::var(CAP_ENV).ok();
    std::env::set_var(CAP_ENV, "4000");
    let ut = build_unitriangular_frobenius(2, 3, 3, 7);
    match old {
        Some(v) => std::env::set_var(CAP_ENV, v),
        None => std::env::remove_var(CAP_ENV),
    }
    let (ut, s) = ut.map_err(|e| format!("unitriangular: {e}"))?;
    ensure(
        s.kernel_order() == 512
            && s.checks.kernel_nilpotency_class == Some(2)
            && s.checks.all_pass(),
        || format!("unitriangular: {:?}", s.checks),
    )?;
    ensure(ut.order() == 3584, || "unitriangular order".into())?;

    ensure(
        frobenius_structure(&group("S4"))
            .map_err(|e| e.to_string())?
            .is_none(),
        || "S4 reported Frobenius".into(),
    )?;

    // Z_p[G] is N-hybrid exactly when p does not divide |N|, N the kernel.
    let mut frob_groups: Vec<FiniteGroup> = family_groups();
    frob_groups.push(dic);
    let mut rows = 0;
    for g in &frob_groups {
        let Some(s) = frobenius_structure(g).map_err(|e| e.to_string())? else {
            continue;
        };
        for p in PRIMES {
            let hybrid = is_n_hybrid(g, &s.kernel, p)
                .map_err(|e| e.to_string())?
                .verdict;
            let coprime = s.kernel_order() as u64 % p != 0;
            ensure(hybrid == coprime, || {
                format!(
                    "{} p={p}: hybrid {hybrid}, |N| = {}",
                    g.label(),
                    s.kernel_order()
                )
            })?;
            rows += 1;
        }
    }
    Ok(format!(
        "{} metacyclic, 2 non-abelian-kernel instances, {rows} kernel-hybrid rows",
        metacyclic.len()
    ))
}

/// Normal subgroups of `h` (a normal subgroup of `g`), as subgroups of `g`.
fn normal_in(g: &FiniteGroup, h: &SubgroupRef) -> Vec<SubgroupRef> {
    let (hg, emb) = g.subgroup_as_group(h).unwrap();
    hg.normal_subgroups()
        .iter()
        .map(|k| {
            g.subgroup_from_members(&k.members().iter().map(|&x| emb[x]).collect::<Vec<_>>())
                .unwrap()
        })
        .collect()
}

fn c6_basechange() -> Outcome {
    let (mut down, mut up, mut violations) = (0, 0, Vec::new());
    for name in census_names() {
        let g = group(name);
        let normals = g.normal_subgroups().to_vec();
        for p in PRIMES {
            for h in &normals {
                let ks = normal_in(&g, h);
                for n in &normals {
                    for k in ks.iter().filter(|k| k.is_subset_of(n)) {
                        let r = check_basechange_down(&g, h, n, k, p)
                            .map_err(|e| format!("{name}: {e}"))?;
                        down += 1;
                        if !r.respected {
                            violations.push(format!(
                                "down {name} p={p} |H|={} |N|={} |K|={}",
                                h.order(),
                                n.order(),
                                k.order()
                            ));
                        }
                    }
                    if n.is_subset_of(h) {
                        if let EquivalenceReport::Checked { agree, .. } =
                            check_basechange_up(&g, h, n, p).map_err(|e| format!("{name}: {e}"))?
                        {
                            up += 1;
                            if !agree {
                                violations.push(format!(
                                    "up {name} p={p} |H|={} |N|={}",
                                    h.order(),
                                    n.order()
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    ensure(violations.is_empty(), || {
        format!(
            "{} violations: {:?}",
            violations.len(),
            &violations[..violations.len().min(5)]
        )
    })?;
    Ok(format!(
        "{down} downward and {up} upward configurations, 0 violations"
    ))
}

fn c7_eimc_goldens() -> Outcome {
    let s4 = evaluate(&EimcCase::finite(GroupSpec::symmetric(4), 3).over_q())
        .map_err(|e| e.to_string())?;
    ensure(
        s4.level == Level::HoldsWithUniqueness
            && s4.rules() == [RuleId::HybridSylow, RuleId::Mu, RuleId::UniqUp]
            && s4.decisive_rule == Some(RuleId::UniqUp),
        || format!("S4 p=3: {} via {:?}", s4.level, s4.rules()),
    )?;
    for p in [5, 7, 11, 13] {
        let v = evaluate(&EimcCase::finite(GroupSpec::symmetric(4), p).over_q())
            .map_err(|e| e.to_string())?;
        ensure(
            v.level == Level::HoldsWithUniqueness && v.decisive_rule == Some(RuleId::Max),
            || format!("S4 p={p}: {} via {:?}", v.level, v.decisive_rule),
        )?;
    }
    let dic = evaluate(&EimcCase::finite(GroupSpec::dicyclic_frobenius(3, None), 3).over_q())
        .map_err(|e| e.to_string())?;
    let frob_blocked = dic
        .blocked
        .iter()
        .find(|b| b.rule == RuleId::Frob)
        .map(|b| b.reason.clone())
        .unwrap_or_default();
    ensure(
        dic.level == Level::Holds
            && dic.decisive_rule == Some(RuleId::HybridSylow)
            && !dic.fired(RuleId::Frob)
            && frob_blocked.contains("non-abelian"),
        || {
            format!(
                "dicyclic: {} via {:?}, R-FROB blocked: {frob_blocked:?}",
                dic.level, dic.decisive_rule
            )
        },
    )?;
    let aff = evaluate(&EimcCase::finite(GroupSpec::affine_frobenius(16, Some(5)), 5).over_q())
        .map_err(|e| e.to_string())?;
    ensure(
        aff.level == Level::Holds && aff.decisive_rule == Some(RuleId::HybridSylow),
        || format!("modified affine: {} via {:?}", aff.level, aff.decisive_rule),
    )?;
    for v in [&s4, &dic, &aff] {
        ensure(v.replay().ok() == Some(v.level), || {
            format!("{}: replay differs", v.group)
        })?;
    }
    Ok("S4 (p = 3, 5, 7, 11, 13), dicyclic, modified affine".into())
}

fn c8_integrality() -> Outcome {
    let mut checked = 0;
    for g in family_groups() {
        let t = g.character_table().map_err(|e| e.to_string())?;
        for p in PRIMES {
            for i in 0..t.len() {
                let r = rational_idempotent(&g, i, p).map_err(|e| e.to_string())?;
                let dz = is_defect_zero(g.order(), t.degree(i), p);
                ensure(r.p_integral == dz, || {
                    format!(
                        "{} p={p} chi_{i}: integral {}, defect zero {dz}",
                        g.label(),
                        r.p_integral
                    )
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} characters"))
}

fn c9_completeness() -> Outcome {
    let (mut finite, mut lambda) = (0, 0);
    for name in census_names() {
        let g = group(name);
        let t = g.character_table().map_err(|e| e.to_string())?;
        for p in PRIMES {
            let orbits = padic_orbits(&g, p, &OrbitScope::All).map_err(|e| e.to_string())?;
            for n in g.normal_subgroups() {
                if !is_n_hybrid(&g, n, p).map_err(|e| e.to_string())?.verdict {
                    continue;
                }
                let mut acc = trace_idempotent(&g, n, p)
                    .map_err(|e| e.to_string())?
                    .element;
                for orbit in &orbits.orbits {
                    if !kernel_contains(&g, &t, orbit[0], n) {
                        let eps = rational_idempotent(&g, orbit[0], p)
                            .map_err(|e| e.to_string())?
                            .element;
                        acc = acc.add(&eps).map_err(|e| e.to_string())?;
                    }
                }
                ensure(acc.is_one(), || format!("{name} p={p} |N|={}", n.order()))?;
                finite += 1;
            }
            let cyclic = name.starts_with('C');
            for alpha in lie_alphas(&g, p, cyclic) {
                let gd = make_lie_group(g.clone(), alpha, p).map_err(|e| e.to_string())?;
                let classes = sim_classes(&gd).map_err(|e| e.to_string())?;
                for n in finite_normal_subgroups(&gd) {
                    if !is_lambda_n_hybrid(&gd, &n)
                        .map_err(|e| e.to_string())?
                        .verdict
                    {
                        continue;
                    }
                    let mut acc = trace_idempotent(&g, &n, p)
                        .map_err(|e| e.to_string())?
                        .element;
                    for c in &classes {
                        if !kernel_contains(&g, &t, c.representative, &n) {
                            acc = acc
                                .add(&epsilon_idempotent(&gd, c).map_err(|e| e.to_string())?)
                                .map_err(|e| e.to_string())?;
                        }
                    }
                    ensure(acc.is_one(), || {
                        format!("{name} p={p} |N|={} (Iwasawa)", n.order())
                    })?;
                    lambda += 1;
                }
            }
        }
    }
    Ok(format!(
        "{finite} finite and {lambda} Iwasawa hybrid instances"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden group ring decompositions", c1_group_ring_goldens),
        ("Iwasawa algebra shapes", c2_iwasawa_shapes),
        ("two hybridness paths agree", c3_two_paths),
        (
            "character table soundness and Clifford",
            c4_character_tables,
        ),
        ("Frobenius kernels and kernel hybridness", c5_frobenius),
        ("base change implications", c6_basechange),
        ("EIMC golden verdicts", c7_eimc_goldens),
        ("idempotent integrality iff defect zero", c8_integrality),
        ("completeness of idempotents", c9_completeness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{t:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{t:.2?}]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
