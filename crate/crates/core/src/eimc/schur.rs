use std::collections::HashSet;

use num_integer::Integer;
use serde::Serialize;

use crate::group::{FiniteGroup, SubgroupRef};
use crate::Result;

/// Per-character evidence that the Schur index over `Q` is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchurWitness {
    pub character: usize,
    /// Order of a subgroup `K` with `<chi|_K, 1_K>` odd.
    pub subgroup_order: usize,
    pub multiplicity: u64,
}

/// Certifies that every irreducible character of `g` is rational-valued with
/// Schur index 1 over `Q`.
///
/// The Schur index divides `<chi, 1_K^G>` for every subgroup `K`, and is at
/// most 2 for a rational character, so one odd multiplicity suffices. Probes
/// the trivial subgroup, cyclic subgroups, then two-generated subgroups.
/// Returns `None` when some character is irrational or no probe certifies it.
pub fn rational_schur_certificate(g: &FiniteGroup) -> Result<Option<Vec<SchurWitness>>> {
    let table = g.character_table()?;
    let classes = g.classes();
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(table.len());
    for i in 0..table.len() {
        let mut row = Vec::with_capacity(classes.len());
        for v in table.row(i) {
            let Some(x) = v.to_i64() else {
                return Ok(None);
            };
            row.push(x);
        }
        rows.push(row);
    }
    let mut pending: Vec<usize> = Vec::new();
    let mut found = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let d = row[classes.class_of[0]];
        if d % 2 == 1 {
            found.push(SchurWitness {
                character: i,
                subgroup_order: 1,
                multiplicity: d as u64,
            });
        } else {
            pending.push(i);
        }
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut try_subgroup =
        |k: &SubgroupRef, pending: &mut Vec<usize>, found: &mut Vec<SchurWitness>| {
            if !seen.insert(k.members().to_vec()) {
                return;
            }
            pending.retain(|&i| {
                let sum: i64 = k
                    .members()
                    .iter()
                    .map(|&x| rows[i][classes.class_of[x]])
                    .sum();
                let m = sum / k.order() as i64;
                debug_assert_eq!(sum % k.order() as i64, 0);
                if m.is_odd() {
                    found.push(SchurWitness {
                        character: i,
                        subgroup_order: k.order(),
                        multiplicity: m as u64,
                    });
                    false
                } else {
                    true
                }
            });
        };
    for &x in &classes.representatives {
        if pending.is_empty() {
            break;
        }
        try_subgroup(&g.subgroup_generated(&[x]), &mut pending, &mut found);
    }
    'outer: for &x in &classes.representatives {
        for y in 0..g.order() {
            if pending.is_empty() {
                break 'outer;
            }
            try_subgroup(&g.subgroup_generated(&[x, y]), &mut pending, &mut found);
        }
    }
    if !pending.is_empty() {
        return Ok(None);
    }
    found.sort_by_key(|w| w.character);
    Ok(Some(found))
}

#[cfg(test)]
/// `<chi|_K, 1_K>` for an arbitrary irreducible, exact.
pub(crate) fn restricted_trivial_multiplicity(
    g: &FiniteGroup,
    chi: usize,
    k: &SubgroupRef,
) -> Result<Option<i64>> {
    use num_traits::{ToPrimitive, Zero};
    let table = g.character_table()?;
    let classes = g.classes();
    let mut acc = num_rational::BigRational::zero();
    for &x in k.members() {
        let Some(v) = table.value(chi, classes.class_of[x]).to_rational() else {
            return Ok(None);
        };
        acc += v;
    }
    let m = acc / num_bigint::BigInt::from(k.order());
    Ok(if m.is_integer() {
        m.to_integer().to_i64()
    } else {
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec};

    fn group(name: &str) -> FiniteGroup {
        build_group(&GroupSpec::from_shortcut(name).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_groups_certify() {
        for name in ["S3", "S4", "D8", "C2"] {
            let w = rational_schur_certificate(&group(name))
                .unwrap()
                .expect(name);
            assert_eq!(w.len(), group(name).character_table().unwrap().len());
        }
    }

    #[test]
    fn quaternion_is_rejected() {
        // Q8 has a rational character of degree 2 with Schur index 2.
        assert!(rational_schur_certificate(&group("Q8")).unwrap().is_none());
    }

    #[test]
    fn irrational_tables_are_rejected() {
        assert!(rational_schur_certificate(&group("C3")).unwrap().is_none());
        assert!(rational_schur_certificate(&group("A4")).unwrap().is_none());
    }

    #[test]
    fn dic3_faithful_character_has_only_even_multiplicities() {
        // The faithful degree-2 character of Dic3 is rational, but the
        // quaternion algebra it spans is ramified at 3.
        let g = group("Dic3");
        let t = g.character_table().unwrap();
        let chi = (0..t.len())
            .find(|&i| {
                t.degree(i) == 2
                    && t.row(i).iter().all(|v| v.is_rational())
                    && t.kernel_classes(i).len() == 1
            })
            .unwrap();
        for x in 0..g.order() {
            for y in 0..g.order() {
                let k = g.subgroup_generated(&[x, y]);
                let m = restricted_trivial_multiplicity(&g, chi, &k)
                    .unwrap()
                    .unwrap();
                assert_eq!(m % 2, 0, "K of order {}", k.order());
            }
        }
        assert!(rational_schur_certificate(&g).unwrap().is_none());
    }

    #[test]
    fn multiplicity_matches_frobenius_reciprocity() {
        let g = group("S4");
        let t = g.character_table().unwrap();
        let whole = g.whole();
        for i in 0..t.len() {
            let m = restricted_trivial_multiplicity(&g, i, &whole)
                .unwrap()
                .unwrap();
            let trivial = (0..t.len()).all(|j| t.value(i, j).to_i64() == Some(1));
            assert_eq!(m, i64::from(trivial));
        }
    }
}
