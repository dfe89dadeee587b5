//! Invariant fingerprints and structural names.

use serde::{Deserialize, Serialize};

use super::FiniteGroup;
use crate::arith::{factorize, valuation};

/// Isomorphism invariants: order, element-order profile, class sizes and
/// (optionally) the character degree multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: usize,
    /// `(element order, number of elements)` pairs, increasing.
    pub order_profile: Vec<(usize, usize)>,
    pub class_sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<u64>>,
}

impl Fingerprint {
    pub fn of(g: &FiniteGroup) -> Self {
        let mut counts = std::collections::BTreeMap::new();
        for &o in g.element_orders() {
            *counts.entry(o).or_insert(0usize) += 1;
        }
        let mut class_sizes: Vec<usize> = g.classes().classes.iter().map(Vec::len).collect();
        class_sizes.sort_unstable();
        Fingerprint {
            order: g.order(),
            order_profile: counts.into_iter().collect(),
            class_sizes,
            degrees: None,
        }
    }

    /// Adds the sorted character degrees.
    pub fn with_degrees(g: &FiniteGroup) -> Self {
        let mut f = Self::of(g);
        if let Ok(t) = g.character_table() {
            let mut d = t.degrees().to_vec();
            d.sort_unstable();
            f.degrees = Some(d);
        }
        f
    }
}

/// Invariant factors `d_1 | d_2 | ...` of an abelian group (empty for the
/// trivial group).
pub fn abelian_invariants(g: &FiniteGroup) -> Vec<usize> {
    let orders = g.element_orders();
    let mut per_prime: Vec<Vec<u32>> = Vec::new();
    for (p, a) in factorize(g.order() as u64) {
        // |{x : x^{p^k} = 1}| = p^{sum_i min(k, e_i)}
        let omega = |k: u32| -> u32 {
            let n = orders
                .iter()
                .filter(|&&o| is_p_power(o as u64, p) && valuation(o as u64, p) <= k)
                .count();
            valuation(n as u64, p)
        };
        let mut exps = Vec::new();
        let mut prev = 0;
        let mut k = 1;
        let mut counts = Vec::new();
        while prev < a {
            let w = omega(k);
            counts.push(w - prev);
            prev = w;
            k += 1;
        }
        // counts[k-1] = number of cyclic factors with exponent >= k
        for (i, &c) in counts.iter().enumerate() {
            let next = counts.get(i + 1).copied().unwrap_or(0);
            for _ in 0..(c - next) {
                exps.push(i as u32 + 1);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.push(exps.iter().map(|&e| p.pow(e) as u32).collect());
    }
    let rank = per_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1usize; rank];
    for pp in &per_prime {
        for (i, &q) in pp.iter().enumerate() {
            out[rank - 1 - i] *= q as usize;
        }
    }
    out
}

fn is_p_power(n: u64, p: u64) -> bool {
    n / p.pow(valuation(n, p)) == 1
}

fn is_dihedral(g: &FiniteGroup) -> bool {
    let n = g.order();
    if n < 6 || n % 2 != 0 {
        return false;
    }
    let orders = g.element_orders();
    let Some(r) = (0..n).find(|&x| orders[x] == n / 2) else {
        return false;
    };
    let rot = g.subgroup_generated(&[r]);
    (0..n).filter(|&x| !rot.contains(x)).all(|x| orders[x] == 2)
}

fn is_dicyclic(g: &FiniteGroup) -> bool {
    let n = g.order();
    if n < 8 || n % 4 != 0 {
        return false;
    }
    let orders = g.element_orders();
    let involutions = orders.iter().filter(|&&o| o == 2).count();
    involutions == 1 && (0..n).any(|x| orders[x] == n / 2) && !g.is_abelian()
}

/// A short structural name: `1`, `C_n`, `C_a x C_b`, `S3`, `D_2n`, `Q8`,
/// `Dic_n`, `A4`, `S4`, `A5`, or `order-n group` when none applies.
pub fn structure_name(g: &FiniteGroup) -> String {
    let n = g.order();
    if n == 1 {
        return "1".into();
    }
    if g.is_abelian() {
        let inv = abelian_invariants(g);
        return inv
            .iter()
            .map(|d| format!("C{d}"))
            .collect::<Vec<_>>()
            .join(" x ");
    }
    if n == 6 {
        return "S3".into();
    }
    if is_dihedral(g) {
        return format!("D{n}");
    }
    if is_dicyclic(g) {
        return if n == 8 {
            "Q8".into()
        } else {
            format!("Dic{}", n / 4)
        };
    }
    let fp = Fingerprint::of(g);
    let classes = &fp.class_sizes;
    match (n, classes.as_slice()) {
        (12, [1, 3, 4, 4]) => "A4".into(),
        (24, [1, 3, 6, 6, 8]) => "S4".into(),
        (60, [1, 12, 12, 15, 20]) => "A5".into(),
        (120, [1, 10, 15, 20, 20, 24, 30]) => "S5".into(),
        _ => format!("order-{n} group"),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_group, GroupSpec};
    use super::*;

    fn name(spec: &str) -> String {
        structure_name(&build_group(&GroupSpec::from_shortcut(spec).unwrap()).unwrap())
    }

    #[test]
    fn names_of_small_groups() {
        assert_eq!(name("trivial"), "1");
        assert_eq!(name("C12"), "C12");
        assert_eq!(name("V4"), "C2 x C2");
        assert_eq!(name("S3"), "S3");
        assert_eq!(name("Aff3"), "S3");
        assert_eq!(name("Aff4"), "A4");
        assert_eq!(name("D8"), "D8");
        assert_eq!(name("Q8"), "Q8");
        assert_eq!(name("Dic3"), "Dic3");
        assert_eq!(name("S4"), "S4");
        assert_eq!(name("A5"), "A5");
        assert_eq!(name("Aff5"), "order-20 group");
    }

    #[test]
    fn invariants_of_products() {
        let g = build_group(&GroupSpec::direct_product(vec![
            GroupSpec::cyclic(4),
            GroupSpec::cyclic(6),
            GroupSpec::cyclic(2),
        ]))
        .unwrap();
        assert_eq!(abelian_invariants(&g), vec![2, 2, 12]);
    }
}
