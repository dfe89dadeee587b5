//! Groups shared by the integration tests.
#![allow(dead_code)]

use hybrid_core::group::{build_group, FiniteGroup, GroupAutomorphism, GroupSpec};

pub const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

pub fn spec(name: &str) -> GroupSpec {
    GroupSpec::from_shortcut(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn group(name: &str) -> FiniteGroup {
    build_group(&spec(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn product(names: &[&str]) -> GroupSpec {
    GroupSpec::direct_product(names.iter().map(|n| spec(n)).collect())
}

/// `(l, q)` for the metacyclic `C_l x| C_q` of order at most `max`.
pub fn metacyclic_pairs(max: u64) -> Vec<(u64, u64)> {
    let prime = |n: u64| n > 1 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
    let mut out = Vec::new();
    for l in (3..=max).filter(|&l| prime(l)) {
        for q in (2..l).filter(|&q| prime(q) && (l - 1) % q == 0 && l * q <= max) {
            out.push((l, q));
        }
    }
    out
}

pub fn affine_qs() -> Vec<u64> {
    vec![3, 4, 5, 7, 8, 9, 11, 13]
}

/// Constructor-family groups of order at most 200.
pub fn family() -> Vec<GroupSpec> {
    let mut out: Vec<GroupSpec> = (1..=24).map(GroupSpec::cyclic).collect();
    for n in [3u64, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20] {
        out.push(spec(&format!("D{}", 2 * n)));
    }
    for name in ["S3", "S4", "S5", "A4", "A5", "Q8", "V4"] {
        out.push(spec(name));
    }
    for n in 2..=12 {
        out.push(spec(&format!("Dic{n}")));
    }
    out.extend(affine_qs().into_iter().map(GroupSpec::affine));
    out.extend(
        metacyclic_pairs(200)
            .into_iter()
            .map(|(l, q)| GroupSpec::metacyclic(l, q)),
    );
    for f in [
        &["C2", "C2", "C2"][..],
        &["C3", "C3"],
        &["C2", "C6"],
        &["C2", "S3"],
        &["C3", "S3"],
        &["S3", "S3"],
        &["C2", "A4"],
        &["C3", "A4"],
        &["C2", "S4"],
        &["C3", "Q8"],
        &["C2", "D8"],
        &["C5", "A4"],
        &["7:3", "C3"],
    ] {
        out.push(product(f));
    }
    out
}

pub fn family_groups() -> Vec<FiniteGroup> {
    family()
        .iter()
        .map(|s| build_group(s).unwrap_or_else(|e| panic!("{s:?}: {e}")))
        .collect()
}

/// A smaller list for the per-(G, N, p) sweeps.
pub fn census_names() -> Vec<&'static str> {
    vec![
        "C6", "C12", "C15", "V4", "S3", "D8", "D10", "D12", "D14", "D18", "Q8", "A4", "S4", "Dic3",
        "Dic5", "Aff4", "Aff5", "Aff7", "Aff8", "Aff9", "7:3", "13:3", "11:5", "19:3", "31:5",
        "A5",
    ]
}

/// Automorphisms of `h` of `p`-power order: the identity, inner
/// automorphisms by elements of `p`-power order, and power maps when `h`
/// is cyclic of order `n` with element `k` the `k`-th power of element 1.
pub fn lie_alphas(h: &FiniteGroup, p: u64, cyclic: bool) -> Vec<GroupAutomorphism> {
    let is_p_power = |mut m: usize| {
        while m % p as usize == 0 {
            m /= p as usize;
        }
        m == 1
    };
    let mut out = vec![GroupAutomorphism::identity(h)];
    let classes = h.classes();
    for &x in &classes.representatives {
        let a = GroupAutomorphism::inner(h, x);
        if a.order() > 1
            && is_p_power(h.element_order(x))
            && !out.iter().any(|b| b.images() == a.images())
        {
            out.push(a);
        }
    }
    if cyclic {
        let n = h.order();
        for a in 2..n {
            if num_integer::gcd(a, n) != 1 {
                continue;
            }
            let Ok(alpha) = GroupAutomorphism::from_images(h, &[(1, h.pow(1, a))]) else {
                continue;
            };
            if alpha.order() > 1
                && is_p_power(alpha.order())
                && !out.iter().any(|b| b.images() == alpha.images())
            {
                out.push(alpha);
            }
        }
    }
    out
}
