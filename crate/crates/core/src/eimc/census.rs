use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{best_hybrid_witness, evaluate, EimcCase, Level, RuleId};
use crate::arith::{factorize, is_prime};
use crate::group::{build_group, order_cap, GroupSpec};
use crate::{Error, Result};

/// A parametrized list of groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CensusFamily {
    /// `C_l x| C_q` for primes `q | l - 1`, `l <= max_l`.
    Metacyclic {
        max_l: u64,
    },
    Affine {
        qs: Vec<u64>,
    },
    /// Every abelian group of order `<= max_order`, by invariant factors.
    Abelian {
        max_order: u64,
    },
    Groups {
        groups: Vec<GroupSpec>,
    },
}

impl CensusFamily {
    pub fn members(&self) -> Vec<GroupSpec> {
        match self {
            CensusFamily::Metacyclic { max_l } => {
                let mut out = Vec::new();
                for l in (3..=*max_l).filter(|&l| is_prime(l)) {
                    for q in (2..l).filter(|&q| is_prime(q) && (l - 1) % q == 0) {
                        out.push(GroupSpec::metacyclic(l, q));
                    }
                }
                out
            }
            CensusFamily::Affine { qs } => qs.iter().map(|&q| GroupSpec::affine(q)).collect(),
            CensusFamily::Abelian { max_order } => (1..=*max_order)
                .flat_map(invariant_factor_lists)
                .map(abelian_spec)
                .collect(),
            CensusFamily::Groups { groups } => groups.clone(),
        }
    }
}

fn abelian_spec(factors: Vec<u64>) -> GroupSpec {
    match factors.as_slice() {
        [] => GroupSpec::cyclic(1),
        [n] => GroupSpec::cyclic(*n),
        _ => GroupSpec::direct_product(factors.into_iter().map(GroupSpec::cyclic).collect()),
    }
}

/// Invariant factor lists `d_1 | d_2 | ... | d_k` with product `n`.
fn invariant_factor_lists(n: u64) -> Vec<Vec<u64>> {
    fn partitions(k: u32, max: u32) -> Vec<Vec<u32>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in (1..=k.min(max)).rev() {
            for mut rest in partitions(k - first, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut lists: Vec<Vec<u64>> = vec![vec![]];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for list in &lists {
            for part in partitions(e, e) {
                // Largest parts go to the largest invariant factors.
                let len = list.len().max(part.len());
                let mut merged = vec![1u64; len];
                for (i, &x) in list.iter().rev().enumerate() {
                    merged[len - 1 - i] *= x;
                }
                for (i, &a) in part.iter().enumerate() {
                    merged[len - 1 - i] *= p.pow(a);
                }
                next.push(merged);
            }
        }
        lists = next;
    }
    lists.sort();
    lists
}

impl FromStr for CensusFamily {
    type Err = Error;

    /// `metacyclic:50`, `affine:3,4,5`, `abelian:30` or `groups:S4,A4`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let nums = |arg: &str| -> Result<Vec<u64>> {
            arg.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.parse()
                        .map_err(|_| Error::Parameter(format!("bad number {x:?} in family {s:?}")))
                })
                .collect()
        };
        let one = |arg: &str| -> Result<u64> {
            match nums(arg)?.as_slice() {
                [x] => Ok(*x),
                _ => Err(Error::Parameter(format!("family {s:?} takes one bound"))),
            }
        };
        Ok(match kind {
            "metacyclic" => CensusFamily::Metacyclic { max_l: one(arg)? },
            "affine" => CensusFamily::Affine { qs: nums(arg)? },
            "abelian" => CensusFamily::Abelian {
                max_order: one(arg)?,
            },
            "groups" => CensusFamily::Groups {
                groups: arg
                    .split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(GroupSpec::from_shortcut)
                    .collect::<Result<_>>()?,
            },
            _ => return Err(Error::Parameter(format!("unknown census family {kind:?}"))),
        })
    }
}

impl fmt::Display for CensusFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CensusFamily::Metacyclic { max_l } => write!(f, "metacyclic l <= {max_l}"),
            CensusFamily::Affine { qs } => write!(f, "Aff(q), q in {qs:?}"),
            CensusFamily::Abelian { max_order } => write!(f, "abelian, order <= {max_order}"),
            CensusFamily::Groups { groups } => write!(f, "{} listed groups", groups.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub group: String,
    pub spec: GroupSpec,
    pub order: Option<usize>,
    pub p: u64,
    /// Order of the largest `N` with `Z_p[G]` N-hybrid.
    pub best_n: Option<usize>,
    pub level: Option<Level>,
    pub decisive_rule: Option<RuleId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTable {
    pub family: CensusFamily,
    pub p: u64,
    pub rows: Vec<CensusRow>,
    pub counts: BTreeMap<Level, usize>,
    pub skipped: usize,
}

/// One table per prime; rows under standard assertions (`K = Q`, everything
/// else unknown). Rows over the order cap are kept and marked skipped.
pub fn census(family: &CensusFamily, primes: &[u64]) -> Result<Vec<CensusTable>> {
    for &p in primes {
        if p == 2 || !is_prime(p) {
            return Err(Error::Parameter(format!("p = {p} must be an odd prime")));
        }
    }
    let specs = family.members();
    primes
        .iter()
        .map(|&p| {
            let rows = specs
                .par_iter()
                .map(|spec| census_row(spec, p))
                .collect::<Result<Vec<_>>>()?;
            let mut counts = BTreeMap::new();
            for r in &rows {
                if let Some(l) = r.level {
                    *counts.entry(l).or_insert(0) += 1;
                }
            }
            let skipped = rows.iter().filter(|r| r.skipped.is_some()).count();
            Ok(CensusTable {
                family: family.clone(),
                p,
                rows,
                counts,
                skipped,
            })
        })
        .collect()
}

fn census_row(spec: &GroupSpec, p: u64) -> Result<CensusRow> {
    let mut row = CensusRow {
        group: spec_label(spec),
        spec: spec.clone(),
        order: spec.expected_order().map(|o| o as usize),
        p,
        best_n: None,
        level: None,
        decisive_rule: None,
        skipped: None,
    };
    if let Some(o) = row.order {
        if o > order_cap() {
            row.skipped = Some(format!("order {o} exceeds cap {}", order_cap()));
            return Ok(row);
        }
    }
    let g = match build_group(spec) {
        Ok(g) => g,
        Err(Error::OrderCap { order, cap }) => {
            row.skipped = Some(format!("order {order} exceeds cap {cap}"));
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    row.group = g.label().to_string();
    row.order = Some(g.order());
    row.best_n = best_hybrid_witness(&g, p)?.first().map(|w| w.order);
    let v = evaluate(&EimcCase::finite(spec.clone(), p).over_q())?;
    row.level = Some(v.level);
    row.decisive_rule = v.decisive_rule;
    Ok(row)
}

fn spec_label(spec: &GroupSpec) -> String {
    serde_json::to_string(spec).unwrap_or_default()
}
