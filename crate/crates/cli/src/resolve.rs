//! Turning command-line text into groups, subgroups and automorphisms.

use std::fs;
use std::path::Path;

use hybrid_core::group::{
    build_group, structure_name, FiniteGroup, GroupAutomorphism, GroupSpec, SubgroupRef,
};
use hybrid_core::Error;

use crate::CliError;

/// Reads a JSON document, reporting syntax errors with their position.
pub fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

pub fn parse_json(text: &str, origin: &str) -> Result<serde_json::Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Json {
        origin: origin.to_string(),
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })
}

/// A group argument: a shortcut (`S4`, `Aff7`, `l:q`), inline JSON, or
/// `@path` to a JSON spec file.
pub fn group_spec(arg: &str) -> Result<GroupSpec, CliError> {
    let arg = arg.trim();
    let value = if let Some(path) = arg.strip_prefix('@') {
        read_json(Path::new(path))?
    } else if arg.starts_with('{') || arg.starts_with('"') {
        parse_json(arg, "inline group spec")?
    } else {
        return Ok(GroupSpec::from_shortcut(arg)?);
    };
    GroupSpec::from_value(value).map_err(|m| CliError::Domain(Error::Parameter(m)))
}

pub fn group(arg: &str) -> Result<(GroupSpec, FiniteGroup), CliError> {
    let spec = group_spec(arg)?;
    let g = build_group(&spec)?;
    Ok((spec, g))
}

/// A subgroup argument:
/// `trivial`, `whole`, `derived`, `center`, `sylow` (needs `p`),
/// `members:0,3,5`, an order (the unique normal subgroup of that order), or
/// an isomorphism type (`V4`, `C3`, ...) naming a unique normal subgroup.
pub fn subgroup(g: &FiniteGroup, arg: &str, p: Option<u64>) -> Result<SubgroupRef, CliError> {
    let arg = arg.trim();
    let domain = |m: String| CliError::Domain(Error::Parameter(m));
    match arg {
        "trivial" | "1" => return Ok(g.trivial_subgroup()),
        "whole" | "G" | "H" => return Ok(g.whole()),
        "derived" => return Ok(g.derived_subgroup()),
        "center" => return Ok(g.center()),
        "sylow" => {
            let p = p.ok_or_else(|| domain("`sylow` needs a prime".into()))?;
            return Ok(g.sylow_subgroup(p).subgroup);
        }
        _ => {}
    }
    if let Some(list) = arg.strip_prefix("members:") {
        let members = list
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| domain(format!("bad element index {x:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(g.subgroup_from_members(&members)?);
    }
    let hits: Vec<&SubgroupRef> = if let Ok(order) = arg.parse::<usize>() {
        g.normal_subgroups()
            .iter()
            .filter(|n| n.order() == order)
            .collect()
    } else {
        let target = build_group(&GroupSpec::from_shortcut(arg)?)?;
        let want = target.invariants();
        let mut named = Vec::new();
        for n in g
            .normal_subgroups()
            .iter()
            .filter(|n| n.order() == target.order())
        {
            let (sub, _) = g.subgroup_as_group(n)?;
            if structure_name(&sub) == structure_name(&target) && sub.invariants() == want {
                named.push(n);
            }
        }
        named
    };
    match hits.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(domain(format!("no normal subgroup matches {arg:?}"))),
        many => Err(domain(format!(
            "{} normal subgroups match {arg:?}; use members:...",
            many.len()
        ))),
    }
}

/// An automorphism argument: `id`, `inner:g`, or generator images
/// `x>y,x2>y2`.
pub fn automorphism(h: &FiniteGroup, arg: Option<&str>) -> Result<GroupAutomorphism, CliError> {
    let domain = |m: String| CliError::Domain(Error::Parameter(m));
    let Some(arg) = arg.map(str::trim) else {
        return Ok(GroupAutomorphism::identity(h));
    };
    if arg == "id" {
        return Ok(GroupAutomorphism::identity(h));
    }
    let index = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| domain(format!("bad element index {x:?}")))
    };
    if let Some(g) = arg.strip_prefix("inner:") {
        let g = index(g)?;
        if g >= h.order() {
            return Err(domain(format!("element {g} out of range")));
        }
        return Ok(GroupAutomorphism::inner(h, g));
    }
    let pairs = arg
        .split(',')
        .map(|pair| {
            let (a, b) = pair
                .split_once('>')
                .ok_or_else(|| domain(format!("expected x>y, got {pair:?}")))?;
            Ok((index(a)?, index(b)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(GroupAutomorphism::from_images(h, &pairs)?)
}

/// Comma-separated primes.
pub fn primes(arg: &str) -> Result<Vec<u64>, CliError> {
    arg.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<u64>()
                .map_err(|_| CliError::Domain(Error::Parameter(format!("bad prime {x:?}"))))
        })
        .collect()
}
