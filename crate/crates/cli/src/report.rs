//! Report envelope and markdown rendering.

use std::fmt::Write as _;

use hybrid_core::character::TableExport;
use hybrid_core::eimc::{CensusTable, EimcCase, EimcVerdict, Fact};
use hybrid_core::frobenius::FrobeniusStructure;
use hybrid_core::hybrid::{HybridCertificate, WedderburnShape};
use hybrid_core::iwasawa::{LambdaHybridCertificate, LambdaShape, LieGroupData};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "hybrid-report/1";

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub request: Value,
    pub payload: Payload,
}

impl Report {
    pub fn new(request: Value, payload: Payload) -> Self {
        Report {
            schema: SCHEMA,
            tool: "hybrid",
            version: env!("CARGO_PKG_VERSION"),
            request,
            payload,
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Chartable {
        structure: String,
        table: TableExport,
    },
    Hybrid {
        certificate: HybridCertificate,
        shape: Option<WedderburnShape>,
        shape_text: Option<String>,
    },
    Frobenius {
        group: String,
        order: usize,
        structure: Option<FrobeniusStructure>,
    },
    IwasawaShape {
        lie_group: LieGroupData,
        certificate: LambdaHybridCertificate,
        shape: Option<LambdaShape>,
        shape_text: Option<String>,
    },
    Eimc {
        case: EimcCase,
        verdict: EimcVerdict,
    },
    Census {
        tables: Vec<CensusTable>,
        files: Vec<String>,
    },
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub error: ErrorBody,
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl ErrorReport {
    pub fn new(error: ErrorBody) -> Self {
        ErrorReport {
            schema: SCHEMA,
            tool: "hybrid",
            version: env!("CARGO_PKG_VERSION"),
            error,
        }
    }
}

pub fn markdown(report: &Report) -> String {
    let mut out = String::new();
    match &report.payload {
        Payload::Chartable { structure, table } => chartable_md(&mut out, structure, table),
        Payload::Hybrid {
            certificate,
            shape_text,
            ..
        } => {
            let c = certificate;
            let _ = writeln!(
                out,
                "# Z_{}[{}] and N of order {}\n",
                c.p, c.group, c.n_order
            );
            let _ = writeln!(out, "- N-hybrid: **{}**", c.verdict);
            let _ = writeln!(out, "- {}", c.reason);
            if let Some(s) = shape_text {
                let _ = writeln!(out, "- decomposition: `{s}`");
            }
        }
        Payload::Frobenius {
            group,
            order,
            structure,
        } => {
            let _ = writeln!(out, "# Frobenius structure of {group} (order {order})\n");
            match structure {
                None => out.push_str("Not a Frobenius group.\n"),
                Some(s) => {
                    let _ = writeln!(out, "- kernel order: {}", s.kernel.order());
                    let _ = writeln!(out, "- complement order: {}", s.complement.order());
                    let _ = writeln!(
                        out,
                        "- checks: {}",
                        serde_json::to_string(&s.checks).unwrap_or_default()
                    );
                }
            }
        }
        Payload::IwasawaShape {
            lie_group,
            certificate,
            shape_text,
            ..
        } => {
            let _ = writeln!(
                out,
                "# Lambda({} x| Gamma), p = {}, alpha of order {}\n",
                lie_group.h().label(),
                lie_group.p(),
                lie_group.alpha().order()
            );
            let _ = writeln!(
                out,
                "- N of order {}: hybrid **{}**",
                certificate.n_order, certificate.verdict
            );
            if let Some(s) = shape_text {
                let _ = writeln!(out, "- decomposition: `{s}`");
            }
        }
        Payload::Eimc { verdict, .. } => {
            let _ = writeln!(
                out,
                "# EIMC for {} (order {}), p = {}\n",
                verdict.group, verdict.order, verdict.p
            );
            verdict_md(&mut out, verdict, 0);
        }
        Payload::Census { tables, files } => {
            for t in tables {
                census_md(&mut out, t);
            }
            if !files.is_empty() {
                let _ = writeln!(out, "Written: {}", files.join(", "));
            }
        }
    }
    out
}

fn chartable_md(out: &mut String, structure: &str, t: &TableExport) {
    let _ = writeln!(
        out,
        "# Character table of {} ({structure}, order {})\n",
        t.group, t.order
    );
    let _ = writeln!(out, "Values in Q(z_{}).\n", t.exponent);
    out.push_str("| | ");
    for (j, r) in t.class_representatives.iter().enumerate() {
        let _ = write!(
            out,
            "{r} (ord {}, size {}) | ",
            t.class_orders[j], t.class_sizes[j]
        );
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(t.class_representatives.len()));
    out.push('\n');
    for (i, row) in t.values.iter().enumerate() {
        let _ = write!(out, "| chi_{i} | ");
        for v in row {
            let _ = write!(out, "{v} | ");
        }
        out.push('\n');
    }
}

fn fact_md(f: &Fact) -> String {
    match f {
        Fact::AbelianOverQ { field, source, .. } => {
            format!(
                "{field} abelian over Q ({})",
                serde_json::to_string(source).unwrap_or_default()
            )
        }
        Fact::Hybrid { ring, members, p } => {
            format!("{ring} N-hybrid at p = {p}, |N| = {}", members.len())
        }
        other => serde_json::to_string(other).unwrap_or_default(),
    }
}

fn verdict_md(out: &mut String, v: &EimcVerdict, depth: usize) {
    let pad = "  ".repeat(depth);
    let _ = writeln!(out, "{pad}- level: **{}**", v.level);
    if let Some(r) = v.decisive_rule {
        let _ = writeln!(out, "{pad}- decisive rule: {r}");
    }
    for e in &v.trace {
        let _ = writeln!(out, "{pad}- {} ({}): {}", e.rule, e.conclusion, e.statement);
        for f in &e.facts {
            let _ = writeln!(out, "{pad}  - {}", fact_md(f));
        }
        if let Some(n) = &e.note {
            let _ = writeln!(out, "{pad}  - note: {n}");
        }
        if let Some(q) = &e.quotient {
            let _ = writeln!(out, "{pad}  - quotient {} (order {}):", q.group, q.order);
            verdict_md(out, q, depth + 2);
        }
    }
    for b in &v.blocked {
        let _ = writeln!(out, "{pad}- blocked {}: {}", b.rule, b.reason);
    }
}

pub fn census_md(out: &mut String, t: &CensusTable) {
    let _ = writeln!(out, "# Census: {}, p = {}\n", t.family, t.p);
    out.push_str("| group | order | best N | level | decisive rule |\n|---|---|---|---|---|\n");
    for r in &t.rows {
        let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        let level = match (&r.skipped, r.level) {
            (Some(s), _) => format!("skipped ({s})"),
            (None, l) => opt(l.map(|l| l.to_string())),
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            r.group,
            opt(r.order.map(|o| o.to_string())),
            opt(r.best_n.map(|o| o.to_string())),
            level,
            opt(r.decisive_rule.map(|d| d.to_string()))
        );
    }
    out.push('\n');
    for (level, count) in &t.counts {
        let _ = writeln!(out, "- {level}: {count}");
    }
    let _ = writeln!(out, "- skipped: {}\n", t.skipped);
}
