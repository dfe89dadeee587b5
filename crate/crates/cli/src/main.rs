//! `hybrid`: character tables, hybridness certificates, Iwasawa algebra
//! shapes and EIMC verdicts from the command line.
//!
//! Exit codes: 0 success, 2 bad input (invalid group, contradictory case,
//! malformed JSON), 1 internal error.

mod report;
mod resolve;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hybrid_core::eimc::{census, evaluate, CensusFamily, EimcCase};
use hybrid_core::frobenius::frobenius_structure;
use hybrid_core::group::{structure_name, CAP_ENV};
use hybrid_core::hybrid::{group_ring_shape, is_n_hybrid};
use hybrid_core::iwasawa::{is_lambda_n_hybrid, lambda_shape, make_lie_group};
use serde_json::json;

use report::{ErrorBody, ErrorReport, Payload, Report};

#[derive(Debug, Parser)]
#[command(
    name = "hybrid",
    version,
    about = "Hybrid p-adic group rings, Iwasawa algebras and EIMC verdicts"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    /// Largest group order to build (overrides the environment).
    #[arg(long, global = true)]
    cap: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact character table.
    Chartable {
        /// Shortcut (S4, Aff7, 7:3, ...), inline JSON, or @file.json.
        #[arg(long, short)]
        group: String,
    },
    /// N-hybrid test for Z_p[G] and, when it holds, the decomposition.
    Hybrid {
        #[arg(long, short)]
        group: String,
        /// Normal subgroup: order, type (V4), members:..., derived, center.
        #[arg(long = "N", short = 'N')]
        n: String,
        #[arg(short)]
        p: u64,
    },
    /// Frobenius kernel and complement, if any.
    Frobenius {
        #[arg(long, short)]
        group: String,
    },
    /// Lambda(H x| Gamma) hybrid test and decomposition.
    IwasawaShape {
        /// The finite group H.
        #[arg(long)]
        h: String,
        /// Action of gamma: id, inner:g, or images x>y,...
        #[arg(long)]
        alpha: Option<String>,
        /// Normal subgroup of H stable under alpha.
        #[arg(long = "N", short = 'N')]
        n: String,
        #[arg(short)]
        p: u64,
    },
    /// EIMC verdict for a case file, or for a group over Q with defaults.
    Eimc {
        /// JSON case file.
        #[arg(long, conflicts_with_all = ["group", "p"])]
        case: Option<PathBuf>,
        #[arg(long, short, requires = "p")]
        group: Option<String>,
        #[arg(short)]
        p: Option<u64>,
        /// Take K = Q (only with --group).
        #[arg(long)]
        over_q: bool,
    },
    /// Verdicts for a family of groups at several primes.
    Census {
        /// metacyclic:50, affine:3,4,5, abelian:30 or groups:S4,A4.
        #[arg(long)]
        family: String,
        /// Comma-separated odd primes.
        #[arg(long)]
        primes: String,
        /// Also write one JSON and one markdown table per prime here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Domain(hybrid_core::Error),
    Json {
        origin: String,
        message: String,
        line: usize,
        column: usize,
    },
    Io(String),
}

impl From<hybrid_core::Error> for CliError {
    fn from(e: hybrid_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(e) if e.is_internal() => 1,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }

    fn body(&self) -> ErrorBody {
        let exit_code = self.exit_code();
        match self {
            CliError::Domain(e) => ErrorBody {
                kind: e.kind().into(),
                message: e.to_string(),
                exit_code,
                line: None,
                column: None,
            },
            CliError::Json {
                origin,
                message,
                line,
                column,
            } => ErrorBody {
                kind: "malformed_json".into(),
                message: format!("{origin}: {message}"),
                exit_code,
                line: Some(*line),
                column: Some(*column),
            },
            CliError::Io(m) => ErrorBody {
                kind: "io".into(),
                message: m.clone(),
                exit_code,
                line: None,
                column: None,
            },
        }
    }
}

fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Chartable { group } => {
            let (spec, g) = resolve::group(group)?;
            let table = g.character_table()?;
            Ok(Report::new(
                json!({"subcommand": "chartable", "group": spec}),
                Payload::Chartable {
                    structure: structure_name(&g),
                    table: table.export(),
                },
            ))
        }
        Command::Hybrid { group, n, p } => {
            let (spec, g) = resolve::group(group)?;
            let sub = resolve::subgroup(&g, n, Some(*p))?;
            let certificate = is_n_hybrid(&g, &sub, *p)?;
            let shape = if certificate.verdict {
                Some(group_ring_shape(&g, &sub, *p)?)
            } else {
                None
            };
            let shape_text = shape.as_ref().map(|s| s.to_string());
            Ok(Report::new(
                json!({"subcommand": "hybrid", "group": spec, "N": n, "n_members": sub.members(), "p": p}),
                Payload::Hybrid {
                    certificate,
                    shape,
                    shape_text,
                },
            ))
        }
        Command::Frobenius { group } => {
            let (spec, g) = resolve::group(group)?;
            let structure = frobenius_structure(&g)?;
            Ok(Report::new(
                json!({"subcommand": "frobenius", "group": spec}),
                Payload::Frobenius {
                    group: g.label().to_string(),
                    order: g.order(),
                    structure,
                },
            ))
        }
        Command::IwasawaShape { h, alpha, n, p } => {
            let (spec, hg) = resolve::group(h)?;
            let a = resolve::automorphism(&hg, alpha.as_deref())?;
            let sub = resolve::subgroup(&hg, n, Some(*p))?;
            let gdata = make_lie_group(hg, a, *p)?;
            let certificate = is_lambda_n_hybrid(&gdata, &sub)?;
            let shape = if certificate.verdict {
                Some(lambda_shape(&gdata, &sub)?)
            } else {
                None
            };
            let shape_text = shape.as_ref().map(|s| s.to_string());
            Ok(Report::new(
                json!({
                    "subcommand": "iwasawa-shape", "h": spec, "alpha": gdata.alpha().images(),
                    "N": n, "n_members": sub.members(), "p": p
                }),
                Payload::IwasawaShape {
                    lie_group: gdata,
                    certificate,
                    shape,
                    shape_text,
                },
            ))
        }
        Command::Eimc {
            case,
            group,
            p,
            over_q,
        } => {
            let case = match (case, group, p) {
                (Some(path), _, _) => {
                    let value = resolve::read_json(path)?;
                    serde_json::from_value::<EimcCase>(value).map_err(|e| {
                        CliError::Domain(hybrid_core::Error::Parameter(format!(
                            "{}: {e}",
                            path.display()
                        )))
                    })?
                }
                (None, Some(group), Some(p)) => {
                    let c = EimcCase::finite(resolve::group_spec(group)?, *p);
                    if *over_q {
                        c.over_q()
                    } else {
                        c
                    }
                }
                _ => {
                    return Err(CliError::Domain(hybrid_core::Error::Parameter(
                        "give --case or --group with -p".into(),
                    )))
                }
            };
            let verdict = evaluate(&case)?;
            Ok(Report::new(
                json!({"subcommand": "eimc", "case": case}),
                Payload::Eimc { case, verdict },
            ))
        }
        Command::Census {
            family,
            primes,
            out_dir,
        } => {
            let fam: CensusFamily = family.parse()?;
            let primes = resolve::primes(primes)?;
            let tables = census(&fam, &primes)?;
            let mut files = Vec::new();
            if let Some(dir) = out_dir {
                fs::create_dir_all(dir)
                    .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
                for t in &tables {
                    let base = format!("census_p{}", t.p);
                    let json = serde_json::to_string_pretty(t).expect("census tables serialize");
                    write_file(&dir.join(format!("{base}.json")), &(json + "\n"))?;
                    let mut md = String::new();
                    report::census_md(&mut md, t);
                    write_file(&dir.join(format!("{base}.md")), &md)?;
                    files.push(format!("{base}.json"));
                    files.push(format!("{base}.md"));
                }
            }
            Ok(Report::new(
                json!({"subcommand": "census", "family": fam, "primes": primes}),
                Payload::Census { tables, files },
            ))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(cap) = cli.cap {
        std::env::set_var(CAP_ENV, cap.to_string());
    }
    let result = run(&cli.command).and_then(|report| {
        let text = match cli.format {
            Format::Json => {
                serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
            }
            Format::Markdown => report::markdown(&report),
        };
        emit(&cli, &text)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = e.body();
            let code = body.exit_code;
            eprintln!("hybrid: {}", body.message);
            let text = match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&ErrorReport::new(body)).expect("errors serialize")
                        + "\n"
                }
                Format::Markdown => format!("# Error ({})\n\n{}\n", body.kind, body.message),
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::from(code)
        }
    }
}
