//! `simplexk`: command-line front end for the lower K-theory pipeline.
//!
//! Exit status 0 on success, 1 on a domain error (structured JSON on stderr),
//! 2 on a usage error.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use simplexk::abelian::AbGroup;
use simplexk::coxeter::{classify_subdiagram, truncated_domain_inventory, CellInventory, SubdiagramType};
use simplexk::evc::model_inventory;
use simplexk::geodesics::{analyze_edges, EdgeReport, Outcome, StabilizerKind};
use simplexk::intlinalg::smith_normal_form;
use simplexk::kb::{load_kb, validate_adapted_family, AdaptedFamilyReport, KnowledgeBase};
use simplexk::spectral::{lower_k_report, render_text};
use simplexk::{CoxeterDiagram, IntMatrix};

#[derive(Parser, Debug)]
#[command(name = "simplexk", version, about = "Lower algebraic K-theory of hyperbolic simplex reflection groups")]
struct Cli {
    /// Knowledge-base JSON; defaults to the bundled fixture.
    #[arg(long, global = true, value_name = "PATH")]
    kb: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include E² terms, derivation logs and sources in text output.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parabolic subgroups, truncated domain and model inventory.
    Analyze {
        /// "[3,4,4]", a JSON Coxeter matrix, or a file holding either.
        diagram: String,
    },
    /// Trace the geodesic through every simplex edge.
    Geodesics { diagram: String },
    /// Wh, K̃₀, K₋₁ and K_n for n ≤ −2.
    Ktheory { diagram: String },
    /// Smith normal form of a matrix file ("-" for stdin).
    Snf { input: String },
    /// Load and check a knowledge base.
    ValidateKb {
        /// Overrides --kb.
        path: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Domain { module: &'static str, message: String },
}

impl CliError {
    fn domain(module: &'static str, e: impl std::fmt::Display) -> Self {
        CliError::Domain {
            module,
            message: e.to_string(),
        }
    }
}

/// A rendered result: the JSON value and its text form.
struct Output {
    json: serde_json::Value,
    text: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain { module, message }) => {
            let body = json!({ "error": { "module": module, "message": message } });
            eprintln!("{}", serde_json::to_string_pretty(&body).expect("static shape"));
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let out = match &cli.command {
        Command::Analyze { diagram } => analyze(&read_diagram(diagram)?, &load(cli.kb.as_deref())?)?,
        Command::Geodesics { diagram } => geodesics(&read_diagram(diagram)?)?,
        Command::Ktheory { diagram } => ktheory(&read_diagram(diagram)?, &load(cli.kb.as_deref())?, cli.verbose)?,
        Command::Snf { input } => snf(input)?,
        Command::ValidateKb { path } => return validate_kb(path.as_deref().or(cli.kb.as_deref()), cli),
    };
    emit(cli, &out)
}

fn emit(cli: &Cli, out: &Output) -> Result<(), CliError> {
    let mut body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable"),
        Format::Text => out.text.trim_end().to_string(),
    };
    body.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))
}

/// A literal diagram, or the path of a file holding one.
fn read_diagram(arg: &str) -> Result<CoxeterDiagram, CliError> {
    let t = arg.trim();
    let text = if t.starts_with('[') || t.starts_with('{') {
        t.to_string()
    } else {
        read_input(t)?
    };
    CoxeterDiagram::parse(&text).map_err(|e| CliError::domain("coxeter", e))
}

fn load(path: Option<&Path>) -> Result<KnowledgeBase, CliError> {
    match path {
        None => Ok(KnowledgeBase::bundled()),
        Some(p) if !p.is_file() => Err(CliError::Usage(format!("cannot read {}: no such file", p.display()))),
        Some(p) => load_kb(p).map_err(|e| CliError::domain("kb", e)),
    }
}

fn subset_name(s: &[usize]) -> String {
    let names: Vec<String> = s.iter().map(|&i| CoxeterDiagram::generator_name(i)).collect();
    format!("{{{}}}", names.join(","))
}

fn type_text(t: &SubdiagramType) -> String {
    match t {
        SubdiagramType::Finite { order: Some(o), id: Some(id) } => format!("finite {id}, order {o}"),
        SubdiagramType::Finite { order: Some(o), id: None } => format!("finite, order {o}"),
        SubdiagramType::Finite { .. } => "finite".into(),
        SubdiagramType::Affine { id } => format!("affine {id}"),
        SubdiagramType::Indefinite => "indefinite".into(),
    }
}

fn inventory_text(out: &mut String, title: &str, inv: &CellInventory) {
    let _ = writeln!(out, "{title}: cells per dimension {:?}", inv.counts());
    for (p, _) in inv.dims.iter().enumerate() {
        let labels: Vec<String> = inv.stabilizer_labels(p).into_iter().collect();
        let _ = writeln!(out, "  dim {p}: {}", labels.join(", "));
    }
}

fn inventory_json(inv: &CellInventory) -> serde_json::Value {
    let dims: Vec<_> = inv
        .dims
        .iter()
        .enumerate()
        .map(|(p, cells)| {
            json!({
                "dim": p,
                "stabilizers": inv.stabilizer_multiset(p),
                "cells": cells,
            })
        })
        .collect();
    json!({ "counts": inv.counts(), "dims": dims })
}

fn analyze(d: &CoxeterDiagram, kb: &KnowledgeBase) -> Result<Output, CliError> {
    let n = d.rank();
    let mut subsets: Vec<Vec<usize>> = (1u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut text = String::from("Parabolic subgroups:\n");
    let mut parabolics = Vec::new();
    for s in &subsets {
        let t = classify_subdiagram(d, s).map_err(|e| CliError::domain("coxeter", e))?;
        let _ = writeln!(text, "  {:<16} {}", subset_name(s), type_text(&t));
        parabolics.push(json!({ "generators": s.iter().map(|&i| CoxeterDiagram::generator_name(i)).collect::<Vec<_>>(), "type": t }));
    }
    let truncated = truncated_domain_inventory(d).map_err(|e| CliError::domain("coxeter", e))?;
    let model = model_inventory(d, kb).map_err(|e| CliError::domain("evc_model", e))?;
    text.push('\n');
    inventory_text(&mut text, "Truncated domain", &truncated);
    text.push('\n');
    inventory_text(&mut text, "E_VC model", &model);
    Ok(Output {
        json: json!({
            "rank": n,
            "parabolics": parabolics,
            "truncated_domain": inventory_json(&truncated),
            "model": inventory_json(&model),
        }),
        text,
    })
}

fn edge_name(e: [usize; 2]) -> String {
    format!("P{}∩P{}", e[0] + 1, e[1] + 1)
}

fn edge_columns(r: &EdgeReport) -> [String; 5] {
    let (outcome, period) = match r.trace.outcome {
        Outcome::Periodic { period } => ("periodic", period.to_string()),
        Outcome::Escapes => ("escapes", "-".into()),
    };
    let stab = r.stabilizer.name.as_ref().map_or("finite".into(), ToString::to_string);
    let graph = match &r.stabilizer.kind {
        StabilizerKind::GraphOfGroups { vertices, edges, .. } => {
            let mut s = vertices[0].to_string();
            for (e, v) in edges.iter().zip(vertices.iter().cycle().skip(1)) {
                let _ = write!(s, " -{e}- {v}");
            }
            s
        }
        StabilizerKind::Form { group } => group.to_string(),
        StabilizerKind::Finite => "-".into(),
    };
    [edge_name(r.edge), outcome.into(), period, stab, graph]
}

fn geodesics(d: &CoxeterDiagram) -> Result<Output, CliError> {
    let rows = analyze_edges(d).map_err(|e| CliError::domain("geodesics", e))?;
    let header = ["edge", "outcome", "period", "stabilizer", "graph of groups"].map(String::from);
    let table: Vec<[String; 5]> = std::iter::once(header).chain(rows.iter().map(edge_columns)).collect();
    let widths: Vec<usize> = (0..5)
        .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut text = String::new();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        let _ = writeln!(text, "{}", cells.join("  ").trim_end());
    }
    Ok(Output {
        json: json!({ "edges": rows }),
        text,
    })
}

fn ktheory(d: &CoxeterDiagram, kb: &KnowledgeBase, verbose: bool) -> Result<Output, CliError> {
    let report = lower_k_report(d, kb).map_err(|e| CliError::domain("spectral", e))?;
    Ok(Output {
        json: to_json(&report),
        text: render_text(&report, verbose),
    })
}

fn snf(input: &str) -> Result<Output, CliError> {
    let a = IntMatrix::parse_text(&read_input(input)?).map_err(|e| CliError::domain("intlinalg", e))?;
    let s = smith_normal_form(&a);
    let diag = s.diagonal();
    let cokernel = AbGroup::from_diagonal(&diag, a.rows()).map_err(|e| CliError::domain("abelian", e))?;
    let diag_text: Vec<String> = diag.iter().map(ToString::to_string).collect();
    let text = format!(
        "diagonal: [{}]\nrank: {}\ncokernel: {cokernel}\n",
        diag_text.join(", "),
        s.rank()
    );
    Ok(Output {
        json: json!({
            "diagonal": diag_text,
            "rank": s.rank(),
            "cokernel": cokernel.to_string(),
            "u": s.u,
            "d": s.d,
            "v": s.v,
        }),
        text,
    })
}

fn family_text(r: &AdaptedFamilyReport) -> String {
    let mut s = String::new();
    for c in &r.conditions {
        let _ = writeln!(s, "  [{}] {:<52} {}", c.condition, c.name, if c.passed { "pass" } else { "FAIL" });
        for d in &c.detail {
            let _ = writeln!(s, "      {d}");
        }
    }
    s
}

fn validate_kb(path: Option<&Path>, cli: &Cli) -> Result<(), CliError> {
    let kb = load(path)?;
    let family = validate_adapted_family(&kb.adapted_family);
    let text = format!(
        "knowledge base v{}: {} entries, {} differential fixtures, {} cusp cells\nadapted family:\n{}",
        kb.version,
        kb.entries.len(),
        kb.differentials.len(),
        kb.cusp_model.counts().iter().sum::<usize>(),
        family_text(&family)
    );
    let out = Output {
        json: json!({
            "version": kb.version,
            "entries": kb.entries.len(),
            "differentials": kb.differentials.len(),
            "cusp_cells": kb.cusp_model.counts(),
            "adapted_family": family,
        }),
        text,
    };
    emit(cli, &out)?;
    if family.all_pass() {
        Ok(())
    } else {
        Err(CliError::domain(
            "kb",
            format!("adapted family fails conditions {:?}", family.failed()),
        ))
    }
}
