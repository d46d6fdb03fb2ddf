//! Command-line interface: reads a corpus document and prints a JSON report.
//!
//! Exit codes: 0 success or certified, 1 violation or counterexample found,
//! 2 usage or validation error, 3 unknown because a search bound ran out.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::complex::classify_pqr;
use crate::diagrams::{find_disk_diagram, DiagramSearch};
use crate::error::{Error, Result};
use crate::folding::{
    build_core, check_fold, collapse_essential_path, find_essential_path, fold, immersion_invariants, pushout,
    CollapseOutcome, CoreLimits, CoreOutcome, PathLimits, PathSearch,
};
use crate::format::{parse_word, ComplexDoc, CorpusDocument, MorphismDoc};
use crate::orbihedron::{euler_characteristic, gauss_bonnet};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::sections::{
    certify_generalized, certify_sectional, curvature_bounds, enumerate_regular_sections, section_curvature,
    GraphAction,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "angled", version, about = "Curvature, folding and core tools for angled 2-complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Corpus document; standard input when omitted or "-".
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SearchLimits {
    #[arg(long, default_value_t = 10)]
    max_length: usize,
    #[arg(long, default_value_t = 20)]
    max_area: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that every section of the document is well formed.
    Validate(Input),
    /// Links of the vertices, with corner angles.
    Link {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        vertex: Option<usize>,
    },
    /// Boundary length, link girth and edge multiplicity bounds.
    Pqr(Input),
    /// Orbifold Euler characteristic of the weighted quotient.
    Euler(Input),
    /// Compare 2χ with the total curvature.
    GaussBonnet(Input),
    /// Sectional curvature at most alpha.
    Certify {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        alpha: Rational,
        /// Use the document's action and all subgroups of vertex stabilizers.
        #[arg(long)]
        generalized: bool,
    },
    /// Extremal section curvatures over all invariant subgraphs of links.
    Bounds(Input),
    /// Fold the document's map into an immersion.
    Fold(Input),
    /// Glue the targets of the document's two maps.
    Pushout(Input),
    /// Collapse the shortest essential path of the document's immersion.
    Collapse {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: SearchLimits,
    },
    /// Grow the document's subcomplex to a simply connected invariant core.
    Core {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: SearchLimits,
        #[arg(long, default_value_t = 10)]
        max_iterations: usize,
    },
    /// Search for a disk diagram filling a closed path.
    Diagram {
        #[command(flatten)]
        input: Input,
        /// Letters separated by spaces or commas; "-e" reverses edge e.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Start vertex; defaults to the start of the first letter.
        #[arg(long)]
        start: Option<usize>,
        #[arg(long, default_value_t = 20)]
        max_area: usize,
    },
    /// Orbit counts of the document's immersion.
    Invariants(Input),
}

fn rational_arg(text: &str) -> std::result::Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

impl Command {
    fn input(&self) -> &Input {
        match self {
            Command::Validate(i)
            | Command::Pqr(i)
            | Command::Euler(i)
            | Command::GaussBonnet(i)
            | Command::Bounds(i)
            | Command::Fold(i)
            | Command::Pushout(i)
            | Command::Invariants(i) => i,
            Command::Link { input, .. }
            | Command::Certify { input, .. }
            | Command::Collapse { input, .. }
            | Command::Core { input, .. }
            | Command::Diagram { input, .. } => input,
        }
    }
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialize")
}

fn rat(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn missing(section: &str) -> Error {
    Error::Precondition(format!("document has no {section} section"))
}

fn execute(command: &Command, doc: &CorpusDocument) -> Result<(i32, Value)> {
    doc.validate()?;
    let x = doc.complex()?;
    match command {
        Command::Validate(_) => Ok((
            EXIT_OK,
            json!({
                "valid": true,
                "vertices": x.vertex_count(),
                "edges": x.edge_count(),
                "faces": x.face_count(),
                "euler_characteristic": x.euler_characteristic(),
            }),
        )),
        Command::Link { vertex, .. } => {
            let vertices: Vec<usize> = match vertex {
                Some(v) => vec![*v],
                None => (0..x.vertex_count()).collect(),
            };
            let links = vertices
                .iter()
                .map(|&v| Ok(json!({ "vertex": v, "link": to_value(&x.link(v)?) })))
                .collect::<Result<Vec<_>>>()?;
            Ok((EXIT_OK, json!({ "links": links })))
        }
        Command::Pqr(_) => Ok((EXIT_OK, to_value(&classify_pqr(&x)))),
        Command::Euler(_) => {
            let o = doc.orbihedron()?;
            let mut report = json!({ "euler_characteristic": rat(&euler_characteristic(&o)) });
            let warnings = o.weight_warnings();
            if !warnings.is_empty() {
                report["warnings"] = to_value(&warnings);
            }
            Ok((EXIT_OK, report))
        }
        Command::GaussBonnet(_) => {
            let report = gauss_bonnet(&doc.orbihedron()?);
            let code = if report.holds { EXIT_OK } else { EXIT_VIOLATION };
            Ok((code, to_value(&report)))
        }
        Command::Certify {
            alpha, generalized, ..
        } => {
            let cert = if *generalized {
                certify_generalized(&doc.action()?, *alpha)?
            } else {
                certify_sectional(&x, *alpha)?
            };
            let mut report = to_value(&cert);
            if !generalized {
                report["extremal_sections"] = extremal_sections(&x)?;
            }
            let code = if cert.is_certified() { EXIT_OK } else { EXIT_VIOLATION };
            Ok((code, report))
        }
        Command::Bounds(_) => Ok((EXIT_OK, to_value(&curvature_bounds(&doc.action()?)?))),
        Command::Fold(_) => {
            let m = doc.map()?.ok_or_else(|| missing("map"))?;
            let f = fold(&m)?;
            let check = check_fold(&m, &f);
            let report = json!({
                "complex": to_value(&ComplexDoc::from_complex(&f.complex)),
                "quotient_map": to_value(&MorphismDoc::from_morphism(&f.q)),
                "immersion": to_value(&MorphismDoc::from_morphism(&f.i)),
                "rounds": f.rounds,
                "check": to_value(&check),
            });
            let code = if check.holds() { EXIT_OK } else { EXIT_VIOLATION };
            Ok((code, report))
        }
        Command::Pushout(_) => {
            let (phi, psi) = doc.pushout_maps()?.ok_or_else(|| missing("pushout"))?;
            let p = pushout(&phi, &psi)?;
            Ok((
                EXIT_OK,
                json!({
                    "complex": to_value(&ComplexDoc::from_complex(&p.complex)),
                    "left": to_value(&MorphismDoc::from_morphism(&p.i)),
                    "right": to_value(&MorphismDoc::from_morphism(&p.j)),
                }),
            ))
        }
        Command::Collapse { limits, .. } => {
            let m = doc.map()?.ok_or_else(|| missing("map"))?;
            let path_limits = PathLimits {
                max_length: limits.max_length,
                max_area: limits.max_area,
            };
            match find_essential_path(&m, path_limits)? {
                PathSearch::None => Ok((EXIT_OK, json!({ "status": "no_essential_path" }))),
                PathSearch::Unknown { reason } => Ok((EXIT_UNKNOWN, json!({ "status": "unknown", "reason": reason }))),
                PathSearch::Found(p) => match collapse_essential_path(&m, &p, limits.max_area)? {
                    CollapseOutcome::NoDiagram { area_bound } => Ok((
                        EXIT_UNKNOWN,
                        json!({ "status": "no_diagram", "path": to_value(&p), "area_bound": area_bound }),
                    )),
                    CollapseOutcome::Collapsed(c) => Ok((
                        EXIT_OK,
                        json!({
                            "status": "collapsed",
                            "path": to_value(&p),
                            "diagram_area": c.diagram.diagram.complex().face_count(),
                            "complex": to_value(&ComplexDoc::from_complex(&c.complex)),
                            "source_map": to_value(&MorphismDoc::from_morphism(&c.y_to_z)),
                            "immersion": to_value(&MorphismDoc::from_morphism(&c.z_to_x)),
                            "bnd_or_isolated_before": c.bnd_or_isolated_before,
                            "bnd_or_isolated_after": c.bnd_or_isolated_after,
                        }),
                    )),
                },
            }
        }
        Command::Core {
            limits, max_iterations, ..
        } => {
            let y = doc.subcomplex()?.ok_or_else(|| missing("subcomplex"))?;
            let core_limits = CoreLimits {
                max_length: limits.max_length,
                max_area: limits.max_area,
                max_iterations: *max_iterations,
            };
            let outcome = build_core(&doc.action()?, &y, core_limits)?;
            let code = match &outcome {
                CoreOutcome::Found(_) => EXIT_OK,
                CoreOutcome::Unknown { .. } => EXIT_UNKNOWN,
            };
            Ok((code, to_value(&outcome)))
        }
        Command::Diagram {
            word, start, max_area, ..
        } => {
            let word = parse_word(word)?;
            let start = match (start, word.first()) {
                (Some(s), _) => *s,
                (None, Some(&l)) => {
                    if l.edge >= x.edge_count() {
                        return Err(Error::UnknownEdge(l.edge));
                    }
                    x.start(l)
                }
                (None, None) => return Err(Error::Precondition("an empty word needs --start".into())),
            };
            match find_disk_diagram(&x, start, &word, *max_area)? {
                DiagramSearch::Found(map) => Ok((
                    EXIT_OK,
                    json!({
                        "status": "found",
                        "area": map.diagram.complex().face_count(),
                        "near_immersion": map.near_immersion,
                        "diagram": to_value(&ComplexDoc::from_complex(map.diagram.complex())),
                        "rotation": to_value(&map.diagram.rotation()),
                        "boundary": to_value(&map.diagram.boundary()),
                        "map": to_value(&MorphismDoc::from_morphism(&map.morphism)),
                    }),
                )),
                none @ DiagramSearch::NoneWithinBound { .. } => Ok((EXIT_UNKNOWN, to_value(&none))),
            }
        }
        Command::Invariants(_) => {
            let m = doc.map()?.ok_or_else(|| missing("map"))?;
            Ok((EXIT_OK, to_value(&immersion_invariants(&m)?)))
        }
    }
}

/// The first regular section of largest curvature at each vertex.
fn extremal_sections(x: &crate::complex::TwoComplex) -> Result<Value> {
    let mut out = Vec::new();
    for v in 0..x.vertex_count() {
        let link = x.link(v)?;
        let trivial = GraphAction::trivial(&link);
        let mut best: Option<(Rational, crate::sections::Section)> = None;
        for s in enumerate_regular_sections(&link, &trivial) {
            let k = section_curvature(&link, &trivial, &s)?;
            if best.as_ref().is_none_or(|(b, _)| k > *b) {
                best = Some((k, s));
            }
        }
        if let Some((k, s)) = best {
            out.push(json!({ "vertex": v, "section": to_value(&s), "curvature": rat(&k) }));
        }
    }
    Ok(Value::Array(out))
}

fn read_input(input: &Input, stdin: &mut dyn Read) -> std::io::Result<String> {
    let mut text = String::new();
    match &input.file {
        Some(path) if path.as_os_str() != "-" => text = std::fs::read_to_string(path)?,
        _ => {
            stdin.read_to_string(&mut text)?;
        }
    }
    Ok(text)
}

fn emit(out: &mut dyn Write, value: &Value) {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    // a closed pipe is not worth a panic
    let _ = writeln!(out, "{text}");
}

/// Runs one command line and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let text = match read_input(cli.command.input(), stdin) {
        Ok(text) => text,
        Err(e) => {
            emit(stdout, &json!({ "error": format!("cannot read input: {e}") }));
            return EXIT_USAGE;
        }
    };
    let result = CorpusDocument::parse(&text).and_then(|doc| execute(&cli.command, &doc));
    match result {
        Ok((code, report)) => {
            emit(stdout, &report);
            code
        }
        Err(e) => {
            emit(stdout, &json!({ "error": e.to_string() }));
            EXIT_USAGE
        }
    }
}
