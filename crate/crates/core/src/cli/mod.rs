//! The `gluon` command line: JSON documents in, JSON on stdout, diagnostics
//! on stderr. Exit status 0 means success or "yes", 1 means "no" or "not
//! found within the bound", 2 means the input was unusable.

mod document;
mod dot;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub use document::{
    BoxDoc, CertificateDocument, DocError, Document, FlagDoc, ForestDoc, NodeDoc, SetDocument, StructureDoc,
    SubforestDoc, VertexDoc, WitnessDoc,
};
pub use dot::export_dot;

use crate::formula::{Context, Formula};
use crate::glue::{
    check_naturality_square, glueability_search, reconstruct_and_certify, variant_of, GlueConfig, GlueError,
    GlueOutcome,
};
use crate::rewrite::{
    apply_dill_set, apply_mell, find_termination_path, format_path, parse_path, reverse_replay, same_classes,
    DillConfig, Step,
};
use crate::structure::{is_iso, validate_classify, AxiomMode, Qps};
use crate::taylor::{emptyings, enumerate_thick_subforests, expand, is_filled_member, is_taylor_member};

#[derive(Parser, Debug)]
#[command(name = "gluon", version, about = "MELL proof-structures: Taylor expansion, deconstruction paths and glueability")]
struct Cli {
    /// Axiom and daimon rules to use; defaults to the mode of the input.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Atomic,
    Eta,
}

impl From<ModeArg> for AxiomMode {
    fn from(m: ModeArg) -> AxiomMode {
        match m {
            ModeArg::Atomic => AxiomMode::Atomic,
            ModeArg::Eta => AxiomMode::Eta,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a structure and print its classification.
    Validate { file: PathBuf },
    /// Taylor elements of a structure with at most N copies of each box per
    /// copy of its parent; with --seed, one random such element.
    Taylor {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Whether an element is in the Taylor expansion of a structure, or in
    /// its filled expansion when it has daimons.
    Member { element: PathBuf, structure: PathBuf },
    /// Every emptying of a resource structure.
    Emptyings { element: PathBuf },
    /// Apply a path to a set of resource structures, or to a single MELL
    /// structure, and print every result.
    Apply {
        #[arg(long)]
        path: PathBuf,
        input: PathBuf,
    },
    /// Rebuild the source of a path from its final structure.
    Reverse {
        #[arg(long)]
        path: PathBuf,
        /// Type of the path's source, e.g. "?bot,!1".
        #[arg(long)]
        from: String,
        structure: PathBuf,
    },
    /// A path from a MELL structure to the empty structure.
    Terminate { structure: PathBuf },
    /// Search a path from a set to {ε} and print a certificate. A negative
    /// answer only means no path exists within --depth rule steps and with
    /// the cut formulas tried; daimon cuts are off unless --cuts is given.
    Glue {
        set: PathBuf,
        #[arg(long, default_value_t = 25)]
        depth: usize,
        /// Formulas to try for cuts on daimons, one per line.
        #[arg(long)]
        cuts: Option<PathBuf>,
    },
    /// Re-verify a certificate against a set.
    Certify { set: PathBuf, certificate: PathBuf },
    /// Check the naturality square for one step, a structure and a set
    /// inside its filled expansion.
    NaturalityCheck {
        structure: PathBuf,
        set: PathBuf,
        #[arg(long)]
        path: PathBuf,
    },
    /// Graphviz rendering of a structure.
    ExportDot { file: PathBuf },
}

/// Exit statuses.
const YES: i32 = 0;
const NO: i32 = 1;
const BAD_INPUT: i32 = 2;

/// A failure that ends the command with a message on stderr.
struct Fail(i32, String);

fn bad(msg: impl std::fmt::Display) -> Fail {
    Fail(BAD_INPUT, msg.to_string())
}

type Res = Result<(i32, Output), Fail>;

enum Output {
    Json(Value),
    Text(String),
}

fn json_of<T: Serialize>(x: &T) -> Output {
    Output::Json(serde_json::to_value(x).expect("serializable"))
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    serde_json::from_str(&read(path)?).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<Qps, Fail> {
    parse_json::<Document>(path)?.to_qps().map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn load_set(path: &Path) -> Result<Vec<Qps>, Fail> {
    parse_json::<SetDocument>(path)?.to_set().map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn load_valid(path: &Path) -> Result<Qps, Fail> {
    let q = load_structure(path)?;
    validate_classify(&q).map_err(|v| bad(format!("{}: invalid structure: {}", path.display(), v[0])))?;
    Ok(q)
}

fn load_valid_set(path: &Path) -> Result<Vec<Qps>, Fail> {
    let set = load_set(path)?;
    if let Some(k) = set.iter().position(|q| validate_classify(q).is_err()) {
        return Err(bad(format!("{}: element {k} is not a valid structure", path.display())));
    }
    Ok(set)
}

fn load_path(path: &Path) -> Result<Vec<Step>, Fail> {
    parse_path(&read(path)?).map_err(|e| bad(format!("{}: {e}", path.display())))
}

/// Run the command line `args` (program name first), writing to `out` and
/// `err`; returns the exit status.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                YES
            } else {
                let _ = write!(err, "{text}");
                BAD_INPUT
            };
        }
    };
    match dispatch(&cli) {
        Ok((code, output)) => {
            let _ = match output {
                Output::Json(v) => writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")),
                Output::Text(t) => write!(out, "{t}"),
            };
            code
        }
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "gluon: {msg}");
            code
        }
    }
}

fn dispatch(cli: &Cli) -> Res {
    let mode = |fallback: AxiomMode| cli.mode.map_or(fallback, AxiomMode::from);
    match &cli.command {
        Command::Validate { file } => {
            let q = load_structure(file)?;
            Ok(match validate_classify(&q) {
                Ok(c) => (YES, Output::Json(json!({ "valid": true, "classification": c }))),
                Err(vs) => {
                    let vs: Vec<String> = vs.iter().map(ToString::to_string).collect();
                    (NO, Output::Json(json!({ "valid": false, "violations": vs })))
                }
            })
        }
        Command::Taylor { file, copies, seed } => {
            let r = load_valid(file)?;
            let elements: Vec<Qps> = match seed {
                Some(s) => vec![crate::gen::random_taylor_element(&mut crate::gen::rng(*s), &r, *copies)],
                None => {
                    let mut all: Vec<Qps> = vec![];
                    for t in enumerate_thick_subforests(&r.forest, *copies) {
                        let e = expand(&r, &t).structure;
                        if !all.iter().any(|x| is_iso(x, &e)) {
                            all.push(e);
                        }
                    }
                    all
                }
            };
            Ok((YES, json_of(&SetDocument::from_set(&elements))))
        }
        Command::Member { element, structure } => {
            let rho = load_valid(element)?;
            let r = load_valid(structure)?;
            if let Some(t) = is_taylor_member(&rho, &r) {
                let w = json!({ "member": true, "plain": true, "subforest": SubforestDoc::from_subforest(&t) });
                return Ok((YES, Output::Json(w)));
            }
            match is_filled_member(&rho, &r, variant_of(mode(r.mode))) {
                Some(w) => Ok((
                    YES,
                    Output::Json(json!({
                        "member": true,
                        "plain": false,
                        "subforest": SubforestDoc::from_subforest(&w.subforest),
                        "emptied": w.emptied,
                        "routed": w.routed,
                    })),
                )),
                None => Ok((NO, Output::Json(json!({ "member": false })))),
            }
        }
        Command::Emptyings { element } => {
            let rho = load_valid(element)?;
            Ok((YES, json_of(&SetDocument::from_set(&emptyings(&rho, variant_of(mode(rho.mode)))))))
        }
        Command::Apply { path, input } => {
            let steps = load_path(path)?;
            let v: Value = parse_json(input)?;
            if v.get("elements").is_some() {
                let set = load_valid_set(input)?;
                let cfg = DillConfig::new(mode(set.first().map_or(AxiomMode::Atomic, |q| q.mode)));
                let mut sets = vec![set];
                for (k, s) in steps.iter().enumerate() {
                    let mut next: Vec<Vec<Qps>> = vec![];
                    for set in &sets {
                        for alt in apply_dill_set(set, s, &cfg).map_err(|e| bad(format!("step {}: {e}", k + 1)))? {
                            if !next.iter().any(|x| same_classes(x, &alt)) {
                                next.push(alt);
                            }
                        }
                    }
                    sets = next;
                }
                let docs: Vec<SetDocument> = sets.iter().map(|s| SetDocument::from_set(s)).collect();
                Ok((if docs.is_empty() { NO } else { YES }, Output::Json(json!({ "results": docs }))))
            } else {
                let r = load_valid(input)?;
                let mut cur = vec![r];
                for (k, s) in steps.iter().enumerate() {
                    let mut next: Vec<Qps> = vec![];
                    for q in &cur {
                        for alt in apply_mell(q, s).map_err(|e| bad(format!("step {}: {e}", k + 1)))? {
                            if !next.iter().any(|x| is_iso(x, &alt)) {
                                next.push(alt);
                            }
                        }
                    }
                    cur = next;
                }
                let docs: Vec<Document> = cur.iter().map(Document::from_qps).collect();
                Ok((if docs.is_empty() { NO } else { YES }, Output::Json(json!({ "results": docs }))))
            }
        }
        Command::Reverse { path, from, structure } => {
            let steps = load_path(path)?;
            let src: Context = from.parse().map_err(|e| bad(format!("--from: {e}")))?;
            let end = load_valid(structure)?;
            match reverse_replay(&end, &steps, &src) {
                Ok(frames) => {
                    let docs: Vec<Document> = frames.iter().map(Document::from_qps).collect();
                    Ok((YES, Output::Json(json!({ "frames": docs }))))
                }
                Err(e) => Err(Fail(NO, format!("reverse replay: {e}"))),
            }
        }
        Command::Terminate { structure } => {
            let r = load_valid(structure)?;
            match find_termination_path(&r) {
                Ok(p) => Ok((YES, Output::Json(json!({ "path": format_path(&p), "steps": p.len() })))),
                Err(e) => Err(Fail(NO, e.to_string())),
            }
        }
        Command::Glue { set, depth, cuts } => {
            let pi = load_set(set)?;
            let mut cfg = GlueConfig::new(mode(pi.first().map_or(AxiomMode::Atomic, |q| q.mode)), *depth);
            if let Some(file) = cuts {
                let formulas: Result<Vec<Formula>, _> =
                    read(file)?.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::parse).collect();
                cfg.cut_candidates = Some(formulas.map_err(|e| bad(format!("{}: {e}", file.display())))?);
                cfg.enumerate_daimon_cut = true;
            }
            match glueability_search(&pi, &cfg) {
                Ok(GlueOutcome::Glueable(c)) => Ok((YES, json_of(&CertificateDocument::from_certificate(&c)))),
                Ok(GlueOutcome::NotWithinBound { depth }) => {
                    Ok((NO, Output::Json(json!({ "result": "not glueable within bound", "depth": depth }))))
                }
                Err(e @ (GlueError::Empty | GlueError::Heterogeneous { .. } | GlueError::Invalid { .. })) => Err(bad(e)),
                Err(e) => Err(Fail(NO, format!("certification failed: {e}"))),
            }
        }
        Command::Certify { set, certificate } => {
            let pi = load_set(set)?;
            let cert: CertificateDocument = parse_json(certificate)?;
            let claimed = cert.r.to_qps().map_err(|e| bad(format!("{}: R.{e}", certificate.display())))?;
            let steps = parse_path(&cert.path).map_err(|e| bad(format!("{}: path: {e}", certificate.display())))?;
            let verdict = check_certificate(&pi, &steps, &claimed, &cert, mode(claimed.mode));
            Ok(match verdict {
                Ok(()) => (YES, Output::Json(json!({ "valid": true }))),
                Err(reason) => (NO, Output::Json(json!({ "valid": false, "reason": reason }))),
            })
        }
        Command::NaturalityCheck { structure, set, path } => {
            let r = load_valid(structure)?;
            let pi = load_valid_set(set)?;
            let steps = load_path(path)?;
            let [step] = steps.as_slice() else { return Err(bad("the path file must hold exactly one step")) };
            let rep = check_naturality_square(&r, step, &pi, &DillConfig::new(mode(r.mode)));
            Ok((if rep.holds() { YES } else { NO }, json_of(&rep)))
        }
        Command::ExportDot { file } => Ok((YES, Output::Text(export_dot(&load_structure(file)?)))),
    }
}

/// Replay the certificate's path from scratch, rebuild the witness and
/// compare it with the claimed one, then check each plain membership witness
/// by expanding the claimed structure along it.
fn check_certificate(
    pi: &[Qps],
    steps: &[Step],
    claimed: &Qps,
    cert: &CertificateDocument,
    mode: AxiomMode,
) -> Result<(), String> {
    let c = reconstruct_and_certify(pi, steps, mode).map_err(|e| e.to_string())?;
    if !is_iso(&c.witness, claimed) {
        return Err("the path rebuilds a structure other than R".into());
    }
    if cert.witnesses.len() != pi.len() {
        return Err(format!("{} witnesses for {} elements", cert.witnesses.len(), pi.len()));
    }
    for w in cert.witnesses.iter().filter(|w| w.plain) {
        let t = w.subforest.to_subforest();
        let ok = pi.get(w.element).is_some_and(|rho| {
            t.is_valid_for(&claimed.forest) && is_iso(&expand(claimed, &t).structure, rho)
        });
        if !ok {
            return Err(format!("witness for element {} does not expand to it", w.element));
        }
    }
    Ok(())
}
