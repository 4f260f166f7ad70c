//! `tlw`: command-line driver for the workbench. Every subcommand reads
//! the file formats of the owning module, prints a human or `--json`
//! report, and exits 0 (valid / satisfied / found), 1 (invalid / refuted /
//! not found) or 2 (usage or parse error). JSON reports are path-free and
//! byte-identical across runs for fixed inputs and seeds.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use tlw_core::deduction::{
    check_proof, default_fuzz_theory, parse_proof, proof_theory_ref, random_derivation, Verdict,
};
use tlw_core::finspace::parse_space;
use tlw_core::henkin::{
    check_closure, in_basic_open, parse_general_model, phi_fiber, ClosureVerdict, LabeledPoint,
};
use tlw_core::semantics::{
    check_model, find_defining_formula, parse_model, random_interpretation, search_countermodel,
    spaces_up_to_homeo, Flavor, Interpretation, ModelVerdict, SearchBounds,
};
use tlw_core::sheaf::{
    find_iso, format_sheaf, from_etale, is_decidable, is_local_homeo, parse_sheaf, sheaf_space_ref,
    to_etale, Sheaf,
};
use tlw_core::syntax::{
    parse_term, parse_theory, parse_type, print_term, typecheck, Context, Mode, Term, Theory, Var,
};

#[derive(Parser)]
#[command(name = "tlw", version, about = "workbench for entailment calculi over finite topological semantics")]
struct Cli {
    /// Emit a machine-readable JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a theory file; optionally typecheck a formula against it.
    Parse {
        theory: PathBuf,
        #[arg(long)]
        formula: Option<String>,
    },
    /// Check a proof file against its theory.
    CheckProof {
        proof: PathBuf,
        /// Theory file; defaults to the proof's `%theory` header.
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Evaluate a sentence in a model.
    Eval {
        model: PathBuf,
        formula: String,
        #[arg(long)]
        theory: PathBuf,
    },
    /// Check that a model satisfies all axioms of its theory.
    CheckModel {
        model: PathBuf,
        #[arg(long)]
        theory: PathBuf,
    },
    /// Search small spaces for a model refuting a sentence.
    Countermodel {
        theory: PathBuf,
        formula: String,
        #[arg(long, default_value = "classical-c")]
        flavor: String,
        #[arg(long)]
        max_points: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_stalk: usize,
    },
    /// Search for a formula defining the graph of an interpreted term.
    Define {
        model: PathBuf,
        #[arg(long)]
        theory: PathBuf,
        /// The graph's input variable, as `name:Type`.
        #[arg(long)]
        var: String,
        /// A term in that variable; its interpretation is the function to define.
        #[arg(long)]
        term: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Generate random derivations and evaluate their conclusions in
    /// random models.
    FuzzSoundness {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "hol-classical")]
        mode: String,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        /// Random interpretations per derivation.
        #[arg(long, default_value_t = 5)]
        models: usize,
        #[arg(long)]
        max_points: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_stalk: usize,
        /// Defaults to classical-c in the hol modes and omega in lambda mode.
        #[arg(long)]
        flavor: Option<String>,
    },
    /// Finite-space checks.
    Space {
        #[command(subcommand)]
        cmd: SpaceCmd,
    },
    /// Sheaf-file checks.
    Sheaf {
        #[command(subcommand)]
        cmd: SheafCmd,
    },
    /// General-model demos.
    Henkin {
        #[command(subcommand)]
        cmd: HenkinCmd,
    },
    /// Re-run every `.cmd` entry in a directory and byte-compare its JSON
    /// report against the `.json` golden next to it.
    Corpus { dir: PathBuf },
}

#[derive(Subcommand)]
enum SpaceCmd {
    /// Validate a space file.
    Check { space: PathBuf },
}

#[derive(Subcommand)]
enum SheafCmd {
    /// Validate a sheaf file.
    Check { sheaf: PathBuf },
    /// List the global sections.
    Sections { sheaf: PathBuf },
    /// Report whether the sheaf is decidable (diagonal complemented).
    Decidable { sheaf: PathBuf },
    /// Round-trip through the étale presentation and validate the
    /// projection.
    Etale { sheaf: PathBuf },
}

#[derive(Subcommand)]
enum HenkinCmd {
    /// Check the closure conditions against the axioms' subterms plus any
    /// supplied witness terms.
    CheckClosure {
        model: PathBuf,
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        witness: Vec<String>,
    },
    /// Membership of a labeled point in the basic open of a formula and a
    /// label tuple.
    Open {
        model: PathBuf,
        formula: String,
        labels: Vec<usize>,
        #[arg(long)]
        theory: PathBuf,
    },
    /// The finite fibered set of a type over a list of labeled points.
    Fiber {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long = "type")]
        ty: String,
        points: Vec<PathBuf>,
    },
}

/// A finished subcommand: positive or negative verdict plus both report
/// forms.
struct Report {
    ok: bool,
    json: Value,
    human: String,
}

impl Report {
    fn new(ok: bool, human: impl Into<String>, json: Value) -> Report {
        Report {
            ok,
            json,
            human: human.into(),
        }
    }
}

struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> CliError {
        CliError(e.to_string())
    }
}

type Run = Result<Report, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {}", path.display(), e)))
}

fn sibling(of: &Path, rel: &str) -> PathBuf {
    of.parent().unwrap_or_else(|| Path::new(".")).join(rel)
}

fn load_theory(path: &Path) -> Result<Theory, CliError> {
    Ok(parse_theory(&read(path)?)?)
}

/// Reads a model file, resolving its space and sheaf references relative
/// to the model file itself.
fn load_model(path: &Path, thy: &Theory) -> Result<Interpretation, CliError> {
    let input = read(path)?;
    let reader = |rel: &str| -> Result<String, String> {
        std::fs::read_to_string(sibling(path, rel)).map_err(|e| format!("{}: {}", rel, e))
    };
    Ok(parse_model(&input, thy, &reader)?)
}

fn load_sheaf(path: &Path) -> Result<(Sheaf, Vec<Vec<String>>), CliError> {
    let input = read(path)?;
    let space_rel = sheaf_space_ref(&input)
        .ok_or_else(|| CliError(format!("{}: missing `%space` header", path.display())))?;
    let space = parse_space(&read(&sibling(path, &space_rel))?)?;
    Ok(parse_sheaf(&input, &space)?)
}

fn load_point(path: &Path, thy: &Theory) -> Result<LabeledPoint, CliError> {
    let (model, labeling) = parse_general_model(&read(path)?, &thy.signature)?;
    Ok(LabeledPoint::new(model, labeling)?)
}

fn parse_flavor(s: &str) -> Result<Flavor, CliError> {
    Flavor::parse(s).ok_or_else(|| CliError(format!("unknown flavor `{}`", s)))
}

/// The size cap on base spaces; `TLW_MAX_POINTS` overrides the default.
fn max_points_cap() -> usize {
    std::env::var("TLW_MAX_POINTS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(3)
}

fn bounded_points(requested: Option<usize>, default: usize) -> Result<usize, CliError> {
    let cap = max_points_cap();
    let n = requested.unwrap_or_else(|| default.min(cap));
    if n == 0 || n > cap {
        return Err(CliError(format!(
            "max-points must be between 1 and {} (see TLW_MAX_POINTS)",
            cap
        )));
    }
    Ok(n)
}

fn subterms(t: &Term, out: &mut Vec<Term>) {
    out.push(t.clone());
    match t {
        Term::Var(_) | Term::Const(_) | Term::Top | Term::Bot => {}
        Term::Proj1(a) | Term::Proj2(a) | Term::Not(a) => subterms(a, out),
        Term::Lambda(_, a) | Term::Forall(_, a) | Term::Exists(_, a) => subterms(a, out),
        Term::Pair(a, b)
        | Term::App(a, b)
        | Term::Eq(a, b)
        | Term::And(a, b)
        | Term::Or(a, b)
        | Term::Implies(a, b) => {
            subterms(a, out);
            subterms(b, out);
        }
        Term::RelApp(_, args) => {
            for a in args {
                subterms(a, out);
            }
        }
    }
}

fn run(cli: &Cli) -> Run {
    match &cli.cmd {
        Cmd::Parse { theory, formula } => {
            let thy = load_theory(theory)?;
            let mut extra = String::new();
            let mut fields = json!({
                "schema": 1,
                "command": "parse",
                "verdict": "valid",
                "mode": thy.signature.mode.as_str(),
                "types": thy.signature.basic_types.len(),
                "constants": thy.signature.constants.len(),
                "relations": thy.signature.relations.len(),
                "axioms": thy.axioms.len(),
            });
            if let Some(src) = formula {
                let t = parse_term(src, &thy.signature, &Context::empty())?;
                let ty = typecheck(&t, &Context::empty(), &thy.signature)?;
                extra = format!("\nformula: {} : {}", print_term(&t), ty);
                fields["formula"] = json!(print_term(&t));
                fields["formula_type"] = json!(ty.to_string());
            }
            let human = format!(
                "valid theory: mode {}, {} types, {} constants, {} relations, {} axioms{}",
                thy.signature.mode.as_str(),
                thy.signature.basic_types.len(),
                thy.signature.constants.len(),
                thy.signature.relations.len(),
                thy.axioms.len(),
                extra
            );
            Ok(Report::new(true, human, fields))
        }
        Cmd::CheckProof { proof, theory } => {
            let input = read(proof)?;
            let thy_path = match theory {
                Some(p) => p.clone(),
                None => sibling(
                    proof,
                    &proof_theory_ref(&input)
                        .ok_or_else(|| CliError("proof has no `%theory` header; pass --theory".into()))?,
                ),
            };
            let thy = load_theory(&thy_path)?;
            let tree = parse_proof(&input, &thy)?;
            match check_proof(&tree, &thy) {
                Verdict::Valid(seq) => Ok(Report::new(
                    true,
                    format!("valid: {}", seq),
                    json!({
                        "schema": 1,
                        "command": "check-proof",
                        "verdict": "valid",
                        "conclusion": seq.to_string(),
                        "depth": tree.depth(),
                    }),
                )),
                Verdict::Invalid { path, error } => Ok(Report::new(
                    false,
                    format!("invalid at premise path {:?}: {}", path, error),
                    json!({
                        "schema": 1,
                        "command": "check-proof",
                        "verdict": "invalid",
                        "path": path,
                        "error": error.to_string(),
                    }),
                )),
            }
        }
        Cmd::Eval {
            model,
            formula,
            theory,
        } => {
            let thy = load_theory(theory)?;
            let m = load_model(model, &thy)?;
            let sigma = parse_term(formula, &thy.signature, &Context::empty())?;
            let holds = m.satisfies(&sigma)?;
            Ok(Report::new(
                holds,
                format!("{}: {}", print_term(&sigma), if holds { "satisfied" } else { "refuted" }),
                json!({
                    "schema": 1,
                    "command": "eval",
                    "verdict": if holds { "satisfied" } else { "refuted" },
                    "formula": print_term(&sigma),
                    "flavor": m.flavor.as_str(),
                }),
            ))
        }
        Cmd::CheckModel { model, theory } => {
            let thy = load_theory(theory)?;
            let m = load_model(model, &thy)?;
            match check_model(&m)? {
                ModelVerdict::Valid => Ok(Report::new(
                    true,
                    "model satisfies every axiom",
                    json!({
                        "schema": 1,
                        "command": "check-model",
                        "verdict": "valid",
                        "axioms": thy.axioms.len(),
                    }),
                )),
                ModelVerdict::FailsAxiom(i) => Ok(Report::new(
                    false,
                    format!("model fails axiom {}: {}", i, print_term(&thy.axioms[i])),
                    json!({
                        "schema": 1,
                        "command": "check-model",
                        "verdict": "invalid",
                        "failing_axiom": i,
                    }),
                )),
            }
        }
        Cmd::Countermodel {
            theory,
            formula,
            flavor,
            max_points,
            max_stalk,
        } => {
            let thy = load_theory(theory)?;
            let flavor = parse_flavor(flavor)?;
            let sigma = parse_term(formula, &thy.signature, &Context::empty())?;
            let bounds = SearchBounds {
                max_points: bounded_points(*max_points, 2)?,
                max_stalk: *max_stalk,
            };
            match search_countermodel(&thy, &sigma, flavor, bounds)? {
                Some(m) => {
                    let witness = tlw_core::semantics::format_interpretation(&m);
                    Ok(Report::new(
                        true,
                        format!("countermodel found:\n{}", witness),
                        json!({
                            "schema": 1,
                            "command": "countermodel",
                            "verdict": "found",
                            "formula": print_term(&sigma),
                            "witness": witness,
                        }),
                    ))
                }
                None => Ok(Report::new(
                    false,
                    "no countermodel within bounds",
                    json!({
                        "schema": 1,
                        "command": "countermodel",
                        "verdict": "none",
                        "formula": print_term(&sigma),
                    }),
                )),
            }
        }
        Cmd::Define {
            model,
            theory,
            var,
            term,
            depth,
        } => {
            let thy = load_theory(theory)?;
            let m = load_model(model, &thy)?;
            let (name, ty_src) = var
                .split_once(':')
                .ok_or_else(|| CliError("--var takes `name:Type`".into()))?;
            let y = Var::new(name.trim(), parse_type(ty_src.trim())?);
            let ctx = Context::new(vec![y.clone()]).map_err(CliError::from)?;
            let t = parse_term(term, &thy.signature, &ctx)?;
            let z_ty = typecheck(&t, &ctx, &thy.signature)?;
            let f = m.interpret_term(&t, &ctx)?;
            match find_defining_formula(&m, &f, &y.ty, &z_ty, *depth)? {
                Some(phi) => Ok(Report::new(
                    true,
                    format!("defining formula: {}", print_term(&phi)),
                    json!({
                        "schema": 1,
                        "command": "define",
                        "verdict": "found",
                        "formula": print_term(&phi),
                    }),
                )),
                None => Ok(Report::new(
                    false,
                    "no defining formula within depth",
                    json!({
                        "schema": 1,
                        "command": "define",
                        "verdict": "none",
                    }),
                )),
            }
        }
        Cmd::FuzzSoundness {
            count,
            seed,
            mode,
            depth,
            models,
            max_points,
            max_stalk,
            flavor,
        } => {
            let mode = Mode::parse(mode).ok_or_else(|| CliError(format!("unknown mode `{}`", mode)))?;
            let flavor = match flavor {
                Some(f) => parse_flavor(f)?,
                None => match mode {
                    Mode::Lambda => Flavor::OmegaIntuitionistic,
                    _ => Flavor::ClassicalC,
                },
            };
            let thy = default_fuzz_theory(mode);
            let max_points = bounded_points(*max_points, 2)?;
            let spaces = spaces_up_to_homeo(max_points);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let (mut derivations, mut checks, mut satisfied) = (0usize, 0usize, 0usize);
            for i in 0..*count {
                let tree = random_derivation(seed.wrapping_add(i as u64), 1 + (i % depth), &thy);
                let seq = match check_proof(&tree, &thy) {
                    Verdict::Valid(seq) => seq,
                    Verdict::Invalid { error, .. } => {
                        return Err(CliError(format!("generator produced an invalid proof: {}", error)))
                    }
                };
                derivations += 1;
                for _ in 0..*models {
                    let base = &spaces[rng.gen_range(0..spaces.len())];
                    let Some(m) = random_interpretation(&mut rng, &thy, base, *max_stalk, flavor) else {
                        continue;
                    };
                    checks += 1;
                    if m.sequent_holds(&seq)? {
                        satisfied += 1;
                    }
                }
            }
            let ok = satisfied == checks;
            Ok(Report::new(
                ok,
                format!(
                    "{} derivations, {}/{} sequent evaluations satisfied",
                    derivations, satisfied, checks
                ),
                json!({
                    "schema": 1,
                    "command": "fuzz-soundness",
                    "verdict": if ok { "sound" } else { "violated" },
                    "derivations": derivations,
                    "checks": checks,
                    "satisfied": satisfied,
                }),
            ))
        }
        Cmd::Space { cmd } => match cmd {
            SpaceCmd::Check { space } => {
                let s = parse_space(&read(space)?)?;
                Ok(Report::new(
                    true,
                    format!("valid space: {} points, {} opens", s.len(), s.opens().len()),
                    json!({
                        "schema": 1,
                        "command": "space check",
                        "verdict": "valid",
                        "points": s.len(),
                        "opens": s.opens().len(),
                    }),
                ))
            }
        },
        Cmd::Sheaf { cmd } => {
            let (path, name) = match cmd {
                SheafCmd::Check { sheaf } => (sheaf, "sheaf check"),
                SheafCmd::Sections { sheaf } => (sheaf, "sheaf sections"),
                SheafCmd::Decidable { sheaf } => (sheaf, "sheaf decidable"),
                SheafCmd::Etale { sheaf } => (sheaf, "sheaf etale"),
            };
            let (f, _names) = load_sheaf(path)?;
            match cmd {
                SheafCmd::Check { .. } => Ok(Report::new(
                    true,
                    format!("valid sheaf:\n{}", format_sheaf(&f)),
                    json!({
                        "schema": 1,
                        "command": name,
                        "verdict": "valid",
                        "points": f.base().len(),
                        "stalks": f.sizes(),
                    }),
                )),
                SheafCmd::Sections { .. } => {
                    let secs = f.sections(f.base().full());
                    let listed: Vec<Vec<usize>> = secs
                        .iter()
                        .map(|s| s.iter().map(|o| o.unwrap()).collect())
                        .collect();
                    Ok(Report::new(
                        true,
                        format!("{} global sections: {:?}", listed.len(), listed),
                        json!({
                            "schema": 1,
                            "command": name,
                            "verdict": "valid",
                            "global_sections": listed,
                        }),
                    ))
                }
                SheafCmd::Decidable { .. } => {
                    let d = is_decidable(&f);
                    Ok(Report::new(
                        d,
                        format!("sheaf is {}", if d { "decidable" } else { "not decidable" }),
                        json!({
                            "schema": 1,
                            "command": name,
                            "verdict": if d { "decidable" } else { "not-decidable" },
                        }),
                    ))
                }
                SheafCmd::Etale { .. } => {
                    let e = to_etale(&f);
                    is_local_homeo(&e)?;
                    let back = from_etale(&e)?;
                    let iso = find_iso(&f, &back).is_some();
                    Ok(Report::new(
                        iso,
                        format!(
                            "étale space: {} total points; round trip {}",
                            e.total.len(),
                            if iso { "isomorphic" } else { "NOT isomorphic" }
                        ),
                        json!({
                            "schema": 1,
                            "command": name,
                            "verdict": if iso { "valid" } else { "invalid" },
                            "total_points": e.total.len(),
                        }),
                    ))
                }
            }
        }
        Cmd::Henkin { cmd } => match cmd {
            HenkinCmd::CheckClosure {
                model,
                theory,
                witness,
            } => {
                let thy = load_theory(theory)?;
                let pt = load_point(model, &thy)?;
                let mut terms = Vec::new();
                for ax in &thy.axioms {
                    subterms(ax, &mut terms);
                }
                for src in witness {
                    terms.push(parse_term(src, &thy.signature, &Context::empty())?);
                }
                terms.sort();
                terms.dedup();
                match check_closure(&pt.model, &terms)? {
                    ClosureVerdict::Valid => Ok(Report::new(
                        true,
                        format!("closed under {} witness terms", terms.len()),
                        json!({
                            "schema": 1,
                            "command": "henkin check-closure",
                            "verdict": "valid",
                            "witnesses": terms.len(),
                        }),
                    )),
                    ClosureVerdict::Invalid { term } => Ok(Report::new(
                        false,
                        format!("closure fails at term {}", print_term(&term)),
                        json!({
                            "schema": 1,
                            "command": "henkin check-closure",
                            "verdict": "invalid",
                            "term": print_term(&term),
                        }),
                    )),
                }
            }
            HenkinCmd::Open {
                model,
                formula,
                labels,
                theory,
            } => {
                let thy = load_theory(theory)?;
                let pt = load_point(model, &thy)?;
                let phi = parse_term(formula, &thy.signature, &Context::empty())?;
                let inside = in_basic_open(&pt, &phi, labels)?;
                Ok(Report::new(
                    inside,
                    format!(
                        "point is {} the basic open of {} at {:?}",
                        if inside { "in" } else { "not in" },
                        print_term(&phi),
                        labels
                    ),
                    json!({
                        "schema": 1,
                        "command": "henkin open",
                        "verdict": if inside { "inside" } else { "outside" },
                        "formula": print_term(&phi),
                        "labels": labels,
                    }),
                ))
            }
            HenkinCmd::Fiber { theory, ty, points } => {
                let thy = load_theory(theory)?;
                let z = parse_type(ty)?;
                let mut pts = Vec::new();
                for p in points {
                    pts.push(load_point(p, &thy)?);
                }
                let fiber = phi_fiber(&pts, &z)?;
                is_local_homeo(&fiber.etale)?;
                let sections: BTreeMap<String, usize> = fiber
                    .sections
                    .iter()
                    .map(|(n, mask)| (n.to_string(), mask.count_ones() as usize))
                    .collect();
                Ok(Report::new(
                    true,
                    format!(
                        "fiber of {} over {} points: {} elements, sections {:?}; projection étale",
                        z,
                        pts.len(),
                        fiber.elems.len(),
                        sections
                    ),
                    json!({
                        "schema": 1,
                        "command": "henkin fiber",
                        "verdict": "valid",
                        "points": pts.len(),
                        "elements": fiber.elems.len(),
                        "sections": sections,
                    }),
                ))
            }
        },
        Cmd::Corpus { dir } => run_corpus(dir),
    }
}

/// A corpus entry is `NAME.cmd` (one argument per line; paths relative to
/// the corpus directory) next to `NAME.json`, the expected report.
fn run_corpus(dir: &Path) -> Run {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError(format!("{}: {}", dir.display(), e)))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cmd"))
        .collect();
    entries.sort();
    let mut failures: Vec<String> = Vec::new();
    for cmd_path in &entries {
        let name = cmd_path.file_stem().unwrap().to_string_lossy().to_string();
        let golden_path = cmd_path.with_extension("json");
        let golden = read(&golden_path)?;
        let mut args = vec!["tlw".to_string()];
        for line in read(cmd_path)?.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            // Arguments naming files resolve against the corpus directory.
            let resolved = dir.join(line);
            if resolved.exists() {
                args.push(resolved.to_string_lossy().to_string());
            } else {
                args.push(line.to_string());
            }
        }
        let sub = match Cli::try_parse_from(&args) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("{}: bad command ({})", name, e));
                continue;
            }
        };
        let got = match run(&sub) {
            Ok(report) => serde_json::to_string_pretty(&report.json).unwrap() + "\n",
            Err(CliError(msg)) => {
                failures.push(format!("{}: error ({})", name, msg));
                continue;
            }
        };
        if got != golden {
            failures.push(name);
        }
    }
    let ok = failures.is_empty();
    Ok(Report::new(
        ok,
        if ok {
            format!("{} corpus entries match", entries.len())
        } else {
            format!("stale goldens: {}", failures.join(", "))
        },
        json!({
            "schema": 1,
            "command": "corpus",
            "verdict": if ok { "pass" } else { "fail" },
            "entries": entries.len(),
            "failures": failures,
        }),
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).unwrap());
            } else {
                println!("{}", report.human);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError(msg)) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "schema": 1,
                        "verdict": "error",
                        "error": msg,
                    }))
                    .unwrap()
                );
            } else {
                eprintln!("error: {}", msg);
            }
            ExitCode::from(2)
        }
    }
}
