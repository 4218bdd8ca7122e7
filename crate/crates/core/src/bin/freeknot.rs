use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use freeknot::atoms::{atom_surface, canonical_atom, enumerate_atoms, orientability, Atom, DEFAULT_ATOM_CAP};
use freeknot::cycles::{generating_family, FamilyKind};
use freeknot::moves::{apply_move, enumerate_moves_with, EnumOptions, Move};
use freeknot::parity::{rule_by_name, verify_parity_axioms, ParityError, ParityRule, RULE_NAMES};
use freeknot::projection::{filtration, map_f, repair_sequence};
use freeknot::search::{bfs_equivalence, random_walk, reachable_count};
use freeknot::sequence::DiagramSequence;
use freeknot::suites::{run_suite, SuiteOptions, SUITE_NAMES};
use freeknot::{intersection_graph, parse_code_auto, serialize_code, unicursal_components, CodeKind, FramedGraph, LinkCode};

#[derive(Parser)]
#[command(name = "freeknot", version, about = "Parity, projection and atom tools for free and virtual links")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone)]
struct RuleArg {
    /// gaussian, component, hybrid-experimental or zero.
    #[arg(long, visible_alias = "parity", default_value = "gaussian")]
    rule: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a code and print it back with a summary.
    Parse { code: String },
    /// Canonical form under rotation, reflection and relabelling.
    Canon { code: String },
    /// Unicursal components of the frame.
    Components { code: String },
    /// Intersection graph of the unicursal components.
    Igraph { code: String },
    /// Parity of every crossing.
    Parity {
        code: String,
        #[command(flatten)]
        rule: RuleArg,
    },
    /// Run a batch verification suite.
    Verify {
        suite: String,
        #[arg(long)]
        rule: Option<String>,
        /// Knot corpus with up to this many chords.
        #[arg(long)]
        max_chords: Option<usize>,
        #[arg(long)]
        max_crossings: Option<usize>,
        /// Circle counts of the corpus, e.g. `1,2,3`; `all` for every frame.
        #[arg(long)]
        circles: Option<String>,
        /// Check this one code instead of a corpus.
        #[arg(long)]
        code: Option<String>,
        /// Inclusive seed range `a..b` or a single seed.
        #[arg(long, visible_alias = "seed")]
        seeds: Option<String>,
        #[arg(long)]
        length: Option<usize>,
        /// Random cycles per code for the span suite.
        #[arg(long)]
        targets: Option<usize>,
    },
    /// Delete the odd crossings once.
    Fmap {
        code: String,
        #[command(flatten)]
        rule: RuleArg,
    },
    /// Iterate the odd-crossing deletion to its fixed core.
    Filtration {
        code: String,
        #[command(flatten)]
        rule: RuleArg,
    },
    /// Surfaces of the atoms over the frame of a code.
    Atoms {
        code: String,
        /// All 2^n black-corner choices.
        #[arg(long)]
        enumerate: bool,
        /// The atom fixed by the crossing signs (virtual codes).
        #[arg(long)]
        canonical: bool,
    },
    /// Whether the atoms of the frame are orientable.
    Orientable { code: String },
    /// Bounded breadth-first search for a move sequence.
    Search {
        from: String,
        to: String,
        #[arg(long, default_value_t = 4)]
        max_crossings: usize,
        #[arg(long, default_value_t = 6)]
        max_depth: usize,
    },
    /// Replace every diagram of a sequence file by its core.
    Repair {
        file: std::path::PathBuf,
        #[command(flatten)]
        rule: RuleArg,
    },
    /// Seeded random move sequence.
    Walk {
        code: String,
        #[arg(long, default_value_t = 10)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_crossings: Option<usize>,
    },
    /// Applicable moves of a code.
    Moves {
        code: String,
        /// Include R1 and R2 additions.
        #[arg(long)]
        additions: bool,
    },
    /// Apply one move.
    Apply {
        code: String,
        #[arg(allow_hyphen_values = true)]
        r#move: String,
    },
    /// Check the parity axioms at one move.
    Axioms {
        code: String,
        #[arg(allow_hyphen_values = true)]
        r#move: String,
        #[command(flatten)]
        rule: RuleArg,
    },
    /// Generating family of the cycle space.
    Family { code: String },
}

/// Error with its exit status: 1 syntax, 2 precondition, 3 witness.
struct Failure(u8, String);

type Outcome = Result<(String, u8), Failure>;

fn syntax(e: impl std::fmt::Display) -> Failure {
    Failure(1, e.to_string())
}

fn precondition(e: impl std::fmt::Display) -> Failure {
    Failure(2, e.to_string())
}

fn code(text: &str) -> Result<LinkCode, Failure> {
    parse_code_auto(text).map_err(syntax)
}

fn rule(name: &str) -> Result<&'static dyn ParityRule, Failure> {
    rule_by_name(name).ok_or_else(|| {
        Failure(
            1,
            format!("unknown rule `{name}`; expected one of {}", RULE_NAMES.join(", ")),
        )
    })
}

fn mv(text: &str) -> Result<Move, Failure> {
    text.parse().map_err(syntax)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn kind_name(k: CodeKind) -> &'static str {
    match k {
        CodeKind::Free => "free",
        CodeKind::Virtual => "virtual",
    }
}

fn parity_error(e: ParityError) -> Failure {
    precondition(e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.cmd, cli.json) {
        Ok((out, status)) => {
            print!("{out}");
            if !out.is_empty() && !out.ends_with('\n') {
                println!();
            }
            ExitCode::from(status)
        }
        Err(Failure(status, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(status)
        }
    }
}

fn run(cmd: Cmd, json: bool) -> Outcome {
    match cmd {
        Cmd::Parse { code: text } => {
            let c = code(&text)?;
            Ok((
                if json {
                    to_json(&json!({
                        "code": serialize_code(&c),
                        "kind": kind_name(c.kind()),
                        "circles": c.num_circles(),
                        "crossings": c.crossing_count(),
                        "labels": c.labels(),
                    }))
                } else {
                    format!(
                        "{}\nkind: {}, circles: {}, crossings: {}",
                        serialize_code(&c),
                        kind_name(c.kind()),
                        c.num_circles(),
                        c.crossing_count()
                    )
                },
                0,
            ))
        }
        Cmd::Canon { code: text } => {
            let c = code(&text)?.canonical_form();
            Ok((
                if json {
                    to_json(&json!({ "canonical": serialize_code(&c) }))
                } else {
                    serialize_code(&c)
                },
                0,
            ))
        }
        Cmd::Components { code: text } => {
            let c = code(&text)?;
            let g = FramedGraph::from_code(&c);
            let parts = unicursal_components(&g);
            let edges: Vec<Vec<usize>> = (0..parts.count).map(|k| parts.edges_of(&g, k)).collect();
            let mixed: Vec<u32> = (0..g.vertex_count())
                .filter(|&v| parts.is_mixed(v))
                .map(|v| g.label(v))
                .collect();
            Ok((
                if json {
                    to_json(&json!({ "count": parts.count, "edges": edges, "mixed": mixed }))
                } else {
                    let mut s = format!("components: {}\n", parts.count);
                    for (k, es) in edges.iter().enumerate() {
                        let list: Vec<String> = es.iter().map(|e| format!("e{e}")).collect();
                        let _ = writeln!(s, "{k}: {}", if list.is_empty() { "free loop".into() } else { list.join(" ") });
                    }
                    let _ = write!(s, "mixed crossings: {mixed:?}");
                    s
                },
                0,
            ))
        }
        Cmd::Igraph { code: text } => {
            let c = code(&text)?;
            let g = FramedGraph::from_code(&c);
            let ig = intersection_graph(&g, &unicursal_components(&g));
            let edges: Vec<[usize; 2]> = ig.edges.iter().map(|&(a, b)| [a, b]).collect();
            Ok((
                if json {
                    to_json(&json!({ "nodes": ig.nodes, "edges": edges, "connected": ig.is_connected() }))
                } else {
                    let list: Vec<String> = edges.iter().map(|[a, b]| format!("{a}-{b}")).collect();
                    format!("nodes: {}\nedges: {}\nconnected: {}", ig.nodes, list.join(" "), ig.is_connected())
                },
                0,
            ))
        }
        Cmd::Parity { code: text, rule: r } => {
            let c = code(&text)?;
            let p = rule(&r.rule)?.assign(&c).map_err(parity_error)?;
            Ok((
                if json {
                    let m: serde_json::Map<String, serde_json::Value> = p
                        .0
                        .iter()
                        .map(|(l, v)| (l.to_string(), json!(if *v == 1 { "odd" } else { "even" })))
                        .collect();
                    to_json(&m)
                } else {
                    p.to_string()
                },
                0,
            ))
        }
        Cmd::Verify {
            suite,
            rule: rule_name,
            max_chords,
            max_crossings,
            circles,
            code: one,
            seeds,
            length,
            targets,
        } => verify(
            &suite,
            rule_name.as_deref(),
            max_chords,
            max_crossings,
            circles.as_deref(),
            one.as_deref(),
            seeds.as_deref(),
            length,
            targets,
            json,
        ),
        Cmd::Fmap { code: text, rule: r } => {
            let c = code(&text)?;
            let p = rule(&r.rule)?.assign(&c).map_err(parity_error)?;
            let image = map_f(&c, &p).map_err(precondition)?;
            Ok((
                if json {
                    to_json(&json!({ "image": serialize_code(&image), "deleted": p.odd_labels() }))
                } else {
                    serialize_code(&image)
                },
                0,
            ))
        }
        Cmd::Filtration { code: text, rule: r } => {
            let c = code(&text)?;
            let f = filtration(&c, rule(&r.rule)?).map_err(precondition)?;
            Ok((
                if json {
                    to_json(&json!({ "level": f.level, "core": serialize_code(&f.core) }))
                } else {
                    let trace: Vec<String> = f.trace.iter().map(serialize_code).collect();
                    format!("level: {}\ncore: {}\ntrace: {}", f.level, serialize_code(&f.core), trace.join(" -> "))
                },
                0,
            ))
        }
        Cmd::Atoms {
            code: text,
            enumerate,
            canonical,
        } => atoms(&code(&text)?, enumerate, canonical, json),
        Cmd::Orientable { code: text } => {
            let c = code(&text)?;
            let g = FramedGraph::from_code(&c);
            let o = orientability(&g);
            let witness = o.witness.as_ref().map(|w| w.to_text(&g));
            Ok((
                if json {
                    to_json(&json!({ "orientable": o.orientable, "witness": witness }))
                } else {
                    let mut s = format!("orientable: {}", o.orientable);
                    if let Some(w) = witness {
                        let _ = write!(s, "\nwitness: {w}");
                    }
                    s
                },
                0,
            ))
        }
        Cmd::Search {
            from,
            to,
            max_crossings,
            max_depth,
        } => {
            let (a, b) = (code(&from)?, code(&to)?);
            if a.crossing_count().max(b.crossing_count()) > max_crossings {
                return Err(precondition("both codes must fit under --max-crossings"));
            }
            Ok(match bfs_equivalence(&a, &b, max_crossings, max_depth) {
                Some(seq) => {
                    if json {
                        let moves: Vec<String> =
                            seq.moves.iter().enumerate().map(|(i, m)| m.to_text(&seq.codes[i])).collect();
                        (to_json(&json!({ "found": true, "moves": moves, "sequence": seq.to_string() })), 0)
                    } else {
                        (seq.to_string(), 0)
                    }
                }
                None => {
                    let explored = reachable_count(&a, max_crossings, max_depth);
                    if json {
                        (to_json(&json!({ "found": false, "explored": explored })), 0)
                    } else {
                        (format!("NONE-WITHIN-BOUNDS ({explored} diagrams explored)"), 0)
                    }
                }
            })
        }
        Cmd::Repair { file, rule: r } => {
            let text = std::fs::read_to_string(&file).map_err(|e| Failure(1, format!("{}: {e}", file.display())))?;
            let seq = DiagramSequence::parse(&text).map_err(syntax)?;
            repair(&seq, rule(&r.rule)?, json)
        }
        Cmd::Walk {
            code: text,
            length,
            seed,
            max_crossings,
        } => {
            let seq = random_walk(&code(&text)?, length, seed, max_crossings);
            Ok((if json { to_json(&json!({ "sequence": seq.to_string() })) } else { seq.to_string() }, 0))
        }
        Cmd::Moves { code: text, additions } => {
            let c = code(&text)?;
            let opts = EnumOptions {
                additions,
                max_crossings: None,
            };
            let rows: Vec<(String, String)> = enumerate_moves_with(&c, &opts)
                .into_iter()
                .map(|(m, r)| (m.to_text(&c), serialize_code(&r)))
                .collect();
            Ok((
                if json {
                    let v: Vec<_> = rows.iter().map(|(m, r)| json!({ "move": m, "result": r })).collect();
                    to_json(&v)
                } else {
                    rows.iter().map(|(m, r)| format!("{m}\t{r}\n")).collect()
                },
                0,
            ))
        }
        Cmd::Apply { code: text, r#move } => {
            let c = code(&text)?;
            let m = mv(&r#move)?;
            let out = apply_move(&c, &m).map_err(precondition)?;
            Ok((if json { to_json(&json!({ "result": serialize_code(&out) })) } else { serialize_code(&out) }, 0))
        }
        Cmd::Axioms {
            code: text,
            r#move,
            rule: r,
        } => {
            let c = code(&text)?;
            let m = mv(&r#move)?;
            let rep = verify_parity_axioms(rule(&r.rule)?, &c, &m).map_err(parity_error)?;
            let status = if rep.passed() { 0 } else { 3 };
            Ok((
                if json {
                    to_json(&rep)
                } else {
                    rep.clauses
                        .iter()
                        .map(|c| {
                            format!(
                                "{} {:?}: {:?} -> {:?} {}\n",
                                c.clause,
                                c.site,
                                c.before,
                                c.after,
                                if c.pass { "pass" } else { "FAIL" }
                            )
                        })
                        .collect()
                },
                status,
            ))
        }
        Cmd::Family { code: text } => {
            let c = code(&text)?;
            let g = FramedGraph::from_code(&c);
            let rows: Vec<(String, String)> = generating_family(&g)
                .into_iter()
                .map(|m| {
                    let kind = match m.kind {
                        FamilyKind::Half { vertex, which } => format!("half v{} #{which}", g.label(vertex)),
                        FamilyKind::Bigon { components, .. } => format!("bigon {}-{}", components.0, components.1),
                        FamilyKind::IntersectionCycle { components } => format!("cycle {components:?}"),
                        FamilyKind::ComponentLoop { component } => format!("component {component}"),
                    };
                    (kind, m.walk.to_text(&g))
                })
                .collect();
            Ok((
                if json {
                    let v: Vec<_> = rows.iter().map(|(k, w)| json!({ "kind": k, "walk": w })).collect();
                    to_json(&v)
                } else {
                    rows.iter().map(|(k, w)| format!("{k}: {w}\n")).collect()
                },
                0,
            ))
        }
    }
}

fn parse_seeds(s: &str) -> Result<std::ops::RangeInclusive<u64>, Failure> {
    let bad = || Failure(1, format!("bad seed range `{s}`; expected `a..b` or a number"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            Ok(a..=b)
        }
        None => {
            let a: u64 = s.trim().parse().map_err(|_| bad())?;
            Ok(a..=a)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn verify(
    suite: &str,
    rule_name: Option<&str>,
    max_chords: Option<usize>,
    max_crossings: Option<usize>,
    circles: Option<&str>,
    one: Option<&str>,
    seeds: Option<&str>,
    length: Option<usize>,
    targets: Option<usize>,
    json: bool,
) -> Outcome {
    if !SUITE_NAMES.contains(&suite) {
        return Err(Failure(1, format!("unknown suite `{suite}`; expected one of {}", SUITE_NAMES.join(", "))));
    }
    let r = rule(rule_name.unwrap_or(match suite {
        "axioms" | "agreement" | "f-welldefined" | "filtration-invariance" | "repair" => "gaussian",
        _ => "zero",
    }))?;
    let (default_max, default_circles) = match (suite, r.name()) {
        ("repair", _) => (8, vec![1]),
        ("orientability-equivalence", _) => (5, vec![]),
        ("atoms", _) => (4, vec![]),
        ("span", _) => (4, vec![1, 2, 3]),
        (_, "component") => (4, vec![2]),
        (_, "hybrid-experimental" | "zero") => (4, vec![1, 2]),
        _ => (5, vec![1]),
    };
    let mut opts = SuiteOptions {
        rule: r,
        max_crossings: max_crossings.unwrap_or(default_max),
        circles: default_circles,
        ..SuiteOptions::default()
    };
    if let Some(n) = max_chords {
        opts.max_crossings = n;
        opts.circles = vec![1];
    }
    if circles == Some("all") {
        opts.circles = Vec::new();
    } else if let Some(cs) = circles {
        opts.circles = cs
            .split(',')
            .map(|x| x.trim().parse::<usize>().ok().filter(|&k| k > 0))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Failure(1, format!("bad circle list `{cs}`")))?;
    }
    if let Some(text) = one {
        opts.code = Some(code(text)?);
    }
    if let Some(s) = seeds {
        opts.seeds = parse_seeds(s)?;
    }
    if let Some(l) = length {
        opts.length = l;
    }
    if let Some(t) = targets {
        opts.targets = t;
    }
    let rep = run_suite(suite, &opts).expect("suite name checked");
    let status = if rep.passed() { 0 } else { 3 };
    if json {
        return Ok((to_json(&rep), status));
    }
    let mut s = if rep.passed() {
        format!("pass, {} cases", rep.cases)
    } else {
        format!("FAIL, {} counterexamples in {} cases", rep.failures.len(), rep.cases)
    };
    if rep.skipped > 0 {
        let _ = write!(s, " ({} skipped)", rep.skipped);
    }
    for n in &rep.notes {
        let _ = write!(s, "\nnote: {n}");
    }
    for f in &rep.failures {
        let _ = write!(s, "\n{}", f.code);
        if let Some(m) = &f.mv {
            let _ = write!(s, " {m}");
        }
        let _ = write!(s, ": {}\n  rerun: {}", f.detail, f.rerun);
    }
    Ok((s, status))
}

#[derive(Serialize)]
struct AtomJson {
    black_choice: Vec<u8>,
    chi: i64,
    orientable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    crosscaps: Option<i64>,
    faces: FacesJson,
}

#[derive(Serialize)]
struct FacesJson {
    black: usize,
    white: usize,
    degrees: Vec<usize>,
}

fn atoms(c: &LinkCode, enumerate: bool, canonical: bool, json: bool) -> Outcome {
    let frame = FramedGraph::from_code(c);
    let list: Vec<Atom> = if enumerate {
        enumerate_atoms(&frame, DEFAULT_ATOM_CAP).map_err(precondition)?
    } else if canonical || c.kind() == CodeKind::Virtual {
        vec![canonical_atom(c).map_err(precondition)?]
    } else {
        let n = frame.vertex_count();
        vec![Atom::new(frame, vec![0; n])]
    };
    let rows: Vec<AtomJson> = list
        .iter()
        .map(|a| {
            let s = atom_surface(a);
            AtomJson {
                black_choice: a.black_choice.clone(),
                chi: s.euler_characteristic,
                orientable: s.orientable,
                genus: s.genus,
                crosscaps: s.crosscap_number,
                faces: FacesJson {
                    black: s.black_faces,
                    white: s.white_faces,
                    degrees: s.face_degrees,
                },
            }
        })
        .collect();
    if json {
        return Ok((to_json(&rows), 0));
    }
    let mut s = String::new();
    for r in &rows {
        let choice: Vec<String> = r.black_choice.iter().map(u8::to_string).collect();
        let surface = match (r.genus, r.crosscaps) {
            (Some(g), _) => format!("genus {g}"),
            (_, Some(k)) => format!("crosscaps {k}"),
            _ => String::new(),
        };
        let _ = writeln!(
            s,
            "black_choice [{}]: chi {}, orientable {}, {surface}, faces {} black {} white, degrees {:?}",
            choice.join(" "),
            r.chi,
            r.orientable,
            r.faces.black,
            r.faces.white,
            r.faces.degrees
        );
    }
    Ok((s, 0))
}

#[derive(Serialize)]
struct RepairJson<'a> {
    input: String,
    output: String,
    connectified: bool,
    iterations: usize,
    all_orientable: bool,
    experimental: bool,
    steps: &'a [freeknot::projection::StepVerdict],
    violations: &'a [freeknot::projection::Violation],
}

fn repair(seq: &DiagramSequence, r: &dyn ParityRule, json: bool) -> Outcome {
    let rep = repair_sequence(seq, r).map_err(precondition)?;
    let status = if rep.ok() { 0 } else { 3 };
    if json {
        let j = RepairJson {
            input: rep.input.to_string(),
            output: rep.output.to_string(),
            connectified: rep.connectified,
            iterations: rep.iterations,
            all_orientable: rep.all_orientable,
            experimental: rep.experimental,
            steps: &rep.steps,
            violations: &rep.violations,
        };
        return Ok((to_json(&j), status));
    }
    let mut s = rep.output.to_string();
    let _ = write!(
        s,
        "# iterations: {}, all orientable: {}",
        rep.iterations, rep.all_orientable
    );
    let label = if rep.experimental { "WARNING" } else { "THEOREM_VIOLATION_WITNESS" };
    for v in &rep.violations {
        let _ = write!(s, "\n# {label} at step {}: {} -> {} ({})", v.index, v.before, v.after, v.expected);
    }
    Ok((s, status))
}
