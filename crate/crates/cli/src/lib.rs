//! Batch front end for the κ engines: reads edge-list files, runs one
//! computation, and prints text or versioned JSON.

use std::fmt::Write as _;
use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use kappa_core::collapse::{build_collapse_graph, verify_collapse_structure};
use kappa_core::corpus::{corpus_digest, erdos_renyi, small_corpus, ErdosRenyiParams};
use kappa_core::orientations::{
    enumerate_acyclic, kappa_partition_bruteforce, nu_path, unique_source_orientations, PathSpec,
    DEFAULT_BRUTE_FORCE_CAP,
};
use kappa_core::tutte::TutteEngine;
use kappa_core::verify::{verify_graph, GraphVerification, VerifyOptions};
use kappa_core::{Error, KappaEngine, Multigraph};
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;
pub const CAP_ENV: &str = "KAPPA_BRUTE_CAP";

pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const RESOURCE: i32 = 3;
    pub const INTERNAL: i32 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusName {
    /// Every connected simple graph on at most five vertices.
    Small,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// κ(Y) by deletion/contraction.
    Kappa {
        input: String,
        /// Attach the unfolded recursion tree as JSON.
        #[arg(long)]
        trace: bool,
    },
    /// |Acyc(Y)| by brute force and as T(Y; 2, 0).
    Alpha { input: String },
    /// The full Tutte polynomial.
    Tutte { input: String },
    /// T(Y; x, y) at an integer point.
    Eval {
        input: String,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true, required = true)]
        point: Vec<i64>,
    },
    /// κ-classes with their representatives.
    Classes { input: String },
    /// Acyclic orientations whose unique source is the given vertex.
    Transversal {
        input: String,
        #[arg(long)]
        vertex: usize,
    },
    /// Collapse graph of a cycle-edge, as DOT plus a structure report.
    Collapse {
        input: String,
        #[arg(long)]
        edge: usize,
    },
    /// ν along a path for every acyclic orientation, or per class.
    Nu {
        input: String,
        /// `[0,1,2,0]` or `{"vertices":[0,1,2],"closed":true,"edges":[..]}`.
        #[arg(long)]
        path: String,
        #[arg(long)]
        per_class: bool,
    },
    /// Cross-engine differential suite.
    Verify {
        input: Option<String>,
        #[arg(long, value_enum)]
        corpus: Option<CorpusName>,
        /// Append N seeded Erdős–Rényi graphs.
        #[arg(long, value_name = "N")]
        random_corpus: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Kappa { .. } => "kappa",
            Command::Alpha { .. } => "alpha",
            Command::Tutte { .. } => "tutte",
            Command::Eval { .. } => "eval",
            Command::Classes { .. } => "classes",
            Command::Transversal { .. } => "transversal",
            Command::Collapse { .. } => "collapse",
            Command::Nu { .. } => "nu",
            Command::Verify { .. } => "verify",
        }
    }

    fn input(&self) -> Option<&str> {
        match self {
            Command::Kappa { input, .. }
            | Command::Alpha { input }
            | Command::Tutte { input }
            | Command::Eval { input, .. }
            | Command::Classes { input }
            | Command::Transversal { input, .. }
            | Command::Collapse { input, .. }
            | Command::Nu { input, .. } => Some(input),
            Command::Verify { input, .. } => input.as_deref(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "kappa",
    version,
    about = "Source-to-sink equivalence classes of acyclic orientations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Edge cap for brute-force enumeration (default 20, or $KAPPA_BRUTE_CAP).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub brute_force_cap: usize,
    pub seed: u64,
}

impl RunConfig {
    /// Resolves the cap: flag, then environment, then the default.
    pub fn from_cli(cli: Cli, env_cap: Option<&str>) -> Result<Self, Error> {
        let brute_force_cap = match (cli.cap, env_cap) {
            (Some(cap), _) => cap,
            (None, Some(text)) => text.trim().parse().map_err(|_| {
                Error::InputDomain(format!("{CAP_ENV}=`{text}` is not an edge count"))
            })?,
            (None, None) => DEFAULT_BRUTE_FORCE_CAP,
        };
        if brute_force_cap == 0 {
            return Err(Error::InputDomain(
                "the brute-force cap must be at least 1".into(),
            ));
        }
        Ok(RunConfig {
            command: cli.command,
            format: cli.format,
            brute_force_cap,
            seed: cli.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: exit::OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn failed(code: i32, stdout: String, stderr: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr,
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. }
        | Error::InputDomain(_)
        | Error::Precondition(_)
        | Error::ClickSequence { .. } => exit::INPUT,
        Error::ResourceLimit { .. } => exit::RESOURCE,
        Error::Overflow(_) | Error::Internal(_) => exit::INTERNAL,
    }
}

/// Runs one command. `stdin` is read only when the input path is `-`.
pub fn run(config: &RunConfig, stdin: &mut dyn Read) -> Outcome {
    match dispatch(config, stdin) {
        Ok(outcome) => outcome,
        Err(err) => Outcome::failed(exit_code(&err), String::new(), format!("error: {err}\n")),
    }
}

fn read_graph(path: &str, stdin: &mut dyn Read) -> Result<Multigraph, Error> {
    let mut text = String::new();
    if path == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|e| Error::InputDomain(format!("reading standard input: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Error::InputDomain(format!("reading {path}: {e}")))?;
    }
    Multigraph::parse_edge_list(&text)
}

fn envelope(config: &RunConfig, g: &Multigraph, body: Value) -> Value {
    let mut report = json!({
        "schema": SCHEMA_VERSION,
        "command": config.command.name(),
        "input": {
            "hash": g.id().to_string(),
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
        },
    });
    if let (Value::Object(out), Value::Object(extra)) = (&mut report, body) {
        out.extend(extra);
    }
    report
}

fn render(config: &RunConfig, g: &Multigraph, text: String, body: Value) -> String {
    match config.format {
        Format::Text => text,
        Format::Json => to_json(&envelope(config, g, body)),
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn dispatch(config: &RunConfig, stdin: &mut dyn Read) -> Result<Outcome, Error> {
    let cap = config.brute_force_cap;
    if let Command::Verify {
        input,
        corpus,
        random_corpus,
    } = &config.command
    {
        return run_verify(config, input.as_deref(), *corpus, *random_corpus, stdin);
    }
    let g = read_graph(
        config
            .command
            .input()
            .expect("non-verify commands take an input"),
        stdin,
    )?;

    let out = match &config.command {
        Command::Kappa { trace, .. } => {
            let result = if *trace {
                KappaEngine::new().with_trace().kappa(&g)?
            } else {
                KappaEngine::new().kappa(&g)?
            };
            let mut text = format!("{}\n", result.value);
            if let Some(t) = &result.trace {
                text.push_str(&to_json(
                    &serde_json::to_value(t).expect("trace serializes"),
                ));
            }
            let mut body = json!({ "kappa": result.value, "cache": result.cache_stats });
            if let Some(t) = &result.trace {
                body["trace"] = serde_json::to_value(t).expect("trace serializes");
            }
            render(config, &g, text, body)
        }
        Command::Alpha { .. } => {
            let brute = enumerate_acyclic(&g, cap)?.len() as i128;
            let tutte = TutteEngine::new().eval(&g, 2, 0)?;
            let out = render(
                config,
                &g,
                format!("bruteforce {brute}\ntutte(2,0) {tutte}\n"),
                json!({ "bruteforce": brute as i64, "tutte_2_0": tutte as i64, "agree": brute == tutte }),
            );
            if brute != tutte {
                return Ok(Outcome::failed(
                    exit::INTERNAL,
                    out,
                    format!("error: brute force gives {brute} but T(2,0) = {tutte}\n"),
                ));
            }
            out
        }
        Command::Tutte { .. } => {
            let poly = TutteEngine::new().polynomial(&g)?;
            render(
                config,
                &g,
                format!("{poly}\n"),
                json!({ "polynomial": poly.to_string(), "coefficients": poly.triples() }),
            )
        }
        Command::Eval { point, .. } => {
            let (x, y) = (point[0], point[1]);
            let value = TutteEngine::new().eval(&g, x, y)?;
            render(
                config,
                &g,
                format!("{value}\n"),
                json!({ "point": [x, y], "value": value.to_string() }),
            )
        }
        Command::Classes { .. } => {
            let part = kappa_partition_bruteforce(&g.simplify().graph, cap)?;
            let mut text = format!("{} classes\n", part.len());
            let mut classes = Vec::new();
            for (i, class) in part.classes().iter().enumerate() {
                let members: Vec<String> =
                    class.iter().map(|o| format!("{:x}", o.bits())).collect();
                let _ = writeln!(text, "{i}: {} ({} members)", members.join(" "), class.len());
                classes.push(json!({
                    "representative": class[0],
                    "size": class.len(),
                    "members": members,
                }));
            }
            render(
                config,
                &g,
                text,
                json!({ "kappa": part.len(), "orientations": part.orientation_count(), "classes": classes }),
            )
        }
        Command::Transversal { vertex, .. } => {
            let simple = g.simplify().graph;
            let part = kappa_partition_bruteforce(&simple, cap)?;
            let acyc_v = unique_source_orientations(&simple, *vertex, cap)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for o in &acyc_v {
                let class = part
                    .class_of(o)
                    .expect("acyclic orientations are partitioned");
                let _ = writeln!(text, "{:x} class {class}", o.bits());
                rows.push(json!({ "orientation": o, "class": class }));
            }
            render(
                config,
                &g,
                text,
                json!({ "vertex": vertex, "count": acyc_v.len(), "kappa": part.len(), "orientations": rows }),
            )
        }
        Command::Collapse { edge, .. } => {
            let cg = build_collapse_graph(&g, *edge, cap)?;
            let report = verify_collapse_structure(&cg, &g, *edge, cap)?;
            let dot = cg.to_dot();
            let mut text = dot.clone();
            let _ = writeln!(
                text,
                "// nodes {} edges {} components {} max-degree {} kappa(Y-e) {} kappa(Y/e) {}",
                report.nodes,
                report.edges,
                report.components,
                report.max_degree,
                report.kappa_deleted,
                report.kappa_contracted
            );
            for v in &report.violations {
                let _ = writeln!(text, "// VIOLATION {}: {}", v.property, v.detail);
            }
            let ok = report.ok();
            let out = render(
                config,
                &g,
                text,
                json!({ "dot": dot, "report": report, "passed": ok }),
            );
            if !ok {
                return Ok(Outcome::failed(
                    exit::INTERNAL,
                    out,
                    "error: collapse structure violated\n".into(),
                ));
            }
            out
        }
        Command::Nu {
            path, per_class, ..
        } => {
            let simple = g.simplify().graph;
            if simple != g {
                return Err(Error::InputDomain("nu expects a simple graph".into()));
            }
            let path_spec = parse_path(&g, path)?;
            if *per_class {
                let part = kappa_partition_bruteforce(&g, cap)?;
                let mut text = String::new();
                let mut rows = Vec::new();
                for (i, class) in part.classes().iter().enumerate() {
                    let mut values = class
                        .iter()
                        .map(|o| nu_path(&g, o, &path_spec))
                        .collect::<Result<Vec<i64>, _>>()?;
                    values.sort_unstable();
                    values.dedup();
                    let shown: Vec<String> = values.iter().map(i64::to_string).collect();
                    let _ = writeln!(text, "class {i} {:x}: {}", class[0].bits(), shown.join(" "));
                    rows.push(json!({ "representative": class[0], "values": values }));
                }
                render(config, &g, text, json!({ "path": path_spec, "classes": rows }))
            } else {
                let mut text = String::new();
                let mut rows = Vec::new();
                for o in enumerate_acyclic(&g, cap)? {
                    let nu = nu_path(&g, &o, &path_spec)?;
                    let _ = writeln!(text, "{:x} {nu}", o.bits());
                    rows.push(json!({ "orientation": o, "nu": nu }));
                }
                render(
                    config,
                    &g,
                    text,
                    json!({ "path": path_spec, "orientations": rows }),
                )
            }
        }
        Command::Verify { .. } => unreachable!("handled above"),
    };
    Ok(Outcome::ok(out))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PathInput {
    Bare(Vec<usize>),
    Full {
        vertices: Vec<usize>,
        #[serde(default)]
        closed: bool,
        edges: Option<Vec<usize>>,
    },
}

/// A bare array is closed when it ends where it starts.
pub fn parse_path(g: &Multigraph, text: &str) -> Result<PathSpec, Error> {
    let input: PathInput = serde_json::from_str(text)
        .map_err(|e| Error::InputDomain(format!("path is not valid JSON: {e}")))?;
    match input {
        PathInput::Bare(vertices) => {
            let closed = vertices.len() > 2 && vertices.first() == vertices.last();
            PathSpec::resolve(g, &vertices, closed)
        }
        PathInput::Full {
            vertices,
            closed,
            edges: None,
        } => PathSpec::resolve(g, &vertices, closed),
        PathInput::Full {
            mut vertices,
            closed,
            edges: Some(edges),
        } => {
            if closed && vertices.len() > 1 && vertices.first() == vertices.last() {
                vertices.pop();
            }
            PathSpec::with_edges(g, vertices, closed, edges)
        }
    }
}

fn run_verify(
    config: &RunConfig,
    input: Option<&str>,
    corpus: Option<CorpusName>,
    random_corpus: Option<usize>,
    stdin: &mut dyn Read,
) -> Result<Outcome, Error> {
    let mut graphs = Vec::new();
    let mut source = serde_json::Map::new();
    if let Some(path) = input {
        let g = read_graph(path, stdin)?;
        source.insert("hash".into(), json!(g.id().to_string()));
        graphs.push(g);
    }
    if let Some(CorpusName::Small) = corpus {
        graphs.extend(small_corpus());
        source.insert("corpus".into(), json!("small"));
    }
    if let Some(count) = random_corpus {
        let params = ErdosRenyiParams::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
        graphs.extend((0..count).map(|_| erdos_renyi(&mut rng, &params)));
        source.insert(
            "random_corpus".into(),
            json!({ "count": count, "seed": config.seed, "generator": "erdos-renyi", "params": params }),
        );
    }
    if graphs.is_empty() {
        return Err(Error::InputDomain(
            "verify needs an input file, --corpus, or --random-corpus".into(),
        ));
    }
    source.insert("graphs".into(), json!(graphs.len()));
    source.insert("digest".into(), json!(corpus_digest(&graphs)));

    let opts = VerifyOptions {
        brute_force_cap: config.brute_force_cap,
        seed: config.seed,
    };
    let results = graphs
        .par_iter()
        .map(|g| verify_graph(g, &opts))
        .collect::<Result<Vec<GraphVerification>, Error>>()?;
    let failed: Vec<&GraphVerification> = results.iter().filter(|r| !r.passed).collect();
    let passed = failed.is_empty();

    let out = match config.format {
        Format::Text => {
            let mut text = String::new();
            for r in &results {
                let _ = writeln!(
                    text,
                    "{} n={} m={} kappa={} alpha={} {}",
                    r.graph,
                    r.vertices,
                    r.edges,
                    r.kappa_bruteforce,
                    r.alpha_bruteforce,
                    if r.passed { "PASS" } else { "FAIL" }
                );
                for c in r.checks.iter().filter(|c| !c.passed) {
                    let _ = writeln!(
                        text,
                        "  failed {}: {}",
                        c.name,
                        c.detail.as_deref().unwrap_or("")
                    );
                }
            }
            let _ = writeln!(text, "{} graphs, {} failed", results.len(), failed.len());
            text
        }
        Format::Json => to_json(&json!({
            "schema": SCHEMA_VERSION,
            "command": "verify",
            "input": source,
            "seed": config.seed,
            "brute_force_cap": config.brute_force_cap,
            "graphs": results,
            "summary": { "graphs": results.len(), "failed": failed.len() },
            "passed": passed,
        })),
    };
    if passed {
        Ok(Outcome::ok(out))
    } else {
        Ok(Outcome::failed(
            exit::INTERNAL,
            out,
            "error: verification failed\n".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C5: &str = "5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n";

    fn config(args: &[&str], env_cap: Option<&str>) -> Result<RunConfig, Error> {
        let cli = Cli::try_parse_from(std::iter::once("kappa").chain(args.iter().copied()))
            .expect("valid arguments");
        RunConfig::from_cli(cli, env_cap)
    }

    fn run_stdin(args: &[&str], input: &str) -> Outcome {
        run(&config(args, None).unwrap(), &mut input.as_bytes())
    }

    #[test]
    fn cap_precedence() {
        assert_eq!(config(&["kappa", "-"], None).unwrap().brute_force_cap, 20);
        assert_eq!(
            config(&["kappa", "-"], Some("7")).unwrap().brute_force_cap,
            7
        );
        assert_eq!(
            config(&["--cap", "3", "kappa", "-"], Some("7"))
                .unwrap()
                .brute_force_cap,
            3
        );
        assert!(matches!(
            config(&["kappa", "-"], Some("x")),
            Err(Error::InputDomain(_))
        ));
        assert!(matches!(
            config(&["kappa", "-", "--cap", "0"], None),
            Err(Error::InputDomain(_))
        ));
    }

    #[test]
    fn eval_requires_a_point() {
        let args = ["kappa", "eval", "-"];
        assert!(Cli::try_parse_from(args).is_err());
    }

    #[test]
    fn kappa_of_c5() {
        let out = run_stdin(&["kappa", "-"], C5);
        assert_eq!((out.code, out.stdout.as_str()), (0, "4\n"));
    }

    #[test]
    fn eval_on_tree_is_one() {
        let out = run_stdin(&["eval", "-", "--point", "1", "0"], "4 3\n0 1\n1 2\n1 3\n");
        assert_eq!(out.stdout, "1\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_stdin(&["kappa", "-"], "3 1\n0 9\n").code, exit::INPUT);
        assert!(run_stdin(&["kappa", "-"], "3 1\n0 9\n")
            .stderr
            .contains("line 2"));
        assert_eq!(
            run_stdin(&["--cap", "2", "classes", "-"], C5).code,
            exit::RESOURCE
        );
        assert_eq!(
            run_stdin(&["kappa", "-"], "2 2\n0 0\n0 1\n").code,
            exit::INPUT
        );
        assert_eq!(exit_code(&Error::Internal("x".into())), exit::INTERNAL);
        assert_eq!(run_stdin(&["verify"], "").code, exit::INPUT);
    }

    #[test]
    fn json_envelope() {
        let out = run_stdin(&["--format", "json", "tutte", "-"], C5);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "tutte");
        assert_eq!(v["input"]["hash"].as_str().unwrap().len(), 16);
        assert_eq!(v["polynomial"], "x^4 + x^3 + x^2 + x + y");
    }

    #[test]
    fn path_forms() {
        let g = Multigraph::cycle(4);
        let bare = parse_path(&g, "[0,1,2,3,0]").unwrap();
        assert!(bare.closed);
        let full = parse_path(&g, r#"{"vertices":[0,1,2,3],"closed":true}"#).unwrap();
        assert_eq!(bare, full);
        let open = parse_path(&g, "[0,1,2]").unwrap();
        assert!(!open.closed);
        assert!(parse_path(&g, "[0,2]").is_err());
        assert!(parse_path(&g, "nope").is_err());
    }

    #[test]
    fn nu_per_class_on_c4() {
        let out = run_stdin(
            &["nu", "-", "--path", "[0,1,2,3,0]", "--per-class"],
            "4 4\n0 1\n1 2\n2 3\n3 0\n",
        );
        assert_eq!(out.code, 0);
        let values: Vec<&str> = out
            .stdout
            .lines()
            .map(|l| l.rsplit(": ").next().unwrap())
            .collect();
        assert_eq!(values, ["2", "0", "-2"]);
    }
}
