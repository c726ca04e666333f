//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::HashSet;
use std::process::Command;
use std::time::{Duration, Instant};

use kappa_core::collapse::{build_collapse_graph, closed_path_through};
use kappa_core::corpus::{random_connected_graph, random_forest, random_multigraph, small_corpus};
use kappa_core::orientations::{
    cut_partition_bruteforce, enumerate_acyclic, kappa_partition_bruteforce,
    normalize_to_unique_source, nu_path, simple_closed_paths, unique_source_orientations,
    DEFAULT_BRUTE_FORCE_CAP,
};
use kappa_core::tutte::{tutte_oracle_rank_nullity, TutteEngine};
use kappa_core::{EdgeKind, KappaEngine, Multigraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CAP: usize = DEFAULT_BRUTE_FORCE_CAP;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn brute_kappa(g: &Multigraph) -> Result<u64, String> {
    kappa_partition_bruteforce(g, CAP)
        .map(|p| p.len() as u64)
        .map_err(|e| e.to_string())
}

fn recursion_kappa(g: &Multigraph) -> Result<u64, String> {
    KappaEngine::new()
        .kappa(g)
        .map(|r| r.value)
        .map_err(|e| e.to_string())
}

fn tutte_at(g: &Multigraph, x: i64, y: i64) -> Result<i128, String> {
    TutteEngine::new().eval(g, x, y).map_err(|e| e.to_string())
}

fn cycle_edges(g: &Multigraph) -> Vec<usize> {
    g.classify_edges()
        .iter()
        .enumerate()
        .filter(|(_, k)| **k == EdgeKind::CycleEdge)
        .map(|(e, _)| e)
        .collect()
}

/// Exhaustive corpus plus 100 seeded random connected graphs, ≤ 12 edges.
fn agreement_corpus() -> Vec<Multigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut graphs = small_corpus();
    graphs.extend((0..100).map(|_| random_connected_graph(&mut rng, 12)));
    graphs
}

fn cycle_formula() -> Outcome {
    let start = Instant::now();
    for n in 3..=8 {
        let c = Multigraph::cycle(n);
        let want = n as i128 - 1;
        let got = [
            brute_kappa(&c)? as i128,
            recursion_kappa(&c)? as i128,
            tutte_at(&c, 1, 0)?,
        ];
        ensure(got.iter().all(|&v| v == want), || {
            format!("C{n}: got {got:?}, want {want}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("C3..C8 in {:.2?}", start.elapsed()))
}

fn forest_collapse() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..100 {
        let f = random_forest(&mut rng, 12);
        let k = recursion_kappa(&f)?;
        ensure(k == 1, || {
            format!("forest #{i} {}: kappa {k}", f.to_edge_list().trim())
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("100 forests in {:.2?}", start.elapsed()))
}

fn triple_agreement() -> Outcome {
    let start = Instant::now();
    let corpus = agreement_corpus();
    for g in &corpus {
        let brute = brute_kappa(g)? as i128;
        let rec = recursion_kappa(g)? as i128;
        let t10 = tutte_at(g, 1, 0)?;
        ensure(brute == rec && rec == t10, || {
            format!("{}: brute {brute}, recursion {rec}, T(1,0) {t10}", g.id())
        })?;
        let alpha = enumerate_acyclic(g, CAP).map_err(|e| e.to_string())?.len() as i128;
        let t20 = tutte_at(g, 2, 0)?;
        ensure(alpha == t20, || {
            format!("{}: alpha {alpha}, T(2,0) {t20}", g.id())
        })?;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{} graphs in {:.2?}",
        corpus.len(),
        start.elapsed()
    ))
}

fn deletion_contraction_by_bruteforce() -> Outcome {
    let mut checked = 0;
    for g in &agreement_corpus() {
        let whole = brute_kappa(g)?;
        for e in cycle_edges(g) {
            let deleted = g.delete_edge(e).map_err(|x| x.to_string())?.graph;
            let contracted = g.contract_edge(e).map_err(|x| x.to_string())?.graph;
            let (a, b) = (brute_kappa(&deleted)?, brute_kappa(&contracted)?);
            ensure(whole == a + b, || {
                format!("{} edge {e}: {whole} != {a} + {b}", g.id())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (graph, cycle-edge) pairs"))
}

fn collapse_structure() -> Outcome {
    let mut checked = 0;
    for g in &small_corpus() {
        for e in cycle_edges(g) {
            let cg = build_collapse_graph(g, e, CAP).map_err(|x| x.to_string())?;
            let ctx = || format!("{} edge {e}", g.id());
            let labels = cg.component_labels();
            let components = labels.iter().collect::<HashSet<_>>().len();
            let mut comp_nodes = vec![0usize; components];
            let mut comp_edges = vec![0usize; components];
            for &l in &labels {
                comp_nodes[l] += 1;
            }
            let mut seen = HashSet::new();
            for edge in &cg.edges {
                let (a, b) = (
                    edge.forward.min(edge.backward),
                    edge.forward.max(edge.backward),
                );
                ensure(a != b, || format!("{}: self-loop at {a}", ctx()))?;
                ensure(seen.insert((a, b)), || {
                    format!("{}: parallel edges {a}-{b}", ctx())
                })?;
                comp_edges[labels[a]] += 1;
            }
            // connected with edges = nodes - 1 and degree ≤ 2 means a path
            ensure(cg.degrees().iter().all(|&d| d <= 2), || {
                format!("{}: degree above 2", ctx())
            })?;
            ensure(
                (0..components).all(|c| comp_edges[c] + 1 == comp_nodes[c]),
                || format!("{}: a component is not a tree", ctx()),
            )?;
            let deleted = g.delete_edge(e).map_err(|x| x.to_string())?.graph;
            let contracted = g.contract_edge(e).map_err(|x| x.to_string())?.graph;
            let (kd, kc) = (
                brute_kappa(&deleted)? as usize,
                brute_kappa(&contracted)? as usize,
            );
            ensure(components == kd, || {
                format!("{}: {components} components, kappa(Y-e) {kd}", ctx())
            })?;
            ensure(cg.edges.len() == kc, || {
                format!("{}: {} edges, kappa(Y/e) {kc}", ctx(), cg.edges.len())
            })?;
            ensure(cg.nodes.len() == components + cg.edges.len(), || {
                format!("{}: nodes {} != components + edges", ctx(), cg.nodes.len())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (graph, cycle-edge) pairs"))
}

fn cut_equals_kappa() -> Outcome {
    let corpus = small_corpus();
    for g in &corpus {
        let kappa = kappa_partition_bruteforce(g, CAP).map_err(|e| e.to_string())?;
        let cut = cut_partition_bruteforce(g, CAP).map_err(|e| e.to_string())?;
        ensure(kappa == cut, || format!("{}: partitions differ", g.id()))?;
    }
    Ok(format!("{} graphs", corpus.len()))
}

fn transversal() -> Outcome {
    let mut checked = 0;
    for g in small_corpus().iter().filter(|g| g.is_connected()) {
        let partition = kappa_partition_bruteforce(g, CAP).map_err(|e| e.to_string())?;
        for v in 0..g.vertex_count() {
            let ctx = || format!("{} vertex {v}", g.id());
            let acyc_v = unique_source_orientations(g, v, CAP).map_err(|e| e.to_string())?;
            ensure(acyc_v.len() == partition.len(), || {
                format!(
                    "{}: |Acyc_v| {} vs kappa {}",
                    ctx(),
                    acyc_v.len(),
                    partition.len()
                )
            })?;
            let hit: HashSet<usize> = acyc_v
                .iter()
                .filter_map(|o| partition.class_of(o))
                .collect();
            ensure(hit.len() == partition.len(), || {
                format!("{}: a class is missed or met twice", ctx())
            })?;
            for (class, members) in partition.classes().iter().enumerate() {
                for o in members {
                    let (normal, _) =
                        normalize_to_unique_source(g, o, v).map_err(|e| e.to_string())?;
                    ensure(
                        partition.class_of(&normal) == Some(class) && acyc_v.contains(&normal),
                        || format!("{}: {o} normalizes outside its class", ctx()),
                    )?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (graph, vertex) pairs"))
}

fn nu_invariance() -> Outcome {
    let (mut paths, mut steps) = (0, 0);
    for g in &small_corpus() {
        let partition = kappa_partition_bruteforce(g, CAP).map_err(|e| e.to_string())?;
        for p in simple_closed_paths(g) {
            for members in partition.classes() {
                let values = members
                    .iter()
                    .map(|o| nu_path(g, o, &p))
                    .collect::<Result<HashSet<i64>, _>>()
                    .map_err(|e| e.to_string())?;
                ensure(values.len() == 1, || {
                    format!("{}: nu varies within a class", g.id())
                })?;
            }
            paths += 1;
        }
        for e in cycle_edges(g) {
            let cg = build_collapse_graph(g, e, CAP).map_err(|x| x.to_string())?;
            let path = closed_path_through(g, e)
                .map_err(|x| x.to_string())?
                .ok_or_else(|| format!("{}: no closed path through cycle-edge {e}", g.id()))?;
            for edge in &cg.edges {
                let a = nu_path(g, &cg.nodes[edge.forward], &path).map_err(|x| x.to_string())?;
                let b = nu_path(g, &cg.nodes[edge.backward], &path).map_err(|x| x.to_string())?;
                ensure((a - b).abs() == 2, || {
                    format!("{} edge {e}: nu {a} vs {b}", g.id())
                })?;
                steps += 1;
            }
        }
    }
    Ok(format!("{paths} closed paths, {steps} collapse edges"))
}

fn tutte_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut graphs: Vec<Multigraph> = small_corpus()
        .into_iter()
        .filter(|g| g.edge_count() <= 10)
        .collect();
    graphs.extend((0..300).map(|_| random_multigraph(&mut rng, 10)));
    let looped = graphs.iter().filter(|g| g.has_loops()).count();
    for g in &graphs {
        let fast = TutteEngine::new()
            .polynomial(g)
            .map_err(|e| e.to_string())?;
        let oracle = tutte_oracle_rank_nullity(g).map_err(|e| e.to_string())?;
        ensure(fast == oracle, || {
            format!("{}: {fast} vs oracle {oracle}", g.to_edge_list().trim())
        })?;
    }
    ensure(looped > 0, || {
        "no multigraph with loops in the corpus".into()
    })?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "{} graphs ({looped} with loops) in {:.2?}",
        graphs.len(),
        start.elapsed()
    ))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_kappa"))
            .args([
                "verify", "--corpus", "small", "--seed", "7", "--format", "json",
            ])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || {
        format!(
            "exit {:?}: {}",
            a.status.code(),
            String::from_utf8_lossy(&a.stderr)
        )
    })?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || {
        "reports differ".into()
    })?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("cycle formula", cycle_formula),
        ("forest collapse", forest_collapse),
        ("triple agreement", triple_agreement),
        (
            "deletion-contraction by brute force",
            deletion_contraction_by_bruteforce,
        ),
        ("collapse structure", collapse_structure),
        ("cut equivalence equals kappa", cut_equals_kappa),
        ("unique-source transversal", transversal),
        ("nu invariance", nu_invariance),
        ("tutte oracle", tutte_oracle),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
