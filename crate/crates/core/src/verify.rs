//! Cross-engine differential checks on a single graph.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::kappa::{EdgeChoice, KappaEngine};
use crate::orientations::{
    cut_partition_bruteforce, enumerate_acyclic, kappa_partition_bruteforce,
    normalize_to_unique_source, unique_source_orientations, KappaPartition,
};
use crate::tutte::TutteEngine;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub brute_force_cap: usize,
    /// Seeds the random cycle-edge choice of the differential κ run.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphVerification {
    pub graph: String,
    pub vertices: usize,
    pub edges: usize,
    pub connected: bool,
    pub kappa_bruteforce: u64,
    pub kappa_recursion: u64,
    pub kappa_random_edge: u64,
    pub tutte_1_0: i64,
    pub alpha_bruteforce: u64,
    pub tutte_2_0: i64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn to_i64(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow("tutte evaluation"))
}

/// Runs every check on `g`. Loops are rejected; parallel edges are
/// simplified away first since κ and `Acyc` factor through simplification.
pub fn verify_graph(g: &Multigraph, opts: &VerifyOptions) -> Result<GraphVerification> {
    if g.has_loops() {
        return Err(Error::domain("verify: graph has a loop"));
    }
    let g = g.simplify().graph;
    let cap = opts.brute_force_cap;

    let partition = kappa_partition_bruteforce(&g, cap)?;
    let kappa_bruteforce = partition.len() as u64;
    let kappa_recursion = KappaEngine::new().kappa(&g)?.value;
    let kappa_random_edge = KappaEngine::uncached()
        .with_edge_choice(EdgeChoice::Seeded(opts.seed))
        .kappa(&g)?
        .value;
    let tutte_1_0 = to_i64(TutteEngine::new().eval(&g, 1, 0)?)?;
    let alpha_bruteforce = enumerate_acyclic(&g, cap)?.len() as u64;
    let tutte_2_0 = to_i64(TutteEngine::new().eval(&g, 2, 0)?)?;

    let mut checks = Vec::new();
    let mut check = |name, passed, detail: Option<String>| {
        checks.push(Check {
            name,
            passed,
            detail,
        })
    };

    check(
        "kappa-bruteforce-equals-recursion",
        kappa_bruteforce == kappa_recursion,
        None,
    );
    check(
        "kappa-recursion-edge-choice-independent",
        kappa_recursion == kappa_random_edge,
        None,
    );
    check(
        "kappa-equals-tutte-1-0",
        kappa_bruteforce as i64 == tutte_1_0,
        None,
    );
    check(
        "alpha-equals-tutte-2-0",
        alpha_bruteforce as i64 == tutte_2_0,
        None,
    );

    let cut = cut_partition_bruteforce(&g, cap)?;
    check("cut-equivalence-equals-kappa", cut == partition, None);

    if g.is_connected() {
        let failure = transversal_failure(&g, &partition, cap)?;
        check("unique-source-transversal", failure.is_none(), failure);
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(GraphVerification {
        graph: g.id().to_string(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        connected: g.is_connected(),
        kappa_bruteforce,
        kappa_recursion,
        kappa_random_edge,
        tutte_1_0,
        alpha_bruteforce,
        tutte_2_0,
        checks,
        passed,
    })
}

/// For every vertex `v`: `Acyc_v` meets every class exactly once, and
/// normalizing any orientation lands on its class's member of `Acyc_v`.
/// Returns a description of the first failure.
pub fn transversal_failure(
    g: &Multigraph,
    partition: &KappaPartition,
    cap: usize,
) -> Result<Option<String>> {
    for v in 0..g.vertex_count() {
        let acyc_v = unique_source_orientations(g, v, cap)?;
        if acyc_v.len() != partition.len() {
            return Ok(Some(format!(
                "vertex {v}: {} unique-source orientations for {} classes",
                acyc_v.len(),
                partition.len()
            )));
        }
        let mut owner = vec![None; partition.len()];
        for o in &acyc_v {
            let class = partition.class_of(o).ok_or_else(|| {
                Error::Internal("unique-source orientation not in partition".into())
            })?;
            if owner[class].replace(*o).is_some() {
                return Ok(Some(format!("vertex {v}: class {class} met twice")));
            }
        }
        for (class, members) in partition.classes().iter().enumerate() {
            for o in members {
                let (normal, _) = normalize_to_unique_source(g, o, v)?;
                if Some(normal) != owner[class] {
                    return Ok(Some(format!(
                        "vertex {v}: {o} normalizes to {normal}, outside its class's transversal member"
                    )));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orientations::DEFAULT_BRUTE_FORCE_CAP;

    const OPTS: VerifyOptions = VerifyOptions {
        brute_force_cap: DEFAULT_BRUTE_FORCE_CAP,
        seed: 7,
    };

    #[test]
    fn k4_passes() {
        let r = verify_graph(&Multigraph::complete(4), &OPTS).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!((r.kappa_bruteforce, r.alpha_bruteforce), (6, 24));
        assert_eq!(r.checks.len(), 6);
    }

    #[test]
    fn disconnected_skips_transversal() {
        let two = Multigraph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let r = verify_graph(&two, &OPTS).unwrap();
        assert!(r.passed);
        assert_eq!(r.kappa_recursion, 4);
        assert!(r
            .checks
            .iter()
            .all(|c| c.name != "unique-source-transversal"));
    }

    #[test]
    fn loops_and_caps() {
        let looped = Multigraph::new(2, [(0, 0)]).unwrap();
        assert!(matches!(
            verify_graph(&looped, &OPTS),
            Err(Error::InputDomain(_))
        ));
        let capped = VerifyOptions {
            brute_force_cap: 5,
            seed: 0,
        };
        assert!(matches!(
            verify_graph(&Multigraph::complete(4), &capped),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
