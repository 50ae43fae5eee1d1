//! Dataset pipeline: forest-fire sampling of role-assertion graphs,
//! inferred-set generation, validation/test splitting, and the built-in
//! family TBox.

use crate::ontology::{parse_kb, Axiom, KnowledgeBase};
use crate::reasoner::Reasoner;
use crate::rng::Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Forest-fire sampling parameters.
#[derive(Debug, Clone, Copy)]
pub struct SampleConfig {
    /// Target number of covered assertions.
    pub target_size: usize,
    /// Forward burning probability.
    pub pf: f64,
    /// Backward burning probability.
    pub bf: f64,
    pub seed: u64,
}

impl SampleConfig {
    pub fn new(target_size: usize, seed: u64) -> Self {
        SampleConfig { target_size, pf: 0.7, bf: 0.0, seed }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("assertion graph is empty")]
    EmptyGraph,
    #[error("sampled train KB stayed unsatisfiable after {0} attempts")]
    UnsatSample(usize),
    #[error("{0}")]
    Parse(String),
}

/// One role assertion as a triple of names.
pub type NamedAssertion = (String, String, String);

/// Standard forest-fire process over the role-assertion multigraph:
/// repeatedly seed a uniform unburned node and burn outward with geometric
/// fan-out until at least `target_size` assertions connect burned nodes.
/// Whole burn waves are kept, so the result may slightly exceed the target.
pub fn forest_fire_sample(
    assertions: &[NamedAssertion],
    cfg: &SampleConfig,
) -> Result<Vec<NamedAssertion>, DataError> {
    if assertions.is_empty() {
        return Err(DataError::EmptyGraph);
    }
    let mut nodes: BTreeSet<&str> = BTreeSet::new();
    for (_, a, b) in assertions {
        nodes.insert(a);
        nodes.insert(b);
    }
    let nodes: Vec<&str> = nodes.into_iter().collect();
    let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut out_nbrs: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let mut in_nbrs: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (_, a, b) in assertions {
        let (ai, bi) = (index[a.as_str()], index[b.as_str()]);
        if !out_nbrs[ai].contains(&bi) {
            out_nbrs[ai].push(bi);
        }
        if !in_nbrs[bi].contains(&ai) {
            in_nbrs[bi].push(ai);
        }
    }

    let mut rng = Rng::new(cfg.seed);
    let mut burned = vec![false; nodes.len()];
    let mut n_burned = 0usize;

    let covered = |burned: &[bool]| -> usize {
        assertions
            .iter()
            .filter(|(_, a, b)| burned[index[a.as_str()]] && burned[index[b.as_str()]])
            .count()
    };

    while covered(&burned) < cfg.target_size && n_burned < nodes.len() {
        // Pick a uniform unburned seed.
        let unburned: Vec<usize> = (0..nodes.len()).filter(|i| !burned[*i]).collect();
        let seed = unburned[rng.below(unburned.len())];
        burned[seed] = true;
        n_burned += 1;
        let mut frontier = vec![seed];
        while let Some(v) = frontier.pop() {
            let mut wave = Vec::new();
            for (nbrs, p) in [(&out_nbrs[v], cfg.pf), (&in_nbrs[v], cfg.bf)] {
                let mut fresh: Vec<usize> = nbrs.iter().copied().filter(|w| !burned[*w]).collect();
                if fresh.is_empty() || p <= 0.0 {
                    continue;
                }
                rng.shuffle(&mut fresh);
                let burn_n = rng.geometric(p).min(fresh.len());
                wave.extend_from_slice(&fresh[..burn_n]);
            }
            for w in wave {
                if !burned[w] {
                    burned[w] = true;
                    n_burned += 1;
                    frontier.push(w);
                }
            }
            if covered(&burned) >= cfg.target_size {
                break;
            }
        }
    }

    Ok(assertions
        .iter()
        .filter(|(_, a, b)| burned[index[a.as_str()]] && burned[index[b.as_str()]])
        .cloned()
        .collect())
}

/// Train KB plus held-out entailed assertions.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub train_kb: KnowledgeBase,
    pub valid: Vec<Axiom>,
    pub test: Vec<Axiom>,
}

fn kb_from_named(tbox_dsl: &str, assertions: &[NamedAssertion]) -> Result<KnowledgeBase, DataError> {
    let mut text = String::from(tbox_dsl);
    for (r, a, b) in assertions {
        text.push_str(&format!("ra {r} {a} {b}\n"));
    }
    parse_kb(&text).map_err(|e| DataError::Parse(e.to_string()))
}

/// Sample a train ABox, infer the held-out assertion set, and split it
/// 20/80 into validation and test. Resamples (bumping the seed) when the
/// sampled train KB is unsatisfiable, up to `retry_cap` attempts.
pub fn make_bundle(
    full_abox: &[NamedAssertion],
    tbox_dsl: &str,
    cfg: &SampleConfig,
    split_seed: u64,
    retry_cap: usize,
) -> Result<DatasetBundle, DataError> {
    let mut attempt_cfg = *cfg;
    for attempt in 0..retry_cap.max(1) {
        attempt_cfg.seed = cfg.seed.wrapping_add(attempt as u64);
        let train = forest_fire_sample(full_abox, &attempt_cfg)?;
        let train_kb = kb_from_named(tbox_dsl, &train)?;
        let reasoner = Reasoner::new(&train_kb);
        if !reasoner.is_satisfiable() {
            continue;
        }
        let mut inferred = reasoner.infer_test_assertions().expect("satisfiable");
        let mut rng = Rng::new(split_seed);
        rng.shuffle(&mut inferred);
        let n_valid = ((inferred.len() as f64) * 0.2).round() as usize;
        let valid = inferred[..n_valid].to_vec();
        let test = inferred[n_valid..].to_vec();
        return Ok(DatasetBundle { train_kb, valid, test });
    }
    Err(DataError::UnsatSample(retry_cap))
}

/// The role-only family TBox with the parent-role disjointness.
pub fn family_tbox_dsl() -> &'static str {
    "ri inv(relative) relative\n\
     ri hasSibling relative\n\
     ri hasChild relative\n\
     ri hasParent relative\n\
     ri hasFather hasParent\n\
     ri hasMother hasParent\n\
     ri inv(spouse) spouse\n\
     ri inv(hasSibling) hasSibling\n\
     ri spouse relative\n\
     ci exists(inv(hasFather)) not(exists(inv(hasMother)))\n"
}

pub fn family_tbox() -> KnowledgeBase {
    parse_kb(family_tbox_dsl()).expect("built-in TBox parses")
}
