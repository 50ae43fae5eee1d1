//! Scoring and filtered link-prediction evaluation: assertion scores,
//! corruption-based ranking, MRR and H@k.

use crate::geometry::{complement, dist_box, BoxInterpretation, GeometryError};
use crate::ontology::{Basic, IndividualId, RoleId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("candidate set is empty (no individuals to corrupt with)")]
    EmptyCandidateSet,
    #[error("no rank records to aggregate")]
    EmptyRecords,
    #[error("{0}")]
    Geometry(#[from] GeometryError),
}

/// Score of a concept assertion: the negated signed distance of the
/// individual's position to the concept box.
pub fn score_concept(
    eta: &BoxInterpretation,
    concept: Basic,
    a: IndividualId,
) -> Result<f64, GeometryError> {
    if a as usize >= eta.signature.n_individuals() {
        return Err(GeometryError::UnknownSymbol);
    }
    let bx = eta.basic_box(concept);
    Ok(-dist_box(&bx, &eta.pos[a as usize], &eta.config)?)
}

/// Convenience: score of the complement membership.
pub fn score_negated_concept(
    eta: &BoxInterpretation,
    concept: Basic,
    a: IndividualId,
) -> Result<f64, GeometryError> {
    if a as usize >= eta.signature.n_individuals() {
        return Err(GeometryError::UnknownSymbol);
    }
    let bx = complement(&eta.basic_box(concept), &eta.config);
    Ok(-dist_box(&bx, &eta.pos[a as usize], &eta.config)?)
}

/// Score of a role assertion: the negated four-way max of head, tail, and
/// both bump distances.
pub fn score_role(
    eta: &BoxInterpretation,
    role: RoleId,
    a: IndividualId,
    b: IndividualId,
) -> Result<f64, GeometryError> {
    let sig = &eta.signature;
    if role as usize >= sig.n_roles()
        || a as usize >= sig.n_individuals()
        || b as usize >= sig.n_individuals()
    {
        return Err(GeometryError::UnknownSymbol);
    }
    let boxes = &eta.role_boxes[role as usize];
    let cfg = &eta.config;
    let pa = &eta.pos[a as usize];
    let pb = &eta.pos[b as usize];
    let ba = &eta.bump[a as usize];
    let bb = &eta.bump[b as usize];
    let head_pt: Vec<f64> = pa.iter().zip(bb).map(|(x, y)| x + y).collect();
    let tail_pt: Vec<f64> = pb.iter().zip(ba).map(|(x, y)| x + y).collect();
    let loss = dist_box(&boxes.head, &head_pt, cfg)?
        .max(dist_box(&boxes.tail, &tail_pt, cfg)?)
        .max(dist_box(&boxes.bump, ba, cfg)?)
        .max(dist_box(&boxes.bump, bb, cfg)?);
    Ok(-loss)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    HeadCorrupted,
    TailCorrupted,
}

/// How equal scores rank against the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiePolicy {
    /// rank = 1 + #{candidates with strictly higher score}.
    Optimistic,
    /// rank = 1 + #{other candidates with score >= target}.
    Pessimistic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankRecord {
    pub role: RoleId,
    pub subject: IndividualId,
    pub object: IndividualId,
    pub direction: Direction,
    pub filtered_rank: usize,
    pub score: f64,
}

pub type RoleTriple = (RoleId, IndividualId, IndividualId);

/// Filtered corruption ranking: for each test assertion R(a,b), rank its
/// score against head corruptions R(a',b) and tail corruptions R(a,b'),
/// excluding known-true candidates other than the target itself.
pub fn rank_filtered(
    eta: &BoxInterpretation,
    test: &[RoleTriple],
    known_true: &BTreeSet<RoleTriple>,
    individuals: &[IndividualId],
    tie_policy: TiePolicy,
) -> Result<Vec<RankRecord>, EvalError> {
    if individuals.is_empty() {
        return Err(EvalError::EmptyCandidateSet);
    }
    let mut records = Vec::with_capacity(2 * test.len());
    for &(role, a, b) in test {
        let target_score = score_role(eta, role, a, b)?;
        for direction in [Direction::HeadCorrupted, Direction::TailCorrupted] {
            let mut higher = 0usize;
            let mut ties = 0usize;
            for &cand in individuals {
                let triple = match direction {
                    Direction::HeadCorrupted => (role, cand, b),
                    Direction::TailCorrupted => (role, a, cand),
                };
                if triple == (role, a, b) {
                    continue;
                }
                if known_true.contains(&triple) {
                    continue;
                }
                let s = match direction {
                    Direction::HeadCorrupted => score_role(eta, role, cand, b)?,
                    Direction::TailCorrupted => score_role(eta, role, a, cand)?,
                };
                if s > target_score {
                    higher += 1;
                } else if s == target_score {
                    ties += 1;
                }
            }
            let filtered_rank = match tie_policy {
                TiePolicy::Optimistic => 1 + higher,
                TiePolicy::Pessimistic => 1 + higher + ties,
            };
            records.push(RankRecord {
                role,
                subject: a,
                object: b,
                direction,
                filtered_rank,
                score: target_score,
            });
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub mrr: f64,
    pub hits: Vec<(usize, f64)>,
    pub records: Vec<RankRecord>,
}

/// Mean reciprocal rank and hits@k over rank records.
pub fn compute_metrics(records: Vec<RankRecord>, ks: &[usize]) -> Result<EvalReport, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyRecords);
    }
    let n = records.len() as f64;
    let mrr = records.iter().map(|r| 1.0 / r.filtered_rank as f64).sum::<f64>() / n;
    let hits = ks
        .iter()
        .map(|k| {
            let h = records.iter().filter(|r| r.filtered_rank <= *k).count() as f64 / n;
            (*k, h)
        })
        .collect();
    Ok(EvalReport { mrr, hits, records })
}
