//! Standard-form SOCP export: every objective term is dropped to the
//! constraints through epigraph variables, each signed-distance term is
//! encoded with a splitting vector and one second-order cone block, and
//! width norms become direct cone blocks.

use crate::problem::{CompiledProblem, DistTerm, LinearConstraint, ProblemError, WidthTerm};
use serde::{Deserialize, Serialize};

/// value = Σ terms·y + constant over the extended variable vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineRow {
    pub terms: Vec<(u32, f64)>,
    pub constant: f64,
}

impl AffineRow {
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(i, c)| c * y[*i as usize]).sum::<f64>()
    }
}

/// `rows[0]` ≥ ‖`rows[1..]`‖₂.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeBlock {
    pub rows: Vec<AffineRow>,
}

/// Where each auxiliary variable comes from, for completion and audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuxVar {
    /// Shared epigraph of the assertion max.
    AssertEpigraph,
    /// Shared epigraph of the negative max.
    NegEpigraph,
    /// Splitting component w_j of one sdist encoding.
    SdistW { sdist: u32, j: u32 },
    SdistT1 { sdist: u32 },
    SdistT2 { sdist: u32 },
    /// Epigraph of one width norm (index into the concatenated cr+bump list).
    WidthT { idx: u32 },
}

/// Identifies one sdist encoding: which max group, term, and part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdistRef {
    pub negative_group: bool,
    pub term: u32,
    pub part: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SocpProgram {
    /// Original variables first, auxiliaries after.
    pub n_total: usize,
    pub n_base: usize,
    pub objective: Vec<(u32, f64)>,
    pub lin: Vec<LinearConstraint>,
    pub cones: Vec<ConeBlock>,
    pub aux: Vec<AuxVar>,
    pub sdists: Vec<SdistRef>,
}

impl SocpProgram {
    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.iter().map(|(i, c)| c * y[*i as usize]).sum()
    }

    /// Text dump: VARS, sparse OBJ, LIN rows, SOC blocks (first row is the
    /// cone's scalar head).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("boxlite-socp v1\n");
        out.push_str(&format!("VARS {}\n", self.n_total));
        out.push_str("OBJ");
        for (i, c) in &self.objective {
            out.push_str(&format!(" {}:{:.17e}", i, c));
        }
        out.push('\n');
        out.push_str(&format!("LIN {}\n", self.lin.len()));
        for row in &self.lin {
            for (i, c) in &row.terms {
                out.push_str(&format!("{}:{:.17e} ", i, c));
            }
            out.push_str(&format!("<= {:.17e}\n", row.rhs));
        }
        out.push_str(&format!("SOC {}\n", self.cones.len()));
        for cone in &self.cones {
            out.push_str(&format!("dim {}\n", cone.rows.len()));
            for row in &cone.rows {
                out.push_str(&format!("{:.17e}", row.constant));
                for (i, c) in &row.terms {
                    out.push_str(&format!(" {}:{:.17e}", i, c));
                }
                out.push('\n');
            }
        }
        out
    }
}

struct Builder<'p> {
    problem: &'p CompiledProblem,
    n_total: usize,
    aux: Vec<AuxVar>,
    sdists: Vec<SdistRef>,
    lin: Vec<LinearConstraint>,
    cones: Vec<ConeBlock>,
}

impl<'p> Builder<'p> {
    fn fresh(&mut self, kind: AuxVar) -> u32 {
        let idx = self.n_total as u32;
        self.n_total += 1;
        self.aux.push(kind);
        idx
    }

    /// Encode sdist(y_term) ≤ t_bound with auxiliaries w, t1, t2:
    /// t1 + t2 ≤ t_bound; (t1, w) in a cone; y − w ≤ t2·1; y ≤ w.
    fn encode_sdist(&mut self, term: &DistTerm, sref: SdistRef, t_bound: u32) {
        let m = 2 * self.problem.d();
        let sid = self.sdists.len() as u32;
        self.sdists.push(sref);
        let w0 = self.n_total as u32;
        for j in 0..m {
            self.fresh(AuxVar::SdistW { sdist: sid, j: j as u32 });
        }
        let t1 = self.fresh(AuxVar::SdistT1 { sdist: sid });
        let t2 = self.fresh(AuxVar::SdistT2 { sdist: sid });

        // t1 + t2 − t_bound ≤ 0.
        self.lin.push(LinearConstraint {
            terms: vec![(t1, 1.0), (t2, 1.0), (t_bound, -1.0)],
            rhs: 0.0,
        });
        // Cone: t1 ≥ ‖w‖.
        let mut rows = vec![AffineRow { terms: vec![(t1, 1.0)], constant: 0.0 }];
        for j in 0..m {
            rows.push(AffineRow { terms: vec![(w0 + j as u32, 1.0)], constant: 0.0 });
        }
        self.cones.push(ConeBlock { rows });
        // y_j − w_j ≤ t2 and y_j ≤ w_j.
        for j in 0..m {
            let mut terms: Vec<(u32, f64)> = Vec::new();
            let constant = self.problem.slack_coeffs(term, j, |idx, c| terms.push((idx as u32, c)));
            let mut with_w = terms.clone();
            with_w.push((w0 + j as u32, -1.0));
            let mut with_w_t2 = with_w.clone();
            with_w_t2.push((t2, -1.0));
            self.lin.push(LinearConstraint { terms: with_w_t2, rhs: -constant });
            self.lin.push(LinearConstraint { terms: with_w, rhs: -constant });
        }
    }

    fn encode_width(&mut self, term: &WidthTerm, idx: u32) -> u32 {
        let t = self.fresh(AuxVar::WidthT { idx });
        let mut rows = vec![AffineRow { terms: vec![(t, 1.0)], constant: 0.0 }];
        for i in 0..self.problem.d() {
            let (lo, hi) = self.problem.width_vars(term, i);
            rows.push(AffineRow {
                terms: vec![(hi as u32, 1.0), (lo as u32, -1.0)],
                constant: 0.0,
            });
        }
        self.cones.push(ConeBlock { rows });
        t
    }
}

/// Reformulate the compiled problem as an equivalent SOCP.
pub fn export_socp(problem: &CompiledProblem) -> SocpProgram {
    let mut b = Builder {
        problem,
        n_total: problem.n(),
        aux: Vec::new(),
        sdists: Vec::new(),
        lin: problem.constraints.clone(),
        cones: Vec::new(),
    };
    let obj = &problem.objective;
    let mut objective: Vec<(u32, f64)> = Vec::new();

    if !obj.assertion_terms.is_empty() {
        let t_assert = b.fresh(AuxVar::AssertEpigraph);
        objective.push((t_assert, 1.0));
        for (ti, term) in obj.assertion_terms.iter().enumerate() {
            for (pi, part) in term.parts.iter().enumerate() {
                b.encode_sdist(
                    part,
                    SdistRef { negative_group: false, term: ti as u32, part: pi as u32 },
                    t_assert,
                );
            }
        }
    }
    if !obj.negative_terms.is_empty() {
        let t_neg = b.fresh(AuxVar::NegEpigraph);
        objective.push((t_neg, obj.lambda1));
        for (ti, term) in obj.negative_terms.iter().enumerate() {
            for (pi, part) in term.parts.iter().enumerate() {
                b.encode_sdist(
                    part,
                    SdistRef { negative_group: true, term: ti as u32, part: pi as u32 },
                    t_neg,
                );
            }
        }
    }
    let mut width_idx = 0u32;
    for term in &obj.width_terms_cr {
        let t = b.encode_width(term, width_idx);
        objective.push((t, obj.lambda2));
        width_idx += 1;
    }
    for term in &obj.width_terms_bump {
        let t = b.encode_width(term, width_idx);
        objective.push((t, obj.lambda3));
        width_idx += 1;
    }

    SocpProgram {
        n_total: b.n_total,
        n_base: problem.n(),
        objective,
        lin: b.lin,
        cones: b.cones,
        aux: b.aux,
        sdists: b.sdists,
    }
}

/// Extend a feasible z with the minimal auxiliary completion: the
/// splitting point is the positive part outside the orthant and the
/// origin inside; epigraph variables sit at the attained maxima.
pub fn minimal_completion(
    problem: &CompiledProblem,
    socp: &SocpProgram,
    z: &[f64],
) -> Vec<f64> {
    let obj = &problem.objective;
    let mut full = vec![0.0; socp.n_total];
    full[..z.len()].copy_from_slice(z);

    let group_max = |terms: &[crate::problem::LossTerm]| -> f64 {
        terms
            .iter()
            .map(|t| problem.loss_value(t, z))
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let sdist_term = |r: &SdistRef| -> &DistTerm {
        let group = if r.negative_group { &obj.negative_terms } else { &obj.assertion_terms };
        &group[r.term as usize].parts[r.part as usize]
    };

    for (idx, kind) in socp.aux.iter().enumerate() {
        let var = socp.n_base + idx;
        match kind {
            AuxVar::AssertEpigraph => full[var] = group_max(&obj.assertion_terms),
            AuxVar::NegEpigraph => full[var] = group_max(&obj.negative_terms),
            AuxVar::SdistW { sdist, j } => {
                let term = sdist_term(&socp.sdists[*sdist as usize]);
                let y = problem.slack_vector(term, z);
                let exterior = y.iter().any(|v| *v > 0.0);
                full[var] = if exterior { y[*j as usize].max(0.0) } else { 0.0 };
            }
            AuxVar::SdistT1 { sdist } => {
                let term = sdist_term(&socp.sdists[*sdist as usize]);
                let y = problem.slack_vector(term, z);
                let exterior = y.iter().any(|v| *v > 0.0);
                full[var] = if exterior {
                    y.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt()
                } else {
                    0.0
                };
            }
            AuxVar::SdistT2 { sdist } => {
                let term = sdist_term(&socp.sdists[*sdist as usize]);
                let y = problem.slack_vector(term, z);
                let exterior = y.iter().any(|v| *v > 0.0);
                full[var] = if exterior {
                    0.0
                } else {
                    y.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                };
            }
            AuxVar::WidthT { idx } => {
                let all: Vec<&WidthTerm> =
                    obj.width_terms_cr.iter().chain(&obj.width_terms_bump).collect();
                full[var] = problem.width_value(all[*idx as usize], z);
            }
        }
    }
    full
}

/// Check that the minimal-auxiliary completion of a feasible z is
/// SOCP-feasible and attains the original objective within 1e-8.
pub fn verify_socp_equivalence(
    problem: &CompiledProblem,
    socp: &SocpProgram,
    z: &[f64],
) -> Result<bool, ProblemError> {
    let residual = problem.feasibility_residual(z)?;
    if residual > 1e-6 {
        return Err(ProblemError::InfeasiblePoint { residual, tol: 1e-6 });
    }
    let full = minimal_completion(problem, socp, z);
    let slop = 1e-9;
    for row in &socp.lin {
        if row.dot(&full) > row.rhs + slop {
            return Ok(false);
        }
    }
    for cone in &socp.cones {
        let head = cone.rows[0].eval(&full);
        let norm = cone.rows[1..]
            .iter()
            .map(|r| r.eval(&full).powi(2))
            .sum::<f64>()
            .sqrt();
        if head + slop < norm {
            return Ok(false);
        }
    }
    let socp_value = socp.objective_value(&full);
    let direct = problem.evaluate_objective(z)?;
    Ok((socp_value - direct).abs() <= 1e-8)
}
