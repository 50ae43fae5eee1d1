//! Compile a KB plus hyperparameters into a concrete convex program:
//! variable layout, polyhedral constraints, a weighted objective over
//! signed-distance and width terms, and evaluation/extraction for
//! candidate vectors.

use crate::geometry::{sdist_neg_orthant, BoxBounds, BoxInterpretation, RoleBoxes, WorldConfig};
use crate::ontology::{
    enumerate_basic_concepts, Axiom, Basic, IndividualId, KnowledgeBase, RoleId, Signature,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ProblemError {
    #[error("dimension {got} is too small; this signature needs at least {required}")]
    DimensionTooSmall { required: usize, got: usize },
    #[error("the signature has no parameters to lay out")]
    EmptyLayout,
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("candidate is infeasible: residual {residual} exceeds tolerance {tol}")]
    InfeasiblePoint { residual: f64, tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoleBoxKind {
    Head,
    Tail,
    Bump,
}

/// Deterministic packing of all box-interpretation parameters into one
/// vector z: positions, bumps, concept box corners, role box corners.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableLayout {
    pub cfg: WorldConfig,
    pub n_individuals: usize,
    pub n_concepts: usize,
    pub n_roles: usize,
}

impl VariableLayout {
    pub fn new(sig: &Signature, cfg: WorldConfig) -> VariableLayout {
        VariableLayout {
            cfg,
            n_individuals: sig.n_individuals(),
            n_concepts: sig.n_concepts(),
            n_roles: sig.n_roles(),
        }
    }

    /// Total variable count: (2|N_I| + 2|N_C| + 6|N_R|)·d.
    pub fn n(&self) -> usize {
        (2 * self.n_individuals + 2 * self.n_concepts + 6 * self.n_roles) * self.cfg.d
    }

    pub fn pos(&self, a: usize, i: usize) -> usize {
        a * self.cfg.d + i
    }
    pub fn bump(&self, a: usize, i: usize) -> usize {
        (self.n_individuals + a) * self.cfg.d + i
    }
    pub fn concept_lower(&self, c: usize, i: usize) -> usize {
        (2 * self.n_individuals + 2 * c) * self.cfg.d + i
    }
    pub fn concept_upper(&self, c: usize, i: usize) -> usize {
        (2 * self.n_individuals + 2 * c + 1) * self.cfg.d + i
    }
    pub fn role_lower(&self, r: usize, kind: RoleBoxKind, i: usize) -> usize {
        let k = match kind {
            RoleBoxKind::Head => 0,
            RoleBoxKind::Tail => 2,
            RoleBoxKind::Bump => 4,
        };
        (2 * self.n_individuals + 2 * self.n_concepts + 6 * r + k) * self.cfg.d + i
    }
    pub fn role_upper(&self, r: usize, kind: RoleBoxKind, i: usize) -> usize {
        self.role_lower(r, kind, i) + self.cfg.d
    }

    /// Concatenate a box interpretation's parameters into z.
    pub fn pack(&self, eta: &BoxInterpretation) -> Vec<f64> {
        let d = self.cfg.d;
        let mut z = vec![0.0; self.n()];
        for a in 0..self.n_individuals {
            for i in 0..d {
                z[self.pos(a, i)] = eta.pos[a][i];
                z[self.bump(a, i)] = eta.bump[a][i];
            }
        }
        for c in 0..self.n_concepts {
            for i in 0..d {
                z[self.concept_lower(c, i)] = eta.concept_box[c].lower[i];
                z[self.concept_upper(c, i)] = eta.concept_box[c].upper[i];
            }
        }
        for r in 0..self.n_roles {
            let boxes = &eta.role_boxes[r];
            for (kind, bx) in [
                (RoleBoxKind::Head, &boxes.head),
                (RoleBoxKind::Tail, &boxes.tail),
                (RoleBoxKind::Bump, &boxes.bump),
            ] {
                for i in 0..d {
                    z[self.role_lower(r, kind, i)] = bx.lower[i];
                    z[self.role_upper(r, kind, i)] = bx.upper[i];
                }
            }
        }
        z
    }

    /// Inverse of `pack`.
    pub fn unpack(&self, z: &[f64], sig: &Signature) -> BoxInterpretation {
        let d = self.cfg.d;
        let take_box = |lower0: usize, upper0: usize| BoxBounds {
            lower: (0..d).map(|i| z[lower0 + i]).collect(),
            upper: (0..d).map(|i| z[upper0 + i]).collect(),
        };
        BoxInterpretation {
            config: self.cfg,
            signature: sig.clone(),
            pos: (0..self.n_individuals)
                .map(|a| (0..d).map(|i| z[self.pos(a, i)]).collect())
                .collect(),
            bump: (0..self.n_individuals)
                .map(|a| (0..d).map(|i| z[self.bump(a, i)]).collect())
                .collect(),
            concept_box: (0..self.n_concepts)
                .map(|c| take_box(self.concept_lower(c, 0), self.concept_upper(c, 0)))
                .collect(),
            role_boxes: (0..self.n_roles)
                .map(|r| RoleBoxes {
                    head: take_box(
                        self.role_lower(r, RoleBoxKind::Head, 0),
                        self.role_upper(r, RoleBoxKind::Head, 0),
                    ),
                    tail: take_box(
                        self.role_lower(r, RoleBoxKind::Tail, 0),
                        self.role_upper(r, RoleBoxKind::Tail, 0),
                    ),
                    bump: take_box(
                        self.role_lower(r, RoleBoxKind::Bump, 0),
                        self.role_upper(r, RoleBoxKind::Bump, 0),
                    ),
                })
                .collect(),
        }
    }
}

/// One halfspace a·z ≤ b with sparse coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub terms: Vec<(u32, f64)>,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn dot(&self, z: &[f64]) -> f64 {
        self.terms.iter().map(|(i, c)| c * z[*i as usize]).sum()
    }
    pub fn violation(&self, z: &[f64]) -> f64 {
        (self.dot(z) - self.rhs).max(0.0)
    }
}

/// The point whose distance to a box is measured by a loss term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistPoint {
    /// pos(a) + bump(b)
    Bumped { a: IndividualId, b: IndividualId },
    /// bump(a)
    BumpOf { a: IndividualId },
    /// pos(a)
    PosOf { a: IndividualId },
}

/// The box whose boundary a loss term measures against, as an affine
/// function of z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistBox {
    Concept(Basic),
    /// Complement of a basic concept's box.
    NegConcept(Basic),
    Role(RoleId, RoleBoxKind),
}

/// dist(box, point): signed distance of the membership slack vector to
/// the nonpositive orthant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistTerm {
    pub bx: DistBox,
    pub point: DistPoint,
}

/// A loss term: the max over one or more dist components.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossTerm {
    pub label: String,
    pub parts: Vec<DistTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WidthTerm {
    Concept(u32),
    Role(RoleId, RoleBoxKind),
}

/// The weighted objective: an outer max over assertion losses, a weighted
/// max over negative-concept terms, and weighted width regularizers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub assertion_terms: Vec<LossTerm>,
    pub negative_terms: Vec<LossTerm>,
    pub width_terms_cr: Vec<WidthTerm>,
    pub width_terms_bump: Vec<WidthTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompiledProblem {
    pub signature: Signature,
    pub layout: VariableLayout,
    pub constraints: Vec<LinearConstraint>,
    pub objective: ObjectiveSpec,
    /// Reserved dimension per basic concept, in N_C^∃ order.
    pub concept_dim_assignment: Vec<usize>,
}

/// Affine expression over z with at most two variable terms, used for box
/// boundaries.
#[derive(Debug, Clone, Copy)]
pub struct BoundExpr {
    terms: [(usize, f64); 2],
    n_terms: usize,
    pub constant: f64,
}

impl BoundExpr {
    fn var(i: usize) -> Self {
        BoundExpr { terms: [(i, 1.0), (0, 0.0)], n_terms: 1, constant: 0.0 }
    }
    fn diff(i: usize, j: usize) -> Self {
        BoundExpr { terms: [(i, 1.0), (j, -1.0)], n_terms: 2, constant: 0.0 }
    }
    /// c − e
    fn negate_plus(self, c: f64) -> Self {
        let mut out = self;
        for t in out.terms.iter_mut() {
            t.1 = -t.1;
        }
        out.constant = c - self.constant;
        out
    }
    /// Terms are summed first so that derived-bound evaluation is
    /// bitwise identical to computing the stored box bounds and then
    /// offsetting, keeping the two scoring routes exactly equal.
    pub fn eval(&self, z: &[f64]) -> f64 {
        let mut v = 0.0;
        for k in 0..self.n_terms {
            let (i, c) = self.terms[k];
            v += c * z[i];
        }
        self.constant + v
    }
    pub fn for_each_coeff(&self, mut f: impl FnMut(usize, f64)) {
        for k in 0..self.n_terms {
            let (i, c) = self.terms[k];
            f(i, c);
        }
    }
}

impl CompiledProblem {
    pub fn n(&self) -> usize {
        self.layout.n()
    }
    pub fn d(&self) -> usize {
        self.layout.cfg.d
    }

    /// Lower-bound expression of a dist box at one dimension.
    pub fn box_lower(&self, bx: DistBox, i: usize) -> BoundExpr {
        let s = self.layout.cfg.s_world;
        match bx {
            DistBox::Concept(Basic::Atomic(c)) => {
                BoundExpr::var(self.layout.concept_lower(c as usize, i))
            }
            DistBox::Concept(Basic::Exists(r)) => {
                let head = if r.inverted { RoleBoxKind::Tail } else { RoleBoxKind::Head };
                BoundExpr::diff(
                    self.layout.role_lower(r.name as usize, head, i),
                    self.layout.role_upper(r.name as usize, RoleBoxKind::Bump, i),
                )
            }
            DistBox::NegConcept(b) => self.box_lower(DistBox::Concept(b), i).negate_plus(-s),
            DistBox::Role(r, kind) => BoundExpr::var(self.layout.role_lower(r as usize, kind, i)),
        }
    }

    /// Upper-bound expression of a dist box at one dimension.
    pub fn box_upper(&self, bx: DistBox, i: usize) -> BoundExpr {
        let s = self.layout.cfg.s_world;
        match bx {
            DistBox::Concept(Basic::Atomic(c)) => {
                BoundExpr::var(self.layout.concept_upper(c as usize, i))
            }
            DistBox::Concept(Basic::Exists(r)) => {
                let head = if r.inverted { RoleBoxKind::Tail } else { RoleBoxKind::Head };
                BoundExpr::diff(
                    self.layout.role_upper(r.name as usize, head, i),
                    self.layout.role_lower(r.name as usize, RoleBoxKind::Bump, i),
                )
            }
            DistBox::NegConcept(b) => self.box_upper(DistBox::Concept(b), i).negate_plus(s),
            DistBox::Role(r, kind) => BoundExpr::var(self.layout.role_upper(r as usize, kind, i)),
        }
    }

    /// Variable indices of a dist point at one dimension.
    pub fn point_vars(&self, p: DistPoint, i: usize) -> (usize, Option<usize>) {
        match p {
            DistPoint::Bumped { a, b } => {
                (self.layout.pos(a as usize, i), Some(self.layout.bump(b as usize, i)))
            }
            DistPoint::BumpOf { a } => (self.layout.bump(a as usize, i), None),
            DistPoint::PosOf { a } => (self.layout.pos(a as usize, i), None),
        }
    }

    /// Membership slack vector y ∈ R^{2d} of one dist term:
    /// y_i = L(i) + ε − x(i), y_{d+i} = x(i) − U(i) + ε.
    pub fn slack_vector(&self, term: &DistTerm, z: &[f64]) -> Vec<f64> {
        let d = self.d();
        let eps = self.layout.cfg.eps;
        let mut y = Vec::with_capacity(2 * d);
        for i in 0..d {
            let (pv, bv) = self.point_vars(term.point, i);
            let x = z[pv] + bv.map_or(0.0, |j| z[j]);
            y.push(self.box_lower(term.bx, i).eval(z) + eps - x);
        }
        for i in 0..d {
            let (pv, bv) = self.point_vars(term.point, i);
            let x = z[pv] + bv.map_or(0.0, |j| z[j]);
            y.push(x - self.box_upper(term.bx, i).eval(z) + eps);
        }
        y
    }

    /// Affine coefficients of slack component j; returns the constant part.
    pub fn slack_coeffs(
        &self,
        term: &DistTerm,
        j: usize,
        mut emit: impl FnMut(usize, f64),
    ) -> f64 {
        let d = self.d();
        let eps = self.layout.cfg.eps;
        if j < d {
            let i = j;
            let bexpr = self.box_lower(term.bx, i);
            bexpr.for_each_coeff(&mut emit);
            let (pv, bv) = self.point_vars(term.point, i);
            emit(pv, -1.0);
            if let Some(b) = bv {
                emit(b, -1.0);
            }
            bexpr.constant + eps
        } else {
            let i = j - d;
            let bexpr = self.box_upper(term.bx, i);
            bexpr.for_each_coeff(|idx, c| emit(idx, -c));
            let (pv, bv) = self.point_vars(term.point, i);
            emit(pv, 1.0);
            if let Some(b) = bv {
                emit(b, 1.0);
            }
            -bexpr.constant + eps
        }
    }

    pub fn dist_value(&self, term: &DistTerm, z: &[f64]) -> f64 {
        sdist_neg_orthant(&self.slack_vector(term, z))
    }

    pub fn loss_value(&self, loss: &LossTerm, z: &[f64]) -> f64 {
        loss.parts
            .iter()
            .map(|t| self.dist_value(t, z))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn width_vars(&self, term: &WidthTerm, i: usize) -> (usize, usize) {
        match term {
            WidthTerm::Concept(c) => (
                self.layout.concept_lower(*c as usize, i),
                self.layout.concept_upper(*c as usize, i),
            ),
            WidthTerm::Role(r, kind) => (
                self.layout.role_lower(*r as usize, *kind, i),
                self.layout.role_upper(*r as usize, *kind, i),
            ),
        }
    }

    pub fn width_value(&self, term: &WidthTerm, z: &[f64]) -> f64 {
        let d = self.d();
        let mut sum = 0.0;
        for i in 0..d {
            let (lo, hi) = self.width_vars(term, i);
            let w = z[hi] - z[lo];
            sum += w * w;
        }
        sum.sqrt()
    }

    /// Exact objective value f_λ(z). Outer maxes over empty term lists
    /// evaluate to zero.
    pub fn evaluate_objective(&self, z: &[f64]) -> Result<f64, ProblemError> {
        if z.len() != self.n() {
            return Err(ProblemError::DimensionMismatch { expected: self.n(), got: z.len() });
        }
        let obj = &self.objective;
        let max_of = |terms: &[LossTerm]| -> f64 {
            if terms.is_empty() {
                0.0
            } else {
                terms
                    .iter()
                    .map(|t| self.loss_value(t, z))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        };
        let mut f = max_of(&obj.assertion_terms);
        f += obj.lambda1 * max_of(&obj.negative_terms);
        f += obj.lambda2 * obj.width_terms_cr.iter().map(|w| self.width_value(w, z)).sum::<f64>();
        f += obj.lambda3
            * obj.width_terms_bump.iter().map(|w| self.width_value(w, z)).sum::<f64>();
        Ok(f)
    }

    /// Largest constraint violation, zero when feasible.
    pub fn feasibility_residual(&self, z: &[f64]) -> Result<f64, ProblemError> {
        if z.len() != self.n() {
            return Err(ProblemError::DimensionMismatch { expected: self.n(), got: z.len() });
        }
        Ok(self.constraints.iter().map(|c| c.violation(z)).fold(0.0, f64::max))
    }

    /// Rebuild the box interpretation from a feasible z, clamping widths
    /// that sit within `tol` of their bounds.
    pub fn extract_interpretation(
        &self,
        z: &[f64],
        tol: f64,
    ) -> Result<BoxInterpretation, ProblemError> {
        let residual = self.feasibility_residual(z)?;
        if residual > tol {
            return Err(ProblemError::InfeasiblePoint { residual, tol });
        }
        let mut eta = self.layout.unpack(z, &self.signature);
        let two_s = 2.0 * self.layout.cfg.s_world;
        let clamp_box = |bx: &mut BoxBounds| {
            for i in 0..bx.dim() {
                let w = bx.upper[i] - bx.lower[i];
                if w < 0.0 && w >= -tol {
                    bx.upper[i] = bx.lower[i];
                } else if w > two_s && w <= two_s + tol {
                    bx.upper[i] = bx.lower[i] + two_s;
                }
            }
        };
        for bx in eta.concept_box.iter_mut() {
            clamp_box(bx);
        }
        for rb in eta.role_boxes.iter_mut() {
            clamp_box(&mut rb.head);
            clamp_box(&mut rb.tail);
            clamp_box(&mut rb.bump);
        }
        Ok(eta)
    }
}

/// Whether negative terms exclude only literally asserted pairs or also
/// entailed memberships.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NegativeMode {
    AssertedOnly,
    EntailmentAware,
}

/// Translate the TBox into halfspaces and the ABox into the objective.
pub fn compile(
    kb: &KnowledgeBase,
    cfg: WorldConfig,
    lambdas: (f64, f64, f64),
    negative_mode: NegativeMode,
) -> Result<CompiledProblem, ProblemError> {
    let sig = &kb.signature;
    let layout = VariableLayout::new(sig, cfg);
    if layout.n() == 0 {
        return Err(ProblemError::EmptyLayout);
    }
    let basics = enumerate_basic_concepts(sig);
    if cfg.d < basics.len() {
        return Err(ProblemError::DimensionTooSmall { required: basics.len(), got: cfg.d });
    }

    let mut problem = CompiledProblem {
        signature: sig.clone(),
        layout,
        constraints: Vec::new(),
        objective: ObjectiveSpec {
            lambda1: lambdas.0,
            lambda2: lambdas.1,
            lambda3: lambdas.2,
            assertion_terms: Vec::new(),
            negative_terms: Vec::new(),
            width_terms_cr: Vec::new(),
            width_terms_bump: Vec::new(),
        },
        concept_dim_assignment: (0..basics.len()).collect(),
    };
    let d = cfg.d;
    let s = cfg.s_world;
    let eps = cfg.eps;

    // One box-consistency halfspace per basic concept at its reserved
    // dimension: (L_C + U_C)/2 ≤ −s/2 on derived bounds.
    for (idx, b) in basics.iter().enumerate() {
        let i_c = problem.concept_dim_assignment[idx];
        let mut terms: Vec<(u32, f64)> = Vec::new();
        let mut constant = 0.0;
        for expr in [
            problem.box_lower(DistBox::Concept(*b), i_c),
            problem.box_upper(DistBox::Concept(*b), i_c),
        ] {
            expr.for_each_coeff(|i, c| terms.push((i as u32, 0.5 * c)));
            constant += 0.5 * expr.constant;
        }
        problem.constraints.push(LinearConstraint { terms, rhs: -s / 2.0 - constant });
    }

    // Width bounds 0 ≤ U − L ≤ 2s for every stored box.
    {
        let layout = problem.layout.clone();
        let mut push_box = |lo0: usize, hi0: usize| {
            for i in 0..d {
                problem.constraints.push(LinearConstraint {
                    terms: vec![((lo0 + i) as u32, 1.0), ((hi0 + i) as u32, -1.0)],
                    rhs: 0.0,
                });
                problem.constraints.push(LinearConstraint {
                    terms: vec![((hi0 + i) as u32, 1.0), ((lo0 + i) as u32, -1.0)],
                    rhs: 2.0 * s,
                });
            }
        };
        for c in 0..sig.n_concepts() {
            push_box(layout.concept_lower(c, 0), layout.concept_upper(c, 0));
        }
        for r in 0..sig.n_roles() {
            for kind in [RoleBoxKind::Head, RoleBoxKind::Tail, RoleBoxKind::Bump] {
                push_box(layout.role_lower(r, kind, 0), layout.role_upper(r, kind, 0));
            }
        }
    }

    // Universe bounds on every position and bump vector.
    for a in 0..sig.n_individuals() {
        for i in 0..d {
            for idx in [problem.layout.pos(a, i), problem.layout.bump(a, i)] {
                problem
                    .constraints
                    .push(LinearConstraint { terms: vec![(idx as u32, 1.0)], rhs: s - eps });
                problem
                    .constraints
                    .push(LinearConstraint { terms: vec![(idx as u32, -1.0)], rhs: s - eps });
            }
        }
    }

    // TBox translations: 2d rows per CI, 6d rows per RI.
    for ax in &kb.tbox {
        match ax {
            Axiom::ConceptIncl { lhs, rhs } => {
                let lhs_box = DistBox::Concept(*lhs);
                let rhs_box = match rhs {
                    crate::ontology::Rhs::Pos(b) => DistBox::Concept(*b),
                    crate::ontology::Rhs::Neg(b) => DistBox::NegConcept(*b),
                };
                for i in 0..d {
                    let rows = [
                        (problem.box_lower(rhs_box, i), problem.box_lower(lhs_box, i)),
                        (problem.box_upper(lhs_box, i), problem.box_upper(rhs_box, i)),
                    ];
                    for (small, big) in rows {
                        push_le(&mut problem.constraints, small, big);
                    }
                }
            }
            Axiom::RoleIncl { lhs, rhs } => {
                for kind in [RoleBoxKind::Head, RoleBoxKind::Tail, RoleBoxKind::Bump] {
                    let lk = oriented_kind(kind, lhs.inverted);
                    let rk = oriented_kind(kind, rhs.inverted);
                    for i in 0..d {
                        let l_lo = problem.layout.role_lower(lhs.name as usize, lk, i);
                        let l_hi = problem.layout.role_upper(lhs.name as usize, lk, i);
                        let r_lo = problem.layout.role_lower(rhs.name as usize, rk, i);
                        let r_hi = problem.layout.role_upper(rhs.name as usize, rk, i);
                        problem.constraints.push(LinearConstraint {
                            terms: vec![(r_lo as u32, 1.0), (l_lo as u32, -1.0)],
                            rhs: 0.0,
                        });
                        problem.constraints.push(LinearConstraint {
                            terms: vec![(l_hi as u32, 1.0), (r_hi as u32, -1.0)],
                            rhs: 0.0,
                        });
                    }
                }
            }
            _ => {}
        }
    }

    // Objective: assertion losses from the ABox.
    let show = |ax: &Axiom| crate::ontology::AxiomDisplay(ax, sig).to_string();
    for ax in &kb.abox {
        match ax {
            Axiom::ConceptAssert { concept, individual } => {
                problem.objective.assertion_terms.push(LossTerm {
                    label: show(ax),
                    parts: vec![DistTerm {
                        bx: DistBox::Concept(*concept),
                        point: DistPoint::PosOf { a: *individual },
                    }],
                });
            }
            Axiom::RoleAssert { role, subject, object } => {
                problem.objective.assertion_terms.push(LossTerm {
                    label: show(ax),
                    parts: vec![
                        DistTerm {
                            bx: DistBox::Role(*role, RoleBoxKind::Head),
                            point: DistPoint::Bumped { a: *subject, b: *object },
                        },
                        DistTerm {
                            bx: DistBox::Role(*role, RoleBoxKind::Tail),
                            point: DistPoint::Bumped { a: *object, b: *subject },
                        },
                        DistTerm {
                            bx: DistBox::Role(*role, RoleBoxKind::Bump),
                            point: DistPoint::BumpOf { a: *subject },
                        },
                        DistTerm {
                            bx: DistBox::Role(*role, RoleBoxKind::Bump),
                            point: DistPoint::BumpOf { a: *object },
                        },
                    ],
                });
            }
            _ => {}
        }
    }

    // Negative-concept regularization over non-asserted (D, a) pairs.
    let asserted: std::collections::BTreeSet<(Basic, IndividualId)> = kb
        .abox
        .iter()
        .filter_map(|ax| match ax {
            Axiom::ConceptAssert { concept, individual } => Some((*concept, *individual)),
            _ => None,
        })
        .collect();
    let entailed_memberships = match negative_mode {
        NegativeMode::AssertedOnly => None,
        NegativeMode::EntailmentAware => Some(crate::reasoner::Closure::compute(kb).memberships),
    };
    for (idx, b) in basics.iter().enumerate() {
        for a in 0..sig.n_individuals() {
            if asserted.contains(&(*b, a as IndividualId)) {
                continue;
            }
            if let Some(memb) = &entailed_memberships {
                if memb[a][idx] {
                    continue;
                }
            }
            problem.objective.negative_terms.push(LossTerm {
                label: format!(
                    "neg {} {}",
                    crate::ontology::basic_token(*b, sig),
                    sig.individual_name(a as u32)
                ),
                parts: vec![DistTerm {
                    bx: DistBox::NegConcept(*b),
                    point: DistPoint::PosOf { a: a as IndividualId },
                }],
            });
        }
    }

    // Width regularizers.
    for c in 0..sig.n_concepts() {
        problem.objective.width_terms_cr.push(WidthTerm::Concept(c as u32));
    }
    for r in 0..sig.n_roles() {
        problem.objective.width_terms_cr.push(WidthTerm::Role(r as u32, RoleBoxKind::Head));
        problem.objective.width_terms_cr.push(WidthTerm::Role(r as u32, RoleBoxKind::Tail));
        problem.objective.width_terms_bump.push(WidthTerm::Role(r as u32, RoleBoxKind::Bump));
    }

    Ok(problem)
}

fn oriented_kind(kind: RoleBoxKind, inverted: bool) -> RoleBoxKind {
    match (kind, inverted) {
        (RoleBoxKind::Head, true) => RoleBoxKind::Tail,
        (RoleBoxKind::Tail, true) => RoleBoxKind::Head,
        (k, _) => k,
    }
}

/// Emit `small ≤ big` as one halfspace.
fn push_le(constraints: &mut Vec<LinearConstraint>, small: BoundExpr, big: BoundExpr) {
    let mut terms: Vec<(u32, f64)> = Vec::new();
    small.for_each_coeff(|i, c| terms.push((i as u32, c)));
    big.for_each_coeff(|i, c| terms.push((i as u32, -c)));
    let rhs = big.constant - small.constant;
    constraints.push(LinearConstraint { terms, rhs });
}

/// Exact row count of the compiled polyhedron for a KB at dimension d:
/// one consistency row per basic concept, 2d width rows per stored box,
/// 4d universe rows per individual, 2d rows per CI, 6d rows per RI.
pub fn expected_constraint_count(kb: &KnowledgeBase, d: usize) -> usize {
    let sig = &kb.signature;
    let n_ci = kb.tbox.iter().filter(|a| matches!(a, Axiom::ConceptIncl { .. })).count();
    let n_ri = kb.tbox.iter().filter(|a| matches!(a, Axiom::RoleIncl { .. })).count();
    sig.n_basic_concepts()
        + 2 * d * (sig.n_concepts() + 3 * sig.n_roles())
        + 4 * d * sig.n_individuals()
        + 2 * d * n_ci
        + 6 * d * n_ri
}
