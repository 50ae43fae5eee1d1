//! Box interpretations and their algebra: ε-shrunk membership, complement
//! boxes, derived existential boxes, axiom satisfaction, box consistency,
//! and signed distances to boxes.

use crate::ontology::{Axiom, Basic, Rhs, Role, Signature};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("axiom mentions a symbol outside the interpretation signature")]
    UnknownSymbol,
    #[error("invalid world config: {0}")]
    BadConfig(String),
}

/// Embedding dimension, universe half-width s_Ω, and membership margin ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub d: usize,
    pub s_world: f64,
    pub eps: f64,
}

impl WorldConfig {
    pub fn new(d: usize, s_world: f64, eps: f64) -> Result<Self, GeometryError> {
        if d == 0 {
            return Err(GeometryError::BadConfig("d must be positive".into()));
        }
        if s_world.is_nan() || s_world <= 0.0 {
            return Err(GeometryError::BadConfig("s_world must be positive".into()));
        }
        if !(eps > 0.0 && eps <= 0.5 && eps <= s_world / 8.0) {
            return Err(GeometryError::BadConfig(format!(
                "eps must satisfy 0 < eps <= 0.5 and eps <= s_world/8, got {eps}"
            )));
        }
        Ok(WorldConfig { d, s_world, eps })
    }
}

/// Axis-aligned box given by stored lower/upper bounds. The point set is
/// the ε-shrunk region {x | L + ε ≤ x ≤ U − ε}; a box is empty iff some
/// dimension has width below 2ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        BoxBounds { lower, upper }
    }

    /// The canonical empty box: all bounds zero.
    pub fn empty(d: usize) -> Self {
        BoxBounds { lower: vec![0.0; d], upper: vec![0.0; d] }
    }

    /// Constant bounds in every dimension.
    pub fn uniform(d: usize, lower: f64, upper: f64) -> Self {
        BoxBounds { lower: vec![lower; d], upper: vec![upper; d] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self, cfg: &WorldConfig) -> bool {
        self.lower
            .iter()
            .zip(&self.upper)
            .any(|(l, u)| u - l < 2.0 * cfg.eps)
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }
}

/// ε-shrunk membership: L + ε ≤ x ≤ U − ε in every dimension.
pub fn membership(bx: &BoxBounds, x: &[f64], cfg: &WorldConfig) -> Result<bool, GeometryError> {
    if x.len() != bx.dim() {
        return Err(GeometryError::DimensionMismatch { expected: bx.dim(), got: x.len() });
    }
    Ok(x.iter()
        .enumerate()
        .all(|(i, xi)| bx.lower[i] + cfg.eps <= *xi && *xi <= bx.upper[i] - cfg.eps))
}

/// Complement box: (−s_Ω − L, s_Ω − U) per dimension.
pub fn complement(bx: &BoxBounds, cfg: &WorldConfig) -> BoxBounds {
    BoxBounds {
        lower: bx.lower.iter().map(|l| -cfg.s_world - l).collect(),
        upper: bx.upper.iter().map(|u| cfg.s_world - u).collect(),
    }
}

/// Box containment decided on stored bounds, with the convention that an
/// empty box is contained in every box.
pub fn box_subseteq(inner: &BoxBounds, outer: &BoxBounds, cfg: &WorldConfig) -> bool {
    if inner.is_empty(cfg) {
        return true;
    }
    if outer.is_empty(cfg) {
        return false;
    }
    inner
        .lower
        .iter()
        .zip(&outer.lower)
        .all(|(li, lo)| lo <= li)
        && inner.upper.iter().zip(&outer.upper).all(|(ui, uo)| ui <= uo)
}

/// Point-set disjointness of two boxes, decided per dimension.
pub fn boxes_disjoint(a: &BoxBounds, b: &BoxBounds, cfg: &WorldConfig) -> bool {
    if a.is_empty(cfg) || b.is_empty(cfg) {
        return true;
    }
    (0..a.dim()).any(|i| {
        let lo = a.lower[i].max(b.lower[i]) + cfg.eps;
        let hi = a.upper[i].min(b.upper[i]) - cfg.eps;
        lo > hi
    })
}

/// Per-role boxes of a box interpretation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleBoxes {
    pub head: BoxBounds,
    pub tail: BoxBounds,
    pub bump: BoxBounds,
}

impl RoleBoxes {
    /// Head/tail/bump of the (possibly inverted) role.
    pub fn oriented(&self, inverted: bool) -> (&BoxBounds, &BoxBounds, &BoxBounds) {
        if inverted {
            (&self.tail, &self.head, &self.bump)
        } else {
            (&self.head, &self.tail, &self.bump)
        }
    }
}

/// Derived box of ∃S: the oriented head enlarged by the bump box,
/// L^H − U^B and U^H − L^B per dimension.
pub fn exists_box(role_boxes: &RoleBoxes, inverted: bool) -> BoxBounds {
    let (head, _, bump) = role_boxes.oriented(inverted);
    BoxBounds {
        lower: head.lower.iter().zip(&bump.upper).map(|(l, ub)| l - ub).collect(),
        upper: head.upper.iter().zip(&bump.lower).map(|(u, lb)| u - lb).collect(),
    }
}

/// Truth status of a concept assertion in a box interpretation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Satisfaction {
    Satisfied,
    Falsified,
    Unknown,
}

/// A geometric model: positions and bumps per individual, a box per
/// concept name, three boxes per role name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxInterpretation {
    pub config: WorldConfig,
    pub signature: Signature,
    pub pos: Vec<Vec<f64>>,
    pub bump: Vec<Vec<f64>>,
    pub concept_box: Vec<BoxBounds>,
    pub role_boxes: Vec<RoleBoxes>,
}

impl BoxInterpretation {
    /// Box of a basic concept: stored for names, derived for existentials.
    pub fn basic_box(&self, b: Basic) -> BoxBounds {
        match b {
            Basic::Atomic(c) => self.concept_box[c as usize].clone(),
            Basic::Exists(r) => exists_box(&self.role_boxes[r.name as usize], r.inverted),
        }
    }

    pub fn rhs_box(&self, rhs: Rhs) -> BoxBounds {
        match rhs {
            Rhs::Pos(b) => self.basic_box(b),
            Rhs::Neg(b) => complement(&self.basic_box(b), &self.config),
        }
    }

    fn check_symbols(&self, ax: &Axiom) -> Result<(), GeometryError> {
        let sig = &self.signature;
        let role_ok = |r: &Role| (r.name as usize) < sig.n_roles();
        let basic_ok = |b: &Basic| match b {
            Basic::Atomic(c) => (*c as usize) < sig.n_concepts(),
            Basic::Exists(r) => role_ok(r),
        };
        let ind_ok = |i: &u32| (*i as usize) < sig.n_individuals();
        let ok = match ax {
            Axiom::ConceptIncl { lhs, rhs } => basic_ok(lhs) && basic_ok(&rhs.basic()),
            Axiom::RoleIncl { lhs, rhs } => role_ok(lhs) && role_ok(rhs),
            Axiom::ConceptAssert { concept, individual } => basic_ok(concept) && ind_ok(individual),
            Axiom::RoleAssert { role, subject, object } => {
                (*role as usize) < sig.n_roles() && ind_ok(subject) && ind_ok(object)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(GeometryError::UnknownSymbol)
        }
    }

    /// Axiom satisfaction. Concept assertions are tri-state; every other
    /// axiom kind maps to Satisfied or Falsified.
    pub fn satisfies(&self, ax: &Axiom) -> Result<Satisfaction, GeometryError> {
        self.check_symbols(ax)?;
        let cfg = &self.config;
        let verdict = |b: bool| if b { Satisfaction::Satisfied } else { Satisfaction::Falsified };
        Ok(match ax {
            Axiom::ConceptIncl { lhs, rhs } => {
                verdict(box_subseteq(&self.basic_box(*lhs), &self.rhs_box(*rhs), cfg))
            }
            Axiom::RoleIncl { lhs, rhs } => {
                let (lh, lt, lb) = self.role_boxes[lhs.name as usize].oriented(lhs.inverted);
                let (rh, rt, rb) = self.role_boxes[rhs.name as usize].oriented(rhs.inverted);
                verdict(
                    box_subseteq(lh, rh, cfg)
                        && box_subseteq(lt, rt, cfg)
                        && box_subseteq(lb, rb, cfg),
                )
            }
            Axiom::ConceptAssert { concept, individual } => {
                let bx = self.basic_box(*concept);
                let p = &self.pos[*individual as usize];
                if membership(&bx, p, cfg)? {
                    Satisfaction::Satisfied
                } else if membership(&complement(&bx, cfg), p, cfg)? {
                    Satisfaction::Falsified
                } else {
                    Satisfaction::Unknown
                }
            }
            Axiom::RoleAssert { role, subject, object } => {
                let boxes = &self.role_boxes[*role as usize];
                let pa = &self.pos[*subject as usize];
                let pb = &self.pos[*object as usize];
                let ba = &self.bump[*subject as usize];
                let bb = &self.bump[*object as usize];
                let head_pt: Vec<f64> = pa.iter().zip(bb).map(|(x, y)| x + y).collect();
                let tail_pt: Vec<f64> = pb.iter().zip(ba).map(|(x, y)| x + y).collect();
                verdict(
                    membership(&boxes.head, &head_pt, cfg)?
                        && membership(&boxes.tail, &tail_pt, cfg)?
                        && membership(&boxes.bump, ba, cfg)?
                        && membership(&boxes.bump, bb, cfg)?,
                )
            }
        })
    }

    pub fn is_satisfied(&self, ax: &Axiom) -> Result<bool, GeometryError> {
        Ok(self.satisfies(ax)? == Satisfaction::Satisfied)
    }

    /// No basic concept's box intersects its complement box.
    pub fn is_box_consistent(&self) -> bool {
        for b in crate::ontology::enumerate_basic_concepts(&self.signature) {
            let bx = self.basic_box(b);
            let comp = complement(&bx, &self.config);
            if !boxes_disjoint(&bx, &comp, &self.config) {
                return false;
            }
        }
        true
    }
}

/// Signed distance from y to the nonpositive orthant: ‖y⁺‖₂ outside,
/// max_i y_i inside.
pub fn sdist_neg_orthant(y: &[f64]) -> f64 {
    assert!(!y.is_empty());
    if y.iter().any(|v| *v > 0.0) {
        y.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt()
    } else {
        y.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Concatenated slack vector of a box membership test: (L + ε − x) ⊕
/// (x − U + ε) ∈ R^{2d}.
pub fn box_slack(bx: &BoxBounds, x: &[f64], cfg: &WorldConfig) -> Vec<f64> {
    let d = bx.dim();
    let mut y = Vec::with_capacity(2 * d);
    for i in 0..d {
        y.push(bx.lower[i] + cfg.eps - x[i]);
    }
    for i in 0..d {
        y.push(x[i] - bx.upper[i] + cfg.eps);
    }
    y
}

/// Signed distance from a point to a box: negative strictly inside the
/// ε-shrunk box, positive outside.
pub fn dist_box(bx: &BoxBounds, x: &[f64], cfg: &WorldConfig) -> Result<f64, GeometryError> {
    if x.len() != bx.dim() {
        return Err(GeometryError::DimensionMismatch { expected: bx.dim(), got: x.len() });
    }
    Ok(sdist_neg_orthant(&box_slack(bx, x, cfg)))
}
