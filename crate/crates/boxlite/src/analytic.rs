//! Deterministic construction of provably faithful box interpretations
//! from finite interpretations, the end-to-end faithful-model constructor,
//! dimension bounds, dimension padding, and the faithfulness auditor.
//!
//! The construction fixes s_Ω = 4 and reserves one dimension per basic
//! concept plus one dimension per (role, domain element) pair. Concept
//! dimensions carry the extension-relation bands of `bank`; role-element
//! dimensions are uniform across roles, chosen so that every derived
//! existential box lands exactly on the concept-dimension band (for the
//! reserved dimensions) or on the full role band (for role-element
//! dimensions). Uniform role dimensions keep all box-containment tests
//! monotone under extension inclusion, which gives:
//!
//! - concept inclusions and concept assertions hold in the embedding
//!   exactly when they hold in the source interpretation, and
//! - role inclusions and role assertions true in the source always hold
//!   in the embedding (the converse reduces to their existential
//!   projections).
//!
//! Together with box consistency this makes the embedding of a canonical
//! model a KB-entailed, weakly faithful model.

use crate::geometry::{BoxBounds, BoxInterpretation, RoleBoxes, Satisfaction, WorldConfig};
use crate::ontology::{
    enumerate_basic_concepts, Axiom, AxiomDisplay, Basic, KnowledgeBase, Signature,
};
use crate::reasoner::{Interpretation, Reasoner, ReasonerError, WitnessDomain};

/// Fixed analytic constants. Concept-dimension bands encode how a concept's
/// extension relates to the reserved dimension's concept; role-dimension
/// boxes encode edge-local structure. All values assume s_Ω = 4.
pub mod bank {
    /// Universe half-width used by every analytic embedding.
    pub const S_WORLD: f64 = 4.0;

    // Concept-dimension bands (lower, upper).
    pub const SEQ: (f64, f64) = (-4.0, -0.5);
    pub const I_SUB: (f64, f64) = (-2.0, -0.5);
    pub const I_SUP: (f64, f64) = (-4.0, 2.0);
    pub const I_NOT_SUP: (f64, f64) = (0.0, 2.0);
    pub const I_CAP: (f64, f64) = (-2.0, 2.0);
    pub const I_ZERO: (f64, f64) = (0.0, 0.0);
    pub const OMEGA: (f64, f64) = (-4.0, 4.0);
    pub const S_EMPTY: (f64, f64) = (0.0, 0.0);

    // Concept-dimension points.
    pub const P_C: f64 = -1.0;
    pub const P_NEG_C: f64 = 1.0;
    pub const B_C: f64 = 0.0;

    // Role-dimension boxes.
    pub const ROLE_FULL: (f64, f64) = (-2.0, 2.0);
    pub const S_SUB: (f64, f64) = (-1.0, 1.0);
    pub const S_NEG_SUB: (f64, f64) = (-2.0, 1.0);
    pub const B_RI: (f64, f64) = (-1.0, 1.0);
    pub const B_NEG_RI: (f64, f64) = (-1.0, 0.0);

    // Role-dimension points.
    pub fn p_r(eps: f64) -> f64 {
        -1.0 + eps
    }
    pub fn p_neg_r(eps: f64) -> f64 {
        1.0 - eps
    }
    /// Interior bump value: the midpoint of the role-dimension bump box.
    pub const B_R_FLAT: f64 = -0.5;
}

/// Largest ε the analytic construction supports: twice-shrunk concept
/// bands must still admit the bumped points ±1.
pub const EPS_MAX_ANALYTIC: f64 = 0.25;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AnalyticError {
    #[error("knowledge base is unsatisfiable")]
    UnsatKb,
    #[error("eps must satisfy 0 < eps <= 0.25, got {0}")]
    InvalidEps(String),
    #[error("target dimension {target} is below current dimension {current}")]
    InvalidTarget { target: usize, current: usize },
}

impl From<ReasonerError> for AnalyticError {
    fn from(_: ReasonerError) -> Self {
        AnalyticError::UnsatKb
    }
}

/// Dimension indices reserved per basic concept and per (role, element)
/// pair: a bijection onto 0..d-1.
#[derive(Debug, Clone)]
pub struct DimensionPlan {
    pub n_concept_dims: usize,
    pub n_roles: usize,
    pub n_elements: usize,
}

impl DimensionPlan {
    pub fn new(sig: &Signature, n_elements: usize) -> Self {
        DimensionPlan {
            n_concept_dims: sig.n_basic_concepts(),
            n_roles: sig.n_roles(),
            n_elements,
        }
    }
    pub fn total(&self) -> usize {
        self.n_concept_dims + self.n_roles * self.n_elements
    }
    pub fn concept_dim(&self, nce_index: usize) -> usize {
        nce_index
    }
    pub fn role_element_dim(&self, role: usize, element: usize) -> usize {
        self.n_concept_dims + role * self.n_elements + element
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Band {
    Eq,
    Sub,
    Sup,
    NotSup,
    Cap,
}

impl Band {
    fn bounds(self) -> (f64, f64) {
        match self {
            Band::Eq => bank::SEQ,
            Band::Sub => bank::I_SUB,
            Band::Sup => bank::I_SUP,
            Band::NotSup => bank::I_NOT_SUP,
            Band::Cap => bank::I_CAP,
        }
    }
}

/// Case analysis on how D's extension relates to C's: equal, proper
/// subset, proper superset, disjoint nonempty, or overlapping.
fn band(d_ext: &[bool], c_ext: &[bool]) -> Band {
    let mut d_minus_c = false;
    let mut c_minus_d = false;
    let mut meet = false;
    let mut c_nonempty = false;
    for (dv, cv) in d_ext.iter().zip(c_ext) {
        c_nonempty |= *cv;
        match (dv, cv) {
            (true, true) => meet = true,
            (true, false) => d_minus_c = true,
            (false, true) => c_minus_d = true,
            _ => {}
        }
    }
    if !d_minus_c && !c_minus_d && meet {
        Band::Eq
    } else if !d_minus_c && c_minus_d && meet {
        Band::Sub
    } else if d_minus_c && !c_minus_d && c_nonempty {
        Band::Sup
    } else if !meet && c_nonempty {
        Band::NotSup
    } else {
        Band::Cap
    }
}

/// Translate a finite interpretation into a box interpretation with
/// d = |N_C^∃| + |N_R|·|Δ| dimensions and s_Ω = 4.
pub fn embed_interpretation(
    interp: &Interpretation,
    eps: f64,
) -> Result<BoxInterpretation, AnalyticError> {
    if !(eps > 0.0 && eps <= EPS_MAX_ANALYTIC) {
        return Err(AnalyticError::InvalidEps(format!("{eps}")));
    }
    let sig = interp.signature.clone();
    let plan = DimensionPlan::new(&sig, interp.n_elements());
    let d = plan.total();
    let config = WorldConfig { d, s_world: bank::S_WORLD, eps };

    let basics = enumerate_basic_concepts(&sig);
    let exts: Vec<Vec<bool>> = basics.iter().map(|b| interp.basic_ext(*b)).collect();
    let nonempty: Vec<bool> = exts.iter().map(|e| e.iter().any(|v| *v)).collect();

    // Band assignment for every basic concept at every concept dimension;
    // None for concepts with empty extension.
    let concept_band = |d_idx: usize, c_idx: usize| -> Option<Band> {
        if !nonempty[d_idx] {
            return None;
        }
        Some(band(&exts[d_idx], &exts[c_idx]))
    };

    // Full box of a basic concept under the plan: bands on concept dims,
    // the full role band elsewhere; the canonical empty box for empty
    // extensions.
    let concept_full_box = |d_idx: usize| -> BoxBounds {
        if !nonempty[d_idx] {
            return BoxBounds::empty(d);
        }
        let mut lower = vec![bank::ROLE_FULL.0; d];
        let mut upper = vec![bank::ROLE_FULL.1; d];
        for c_idx in 0..basics.len() {
            let (l, u) = concept_band(d_idx, c_idx).expect("nonempty").bounds();
            lower[plan.concept_dim(c_idx)] = l;
            upper[plan.concept_dim(c_idx)] = u;
        }
        BoxBounds { lower, upper }
    };

    let mut concept_box = Vec::with_capacity(sig.n_concepts());
    for c in 0..sig.n_concepts() {
        concept_box.push(concept_full_box(Basic::Atomic(c as u32).nce_index(&sig)));
    }

    // Role boxes: head and tail store the ε-shrunk existential bands so
    // the derived boxes reproduce them exactly once the bump box margins
    // are added back; role dimensions are uniform.
    let mut role_boxes = Vec::with_capacity(sig.n_roles());
    for r in 0..sig.n_roles() {
        let fwd = sig.n_concepts() + 2 * r;
        if !nonempty[fwd] {
            role_boxes.push(RoleBoxes {
                head: BoxBounds::empty(d),
                tail: BoxBounds::empty(d),
                bump: BoxBounds::empty(d),
            });
            continue;
        }
        let shrunk = |idx: usize| -> BoxBounds {
            let full = concept_full_box(idx);
            let mut lower = vec![bank::S_NEG_SUB.0; d];
            let mut upper = vec![bank::S_NEG_SUB.1; d];
            for c_idx in 0..basics.len() {
                let dim = plan.concept_dim(c_idx);
                lower[dim] = full.lower[dim] + eps;
                upper[dim] = full.upper[dim] - eps;
            }
            BoxBounds { lower, upper }
        };
        let mut bump_lower = vec![bank::B_NEG_RI.0; d];
        let mut bump_upper = vec![bank::B_NEG_RI.1; d];
        for c_idx in 0..basics.len() {
            let dim = plan.concept_dim(c_idx);
            bump_lower[dim] = bank::I_ZERO.0 - eps;
            bump_upper[dim] = bank::I_ZERO.1 + eps;
        }
        role_boxes.push(RoleBoxes {
            head: shrunk(fwd),
            tail: shrunk(fwd + 1),
            bump: BoxBounds { lower: bump_lower, upper: bump_upper },
        });
    }

    // Individual positions and bumps.
    let mut pos = Vec::with_capacity(sig.n_individuals());
    let mut bump = Vec::with_capacity(sig.n_individuals());
    for a in 0..sig.n_individuals() {
        let elem = interp.individual_map[a] as usize;
        let mut p = vec![0.0; d];
        let mut q = vec![0.0; d];
        for (c_idx, ext) in exts.iter().enumerate() {
            let dim = plan.concept_dim(c_idx);
            p[dim] = if ext[elem] { bank::P_C } else { bank::P_NEG_C };
            q[dim] = bank::B_C;
        }
        for r in 0..sig.n_roles() {
            for e in 0..interp.n_elements() {
                let dim = plan.role_element_dim(r, e);
                p[dim] = if elem == e { bank::p_r(eps) } else { bank::p_neg_r(eps) };
                q[dim] = bank::B_R_FLAT;
            }
        }
        pos.push(p);
        bump.push(q);
    }

    Ok(BoxInterpretation { config, signature: sig, pos, bump, concept_box, role_boxes })
}

/// Analytic faithful model: embed the canonical model of a satisfiable KB.
pub fn faithful_embedding(
    kb: &KnowledgeBase,
    witness: WitnessDomain,
    eps: f64,
) -> Result<BoxInterpretation, AnalyticError> {
    let reasoner = Reasoner::new(kb);
    let model = reasoner.canonical_model(witness)?;
    embed_interpretation(&model, eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimBoundMode {
    /// TBox-faithful bound: |N_C| + 3|N_R|.
    Tbox,
    /// KB-faithful bound: |N_C| + |N_R|(2 + |N_I| + 2|N_R|).
    Kb,
}

/// Minimal dimension for which the analytic construction certifies a
/// faithful model of the requested kind.
pub fn d_min(sig: &Signature, mode: DimBoundMode) -> usize {
    let (nc, nr, ni) = (sig.n_concepts(), sig.n_roles(), sig.n_individuals());
    match mode {
        DimBoundMode::Tbox => nc + 3 * nr,
        DimBoundMode::Kb => nc + nr * (2 + ni + 2 * nr),
    }
}

/// Duplicate the last dimension until the embedding has `target_d`
/// dimensions; preserves the satisfaction status of every axiom.
pub fn pad_dimensions(
    eta: &BoxInterpretation,
    target_d: usize,
) -> Result<BoxInterpretation, AnalyticError> {
    let current = eta.config.d;
    if target_d < current {
        return Err(AnalyticError::InvalidTarget { target: target_d, current });
    }
    let mut out = eta.clone();
    let extra = target_d - current;
    let extend_vec = |v: &mut Vec<f64>| {
        let last = *v.last().expect("nonzero dimension");
        v.extend(std::iter::repeat_n(last, extra));
    };
    let extend_box = |b: &mut BoxBounds| {
        let l = *b.lower.last().expect("nonzero dimension");
        let u = *b.upper.last().expect("nonzero dimension");
        b.lower.extend(std::iter::repeat_n(l, extra));
        b.upper.extend(std::iter::repeat_n(u, extra));
    };
    for v in out.pos.iter_mut().chain(out.bump.iter_mut()) {
        extend_vec(v);
    }
    for b in out.concept_box.iter_mut() {
        extend_box(b);
    }
    for rb in out.role_boxes.iter_mut() {
        extend_box(&mut rb.head);
        extend_box(&mut rb.tail);
        extend_box(&mut rb.bump);
    }
    out.config.d = target_d;
    Ok(out)
}

/// Faithfulness audit over the complete finite axiom space.
#[derive(Debug, Clone)]
pub struct FaithfulnessReport {
    /// Every KB axiom is satisfied.
    pub kb_model: bool,
    pub box_consistent: bool,
    /// Every entailed named-form axiom is satisfied.
    pub kb_entailed: bool,
    /// Every satisfied named-form axiom is consistent with the KB.
    pub weakly_faithful: bool,
    pub violations: Vec<String>,
}

impl FaithfulnessReport {
    pub fn all_good(&self) -> bool {
        self.kb_model && self.box_consistent && self.kb_entailed && self.weakly_faithful
    }
}

pub fn audit_faithfulness(
    eta: &BoxInterpretation,
    kb: &KnowledgeBase,
) -> Result<FaithfulnessReport, AnalyticError> {
    let reasoner = Reasoner::new(kb);
    if !reasoner.is_satisfiable() {
        return Err(AnalyticError::UnsatKb);
    }
    let mut report = FaithfulnessReport {
        kb_model: true,
        box_consistent: eta.is_box_consistent(),
        kb_entailed: true,
        weakly_faithful: true,
        violations: Vec::new(),
    };
    let show = |ax: &Axiom| AxiomDisplay(ax, &kb.signature).to_string();
    for ax in kb.axioms() {
        if eta.satisfies(ax).ok() != Some(Satisfaction::Satisfied) {
            report.kb_model = false;
            report.violations.push(format!("kb axiom not satisfied: {}", show(ax)));
        }
    }
    for ax in crate::reasoner::named_form_axiom_space(&kb.signature) {
        let satisfied = eta.satisfies(&ax).ok() == Some(Satisfaction::Satisfied);
        if reasoner.entails(&ax).expect("satisfiable") && !satisfied {
            report.kb_entailed = false;
            report.violations.push(format!("entailed but not satisfied: {}", show(&ax)));
        }
        if satisfied && !reasoner.is_consistent_with(&ax) {
            report.weakly_faithful = false;
            report.violations.push(format!("satisfied but inconsistent: {}", show(&ax)));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{box_subseteq, membership};
    use crate::ontology::{parse_kb, Rhs};
    use crate::reasoner::model_check;

    #[test]
    fn bank_band_geometry() {
        let cfg = WorldConfig { d: 1, s_world: 4.0, eps: 0.01 };
        let bx = |t: (f64, f64)| BoxBounds::uniform(1, t.0, t.1);
        assert!(box_subseteq(&bx(bank::I_SUB), &bx(bank::SEQ), &cfg));
        assert!(box_subseteq(&bx(bank::S_SUB), &bx(bank::S_NEG_SUB), &cfg));
        assert!(!box_subseteq(&bx(bank::S_NEG_SUB), &bx(bank::S_SUB), &cfg));
        assert!(box_subseteq(&bx(bank::B_NEG_RI), &bx(bank::B_RI), &cfg));
        for t in [bank::SEQ, bank::I_SUB, bank::I_SUP, bank::I_NOT_SUP, bank::I_CAP, bank::ROLE_FULL] {
            assert!(t.1 - t.0 <= 2.0 * bank::S_WORLD && t.1 - t.0 >= 0.0);
        }
        // P_C sits in the positive bands, P_NEG_C in the complementary ones.
        for t in [bank::SEQ, bank::I_SUP, bank::I_SUB, bank::I_CAP] {
            assert!(membership(&bx(t), &[bank::P_C], &cfg).unwrap());
        }
        for t in [bank::I_NOT_SUP, bank::I_SUP, bank::I_CAP] {
            assert!(membership(&bx(t), &[bank::P_NEG_C], &cfg).unwrap());
        }
        assert!(!membership(&bx(bank::SEQ), &[bank::P_NEG_C], &cfg).unwrap());
        assert!(!membership(&bx(bank::I_NOT_SUP), &[bank::P_C], &cfg).unwrap());
        assert_eq!(bank::I_ZERO, bank::S_EMPTY);
        assert_eq!(bank::OMEGA, (-bank::S_WORLD, bank::S_WORLD));
    }

    #[test]
    fn singleton_interpretation_embedding() {
        // Δ = {e}, A^I = {e}, a^I = e, R^I = ∅.
        let kb = parse_kb("concept A\nrole R\nca A a").unwrap();
        let interp = Interpretation {
            signature: kb.signature.clone(),
            elements: vec![crate::reasoner::Element::Named(0)],
            concept_ext: vec![vec![true]],
            role_ext: vec![Default::default()],
            individual_map: vec![0],
        };
        let eta = embed_interpretation(&interp, 0.01).unwrap();
        assert_eq!(eta.config.d, 3 + 1);
        let i_a = 0usize;
        assert_eq!(eta.pos[0][i_a], bank::P_C);
        assert_eq!(eta.concept_box[0].lower[i_a], bank::SEQ.0);
        assert_eq!(eta.concept_box[0].upper[i_a], bank::SEQ.1);
        assert!(eta.is_box_consistent());
        // Empty-extension existentials embed as empty boxes.
        let ex_r = Basic::Exists(crate::ontology::Role::direct(0));
        assert!(eta.basic_box(ex_r).is_empty(&eta.config));
        // Midpoint bound at reserved dimensions for nonempty concepts.
        let bx = &eta.concept_box[0];
        assert!((bx.lower[i_a] + bx.upper[i_a]) / 2.0 <= -bank::S_WORLD / 2.0);
    }

    #[test]
    fn all_empty_interpretation_embeds_to_empty_boxes() {
        let kb = parse_kb("concept A\nconcept B\nrole R").unwrap();
        let interp = Interpretation {
            signature: kb.signature.clone(),
            elements: vec![crate::reasoner::Element::Witness(
                crate::reasoner::WitnessConcept::Basic(0),
            )],
            concept_ext: vec![vec![false], vec![false]],
            role_ext: vec![Default::default()],
            individual_map: vec![],
        };
        let eta = embed_interpretation(&interp, 0.1).unwrap();
        for c in 0..2 {
            assert!(eta.concept_box[c].is_empty(&eta.config));
        }
    }

    /// Deterministic small random interpretations for agreement tests.
    fn random_interpretations(kb: &KnowledgeBase, n: usize, seed: u64) -> Vec<Interpretation> {
        let mut rng = crate::rng::Rng::new(seed);
        let mut out = Vec::new();
        for _ in 0..n {
            let n_el = 1 + rng.below(3);
            let elements = (0..n_el)
                .map(|i| {
                    if i < kb.signature.n_individuals() {
                        crate::reasoner::Element::Named(i as u32)
                    } else {
                        crate::reasoner::Element::Witness(crate::reasoner::WitnessConcept::Basic(i))
                    }
                })
                .collect();
            let concept_ext = (0..kb.signature.n_concepts())
                .map(|_| (0..n_el).map(|_| rng.below(2) == 1).collect())
                .collect();
            let role_ext = (0..kb.signature.n_roles())
                .map(|_| {
                    let mut s = std::collections::BTreeSet::new();
                    for x in 0..n_el {
                        for y in 0..n_el {
                            if rng.below(3) == 0 {
                                s.insert((x as u32, y as u32));
                            }
                        }
                    }
                    s
                })
                .collect();
            let individual_map =
                (0..kb.signature.n_individuals()).map(|_| rng.below(n_el) as u32).collect();
            out.push(Interpretation {
                signature: kb.signature.clone(),
                elements,
                concept_ext,
                role_ext,
                individual_map,
            });
        }
        out
    }

    #[test]
    fn embedding_agrees_with_model_check() {
        let kb = parse_kb("concept A\nconcept B\nrole R\nrole S\nindividual a\nindividual b").unwrap();
        for interp in random_interpretations(&kb, 40, 424242) {
            let eta = embed_interpretation(&interp, 0.01).unwrap();
            assert!(eta.is_box_consistent());
            for ax in crate::reasoner::named_form_axiom_space(&kb.signature) {
                let truth = model_check(&interp, &ax);
                let sat = eta.satisfies(&ax).unwrap() == Satisfaction::Satisfied;
                match ax {
                    Axiom::ConceptIncl { .. } | Axiom::ConceptAssert { .. } => {
                        assert_eq!(sat, truth, "{:?}", ax);
                    }
                    // Role axioms: everything true in the source holds in
                    // the embedding; satisfaction of the rest reduces to
                    // the existential projections.
                    Axiom::RoleIncl { lhs, rhs } => {
                        if truth {
                            assert!(sat, "{:?}", ax);
                        }
                        if sat {
                            for (l, r) in [(lhs, rhs), (lhs.inverse(), rhs.inverse())] {
                                let proj = Axiom::ConceptIncl {
                                    lhs: Basic::Exists(l),
                                    rhs: Rhs::Pos(Basic::Exists(r)),
                                };
                                assert!(model_check(&interp, &proj), "{:?}", ax);
                            }
                        }
                    }
                    Axiom::RoleAssert { role, subject, object } => {
                        if truth {
                            assert!(sat, "{:?}", ax);
                        }
                        if sat {
                            let r = crate::ontology::Role::direct(role);
                            for (b, ind) in [
                                (Basic::Exists(r), subject),
                                (Basic::Exists(r.inverse()), object),
                            ] {
                                let proj = Axiom::ConceptAssert { concept: b, individual: ind };
                                assert!(model_check(&interp, &proj), "{:?}", ax);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn d_min_values() {
        let family = crate::data::family_tbox();
        assert_eq!(d_min(&family.signature, DimBoundMode::Tbox), 21);
        let sig = Signature::new(
            vec!["A".into()],
            vec!["R".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert_eq!(d_min(&sig, DimBoundMode::Kb), 1 + 2 + 2 + 2);
        let no_roles = Signature::new(vec!["A".into(), "B".into()], vec![], vec![]).unwrap();
        assert_eq!(d_min(&no_roles, DimBoundMode::Tbox), 2);
    }

    #[test]
    fn family_faithful_embedding_reduced() {
        let kb = crate::data::family_tbox();
        let eta = faithful_embedding(&kb, WitnessDomain::Reduced, 0.01).unwrap();
        assert_eq!(eta.config.d, 14 + 7 * 14);
        for ax in kb.axioms() {
            assert_eq!(eta.satisfies(ax).unwrap(), Satisfaction::Satisfied, "{:?}", ax);
        }
        let report = audit_faithfulness(&eta, &kb).unwrap();
        assert!(report.all_good(), "violations: {:?}", report.violations);
    }

    #[test]
    fn full_witness_strong_faithfulness_on_fixtures() {
        // On canonical models, concept inclusions and assertions hold in
        // the embedding iff entailed; role axioms at least preserve every
        // entailment.
        let texts = [
            "ci A exists(R)\nri R S\nra R a b",
            "ci exists(inv(R)) B\nci B not(A)\nca A a\nra R a b",
            "ri R S\nri inv(S) S\nca A a",
        ];
        for text in texts {
            let kb = parse_kb(text).unwrap();
            let r = Reasoner::new(&kb);
            assert!(r.is_satisfiable());
            let eta = faithful_embedding(&kb, WitnessDomain::Full, 0.01).unwrap();
            for ax in crate::reasoner::named_form_axiom_space(&kb.signature) {
                let entailed = r.entails(&ax).unwrap();
                let sat = eta.satisfies(&ax).unwrap() == Satisfaction::Satisfied;
                match ax {
                    Axiom::ConceptIncl { .. } | Axiom::ConceptAssert { .. } => {
                        assert_eq!(sat, entailed, "{:?} in {text}", ax)
                    }
                    _ => {
                        if entailed {
                            assert!(sat, "{:?} in {text}", ax)
                        }
                    }
                }
            }
            let report = audit_faithfulness(&eta, &kb).unwrap();
            assert!(report.all_good(), "{text}: {:?}", report.violations);
        }
    }

    #[test]
    fn unsat_kb_rejected() {
        let kb = parse_kb("ci A not(B)\nca A a\nca B a").unwrap();
        assert_eq!(
            faithful_embedding(&kb, WitnessDomain::Full, 0.01).unwrap_err(),
            AnalyticError::UnsatKb
        );
    }

    #[test]
    fn padding_preserves_satisfaction_table() {
        let kb = parse_kb("ci A exists(R)\nra R a b\nca A a").unwrap();
        let eta = faithful_embedding(&kb, WitnessDomain::Full, 0.01).unwrap();
        let padded = pad_dimensions(&eta, eta.config.d + 5).unwrap();
        assert_eq!(padded.config.d, eta.config.d + 5);
        for ax in crate::reasoner::named_form_axiom_space(&kb.signature) {
            assert_eq!(eta.satisfies(&ax).unwrap(), padded.satisfies(&ax).unwrap(), "{:?}", ax);
        }
        let same = pad_dimensions(&eta, eta.config.d).unwrap();
        assert_eq!(same.pos, eta.pos);
        assert!(matches!(
            pad_dimensions(&eta, eta.config.d - 1),
            Err(AnalyticError::InvalidTarget { .. })
        ));
    }

    #[test]
    fn audit_flags_violated_ri() {
        let kb = parse_kb("ri R S").unwrap();
        let mut eta = faithful_embedding(&kb, WitnessDomain::Full, 0.01).unwrap();
        // Stretch R's head box beyond S's.
        let s_head_l = eta.role_boxes[1].head.lower[0];
        eta.role_boxes[0].head.lower[0] = s_head_l - 1.0;
        let report = audit_faithfulness(&eta, &kb).unwrap();
        assert!(!report.kb_model);
        assert!(report.violations.iter().any(|v| v.contains("ri R S")));
    }
}
