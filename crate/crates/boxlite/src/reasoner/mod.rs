//! Polynomial-time DL-Lite^H reasoning: subsumption/disjointness closures,
//! KB satisfiability, entailment, canonical models, and finite model
//! checking.

mod canonical;

pub use canonical::{model_check, Element, Interpretation, WitnessConcept};

use crate::ontology::{Axiom, Basic, IndividualId, KnowledgeBase, Rhs, Role};
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ReasonerError {
    #[error("knowledge base is unsatisfiable")]
    UnsatKb,
}

/// Which witness elements the canonical model domain contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessDomain {
    /// c_D for every satisfiable basic concept and every satisfiable
    /// conjunction of two distinct basics.
    Full,
    /// c_{∃R}, c_{∃R⁻} per role (satisfiable ones).
    Reduced,
}

/// Square boolean relation over a dense index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    fn new(n: usize) -> Self {
        Relation { n, bits: vec![false; n * n] }
    }
    fn reflexive(n: usize) -> Self {
        let mut r = Relation::new(n);
        for i in 0..n {
            r.set(i, i);
        }
        r
    }
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }
    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.n + j] = true;
    }
    fn transitive_close(&mut self) {
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                if self.get(i, k) {
                    for j in 0..n {
                        if self.get(k, j) {
                            self.set(i, j);
                        }
                    }
                }
            }
        }
    }
}

/// Materialized entailment closures for a knowledge base.
#[derive(Debug, Clone)]
pub struct Closure {
    /// Reflexive-transitive subsumption over N_R^- (signed-role indices).
    pub role_subsumption: Relation,
    /// Reflexive-transitive subsumption over N_C^∃ (basic-concept indices).
    pub concept_subsumption: Relation,
    /// Symmetric disjointness over N_C^∃.
    pub disjointness: Relation,
    /// Basic concepts with necessarily empty extension.
    pub unsat_concepts: Vec<bool>,
    /// Entailed basic-concept memberships per individual.
    pub memberships: Vec<Vec<bool>>,
    /// Entailed role memberships per role name.
    pub role_memberships: Vec<BTreeSet<(IndividualId, IndividualId)>>,
}

impl Closure {
    pub fn compute(kb: &KnowledgeBase) -> Closure {
        let sig = &kb.signature;
        let nce = sig.n_basic_concepts();
        let nsr = sig.n_signed_roles();
        let nc = sig.n_concepts();

        let ex_idx = |r: Role| nc + r.signed_index();

        let mut unsat = vec![false; nce];
        let (role_sub, concept_sub, disj) = loop {
            // Role subsumption: stated RIs plus their inverse images, with
            // necessarily-empty roles below every role.
            let mut rs = Relation::reflexive(nsr);
            for ax in &kb.tbox {
                if let Axiom::RoleIncl { lhs, rhs } = ax {
                    rs.set(lhs.signed_index(), rhs.signed_index());
                    rs.set(lhs.inverse().signed_index(), rhs.inverse().signed_index());
                }
            }
            for u in 0..nsr {
                if unsat[nc + u] {
                    for t in 0..nsr {
                        rs.set(u, t);
                    }
                }
            }
            rs.transitive_close();

            // Concept subsumption: stated positive CIs, existential images
            // of role subsumption, and unsatisfiable concepts below
            // everything.
            let mut cs = Relation::reflexive(nce);
            for ax in &kb.tbox {
                if let Axiom::ConceptIncl { lhs, rhs: Rhs::Pos(r) } = ax {
                    cs.set(lhs.nce_index(sig), r.nce_index(sig));
                }
            }
            for u in 0..nsr {
                for t in 0..nsr {
                    if rs.get(u, t) {
                        cs.set(nc + u, nc + t);
                    }
                }
            }
            for b in 0..nce {
                if unsat[b] {
                    for c in 0..nce {
                        cs.set(b, c);
                    }
                }
            }
            cs.transitive_close();

            // Disjointness: images of stated negative CIs under
            // subsumption, symmetric, with unsat concepts disjoint from
            // everything.
            let mut dj = Relation::new(nce);
            for ax in &kb.tbox {
                if let Axiom::ConceptIncl { lhs, rhs: Rhs::Neg(r) } = ax {
                    let bi = lhs.nce_index(sig);
                    let ci = r.nce_index(sig);
                    for x in 0..nce {
                        if cs.get(x, bi) {
                            for y in 0..nce {
                                if cs.get(y, ci) {
                                    dj.set(x, y);
                                    dj.set(y, x);
                                }
                            }
                        }
                    }
                }
            }
            for b in 0..nce {
                if unsat[b] {
                    for c in 0..nce {
                        dj.set(b, c);
                        dj.set(c, b);
                    }
                }
            }

            // New unsatisfiable concepts; ∃R and ∃R⁻ are empty together.
            let mut new_unsat = unsat.clone();
            for b in 0..nce {
                if dj.get(b, b) {
                    new_unsat[b] = true;
                }
            }
            for r in 0..sig.n_roles() {
                let fwd = nc + 2 * r;
                if new_unsat[fwd] || new_unsat[fwd + 1] {
                    new_unsat[fwd] = true;
                    new_unsat[fwd + 1] = true;
                }
            }
            if new_unsat == unsat {
                break (rs, cs, dj);
            }
            unsat = new_unsat;
        };

        // Role memberships: stated assertions propagated through role
        // subsumption (inverse subsumers flip the pair).
        let mut role_memberships = vec![BTreeSet::new(); sig.n_roles()];
        for ax in &kb.abox {
            if let Axiom::RoleAssert { role, subject, object } = ax {
                let stated = Role::direct(*role);
                for t in 0..nsr {
                    if role_sub.get(stated.signed_index(), t) {
                        let tr = Role::from_signed_index(t);
                        if tr.inverted {
                            role_memberships[tr.name as usize].insert((*object, *subject));
                        } else {
                            role_memberships[tr.name as usize].insert((*subject, *object));
                        }
                    }
                }
            }
        }

        // Concept memberships: stated concept assertions plus existential
        // seeds from stated role assertions, closed under subsumption.
        let mut memberships = vec![vec![false; nce]; sig.n_individuals()];
        let seed = |ind: IndividualId, b: usize, memberships: &mut Vec<Vec<bool>>| {
            for c in 0..nce {
                if concept_sub.get(b, c) {
                    memberships[ind as usize][c] = true;
                }
            }
        };
        for ax in &kb.abox {
            match ax {
                Axiom::ConceptAssert { concept, individual } => {
                    seed(*individual, concept.nce_index(sig), &mut memberships);
                }
                Axiom::RoleAssert { role, subject, object } => {
                    seed(*subject, ex_idx(Role::direct(*role)), &mut memberships);
                    seed(*object, ex_idx(Role::inverse_of(*role)), &mut memberships);
                }
                _ => {}
            }
        }

        Closure {
            role_subsumption: role_sub,
            concept_subsumption: concept_sub,
            disjointness: disj,
            unsat_concepts: unsat,
            memberships,
            role_memberships,
        }
    }

    pub fn concept_subsumes(&self, sub: Basic, sup: Basic, kb: &KnowledgeBase) -> bool {
        self.concept_subsumption
            .get(sub.nce_index(&kb.signature), sup.nce_index(&kb.signature))
    }
}

/// Full reasoning state for one knowledge base.
pub struct Reasoner<'kb> {
    pub kb: &'kb KnowledgeBase,
    pub closure: Closure,
}

impl<'kb> Reasoner<'kb> {
    pub fn new(kb: &'kb KnowledgeBase) -> Self {
        Reasoner { kb, closure: Closure::compute(kb) }
    }

    /// False iff some individual carries two disjoint entailed memberships.
    pub fn is_satisfiable(&self) -> bool {
        let nce = self.kb.signature.n_basic_concepts();
        for memb in &self.closure.memberships {
            for b in 0..nce {
                if !memb[b] {
                    continue;
                }
                for c in b..nce {
                    if memb[c] && self.closure.disjointness.get(b, c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn require_sat(&self) -> Result<(), ReasonerError> {
        if self.is_satisfiable() {
            Ok(())
        } else {
            Err(ReasonerError::UnsatKb)
        }
    }

    pub fn entails(&self, ax: &Axiom) -> Result<bool, ReasonerError> {
        self.require_sat()?;
        let sig = &self.kb.signature;
        Ok(match ax {
            Axiom::ConceptIncl { lhs, rhs: Rhs::Pos(r) } => {
                self.closure.concept_subsumption.get(lhs.nce_index(sig), r.nce_index(sig))
            }
            Axiom::ConceptIncl { lhs, rhs: Rhs::Neg(r) } => {
                self.closure.disjointness.get(lhs.nce_index(sig), r.nce_index(sig))
            }
            Axiom::RoleIncl { lhs, rhs } => {
                self.closure.role_subsumption.get(lhs.signed_index(), rhs.signed_index())
            }
            Axiom::ConceptAssert { concept, individual } => {
                self.closure.memberships[*individual as usize][concept.nce_index(sig)]
            }
            Axiom::RoleAssert { role, subject, object } => {
                self.closure.role_memberships[*role as usize].contains(&(*subject, *object))
            }
        })
    }

    /// Satisfiability of a basic concept or a conjunction of two basics.
    pub fn concept_satisfiable(&self, parts: &[Basic]) -> Result<bool, ReasonerError> {
        self.require_sat()?;
        let sig = &self.kb.signature;
        Ok(match parts {
            [d] => !self.closure.unsat_concepts[d.nce_index(sig)],
            [d, e] => {
                let (di, ei) = (d.nce_index(sig), e.nce_index(sig));
                !self.closure.unsat_concepts[di]
                    && !self.closure.unsat_concepts[ei]
                    && !self.closure.disjointness.get(di, ei)
            }
            _ => panic!("concept_satisfiable takes one or two basic concepts"),
        })
    }

    /// K ∪ {axiom} satisfiable.
    pub fn is_consistent_with(&self, ax: &Axiom) -> bool {
        let extended = self.kb.with_extra_axiom(*ax);
        Reasoner::new(&extended).is_satisfiable()
    }

    /// Role assertions over named individuals that follow from the KB but
    /// are not stated, in deterministic order.
    pub fn infer_test_assertions(&self) -> Result<Vec<Axiom>, ReasonerError> {
        self.require_sat()?;
        let stated: BTreeSet<(u32, u32, u32)> = self
            .kb
            .abox
            .iter()
            .filter_map(|ax| match ax {
                Axiom::RoleAssert { role, subject, object } => Some((*role, *subject, *object)),
                _ => None,
            })
            .collect();
        let mut out = Vec::new();
        for (role, pairs) in self.closure.role_memberships.iter().enumerate() {
            for (a, b) in pairs {
                if !stated.contains(&(role as u32, *a, *b)) {
                    out.push(Axiom::RoleAssert { role: role as u32, subject: *a, object: *b });
                }
            }
        }
        Ok(out)
    }

    pub fn canonical_model(&self, witness: WitnessDomain) -> Result<Interpretation, ReasonerError> {
        self.require_sat()?;
        Ok(canonical::build(self, witness))
    }
}

/// Every named-form axiom over a signature, in deterministic order:
/// CIs over N_C^∃ × (N_C^∃ ∪ ¬N_C^∃), RIs over N_R^- pairs, concept
/// assertions, role assertions.
pub fn named_form_axiom_space(sig: &crate::ontology::Signature) -> Vec<Axiom> {
    use crate::ontology::{enumerate_basic_concepts, enumerate_signed_roles};
    let mut out = Vec::new();
    let basics = enumerate_basic_concepts(sig);
    let roles = enumerate_signed_roles(sig);
    for lhs in &basics {
        for rhs in &basics {
            out.push(Axiom::ConceptIncl { lhs: *lhs, rhs: Rhs::Pos(*rhs) });
        }
        for rhs in &basics {
            out.push(Axiom::ConceptIncl { lhs: *lhs, rhs: Rhs::Neg(*rhs) });
        }
    }
    for lhs in &roles {
        for rhs in &roles {
            out.push(Axiom::RoleIncl { lhs: *lhs, rhs: *rhs });
        }
    }
    for c in &basics {
        for i in 0..sig.n_individuals() {
            out.push(Axiom::ConceptAssert { concept: *c, individual: i as IndividualId });
        }
    }
    for r in 0..sig.n_roles() {
        for a in 0..sig.n_individuals() {
            for b in 0..sig.n_individuals() {
                out.push(Axiom::RoleAssert {
                    role: r as u32,
                    subject: a as IndividualId,
                    object: b as IndividualId,
                });
            }
        }
    }
    out
}
