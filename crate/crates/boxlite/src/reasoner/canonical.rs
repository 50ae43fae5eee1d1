//! Canonical model construction and finite model checking.

use super::{Reasoner, WitnessDomain};
use crate::ontology::{Axiom, Basic, IndividualId, KnowledgeBase, Rhs, Role, Signature};
use std::collections::BTreeSet;

/// A witness element c_D: either a satisfiable basic concept or a
/// satisfiable conjunction of two distinct basics (indices into N_C^∃,
/// stored with i < j).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum WitnessConcept {
    Basic(usize),
    Pair(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    Named(IndividualId),
    Witness(WitnessConcept),
}

/// A finite first-order structure over the KB signature.
#[derive(Debug, Clone)]
pub struct Interpretation {
    pub signature: Signature,
    pub elements: Vec<Element>,
    /// Per concept name: characteristic vector over elements.
    pub concept_ext: Vec<Vec<bool>>,
    /// Per role name: set of element-index pairs.
    pub role_ext: Vec<BTreeSet<(u32, u32)>>,
    /// Per individual: element index.
    pub individual_map: Vec<u32>,
}

impl Interpretation {
    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Extension of a basic concept, computed on the fly for existentials.
    pub fn basic_ext(&self, b: Basic) -> Vec<bool> {
        match b {
            Basic::Atomic(c) => self.concept_ext[c as usize].clone(),
            Basic::Exists(r) => {
                let mut out = vec![false; self.n_elements()];
                for &(x, y) in &self.role_ext[r.name as usize] {
                    out[if r.inverted { y } else { x } as usize] = true;
                }
                out
            }
        }
    }

    pub fn role_pairs(&self, r: Role) -> BTreeSet<(u32, u32)> {
        if r.inverted {
            self.role_ext[r.name as usize].iter().map(|&(x, y)| (y, x)).collect()
        } else {
            self.role_ext[r.name as usize].clone()
        }
    }

    pub fn element_label(&self, idx: usize) -> String {
        match self.elements[idx] {
            Element::Named(i) => self.signature.individual_name(i).to_string(),
            Element::Witness(WitnessConcept::Basic(b)) => {
                let basic = Basic::from_nce_index(b, &self.signature);
                format!("c[{}]", crate::ontology::basic_token(basic, &self.signature))
            }
            Element::Witness(WitnessConcept::Pair(i, j)) => {
                let bi = Basic::from_nce_index(i, &self.signature);
                let bj = Basic::from_nce_index(j, &self.signature);
                format!(
                    "c[{}^{}]",
                    crate::ontology::basic_token(bi, &self.signature),
                    crate::ontology::basic_token(bj, &self.signature)
                )
            }
        }
    }
}

/// Standard first-order satisfaction of a single axiom in a finite
/// interpretation.
pub fn model_check(interp: &Interpretation, ax: &Axiom) -> bool {
    match ax {
        Axiom::ConceptIncl { lhs, rhs } => {
            let l = interp.basic_ext(*lhs);
            let r = interp.basic_ext(rhs.basic());
            match rhs {
                Rhs::Pos(_) => l.iter().zip(&r).all(|(a, b)| !*a || *b),
                Rhs::Neg(_) => l.iter().zip(&r).all(|(a, b)| !*a || !*b),
            }
        }
        Axiom::RoleIncl { lhs, rhs } => {
            let rp = interp.role_pairs(*rhs);
            interp.role_pairs(*lhs).iter().all(|p| rp.contains(p))
        }
        Axiom::ConceptAssert { concept, individual } => {
            interp.basic_ext(*concept)[interp.individual_map[*individual as usize] as usize]
        }
        Axiom::RoleAssert { role, subject, object } => {
            let a = interp.individual_map[*subject as usize];
            let b = interp.individual_map[*object as usize];
            interp.role_ext[*role as usize].contains(&(a, b))
        }
    }
}

fn witness_subsumed_by(w: WitnessConcept, target: usize, r: &Reasoner) -> bool {
    match w {
        WitnessConcept::Basic(b) => r.closure.concept_subsumption.get(b, target),
        WitnessConcept::Pair(i, j) => {
            r.closure.concept_subsumption.get(i, target)
                || r.closure.concept_subsumption.get(j, target)
        }
    }
}

pub(super) fn build(r: &Reasoner, witness: WitnessDomain) -> Interpretation {
    let kb: &KnowledgeBase = r.kb;
    let sig = kb.signature.clone();
    let nce = sig.n_basic_concepts();
    let nc = sig.n_concepts();
    let n_ind = sig.n_individuals();

    let sat = |b: usize| !r.closure.unsat_concepts[b];

    let mut witnesses: Vec<WitnessConcept> = Vec::new();
    match witness {
        WitnessDomain::Full => {
            for b in 0..nce {
                if sat(b) {
                    witnesses.push(WitnessConcept::Basic(b));
                }
            }
            for i in 0..nce {
                for j in (i + 1)..nce {
                    if sat(i) && sat(j) && !r.closure.disjointness.get(i, j) {
                        witnesses.push(WitnessConcept::Pair(i, j));
                    }
                }
            }
        }
        WitnessDomain::Reduced => {
            for b in nc..nce {
                if sat(b) {
                    witnesses.push(WitnessConcept::Basic(b));
                }
            }
        }
    }

    let mut elements: Vec<Element> = (0..n_ind).map(|i| Element::Named(i as IndividualId)).collect();
    elements.extend(witnesses.iter().map(|w| Element::Witness(*w)));

    // Index of the witness c_{∃S} for a signed role, when present.
    let exists_witness = |role: Role| -> Option<u32> {
        let b = nc + role.signed_index();
        witnesses
            .iter()
            .position(|w| *w == WitnessConcept::Basic(b))
            .map(|p| (n_ind + p) as u32)
    };

    // Concept-name extensions.
    let mut concept_ext = vec![vec![false; elements.len()]; nc];
    for a in 0..n_ind {
        for (c, ext) in concept_ext.iter_mut().enumerate() {
            if r.closure.memberships[a][c] {
                ext[a] = true;
            }
        }
    }
    for (wi, w) in witnesses.iter().enumerate() {
        for (c, ext) in concept_ext.iter_mut().enumerate() {
            if witness_subsumed_by(*w, c, r) {
                ext[n_ind + wi] = true;
            }
        }
    }

    // Role-name extensions, following the canonical construction: named
    // pairs from entailed assertions, then witness links generated by the
    // satisfiable existential witnesses.
    let signed_roles = crate::ontology::enumerate_signed_roles(&sig);
    let mut role_ext = vec![BTreeSet::new(); sig.n_roles()];
    for (rn, ext) in role_ext.iter_mut().enumerate() {
        let r_direct = Role::direct(rn as u32).signed_index();
        for &(a, b) in &r.closure.role_memberships[rn] {
            ext.insert((a, b));
        }
        for s in &signed_roles {
            let Some(cs_idx) = exists_witness(*s) else { continue };
            let s_bar = s.inverse();
            let ex_s_bar = nc + s_bar.signed_index();
            let s_sub_r = r.closure.role_subsumption.get(s.signed_index(), r_direct);
            let s_bar_sub_r = r.closure.role_subsumption.get(s_bar.signed_index(), r_direct);
            // (a, c_{∃S}) for K ⊨ ∃S̄(a), S̄ ⊑ R.
            if s_bar_sub_r {
                for a in 0..n_ind {
                    if r.closure.memberships[a][ex_s_bar] {
                        ext.insert((a as u32, cs_idx));
                    }
                }
            }
            // (c_{∃S}, a) for K ⊨ ∃S̄(a), S ⊑ R.
            if s_sub_r {
                for a in 0..n_ind {
                    if r.closure.memberships[a][ex_s_bar] {
                        ext.insert((cs_idx, a as u32));
                    }
                }
            }
            // (c_{∃S}, c_{∃S̄}) for S ⊑ R.
            if s_sub_r {
                if let Some(csb_idx) = exists_witness(s_bar) {
                    ext.insert((cs_idx, csb_idx));
                }
            }
            // (c_D, c_{∃S}) for K ⊨ D ⊑ ∃S̄, S̄ ⊑ R and
            // (c_{∃S}, c_D) for K ⊨ D ⊑ ∃S̄, S ⊑ R.
            for (wi, w) in witnesses.iter().enumerate() {
                if witness_subsumed_by(*w, ex_s_bar, r) {
                    let d_idx = (n_ind + wi) as u32;
                    if s_bar_sub_r {
                        ext.insert((d_idx, cs_idx));
                    }
                    if s_sub_r {
                        ext.insert((cs_idx, d_idx));
                    }
                }
            }
        }
    }

    Interpretation {
        signature: sig,
        elements,
        concept_ext,
        role_ext,
        individual_map: (0..n_ind as u32).collect(),
    }
}
