//! Data model for DL-Lite^H signatures, concepts, roles, axioms, and
//! knowledge bases in named form, plus the line-oriented KB DSL.

mod parser;

pub use parser::{
    normalize_axiom as normalize_raw_axiom, parse_axiom_line, parse_kb, ParseError, RawAxiom,
    RawBasic, RawRhs, RawRole,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

pub type ConceptId = u32;
pub type RoleId = u32;
pub type IndividualId = u32;

/// Finite, mutually disjoint name sets. Names are kept sorted so that
/// index-based layouts are reproducible across runs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Signature {
    concepts: Vec<String>,
    roles: Vec<String>,
    individuals: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum SignatureError {
    #[error("symbol `{0}` is used in more than one of concept/role/individual")]
    Disjointness(String),
}

impl Signature {
    pub fn new(
        concepts: impl IntoIterator<Item = String>,
        roles: impl IntoIterator<Item = String>,
        individuals: impl IntoIterator<Item = String>,
    ) -> Result<Self, SignatureError> {
        let concepts: BTreeSet<String> = concepts.into_iter().collect();
        let roles: BTreeSet<String> = roles.into_iter().collect();
        let individuals: BTreeSet<String> = individuals.into_iter().collect();
        for r in &roles {
            if concepts.contains(r) {
                return Err(SignatureError::Disjointness(r.clone()));
            }
        }
        for i in &individuals {
            if concepts.contains(i) || roles.contains(i) {
                return Err(SignatureError::Disjointness(i.clone()));
            }
        }
        Ok(Signature {
            concepts: concepts.into_iter().collect(),
            roles: roles.into_iter().collect(),
            individuals: individuals.into_iter().collect(),
        })
    }

    pub fn n_concepts(&self) -> usize {
        self.concepts.len()
    }
    pub fn n_roles(&self) -> usize {
        self.roles.len()
    }
    pub fn n_individuals(&self) -> usize {
        self.individuals.len()
    }

    pub fn concept_name(&self, id: ConceptId) -> &str {
        &self.concepts[id as usize]
    }
    pub fn role_name(&self, id: RoleId) -> &str {
        &self.roles[id as usize]
    }
    pub fn individual_name(&self, id: IndividualId) -> &str {
        &self.individuals[id as usize]
    }

    pub fn concept_id(&self, name: &str) -> Option<ConceptId> {
        self.concepts.binary_search_by(|c| c.as_str().cmp(name)).ok().map(|i| i as ConceptId)
    }
    pub fn role_id(&self, name: &str) -> Option<RoleId> {
        self.roles.binary_search_by(|c| c.as_str().cmp(name)).ok().map(|i| i as RoleId)
    }
    pub fn individual_id(&self, name: &str) -> Option<IndividualId> {
        self.individuals.binary_search_by(|c| c.as_str().cmp(name)).ok().map(|i| i as IndividualId)
    }

    pub fn concept_names(&self) -> &[String] {
        &self.concepts
    }
    pub fn role_names(&self) -> &[String] {
        &self.roles
    }
    pub fn individual_names(&self) -> &[String] {
        &self.individuals
    }

    /// Number of basic concepts: |N_C| + 2|N_R|.
    pub fn n_basic_concepts(&self) -> usize {
        self.n_concepts() + 2 * self.n_roles()
    }

    /// Number of roles including inverses: 2|N_R|.
    pub fn n_signed_roles(&self) -> usize {
        2 * self.n_roles()
    }
}

/// A role name or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Role {
    pub name: RoleId,
    pub inverted: bool,
}

impl Role {
    pub fn direct(name: RoleId) -> Self {
        Role { name, inverted: false }
    }
    pub fn inverse_of(name: RoleId) -> Self {
        Role { name, inverted: true }
    }
    /// Switch between a role name and its inverse; an involution.
    pub fn inverse(self) -> Self {
        Role { name: self.name, inverted: !self.inverted }
    }
    /// Dense index into N_R^-: direct roles at 2r, inverses at 2r+1.
    pub fn signed_index(self) -> usize {
        2 * self.name as usize + self.inverted as usize
    }
    pub fn from_signed_index(idx: usize) -> Self {
        Role { name: (idx / 2) as RoleId, inverted: idx % 2 == 1 }
    }
}

/// A basic concept: a concept name or an existential restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basic {
    Atomic(ConceptId),
    Exists(Role),
}

impl Basic {
    /// Dense index into N_C^∃: atomics first, then ∃R, ∃R⁻ per role.
    pub fn nce_index(self, sig: &Signature) -> usize {
        match self {
            Basic::Atomic(c) => c as usize,
            Basic::Exists(r) => sig.n_concepts() + r.signed_index(),
        }
    }
    pub fn from_nce_index(idx: usize, sig: &Signature) -> Self {
        if idx < sig.n_concepts() {
            Basic::Atomic(idx as ConceptId)
        } else {
            Basic::Exists(Role::from_signed_index(idx - sig.n_concepts()))
        }
    }
}

/// Right-hand side of a concept inclusion: a basic concept or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rhs {
    Pos(Basic),
    Neg(Basic),
}

impl Rhs {
    pub fn basic(self) -> Basic {
        match self {
            Rhs::Pos(b) | Rhs::Neg(b) => b,
        }
    }
    pub fn is_negative(self) -> bool {
        matches!(self, Rhs::Neg(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    ConceptIncl { lhs: Basic, rhs: Rhs },
    RoleIncl { lhs: Role, rhs: Role },
    ConceptAssert { concept: Basic, individual: IndividualId },
    RoleAssert { role: RoleId, subject: IndividualId, object: IndividualId },
}

impl Axiom {
    pub fn is_inclusion(&self) -> bool {
        matches!(self, Axiom::ConceptIncl { .. } | Axiom::RoleIncl { .. })
    }
    pub fn is_assertion(&self) -> bool {
        !self.is_inclusion()
    }
}

/// A DL-Lite^H knowledge base in named form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub signature: Signature,
    pub tbox: Vec<Axiom>,
    pub abox: Vec<Axiom>,
}

#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("{0}")]
    Signature(#[from] SignatureError),
    #[error("concept inclusion has no atomic side: {0}")]
    NamedFormViolation(String),
    #[error("axiom uses a symbol outside the signature")]
    UnknownSymbol,
}

impl KnowledgeBase {
    /// Build a KB from already-resolved axioms, enforcing named form and
    /// deduplicating.
    pub fn new(signature: Signature, axioms: Vec<Axiom>) -> Result<Self, KbError> {
        let mut tbox = Vec::new();
        let mut abox = Vec::new();
        let mut seen = BTreeSet::new();
        for ax in axioms {

            if let Axiom::ConceptIncl { lhs, rhs } = &ax {
                let lhs_atomic = matches!(lhs, Basic::Atomic(_));
                let rhs_atomic = matches!(rhs.basic(), Basic::Atomic(_));
                if !lhs_atomic && !rhs_atomic && !rhs.is_negative() {
                    return Err(KbError::NamedFormViolation(display_axiom_raw(&ax, &signature)));
                }
            }
            if !seen.insert(ax) {
                continue;
            }
            if ax.is_inclusion() {
                tbox.push(ax);
            } else {
                abox.push(ax);
            }
        }
        Ok(KnowledgeBase { signature, tbox, abox })
    }

    pub fn with_extra_axiom(&self, ax: Axiom) -> KnowledgeBase {
        let mut kb = self.clone();

        if !kb.tbox.contains(&ax) && !kb.abox.contains(&ax) {
            if ax.is_inclusion() {
                kb.tbox.push(ax);
            } else {
                kb.abox.push(ax);
            }
        }
        kb
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.tbox.iter().chain(self.abox.iter())
    }

    /// Ordered enumeration of N_C^∃: atomics first, then ∃R, ∃R⁻ per role
    /// in signature order.
    pub fn basic_concepts(&self) -> Vec<Basic> {
        enumerate_basic_concepts(&self.signature)
    }

    /// Serialize to the KB DSL: declarations first, then one axiom per line.
    pub fn to_dsl(&self) -> String {
        let mut out = String::new();
        for c in &self.signature.concepts {
            out.push_str(&format!("concept {c}\n"));
        }
        for r in &self.signature.roles {
            out.push_str(&format!("role {r}\n"));
        }
        for i in &self.signature.individuals {
            out.push_str(&format!("individual {i}\n"));
        }
        for ax in self.axioms() {
            out.push_str(&display_axiom_raw(ax, &self.signature));
            out.push('\n');
        }
        out
    }
}

/// Ordered enumeration of N_C^∃ for a signature.
pub fn enumerate_basic_concepts(sig: &Signature) -> Vec<Basic> {
    let mut out = Vec::with_capacity(sig.n_basic_concepts());
    for c in 0..sig.n_concepts() {
        out.push(Basic::Atomic(c as ConceptId));
    }
    for r in 0..sig.n_roles() {
        out.push(Basic::Exists(Role::direct(r as RoleId)));
        out.push(Basic::Exists(Role::inverse_of(r as RoleId)));
    }
    out
}

/// Ordered enumeration of N_R^-: R, R⁻ per role in signature order.
pub fn enumerate_signed_roles(sig: &Signature) -> Vec<Role> {
    let mut out = Vec::with_capacity(sig.n_signed_roles());
    for r in 0..sig.n_roles() {
        out.push(Role::direct(r as RoleId));
        out.push(Role::inverse_of(r as RoleId));
    }
    out
}

pub fn role_token(role: Role, sig: &Signature) -> String {
    if role.inverted {
        format!("inv({})", sig.role_name(role.name))
    } else {
        sig.role_name(role.name).to_string()
    }
}

pub fn basic_token(b: Basic, sig: &Signature) -> String {
    match b {
        Basic::Atomic(c) => sig.concept_name(c).to_string(),
        Basic::Exists(r) => format!("exists({})", role_token(r, sig)),
    }
}

pub fn rhs_token(rhs: Rhs, sig: &Signature) -> String {
    match rhs {
        Rhs::Pos(b) => basic_token(b, sig),
        Rhs::Neg(b) => format!("not({})", basic_token(b, sig)),
    }
}

fn display_axiom_raw(ax: &Axiom, sig: &Signature) -> String {
    match ax {
        Axiom::ConceptIncl { lhs, rhs } => {
            format!("ci {} {}", basic_token(*lhs, sig), rhs_token(*rhs, sig))
        }
        Axiom::RoleIncl { lhs, rhs } => {
            format!("ri {} {}", role_token(*lhs, sig), role_token(*rhs, sig))
        }
        Axiom::ConceptAssert { concept, individual } => {
            format!("ca {} {}", basic_token(*concept, sig), sig.individual_name(*individual))
        }
        Axiom::RoleAssert { role, subject, object } => {
            format!(
                "ra {} {} {}",
                sig.role_name(*role),
                sig.individual_name(*subject),
                sig.individual_name(*object)
            )
        }
    }
}

/// Human-readable axiom rendering, used in reports and violation lists.
pub struct AxiomDisplay<'a>(pub &'a Axiom, pub &'a Signature);

impl fmt::Display for AxiomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", display_axiom_raw(self.0, self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig_ar() -> Signature {
        Signature::new(
            vec!["A".into()],
            vec!["R".into()],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn basic_concept_enumeration_order_and_length() {
        let sig = sig_ar();
        let bcs = enumerate_basic_concepts(&sig);
        assert_eq!(bcs.len(), 3);
        assert_eq!(bcs[0], Basic::Atomic(0));
        assert_eq!(bcs[1], Basic::Exists(Role::direct(0)));
        assert_eq!(bcs[2], Basic::Exists(Role::inverse_of(0)));
        let empty = Signature::default();
        assert!(enumerate_basic_concepts(&empty).is_empty());
    }

    #[test]
    fn enumeration_length_formula() {
        for (nc, nr) in [(0usize, 7usize), (3, 2), (5, 0)] {
            let sig = Signature::new(
                (0..nc).map(|i| format!("C{i}")),
                (0..nr).map(|i| format!("R{i}")),
                vec![],
            )
            .unwrap();
            assert_eq!(enumerate_basic_concepts(&sig).len(), nc + 2 * nr);
        }
    }

    #[test]
    fn role_inverse_is_involution() {
        let r = Role::direct(3);
        assert_eq!(r.inverse().inverse(), r);
        assert_eq!(Role::from_signed_index(r.inverse().signed_index()), r.inverse());
    }

    #[test]
    fn named_form_rejected_without_atomic_side() {
        let sig = Signature::new(vec![], vec!["R".into(), "S".into()], vec![]).unwrap();
        let ax = Axiom::ConceptIncl {
            lhs: Basic::Exists(Role::direct(0)),
            rhs: Rhs::Pos(Basic::Exists(Role::direct(1))),
        };
        assert!(matches!(
            KnowledgeBase::new(sig, vec![ax]),
            Err(KbError::NamedFormViolation(_))
        ));
    }

    #[test]
    fn duplicate_axioms_are_dropped() {
        let sig = sig_ar();
        let ax = Axiom::ConceptIncl {
            lhs: Basic::Atomic(0),
            rhs: Rhs::Pos(Basic::Exists(Role::direct(0))),
        };
        let kb = KnowledgeBase::new(sig, vec![ax, ax]).unwrap();
        assert_eq!(kb.tbox.len(), 1);
    }

    #[test]
    fn signature_disjointness_enforced() {
        assert!(Signature::new(vec!["X".into()], vec!["X".into()], vec![]).is_err());
    }
}
