//! Shared test support: a bounded-domain brute-force entailment oracle
//! that is independent of the reasoner's closure machinery, plus fixture
//! generators.

use boxlite::ontology::{Axiom, Basic, KnowledgeBase, Rhs, Role};

/// What bounded enumeration concluded about one axiom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    /// A model of the KB falsifying the axiom exists within the bound.
    Refuted,
    /// No countermodel within the bound; entailment is not decided.
    Inconclusive,
}

pub struct OracleReport {
    pub verdicts: Vec<OracleVerdict>,
    pub models_seen: u64,
}

/// Encoded interpretation over a domain of size ≤ 3: concepts are 3-bit
/// element masks, roles are 9-bit pair masks (bit 3x + y), individuals
/// map to elements.
struct Enc {
    n: usize,
    concepts: Vec<u8>,
    roles: Vec<u16>,
    inds: Vec<usize>,
}

impl Enc {
    fn full_mask(&self) -> u8 {
        ((1u16 << self.n) - 1) as u8
    }

    fn successors(&self, pairs: u16) -> u8 {
        let mut out = 0u8;
        for x in 0..self.n {
            if pairs & (0b111 << (3 * x)) & pair_row_mask(self.n, x) != 0 {
                out |= 1 << x;
            }
        }
        out
    }

    fn transpose(&self, pairs: u16) -> u16 {
        let mut out = 0u16;
        for x in 0..self.n {
            for y in 0..self.n {
                if pairs & (1 << (3 * x + y)) != 0 {
                    out |= 1 << (3 * y + x);
                }
            }
        }
        out
    }

    fn role_pairs(&self, r: Role) -> u16 {
        let raw = self.roles[r.name as usize];
        if r.inverted {
            self.transpose(raw)
        } else {
            raw
        }
    }

    fn basic_ext(&self, b: Basic) -> u8 {
        match b {
            Basic::Atomic(c) => self.concepts[c as usize],
            Basic::Exists(r) => self.successors(self.role_pairs(r)),
        }
    }

    fn satisfies(&self, ax: &Axiom) -> bool {
        match ax {
            Axiom::ConceptIncl { lhs, rhs } => {
                let l = self.basic_ext(*lhs);
                match rhs {
                    Rhs::Pos(b) => l & !self.basic_ext(*b) & self.full_mask() == 0,
                    Rhs::Neg(b) => l & self.basic_ext(*b) == 0,
                }
            }
            Axiom::RoleIncl { lhs, rhs } => {
                self.role_pairs(*lhs) & !self.role_pairs(*rhs) == 0
            }
            Axiom::ConceptAssert { concept, individual } => {
                self.basic_ext(*concept) & (1 << self.inds[*individual as usize]) != 0
            }
            Axiom::RoleAssert { role, subject, object } => {
                let bit = 3 * self.inds[*subject as usize] + self.inds[*object as usize];
                self.roles[*role as usize] & (1 << bit) != 0
            }
        }
    }
}

fn pair_row_mask(n: usize, x: usize) -> u16 {
    let mut m = 0u16;
    for y in 0..n {
        m |= 1 << (3 * x + y);
    }
    m
}

fn pair_universe(n: usize) -> u16 {
    let mut m = 0u16;
    for x in 0..n {
        m |= pair_row_mask(n, x);
    }
    m
}

/// Enumerate every interpretation of the KB signature over domains of
/// size 1..=3 and record, for each axiom in `space`, whether some model
/// of the KB falsifies it.
pub fn bounded_oracle(kb: &KnowledgeBase, space: &[Axiom]) -> OracleReport {
    let sig = &kb.signature;
    let nc = sig.n_concepts();
    let nr = sig.n_roles();
    let ni = sig.n_individuals();
    let mut refuted = vec![false; space.len()];
    let mut models_seen = 0u64;

    let ris: Vec<&Axiom> =
        kb.tbox.iter().filter(|a| matches!(a, Axiom::RoleIncl { .. })).collect();
    let cis: Vec<&Axiom> =
        kb.tbox.iter().filter(|a| matches!(a, Axiom::ConceptIncl { .. })).collect();

    for n in 1..=3usize {
        let universe = pair_universe(n);
        let concept_max: u8 = ((1u16 << n) - 1) as u8;
        let mut enc = Enc {
            n,
            concepts: vec![0; nc],
            roles: vec![0; nr],
            inds: vec![0; ni],
        };
        // Role assignments (outermost: role inclusions prune early).
        let role_count = 1u64 << (nr * 9);
        for role_bits in 0..role_count {
            let mut ok = true;
            for r in 0..nr {
                let raw = ((role_bits >> (9 * r)) & 0x1ff) as u16;
                if raw & !universe != 0 {
                    ok = false;
                    break;
                }
                enc.roles[r] = raw;
            }
            if !ok {
                continue;
            }
            if !ris.iter().all(|ax| enc.satisfies(ax)) {
                continue;
            }
            // Concept assignments.
            let concept_count = 1u64 << (nc * 3);
            for concept_bits in 0..concept_count {
                let mut ok = true;
                for c in 0..nc {
                    let raw = ((concept_bits >> (3 * c)) & 0b111) as u8;
                    if raw & !concept_max != 0 {
                        ok = false;
                        break;
                    }
                    enc.concepts[c] = raw;
                }
                if !ok {
                    continue;
                }
                if !cis.iter().all(|ax| enc.satisfies(ax)) {
                    continue;
                }
                // Individual maps.
                let ind_count = (n as u64).pow(ni as u32).max(1);
                for ind_code in 0..ind_count {
                    let mut code = ind_code;
                    for i in 0..ni {
                        enc.inds[i] = (code % n as u64) as usize;
                        code /= n as u64;
                    }
                    if !kb.abox.iter().all(|ax| enc.satisfies(ax)) {
                        continue;
                    }
                    models_seen += 1;
                    for (k, ax) in space.iter().enumerate() {
                        if !refuted[k] && !enc.satisfies(ax) {
                            refuted[k] = true;
                        }
                    }
                }
            }
        }
    }

    OracleReport {
        verdicts: refuted
            .into_iter()
            .map(|r| if r { OracleVerdict::Refuted } else { OracleVerdict::Inconclusive })
            .collect(),
        models_seen,
    }
}

/// Twenty-five satisfiable fixture KBs over signatures with at most two
/// concepts, two roles, and two individuals. Signatures with two roles
/// carry at least one role inclusion so bounded enumeration stays cheap.
pub fn fixture_kbs() -> Vec<KnowledgeBase> {
    let texts = [
        // Single-symbol and empty-ish cases.
        "concept A",
        "role R",
        "concept A\nrole R",
        "ca A a",
        "ra R a b",
        // Concept hierarchies.
        "ci A B",
        "ci A B\nca A a",
        "ci A not(B)",
        "ci A not(B)\nca A a\nca B b",
        "ci A not(A)",
        // Existentials on either side.
        "ci A exists(R)",
        "ci A exists(R)\nca A a",
        "ci exists(R) A",
        "ci exists(inv(R)) A\nra R a b",
        "ci A exists(inv(R))\nci B A\nca B a",
        // Role hierarchies.
        "ri R S",
        "ri R S\nra R a b",
        "ri R inv(S)\nra R a b",
        "ri R inv(R)\nra R a a",
        "ri R S\nri S R\nra S b a",
        // Mixed TBoxes.
        "ri R S\nci exists(S) A\nra R a b",
        "ri R S\nci A not(exists(S))\nca A a",
        "ri R S\nci exists(inv(S)) not(A)\nra R a b\nca A a",
        "ci A exists(R)\nci exists(inv(R)) not(A)\nca A a",
        "ci A exists(R)\nci B not(A)\nri R S\nca A a\nca B b",
    ];
    let kbs: Vec<KnowledgeBase> = texts
        .iter()
        .map(|t| boxlite::ontology::parse_kb(t).expect("fixture parses"))
        .collect();
    assert_eq!(kbs.len(), 25);
    for kb in &kbs {
        assert!(kb.signature.n_concepts() <= 2);
        assert!(kb.signature.n_roles() <= 2);
        assert!(kb.signature.n_individuals() <= 2);
    }
    kbs
}

/// Axiom satisfaction with the test-assertion tolerance τ: containments
/// and memberships may be violated by at most `tau`. Semantics in the
/// library stay exact; this is for asserting on solver output.
pub fn satisfied_within(
    eta: &boxlite::geometry::BoxInterpretation,
    ax: &Axiom,
    tau: f64,
) -> bool {
    use boxlite::geometry::BoxBounds;
    let cfg = &eta.config;
    let member = |bx: &BoxBounds, x: &[f64]| -> bool {
        x.iter().enumerate().all(|(i, xi)| {
            bx.lower[i] + cfg.eps <= xi + tau && *xi <= bx.upper[i] - cfg.eps + tau
        })
    };
    let subseteq = |inner: &BoxBounds, outer: &BoxBounds| -> bool {
        if inner.is_empty(cfg) {
            return true;
        }
        if outer.is_empty(cfg) {
            return false;
        }
        (0..inner.dim()).all(|i| {
            outer.lower[i] <= inner.lower[i] + tau && inner.upper[i] <= outer.upper[i] + tau
        })
    };
    match ax {
        Axiom::ConceptIncl { lhs, rhs } => {
            let l = eta.basic_box(*lhs);
            let r = eta.rhs_box(*rhs);
            subseteq(&l, &r)
        }
        Axiom::RoleIncl { lhs, rhs } => {
            let (lh, lt, lb) = eta.role_boxes[lhs.name as usize].oriented(lhs.inverted);
            let (rh, rt, rb) = eta.role_boxes[rhs.name as usize].oriented(rhs.inverted);
            subseteq(lh, rh) && subseteq(lt, rt) && subseteq(lb, rb)
        }
        Axiom::ConceptAssert { concept, individual } => {
            member(&eta.basic_box(*concept), &eta.pos[*individual as usize])
        }
        Axiom::RoleAssert { role, subject, object } => {
            let boxes = &eta.role_boxes[*role as usize];
            let pa = &eta.pos[*subject as usize];
            let pb = &eta.pos[*object as usize];
            let ba = &eta.bump[*subject as usize];
            let bb = &eta.bump[*object as usize];
            let head_pt: Vec<f64> = pa.iter().zip(bb).map(|(x, y)| x + y).collect();
            let tail_pt: Vec<f64> = pb.iter().zip(ba).map(|(x, y)| x + y).collect();
            member(&boxes.head, &head_pt)
                && member(&boxes.tail, &tail_pt)
                && member(&boxes.bump, ba)
                && member(&boxes.bump, bb)
        }
    }
}

/// Deterministic synthetic family ABox: generations of couples with
/// children, sibling links, and cross-family marriages. Fathers and
/// mothers are disjoint by construction, so any sample is satisfiable
/// with the family TBox.
pub fn synthetic_family_abox(n_families: usize, seed: u64) -> Vec<(String, String, String)> {
    let mut rng = boxlite::rng::Rng::new(seed);
    let mut out = Vec::new();
    let mut prev_kids: Vec<String> = Vec::new();
    for fam in 0..n_families {
        let father = format!("f{fam}");
        let mother = format!("m{fam}");
        out.push(("spouse".into(), father.clone(), mother.clone()));
        let n_kids = 1 + rng.below(3);
        let kids: Vec<String> = (0..n_kids).map(|j| format!("k{fam}x{j}")).collect();
        for k in &kids {
            out.push(("hasFather".into(), k.clone(), father.clone()));
            out.push(("hasMother".into(), k.clone(), mother.clone()));
            out.push(("hasChild".into(), father.clone(), k.clone()));
            out.push(("hasChild".into(), mother.clone(), k.clone()));
        }
        for i in 0..kids.len() {
            for j in (i + 1)..kids.len() {
                out.push(("hasSibling".into(), kids[i].clone(), kids[j].clone()));
            }
        }
        // Tie the graph together across generations.
        if !prev_kids.is_empty() && rng.below(2) == 0 {
            let other = prev_kids[rng.below(prev_kids.len())].clone();
            out.push(("spouse".into(), kids[0].clone(), other));
        }
        prev_kids = kids;
    }
    out
}
