//! Parser for the line-oriented KB DSL.
//!
//! Grammar (whitespace-separated tokens, `#` starts a comment):
//!   concept NAME | role NAME | individual NAME      declarations (optional)
//!   ci CONCEPT CONCEPT                              concept inclusion
//!   ri ROLETOK ROLETOK                              role inclusion
//!   ca BASIC NAME                                   concept assertion
//!   ra ROLETOK NAME NAME                            role assertion
//! where ROLETOK is `NAME` or `inv(NAME)` (nesting collapses), BASIC is
//! `NAME` or `exists(ROLETOK)`, and CONCEPT additionally allows
//! `not(BASIC)` on the right-hand side.

use super::{Axiom, Basic, KnowledgeBase, Rhs, Role, Signature};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRole {
    pub name: String,
    pub inverted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawBasic {
    Atomic(String),
    Exists(RawRole),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawRhs {
    Pos(RawBasic),
    Neg(RawBasic),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawAxiom {
    Ci(RawBasic, RawRhs),
    Ri(RawRole, RawRole),
    Ca(RawBasic, String),
    Ra(RawRole, String, String),
}

/// Rewrite inverse-role assertions (`ra inv(R) a b` becomes `ra R b a`).
/// Double inverses collapse during tokenization; idempotent.
pub fn normalize_axiom(ax: RawAxiom) -> RawAxiom {
    match ax {
        RawAxiom::Ra(role, a, b) if role.inverted => {
            RawAxiom::Ra(RawRole { name: role.name, inverted: false }, b, a)
        }
        other => other,
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: concept inclusion has no atomic side: {axiom}")]
    NamedFormViolation { line: usize, axiom: String },
    #[error("symbol `{symbol}` is used both as {first} and as {second}")]
    DisjointnessViolation { symbol: String, first: &'static str, second: &'static str },
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Kind {
    Concept,
    RoleName,
    Individual,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::Concept => "a concept",
            Kind::RoleName => "a role",
            Kind::Individual => "an individual",
        }
    }
}

struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

impl Tok<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }
}

fn check_name(tok: &Tok) -> Result<String, ParseError> {
    let t = tok.text;
    if t.is_empty() || t.contains(['(', ')']) {
        return Err(tok.err(format!("expected a plain name, got `{t}`")));
    }
    Ok(t.to_string())
}

/// `NAME` or `inv( ... )` with arbitrary nesting collapsed by parity.
fn parse_role_token(tok: &Tok, text: &str, inverted: bool) -> Result<RawRole, ParseError> {
    if let Some(inner) = text.strip_prefix("inv(").and_then(|s| s.strip_suffix(')')) {
        parse_role_token(tok, inner, !inverted)
    } else if text.is_empty() || text.contains(['(', ')']) {
        Err(tok.err(format!("expected a role token, got `{}`", tok.text)))
    } else {
        Ok(RawRole { name: text.to_string(), inverted })
    }
}

fn parse_basic_token(tok: &Tok, text: &str) -> Result<RawBasic, ParseError> {
    if let Some(inner) = text.strip_prefix("exists(").and_then(|s| s.strip_suffix(')')) {
        Ok(RawBasic::Exists(parse_role_token(tok, inner, false)?))
    } else if text.is_empty() || text.contains(['(', ')']) {
        Err(tok.err(format!("expected a basic concept token, got `{}`", tok.text)))
    } else {
        Ok(RawBasic::Atomic(text.to_string()))
    }
}

fn parse_rhs_token(tok: &Tok) -> Result<RawRhs, ParseError> {
    if let Some(inner) = tok.text.strip_prefix("not(").and_then(|s| s.strip_suffix(')')) {
        Ok(RawRhs::Neg(parse_basic_token(tok, inner)?))
    } else {
        Ok(RawRhs::Pos(parse_basic_token(tok, tok.text)?))
    }
}

fn tokens(line: &str, line_no: usize) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut col = 0;
    for piece in body.split_whitespace() {
        let idx = body[col..].find(piece).unwrap() + col;
        out.push(Tok { text: piece, line: line_no, col: idx + 1 });
        col = idx + piece.len();
    }
    out
}

struct Namespaces {
    kinds: BTreeMap<String, (Kind, &'static str)>,
}

impl Namespaces {
    fn new() -> Self {
        Namespaces { kinds: BTreeMap::new() }
    }
    fn record(&mut self, name: &str, kind: Kind) -> Result<(), ParseError> {
        match self.kinds.get(name) {
            None => {
                self.kinds.insert(name.to_string(), (kind, kind.label()));
                Ok(())
            }
            Some((k, first)) if *k != kind => Err(ParseError::DisjointnessViolation {
                symbol: name.to_string(),
                first,
                second: kind.label(),
            }),
            Some(_) => Ok(()),
        }
    }
    fn of_kind(&self, kind: Kind) -> Vec<String> {
        self.kinds
            .iter()
            .filter(|(_, (k, _))| *k == kind)
            .map(|(n, _)| n.clone())
            .collect()
    }
}

fn record_basic(ns: &mut Namespaces, b: &RawBasic) -> Result<(), ParseError> {
    match b {
        RawBasic::Atomic(n) => ns.record(n, Kind::Concept),
        RawBasic::Exists(r) => ns.record(&r.name, Kind::RoleName),
    }
}

/// Parse a KB DSL document into a validated knowledge base. The signature
/// is the union of declared and used symbols; named form is enforced.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let mut ns = Namespaces::new();
    let mut raw: Vec<(usize, RawAxiom)> = Vec::new();

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let toks = tokens(line, line_no);
        if toks.is_empty() {
            continue;
        }
        let head = &toks[0];
        let expect = |n: usize| -> Result<(), ParseError> {
            if toks.len() != n + 1 {
                Err(head.err(format!(
                    "`{}` expects {} argument(s), got {}",
                    head.text,
                    n,
                    toks.len() - 1
                )))
            } else {
                Ok(())
            }
        };
        match head.text {
            "concept" => {
                expect(1)?;
                ns.record(&check_name(&toks[1])?, Kind::Concept)?;
            }
            "role" => {
                expect(1)?;
                ns.record(&check_name(&toks[1])?, Kind::RoleName)?;
            }
            "individual" => {
                expect(1)?;
                ns.record(&check_name(&toks[1])?, Kind::Individual)?;
            }
            "ci" => {
                expect(2)?;
                let lhs = parse_basic_token(&toks[1], toks[1].text)?;
                let rhs = parse_rhs_token(&toks[2])?;
                record_basic(&mut ns, &lhs)?;
                let rb = match &rhs {
                    RawRhs::Pos(b) | RawRhs::Neg(b) => b.clone(),
                };
                record_basic(&mut ns, &rb)?;
                // Named form constrains positive inclusions; disjointness
                // axioms B ⊑ ¬C may pair any two basics.
                let lhs_atomic = matches!(lhs, RawBasic::Atomic(_));
                let rhs_atomic = matches!(rb, RawBasic::Atomic(_));
                let negative = matches!(rhs, RawRhs::Neg(_));
                if !lhs_atomic && !rhs_atomic && !negative {
                    return Err(ParseError::NamedFormViolation {
                        line: line_no,
                        axiom: line.trim().to_string(),
                    });
                }
                raw.push((line_no, RawAxiom::Ci(lhs, rhs)));
            }
            "ri" => {
                expect(2)?;
                let lhs = parse_role_token(&toks[1], toks[1].text, false)?;
                let rhs = parse_role_token(&toks[2], toks[2].text, false)?;
                ns.record(&lhs.name, Kind::RoleName)?;
                ns.record(&rhs.name, Kind::RoleName)?;
                raw.push((line_no, RawAxiom::Ri(lhs, rhs)));
            }
            "ca" => {
                expect(2)?;
                let c = parse_basic_token(&toks[1], toks[1].text)?;
                let ind = check_name(&toks[2])?;
                record_basic(&mut ns, &c)?;
                ns.record(&ind, Kind::Individual)?;
                raw.push((line_no, RawAxiom::Ca(c, ind)));
            }
            "ra" => {
                expect(3)?;
                let role = parse_role_token(&toks[1], toks[1].text, false)?;
                let a = check_name(&toks[2])?;
                let b = check_name(&toks[3])?;
                ns.record(&role.name, Kind::RoleName)?;
                ns.record(&a, Kind::Individual)?;
                ns.record(&b, Kind::Individual)?;
                raw.push((line_no, RawAxiom::Ra(role, a, b)));
            }
            other => {
                return Err(head.err(format!(
                    "unknown statement `{other}` (expected concept/role/individual/ci/ri/ca/ra)"
                )))
            }
        }
    }

    let signature = Signature::new(
        ns.of_kind(Kind::Concept),
        ns.of_kind(Kind::RoleName),
        ns.of_kind(Kind::Individual),
    )
    .map_err(|e| match e {
        super::SignatureError::Disjointness(s) => ParseError::DisjointnessViolation {
            symbol: s,
            first: "one namespace",
            second: "another",
        },
    })?;

    let resolve_role = |r: &RawRole| Role { name: signature.role_id(&r.name).unwrap(), inverted: r.inverted };
    let resolve_basic = |b: &RawBasic| match b {
        RawBasic::Atomic(n) => Basic::Atomic(signature.concept_id(n).unwrap()),
        RawBasic::Exists(r) => Basic::Exists(resolve_role(r)),
    };

    let mut axioms = Vec::new();
    let mut seen = BTreeSet::new();
    for (_, ax) in raw {
        let ax = normalize_axiom(ax);
        let typed = match &ax {
            RawAxiom::Ci(lhs, rhs) => Axiom::ConceptIncl {
                lhs: resolve_basic(lhs),
                rhs: match rhs {
                    RawRhs::Pos(b) => Rhs::Pos(resolve_basic(b)),
                    RawRhs::Neg(b) => Rhs::Neg(resolve_basic(b)),
                },
            },
            RawAxiom::Ri(lhs, rhs) => Axiom::RoleIncl { lhs: resolve_role(lhs), rhs: resolve_role(rhs) },
            RawAxiom::Ca(c, ind) => Axiom::ConceptAssert {
                concept: resolve_basic(c),
                individual: signature.individual_id(ind).unwrap(),
            },
            RawAxiom::Ra(role, a, b) => Axiom::RoleAssert {
                role: signature.role_id(&role.name).unwrap(),
                subject: signature.individual_id(a).unwrap(),
                object: signature.individual_id(b).unwrap(),
            },
        };
        if seen.insert(typed) {
            axioms.push(typed);
        }
    }

    KnowledgeBase::new(signature, axioms).map_err(|e| ParseError::Syntax {
        line: 0,
        col: 0,
        msg: e.to_string(),
    })
}

/// Parse one axiom line against an existing signature. Every symbol must
/// already be in the signature.
pub fn parse_axiom_line(line: &str, sig: &Signature) -> Result<Axiom, ParseError> {
    let mini = parse_kb(line)?;
    let mut axioms = mini.axioms();
    let ax = axioms
        .next()
        .ok_or_else(|| ParseError::Syntax { line: 1, col: 1, msg: "no axiom on line".into() })?;
    if axioms.next().is_some() {
        return Err(ParseError::Syntax { line: 1, col: 1, msg: "expected a single axiom".into() });
    }
    let msig = &mini.signature;
    let unknown = |name: &str| ParseError::Syntax {
        line: 1,
        col: 1,
        msg: format!("symbol `{name}` is not in the knowledge base signature"),
    };
    let map_role = |r: &Role| -> Result<Role, ParseError> {
        let name = msig.role_name(r.name);
        Ok(Role { name: sig.role_id(name).ok_or_else(|| unknown(name))?, inverted: r.inverted })
    };
    let map_basic = |b: &Basic| -> Result<Basic, ParseError> {
        Ok(match b {
            Basic::Atomic(c) => {
                let name = msig.concept_name(*c);
                Basic::Atomic(sig.concept_id(name).ok_or_else(|| unknown(name))?)
            }
            Basic::Exists(r) => Basic::Exists(map_role(r)?),
        })
    };
    let map_ind = |i: &u32| -> Result<u32, ParseError> {
        let name = msig.individual_name(*i);
        sig.individual_id(name).ok_or_else(|| unknown(name))
    };
    Ok(match ax {
        Axiom::ConceptIncl { lhs, rhs } => Axiom::ConceptIncl {
            lhs: map_basic(lhs)?,
            rhs: match rhs {
                Rhs::Pos(b) => Rhs::Pos(map_basic(b)?),
                Rhs::Neg(b) => Rhs::Neg(map_basic(b)?),
            },
        },
        Axiom::RoleIncl { lhs, rhs } => {
            Axiom::RoleIncl { lhs: map_role(lhs)?, rhs: map_role(rhs)? }
        }
        Axiom::ConceptAssert { concept, individual } => Axiom::ConceptAssert {
            concept: map_basic(concept)?,
            individual: map_ind(individual)?,
        },
        Axiom::RoleAssert { role, subject, object } => Axiom::RoleAssert {
            role: {
                let name = msig.role_name(*role);
                sig.role_id(name).ok_or_else(|| unknown(name))?
            },
            subject: map_ind(subject)?,
            object: map_ind(object)?,
        },
    })
}
