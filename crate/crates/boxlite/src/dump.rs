//! Embedding dump format: a line-oriented text file carrying one
//! embedding with 17-significant-digit values for bit-faithful
//! round-trips.
//!
//! ```text
//! boxlite-embedding v1
//! config <d> <s_world> <eps>
//! pos <individual> v1 .. vd
//! bump <individual> v1 .. vd
//! cbox <concept> L1 .. Ld U1 .. Ud
//! rbox <role> head|tail|bump L1 .. Ld U1 .. Ud
//! ```

use crate::geometry::{BoxBounds, BoxInterpretation, RoleBoxes, WorldConfig};
use crate::ontology::Signature;

#[derive(Debug, thiserror::Error)]
pub enum DumpError {
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error("missing `{0}` entry for `{1}`")]
    Missing(&'static str, String),
    #[error("unknown symbol `{0}` in dump")]
    UnknownSymbol(String),
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serialize an embedding to the dump format.
pub fn write_embedding(eta: &BoxInterpretation) -> String {
    let sig = &eta.signature;
    let mut out = String::new();
    out.push_str("boxlite-embedding v1\n");
    out.push_str(&format!(
        "config {} {} {}\n",
        eta.config.d,
        fmt_value(eta.config.s_world),
        fmt_value(eta.config.eps)
    ));
    let join = |vs: &[f64]| vs.iter().map(|v| fmt_value(*v)).collect::<Vec<_>>().join(" ");
    for (a, name) in sig.individual_names().iter().enumerate() {
        out.push_str(&format!("pos {} {}\n", name, join(&eta.pos[a])));
        out.push_str(&format!("bump {} {}\n", name, join(&eta.bump[a])));
    }
    for (c, name) in sig.concept_names().iter().enumerate() {
        let bx = &eta.concept_box[c];
        out.push_str(&format!("cbox {} {} {}\n", name, join(&bx.lower), join(&bx.upper)));
    }
    for (r, name) in sig.role_names().iter().enumerate() {
        let boxes = &eta.role_boxes[r];
        for (kind, bx) in
            [("head", &boxes.head), ("tail", &boxes.tail), ("bump", &boxes.bump)]
        {
            out.push_str(&format!("rbox {} {} {} {}\n", name, kind, join(&bx.lower), join(&bx.upper)));
        }
    }
    out
}

/// Parse a dump produced by `write_embedding`. The signature supplies the
/// symbol universe; every individual, concept, and role must be covered.
pub fn read_embedding(text: &str, sig: &Signature) -> Result<BoxInterpretation, DumpError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| DumpError::Malformed(1, "empty dump".into()))?;
    if header.trim() != "boxlite-embedding v1" {
        return Err(DumpError::Malformed(1, format!("unexpected header `{header}`")));
    }
    let (ln, config_line) = lines
        .next()
        .ok_or_else(|| DumpError::Malformed(2, "missing config line".into()))?;
    let parts: Vec<&str> = config_line.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "config" {
        return Err(DumpError::Malformed(ln + 1, "expected `config d s_world eps`".into()));
    }
    let parse_f = |s: &str, ln: usize| {
        s.parse::<f64>().map_err(|e| DumpError::Malformed(ln + 1, e.to_string()))
    };
    let d: usize = parts[1]
        .parse()
        .map_err(|e: std::num::ParseIntError| DumpError::Malformed(ln + 1, e.to_string()))?;
    let config = WorldConfig { d, s_world: parse_f(parts[2], ln)?, eps: parse_f(parts[3], ln)? };

    let mut pos: Vec<Option<Vec<f64>>> = vec![None; sig.n_individuals()];
    let mut bump: Vec<Option<Vec<f64>>> = vec![None; sig.n_individuals()];
    let mut cbox: Vec<Option<BoxBounds>> = vec![None; sig.n_concepts()];
    let mut rbox: Vec<[Option<BoxBounds>; 3]> =
        (0..sig.n_roles()).map(|_| [None, None, None]).collect();

    for (i, line) in lines {
        let ln = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let values = |from: usize, count: usize| -> Result<Vec<f64>, DumpError> {
            if toks.len() != from + count {
                return Err(DumpError::Malformed(
                    ln,
                    format!("expected {count} values, got {}", toks.len() - from),
                ));
            }
            toks[from..].iter().map(|t| parse_f(t, i)).collect()
        };
        match toks[0] {
            "pos" | "bump" => {
                let a = sig
                    .individual_id(toks[1])
                    .ok_or_else(|| DumpError::UnknownSymbol(toks[1].into()))?;
                let v = values(2, d)?;
                if toks[0] == "pos" {
                    pos[a as usize] = Some(v);
                } else {
                    bump[a as usize] = Some(v);
                }
            }
            "cbox" => {
                let c = sig
                    .concept_id(toks[1])
                    .ok_or_else(|| DumpError::UnknownSymbol(toks[1].into()))?;
                let v = values(2, 2 * d)?;
                cbox[c as usize] =
                    Some(BoxBounds { lower: v[..d].to_vec(), upper: v[d..].to_vec() });
            }
            "rbox" => {
                let r = sig
                    .role_id(toks[1])
                    .ok_or_else(|| DumpError::UnknownSymbol(toks[1].into()))?;
                let slot = match toks[2] {
                    "head" => 0,
                    "tail" => 1,
                    "bump" => 2,
                    other => {
                        return Err(DumpError::Malformed(ln, format!("unknown role box `{other}`")))
                    }
                };
                let v = values(3, 2 * d)?;
                rbox[r as usize][slot] =
                    Some(BoxBounds { lower: v[..d].to_vec(), upper: v[d..].to_vec() });
            }
            other => return Err(DumpError::Malformed(ln, format!("unknown entry `{other}`"))),
        }
    }

    let unwrap_ind = |v: Vec<Option<Vec<f64>>>, what: &'static str| {
        v.into_iter()
            .enumerate()
            .map(|(a, o)| {
                o.ok_or_else(|| DumpError::Missing(what, sig.individual_name(a as u32).into()))
            })
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(BoxInterpretation {
        config,
        signature: sig.clone(),
        pos: unwrap_ind(pos, "pos")?,
        bump: unwrap_ind(bump, "bump")?,
        concept_box: cbox
            .into_iter()
            .enumerate()
            .map(|(c, o)| {
                o.ok_or_else(|| DumpError::Missing("cbox", sig.concept_name(c as u32).into()))
            })
            .collect::<Result<Vec<_>, _>>()?,
        role_boxes: rbox
            .into_iter()
            .enumerate()
            .map(|(r, [h, t, b])| {
                let name = || sig.role_name(r as u32).to_string();
                Ok(RoleBoxes {
                    head: h.ok_or_else(|| DumpError::Missing("rbox head", name()))?,
                    tail: t.ok_or_else(|| DumpError::Missing("rbox tail", name()))?,
                    bump: b.ok_or_else(|| DumpError::Missing("rbox bump", name()))?,
                })
            })
            .collect::<Result<Vec<_>, _>>()?,
    })
}
