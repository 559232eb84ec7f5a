//! Line-oriented instance text format.
//!
//! ```text
//! # comment
//! p bibranch <n> <m>
//! s <id> <id> ...
//! t <id> ...
//! a <tail> <head> <weight>      (m lines)
//! ```
//!
//! `s` and `t` lines may repeat; their ids accumulate.

use std::hash::Hasher;

use fnv::FnvHasher;
use thiserror::Error;

use super::{DiArc, Instance, InstanceError, WEIGHT_LIMIT};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing problem line `p bibranch <n> <m>`")]
    MissingHeader,
    #[error("expected {expected} arcs, found {found}")]
    ArcCount { expected: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, ParseError> {
    tok.parse().map_err(|_| syntax(line, format!("bad {what} `{tok}`")))
}

pub fn parse_instance(src: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut s_ids = Vec::new();
    let mut t_ids = Vec::new();
    let mut arcs = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let tag = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();
        if tag != "p" && header.is_none() {
            return Err(syntax(line, "item before problem line"));
        }
        match tag {
            "p" => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate problem line"));
                }
                if rest.len() != 3 || rest[0] != "bibranch" {
                    return Err(syntax(line, "expected `p bibranch <n> <m>`"));
                }
                header = Some((parse_num(rest[1], line, "n")?, parse_num(rest[2], line, "m")?));
            }
            "s" | "t" => {
                let dst = if tag == "s" { &mut s_ids } else { &mut t_ids };
                for tok in rest {
                    dst.push(parse_num::<usize>(tok, line, "vertex id")?);
                }
            }
            "a" => {
                if rest.len() != 3 {
                    return Err(syntax(line, "expected `a <tail> <head> <weight>`"));
                }
                let tail = parse_num(rest[0], line, "tail")?;
                let head = parse_num(rest[1], line, "head")?;
                let weight: i64 = parse_num(rest[2], line, "weight")?;
                if !(0..WEIGHT_LIMIT).contains(&weight) {
                    return Err(syntax(line, format!("weight {weight} outside [0, 2^31)")));
                }
                arcs.push(DiArc::new(tail, head, weight));
            }
            other => return Err(syntax(line, format!("unknown item `{other}`"))),
        }
    }
    let (n, m) = header.ok_or(ParseError::MissingHeader)?;
    if arcs.len() != m {
        return Err(ParseError::ArcCount { expected: m, found: arcs.len() });
    }
    let mut seen = vec![0u8; n];
    for (&v, bit) in s_ids.iter().map(|v| (v, 1u8)).chain(t_ids.iter().map(|v| (v, 2u8))) {
        if v >= n {
            return Err(InstanceError::VertexOutOfRange(v).into());
        }
        if seen[v] & bit != 0 {
            return Err(InstanceError::Duplicate(v).into());
        }
        seen[v] |= bit;
    }
    if let Some(v) = seen.iter().position(|&b| b == 3) {
        return Err(InstanceError::BothSides(v).into());
    }
    if let Some(v) = seen.iter().position(|&b| b == 0) {
        return Err(InstanceError::NoSide(v).into());
    }
    Ok(Instance::new(n, &s_ids, arcs)?)
}

fn join(ids: &[usize]) -> String {
    ids.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Canonical text: no comments, sorted S and T lines, arcs in index order.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = format!("p bibranch {} {}\n", inst.n(), inst.m());
    out.push_str(&format!("s {}\n", join(inst.s_vertices())));
    out.push_str(&format!("t {}\n", join(inst.t_vertices())));
    for a in inst.arcs() {
        out.push_str(&format!("a {} {} {}\n", a.tail, a.head, a.weight));
    }
    out
}

/// 64-bit FNV-1a over the canonical text.
pub fn instance_digest(inst: &Instance) -> u64 {
    let mut h = FnvHasher::default();
    h.write(write_instance(inst).as_bytes());
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::e1;

    const E1: &str = "# fixture\np bibranch 4 4\ns 0 1\nt 2 3\na 0 1 1\na 1 2 2  # a2\na 0 3 4\na 2 3 1\n";

    #[test]
    fn parse_and_canonicalize() {
        let inst = parse_instance(E1).unwrap();
        assert_eq!(inst, e1());
        let canon = write_instance(&inst);
        assert_eq!(parse_instance(&canon).unwrap(), inst);
        assert_eq!(canon, "p bibranch 4 4\ns 0 1\nt 2 3\na 0 1 1\na 1 2 2\na 0 3 4\na 2 3 1\n");
    }

    #[test]
    fn digest_is_fnv1a_of_canonical_text() {
        // FNV-1a reference values
        let mut h = FnvHasher::default();
        h.write(b"");
        assert_eq!(h.finish(), 0xcbf29ce484222325);
        let mut h = FnvHasher::default();
        h.write(b"a");
        assert_eq!(h.finish(), 0xaf63dc4c8601ec8c);
        let a = instance_digest(&parse_instance(E1).unwrap());
        let b = instance_digest(&e1());
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_instance(""), Err(ParseError::MissingHeader));
        assert!(matches!(parse_instance("p bibranch 2 1\ns 0\nt 1\n"), Err(ParseError::ArcCount { .. })));
        assert!(matches!(
            parse_instance("p bibranch 2 1\ns 0\nt 1\na 1 0 1\n"),
            Err(ParseError::Invalid(InstanceError::TToS(0)))
        ));
        assert!(matches!(
            parse_instance("p bibranch 2 0\ns 0 1\nt 1\n"),
            Err(ParseError::Invalid(InstanceError::BothSides(1)))
        ));
        assert!(matches!(
            parse_instance("p bibranch 3 0\ns 0\nt 1\n"),
            Err(ParseError::Invalid(InstanceError::NoSide(2)))
        ));
        assert!(matches!(parse_instance("p bibranch 2 1\ns 0\nt 1\na 0 1 x\n"), Err(ParseError::Syntax { line: 4, .. })));
        assert!(matches!(
            parse_instance("p bibranch 2 1\ns 0\nt 1\na 0 1 2147483648\n"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(parse_instance("s 0\np bibranch 1 0\n"), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(parse_instance("p bibranch 2 0\ns 0\nt 1\nq\n"), Err(ParseError::Syntax { .. })));
    }
}
