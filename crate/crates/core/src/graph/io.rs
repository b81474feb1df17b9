//! Text formats for instances and encodings.
//!
//! Edge-list instances:
//!
//! ```text
//! # seed=7            <- optional provenance, "# key=value"
//! # any other comment
//! 3 2                 <- n m
//! 1 2 1.0             <- l k w, 1-based, l < k
//! 2 3 -0.5
//! ```
//!
//! Encodings are JSON objects with arrays `alpha`, `beta`, `permutation`
//! (0-based), `sigma` and the scalar `sign`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::encoding::{AuxMap, Rank2Encoding, Sign};
use super::instance::{MaxCutInstance, Metadata};
use crate::error::{Error, Result};

/// Largest vertex count accepted from text input.
pub const MAX_PARSED_VERTICES: usize = 1 << 24;

fn metadata_entry(comment: &str) -> Option<(&str, &str)> {
    let (key, value) = comment.split_once('=')?;
    let key = key.trim();
    let valid_key = !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    valid_key.then(|| (key, value.trim()))
}

fn parse_index(tok: &str, n: usize, line: usize) -> Result<usize> {
    let idx: usize = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("bad vertex index {tok:?}")))?;
    if idx == 0 || idx > n {
        return Err(Error::parse(
            line,
            format!("vertex index {idx} out of range 1..={n}"),
        ));
    }
    Ok(idx - 1)
}

/// Parses the edge-list format. Errors carry the 1-based line number.
pub fn parse_instance(text: &str) -> Result<MaxCutInstance> {
    let mut metadata = Metadata::new();
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let body = raw.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(comment) = body.strip_prefix('#') {
            if header.is_none() {
                if let Some((k, v)) = metadata_entry(comment) {
                    metadata.insert(k, v);
                }
            }
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match header {
            None => {
                if toks.len() != 2 {
                    return Err(Error::parse(line, "header must be \"n m\""));
                }
                let n: usize = toks[0]
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad vertex count {:?}", toks[0])))?;
                let m: usize = toks[1]
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad edge count {:?}", toks[1])))?;
                if n == 0 || n > MAX_PARSED_VERTICES {
                    return Err(Error::parse(
                        line,
                        format!("vertex count {n} outside 1..={MAX_PARSED_VERTICES}"),
                    ));
                }
                if m > n.saturating_mul(n - 1) / 2 {
                    return Err(Error::parse(line, format!("{m} edges exceed n(n-1)/2 for n = {n}")));
                }
                header = Some((n, m));
            }
            Some((n, m)) => {
                if toks.len() != 3 {
                    return Err(Error::parse(line, "edge line must be \"l k w\""));
                }
                if edges.len() == m {
                    return Err(Error::parse(line, format!("more than {m} edge lines")));
                }
                let a = parse_index(toks[0], n, line)?;
                let b = parse_index(toks[1], n, line)?;
                if a == b {
                    return Err(Error::parse(line, format!("self-loop on vertex {}", a + 1)));
                }
                let w: f64 = toks[2]
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad weight {:?}", toks[2])))?;
                if !w.is_finite() {
                    return Err(Error::parse(line, "weight must be finite"));
                }
                let key = (a.min(b), a.max(b));
                if !seen.insert(key) {
                    return Err(Error::parse(
                        line,
                        format!("duplicate pair ({}, {})", key.0 + 1, key.1 + 1),
                    ));
                }
                edges.push((a, b, w));
            }
        }
    }

    let (n, m) = header.ok_or_else(|| Error::parse(last_line.max(1), "missing \"n m\" header"))?;
    if edges.len() != m {
        return Err(Error::parse(
            last_line.max(1),
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Ok(MaxCutInstance::from_edges(n, edges)?.with_metadata(metadata))
}

/// Writes the edge-list format; weights use the shortest round-trip decimal form.
pub fn serialize_instance(inst: &MaxCutInstance) -> String {
    let mut out = String::new();
    for (k, v) in inst.metadata().iter() {
        let _ = writeln!(out, "# {k}={v}");
    }
    let edges: Vec<_> = inst.edges().collect();
    let _ = writeln!(out, "{} {}", inst.n(), edges.len());
    for e in edges {
        let _ = writeln!(out, "{} {} {:?}", e.l + 1, e.k + 1, e.w);
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EncodingDoc {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    sign: i64,
    permutation: Vec<usize>,
    sigma: Vec<i8>,
}

pub fn parse_encoding(text: &str) -> Result<Rank2Encoding> {
    let doc: EncodingDoc = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let sign = Sign::try_from(doc.sign)?;
    let aux = AuxMap::new(doc.permutation, doc.sigma)?;
    Rank2Encoding::new(doc.alpha, doc.beta, sign, aux)
}

pub fn serialize_encoding(enc: &Rank2Encoding) -> String {
    let doc = EncodingDoc {
        alpha: enc.alpha().to_vec(),
        beta: enc.beta().to_vec(),
        sign: enc.sign().as_i64(),
        permutation: enc.aux().permutation().to_vec(),
        sigma: enc.aux().sigma().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("encoding document serializes")
}
