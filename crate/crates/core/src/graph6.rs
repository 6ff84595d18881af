//! The nauty graph6 encoding: a size header followed by the upper triangle of
//! the adjacency matrix, column by column, packed six bits per byte with 63
//! added.

use crate::error::{Error, Result};
use crate::srg::Graph;

const BIAS: u8 = 63;

fn encode_size(n: usize, out: &mut Vec<u8>) {
    if n <= 62 {
        out.push(n as u8 + BIAS);
    } else if n <= 258_047 {
        out.push(b'~');
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + BIAS);
        }
    } else {
        out.extend_from_slice(b"~~");
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + BIAS);
        }
    }
}

fn decode_size(bytes: &[u8]) -> Result<(usize, usize)> {
    let word = |chunk: &[u8]| chunk.iter().fold(0usize, |acc, &b| (acc << 6) | (b - BIAS) as usize);
    match bytes {
        [] => Err(Error::MalformedGraph6("empty input".into())),
        [b'~', b'~', rest @ ..] => {
            if rest.len() < 6 {
                return Err(Error::MalformedGraph6("truncated size header".into()));
            }
            let n = word(&rest[..6]);
            if n <= 258_047 {
                return Err(Error::MalformedGraph6("non-minimal size header".into()));
            }
            Ok((n, 8))
        }
        [b'~', rest @ ..] => {
            if rest.len() < 3 {
                return Err(Error::MalformedGraph6("truncated size header".into()));
            }
            let n = word(&rest[..3]);
            if n <= 62 {
                return Err(Error::MalformedGraph6("non-minimal size header".into()));
            }
            Ok((n, 4))
        }
        [b, ..] => Ok(((b - BIAS) as usize, 1)),
    }
}

pub fn emit_graph6(g: &Graph) -> String {
    let n = g.order();
    let mut out = Vec::new();
    encode_size(n, &mut out);
    let mut acc = 0u8;
    let mut nbits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            nbits += 1;
            if nbits == 6 {
                out.push(acc + BIAS);
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        out.push((acc << (6 - nbits)) + BIAS);
    }
    String::from_utf8(out).expect("graph6 output is ASCII")
}

/// Parses one graph6 line; a trailing newline is allowed.
pub fn parse_graph6(text: &str) -> Result<Graph> {
    let bytes = text.strip_suffix('\n').unwrap_or(text).as_bytes();
    if let Some(pos) = bytes.iter().position(|b| !(BIAS..=126).contains(b)) {
        return Err(Error::MalformedGraph6(format!("byte {} out of range at offset {pos}", bytes[pos])));
    }
    let (n, header) = decode_size(bytes)?;
    let body = &bytes[header..];
    let nbits = n * n.saturating_sub(1) / 2;
    let expected = nbits.div_ceil(6);
    if body.len() != expected {
        return Err(Error::MalformedGraph6(format!(
            "expected {expected} data bytes for {n} vertices, found {}",
            body.len()
        )));
    }
    let bit = |k: usize| (body[k / 6] - BIAS) >> (5 - k % 6) & 1 == 1;
    if (nbits..expected * 6).any(bit) {
        return Err(Error::MalformedGraph6("nonzero padding bits".into()));
    }
    let mut g = Graph::empty(n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Parses a file of graph6 lines, skipping blank lines.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<Graph>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(parse_graph6).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_graphs() {
        assert_eq!(parse_graph6("@").unwrap().order(), 1);
        let k2 = parse_graph6("A_").unwrap();
        assert_eq!(k2.order(), 2);
        assert!(k2.has_edge(0, 1));
        assert_eq!(emit_graph6(&k2), "A_");
        assert_eq!(emit_graph6(&Graph::empty(0)), "?");
        // Petersen graph as printed by nauty's geng/showg.
        let petersen = parse_graph6("IheA@GUAo").unwrap();
        assert_eq!(petersen.order(), 10);
        assert!((0..10).all(|v| petersen.degree(v) == 3));
        assert_eq!(emit_graph6(&petersen), "IheA@GUAo");
    }

    #[test]
    fn long_header() {
        let mut g = Graph::empty(64);
        g.add_edge(0, 63);
        g.add_edge(5, 6);
        let s = emit_graph6(&g);
        assert!(s.starts_with("~?@?"));
        assert_eq!(parse_graph6(&s).unwrap(), g);
    }

    #[test]
    fn malformed() {
        assert!(parse_graph6("").is_err());
        assert!(parse_graph6("A").is_err());
        assert!(parse_graph6("A__").is_err());
        assert!(parse_graph6("A`").is_err());
        assert!(parse_graph6("A\x7f").is_err());
        assert!(parse_graph6("~??").is_err());
        assert!(parse_graph6("~??~").is_err());
    }
}
