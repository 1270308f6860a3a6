//! Plain-text file formats.
//!
//! All formats are whitespace-separated tokens with `#` starting a comment
//! that runs to the end of the line.
//!
//! ```text
//! size 2            cong 4            reds 2          sorts 1
//! op f 2            0 0 1 1           blues 1         sort s0_0 2
//! 0 1 1 0                             edge 0 0        sop f : s0_0 s0_0 -> s0_0
//!                                     edge 1 0        0 1 1 0
//! ```

use std::fmt::Write as _;

use crate::algebra::{Elem, FiniteAlgebra, Operation};
use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::interp::BipartiteGraph;
use crate::sorted::{SElem, SortedAlgebra, SortedOp};
use crate::util;

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| {
                let line = line.split('#').next().unwrap_or("");
                line.split_whitespace().map(move |t| (i + 1, t))
            })
            .collect();
        Tokens { items, pos: 0 }
    }

    fn line(&self) -> usize {
        self.items
            .get(self.pos)
            .or(self.items.last())
            .map_or(1, |&(l, _)| l)
    }

    fn remaining(&self) -> usize {
        self.items.len() - self.pos
    }

    fn peek(&self) -> Option<&'a str> {
        self.items.get(self.pos).map(|&(_, t)| t)
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        let t = self
            .items
            .get(self.pos)
            .ok_or_else(|| Error::parse(self.line(), format!("expected {what}, found end of input")))?;
        self.pos += 1;
        Ok(t.1)
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        let line = self.line();
        let t = self.next(&format!("`{word}`"))?;
        if t == word {
            Ok(())
        } else {
            Err(Error::parse(line, format!("expected `{word}`, found `{t}`")))
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let line = self.line();
        let t = self.next(what)?;
        t.parse()
            .map_err(|_| Error::parse(line, format!("expected {what}, found `{t}`")))
    }

    fn name(&mut self, what: &str) -> Result<&'a str> {
        let line = self.line();
        let t = self.next(what)?;
        if t.chars().all(|c| c.is_alphanumeric() || "_-.'".contains(c)) {
            Ok(t)
        } else {
            Err(Error::parse(line, format!("invalid {what} `{t}`")))
        }
    }

    /// `count` values below `bound`. Fails before allocating when the input
    /// is too short to hold them.
    fn values(&mut self, count: usize, bound: usize) -> Result<Vec<usize>> {
        if count > self.remaining() {
            return Err(Error::parse(
                self.line(),
                format!("expected {count} table entries, only {} tokens left", self.remaining()),
            ));
        }
        (0..count)
            .map(|_| {
                let line = self.line();
                let v = self.number("table entry")?;
                if v < bound {
                    Ok(v)
                } else {
                    Err(Error::parse(line, format!("entry {v} is outside 0..{bound}")))
                }
            })
            .collect()
    }

    fn end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(Error::parse(self.line(), format!("unexpected `{t}`"))),
        }
    }
}

fn invalid(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    }
}

pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    let mut tok = Tokens::new(text);
    tok.keyword("size")?;
    let size = tok.number("universe size")?;
    if size == 0 || size > crate::algebra::MAX_SIZE {
        return Err(Error::parse(tok.line(), format!("universe size {size} is out of range")));
    }
    let mut ops = Vec::new();
    while tok.peek().is_some() {
        tok.keyword("op")?;
        let name = tok.name("operation name")?.to_string();
        let arity = tok.number("arity")?;
        let len = u32::try_from(arity)
            .ok()
            .and_then(|a| size.checked_pow(a))
            .ok_or_else(|| Error::parse(tok.line(), format!("table of `{name}` is too large")))?;
        let table = tok.values(len, size)?.into_iter().map(|v| v as Elem).collect();
        ops.push(Operation { name, arity, table });
    }
    FiniteAlgebra::new(size, ops).map_err(|e| invalid(tok.line(), e))
}

pub fn write_algebra(alg: &FiniteAlgebra) -> String {
    let mut out = format!("size {}\n", alg.size());
    for op in alg.ops() {
        let _ = writeln!(out, "op {} {}", op.name, op.arity);
        write_table(&mut out, op.table.iter().map(|&v| v as usize), alg.size());
    }
    out
}

fn write_table(out: &mut String, values: impl Iterator<Item = usize>, width: usize) {
    let values: Vec<String> = values.map(|v| v.to_string()).collect();
    for row in values.chunks(width.max(1)) {
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

pub fn parse_congruence(text: &str) -> Result<Congruence> {
    let mut tok = Tokens::new(text);
    tok.keyword("cong")?;
    let n = tok.number("universe size")?;
    if n == 0 {
        return Err(Error::parse(tok.line(), "empty universe"));
    }
    let ids = tok.values(n, usize::MAX)?;
    tok.end()?;
    Ok(Congruence::from_block_ids(&ids))
}

pub fn write_congruence(theta: &Congruence) -> String {
    let ids: Vec<String> = theta.block_ids().iter().map(|b| b.to_string()).collect();
    format!("cong {}\n{}\n", ids.len(), ids.join(" "))
}

/// Reads a graph; a graph with an isolated vertex is rejected as malformed.
pub fn parse_graph(text: &str) -> Result<BipartiteGraph> {
    let mut tok = Tokens::new(text);
    tok.keyword("reds")?;
    let reds = tok.number("red vertex count")?;
    tok.keyword("blues")?;
    let blues = tok.number("blue vertex count")?;
    let mut edges = Vec::new();
    while tok.peek().is_some() {
        tok.keyword("edge")?;
        let line = tok.line();
        let r = tok.number("red vertex")?;
        let b = tok.number("blue vertex")?;
        if r >= reds || b >= blues {
            return Err(Error::parse(line, format!("edge {r} {b} refers to a missing vertex")));
        }
        edges.push((r, b));
    }
    BipartiteGraph::new(reds, blues, edges).map_err(|e| invalid(tok.line(), e))
}

pub fn write_graph(g: &BipartiteGraph) -> String {
    let mut out = format!("reds {}\nblues {}\n", g.reds(), g.blues());
    for (r, b) in g.edges() {
        let _ = writeln!(out, "edge {r} {b}");
    }
    out
}

/// Largest table accepted in a sorted dump.
const MAX_SORTED_TABLE: usize = 1 << 24;

pub fn parse_sorted(text: &str) -> Result<SortedAlgebra> {
    let mut tok = Tokens::new(text);
    tok.keyword("sorts")?;
    let k = tok.number("sort count")?;
    if k > tok.remaining() {
        return Err(Error::parse(tok.line(), format!("{k} sorts announced, input too short")));
    }
    let mut names: Vec<String> = Vec::with_capacity(k);
    let mut sizes = Vec::with_capacity(k);
    for _ in 0..k {
        tok.keyword("sort")?;
        let line = tok.line();
        let name = tok.name("sort name")?;
        if names.iter().any(|n| n == name) {
            return Err(Error::parse(line, format!("duplicate sort `{name}`")));
        }
        let size = tok.number("carrier size")?;
        if size == 0 || size > SElem::MAX as usize {
            return Err(Error::parse(line, format!("carrier size {size} is out of range")));
        }
        names.push(name.to_string());
        sizes.push(size);
    }
    let mut ops = Vec::new();
    while tok.peek().is_some() {
        tok.keyword("sop")?;
        let name = tok.name("operation name")?.to_string();
        tok.keyword(":")?;
        let mut inputs = Vec::new();
        loop {
            let line = tok.line();
            let t = tok.next("sort name or `->`")?;
            if t == "->" {
                break;
            }
            inputs.push(names.iter().position(|n| n == t).ok_or_else(|| Error::parse(line, format!("unknown sort `{t}`")))?);
        }
        let line = tok.line();
        let t = tok.next("output sort")?;
        let output = names
            .iter()
            .position(|n| n == t)
            .ok_or_else(|| Error::parse(line, format!("unknown sort `{t}`")))?;
        let dims: Vec<usize> = inputs.iter().map(|&s| sizes[s]).collect();
        let len = util::checked_box_size(&dims)
            .filter(|&n| n <= MAX_SORTED_TABLE)
            .ok_or_else(|| Error::parse(line, format!("table of `{name}` is too large")))?;
        let table = tok.values(len, sizes[output])?.into_iter().map(|v| v as SElem).collect();
        ops.push(SortedOp {
            name,
            inputs,
            output,
            table,
        });
    }
    SortedAlgebra::new(names, sizes, ops).map_err(|e| invalid(tok.line(), e))
}

pub fn write_sorted(alg: &SortedAlgebra) -> String {
    let mut out = format!("sorts {}\n", alg.sort_count());
    for s in 0..alg.sort_count() {
        let _ = writeln!(out, "sort {} {}", alg.sort_name(s), alg.size(s));
    }
    for op in alg.ops() {
        let _ = write!(out, "sop {} :", op.name);
        for &s in &op.inputs {
            let _ = write!(out, " {}", alg.sort_name(s));
        }
        let _ = writeln!(out, " -> {}", alg.sort_name(op.output));
        let width = op.inputs.last().map_or(1, |&s| alg.size(s));
        write_table(&mut out, op.table.iter().map(|&v| v as usize), width);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{d4, s2, w8};

    #[test]
    fn algebra_round_trip() {
        for a in [d4(), s2(), w8()] {
            assert_eq!(parse_algebra(&write_algebra(&a)).unwrap(), a);
        }
    }

    #[test]
    fn algebra_with_comments() {
        let a = parse_algebra("# a semilattice\nsize 2\nop m 2 # meet\n0 0\n0 1\n").unwrap();
        assert_eq!(a.ops()[0].table, vec![0, 0, 0, 1]);
    }

    #[test]
    fn algebra_errors_carry_lines() {
        let e = parse_algebra("size 2\nop m 2\n0 0\n0 7\n").unwrap_err();
        assert_eq!(e, Error::parse(4, "entry 7 is outside 0..2"));
        assert!(matches!(parse_algebra("size 2\nop m 2\n0 0 0"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_algebra("size 0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_algebra("size 2\nop m 99\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_algebra("size 2\nop m 1 0 1\nop m 1 0 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_algebra("sizes 2"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn congruence_round_trip() {
        let c = parse_congruence("cong 4\n0 0 1 1").unwrap();
        assert_eq!(c.num_blocks(), 2);
        assert_eq!(parse_congruence(&write_congruence(&c)).unwrap(), c);
        assert!(parse_congruence("cong 3\n0 0").is_err());
        assert!(parse_congruence("cong 2\n0 0 0").is_err());
    }

    #[test]
    fn graph_round_trip_and_isolation() {
        let g = parse_graph("reds 2\nblues 1\nedge 0 0\nedge 1 0\n").unwrap();
        assert_eq!(g.edges(), &[(0, 0), (1, 0)]);
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        assert!(matches!(parse_graph("reds 2\nblues 1\nedge 0 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("reds 1\nblues 1\nedge 0 3\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn sorted_round_trip() {
        let a = SortedAlgebra::new(
            vec!["s0_0".into(), "s1_0".into()],
            vec![2, 3],
            vec![
                SortedOp {
                    name: "f".into(),
                    inputs: vec![0, 1],
                    output: 1,
                    table: vec![0, 1, 2, 2, 1, 0],
                },
                SortedOp {
                    name: "c".into(),
                    inputs: vec![],
                    output: 0,
                    table: vec![1],
                },
            ],
        )
        .unwrap();
        let text = write_sorted(&a);
        assert!(text.contains("sop f : s0_0 s1_0 -> s1_0\n0 1 2\n2 1 0\n"));
        assert!(text.contains("sop c : -> s0_0\n1\n"));
        let b = parse_sorted(&text).unwrap();
        assert_eq!(write_sorted(&b), text);
    }

    #[test]
    fn sorted_errors() {
        assert!(parse_sorted("sorts 1\nsort a 2\nsop f : b -> a\n0 1").is_err());
        assert!(parse_sorted("sorts 2\nsort a 2\nsort a 2").is_err());
        assert!(parse_sorted("sorts 1\nsort a 2\nsop f : a -> a\n0 2").is_err());
        assert!(parse_sorted("sorts 99999999999\n").is_err());
    }
}
