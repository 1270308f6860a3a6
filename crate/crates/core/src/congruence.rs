//! Congruences: generation, the congruence lattice, quotients, the ordinary
//! and strong term conditions, rectangularity certificates and the search
//! for maximal strongly abelian congruences.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::ControlFlow;

use crate::algebra::{CloneStream, Elem, FiniteAlgebra, Limits, Operation, Term, TermOperation};
use crate::error::{Error, Result};
use crate::util;

/// An equivalence relation on `{0..n-1}` stored as block ids numbered by
/// least representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    blocks: Vec<usize>,
}

impl Congruence {
    /// Canonicalize arbitrary block labels.
    pub fn from_block_ids(ids: &[usize]) -> Self {
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let blocks = ids
            .iter()
            .map(|&b| {
                let next = relabel.len();
                *relabel.entry(b).or_insert(next)
            })
            .collect();
        Congruence { blocks }
    }

    pub fn equality(n: usize) -> Self {
        Congruence {
            blocks: (0..n).collect(),
        }
    }

    pub fn total(n: usize) -> Self {
        Congruence { blocks: vec![0; n] }
    }

    pub fn algebra_size(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_ids(&self) -> &[usize] {
        &self.blocks
    }

    #[inline]
    pub fn block(&self, x: usize) -> usize {
        self.blocks[x]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.iter().max().map_or(0, |m| m + 1)
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.blocks[a] == self.blocks[b]
    }

    /// Blocks as sorted element lists, ordered by least element.
    pub fn classes(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (x, &b) in self.blocks.iter().enumerate() {
            out[b].push(x as Elem);
        }
        out
    }

    pub fn is_equality(&self) -> bool {
        self.num_blocks() == self.blocks.len()
    }

    pub fn is_total(&self) -> bool {
        self.num_blocks() <= 1
    }

    /// `self ⊆ other` as relations.
    pub fn refines(&self, other: &Congruence) -> bool {
        let mut image: HashMap<usize, usize> = HashMap::new();
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(&a, &b)| *image.entry(a).or_insert(b) == b)
    }

    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::new(self.blocks.len());
        for (rel, _) in [(&self.blocks, 0), (&other.blocks, 1)] {
            let mut first: HashMap<usize, usize> = HashMap::new();
            for (x, &b) in rel.iter().enumerate() {
                let r = *first.entry(b).or_insert(x);
                uf.union(r, x);
            }
        }
        uf.to_congruence()
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let pairs: Vec<(usize, usize)> = self.blocks.iter().copied().zip(other.blocks.iter().copied()).collect();
        let mut label: HashMap<(usize, usize), usize> = HashMap::new();
        let ids: Vec<usize> = pairs
            .iter()
            .map(|p| {
                let next = label.len();
                *label.entry(*p).or_insert(next)
            })
            .collect();
        Congruence::from_block_ids(&ids)
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .classes()
            .iter()
            .map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{{{}}}", parts.join("|"))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.parent.len()
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two elements were in different blocks.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub(crate) fn to_congruence(&mut self) -> Congruence {
        let ids: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Congruence::from_block_ids(&ids)
    }
}

fn check_size(alg: &FiniteAlgebra, theta: &Congruence) -> Result<()> {
    if theta.algebra_size() != alg.size() {
        return Err(Error::SizeMismatch {
            expected: alg.size(),
            found: theta.algebra_size(),
        });
    }
    Ok(())
}

/// Compatibility with every basic operation. It suffices to compare each
/// argument tuple with the tuple where one slot is replaced by its block
/// representative.
pub fn is_congruence(alg: &FiniteAlgebra, theta: &Congruence) -> Result<bool> {
    check_size(alg, theta)?;
    let n = alg.size();
    let mut rep = vec![usize::MAX; theta.num_blocks()];
    for x in (0..n).rev() {
        rep[theta.block(x)] = x;
    }
    for op in alg.ops() {
        let dims = vec![n; op.arity];
        let st = util::strides(&dims);
        let mut t = vec![0usize; op.arity];
        for idx in 0..op.table.len() {
            util::decode(idx, &dims, &mut t);
            let v = op.table[idx] as usize;
            for (slot, &x) in t.iter().enumerate() {
                let r = rep[theta.block(x)];
                let j = idx - x * st[slot] + r * st[slot];
                if !theta.related(v, op.table[j] as usize) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Smallest congruence containing `pairs`.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> Congruence {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a as usize, b as usize) {
            work.push((a as usize, b as usize));
        }
    }
    let mut args = Vec::new();
    while let Some((a, b)) = work.pop() {
        for op in alg.ops() {
            let k = op.arity;
            if k == 0 {
                continue;
            }
            let others = vec![n; k - 1];
            for slot in 0..k {
                let mut ctx = vec![0usize; k - 1];
                loop {
                    args.clear();
                    args.extend_from_slice(&ctx[..slot]);
                    args.push(a);
                    args.extend_from_slice(&ctx[slot..]);
                    let fa = op.table[util::index_of_usize(&args, &vec![n; k])] as usize;
                    args[slot] = b;
                    let fb = op.table[util::index_of_usize(&args, &vec![n; k])] as usize;
                    if uf.union(fa, fb) {
                        work.push((fa, fb));
                    }
                    if !util::advance(&mut ctx, &others) {
                        break;
                    }
                }
            }
        }
    }
    uf.to_congruence()
}

/// All congruences, as the join closure of the principal ones. Sorted from
/// the equality relation upwards (more blocks first), ties broken by block
/// vector.
pub fn con_lattice(alg: &FiniteAlgebra, limits: &Limits) -> Result<Vec<Congruence>> {
    let n = alg.size();
    let mut principals: BTreeSet<Congruence> = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            principals.insert(cg(alg, &[(a as Elem, b as Elem)]));
        }
    }
    let principals: Vec<Congruence> = principals.into_iter().collect();
    let mut all: BTreeSet<Congruence> = BTreeSet::new();
    all.insert(Congruence::equality(n));
    let mut work: Vec<Congruence> = vec![Congruence::equality(n)];
    while let Some(c) = work.pop() {
        for p in &principals {
            let j = c.join(p);
            if !all.contains(&j) {
                if all.len() >= limits.max_tables {
                    return Err(Error::ResourceLimit(format!(
                        "more than {} congruences",
                        limits.max_tables
                    )));
                }
                all.insert(j.clone());
                work.push(j);
            }
        }
    }
    let mut out: Vec<Congruence> = all.into_iter().collect();
    out.sort_by(|x, y| y.num_blocks().cmp(&x.num_blocks()).then_with(|| x.cmp(y)));
    Ok(out)
}

pub fn quotient(alg: &FiniteAlgebra, theta: &Congruence) -> Result<FiniteAlgebra> {
    if !is_congruence(alg, theta)? {
        return Err(Error::NotACongruence(theta.to_string()));
    }
    let m = theta.num_blocks();
    let reps: Vec<Elem> = theta.classes().iter().map(|c| c[0]).collect();
    let mut ops = Vec::new();
    for op in alg.ops() {
        let dims = vec![m; op.arity];
        let mut t = vec![0usize; op.arity];
        let mut table = Vec::with_capacity(util::box_size(&dims));
        let mut args = vec![0 as Elem; op.arity];
        loop {
            for (a, &x) in args.iter_mut().zip(&t) {
                *a = reps[x];
            }
            table.push(theta.block(alg.apply(alg.op_index(&op.name).unwrap(), &args) as usize) as Elem);
            if !util::advance(&mut t, &dims) {
                break;
            }
        }
        ops.push(Operation {
            name: op.name.clone(),
            arity: op.arity,
            table,
        });
    }
    FiniteAlgebra::new(m, ops)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcKind {
    /// `t(a,u) = t(a,v)` implies `t(b,u) = t(b,v)`.
    Abelian,
    /// `t(a,u) = t(b,v)` implies `t(c,u) = t(c,v)`.
    Strong,
}

impl fmt::Display for TcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TcKind::Abelian => write!(f, "abelian"),
            TcKind::Strong => write!(f, "strongly abelian"),
        }
    }
}

/// A violated instance of a term condition. For the ordinary condition
/// `c == b` and the outputs are `t(a,u), t(a,v), t(b,u), t(b,v)`; for the
/// strong condition they are `t(a,u), t(b,v), t(c,u), t(c,v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TcFailure {
    pub kind: TcKind,
    pub term: Term,
    pub term_index: usize,
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub u: Vec<Elem>,
    pub v: Vec<Elem>,
    pub outputs: [Elem; 4],
}

impl TcFailure {
    /// Re-evaluate the witness term and confirm the recorded violation.
    pub fn verify(&self, alg: &FiniteAlgebra, tau: &Congruence) -> Result<bool> {
        let ev = |row: Elem, col: &[Elem]| -> Result<Elem> {
            let mut args = vec![row];
            args.extend_from_slice(col);
            crate::algebra::eval_term(alg, &self.term, &args)
        };
        let (r1, r2) = match self.kind {
            TcKind::Abelian => (self.a, self.a),
            TcKind::Strong => (self.a, self.b),
        };
        let out = [
            ev(r1, &self.u)?,
            ev(r2, &self.v)?,
            ev(self.c, &self.u)?,
            ev(self.c, &self.v)?,
        ];
        let related = tau.related(self.a as usize, self.b as usize)
            && tau.related(self.a as usize, self.c as usize)
            && self
                .u
                .iter()
                .zip(&self.v)
                .all(|(&x, &y)| tau.related(x as usize, y as usize));
        Ok(related && out == self.outputs && out[0] == out[1] && out[2] != out[3])
    }
}

impl fmt::Display for TcFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_t = |v: &[Elem]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self.kind {
            TcKind::Abelian => write!(
                f,
                "t={} a={} b={} u=({}) v=({}): t(a,u)={} t(a,v)={} but t(b,u)={} t(b,v)={}",
                self.term,
                self.a,
                self.b,
                fmt_t(&self.u),
                fmt_t(&self.v),
                self.outputs[0],
                self.outputs[1],
                self.outputs[2],
                self.outputs[3]
            ),
            TcKind::Strong => write!(
                f,
                "t={} a={} b={} c={} u=({}) v=({}): t(a,u)={} t(b,v)={} but t(c,u)={} t(c,v)={}",
                self.term,
                self.a,
                self.b,
                self.c,
                fmt_t(&self.u),
                fmt_t(&self.v),
                self.outputs[0],
                self.outputs[1],
                self.outputs[2],
                self.outputs[3]
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TcVerdict {
    Pass { arity_bound: usize, terms_checked: usize },
    Fail(Box<TcFailure>),
}

impl TcVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, TcVerdict::Pass { .. })
    }

    pub fn failure(&self) -> Option<&TcFailure> {
        match self {
            TcVerdict::Fail(f) => Some(f),
            TcVerdict::Pass { .. } => None,
        }
    }
}

/// Default arity bound for term-condition checks: `ceil(log2 m) + 2` where
/// `m` is the largest class size.
pub fn default_arity_bound(tau: &Congruence) -> usize {
    let m = tau.classes().iter().map(Vec::len).max().unwrap_or(1);
    util::ceil_log2(m) + 2
}

/// Checks one term table (row = first slot, columns = remaining slots).
pub(crate) struct TcChecker {
    kind: TcKind,
    size: usize,
    cols: usize,
    classes: Vec<Vec<Elem>>,
    /// Columns grouped by their vector of tau-blocks.
    groups: Vec<Vec<usize>>,
}

impl TcChecker {
    pub(crate) fn new(kind: TcKind, size: usize, arity: usize, tau: &Congruence) -> Self {
        let cols = size.pow(arity.saturating_sub(1) as u32);
        let dims = vec![size; arity.saturating_sub(1)];
        let mut by_key: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut t = vec![0usize; dims.len()];
        for col in 0..cols {
            util::decode(col, &dims, &mut t);
            let key: Vec<usize> = t.iter().map(|&x| tau.block(x)).collect();
            let g = *by_key.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(col);
        }
        let classes = tau.classes().into_iter().filter(|c| c.len() > 1).collect();
        TcChecker {
            kind,
            size,
            cols,
            classes,
            groups,
        }
    }

    #[inline]
    fn at(&self, table: &[Elem], row: Elem, col: usize) -> Elem {
        table[row as usize * self.cols + col]
    }

    pub(crate) fn passes(&self, table: &[Elem]) -> bool {
        let mut row_fns: HashMap<Vec<Elem>, usize> = HashMap::new();
        let mut seen: HashMap<(usize, Elem), usize> = HashMap::new();
        for class in &self.classes {
            for group in &self.groups {
                row_fns.clear();
                seen.clear();
                for &col in group {
                    let f: Vec<Elem> = class.iter().map(|&a| self.at(table, a, col)).collect();
                    let next = row_fns.len();
                    let id = *row_fns.entry(f.clone()).or_insert(next);
                    if id != next {
                        continue;
                    }
                    for (pos, &val) in f.iter().enumerate() {
                        let key = match self.kind {
                            TcKind::Strong => (0, val),
                            TcKind::Abelian => (pos, val),
                        };
                        if let Some(&other) = seen.get(&key) {
                            if other != id {
                                return false;
                            }
                        } else {
                            seen.insert(key, id);
                        }
                    }
                }
            }
        }
        true
    }

    /// First violation in (a, b, u, v, c) lexicographic order.
    pub(crate) fn witness(&self, table: &[Elem]) -> Option<(Elem, Elem, Elem, usize, usize)> {
        let col_group: HashMap<usize, usize> = self
            .groups
            .iter()
            .enumerate()
            .flat_map(|(g, cols)| cols.iter().map(move |&c| (c, g)))
            .collect();
        for class in &self.classes {
            let _ = class;
        }
        for a in 0..self.size as Elem {
            let Some(class) = self.classes.iter().find(|c| c.contains(&a)) else {
                continue;
            };
            for &b in class {
                if self.kind == TcKind::Abelian && b == a {
                    continue;
                }
                for u in 0..self.cols {
                    let group = &self.groups[col_group[&u]];
                    for &v in group {
                        match self.kind {
                            TcKind::Strong => {
                                if self.at(table, a, u) != self.at(table, b, v) {
                                    continue;
                                }
                                if let Some(&c) = class.iter().find(|&&c| self.at(table, c, u) != self.at(table, c, v)) {
                                    return Some((a, b, c, u, v));
                                }
                            }
                            TcKind::Abelian => {
                                if self.at(table, a, u) == self.at(table, a, v)
                                    && self.at(table, b, u) != self.at(table, b, v)
                                {
                                    return Some((a, b, b, u, v));
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

pub fn term_condition(
    alg: &FiniteAlgebra,
    tau: &Congruence,
    kind: TcKind,
    arity_bound: usize,
    limits: &Limits,
) -> Result<TcVerdict> {
    check_size(alg, tau)?;
    let arity = arity_bound.max(1);
    let checker = TcChecker::new(kind, alg.size(), arity, tau);
    let mut stream = CloneStream::new(alg, arity, limits)?;
    let mut failing = None;
    let mut count = 0usize;
    stream.run(None, |id, table| {
        count += 1;
        if checker.passes(table) {
            ControlFlow::Continue(())
        } else {
            failing = Some(id);
            ControlFlow::Break(())
        }
    })?;
    let Some(id) = failing else {
        return Ok(TcVerdict::Pass {
            arity_bound: arity,
            terms_checked: count,
        });
    };
    let table = stream.table(id).to_vec();
    let (a, b, c, u, v) = checker
        .witness(&table)
        .expect("a failing table has a witness in canonical order");
    let col_dims = vec![alg.size(); arity - 1];
    let mut uu = vec![0usize; arity - 1];
    let mut vv = vec![0usize; arity - 1];
    util::decode(u, &col_dims, &mut uu);
    util::decode(v, &col_dims, &mut vv);
    let at = |row: Elem, col: usize| checker.at(&table, row, col);
    let outputs = match kind {
        TcKind::Abelian => [at(a, u), at(a, v), at(b, u), at(b, v)],
        TcKind::Strong => [at(a, u), at(b, v), at(c, u), at(c, v)],
    };
    Ok(TcVerdict::Fail(Box::new(TcFailure {
        kind,
        term: stream.witness(id),
        term_index: id,
        a,
        b,
        c,
        u: uu.iter().map(|&x| x as Elem).collect(),
        v: vv.iter().map(|&x| x as Elem).collect(),
        outputs,
    })))
}

pub fn strong_term_condition(
    alg: &FiniteAlgebra,
    tau: &Congruence,
    arity_bound: usize,
    limits: &Limits,
) -> Result<TcVerdict> {
    term_condition(alg, tau, TcKind::Strong, arity_bound, limits)
}

pub fn abelian_term_condition(
    alg: &FiniteAlgebra,
    tau: &Congruence,
    arity_bound: usize,
    limits: &Limits,
) -> Result<TcVerdict> {
    term_condition(alg, tau, TcKind::Abelian, arity_bound, limits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RectVerdict {
    /// One equivalence relation per slot, as block ids over the positions
    /// of the slot's class.
    Rectangular(Vec<Vec<usize>>),
    /// `t(x) = t(y)` although some slot is not related.
    Failure { x: Vec<Elem>, y: Vec<Elem> },
}

impl RectVerdict {
    pub fn is_rectangular(&self) -> bool {
        matches!(self, RectVerdict::Rectangular(_))
    }
}

/// Kernels of a table over a box, one per slot: positions `p ~ q` in slot
/// `i` iff swapping them never changes the value in any context.
pub(crate) fn slot_kernels<T: Copy + Eq + std::hash::Hash>(table: &[T], dims: &[usize]) -> Vec<Vec<usize>> {
    let st = util::strides(dims);
    let total = table.len();
    let mut tuple = vec![0usize; dims.len()];
    (0..dims.len())
        .map(|slot| {
            let mut sig: Vec<Vec<T>> = vec![Vec::with_capacity(total / dims[slot].max(1)); dims[slot]];
            for base in 0..total {
                util::decode(base, dims, &mut tuple);
                if tuple[slot] != 0 {
                    continue;
                }
                for (p, s) in sig.iter_mut().enumerate() {
                    s.push(table[base + p * st[slot]]);
                }
            }
            let mut ids: HashMap<Vec<T>, usize> = HashMap::new();
            sig.into_iter()
                .map(|s| {
                    let next = ids.len();
                    *ids.entry(s).or_insert(next)
                })
                .collect()
        })
        .collect()
}

/// Check `t(x) = t(y) ⇔ x_i E_i y_i` on a box; `kernels` from
/// [`slot_kernels`]. Returns the first offending pair of box indices.
pub(crate) fn rectangular_on_box<T: Copy + Eq + std::hash::Hash>(
    table: &[T],
    dims: &[usize],
    kernels: &[Vec<usize>],
) -> Option<(usize, usize)> {
    let mut tuple = vec![0usize; dims.len()];
    let mut first: HashMap<T, (usize, Vec<usize>)> = HashMap::new();
    for (idx, &val) in table.iter().enumerate() {
        util::decode(idx, dims, &mut tuple);
        let key: Vec<usize> = tuple.iter().zip(kernels).map(|(&x, k)| k[x]).collect();
        match first.get(&val) {
            Some((j, k)) if *k != key => return Some((*j, idx)),
            Some(_) => {}
            None => {
                first.insert(val, (idx, key));
            }
        }
    }
    None
}

pub fn rectangularity_certificate(
    alg: &FiniteAlgebra,
    tau: &Congruence,
    top: &TermOperation,
    class_tuple: &[usize],
) -> Result<RectVerdict> {
    check_size(alg, tau)?;
    if class_tuple.len() != top.arity {
        return Err(Error::SizeMismatch {
            expected: top.arity,
            found: class_tuple.len(),
        });
    }
    let classes = tau.classes();
    if let Some(&bad) = class_tuple.iter().find(|&&c| c >= classes.len()) {
        return Err(Error::ClassMismatch(format!("no class {bad}")));
    }
    let (table, dims) = restrict_to_classes(alg.size(), &top.table, &classes, class_tuple);
    let mut out_block = None;
    for &v in &table {
        let b = tau.block(v as usize);
        if *out_block.get_or_insert(b) != b {
            return Err(Error::ClassMismatch("term does not map the box into one class".into()));
        }
    }
    let kernels = slot_kernels(&table, &dims);
    match rectangular_on_box(&table, &dims, &kernels) {
        None => Ok(RectVerdict::Rectangular(kernels)),
        Some((i, j)) => {
            let lift = |idx: usize| {
                let mut t = vec![0usize; dims.len()];
                util::decode(idx, &dims, &mut t);
                t.iter()
                    .zip(class_tuple)
                    .map(|(&p, &c)| classes[c][p])
                    .collect::<Vec<Elem>>()
            };
            Ok(RectVerdict::Failure { x: lift(i), y: lift(j) })
        }
    }
}

/// Restrict a term table to a product of classes, indexed by positions
/// within each class.
pub(crate) fn restrict_to_classes(
    size: usize,
    table: &[Elem],
    classes: &[Vec<Elem>],
    class_tuple: &[usize],
) -> (Vec<Elem>, Vec<usize>) {
    let dims: Vec<usize> = class_tuple.iter().map(|&c| classes[c].len()).collect();
    let n = util::box_size(&dims);
    let mut out = Vec::with_capacity(n);
    let mut t = vec![0usize; dims.len()];
    for _ in 0..n {
        let mut idx = 0usize;
        for (&p, &c) in t.iter().zip(class_tuple) {
            idx = idx * size + classes[c][p] as usize;
        }
        out.push(table[idx]);
        util::advance(&mut t, &dims);
    }
    (out, dims)
}

/// Rectangularity of every term of the given arity on every product of
/// classes. Returns the index of the first non-rectangular term, if any.
pub fn rectangular_for_all_terms(
    alg: &FiniteAlgebra,
    tau: &Congruence,
    arity: usize,
    limits: &Limits,
) -> Result<Option<usize>> {
    check_size(alg, tau)?;
    let classes = tau.classes();
    let m = classes.len();
    let class_dims = vec![m; arity];
    let mut stream = CloneStream::new(alg, arity, limits)?;
    let mut failing = None;
    stream.run(None, |id, table| {
        let mut ct = vec![0usize; arity];
        loop {
            let (t, dims) = restrict_to_classes(alg.size(), table, &classes, &ct);
            let k = slot_kernels(&t, &dims);
            if rectangular_on_box(&t, &dims, &k).is_some() {
                failing = Some(id);
                return ControlFlow::Break(());
            }
            if !util::advance(&mut ct, &class_dims) {
                break;
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(failing)
}

#[derive(Clone, Debug)]
pub struct RadicalReport {
    pub arity_bound: usize,
    /// Every congruence with its strong term condition verdict.
    pub congruences: Vec<(Congruence, bool)>,
    /// Strongly abelian congruences that are maximal among those.
    pub maximal: Vec<Congruence>,
}

impl RadicalReport {
    pub fn strongly_abelian(&self) -> impl Iterator<Item = &Congruence> {
        self.congruences.iter().filter(|(_, ok)| *ok).map(|(c, _)| c)
    }

    /// The radical candidate, when the maximum is unique.
    pub fn unique_maximum(&self) -> Option<&Congruence> {
        match self.maximal.as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }
}

pub fn strongly_abelian_congruences(
    alg: &FiniteAlgebra,
    arity_bound: usize,
    limits: &Limits,
) -> Result<RadicalReport> {
    let lattice = con_lattice(alg, limits)?;
    let arity = arity_bound.max(1);
    let mut stream = CloneStream::new(alg, arity, limits)?;
    stream.run(None, |_, _| ControlFlow::Continue(()))?;
    let tables: Vec<&[Elem]> = (0..stream.len()).map(|i| stream.table(i)).collect();
    let congruences: Vec<(Congruence, bool)> = lattice
        .into_iter()
        .map(|c| {
            let checker = TcChecker::new(TcKind::Strong, alg.size(), arity, &c);
            let ok = tables.iter().all(|t| checker.passes(t));
            (c, ok)
        })
        .collect();
    let good: Vec<&Congruence> = congruences.iter().filter(|(_, ok)| *ok).map(|(c, _)| c).collect();
    let maximal = good
        .iter()
        .filter(|c| !good.iter().any(|d| *d != **c && c.refines(d)))
        .map(|c| (*c).clone())
        .collect();
    Ok(RadicalReport {
        arity_bound: arity,
        congruences,
        maximal,
    })
}
