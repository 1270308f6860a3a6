//! Finite algebras given by operation tables, terms, clone enumeration and
//! generated subpowers.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::util;

/// Universe elements are dense indices; tables store them as bytes.
pub type Elem = u8;

/// Largest universe an algebra table can hold.
pub const MAX_SIZE: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    /// Row-major over `{0..size-1}^arity`.
    pub table: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    size: usize,
    ops: Vec<Operation>,
}

impl FiniteAlgebra {
    pub fn new(size: usize, ops: Vec<Operation>) -> Result<Self> {
        if size == 0 || size > MAX_SIZE {
            return Err(Error::InvalidAlgebra(format!(
                "universe size must lie in 1..={MAX_SIZE}, got {size}"
            )));
        }
        for (i, op) in ops.iter().enumerate() {
            if ops[..i].iter().any(|o| o.name == op.name) {
                return Err(Error::InvalidAlgebra(format!("duplicate operation `{}`", op.name)));
            }
            let expected = u32::try_from(op.arity)
                .ok()
                .and_then(|a| size.checked_pow(a))
                .ok_or_else(|| Error::InvalidAlgebra(format!("table of `{}` is too large", op.name)))?;
            if op.table.len() != expected {
                return Err(Error::InvalidAlgebra(format!(
                    "table of `{}` has {} entries, expected {expected}",
                    op.name,
                    op.table.len()
                )));
            }
            if let Some(&bad) = op.table.iter().find(|&&v| v as usize >= size) {
                return Err(Error::OutOfRange {
                    element: bad as usize,
                    size,
                });
            }
        }
        Ok(FiniteAlgebra { size, ops })
    }

    /// Build an algebra whose operations are given as closures.
    pub fn from_fns(size: usize, ops: Vec<(&str, usize, Box<dyn Fn(&[usize]) -> usize>)>) -> Result<Self> {
        let mut built = Vec::with_capacity(ops.len());
        for (name, arity, f) in ops {
            let dims = vec![size; arity];
            let n = util::box_size(&dims);
            let mut t = vec![0; arity];
            let mut table = Vec::with_capacity(n);
            for _ in 0..n {
                let v = f(&t);
                if v >= size {
                    return Err(Error::OutOfRange { element: v, size });
                }
                table.push(v as Elem);
                util::advance(&mut t, &dims);
            }
            built.push(Operation {
                name: name.to_string(),
                arity,
                table,
            });
        }
        FiniteAlgebra::new(size, built)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(|o| o.arity).max().unwrap_or(0)
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let o = &self.ops[op];
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.size + a as usize;
        }
        o.table[idx]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Apply(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(op: &str, children: Vec<Term>) -> Term {
        Term::Apply(op.to_string(), children)
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Apply(_, ch) => ch.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Apply(_, ch) => 1 + ch.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Rename variables through `map`.
    pub fn substitute(&self, map: &[Term]) -> Term {
        match self {
            Term::Var(i) => map[*i].clone(),
            Term::Apply(f, ch) => Term::Apply(f.clone(), ch.iter().map(|c| c.substitute(map)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "v{i}"),
            Term::Apply(op, ch) => {
                write!(f, "{op}(")?;
                for (k, c) in ch.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn eval_term(alg: &FiniteAlgebra, t: &Term, assignment: &[Elem]) -> Result<Elem> {
    match t {
        Term::Var(i) => assignment.get(*i).copied().ok_or(Error::UnassignedVariable(*i)),
        Term::Apply(name, children) => {
            let op = alg.op_index(name).ok_or_else(|| Error::UnknownOp(name.clone()))?;
            let arity = alg.ops[op].arity;
            if children.len() != arity {
                return Err(Error::ArityMismatch {
                    op: name.clone(),
                    expected: arity,
                    found: children.len(),
                });
            }
            let args = children
                .iter()
                .map(|c| eval_term(alg, c, assignment))
                .collect::<Result<Vec<_>>>()?;
            Ok(alg.apply(op, &args))
        }
    }
}

/// An n-ary term operation: its table plus a term producing it.
/// Equality and hashing look at the table only.
#[derive(Clone, Debug)]
pub struct TermOperation {
    pub arity: usize,
    pub table: Vec<Elem>,
    pub witness: Term,
}

impl PartialEq for TermOperation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.table == other.table
    }
}

impl Eq for TermOperation {}

impl std::hash::Hash for TermOperation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.arity.hash(state);
        self.table.hash(state);
    }
}

impl TermOperation {
    pub fn dims(&self, size: usize) -> Vec<usize> {
        vec![size; self.arity]
    }

    pub fn value(&self, size: usize, args: &[Elem]) -> Elem {
        let mut idx = 0usize;
        for &a in args {
            idx = idx * size + a as usize;
        }
        self.table[idx]
    }

    pub fn universe_size(&self) -> usize {
        // table.len() == size^arity
        if self.arity == 0 {
            return 0;
        }
        let mut s: usize = 1;
        while s.pow(self.arity as u32) < self.table.len() {
            s += 1;
        }
        s
    }
}

/// Indices of the variables on which `op` depends essentially.
pub fn essential_variables(op: &TermOperation) -> Vec<usize> {
    if op.arity == 0 {
        return Vec::new();
    }
    let size = op.universe_size();
    util::essential_slots(&op.table, &op.dims(size))
}

/// Caps guarding the exhaustive closures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_tables: usize,
    pub max_elements: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_tables: 1_000_000,
            max_elements: 1_000_000,
        }
    }
}

#[derive(Clone, Debug)]
enum Origin {
    Generator(usize),
    Apply { op: usize, args: Vec<usize> },
}

/// Semi-naive closure of a set of points of `A^len` under all operations.
struct Closure<'a> {
    alg: &'a FiniteAlgebra,
    len: usize,
    elems: Vec<Vec<Elem>>,
    index: FxHashMap<Vec<Elem>, usize>,
    origin: Vec<Origin>,
    cap: usize,
    cap_name: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Completion {
    /// Reached a fixed point.
    Closed,
    /// Stopped at the depth bound before reaching a fixed point.
    DepthBound,
    /// The visitor asked to stop.
    Stopped,
}

impl<'a> Closure<'a> {
    fn new(alg: &'a FiniteAlgebra, len: usize, cap: usize, cap_name: &'static str) -> Self {
        Closure {
            alg,
            len,
            elems: Vec::new(),
            index: FxHashMap::default(),
            origin: Vec::new(),
            cap,
            cap_name,
        }
    }

    fn insert(&mut self, v: Vec<Elem>, origin: Origin) -> Result<Option<usize>> {
        if self.index.contains_key(&v) {
            return Ok(None);
        }
        if self.elems.len() >= self.cap {
            return Err(Error::ResourceLimit(format!("more than {} {}", self.cap, self.cap_name)));
        }
        let id = self.elems.len();
        self.index.insert(v.clone(), id);
        self.elems.push(v);
        self.origin.push(origin);
        Ok(Some(id))
    }

    fn run<F>(&mut self, generators: Vec<Vec<Elem>>, depth: Option<usize>, mut visit: F) -> Result<Completion>
    where
        F: FnMut(usize, &[Elem]) -> ControlFlow<()>,
    {
        for (g, v) in generators.into_iter().enumerate() {
            debug_assert_eq!(v.len(), self.len);
            if let Some(id) = self.insert(v, Origin::Generator(g))? {
                if visit(id, &self.elems[id]).is_break() {
                    return Ok(Completion::Stopped);
                }
            }
        }
        let alg = self.alg;
        let size = alg.size();
        let mut prev = 0usize;
        let mut round = 0usize;
        let mut buf = vec![0 as Elem; self.len];
        loop {
            let cur = self.elems.len();
            if round > 0 && cur == prev {
                return Ok(Completion::Closed);
            }
            if depth.is_some_and(|d| round >= d) {
                return Ok(Completion::DepthBound);
            }
            for (op_id, op) in alg.ops().iter().enumerate() {
                let k = op.arity;
                if k == 0 {
                    if round == 0 {
                        buf.iter_mut().for_each(|x| *x = op.table[0]);
                        if let Some(id) = self.insert(buf.clone(), Origin::Apply { op: op_id, args: vec![] })? {
                            if visit(id, &self.elems[id]).is_break() {
                                return Ok(Completion::Stopped);
                            }
                        }
                    }
                    continue;
                }
                if cur == 0 {
                    continue;
                }
                let dims = vec![cur; k];
                let dims_of_op = vec![size; k];
                let mut tuple = vec![0usize; k];
                loop {
                    if tuple.iter().any(|&t| t >= prev) {
                        let rows: Vec<&[Elem]> = tuple.iter().map(|&t| &self.elems[t][..]).collect();
                        apply_rows(&op.table, &dims_of_op, &rows, &mut buf);
                        if !self.index.contains_key(&buf) {
                            let id = self
                                .insert(buf.clone(), Origin::Apply { op: op_id, args: tuple.clone() })?
                                .expect("fresh element");
                            if visit(id, &self.elems[id]).is_break() {
                                return Ok(Completion::Stopped);
                            }
                        }
                    }
                    if !util::advance(&mut tuple, &dims) {
                        break;
                    }
                }
            }
            prev = cur;
            round += 1;
        }
    }

    fn term(&self, id: usize, memo: &mut HashMap<usize, Term>, gen_terms: &dyn Fn(usize) -> Term) -> Term {
        if let Some(t) = memo.get(&id) {
            return t.clone();
        }
        let t = match &self.origin[id] {
            Origin::Generator(g) => gen_terms(*g),
            Origin::Apply { op, args } => Term::Apply(
                self.alg.ops()[*op].name.clone(),
                args.iter().map(|&a| self.term(a, memo, gen_terms)).collect(),
            ),
        };
        memo.insert(id, t.clone());
        t
    }
}

/// Apply a table over the box `dims` coordinatewise to rows of equal
/// length.
#[inline]
pub(crate) fn apply_rows<T: util::AsIndex, U: Copy>(table: &[U], dims: &[usize], rows: &[&[T]], out: &mut [U]) {
    match rows {
        [a] => {
            for (o, &x) in out.iter_mut().zip(*a) {
                *o = table[x.ix()];
            }
        }
        [a, b] => {
            let d1 = dims[1];
            for ((o, &x), &y) in out.iter_mut().zip(*a).zip(*b) {
                *o = table[x.ix() * d1 + y.ix()];
            }
        }
        [a, b, c] => {
            let (d1, d2) = (dims[1], dims[2]);
            for (((o, &x), &y), &z) in out.iter_mut().zip(*a).zip(*b).zip(*c) {
                *o = table[(x.ix() * d1 + y.ix()) * d2 + z.ix()];
            }
        }
        _ => {
            for (i, o) in out.iter_mut().enumerate() {
                let mut idx = 0usize;
                for (r, &d) in rows.iter().zip(dims) {
                    idx = idx * d + r[i].ix();
                }
                *o = table[idx];
            }
        }
    }
}

fn projections(size: usize, arity: usize) -> Result<Vec<Vec<Elem>>> {
    let dims = vec![size; arity];
    let len = util::checked_box_size(&dims)
        .filter(|&l| l <= 1 << 26)
        .ok_or_else(|| Error::ResourceLimit(format!("tables of arity {arity} over {size} elements")))?;
    let mut gens = vec![Vec::with_capacity(len); arity];
    let mut t = vec![0; arity];
    for _ in 0..len {
        for (j, g) in gens.iter_mut().enumerate() {
            g.push(t[j] as Elem);
        }
        util::advance(&mut t, &dims);
    }
    Ok(gens)
}

/// Lazily enumerated clone: operations are produced round by round so a
/// caller can stop at the first interesting one without closing the clone.
pub struct CloneStream<'a> {
    closure: Closure<'a>,
    arity: usize,
    memo: HashMap<usize, Term>,
}

impl<'a> CloneStream<'a> {
    pub fn new(alg: &'a FiniteAlgebra, arity: usize, limits: &Limits) -> Result<Self> {
        let len = util::checked_box_size(&vec![alg.size(); arity])
            .ok_or_else(|| Error::ResourceLimit("term table too large".into()))?;
        Ok(CloneStream {
            closure: Closure::new(alg, len, limits.max_tables, "term operations"),
            arity,
            memo: HashMap::new(),
        })
    }

    /// Run the closure, calling `visit` on each new operation as soon as it
    /// is found.
    pub fn run<F>(&mut self, depth_bound: Option<usize>, mut visit: F) -> Result<Completion>
    where
        F: FnMut(usize, &[Elem]) -> ControlFlow<()>,
    {
        let gens = projections(self.closure.alg.size(), self.arity)?;
        self.closure.run(gens, depth_bound, &mut visit)
    }

    pub fn witness(&mut self, id: usize) -> Term {
        self.closure.term(id, &mut self.memo, &Term::Var)
    }

    pub fn table(&self, id: usize) -> &[Elem] {
        &self.closure.elems[id]
    }

    pub fn len(&self) -> usize {
        self.closure.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closure.elems.is_empty()
    }
}

/// All n-ary term operations of `alg` (closure of the projections), in
/// breadth-first order with projections first.
pub fn enumerate_term_operations(
    alg: &FiniteAlgebra,
    arity: usize,
    depth_bound: Option<usize>,
    limits: &Limits,
) -> Result<Vec<TermOperation>> {
    let mut stream = CloneStream::new(alg, arity, limits)?;
    stream.run(depth_bound, |_, _| ControlFlow::Continue(()))?;
    Ok((0..stream.len())
        .map(|id| TermOperation {
            arity,
            table: stream.table(id).to_vec(),
            witness: stream.witness(id),
        })
        .collect())
}

/// A subuniverse of `alg^index_count` together with its generators.
#[derive(Clone, Debug)]
pub struct PointAlgebra {
    pub index_count: usize,
    pub elements: Vec<Vec<Elem>>,
    /// Element index of each generator, in the order given.
    pub generators: Vec<usize>,
}

impl PointAlgebra {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, point: &[Elem]) -> Option<usize> {
        self.elements.iter().position(|e| e == point)
    }

    pub fn contains(&self, point: &[Elem]) -> bool {
        self.position(point).is_some()
    }
}

pub fn generate_subpower(
    alg: &FiniteAlgebra,
    index_count: usize,
    generators: &[Vec<Elem>],
    limits: &Limits,
) -> Result<PointAlgebra> {
    for g in generators {
        if g.len() != index_count {
            return Err(Error::SizeMismatch {
                expected: index_count,
                found: g.len(),
            });
        }
        if let Some(&bad) = g.iter().find(|&&x| x as usize >= alg.size()) {
            return Err(Error::OutOfRange {
                element: bad as usize,
                size: alg.size(),
            });
        }
    }
    let mut closure = Closure::new(alg, index_count, limits.max_elements, "points");
    closure.run(generators.to_vec(), None, |_, _| ControlFlow::Continue(()))?;
    let gens = generators.iter().map(|g| closure.index[g]).collect();
    Ok(PointAlgebra {
        index_count,
        elements: closure.elems,
        generators: gens,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{d4, s2, w8};

    #[test]
    fn eval_d4() {
        let t = Term::app("d", vec![Term::var(0), Term::var(1)]);
        assert_eq!(eval_term(&d4(), &t, &[2, 1]).unwrap(), 3);
    }

    #[test]
    fn eval_projection_and_absorption() {
        let alg = s2();
        for k in 0..2 {
            assert_eq!(eval_term(&alg, &Term::var(0), &[k]).unwrap(), k);
        }
        let t = Term::app("m", vec![Term::var(0), Term::app("m", vec![Term::var(0), Term::var(1)])]);
        assert_eq!(eval_term(&alg, &t, &[1, 0]).unwrap(), 0);
    }

    #[test]
    fn eval_errors() {
        let alg = s2();
        assert!(matches!(
            eval_term(&alg, &Term::app("q", vec![]), &[]),
            Err(Error::UnknownOp(_))
        ));
        assert!(matches!(
            eval_term(&alg, &Term::app("m", vec![Term::var(0)]), &[0]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            eval_term(&alg, &Term::var(3), &[0]),
            Err(Error::UnassignedVariable(3))
        ));
    }

    #[test]
    fn clone_of_semilattice_unary() {
        let ops = enumerate_term_operations(&s2(), 1, None, &Limits::default()).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].table, vec![0, 1]);
    }

    #[test]
    fn clone_without_operations_is_projections() {
        let alg = FiniteAlgebra::new(3, vec![]).unwrap();
        let ops = enumerate_term_operations(&alg, 2, None, &Limits::default()).unwrap();
        assert_eq!(ops.len(), 2);
        assert_eq!(essential_variables(&ops[0]), vec![0]);
        assert_eq!(essential_variables(&ops[1]), vec![1]);
    }

    #[test]
    fn w8_basic_op_in_ternary_clone() {
        let alg = w8();
        let ops = enumerate_term_operations(&alg, 3, None, &Limits::default()).unwrap();
        assert!(ops.iter().any(|o| o.table == alg.ops()[0].table));
        // projections plus the 27 first-bit selectors
        assert_eq!(ops.len(), 30);
    }

    #[test]
    fn essential_variables_examples() {
        let alg = d4();
        let d = TermOperation {
            arity: 2,
            table: alg.ops()[0].table.clone(),
            witness: Term::app("d", vec![Term::var(0), Term::var(1)]),
        };
        assert_eq!(essential_variables(&d), vec![0, 1]);
        let c = TermOperation {
            arity: 3,
            table: vec![1; 27],
            witness: Term::var(0),
        };
        assert!(essential_variables(&c).is_empty());
    }

    #[test]
    fn subpower_examples() {
        let lim = Limits::default();
        let p = generate_subpower(&s2(), 2, &[vec![1, 0], vec![0, 1]], &lim).unwrap();
        let mut e = p.elements.clone();
        e.sort();
        assert_eq!(e, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        let p = generate_subpower(&d4(), 1, &[vec![0], vec![3]], &lim).unwrap();
        assert_eq!(p.len(), 4);
        let p = generate_subpower(&s2(), 2, &[vec![1, 1]], &lim).unwrap();
        assert_eq!(p.elements, vec![vec![1, 1]]);
    }

    #[test]
    fn subpower_rejects_bad_generators() {
        let lim = Limits::default();
        assert!(generate_subpower(&s2(), 2, &[vec![1]], &lim).is_err());
        assert!(generate_subpower(&s2(), 1, &[vec![5]], &lim).is_err());
    }

    #[test]
    fn resource_limit_is_reported() {
        let lim = Limits {
            max_tables: 3,
            max_elements: 3,
        };
        assert!(matches!(
            enumerate_term_operations(&w8(), 3, None, &lim),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn invalid_tables_rejected() {
        let bad = Operation {
            name: "f".into(),
            arity: 1,
            table: vec![0, 2],
        };
        assert!(FiniteAlgebra::new(2, vec![bad]).is_err());
        let short = Operation {
            name: "f".into(),
            arity: 2,
            table: vec![0, 1],
        };
        assert!(FiniteAlgebra::new(2, vec![short]).is_err());
    }
}
