//! Multi-sorted algebras: the sorted algebra of a congruence (one sort per
//! class), the flat algebra (one sort per coordinate factor of a class),
//! sorted subpower closure and sorted clones over a variable context.

use std::collections::HashMap;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::algebra::{Elem, FiniteAlgebra, Limits, Operation, Term};
use crate::boxmap::{Boxmap, Coordinatization};
use crate::congruence::{self, Congruence, TcKind, UnionFind};
use crate::error::{Error, Result};
use crate::util;

/// Carrier elements of sorted algebras. Carriers can outgrow a byte once
/// free algebras and their quotients are involved.
pub type SElem = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedOp {
    pub name: String,
    pub inputs: Vec<usize>,
    pub output: usize,
    /// Row-major over the input carriers.
    pub table: Vec<SElem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedAlgebra {
    sort_names: Vec<String>,
    sizes: Vec<usize>,
    ops: Vec<SortedOp>,
}

impl SortedAlgebra {
    pub fn new(sort_names: Vec<String>, sizes: Vec<usize>, ops: Vec<SortedOp>) -> Result<Self> {
        if sort_names.len() != sizes.len() {
            return Err(Error::SizeMismatch {
                expected: sort_names.len(),
                found: sizes.len(),
            });
        }
        for (i, name) in sort_names.iter().enumerate() {
            if sort_names[..i].contains(name) {
                return Err(Error::InvalidAlgebra(format!("duplicate sort `{name}`")));
            }
            if sizes[i] == 0 {
                return Err(Error::InvalidAlgebra(format!("sort `{name}` has an empty carrier")));
            }
        }
        let alg = SortedAlgebra {
            sort_names,
            sizes,
            ops: Vec::new(),
        };
        let mut alg = alg;
        for (i, op) in ops.iter().enumerate() {
            if ops[..i].iter().any(|o| o.name == op.name) {
                return Err(Error::InvalidAlgebra(format!("duplicate operation `{}`", op.name)));
            }
            if let Some(&s) = op.inputs.iter().chain(Some(&op.output)).find(|&&s| s >= alg.sizes.len()) {
                return Err(Error::SortMismatch(format!("operation `{}` refers to sort {s}", op.name)));
            }
            let expected = util::checked_box_size(&alg.dims(&op.inputs))
                .ok_or_else(|| Error::InvalidAlgebra(format!("table of `{}` is too large", op.name)))?;
            if op.table.len() != expected {
                return Err(Error::InvalidAlgebra(format!(
                    "table of `{}` has {} entries, expected {expected}",
                    op.name,
                    op.table.len()
                )));
            }
            let size = alg.sizes[op.output];
            if let Some(&bad) = op.table.iter().find(|&&v| v as usize >= size) {
                return Err(Error::OutOfRange {
                    element: bad as usize,
                    size,
                });
            }
        }
        alg.ops = ops;
        Ok(alg)
    }

    pub fn sort_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, sort: usize) -> usize {
        self.sizes[sort]
    }

    pub fn sort_name(&self, sort: usize) -> &str {
        &self.sort_names[sort]
    }

    pub fn sort_names(&self) -> &[String] {
        &self.sort_names
    }

    pub fn sort_index(&self, name: &str) -> Option<usize> {
        self.sort_names.iter().position(|s| s == name)
    }

    pub fn ops(&self) -> &[SortedOp] {
        &self.ops
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn dims(&self, sorts: &[usize]) -> Vec<usize> {
        sorts.iter().map(|&s| self.sizes[s]).collect()
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[SElem]) -> SElem {
        let o = &self.ops[op];
        let mut idx = 0usize;
        for (&a, &s) in args.iter().zip(&o.inputs) {
            idx = idx * self.sizes[s] + a as usize;
        }
        o.table[idx]
    }

    /// Same carriers, different operations.
    pub fn with_ops(&self, ops: Vec<SortedOp>) -> Result<SortedAlgebra> {
        SortedAlgebra::new(self.sort_names.clone(), self.sizes.clone(), ops)
    }
}

impl fmt::Display for SortedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sorts: Vec<String> = self
            .sort_names
            .iter()
            .zip(&self.sizes)
            .map(|(n, s)| format!("{n}:{s}"))
            .collect();
        write!(f, "sorts [{}], {} operations", sorts.join(" "), self.ops.len())
    }
}

/// One sort per class; each basic operation splits into one typed
/// operation per tuple of input classes.
pub fn build_frz(alg: &FiniteAlgebra, tau: &Congruence) -> Result<SortedAlgebra> {
    if !congruence::is_congruence(alg, tau)? {
        return Err(Error::NotACongruence(tau.to_string()));
    }
    let classes = tau.classes();
    let m = classes.len();
    let names: Vec<String> = (0..m).map(|i| format!("s{i}")).collect();
    let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    let mut ops = Vec::new();
    for op in alg.ops() {
        let class_dims = vec![m; op.arity];
        let mut ct = vec![0usize; op.arity];
        loop {
            let (table, _) = congruence::restrict_to_classes(alg.size(), &op.table, &classes, &ct);
            let output = tau.block(table[0] as usize);
            let members = &classes[output];
            let table = table
                .iter()
                .map(|v| members.binary_search(v).expect("congruence keeps boxes in one class") as SElem)
                .collect();
            let mut name = op.name.clone();
            for c in &ct {
                name.push('_');
                name.push_str(&c.to_string());
            }
            ops.push(SortedOp {
                name,
                inputs: ct.clone(),
                output,
                table,
            });
            if !util::advance(&mut ct, &class_dims) {
                break;
            }
        }
    }
    SortedAlgebra::new(names, sizes, ops)
}

/// The flat algebra together with bookkeeping linking sorts and operations
/// back to classes and boxmaps.
#[derive(Clone, Debug)]
pub struct FlatAlgebra {
    pub algebra: SortedAlgebra,
    /// Sort index of factor `j` of class `i`.
    pub class_sorts: Vec<Vec<usize>>,
    /// For each operation: the boxmap it came from and the output coordinate.
    pub sources: Vec<(String, usize)>,
}

/// One sort per coordinate factor; every boxmap contributes one operation
/// per output coordinate, computed through the coordinatizations.
/// Operations with identical typing and table are merged.
pub fn build_frzflt(coords: &[Coordinatization], boxmaps: &[Boxmap]) -> Result<FlatAlgebra> {
    for (i, c) in coords.iter().enumerate() {
        if c.class != i {
            return Err(Error::NotCoordinatized(i));
        }
    }
    let mut names = Vec::new();
    let mut sizes = Vec::new();
    let mut class_sorts = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        let mut sorts = Vec::new();
        for (j, &s) in c.factor_sizes.iter().enumerate() {
            sorts.push(names.len());
            names.push(format!("s{i}_{j}"));
            sizes.push(s);
        }
        class_sorts.push(sorts);
    }
    let mut seen: HashMap<(Vec<usize>, usize, Vec<SElem>), ()> = HashMap::new();
    let mut ops = Vec::new();
    let mut sources = Vec::new();
    for (n, b) in boxmaps.iter().enumerate() {
        let classes_used = b.input_classes.iter().chain(Some(&b.output_class));
        if let Some(&bad) = classes_used.clone().find(|&&c| c >= coords.len()) {
            return Err(Error::NotCoordinatized(bad));
        }
        let inputs: Vec<usize> = b.input_classes.iter().flat_map(|&c| class_sorts[c].iter().copied()).collect();
        let dims: Vec<usize> = inputs.iter().map(|&s| sizes[s]).collect();
        let out = &coords[b.output_class];
        let bdims = b.dims();
        let total = util::box_size(&dims);
        let mut columns: Vec<Vec<SElem>> = vec![Vec::with_capacity(total); out.arity()];
        let mut t = vec![0usize; dims.len()];
        let mut pos = vec![0usize; b.input_count()];
        for _ in 0..total {
            let mut offset = 0;
            for (k, &c) in b.input_classes.iter().enumerate() {
                let kk = coords[c].arity();
                let x = coords[c].element(&t[offset..offset + kk]);
                pos[k] = b.input_members[k].binary_search(&x).expect("member of its class");
                offset += kk;
            }
            let v = b.table[util::index_of_usize(&pos, &bdims)];
            let phi = out.coords(v).expect("boxmap lands in its output class");
            for (j, col) in columns.iter_mut().enumerate() {
                col.push(phi[j] as SElem);
            }
            util::advance(&mut t, &dims);
        }
        for (j, table) in columns.into_iter().enumerate() {
            let output = class_sorts[b.output_class][j];
            if seen.insert((inputs.clone(), output, table.clone()), ()).is_none() {
                ops.push(SortedOp {
                    name: format!("b{n}_{j}"),
                    inputs: inputs.clone(),
                    output,
                    table,
                });
                sources.push((b.term.to_string(), j));
            }
        }
    }
    Ok(FlatAlgebra {
        algebra: SortedAlgebra::new(names, sizes, ops)?,
        class_sorts,
        sources,
    })
}

/// Whether `g` equals the projection onto one of its slots.
pub fn is_projection(alg: &SortedAlgebra, g: &SortedOp) -> bool {
    let dims = alg.dims(&g.inputs);
    (0..g.inputs.len()).any(|p| {
        g.inputs[p] == g.output && {
            let mut t = vec![0usize; dims.len()];
            g.table.iter().all(|&v| {
                let ok = v as usize == t[p];
                util::advance(&mut t, &dims);
                ok
            })
        }
    })
}

/// Whether `g` arises from `f` by a sort-respecting renaming of variables
/// (identifications included).
pub fn is_minor_of(alg: &SortedAlgebra, g: &SortedOp, f: &SortedOp) -> bool {
    if g.output != f.output {
        return false;
    }
    let m = g.inputs.len();
    let n = f.inputs.len();
    if m == 0 {
        return n == 0 && g.table == f.table;
    }
    let gdims = alg.dims(&g.inputs);
    let fdims = alg.dims(&f.inputs);
    let choices: Vec<Vec<usize>> = f
        .inputs
        .iter()
        .map(|&s| (0..m).filter(|&p| g.inputs[p] == s).collect())
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return false;
    }
    let cdims: Vec<usize> = choices.iter().map(Vec::len).collect();
    let mut pick = vec![0usize; n];
    let mut ft = vec![0usize; n];
    loop {
        let mut gt = vec![0usize; m];
        let ok = g.table.iter().all(|&v| {
            for (i, c) in choices.iter().enumerate() {
                ft[i] = gt[c[pick[i]]];
            }
            let same = f.table[util::index_of_usize(&ft, &fdims)] == v;
            util::advance(&mut gt, &gdims);
            same
        });
        if ok {
            return true;
        }
        if !util::advance(&mut pick, &cdims) {
            return false;
        }
    }
}

/// Drop projections and operations that are minors of other kept
/// operations. The clone, hence every term operation and every equation
/// in the variety, is unchanged.
pub fn reduced_signature(alg: &SortedAlgebra) -> Result<SortedAlgebra> {
    let ops = alg.ops();
    let mut keep = vec![true; ops.len()];
    for i in 0..ops.len() {
        if is_projection(alg, &ops[i]) {
            keep[i] = false;
        }
    }
    // Larger arities first, so a chain of minors collapses onto its top.
    let mut order: Vec<usize> = (0..ops.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(ops[i].inputs.len()), i));
    for (pos, &i) in order.iter().enumerate() {
        if !keep[i] {
            continue;
        }
        if order[..pos].iter().any(|&j| keep[j] && is_minor_of(alg, &ops[i], &ops[j])) {
            keep[i] = false;
        }
    }
    alg.with_ops(
        ops.iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(o, _)| o.clone())
            .collect(),
    )
}

/// A term with operation symbols resolved to indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompiledTerm {
    Var(usize),
    Op(usize, Vec<CompiledTerm>),
}

impl CompiledTerm {
    pub fn compile(alg: &SortedAlgebra, t: &Term) -> Result<CompiledTerm> {
        Ok(match t {
            Term::Var(v) => CompiledTerm::Var(*v),
            Term::Apply(name, children) => {
                let op = alg.op_index(name).ok_or_else(|| Error::UnknownOp(name.clone()))?;
                let arity = alg.ops()[op].inputs.len();
                if children.len() != arity {
                    return Err(Error::ArityMismatch {
                        op: name.clone(),
                        expected: arity,
                        found: children.len(),
                    });
                }
                CompiledTerm::Op(
                    op,
                    children
                        .iter()
                        .map(|c| CompiledTerm::compile(alg, c))
                        .collect::<Result<_>>()?,
                )
            }
        })
    }

    /// Evaluate in any algebra sharing the signature the term was compiled
    /// against.
    pub fn eval(&self, alg: &SortedAlgebra, args: &[SElem]) -> SElem {
        match self {
            CompiledTerm::Var(v) => args[*v],
            CompiledTerm::Op(op, children) => {
                let o = &alg.ops()[*op];
                let mut idx = 0usize;
                for (c, &s) in children.iter().zip(&o.inputs) {
                    idx = idx * alg.size(s) + c.eval(alg, args) as usize;
                }
                o.table[idx]
            }
        }
    }
}

/// Sort of a term over a variable context, checking every application.
pub fn sort_of(alg: &SortedAlgebra, t: &Term, context: &[usize]) -> Result<usize> {
    match t {
        Term::Var(v) => context.get(*v).copied().ok_or(Error::UnassignedVariable(*v)),
        Term::Apply(name, children) => {
            let op = &alg.ops()[alg.op_index(name).ok_or_else(|| Error::UnknownOp(name.clone()))?];
            if children.len() != op.inputs.len() {
                return Err(Error::ArityMismatch {
                    op: name.clone(),
                    expected: op.inputs.len(),
                    found: children.len(),
                });
            }
            for (c, &want) in children.iter().zip(&op.inputs) {
                let got = sort_of(alg, c, context)?;
                if got != want {
                    return Err(Error::SortMismatch(format!(
                        "`{name}` expects {} but {c} has sort {}",
                        alg.sort_name(want),
                        alg.sort_name(got)
                    )));
                }
            }
            Ok(op.output)
        }
    }
}

#[derive(Clone, Debug)]
enum Origin {
    Generator(usize),
    Apply(usize, Vec<usize>),
}

/// Points of a sorted power `alg^len`, closed under the operations
/// coordinatewise.
#[derive(Clone, Debug)]
pub struct SortedPoints {
    pub len: usize,
    pub sorts: Vec<usize>,
    pub elems: Vec<Vec<SElem>>,
    index: Vec<FxHashMap<Vec<SElem>, usize>>,
    origin: Vec<Origin>,
}

impl SortedPoints {
    pub fn count(&self) -> usize {
        self.elems.len()
    }

    pub fn position(&self, sort: usize, point: &[SElem]) -> Option<usize> {
        self.index.get(sort)?.get(point).copied()
    }

    pub fn of_sort(&self, sort: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.elems.len()).filter(move |&i| self.sorts[i] == sort)
    }

    /// A term producing element `id`, with generator `g` as `Var(g)`.
    pub fn witness(&self, alg: &SortedAlgebra, id: usize) -> Term {
        let mut memo: HashMap<usize, Term> = HashMap::new();
        self.witness_memo(alg, id, &mut memo)
    }

    fn witness_memo(&self, alg: &SortedAlgebra, id: usize, memo: &mut HashMap<usize, Term>) -> Term {
        if let Some(t) = memo.get(&id) {
            return t.clone();
        }
        let t = match &self.origin[id] {
            Origin::Generator(g) => Term::var(*g),
            Origin::Apply(op, args) => Term::Apply(
                alg.ops()[*op].name.clone(),
                args.iter().map(|&a| self.witness_memo(alg, a, memo)).collect(),
            ),
        };
        memo.insert(id, t.clone());
        t
    }
}

/// Semi-naive closure of sorted points under every operation.
pub fn sorted_closure(
    alg: &SortedAlgebra,
    len: usize,
    generators: Vec<(usize, Vec<SElem>)>,
    limits: &Limits,
) -> Result<SortedPoints> {
    let mut pts = SortedPoints {
        len,
        sorts: Vec::new(),
        elems: Vec::new(),
        index: vec![FxHashMap::default(); alg.sort_count()],
        origin: Vec::new(),
    };
    let insert = |pts: &mut SortedPoints, sort: usize, v: Vec<SElem>, o: Origin| -> Result<bool> {
        if pts.index[sort].contains_key(&v) {
            return Ok(false);
        }
        if pts.elems.len() >= limits.max_elements {
            return Err(Error::ResourceLimit(format!("more than {} points", limits.max_elements)));
        }
        pts.index[sort].insert(v.clone(), pts.elems.len());
        pts.sorts.push(sort);
        pts.elems.push(v);
        pts.origin.push(o);
        Ok(true)
    };
    for (g, (s, v)) in generators.into_iter().enumerate() {
        if v.len() != len {
            return Err(Error::SizeMismatch {
                expected: len,
                found: v.len(),
            });
        }
        if let Some(&bad) = v.iter().find(|&&x| x as usize >= alg.size(s)) {
            return Err(Error::OutOfRange {
                element: bad as usize,
                size: alg.size(s),
            });
        }
        insert(&mut pts, s, v, Origin::Generator(g))?;
    }
    let mut prev = 0usize;
    let mut round = 0usize;
    let mut buf = vec![0 as SElem; len];
    loop {
        let cur = pts.elems.len();
        if round > 0 && cur == prev {
            return Ok(pts);
        }
        for (op_id, op) in alg.ops().iter().enumerate() {
            let pools: Vec<Vec<usize>> = op
                .inputs
                .iter()
                .map(|&s| (0..cur).filter(|&i| pts.sorts[i] == s).collect())
                .collect();
            if op.inputs.is_empty() {
                if round == 0 {
                    buf.iter_mut().for_each(|x| *x = op.table[0]);
                    insert(&mut pts, op.output, buf.clone(), Origin::Apply(op_id, vec![]))?;
                }
                continue;
            }
            if pools.iter().any(Vec::is_empty) {
                continue;
            }
            let pdims: Vec<usize> = pools.iter().map(Vec::len).collect();
            let dims = alg.dims(&op.inputs);
            let mut pick = vec![0usize; pools.len()];
            let mut args = vec![0usize; pools.len()];
            loop {
                for (a, (p, &k)) in args.iter_mut().zip(pools.iter().zip(&pick)) {
                    *a = p[k];
                }
                if args.iter().any(|&a| a >= prev) {
                    let rows: Vec<&[SElem]> = args.iter().map(|&a| &pts.elems[a][..]).collect();
                    crate::algebra::apply_rows(&op.table, &dims, &rows, &mut buf);
                    if !pts.index[op.output].contains_key(&buf[..]) {
                        insert(&mut pts, op.output, buf.clone(), Origin::Apply(op_id, args.clone()))?;
                    }
                }
                if !util::advance(&mut pick, &pdims) {
                    break;
                }
            }
        }
        prev = cur;
        round += 1;
    }
}

/// All term operations over a context of sorted variables, as tables over
/// the assignments of the context.
pub fn sorted_clone(alg: &SortedAlgebra, context: &[usize], limits: &Limits) -> Result<SortedPoints> {
    let dims = alg.dims(context);
    let len = util::checked_box_size(&dims)
        .filter(|&l| l <= 1 << 24)
        .ok_or_else(|| Error::ResourceLimit("variable context too large".into()))?;
    let mut gens: Vec<(usize, Vec<SElem>)> = context.iter().map(|&s| (s, Vec::with_capacity(len))).collect();
    let mut t = vec![0usize; dims.len()];
    for _ in 0..len {
        for (j, g) in gens.iter_mut().enumerate() {
            g.1.push(t[j] as SElem);
        }
        util::advance(&mut t, &dims);
    }
    sorted_closure(alg, len, gens, limits)
}

/// Congruence of a sorted algebra generated by pairs `(sort, a, b)`, as
/// block ids per sort numbered by first occurrence.
pub fn sorted_cg(alg: &SortedAlgebra, pairs: &[(usize, SElem, SElem)]) -> Vec<Vec<usize>> {
    let mut uf: Vec<UnionFind> = alg.sizes().iter().map(|&n| UnionFind::new(n)).collect();
    let mut work: Vec<(usize, SElem, SElem)> = Vec::new();
    for &(s, a, b) in pairs {
        if uf[s].union(a as usize, b as usize) {
            work.push((s, a, b));
        }
    }
    let mut args = Vec::new();
    while let Some((s, a, b)) = work.pop() {
        for (oi, op) in alg.ops().iter().enumerate() {
            let dims = alg.dims(&op.inputs);
            for p in 0..op.inputs.len() {
                if op.inputs[p] != s {
                    continue;
                }
                let mut odims = dims.clone();
                odims[p] = 1;
                let mut t = vec![0usize; dims.len()];
                args.resize(dims.len(), 0);
                loop {
                    for (x, &y) in args.iter_mut().zip(&t) {
                        *x = y as SElem;
                    }
                    args[p] = a;
                    let fa = alg.apply(oi, &args);
                    args[p] = b;
                    let fb = alg.apply(oi, &args);
                    if uf[op.output].union(fa as usize, fb as usize) {
                        work.push((op.output, fa, fb));
                    }
                    if !util::advance(&mut t, &odims) {
                        break;
                    }
                }
            }
        }
    }
    uf.iter_mut()
        .map(|u| {
            let n = u.len();
            let mut ids = vec![usize::MAX; n];
            let mut next = 0;
            let mut out = Vec::with_capacity(n);
            for x in 0..n {
                let r = u.find(x);
                if ids[r] == usize::MAX {
                    ids[r] = next;
                    next += 1;
                }
                out.push(ids[r]);
            }
            out
        })
        .collect()
}

/// Quotient by block ids per sort (each numbered from 0). Fails if the
/// blocks are not a congruence.
pub fn sorted_quotient(alg: &SortedAlgebra, blocks: &[Vec<usize>]) -> Result<SortedAlgebra> {
    let counts: Vec<usize> = blocks.iter().map(|b| b.iter().max().map_or(0, |m| m + 1)).collect();
    let reps: Vec<Vec<SElem>> = blocks
        .iter()
        .zip(&counts)
        .map(|(b, &n)| {
            let mut r = vec![SElem::MAX; n];
            for (x, &k) in b.iter().enumerate() {
                if r[k] == SElem::MAX {
                    r[k] = x as SElem;
                }
            }
            r
        })
        .collect();
    let mut ops = Vec::with_capacity(alg.ops().len());
    for (oi, op) in alg.ops().iter().enumerate() {
        let qdims: Vec<usize> = op.inputs.iter().map(|&s| counts[s]).collect();
        let total = util::box_size(&qdims);
        let mut table = Vec::with_capacity(total);
        let mut t = vec![0usize; qdims.len()];
        let mut args = vec![0 as SElem; qdims.len()];
        for _ in 0..total {
            for ((x, &k), &s) in args.iter_mut().zip(&t).zip(&op.inputs) {
                *x = reps[s][k];
            }
            table.push(blocks[op.output][alg.apply(oi, &args) as usize] as SElem);
            util::advance(&mut t, &qdims);
        }
        ops.push(SortedOp {
            name: op.name.clone(),
            inputs: op.inputs.clone(),
            output: op.output,
            table,
        });
    }
    let q = SortedAlgebra::new(alg.sort_names().to_vec(), counts, ops)?;
    // Compatibility: every element, not just the representative, must land
    // in the right block.
    for (oi, op) in alg.ops().iter().enumerate() {
        let dims = alg.dims(&op.inputs);
        let mut t = vec![0usize; dims.len()];
        let mut qa = vec![0 as SElem; dims.len()];
        for &v in &op.table {
            for ((x, &y), &s) in qa.iter_mut().zip(&t).zip(&op.inputs) {
                *x = blocks[s][y] as SElem;
            }
            if q.apply(oi, &qa) as usize != blocks[op.output][v as usize] {
                return Err(Error::NotACongruence(format!("blocks are not compatible with `{}`", op.name)));
            }
            util::advance(&mut t, &dims);
        }
    }
    Ok(q)
}

/// Term condition on a table over a box with one slot as the row:
/// for the ordinary condition `t(a,u) = t(a,v)` forces `t(b,u) = t(b,v)`,
/// for the strong one `t(a,u) = t(b,v)` forces `t(c,u) = t(c,v)`.
pub(crate) fn row_condition_holds(table: &[SElem], dims: &[usize], row: usize, kind: TcKind) -> bool {
    let st = util::strides(dims);
    let rows = dims[row];
    let mut other = dims.to_vec();
    other[row] = 1;
    let cols = util::box_size(&other);
    let mut t = vec![0usize; dims.len()];
    let mut fns: HashMap<Vec<SElem>, usize> = HashMap::new();
    let mut seen: HashMap<(usize, SElem), usize> = HashMap::new();
    for c in 0..cols {
        util::decode(c, &other, &mut t);
        let base = util::index_of_usize(&t, dims);
        let f: Vec<SElem> = (0..rows).map(|a| table[base + a * st[row]]).collect();
        let next = fns.len();
        let id = *fns.entry(f.clone()).or_insert(next);
        if id != next {
            continue;
        }
        for (a, &v) in f.iter().enumerate() {
            let key = match kind {
                TcKind::Strong => (0, v),
                TcKind::Abelian => (a, v),
            };
            match seen.get(&key) {
                Some(&o) if o != id => return false,
                Some(_) => {}
                None => {
                    seen.insert(key, id);
                }
            }
        }
    }
    true
}

/// Multisets of sorts of the given size, as nondecreasing sequences.
pub(crate) fn sort_multisets(sorts: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, sorts: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for s in start..sorts {
            cur.push(s);
            go(s, sorts, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, sorts, size, &mut Vec::new(), &mut out);
    out
}

/// The (strong) term condition of a sorted algebra for every term in
/// `arity` variables, each slot taking a turn as the row.
pub fn sorted_term_condition(alg: &SortedAlgebra, kind: TcKind, arity: usize, limits: &Limits) -> Result<bool> {
    let arity = arity.max(1);
    for context in sort_multisets(alg.sort_count(), arity) {
        let clone = sorted_clone(alg, &context, limits)?;
        let dims = alg.dims(&context);
        for e in &clone.elems {
            for row in 0..arity {
                if !row_condition_holds(e, &dims, row, kind) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuralReport {
    pub substructure: bool,
    pub quotient: bool,
    pub product: bool,
}

impl StructuralReport {
    pub fn all(&self) -> bool {
        self.substructure && self.quotient && self.product
    }
}

/// Relabel a subuniverse of `alg` as an algebra of its own.
fn subalgebra(alg: &FiniteAlgebra, members: &[Elem]) -> Result<FiniteAlgebra> {
    let pos: HashMap<Elem, usize> = members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let n = members.len();
    let mut ops = Vec::new();
    for (oi, op) in alg.ops().iter().enumerate() {
        let dims = vec![n; op.arity];
        let mut t = vec![0usize; op.arity];
        let mut table = Vec::new();
        let mut args = vec![0 as Elem; op.arity];
        loop {
            for (a, &x) in args.iter_mut().zip(&t) {
                *a = members[x];
            }
            let v = alg.apply(oi, &args);
            let p = *pos
                .get(&v)
                .ok_or_else(|| Error::ClosureFailure(format!("{v} escapes the subuniverse")))?;
            table.push(p as Elem);
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
    FiniteAlgebra::new(n, ops)
}

/// Check, on one instance, that subalgebras meeting every class, quotients
/// by congruences below `tau` and fiber products over `tau` become
/// substructures, homomorphic images and products of the sorted algebra.
pub fn check_structural_correspondence(
    alg: &FiniteAlgebra,
    tau: &Congruence,
    sub_generators: &[Elem],
    theta: &Congruence,
    limits: &Limits,
) -> Result<StructuralReport> {
    let big = build_frz(alg, tau)?;
    let classes = tau.classes();

    // Substructure: the typed operations of the subalgebra agree with those
    // of the big sorted algebra through the inclusions.
    let gens: Vec<Vec<Elem>> = sub_generators.iter().map(|&g| vec![g]).collect();
    let sub = crate::algebra::generate_subpower(alg, 1, &gens, limits)?;
    let mut members: Vec<Elem> = sub.elements.iter().map(|p| p[0]).collect();
    members.sort_unstable();
    let substructure = if classes.iter().all(|c| c.iter().any(|x| members.contains(x))) {
        let d = subalgebra(alg, &members)?;
        let tau_d = Congruence::from_block_ids(&members.iter().map(|&x| tau.block(x as usize)).collect::<Vec<_>>());
        let small = build_frz(&d, &tau_d)?;
        // Sorts of the subalgebra appear in the same order as the classes,
        // since both are ordered by least element and members are sorted.
        let incl: Vec<Vec<SElem>> = tau_d
            .classes()
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&p| {
                        let x = members[p as usize];
                        classes[tau.block(x as usize)].binary_search(&x).unwrap() as SElem
                    })
                    .collect()
            })
            .collect();
        small.ops().iter().zip(big.ops()).all(|(so, bo)| {
            let dims = small.dims(&so.inputs);
            let mut t = vec![0usize; dims.len()];
            so.table.iter().all(|&v| {
                let args: Vec<SElem> = t.iter().zip(&so.inputs).map(|(&x, &s)| incl[s][x]).collect();
                let ok = so.name == bo.name && big.apply(big.op_index(&so.name).unwrap(), &args) == incl[so.output][v as usize];
                util::advance(&mut t, &dims);
                ok
            })
        })
    } else {
        false
    };

    // Quotient: the natural map is a surjective homomorphism of sorted
    // algebras.
    let quotient = if theta.refines(tau) && congruence::is_congruence(alg, theta)? {
        let q = congruence::quotient(alg, theta)?;
        let tau_q = Congruence::from_block_ids(
            &theta.classes().iter().map(|c| tau.block(c[0] as usize)).collect::<Vec<_>>(),
        );
        let small = build_frz(&q, &tau_q)?;
        let qclasses = tau_q.classes();
        let nat: Vec<Vec<SElem>> = classes
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&x| {
                        let b = theta.block(x as usize) as Elem;
                        qclasses[tau_q.block(b as usize)].binary_search(&b).unwrap() as SElem
                    })
                    .collect()
            })
            .collect();
        big.ops().iter().all(|bo| {
            let Some(si) = small.op_index(&bo.name) else { return false };
            let dims = big.dims(&bo.inputs);
            let mut t = vec![0usize; dims.len()];
            bo.table.iter().all(|&v| {
                let args: Vec<SElem> = t.iter().zip(&bo.inputs).map(|(&x, &s)| nat[s][x]).collect();
                let ok = small.apply(si, &args) == nat[bo.output][v as usize];
                util::advance(&mut t, &dims);
                ok
            })
        })
    } else {
        false
    };

    // Product: the fiber product over tau has, per class, the square of the
    // class as carrier and acts coordinatewise.
    let n = alg.size();
    let pairs: Vec<(Elem, Elem)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a as Elem, b as Elem)))
        .filter(|&(a, b)| tau.related(a as usize, b as usize))
        .collect();
    let product = if pairs.len() <= crate::algebra::MAX_SIZE {
        let pos: HashMap<(Elem, Elem), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let fib = FiniteAlgebra::from_fns(
            pairs.len(),
            alg.ops()
                .iter()
                .enumerate()
                .map(|(oi, op)| {
                    let pairs = pairs.clone();
                    let pos = pos.clone();
                    let alg = alg.clone();
                    let f: Box<dyn Fn(&[usize]) -> usize> = Box::new(move |args: &[usize]| {
                        let l: Vec<Elem> = args.iter().map(|&a| pairs[a].0).collect();
                        let r: Vec<Elem> = args.iter().map(|&a| pairs[a].1).collect();
                        pos[&(alg.apply(oi, &l), alg.apply(oi, &r))]
                    });
                    (op.name.as_str(), op.arity, f)
                })
                .collect(),
        )?;
        let tau_f = Congruence::from_block_ids(&pairs.iter().map(|&(a, _)| tau.block(a as usize)).collect::<Vec<_>>());
        let small = build_frz(&fib, &tau_f)?;
        let fclasses = tau_f.classes();
        small.sort_count() == big.sort_count()
            && (0..big.sort_count()).all(|s| small.size(s) == big.size(s) * big.size(s))
            && small.ops().iter().all(|so| {
                let bi = big.op_index(&so.name).unwrap();
                let dims = small.dims(&so.inputs);
                let mut t = vec![0usize; dims.len()];
                so.table.iter().all(|&v| {
                    let split = |s: usize, p: usize| -> (SElem, SElem) {
                        let (a, b) = pairs[fclasses[s][p] as usize];
                        let c = &classes[tau.block(a as usize)];
                        (
                            c.binary_search(&a).unwrap() as SElem,
                            c.binary_search(&b).unwrap() as SElem,
                        )
                    };
                    let l: Vec<SElem> = t.iter().zip(&so.inputs).map(|(&x, &s)| split(s, x).0).collect();
                    let r: Vec<SElem> = t.iter().zip(&so.inputs).map(|(&x, &s)| split(s, x).1).collect();
                    let ok = split(so.output, v as usize) == (big.apply(bi, &l), big.apply(bi, &r));
                    util::advance(&mut t, &dims);
                    ok
                })
            })
    } else {
        false
    };

    Ok(StructuralReport {
        substructure,
        quotient,
        product,
    })
}
