//! Interpreting bipartite graphs into the variety generated by a flat
//! algebra that is not essentially unary.
//!
//! The pipeline follows the construction in stages: a term `q` depending on
//! two variables and left-invertible at neither; the free algebra `F'` on
//! generators `X ∪ {z}`; the congruence θ that makes `z` indistinguishable
//! from `0 = a0*b0` under non-left-invertible terms; the quotient `C`; the
//! subpower `D(G) ≤ C^Γ` encoding a graph; and the definable relations that
//! recover the graph from `D(G)`.

use std::collections::BTreeSet;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::algebra::{apply_rows, Limits};
use crate::error::{Error, Result};
use crate::sorted::{self, SElem, SortedAlgebra, SortedOp};
use crate::termset::{self, BinaryWitness, FreeAlgebra, LeftInverse, TermSet};
use crate::util;

/// Largest dense table built for the free algebra or its quotient.
const MAX_TABLE: usize = 1 << 26;

/// A bipartite graph with red vertices `0..reds`, blue vertices
/// `0..blues` and edges from red to blue. No vertex is isolated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    reds: usize,
    blues: usize,
    edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(reds: usize, blues: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if reds == 0 || blues == 0 {
            return Err(Error::InvalidGraph("both sides need at least one vertex".into()));
        }
        if reds > edges.len() || blues > edges.len() {
            return Err(Error::InvalidGraph("more vertices than edges, so some vertex is isolated".into()));
        }
        let mut seen = BTreeSet::new();
        for &(r, b) in &edges {
            if r >= reds || b >= blues {
                return Err(Error::InvalidGraph(format!("edge ({r}, {b}) refers to a missing vertex")));
            }
            if !seen.insert((r, b)) {
                return Err(Error::InvalidGraph(format!("edge ({r}, {b}) listed twice")));
            }
        }
        if let Some(r) = (0..reds).find(|&r| !edges.iter().any(|e| e.0 == r)) {
            return Err(Error::InvalidGraph(format!("red vertex {r} is isolated")));
        }
        if let Some(b) = (0..blues).find(|&b| !edges.iter().any(|e| e.1 == b)) {
            return Err(Error::InvalidGraph(format!("blue vertex {b} is isolated")));
        }
        Ok(BipartiteGraph { reds, blues, edges })
    }

    pub fn reds(&self) -> usize {
        self.reds
    }

    pub fn blues(&self) -> usize {
        self.blues
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, r: usize, b: usize) -> bool {
        self.edges.contains(&(r, b))
    }

    /// Every graph without isolated vertices on at most `max_vertices`
    /// vertices, isomorphic copies included.
    pub fn all_up_to(max_vertices: usize) -> Vec<BipartiteGraph> {
        let mut out = Vec::new();
        for reds in 1..max_vertices {
            for blues in 1..=max_vertices - reds {
                let all: Vec<(usize, usize)> = (0..reds).flat_map(|r| (0..blues).map(move |b| (r, b))).collect();
                for mask in 1u64..(1 << all.len()) {
                    let edges: Vec<(usize, usize)> =
                        all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                    if let Ok(g) = BipartiteGraph::new(reds, blues, edges) {
                        out.push(g);
                    }
                }
            }
        }
        out
    }

    /// A map of red and blue vertices onto those of `other` carrying edges
    /// exactly onto edges, if one exists.
    pub fn isomorphism_to(&self, other: &BipartiteGraph) -> Option<(Vec<usize>, Vec<usize>)> {
        if self.reds != other.reds || self.blues != other.blues || self.edges.len() != other.edges.len() {
            return None;
        }
        let reds = permutations(self.reds);
        let blues = permutations(self.blues);
        for pr in &reds {
            for pb in &blues {
                if self.edges.iter().all(|&(r, b)| other.has_edge(pr[r], pb[b])) {
                    return Some((pr.clone(), pb.clone()));
                }
            }
        }
        None
    }
}

impl fmt::Display for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(|(r, b)| format!("r{r}-b{b}")).collect();
        write!(f, "{} red, {} blue, edges [{}]", self.reds, self.blues, edges.join(" "))
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Outcomes of the checks made while building `C`. The embedding of `F`,
/// the isolation of `z` and distinctness of the constants are hard
/// requirements; the rest are recorded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionChecks {
    pub f_embeds: bool,
    pub z_isolated: bool,
    pub constants_distinct: bool,
    pub zero_propto_z: bool,
    pub constants_pairwise_not_propto: bool,
}

/// Everything built once per flat algebra and reused for every graph.
#[derive(Clone, Debug)]
pub struct Construction {
    /// The flat algebra with its reduced signature.
    pub algebra: SortedAlgebra,
    pub terms: TermSet,
    pub left: Vec<Vec<Option<LeftInverse>>>,
    pub right: Vec<bool>,
    pub q: BinaryWitness,
    /// Sorts of the generators: `x_s` for every sort `s` (generator `s`),
    /// then `a0 a1 b0 b1`, then `z`.
    pub generators: Vec<usize>,
    pub a: [usize; 2],
    pub b: [usize; 2],
    pub z: usize,
    /// `F' = F(X ∪ {z})`; `F` is the part avoiding `z`.
    pub free: FreeAlgebra,
    pub in_f: Vec<bool>,
    /// Number of generator assignments used to tell elements of `F'` apart.
    pub separating: usize,
    pub fprime: SortedAlgebra,
    /// Element of `F'` to its index within its sort.
    pub local: Vec<SElem>,
    pub theta_pairs: usize,
    pub c: SortedAlgebra,
    /// Element of `F'` to its class in `C`.
    pub to_c: Vec<SElem>,
    /// Elements `0 = a0*b0`, `1 = a0*b1`, `2 = a1*b0`, `3 = a1*b1` of `F`.
    pub constants: [usize; 4],
    /// For each sort, members of the term set with a slot of that sort at
    /// which they are not left-invertible.
    pub n_sets: Vec<Vec<(usize, usize)>>,
    /// A subset of each `n_sets[s]` whose unary polynomials include those
    /// of every member of `n_sets[s]`; enough to decide `∝`.
    pub families: Vec<Vec<(usize, usize)>>,
    /// `∝` on `C`, as block ids per sort.
    pub c_propto: Vec<Vec<u32>>,
    pub checks: ConstructionChecks,
}

impl Construction {
    pub fn zero_sort(&self) -> usize {
        self.terms.members[self.q.member].output
    }

    /// Class in `C` of generator `g`.
    pub fn generator_c(&self, g: usize) -> SElem {
        self.to_c[self.free.generator(g)]
    }

    pub fn f_size(&self) -> usize {
        self.in_f.iter().filter(|&&x| x).count()
    }

    pub fn c_size(&self) -> usize {
        self.c.sizes().iter().sum()
    }

    /// `x * y = q(x, y, x_s, ..)` on elements of `C`.
    pub fn star(&self, x: SElem, y: SElem) -> SElem {
        let q = &self.terms.members[self.q.member];
        let mut args = vec![0 as SElem; q.term_arity()];
        args[0] = x;
        args[1] = y;
        for k in 2..q.arity() {
            args[k] = self.generator_c(q.inputs[k]);
        }
        q.eval_in(&self.c, &args)
    }

    /// `∝` on `C` read straight off the definition.
    pub fn propto_literal(&self, sort: usize, a: SElem, b: SElem) -> bool {
        let all: Vec<Vec<SElem>> = self.c.sizes().iter().map(|&n| (0..n as SElem).collect()).collect();
        self.n_sets[sort].iter().all(|&(m, p)| {
            let t = &self.terms.members[m];
            let mut ok = true;
            for_each_params(t.inputs.as_slice(), p, &all, t.term_arity(), |args| {
                args[p] = a;
                let x = t.eval_in(&self.c, args);
                args[p] = b;
                let y = t.eval_in(&self.c, args);
                ok = x == y;
                ok
            });
            ok
        })
    }
}

/// Call `f` on every argument vector with slot `skip` left for the caller
/// and the others drawn from `params`; stops when `f` returns false.
fn for_each_params<F>(inputs: &[usize], skip: usize, params: &[Vec<SElem>], width: usize, mut f: F)
where
    F: FnMut(&mut [SElem]) -> bool,
{
    let pools: Vec<&[SElem]> = inputs
        .iter()
        .enumerate()
        .map(|(k, &s)| if k == skip { &[0][..] } else { &params[s][..] })
        .collect();
    if pools.iter().any(|p| p.is_empty()) {
        return;
    }
    let pdims: Vec<usize> = pools.iter().map(|p| p.len()).collect();
    let mut pick = vec![0usize; pools.len()];
    let mut args = vec![0 as SElem; width.max(inputs.len())];
    loop {
        for (k, (p, &i)) in pools.iter().zip(&pick).enumerate() {
            args[k] = p[i];
        }
        if !f(&mut args) {
            return;
        }
        if !util::advance(&mut pick, &pdims) {
            return;
        }
    }
}

/// `∝` restricted to `elems`, with parameters drawn from `params`, as block
/// ids aligned with `elems` per sort.
fn propto_blocks(
    alg: &SortedAlgebra,
    terms: &TermSet,
    n_sets: &[Vec<(usize, usize)>],
    params: &[Vec<SElem>],
    elems: &[Vec<SElem>],
) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(elems.len());
    for (s, el) in elems.iter().enumerate() {
        let mut blocks = vec![0u32; el.len()];
        let mut count = usize::from(!el.is_empty());
        let mut key: FxHashMap<(u32, SElem), u32> = FxHashMap::default();
        for &(m, p) in &n_sets[s] {
            if count == el.len() {
                break;
            }
            let t = &terms.members[m];
            for_each_params(&t.inputs, p, params, t.term_arity(), |args| {
                key.clear();
                let mut next = Vec::with_capacity(el.len());
                for (i, &a) in el.iter().enumerate() {
                    args[p] = a;
                    let v = t.eval_in(alg, args);
                    let n = key.len() as u32;
                    next.push(*key.entry((blocks[i], v)).or_insert(n));
                }
                count = key.len();
                blocks = next;
                count < el.len()
            });
        }
        out.push(blocks);
    }
    out
}

/// Whether every polynomial `a ↦ m(a, ū)` of `small` at its slot is one of
/// `big` at its slot, by some renaming of the parameters. Identities are
/// checked in `alg`, which generates the variety.
fn family_within(alg: &SortedAlgebra, terms: &TermSet, small: (usize, usize), big: (usize, usize)) -> bool {
    let (m, p) = small;
    let (n, r) = big;
    let (t, u) = (&terms.members[m], &terms.members[n]);
    if t.output != u.output || t.inputs[p] != u.inputs[r] {
        return false;
    }
    // σ: slots of `u` other than `r` to slots of `t` other than `p`
    let choices: Vec<Vec<usize>> = (0..u.arity())
        .map(|k| {
            if k == r {
                vec![p]
            } else {
                (0..t.arity()).filter(|&j| j != p && t.inputs[j] == u.inputs[k]).collect()
            }
        })
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return false;
    }
    let cdims: Vec<usize> = choices.iter().map(Vec::len).collect();
    let tdims = alg.dims(&t.inputs);
    let mut pick = vec![0usize; choices.len()];
    let mut targs = vec![0 as SElem; t.term_arity()];
    let mut uargs = vec![0 as SElem; u.term_arity()];
    loop {
        let mut holds = true;
        let mut asg = vec![0usize; t.arity()];
        loop {
            for (a, &x) in targs.iter_mut().zip(&asg) {
                *a = x as SElem;
            }
            for (k, (c, &i)) in choices.iter().zip(&pick).enumerate() {
                uargs[k] = targs[c[i]];
            }
            if t.eval_in(alg, &targs) != u.eval_in(alg, &uargs) {
                holds = false;
                break;
            }
            if !util::advance(&mut asg, &tdims) {
                break;
            }
        }
        if holds {
            return true;
        }
        if !util::advance(&mut pick, &cdims) {
            return false;
        }
    }
}

/// Drop members of the N-sets whose unary polynomials are already
/// produced by another kept member.
fn polynomial_families(alg: &SortedAlgebra, terms: &TermSet, n_sets: &[Vec<(usize, usize)>]) -> Vec<Vec<(usize, usize)>> {
    n_sets
        .iter()
        .map(|set| {
            set.iter()
                .enumerate()
                .filter(|&(i, &a)| {
                    !set.iter().enumerate().any(|(j, &b)| {
                        j != i && family_within(alg, terms, a, b) && (j < i || !family_within(alg, terms, b, a))
                    })
                })
                .map(|(_, &a)| a)
                .collect()
        })
        .collect()
}

/// Generator assignments on which distinct elements of the free algebra
/// take distinct value vectors, chosen greedily.
fn separating_assignments(alg: &SortedAlgebra, free: &FreeAlgebra) -> Vec<Vec<SElem>> {
    let n = free.len();
    let gens = &free.generators;
    let mut chosen: Vec<Vec<SElem>> = Vec::new();
    let mut vals: Vec<Vec<SElem>> = vec![Vec::new(); n];
    loop {
        let mut seen: FxHashMap<(usize, &[SElem]), usize> = FxHashMap::default();
        let mut collision = None;
        for id in 0..n {
            if let Some(&o) = seen.get(&(free.forms[id].sort, &vals[id][..])) {
                collision = Some((o, id));
                break;
            }
            seen.insert((free.forms[id].sort, &vals[id][..]), id);
        }
        let Some((i, j)) = collision else {
            return chosen;
        };
        let mut vars: Vec<usize> = free.forms[i].vars.iter().chain(&free.forms[j].vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        let vdims: Vec<usize> = vars.iter().map(|&g| alg.size(gens[g])).collect();
        let mut t = vec![0usize; vars.len()];
        let mut asg = vec![0 as SElem; gens.len()];
        loop {
            for (&g, &x) in vars.iter().zip(&t) {
                asg[g] = x as SElem;
            }
            if free.value(alg, i, &asg) != free.value(alg, j, &asg) {
                break;
            }
            assert!(util::advance(&mut t, &vdims), "distinct forms differ somewhere");
        }
        for (id, v) in vals.iter_mut().enumerate() {
            v.push(free.value(alg, id, &asg));
        }
        chosen.push(asg);
    }
}

/// The free algebra as a sorted algebra with dense tables, computed
/// coordinatewise on separating assignments.
fn dense_free(alg: &SortedAlgebra, free: &FreeAlgebra, limits: &Limits) -> Result<(SortedAlgebra, Vec<SElem>, usize)> {
    let sep = separating_assignments(alg, free);
    let vals: Vec<Vec<SElem>> = (0..free.len())
        .map(|id| sep.iter().map(|a| free.value(alg, id, a)).collect())
        .collect();
    let sorts = alg.sort_count();
    let mut by_sort: Vec<Vec<usize>> = vec![Vec::new(); sorts];
    let mut local = vec![0 as SElem; free.len()];
    for (id, f) in free.forms.iter().enumerate() {
        local[id] = by_sort[f.sort].len() as SElem;
        by_sort[f.sort].push(id);
    }
    if let Some(s) = (0..sorts).find(|&s| by_sort[s].is_empty()) {
        return Err(Error::ClosureFailure(format!("free algebra has no element of sort {s}")));
    }
    let lookup: Vec<FxHashMap<&[SElem], SElem>> = by_sort
        .iter()
        .map(|ids| ids.iter().enumerate().map(|(k, &id)| (&vals[id][..], k as SElem)).collect())
        .collect();
    let counts: Vec<usize> = by_sort.iter().map(Vec::len).collect();
    let mut ops = Vec::new();
    let mut buf = vec![0 as SElem; sep.len()];
    for op in alg.ops() {
        let qdims: Vec<usize> = op.inputs.iter().map(|&s| counts[s]).collect();
        let total = util::checked_box_size(&qdims)
            .filter(|&n| n <= MAX_TABLE && n <= limits.max_elements.saturating_mul(64))
            .ok_or_else(|| Error::ResourceLimit(format!("table of `{}` on the free algebra", op.name)))?;
        let bdims = alg.dims(&op.inputs);
        let mut table = Vec::with_capacity(total);
        let mut t = vec![0usize; qdims.len()];
        for _ in 0..total {
            let rows: Vec<&[SElem]> = t.iter().zip(&op.inputs).map(|(&k, &s)| &vals[by_sort[s][k]][..]).collect();
            if rows.is_empty() {
                buf.iter_mut().for_each(|x| *x = op.table[0]);
            } else {
                apply_rows(&op.table, &bdims, &rows, &mut buf);
            }
            let v = *lookup[op.output]
                .get(&buf[..])
                .ok_or_else(|| Error::ClosureFailure(format!("`{}` leaves the free algebra", op.name)))?;
            table.push(v);
            util::advance(&mut t, &qdims);
        }
        ops.push(SortedOp {
            name: op.name.clone(),
            inputs: op.inputs.clone(),
            output: op.output,
            table,
        });
    }
    let fprime = SortedAlgebra::new(alg.sort_names().to_vec(), counts, ops)?;
    Ok((fprime, local, sep.len()))
}

/// Build `F'`, θ and `C` for a flat algebra. Fails with `EssentiallyUnary`
/// when there is nothing to interpret into.
pub fn build_construction(flat: &SortedAlgebra, limits: &Limits) -> Result<Construction> {
    let algebra = sorted::reduced_signature(flat)?;
    let terms = termset::sorted_term_operations(&algebra, limits)?;
    let q = termset::find_binary_noninvertible_term(&algebra, &terms)?;
    let left = termset::left_inverse_table(&algebra, &terms);
    let right = termset::right_invertible_table(&algebra, &terms, limits)?;
    let qm = terms.members[q.member].clone();
    let (sa, sb, s0) = (qm.inputs[0], qm.inputs[1], qm.output);

    let mut generators: Vec<usize> = (0..algebra.sort_count()).collect();
    let base = generators.len();
    generators.extend([sa, sa, sb, sb, s0]);
    let a = [base, base + 1];
    let b = [base + 2, base + 3];
    let z = base + 4;
    let free = termset::free_algebra(&algebra, &terms, &generators, limits)?;
    let in_f = free.avoiding(z);
    let (fprime, local, separating) = dense_free(&algebra, &free, limits)?;

    let mut constants = [0usize; 4];
    for (k, c) in constants.iter_mut().enumerate() {
        let mut args = vec![a[k / 2], b[k % 2]];
        args.extend(qm.inputs[2..].iter().copied());
        let f = termset::compose_form(&algebra, &generators, &qm, &args);
        *c = free
            .position(&f)
            .ok_or_else(|| Error::ClosureFailure("constant missing from the free algebra".into()))?;
    }
    let constants_distinct = (0..4).all(|i| (0..i).all(|j| constants[i] != constants[j]));
    if !constants_distinct {
        return Err(Error::NotDistinct(format!("{} does not separate a0,a1 from b0,b1", qm.term)));
    }

    let mut n_sets: Vec<Vec<(usize, usize)>> = vec![Vec::new(); algebra.sort_count()];
    for (m, t) in terms.members.iter().enumerate() {
        for p in 0..t.arity() {
            if left[m][p].is_none() {
                n_sets[t.inputs[p]].push((m, p));
            }
        }
    }

    // θ: ⟨t(0, u), t(z, u)⟩ for non-left-invertible t and u from F.
    let zero = local[constants[0]];
    let zl = local[free.generator(z)];
    let f_params: Vec<Vec<SElem>> = (0..algebra.sort_count())
        .map(|s| {
            (0..free.len())
                .filter(|&id| in_f[id] && free.forms[id].sort == s)
                .map(|id| local[id])
                .collect()
        })
        .collect();
    let mut pairs = Vec::new();
    for &(m, p) in &n_sets[s0] {
        let t = &terms.members[m];
        for_each_params(&t.inputs, p, &f_params, t.term_arity(), |args| {
            args[p] = zero;
            let x = t.eval_in(&fprime, args);
            args[p] = zl;
            let y = t.eval_in(&fprime, args);
            if x != y {
                pairs.push((t.output, x, y));
            }
            true
        });
    }
    let theta = sorted::sorted_cg(&fprime, &pairs);
    let c = sorted::sorted_quotient(&fprime, &theta)?;
    let to_c: Vec<SElem> = (0..free.len())
        .map(|id| theta[free.forms[id].sort][local[id] as usize] as SElem)
        .collect();

    let mut f_classes: FxHashMap<(usize, SElem), usize> = FxHashMap::default();
    for id in (0..free.len()).filter(|&id| in_f[id]) {
        if let Some(other) = f_classes.insert((free.forms[id].sort, to_c[id]), id) {
            return Err(Error::EmbeddingFailure(format!(
                "{} and {} are identified",
                free.term(&terms, other),
                free.term(&terms, id)
            )));
        }
    }
    let zid = free.generator(z);
    let z_block = theta[s0][zl as usize];
    let z_class = theta[s0].iter().filter(|&&k| k == z_block).count();
    if z_class != 1 {
        return Err(Error::IsolationFailure(format!("z shares its class with {} other elements", z_class - 1)));
    }

    let all: Vec<Vec<SElem>> = c.sizes().iter().map(|&n| (0..n as SElem).collect()).collect();
    let families = polynomial_families(&algebra, &terms, &n_sets);
    let c_propto = propto_blocks(&c, &terms, &families, &all, &all);
    let pc = |id: usize| c_propto[s0][to_c[id] as usize];
    let zero_propto_z = pc(constants[0]) == pc(zid);
    let constants_pairwise_not_propto = (0..4).all(|i| (0..i).all(|j| pc(constants[i]) != pc(constants[j])));

    Ok(Construction {
        algebra,
        terms,
        left,
        right,
        q,
        generators,
        a,
        b,
        z,
        free,
        in_f,
        separating,
        fprime,
        local,
        theta_pairs: pairs.len(),
        c,
        to_c,
        constants,
        n_sets,
        families,
        c_propto,
        checks: ConstructionChecks {
            f_embeds: true,
            z_isolated: true,
            constants_distinct,
            zero_propto_z,
            constants_pairwise_not_propto,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suit {
    Clubs,
    Spades,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    /// The constant point at generator `x`.
    Diagonal(usize),
    Red(usize),
    Blue(usize),
    /// Edge index and the extra coordinate carrying `z`.
    Edge(usize, Suit),
}

impl GenKind {
    pub fn is_diagonal(&self) -> bool {
        matches!(self, GenKind::Diagonal(_))
    }
}

/// The subpower `D(G) ≤ C^Γ`, with `Γ` ordered reds, blues, ♣, ♠.
#[derive(Clone, Debug)]
pub struct DAlgebra {
    pub gamma: usize,
    pub sorts: Vec<usize>,
    pub points: Vec<Vec<SElem>>,
    /// Generator kinds and their element ids.
    pub generators: Vec<(GenKind, usize)>,
    /// Whether some term that is not right-invertible produces the element.
    pub nonri_image: Vec<bool>,
    index: Vec<FxHashMap<Vec<SElem>, usize>>,
}

impl DAlgebra {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, sort: usize, point: &[SElem]) -> Option<usize> {
        self.index[sort].get(point).copied()
    }

    pub fn is_diagonal(&self, id: usize) -> bool {
        self.points[id].windows(2).all(|w| w[0] == w[1])
    }

    fn insert(&mut self, sort: usize, point: Vec<SElem>, limits: &Limits) -> Result<usize> {
        if let Some(&id) = self.index[sort].get(&point) {
            return Ok(id);
        }
        if self.points.len() >= limits.max_elements {
            return Err(Error::ResourceLimit(format!("more than {} points", limits.max_elements)));
        }
        let id = self.points.len();
        self.index[sort].insert(point.clone(), id);
        self.points.push(point);
        self.sorts.push(sort);
        self.nonri_image.push(false);
        Ok(id)
    }
}

/// Generate `D(G)`. Every element is a member of the term set applied to
/// distinct generators, so one pass over those applications is the whole
/// subpower, and records which elements are images of terms that are not
/// right-invertible.
pub fn build_d(cons: &Construction, graph: &BipartiteGraph, limits: &Limits) -> Result<DAlgebra> {
    let (r, bl) = (graph.reds(), graph.blues());
    let gamma = r + bl + 2;
    let clubs = r + bl;
    let spades = clubs + 1;
    let c = &cons.c;
    let mut d = DAlgebra {
        gamma,
        sorts: Vec::new(),
        points: Vec::new(),
        generators: Vec::new(),
        nonri_image: Vec::new(),
        index: vec![FxHashMap::default(); c.sort_count()],
    };
    let gc = |g: usize| cons.generator_c(g);
    let konst = |k: usize| cons.to_c[cons.constants[k]];
    let s0 = cons.zero_sort();

    let mut gens: Vec<(GenKind, usize, Vec<SElem>)> = Vec::new();
    for x in 0..cons.z {
        gens.push((GenKind::Diagonal(x), cons.generators[x], vec![gc(x); gamma]));
    }
    for v in 0..r {
        let mut p = vec![gc(cons.a[0]); gamma];
        p[v] = gc(cons.a[1]);
        gens.push((GenKind::Red(v), cons.generators[cons.a[0]], p));
    }
    for w in 0..bl {
        let mut p = vec![gc(cons.b[0]); gamma];
        p[r + w] = gc(cons.b[1]);
        gens.push((GenKind::Blue(w), cons.generators[cons.b[0]], p));
    }
    for (e, &(v, w)) in graph.edges().iter().enumerate() {
        for (suit, at) in [(Suit::Clubs, clubs), (Suit::Spades, spades)] {
            let mut p = vec![konst(0); gamma];
            p[v] = konst(2);
            p[r + w] = konst(1);
            p[at] = gc(cons.z);
            gens.push((GenKind::Edge(e, suit), s0, p));
        }
    }
    for (kind, s, p) in &gens {
        let id = d.insert(*s, p.clone(), limits)?;
        d.generators.push((*kind, id));
    }

    let by_sort: Vec<Vec<usize>> = (0..c.sort_count())
        .map(|s| (0..gens.len()).filter(|&g| gens[g].1 == s).collect())
        .collect();
    let mut tried = 0usize;
    for (m, t) in cons.terms.members.iter().enumerate() {
        let pools: Vec<&Vec<usize>> = t.inputs.iter().map(|&s| &by_sort[s]).collect();
        if pools.iter().any(|p| p.is_empty()) {
            continue;
        }
        let pdims: Vec<usize> = pools.iter().map(|p| p.len()).collect();
        let mut pick = vec![0usize; pools.len()];
        let mut args = vec![0 as SElem; t.term_arity()];
        loop {
            let chosen: Vec<usize> = pools.iter().zip(&pick).map(|(p, &k)| p[k]).collect();
            let distinct = chosen.iter().enumerate().all(|(i, g)| !chosen[..i].contains(g));
            if distinct {
                tried += 1;
                if tried > limits.max_tables {
                    return Err(Error::ResourceLimit(format!("more than {} term applications", limits.max_tables)));
                }
                let point: Vec<SElem> = (0..gamma)
                    .map(|i| {
                        for (a, &g) in args.iter_mut().zip(&chosen) {
                            *a = gens[g].2[i];
                        }
                        t.eval_in(c, &args)
                    })
                    .collect();
                let id = d.insert(t.output, point, limits)?;
                if !cons.right[m] {
                    d.nonri_image[id] = true;
                }
            }
            if !util::advance(&mut pick, &pdims) {
                break;
            }
        }
    }
    Ok(d)
}

/// The definable relations on `D(G)`.
#[derive(Clone, Debug)]
pub struct Relations {
    /// `∝` class of every element, computed in `D` itself.
    pub propto: Vec<usize>,
    /// `∝` class computed coordinatewise in `C`.
    pub propto_stalkwise: Vec<usize>,
    /// `down[y]`: the elements `x ≤ y`, sorted.
    pub down: Vec<Vec<usize>>,
    pub nrinv: Vec<bool>,
    pub gen: Vec<bool>,
    /// Least element of the `∼` class, for members of `GEN`.
    pub sim_rep: Vec<Option<usize>>,
    pub edgegen: Vec<bool>,
    pub vertexgen: Vec<bool>,
    /// Pairs of `∼` representatives of `VERTEXGEN` related by `EDGE`.
    pub edge: Vec<(usize, usize)>,
}

impl Relations {
    pub fn le(&self, x: usize, y: usize) -> bool {
        self.down[y].binary_search(&x).is_ok()
    }

    pub fn sim(&self, x: usize, y: usize) -> bool {
        self.le(x, y) && self.le(y, x)
    }
}

fn intern(keys: impl Iterator<Item = (usize, Vec<u32>)>) -> Vec<usize> {
    let mut ids: FxHashMap<(usize, Vec<u32>), usize> = FxHashMap::default();
    keys.map(|k| {
        let n = ids.len();
        *ids.entry(k).or_insert(n)
    })
    .collect()
}

fn apply_pointwise(cons: &Construction, d: &DAlgebra, m: usize, args: &[&[SElem]]) -> Result<usize> {
    let t = &cons.terms.members[m];
    let mut buf = vec![0 as SElem; t.term_arity()];
    let point: Vec<SElem> = (0..d.gamma)
        .map(|i| {
            for (b, a) in buf.iter_mut().zip(args) {
                *b = a[i];
            }
            t.eval_in(&cons.c, &buf)
        })
        .collect();
    d.position(t.output, &point)
        .ok_or_else(|| Error::ClosureFailure(format!("{} leaves D", t.term)))
}

/// `∝` on `D` where parameters range over `D` itself: coordinate by
/// coordinate, with parameters from the projection of `D` there. Blocks are
/// computed on all of `C` once per distinct projection.
fn propto_direct(cons: &Construction, d: &DAlgebra) -> Vec<usize> {
    let sorts = cons.c.sort_count();
    let all: Vec<Vec<SElem>> = cons.c.sizes().iter().map(|&n| (0..n as SElem).collect()).collect();
    let mut memo: FxHashMap<Vec<Vec<SElem>>, Vec<Vec<u32>>> = FxHashMap::default();
    memo.insert(all.clone(), cons.c_propto.clone());
    let mut per: Vec<Vec<u32>> = vec![Vec::with_capacity(d.gamma); d.len()];
    for i in 0..d.gamma {
        let mut params: Vec<Vec<SElem>> = vec![Vec::new(); sorts];
        for (p, &s) in d.points.iter().zip(&d.sorts) {
            params[s].push(p[i]);
        }
        for e in params.iter_mut() {
            e.sort_unstable();
            e.dedup();
        }
        let blocks = memo
            .entry(params)
            .or_insert_with_key(|params| propto_blocks(&cons.c, &cons.terms, &cons.families, params, &all));
        for (id, (p, &s)) in d.points.iter().zip(&d.sorts).enumerate() {
            per[id].push(blocks[s][p[i] as usize]);
        }
    }
    intern(d.sorts.iter().copied().zip(per))
}

pub fn relations(cons: &Construction, d: &DAlgebra) -> Result<Relations> {
    let n = d.len();
    let propto = propto_direct(cons, d);
    let propto_stalkwise = intern(d.points.iter().zip(&d.sorts).map(|(p, &s)| {
        (s, p.iter().map(|&v| cons.c_propto[s][v as usize]).collect())
    }));

    let unary: Vec<usize> = (0..cons.terms.len()).filter(|&m| cons.terms.members[m].arity() == 1).collect();
    let mut down: Vec<Vec<usize>> = Vec::with_capacity(n);
    for y in 0..n {
        let mut xs = Vec::new();
        for &u in &unary {
            if cons.terms.members[u].inputs[0] == d.sorts[y] {
                xs.push(apply_pointwise(cons, d, u, &[&d.points[y]])?);
            }
        }
        xs.sort_unstable();
        xs.dedup();
        down.push(xs);
    }
    let le = |x: usize, y: usize| down[y].binary_search(&x).is_ok();

    let nrinv: Vec<bool> = (0..n).map(|x| !d.is_diagonal(x) && !d.nonri_image[x]).collect();
    let mut dominated = vec![false; n];
    for y in (0..n).filter(|&y| nrinv[y]) {
        for &x in &down[y] {
            if nrinv[x] && !le(y, x) {
                dominated[x] = true;
            }
        }
    }
    let gen: Vec<bool> = (0..n).map(|x| nrinv[x] && !dominated[x]).collect();
    let sim_rep: Vec<Option<usize>> = (0..n)
        .map(|x| gen[x].then(|| down[x].iter().copied().filter(|&y| gen[y] && le(x, y)).min().unwrap_or(x).min(x)))
        .collect();

    let mut by_propto: FxHashMap<usize, BTreeSet<usize>> = FxHashMap::default();
    for x in (0..n).filter(|&x| gen[x]) {
        by_propto.entry(propto[x]).or_default().insert(sim_rep[x].unwrap());
    }
    let mut edge_reps = BTreeSet::new();
    for reps in by_propto.values() {
        if reps.len() >= 2 {
            edge_reps.extend(reps.iter().copied());
        }
    }
    let edgegen: Vec<bool> = (0..n).map(|x| sim_rep[x].is_some_and(|r| edge_reps.contains(&r))).collect();
    let vertexgen: Vec<bool> = (0..n).map(|x| gen[x] && !edgegen[x]).collect();

    let edge_props: BTreeSet<usize> = (0..n).filter(|&w| edgegen[w]).map(|w| propto[w]).collect();
    let mut classes: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in (0..n).filter(|&x| vertexgen[x]) {
        classes.entry(sim_rep[x].unwrap()).or_default().push(x);
    }
    let q = &cons.terms.members[cons.q.member];
    let mut edge = Vec::new();
    for (&kx, xs) in &classes {
        for (&ky, ys) in &classes {
            let related = xs.iter().any(|&x| {
                d.sorts[x] == q.inputs[0]
                    && ys.iter().any(|&y| {
                        d.sorts[y] == q.inputs[1] && {
                            let point: Vec<SElem> =
                                (0..d.gamma).map(|i| cons.star(d.points[x][i], d.points[y][i])).collect();
                            d.position(q.output, &point).is_some_and(|s| edge_props.contains(&propto[s]))
                        }
                    })
            });
            if related {
                edge.push((kx, ky));
            }
        }
    }
    Ok(Relations {
        propto,
        propto_stalkwise,
        down,
        nrinv,
        gen,
        sim_rep,
        edgegen,
        vertexgen,
        edge,
    })
}

/// Read the graph back off the relations: red vertices are first
/// arguments of `EDGE`, blue ones second arguments.
pub fn recover_graph(rel: &Relations) -> Option<(BipartiteGraph, Vec<usize>, Vec<usize>)> {
    let reds: Vec<usize> = rel.edge.iter().map(|e| e.0).collect::<BTreeSet<_>>().into_iter().collect();
    let blues: Vec<usize> = rel.edge.iter().map(|e| e.1).collect::<BTreeSet<_>>().into_iter().collect();
    let vertex_classes: BTreeSet<usize> = rel.sim_rep.iter().zip(&rel.vertexgen).filter(|(_, &v)| v).map(|(r, _)| r.unwrap()).collect();
    if reds.iter().any(|r| blues.contains(r)) || reds.len() + blues.len() != vertex_classes.len() {
        return None;
    }
    let edges = rel
        .edge
        .iter()
        .map(|&(x, y)| (reds.binary_search(&x).unwrap(), blues.binary_search(&y).unwrap()))
        .collect();
    BipartiteGraph::new(reds.len(), blues.len(), edges).ok().map(|g| (g, reds, blues))
}

/// Structural facts about `D(G)` that the recovery relies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DChecks {
    pub generators_in_nrinv: bool,
    pub gen_classes_are_generators: bool,
    pub edgegen_is_edge_type: bool,
    pub propto_stalkwise: bool,
    pub propto_preserved: bool,
}

pub fn check_d(cons: &Construction, d: &DAlgebra, rel: &Relations) -> Result<DChecks> {
    let offdiag: Vec<(GenKind, usize)> = d.generators.iter().copied().filter(|(k, _)| !k.is_diagonal()).collect();
    let generators_in_nrinv = offdiag.iter().all(|&(_, id)| rel.nrinv[id]);
    let gen_reps: BTreeSet<usize> = rel.sim_rep.iter().flatten().copied().collect();
    let gen_of: BTreeSet<Option<usize>> = offdiag.iter().map(|&(_, id)| rel.sim_rep[id]).collect();
    let gen_classes_are_generators =
        !gen_of.contains(&None) && gen_of.len() == offdiag.len() && gen_of.len() == gen_reps.len();
    let edgegen_is_edge_type = offdiag
        .iter()
        .all(|&(k, id)| rel.edgegen[id] == matches!(k, GenKind::Edge(..)));
    let propto_stalkwise = {
        let mut fwd: FxHashMap<usize, usize> = FxHashMap::default();
        let mut back: FxHashMap<usize, usize> = FxHashMap::default();
        rel.propto.iter().zip(&rel.propto_stalkwise).all(|(&a, &b)| {
            *fwd.entry(a).or_insert(b) == b && *back.entry(b).or_insert(a) == a
        })
    };
    // Right-invertible unary terms send ∝-related pairs to ∝-related pairs.
    let mut classes: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
    for (id, &p) in rel.propto.iter().enumerate() {
        classes.entry(p).or_default().push(id);
    }
    let mut propto_preserved = true;
    for (m, t) in cons.terms.members.iter().enumerate() {
        if t.arity() != 1 || !cons.right[m] {
            continue;
        }
        for members in classes.values() {
            if d.sorts[members[0]] != t.inputs[0] {
                continue;
            }
            let images: Result<Vec<usize>> =
                members.iter().map(|&x| apply_pointwise(cons, d, m, &[&d.points[x]])).collect();
            let images = images?;
            if images.iter().any(|&y| rel.propto[y] != rel.propto[images[0]]) {
                propto_preserved = false;
            }
        }
    }
    Ok(DChecks {
        generators_in_nrinv,
        gen_classes_are_generators,
        edgegen_is_edge_type,
        propto_stalkwise,
        propto_preserved,
    })
}

#[derive(Clone, Debug)]
pub struct InterpretationReport {
    pub f_size: usize,
    pub fprime_size: usize,
    pub c_size: usize,
    pub d_size: usize,
    pub q: String,
    pub constants: [String; 4],
    pub nrinv: usize,
    pub gen: usize,
    pub edgegen: usize,
    pub vertexgen: usize,
    pub edge_pairs: usize,
    pub construction: ConstructionChecks,
    pub d_checks: DChecks,
    pub recovered: Option<BipartiteGraph>,
    /// Input red and blue vertices to recovered ones.
    pub isomorphism: Option<(Vec<usize>, Vec<usize>)>,
}

impl InterpretationReport {
    pub fn isomorphic(&self) -> bool {
        self.isomorphism.is_some()
    }
}

/// The whole pipeline for one graph.
pub fn interpret(cons: &Construction, graph: &BipartiteGraph, limits: &Limits) -> Result<InterpretationReport> {
    let d = build_d(cons, graph, limits)?;
    let rel = relations(cons, &d)?;
    let d_checks = check_d(cons, &d, &rel)?;
    let recovered = recover_graph(&rel).map(|(g, _, _)| g);
    let isomorphism = recovered.as_ref().and_then(|g| graph.isomorphism_to(g));
    let count = |v: &[bool]| v.iter().filter(|&&x| x).count();
    Ok(InterpretationReport {
        f_size: cons.f_size(),
        fprime_size: cons.free.len(),
        c_size: cons.c_size(),
        d_size: d.len(),
        q: cons.terms.members[cons.q.member].term.to_string(),
        constants: cons.constants.map(|c| cons.free.term(&cons.terms, c).to_string()),
        nrinv: count(&rel.nrinv),
        gen: count(&rel.gen),
        edgegen: count(&rel.edgegen),
        vertexgen: count(&rel.vertexgen),
        edge_pairs: rel.edge.len(),
        construction: cons.checks,
        d_checks,
        recovered,
        isomorphism,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxmap::{self, Coordinatization};
    use crate::congruence::Congruence;
    use crate::examples::{d4, w8, w8_shifted};
    use std::sync::OnceLock;

    fn lim() -> Limits {
        Limits::default()
    }

    fn flat(alg: &crate::algebra::FiniteAlgebra, tau: &Congruence) -> SortedAlgebra {
        let report = boxmap::analyze(alg, tau, None, None, &lim()).unwrap();
        let coords: Vec<Coordinatization> = report.classes.iter().map(|c| c.coordinatization.clone()).collect();
        sorted::build_frzflt(&coords, &report.boxmaps).unwrap().algebra
    }

    fn w8_construction() -> &'static Construction {
        static CACHE: OnceLock<Construction> = OnceLock::new();
        CACHE.get_or_init(|| build_construction(&flat(&w8(), &Congruence::total(8)), &lim()).unwrap())
    }

    fn shifted_construction() -> &'static Construction {
        static CACHE: OnceLock<Construction> = OnceLock::new();
        CACHE.get_or_init(|| build_construction(&flat(&w8_shifted(), &Congruence::total(8)), &lim()).unwrap())
    }

    fn element(d: &DAlgebra, kind: GenKind) -> usize {
        d.generators.iter().find(|(k, _)| *k == kind).unwrap().1
    }

    #[test]
    fn graph_validation() {
        assert!(BipartiteGraph::new(1, 1, vec![(0, 0)]).is_ok());
        assert!(matches!(BipartiteGraph::new(2, 1, vec![(0, 0)]), Err(Error::InvalidGraph(_))));
        assert!(matches!(BipartiteGraph::new(0, 0, vec![]), Err(Error::InvalidGraph(_))));
        assert!(matches!(BipartiteGraph::new(1, 1, vec![(0, 1)]), Err(Error::InvalidGraph(_))));
        assert!(matches!(BipartiteGraph::new(1, 1, vec![(0, 0), (0, 0)]), Err(Error::InvalidGraph(_))));
        assert_eq!(BipartiteGraph::all_up_to(2).len(), 1);
        assert_eq!(BipartiteGraph::all_up_to(4).len(), 12);
    }

    #[test]
    fn isomorphism_search() {
        let g = BipartiteGraph::new(2, 1, vec![(0, 0), (1, 0)]).unwrap();
        let h = BipartiteGraph::new(2, 2, vec![(0, 0), (1, 1)]).unwrap();
        let k = BipartiteGraph::new(2, 2, vec![(1, 1), (0, 0)]).unwrap();
        assert!(g.isomorphism_to(&g).is_some());
        assert!(g.isomorphism_to(&h).is_none());
        assert!(h.isomorphism_to(&k).is_some());
        let p = BipartiteGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 1)]).unwrap();
        assert!(p.isomorphism_to(&h).is_none());
    }

    #[test]
    fn d4_is_not_applicable() {
        let f = flat(&d4(), &Congruence::total(4));
        assert!(matches!(build_construction(&f, &lim()), Err(Error::EssentiallyUnary)));
    }

    #[test]
    fn families_decide_propto_like_the_full_n_sets() {
        for cons in [w8_construction(), shifted_construction()] {
            let s0 = cons.zero_sort();
            assert!(cons.families[s0].len() < cons.n_sets[s0].len());
            let n = cons.c.size(s0) as SElem;
            for a in (0..n).step_by(7) {
                for b in 0..n {
                    let same = cons.c_propto[s0][a as usize] == cons.c_propto[s0][b as usize];
                    assert_eq!(same, cons.propto_literal(s0, a, b), "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn w8_constants_collapse_under_propto() {
        // Every W8 term reads only the first bit of each argument, so the
        // constants are told apart by `a` alone.
        let cons = w8_construction();
        assert!(cons.checks.f_embeds && cons.checks.z_isolated && cons.checks.constants_distinct);
        assert!(cons.checks.zero_propto_z);
        assert!(!cons.checks.constants_pairwise_not_propto);
        assert_eq!(cons.free.len(), 222);
        assert_eq!(cons.f_size(), 130);
        let s0 = cons.zero_sort();
        let k = |i: usize| cons.to_c[cons.constants[i]];
        assert!(cons.propto_literal(s0, k(0), k(1)));
        assert!(cons.propto_literal(s0, k(2), k(3)));
        assert!(!cons.propto_literal(s0, k(0), k(2)));
        assert!(cons.propto_literal(s0, k(0), cons.generator_c(cons.z)));
        let g = BipartiteGraph::new(1, 1, vec![(0, 0)]).unwrap();
        let r = interpret(cons, &g, &lim()).unwrap();
        assert!(!r.isomorphic());
        assert!(!r.d_checks.edgegen_is_edge_type);
    }

    #[test]
    fn shifted_construction_integrity() {
        let cons = shifted_construction();
        assert_eq!(
            cons.checks,
            ConstructionChecks {
                f_embeds: true,
                z_isolated: true,
                constants_distinct: true,
                zero_propto_z: true,
                constants_pairwise_not_propto: true,
            }
        );
        let s0 = cons.zero_sort();
        let k = |i: usize| cons.to_c[cons.constants[i]];
        for i in 0..4 {
            for j in 0..i {
                assert!(!cons.propto_literal(s0, k(i), k(j)));
            }
        }
        assert!(cons.propto_literal(s0, k(0), cons.generator_c(cons.z)));
    }

    #[test]
    fn shifted_recovers_small_graphs() {
        let cons = shifted_construction();
        for g in [
            BipartiteGraph::new(1, 1, vec![(0, 0)]).unwrap(),
            BipartiteGraph::new(2, 1, vec![(0, 0), (1, 0)]).unwrap(),
            BipartiteGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap(),
            BipartiteGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 1)]).unwrap(),
        ] {
            let r = interpret(cons, &g, &lim()).unwrap();
            assert!(r.isomorphic(), "{g}: {r:?}");
            assert_eq!(
                r.d_checks,
                DChecks {
                    generators_in_nrinv: true,
                    gen_classes_are_generators: true,
                    edgegen_is_edge_type: true,
                    propto_stalkwise: true,
                    propto_preserved: true,
                }
            );
            assert_eq!(r.edge_pairs, g.edges().len());
        }
    }

    #[test]
    fn order_and_propto_on_generators() {
        let cons = shifted_construction();
        let g = BipartiteGraph::new(2, 1, vec![(0, 0), (1, 0)]).unwrap();
        let d = build_d(cons, &g, &lim()).unwrap();
        let rel = relations(cons, &d).unwrap();
        for y in 0..d.len() {
            assert!(rel.le(y, y));
            for &x in &rel.down[y] {
                for &w in &rel.down[x] {
                    assert!(rel.le(w, y));
                }
            }
        }
        let red = element(&d, GenKind::Red(0));
        let clubs = element(&d, GenKind::Edge(0, Suit::Clubs));
        let spades = element(&d, GenKind::Edge(0, Suit::Spades));
        assert!(!rel.le(red, clubs));
        assert!(!rel.le(clubs, red));
        assert_eq!(rel.propto[clubs], rel.propto[spades]);
        assert_ne!(rel.propto[clubs], rel.propto[element(&d, GenKind::Edge(1, Suit::Clubs))]);
        // the missing pair of vertices is not an edge
        assert!(!rel.edge.iter().any(|&(x, y)| x == y));
    }

    #[test]
    fn edge_points_differ_only_at_suits() {
        let cons = shifted_construction();
        let g = BipartiteGraph::new(1, 2, vec![(0, 0), (0, 1)]).unwrap();
        let d = build_d(cons, &g, &lim()).unwrap();
        let (c, s) = (element(&d, GenKind::Edge(1, Suit::Clubs)), element(&d, GenKind::Edge(1, Suit::Spades)));
        let diff: Vec<usize> = (0..d.gamma).filter(|&i| d.points[c][i] != d.points[s][i]).collect();
        assert_eq!(diff, vec![d.gamma - 2, d.gamma - 1]);
        assert_eq!(d.generators.len(), cons.z + 1 + 2 + 4);
    }
}
