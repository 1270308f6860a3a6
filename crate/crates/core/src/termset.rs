//! A finite set of sorted terms representing every term operation of a
//! strongly abelian sorted algebra up to renaming of variables, and the
//! invertibility analysis built on it.

use std::collections::HashMap;
use std::fmt;

use crate::algebra::{Limits, Term};
use crate::congruence::TcKind;
use crate::error::{Error, Result};
use crate::sorted::{self, CompiledTerm, SElem, SortedAlgebra};
use crate::util;

/// A term operation depending on all of its variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedTermOp {
    pub inputs: Vec<usize>,
    pub output: usize,
    pub table: Vec<SElem>,
    /// Variables `v0..v{n-1}` are the inputs; higher variables, if any,
    /// occur only inessentially and may be given any value.
    pub term: Term,
    compiled: CompiledTerm,
}

impl SortedTermOp {
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    pub fn dims(&self, alg: &SortedAlgebra) -> Vec<usize> {
        alg.dims(&self.inputs)
    }

    pub fn value(&self, alg: &SortedAlgebra, args: &[SElem]) -> SElem {
        let mut idx = 0usize;
        for (&a, &s) in args.iter().zip(&self.inputs) {
            idx = idx * alg.size(s) + a as usize;
        }
        self.table[idx]
    }

    /// Number of variables the term mentions, inessential ones included.
    pub fn term_arity(&self) -> usize {
        self.term.var_bound().max(self.arity())
    }

    /// Evaluate the term in another algebra of the same signature. Extra
    /// inessential variables are set to 0.
    pub fn eval_in(&self, other: &SortedAlgebra, args: &[SElem]) -> SElem {
        if self.term_arity() == args.len() {
            return self.compiled.eval(other, args);
        }
        let mut padded = args.to_vec();
        padded.resize(self.term_arity(), 0);
        self.compiled.eval(other, &padded)
    }

    pub fn is_identity(&self) -> bool {
        self.arity() == 1 && self.inputs[0] == self.output && self.table.iter().enumerate().all(|(i, &v)| v as usize == i)
    }
}

impl fmt::Display for SortedTermOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.term)
    }
}

/// Essential slots of a table over the carriers of `inputs`.
pub fn essential_slots_sorted(alg: &SortedAlgebra, inputs: &[usize], table: &[SElem]) -> Vec<usize> {
    util::essential_slots(table, &alg.dims(inputs))
}

/// Drop inessential slots, then order the rest stably by sort.
pub(crate) fn canonical(alg: &SortedAlgebra, inputs: &[usize], table: &[SElem]) -> (Vec<usize>, Vec<usize>, Vec<SElem>) {
    let dims = alg.dims(inputs);
    let mut keep = util::essential_slots(table, &dims);
    keep.sort_by_key(|&k| inputs[k]);
    let table = util::project_table(table, &dims, &keep);
    let ins = keep.iter().map(|&k| inputs[k]).collect();
    (keep, ins, table)
}

#[derive(Clone, Debug)]
pub struct TermSet {
    pub members: Vec<SortedTermOp>,
    /// Variables of each sort in the context the members were drawn from.
    pub vars_per_sort: usize,
    /// Whether a context with one more variable per sort produced nothing
    /// new; `None` if that context was too large to try.
    pub complete_at_next: Option<bool>,
    index: HashMap<(Vec<usize>, usize, Vec<SElem>), usize>,
}

impl TermSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member with exactly this typing and table, variables ordered by sort.
    pub fn lookup(&self, inputs: &[usize], output: usize, table: &[SElem]) -> Option<usize> {
        self.index.get(&(inputs.to_vec(), output, table.to_vec())).copied()
    }

    /// Canonicalize an arbitrary table and find the member it renames to.
    /// Returns the member and, for each of its slots, the original slot.
    pub fn find(&self, alg: &SortedAlgebra, inputs: &[usize], output: usize, table: &[SElem]) -> Option<(usize, Vec<usize>)> {
        let (keep, ins, t) = canonical(alg, inputs, table);
        self.lookup(&ins, output, &t).map(|m| (m, keep))
    }
}

fn context_for(alg: &SortedAlgebra, per_sort: usize) -> Vec<usize> {
    (0..alg.sort_count()).flat_map(|s| std::iter::repeat(s).take(per_sort)).collect()
}

fn minimized_members(alg: &SortedAlgebra, context: &[usize], limits: &Limits) -> Result<Vec<SortedTermOp>> {
    let clone = sorted::sorted_clone(alg, context, limits)?;
    let mut out = Vec::new();
    for id in 0..clone.count() {
        let table = &clone.elems[id];
        let (keep, inputs, t) = canonical(alg, context, table);
        // Rename kept context variables to 0..n; inessential ones go to a
        // kept variable of the same sort when there is one, else above n.
        let mut map: Vec<Term> = Vec::with_capacity(context.len());
        let mut spare = keep.len();
        for (g, &s) in context.iter().enumerate() {
            if let Some(p) = keep.iter().position(|&k| k == g) {
                map.push(Term::var(p));
            } else if let Some(p) = keep.iter().position(|&k| context[k] == s) {
                map.push(Term::var(p));
            } else {
                map.push(Term::var(spare));
                spare += 1;
            }
        }
        let term = clone.witness(alg, id).substitute(&map);
        let compiled = CompiledTerm::compile(alg, &term)?;
        out.push(SortedTermOp {
            inputs,
            output: clone.sorts[id],
            table: t,
            term,
            compiled,
        });
    }
    Ok(out)
}

/// Every term operation of a strongly abelian sorted algebra, each
/// represented once per typing and variable order. The algebra must be
/// strongly abelian; this is verified on the members, along with the
/// essential-arity bound that makes the set finite.
pub fn sorted_term_operations(alg: &SortedAlgebra, limits: &Limits) -> Result<TermSet> {
    let per_sort = alg.sizes().iter().map(|&n| util::floor_log2(n)).max().unwrap_or(0).max(1);
    let context = context_for(alg, per_sort);
    let mut members = Vec::new();
    let mut index = HashMap::new();
    for m in minimized_members(alg, &context, limits)? {
        let key = (m.inputs.clone(), m.output, m.table.clone());
        if index.contains_key(&key) {
            continue;
        }
        let dims = m.dims(alg);
        for row in 0..m.arity() {
            if !sorted::row_condition_holds(&m.table, &dims, row, TcKind::Strong) {
                return Err(Error::NotStronglyAbelian(format!("{} fails the strong term condition at v{row}", m.term)));
            }
        }
        if m.arity() > util::floor_log2(alg.size(m.output)) {
            return Err(Error::NotStronglyAbelian(format!(
                "{} depends on {} variables but its sort has {} elements",
                m.term,
                m.arity(),
                alg.size(m.output)
            )));
        }
        index.insert(key, members.len());
        members.push(m);
    }
    let mut ts = TermSet {
        members,
        vars_per_sort: per_sort,
        complete_at_next: None,
        index,
    };
    let next = context_for(alg, per_sort + 1);
    if util::checked_box_size(&alg.dims(&next)).is_some_and(|n| n <= 1 << 10) {
        ts.complete_at_next = Some(verify_complete(alg, &ts, limits)?);
    }
    Ok(ts)
}

/// Recompute with one more variable per sort and confirm nothing new
/// appears. Anything new would break the arity bound, so a failure is
/// reported as a failure of strong abelianness.
pub fn verify_complete(alg: &SortedAlgebra, ts: &TermSet, limits: &Limits) -> Result<bool> {
    let next = context_for(alg, ts.vars_per_sort + 1);
    for m in minimized_members(alg, &next, limits)? {
        if ts.lookup(&m.inputs, m.output, &m.table).is_none() {
            return Err(Error::NotStronglyAbelian(format!(
                "{} depends on {} variables into a sort of {} elements",
                m.term,
                m.arity(),
                alg.size(m.output)
            )));
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnaryVerdict {
    Unary,
    /// Index of a member depending on two or more variables.
    NotUnary(usize),
}

/// Essentially unary iff no member depends on two variables. The witness is
/// the first member of greatest essential arity.
pub fn is_essentially_unary_algebra(ts: &TermSet) -> UnaryVerdict {
    let best = ts
        .members
        .iter()
        .enumerate()
        .filter(|(_, m)| m.arity() >= 2)
        .fold(None::<(usize, usize)>, |acc, (i, m)| match acc {
            Some((_, a)) if a >= m.arity() => acc,
            _ => Some((i, m.arity())),
        });
    match best {
        Some((i, _)) => UnaryVerdict::NotUnary(i),
        None => UnaryVerdict::Unary,
    }
}

/// A left inverse: `member` with `t` plugged into slot `slot`, fresh
/// variables elsewhere, returns the chosen variable of `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeftInverse {
    pub member: usize,
    pub slot: usize,
}

/// Search `ts` for `r` with `r(.., t(v), ..) = v_slot` identically.
pub fn left_inverse(alg: &SortedAlgebra, ts: &TermSet, t: &SortedTermOp, slot: usize) -> Option<LeftInverse> {
    let want = t.inputs[slot];
    let tdims = t.dims(alg);
    for (ri, r) in ts.members.iter().enumerate() {
        if r.output != want {
            continue;
        }
        'slot: for q in 0..r.arity() {
            if r.inputs[q] != t.output {
                continue;
            }
            let rdims = r.dims(alg);
            let mut odims = rdims.clone();
            odims[q] = 1;
            let mut x = vec![0usize; tdims.len()];
            let mut args = vec![0 as SElem; r.arity()];
            loop {
                let y = t.table[util::index_of_usize(&x, &tdims)];
                let mut w = vec![0usize; odims.len()];
                loop {
                    for (k, a) in args.iter_mut().enumerate() {
                        *a = if k == q { y } else { w[k] as SElem };
                    }
                    if r.value(alg, &args) as usize != x[slot] {
                        continue 'slot;
                    }
                    if !util::advance(&mut w, &odims) {
                        break;
                    }
                }
                if !util::advance(&mut x, &tdims) {
                    break;
                }
            }
            return Some(LeftInverse { member: ri, slot: q });
        }
    }
    None
}

/// Left-invertibility of every member at every slot.
pub fn left_inverse_table(alg: &SortedAlgebra, ts: &TermSet) -> Vec<Vec<Option<LeftInverse>>> {
    ts.members
        .iter()
        .map(|t| (0..t.arity()).map(|p| left_inverse(alg, ts, t, p)).collect())
        .collect()
}

/// Elements of a free algebra, as term operations over its generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    pub sort: usize,
    /// Generators the element depends on, increasing.
    pub vars: Vec<usize>,
    /// Table over the carriers of `vars`.
    pub table: Vec<SElem>,
}

/// The free algebra of the variety on sorted generators, each element a
/// canonical form obtained by renaming a member of the term set.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    pub generators: Vec<usize>,
    pub forms: Vec<Form>,
    /// A member and generator tuple producing each form.
    pub origins: Vec<(usize, Vec<usize>)>,
    generator_ids: Vec<usize>,
    index: HashMap<Form, usize>,
}

impl FreeAlgebra {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn position(&self, f: &Form) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// Value of a form under an assignment of all generators.
    pub fn value(&self, alg: &SortedAlgebra, id: usize, assignment: &[SElem]) -> SElem {
        let f = &self.forms[id];
        let mut idx = 0usize;
        for &g in &f.vars {
            idx = idx * alg.size(self.generators[g]) + assignment[g] as usize;
        }
        f.table[idx]
    }

    /// Element id of generator `g`.
    pub fn generator(&self, g: usize) -> usize {
        self.generator_ids[g]
    }

    /// A term over the generators for element `id`.
    pub fn term(&self, ts: &TermSet, id: usize) -> Term {
        let (m, gens) = &self.origins[id];
        let map: Vec<Term> = (0..ts.members[*m].term_arity())
            .map(|k| Term::var(gens.get(k).copied().unwrap_or(gens.first().copied().unwrap_or(0))))
            .collect();
        ts.members[*m].term.substitute(&map)
    }

    /// Which elements avoid generator `g`.
    pub fn avoiding(&self, g: usize) -> Vec<bool> {
        self.forms.iter().map(|f| !f.vars.contains(&g)).collect()
    }
}

/// Compose a member with a tuple of generators and bring the result into
/// canonical form.
pub fn compose_form(alg: &SortedAlgebra, generators: &[usize], m: &SortedTermOp, gens: &[usize]) -> Form {
    let mut vars: Vec<usize> = gens.to_vec();
    vars.sort_unstable();
    vars.dedup();
    let vdims: Vec<usize> = vars.iter().map(|&g| alg.size(generators[g])).collect();
    let pos: Vec<usize> = gens.iter().map(|g| vars.binary_search(g).unwrap()).collect();
    let total = util::box_size(&vdims);
    let mut table = Vec::with_capacity(total);
    let mut a = vec![0usize; vars.len()];
    let mut args = vec![0 as SElem; m.arity()];
    for _ in 0..total {
        for (x, &p) in args.iter_mut().zip(&pos) {
            *x = a[p] as SElem;
        }
        table.push(m.value(alg, &args));
        util::advance(&mut a, &vdims);
    }
    let keep = util::essential_slots(&table, &vdims);
    let table = util::project_table(&table, &vdims, &keep);
    Form {
        sort: m.output,
        vars: keep.iter().map(|&k| vars[k]).collect(),
        table,
    }
}

/// Build the free algebra on the given generator sorts by renaming every
/// member of the term set into the generators in every possible way.
pub fn free_algebra(alg: &SortedAlgebra, ts: &TermSet, generators: &[usize], limits: &Limits) -> Result<FreeAlgebra> {
    let mut fa = FreeAlgebra {
        generators: generators.to_vec(),
        forms: Vec::new(),
        origins: Vec::new(),
        generator_ids: Vec::new(),
        index: HashMap::new(),
    };
    let by_sort: Vec<Vec<usize>> = (0..alg.sort_count())
        .map(|s| (0..generators.len()).filter(|&g| generators[g] == s).collect())
        .collect();
    let insert = |fa: &mut FreeAlgebra, f: Form, origin: (usize, Vec<usize>)| -> Result<usize> {
        if let Some(&id) = fa.index.get(&f) {
            return Ok(id);
        }
        if fa.forms.len() >= limits.max_elements {
            return Err(Error::ResourceLimit(format!("more than {} elements", limits.max_elements)));
        }
        fa.index.insert(f.clone(), fa.forms.len());
        fa.forms.push(f);
        fa.origins.push(origin);
        Ok(fa.forms.len() - 1)
    };
    // Generators first, so that in the absence of singleton sorts
    // generator g is element g.
    for (g, &s) in generators.iter().enumerate() {
        let member = ts
            .members
            .iter()
            .position(|m| m.output == s && (m.is_identity() || m.arity() == 0 && alg.size(s) == 1))
            .ok_or_else(|| Error::ClosureFailure(format!("no projection onto sort {s}")))?;
        let args: &[usize] = if ts.members[member].arity() == 1 { &[g] } else { &[] };
        let f = compose_form(alg, generators, &ts.members[member], args);
        let id = insert(&mut fa, f, (member, vec![g]))?;
        fa.generator_ids.push(id);
    }
    let mut tried = 0usize;
    for mi in 0..ts.len() {
        let m = &ts.members[mi];
        let pools: Vec<&Vec<usize>> = m.inputs.iter().map(|&s| &by_sort[s]).collect();
        if pools.iter().any(|p| p.is_empty()) {
            continue;
        }
        let pdims: Vec<usize> = pools.iter().map(|p| p.len()).collect();
        let mut pick = vec![0usize; pools.len()];
        loop {
            tried += 1;
            if tried > limits.max_tables {
                return Err(Error::ResourceLimit(format!("more than {} renamings", limits.max_tables)));
            }
            let gens: Vec<usize> = pools.iter().zip(&pick).map(|(p, &k)| p[k]).collect();
            let f = compose_form(alg, generators, m, &gens);
            insert(&mut fa, f, (mi, gens))?;
            if !util::advance(&mut pick, &pdims) {
                break;
            }
        }
    }
    Ok(fa)
}

/// Right inverse of `t`: elements `s_k` of the free algebra on one variable
/// of the output sort plus one spare variable per sort, with
/// `t(s_1, .., s_n) = v0`. Returned as form ids of that free algebra.
pub fn right_inverse(
    alg: &SortedAlgebra,
    ts: &TermSet,
    t: &SortedTermOp,
    limits: &Limits,
) -> Result<Option<(FreeAlgebra, Vec<usize>)>> {
    let mut gens = vec![t.output];
    gens.extend(0..alg.sort_count());
    let fa = free_algebra(alg, ts, &gens, limits)?;
    let gdims: Vec<usize> = gens.iter().map(|&s| alg.size(s)).collect();
    let total = util::checked_box_size(&gdims)
        .filter(|&n| n <= limits.max_elements)
        .ok_or_else(|| Error::ResourceLimit("assignment space too large".into()))?;
    // Tables of every element over all assignments.
    let mut a = vec![0 as SElem; gens.len()];
    let mut au = vec![0usize; gens.len()];
    let mut full: Vec<Vec<SElem>> = vec![Vec::with_capacity(total); fa.len()];
    for _ in 0..total {
        for (x, &y) in a.iter_mut().zip(&au) {
            *x = y as SElem;
        }
        for (id, col) in full.iter_mut().enumerate() {
            col.push(fa.value(alg, id, &a));
        }
        util::advance(&mut au, &gdims);
    }
    let target: Vec<SElem> = {
        let mut v = Vec::with_capacity(total);
        let mut au = vec![0usize; gens.len()];
        for _ in 0..total {
            v.push(au[0] as SElem);
            util::advance(&mut au, &gdims);
        }
        v
    };
    let pools: Vec<Vec<usize>> = t
        .inputs
        .iter()
        .map(|&s| (0..fa.len()).filter(|&i| fa.forms[i].sort == s).collect())
        .collect();
    if t.arity() == 0 {
        return Ok((alg.size(t.output) == 1).then_some((fa, vec![])));
    }
    let pdims: Vec<usize> = pools.iter().map(Vec::len).collect();
    let space = util::checked_box_size(&pdims).unwrap_or(usize::MAX);
    if space > limits.max_tables {
        return Err(Error::ResourceLimit(format!("{space} candidate right inverses")));
    }
    let mut pick = vec![0usize; pools.len()];
    let mut args = vec![0 as SElem; t.arity()];
    loop {
        let chosen: Vec<usize> = pools.iter().zip(&pick).map(|(p, &k)| p[k]).collect();
        let ok = (0..total).all(|i| {
            for (x, &c) in args.iter_mut().zip(&chosen) {
                *x = full[c][i];
            }
            t.value(alg, &args) == target[i]
        });
        if ok {
            return Ok(Some((fa, chosen)));
        }
        if !util::advance(&mut pick, &pdims) {
            return Ok(None);
        }
    }
}

/// Right-invertibility of every member.
pub fn right_invertible_table(alg: &SortedAlgebra, ts: &TermSet, limits: &Limits) -> Result<Vec<bool>> {
    ts.members
        .iter()
        .map(|t| right_inverse(alg, ts, t, limits).map(|r| r.is_some()))
        .collect()
}

/// A member depending on at least two variables and left-invertible at
/// none of them, with the members visited on the way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryWitness {
    pub member: usize,
    pub path: Vec<usize>,
}

/// Start from the unarity witness; while the current member has a left
/// inverse `r` at some slot, replace that slot by `r` applied to a fresh
/// variable (spare variables of `r` become fresh variables too) and look
/// the result up again.
pub fn find_binary_noninvertible_term(alg: &SortedAlgebra, ts: &TermSet) -> Result<BinaryWitness> {
    let UnaryVerdict::NotUnary(mut cur) = is_essentially_unary_algebra(ts) else {
        return Err(Error::EssentiallyUnary);
    };
    let mut path = vec![cur];
    for _ in 0..=ts.len() {
        let t = &ts.members[cur];
        let found = (0..t.arity()).find_map(|p| left_inverse(alg, ts, t, p).map(|li| (p, li)));
        let Some((p, li)) = found else {
            return Ok(BinaryWitness { member: cur, path });
        };
        let r = &ts.members[li.member];
        // Variables of the new term: t's slots with p replaced by a variable
        // of t's output sort, followed by r's other slots.
        let mut inputs = t.inputs.clone();
        inputs[p] = t.output;
        let spare: Vec<usize> = (0..r.arity()).filter(|&k| k != li.slot).collect();
        inputs.extend(spare.iter().map(|&k| r.inputs[k]));
        let dims = alg.dims(&inputs);
        let total = util::box_size(&dims);
        let mut table = Vec::with_capacity(total);
        let mut x = vec![0usize; dims.len()];
        let mut rargs = vec![0 as SElem; r.arity()];
        let mut targs = vec![0 as SElem; t.arity()];
        for _ in 0..total {
            for (k, a) in rargs.iter_mut().enumerate() {
                *a = if k == li.slot {
                    x[p] as SElem
                } else {
                    x[t.arity() + spare.iter().position(|&s| s == k).unwrap()] as SElem
                };
            }
            for (k, a) in targs.iter_mut().enumerate() {
                *a = if k == p { r.value(alg, &rargs) } else { x[k] as SElem };
            }
            table.push(t.value(alg, &targs));
            util::advance(&mut x, &dims);
        }
        let (next, _) = ts.find(alg, &inputs, t.output, &table).ok_or_else(|| {
            Error::ClosureFailure(format!("substituting into {} left the term set", t.term))
        })?;
        if ts.members[next].arity() < 2 {
            return Err(Error::ClosureFailure(format!(
                "substituting into {} lost an essential variable",
                t.term
            )));
        }
        cur = next;
        path.push(cur);
    }
    Err(Error::NonTermination(ts.len() + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxmap::{self, Coordinatization};
    use crate::congruence::Congruence;
    use crate::examples::{d4, w8};
    use crate::sorted::{build_frzflt, reduced_signature, SortedOp};

    fn lim() -> Limits {
        Limits::default()
    }

    fn flat(alg: &crate::algebra::FiniteAlgebra, tau: &Congruence) -> SortedAlgebra {
        let report = boxmap::analyze(alg, tau, None, None, &lim()).unwrap();
        let coords: Vec<Coordinatization> = report.classes.iter().map(|c| c.coordinatization.clone()).collect();
        let f = build_frzflt(&coords, &report.boxmaps).unwrap();
        reduced_signature(&f.algebra).unwrap()
    }

    fn w8_flat() -> SortedAlgebra {
        static CACHE: std::sync::OnceLock<SortedAlgebra> = std::sync::OnceLock::new();
        CACHE.get_or_init(|| flat(&w8(), &Congruence::total(8))).clone()
    }

    fn d4_flat() -> SortedAlgebra {
        flat(&d4(), &Congruence::total(4))
    }

    fn t_index(ts: &TermSet) -> usize {
        ts.members.iter().position(|m| m.arity() == 3).unwrap()
    }

    #[test]
    fn w8_term_set() {
        let a = w8_flat();
        let ts = sorted_term_operations(&a, &lim()).unwrap();
        // identity, t(x,x,x), six binary identification patterns, six
        // variable orders of t
        assert_eq!(ts.len(), 14);
        assert_eq!(ts.members.iter().filter(|m| m.arity() == 3).count(), 6);
        assert_eq!(ts.complete_at_next, None);
        assert!(verify_complete(&a, &ts, &lim()).unwrap());
        assert_eq!(is_essentially_unary_algebra(&ts), UnaryVerdict::NotUnary(t_index(&ts)));
        assert_eq!(ts.members[t_index(&ts)].term.to_string(), format!("{}(v0,v1,v2)", a.ops()[0].name));
    }

    #[test]
    fn d4_term_set_is_projections() {
        let a = d4_flat();
        let ts = sorted_term_operations(&a, &lim()).unwrap();
        assert_eq!(ts.len(), 2);
        assert!(ts.members.iter().all(SortedTermOp::is_identity));
        assert_eq!(is_essentially_unary_algebra(&ts), UnaryVerdict::Unary);
        assert!(matches!(find_binary_noninvertible_term(&a, &ts), Err(Error::EssentiallyUnary)));
    }

    #[test]
    fn no_operations_gives_projections() {
        let a = SortedAlgebra::new(vec!["a".into(), "b".into()], vec![3, 1], vec![]).unwrap();
        let ts = sorted_term_operations(&a, &lim()).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(is_essentially_unary_algebra(&ts), UnaryVerdict::Unary);
    }

    #[test]
    fn rejects_non_abelian() {
        let min = SortedOp {
            name: "m".into(),
            inputs: vec![0, 0],
            output: 0,
            table: vec![0, 0, 0, 1],
        };
        let a = SortedAlgebra::new(vec!["s".into()], vec![2], vec![min]).unwrap();
        assert!(matches!(sorted_term_operations(&a, &lim()), Err(Error::NotStronglyAbelian(_))));
    }

    #[test]
    fn w8_invertibility() {
        let a = w8_flat();
        let ts = sorted_term_operations(&a, &lim()).unwrap();
        let t = &ts.members[t_index(&ts)];
        for p in 0..3 {
            assert_eq!(left_inverse(&a, &ts, t, p), None);
        }
        assert!(right_inverse(&a, &ts, t, &lim()).unwrap().is_none());
        let id = ts.members.iter().find(|m| m.is_identity()).unwrap();
        assert!(left_inverse(&a, &ts, id, 0).is_some());
        assert!(right_inverse(&a, &ts, id, &lim()).unwrap().is_some());
        let q = find_binary_noninvertible_term(&a, &ts).unwrap();
        assert_eq!(q.member, t_index(&ts));
        assert_eq!(q.path, vec![q.member]);
    }

    #[test]
    fn d4_invertibility() {
        let a = d4_flat();
        let ts = sorted_term_operations(&a, &lim()).unwrap();
        for m in &ts.members {
            assert!(left_inverse(&a, &ts, m, 0).is_some());
            assert!(right_inverse(&a, &ts, m, &lim()).unwrap().is_some());
        }
    }

    #[test]
    fn right_invertible_members_are_unary() {
        for a in [w8_flat(), d4_flat()] {
            let ts = sorted_term_operations(&a, &lim()).unwrap();
            let ri = right_invertible_table(&a, &ts, &lim()).unwrap();
            for (m, &r) in ts.members.iter().zip(&ri) {
                assert!(!r || m.arity() <= 1, "{m}");
            }
        }
    }

    #[test]
    fn constant_is_not_right_invertible() {
        let c = SortedOp {
            name: "c".into(),
            inputs: vec![0],
            output: 0,
            table: vec![1, 1, 1],
        };
        let a = SortedAlgebra::new(vec!["s".into()], vec![3], vec![c]).unwrap();
        let ts = sorted_term_operations(&a, &lim()).unwrap();
        let konst = ts.members.iter().find(|m| m.arity() == 0).unwrap();
        assert!(right_inverse(&a, &ts, konst, &lim()).unwrap().is_none());
    }

    #[test]
    fn free_algebra_matches_extensional_closure() {
        let a = w8_flat();
        let ts = sorted_term_operations(&a, &lim()).unwrap();
        for n in 1..=2 {
            let gens = vec![0; n];
            let fa = free_algebra(&a, &ts, &gens, &lim()).unwrap();
            let ext = sorted::sorted_clone(&a, &gens, &lim()).unwrap();
            assert_eq!(fa.len(), ext.count());
            for g in 0..n {
                assert_eq!(fa.generator(g), g);
            }
        }
        // one generator: x and t(x,x,x)
        assert_eq!(free_algebra(&a, &ts, &[0], &lim()).unwrap().len(), 2);
        let single = SortedAlgebra::new(vec!["p".into()], vec![1], vec![]).unwrap();
        let ts1 = sorted_term_operations(&single, &lim()).unwrap();
        assert_eq!(free_algebra(&single, &ts1, &[0], &lim()).unwrap().len(), 1);
    }

    #[test]
    fn free_algebra_terms_evaluate_to_forms() {
        let a = w8_flat();
        let ts = sorted_term_operations(&a, &lim()).unwrap();
        let fa = free_algebra(&a, &ts, &[0, 0], &lim()).unwrap();
        for id in 0..fa.len() {
            let c = CompiledTerm::compile(&a, &fa.term(&ts, id)).unwrap();
            for x in 0..8 {
                for y in 0..8 {
                    assert_eq!(c.eval(&a, &[x, y]), fa.value(&a, id, &[x, y]));
                }
            }
        }
    }
}
