//! Boxmaps (terms restricted to a product of congruence classes, with the
//! inessential slots frozen), decomposition operations and the
//! coordinatization of a class they induce.

use std::collections::HashSet;
use std::fmt;

use crate::algebra::{enumerate_term_operations, Elem, FiniteAlgebra, Limits, Term, TermOperation};
use crate::congruence::{self, Congruence};
use crate::error::{Error, Result};
use crate::util;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boxmap {
    /// Inputs are `v0..v{n-1}`, frozen slots follow.
    pub term: Term,
    pub input_classes: Vec<usize>,
    pub constant_classes: Vec<usize>,
    pub constants: Vec<Elem>,
    pub output_class: usize,
    /// Members of each input class, in increasing order.
    pub input_members: Vec<Vec<Elem>>,
    pub output_members: Vec<Elem>,
    /// Values on the product of input classes, indexed by positions within
    /// the classes.
    pub table: Vec<Elem>,
}

impl Boxmap {
    pub fn input_count(&self) -> usize {
        self.input_classes.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.input_members.iter().map(Vec::len).collect()
    }

    /// Value on actual elements.
    pub fn apply(&self, args: &[Elem]) -> Result<Elem> {
        let mut idx = 0usize;
        for (&a, members) in args.iter().zip(&self.input_members) {
            let p = members
                .binary_search(&a)
                .map_err(|_| Error::ClassMismatch(format!("{a} is not in the input class")))?;
            idx = idx * members.len() + p;
        }
        Ok(self.table[idx])
    }

    /// The identity map on a class.
    pub fn identity(class: usize, members: &[Elem]) -> Boxmap {
        Boxmap {
            term: Term::var(0),
            input_classes: vec![class],
            constant_classes: Vec::new(),
            constants: Vec::new(),
            output_class: class,
            input_members: vec![members.to_vec()],
            output_members: members.to_vec(),
            table: members.to_vec(),
        }
    }

    /// Output positions within the output class.
    fn position_table(&self) -> Vec<usize> {
        self.table
            .iter()
            .map(|v| self.output_members.binary_search(v).expect("output lies in its class"))
            .collect()
    }
}

impl fmt::Display for Boxmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(
            f,
            "{} on C[{}] -> C{}",
            self.term,
            list(&self.input_classes),
            self.output_class
        )?;
        if !self.constants.is_empty() {
            let consts: Vec<String> = self.constants.iter().map(|c| c.to_string()).collect();
            write!(f, " with constants ({})", consts.join(","))?;
        }
        Ok(())
    }
}

/// Restrict a term operation to the box given by `class_tuple`, split off
/// the slots that are inessential on the box and canonicalize.
pub fn boxmap_from_term(
    size: usize,
    classes: &[Vec<Elem>],
    tau: &Congruence,
    op: &TermOperation,
    class_tuple: &[usize],
) -> Result<Boxmap> {
    let (table, dims) = congruence::restrict_to_classes(size, &op.table, classes, class_tuple);
    let output_class = tau.block(table[0] as usize);
    if table.iter().any(|&v| tau.block(v as usize) != output_class) {
        return Err(Error::ClassMismatch("box is not mapped into one class".into()));
    }
    let essential = util::essential_slots(&table, &dims);
    let frozen: Vec<usize> = (0..op.arity).filter(|s| !essential.contains(s)).collect();
    let projected = util::project_table(&table, &dims, &essential);
    let mut map = vec![Term::var(0); op.arity];
    for (new, &old) in essential.iter().chain(&frozen).enumerate() {
        map[old] = Term::var(new);
    }
    Ok(Boxmap {
        term: op.witness.substitute(&map),
        input_classes: essential.iter().map(|&s| class_tuple[s]).collect(),
        constant_classes: frozen.iter().map(|&s| class_tuple[s]).collect(),
        constants: frozen.iter().map(|&s| classes[class_tuple[s]][0]).collect(),
        output_class,
        input_members: essential.iter().map(|&s| classes[class_tuple[s]].clone()).collect(),
        output_members: classes[output_class].clone(),
        table: projected,
    })
}

/// All boxmaps obtainable from terms of arity `term_arity` (lower arities
/// are covered through frozen slots), deduplicated by input classes,
/// output class and table, in order of discovery.
pub fn enumerate_boxmaps(
    alg: &FiniteAlgebra,
    tau: &Congruence,
    output_class: Option<usize>,
    term_arity: usize,
    limits: &Limits,
) -> Result<Vec<Boxmap>> {
    if tau.algebra_size() != alg.size() {
        return Err(Error::SizeMismatch {
            expected: alg.size(),
            found: tau.algebra_size(),
        });
    }
    let classes = tau.classes();
    if let Some(c) = output_class {
        if c >= classes.len() {
            return Err(Error::ClassMismatch(format!("no class {c}")));
        }
    }
    let arity = term_arity.max(1);
    let ops = enumerate_term_operations(alg, arity, None, limits)?;
    let class_dims = vec![classes.len(); arity];
    let mut seen: HashSet<(Vec<usize>, usize, Vec<Elem>)> = HashSet::new();
    let mut out = Vec::new();
    for op in &ops {
        let mut ct = vec![0usize; arity];
        loop {
            let b = boxmap_from_term(alg.size(), &classes, tau, op, &ct)?;
            if output_class.is_none_or(|c| c == b.output_class)
                && seen.insert((b.input_classes.clone(), b.output_class, b.table.clone()))
            {
                if out.len() >= limits.max_tables {
                    return Err(Error::ResourceLimit(format!("more than {} boxmaps", limits.max_tables)));
                }
                out.push(b);
            }
            if !util::advance(&mut ct, &class_dims) {
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Idempotence,
    Dependence,
    Composition,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Idempotence => "idempotence",
            Axiom::Dependence => "dependence on every variable",
            Axiom::Composition => "composition law",
        })
    }
}

/// The first decomposition axiom the boxmap violates, if any.
pub fn decomposition_violation(b: &Boxmap) -> Result<Option<Axiom>> {
    if b.input_classes.iter().any(|&c| c != b.output_class) {
        return Err(Error::ClassMismatch(
            "decomposition operations map a class power into the class".into(),
        ));
    }
    let k = b.input_count();
    let m = b.output_members.len();
    let pos = b.position_table();
    let dims = vec![m; k];
    let st = util::strides(&dims);
    let diag: usize = st.iter().sum();
    if k == 0 || (0..m).any(|x| pos[x * diag] != x) {
        return Ok(Some(if k == 0 { Axiom::Dependence } else { Axiom::Idempotence }));
    }
    // On a one-point class the identity is the only map and counts as
    // depending on its variable.
    if m > 1 && util::essential_slots(&pos, &dims).len() != k {
        return Ok(Some(Axiom::Dependence));
    }
    // d(d(x_1), ..., d(x_K)) = d(x_11, ..., x_KK): the rows are independent,
    // so it is enough to range over the pairs (x_ii, d(x_i)) each row can
    // produce.
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(k);
    let mut row = vec![0usize; k];
    for i in 0..k {
        let mut set = HashSet::new();
        loop {
            set.insert((row[i], pos[util::index_of_usize(&row, &dims)]));
            if !util::advance(&mut row, &dims) {
                break;
            }
        }
        let mut v: Vec<(usize, usize)> = set.into_iter().collect();
        v.sort_unstable();
        pairs.push(v);
    }
    let pdims: Vec<usize> = pairs.iter().map(Vec::len).collect();
    let mut choice = vec![0usize; k];
    let (mut xs, mut ys) = (vec![0usize; k], vec![0usize; k]);
    loop {
        for i in 0..k {
            (xs[i], ys[i]) = pairs[i][choice[i]];
        }
        if pos[util::index_of_usize(&ys, &dims)] != pos[util::index_of_usize(&xs, &dims)] {
            return Ok(Some(Axiom::Composition));
        }
        if !util::advance(&mut choice, &pdims) {
            break;
        }
    }
    Ok(None)
}

pub fn is_decomposition_op(b: &Boxmap) -> Result<bool> {
    Ok(decomposition_violation(b)?.is_none())
}

/// A boxmap verified to satisfy every decomposition axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionOp {
    boxmap: Boxmap,
}

impl DecompositionOp {
    pub fn new(boxmap: Boxmap) -> Result<Self> {
        match decomposition_violation(&boxmap)? {
            None => Ok(DecompositionOp { boxmap }),
            Some(ax) => Err(Error::NotADecomposition(format!("{boxmap} violates {ax}"))),
        }
    }

    pub fn boxmap(&self) -> &Boxmap {
        &self.boxmap
    }

    pub fn arity(&self) -> usize {
        self.boxmap.input_count()
    }

    pub fn class(&self) -> usize {
        self.boxmap.output_class
    }
}

/// Largest-arity decomposition boxmap on class `class` among terms of
/// arity at most `ceiling` (default `ceil(log2 |C|)`). Ties go to the one
/// discovered first, so `d(v0,v1)` wins over `d(v1,v0)`.
pub fn max_decomposition_arity(
    alg: &FiniteAlgebra,
    tau: &Congruence,
    class: usize,
    ceiling: Option<usize>,
    limits: &Limits,
) -> Result<DecompositionOp> {
    let classes = tau.classes();
    let members = classes
        .get(class)
        .ok_or_else(|| Error::ClassMismatch(format!("no class {class}")))?;
    let mut best = DecompositionOp::new(Boxmap::identity(class, members))?;
    let bound = ceiling.unwrap_or_else(|| util::ceil_log2(members.len())).max(1);
    if members.len() == 1 {
        return Ok(best);
    }
    for b in enumerate_boxmaps(alg, tau, Some(class), bound, limits)? {
        if b.input_classes.iter().any(|&c| c != class) || b.input_count() < best.arity() {
            continue;
        }
        if !is_decomposition_op(&b)? {
            continue;
        }
        if b.input_count() > best.arity() {
            best = DecompositionOp { boxmap: b };
        }
    }
    Ok(best)
}

/// A class written as a product of factors through a decomposition
/// operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinatization {
    pub class: usize,
    pub members: Vec<Elem>,
    pub factor_sizes: Vec<usize>,
    /// Coordinates of each member, indexed by position in `members`.
    pub phi: Vec<Vec<usize>>,
    /// Position of the member with given coordinates (row-major index).
    inverse: Vec<usize>,
}

impl Coordinatization {
    pub fn arity(&self) -> usize {
        self.factor_sizes.len()
    }

    pub fn coords(&self, x: Elem) -> Option<&[usize]> {
        let p = self.members.binary_search(&x).ok()?;
        Some(&self.phi[p])
    }

    pub fn element(&self, coords: &[usize]) -> Elem {
        self.members[self.inverse[util::index_of_usize(coords, &self.factor_sizes)]]
    }
}

pub fn coordinatize(d: &DecompositionOp) -> Result<Coordinatization> {
    let b = &d.boxmap;
    let k = d.arity();
    let m = b.output_members.len();
    let pos = b.position_table();
    let dims = vec![m; k];
    let kernels = congruence::slot_kernels(&pos, &dims);
    let factor_sizes: Vec<usize> = kernels.iter().map(|k| k.iter().max().map_or(0, |x| x + 1)).collect();
    let phi: Vec<Vec<usize>> = (0..m).map(|p| kernels.iter().map(|k| k[p]).collect()).collect();
    let fail = |why: &str| Error::NotADecomposition(format!("{b}: {why}"));
    if util::checked_box_size(&factor_sizes) != Some(m) {
        return Err(fail("factor sizes do not multiply to the class size"));
    }
    let mut inverse = vec![usize::MAX; m];
    for (p, c) in phi.iter().enumerate() {
        let i = util::index_of_usize(c, &factor_sizes);
        if inverse[i] != usize::MAX {
            return Err(fail("coordinates are not injective"));
        }
        inverse[i] = p;
    }
    let mut t = vec![0usize; k];
    for &v in &pos {
        for (j, coord) in phi[v].iter().enumerate() {
            if *coord != phi[t[j]][j] {
                return Err(fail("does not act as diagonal selection"));
            }
        }
        util::advance(&mut t, &dims);
    }
    Ok(Coordinatization {
        class: b.output_class,
        members: b.output_members.clone(),
        factor_sizes,
        phi,
        inverse,
    })
}

/// A boxmap with more essential inputs than the decomposition arity of its
/// output class. Among those, the one with the most inputs is reported,
/// earliest discovered first.
pub fn find_violating_boxmap<'a>(boxmaps: &'a [Boxmap], ks: &[usize]) -> Option<&'a Boxmap> {
    boxmaps
        .iter()
        .filter(|b| b.input_count() > ks[b.output_class])
        .fold(None, |best: Option<&Boxmap>, b| match best {
            Some(x) if x.input_count() >= b.input_count() => Some(x),
            _ => Some(b),
        })
}

#[derive(Clone, Debug)]
pub struct ClassReport {
    pub members: Vec<Elem>,
    pub decomposition: DecompositionOp,
    pub coordinatization: Coordinatization,
}

#[derive(Clone, Debug)]
pub struct BoxmapReport {
    pub classes: Vec<ClassReport>,
    pub scan_arity: usize,
    /// Distinct boxmaps found at the scan arity.
    pub boxmaps: Vec<Boxmap>,
    pub violation: Option<Boxmap>,
}

impl BoxmapReport {
    pub fn ks(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.decomposition.arity()).collect()
    }
}

impl fmt::Display for BoxmapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.classes.iter().enumerate() {
            let sizes: Vec<String> = c.coordinatization.factor_sizes.iter().map(|s| s.to_string()).collect();
            writeln!(
                f,
                "class {i}: size={} K={} witness={} factors={}",
                c.members.len(),
                c.decomposition.arity(),
                c.decomposition.boxmap().term,
                sizes.join("x")
            )?;
        }
        writeln!(f, "boxmaps scanned: {} (term arity {})", self.boxmaps.len(), self.scan_arity)?;
        match &self.violation {
            None => writeln!(f, "violating boxmap: none"),
            Some(b) => writeln!(
                f,
                "violating boxmap: {b} has {} essential inputs > K={}",
                b.input_count(),
                self.classes[b.output_class].decomposition.arity()
            ),
        }
    }
}

/// Decomposition arity and coordinatization of every class, then a scan
/// for a boxmap depending on more factors than allowed. `scan_arity`
/// defaults to one more than the largest `ceil(log2 |C|)`.
pub fn analyze(
    alg: &FiniteAlgebra,
    tau: &Congruence,
    ceiling: Option<usize>,
    scan_arity: Option<usize>,
    limits: &Limits,
) -> Result<BoxmapReport> {
    let members = tau.classes();
    let mut classes = Vec::with_capacity(members.len());
    for (i, m) in members.iter().enumerate() {
        let d = max_decomposition_arity(alg, tau, i, ceiling, limits)?;
        let coordinatization = coordinatize(&d)?;
        classes.push(ClassReport {
            members: m.clone(),
            decomposition: d,
            coordinatization,
        });
    }
    let widest = members.iter().map(|m| util::ceil_log2(m.len())).max().unwrap_or(0);
    let scan_arity = scan_arity.unwrap_or(widest + 1).max(1);
    let boxmaps = enumerate_boxmaps(alg, tau, None, scan_arity, limits)?;
    let ks: Vec<usize> = classes.iter().map(|c| c.decomposition.arity()).collect();
    let violation = find_violating_boxmap(&boxmaps, &ks).cloned();
    Ok(BoxmapReport {
        classes,
        scan_arity,
        boxmaps,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{d4, s2, w8};

    fn lim() -> Limits {
        Limits::default()
    }

    fn whole(alg: &FiniteAlgebra, name: &str) -> Boxmap {
        let n = alg.size();
        let op = &alg.ops()[alg.op_index(name).unwrap()];
        let t = TermOperation {
            arity: op.arity,
            table: op.table.clone(),
            witness: Term::app(name, (0..op.arity).map(Term::var).collect()),
        };
        let tau = Congruence::total(n);
        boxmap_from_term(n, &tau.classes(), &tau, &t, &vec![0; op.arity]).unwrap()
    }

    #[test]
    fn identity_is_a_decomposition() {
        let b = Boxmap::identity(0, &[0, 1, 2]);
        assert_eq!(decomposition_violation(&b).unwrap(), None);
        let point = Boxmap::identity(0, &[5]);
        assert!(is_decomposition_op(&point).unwrap());
    }

    #[test]
    fn d4_d_is_a_decomposition_and_m_is_not() {
        assert!(is_decomposition_op(&whole(&d4(), "d")).unwrap());
        assert_eq!(decomposition_violation(&whole(&s2(), "m")).unwrap(), Some(Axiom::Composition));
        // t(x,x,x) copies the first bit of x everywhere
        assert_eq!(decomposition_violation(&whole(&w8(), "t")).unwrap(), Some(Axiom::Idempotence));
    }

    #[test]
    fn composition_law_matches_brute_force() {
        let b = whole(&d4(), "d");
        let d = |x: usize, y: usize| b.table[x * 4 + y] as usize;
        for a in 0..4 {
            for bb in 0..4 {
                for c in 0..4 {
                    for e in 0..4 {
                        assert_eq!(d(d(a, bb), d(c, e)), d(a, e));
                    }
                }
            }
        }
    }

    #[test]
    fn identified_inputs_lose_dependence() {
        let b = whole(&d4(), "d");
        let mut folded = b.clone();
        folded.input_classes.push(0);
        folded.input_members.push(vec![0, 1, 2, 3]);
        // d(x, x, y) := d(x, y) as a ternary op: never depends on the middle slot
        folded.table = (0..64).map(|i| b.table[(i / 16) * 4 + i % 4]).collect();
        assert_eq!(decomposition_violation(&folded).unwrap(), Some(Axiom::Dependence));
    }

    #[test]
    fn enumeration_examples() {
        let all = Congruence::total(4);
        let bs = enumerate_boxmaps(&d4(), &all, None, 2, &lim()).unwrap();
        assert!(bs.iter().any(|b| b.input_count() == 2 && b.table == whole(&d4(), "d").table));
        assert!(bs.iter().any(|b| b.input_count() == 1 && b.table == vec![0, 1, 2, 3]));
        let all = Congruence::total(8);
        let bs = enumerate_boxmaps(&w8(), &all, None, 3, &lim()).unwrap();
        assert!(bs.iter().any(|b| b.input_count() == 3 && b.constants.is_empty()));
        let eq = Congruence::equality(4);
        let bs = enumerate_boxmaps(&d4(), &eq, None, 2, &lim()).unwrap();
        assert!(bs.iter().all(|b| b.input_count() == 0));
    }

    #[test]
    fn d4_coordinatization() {
        let tau = Congruence::total(4);
        let d = max_decomposition_arity(&d4(), &tau, 0, None, &lim()).unwrap();
        assert_eq!(d.arity(), 2);
        let c = coordinatize(&d).unwrap();
        assert_eq!(c.factor_sizes, vec![2, 2]);
        for x in 0..4u8 {
            assert_eq!(c.coords(x).unwrap(), &[x as usize / 2, x as usize % 2]);
        }
        for x in 0..4u8 {
            for y in 0..4u8 {
                let v = d.boxmap().apply(&[x, y]).unwrap();
                assert_eq!(c.coords(v).unwrap(), &[c.coords(x).unwrap()[0], c.coords(y).unwrap()[1]]);
            }
        }
    }

    #[test]
    fn w8_and_singletons_have_k_one() {
        let tau = Congruence::total(8);
        let d = max_decomposition_arity(&w8(), &tau, 0, None, &lim()).unwrap();
        assert_eq!(d.arity(), 1);
        assert_eq!(coordinatize(&d).unwrap().factor_sizes, vec![8]);
        let eq = Congruence::equality(4);
        for class in 0..4 {
            assert_eq!(max_decomposition_arity(&d4(), &eq, class, None, &lim()).unwrap().arity(), 1);
        }
    }

    #[test]
    fn violations() {
        let r = analyze(&d4(), &Congruence::total(4), None, None, &lim()).unwrap();
        assert_eq!(r.ks(), vec![2]);
        assert!(r.violation.is_none());
        let r = analyze(&w8(), &Congruence::total(8), None, Some(3), &lim()).unwrap();
        let v = r.violation.expect("t depends on three factors");
        assert_eq!(v.input_count(), 3);
        assert_eq!(v.term.to_string(), "t(v0,v1,v2)");
        let r = analyze(&d4(), &Congruence::equality(4), None, None, &lim()).unwrap();
        assert!(r.violation.is_none());
    }

    #[test]
    fn rejects_mixed_classes() {
        let mut b = Boxmap::identity(0, &[0, 1]);
        b.output_class = 1;
        assert!(matches!(decomposition_violation(&b), Err(Error::ClassMismatch(_))));
        assert!(matches!(DecompositionOp::new(whole(&s2(), "m")), Err(Error::NotADecomposition(_))));
    }
}
