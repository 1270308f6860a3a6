//! Small named algebras used throughout the tests, the CLI fixtures and the
//! documentation.

use crate::algebra::{FiniteAlgebra, Operation};
use crate::util;

/// `D4`: universe {0..3} read as pairs `(x div 2, x mod 2)` with the
/// binary decomposition operation `d(x, y) = 2*(x div 2) + (y mod 2)`.
pub fn d4() -> FiniteAlgebra {
    FiniteAlgebra::from_fns(4, vec![("d", 2, Box::new(|a: &[usize]| 2 * (a[0] / 2) + a[1] % 2))])
        .expect("valid table")
}

/// `S2`: the two-element meet semilattice.
pub fn s2() -> FiniteAlgebra {
    FiniteAlgebra::from_fns(2, vec![("m", 2, Box::new(|a: &[usize]| a[0].min(a[1])))]).expect("valid table")
}

/// `W8`: universe {0..7} read as bit triples `(x1, x2, x3)` with `x1` the
/// most significant bit, and `t(x, y, z) = (x1, y1, z1)`.
pub fn w8() -> FiniteAlgebra {
    tuple_selector_algebra(3, &[("t", 3, vec![(0, 0), (1, 0), (2, 0)])])
}

/// Like W8, but the middle argument contributes its second bit:
/// `t(x, y, z) = (x1, y2, z1)`.
pub fn w8_shifted() -> FiniteAlgebra {
    tuple_selector_algebra(3, &[("t", 3, vec![(0, 0), (1, 1), (2, 0)])])
}

/// One-element algebra with a single binary operation.
pub fn trivial() -> FiniteAlgebra {
    FiniteAlgebra::from_fns(1, vec![("f", 2, Box::new(|_: &[usize]| 0))]).expect("valid table")
}

/// An algebra on `{0,1}^bits` whose operations copy bits around: output
/// bit `c` of an operation is bit `selector[c].1` of argument
/// `selector[c].0`. Bits are numbered from the most significant one.
/// Every such algebra is rectangular, hence strongly abelian.
pub fn tuple_selector_algebra(bits: usize, ops: &[(&str, usize, Vec<(usize, usize)>)]) -> FiniteAlgebra {
    let size = 1usize << bits;
    let mut built = Vec::new();
    for (name, arity, sel) in ops {
        assert_eq!(sel.len(), bits, "one selector per output bit");
        let dims = vec![size; *arity];
        let mut t = vec![0; *arity];
        let mut table = Vec::with_capacity(util::box_size(&dims));
        loop {
            let mut v = 0usize;
            for &(arg, bit) in sel {
                v = 2 * v + ((t[arg] >> (bits - 1 - bit)) & 1);
            }
            table.push(v as u8);
            if !util::advance(&mut t, &dims) {
                break;
            }
        }
        built.push(Operation {
            name: name.to_string(),
            arity: *arity,
            table,
        });
    }
    FiniteAlgebra::new(size, built).expect("valid selector algebra")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w8_values() {
        let a = w8();
        // t(4, 0, 7) = (1, 0, 1)
        assert_eq!(a.apply(0, &[4, 0, 7]), 5);
        assert_eq!(a.apply(0, &[3, 3, 3]), 0);
    }

    #[test]
    fn d4_values() {
        let a = d4();
        assert_eq!(a.apply(0, &[0, 3]), 1);
        assert_eq!(a.apply(0, &[3, 0]), 2);
    }
}
