//! Mixed-radix tuple indexing shared by every table in the crate.
//!
//! Tables are stored row-major: the first argument is the most significant
//! digit, so `index([a0, a1, a2]) = (a0 * d1 + a1) * d2 + a2`.

/// Strides for row-major indexing over `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

pub fn box_size(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Like [`box_size`] but reports overflow instead of wrapping.
pub fn checked_box_size(dims: &[usize]) -> Option<usize> {
    dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}

pub fn index_of<T: Copy + Into<usize>>(tuple: &[T], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (&x, &d) in tuple.iter().zip(dims) {
        idx = idx * d + x.into();
    }
    idx
}

pub fn index_of_usize(tuple: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (&x, &d) in tuple.iter().zip(dims) {
        idx = idx * d + x;
    }
    idx
}

/// Decode a row-major index into a tuple.
pub fn decode(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for i in (0..dims.len()).rev() {
        out[i] = idx % dims[i];
        idx /= dims[i];
    }
}

/// Advance `tuple` to the next element of the box in lexicographic order.
/// Returns `false` after the last tuple (leaving `tuple` all zero).
pub fn advance(tuple: &mut [usize], dims: &[usize]) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple[i] < dims[i] {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

/// Slots on which a table over the box `dims` depends essentially.
pub fn essential_slots<T: PartialEq>(table: &[T], dims: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let total = table.len();
    let mut out = Vec::new();
    let mut tuple = vec![0; dims.len()];
    'slot: for (slot, (&d, &s)) in dims.iter().zip(&st).enumerate() {
        if d < 2 {
            continue;
        }
        for base in 0..total {
            decode(base, dims, &mut tuple);
            if tuple[slot] != 0 {
                continue;
            }
            let v = &table[base];
            for a in 1..d {
                if table[base + a * s] != *v {
                    out.push(slot);
                    continue 'slot;
                }
            }
        }
    }
    out
}

/// Restrict a table to the given slots, fixing every other slot at 0.
/// Only meaningful when the dropped slots are inessential.
pub fn project_table<T: Copy>(table: &[T], dims: &[usize], keep: &[usize]) -> Vec<T> {
    let st = strides(dims);
    let kdims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let n = box_size(&kdims);
    let mut out = Vec::with_capacity(n);
    let mut t = vec![0; keep.len()];
    for _ in 0..n {
        let idx: usize = keep.iter().zip(&t).map(|(&k, &x)| x * st[k]).sum();
        out.push(table[idx]);
        advance(&mut t, &kdims);
    }
    out
}

/// Smallest `k` with `2^k >= n` (0 for `n <= 1`).
pub fn ceil_log2(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    k
}

/// Largest `k` with `2^k <= n` (0 for `n <= 1`).
pub fn floor_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize
    }
}

/// Set partitions of `0..n` restricted so that only items with equal
/// `colour` share a block. Each partition is returned as block ids in
/// first-occurrence order.
pub fn coloured_partitions(colour: &[usize]) -> Vec<Vec<usize>> {
    fn go(i: usize, colour: &[usize], cur: &mut Vec<usize>, reps: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == colour.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..reps.len() {
            if colour[reps[b]] == colour[i] {
                cur.push(b);
                go(i + 1, colour, cur, reps, out);
                cur.pop();
            }
        }
        reps.push(i);
        cur.push(reps.len() - 1);
        go(i + 1, colour, cur, reps, out);
        cur.pop();
        reps.pop();
    }
    let mut out = Vec::new();
    go(0, colour, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip() {
        let dims = [2, 3, 4];
        let mut t = [0; 3];
        for i in 0..24 {
            decode(i, &dims, &mut t);
            assert_eq!(index_of_usize(&t, &dims), i);
        }
    }

    #[test]
    fn essential_slots_of_projection() {
        // f(x, y) = x on {0,1}
        assert_eq!(essential_slots(&[0u8, 0, 1, 1], &[2, 2]), vec![0]);
        assert_eq!(essential_slots(&[1u8, 1, 1, 1], &[2, 2]), Vec::<usize>::new());
    }

    #[test]
    fn partitions_respect_colours() {
        assert_eq!(coloured_partitions(&[0, 0, 0]).len(), 5);
        assert_eq!(coloured_partitions(&[0, 1, 0]).len(), 2);
        assert_eq!(coloured_partitions(&[]).len(), 1);
    }

    #[test]
    fn logs() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(floor_log2(8), 3);
        assert_eq!(floor_log2(7), 2);
    }
}

/// Table entries usable as indices.
pub trait AsIndex: Copy {
    fn ix(self) -> usize;
}

impl AsIndex for u8 {
    #[inline]
    fn ix(self) -> usize {
        self as usize
    }
}

impl AsIndex for u32 {
    #[inline]
    fn ix(self) -> usize {
        self as usize
    }
}
