//! Bit-matrix chromosomes: `rows` packed n-bit words read left to right,
//! top to bottom as one binary string of length `rows.len() * n`.

use rand::seq::index;
use rand::Rng;

use super::MutationOp;

#[inline]
fn mask(n: usize, col: usize) -> u64 {
    1u64 << (n - 1 - col)
}

#[inline]
fn get(rows: &[u64], n: usize, pos: usize) -> bool {
    rows[pos / n] & mask(n, pos % n) != 0
}

#[inline]
fn set(rows: &mut [u64], n: usize, pos: usize, bit: bool) {
    let m = mask(n, pos % n);
    if bit {
        rows[pos / n] |= m;
    } else {
        rows[pos / n] &= !m;
    }
}

#[inline]
fn full(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// One-point crossover: children take `[0, cut)` from one parent and
/// `[cut, len)` from the other.
pub(crate) fn crossover(a: &[u64], b: &[u64], n: usize, cut: usize) -> (Vec<u64>, Vec<u64>) {
    let mut c1 = Vec::with_capacity(a.len());
    let mut c2 = Vec::with_capacity(a.len());
    for (r, (&x, &y)) in a.iter().zip(b).enumerate() {
        let start = r * n;
        if start + n <= cut {
            c1.push(x);
            c2.push(y);
        } else if start >= cut {
            c1.push(y);
            c2.push(x);
        } else {
            let head = cut - start;
            let hi = full(n) ^ full(n - head);
            c1.push((x & hi) | (y & !hi));
            c2.push((y & hi) | (x & !hi));
        }
    }
    (c1, c2)
}

pub(crate) fn mutate<R: Rng + ?Sized>(rows: &mut [u64], n: usize, op: MutationOp, rng: &mut R) {
    let len = rows.len() * n;
    match op {
        MutationOp::Swap => {
            if len < 2 {
                return;
            }
            let pair = index::sample(rng, len, 2);
            let (p, q) = (pair.index(0), pair.index(1));
            let (bp, bq) = (get(rows, n, p), get(rows, n, q));
            set(rows, n, p, bq);
            set(rows, n, q, bp);
        }
        MutationOp::Flip => {
            let p = rng.random_range(0..len);
            rows[p / n] ^= mask(n, p % n);
        }
    }
}

pub(crate) fn random_rows<R: Rng + ?Sized>(count: usize, n: usize, rng: &mut R) -> Vec<u64> {
    (0..count).map(|_| rng.random::<u64>() & full(n)).collect()
}

/// `count` distinct n-bit rows in random order. Requires `count <= 2^n`.
pub(crate) fn distinct_rows<R: Rng + ?Sized>(count: usize, n: usize, rng: &mut R) -> Vec<u64> {
    if n <= 24 {
        return index::sample(rng, 1usize << n, count)
            .into_iter()
            .map(|i| i as u64)
            .collect();
    }
    let mut seen = std::collections::HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r = rng.random::<u64>() & full(n);
        if seen.insert(r) {
            out.push(r);
        }
    }
    out
}
