//! Exact cyclic autocorrelation by number-theoretic transform over the
//! prime `2^64 - 2^32 + 1`.

use crate::residue::ResidueSet;

use super::kernel::ProfileKernel;

const MODULUS: u64 = 0xFFFF_FFFF_0000_0001;
/// 7 generates the multiplicative group; its order is `2^32 * (2^32 - 1)`.
const GENERATOR: u64 = 7;
const MAX_LOG_LEN: u32 = 32;

#[inline]
fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

#[inline]
fn add(a: u64, b: u64) -> u64 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= MODULUS {
        s.wrapping_sub(MODULUS)
    } else {
        s
    }
}

#[inline]
fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a.wrapping_sub(b).wrapping_add(MODULUS)
    }
}

fn pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    acc
}

/// In-place iterative radix-2 transform; `inverse` applies the inverse
/// transform including the `1/n` scaling.
pub(crate) fn transform(a: &mut [u64], inverse: bool) {
    let n = a.len();
    assert!(n.is_power_of_two());
    let log = n.trailing_zeros();
    assert!(log <= MAX_LOG_LEN, "transform length exceeds 2^32");
    if n == 1 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - log);
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w_len = pow(GENERATOR, (MODULUS - 1) / len as u64);
        if inverse {
            w_len = pow(w_len, MODULUS - 2);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut w = 1;
        for _ in 0..half {
            twiddles.push(w);
            w = mul(w, w_len);
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((x, y), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let t = mul(*y, tw);
                *y = sub(*x, t);
                *x = add(*x, t);
            }
        }
        len <<= 1;
    }
    if inverse {
        let n_inv = pow(n as u64, MODULUS - 2);
        for x in a.iter_mut() {
            *x = mul(*x, n_inv);
        }
    }
}

/// Linear convolution of nonnegative sequences. Exact as long as every
/// output coefficient is below the transform prime.
pub fn convolve(f: &[u64], g: &[u64]) -> Vec<u64> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let out_len = f.len() + g.len() - 1;
    let n = out_len.next_power_of_two();
    let mut fa = vec![0; n];
    let mut ga = vec![0; n];
    fa[..f.len()].copy_from_slice(f);
    ga[..g.len()].copy_from_slice(g);
    transform(&mut fa, false);
    transform(&mut ga, false);
    for (x, y) in fa.iter_mut().zip(&ga) {
        *x = mul(*x, *y);
    }
    transform(&mut fa, true);
    fa.truncate(out_len);
    fa
}

/// `r(b) = #{(a, a') in A x A : a' - a = b mod p}` for every `b`.
pub fn cyclic_autocorrelation(set: &ResidueSet) -> Vec<u64> {
    let p = set.p() as usize;
    let mut f = vec![0u64; p];
    for a in set.iter() {
        f[a as usize] = 1;
    }
    let reversed: Vec<u64> = f.iter().rev().copied().collect();
    // c[k] = sum_i f[i] f[p-1-k+i]; pairs with a' = a + b land on
    // k = p-1-b, wrapped pairs (a' = a + b - p) on k = 2p-1-b.
    let c = convolve(&f, &reversed);
    (0..p)
        .map(|b| {
            let direct = c[p - 1 - b];
            let wrapped = if b == 0 { 0 } else { c[2 * p - 1 - b] };
            direct + wrapped
        })
        .collect()
}

pub struct NttKernel;

impl ProfileKernel for NttKernel {
    fn name(&self) -> &'static str {
        "ntt"
    }

    fn deltas(&self, set: &ResidueSet) -> Vec<u32> {
        let card = set.len() as u64;
        cyclic_autocorrelation(set)
            .into_iter()
            .map(|r| (card - r) as u32)
            .collect()
    }
}
