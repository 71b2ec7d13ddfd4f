//! Integer scalar abstraction and the elementary number theory built on it.
//!
//! Everything in the crate is generic over [`Int`]. `BigInt` is the scalar the
//! crate-root aliases use; machine integers (`i64`, `i128`) satisfy the same
//! bound and are handy for small inputs and fast inner loops, but they do not
//! guard against overflow.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact signed integer usable as a coordinate scalar.
pub trait Int:
    Clone + Debug + Display + Hash + Ord + Integer + Signed + FromPrimitive + ToPrimitive + FromStr + Send + Sync + 'static
{
}

impl<T> Int for T where
    T: Clone
        + Debug
        + Display
        + Hash
        + Ord
        + Integer
        + Signed
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + Send
        + Sync
        + 'static
{
}

/// Lifts a small constant into the scalar type.
#[inline]
pub fn int<T: Int>(v: i64) -> T {
    T::from_i64(v).expect("scalar type must represent i64")
}

/// Extended Euclid: `(g, s, t)` with `g = s*a + t*b` and `g >= 0`.
pub fn ext_gcd<T: Int>(a: &T, b: &T) -> (T, T, T) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (T::one(), T::zero());
    let (mut t0, mut t1) = (T::zero(), T::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = r0 - q.clone() * r1.clone();
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = s0 - q.clone() * s1.clone();
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = t0 - q * t1.clone();
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// `base^exp` by repeated squaring.
pub fn pow<T: Int>(base: &T, mut exp: u64) -> T {
    let mut acc = T::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

/// `base^exp mod m` with the result in `[0, m)`.
pub fn mod_pow<T: Int>(base: &T, exp: &T, m: &T) -> T {
    let two = int::<T>(2);
    let mut acc = T::one().mod_floor(m);
    let mut b = base.mod_floor(m);
    let mut e = exp.clone();
    while e.is_positive() {
        if e.is_odd() {
            acc = (acc * b.clone()).mod_floor(m);
        }
        e = e / two.clone();
        b = (b.clone() * b).mod_floor(m);
    }
    acc
}

/// Floor square root of a non-negative integer (Newton iteration).
pub fn isqrt<T: Int>(n: &T) -> T {
    assert!(!n.is_negative(), "isqrt of a negative number");
    if n.is_zero() {
        return T::zero();
    }
    let two = int::<T>(2);
    // Start above the root: 2^(ceil(bits/2)).
    let bits = bit_length(n);
    let mut x = pow(&two, bits.div_ceil(2));
    loop {
        let y = (x.clone() + n.clone() / x.clone()) / two.clone();
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Number of bits in `|n|` (0 for zero).
pub fn bit_length<T: Int>(n: &T) -> u64 {
    let two = int::<T>(2);
    let mut v = n.abs();
    let mut bits = 0;
    while !v.is_zero() {
        v = v / two.clone();
        bits += 1;
    }
    bits
}

/// Deterministic primality by trial division.
pub fn is_prime<T: Int>(n: &T) -> bool {
    let two = int::<T>(2);
    if *n < two {
        return false;
    }
    let mut k = two;
    while k.clone() * k.clone() <= *n {
        if n.is_multiple_of(&k) {
            return false;
        }
        k = k + T::one();
    }
    true
}

/// Prime factorisation of `|n|` by trial division, primes ascending.
pub fn factorize<T: Int>(n: &T) -> Vec<(T, u32)> {
    let mut rest = n.abs();
    let mut out = Vec::new();
    let mut p = int::<T>(2);
    while p.clone() * p.clone() <= rest {
        if rest.is_multiple_of(&p) {
            let mut e = 0;
            while rest.is_multiple_of(&p) {
                rest = rest / p.clone();
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p = p + T::one();
    }
    if rest > T::one() {
        out.push((rest, 1));
    }
    out
}

/// Exponent of the prime `p` in `n` (`n != 0`).
pub fn p_adic_valuation<T: Int>(n: &T, p: &T) -> u32 {
    assert!(!n.is_zero());
    let mut v = 0;
    let mut m = n.clone();
    while m.is_multiple_of(p) {
        m = m / p.clone();
        v += 1;
    }
    v
}

pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    let m = n.unsigned_abs();
    let mut k: u64 = 2;
    while k * k <= m {
        if m.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Legendre symbol `(a / p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre<T: Int>(a: &T, p: &T) -> i32 {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e = (p.clone() - T::one()) / int::<T>(2);
    if mod_pow(&a, &e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(disc / p)` for a prime `p`, including `p = 2`.
pub fn kronecker_prime<T: Int>(disc: &T, p: &T) -> i32 {
    let two = int::<T>(2);
    if *p == two {
        if disc.is_even() {
            return 0;
        }
        let r = disc.mod_floor(&int::<T>(8));
        if r == T::one() || r == int::<T>(7) {
            1
        } else {
            -1
        }
    } else {
        legendre(disc, p)
    }
}

/// A square root of `a` modulo an odd prime `p` (Tonelli–Shanks).
pub fn sqrt_mod_prime<T: Int>(a: &T, p: &T) -> Option<T> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(T::zero());
    }
    if legendre(&a, p) != 1 {
        return None;
    }
    let one = T::one();
    let two = int::<T>(2);
    let mut q = p.clone() - one.clone();
    let mut s = 0u32;
    while q.is_even() {
        q = q / two.clone();
        s += 1;
    }
    let mut z = two.clone();
    while legendre(&z, p) != -1 {
        z = z + one.clone();
    }
    let mut m = s;
    let mut c = mod_pow(&z, &q, p);
    let mut t = mod_pow(&a, &q, p);
    let mut r = mod_pow(&a, &((q + one.clone()) / two), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (t2.clone() * t2).mod_floor(p);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = (b.clone() * b).mod_floor(p);
        }
        m = i;
        c = (b.clone() * b.clone()).mod_floor(p);
        t = (t * c.clone()).mod_floor(p);
        r = (r * b).mod_floor(p);
    }
    Some(r)
}

/// Modular inverse of `a` modulo `m`, if it exists.
pub fn inv_mod<T: Int>(a: &T, m: &T) -> Option<T> {
    let (g, s, _) = ext_gcd(&a.mod_floor(m), m);
    g.is_one().then(|| s.mod_floor(m))
}
