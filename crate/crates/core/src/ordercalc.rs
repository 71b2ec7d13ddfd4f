//! Multiplicative orders modulo ideals and prime-ideal powers.
//!
//! Past a stabilisation exponent `n0` the order of `beta` modulo `p^n` grows
//! by exactly one factor of the rational prime `p` every `e` steps:
//! `Ord_{p^(n0+k)}(beta) = p^ceil(k/e) * Ord_{p^n0}(beta)`. The closed form is
//! used whenever `n > n0`; below that the order is found by direct powering.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::ideals::{IdealHnf, PrimeIdeal};
use crate::quadring::QuadInt;
use crate::scalar::{int, pow, Int};

/// `beta^exp mod ideal`, as a canonical residue.
pub fn pow_mod<T: Int>(beta: &QuadInt<T>, exp: &T, ideal: &IdealHnf<T>) -> QuadInt<T> {
    let two = int::<T>(2);
    let mut acc = ideal.reduce(&beta.field().one());
    let mut base = ideal.reduce(beta);
    let mut e = exp.clone();
    while e.is_positive() {
        if e.is_odd() {
            acc = ideal.reduce(&(&acc * &base));
        }
        e = e / two.clone();
        if e.is_positive() {
            base = ideal.reduce(&(&base * &base));
        }
    }
    acc
}

fn is_invertible_mod<T: Int>(beta: &QuadInt<T>, ideal: &IdealHnf<T>) -> Result<bool> {
    if beta.is_zero() {
        return Ok(ideal.is_unit());
    }
    Ok(IdealHnf::principal(beta)?.sum(ideal).is_unit())
}

/// Sequential powering in `O_K / ideal` until the residue of 1 reappears.
fn order_by_powering<S: Int>(beta: &QuadInt<S>, ideal: &IdealHnf<S>) -> u64 {
    let one = ideal.reduce(&beta.field().one());
    let step = ideal.reduce(beta);
    let mut cur = step.clone();
    let mut n = 1u64;
    while cur != one {
        cur = ideal.reduce(&(&cur * &step));
        n += 1;
    }
    n
}

/// Residue-group sizes below this bound are walked in `i128`.
const FAST_PATH_LIMIT: i64 = 1 << 40;

/// Smallest `n >= 1` with `beta^n = 1 (mod ideal)`.
pub fn ord_mod<T: Int>(beta: &QuadInt<T>, ideal: &IdealHnf<T>) -> Result<T> {
    if beta.field() != ideal.field() {
        return Err(Error::FieldMismatch(beta.field().d(), ideal.field().d()));
    }
    if !is_invertible_mod(beta, ideal)? {
        return Err(Error::NotInvertible);
    }
    if ideal.is_unit() {
        return Ok(T::one());
    }
    let (a, b, c) = ideal.hnf();
    let field = ideal.field();
    let small = (a.to_i64(), b.to_i64(), c.to_i64());
    let n = match small {
        (Some(a64), Some(b64), Some(c64)) if a64 < FAST_PATH_LIMIT && field.omega_norm() < (1 << 20) => {
            let small_ideal = IdealHnf::<i128>::from_generators(field, &[field.small(a64, 0), field.small(b64, c64)])?;
            let r = ideal.reduce(beta);
            let beta_small = field.small::<i128>(r.x().to_i64().unwrap(), r.y().to_i64().unwrap());
            order_by_powering(&beta_small, &small_ideal)
        }
        _ => order_by_powering(beta, ideal),
    };
    Ok(T::from_u64(n).expect("order fits the scalar"))
}

/// The stabilisation point of the order sequence at one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationData<T> {
    pub prime: PrimeIdeal<T>,
    pub beta: QuadInt<T>,
    /// Largest `n` with `p^n | (beta^m - 1)`.
    pub n0: u32,
    /// `Ord_{p^(e+1)}(beta)`, which equals `Ord_{p^n0}(beta)`.
    pub m: T,
}

fn check_beta_outside<T: Int>(beta: &QuadInt<T>, prime: &PrimeIdeal<T>) -> Result<()> {
    if beta.field() != prime.hnf().field() {
        return Err(Error::FieldMismatch(beta.field().d(), prime.hnf().field().d()));
    }
    if prime.contains(beta) {
        return Err(Error::InPrime);
    }
    if beta.norm() <= T::one() {
        return Err(Error::RootOfUnity);
    }
    Ok(())
}

pub fn stabilization<T: Int>(beta: &QuadInt<T>, prime: &PrimeIdeal<T>) -> Result<StabilizationData<T>> {
    check_beta_outside(beta, prime)?;
    let e = prime.e();
    let m = ord_mod(beta, &prime.pow(e + 1))?;
    // beta^m - 1 != 0 because |beta| > 1, so the walk below terminates.
    let one = beta.field().one();
    let mut n0 = e + 1;
    let mut power = prime.pow(n0 + 1);
    while pow_mod(beta, &m, &power) == power.reduce(&one) {
        n0 += 1;
        power = power.mul(prime.hnf());
    }
    Ok(StabilizationData {
        prime: prime.clone(),
        beta: beta.clone(),
        n0,
        m,
    })
}

/// Result of [`ord_prime_power_detailed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePowerOrder<T> {
    pub order: T,
    pub stabilization: StabilizationData<T>,
    pub used_closed_form: bool,
}

pub fn ord_prime_power_detailed<T: Int>(
    beta: &QuadInt<T>,
    prime: &PrimeIdeal<T>,
    n: u32,
) -> Result<PrimePowerOrder<T>> {
    if n == 0 {
        return Err(Error::Precondition("exponent n must be positive".into()));
    }
    let stab = stabilization(beta, prime)?;
    let (order, used_closed_form) = if n <= stab.n0 {
        (ord_mod(beta, &prime.pow(n))?, false)
    } else {
        let k = (n - stab.n0).div_ceil(prime.e());
        (stab.m.clone() * pow(prime.p(), k as u64), true)
    };
    Ok(PrimePowerOrder {
        order,
        stabilization: stab,
        used_closed_form,
    })
}

/// `Ord_{p^n}(beta)`.
pub fn ord_prime_power<T: Int>(beta: &QuadInt<T>, prime: &PrimeIdeal<T>, n: u32) -> Result<T> {
    Ok(ord_prime_power_detailed(beta, prime, n)?.order)
}

/// Constant of the order lower bound
/// `Ord(beta) >= c2 * prod_p p^max{ceil(n_j/e_j)}`, with `c2 = 1/prod p_j^{m_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBoundSpec<T: Clone + num_integer::Integer> {
    pub primes: Vec<PrimeIdeal<T>>,
    /// `m_j`, taken as the stabilisation exponent `n0` of each prime.
    pub exponents: Vec<u32>,
    pub c2: Ratio<T>,
}

pub fn c2_constant<T: Int>(beta: &QuadInt<T>, primes: &[PrimeIdeal<T>]) -> Result<LowerBoundSpec<T>> {
    if primes.is_empty() {
        return Err(Error::EmptyPrimeList);
    }
    for (i, q) in primes.iter().enumerate() {
        if primes[..i].iter().any(|r| r.hnf() == q.hnf()) {
            return Err(Error::RepeatedPrime);
        }
    }
    let mut exponents = Vec::with_capacity(primes.len());
    let mut denom = T::one();
    for q in primes {
        let stab = stabilization(beta, q)?;
        denom = denom * pow(q.p(), stab.n0 as u64);
        exponents.push(stab.n0);
    }
    Ok(LowerBoundSpec {
        primes: primes.to_vec(),
        exponents,
        c2: Ratio::new(T::one(), denom),
    })
}

/// `prod_{p} p^{max{ceil(n_j/e_j) : p_j = p}}` over the primes of `spec`.
pub fn prime_power_product<T: Int>(primes: &[PrimeIdeal<T>], tuple: &[u32]) -> T {
    let mut groups: Vec<(T, u32)> = Vec::new();
    for (q, &n) in primes.iter().zip(tuple) {
        let k = n.div_ceil(q.e());
        match groups.iter_mut().find(|(p, _)| p == q.p()) {
            Some(g) => g.1 = g.1.max(k),
            None => groups.push((q.p().clone(), k)),
        }
    }
    groups.iter().fold(T::one(), |acc, (p, k)| acc * pow(p, *k as u64))
}

pub fn order_lower_bound<T: Int>(spec: &LowerBoundSpec<T>, tuple: &[u32]) -> Result<Ratio<T>> {
    if tuple.len() != spec.primes.len() {
        return Err(Error::TupleLength {
            expected: spec.primes.len(),
            got: tuple.len(),
        });
    }
    if tuple.iter().all(|&n| n == 0) {
        return Err(Error::ZeroTuple);
    }
    Ok(spec.c2.clone() * Ratio::from_integer(prime_power_product(&spec.primes, tuple)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::factor_rational_prime;
    use crate::quadring::FieldSpec;
    use num_bigint::BigInt;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn prime(p: i64, idx: usize) -> PrimeIdeal<BigInt> {
        factor_rational_prime(FieldSpec::gaussian(), &big(p)).unwrap().primes[idx].clone()
    }

    #[test]
    fn ord_mod_examples() {
        let g = FieldSpec::gaussian();
        let p5 = prime(5, 0);
        assert_eq!(ord_mod(&g.small(3, 0), p5.hnf()).unwrap(), big(4));
        let p3 = prime(3, 0);
        assert_eq!(ord_mod(&g.small(1, 1), p3.hnf()).unwrap(), big(8));
        assert_eq!(ord_mod(&g.one(), p3.hnf()).unwrap(), big(1));
        assert_eq!(ord_mod(&g.small(3, 0), p3.hnf()), Err(Error::NotInvertible));
    }

    #[test]
    fn stabilization_examples() {
        let g = FieldSpec::gaussian();
        // m = Ord mod p^2 = 20 (not Ord mod p = 4); 3^20 - 1 = 25 (mod 125).
        let s = stabilization(&g.small(3, 0), &prime(5, 0)).unwrap();
        assert_eq!((s.m, s.n0), (big(20), 2));
        let s = stabilization(&g.small(5, 0), &prime(2, 0)).unwrap();
        assert_eq!((s.m, s.n0), (big(1), 4));
        assert_eq!(stabilization(&g.small(3, 0), &prime(3, 0)), Err(Error::InPrime));
        assert_eq!(stabilization(&g.small(0, 1), &prime(5, 0)), Err(Error::RootOfUnity));
    }

    #[test]
    fn prime_power_examples() {
        let g = FieldSpec::gaussian();
        let p5 = prime(5, 0);
        assert_eq!(ord_prime_power(&g.small(3, 0), &p5, 2).unwrap(), big(20));
        assert_eq!(ord_mod(&g.small(3, 0), &p5.pow(2)).unwrap(), big(20));
        let p2 = prime(2, 0);
        let d = ord_prime_power_detailed(&g.small(5, 0), &p2, 6).unwrap();
        assert_eq!((d.order, d.used_closed_form), (big(2), true));
        let d = ord_prime_power_detailed(&g.small(5, 0), &p2, 4).unwrap();
        assert_eq!((d.order, d.used_closed_form), (big(1), false));
    }

    #[test]
    fn c2_and_lower_bound() {
        let g = FieldSpec::gaussian();
        let p5 = prime(5, 0);
        let spec = c2_constant(&g.small(3, 0), std::slice::from_ref(&p5)).unwrap();
        assert_eq!(spec.c2, Ratio::new(big(1), big(25)));
        // Actual order mod p^2 is 20 >= 1/25 * 5^2.
        assert_eq!(order_lower_bound(&spec, &[2]).unwrap(), Ratio::from_integer(big(1)));
        let p2 = prime(2, 0);
        let spec2 = c2_constant(&g.small(5, 0), std::slice::from_ref(&p2)).unwrap();
        assert_eq!(spec2.c2, Ratio::new(big(1), big(16)));
        assert_eq!(order_lower_bound(&spec2, &[4]).unwrap(), Ratio::new(big(1), big(4)));
        assert_eq!(c2_constant::<BigInt>(&g.small(3, 0), &[]), Err(Error::EmptyPrimeList));
        assert_eq!(order_lower_bound(&spec2, &[0]), Err(Error::ZeroTuple));
    }
}
