//! Canonical number systems `(theta, {0, .., n^2})` in `Z[i]` with
//! `theta = -n + i`.

use crate::error::{Error, Result};
use crate::quadring::{FieldElem, FieldSpec, QuadInt};
use crate::scalar::{bit_length, int, Int};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnsBasis<T> {
    n: u32,
    theta: QuadInt<T>,
    digit_count: T,
}

impl<T: Int> CnsBasis<T> {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("CNS base needs n >= 1".into()));
        }
        let g = FieldSpec::gaussian();
        let theta = g.small(-(n as i64), 1);
        Ok(Self {
            n,
            digit_count: theta.norm(),
            theta,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn theta(&self) -> &QuadInt<T> {
        &self.theta
    }

    /// `n^2 + 1`.
    pub fn digit_count(&self) -> &T {
        &self.digit_count
    }

    /// Digits of `gamma`, least significant first. Since `i = n (mod theta)`,
    /// the digit of `a + bi` is `(a + bn) mod (n^2 + 1)`.
    pub fn expand(&self, gamma: &QuadInt<T>) -> Result<Vec<T>> {
        if gamma.field().d() != -1 {
            return Err(Error::NotGaussian(gamma.field().d()));
        }
        let cap = 64 + 4 * bit_length(&gamma.norm());
        let n: T = int(self.n as i64);
        let mut digits = Vec::new();
        let mut cur = gamma.clone();
        while !cur.is_zero() {
            if digits.len() as u64 >= cap {
                return Err(Error::StepCap(cap));
            }
            let xi = (cur.x().clone() + cur.y().clone() * n.clone()).mod_floor(&self.digit_count);
            let rest = &cur - &gamma.field().from_int(xi.clone());
            cur = rest
                .exact_div(&self.theta)?
                .expect("theta divides gamma minus its residue");
            digits.push(xi);
        }
        Ok(digits)
    }

    /// Horner evaluation of `sum xi_k theta^k`.
    pub fn evaluate(&self, digits: &[T]) -> Result<QuadInt<T>> {
        let g = FieldSpec::gaussian();
        let mut acc = g.zero::<T>();
        for xi in digits.iter().rev() {
            if xi.is_negative() || *xi >= self.digit_count {
                return Err(Error::DigitOutOfRange(xi.to_string()));
            }
            acc = &(&acc * &self.theta) + &g.from_int(xi.clone());
        }
        Ok(acc)
    }

    /// All `sum_{k=-l}^{l} xi_k alpha^k` with `alpha = theta`, in the order of
    /// the digit vectors `(xi_{-l}, .., xi_l)` read as numbers in base `n^2+1`.
    pub fn dyadic_alpha_description(&self, ell: u32, cap: u64) -> Result<Vec<FieldElem<T>>> {
        let base = self.digit_count.to_u64().unwrap_or(u64::MAX);
        let width = 2 * ell + 1;
        let total = base
            .checked_pow(width)
            .filter(|&t| t <= cap)
            .ok_or_else(|| Error::CapExceeded {
                needed: format!("{base}^{width}"),
                cap,
            })?;
        let den = self.theta.pow(ell as u64);
        let mut digits = vec![T::zero(); width as usize];
        let mut out = Vec::with_capacity(total as usize);
        for _ in 0..total {
            // digits[0] is the coefficient of alpha^{-l}.
            out.push(FieldElem::new(self.evaluate(&digits)?, &den)?);
            for d in digits.iter_mut() {
                *d = d.clone() + T::one();
                if *d < self.digit_count {
                    break;
                }
                *d = T::zero();
            }
        }
        Ok(out)
    }
}

pub fn expand<T: Int>(gamma: &QuadInt<T>, basis: &CnsBasis<T>) -> Result<Vec<T>> {
    basis.expand(gamma)
}

pub fn evaluate<T: Int>(digits: &[T], basis: &CnsBasis<T>) -> Result<QuadInt<T>> {
    basis.evaluate(digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn digits(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&d| BigInt::from(d)).collect()
    }

    #[test]
    fn worked_expansion() {
        let b = CnsBasis::<BigInt>::new(2).unwrap();
        let g = FieldSpec::gaussian();
        assert_eq!(b.expand(&g.small(5, 0)).unwrap(), digits(&[0, 1, 3, 1]));
        assert_eq!(b.evaluate(&digits(&[0, 1, 3, 1])).unwrap(), g.small(5, 0));
        assert_eq!(b.expand(b.theta()).unwrap(), digits(&[0, 1]));
        assert!(b.expand(&g.zero()).unwrap().is_empty());
        assert_eq!(b.evaluate(&[]).unwrap(), g.zero());
        assert_eq!(b.evaluate(&digits(&[4])).unwrap(), g.small(4, 0));
    }

    #[test]
    fn rejects_bad_input() {
        let b = CnsBasis::<BigInt>::new(2).unwrap();
        assert!(matches!(b.evaluate(&digits(&[5])), Err(Error::DigitOutOfRange(_))));
        assert!(matches!(b.evaluate(&digits(&[-1])), Err(Error::DigitOutOfRange(_))));
        let h = FieldSpec::new(-2).unwrap();
        assert_eq!(b.expand(&h.small(1, 0)), Err(Error::NotGaussian(-2)));
        assert!(CnsBasis::<BigInt>::new(0).is_err());
    }

    #[test]
    fn alpha_description() {
        let b = CnsBasis::<BigInt>::new(2).unwrap();
        let zero_level = b.dyadic_alpha_description(0, 1000).unwrap();
        assert_eq!(zero_level.len(), 5);
        assert!(zero_level.iter().all(FieldElem::is_integral));
        let one = b.dyadic_alpha_description(1, 1000).unwrap();
        assert_eq!(one.len(), 125);
        for z in &one {
            assert!(z.mul_int(b.theta()).is_integral());
        }
        assert!(matches!(
            b.dyadic_alpha_description(3, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }
}
