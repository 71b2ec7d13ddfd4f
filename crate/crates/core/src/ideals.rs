//! Integral ideals as Hermite-normal-form lattices, splitting of rational
//! primes, and prime-ideal factorisation of elements.
//!
//! An ideal is the `Z`-lattice spanned by `a` and `b + c*w` with `c | a`,
//! `c | b` and `0 <= b < a`. Products, sums and membership reduce to 2x2
//! integer row reduction.

use std::fmt;

use crate::error::{Error, Result};
use crate::quadring::{FieldSpec, QuadInt};
use crate::scalar::{ext_gcd, factorize, int, inv_mod, is_prime, kronecker_prime, sqrt_mod_prime, Int};

/// Canonical HNF `{a, b + c*w}` of a non-zero integral ideal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdealHnf<T> {
    field: FieldSpec,
    a: T,
    b: T,
    c: T,
}

/// Row-reduces integer vectors `(x, y)` to the HNF basis `(a, 0), (b, c)`.
/// Returns `None` when the vectors do not span a rank-2 lattice.
fn hnf_of_vectors<T: Int>(vecs: impl IntoIterator<Item = (T, T)>) -> Option<(T, T, T)> {
    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
    for (x, y) in vecs {
        let (g, s, t) = ext_gcd(&c, &y);
        if g.is_zero() {
            a = a.gcd(&x);
        } else {
            let elim = (y.clone() / g.clone()) * b.clone() - (c.clone() / g.clone()) * x.clone();
            b = s * b + t * x;
            c = g;
            a = a.gcd(&elim);
        }
        if !a.is_zero() {
            b = b.mod_floor(&a);
        }
    }
    if a.is_zero() || c.is_zero() {
        return None;
    }
    Some((a, b, c))
}

impl<T: Int> IdealHnf<T> {
    /// HNF of the ideal generated by `gens`.
    pub fn from_generators(field: FieldSpec, gens: &[QuadInt<T>]) -> Result<Self> {
        let omega = field.omega::<T>();
        let mut vecs = Vec::with_capacity(2 * gens.len());
        for g in gens {
            if g.field() != field {
                return Err(Error::FieldMismatch(field.d(), g.field().d()));
            }
            if g.is_zero() {
                continue;
            }
            let gw = g * &omega;
            vecs.push((g.x().clone(), g.y().clone()));
            vecs.push(gw.into_parts());
        }
        let (a, b, c) = hnf_of_vectors(vecs).ok_or(Error::ZeroIdeal)?;
        let ideal = Self { field, a, b, c };
        debug_assert!(ideal.is_canonical());
        Ok(ideal)
    }

    pub fn principal(z: &QuadInt<T>) -> Result<Self> {
        Self::from_generators(z.field(), std::slice::from_ref(z))
    }

    /// The whole ring.
    pub fn unit(field: FieldSpec) -> Self {
        Self {
            field,
            a: T::one(),
            b: T::zero(),
            c: T::one(),
        }
    }

    fn from_lattice(field: FieldSpec, vecs: Vec<(T, T)>) -> Self {
        let (a, b, c) = hnf_of_vectors(vecs).expect("product of non-zero ideals has full rank");
        let ideal = Self { field, a, b, c };
        debug_assert!(ideal.is_canonical());
        ideal
    }

    fn is_canonical(&self) -> bool {
        self.a.is_positive()
            && self.c.is_positive()
            && self.a.is_multiple_of(&self.c)
            && self.b.is_multiple_of(&self.c)
            && !self.b.is_negative()
            && self.b < self.a
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// `(a, b, c)`.
    pub fn hnf(&self) -> (&T, &T, &T) {
        (&self.a, &self.b, &self.c)
    }

    /// `#(O_K / I) = a*c`.
    pub fn norm(&self) -> T {
        self.a.clone() * self.c.clone()
    }

    pub fn is_unit(&self) -> bool {
        self.a.is_one() && self.c.is_one()
    }

    /// The two `Z`-basis elements `a` and `b + c*w`.
    pub fn basis(&self) -> [QuadInt<T>; 2] {
        [
            self.field.from_int(self.a.clone()),
            self.field.elem(self.b.clone(), self.c.clone()),
        ]
    }

    pub fn contains(&self, z: &QuadInt<T>) -> bool {
        debug_assert_eq!(z.field(), self.field);
        if !z.y().is_multiple_of(&self.c) {
            return false;
        }
        let q = z.y().clone() / self.c.clone();
        (z.x().clone() - q * self.b.clone()).is_multiple_of(&self.a)
    }

    /// `other ⊆ self`, i.e. `self` divides `other`.
    pub fn contains_ideal(&self, other: &Self) -> bool {
        other.basis().iter().all(|g| self.contains(g))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.field, other.field, "mixed-field ideals");
        let [p0, p1] = self.basis();
        let [q0, q1] = other.basis();
        let vecs = [&p0 * &q0, &p0 * &q1, &p1 * &q0, &p1 * &q1]
            .into_iter()
            .map(QuadInt::into_parts)
            .collect();
        Self::from_lattice(self.field, vecs)
    }

    /// `self + other` (the gcd ideal).
    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.field, other.field, "mixed-field ideals");
        let vecs = self
            .basis()
            .into_iter()
            .chain(other.basis())
            .map(QuadInt::into_parts)
            .collect();
        Self::from_lattice(self.field, vecs)
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut acc = Self::unit(self.field);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn conj(&self) -> Self {
        let vecs = self.basis().iter().map(|g| g.conj().into_parts()).collect();
        Self::from_lattice(self.field, vecs)
    }

    /// Canonical residue `x' + y'*w` with `0 <= y' < c` and `0 <= x' < a`.
    pub fn reduce(&self, z: &QuadInt<T>) -> QuadInt<T> {
        let q = z.y().div_floor(&self.c);
        let y = z.y().clone() - q.clone() * self.c.clone();
        let x = (z.x().clone() - q * self.b.clone()).mod_floor(&self.a);
        self.field.elem(x, y)
    }
}

impl<T: Int> fmt::Display for IdealHnf<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

/// How a rational prime decomposes in `O_K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitKind {
    Ramified,
    Split,
    Inert,
}

/// A prime ideal above the rational prime `p`, with ramification index `e`
/// and residual degree `f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdeal<T> {
    hnf: IdealHnf<T>,
    p: T,
    e: u32,
    f: u32,
    /// `r` in the two-element form `(p, w - r)`; `None` for inert primes.
    root: Option<T>,
}

impl<T: Int> PrimeIdeal<T> {
    pub fn hnf(&self) -> &IdealHnf<T> {
        &self.hnf
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn root(&self) -> Option<&T> {
        self.root.as_ref()
    }

    pub fn kind(&self) -> SplitKind {
        match (self.e, self.f) {
            (2, _) => SplitKind::Ramified,
            (_, 2) => SplitKind::Inert,
            _ => SplitKind::Split,
        }
    }

    pub fn norm(&self) -> T {
        self.hnf.norm()
    }

    pub fn contains(&self, z: &QuadInt<T>) -> bool {
        self.hnf.contains(z)
    }

    pub fn pow(&self, k: u32) -> IdealHnf<T> {
        self.hnf.pow(k)
    }

    /// Conjugate prime (itself unless split).
    pub fn conj(&self) -> Self {
        let root = self.root.as_ref().map(|r| {
            let t: T = int(self.hnf.field.omega_trace());
            (t - r.clone()).mod_floor(&self.p)
        });
        Self {
            hnf: self.hnf.conj(),
            p: self.p.clone(),
            e: self.e,
            f: self.f,
            root,
        }
    }
}

impl<T: Int> fmt::Display for PrimeIdeal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.root {
            Some(r) => write!(f, "({}, w-{})", self.p, r),
            None => write!(f, "({})", self.p),
        }
    }
}

/// Decomposition of `p*O_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting<T> {
    pub p: T,
    pub kind: SplitKind,
    /// One prime (ramified, inert) or two conjugate primes (split), ordered
    /// by the root `r` of `(p, w - r)`.
    pub primes: Vec<PrimeIdeal<T>>,
}

impl<T: Int> Splitting<T> {
    /// `p*O_K` as the product of its primes with multiplicity.
    pub fn product(&self) -> IdealHnf<T> {
        let field = self.primes[0].hnf.field;
        self.primes
            .iter()
            .fold(IdealHnf::unit(field), |acc, q| acc.mul(&q.hnf.pow(q.e)))
    }
}

/// Roots of the minimal polynomial `X^2 - t*X + n` of `w` modulo `p`, ascending.
fn omega_roots_mod<T: Int>(field: FieldSpec, p: &T) -> Vec<T> {
    let t: T = int(field.omega_trace());
    let n: T = int(field.omega_norm());
    let two = int::<T>(2);
    if *p == two {
        return [T::zero(), T::one()]
            .into_iter()
            .filter(|r| (r.clone() * r.clone() - t.clone() * r.clone() + n.clone()).is_even())
            .collect();
    }
    let disc: T = int(field.disc());
    let Some(s) = sqrt_mod_prime(&disc, p) else {
        return Vec::new();
    };
    let inv2 = inv_mod(&two, p).expect("p odd");
    let mut roots: Vec<T> = [t.clone() + s.clone(), t - s]
        .into_iter()
        .map(|v| (v * inv2.clone()).mod_floor(p))
        .collect();
    roots.sort();
    roots.dedup();
    roots
}

/// Splitting of the rational prime `p` in `O_K`.
pub fn factor_rational_prime<T: Int>(field: FieldSpec, p: &T) -> Result<Splitting<T>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let disc: T = int(field.disc());
    let ramified = disc.is_multiple_of(p);
    let roots = omega_roots_mod(field, p);
    let kind = match (ramified, roots.len()) {
        (true, _) => SplitKind::Ramified,
        (false, 2) => SplitKind::Split,
        (false, _) => SplitKind::Inert,
    };
    debug_assert_eq!(
        kronecker_prime(&disc, p),
        match kind {
            SplitKind::Ramified => 0,
            SplitKind::Split => 1,
            SplitKind::Inert => -1,
        }
    );
    let make = |r: &T, e: u32| -> Result<PrimeIdeal<T>> {
        let gens = [field.from_int(p.clone()), field.elem(-r.clone(), T::one())];
        let hnf = IdealHnf::from_generators(field, &gens)?;
        debug_assert_eq!(hnf.norm(), p.clone());
        Ok(PrimeIdeal {
            hnf,
            p: p.clone(),
            e,
            f: 1,
            root: Some(r.clone()),
        })
    };
    let primes = match kind {
        SplitKind::Ramified => vec![make(&roots[0], 2)?],
        SplitKind::Split => vec![make(&roots[0], 1)?, make(&roots[1], 1)?],
        SplitKind::Inert => vec![PrimeIdeal {
            hnf: IdealHnf::principal(&field.from_int(p.clone()))?,
            p: p.clone(),
            e: 1,
            f: 2,
            root: None,
        }],
    };
    Ok(Splitting {
        p: p.clone(),
        kind,
        primes,
    })
}

/// Ascending powers of one prime ideal, computed on demand.
#[derive(Clone, Debug)]
pub struct PrimePowers<T> {
    powers: Vec<IdealHnf<T>>,
    base: IdealHnf<T>,
}

impl<T: Int> PrimePowers<T> {
    pub fn new(base: &IdealHnf<T>) -> Self {
        Self {
            powers: vec![IdealHnf::unit(base.field)],
            base: base.clone(),
        }
    }

    pub fn get(&mut self, k: usize) -> &IdealHnf<T> {
        while self.powers.len() <= k {
            let next = self.powers.last().expect("non-empty").mul(&self.base);
            self.powers.push(next);
        }
        &self.powers[k]
    }

    /// Largest `k` with `z ∈ base^k`.
    pub fn valuation(&mut self, z: &QuadInt<T>) -> Result<u32> {
        if z.is_zero() {
            return Err(Error::ZeroElement);
        }
        let mut k = 0;
        while self.get(k + 1).contains(z) {
            k += 1;
        }
        Ok(k as u32)
    }
}

/// Largest `k` with `z ∈ prime^k`.
pub fn valuation<T: Int>(z: &QuadInt<T>, prime: &PrimeIdeal<T>) -> Result<u32> {
    PrimePowers::new(&prime.hnf).valuation(z)
}

/// `element * O_K` as a product of prime powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementFactorization<T> {
    pub element: QuadInt<T>,
    pub factors: Vec<(PrimeIdeal<T>, u32)>,
}

impl<T: Int> ElementFactorization<T> {
    pub fn primes(&self) -> impl Iterator<Item = &PrimeIdeal<T>> {
        self.factors.iter().map(|(q, _)| q)
    }

    /// HNF of the product of all prime powers.
    pub fn reconstruct(&self) -> IdealHnf<T> {
        let field = self.element.field();
        self.factors
            .iter()
            .fold(IdealHnf::unit(field), |acc, (q, b)| acc.mul(&q.pow(*b)))
    }

    /// `prod N(p_j)^{b_j}`.
    pub fn norm_product(&self) -> T {
        self.factors
            .iter()
            .fold(T::one(), |acc, (q, b)| acc * crate::scalar::pow(&q.norm(), *b as u64))
    }
}

/// Factors `alpha * O_K` into prime ideals.
pub fn factor_element<T: Int>(alpha: &QuadInt<T>) -> Result<ElementFactorization<T>> {
    let n = alpha.norm();
    if n.is_zero() || n.is_one() {
        return Err(Error::UnitOrZero);
    }
    let mut factors = Vec::new();
    for (p, _) in factorize(&n) {
        for q in factor_rational_prime(alpha.field(), &p)?.primes {
            let v = valuation(alpha, &q)?;
            if v > 0 {
                factors.push((q, v));
            }
        }
    }
    Ok(ElementFactorization {
        element: alpha.clone(),
        factors,
    })
}

/// `(alpha) + (beta) = O_K`.
pub fn are_coprime<T: Int>(alpha: &QuadInt<T>, beta: &QuadInt<T>) -> Result<bool> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::ZeroElement);
    }
    if alpha.field() != beta.field() {
        return Err(Error::FieldMismatch(alpha.field().d(), beta.field().d()));
    }
    let ideal = IdealHnf::from_generators(alpha.field(), &[alpha.clone(), beta.clone()])?;
    Ok(ideal.is_unit())
}

pub fn ideal_from_generators<T: Int>(field: FieldSpec, gens: &[QuadInt<T>]) -> Result<IdealHnf<T>> {
    IdealHnf::from_generators(field, gens)
}

pub fn ideal_mul<T: Int>(i: &IdealHnf<T>, j: &IdealHnf<T>) -> Result<IdealHnf<T>> {
    if i.field != j.field {
        return Err(Error::FieldMismatch(i.field.d(), j.field.d()));
    }
    Ok(i.mul(j))
}

pub fn reduce_mod<T: Int>(z: &QuadInt<T>, ideal: &IdealHnf<T>) -> QuadInt<T> {
    ideal.reduce(z)
}

/// `prod primes[j]^{exps[j]}`.
pub fn ideal_product<T: Int>(field: FieldSpec, primes: &[PrimeIdeal<T>], exps: &[u32]) -> IdealHnf<T> {
    primes
        .iter()
        .zip(exps)
        .fold(IdealHnf::unit(field), |acc, (q, &n)| acc.mul(&q.pow(n)))
}
