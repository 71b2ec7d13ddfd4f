//! `D_alpha ∩ S`: hypothesis checks, minimal tuples, the certified level `n0`
//! beyond which no tuple contributes, and exact enumeration of a level.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::fractal::{CoveringConstants, IfsSpec};
use crate::ideals::{are_coprime, factor_element, ideal_product, valuation, ElementFactorization, PrimeIdeal};
use crate::membership::{Coding, MembershipOracle};
use crate::ordercalc::{c2_constant, prime_power_product, LowerBoundSpec};
use crate::quadring::{FieldElem, FieldSpec, QuadInt};
use crate::scalar::{bit_length, int, isqrt, pow, Int};

/// Default limit on the number of lattice candidates of one level.
pub const DEFAULT_CAP: u64 = 100_000_000;

/// Which part of the finiteness theorem certifies the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TheoremCase {
    /// `alpha, beta` coprime and `sigma < 1`.
    CaseI,
    /// Additionally `O_K` a UFD and `alpha` coprime to its conjugate; `sigma < 2`.
    CaseII,
}

impl TheoremCase {
    pub fn name(self) -> &'static str {
        match self {
            TheoremCase::CaseI => "case_i",
            TheoremCase::CaseII => "case_ii",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreconditionReport<T> {
    pub alpha_beta_coprime: bool,
    pub case_ii_eligible: bool,
    pub alpha_factorization: ElementFactorization<T>,
    pub sigma: f64,
    pub case_i_applicable: bool,
    pub case_ii_applicable: bool,
    /// Case II when both apply: its exponent `2 - sigma` beats `(1 - sigma)/l`.
    pub applicable_case: Option<TheoremCase>,
}

pub fn preconditions<T: Int>(alpha: &QuadInt<T>, spec: &IfsSpec<T>) -> Result<PreconditionReport<T>> {
    if alpha.field() != spec.field() {
        return Err(Error::FieldMismatch(spec.field().d(), alpha.field().d()));
    }
    if alpha.norm() < int::<T>(2) {
        return Err(Error::Precondition(format!("|alpha| must exceed 1, got {alpha}")));
    }
    let coprime = are_coprime(alpha, spec.beta())?;
    let eligible = spec.field().is_ufd() && are_coprime(alpha, &alpha.conj())?;
    // sigma < 1 iff #A^2 < N(beta); sigma < 2 iff #A < N(beta).
    let count: T = int(spec.digit_count() as i64);
    let b = spec.beta().norm();
    let case_i = coprime && count.clone() * count.clone() < b;
    let case_ii = coprime && eligible && count < b;
    let applicable_case = if case_ii {
        Some(TheoremCase::CaseII)
    } else if case_i {
        Some(TheoremCase::CaseI)
    } else {
        None
    };
    Ok(PreconditionReport {
        alpha_beta_coprime: coprime,
        case_ii_eligible: eligible,
        alpha_factorization: factor_element(alpha)?,
        sigma: spec.similarity_dimension(),
        case_i_applicable: case_i,
        case_ii_applicable: case_ii,
        applicable_case,
    })
}

/// `v_p(z)` for `z = num/den` in `K`.
fn field_valuation<T: Int>(z: &FieldElem<T>, prime: &PrimeIdeal<T>) -> Result<i64> {
    let vn = valuation(z.num(), prime)? as i64;
    let vd = valuation(&z.field().from_int(z.den().clone()), prime)? as i64;
    Ok(vn - vd)
}

/// Whether `z * I` lies in `O_K`.
fn scaled_ideal_integral<T: Int>(z: &FieldElem<T>, ideal: &crate::ideals::IdealHnf<T>) -> bool {
    ideal.basis().iter().all(|g| (z.num() * g).div_int(z.den()).is_some())
}

/// The componentwise least exponents `n_j` with `z * prod p_j^{n_j}` integral,
/// over the primes of `fact`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinimalTuple {
    pub exponents: Vec<u32>,
}

impl MinimalTuple {
    pub fn sum(&self) -> u64 {
        self.exponents.iter().map(|&n| n as u64).sum()
    }
}

/// `n_j = max(0, -v_{p_j}(z))`. Fails when `z` is not in `D_alpha`.
pub fn minimal_tuple<T: Int>(z: &FieldElem<T>, fact: &ElementFactorization<T>) -> Result<MinimalTuple> {
    if z.is_zero() {
        return Ok(MinimalTuple {
            exponents: vec![0; fact.factors.len()],
        });
    }
    let mut exponents = Vec::with_capacity(fact.factors.len());
    for (q, _) in &fact.factors {
        exponents.push((-field_valuation(z, q)?).max(0) as u32);
    }
    let tuple = MinimalTuple { exponents };
    let k = alpha_exponent(&tuple, fact);
    if !z.mul_int(&fact.element.pow(k as u64)).is_integral() {
        return Err(Error::NotInDAlpha);
    }
    Ok(tuple)
}

/// Least `k` with `alpha^k * z` integral, given the minimal tuple of `z`.
fn alpha_exponent<T>(tuple: &MinimalTuple, fact: &ElementFactorization<T>) -> u32 {
    tuple
        .exponents
        .iter()
        .zip(&fact.factors)
        .map(|(&n, (_, b))| n.div_ceil(*b))
        .max()
        .unwrap_or(0)
}

/// Checks integrality at the tuple and its failure one step below in every
/// non-zero coordinate.
pub fn tuple_is_minimal<T: Int>(z: &FieldElem<T>, fact: &ElementFactorization<T>, tuple: &MinimalTuple) -> bool {
    let field = z.field();
    let primes: Vec<PrimeIdeal<T>> = fact.primes().cloned().collect();
    if !scaled_ideal_integral(z, &ideal_product(field, &primes, &tuple.exponents)) {
        return false;
    }
    (0..tuple.exponents.len()).filter(|&j| tuple.exponents[j] > 0).all(|j| {
        let mut lower = tuple.exponents.clone();
        lower[j] -= 1;
        !scaled_ideal_integral(z, &ideal_product(field, &primes, &lower))
    })
}

/// Certified level: for every tuple with `sum n_j >= n0` the orbit bound
/// `period <= #A^k(u)` contradicts the order bound `period >= c2 * X`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedBound<T: Clone + num_integer::Integer> {
    pub case: TheoremCase,
    pub n0: u32,
    /// Least `n0` from the floating form `2^{n0 r} > c1/c2` before the exact
    /// check raised it.
    pub formula_n0: u32,
    pub c1: f64,
    pub c2: Ratio<T>,
    pub sigma: f64,
    /// Number of primes of `alpha`.
    pub ell: usize,
    /// From level `k_star` of the cover on, `c2 X > #A^k` holds for every `X`
    /// reaching that level.
    pub k_star: u32,
    /// Every `X >= x_threshold` reaches level `k_star`.
    pub x_threshold: T,
    /// Guaranteed lower bound on `X` once `sum n_j >= n0`.
    pub x_min: T,
}

impl<T: Int> CertifiedBound<T> {
    /// `X` for a tuple: `prod_p p^{max ceil(n_j/e_j)}` (case I) or
    /// `prod p_j^{n_j}` (case II).
    pub fn tuple_size(&self, primes: &[PrimeIdeal<T>], tuple: &[u32]) -> T {
        match self.case {
            TheoremCase::CaseI => prime_power_product(primes, tuple),
            TheoremCase::CaseII => primes
                .iter()
                .zip(tuple)
                .fold(T::one(), |acc, (q, &n)| acc * pow(q.p(), n as u64)),
        }
    }

    /// `N(u)` for the denominator attached to `X`: `X^2` (case I), `X` (case II).
    pub fn u_norm(&self, x: &T) -> T {
        match self.case {
            TheoremCase::CaseI => x.clone() * x.clone(),
            TheoremCase::CaseII => x.clone(),
        }
    }

    /// The contradiction `c2 * X > period_bound(N(u))` at one tuple, exactly.
    pub fn chain_holds(&self, covering: &CoveringConstants<T>, primes: &[PrimeIdeal<T>], tuple: &[u32]) -> bool {
        let x = self.tuple_size(primes, tuple);
        let bound = covering.period_bound(&self.u_norm(&x));
        Ratio::from_integer(x) * self.c2.clone() > Ratio::from_integer(bound)
    }
}

fn ln_int<T: Int>(v: &T) -> f64 {
    match v.to_f64() {
        Some(f) if f.is_finite() => f.ln(),
        _ => bit_length(v) as f64 * std::f64::consts::LN_2,
    }
}

/// Smallest `n0` for which the exact certificate holds, starting from the
/// floating formula. `None` when no case applies.
pub fn certified_bound<T: Int>(
    report: &PreconditionReport<T>,
    covering: &CoveringConstants<T>,
    lb: &LowerBoundSpec<T>,
) -> Option<CertifiedBound<T>> {
    let case = report.applicable_case?;
    let ell = lb.primes.len();
    let sigma = covering.sigma;
    let rate = match case {
        TheoremCase::CaseI => (1.0 - sigma) / (2.0 * ell as f64),
        TheoremCase::CaseII => (2.0 - sigma) / 2.0,
    };
    if rate <= 0.0 {
        return None;
    }
    let c1 = covering.c1();
    let m = lb.c2.denom().clone();
    let log_ratio = c1.ln() + ln_int(&m);
    let mut n0 = if log_ratio < 0.0 {
        1
    } else {
        ((log_ratio / (rate * std::f64::consts::LN_2)).floor() as u32 + 1).max(1)
    };
    let formula_n0 = n0;

    // Certificate for `c2 X > #A^k(X)`: once k(X) >= 1, minimality of k gives
    // `9 N(u) P > q B^{k-1}`; so `q B^{k-1} >= 9 P M^t #A^{tk}` suffices, and
    // that inequality persists as k grows. `t` is the power of X in N(u).
    let p = covering.radius_sq.numer().clone();
    let q = covering.radius_sq.denom().clone();
    let b = covering.beta_norm.clone();
    let a: T = int(covering.digit_count as i64);
    let t: u64 = match case {
        TheoremCase::CaseI => 2,
        TheoremCase::CaseII => 1,
    };
    let nine: T = int(9);
    let rhs_base = nine.clone() * p.clone() * pow(&m, t);
    let mut k_star = 1u32;
    let mut bk = T::one();
    let mut ak = pow(&a, t);
    while q.clone() * bk.clone() < rhs_base.clone() * ak.clone() {
        k_star += 1;
        bk = bk * b.clone();
        ak = ak * pow(&a, t);
    }
    // Least X with `9 P X^t > q B^{k*-1}`.
    let target = q * bk;
    let holds = |x: &T| nine.clone() * p.clone() * pow(x, t) > target;
    let mut hi = T::one();
    while !holds(&hi) {
        hi = hi * int::<T>(2);
    }
    let mut lo = T::zero();
    while hi.clone() - lo.clone() > T::one() {
        let mid = (lo.clone() + hi.clone()) / int::<T>(2);
        if holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let x_threshold = hi;
    let x_min_of = |n0: u32| -> T {
        let e = match case {
            TheoremCase::CaseI => (n0 as usize).div_ceil(ell).div_ceil(2) as u64,
            TheoremCase::CaseII => n0 as u64,
        };
        pow(&int::<T>(2), e)
    };
    while x_min_of(n0) < x_threshold {
        n0 += 1;
    }
    Some(CertifiedBound {
        case,
        n0,
        formula_n0,
        c1,
        c2: lb.c2.clone(),
        sigma,
        ell,
        k_star,
        x_threshold,
        x_min: x_min_of(n0),
    })
}

/// One point of `D_alpha ∩ S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntersectionPoint<T> {
    pub value: FieldElem<T>,
    /// `value = numerator / alpha^den_pow` with `den_pow` least.
    pub numerator: QuadInt<T>,
    pub den_pow: u32,
    pub tuple: MinimalTuple,
    pub coding: Coding<T>,
}

impl<T: Int> IntersectionPoint<T> {
    /// `beta^m - 1 in prod p_j^{n_j}` for the coding period `m`.
    pub fn period_congruence_holds(&self, beta: &QuadInt<T>, fact: &ElementFactorization<T>) -> bool {
        let primes: Vec<PrimeIdeal<T>> = fact.primes().cloned().collect();
        let ideal = ideal_product(beta.field(), &primes, &self.tuple.exponents);
        let bm1 = &beta.pow(self.coding.period.len() as u64) - &beta.field().one::<T>();
        ideal.contains(&bm1)
    }
}

fn floor_div<T: Int>(a: &T, b: &T) -> T {
    a.div_floor(b)
}

fn ceil_div<T: Int>(a: &T, b: &T) -> T {
    -((-a.clone()).div_floor(b))
}

/// Ring elements `w` with `|w - c/den|^2 <= radius_sq`, exactly.
pub fn lattice_points_in_disk<T: Int>(
    field: FieldSpec,
    center: &QuadInt<T>,
    den: &T,
    radius_sq: &Ratio<T>,
) -> Vec<QuadInt<T>> {
    // With X = x den - cx, Y = y den - cy: 4 N(X + Y w) = (2X + tY)^2 + |D| Y^2.
    let t: T = int(field.omega_trace());
    let abs_disc: T = int(-field.disc());
    let (p, q) = (radius_sq.numer().clone(), radius_sq.denom().clone());
    let k = int::<T>(4) * p * den.clone() * den.clone();
    let (cx, cy) = (center.x().clone(), center.y().clone());
    let two: T = int(2);
    let y_max = isqrt(&(k.clone() / (q.clone() * abs_disc.clone())));
    let mut out = Vec::new();
    let mut y = ceil_div(&(cy.clone() - y_max.clone()), den);
    let y_hi = floor_div(&(cy.clone() + y_max), den);
    while y <= y_hi {
        let yy = y.clone() * den.clone() - cy.clone();
        let rest = k.clone() - q.clone() * abs_disc.clone() * yy.clone() * yy.clone();
        if !rest.is_negative() {
            let s = isqrt(&(rest / q.clone()));
            let shift = two.clone() * cx.clone() - t.clone() * yy.clone();
            let step = two.clone() * den.clone();
            let mut x = ceil_div(&(shift.clone() - s.clone()), &step);
            let x_hi = floor_div(&(shift + s), &step);
            while x <= x_hi {
                out.push(field.elem(x.clone(), y.clone()));
                x = x + T::one();
            }
        }
        y = y + T::one();
    }
    out
}

/// Estimated lattice points in a disk of squared radius `e^{ln_r2}`.
fn disk_cost(field: FieldSpec, ln_r2: f64) -> f64 {
    let root_disc = (-field.disc() as f64).sqrt();
    let r = (0.5 * ln_r2).exp();
    let area = std::f64::consts::PI * r * r * 2.0 / root_disc;
    let rows = 2.0 * r * 2.0 / root_disc + 1.0;
    area + 2.0 * rows + 1.0
}

/// Depth of the cylinder cover used for candidates and its estimated cost.
fn choose_depth<T: Int>(spec: &IfsSpec<T>, ln_level_r2: f64, cap: u64) -> (u32, f64) {
    let ln_b = ln_int(&spec.beta().norm());
    let ln_a = (spec.digit_count() as f64).ln();
    let mut best = (0, disk_cost(spec.field(), ln_level_r2));
    for n in 1..=64u32 {
        let words = n as f64 * ln_a;
        if words > (cap as f64).ln() {
            break;
        }
        let cost = words.exp() * disk_cost(spec.field(), ln_level_r2 - n as f64 * ln_b);
        if cost < best.1 {
            best = (n, cost);
        }
    }
    best
}

/// All points `w / alpha^level` of `S`, sorted by size then coordinates.
/// Candidates come from covering `S` by the `#A^n` cylinder disks
/// `phi_word(disk(0, R'))`; each is then decided by the orbit graph.
pub fn enumerate_level<T: Int>(
    level: u32,
    alpha: &QuadInt<T>,
    spec: &IfsSpec<T>,
    cap: u64,
) -> Result<Vec<IntersectionPoint<T>>> {
    let fact = factor_element(alpha)?;
    enumerate_with(level, &fact, spec, cap)
}

fn enumerate_with<T: Int>(
    level: u32,
    fact: &ElementFactorization<T>,
    spec: &IfsSpec<T>,
    cap: u64,
) -> Result<Vec<IntersectionPoint<T>>> {
    let alpha = &fact.element;
    if alpha.field() != spec.field() {
        return Err(Error::FieldMismatch(spec.field().d(), alpha.field().d()));
    }
    let field = spec.field();
    let alpha_n = alpha.pow(level as u64);
    let d_n = alpha_n.norm();
    let radius_sq = spec.bounding_radius_sq();
    let ln_r2 = ln_int(radius_sq.numer()) - ln_int(radius_sq.denom()) + ln_int(&d_n);
    let (depth, cost) = choose_depth(spec, ln_r2, cap);
    if cost.is_nan() || cost > cap as f64 {
        return Err(Error::CapExceeded {
            needed: format!("{cost:.3e}"),
            cap,
        });
    }

    // Cylinder of word a_1..a_n: center C/beta^n with C = sum a_j beta^{n-j};
    // in w-coordinates center C alpha^N conj(beta^n) / B^n, radius^2 R'^2 D_N / B^n.
    let beta = spec.beta();
    let b_n = pow(&beta.norm(), depth as u64);
    let scale = &alpha_n * &beta.conj().pow(depth as u64);
    let cyl_r2 = radius_sq.clone() * Ratio::new(d_n.clone(), b_n.clone());
    let mut candidates: HashSet<QuadInt<T>> = HashSet::new();
    let mut stack = vec![(0u32, field.zero::<T>())];
    while let Some((n, c)) = stack.pop() {
        if n == depth {
            candidates.extend(lattice_points_in_disk(field, &(&c * &scale), &b_n, &cyl_r2));
            continue;
        }
        let bc = &c * beta;
        for a in spec.digits() {
            stack.push((n + 1, &bc + a));
        }
    }

    let mut oracles: HashMap<T, MembershipOracle<'_, T>> = HashMap::new();
    let mut points = Vec::new();
    for w in candidates {
        let z = FieldElem::new(w, &alpha_n)?;
        let oracle = match oracles.entry(z.den().clone()) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(MembershipOracle::new(spec, z.den().clone())?),
        };
        let Some(coding) = oracle.coding(z.num())? else {
            continue;
        };
        let tuple = minimal_tuple(&z, fact)?;
        let den_pow = alpha_exponent(&tuple, fact);
        let numerator = z
            .mul_int(&alpha.pow(den_pow as u64))
            .to_integral()
            .expect("alpha^den_pow clears the denominator");
        points.push(IntersectionPoint {
            value: z,
            numerator,
            den_pow,
            tuple,
            coding,
        });
    }
    points.sort_by(|a, b| a.value.cmp_by_size(&b.value));
    Ok(points)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Enumerate the certified level `n0`; if that exceeds the cap, fall back
    /// to level `fallback_nmax`.
    Certified { fallback_nmax: u32 },
    /// Enumerate every level up to `nmax`.
    Bounded { nmax: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionReport<T: Clone + num_integer::Integer> {
    pub preconditions: PreconditionReport<T>,
    pub covering: CoveringConstants<T>,
    pub lower_bound: Option<LowerBoundSpec<T>>,
    pub certified: Option<CertifiedBound<T>>,
    /// The level actually enumerated; it contains all lower levels.
    pub level: u32,
    pub points: Vec<IntersectionPoint<T>>,
    /// True iff the enumerated level covers every tuple below `n0`, so the
    /// point list is all of `D_alpha ∩ S`.
    pub exhausted: bool,
}

pub fn full_intersection<T: Int>(
    alpha: &QuadInt<T>,
    spec: &IfsSpec<T>,
    mode: Mode,
    cap: u64,
) -> Result<IntersectionReport<T>> {
    let report = preconditions(alpha, spec)?;
    let covering = spec.covering_constants();
    let (lower_bound, certified) = if report.applicable_case.is_some() {
        let primes: Vec<PrimeIdeal<T>> = report.alpha_factorization.primes().cloned().collect();
        let lb = c2_constant(spec.beta(), &primes)?;
        let cert = certified_bound(&report, &covering, &lb);
        (Some(lb), cert)
    } else {
        (None, None)
    };
    let fact = &report.alpha_factorization;
    let (level, points) = match mode {
        Mode::Certified { fallback_nmax } => {
            let cert = certified.as_ref().ok_or(Error::NoApplicableCase)?;
            match enumerate_with(cert.n0, fact, spec, cap) {
                Ok(points) => (cert.n0, points),
                Err(Error::CapExceeded { .. }) => (fallback_nmax, enumerate_with(fallback_nmax, fact, spec, cap)?),
                Err(e) => return Err(e),
            }
        }
        Mode::Bounded { nmax } => (nmax, enumerate_with(nmax, fact, spec, cap)?),
    };
    let exhausted = certified.as_ref().is_some_and(|c| level >= c.n0);
    Ok(IntersectionReport {
        preconditions: report,
        covering,
        lower_bound,
        certified,
        level,
        points,
        exhausted,
    })
}
