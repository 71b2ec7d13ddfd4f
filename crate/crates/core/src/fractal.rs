//! Geometry of the attractor `S = { sum_k a_k / beta^k : a_k in A }`.
//!
//! Certificates never touch floating point: the attractor radius is a rational
//! over-approximation `R'^2 >= (max|a| / (|beta| - 1))^2` decided by exact
//! surd comparison, and covering numbers come from the cylinder cover
//! `N_delta(S) <= #A^k` with `R' / |beta|^k <= delta`. Floats appear only in
//! the dimension value, point sampling and the box-counting diagnostic.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadring::{FieldSpec, QuadInt};
use crate::scalar::{int, pow, Int};

/// Sign of `a + b*sqrt(n)` for integers `a`, `b` and `n >= 0`.
pub fn sign_add_sqrt<T: Int>(a: &T, b: &T, n: &T) -> Ordering {
    assert!(!n.is_negative(), "square root of a negative integer");
    let zero = T::zero();
    if b.is_zero() || n.is_zero() {
        return a.cmp(&zero);
    }
    let sa = a.cmp(&zero);
    let sb = b.cmp(&zero);
    match (sa, sb) {
        (Ordering::Less, Ordering::Less) | (Ordering::Equal, Ordering::Less) => Ordering::Less,
        (Ordering::Greater, Ordering::Greater) | (Ordering::Equal, Ordering::Greater) => Ordering::Greater,
        (Ordering::Greater, Ordering::Less) => {
            // a - |b| sqrt(n): compare a^2 with b^2 n
            (a.clone() * a.clone()).cmp(&(b.clone() * b.clone() * n.clone()))
        }
        (Ordering::Less, Ordering::Greater) => (b.clone() * b.clone() * n.clone()).cmp(&(a.clone() * a.clone())),
        (_, Ordering::Equal) => unreachable!("b is non-zero"),
    }
}

/// Largest denominator tried for the rational radius bound.
pub const RADIUS_DENOMINATOR_LIMIT: i64 = 64;

/// The pair `(beta, A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IfsSpec<T: Clone + num_integer::Integer> {
    field: FieldSpec,
    beta: QuadInt<T>,
    digits: Vec<QuadInt<T>>,
    radius_sq: Ratio<T>,
}

/// Explicit constants of the covering chain
/// `#C <= N_delta(S) <= #A^k(delta) <= (|beta| R' / delta)^sigma`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringConstants<T: Clone + num_integer::Integer> {
    pub radius_sq: Ratio<T>,
    pub sigma: f64,
    pub digit_count: usize,
    pub beta_norm: T,
}

impl<T: Int> CoveringConstants<T> {
    fn radius(&self) -> f64 {
        ratio_to_f64(&self.radius_sq).sqrt()
    }

    /// `c1 = (3 |beta| R')^sigma`, the constant of the period bound
    /// `period <= c1 |u|^sigma`.
    pub fn c1(&self) -> f64 {
        let beta_abs = self.beta_norm.to_f64().unwrap_or(f64::INFINITY).sqrt();
        (3.0 * beta_abs * self.radius()).powf(self.sigma)
    }

    /// `#A^k` with `k` least such that `9 u_norm R'^2 <= N(beta)^k`.
    pub fn period_bound(&self, u_norm: &T) -> T {
        assert!(u_norm.is_positive(), "u_norm must be positive");
        let delta_sq = Ratio::new(T::one(), int::<T>(9) * u_norm.clone());
        let k = covering_level(&self.radius_sq, &self.beta_norm, &delta_sq);
        pow(&int::<T>(self.digit_count as i64), k as u64)
    }

    /// `(3 |beta| R' sqrt(u_norm))^sigma`.
    pub fn c1_closed_form(&self, u_norm: f64) -> f64 {
        self.c1() * u_norm.sqrt().powf(self.sigma)
    }
}

pub(crate) fn ratio_to_f64<T: Int>(r: &Ratio<T>) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `P/q >= M / (sqrt(B) - 1)^2`, i.e. `P(B + 1) - qM - 2P sqrt(B) >= 0`.
fn radius_bound_holds<T: Int>(p: &T, q: &T, max_norm: &T, beta_norm: &T) -> bool {
    let lin = p.clone() * (beta_norm.clone() + T::one()) - q.clone() * max_norm.clone();
    let coef = -(int::<T>(2) * p.clone());
    sign_add_sqrt(&lin, &coef, beta_norm) != Ordering::Less
}

/// Least `P/q` (with `q <= 64`) bounding `(max|a| / (|beta| - 1))^2` from above.
fn minimal_radius_sq<T: Int>(max_norm: &T, beta_norm: &T) -> Ratio<T> {
    let mut best: Option<Ratio<T>> = None;
    for q in 1..=RADIUS_DENOMINATOR_LIMIT {
        let q: T = int(q);
        // Exponential then binary search for the least valid numerator.
        let mut hi = T::one();
        while !radius_bound_holds(&hi, &q, max_norm, beta_norm) {
            hi = hi * int::<T>(2);
        }
        let mut lo = T::zero();
        while hi.clone() - lo.clone() > T::one() {
            let mid = (lo.clone() + hi.clone()) / int::<T>(2);
            if radius_bound_holds(&mid, &q, max_norm, beta_norm) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let cand = Ratio::new(hi, q);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.expect("at least one denominator")
}

impl<T: Int> IfsSpec<T> {
    pub fn new(beta: QuadInt<T>, digits: Vec<QuadInt<T>>) -> Result<Self> {
        let field = beta.field();
        if beta.norm() < int::<T>(2) {
            return Err(Error::InvalidIfs(format!(
                "|beta| must exceed 1 (norm {})",
                beta.norm()
            )));
        }
        if digits.len() < 2 {
            return Err(Error::InvalidIfs("need at least two digits".into()));
        }
        for (i, a) in digits.iter().enumerate() {
            if a.field() != field {
                return Err(Error::FieldMismatch(field.d(), a.field().d()));
            }
            if digits[..i].contains(a) {
                return Err(Error::InvalidIfs(format!("duplicate digit {a}")));
            }
        }
        let max_norm = digits.iter().map(QuadInt::norm).max().expect("non-empty");
        let radius_sq = minimal_radius_sq(&max_norm, &beta.norm());
        Ok(Self {
            field,
            beta,
            digits,
            radius_sq,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn beta(&self) -> &QuadInt<T> {
        &self.beta
    }

    pub fn digits(&self) -> &[QuadInt<T>] {
        &self.digits
    }

    pub fn digit_count(&self) -> usize {
        self.digits.len()
    }

    /// `R'^2`, rational and at least `(max|a| / (|beta| - 1))^2`.
    pub fn bounding_radius_sq(&self) -> &Ratio<T> {
        &self.radius_sq
    }

    /// `2 log #A / log N(beta)`; equals the Hausdorff dimension under the open
    /// set condition and bounds it from above in general.
    pub fn similarity_dimension(&self) -> f64 {
        let count = self.digits.len() as f64;
        let norm = self.beta.norm().to_f64().unwrap_or(f64::INFINITY);
        2.0 * count.ln() / norm.ln()
    }

    pub fn covering_constants(&self) -> CoveringConstants<T> {
        CoveringConstants {
            radius_sq: self.radius_sq.clone(),
            sigma: self.similarity_dimension(),
            digit_count: self.digits.len(),
            beta_norm: self.beta.norm(),
        }
    }

    /// Exact test `norm(num) / den_norm <= R'^2`.
    pub fn within_radius(&self, num_norm: &T, den_norm: &T) -> bool {
        within_radius_sq(&self.radius_sq, num_norm, den_norm)
    }

    /// Least `k` with `R'^2 <= delta^2 * N(beta)^k`.
    pub fn covering_level_sq(&self, delta_sq: &Ratio<T>) -> u32 {
        covering_level(&self.radius_sq, &self.beta.norm(), delta_sq)
    }

    /// Upper bound `#A^k` for the number of `delta`-balls covering `S`,
    /// given `delta^2`.
    pub fn covering_bound_sq(&self, delta_sq: &Ratio<T>) -> T {
        let count: T = int(self.digits.len() as i64);
        pow(&count, self.covering_level_sq(delta_sq) as u64)
    }

    pub fn covering_bound(&self, delta: &Ratio<T>) -> T {
        self.covering_bound_sq(&(delta.clone() * delta.clone()))
    }

    /// Bound on the number of distinct points of `S` with denominator `u`,
    /// `norm(u) = u_norm`: they are `1/|u|`-separated, so each
    /// `1/(3|u|)`-ball holds at most one of them.
    pub fn period_bound(&self, u_norm: &T) -> T {
        self.covering_constants().period_bound(u_norm)
    }

    /// All `#A^depth` partial sums `sum_{j<=depth} a_j beta^-j`, in
    /// lexicographic digit order.
    pub fn sample_points<F: Float>(&self, depth: u32, cap: u64) -> Result<Vec<Complex<F>>> {
        let n = self.digits.len() as u64;
        let total = n
            .checked_pow(depth)
            .filter(|&t| t <= cap)
            .ok_or_else(|| Error::CapExceeded {
                needed: format!("{}^{}", n, depth),
                cap,
            })?;
        let inv_beta = self.beta.embed::<F>().inv();
        let digits: Vec<Complex<F>> = self.digits.iter().map(|a| a.embed::<F>()).collect();
        let mut pts = Vec::with_capacity(total as usize);
        pts.push(Complex::new(F::zero(), F::zero()));
        let mut scale = Complex::new(F::one(), F::zero());
        for _ in 0..depth {
            scale = scale * inv_beta;
            let mut next = Vec::with_capacity(pts.len() * digits.len());
            for z in &pts {
                for a in &digits {
                    next.push(*z + *a * scale);
                }
            }
            pts = next;
        }
        Ok(pts)
    }

    /// Least-squares slope of `log N` against `-log delta`, counting occupied
    /// grid cells of side `|beta|^-k` at each depth `k`. Diagnostic only.
    pub fn box_dim_estimate(&self, depths: &[u32], cap: u64) -> Result<BoxDimEstimate> {
        if depths.len() < 2 {
            return Err(Error::InvalidDepths("need at least two depths".into()));
        }
        if depths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDepths("depths must be strictly ascending".into()));
        }
        let beta_abs = self.beta.norm().to_f64().unwrap_or(f64::INFINITY).sqrt();
        let mut counts = Vec::with_capacity(depths.len());
        for &k in depths {
            let pts = self.sample_points::<f64>(k, cap)?;
            let cell = beta_abs.powi(-(k as i32));
            let occupied: HashSet<(i64, i64)> = pts
                .iter()
                .map(|z| ((z.re / cell + 0.5).floor() as i64, (z.im / cell + 0.5).floor() as i64))
                .collect();
            counts.push((k, occupied.len() as u64));
        }
        let xs: Vec<f64> = counts.iter().map(|&(k, _)| k as f64 * beta_abs.ln()).collect();
        let ys: Vec<f64> = counts.iter().map(|&(_, c)| (c as f64).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        Ok(BoxDimEstimate {
            slope: sxy / sxx,
            counts,
        })
    }
}

fn covering_level<T: Int>(radius_sq: &Ratio<T>, beta_norm: &T, delta_sq: &Ratio<T>) -> u32 {
    assert!(delta_sq.numer().is_positive(), "delta must be positive");
    let lhs = radius_sq.numer().clone() * delta_sq.denom().clone();
    let rhs = radius_sq.denom().clone() * delta_sq.numer().clone();
    let mut k = 0;
    let mut bk = T::one();
    while lhs > rhs.clone() * bk.clone() {
        bk = bk * beta_norm.clone();
        k += 1;
    }
    k
}

pub(crate) fn within_radius_sq<T: Int>(radius_sq: &Ratio<T>, num_norm: &T, den_norm: &T) -> bool {
    num_norm.clone() * radius_sq.denom().clone() <= radius_sq.numer().clone() * den_norm.clone()
}

/// Output of [`IfsSpec::box_dim_estimate`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDimEstimate {
    pub slope: f64,
    /// `(depth, occupied cells)`.
    pub counts: Vec<(u32, u64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn cantor() -> IfsSpec<BigInt> {
        let g = FieldSpec::gaussian();
        IfsSpec::new(g.small(3, 0), vec![g.small(0, 0), g.small(2, 0)]).unwrap()
    }

    fn example() -> IfsSpec<BigInt> {
        let g = FieldSpec::gaussian();
        IfsSpec::new(g.small(-2, 1), (0..4).map(|k| g.small(k, 0)).collect()).unwrap()
    }

    #[test]
    fn surd_signs() {
        // 3 - sqrt(9) = 0, 3 - sqrt(10) < 0, -1 + sqrt(2) > 0
        assert_eq!(sign_add_sqrt(&3i64, &-1, &9), Ordering::Equal);
        assert_eq!(sign_add_sqrt(&3i64, &-1, &10), Ordering::Less);
        assert_eq!(sign_add_sqrt(&-1i64, &1, &2), Ordering::Greater);
        assert_eq!(sign_add_sqrt(&0i64, &0, &7), Ordering::Equal);
        assert_eq!(sign_add_sqrt(&-2i64, &0, &7), Ordering::Less);
    }

    #[test]
    fn validation() {
        let g = FieldSpec::gaussian();
        assert!(IfsSpec::new(g.small::<BigInt>(1, 1), vec![g.small(0, 0), g.small(1, 0)]).is_ok());
        assert!(matches!(
            IfsSpec::new(g.small::<BigInt>(0, 1), vec![g.small(0, 0), g.small(1, 0)]),
            Err(Error::InvalidIfs(_))
        ));
        assert!(matches!(
            IfsSpec::new(g.small::<BigInt>(3, 0), vec![g.small(0, 0)]),
            Err(Error::InvalidIfs(_))
        ));
        assert!(matches!(
            IfsSpec::new(g.small::<BigInt>(3, 0), vec![g.small(0, 0), g.small(0, 0)]),
            Err(Error::InvalidIfs(_))
        ));
    }

    #[test]
    fn radius_bounds() {
        assert_eq!(cantor().bounding_radius_sq(), &Ratio::from_integer(big(1)));
        let r2 = example().bounding_radius_sq().clone();
        // (3 / (sqrt 5 - 1))^2 = 9 (6 + 2 sqrt 5) / 16 ~ 5.8906
        let exact = 9.0 * (6.0 + 2.0 * 5f64.sqrt()) / 16.0;
        let v = ratio_to_f64(&r2);
        assert!(v >= exact && v < exact + 0.05, "{r2} vs {exact}");
        assert!(*r2.denom() <= big(64));
        assert!(radius_bound_holds(r2.numer(), r2.denom(), &big(9), &big(5)));
        assert!(!radius_bound_holds(&(r2.numer() - 1), r2.denom(), &big(9), &big(5)));
    }

    #[test]
    fn dimensions() {
        assert!((cantor().similarity_dimension() - 0.630_929_753_571_457_4).abs() < 1e-12);
        assert!((example().similarity_dimension() - 1.722_706_232_293_572).abs() < 1e-12);
        let g = FieldSpec::gaussian();
        let full = IfsSpec::new(g.small::<BigInt>(-2, 1), (0..5).map(|k| g.small(k, 0)).collect()).unwrap();
        assert!((full.similarity_dimension() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn covering_examples() {
        let c = cantor();
        assert_eq!(c.covering_bound(&Ratio::from_integer(big(1))), big(1));
        assert_eq!(c.covering_bound(&Ratio::from_integer(big(2))), big(1));
        assert_eq!(c.covering_bound(&Ratio::new(big(1), big(9))), big(4));
        assert_eq!(c.period_bound(&big(1)), big(2));
        assert_eq!(c.period_bound(&big(16)), big(8));
    }

    #[test]
    fn samples() {
        let c = cantor();
        let p1 = c.sample_points::<f64>(1, 100).unwrap();
        assert_eq!(p1.len(), 2);
        assert!((p1[1].re - 2.0 / 3.0).abs() < 1e-15);
        let p2: Vec<f64> = c.sample_points::<f64>(2, 100).unwrap().iter().map(|z| z.re).collect();
        let want = [0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0];
        assert!(p2.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15));
        assert_eq!(c.sample_points::<f32>(5, 100).unwrap().len(), 32);
        assert!(matches!(
            c.sample_points::<f64>(10, 100),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn box_dimension_errors() {
        let c = cantor();
        assert!(matches!(
            c.box_dim_estimate(&[5], 1 << 20),
            Err(Error::InvalidDepths(_))
        ));
        assert!(matches!(
            c.box_dim_estimate(&[5, 3], 1 << 20),
            Err(Error::InvalidDepths(_))
        ));
    }
}
