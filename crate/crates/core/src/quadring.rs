//! Rings of integers of imaginary quadratic fields.
//!
//! An element is stored in integral-basis coordinates `x + y*w`, where `w` is
//! `sqrt(d)` when `d = 2, 3 (mod 4)` and `(1 + sqrt(d))/2` when `d = 1 (mod 4)`.
//! Both cases share the minimal polynomial form `w^2 = t*w - n`, with
//! `t = trace(w)` and `n = norm(w)`, so multiplication, conjugation and the
//! norm are written once against `(t, n)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{int, is_squarefree, Int};

/// Which integral basis the field uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// `w = sqrt(d)`
    Sqrt,
    /// `w = (1 + sqrt(d)) / 2`
    HalfInteger,
}

/// The nine imaginary quadratic fields whose ring of integers is a UFD.
pub const UFD_DISCRIMINANTS: [i64; 9] = [-1, -2, -3, -7, -11, -19, -43, -67, -163];

/// An imaginary quadratic field `Q(sqrt(d))` with its integral basis `{1, w}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    d: i64,
    kind: BasisKind,
}

impl FieldSpec {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 || !is_squarefree(d) {
            return Err(Error::InvalidField(d));
        }
        let kind = if d.rem_euclid(4) == 1 {
            BasisKind::HalfInteger
        } else {
            BasisKind::Sqrt
        };
        Ok(Self { d, kind })
    }

    /// The Gaussian integers `Z[i]`.
    pub fn gaussian() -> Self {
        Self {
            d: -1,
            kind: BasisKind::Sqrt,
        }
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn disc(&self) -> i64 {
        match self.kind {
            BasisKind::Sqrt => 4 * self.d,
            BasisKind::HalfInteger => self.d,
        }
    }

    /// Trace of `w`.
    pub fn omega_trace(&self) -> i64 {
        match self.kind {
            BasisKind::Sqrt => 0,
            BasisKind::HalfInteger => 1,
        }
    }

    /// Norm of `w`.
    pub fn omega_norm(&self) -> i64 {
        match self.kind {
            BasisKind::Sqrt => -self.d,
            BasisKind::HalfInteger => (1 - self.d) / 4,
        }
    }

    pub fn is_ufd(&self) -> bool {
        UFD_DISCRIMINANTS.contains(&self.d)
    }

    pub fn elem<T: Int>(&self, x: T, y: T) -> QuadInt<T> {
        QuadInt { field: *self, x, y }
    }

    pub fn from_int<T: Int>(&self, x: T) -> QuadInt<T> {
        self.elem(x, T::zero())
    }

    pub fn small<T: Int>(&self, x: i64, y: i64) -> QuadInt<T> {
        self.elem(int(x), int(y))
    }

    pub fn zero<T: Int>(&self) -> QuadInt<T> {
        self.elem(T::zero(), T::zero())
    }

    pub fn one<T: Int>(&self) -> QuadInt<T> {
        self.elem(T::one(), T::zero())
    }

    pub fn omega<T: Int>(&self) -> QuadInt<T> {
        self.elem(T::zero(), T::one())
    }

    /// Parses `x`, `x+y*w`, `x-y*w`, `y*w`, `w`, ... (spaces allowed).
    pub fn parse<T: Int>(&self, s: &str) -> Result<QuadInt<T>> {
        parse_element(*self, s)
    }

    /// Parses a field element `num` or `num/den` where both sides are ring
    /// elements, e.g. `1/4` or `(1+w)/3`.
    pub fn parse_point<T: Int>(&self, s: &str) -> Result<FieldElem<T>> {
        let s = s.trim();
        match split_top_level_slash(s) {
            Some((num, den)) => {
                let num = self.parse(strip_parens(num))?;
                let den = self.parse(strip_parens(den))?;
                FieldElem::new(num, &den)
            }
            None => Ok(FieldElem::from_integral(self.parse(strip_parens(s))?)),
        }
    }
}

fn strip_parens(s: &str) -> &str {
    let t = s.trim();
    if t.starts_with('(') && t.ends_with(')') {
        &t[1..t.len() - 1]
    } else {
        t
    }
}

fn split_top_level_slash(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

fn parse_element<T: Int>(field: FieldSpec, s: &str) -> Result<QuadInt<T>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse {
            token: s.to_string(),
            reason: "empty element".into(),
        });
    }
    // Split into signed terms.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut after_sign = false;
    for ch in compact.chars() {
        if ch == '+' || ch == '-' {
            if after_sign {
                return Err(Error::Parse {
                    token: ch.to_string(),
                    reason: format!("unexpected sign in `{compact}`"),
                });
            }
            if !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
            }
            neg = ch == '-';
            after_sign = true;
        } else {
            cur.push(ch);
            after_sign = false;
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse {
            token: compact.clone(),
            reason: "dangling sign".into(),
        });
    }
    terms.push((neg, cur));

    let mut x = T::zero();
    let mut y = T::zero();
    for (neg, term) in terms {
        let (coef, is_w) = if term == "w" {
            (T::one(), true)
        } else if let Some(c) = term.strip_suffix("*w") {
            let coef = parse_int::<T>(c).map_err(|e| match e {
                Error::Parse { reason, .. } if c.is_empty() => Error::Parse {
                    token: term.clone(),
                    reason,
                },
                other => other,
            })?;
            (coef, true)
        } else {
            (parse_int::<T>(&term)?, false)
        };
        let coef = if neg { -coef } else { coef };
        if is_w {
            y = y + coef;
        } else {
            x = x + coef;
        }
    }
    Ok(field.elem(x, y))
}

fn parse_int<T: Int>(s: &str) -> Result<T> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse {
            token: s.to_string(),
            reason: "expected an integer, `w` or `k*w`".into(),
        });
    }
    s.parse::<T>().map_err(|_| Error::Parse {
        token: s.to_string(),
        reason: "integer out of range".into(),
    })
}

/// An element `x + y*w` of the ring of integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt<T> {
    field: FieldSpec,
    x: T,
    y: T,
}

/// Ring operation selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring operation; rejects operands from different fields.
pub fn arith<T: Int>(a: &QuadInt<T>, b: &QuadInt<T>, op: RingOp) -> Result<QuadInt<T>> {
    if a.field != b.field {
        return Err(Error::FieldMismatch(a.field.d, b.field.d));
    }
    Ok(match op {
        RingOp::Add => a + b,
        RingOp::Sub => a - b,
        RingOp::Mul => a * b,
    })
}

impl<T: Int> QuadInt<T> {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn x(&self) -> &T {
        &self.x
    }

    pub fn y(&self) -> &T {
        &self.y
    }

    pub fn into_parts(self) -> (T, T) {
        (self.x, self.y)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }

    /// True when the element lies in `Z` (no `w` component).
    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Complex conjugate: `x + y*w -> (x + t*y) - y*w`.
    pub fn conj(&self) -> Self {
        let t: T = int(self.field.omega_trace());
        self.field.elem(self.x.clone() + t * self.y.clone(), -self.y.clone())
    }

    /// `|z|^2 = z * conj(z) = x^2 + t*x*y + n*y^2`.
    pub fn norm(&self) -> T {
        let t: T = int(self.field.omega_trace());
        let n: T = int(self.field.omega_norm());
        self.x.clone() * self.x.clone() + t * self.x.clone() * self.y.clone() + n * self.y.clone() * self.y.clone()
    }

    /// Multiplies by a rational integer.
    pub fn scale(&self, k: &T) -> Self {
        self.field.elem(self.x.clone() * k.clone(), self.y.clone() * k.clone())
    }

    /// Divides both coordinates by `k` when exact.
    pub fn div_int(&self, k: &T) -> Option<Self> {
        if k.is_zero() || !self.x.is_multiple_of(k) || !self.y.is_multiple_of(k) {
            return None;
        }
        Some(self.field.elem(self.x.clone() / k.clone(), self.y.clone() / k.clone()))
    }

    /// gcd of the two coordinates.
    pub fn content(&self) -> T {
        self.x.gcd(&self.y)
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `Some(q)` with `self = b*q` when `b` divides `self`, else `None`.
    pub fn exact_div(&self, b: &Self) -> Result<Option<Self>> {
        if self.field != b.field {
            return Err(Error::FieldMismatch(self.field.d, b.field.d));
        }
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let nb = b.norm();
        Ok((self * &b.conj()).div_int(&nb))
    }

    /// Floating embedding into `C` (diagnostics and rendering only).
    pub fn embed<F: Float>(&self) -> Complex<F> {
        let w = omega_complex::<F>(self.field);
        let x: F = F::from(self.x.clone()).unwrap_or_else(F::nan);
        let y: F = F::from(self.y.clone()).unwrap_or_else(F::nan);
        Complex::new(x + y * w.re, y * w.im)
    }

    fn check_field(&self, other: &Self) {
        assert!(
            self.field == other.field,
            "mixed-field operands: d={} and d={}",
            self.field.d,
            other.field.d
        );
    }
}

/// `w` as a complex number.
pub fn omega_complex<F: Float>(field: FieldSpec) -> Complex<F> {
    let abs_d: F = F::from(-field.d).unwrap();
    match field.kind {
        BasisKind::Sqrt => Complex::new(F::zero(), abs_d.sqrt()),
        BasisKind::HalfInteger => {
            let half = F::from(0.5).unwrap();
            Complex::new(half, half * abs_d.sqrt())
        }
    }
}

impl<T: Int> fmt::Display for QuadInt<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = (&self.x, &self.y);
        if y.is_zero() {
            return write!(f, "{x}");
        }
        let w_term = |f: &mut fmt::Formatter<'_>, c: &T, lead: bool| -> fmt::Result {
            let sign = if c.is_negative() {
                "-"
            } else if lead {
                ""
            } else {
                "+"
            };
            let a = c.abs();
            if a.is_one() {
                write!(f, "{sign}w")
            } else {
                write!(f, "{sign}{a}*w")
            }
        };
        if x.is_zero() {
            w_term(f, y, true)
        } else {
            write!(f, "{x}")?;
            w_term(f, y, false)
        }
    }
}

impl<T: Int> Add for &QuadInt<T> {
    type Output = QuadInt<T>;
    fn add(self, rhs: &QuadInt<T>) -> QuadInt<T> {
        self.check_field(rhs);
        self.field
            .elem(self.x.clone() + rhs.x.clone(), self.y.clone() + rhs.y.clone())
    }
}

impl<T: Int> Sub for &QuadInt<T> {
    type Output = QuadInt<T>;
    fn sub(self, rhs: &QuadInt<T>) -> QuadInt<T> {
        self.check_field(rhs);
        self.field
            .elem(self.x.clone() - rhs.x.clone(), self.y.clone() - rhs.y.clone())
    }
}

impl<T: Int> Mul for &QuadInt<T> {
    type Output = QuadInt<T>;
    fn mul(self, rhs: &QuadInt<T>) -> QuadInt<T> {
        self.check_field(rhs);
        // w^2 = t*w - n
        let t: T = int(self.field.omega_trace());
        let n: T = int(self.field.omega_norm());
        let yy = self.y.clone() * rhs.y.clone();
        let x = self.x.clone() * rhs.x.clone() - n * yy.clone();
        let y = self.x.clone() * rhs.y.clone() + rhs.x.clone() * self.y.clone() + t * yy;
        self.field.elem(x, y)
    }
}

impl<T: Int> Neg for &QuadInt<T> {
    type Output = QuadInt<T>;
    fn neg(self) -> QuadInt<T> {
        self.field.elem(-self.x.clone(), -self.y.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Int> $tr for QuadInt<T> {
            type Output = QuadInt<T>;
            fn $m(self, rhs: QuadInt<T>) -> QuadInt<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Int> $tr<&QuadInt<T>> for QuadInt<T> {
            type Output = QuadInt<T>;
            fn $m(self, rhs: &QuadInt<T>) -> QuadInt<T> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Int> Neg for QuadInt<T> {
    type Output = QuadInt<T>;
    fn neg(self) -> QuadInt<T> {
        -&self
    }
}

/// An element of the field `K`, `num / den`, with `den` a positive rational
/// integer and `gcd(content(num), den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem<T> {
    num: QuadInt<T>,
    den: T,
}

impl<T: Int> FieldElem<T> {
    /// `num / den` for any non-zero ring element `den`; the denominator is
    /// rationalised through its conjugate.
    pub fn new(num: QuadInt<T>, den: &QuadInt<T>) -> Result<Self> {
        if num.field != den.field {
            return Err(Error::FieldMismatch(num.field.d, den.field.d));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = &num * &den.conj();
        Self::from_parts(n, den.norm())
    }

    /// `num / den` for a rational integer `den`.
    pub fn from_parts(num: QuadInt<T>, den: T) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let g = num.content().gcd(&den);
        let num = num.div_int(&g).expect("gcd divides");
        Ok(Self { den: den / g, num })
    }

    pub fn from_integral(num: QuadInt<T>) -> Self {
        Self { num, den: T::one() }
    }

    pub fn num(&self) -> &QuadInt<T> {
        &self.num
    }

    pub fn den(&self) -> &T {
        &self.den
    }

    pub fn field(&self) -> FieldSpec {
        self.num.field
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// The element as a ring element, when integral.
    pub fn to_integral(&self) -> Option<QuadInt<T>> {
        self.is_integral().then(|| self.num.clone())
    }

    pub fn mul_int(&self, k: &QuadInt<T>) -> Self {
        Self::from_parts(&self.num * k, self.den.clone()).expect("non-zero denominator")
    }

    /// `|z|^2` as an exact fraction `(numerator, denominator)`.
    pub fn norm_fraction(&self) -> (T, T) {
        (self.num.norm(), self.den.clone() * self.den.clone())
    }

    pub fn embed<F: Float>(&self) -> Complex<F> {
        let d: F = F::from(self.den.clone()).unwrap_or_else(F::nan);
        self.num.embed::<F>() / d
    }

    /// Total order by `|z|`, then by the coordinates `x/den`, `y/den`.
    pub fn cmp_by_size(&self, other: &Self) -> Ordering {
        let (an, ad) = self.norm_fraction();
        let (bn, bd) = other.norm_fraction();
        (an * bd.clone())
            .cmp(&(bn * ad.clone()))
            .then_with(|| (self.num.y.clone() * other.den.clone()).cmp(&(other.num.y.clone() * self.den.clone())))
            .then_with(|| (self.num.x.clone() * other.den.clone()).cmp(&(other.num.x.clone() * self.den.clone())))
    }
}

impl<T: Int> fmt::Display for FieldElem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.y.is_zero() || self.num.x.is_zero() {
            write!(f, "{}/{}", self.num, self.den)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}
