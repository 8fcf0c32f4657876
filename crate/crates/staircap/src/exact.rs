//! Exact arithmetic over Q and over real quadratic fields Q(√D).
//!
//! Every inequality that the rest of the crate decides routes through
//! [`QuadraticNumber::signum`] / [`Scalar::signum`]; floating point never
//! participates in a verdict. A value lives in one field: mixing two
//! genuinely irrational values with different D is a caller bug and the
//! checked entry points report it as [`ExactError::MixedFields`].

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision exact fraction; always normalized with positive
/// denominator by the backing implementation.
pub type Rational = BigRational;

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for n/d.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn biguint_is_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

/// Exact square root of a nonnegative rational, when one exists in Q.
pub fn sqrt_rational(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &sn * &sn == *num && &sd * &sd == *den {
        Some(Rational::new(sn.into(), sd.into()))
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactError {
    /// D must be a non-square integer ≥ 2.
    SquareD(BigUint),
    /// Operands live in different quadratic fields.
    MixedFields(BigUint, BigUint),
    DivisionByZero,
    /// Square root of a negative value requested.
    NegativeSqrt,
    /// The value has no exact square root in its field.
    NotASquare,
    Parse(String),
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::SquareD(d) => write!(f, "sqrt({d}) is rational; D must be a non-square integer >= 2"),
            ExactError::MixedFields(a, b) => write!(f, "mixed quadratic fields Q(sqrt({a})) and Q(sqrt({b}))"),
            ExactError::DivisionByZero => write!(f, "division by zero"),
            ExactError::NegativeSqrt => write!(f, "square root of a negative value"),
            ExactError::NotASquare => write!(f, "value is not a square in its field"),
            ExactError::Parse(s) => write!(f, "cannot parse {s:?}"),
        }
    }
}

impl core::error::Error for ExactError {}

/// An element a + b√D of the real quadratic field Q(√D), embedded with the
/// positive root √D > 0. Two values are equal only if their fields match;
/// use [`Scalar`] when rational values must flow between fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    d: BigUint,
    a: Rational,
    b: Rational,
}

impl QuadraticNumber {
    pub fn new(d: impl Into<BigUint>, a: Rational, b: Rational) -> Result<Self, ExactError> {
        let d = d.into();
        if d < BigUint::from(2u32) || biguint_is_square(&d) {
            return Err(ExactError::SquareD(d));
        }
        Ok(QuadraticNumber { d, a, b })
    }

    pub fn from_rational(d: impl Into<BigUint>, a: Rational) -> Result<Self, ExactError> {
        Self::new(d, a, Rational::zero())
    }

    /// √D itself.
    pub fn sqrt_d(d: impl Into<BigUint>) -> Result<Self, ExactError> {
        Self::new(d, Rational::zero(), Rational::one())
    }

    pub fn zero_in(d: impl Into<BigUint>) -> Result<Self, ExactError> {
        Self::from_rational(d, Rational::zero())
    }

    pub fn field(&self) -> &BigUint {
        &self.d
    }

    pub fn rat_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Galois conjugate a − b√D.
    pub fn conj(&self) -> Self {
        QuadraticNumber { d: self.d.clone(), a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm a² − b²D, a rational.
    pub fn norm(&self) -> Rational {
        let d = Rational::from_integer(BigInt::from(self.d.clone()));
        &self.a * &self.a - &self.b * &self.b * d
    }

    fn same_field(&self, rhs: &Self) -> Result<(), ExactError> {
        if self.d == rhs.d {
            Ok(())
        } else {
            Err(ExactError::MixedFields(self.d.clone(), rhs.d.clone()))
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.same_field(rhs)?;
        Ok(QuadraticNumber { d: self.d.clone(), a: &self.a + &rhs.a, b: &self.b + &rhs.b })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.same_field(rhs)?;
        Ok(QuadraticNumber { d: self.d.clone(), a: &self.a - &rhs.a, b: &self.b - &rhs.b })
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.same_field(rhs)?;
        let d = Rational::from_integer(BigInt::from(self.d.clone()));
        Ok(QuadraticNumber {
            d: self.d.clone(),
            a: &self.a * &rhs.a + &self.b * &rhs.b * d,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        })
    }

    /// Division rationalizes by the conjugate: x/y = x·ȳ / norm(y).
    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.same_field(rhs)?;
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let n = rhs.norm();
        let num = self.checked_mul(&rhs.conj())?;
        Ok(QuadraticNumber { d: num.d, a: num.a / &n, b: num.b / &n })
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        let one = QuadraticNumber { d: self.d.clone(), a: Rational::one(), b: Rational::zero() };
        one.checked_div(self)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadraticNumber { d: self.d.clone(), a: &self.a * r, b: &self.b * r }
    }

    pub fn add_rat(&self, r: &Rational) -> Self {
        QuadraticNumber { d: self.d.clone(), a: &self.a + r, b: self.b.clone() }
    }

    /// Integer power, negative exponents via the reciprocal.
    pub fn pow(&self, e: i64) -> Result<Self, ExactError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = QuadraticNumber { d: self.d.clone(), a: Rational::one(), b: Rational::zero() };
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.checked_mul(&sq)?;
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.checked_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Sign of the real embedding, decided by case analysis on the signs of
    /// a, b and an exact comparison of a² with b²D. Never uses floats.
    pub fn signum(&self) -> i32 {
        let sa = rational_signum(&self.a);
        let sb = rational_signum(&self.b);
        match (sa, sb) {
            (s, 0) => s,
            (0, s) => s,
            (1, 1) => 1,
            (-1, -1) => -1,
            _ => {
                // Opposite signs: |a| vs |b|√D, squared. Equality would force
                // √D rational, excluded by construction.
                let d = Rational::from_integer(BigInt::from(self.d.clone()));
                let lhs = &self.a * &self.a;
                let rhs = &self.b * &self.b * d;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sa,
                    Ordering::Less => -sa,
                    Ordering::Equal => unreachable!("non-square D admits no rational sqrt"),
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// In-field square root, if this value is a square in Q(√D).
    ///
    /// For s = u + v√D with s² = x + y√D: norm(x + y√D) = norm(s)² must be a
    /// rational square r², and then u² = (x ± r)/2; each candidate is tested
    /// exactly.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(QuadraticNumber { d: self.d.clone(), a: Rational::zero(), b: Rational::zero() });
        }
        if self.signum() < 0 {
            return None;
        }
        if self.b.is_zero() {
            if let Some(u) = sqrt_rational(&self.a) {
                return Some(QuadraticNumber { d: self.d.clone(), a: u, b: Rational::zero() });
            }
            let d = Rational::from_integer(BigInt::from(self.d.clone()));
            if let Some(v) = sqrt_rational(&(&self.a / &d)) {
                return Some(QuadraticNumber { d: self.d.clone(), a: Rational::zero(), b: v });
            }
            return None;
        }
        let r = sqrt_rational(&self.norm())?;
        let two = rat_int(2);
        for cand in [(&self.a + &r) / &two, (&self.a - &r) / &two] {
            if let Some(u) = sqrt_rational(&cand) {
                if u.is_zero() {
                    continue;
                }
                let v = &self.b / (&two * &u);
                let s = QuadraticNumber { d: self.d.clone(), a: u, b: v };
                let sq = s.checked_mul(&s).expect("same field");
                if &sq == self {
                    return Some(if s.signum() >= 0 { s } else { -s });
                }
            }
        }
        None
    }

    /// Exact floor. Brackets b√D between rational bounds from an integer
    /// square root, then fixes up the candidate with exact comparisons.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // √D ∈ [s/k, (s+1)/k] with k = 2^32 and s = isqrt(D·k²).
        let k = BigUint::from(1u64 << 32);
        let s = (&self.d * &k * &k).sqrt();
        let lo = Rational::new(BigInt::from(s.clone()), BigInt::from(k.clone()));
        let hi = Rational::new(BigInt::from(s + BigUint::one()), BigInt::from(k));
        let approx = if self.b.is_positive() { &self.a + &self.b * lo } else { &self.a + &self.b * hi };
        let mut m = approx.floor().to_integer();
        loop {
            // Invariant sought: m ≤ self < m+1, verified exactly.
            let below = QuadraticNumber {
                d: self.d.clone(),
                a: &self.a - Rational::from_integer(m.clone()),
                b: self.b.clone(),
            };
            if below.signum() < 0 {
                m -= 1;
                continue;
            }
            let above = QuadraticNumber {
                d: self.d.clone(),
                a: &self.a - Rational::from_integer(&m + 1),
                b: self.b.clone(),
            };
            if above.signum() >= 0 {
                m += 1;
                continue;
            }
            return m;
        }
    }

    /// Float approximation for plot output only; verdicts never use this.
    pub fn to_f64(&self) -> f64 {
        let scale = BigUint::from(1u64 << 40);
        let s = (&self.d * &scale * &scale).sqrt();
        let sqrt_d = Rational::new(BigInt::from(s), BigInt::from(scale));
        (&self.a + &self.b * sqrt_d).to_f64().unwrap_or(f64::NAN)
    }
}

fn rational_signum(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QuadraticNumber {
    /// Ordering is defined within one field; mixed fields compare as None.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.d != other.d {
            return None;
        }
        let diff = self.checked_sub(other).ok()?;
        Some(diff.signum().cmp(&0))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: QuadraticNumber) -> QuadraticNumber {
                self.$checked(&rhs).expect("quadratic arithmetic")
            }
        }
        impl<'a> $trait<&'a QuadraticNumber> for &QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: &'a QuadraticNumber) -> QuadraticNumber {
                self.$checked(rhs).expect("quadratic arithmetic")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber { d: self.d, a: -self.a, b: -self.b }
    }
}

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber { d: self.d.clone(), a: -self.a.clone(), b: -self.b.clone() }
    }
}

impl fmt::Display for QuadraticNumber {
    /// Canonical form "a+b*sqrt(D)"; rational-only values print as "a",
    /// pure surds as "b*sqrt(D)" with unit coefficients elided.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
            if self.b.is_positive() {
                write!(f, "+")?;
            }
        }
        if self.b == rat_int(1) {
            write!(f, "sqrt({})", self.d)
        } else if self.b == rat_int(-1) {
            write!(f, "-sqrt({})", self.d)
        } else {
            write!(f, "{}*sqrt({})", self.b, self.d)
        }
    }
}

impl FromStr for QuadraticNumber {
    type Err = ExactError;

    /// Accepts "a", "a+b*sqrt(D)", "a-b*sqrt(D)", "b*sqrt(D)", "sqrt(D)",
    /// "-sqrt(D)", with rational a, b as "p/q".
    fn from_str(s: &str) -> Result<Self, ExactError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || ExactError::Parse(s.to_string());
        let Some(pos) = compact.find("sqrt(") else {
            let a = Rational::from_str(&compact).map_err(|_| err())?;
            // A bare rational needs a field; callers wanting one should use
            // Scalar parsing instead. Default to Q(√2).
            return QuadraticNumber::from_rational(2u32, a);
        };
        let Some(close) = compact[pos..].find(')') else {
            return Err(err());
        };
        if pos + close + 1 != compact.len() {
            return Err(err());
        }
        let d = BigUint::from_str(&compact[pos + 5..pos + close]).map_err(|_| err())?;
        let prefix = &compact[..pos];
        let coeff_str = prefix.strip_suffix('*');
        // Split "A±B" at the last sign that is not leading.
        let (a_str, b_str) = match coeff_str {
            Some(cs) => split_tail_sign(cs),
            None => match prefix {
                "" | "+" => ("", "1"),
                "-" => ("", "-1"),
                _ => return Err(err()),
            },
        };
        let a = if a_str.is_empty() {
            Rational::zero()
        } else {
            Rational::from_str(a_str).map_err(|_| err())?
        };
        let b = match b_str {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => Rational::from_str(other).map_err(|_| err())?,
        };
        QuadraticNumber::new(d, a, b)
    }
}

/// Splits "A±B" at the last top-level sign; "B" alone yields ("", "B").
fn split_tail_sign(s: &str) -> (&str, &str) {
    let bytes = s.as_bytes();
    for i in (1..bytes.len()).rev() {
        if bytes[i] == b'+' || bytes[i] == b'-' {
            // A sign directly after '/' or another sign belongs to a number.
            let prev = bytes[i - 1];
            if prev == b'/' || prev == b'+' || prev == b'-' {
                continue;
            }
            return (&s[..i], &s[i..]);
        }
    }
    ("", s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Field arithmetic entry point with explicit error reporting.
pub fn quad_arith(lhs: &QuadraticNumber, rhs: &QuadraticNumber, op: QuadOp) -> Result<QuadraticNumber, ExactError> {
    match op {
        QuadOp::Add => lhs.checked_add(rhs),
        QuadOp::Sub => lhs.checked_sub(rhs),
        QuadOp::Mul => lhs.checked_mul(rhs),
        QuadOp::Div => lhs.checked_div(rhs),
    }
}

/// Sign of the real embedding: −1, 0, or +1.
pub fn quad_sign(x: &QuadraticNumber) -> i32 {
    x.signum()
}

/// A number that is either rational or lives in one quadratic field.
///
/// Arithmetic promotes rationals into the partner's field. Operating on two
/// genuinely irrational values from different fields panics: expressions in
/// this crate are arranged to stay in a single field, so that is a bug, not
/// an input condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rat(Rational),
    Quad(QuadraticNumber),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rat(rat_int(n))
    }

    /// Demotes a quadratic with zero surd part to its rational value.
    pub fn normalize(self) -> Self {
        match self {
            Scalar::Quad(q) if q.is_rational() => Scalar::Rat(q.rat_part().clone()),
            other => other,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Quad(q) if q.is_rational() => Some(q.rat_part()),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Quad(q) => q.is_zero(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Rat(r) => rational_signum(r),
            Scalar::Quad(q) => q.signum(),
        }
    }

    // Results are normalized so a rational value is always Rat: arithmetic
    // stays canonical under the derived PartialEq.
    fn binop(self, rhs: Scalar, op: QuadOp) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(match op {
                QuadOp::Add => x + y,
                QuadOp::Sub => x - y,
                QuadOp::Mul => x * y,
                QuadOp::Div => {
                    assert!(!y.is_zero(), "division by zero");
                    x / y
                }
            }),
            (Scalar::Rat(x), Scalar::Quad(y)) => {
                let x = QuadraticNumber { d: y.d.clone(), a: x, b: Rational::zero() };
                Scalar::Quad(quad_arith(&x, &y, op).expect("same field")).normalize()
            }
            (Scalar::Quad(x), Scalar::Rat(y)) => {
                let y = QuadraticNumber { d: x.d.clone(), a: y, b: Rational::zero() };
                Scalar::Quad(quad_arith(&x, &y, op).expect("same field")).normalize()
            }
            (Scalar::Quad(x), Scalar::Quad(y)) => {
                if x.d == y.d {
                    return Scalar::Quad(quad_arith(&x, &y, op).expect("same field"))
                        .normalize();
                }
                // A rational value that happens to be carried as a quadratic
                // may cross fields.
                if x.is_rational() {
                    return Scalar::Rat(x.a).binop(Scalar::Quad(y), op);
                }
                if y.is_rational() {
                    return Scalar::Quad(x).binop(Scalar::Rat(y.a), op);
                }
                panic!("mixed quadratic fields Q(sqrt({})) and Q(sqrt({}))", x.d, y.d);
            }
        }
    }

    pub fn sq(&self) -> Scalar {
        self.clone() * self.clone()
    }

    pub fn recip(&self) -> Scalar {
        Scalar::one() / self.clone()
    }

    /// Exact square root: stays rational when possible, otherwise lands in a
    /// quadratic field. For a quadratic input the root must exist in the
    /// same field.
    pub fn sqrt(&self) -> Result<Scalar, ExactError> {
        match self {
            Scalar::Rat(r) => sqrt_of_rational(r),
            Scalar::Quad(q) => {
                if q.is_rational() {
                    return sqrt_of_rational(q.rat_part());
                }
                q.sqrt().map(Scalar::Quad).ok_or(ExactError::NotASquare)
            }
        }
    }

    pub fn floor(&self) -> BigInt {
        match self {
            Scalar::Rat(r) => r.floor().to_integer(),
            Scalar::Quad(q) => q.floor(),
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if (self.clone() - other.clone()).signum() <= 0 {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if (self.clone() - other.clone()).signum() >= 0 {
            self
        } else {
            other
        }
    }

    /// Float approximation for plot output only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Quad(q) => q.to_f64(),
        }
    }

    /// Total order on real values, independent of the representing field.
    ///
    /// `partial_cmp` refuses to compare genuinely irrational elements of
    /// distinct quadratic fields; here the sign of
    /// `(a₁ + b₁√D₁) − (a₂ + b₂√D₂)` is decided exactly by isolating the
    /// √D₂ term and squaring once: with L = (a₁−a₂) + b₁√D₁ and R = b₂√D₂,
    /// sign(L−R) follows from sign(L), sign(R), and sign(L²−R²), and L²−R²
    /// lives entirely in Q(√D₁).
    pub fn cmp_real(&self, other: &Scalar) -> Ordering {
        if let Some(ord) = self.partial_cmp(other) {
            return ord;
        }
        let (x, y) = match (self, other) {
            (Scalar::Quad(x), Scalar::Quad(y)) => (x, y),
            _ => unreachable!("comparisons involving a rational are always ordered"),
        };
        let left = QuadraticNumber::new(
            x.field().clone(),
            x.rat_part() - y.rat_part(),
            x.surd_part().clone(),
        )
        .expect("field discriminant already validated");
        let sign_left = left.signum();
        let sign_right = y.surd_part().signum().to_i32().unwrap_or(0);
        if sign_left != sign_right {
            return sign_left.cmp(&sign_right);
        }
        if sign_left == 0 {
            return Ordering::Equal;
        }
        // Both sides share a strict sign; compare squares. R² is rational.
        let right_sq = y.surd_part() * y.surd_part()
            * Rational::from_integer(BigInt::from(y.field().clone()));
        let gap = left
            .checked_mul(&left)
            .expect("same field")
            .add_rat(&-right_sq);
        let ord = gap.signum().cmp(&0);
        if sign_left > 0 {
            ord
        } else {
            ord.reverse()
        }
    }
}

/// √r for a nonnegative rational, as a rational when exact, otherwise as an
/// element of Q(√D) with D = the square-free-reduced numerator·denominator.
fn sqrt_of_rational(r: &Rational) -> Result<Scalar, ExactError> {
    if r.is_negative() {
        return Err(ExactError::NegativeSqrt);
    }
    if let Some(s) = sqrt_rational(r) {
        return Ok(Scalar::Rat(s));
    }
    // √(p/q) = √(pq)/q; peel small square factors f² out of pq.
    let m = r.numer().magnitude() * r.denom().magnitude();
    let (f, core) = extract_square_part(&m);
    let b = Rational::new(BigInt::from(f), r.denom().clone());
    Ok(Scalar::Quad(QuadraticNumber::new(core, Rational::zero(), b)?))
}

/// Writes m = f²·core with core free of square factors below 10⁶ (larger
/// square factors simply stay inside core, which is still non-square here).
fn extract_square_part(m: &BigUint) -> (BigUint, BigUint) {
    let mut core = m.clone();
    let mut f = BigUint::one();
    let mut p = BigUint::from(2u32);
    let limit = BigUint::from(1_000_000u64);
    while &p * &p <= core && p <= limit {
        let p2 = &p * &p;
        while (&core % &p2).is_zero() {
            core /= &p2;
            f *= &p;
        }
        p += BigUint::one();
    }
    if biguint_is_square(&core) {
        let s = core.sqrt();
        f *= &s;
        core = BigUint::one();
    }
    (f, core)
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rat(r)
    }
}

impl From<QuadraticNumber> for Scalar {
    fn from(q: QuadraticNumber) -> Self {
        Scalar::Quad(q)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.binop(rhs, $op)
            }
        }
        impl<'a> $trait<&'a Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                self.clone().binop(rhs.clone(), $op)
            }
        }
    };
}

scalar_binop!(Add, add, QuadOp::Add);
scalar_binop!(Sub, sub, QuadOp::Sub);
scalar_binop!(Mul, mul, QuadOp::Mul);
scalar_binop!(Div, div, QuadOp::Div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Quad(q) => Scalar::Quad(-q),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Quad(x), Scalar::Quad(y)) if x.d != y.d && !x.is_rational() && !y.is_rational() => None,
            _ => Some((self.clone() - other.clone()).signum().cmp(&0)),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Quad(q) => write!(f, "{q}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, ExactError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.contains("sqrt(") {
            Ok(Scalar::Quad(QuadraticNumber::from_str(&compact)?))
        } else {
            Rational::from_str(&compact)
                .map(Scalar::Rat)
                .map_err(|_| ExactError::Parse(s.to_string()))
        }
    }
}

/// Positions where weight multiplicities live; class tails can reach lengths
/// around ω^i for the lifted families, far past usize on 32-bit targets.
pub type Count = BigUint;

pub fn count_from(n: u64) -> Count {
    BigUint::from(n)
}

/// Dot-product-friendly view of a list of (value, multiplicity) runs.
pub fn runs_total(runs: &[(Rational, Count)]) -> Count {
    let mut total = Count::zero();
    for (_, m) in runs {
        total += m;
    }
    total
}

/// Parses "p/q" or "p". Exposed for the CLI and file formats.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    Rational::from_str(s.trim()).map_err(|_| ExactError::Parse(s.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q2(a: Rational, b: Rational) -> QuadraticNumber {
        QuadraticNumber::new(2u32, a, b).unwrap()
    }

    #[test]
    fn norm_of_omega_two_is_one() {
        // (2+√3)(2−√3) = 1
        let x = QuadraticNumber::new(3u32, rat_int(2), rat_int(1)).unwrap();
        let product = x.checked_mul(&x.conj()).unwrap();
        assert!(product.is_rational());
        assert_eq!(product.rat_part(), &rat_int(1));
    }

    #[test]
    fn silver_ratio_squares_to_three_plus_two_root_two() {
        let sigma = q2(rat_int(1), rat_int(1));
        let sq = sigma.checked_mul(&sigma).unwrap();
        assert_eq!(sq, q2(rat_int(3), rat_int(2)));
    }

    #[test]
    fn division_rationalizes() {
        // (√3+3)/(√3−1) = 3+2√3
        let num = QuadraticNumber::new(3u32, rat_int(3), rat_int(1)).unwrap();
        let den = QuadraticNumber::new(3u32, rat_int(-1), rat_int(1)).unwrap();
        let q = num.checked_div(&den).unwrap();
        assert_eq!(q, QuadraticNumber::new(3u32, rat_int(3), rat_int(2)).unwrap());
    }

    #[test]
    fn sign_cases() {
        assert_eq!(q2(rat_int(1), rat_int(-1)).signum(), -1); // 1−√2
        assert_eq!(q2(rat_int(-3), rat_int(2)).signum(), -1); // 2√2 < 3
        assert_eq!(q2(rat_int(-2), rat_int(2)).signum(), 1); // 2√2 > 2
        assert_eq!(q2(Rational::zero(), Rational::zero()).signum(), 0);
        assert_eq!(q2(rat(1, 1000), Rational::zero()).signum(), 1);
    }

    #[test]
    fn mixed_fields_rejected() {
        let x = q2(rat_int(1), rat_int(1));
        let y = QuadraticNumber::new(3u32, rat_int(1), rat_int(1)).unwrap();
        assert!(matches!(quad_arith(&x, &y, QuadOp::Add), Err(ExactError::MixedFields(_, _))));
    }

    #[test]
    fn square_d_rejected() {
        assert!(QuadraticNumber::new(9u32, rat_int(1), rat_int(1)).is_err());
        assert!(QuadraticNumber::new(1u32, rat_int(1), rat_int(1)).is_err());
    }

    #[test]
    fn division_by_zero_reported() {
        let x = q2(rat_int(1), rat_int(1));
        let zero = q2(Rational::zero(), Rational::zero());
        assert_eq!(quad_arith(&x, &zero, QuadOp::Div), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn reciprocal_multiplies_to_one() {
        let x = q2(rat(3, 7), rat(-2, 5));
        let product = x.checked_mul(&x.recip().unwrap()).unwrap();
        assert_eq!(product, q2(rat_int(1), Rational::zero()));
    }

    #[test]
    fn in_field_sqrt() {
        // √(3+2√2) = 1+√2
        let s = q2(rat_int(3), rat_int(2)).sqrt().unwrap();
        assert_eq!(s, q2(rat_int(1), rat_int(1)));
        // √2 in Q(√2) from the rational 2
        let s = q2(rat_int(2), Rational::zero()).sqrt().unwrap();
        assert_eq!(s, q2(Rational::zero(), rat_int(1)));
        // 1+√2 is not a square in Q(√2)
        assert!(q2(rat_int(1), rat_int(1)).sqrt().is_none());
        // Negative values have no real root
        assert!(q2(rat_int(-1), Rational::zero()).sqrt().is_none());
    }

    #[test]
    fn sqrt_of_rational_scalar() {
        assert_eq!(Scalar::Rat(rat(9, 4)).sqrt().unwrap(), Scalar::Rat(rat(3, 2)));
        // √(32) = 4√2
        let s = Scalar::Rat(rat_int(32)).sqrt().unwrap();
        assert_eq!(s, Scalar::Quad(q2(Rational::zero(), rat_int(4))));
        // √(1/2) = (1/2)√2
        let s = Scalar::Rat(rat(1, 2)).sqrt().unwrap();
        assert_eq!(s, Scalar::Quad(q2(Rational::zero(), rat(1, 2))));
    }

    #[test]
    fn floor_walks_to_the_exact_integer() {
        let sigma_sq = q2(rat_int(3), rat_int(2)); // ≈ 5.828
        assert_eq!(sigma_sq.floor(), BigInt::from(5));
        let tight = q2(rat_int(6), rat_int(-2)).floor(); // 6−2√2 ≈ 3.17
        assert_eq!(tight, BigInt::from(3));
        let neg = q2(rat_int(0), rat_int(-1)).floor(); // −√2
        assert_eq!(neg, BigInt::from(-2));
    }

    #[test]
    fn display_and_parse_round_trip() {
        let vals = vec![
            q2(rat_int(3), rat_int(2)),
            q2(rat(-1, 2), rat(5, 3)),
            q2(rat_int(0), rat_int(-1)),
            q2(rat(7, 4), rat_int(0)),
            q2(rat_int(2), rat(-1, 3)),
        ];
        for v in vals {
            let s = v.to_string();
            let back: QuadraticNumber = s.parse().unwrap();
            assert_eq!(back, v, "round trip failed for {s}");
        }
        let scalar: Scalar = "1+1*sqrt(2)".parse().unwrap();
        assert_eq!(scalar, Scalar::Quad(q2(rat_int(1), rat_int(1))));
        let plain: Scalar = "-17/3".parse().unwrap();
        assert_eq!(plain, Scalar::Rat(rat(-17, 3)));
    }

    #[test]
    fn scalar_promotion_keeps_fields_straight() {
        let l = Scalar::Quad(QuadraticNumber::sqrt_d(3u32).unwrap());
        let x = Scalar::Rat(rat_int(2)) * l.clone(); // 2√3
        let y = x - Scalar::Rat(rat_int(3)); // 2√3 − 3 > 0
        assert_eq!(y.signum(), 1);
        // A rational carried as a quadratic may cross fields.
        let rational_in_q2 = Scalar::Quad(q2(rat_int(5), Rational::zero()));
        let sum = rational_in_q2 + l;
        assert_eq!(sum.signum(), 1);
    }

    #[test]
    #[should_panic(expected = "mixed quadratic fields")]
    fn scalar_mixed_irrational_fields_panic() {
        let x = Scalar::Quad(QuadraticNumber::sqrt_d(2u32).unwrap());
        let y = Scalar::Quad(QuadraticNumber::sqrt_d(3u32).unwrap());
        let _ = x + y;
    }

    #[test]
    fn cmp_real_orders_across_fields() {
        let sqrt = |d: u32| Scalar::Quad(QuadraticNumber::sqrt_d(d).unwrap());
        let one = Scalar::Rat(rat_int(1));
        let two = Scalar::Rat(rat_int(2));
        let three = Scalar::Rat(rat_int(3));

        // 1 + √2 ≈ 2.414 < √6 ≈ 2.449.
        let x = one.clone() + sqrt(2);
        assert_eq!(x.cmp_real(&sqrt(6)), Ordering::Less);
        assert_eq!(sqrt(6).cmp_real(&x), Ordering::Greater);

        // Same real number written over different discriminants: √8 = 2√2.
        assert_eq!(sqrt(8).cmp_real(&(two.clone() * sqrt(2))), Ordering::Equal);

        // Negative branch flips the squared comparison: −(1+√2) > −√6.
        assert_eq!((-x.clone()).cmp_real(&-sqrt(6)), Ordering::Greater);

        // Equal rational parts, both surds positive: 3+2√2 < 3+2√3.
        let lhs = three.clone() + two.clone() * sqrt(2);
        let rhs = three + two * sqrt(3);
        assert_eq!(lhs.cmp_real(&rhs), Ordering::Less);

        // Opposite-sign shortcut without squaring: √2 − 2 < √3 − 1.
        let neg = sqrt(2) - Scalar::Rat(rat_int(2));
        let pos = sqrt(3) - one;
        assert_eq!(neg.cmp_real(&pos), Ordering::Less);

        // Same-field and rational comparisons defer to partial_cmp.
        assert_eq!(Scalar::Rat(rat(3, 2)).cmp_real(&sqrt(2)), Ordering::Greater);
        assert_eq!(sqrt(2).cmp_real(&sqrt(2)), Ordering::Equal);
    }

    #[test]
    fn extract_square_part_reduces() {
        let (f, core) = extract_square_part(&BigUint::from(288u32)); // 288 = 144·2
        assert_eq!(f, BigUint::from(12u32));
        assert_eq!(core, BigUint::from(2u32));
    }
}
