//! Second-cohomology classes of blowups of CP² and S²×S², in both
//! coordinate systems, with the intersection pairing.
//!
//! Angle-bracket coordinates ⟨r; s₀,…,s_N⟩ refer to the CP² basis
//! (r·L − Σ sᵢEᵢ); parenthesis coordinates (d,e; m₁,…,m_N) refer to the
//! S²×S² basis (d·S₁ + e·S₂ − Σ mᵢE'ᵢ). The two are related by
//!
//!   (d,e; m₁,m₂,…) = ⟨d+e−m₁; d−m₁, e−m₁, m₂,…⟩
//!   ⟨r; s₀,s₁,s₂,…⟩ = (r−s₁, r−s₀; r−s₀−s₁, s₂,…)
//!
//! Classes live in the direct limit over N, so trailing zeros in the tail
//! never matter. Tails are stored as runs (value, multiplicity): the
//! staircase families have tails with multiplicities in the billions, so
//! flat vectors are not an option.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::{rat_int, Count, Rational};
use crate::weights::{dot_runs, WeightSeq};

/// Run-encoded coordinate tail. No ordering or sign constraints; adjacent
/// equal runs are merged opportunistically by the mutating operations.
#[derive(Debug, Clone, PartialEq)]
pub struct Tail {
    runs: Vec<(Rational, Count)>,
}

impl Tail {
    pub fn empty() -> Self {
        Tail { runs: Vec::new() }
    }

    pub fn from_runs(raw: impl IntoIterator<Item = (Rational, Count)>) -> Self {
        let mut t = Tail::empty();
        for (v, m) in raw {
            t.push_run(v, m);
        }
        t
    }

    pub fn from_values(vals: impl IntoIterator<Item = Rational>) -> Self {
        Self::from_runs(vals.into_iter().map(|v| (v, Count::one())))
    }

    pub fn from_weights(w: &WeightSeq) -> Self {
        Self::from_runs(w.runs().iter().cloned())
    }

    pub fn runs(&self) -> &[(Rational, Count)] {
        &self.runs
    }

    pub fn push_run(&mut self, v: Rational, m: Count) {
        if m.is_zero() {
            return;
        }
        match self.runs.last_mut() {
            Some((pv, pm)) if *pv == v => *pm += m,
            _ => self.runs.push((v, m)),
        }
    }

    pub fn len(&self) -> Count {
        let mut n = Count::zero();
        for (_, m) in &self.runs {
            n += m;
        }
        n
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn sum(&self) -> Rational {
        let mut acc = Rational::zero();
        for (v, m) in &self.runs {
            acc += v * Rational::from_integer(m.clone().into());
        }
        acc
    }

    pub fn sum_sq(&self) -> Rational {
        let mut acc = Rational::zero();
        for (v, m) in &self.runs {
            acc += v * v * Rational::from_integer(m.clone().into());
        }
        acc
    }

    /// Entry at 0-based position i; zero past the end (direct-limit view).
    pub fn get(&self, i: u64) -> Rational {
        let mut pos = Count::from(i);
        for (v, m) in &self.runs {
            if pos < *m {
                return v.clone();
            }
            pos -= m;
        }
        Rational::zero()
    }

    /// Replaces the entry at position i, extending with zeros if needed.
    pub fn set(&mut self, i: u64, value: Rational) {
        let total = self.len();
        let i_count = Count::from(i);
        if i_count >= total {
            let gap = &i_count - &total;
            self.push_run(Rational::zero(), gap);
            self.push_run(value, Count::one());
            return;
        }
        // Split the run containing position i into before / entry / after.
        let mut new_runs: Vec<(Rational, Count)> = Vec::with_capacity(self.runs.len() + 2);
        let mut pos = Count::zero();
        for (v, m) in self.runs.drain(..) {
            let end = &pos + &m;
            if i_count < pos || i_count >= end {
                new_runs.push((v, m.clone()));
            } else {
                let before = &i_count - &pos;
                let after = &end - &i_count - Count::one();
                if !before.is_zero() {
                    new_runs.push((v.clone(), before));
                }
                new_runs.push((value.clone(), Count::one()));
                if !after.is_zero() {
                    new_runs.push((v, after));
                }
            }
            pos = end;
        }
        self.runs.clear();
        for (v, m) in new_runs {
            self.push_run(v, m);
        }
    }

    pub fn add_at(&mut self, i: u64, delta: &Rational) {
        if delta.is_zero() {
            return;
        }
        let v = self.get(i);
        self.set(i, v + delta);
    }

    pub fn swap(&mut self, i: u64, j: u64) {
        if i == j {
            return;
        }
        let vi = self.get(i);
        let vj = self.get(j);
        if vi == vj {
            return;
        }
        self.set(i, vj);
        self.set(j, vi);
    }

    /// Sorts runs by value, largest first, merging equal values.
    pub fn sort_descending(&mut self) {
        self.runs.sort_by(|(a, _), (b, _)| b.cmp(a));
        let old = core::mem::take(&mut self.runs);
        for (v, m) in old {
            self.push_run(v, m);
        }
    }

    pub fn strip_zeros_anywhere(&mut self) {
        self.runs.retain(|(v, _)| !v.is_zero());
    }

    pub fn strip_trailing_zeros(&mut self) {
        while matches!(self.runs.last(), Some((v, _)) if v.is_zero()) {
            self.runs.pop();
        }
    }

    /// First entry, if any.
    pub fn first(&self) -> Option<&Rational> {
        self.runs.first().map(|(v, _)| v)
    }

    /// Drops the first entry (decrementing the leading run).
    pub fn pop_front(&mut self) -> Option<Rational> {
        let (v, m) = self.runs.first_mut()?;
        let value = v.clone();
        if m.is_one() {
            self.runs.remove(0);
        } else {
            *m -= Count::one();
        }
        Some(value)
    }

    pub fn push_front(&mut self, v: Rational) {
        match self.runs.first_mut() {
            Some((pv, pm)) if *pv == v => *pm += Count::one(),
            _ => self.runs.insert(0, (v, Count::one())),
        }
    }

    /// Positional sum of two tails, zero-padding the shorter.
    pub fn zip_add(&self, other: &Tail) -> Tail {
        let mut out = Tail::empty();
        let mut ia = 0usize;
        let mut ib = 0usize;
        let mut rem_a: Count = self.runs.first().map(|(_, m)| m.clone()).unwrap_or_default();
        let mut rem_b: Count = other.runs.first().map(|(_, m)| m.clone()).unwrap_or_default();
        while ia < self.runs.len() || ib < other.runs.len() {
            let va = if ia < self.runs.len() { self.runs[ia].0.clone() } else { Rational::zero() };
            let vb = if ib < other.runs.len() { other.runs[ib].0.clone() } else { Rational::zero() };
            let step = match (ia < self.runs.len(), ib < other.runs.len()) {
                (true, true) => rem_a.clone().min(rem_b.clone()),
                (true, false) => rem_a.clone(),
                (false, true) => rem_b.clone(),
                (false, false) => break,
            };
            out.push_run(va + vb, step.clone());
            if ia < self.runs.len() {
                rem_a -= &step;
                if rem_a.is_zero() {
                    ia += 1;
                    if ia < self.runs.len() {
                        rem_a = self.runs[ia].1.clone();
                    }
                }
            }
            if ib < other.runs.len() {
                rem_b -= &step;
                if rem_b.is_zero() {
                    ib += 1;
                    if ib < other.runs.len() {
                        rem_b = other.runs[ib].1.clone();
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Tail {
        Tail { runs: self.runs.iter().map(|(v, m)| (v * r, m.clone())).collect() }
    }

    /// Flat entries for small tails.
    pub fn to_vec(&self) -> Option<Vec<Rational>> {
        let n = self.len().to_usize()?;
        let mut out = Vec::with_capacity(n);
        for (v, m) in &self.runs {
            out.extend(core::iter::repeat_with(|| v.clone()).take(m.to_usize()?));
        }
        Some(out)
    }
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, m)) in self.runs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if m.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^x{m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Blowup of CP²: ⟨r; s₀,…,s_N⟩.
    Cp2,
    /// Blowup of S²×S²: (d,e; m₁,…,m_N).
    S2s2,
}

/// A second-cohomology class in either basis. Equality compares the same
/// basis with trailing zeros stripped; use [`CohomClass::same_element`] to
/// compare across bases.
#[derive(Debug, Clone)]
pub struct CohomClass {
    basis: Basis,
    /// (r, unused) in Cp2; (d, e) in S2s2.
    head: (Rational, Rational),
    tail: Tail,
}

impl CohomClass {
    pub fn cp2(r: Rational, tail: Tail) -> Self {
        CohomClass { basis: Basis::Cp2, head: (r, Rational::zero()), tail }
    }

    pub fn s2s2(d: Rational, e: Rational, tail: Tail) -> Self {
        CohomClass { basis: Basis::S2s2, head: (d, e), tail }
    }

    /// E₀ = ⟨0; −1, 0⟩, the line-less exceptional class; equals (1,0;1).
    pub fn e0() -> Self {
        CohomClass::cp2(Rational::zero(), Tail::from_values([rat_int(-1), Rational::zero()]))
    }

    /// E'_i = (0,0;−1) in the direct limit (the slot index is immaterial).
    pub fn e_prime() -> Self {
        CohomClass::s2s2(Rational::zero(), Rational::zero(), Tail::from_values([rat_int(-1)]))
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// d (S²×S²) or r (CP²).
    pub fn head0(&self) -> &Rational {
        &self.head.0
    }

    /// e; only meaningful in the S²×S² basis.
    pub fn head1(&self) -> &Rational {
        debug_assert_eq!(self.basis, Basis::S2s2);
        &self.head.1
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn tail_mut(&mut self) -> &mut Tail {
        &mut self.tail
    }

    /// Applies (convert1) or (convert2); an involution up to trailing zeros.
    pub fn convert_basis(&self) -> CohomClass {
        match self.basis {
            Basis::S2s2 => {
                // (d,e;m₁,m₂,…) = ⟨d+e−m₁; d−m₁, e−m₁, m₂,…⟩
                let mut rest = self.tail.clone();
                let m1 = rest.pop_front().unwrap_or_else(Rational::zero);
                let (d, e) = (&self.head.0, &self.head.1);
                let r = d + e - &m1;
                let mut tail = Tail::empty();
                tail.push_run(d - &m1, Count::one());
                tail.push_run(e - &m1, Count::one());
                for (v, m) in rest.runs() {
                    tail.push_run(v.clone(), m.clone());
                }
                CohomClass::cp2(r, tail)
            }
            Basis::Cp2 => {
                // ⟨r; s₀,s₁,s₂,…⟩ = (r−s₁, r−s₀; r−s₀−s₁, s₂,…)
                let mut rest = self.tail.clone();
                let s0 = rest.pop_front().unwrap_or_else(Rational::zero);
                let s1 = rest.pop_front().unwrap_or_else(Rational::zero);
                let r = &self.head.0;
                let mut tail = Tail::empty();
                tail.push_run(r - &s0 - &s1, Count::one());
                for (v, m) in rest.runs() {
                    tail.push_run(v.clone(), m.clone());
                }
                CohomClass::s2s2(r - &s1, r - &s0, tail)
            }
        }
    }

    pub fn to_s2s2(&self) -> CohomClass {
        match self.basis {
            Basis::S2s2 => self.clone(),
            Basis::Cp2 => self.convert_basis(),
        }
    }

    pub fn to_cp2(&self) -> CohomClass {
        match self.basis {
            Basis::Cp2 => self.clone(),
            Basis::S2s2 => self.convert_basis(),
        }
    }

    /// 2(d+e) − Σmᵢ, equivalently 3r − Σsᵢ; basis-independent.
    pub fn chern_number(&self) -> Rational {
        match self.basis {
            Basis::S2s2 => rat_int(2) * (&self.head.0 + &self.head.1) - self.tail.sum(),
            Basis::Cp2 => rat_int(3) * &self.head.0 - self.tail.sum(),
        }
    }

    /// 2de − Σmᵢ², equivalently r² − Σsᵢ²; basis-independent.
    pub fn self_intersection(&self) -> Rational {
        match self.basis {
            Basis::S2s2 => rat_int(2) * &self.head.0 * &self.head.1 - self.tail.sum_sq(),
            Basis::Cp2 => &self.head.0 * &self.head.0 - self.tail.sum_sq(),
        }
    }

    /// Intersection pairing d_x·e_y + d_y·e_x − Σ mᵢm'ᵢ, with positional
    /// tail pairing and zero-padding.
    pub fn pairing(&self, other: &CohomClass) -> Rational {
        let x = self.to_s2s2();
        let y = other.to_s2s2();
        &x.head.0 * &y.head.1 + &y.head.0 * &x.head.1 - dot_runs(x.tail.runs(), y.tail.runs())
    }

    /// Canonical form for storage and search: S²×S² basis, tail sorted
    /// non-increasing with zeros stripped, and d ≥ e. Tail permutations and
    /// the d↔e swap are Cremona moves, so this preserves exceptionality.
    pub fn canonical(&self) -> CohomClass {
        let mut c = self.to_s2s2();
        c.tail.sort_descending();
        c.tail.strip_zeros_anywhere();
        if c.head.0 < c.head.1 {
            core::mem::swap(&mut c.head.0, &mut c.head.1);
        }
        c
    }

    /// Same element of the direct limit, comparing in the S²×S² basis
    /// without reordering.
    pub fn same_element(&self, other: &CohomClass) -> bool {
        let mut a = self.to_s2s2();
        let mut b = other.to_s2s2();
        a.tail.strip_trailing_zeros();
        b.tail.strip_trailing_zeros();
        a.head == b.head && a.tail == b.tail
    }

    pub fn scale(&self, r: &Rational) -> CohomClass {
        CohomClass {
            basis: self.basis,
            head: (&self.head.0 * r, &self.head.1 * r),
            tail: self.tail.scale(r),
        }
    }

    /// Positional sum; both classes must be in the same basis.
    pub fn add(&self, other: &CohomClass) -> CohomClass {
        assert_eq!(self.basis, other.basis, "adding classes requires a common basis");
        CohomClass {
            basis: self.basis,
            head: (&self.head.0 + &other.head.0, &self.head.1 + &other.head.1),
            tail: self.tail.zip_add(&other.tail),
        }
    }
}

impl PartialEq for CohomClass {
    fn eq(&self, other: &Self) -> bool {
        if self.basis != other.basis {
            return false;
        }
        let mut a = self.tail.clone();
        let mut b = other.tail.clone();
        a.strip_trailing_zeros();
        b.strip_trailing_zeros();
        let heads_match = match self.basis {
            Basis::Cp2 => self.head.0 == other.head.0,
            Basis::S2s2 => self.head == other.head,
        };
        heads_match && a == b
    }
}

impl fmt::Display for CohomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.basis {
            Basis::Cp2 => write!(f, "<{}; {}>", self.head.0, self.tail),
            Basis::S2s2 => write!(f, "({},{}; {})", self.head.0, self.head.1, self.tail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuasiPerfectRejection {
    /// Entries must be integers in the S²×S² basis.
    NonInteger,
    /// Head entries a, b must be nonnegative.
    NegativeHead,
    /// The tail is not W(c,d) for positive integers c ≥ d.
    TailNotWeightSequence,
    /// Chern number 2(a+b) − Σmᵢ must equal 1.
    WrongChern(Rational),
    /// Self-intersection 2ab − Σmᵢ² must equal −1.
    WrongSquare(Rational),
    /// c and d must be coprime.
    NotCoprime,
}

impl fmt::Display for QuasiPerfectRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuasiPerfectRejection::NonInteger => write!(f, "entries are not all integers"),
            QuasiPerfectRejection::NegativeHead => write!(f, "head entries are negative"),
            QuasiPerfectRejection::TailNotWeightSequence => write!(f, "tail is not a weight sequence W(c,d)"),
            QuasiPerfectRejection::WrongChern(c) => write!(f, "Chern number is {c}, not 1"),
            QuasiPerfectRejection::WrongSquare(s) => write!(f, "self-intersection is {s}, not -1"),
            QuasiPerfectRejection::NotCoprime => write!(f, "c and d share a factor"),
        }
    }
}

impl core::error::Error for QuasiPerfectRejection {}

/// A certified quasi-perfect quadruple: the class (a,b;W(c,d)) with
/// c+d = 2(a+b), cd = 2ab+1, gcd(c,d) = 1. These relations force Chern
/// number 1 and self-intersection −1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuasiPerfect {
    a: BigUint,
    b: BigUint,
    c: BigUint,
    d: BigUint,
}

impl QuasiPerfect {
    pub fn new(
        a: impl Into<BigUint>,
        b: impl Into<BigUint>,
        c: impl Into<BigUint>,
        d: impl Into<BigUint>,
    ) -> Result<Self, QuasiPerfectRejection> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        if c.gcd(&d) != BigUint::one() {
            return Err(QuasiPerfectRejection::NotCoprime);
        }
        let two = BigUint::from(2u32);
        if &c + &d != &two * (&a + &b) {
            let chern = BigInt::from(&two * (&a + &b)) - BigInt::from(&c + &d) + BigInt::one();
            return Err(QuasiPerfectRejection::WrongChern(Rational::from_integer(chern)));
        }
        if &c * &d != &two * &a * &b + BigUint::one() {
            let sq = BigInt::from(&two * &a * &b) - BigInt::from(&c * &d);
            return Err(QuasiPerfectRejection::WrongSquare(Rational::from_integer(sq)));
        }
        Ok(QuasiPerfect { a, b, c, d })
    }

    pub fn a(&self) -> &BigUint {
        &self.a
    }

    pub fn b(&self) -> &BigUint {
        &self.b
    }

    pub fn c(&self) -> &BigUint {
        &self.c
    }

    pub fn d(&self) -> &BigUint {
        &self.d
    }

    /// x = a + b.
    pub fn x(&self) -> BigUint {
        &self.a + &self.b
    }

    /// ε = a − b (signed; the families keep a ≥ b).
    pub fn epsilon(&self) -> BigInt {
        BigInt::from(self.a.clone()) - BigInt::from(self.b.clone())
    }

    /// δ = (c − d)/2; integral because c+d is even and gcd(c,d)=1 make c,d
    /// both odd.
    pub fn delta(&self) -> BigInt {
        (BigInt::from(self.c.clone()) - BigInt::from(self.d.clone())) / BigInt::from(2)
    }

    /// Confirms x² − 2δ² = 2 − ε².
    pub fn pell_relation_holds(&self) -> bool {
        let x = BigInt::from(self.x());
        let delta = self.delta();
        let eps = self.epsilon();
        &x * &x - BigInt::from(2) * &delta * &delta == BigInt::from(2) - &eps * &eps
    }

    /// The class (a,b;W(c,d)) in the S²×S² basis.
    pub fn class(&self) -> CohomClass {
        let c = Rational::from_integer(self.c.clone().into());
        let d = Rational::from_integer(self.d.clone().into());
        let w = WeightSeq::new(&c, &d).expect("nonnegative sides");
        CohomClass::s2s2(
            Rational::from_integer(self.a.clone().into()),
            Rational::from_integer(self.b.clone().into()),
            Tail::from_weights(&w),
        )
    }

    /// The ratio c/d, apex of the Γ-bound.
    pub fn ratio(&self) -> Rational {
        Rational::new(BigInt::from(self.c.clone()), BigInt::from(self.d.clone()))
    }
}

impl fmt::Display for QuasiPerfect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};W({},{}))", self.a, self.b, self.c, self.d)
    }
}

/// Recognizes (a,b;W(c,d)): reconstructs (c,d) from the tail (d is the
/// leading weight and cd is the sum of squared entries, which holds for any
/// gcd), then verifies the weight sequence, coprimality, Chern number, and
/// self-intersection.
pub fn as_quasi_perfect(x: &CohomClass) -> Result<QuasiPerfect, QuasiPerfectRejection> {
    let cls = x.to_s2s2();
    let to_uint = |r: &Rational| -> Result<BigUint, QuasiPerfectRejection> {
        if !r.is_integer() {
            return Err(QuasiPerfectRejection::NonInteger);
        }
        if r.is_negative() {
            return Err(QuasiPerfectRejection::NegativeHead);
        }
        Ok(r.to_integer().magnitude().clone())
    };
    let a = to_uint(cls.head0())?;
    let b = to_uint(cls.head1())?;
    let mut tail = cls.tail().clone();
    tail.strip_trailing_zeros();
    let Some(first) = tail.first() else {
        return Err(QuasiPerfectRejection::TailNotWeightSequence);
    };
    if !first.is_integer() || !first.is_positive() {
        return Err(QuasiPerfectRejection::TailNotWeightSequence);
    }
    let d = first.clone();
    let c = tail.sum_sq() / &d;
    if !c.is_integer() || c < d {
        return Err(QuasiPerfectRejection::TailNotWeightSequence);
    }
    let expected = WeightSeq::new(&c, &d).map_err(|_| QuasiPerfectRejection::TailNotWeightSequence)?;
    if Tail::from_weights(&expected) != tail {
        return Err(QuasiPerfectRejection::TailNotWeightSequence);
    }
    let c_int = c.to_integer().magnitude().clone();
    let d_int = d.to_integer().magnitude().clone();
    if c_int.gcd(&d_int) != BigUint::one() {
        return Err(QuasiPerfectRejection::NotCoprime);
    }
    let chern = cls.chern_number();
    if chern != rat_int(1) {
        return Err(QuasiPerfectRejection::WrongChern(chern));
    }
    let sq = cls.self_intersection();
    if sq != rat_int(-1) {
        return Err(QuasiPerfectRejection::WrongSquare(sq));
    }
    let qp = QuasiPerfect::new(a, b, c_int, d_int)?;
    debug_assert!(qp.pell_relation_holds());
    Ok(qp)
}
