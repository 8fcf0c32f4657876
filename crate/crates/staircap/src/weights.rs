//! Weight sequences W(a,b) and normalized weight expansions w(α) = W(1,α).
//!
//! W(x,y) is defined by W(x,0) = W(0,x) = () and, for x ≤ y,
//! W(x,y) = W(y,x) = (x, W(x, y−x)): geometrically, greedily cut the largest
//! possible square off an x-by-y rectangle and record its side. The
//! computation runs the Euclidean shortcut (a whole quotient per step), and
//! the sequence is stored as runs (value, multiplicity) because
//! multiplicities grow like the continued-fraction quotients: W(c,1) has c
//! identical entries, and the class families push c past 10⁹.

use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::{rat_int, Count, Rational};
use crate::pell::pell_rat;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightError {
    /// Weight sequences are defined for nonnegative side lengths.
    NegativeInput(Rational),
    /// α must lie in [P_{2k+1}/P_{2k−1}, P_{2k+2}/P_{2k}] for the requested k.
    OutsideInterval { alpha: Rational, k: u32 },
    /// Run lists must be positive and non-increasing to form a weight sequence.
    InvalidRuns,
    /// A flat view was requested for a sequence too long to materialize.
    TooLongToFlatten(Count),
}

impl fmt::Display for WeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightError::NegativeInput(x) => write!(f, "weight sequence side {x} is negative"),
            WeightError::OutsideInterval { alpha, k } => {
                write!(f, "alpha = {alpha} lies outside the order-{k} expansion interval")
            }
            WeightError::InvalidRuns => write!(f, "runs must have positive values, positive multiplicities, and non-increasing values"),
            WeightError::TooLongToFlatten(n) => write!(f, "sequence with {n} entries is too long to flatten"),
        }
    }
}

impl core::error::Error for WeightError {}

/// A non-increasing sequence of positive rationals, stored as maximal runs.
/// Adjacent runs have strictly decreasing values.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSeq {
    runs: Vec<(Rational, Count)>,
}

impl WeightSeq {
    pub fn empty() -> Self {
        WeightSeq { runs: Vec::new() }
    }

    /// W(a,b) via the Euclidean shortcut.
    pub fn new(a: &Rational, b: &Rational) -> Result<Self, WeightError> {
        if a.is_negative() {
            return Err(WeightError::NegativeInput(a.clone()));
        }
        if b.is_negative() {
            return Err(WeightError::NegativeInput(b.clone()));
        }
        let (mut big, mut small) = if a >= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        let mut runs: Vec<(Rational, Count)> = Vec::new();
        while !small.is_zero() {
            let q = (&big / &small).floor().to_integer();
            let r = &big - Rational::from_integer(q.clone()) * &small;
            let q: Count = q.magnitude().clone();
            if r.is_zero() {
                runs.push((small, q));
                break;
            }
            runs.push((small.clone(), q));
            big = small;
            small = r;
        }
        Ok(WeightSeq { runs })
    }

    /// w(α) = W(1, α); equals (1/d)·W(c,d) when α = c/d in lowest terms.
    pub fn normalized(alpha: &Rational) -> Result<Self, WeightError> {
        Self::new(&rat_int(1), alpha)
    }

    /// Builds a sequence from (value, multiplicity) runs, merging adjacent
    /// equal values and dropping zero values or multiplicities. Values must
    /// be nonnegative and non-increasing.
    pub fn from_runs(raw: impl IntoIterator<Item = (Rational, Count)>) -> Result<Self, WeightError> {
        let mut runs: Vec<(Rational, Count)> = Vec::new();
        for (v, m) in raw {
            if v.is_negative() {
                return Err(WeightError::InvalidRuns);
            }
            if v.is_zero() || m.is_zero() {
                continue;
            }
            match runs.last_mut() {
                Some((prev, pm)) if *prev == v => *pm += m,
                Some((prev, _)) if *prev < v => return Err(WeightError::InvalidRuns),
                _ => runs.push((v, m)),
            }
        }
        Ok(WeightSeq { runs })
    }

    pub fn runs(&self) -> &[(Rational, Count)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Total number of entries in the flat view.
    pub fn len(&self) -> Count {
        let mut n = Count::zero();
        for (_, m) in &self.runs {
            n += m;
        }
        n
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

    pub fn largest(&self) -> Option<&Rational> {
        self.runs.first().map(|(v, _)| v)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        assert!(r.is_positive(), "scaling a weight sequence requires a positive factor");
        WeightSeq { runs: self.runs.iter().map(|(v, m)| (v * r, m.clone())).collect() }
    }

    /// Flat entries; errors when the total length exceeds what a Vec can hold.
    pub fn to_vec(&self) -> Result<Vec<Rational>, WeightError> {
        let n = self.len();
        let cap = n.to_usize().ok_or_else(|| WeightError::TooLongToFlatten(n.clone()))?;
        let mut out = Vec::with_capacity(cap);
        for (v, m) in &self.runs {
            let m = m.to_usize().ok_or_else(|| WeightError::TooLongToFlatten(self.len()))?;
            out.extend(core::iter::repeat_with(|| v.clone()).take(m));
        }
        Ok(out)
    }
}

impl fmt::Display for WeightSeq {
    /// Runs print as value^xN, e.g. "(70^x4, 58, 12^x4, 10, 2^x5)".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
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
        write!(f, ")")
    }
}

/// Dot product of two run-encoded non-increasing sequences, pairing entries
/// positionally and zero-padding the shorter one.
pub fn dot_runs(a: &[(Rational, Count)], b: &[(Rational, Count)]) -> Rational {
    let mut acc = Rational::zero();
    let mut ia = 0usize;
    let mut ib = 0usize;
    let mut rem_a: Count = a.first().map(|(_, m)| m.clone()).unwrap_or_default();
    let mut rem_b: Count = b.first().map(|(_, m)| m.clone()).unwrap_or_default();
    while ia < a.len() && ib < b.len() {
        let step = rem_a.clone().min(rem_b.clone());
        acc += &a[ia].0 * &b[ib].0 * Rational::from_integer(step.clone().into());
        rem_a -= &step;
        rem_b -= &step;
        if rem_a.is_zero() {
            ia += 1;
            if ia < a.len() {
                rem_a = a[ia].1.clone();
            }
        }
        if rem_b.is_zero() {
            ib += 1;
            if ib < b.len() {
                rem_b = b[ib].1.clone();
            }
        }
    }
    acc
}

/// The order-k decomposition of w(α) for α in
/// [P_{2k+1}/P_{2k−1}, P_{2k+2}/P_{2k}]: an explicit prefix
///
///   (1, (P₂/2 − (P₀/2)α)^×4, P₁α − P₃, …,
///       (P_{2k}/2 − (P_{2k−2}/2)α)^×4, P_{2k−1}α − P_{2k+1})
///
/// followed by the tail W(P_{2k+2}/2 − (P_{2k}/2)α, P_{2k−1}α − P_{2k+1}).
/// At k=0 the prefix is just (1) and the tail is (1, α−1). Boundary values
/// of α may zero out the final prefix entry; flattening strips it.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredExpansion {
    pub k: u32,
    /// (value, multiplicity) pairs in order; multiplicities are 1 or 4.
    pub prefix: Vec<(Rational, u32)>,
    /// Arguments of the closing weight sequence.
    pub tail: (Rational, Rational),
}

impl StructuredExpansion {
    /// Prefix ++ W(tail), as a single weight sequence.
    pub fn flatten(&self) -> Result<WeightSeq, WeightError> {
        let mut runs: Vec<(Rational, Count)> = self
            .prefix
            .iter()
            .map(|(v, m)| (v.clone(), Count::from(*m)))
            .collect();
        let tail = WeightSeq::new(&self.tail.0, &self.tail.1)?;
        runs.extend(tail.runs.iter().cloned());
        WeightSeq::from_runs(runs)
    }
}

/// Decomposes w(α) per the order-k expansion; α must lie in the admissible
/// interval (right endpoint +∞ when k=0).
pub fn structured_expansion(alpha: &Rational, k: u32) -> Result<StructuredExpansion, WeightError> {
    let k_i = i64::from(k);
    let lo = pell_rat(2 * k_i + 1);
    let lo_den = pell_rat(2 * k_i - 1);
    let outside = WeightError::OutsideInterval { alpha: alpha.clone(), k };
    if alpha * &lo_den < lo {
        return Err(outside);
    }
    if k > 0 {
        let hi = pell_rat(2 * k_i + 2);
        let hi_den = pell_rat(2 * k_i);
        if alpha * &hi_den > hi {
            return Err(outside);
        }
    }
    let half = crate::exact::rat(1, 2);
    let mut prefix = Vec::with_capacity(1 + 2 * k as usize);
    prefix.push((rat_int(1), 1u32));
    for j in 1..=k_i {
        let square = (pell_rat(2 * j) - pell_rat(2 * j - 2) * alpha) * &half;
        let single = pell_rat(2 * j - 1) * alpha - pell_rat(2 * j + 1);
        prefix.push((square, 4));
        prefix.push((single, 1));
    }
    let tail = (
        (pell_rat(2 * k_i + 2) - pell_rat(2 * k_i) * alpha) * &half,
        pell_rat(2 * k_i - 1) * alpha - pell_rat(2 * k_i + 1),
    );
    Ok(StructuredExpansion { k, prefix, tail })
}
