//! Pell numbers P_n and half-companion Pell numbers H_n.
//!
//! Both sequences satisfy x_{n+2} = 2x_{n+1} + x_n, with P₀=0, P₁=1 and
//! H₀=1, H₁=1. Indices extend down to −2 via the same recurrence:
//! P₋₁=1, H₋₁=−1, P₋₂=−2 (and H₋₂=3, forced by the recurrence). The silver
//! ratio σ = 1+√2 gives the closed forms
//!
//!   P_n = (σⁿ − (−σ)⁻ⁿ)/(2√2),   H_n = (σⁿ + (−σ)⁻ⁿ)/2.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exact::{rat_int, ExactError, QuadraticNumber, Rational};

/// Smallest index the extended convention covers.
pub const MIN_INDEX: i64 = -2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PellError {
    /// Index below −2; the extension stops where the source convention does.
    IndexOutOfRange(i64),
}

impl fmt::Display for PellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PellError::IndexOutOfRange(n) => write!(f, "Pell index {n} below minimum {MIN_INDEX}"),
        }
    }
}

impl core::error::Error for PellError {}

/// P_n and H_n at a common index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellPair {
    pub index: i64,
    pub p: BigInt,
    pub h: BigInt,
}

/// Exact (P_n, H_n) for n ≥ −2, by forward iteration from the base cases.
pub fn pell_numbers(n: i64) -> Result<PellPair, PellError> {
    if n < MIN_INDEX {
        return Err(PellError::IndexOutOfRange(n));
    }
    // Values at indices −2 and −1.
    let mut p_lo = BigInt::from(-2);
    let mut p_hi = BigInt::from(1);
    let mut h_lo = BigInt::from(3);
    let mut h_hi = BigInt::from(-1);
    if n == -2 {
        return Ok(PellPair { index: n, p: p_lo, h: h_lo });
    }
    let mut idx = -1i64;
    while idx < n {
        let p_next = 2 * &p_hi + &p_lo;
        let h_next = 2 * &h_hi + &h_lo;
        p_lo = core::mem::replace(&mut p_hi, p_next);
        h_lo = core::mem::replace(&mut h_hi, h_next);
        idx += 1;
    }
    // p_hi / h_hi now sit at index n.
    Ok(PellPair { index: n, p: p_hi, h: h_hi })
}

/// P_n; panics below index −2 (a caller bug, the public range is checked at
/// the API boundary via [`pell_numbers`]).
pub fn pell(n: i64) -> BigInt {
    pell_numbers(n).expect("Pell index in range").p
}

/// H_n; same index contract as [`pell`].
pub fn half_companion(n: i64) -> BigInt {
    pell_numbers(n).expect("Pell index in range").h
}

pub fn pell_rat(n: i64) -> Rational {
    BigRational::from_integer(pell(n))
}

pub fn half_companion_rat(n: i64) -> Rational {
    BigRational::from_integer(half_companion(n))
}

/// All pairs for −2 ≤ n ≤ hi in one pass.
pub fn pell_table(hi: i64) -> Vec<PellPair> {
    let mut out = Vec::new();
    if hi < MIN_INDEX {
        return out;
    }
    let mut p_lo = BigInt::from(-2);
    let mut p_hi = BigInt::from(1);
    let mut h_lo = BigInt::from(3);
    let mut h_hi = BigInt::from(-1);
    out.push(PellPair { index: -2, p: p_lo.clone(), h: h_lo.clone() });
    if hi == -2 {
        return out;
    }
    out.push(PellPair { index: -1, p: p_hi.clone(), h: h_hi.clone() });
    for idx in 0..=hi {
        let p_next = 2 * &p_hi + &p_lo;
        let h_next = 2 * &h_hi + &h_lo;
        p_lo = core::mem::replace(&mut p_hi, p_next);
        h_lo = core::mem::replace(&mut h_hi, h_next);
        out.push(PellPair { index: idx, p: p_hi.clone(), h: h_hi.clone() });
    }
    out
}

/// The silver ratio σ = 1 + √2 as an element of Q(√2).
pub fn sigma() -> QuadraticNumber {
    QuadraticNumber::new(2u32, rat_int(1), rat_int(1)).expect("2 is not a square")
}

/// σ² = 3 + 2√2, the accumulation point of the ratios P_{n+2}/P_n.
pub fn sigma_sq() -> QuadraticNumber {
    QuadraticNumber::new(2u32, rat_int(3), rat_int(2)).expect("2 is not a square")
}

/// (P_n, H_n) evaluated from the closed forms in Q(√2); rational-valued by
/// construction. Useful as an independent check on the recurrence.
pub fn closed_form(n: i64) -> Result<(QuadraticNumber, QuadraticNumber), ExactError> {
    let s = sigma();
    let forward = s.pow(n)?;
    let backward = s.pow(-n)?;
    // (−σ)⁻ⁿ = (−1)ⁿ σ⁻ⁿ
    let alt = if n.rem_euclid(2) == 0 { backward } else { -backward };
    let two_sqrt2 = QuadraticNumber::new(2u32, rat_int(0), rat_int(2))?;
    let p = forward.checked_sub(&alt)?.checked_div(&two_sqrt2)?;
    let h = forward.checked_add(&alt)?.scale(&crate::exact::rat(1, 2));
    Ok((p, h))
}
