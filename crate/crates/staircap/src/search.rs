//! Bounded search for exceptional classes and a certified capacity bracket
//! at rational points.
//!
//! A class (x, y; m) with positive heads can only obstruct above
//! √gamma_sq · √(α/2β) for gamma_sq > 1 if 2xy ≤ 1/(gamma_sq − 1):
//! Cauchy-Schwarz bounds the pairing with w(α) by √α·√(2xy+1), while
//! (x+βy)² ≥ 4βxy, so μ ≤ √(α/2β)·√(1 + 1/2xy). Heads with a zero force the
//! tail down to a single ±1 entry, which leaves exactly the fiber class
//! (0,0;−1) with μ = 0 and the section class (1,0;1). Enumerating every
//! exceptional class up to the product bound therefore pins the capacity
//! down exactly whenever the catalog maximum or the volume clears the
//! threshold, and brackets it otherwise.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::cohomology::{CohomClass, Tail};
use crate::cremona::{is_exceptional, MoveTrace};
use crate::exact::{rat_int, Count, Rational, Scalar};
use crate::weights::{dot_runs, WeightSeq};

/// Errors from capacity queries against a class catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchError {
    /// Capacities are computed on the domain α ≥ 1, β ≥ 1.
    Domain { name: &'static str, value: Rational },
    /// Certification needs a factor with gamma_sq > 1.
    GammaRange(Rational),
    /// The catalog is complete only up to its bound; the requested factor
    /// needs every class with 2xy up to `required`.
    InsufficientBound { required: BigInt, bound: u64 },
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::Domain { name, value } => {
                write!(f, "{name} = {value} is out of range (need at least 1)")
            }
            SearchError::GammaRange(g) => {
                write!(f, "gamma_sq = {g} does not exceed 1")
            }
            SearchError::InsufficientBound { required, bound } => {
                write!(f, "certification needs catalog bound {required}, have {bound}")
            }
        }
    }
}

impl core::error::Error for SearchError {}

/// One catalog class: the canonical form, its integer heads x ≥ y, and the
/// product 2xy that governs certification.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub class: CohomClass,
    pub x: u64,
    pub y: u64,
    pub product2: u64,
}

impl CatalogEntry {
    /// The move chain reducing this class to the terminal form. Traces are
    /// a deterministic function of the class and are recomputed on demand;
    /// large catalogs hold far too many classes to keep every chain around.
    pub fn certify(&self) -> MoveTrace {
        is_exceptional(&self.class).expect("catalog entries pass the reduction test")
    }
}

/// Every exceptional class (x, y; m) with 2xy ≤ bound, in canonical form
/// (x ≥ y, tail positive and non-increasing), plus the two degenerate
/// shapes outside the positive grid. The order is deterministic:
/// degenerates first, then y ascending, x ascending, tails lexicographically
/// decreasing.
#[derive(Debug, Clone)]
pub struct ExceptionalCatalog {
    bound: u64,
    entries: Vec<CatalogEntry>,
}

impl ExceptionalCatalog {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index of the entry equal to `class` after canonicalization.
    pub fn position(&self, class: &CohomClass) -> Option<usize> {
        let c = class.canonical();
        self.entries.iter().position(|e| {
            e.class.head0() == c.head0()
                && e.class.head1() == c.head1()
                && e.class.same_element(&c)
        })
    }

    pub fn contains(&self, class: &CohomClass) -> bool {
        self.position(class).is_some()
    }
}

/// Every non-increasing vector with entries in [1, cap], the given sum and
/// the given sum of squares, emitted as (value, multiplicity) runs. Two cuts
/// keep the walk tight: a part v needs v(v−1) ≤ Σm² − Σm afterwards (parts
/// ≥ 1 keep the square sum at least the sum) and v·Σm ≥ Σm² (parts ≤ v cap
/// the square sum at v times the sum).
fn partition_dfs<F: FnMut(&[(u64, u64)])>(
    sum: u64,
    sq: u64,
    cap: u64,
    runs: &mut Vec<(u64, u64)>,
    emit: &mut F,
) {
    if sq < sum {
        return;
    }
    if sq == sum {
        // Only parts of size 1 can finish: any v ≥ 2 would drop the square
        // sum below the remaining sum.
        if sum > 0 {
            runs.push((1, sum));
            emit(runs);
            runs.pop();
        } else {
            emit(runs);
        }
        return;
    }
    let excess = sq - sum;
    let mut v = cap.min(sum);
    while v >= 2 && v * (v - 1) > excess {
        v -= 1;
    }
    let lo = core::cmp::max(2, sq.div_ceil(sum));
    while v >= lo {
        let merged = matches!(runs.last(), Some(&(value, _)) if value == v);
        if merged {
            runs.last_mut().expect("just matched").1 += 1;
        } else {
            runs.push((v, 1));
        }
        partition_dfs(sum - v, sq - v * v, v, runs, emit);
        if merged {
            runs.last_mut().expect("just matched").1 -= 1;
        } else {
            runs.pop();
        }
        v -= 1;
    }
}

/// Sum of the first k parts of a run-encoded non-increasing vector.
fn prefix_sum(runs: &[(u64, u64)], k: u64) -> u64 {
    let mut left = k;
    let mut acc = 0;
    for &(v, c) in runs {
        let t = left.min(c);
        acc += v * t;
        left -= t;
        if left == 0 {
            break;
        }
    }
    acc
}

/// Positivity screens against three fixed small exceptional classes.
/// Distinct exceptional classes pair nonnegatively, so a candidate failing
/// a screen cannot be exceptional; each screen exempts its own head pair.
fn screens_pass(x: u64, y: u64, runs: &[(u64, u64)]) -> bool {
    ((x, y) == (1, 1) || prefix_sum(runs, 3) <= x + y)
        && ((x, y) == (2, 1) || prefix_sum(runs, 5) <= x + 2 * y)
        && ((x, y) == (2, 2) || runs[0].0 + prefix_sum(runs, 6) <= 2 * (x + y))
}

/// Plain-integer mirror of the certified reduction: sort the tail, stop at
/// the terminal form (degree 0, a single −1, zeros elsewhere), otherwise
/// apply the top triple move while its δ is negative. Candidates come from
/// the Diophantine enumeration, so the two defining relations already hold.
fn integer_reduction_accepts(x: u64, y: u64, runs: &[(u64, u64)]) -> bool {
    let m1 = runs[0].0 as i64;
    let mut tail: Vec<i64> = Vec::new();
    tail.push(x as i64 - m1);
    tail.push(y as i64 - m1);
    let mut first = true;
    for &(v, c) in runs {
        let reps = if first { c - 1 } else { c };
        first = false;
        for _ in 0..reps {
            tail.push(v as i64);
        }
    }
    let mut r = x as i64 + y as i64 - m1;
    let mut iters = 0u32;
    loop {
        iters += 1;
        assert!(iters < 100_000, "the reduction did not settle");
        tail.sort_unstable_by(|a, b| b.cmp(a));
        if r == 0 {
            let mut minus_ones = 0u32;
            let mut clean = true;
            for &v in &tail {
                if v == 0 {
                    continue;
                }
                if v == -1 {
                    minus_ones += 1;
                } else {
                    clean = false;
                    break;
                }
            }
            if clean && minus_ones == 1 {
                return true;
            }
        }
        while tail.len() < 3 {
            tail.push(0);
        }
        let delta = r - tail[0] - tail[1] - tail[2];
        if delta >= 0 {
            return false;
        }
        r += delta;
        tail[0] += delta;
        tail[1] += delta;
        tail[2] += delta;
    }
}

/// Enumerates every exceptional class with head product 2xy ≤ bound.
///
/// Chern number 1 and self-intersection −1 pin a candidate (x, y; m) to
/// Σmᵢ = 2(x+y)−1 and Σmᵢ² = 2xy+1, and pairing nonnegatively with the
/// section class (1,0;1) caps every tail entry at y, so each head pair
/// leaves a finite partition search. Survivors of the screens are kept or
/// dropped by the integer reduction, whose verdict agrees with the
/// certified rational one (the tests cross-check candidate by candidate).
/// The construction emits each canonical form once, so no dedup pass is
/// needed. Heads with x + y ≤ 1 admit only the two degenerate shapes,
/// pushed explicitly up front.
pub fn enumerate_exceptional(bound: u64) -> ExceptionalCatalog {
    assert!(bound >= 1, "catalog bound must be at least 1");
    let mut entries = Vec::new();
    for (x, y, tail) in [
        (0u64, 0u64, Tail::from_values([rat_int(-1)])),
        (1, 0, Tail::from_values([rat_int(1)])),
    ] {
        let class = CohomClass::s2s2(
            Rational::from_integer(x.into()),
            Rational::from_integer(y.into()),
            tail,
        );
        is_exceptional(&class).expect("the degenerate classes are exceptional");
        entries.push(CatalogEntry { class, x, y, product2: 0 });
    }
    let mut y: u64 = 1;
    while 2 * (y as u128) * (y as u128) <= bound as u128 {
        let mut x = y;
        loop {
            let wide = 2 * (x as u128) * (y as u128);
            if wide > bound as u128 {
                break;
            }
            let product2 = wide as u64;
            let sum = 2 * (x + y) - 1;
            let sq = product2 + 1;
            let mut runs = Vec::new();
            partition_dfs(sum, sq, y, &mut runs, &mut |runs: &[(u64, u64)]| {
                if !screens_pass(x, y, runs) || !integer_reduction_accepts(x, y, runs) {
                    return;
                }
                let tail = Tail::from_runs(
                    runs.iter()
                        .map(|&(v, c)| (Rational::from_integer(v.into()), Count::from(c))),
                );
                let class = CohomClass::s2s2(
                    Rational::from_integer(x.into()),
                    Rational::from_integer(y.into()),
                    tail,
                );
                entries.push(CatalogEntry { class, x, y, product2 });
            });
            x += 1;
        }
        y += 1;
    }
    ExceptionalCatalog { bound, entries }
}

/// Largest head product 2xy compatible with an obstruction at least
/// √gamma_sq times the volume bound: ⌊1/(gamma_sq − 1)⌋.
pub fn certification_radius(gamma_sq: &Rational) -> Result<BigInt, SearchError> {
    let one = rat_int(1);
    if *gamma_sq <= one {
        return Err(SearchError::GammaRange(gamma_sq.clone()));
    }
    Ok((one / (gamma_sq - &rat_int(1))).floor().to_integer())
}

/// Capacity query outcome. `value` = max(class_max, volume) is always a
/// lower bound for the capacity; when it reaches √gamma_sq times the volume
/// no class outside the certification radius can compete, so it is the
/// capacity itself. Otherwise the capacity lies in [value, upper).
#[derive(Debug, Clone)]
pub struct CapacityAnswer {
    /// √(α/2β).
    pub volume: Scalar,
    /// Largest sorted-pairing obstruction over catalog entries inside the
    /// certification radius.
    pub class_max: Scalar,
    /// Indices of the entries attaining `class_max`.
    pub best: Vec<usize>,
    /// max(class_max, volume).
    pub value: Scalar,
    /// Whether value² ≥ gamma_sq · α/2β, making `value` exact.
    pub certified: bool,
    /// Equal to `value` when certified, else the strict upper bound
    /// √gamma_sq · volume.
    pub upper: Scalar,
}

impl CapacityAnswer {
    /// The exact capacity, when certified.
    pub fn exact(&self) -> Option<&Scalar> {
        if self.certified {
            Some(&self.value)
        } else {
            None
        }
    }
}

/// Float dot of a weight sequence against a run-encoded tail, truncating at
/// the shorter side. Used only as a screen: values near the running maximum
/// are recompared exactly, and the double error on these short sums is
/// orders of magnitude below the screen margin.
fn dot_runs_f64(a: &[(f64, u64)], b: &[(Rational, Count)]) -> f64 {
    let mut acc = 0.0;
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut rem_a = a.first().map(|&(_, m)| m).unwrap_or(0);
    let mut rem_b = b
        .first()
        .map(|(_, m)| m.to_u64().unwrap_or(u64::MAX))
        .unwrap_or(0);
    while ia < a.len() && ib < b.len() {
        let step = rem_a.min(rem_b);
        acc += a[ia].0 * b[ib].0.to_f64().unwrap_or(0.0) * step as f64;
        rem_a -= step;
        rem_b -= step;
        if rem_a == 0 {
            ia += 1;
            if ia < a.len() {
                rem_a = a[ia].1;
            }
        }
        if rem_b == 0 {
            ib += 1;
            if ib < b.len() {
                rem_b = b[ib].1.to_u64().unwrap_or(u64::MAX);
            }
        }
    }
    acc
}

/// Exact capacity value or two-sided bracket at rational (α, β). The
/// certification factor is passed as its square so thresholds like
/// γ² = 49/48 stay rational. Requires the catalog to be complete out to
/// ⌊1/(gamma_sq − 1)⌋; only entries inside that radius enter the maximum,
/// since anything farther out stays below the threshold anyway.
pub fn capacity_bracket(
    alpha: &Rational,
    beta: &Rational,
    gamma_sq: &Rational,
    catalog: &ExceptionalCatalog,
) -> Result<CapacityAnswer, SearchError> {
    if alpha < &rat_int(1) {
        return Err(SearchError::Domain { name: "alpha", value: alpha.clone() });
    }
    if beta < &rat_int(1) {
        return Err(SearchError::Domain { name: "beta", value: beta.clone() });
    }
    let required = certification_radius(gamma_sq)?;
    if required > BigInt::from(catalog.bound) {
        return Err(SearchError::InsufficientBound { required, bound: catalog.bound });
    }
    let limit = required.to_u64().expect("nonnegative and at most the catalog bound");
    let weights = WeightSeq::normalized(alpha).expect("alpha is at least 1");
    let weights_f: Vec<(f64, u64)> = weights
        .runs()
        .iter()
        .map(|(v, m)| (v.to_f64().unwrap_or(0.0), m.to_u64().unwrap_or(u64::MAX)))
        .collect();
    let beta_f = beta.to_f64().unwrap_or(f64::MAX);
    let mut class_max = Rational::zero();
    let mut class_max_f = 0.0f64;
    let mut best: Vec<usize> = Vec::new();
    for (i, entry) in catalog.entries.iter().enumerate() {
        if entry.product2 > limit || entry.x + entry.y == 0 {
            continue;
        }
        let den_f = entry.x as f64 + beta_f * entry.y as f64;
        let approx = dot_runs_f64(&weights_f, entry.class.tail().runs()) / den_f;
        if approx < class_max_f - 1e-6 {
            continue;
        }
        let num = dot_runs(weights.runs(), entry.class.tail().runs());
        let den = Rational::from_integer(entry.x.into())
            + beta * &Rational::from_integer(entry.y.into());
        let value = num / den;
        match value.cmp(&class_max) {
            Ordering::Greater => {
                class_max = value;
                class_max_f = approx;
                best.clear();
                best.push(i);
            }
            Ordering::Equal => best.push(i),
            Ordering::Less => {}
        }
    }
    let vol_sq = alpha / &(rat_int(2) * beta);
    let class_sq = &class_max * &class_max;
    let class_wins = class_sq >= vol_sq;
    let value_sq = if class_wins { class_sq } else { vol_sq.clone() };
    let threshold_sq = gamma_sq * &vol_sq;
    let certified = value_sq >= threshold_sq;
    let volume = Scalar::from(vol_sq).sqrt().expect("the squared volume is positive");
    let value = if class_wins {
        Scalar::from(class_max.clone())
    } else {
        volume.clone()
    };
    let upper = if certified {
        value.clone()
    } else {
        Scalar::from(threshold_sq)
            .sqrt()
            .expect("the squared threshold is positive")
    };
    Ok(CapacityAnswer {
        volume,
        class_max: Scalar::from(class_max),
        best,
        value,
        certified,
        upper,
    })
}
