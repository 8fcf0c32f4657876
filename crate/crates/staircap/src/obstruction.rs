//! Obstruction functionals and exact lower-bound envelopes.
//!
//! An exceptional class E = (d,e;m⃗) obstructs embeddings of the ellipsoid
//! E(1,α) into scalings of the polydisk P(1,β) through
//!
//!   μ_{α,β}(E) = (w(α)·m⃗)/(d+βe),
//!
//! and a quasi-perfect class C = (a,b;W(c,d)) yields the two-piece bound
//!
//!   Γ_{α,β}(C) = dα/(a+βb) for α ≤ c/d,  c/(a+βb) for α ≥ c/d,
//!
//! alongside the volume bound √(α/2β). The envelope of finitely many Γ
//! pieces and the volume curve is computed exactly, with every crossing
//! solved in closed form and recorded with its witnessing class.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::cohomology::{CohomClass, QuasiPerfect};
use crate::exact::{ExactError, Rational, Scalar};
use crate::weights::{dot_runs, WeightSeq};

/// Pairing convention for μ when the tail is not already sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingOrder {
    /// Pair w(α) against the tail in the class's stored order (the
    /// definition; quasi-perfect tails W(c,d) are already non-increasing).
    Stored,
    /// Sort the tail non-increasingly first. Permutations of an exceptional
    /// class stay exceptional, so this maximizing order is what a supremum
    /// over all of ℰ sees.
    SortedDescending,
}

/// μ_{α,β}(E): zero for the fiber classes (d = e = 0), otherwise the padded
/// dot product of w(α) with the tail over d + βe. β may be irrational.
pub fn mu(alpha: &Rational, beta: &Scalar, class: &CohomClass, order: PairingOrder) -> Scalar {
    let e = class.to_s2s2();
    let den = Scalar::from(e.head0().clone()) + beta.clone() * Scalar::from(e.head1().clone());
    if den.is_zero() {
        return Scalar::zero();
    }
    let w = WeightSeq::normalized(alpha).expect("weight expansion needs alpha > 0");
    let num = match order {
        PairingOrder::Stored => dot_runs(w.runs(), e.tail().runs()),
        PairingOrder::SortedDescending => {
            let mut t = e.tail().clone();
            t.sort_descending();
            dot_runs(w.runs(), t.runs())
        }
    };
    Scalar::from(num) / den
}

/// Γ_{α,β}(C) for a quasi-perfect C = (a,b;W(c,d)). α may be irrational
/// (used at staircase accumulation points), as may β.
pub fn gamma_bound(alpha: &Scalar, beta: &Scalar, class: &QuasiPerfect) -> Scalar {
    let a = Scalar::from(Rational::from_integer(class.a().clone().into()));
    let b = Scalar::from(Rational::from_integer(class.b().clone().into()));
    let c = Scalar::from(Rational::from_integer(class.c().clone().into()));
    let d = Scalar::from(Rational::from_integer(class.d().clone().into()));
    let den = a + beta.clone() * b;
    let apex = Scalar::from(class.ratio());
    if matches!(alpha.partial_cmp(&apex), Some(Ordering::Less | Ordering::Equal)) {
        d * alpha.clone() / den
    } else {
        c / den
    }
}

/// The square of the volume bound, α/(2β). Comparisons against the volume
/// curve are always performed on squares so they stay inside Q or Q(√D).
pub fn volume_sq(alpha: &Scalar, beta: &Scalar) -> Scalar {
    alpha.clone() / (Scalar::from_int(2) * beta.clone())
}

/// Compares a nonnegative value against √(α/2β) by squaring.
pub fn compare_with_volume(value: &Scalar, alpha: &Scalar, beta: &Scalar) -> Ordering {
    debug_assert!(value.signum() >= 0, "volume comparisons take nonnegative values");
    value
        .sq()
        .partial_cmp(&volume_sq(alpha, beta))
        .expect("volume comparison in one field")
}

/// α at which the constant piece of height g meets the volume curve:
/// g² = α/(2β) gives α = 2βg².
pub fn volume_crossing_of_plateau(height: &Scalar, beta: &Scalar) -> Scalar {
    Scalar::from_int(2) * beta.clone() * height.sq()
}

/// α at which the riser sα (through the origin) meets the volume curve:
/// s²α² = α/(2β) gives α = 1/(2βs²).
pub fn volume_crossing_of_riser(slope: &Scalar, beta: &Scalar) -> Scalar {
    (Scalar::from_int(2) * beta.clone() * slope.sq()).recip()
}

/// Where a bound came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Volume,
    Class(QuasiPerfect),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Volume => write!(f, "volume"),
            Provenance::Class(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind {
    /// slope·α + intercept; Γ pieces have intercept 0 (riser) or slope 0
    /// (plateau).
    Affine { slope: Scalar, intercept: Scalar },
    /// √(α/2β).
    VolumeSqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: Scalar,
    pub hi: Scalar,
    pub kind: PieceKind,
    pub provenance: Provenance,
}

impl Piece {
    /// Exact square of the piece's value at α (assumes the affine value is
    /// nonnegative, true for every capacity bound).
    pub fn value_sq_at(&self, alpha: &Scalar, beta: &Scalar) -> Scalar {
        match &self.kind {
            PieceKind::Affine { slope, intercept } => {
                (slope.clone() * alpha.clone() + intercept.clone()).sq()
            }
            PieceKind::VolumeSqrt => volume_sq(alpha, beta),
        }
    }

    /// Exact value when it exists in the working field.
    pub fn value_at(&self, alpha: &Scalar, beta: &Scalar) -> Result<Scalar, ExactError> {
        match &self.kind {
            PieceKind::Affine { slope, intercept } => {
                Ok(slope.clone() * alpha.clone() + intercept.clone())
            }
            PieceKind::VolumeSqrt => volume_sq(alpha, beta).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvelopeError {
    /// Interval must satisfy 1 ≤ lo < hi.
    BadInterval,
}

impl fmt::Display for EnvelopeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvelopeError::BadInterval => write!(f, "interval must satisfy 1 <= lo < hi"),
        }
    }
}

impl core::error::Error for EnvelopeError {}

/// The exact upper envelope of finitely many Γ bounds and the volume curve
/// over an α-interval: a certified lower bound for the capacity function.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseBound {
    beta: Scalar,
    pieces: Vec<Piece>,
}

impl PiecewiseBound {
    /// Builds the envelope of {Γ_{·,β}(C) : C ∈ classes} ∪ {√(α/2β)} on
    /// [lo, hi]. Every breakpoint is an exact crossing; adjacent pieces
    /// agree at shared endpoints by construction and this is asserted.
    pub fn envelope(
        beta: &Scalar,
        classes: &[QuasiPerfect],
        lo: &Scalar,
        hi: &Scalar,
    ) -> Result<Self, EnvelopeError> {
        let one = Scalar::one();
        if !(lo >= &one && lo < hi) {
            return Err(EnvelopeError::BadInterval);
        }
        // Per-class data: riser slope, plateau height, apex.
        struct Gamma {
            slope: Scalar,
            plateau: Scalar,
            apex: Scalar,
        }
        let gammas: Vec<Gamma> = classes
            .iter()
            .map(|class| {
                let a = Scalar::from(Rational::from_integer(class.a().clone().into()));
                let b = Scalar::from(Rational::from_integer(class.b().clone().into()));
                let c = Scalar::from(Rational::from_integer(class.c().clone().into()));
                let d = Scalar::from(Rational::from_integer(class.d().clone().into()));
                let den = a + beta.clone() * b;
                Gamma {
                    slope: d / den.clone(),
                    plateau: c / den,
                    apex: Scalar::from(class.ratio()),
                }
            })
            .collect();

        // Candidate breakpoints: apexes, riser/plateau crossings, volume
        // crossings. Between consecutive candidates the pointwise maximum
        // is attained by a single piece, because any two of the candidate
        // curves cross at most once in α > 0 and all such crossings are
        // candidates.
        let mut cands: Vec<Scalar> = Vec::new();
        let mut push = |x: Scalar| {
            if &x > lo && &x < hi {
                cands.push(x);
            }
        };
        for g in &gammas {
            push(g.apex.clone());
            if !g.slope.is_zero() {
                push(volume_crossing_of_riser(&g.slope, beta));
            }
            push(volume_crossing_of_plateau(&g.plateau, beta));
        }
        for gi in &gammas {
            if gi.slope.is_zero() {
                continue;
            }
            for gj in &gammas {
                push(gj.plateau.clone() / gi.slope.clone());
            }
        }
        cands.sort_by(|a, b| a.partial_cmp(b).expect("candidates in one field"));
        cands.dedup();
        let mut grid = Vec::with_capacity(cands.len() + 2);
        grid.push(lo.clone());
        grid.extend(cands);
        grid.push(hi.clone());

        let half = Scalar::from(crate::exact::rat(1, 2));
        let mut pieces: Vec<Piece> = Vec::new();
        for pair in grid.windows(2) {
            let (x1, x2) = (&pair[0], &pair[1]);
            let mid = (x1.clone() + x2.clone()) * half.clone();
            // Best class at the midpoint; ties keep the first-listed class.
            let mut best: Option<(Scalar, usize)> = None;
            for (i, g) in gammas.iter().enumerate() {
                let val = if mid <= g.apex {
                    g.slope.clone() * mid.clone()
                } else {
                    g.plateau.clone()
                };
                let better = match &best {
                    None => true,
                    Some((cur, _)) => val > *cur,
                };
                if better {
                    best = Some((val, i));
                }
            }
            let volume_wins = match &best {
                None => true,
                Some((val, _)) => compare_with_volume(val, &mid, beta) == Ordering::Less,
            };
            let (kind, provenance) = if volume_wins {
                (PieceKind::VolumeSqrt, Provenance::Volume)
            } else {
                let (_, i) = best.expect("some class beat the volume");
                let g = &gammas[i];
                let kind = if mid < g.apex {
                    PieceKind::Affine { slope: g.slope.clone(), intercept: Scalar::zero() }
                } else {
                    PieceKind::Affine { slope: Scalar::zero(), intercept: g.plateau.clone() }
                };
                (kind, Provenance::Class(classes[i].clone()))
            };
            match pieces.last_mut() {
                Some(last) if last.kind == kind && last.provenance == provenance => {
                    last.hi = x2.clone();
                }
                _ => pieces.push(Piece { lo: x1.clone(), hi: x2.clone(), kind, provenance }),
            }
        }

        let bound = PiecewiseBound { beta: beta.clone(), pieces };
        bound.assert_continuous();
        Ok(bound)
    }

    fn assert_continuous(&self) {
        for pair in self.pieces.windows(2) {
            let x = &pair[0].hi;
            assert_eq!(x, &pair[1].lo, "pieces must abut");
            let left = pair[0].value_sq_at(x, &self.beta);
            let right = pair[1].value_sq_at(x, &self.beta);
            assert_eq!(left, right, "envelope must be continuous at {x}");
        }
    }

    pub fn beta(&self) -> &Scalar {
        &self.beta
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Interior breakpoints (piece junctions).
    pub fn breakpoints(&self) -> Vec<Scalar> {
        self.pieces.windows(2).map(|p| p[0].hi.clone()).collect()
    }

    pub fn piece_at(&self, alpha: &Scalar) -> Option<&Piece> {
        self.pieces.iter().find(|p| alpha >= &p.lo && alpha <= &p.hi)
    }

    /// Square of the envelope value at α, if α is in the domain.
    pub fn value_sq_at(&self, alpha: &Scalar) -> Option<Scalar> {
        self.piece_at(alpha).map(|p| p.value_sq_at(alpha, &self.beta))
    }

    /// Envelope value at α when it lies in the working field.
    pub fn value_at(&self, alpha: &Scalar) -> Option<Result<Scalar, ExactError>> {
        self.piece_at(alpha).map(|p| p.value_at(alpha, &self.beta))
    }

    /// True when the envelope exceeds the volume bound strictly on the
    /// whole interior of its domain (checked exactly piece by piece: a
    /// volume piece anywhere means equality somewhere).
    pub fn strictly_above_volume_inside(&self) -> bool {
        // An affine piece sα+i with i=0 touches √(α/2β) only at isolated
        // candidate points, which by construction are piece endpoints; so
        // it suffices that no interior piece is a volume piece and interior
        // junction values exceed the volume strictly.
        let n = self.pieces.len();
        for (idx, p) in self.pieces.iter().enumerate() {
            if p.kind == PieceKind::VolumeSqrt && !(idx == 0 || idx + 1 == n) {
                return false;
            }
        }
        for pair in self.pieces.windows(2) {
            let x = &pair[0].hi;
            let v = pair[0].value_sq_at(x, &self.beta);
            if v.partial_cmp(&volume_sq(x, &self.beta)) != Some(Ordering::Greater) {
                return false;
            }
        }
        true
    }
}
