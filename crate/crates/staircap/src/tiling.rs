//! Square-packing certificates for cone membership, and the five scripted
//! constructions that certify the staircase boundary embeddings.
//!
//! A square of side r containing pairwise disjoint aᵢ-by-bᵢ rectangles
//! certifies that ⟨r; W(a₁,b₁), …, W(a_m,b_m)⟩ lies in the closed symplectic
//! cone: each rectangle splits greedily into squares of its weight sizes,
//! and a square of side s carries a ball of capacity s. The checker works
//! in exact rational arithmetic. The scripted constructions take the class
//! (γβ, γ; W(1,α)) at the parameter points where the staircase supremum
//! changes piece, push it by Cremona moves to a class whose blocks visibly
//! pack, and return the packing together with a replayable move trace.

use alloc::string::String;
use alloc::vec::Vec;

use core::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::cohomology::{Basis, CohomClass, Tail};
use crate::cremona::{equivalence_trace, MoveTrace};
use crate::exact::{rat, rat_int, Rational};
use crate::families::{fm_beta_threshold, fm_meet, fm_plateau, fm_skip_meet};
use crate::pell::{half_companion_rat, pell_rat};
use crate::weights::WeightSeq;

/// One axis-aligned rectangle of a packing. `label` names the weight block
/// it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect {
    pub width: Rational,
    pub height: Rational,
    pub x: Rational,
    pub y: Rational,
    pub label: String,
}

/// Rectangles inside the square [0, side]². Rectangle order fixes the
/// correspondence with the claimed class's weight blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Packing {
    pub square_side: Rational,
    pub rects: Vec<Rect>,
}

/// The five scripted constructions, one per boundary regime of the
/// staircase supremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionCase {
    /// α = s_{2k+1}(β) at the plateau value γ_{2k,β}, for 1 ≤ β ≤ b_{2k+1}.
    MeetOdd,
    /// α = s_{2k}(β) at γ_{2k−1,β}, for 1 ≤ β ≤ b_{2k+1}.
    MeetEven,
    /// α = s'_{2k}(β) at γ_{2k−1,β}, for b_{2k+1} ≤ β ≤ b_{2k}.
    SkipMeet,
    /// α = P_{2k+2}/P_{2k} at γ_{2k−1,β}, for
    /// P_{2k}(β−1) ≤ β+1 ≤ H_{2k+1}(β−1); needs k ≥ 1.
    PellRatio,
    /// The α > σ² where the last plateau rejoins the volume curve, at
    /// γ_{2k−1,β}, for H_{2k+1}(β−1) ≤ β+1 ≤ P_{2k+2}(β−1).
    PlateauEnd,
}

impl ConstructionCase {
    pub const ALL: [ConstructionCase; 5] = [
        ConstructionCase::MeetOdd,
        ConstructionCase::MeetEven,
        ConstructionCase::SkipMeet,
        ConstructionCase::PellRatio,
        ConstructionCase::PlateauEnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstructionCase::MeetOdd => "meet-odd",
            ConstructionCase::MeetEven => "meet-even",
            ConstructionCase::SkipMeet => "skip-meet",
            ConstructionCase::PellRatio => "pell-ratio",
            ConstructionCase::PlateauEnd => "plateau-end",
        }
    }
}

impl fmt::Display for ConstructionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for ConstructionCase {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConstructionCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or("expected one of meet-odd, meet-even, skip-meet, pell-ratio, plateau-end")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TilingError {
    /// β (or k) is outside the construction's hypothesis window.
    Hypothesis {
        case: ConstructionCase,
        k: u32,
        beta: Rational,
        requirement: &'static str,
    },
    /// Packing claims are stated in CP² coordinates.
    Basis,
    /// The square side differs from the claimed degree.
    Side { claimed: Rational, side: Rational },
    /// Rectangle `rect` has a nonpositive width or height.
    Degenerate { rect: usize },
    /// Rectangle `rect` leaves the square.
    Escape { rect: usize },
    /// Rectangles `first` and `second` have overlapping interiors.
    Overlap { first: usize, second: usize },
    /// The weights of rectangle `rect` diverge from the claimed tail.
    Mismatch { rect: usize },
    /// Claimed tail entries remain after all rectangles are matched.
    TailRemainder,
}

impl fmt::Display for TilingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilingError::Hypothesis { case, k, beta, requirement } => {
                write!(f, "{case} at k = {k}, beta = {beta} violates {requirement}")
            }
            TilingError::Basis => write!(f, "packing claims use CP2 coordinates"),
            TilingError::Side { claimed, side } => {
                write!(f, "claimed degree {claimed} but square side {side}")
            }
            TilingError::Degenerate { rect } => {
                write!(f, "rectangle {rect} has a nonpositive dimension")
            }
            TilingError::Escape { rect } => write!(f, "rectangle {rect} leaves the square"),
            TilingError::Overlap { first, second } => {
                write!(f, "rectangles {first} and {second} overlap")
            }
            TilingError::Mismatch { rect } => {
                write!(f, "rectangle {rect} does not match its weight block")
            }
            TilingError::TailRemainder => {
                write!(f, "the claim has weight entries not covered by any rectangle")
            }
        }
    }
}

impl core::error::Error for TilingError {}

/// Checks a packing against a claimed class ⟨r; W(a₁,b₁), …⟩: the side must
/// equal r, every rectangle must stay inside the square with pairwise
/// disjoint interiors, and the concatenated weight sequences of the
/// rectangles (in order) must reproduce the claimed tail exactly.
pub fn verify_packing(p: &Packing, claim: &CohomClass) -> Result<(), TilingError> {
    if claim.basis() != Basis::Cp2 {
        return Err(TilingError::Basis);
    }
    if &p.square_side != claim.head0() {
        return Err(TilingError::Side {
            claimed: claim.head0().clone(),
            side: p.square_side.clone(),
        });
    }
    let side = &p.square_side;
    for (i, r) in p.rects.iter().enumerate() {
        if !r.width.is_positive() || !r.height.is_positive() {
            return Err(TilingError::Degenerate { rect: i });
        }
        if r.x.is_negative()
            || r.y.is_negative()
            || &r.x + &r.width > *side
            || &r.y + &r.height > *side
        {
            return Err(TilingError::Escape { rect: i });
        }
    }
    for i in 0..p.rects.len() {
        for j in i + 1..p.rects.len() {
            let (a, b) = (&p.rects[i], &p.rects[j]);
            let open_x = a.x < &b.x + &b.width && b.x < &a.x + &a.width;
            let open_y = a.y < &b.y + &b.height && b.y < &a.y + &a.height;
            if open_x && open_y {
                return Err(TilingError::Overlap { first: i, second: j });
            }
        }
    }
    // Stream the claimed tail against the rectangles' weight blocks,
    // consuming run overlaps so that runs merged across block boundaries
    // still match.
    let runs = claim.tail().runs();
    let mut pos = 0usize;
    let mut rem: u64 = runs
        .first()
        .map(|(_, m)| m.to_u64().expect("tail multiplicities fit in u64"))
        .unwrap_or(0);
    for (i, r) in p.rects.iter().enumerate() {
        let block = WeightSeq::new(&r.width, &r.height).expect("positive dimensions");
        for (value, mult) in block.runs() {
            let mut need = mult.to_u64().expect("weight multiplicities fit in u64");
            while need > 0 {
                if pos >= runs.len() || &runs[pos].0 != value {
                    return Err(TilingError::Mismatch { rect: i });
                }
                let take = need.min(rem);
                need -= take;
                rem -= take;
                if rem == 0 {
                    pos += 1;
                    if pos < runs.len() {
                        rem = runs[pos].1.to_u64().expect("tail multiplicities fit in u64");
                    }
                }
            }
        }
    }
    if pos < runs.len() {
        return Err(TilingError::TailRemainder);
    }
    Ok(())
}

/// The seven quantities of the order-k staged reduction
/// Σ^k = ⟨Z; A, B, W(C,D), W(E,F)⟩ of (γβ, γ; W(1,α)).
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaParts {
    pub z: Rational,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub e: Rational,
    pub f: Rational,
}

/// Evaluates Z, A, B, C, D, E, F at order k:
///
///   Z = P_{2k+1}(γ(β+1) − 1) − P_{2k}α,
///   A, B = (H_{2k}/2)γ(β+1) − P_{2k+1} ± γ(β−1)/2,
///   C = (P_{2k+2} − P_{2k}α)/2,   D = P_{2k−1}α − P_{2k+1},
///   E = (P_{2k}/2)Q,   F = P_{2k+1}Q,   Q = 2γ(β+1) − α − 1.
pub fn sigma_parts(k: u32, alpha: &Rational, beta: &Rational, gamma: &Rational) -> SigmaParts {
    let ki = i64::from(k);
    let half = rat(1, 2);
    let gb1 = gamma * (beta + rat_int(1));
    let ghalf = gamma * (beta - rat_int(1)) * &half;
    let q = rat_int(2) * &gb1 - alpha - rat_int(1);
    let mid = half_companion_rat(2 * ki) * &half * &gb1 - pell_rat(2 * ki + 1);
    SigmaParts {
        z: pell_rat(2 * ki + 1) * (&gb1 - rat_int(1)) - pell_rat(2 * ki) * alpha,
        a: &mid + &ghalf,
        b: &mid - &ghalf,
        c: (pell_rat(2 * ki + 2) - pell_rat(2 * ki) * alpha) * &half,
        d: pell_rat(2 * ki - 1) * alpha - pell_rat(2 * ki + 1),
        e: pell_rat(2 * ki) * &half * &q,
        f: pell_rat(2 * ki + 1) * &q,
    }
}

/// A finished construction: the packing, the packed class it certifies,
/// and the move chain from (γβ, γ; W(1,α)) to that class. Replaying the
/// trace and re-running [`verify_packing`] re-checks everything.
#[derive(Debug, Clone)]
pub struct TilingCertificate {
    pub packing: Packing,
    /// The packed class, in CP² coordinates; equals the trace endpoint.
    pub class: CohomClass,
    pub trace: MoveTrace,
    pub alpha: Rational,
    pub gamma: Rational,
}

/// Collects rectangles and the matching weight blocks in one pass,
/// skipping zero-size pieces (their weight blocks are empty).
struct LayoutBuilder {
    rects: Vec<Rect>,
    tail: Tail,
}

impl LayoutBuilder {
    fn new() -> Self {
        LayoutBuilder { rects: Vec::new(), tail: Tail::empty() }
    }

    fn place(&mut self, w: &Rational, h: &Rational, x: &Rational, y: &Rational, label: &str) {
        assert!(
            !w.is_negative() && !h.is_negative(),
            "piece {label} has a negative dimension"
        );
        if w.is_zero() || h.is_zero() {
            return;
        }
        let block = WeightSeq::new(w, h).expect("positive dimensions");
        for (v, m) in block.runs() {
            self.tail.push_run(v.clone(), m.clone());
        }
        self.rects.push(Rect {
            width: w.clone(),
            height: h.clone(),
            x: x.clone(),
            y: y.clone(),
            label: String::from(label),
        });
    }

    fn finish(
        self,
        side: Rational,
        alpha: Rational,
        gamma: Rational,
        beta: &Rational,
    ) -> Result<TilingCertificate, TilingError> {
        let class = CohomClass::cp2(side.clone(), self.tail);
        let packing = Packing { square_side: side, rects: self.rects };
        verify_packing(&packing, &class)?;
        let weights = WeightSeq::normalized(&alpha).expect("alpha >= 1");
        let start =
            CohomClass::s2s2(&gamma * beta, gamma.clone(), Tail::from_weights(&weights));
        let trace = equivalence_trace(&start, &class)
            .expect("the packed class is equivalent to its start");
        Ok(TilingCertificate { packing, class, trace, alpha, gamma })
    }
}

fn require(
    ok: bool,
    case: ConstructionCase,
    k: u32,
    beta: &Rational,
    requirement: &'static str,
) -> Result<(), TilingError> {
    if ok {
        Ok(())
    } else {
        Err(TilingError::Hypothesis { case, k, beta: beta.clone(), requirement })
    }
}

/// Builds the order-k construction for `case` at rational β: an exact
/// packing, the packed class, and the Cremona chain from (γβ, γ; W(1,α))
/// to it, where α and γ are the case's meet point and plateau value. The
/// chain certifies that E(1,α) embeds into γ·P(1,β) up to closure, i.e.
/// that the capacity at α is at most γ. Violating the hypothesis window
/// reports which inequality failed; the interior identities between the
/// Σ quantities are asserted.
pub fn proposition_tiling(
    case: ConstructionCase,
    k: u32,
    beta: &Rational,
) -> Result<TilingCertificate, TilingError> {
    let one = rat_int(1);
    require(beta >= &one, case, k, beta, "beta >= 1")?;
    let ki = i64::from(k);
    let zero = Rational::zero();
    match case {
        ConstructionCase::MeetOdd => {
            let top = fm_beta_threshold(2 * ki + 1)
                .expect("index in range")
                .expect("finite for nonnegative indices");
            require(beta <= &top, case, k, beta, "beta <= b(2k+1)")?;
            let gamma = fm_plateau(2 * ki, beta).expect("index and beta checked");
            let alpha = fm_meet(2 * ki + 1, beta).expect("index and beta checked");
            let p = sigma_parts(k, &alpha, beta, &gamma);
            assert_eq!(p.z, rat_int(2) * &p.c);
            assert_eq!(&p.d + &p.f, rat_int(4) * &p.c);
            assert_eq!(&p.a + &p.b + &p.e, p.c);
            assert_eq!(p.a, p.f);
            assert_eq!(p.f, pell_rat(2 * ki + 3) - pell_rat(2 * ki + 1) * &alpha);
            assert!(!p.b.is_negative());
            assert!(p.a <= p.c && p.c.is_positive() && !p.e.is_negative());
            let spare = &p.d - rat_int(3) * &p.c;
            assert!(!spare.is_negative());
            // Three quadrant squares; the fourth quadrant holds the
            // C-by-(D−3C) rectangle and, beside it, the stacked A-square,
            // B-square and E-by-F rectangle (F = A, A + B + E = C).
            let side = rat_int(2) * &p.c;
            let col = &side - &p.a;
            let mut lay = LayoutBuilder::new();
            lay.place(&p.a, &p.a, &col, &p.c, "A");
            lay.place(&p.b, &p.b, &col, &(&p.c + &p.a), "B");
            lay.place(&p.c, &p.c, &zero, &zero, "C#1");
            lay.place(&p.c, &p.c, &p.c, &zero, "C#2");
            lay.place(&p.c, &p.c, &zero, &p.c, "C#3");
            lay.place(&spare, &p.c, &p.c, &p.c, "W(C,D-3C)");
            lay.place(&p.f, &p.e, &col, &(&p.c + &p.a + &p.b), "W(E,F)");
            lay.finish(side, alpha, gamma, beta)
        }
        ConstructionCase::MeetEven => {
            let top = fm_beta_threshold(2 * ki + 1)
                .expect("index in range")
                .expect("finite for nonnegative indices");
            require(beta <= &top, case, k, beta, "beta <= b(2k+1)")?;
            let gamma = fm_plateau(2 * ki - 1, beta).expect("index and beta checked");
            let alpha = fm_meet(2 * ki, beta).expect("index and beta checked");
            let p = sigma_parts(k, &alpha, beta, &gamma);
            assert!(p.b.is_zero());
            assert_eq!(p.f, p.d);
            assert_eq!(p.z, p.f);
            assert_eq!(p.z, &p.a + &p.c + &p.e);
            assert!(!p.a.is_negative() && p.c.is_positive() && !p.e.is_negative());
            // A column of width C, a column of width E, and the A-square
            // fill the F-square side by side (A + C + E = F).
            let side = p.f.clone();
            let mut lay = LayoutBuilder::new();
            lay.place(&p.a, &p.a, &(&p.c + &p.e), &zero, "A");
            lay.place(&p.c, &p.f, &zero, &zero, "W(C,F)");
            lay.place(&p.e, &p.f, &p.c, &zero, "W(E,F)");
            lay.finish(side, alpha, gamma, beta)
        }
        ConstructionCase::SkipMeet => {
            let low = fm_beta_threshold(2 * ki + 1)
                .expect("index in range")
                .expect("finite for nonnegative indices");
            let top = fm_beta_threshold(2 * ki)
                .expect("index in range")
                .expect("finite for nonnegative indices");
            require(beta >= &low, case, k, beta, "beta >= b(2k+1)")?;
            require(beta <= &top, case, k, beta, "beta <= b(2k)")?;
            let gamma = fm_plateau(2 * ki - 1, beta).expect("index and beta checked");
            let alpha = fm_skip_meet(ki, beta).expect("index and beta checked");
            let p = sigma_parts(k, &alpha, beta, &gamma);
            let side = &p.z - &p.c + &p.e;
            let corner = &p.a - &p.c + &p.e;
            assert!(p.b.is_zero());
            assert_eq!(p.f, p.a);
            assert_eq!(&p.d - rat_int(2) * &p.c, side);
            assert_eq!(p.z, &p.a + &p.c + &p.e);
            assert!(!corner.is_negative(), "the corner square needs beta >= b(2k+1)");
            assert!(p.c.is_positive() && !p.e.is_negative());
            // One more triple move past Σ^k turns ⟨Z; A, C², W(C,D−2C),
            // W(E,A)⟩ into ⟨S; A−C+E, E², W(C,S), W(E,A)⟩ with S = Z−C+E;
            // the C-column, the E-column (E-by-A rectangle under two
            // E-squares) and the corner square tile the S-square.
            let mut lay = LayoutBuilder::new();
            lay.place(&corner, &corner, &(&p.c + &p.e), &zero, "A-C+E");
            lay.place(&p.e, &p.e, &p.c, &p.a, "E#1");
            lay.place(&p.e, &p.e, &p.c, &(&p.a + &p.e), "E#2");
            lay.place(&p.c, &side, &zero, &zero, "W(C,Z-C+E)");
            lay.place(&p.e, &p.a, &p.c, &zero, "W(E,A)");
            lay.finish(side, alpha, gamma, beta)
        }
        ConstructionCase::PellRatio => {
            require(k >= 1, case, k, beta, "k >= 1 (beta+1 <= H(1)(beta-1) has no solutions)")?;
            let bm1 = beta - &one;
            let bp1 = beta + &one;
            require(
                pell_rat(2 * ki) * &bm1 <= bp1,
                case,
                k,
                beta,
                "P(2k)(beta-1) <= beta+1",
            )?;
            require(
                bp1.clone() <= half_companion_rat(2 * ki + 1) * &bm1,
                case,
                k,
                beta,
                "beta+1 <= H(2k+1)(beta-1)",
            )?;
            let gamma = fm_plateau(2 * ki - 1, beta).expect("index and beta checked");
            let alpha = pell_rat(2 * ki + 2) / pell_rat(2 * ki);
            let p = sigma_parts(k, &alpha, beta, &gamma);
            assert!(p.b.is_zero() && p.c.is_zero());
            assert_eq!(p.z, &p.a + &p.e);
            assert_eq!(pell_rat(2 * ki) * &p.f, rat_int(2) * pell_rat(2 * ki + 1) * &p.e);
            let spare = &p.f - rat_int(4) * &p.e;
            assert!(!spare.is_negative() && spare <= p.e);
            assert!(!p.e.is_negative());
            assert!(&p.a - rat_int(2) * &p.e >= zero, "A >= 2E inside the window");
            // The A-square in a corner, two E-squares beside it, two above
            // it with the E-by-(F−4E) remainder (2E + (F−4E) <= A + E).
            let side = &p.a + &p.e;
            let mut lay = LayoutBuilder::new();
            lay.place(&p.a, &p.a, &zero, &zero, "A");
            lay.place(&p.e, &p.e, &p.a, &zero, "E#1");
            lay.place(&p.e, &p.e, &p.a, &p.e, "E#2");
            lay.place(&p.e, &p.e, &zero, &p.a, "E#3");
            lay.place(&p.e, &p.e, &p.e, &p.a, "E#4");
            lay.place(&spare, &p.e, &(rat_int(2) * &p.e), &p.a, "W(E,F-4E)");
            lay.finish(side, alpha, gamma, beta)
        }
        ConstructionCase::PlateauEnd => {
            let bm1 = beta - &one;
            let bp1 = beta + &one;
            require(
                half_companion_rat(2 * ki + 1) * &bm1 <= bp1,
                case,
                k,
                beta,
                "H(2k+1)(beta-1) <= beta+1",
            )?;
            require(
                bp1.clone() <= pell_rat(2 * ki + 2) * &bm1,
                case,
                k,
                beta,
                "beta+1 <= P(2k+2)(beta-1)",
            )?;
            let gamma = fm_plateau(2 * ki - 1, beta).expect("index and beta checked");
            let alpha = rat_int(2) * pell_rat(2 * ki + 1) / half_companion_rat(2 * ki + 1)
                * (pell_rat(2 * ki + 2) * &bp1 - &bm1)
                / (half_companion_rat(2 * ki) * &bp1 - &bm1);
            // α sits strictly between σ² = 3+2√2 (root of x²−6x+1) and
            // P_{2k+2}/P_{2k}.
            assert!(alpha > rat_int(3));
            assert!((&alpha * &alpha - rat_int(6) * &alpha + rat_int(1)).is_positive());
            assert!(pell_rat(2 * ki) * &alpha < pell_rat(2 * ki + 2) || k == 0);
            let p = sigma_parts(k, &alpha, beta, &gamma);
            let side = &p.f + rat_int(4) * &p.e;
            let corner = &p.f - &p.c + rat_int(3) * &p.e;
            assert!(p.b.is_zero());
            assert_eq!(p.z, &p.a + &p.c + &p.e);
            assert_eq!(&p.d - rat_int(4) * &p.c, side);
            assert_eq!(&p.a - &p.c + rat_int(3) * &p.e, side);
            assert_eq!(corner, &p.a - rat_int(2) * &p.c + rat_int(2) * &p.e);
            assert!(!corner.is_negative(), "the corner square needs beta+1 <= P(2k+2)(beta-1)");
            assert!(p.c.is_positive() && !p.e.is_negative() && !p.f.is_negative());
            // Two triple moves past Σ^k turn ⟨Z; A, C⁴, W(C,D−4C), W(E,F)⟩
            // into ⟨S; F−C+3E, E⁴, W(C,S), W(E,F)⟩ with S = F+4E; the
            // C-column, the E-column (E-by-F under four E-squares) and the
            // corner square tile the S-square.
            let mut lay = LayoutBuilder::new();
            lay.place(&corner, &corner, &(&p.c + &p.e), &zero, "F-C+3E");
            lay.place(&p.e, &p.e, &p.c, &p.f, "E#1");
            lay.place(&p.e, &p.e, &p.c, &(&p.f + &p.e), "E#2");
            lay.place(&p.e, &p.e, &p.c, &(&p.f + rat_int(2) * &p.e), "E#3");
            lay.place(&p.e, &p.e, &p.c, &(&p.f + rat_int(3) * &p.e), "E#4");
            lay.place(&p.c, &side, &zero, &zero, "W(C,F+4E)");
            lay.place(&p.e, &p.f, &p.c, &zero, "W(E,F)");
            lay.finish(side, alpha, gamma, beta)
        }
    }
}

/// The β window on which `case` at order k is defined: closed endpoints,
/// `None` for an unbounded right end.
pub fn hypothesis_window(case: ConstructionCase, k: u32) -> (Rational, Option<Rational>) {
    let ki = i64::from(k);
    let one = rat_int(1);
    let two = rat_int(2);
    let odd_top = || {
        fm_beta_threshold(2 * ki + 1)
            .expect("index in range")
            .expect("finite for nonnegative indices")
    };
    match case {
        ConstructionCase::MeetOdd | ConstructionCase::MeetEven => (one, Some(odd_top())),
        ConstructionCase::SkipMeet => {
            let top = fm_beta_threshold(2 * ki)
                .expect("index in range")
                .expect("finite for nonnegative indices");
            (odd_top(), Some(top))
        }
        ConstructionCase::PellRatio => {
            assert!(k >= 1, "the order-0 window is empty");
            let low = &one + &two / (half_companion_rat(2 * ki + 1) - &one);
            let top = &one + &two / (pell_rat(2 * ki) - &one);
            (low, Some(top))
        }
        ConstructionCase::PlateauEnd => {
            let low = &one + &two / (pell_rat(2 * ki + 2) - &one);
            let top = if k == 0 {
                None
            } else {
                Some(&one + &two / (half_companion_rat(2 * ki + 1) - &one))
            };
            (low, top)
        }
    }
}
