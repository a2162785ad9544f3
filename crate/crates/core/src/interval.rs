//! Chain certificates for covering a closed rational interval by subintervals
//! shorter than a given length.
//!
//! A chain of intervals in which consecutive pieces overlap has, as union, the
//! interval spanned by its extreme endpoints; it is obtained from the pieces
//! by repeated unions of intersecting pairs. A valid witness therefore shows
//! that the target is generated by its subintervals of length `< ε`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A closed bounded interval with rational endpoints, or the empty interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RationalInterval {
    Empty,
    Closed { lo: Rational, hi: Rational },
}

impl RationalInterval {
    pub fn closed(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(RationalInterval::Closed { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        RationalInterval::Closed { lo: x.clone(), hi: x }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, RationalInterval::Empty)
    }

    pub fn bounds(&self) -> Option<(&Rational, &Rational)> {
        match self {
            RationalInterval::Empty => None,
            RationalInterval::Closed { lo, hi } => Some((lo, hi)),
        }
    }

    pub fn length(&self) -> Rational {
        match self {
            RationalInterval::Empty => Rational::zero(),
            RationalInterval::Closed { lo, hi } => hi - lo,
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        match (self.bounds(), other.bounds()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((lo, hi)), Some((olo, ohi))) => olo <= lo && hi <= ohi,
        }
    }

    pub fn intersects(&self, other: &Self) -> bool {
        match (self.bounds(), other.bounds()) {
            (Some((lo, hi)), Some((olo, ohi))) => lo <= ohi && olo <= hi,
            _ => false,
        }
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalInterval::Empty => f.write_str("∅"),
            RationalInterval::Closed { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainWitness {
    pub target: RationalInterval,
    pub epsilon: Rational,
    pub pieces: Vec<RationalInterval>,
}

/// Why a witness fails to certify its target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessDefect {
    EmptyTarget,
    NonPositiveEpsilon,
    NoPieces,
    EmptyPiece {
        index: usize,
    },
    TooLong {
        index: usize,
    },
    OutsideTarget {
        index: usize,
    },
    Gap {
        index: usize,
    },
    /// The chain spans less than the target.
    ShortUnion,
}

impl fmt::Display for WitnessDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessDefect::EmptyTarget => f.write_str("target is empty"),
            WitnessDefect::NonPositiveEpsilon => f.write_str("epsilon is not positive"),
            WitnessDefect::NoPieces => f.write_str("witness has no pieces"),
            WitnessDefect::EmptyPiece { index } => write!(f, "piece {index} is empty"),
            WitnessDefect::TooLong { index } => write!(f, "piece {index} is not shorter than epsilon"),
            WitnessDefect::OutsideTarget { index } => write!(f, "piece {index} leaves the target"),
            WitnessDefect::Gap { index } => write!(f, "pieces {} and {index} do not overlap", index - 1),
            WitnessDefect::ShortUnion => f.write_str("union of the pieces is not the target"),
        }
    }
}

/// Pieces of length `ℓ = min(ε/2, |target|)` starting at `lo` with stride
/// `ℓ/2`, while they end before `hi`, then one piece flush with `hi`.
pub fn build_witness(target: &RationalInterval, epsilon: &Rational) -> Result<ChainWitness> {
    let Some((lo, hi)) = target.bounds() else {
        return Err(Error::Domain(
            "the empty interval is covered by the empty sieve and needs no chain".into(),
        ));
    };
    if !epsilon.is_positive() {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let two = Rational::from_integer(2.into());
    let piece = (epsilon / &two).min(hi - lo);
    let stride = &piece / &two;

    let mut pieces = Vec::new();
    if piece.is_positive() {
        let mut start = lo.clone();
        while &start + &piece < *hi {
            let end = &start + &piece;
            pieces.push(RationalInterval::Closed {
                lo: start.clone(),
                hi: end,
            });
            start += &stride;
        }
    }
    pieces.push(RationalInterval::Closed {
        lo: hi - &piece,
        hi: hi.clone(),
    });
    Ok(ChainWitness {
        target: target.clone(),
        epsilon: epsilon.clone(),
        pieces,
    })
}

/// First defect found, in the order listed by [`WitnessDefect`].
pub fn witness_defect(w: &ChainWitness) -> Option<WitnessDefect> {
    let Some((lo, hi)) = w.target.bounds() else {
        return Some(WitnessDefect::EmptyTarget);
    };
    if !w.epsilon.is_positive() {
        return Some(WitnessDefect::NonPositiveEpsilon);
    }
    if w.pieces.is_empty() {
        return Some(WitnessDefect::NoPieces);
    }
    for (index, piece) in w.pieces.iter().enumerate() {
        if piece.is_empty() {
            return Some(WitnessDefect::EmptyPiece { index });
        }
        if piece.length() >= w.epsilon {
            return Some(WitnessDefect::TooLong { index });
        }
        if !piece.is_subset_of(&w.target) {
            return Some(WitnessDefect::OutsideTarget { index });
        }
        if index > 0 && !w.pieces[index - 1].intersects(piece) {
            return Some(WitnessDefect::Gap { index });
        }
    }
    // Consecutive overlaps make the union the interval between the extreme endpoints.
    let bounds = w.pieces.iter().filter_map(RationalInterval::bounds);
    let min_lo = bounds.clone().map(|(l, _)| l).min().expect("nonempty");
    let max_hi = bounds.map(|(_, h)| h).max().expect("nonempty");
    if min_lo != lo || max_hi != hi {
        return Some(WitnessDefect::ShortUnion);
    }
    None
}

pub fn verify_witness(w: &ChainWitness) -> bool {
    witness_defect(w).is_none()
}
