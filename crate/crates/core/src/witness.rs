//! Explicit lower-bound witnesses.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::cube::CubeFunction;
use crate::error::{Error, Result};
use crate::family::{FamilyKind, QueryFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// `f(x) = |x| - n/2`.
    Hamming,
    /// Sum over `m` consecutive blocks of width `k` of the block indicator
    /// difference `[block = 1^k] - [block = (-1)^k]`.
    Block { m: usize, k: usize },
    /// Odd reflection of the decision list `((x_{n-1},1),…,(x_1,n-1),n)`
    /// through the last coordinate.
    PrefixDecisionList,
    /// `+1` at the all-ones input, `-1` at its negation.
    TwoPoint,
    /// Generator of the Dictator adversary matrix. Not odd.
    DictatorIndex,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessKind::Hamming => write!(f, "hamming"),
            WitnessKind::Block { m, k } => write!(f, "block(m={m},k={k})"),
            WitnessKind::PrefixDecisionList => write!(f, "prefix"),
            WitnessKind::TwoPoint => write!(f, "two-point"),
            WitnessKind::DictatorIndex => write!(f, "dictator"),
        }
    }
}

/// Parses the witness names used on the command line. `block` needs its
/// parameters supplied separately, so it parses with `m = k = 0`.
impl FromStr for WitnessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(WitnessKind::Hamming),
            "block" => Ok(WitnessKind::Block { m: 0, k: 0 }),
            "prefix" => Ok(WitnessKind::PrefixDecisionList),
            "two-point" => Ok(WitnessKind::TwoPoint),
            "dictator" => Ok(WitnessKind::DictatorIndex),
            _ => Err(Error::Parameter(format!("unknown witness `{s}`"))),
        }
    }
}

pub fn build_witness(kind: WitnessKind, n: usize) -> Result<CubeFunction> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    match kind {
        WitnessKind::Hamming => hamming(n),
        WitnessKind::Block { m, k } => block(n, m, k),
        WitnessKind::PrefixDecisionList => prefix_decision_list(n),
        WitnessKind::TwoPoint => two_point(n),
        WitnessKind::DictatorIndex => dictator_index(n),
    }
}

fn hamming(n: usize) -> Result<CubeFunction> {
    CubeFunction::from_fn(n, |x| x.count_ones() as f64 - n as f64 / 2.0)
}

fn block(n: usize, m: usize, k: usize) -> Result<CubeFunction> {
    if m == 0 || k == 0 || m * k != n {
        return Err(Error::Parameter(format!(
            "block witness needs m, k >= 1 and m*k = n (m={m}, k={k}, n={n})"
        )));
    }
    let width = (1usize << k) - 1;
    CubeFunction::from_fn(n, |x| {
        (0..m)
            .map(|i| match x >> (i * k) & width {
                0 => 1.0,
                z if z == width => -1.0,
                _ => 0.0,
            })
            .sum()
    })
}

/// Decision list on the first `n-1` coordinates: the first `i` with
/// `x_{n-i} = -1` gives `i`, otherwise `n`.
fn decision_list(x: usize, n: usize) -> f64 {
    (1..n)
        .find(|&i| x >> (n - i - 1) & 1 == 1)
        .unwrap_or(n) as f64
}

fn prefix_decision_list(n: usize) -> Result<CubeFunction> {
    let y_bit = 1usize << (n - 1);
    let low = y_bit - 1;
    CubeFunction::from_fn(n, |x| {
        if x & y_bit == 0 {
            decision_list(x & low, n)
        } else {
            -decision_list(!x & low, n)
        }
    })
}

fn two_point(n: usize) -> Result<CubeFunction> {
    let full = (1usize << n) - 1;
    CubeFunction::from_fn(n, |x| match x {
        0 => 1.0,
        x if x == full => -1.0,
        _ => 0.0,
    })
}

fn dictator_index(n: usize) -> Result<CubeFunction> {
    if n < 4 {
        return Err(Error::Parameter(format!(
            "dictator witness needs n >= 4 (got {n})"
        )));
    }
    CubeFunction::from_fn(n, |x| {
        if x >> (n - 1) & 1 == 0 {
            return 0.0;
        }
        // Index(x) = position of the first -1; x_n = -1 guarantees one exists.
        let index = x.trailing_zeros() as usize + 1;
        if index >= n - 1 {
            0.5
        } else if index == 1 {
            1.0 / (1u64 << (n - 2)) as f64
        } else {
            let d = n - index;
            1.0 / ((1u64 << (d - 1)) as f64 * SQRT_2)
        }
    })
}

/// Closed-form lower bound on `val_Q` for the witness/family pairings with a
/// known formula.
pub fn witness_ratio_closed_form(kind: WitnessKind, n: usize, q: &QueryFamily) -> Result<f64> {
    if q.n() != n {
        return Err(Error::Parameter(format!(
            "family has n={} but witness has n={n}",
            q.n()
        )));
    }
    let nf = n as f64;
    match (kind, q.kind()) {
        (WitnessKind::Hamming, FamilyKind::BoundedSize(k)) => Ok(nf / (*k as f64).sqrt()),
        (WitnessKind::Hamming, FamilyKind::Singletons) => Ok(nf),
        (WitnessKind::TwoPoint, FamilyKind::FullSetOnly) => Ok(2f64.powf((nf - 1.0) / 2.0)),
        (WitnessKind::PrefixDecisionList, FamilyKind::Prefixes) => Ok(nf / 8f64.sqrt()),
        _ => Err(Error::Parameter(format!(
            "no closed form for witness {kind} with family {q}"
        ))),
    }
}
