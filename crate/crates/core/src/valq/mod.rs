//! The `val_Q` program: evaluation at a given odd function, exact
//! optimization, and the constructive upper-bound certificates.

mod certificates;
mod solver;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::cube::{is_odd, subcube_variances, CubeFunction};
use crate::error::{Error, Result};
use crate::family::{FamilyKind, QueryFamily, Subcube};

pub use certificates::{
    find_rich_subcube, prefix_certificate, shrink_to_k, singleton_certificate, PrefixCertificate,
    RichSubcube, SingletonCertificate,
};
pub use solver::{exact_valq, exact_valq_anchored, MAX_EXACT_VARS};

/// A value of the program, which may be `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ValqValue {
    Finite(f64),
    Unbounded,
}

impl ValqValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            ValqValue::Finite(v) => Some(v),
            ValqValue::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        self == ValqValue::Unbounded
    }
}

impl fmt::Display for ValqValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValqValue::Finite(v) => write!(f, "{v}"),
            ValqValue::Unbounded => write!(f, "unbounded"),
        }
    }
}

impl Serialize for ValqValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ValqValue::Finite(v) => s.serialize_f64(*v),
            ValqValue::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub lower: ValqValue,
    pub upper: ValqValue,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverStats {
    pub method: String,
    pub iterations: usize,
    /// `max(0, max_c Var_c - 1)` at the returned point.
    pub residual: f64,
    /// Barrier duality gap `constraints / t` at termination.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValqReport {
    pub value: ValqValue,
    pub bracket: Bracket,
    pub witness: CubeFunction,
    pub argmax_subcube: Subcube,
    pub solver_stats: Option<SolverStats>,
}

/// Largest subcube standard deviation of `f` over the family, with the first
/// maximizing subcube in enumeration order.
pub fn denominator(f: &CubeFunction, q: &QueryFamily) -> Result<(f64, Subcube)> {
    check_dims(f, q)?;
    let n = f.n();
    let mut best: Option<(f64, u32, u32)> = None;
    for set in q.enumerate_sets() {
        for (fixing, var) in subcube_variances(f.values(), n, set) {
            if best.is_none_or(|(b, _, _)| var > b) {
                best = Some((var, set, fixing));
            }
        }
    }
    let (var, set, fixing) = best.expect("families are nonempty");
    Ok((var.sqrt(), Subcube::new(n, set, fixing)?))
}

/// `‖f‖∞ / denominator(f)`, a lower bound on `val_Q`.
pub fn ratio(f: &CubeFunction, q: &QueryFamily) -> Result<ValqReport> {
    check_dims(f, q)?;
    if !is_odd(f) {
        return Err(Error::NotOdd);
    }
    if f.is_zero() {
        return Err(Error::Degenerate("the zero function has no ratio".into()));
    }
    let (den, argmax) = denominator(f, q)?;
    let value = if den == 0.0 {
        ValqValue::Unbounded
    } else {
        ValqValue::Finite(f.sup_norm() / den)
    };
    let upper = match (value, theorem_upper_bound(q)) {
        (ValqValue::Unbounded, _) => ValqValue::Unbounded,
        (_, u) => u,
    };
    Ok(ValqReport {
        value,
        bracket: Bracket {
            lower: value,
            upper,
        },
        witness: f.clone(),
        argmax_subcube: argmax,
        solver_stats: None,
    })
}

/// Best upper bound on `val_Q` available from the certificate theorems, or
/// `Unbounded` when none applies.
pub fn theorem_upper_bound(q: &QueryFamily) -> ValqValue {
    let n = q.n() as f64;
    match q.kind() {
        FamilyKind::FullSetOnly => ValqValue::Finite(2f64.powf((n - 1.0) / 2.0)),
        FamilyKind::BoundedSize(k) => ValqValue::Finite((2.0 * n / (*k as f64).sqrt()).min(n)),
        FamilyKind::Prefixes => ValqValue::Finite(n),
        _ if q.contains_all_singletons() => ValqValue::Finite(n),
        _ => ValqValue::Unbounded,
    }
}

fn check_dims(f: &CubeFunction, q: &QueryFamily) -> Result<()> {
    if f.n() != q.n() {
        return Err(Error::Parameter(format!(
            "function has n={} but family has n={}",
            f.n(),
            q.n()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{moments, restrict};
    use crate::witness::{build_witness, WitnessKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_denominator(f: &CubeFunction, q: &QueryFamily) -> f64 {
        q.enumerate_subcubes()
            .map(|c| moments(&restrict(f, &c).unwrap()).variance.sqrt())
            .fold(0.0, f64::max)
    }

    #[test]
    fn two_point_full() {
        let f = build_witness(WitnessKind::TwoPoint, 3).unwrap();
        let (d, c) = denominator(&f, &QueryFamily::full_set_only(3).unwrap()).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        assert_eq!(c.free(), 0b111);
        let r = ratio(&build_witness(WitnessKind::TwoPoint, 5).unwrap(),
                      &QueryFamily::full_set_only(5).unwrap()).unwrap();
        assert!((r.value.finite().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hamming_bounded() {
        let f = build_witness(WitnessKind::Hamming, 4).unwrap();
        let q = QueryFamily::bounded(4, 2).unwrap();
        let (d, _) = denominator(&f, &q).unwrap();
        assert!((d - 2f64.sqrt() / 2.0).abs() < 1e-15);
        let r = ratio(&f, &q).unwrap();
        assert!((r.value.finite().unwrap() - 4.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn parity_with_singletons() {
        for n in 1..=6 {
            let f = CubeFunction::character(n, ((1u64 << n) - 1) as u32).unwrap();
            for q in [
                QueryFamily::singletons(n).unwrap(),
                QueryFamily::contiguous(n, false).unwrap(),
            ] {
                assert_eq!(denominator(&f, &q).unwrap().0, 1.0);
            }
        }
    }

    #[test]
    fn ratio_errors() {
        let q = QueryFamily::bounded(2, 1).unwrap();
        assert!(matches!(ratio(&CubeFunction::zeros(2).unwrap(), &q), Err(Error::Degenerate(_))));
        let f = CubeFunction::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(ratio(&f, &q), Err(Error::NotOdd)));
    }

    #[test]
    fn unbounded_ratio() {
        // f = x_2 is constant on every {1}-subcube.
        let f = CubeFunction::character(2, 0b10).unwrap();
        let q = QueryFamily::custom(2, vec![0b01]).unwrap();
        assert_eq!(ratio(&f, &q).unwrap().value, ValqValue::Unbounded);
    }

    #[test]
    fn denominator_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            for q in [
                QueryFamily::bounded(n, n.div_ceil(2)).unwrap(),
                QueryFamily::prefixes(n).unwrap(),
                QueryFamily::contiguous(n, true).unwrap(),
            ] {
                let f = CubeFunction::from_fn(n, |_| rng.gen_range(-1.0..1.0)).unwrap();
                let (d, c) = denominator(&f, &q).unwrap();
                assert!((d - brute_denominator(&f, &q)).abs() < 1e-12);
                let at = moments(&restrict(&f, &c).unwrap()).variance.sqrt();
                assert!((d - at).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn report_json_shape() {
        let f = CubeFunction::character(2, 0b10).unwrap();
        let q = QueryFamily::custom(2, vec![0b01]).unwrap();
        let json = serde_json::to_value(ratio(&f, &q).unwrap()).unwrap();
        assert_eq!(json["value"], "unbounded");
        assert_eq!(json["argmax_subcube"]["free"], serde_json::json!([1]));
        assert!(json["solver_stats"].is_null());
    }
}
