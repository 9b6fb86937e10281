//! Adversary matrix for the Dictator function `x ↦ x_n` under prefix queries.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::adversary::{query_norm_dense, spectral_norm, xor_matrix, AdversaryMatrix};
use crate::error::{Error, Result};
use crate::family::full_mask;
use crate::witness::{build_witness, WitnessKind};

pub const MIN_DICTATOR_VARS: usize = 4;
pub const MAX_DICTATOR_VARS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrefixQueryNorm {
    /// Prefix length `k`; the query set is `{1, …, k}`.
    pub k: usize,
    /// 1-based coordinates the query pattern sets to `-1`.
    pub pattern: Vec<usize>,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DictatorReport {
    pub n: usize,
    /// `(1/2^n) ⟨1|Γ|1⟩`.
    pub numerator_form: f64,
    /// `2 + (n-3)/√2`.
    pub expected_numerator: f64,
    /// `‖Γ‖`.
    pub gamma_norm: f64,
    pub query_norms: Vec<PrefixQueryNorm>,
    /// `numerator_form / max query norm`, a lower bound on the adversary value.
    pub bound: f64,
}

pub fn expected_numerator(n: usize) -> f64 {
    2.0 + (n as f64 - 3.0) / SQRT_2
}

/// `Γ = M_{f∘XOR}` for the index witness; zero whenever `x_n = y_n`.
pub fn build_dictator_gamma(n: usize) -> Result<AdversaryMatrix> {
    if !(MIN_DICTATOR_VARS..=MAX_DICTATOR_VARS).contains(&n) {
        return Err(Error::Parameter(format!(
            "dictator matrix needs {MIN_DICTATOR_VARS} <= n <= {MAX_DICTATOR_VARS} (got {n})"
        )));
    }
    xor_matrix(&build_witness(WitnessKind::DictatorIndex, n)?)
}

/// Norm of `Γ ∘ Δ_{[k], pattern}`.
pub fn prefix_query_norm(gamma: &AdversaryMatrix, k: usize, pattern: u32, tol: f64) -> Result<f64> {
    query_norm_dense(gamma, full_mask(k), pattern, tol)
}

/// Builds `Γ` and measures the numerator form and every prefix query with
/// the all-ones pattern. Other patterns reduce to this one by conjugating with
/// a bit flip, which fixes `Γ`. Nothing is checked here.
pub fn dictator_report(n: usize, tol: f64) -> Result<DictatorReport> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let gamma = build_dictator_gamma(n)?;
    let numerator_form = gamma.entries().sum() / gamma.dim() as f64;
    let query_norms = (1..=n)
        .map(|k| {
            Ok(PrefixQueryNorm {
                k,
                pattern: Vec::new(),
                norm: prefix_query_norm(&gamma, k, 0, tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let top = query_norms.iter().fold(0.0_f64, |m, q| m.max(q.norm));
    Ok(DictatorReport {
        n,
        numerator_form,
        expected_numerator: expected_numerator(n),
        gamma_norm: spectral_norm(&gamma, tol)?,
        query_norms,
        bound: numerator_form / top,
    })
}

/// [`dictator_report`] plus the checks: numerator form equal to
/// `2+(n-3)/√2`, every prefix query norm equal to 1, and the bound.
pub fn verify_dictator(n: usize, tol: f64) -> Result<DictatorReport> {
    let report = dictator_report(n, tol)?;
    check_dictator(&report, tol)?;
    Ok(report)
}

pub fn check_dictator(report: &DictatorReport, tol: f64) -> Result<()> {
    let expected = report.expected_numerator;
    if (report.numerator_form - expected).abs() > tol {
        return Err(Error::VerificationFailed(format!(
            "numerator form {} differs from 2+(n-3)/√2 = {expected}",
            report.numerator_form
        )));
    }
    if let Some(q) = report.query_norms.iter().find(|q| (q.norm - 1.0).abs() > tol) {
        return Err(Error::VerificationFailed(format!(
            "query ([1..{}], all +1) has norm {}, expected 1",
            q.k, q.norm
        )));
    }
    if report.bound < expected - tol {
        return Err(Error::VerificationFailed(format!(
            "bound {} below 2+(n-3)/√2 = {expected}",
            report.bound
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n4_structure() {
        let g = build_dictator_gamma(4).unwrap();
        for x in 0..16usize {
            for y in 0..16usize {
                if (x ^ y) & 0b1000 == 0 {
                    assert_eq!(g.get(x, y), 0.0);
                }
                assert_eq!(g.get(x, y), g.get(y, x));
            }
        }
    }

    #[test]
    fn n4_row_census() {
        let g = build_dictator_gamma(4).unwrap();
        let row: Vec<f64> = (0..16).map(|y| g.get(0, y)).collect();
        let count = |v: f64| row.iter().filter(|&&r| (r - v).abs() < 1e-15).count();
        assert_eq!(count(0.5), 2);
        assert_eq!(count(1.0 / (2.0 * SQRT_2)), 2);
        assert_eq!(count(0.25), 4);
        assert_eq!(count(0.0), 8);
    }

    // Hand count for q = ([n-1], 1^{n-1}): Γ∘Δ_q splits into two stars whose
    // leaves carry f on {y_n = -1} minus the point (1^{n-1}, -1), so the
    // squared norm is 1 - 1/4. Every other prefix length gives 1.
    fn hand_norm(n: usize, k: usize) -> f64 {
        if k == n - 1 {
            0.75f64.sqrt()
        } else {
            1.0
        }
    }

    #[test]
    fn numerator_small() {
        let r = dictator_report(4, 1e-9).unwrap();
        assert!((r.numerator_form - (2.0 + 1.0 / SQRT_2)).abs() < 1e-12);
        let r = dictator_report(5, 1e-9).unwrap();
        assert!((r.numerator_form - (2.0 + SQRT_2)).abs() < 1e-12);
        assert!(r.gamma_norm >= r.numerator_form - 1e-12);
    }

    #[test]
    fn prefix_norms_match_hand_count() {
        for n in 4..=7 {
            let r = dictator_report(n, 1e-9).unwrap();
            for q in &r.query_norms {
                assert!((q.norm - hand_norm(n, q.k)).abs() < 1e-9, "n={n} k={}", q.k);
            }
            assert!((r.bound - expected_numerator(n)).abs() < 1e-9);
        }
    }

    #[test]
    fn strict_check_names_query() {
        let err = verify_dictator(4, 1e-9).unwrap_err();
        assert!(err.to_string().contains("[1..3]"), "{err}");
    }

    #[test]
    fn range_errors() {
        assert!(build_dictator_gamma(3).is_err());
        assert!(build_dictator_gamma(11).is_err());
        assert!(verify_dictator(4, 0.0).is_err());
    }
}
