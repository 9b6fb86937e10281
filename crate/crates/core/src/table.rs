//! The bounds table: witness ratios, certificate upper bounds and exact
//! values for the four standard families at one `n`.

use serde::Serialize;

use crate::error::Result;
use crate::family::{FamilyKind, QueryFamily};
use crate::valq::{exact_valq, ratio, theorem_upper_bound, Bracket, ValqValue};
use crate::witness::{build_witness, witness_ratio_closed_form, WitnessKind};

/// Exact values are only attempted up to this size.
pub const MAX_TABLE_EXACT_VARS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactCell {
    pub value: ValqValue,
    pub bracket: Bracket,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub family: String,
    pub witness: String,
    pub witness_ratio: ValqValue,
    /// Closed form of the witness ratio, when one is known.
    pub closed_form: Option<f64>,
    pub upper_bound: ValqValue,
    pub exact: Option<ExactCell>,
    pub formula: String,
    pub downward_closed: bool,
    /// `Θ` when learning the string costs the same as parity up to constants,
    /// `Ω` when only the parity lower bound transfers.
    pub rec_vs_parity: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsTable {
    pub n: usize,
    pub tol: f64,
    pub rows: Vec<TableRow>,
}

fn families(n: usize) -> Result<Vec<QueryFamily>> {
    let mut out = vec![QueryFamily::full_set_only(n)?];
    for k in 1..=n {
        out.push(QueryFamily::bounded(n, k)?);
    }
    out.push(QueryFamily::contiguous(n, false)?);
    out.push(QueryFamily::prefixes(n)?);
    Ok(out)
}

fn formula(kind: &FamilyKind) -> &'static str {
    match kind {
        FamilyKind::FullSetOnly => "2^{(n-1)/2}",
        FamilyKind::BoundedSize(_) => "[n/sqrt(k), 2n/sqrt(k)]",
        FamilyKind::Contiguous { .. } => "[cn/log(n), n]",
        FamilyKind::Prefixes => "[n/sqrt(8), n]",
        _ => "",
    }
}

/// Block witness with the best ratio over the block widths dividing `n`.
fn best_block(n: usize, q: &QueryFamily) -> Result<(WitnessKind, ValqValue)> {
    let mut best: Option<(WitnessKind, ValqValue)> = None;
    for k in (1..=n).filter(|k| n.is_multiple_of(*k)) {
        let kind = WitnessKind::Block { m: n / k, k };
        let value = ratio(&build_witness(kind, n)?, q)?.value;
        let better = match (best.map(|b| b.1), value) {
            (None, _) => true,
            (Some(ValqValue::Unbounded), _) => false,
            (Some(_), ValqValue::Unbounded) => true,
            (Some(ValqValue::Finite(b)), ValqValue::Finite(v)) => v > b,
        };
        if better {
            best = Some((kind, value));
        }
    }
    Ok(best.expect("k = n always divides n"))
}

pub fn bounds_table(n: usize, tol: f64) -> Result<BoundsTable> {
    let mut rows = Vec::new();
    for q in families(n)? {
        let (kind, witness_ratio) = match q.kind() {
            FamilyKind::FullSetOnly => (WitnessKind::TwoPoint, None),
            FamilyKind::BoundedSize(_) => (WitnessKind::Hamming, None),
            FamilyKind::Prefixes => (WitnessKind::PrefixDecisionList, None),
            _ => {
                let (kind, value) = best_block(n, &q)?;
                (kind, Some(value))
            }
        };
        let witness_ratio = match witness_ratio {
            Some(v) => v,
            None => ratio(&build_witness(kind, n)?, &q)?.value,
        };
        let exact = if n <= MAX_TABLE_EXACT_VARS {
            let report = exact_valq(n, &q, tol)?;
            Some(ExactCell {
                value: report.value,
                bracket: report.bracket,
            })
        } else {
            None
        };
        let downward_closed = q.is_downward_closed();
        rows.push(TableRow {
            family: q.to_string(),
            witness: kind.to_string(),
            witness_ratio,
            closed_form: witness_ratio_closed_form(kind, n, &q).ok(),
            upper_bound: theorem_upper_bound(&q),
            exact,
            formula: formula(q.kind()).to_string(),
            downward_closed,
            rec_vs_parity: if downward_closed { "Θ" } else { "Ω" }.to_string(),
        });
    }
    Ok(BoundsTable { n, tol, rows })
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan" } else if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    trim_zeros(&format!("{:.*}", (11 - exp) as usize, v)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell(v: ValqValue) -> String {
    match v {
        ValqValue::Finite(x) => sig12(x),
        ValqValue::Unbounded => "unbounded".into(),
    }
}

impl BoundsTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "family,witness,witness_ratio,closed_form,upper_bound,exact,exact_lower,exact_upper,\
             formula,downward_closed,rec_vs_parity\n",
        );
        for r in &self.rows {
            let (exact, lo, hi) = match &r.exact {
                Some(e) => (cell(e.value), cell(e.bracket.lower), cell(e.bracket.upper)),
                None => Default::default(),
            };
            let fields = [
                r.family.clone(),
                r.witness.clone(),
                cell(r.witness_ratio),
                r.closed_form.map(sig12).unwrap_or_default(),
                cell(r.upper_bound),
                exact,
                lo,
                hi,
                r.formula.clone(),
                r.downward_closed.to_string(),
                r.rec_vs_parity.clone(),
            ];
            let quoted: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
            out.push_str(&quoted.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formats() {
        assert_eq!(sig12(2.0), "2");
        assert_eq!(sig12(2f64.sqrt()), "1.41421356237");
        assert_eq!(sig12(2.0f64.powf(1.5)), "2.82842712475");
        assert_eq!(sig12(1234.5), "1234.5");
        assert_eq!(sig12(-0.125), "-0.125");
        assert_eq!(sig12(1e-7), "1e-07");
        assert_eq!(sig12(6.02214076e23), "6.02214076e+23");
        assert_eq!(sig12(0.0001), "0.0001");
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(csv_field("[a, b]"), "\"[a, b]\"");
        assert_eq!(csv_field("plain"), "plain");
    }

    #[test]
    fn n4_rows() {
        let t = bounds_table(4, 1e-4).unwrap();
        assert_eq!(t.rows.len(), 1 + 4 + 1 + 1);
        let full = &t.rows[0];
        assert_eq!(full.family, "full");
        let w = full.witness_ratio.finite().unwrap();
        assert!((w - 2f64.powf(1.5)).abs() < 1e-12);
        let e = full.exact.as_ref().unwrap().value.finite().unwrap();
        assert!((e / 2f64.powf(1.5) - 1.0).abs() < 1e-3);
        assert!(!full.downward_closed);
        assert_eq!(full.rec_vs_parity, "Ω");

        let b4 = t.rows.iter().find(|r| r.family == "bounded:4").unwrap();
        assert!((b4.witness_ratio.finite().unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(b4.upper_bound, ValqValue::Finite(4.0));
        assert!(b4.downward_closed);

        let p = t.rows.iter().find(|r| r.family == "prefixes").unwrap();
        assert!(p.witness_ratio.finite().unwrap() >= 4.0 / 8f64.sqrt());
        assert_eq!(p.closed_form, Some(4.0 / 8f64.sqrt()));
        assert_eq!(p.upper_bound, ValqValue::Finite(4.0));
    }
}
