//! Self-check suites run by `valq verify`. Each suite recomputes a family of
//! identities on seeded random inputs and reports the first violation.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::adversary::{
    adv_ratio, adv_ratio_dense, eigenvalues, query_norm_dense, query_norm_structured,
    spectral_norm, xor_matrix,
};
use crate::cube::{
    chi, even_support_zero, fourier_transform, inverse_transform, is_odd, moments, restrict,
    CubeFunction,
};
use crate::dictator::{check_dictator, dictator_report, MAX_DICTATOR_VARS, MIN_DICTATOR_VARS};
use crate::error::{Error, Result};
use crate::family::{full_mask, QueryFamily, Subcube};
use crate::valq::{
    denominator, exact_valq, find_rich_subcube, prefix_certificate, ratio, shrink_to_k,
    singleton_certificate, ValqValue,
};
use crate::witness::{build_witness, witness_ratio_closed_form, WitnessKind};

/// Largest `n` used by suites that form dense `2^n x 2^n` matrices.
pub const MAX_SUITE_DENSE_VARS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Parseval,
    Restriction,
    Oddness,
    XorNorm,
    Denominator,
    Framework,
    Witnesses,
    Certificates,
    Dictator,
    Exact,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Parseval,
        Suite::Restriction,
        Suite::Oddness,
        Suite::XorNorm,
        Suite::Denominator,
        Suite::Framework,
        Suite::Witnesses,
        Suite::Certificates,
        Suite::Dictator,
        Suite::Exact,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::Parseval => "parseval",
            Suite::Restriction => "restriction",
            Suite::Oddness => "oddness",
            Suite::XorNorm => "xornorm",
            Suite::Denominator => "denominator",
            Suite::Framework => "framework",
            Suite::Witnesses => "witnesses",
            Suite::Certificates => "certificates",
            Suite::Dictator => "dictator",
            Suite::Exact => "exact",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub n: usize,
    pub tol: f64,
    /// Relative tolerance handed to the exact solver.
    pub exact_tol: f64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n: 6,
            tol: 1e-9,
            exact_tol: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    /// Dimension the suite actually ran at.
    pub n: usize,
    pub passed: bool,
    pub checks: usize,
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub tol: f64,
    pub seed: u64,
    pub passed: bool,
    pub first_failure: Option<String>,
    pub suites: Vec<SuiteOutcome>,
}

struct Checker {
    checks: usize,
    failure: Option<String>,
}

impl Checker {
    fn new() -> Self {
        Self {
            checks: 0,
            failure: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn random_function(n: usize, rng: &mut ChaCha8Rng) -> Result<CubeFunction> {
    CubeFunction::from_fn(n, |_| rng.gen_range(-1.0..1.0))
}

fn random_odd(n: usize, rng: &mut ChaCha8Rng) -> Result<CubeFunction> {
    let half: Vec<f64> = (0..1usize << (n - 1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let full = (1usize << n) - 1;
    CubeFunction::from_fn(n, |x| if x < half.len() { half[x] } else { -half[x ^ full] })
}

/// Variance of `f_{S|b}` from the Fourier side:
/// `Σ_{∅≠T⊆S} (Σ_{U⊆S̄} f̂(T∪U) χ_U(b))²`.
fn fourier_side_variance(coeffs: &[f64], c: &Subcube) -> f64 {
    let n = c.n();
    let free = c.free() as usize;
    let fixed = full_mask(n) as usize & !free;
    let mut total = 0.0;
    let mut t = free;
    while t != 0 {
        let mut inner = 0.0;
        let mut u = fixed;
        loop {
            inner += coeffs[t | u] * chi(u as u32, c.fixing() as usize);
            if u == 0 {
                break;
            }
            u = (u - 1) & fixed;
        }
        total += inner * inner;
        t = (t - 1) & free;
    }
    total
}

fn all_subcubes(n: usize) -> Result<Vec<Subcube>> {
    let full = full_mask(n);
    let mut out = Vec::new();
    for free in 1..=full {
        let fixed = full & !free;
        let mut b = 0u32;
        loop {
            out.push(Subcube::new(n, free, b)?);
            b = (b | !fixed).wrapping_add(1) & fixed;
            if b == 0 {
                break;
            }
        }
    }
    Ok(out)
}

fn standard_families(n: usize) -> Result<Vec<QueryFamily>> {
    Ok(vec![
        QueryFamily::bounded(n, n.div_ceil(2))?,
        QueryFamily::contiguous(n, false)?,
        QueryFamily::prefixes(n)?,
        QueryFamily::full_set_only(n)?,
    ])
}

fn parseval(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, c: &mut Checker) -> Result<()> {
    for _ in 0..10 {
        let f = random_function(cfg.n, rng)?;
        let spectrum = fourier_transform(&f);
        let e2 = f.values().iter().map(|v| v * v).sum::<f64>() / f.len() as f64;
        let s2: f64 = spectrum.coeffs().iter().map(|v| v * v).sum();
        c.check(close(e2, s2, cfg.tol), || format!("E[f²] = {e2} but Σ f̂² = {s2}"));
        let back = inverse_transform(&spectrum);
        let drift = f
            .values()
            .iter()
            .zip(back.values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        c.check(drift <= cfg.tol, || format!("inverse transform drifts by {drift}"));
    }
    Ok(())
}

fn restriction(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, c: &mut Checker) -> Result<()> {
    let n = cfg.n;
    let cubes = all_subcubes(n)?;
    for _ in 0..3 {
        let f = random_function(n, rng)?;
        let spectrum = fourier_transform(&f);
        for cube in &cubes {
            let direct = moments(&restrict(&f, cube)?).variance;
            let via_fourier = fourier_side_variance(spectrum.coeffs(), cube);
            c.check(close(direct, via_fourier, cfg.tol), || {
                format!("Var(f restricted to {cube}) = {direct}, Fourier side gives {via_fourier}")
            });
        }
        // Averaged over fixings: E_b Var(f_{S|b}) = Σ_{T∩S≠∅} f̂(T)².
        for set in 1..=full_mask(n) {
            let fixed = full_mask(n) & !set;
            let count = 1u64 << fixed.count_ones();
            let avg = cubes
                .iter()
                .filter(|q| q.free() == set)
                .map(|q| moments(&restrict(&f, q).expect("valid subcube")).variance)
                .sum::<f64>()
                / count as f64;
            let mass: f64 = spectrum
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(t, _)| *t as u32 & set != 0)
                .map(|(_, v)| v * v)
                .sum();
            c.check(close(avg, mass, cfg.tol), || {
                format!("set {set:#b}: mean restricted variance {avg}, spectral mass {mass}")
            });
        }
    }
    Ok(())
}

fn oddness(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, c: &mut Checker) -> Result<()> {
    for _ in 0..10 {
        let g = random_odd(cfg.n, rng)?;
        let spectrum = fourier_transform(&g).as_function();
        let cleaned = CubeFunction::from_fn(cfg.n, |s| {
            let v = spectrum.get(s);
            if v.abs() <= cfg.tol { 0.0 } else { v }
        })?;
        c.check(is_odd(&g), || "odd construction is not odd".into());
        c.check(even_support_zero(&cleaned), || {
            "odd function has Fourier mass on an even set".into()
        });
        let f = random_function(cfg.n, rng)?;
        c.check(!is_odd(&f), || "generic function reported odd".into());
        c.check(!even_support_zero(&fourier_transform(&f).as_function()), || {
            "generic function has no even Fourier mass".into()
        });
    }
    Ok(())
}

fn xornorm(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, c: &mut Checker) -> Result<()> {
    let n = cfg.n.min(MAX_SUITE_DENSE_VARS);
    let scale = (1u64 << n) as f64;
    for _ in 0..5 {
        let f = random_function(n, rng)?;
        let m = xor_matrix(&f)?;
        let mut expected: Vec<f64> = fourier_transform(&f)
            .coeffs()
            .iter()
            .map(|v| v * scale)
            .collect();
        expected.sort_by(f64::total_cmp);
        let ev = eigenvalues(&m, cfg.tol)?;
        let worst = ev
            .iter()
            .zip(&expected)
            .fold(0.0_f64, |w, (a, b)| w.max((a - b).abs()));
        c.check(worst <= cfg.tol * scale, || {
            format!("XOR matrix spectrum differs from 2^n f̂ by {worst}")
        });
        let norm = spectral_norm(&m, cfg.tol)?;
        let top = expected.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        c.check(close(norm, top, cfg.tol), || format!("‖M‖ = {norm}, 2^n max|f̂| = {top}"));
    }
    Ok(())
}

fn denominator_suite(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, c: &mut Checker) -> Result<()> {
    let n = cfg.n.min(MAX_SUITE_DENSE_VARS);
    for _ in 0..3 {
        let f = random_function(n, rng)?;
        let m = xor_matrix(&f)?;
        for set in 1..=full_mask(n) {
            let structured = query_norm_structured(&f, set);
            for _ in 0..2 {
                let pattern = rng.gen::<u32>() & set;
                let dense = query_norm_dense(&m, set, pattern, cfg.tol)?;
                c.check(close(dense, structured, cfg.tol), || {
                    format!("query ({set:#b}, {pattern:#b}): dense {dense}, structured {structured}")
                });
            }
        }
    }
    Ok(())
}

fn framework(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, c: &mut Checker) -> Result<()> {
    let n = cfg.n.max(2);
    for q in standard_families(n)? {
        for i in 0..5 {
            let g = random_odd(n, rng)?;
            let analytic = ratio(&g, &q)?.value;
            let matrix = adv_ratio(&g, &q)?;
            let ok = match analytic {
                ValqValue::Finite(v) => close(matrix, v, cfg.tol),
                ValqValue::Unbounded => matrix.is_infinite(),
            };
            c.check(ok, || format!("{q}: adv_ratio {matrix} vs ratio {analytic}"));
            if i == 0 && n <= MAX_SUITE_DENSE_VARS {
                let dense = adv_ratio_dense(&g, &q, cfg.tol)?;
                c.check(close(dense, matrix, cfg.tol), || {
                    format!("{q}: dense adv_ratio {dense} vs structured {matrix}")
                });
            }
        }
    }
    Ok(())
}

fn witnesses(cfg: &SuiteConfig, c: &mut Checker) -> Result<()> {
    let n = cfg.n;
    let mut pairs = vec![(WitnessKind::TwoPoint, QueryFamily::full_set_only(n)?)];
    for k in 1..=n {
        pairs.push((WitnessKind::Hamming, QueryFamily::bounded(n, k)?));
    }
    pairs.push((WitnessKind::Hamming, QueryFamily::singletons(n)?));
    for (kind, q) in pairs {
        let got = ratio(&build_witness(kind, n)?, &q)?.value.finite();
        let want = witness_ratio_closed_form(kind, n, &q)?;
        c.check(got.is_some_and(|v| close(v, want, cfg.tol)), || {
            format!("{kind} on {q}: ratio {got:?}, closed form {want}")
        });
    }
    let prefix = build_witness(WitnessKind::PrefixDecisionList, n)?;
    let (den, cube) = denominator(&prefix, &QueryFamily::prefixes(n)?)?;
    c.check(den * den < 8.0, || {
        format!("prefix witness variance {} on {cube} is not below 8", den * den)
    });
    let contiguous = QueryFamily::contiguous(n, true)?;
    for k in (1..=n).filter(|k| n.is_multiple_of(*k)) {
        let f = build_witness(WitnessKind::Block { m: n / k, k }, n)?;
        c.check(is_odd(&f), || format!("block witness k={k} is not odd"));
        let value = ratio(&f, &contiguous)?.value;
        c.check(value.finite().is_some_and(|v| v <= n as f64 + cfg.tol), || {
            format!("block witness k={k} ratio {value} exceeds n")
        });
    }
    Ok(())
}

fn certificates(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, c: &mut Checker) -> Result<()> {
    let n = cfg.n;
    let nf = n as f64;
    for _ in 0..10 {
        let f = random_odd(n, rng)?;
        let big_m = f.sup_norm();
        let slack = cfg.tol * big_m.max(1.0);

        let rich = find_rich_subcube(&f)?;
        let r = restrict(&f, &rich.subcube)?;
        let var = moments(&r).variance;
        c.check(var >= big_m * big_m / (4.0 * nf) - slack, || {
            format!("rich subcube {} has variance {var} < M²/4n", rich.subcube)
        });
        let min_deg1 = (0..r.n()).map(|i| r.degree_one(i).abs()).fold(f64::INFINITY, f64::min);
        c.check(min_deg1 >= big_m / (2.0 * nf) - slack, || {
            format!("rich subcube {} has degree-1 coefficient {min_deg1} < M/2n", rich.subcube)
        });

        for k in 1..=n {
            let cube = shrink_to_k(&f, &rich, k)?;
            let var = moments(&restrict(&f, &cube)?).variance;
            let bound = big_m * big_m * k.min(cube.dim()) as f64 / (4.0 * nf * nf);
            c.check(cube.dim() <= k && var >= bound - slack, || {
                format!("shrink to k={k} gave {cube} with variance {var}, need {bound}")
            });
        }

        let single = singleton_certificate(&f)?;
        let sv = moments(&restrict(&f, &single.subcube)?).variance;
        c.check(single.drop >= 2.0 * big_m / nf - slack && sv >= big_m * big_m / (nf * nf) - slack, || {
            format!("singleton edge drop {} below 2M/n", single.drop)
        });

        let prefix = prefix_certificate(&f)?;
        c.check(prefix.coefficient.abs() >= big_m / nf - slack, || {
            format!("prefix certificate coefficient {} below M/n", prefix.coefficient)
        });
    }
    Ok(())
}

fn dictator(cfg: &SuiteConfig, c: &mut Checker) -> Result<(usize, Value)> {
    let n = cfg.n.clamp(MIN_DICTATOR_VARS, MAX_DICTATOR_VARS);
    let report = dictator_report(n, cfg.tol)?;
    let verdict = check_dictator(&report, cfg.tol);
    c.check(verdict.is_ok(), || verdict.unwrap_err().to_string());
    Ok((n, serde_json::to_value(&report)?))
}

fn exact(cfg: &SuiteConfig, c: &mut Checker) -> Result<usize> {
    let n = cfg.n.clamp(2, 6);
    let nf = n as f64;
    let within = |q: &QueryFamily, lo: f64, hi: f64, c: &mut Checker| -> Result<()> {
        let value = exact_valq(n, q, cfg.exact_tol)?.value;
        let ok = value
            .finite()
            .is_some_and(|v| v >= lo * (1.0 - cfg.exact_tol) && v <= hi * (1.0 + cfg.exact_tol));
        c.check(ok, || format!("exact value on {q} is {value}, expected within [{lo}, {hi}]"));
        Ok(())
    };
    let full = 2f64.powf((nf - 1.0) / 2.0);
    let q = QueryFamily::full_set_only(n)?;
    let value = exact_valq(n, &q, cfg.exact_tol)?.value;
    c.check(value.finite().is_some_and(|v| (v / full - 1.0).abs() <= 1e-3), || {
        format!("exact value on full is {value}, expected 2^((n-1)/2) = {full}")
    });
    for k in 1..=n {
        let s = (k as f64).sqrt();
        within(&QueryFamily::bounded(n, k)?, nf / s, 2.0 * nf / s, c)?;
    }
    within(&QueryFamily::prefixes(n)?, nf / 8f64.sqrt(), nf, c)?;
    within(&QueryFamily::singletons(n)?, nf, nf, c)?;
    Ok(n)
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    if !(cfg.tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {}", cfg.tol)));
    }
    if cfg.n == 0 || cfg.n > 10 {
        return Err(Error::Parameter(format!("suites run for 1 <= n <= 10 (got {})", cfg.n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = Checker::new();
    let mut n = cfg.n;
    let mut report = None;
    match suite {
        Suite::Parseval => parseval(cfg, &mut rng, &mut c)?,
        Suite::Restriction => restriction(cfg, &mut rng, &mut c)?,
        Suite::Oddness => oddness(cfg, &mut rng, &mut c)?,
        Suite::XorNorm => {
            n = n.min(MAX_SUITE_DENSE_VARS);
            xornorm(cfg, &mut rng, &mut c)?
        }
        Suite::Denominator => {
            n = n.min(MAX_SUITE_DENSE_VARS);
            denominator_suite(cfg, &mut rng, &mut c)?
        }
        Suite::Framework => {
            n = n.max(2);
            framework(cfg, &mut rng, &mut c)?
        }
        Suite::Witnesses => witnesses(cfg, &mut c)?,
        Suite::Certificates => certificates(cfg, &mut rng, &mut c)?,
        Suite::Dictator => {
            let (used, value) = dictator(cfg, &mut c)?;
            n = used;
            report = Some(value);
        }
        Suite::Exact => n = exact(cfg, &mut c)?,
    }
    Ok(SuiteOutcome {
        suite: suite.to_string(),
        n,
        passed: !c.failed(),
        checks: c.checks,
        failure: c.failure,
        report,
    })
}

/// Runs the suites in order. Engine errors inside a suite count as that
/// suite's failure; configuration errors abort.
pub fn run_suites(suites: &[Suite], cfg: &SuiteConfig) -> Result<VerifyReport> {
    let mut outcomes = Vec::with_capacity(suites.len());
    for &suite in suites {
        let outcome = match run_suite(suite, cfg) {
            Ok(o) => o,
            Err(e @ Error::Parameter(_)) => return Err(e),
            Err(e) => SuiteOutcome {
                suite: suite.to_string(),
                n: cfg.n,
                passed: false,
                checks: 0,
                failure: Some(e.to_string()),
                report: None,
            },
        };
        outcomes.push(outcome);
    }
    let first_failure = outcomes
        .iter()
        .find(|o| !o.passed)
        .map(|o| format!("{}: {}", o.suite, o.failure.as_deref().unwrap_or("failed")));
    Ok(VerifyReport {
        n: cfg.n,
        tol: cfg.tol,
        seed: cfg.seed,
        passed: first_failure.is_none(),
        first_failure,
        suites: outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize) -> SuiteConfig {
        SuiteConfig {
            n,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn identity_suites_pass_small() {
        for suite in [
            Suite::Parseval,
            Suite::Restriction,
            Suite::Oddness,
            Suite::XorNorm,
            Suite::Denominator,
            Suite::Framework,
            Suite::Witnesses,
            Suite::Certificates,
            Suite::Exact,
        ] {
            let o = run_suite(suite, &cfg(4)).unwrap();
            assert!(o.passed, "{suite}: {:?}", o.failure);
            assert!(o.checks > 0);
        }
    }

    #[test]
    fn fourier_side_variance_on_character() {
        // χ_{1,2} restricted to coordinates {1}: a ±1 character, variance 1.
        let f = CubeFunction::character(3, 0b011).unwrap();
        let s = fourier_transform(&f);
        let c = Subcube::new(3, 0b001, 0b010).unwrap();
        assert_eq!(fourier_side_variance(s.coeffs(), &c), 1.0);
        let c = Subcube::new(3, 0b100, 0b011).unwrap();
        assert_eq!(fourier_side_variance(s.coeffs(), &c), 0.0);
    }

    #[test]
    fn dictator_suite_embeds_report() {
        let o = run_suite(Suite::Dictator, &cfg(4)).unwrap();
        assert!(o.report.is_some());
        assert_eq!(o.n, 4);
    }

    #[test]
    fn bad_tol_aborts() {
        let bad = SuiteConfig {
            tol: 0.0,
            ..SuiteConfig::default()
        };
        assert!(run_suites(&Suite::ALL, &bad).is_err());
    }
}
