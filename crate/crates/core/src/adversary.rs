//! Adversary matrices for parity: XOR matrices, query masks, spectral norms
//! and the alternate `(β, Γ)` formulation.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::cube::{
    fourier_transform, inverse_transform, is_odd, subcube_variances, CubeFunction,
    FourierSpectrum,
};
use crate::error::{Error, Result};
use crate::family::{full_mask, QueryFamily};

/// Largest `n` for which dense `2^n × 2^n` matrices are built.
pub const MAX_DENSE_VARS: usize = 10;
const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Dense symmetric `2^n × 2^n` matrix indexed by inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryMatrix {
    n: usize,
    entries: DMatrix<f64>,
}

impl AdversaryMatrix {
    pub fn new(n: usize, entries: DMatrix<f64>) -> Result<Self> {
        check_dense(n)?;
        let len = 1usize << n;
        if entries.nrows() != len || entries.ncols() != len {
            return Err(Error::Parameter(format!(
                "matrix is {}x{}, expected {len}x{len}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("matrix has non-finite entries".into()));
        }
        for x in 0..len {
            for y in x + 1..len {
                if entries[(x, y)] != entries[(y, x)] {
                    return Err(Error::Parameter(format!(
                        "matrix is not symmetric at ({x}, {y})"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        check_dense(n)?;
        let len = 1usize << n;
        Ok(Self {
            n,
            entries: DMatrix::from_fn(len, len, f),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[(x, y)]
    }

    pub fn hadamard(&self, other: &AdversaryMatrix) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Parameter("dimension mismatch".into()));
        }
        Ok(Self {
            n: self.n,
            entries: self.entries.component_mul(&other.entries),
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            entries: &self.entries * factor,
        }
    }

    /// `P M Pᵀ` for the permutation `x ↦ x ⊕ y`.
    pub fn conjugate_by_flip(&self, y: usize) -> Self {
        let len = self.dim();
        Self {
            n: self.n,
            entries: DMatrix::from_fn(len, len, |a, b| self.entries[(a ^ y, b ^ y)]),
        }
    }

    /// Zero on every pair with equal parity, i.e. `|x ⊕ y|` even.
    pub fn is_parity_feasible(&self) -> bool {
        let len = self.dim();
        (0..len).all(|x| {
            (0..len).all(|y| (x ^ y).count_ones() % 2 == 1 || self.entries[(x, y)] == 0.0)
        })
    }

    /// The generating function `h` when `M[x][y] = h(x ⊕ y)` exactly.
    pub fn xor_generator(&self) -> Option<CubeFunction> {
        let len = self.dim();
        let structured = (0..len).all(|x| (0..len).all(|y| self.entries[(x, y)] == self.entries[(0, x ^ y)]));
        structured.then(|| {
            CubeFunction::new(self.n, self.entries.row(0).iter().copied().collect())
                .expect("row has 2^n finite entries")
        })
    }

    /// Row-major CSV with a `n=<int>` header line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for row in self.entries.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn check_dense(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_VARS {
        return Err(Error::Capability {
            what: format!("dense matrix with n={n}"),
            limit: MAX_DENSE_VARS,
        });
    }
    Ok(())
}

/// `M[x][y] = f(x ⊕ y)`.
pub fn xor_matrix(f: &CubeFunction) -> Result<AdversaryMatrix> {
    AdversaryMatrix::from_fn(f.n(), |x, y| f.get(x ^ y))
}

/// `Δ[x][y] = 1` iff exactly one of `x`, `y` agrees with `pattern` on `set`.
/// `pattern` is a mask inside `set` (bit set ⟺ `-1`).
pub fn delta_matrix(set: u32, pattern: u32, n: usize) -> Result<AdversaryMatrix> {
    if set == 0 || set & !full_mask(n) != 0 {
        return Err(Error::Parameter(format!("query set {set:#b} is empty or exceeds n={n}")));
    }
    if pattern & !set != 0 {
        return Err(Error::Parameter(format!(
            "pattern {pattern:#b} has bits outside the query set {set:#b}"
        )));
    }
    let hit = |x: usize| x as u32 & set == pattern;
    AdversaryMatrix::from_fn(n, |x, y| if hit(x) != hit(y) { 1.0 } else { 0.0 })
}

fn eigen(m: &AdversaryMatrix, tol: f64) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let eps = (tol * 1e-3).max(f64::EPSILON);
    SymmetricEigen::try_new(m.entries.clone(), eps, EIGEN_MAX_ITERATIONS)
        .ok_or(Error::Eigensolver { dim: m.dim() })
}

/// Eigenvalues in ascending order.
pub fn eigenvalues(m: &AdversaryMatrix, tol: f64) -> Result<Vec<f64>> {
    let mut ev: Vec<f64> = eigen(m, tol)?.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Largest singular value, `max |λ|` for a symmetric matrix.
pub fn spectral_norm(m: &AdversaryMatrix, tol: f64) -> Result<f64> {
    Ok(eigen(m, tol)?
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs())))
}

/// Number of eigenvalues with `|λ| > tol · max|λ|`.
pub fn numerical_rank(m: &AdversaryMatrix, tol: f64) -> Result<usize> {
    let ev = eigenvalues(m, tol)?;
    let top = ev.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(ev.iter().filter(|v| v.abs() > tol * top).count())
}

/// `‖M_{f∘XOR} ∘ Δ_{S,b}‖ = 2^n · max_x √Var(f̂_{S|x})`, independent of `b`.
/// Never forms the matrix.
pub fn query_norm_structured(f: &CubeFunction, set: u32) -> f64 {
    let spectrum = fourier_transform(f);
    let top = subcube_variances(spectrum.coeffs(), f.n(), set)
        .into_iter()
        .fold(0.0_f64, |m, (_, v)| m.max(v));
    (1u64 << f.n()) as f64 * top.sqrt()
}

/// Dense `‖M ∘ Δ_{S,b}‖`.
pub fn query_norm_dense(m: &AdversaryMatrix, set: u32, pattern: u32, tol: f64) -> Result<f64> {
    spectral_norm(&m.hadamard(&delta_matrix(set, pattern, m.n())?)?, tol)
}

/// The function whose Fourier spectrum is `g`.
pub fn lift_spectrum(g: &CubeFunction) -> CubeFunction {
    inverse_transform(
        &FourierSpectrum::new(g.n(), g.values().to_vec()).expect("same shape as g"),
    )
}

/// `‖M_{f∘XOR}‖ / max_{S∈Q} ‖M_{f∘XOR} ∘ Δ_{S,b}‖` for the `f` with `f̂ = g`,
/// using the structured norms. `+∞` when every query norm vanishes.
pub fn adv_ratio(g: &CubeFunction, q: &QueryFamily) -> Result<f64> {
    if g.n() != q.n() {
        return Err(Error::Parameter("function and family dimensions differ".into()));
    }
    if !is_odd(g) {
        return Err(Error::NotOdd);
    }
    if g.is_zero() {
        return Err(Error::Degenerate("the zero function has no ratio".into()));
    }
    let f = lift_spectrum(g);
    let numerator = (1u64 << f.n()) as f64 * fourier_transform(&f).max_abs();
    let denominator = q
        .enumerate_sets()
        .into_iter()
        .map(|s| query_norm_structured(&f, s))
        .fold(0.0_f64, f64::max);
    Ok(if denominator == 0.0 {
        f64::INFINITY
    } else {
        numerator / denominator
    })
}

/// Same quantity as [`adv_ratio`] with every norm taken from a dense
/// eigensolve over all queries `(S, b)`.
pub fn adv_ratio_dense(g: &CubeFunction, q: &QueryFamily, tol: f64) -> Result<f64> {
    if !is_odd(g) {
        return Err(Error::NotOdd);
    }
    let m = xor_matrix(&lift_spectrum(g))?;
    let numerator = spectral_norm(&m, tol)?;
    let mut denominator = 0.0_f64;
    for (set, pattern) in queries(q) {
        denominator = denominator.max(query_norm_dense(&m, set, pattern, tol)?);
    }
    Ok(if denominator == 0.0 {
        f64::INFINITY
    } else {
        numerator / denominator
    })
}

/// Every query `(S, b)` with `S ∈ Q` and `b` a pattern on `S`.
pub fn queries(q: &QueryFamily) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for set in q.enumerate_sets() {
        let mut b = 0u32;
        loop {
            out.push((set, b));
            b = (b | !set).wrapping_add(1) & set;
            if b == 0 {
                break;
            }
        }
    }
    out
}

/// Largest query norm of `m` over the family: structured when `m` is an XOR
/// matrix, dense otherwise.
pub fn max_query_norm(m: &AdversaryMatrix, q: &QueryFamily, tol: f64) -> Result<f64> {
    if let Some(h) = m.xor_generator() {
        return Ok(q
            .enumerate_sets()
            .into_iter()
            .map(|s| query_norm_structured(&h, s))
            .fold(0.0_f64, f64::max));
    }
    let mut best = 0.0_f64;
    for (set, pattern) in queries(q) {
        best = best.max(query_norm_dense(m, set, pattern, tol)?);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// `min_q λ_min(diag(β) - Γ∘Δ_q)`.
    pub min_eig_margin: f64,
    /// `(Σ_{even x} β[x], Σ_{odd x} β[x])`.
    pub class_sums: (f64, f64),
    /// `Σ_{x,y} Γ[x,y]`.
    pub objective: f64,
    /// `‖M‖` of the (scaled) input.
    pub reference_norm: f64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.min_eig_margin >= -tol
            && (self.class_sums.0 - 0.5).abs() <= tol
            && (self.class_sums.1 - 0.5).abs() <= tol
    }
}

#[derive(Clone, Debug)]
pub struct AlternateSolution {
    pub beta: Vec<f64>,
    pub gamma: AdversaryMatrix,
    pub report: FeasibilityReport,
    /// Factor `M` was divided by before the construction (1 without scaling).
    pub scale: f64,
}

/// Builds `(β, Γ)` from a parity-feasible `M` with all query norms at most 1:
/// sign-fix the principal eigenvector, square it, rebalance the two parity
/// classes to mass 1/2 each, and set `Γ = B M B` with `B = diag(√β)`.
pub fn alternate_feasible(
    m: &AdversaryMatrix,
    q: &QueryFamily,
    tol: f64,
    autoscale: bool,
) -> Result<AlternateSolution> {
    if q.n() != m.n() {
        return Err(Error::Parameter("matrix and family dimensions differ".into()));
    }
    if !m.is_parity_feasible() {
        return Err(Error::Parameter("matrix is not parity-feasible".into()));
    }
    let top = max_query_norm(m, q, tol)?;
    let scale = if autoscale {
        if top == 0.0 {
            return Err(Error::Degenerate("every query norm vanishes".into()));
        }
        top
    } else {
        if top > 1.0 + tol {
            return Err(Error::Parameter(format!(
                "largest query norm {top} exceeds 1; rescale or enable autoscaling"
            )));
        }
        1.0
    };
    let m = m.scaled(1.0 / scale);

    let eig = eigen(&m, tol)?;
    let imax = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
        .0;
    let v = eig.eigenvectors.column(imax);
    let reference_norm = eig.eigenvalues.iter().fold(0.0_f64, |a, x| a.max(x.abs()));

    // Sign fix: conjugating by A = diag(sign v) keeps feasibility and makes v ≥ 0.
    let sign: Vec<f64> = v.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect();
    let beta_raw: Vec<f64> = v.iter().map(|x| x * x).collect();
    let even = |x: usize| x.count_ones().is_multiple_of(2);
    let s: f64 = (0..m.dim()).filter(|&x| even(x)).map(|x| beta_raw[x]).sum();
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Degenerate(format!(
            "even-class eigenvector mass s = {s} is not in (0, 1)"
        )));
    }
    let beta: Vec<f64> = (0..m.dim())
        .map(|x| {
            if even(x) {
                beta_raw[x] / (2.0 * s)
            } else {
                beta_raw[x] / (2.0 * (1.0 - s))
            }
        })
        .collect();
    let b: Vec<f64> = beta.iter().map(|x| x.sqrt()).collect();
    let gamma = AdversaryMatrix::new(
        m.n(),
        DMatrix::from_fn(m.dim(), m.dim(), |x, y| {
            (b[x] * (sign[x] * m.get(x, y) * sign[y])) * b[y]
        }),
    )?;

    let mut margin = f64::INFINITY;
    for (set, pattern) in queries(q) {
        let masked = gamma.hadamard(&delta_matrix(set, pattern, m.n())?)?;
        let slack = AdversaryMatrix {
            n: m.n(),
            entries: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(beta.clone()))
                - masked.entries,
        };
        let low = eigenvalues(&slack, tol)?[0];
        margin = margin.min(low);
    }
    let class_sums = (
        (0..m.dim()).filter(|&x| even(x)).map(|x| beta[x]).sum(),
        (0..m.dim()).filter(|&x| !even(x)).map(|x| beta[x]).sum(),
    );
    let objective = gamma.entries.sum();
    Ok(AlternateSolution {
        beta,
        gamma,
        report: FeasibilityReport {
            min_eig_margin: margin,
            class_sums,
            objective,
            reference_norm,
        },
        scale,
    })
}

/// `Γ'[x,y] = Γ[x,y] / √(β[x] β[y])` with `0/0 = 0`.
pub fn normalize_solution(beta: &[f64], gamma: &AdversaryMatrix) -> Result<AdversaryMatrix> {
    let len = gamma.dim();
    if beta.len() != len {
        return Err(Error::Parameter("beta length differs from matrix size".into()));
    }
    if let Some(x) = beta.iter().position(|&b| b < 0.0 || !b.is_finite()) {
        return Err(Error::Parameter(format!("beta[{x}] is negative or not finite")));
    }
    for x in (0..len).filter(|&x| beta[x] == 0.0) {
        if gamma.entries.row(x).iter().any(|&v| v != 0.0) {
            return Err(Error::Inconsistent(format!(
                "beta[{x}] = 0 but row {x} of gamma is nonzero"
            )));
        }
    }
    let root: Vec<f64> = beta.iter().map(|b| b.sqrt()).collect();
    AdversaryMatrix::new(
        gamma.n(),
        DMatrix::from_fn(len, len, |x, y| {
            if beta[x] == 0.0 || beta[y] == 0.0 {
                0.0
            } else {
                gamma.get(x, y) / (root[x] * root[y])
            }
        }),
    )
}

/// Sorted spectrum symmetric about 0 within `tol` (absolute).
pub fn spectrum_sign_symmetry(m: &AdversaryMatrix, tol: f64) -> Result<bool> {
    let ev = eigenvalues(m, tol)?;
    let len = ev.len();
    Ok((0..len).all(|i| (ev[i] + ev[len - 1 - i]).abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::chi;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-10;

    fn random_fn(n: usize, rng: &mut ChaCha8Rng) -> CubeFunction {
        CubeFunction::from_fn(n, |_| rng.gen_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn constant_xor_matrix() {
        let f = CubeFunction::from_fn(3, |_| 0.5).unwrap();
        let m = xor_matrix(&f).unwrap();
        assert!(m.entries().iter().all(|&v| v == 0.5));
        assert!((spectral_norm(&m, TOL).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn one_bit_xor_matrix() {
        let f = CubeFunction::new(1, vec![0.0, 3.0]).unwrap();
        let m = xor_matrix(&f).unwrap();
        assert_eq!(m.entries(), &DMatrix::from_row_slice(2, 2, &[0.0, 3.0, 3.0, 0.0]));
        assert!((spectral_norm(&m, TOL).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn xornorm_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_fn(5, &mut rng);
        let dense = spectral_norm(&xor_matrix(&f).unwrap(), TOL).unwrap();
        let spectral = 32.0 * fourier_transform(&f).max_abs();
        assert!((dense - spectral).abs() < 1e-9 * spectral.max(1.0));
    }

    #[test]
    fn delta_examples() {
        let d = delta_matrix(1, 0, 1).unwrap();
        assert_eq!(d.entries(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let d = delta_matrix(0b111, 0b101, 3).unwrap();
        for x in 0..8 {
            for y in 0..8 {
                let expect = ((x == 0b101) != (y == 0b101)) as u8 as f64;
                assert_eq!(d.get(x, y), expect);
            }
        }
        assert_eq!(d.hadamard(&d).unwrap(), d);
        assert!(delta_matrix(0, 0, 2).is_err());
        assert!(delta_matrix(0b01, 0b10, 2).is_err());
    }

    #[test]
    fn norm_examples() {
        let diag = AdversaryMatrix::new(
            2,
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -3.0, 2.0, 0.5])),
        )
        .unwrap();
        assert!((spectral_norm(&diag, TOL).unwrap() - 3.0).abs() < 1e-12);
        let v = [1.0, 2.0, 2.0];
        let border = AdversaryMatrix::new(
            2,
            DMatrix::from_fn(4, 4, |x, y| match (x, y) {
                (0, j) if j > 0 => v[j - 1],
                (i, 0) if i > 0 => v[i - 1],
                _ => 0.0,
            }),
        )
        .unwrap();
        assert!((spectral_norm(&border, TOL).unwrap() - 3.0).abs() < 1e-12);
        assert!(spectral_norm(&diag, 0.0).is_err());
    }

    #[test]
    fn rejects_asymmetric_and_large() {
        assert!(AdversaryMatrix::new(1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0])).is_err());
        assert!(xor_matrix(&CubeFunction::zeros(11).unwrap()).is_err());
    }

    #[test]
    fn hadamard_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            let f = random_fn(n, &mut rng);
            let fh = fourier_transform(&f);
            let len = 1usize << n;
            let h = DMatrix::from_fn(len, len, |x, s| chi(s as u32, x));
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                len,
                fh.coeffs().iter().map(|c| c * len as f64),
            ));
            let rebuilt = &h * d * h.transpose() / len as f64;
            let m = xor_matrix(&f).unwrap();
            assert!((rebuilt - m.entries()).amax() < 1e-10);
        }
    }

    #[test]
    fn structured_matches_dense_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=4 {
            let f = random_fn(n, &mut rng);
            let m = xor_matrix(&f).unwrap();
            for set in 1..=full_mask(n) {
                let s = query_norm_structured(&f, set);
                for (qs, b) in queries(&QueryFamily::custom(n, vec![set]).unwrap()) {
                    let d = query_norm_dense(&m, qs, b, TOL).unwrap();
                    assert!((s - d).abs() < 1e-8 * s.max(1.0), "n={n} S={set:b} b={b:b}");
                }
            }
        }
    }

    #[test]
    fn two_point_spectrum_full_set() {
        // f̂ = c on ∅ and -c on [n]: Var of f̂ over the full cube is 2c²/2^n.
        for n in 1..=6 {
            let c = 0.75;
            let g = build_two_point(n, c);
            let f = lift_spectrum(&g);
            let expect = (1u64 << n) as f64 * (2.0 * c * c / (1u64 << n) as f64).sqrt();
            assert!((query_norm_structured(&f, full_mask(n)) - expect).abs() < 1e-12);
        }
    }

    fn build_two_point(n: usize, c: f64) -> CubeFunction {
        let full = (1usize << n) - 1;
        CubeFunction::from_fn(n, |x| match x {
            0 => c,
            x if x == full => -c,
            _ => 0.0,
        })
        .unwrap()
    }

    #[test]
    fn queries_enumeration() {
        let q = QueryFamily::prefixes(3).unwrap();
        assert_eq!(queries(&q).len(), 2 + 4 + 8);
    }

    #[test]
    fn alternate_n1() {
        let m = AdversaryMatrix::new(1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let q = QueryFamily::singletons(1).unwrap();
        let sol = alternate_feasible(&m, &q, 1e-10, false).unwrap();
        assert!((sol.beta[0] - 0.5).abs() < 1e-15 && (sol.beta[1] - 0.5).abs() < 1e-15);
        assert!((sol.gamma.get(0, 1) - 0.5).abs() < 1e-15);
        assert!((sol.report.objective - 1.0).abs() < 1e-15);
        let back = normalize_solution(&sol.beta, &sol.gamma).unwrap();
        assert_eq!(back.entries(), m.entries());
    }

    #[test]
    fn normalize_zero_beta() {
        let gamma = AdversaryMatrix::new(
            1,
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.0]),
        )
        .unwrap();
        let out = normalize_solution(&[0.0, 1.0], &gamma).unwrap();
        assert!(out.entries().iter().all(|&v| v == 0.0));
        let bad = AdversaryMatrix::new(1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!(matches!(normalize_solution(&[0.0, 1.0], &bad), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn autoscale_required() {
        let m = AdversaryMatrix::new(1, DMatrix::from_row_slice(2, 2, &[0.0, 3.0, 3.0, 0.0])).unwrap();
        let q = QueryFamily::singletons(1).unwrap();
        assert!(alternate_feasible(&m, &q, 1e-10, false).is_err());
        let sol = alternate_feasible(&m, &q, 1e-10, true).unwrap();
        assert_eq!(sol.scale, 3.0);
        assert!(sol.report.is_feasible(1e-10));
    }

    #[test]
    fn sign_symmetry_examples() {
        let m = AdversaryMatrix::new(1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!(spectrum_sign_symmetry(&m, 1e-12).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = DMatrix::from_fn(8, 8, |_, _| rng.gen_range(0.0..1.0));
        let sym = AdversaryMatrix::new(3, &r + r.transpose()).unwrap();
        assert!(!spectrum_sign_symmetry(&sym, 1e-8).unwrap());
    }

    #[test]
    fn csv_export() {
        let m = AdversaryMatrix::new(1, DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0])).unwrap();
        assert_eq!(m.to_csv(), "n=1\n0,0.5\n0.5,0\n");
    }
}
