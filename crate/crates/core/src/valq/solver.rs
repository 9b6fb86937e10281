//! Exact `val_Q` by convex optimization.
//!
//! `val_Q` is scale invariant, so it equals the largest `f(x*)` over odd `f`
//! whose every subcube variance is at most 1. Odd functions are parametrized
//! by their values `u` on indices below `2^{n-1}`; `f(x ⊕ 1^n) = -u_x`. Each
//! subcube variance is then a PSD quadratic form `uᵀ(D - w wᵀ)u`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{denominator, theorem_upper_bound, Bracket, SolverStats, ValqReport, ValqValue};
use crate::cube::{bit_positions, deposit, CubeFunction};
use crate::error::{Error, Result};
use crate::family::QueryFamily;

pub const MAX_EXACT_VARS: usize = 8;
const MAX_ITERATIONS: usize = 10_000;
const KERNEL_THRESHOLD: f64 = 1e-10;
const BARRIER_GROWTH: f64 = 10.0;
const CENTERING_TOL: f64 = 1e-9;
const ARMIJO: f64 = 0.25;

/// One subcube variance form, stored on its support.
struct Constraint {
    vars: Vec<usize>,
    d: Vec<f64>,
    w: Vec<f64>,
}

impl Constraint {
    /// `(uᵀQu, w·u)`.
    fn quad(&self, u: &[f64]) -> (f64, f64) {
        let mut dd = 0.0;
        let mut wu = 0.0;
        for ((&v, &d), &w) in self.vars.iter().zip(&self.d).zip(&self.w) {
            dd += d * u[v] * u[v];
            wu += w * u[v];
        }
        (dd - wu * wu, wu)
    }

    /// `Qu` restricted to the support.
    fn apply(&self, u: &[f64], wu: f64) -> Vec<f64> {
        self.vars
            .iter()
            .zip(&self.d)
            .zip(&self.w)
            .map(|((&v, &d), &w)| d * u[v] - w * wu)
            .collect()
    }
}

fn build_constraints(q: &QueryFamily) -> Vec<Constraint> {
    let n = q.n();
    let half = 1usize << (n - 1);
    let full = (1usize << n) - 1;
    let mut dacc = vec![0.0; half];
    let mut wacc = vec![0.0; half];
    let mut touched = Vec::new();
    let mut out = Vec::new();
    for c in q.enumerate_subcubes() {
        let positions = bit_positions(c.free());
        let m = 1usize << positions.len();
        let inv = 1.0 / m as f64;
        for idx in 0..m {
            let x = c.fixing() as usize | deposit(idx, &positions);
            let (var, sign) = if x < half { (x, 1.0) } else { (x ^ full, -1.0) };
            if dacc[var] == 0.0 {
                touched.push(var);
            }
            dacc[var] += inv;
            wacc[var] += sign * inv;
        }
        touched.sort_unstable();
        let mut con = Constraint {
            vars: Vec::with_capacity(touched.len()),
            d: Vec::with_capacity(touched.len()),
            w: Vec::with_capacity(touched.len()),
        };
        for &v in &touched {
            con.vars.push(v);
            con.d.push(dacc[v]);
            con.w.push(wacc[v]);
            dacc[v] = 0.0;
            wacc[v] = 0.0;
        }
        touched.clear();
        out.push(con);
    }
    out
}

fn lift(u: &[f64], n: usize) -> Result<CubeFunction> {
    let half = 1usize << (n - 1);
    let full = (1usize << n) - 1;
    CubeFunction::from_fn(n, |x| if x < half { u[x] } else { -u[x ^ full] })
}

fn max_quad(cons: &[Constraint], u: &[f64]) -> f64 {
    cons.iter().map(|c| c.quad(u).0).fold(f64::NEG_INFINITY, f64::max)
}

/// Exact `val_Q` with the anchor at the all-ones input.
pub fn exact_valq(n: usize, q: &QueryFamily, tol: f64) -> Result<ValqReport> {
    exact_valq_anchored(n, q, tol, 0)
}

/// Maximizes `f(anchor)` over odd `f` with all subcube variances at most 1.
pub fn exact_valq_anchored(
    n: usize,
    q: &QueryFamily,
    tol: f64,
    anchor: usize,
) -> Result<ValqReport> {
    if n == 0 || n > MAX_EXACT_VARS {
        return Err(Error::Capability {
            what: format!("exact solve with n={n}"),
            limit: MAX_EXACT_VARS,
        });
    }
    if q.n() != n {
        return Err(Error::Parameter(format!(
            "family has n={} but n={n} was requested",
            q.n()
        )));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Parameter(format!("tol must lie in (0, 1), got {tol}")));
    }
    let half = 1usize << (n - 1);
    let full = (1usize << n) - 1;
    if anchor > full {
        return Err(Error::Parameter(format!("anchor {anchor} exceeds 2^n - 1")));
    }
    let (avar, sigma) = if anchor < half {
        (anchor, 1.0)
    } else {
        (anchor ^ full, -1.0)
    };

    let cons = build_constraints(q);
    if let Some(kernel) = common_kernel(&cons, half)? {
        return unbounded_report(n, q, &cons, &kernel);
    }

    let outcome = match barrier(&cons, half, avar, sigma, tol)? {
        Some(ok) => ok,
        None => subgradient(&cons, half, avar, sigma)?,
    };
    let residual = (max_quad(&cons, &outcome.u) - 1.0).max(0.0);
    let witness = lift(&outcome.u, n)?;
    let value = sigma * outcome.u[avar];
    let (_, argmax) = denominator(&witness, q)?;
    let bracket = if outcome.method == "barrier" {
        Bracket {
            lower: ValqValue::Finite(value * (1.0 - tol)),
            upper: ValqValue::Finite(value * (1.0 + tol)),
        }
    } else {
        // A feasible point certifies only the lower end.
        Bracket {
            lower: ValqValue::Finite(value),
            upper: theorem_upper_bound(q),
        }
    };
    Ok(ValqReport {
        value: ValqValue::Finite(value),
        bracket,
        witness,
        argmax_subcube: argmax,
        solver_stats: Some(SolverStats {
            method: outcome.method.into(),
            iterations: outcome.iterations,
            residual,
            gap: outcome.gap,
        }),
    })
}

/// A nonzero vector annihilated by every variance form, if one exists.
///
/// Such a vector is an odd function with zero variance on every subcube; its
/// shifts `x ↦ f(x ⊕ y)` are too, so the program is unbounded at every anchor.
fn common_kernel(cons: &[Constraint], dim: usize) -> Result<Option<Vec<f64>>> {
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for c in cons {
        for (i, &vi) in c.vars.iter().enumerate() {
            g[(vi, vi)] += c.d[i];
            for (j, &vj) in c.vars.iter().enumerate() {
                g[(vi, vj)] -= c.w[i] * c.w[j];
            }
        }
    }
    let eig = SymmetricEigen::try_new(g, 1e-14, MAX_ITERATIONS)
        .ok_or(Error::Eigensolver { dim })?;
    let lmax = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let (imin, lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    if lmin > KERNEL_THRESHOLD * lmax {
        return Ok(None);
    }
    Ok(Some(eig.eigenvectors.column(imin).iter().copied().collect()))
}

fn unbounded_report(
    n: usize,
    q: &QueryFamily,
    cons: &[Constraint],
    kernel: &[f64],
) -> Result<ValqReport> {
    let mut witness = lift(kernel, n)?;
    let peak = witness.get(witness.argmax_abs());
    witness = witness.scaled(1.0 / peak)?;
    let (_, argmax) = denominator(&witness, q)?;
    let residual = max_quad(cons, &kernel.iter().map(|v| v / peak).collect::<Vec<_>>()).max(0.0);
    Ok(ValqReport {
        value: ValqValue::Unbounded,
        bracket: Bracket {
            lower: ValqValue::Unbounded,
            upper: ValqValue::Unbounded,
        },
        witness,
        argmax_subcube: argmax,
        solver_stats: Some(SolverStats {
            method: "kernel".into(),
            iterations: 0,
            residual,
            gap: 0.0,
        }),
    })
}

struct Outcome {
    u: Vec<f64>,
    iterations: usize,
    gap: f64,
    method: &'static str,
}

/// Barrier objective `-tσu_a - Σ log(1 - q_c(u))`, or `None` outside the domain.
fn barrier_value(cons: &[Constraint], u: &[f64], t: f64, avar: usize, sigma: f64) -> Option<f64> {
    let mut acc = -t * sigma * u[avar];
    for c in cons {
        let s = 1.0 - c.quad(u).0;
        if s <= 0.0 {
            return None;
        }
        acc -= s.ln();
    }
    Some(acc)
}

/// Log-barrier interior point with damped Newton centering. Returns `None`
/// when Newton breaks down (indefinite Hessian or stalled line search) so the
/// caller can fall back.
fn barrier(
    cons: &[Constraint],
    dim: usize,
    avar: usize,
    sigma: f64,
    tol: f64,
) -> Result<Option<Outcome>> {
    let m = cons.len() as f64;
    let mut u = vec![0.0; dim];
    let mut t = 1.0;
    let mut iterations = 0;
    loop {
        // Centering.
        loop {
            if iterations >= MAX_ITERATIONS {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: (max_quad(cons, &u) - 1.0).max(0.0),
                    gap: m / t,
                });
            }
            iterations += 1;
            let mut grad = DVector::<f64>::zeros(dim);
            let mut hess = DMatrix::<f64>::zeros(dim, dim);
            grad[avar] -= t * sigma;
            for c in cons {
                let (qv, wu) = c.quad(&u);
                let s = 1.0 - qv;
                let qu = c.apply(&u, wu);
                let (a, b) = (2.0 / s, 4.0 / (s * s));
                for (i, &vi) in c.vars.iter().enumerate() {
                    grad[vi] += a * qu[i];
                    hess[(vi, vi)] += a * c.d[i];
                    for (j, &vj) in c.vars.iter().enumerate() {
                        hess[(vi, vj)] += b * qu[i] * qu[j] - a * c.w[i] * c.w[j];
                    }
                }
            }
            let Some(chol) = hess.cholesky() else {
                return Ok(None);
            };
            let step = chol.solve(&(-&grad));
            let slope = grad.dot(&step);
            let decrement = -slope;
            let phi = barrier_value(cons, &u, t, avar, sigma).expect("iterate is interior");
            // The decrement estimates φ - φ*; compare it with the precision φ carries.
            let floor = CENTERING_TOL * phi.abs().max(1.0);
            if decrement / 2.0 <= floor {
                break;
            }
            let mut alpha = 1.0;
            let accepted = loop {
                let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
                if let Some(p) = barrier_value(cons, &trial, t, avar, sigma) {
                    if p <= phi + ARMIJO * alpha * slope {
                        break Some(trial);
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-14 {
                    break None;
                }
            };
            match accepted {
                Some(next) => u = next,
                // Rounding in the barrier value near the center.
                None if decrement / 2.0 <= 1e3 * floor => break,
                None => return Ok(None),
            }
        }
        let obj = sigma * u[avar];
        if obj > 0.0 && m / t <= 0.5 * tol * obj {
            return Ok(Some(Outcome {
                u,
                iterations,
                gap: m / t,
                method: "barrier",
            }));
        }
        t *= BARRIER_GROWTH;
    }
}

/// Projected subgradient on `min max_c q_c(u)` subject to `σu_a = 1`; the
/// optimum `F*` gives `val = 1/√F*`.
fn subgradient(cons: &[Constraint], dim: usize, avar: usize, sigma: f64) -> Result<Outcome> {
    let mut u = vec![0.0; dim];
    u[avar] = sigma;
    let mut best_u = u.clone();
    let mut best_f = max_quad(cons, &u);
    for k in 0..MAX_ITERATIONS {
        let (ci, _) = cons
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.quad(&u).0))
            .fold((0, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
        let c = &cons[ci];
        let (_, wu) = c.quad(&u);
        let qu = c.apply(&u, wu);
        let mut g = vec![0.0; dim];
        for (i, &v) in c.vars.iter().enumerate() {
            g[v] += 2.0 * qu[i];
        }
        g[avar] = 0.0;
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let step = 0.1 / ((k + 1) as f64).sqrt() / norm;
        for (x, gx) in u.iter_mut().zip(&g) {
            *x -= step * gx;
        }
        let f = max_quad(cons, &u);
        if f < best_f {
            best_f = f;
            best_u.clone_from(&u);
        }
    }
    if !(best_f > 0.0 && best_f.is_finite()) {
        return Err(Error::NonConvergence {
            iterations: MAX_ITERATIONS,
            residual: best_f,
            gap: f64::NAN,
        });
    }
    let scale = 1.0 / best_f.sqrt();
    Ok(Outcome {
        u: best_u.iter().map(|x| x * scale).collect(),
        iterations: MAX_ITERATIONS,
        gap: f64::NAN,
        method: "subgradient",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{moments, restrict};

    #[test]
    fn constraint_forms_match_variances() {
        let q = QueryFamily::bounded(4, 2).unwrap();
        let cons = build_constraints(&q);
        let u: Vec<f64> = (0..8).map(|i| (i as f64 * 0.37).sin()).collect();
        let f = lift(&u, 4).unwrap();
        for (c, sub) in cons.iter().zip(q.enumerate_subcubes()) {
            let var = moments(&restrict(&f, &sub).unwrap()).variance;
            assert!((c.quad(&u).0 - var).abs() < 1e-13);
        }
    }

    #[test]
    fn full_set_n3() {
        let r = exact_valq(3, &QueryFamily::full_set_only(3).unwrap(), 1e-3).unwrap();
        let v = r.value.finite().unwrap();
        assert!((v - 2.0).abs() < 2e-3, "{v}");
        assert!(crate::cube::is_odd(&r.witness));
    }

    #[test]
    fn recession_direction() {
        let q = QueryFamily::custom(2, vec![0b01]).unwrap();
        let r = exact_valq(2, &q, 1e-4).unwrap();
        assert_eq!(r.value, ValqValue::Unbounded);
        assert!(r.witness.sup_norm() > 0.0);
        assert!(crate::cube::is_odd(&r.witness));
    }

    #[test]
    fn bounded_n4_bracket() {
        let r = exact_valq(4, &QueryFamily::bounded(4, 4).unwrap(), 1e-4).unwrap();
        let v = r.value.finite().unwrap();
        assert!((2.0 - 1e-6..=4.0 + 1e-6).contains(&v), "{v}");
    }

    #[test]
    fn capability_and_parameters() {
        let q = QueryFamily::full_set_only(9).unwrap();
        assert!(matches!(exact_valq(9, &q, 1e-4), Err(Error::Capability { .. })));
        let q = QueryFamily::full_set_only(3).unwrap();
        assert!(exact_valq(3, &q, 0.0).is_err());
        assert!(exact_valq(4, &q, 1e-4).is_err());
    }

    #[test]
    fn subgradient_is_feasible_lower_bound() {
        let q = QueryFamily::full_set_only(3).unwrap();
        let cons = build_constraints(&q);
        let out = subgradient(&cons, 4, 0, 1.0).unwrap();
        assert!(max_quad(&cons, &out.u) <= 1.0 + 1e-12);
        assert!(out.u[0] <= 2.0 + 1e-9);
    }
}
