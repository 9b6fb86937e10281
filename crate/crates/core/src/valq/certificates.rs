//! Constructive upper-bound certificates: each procedure exhibits a valid
//! subcube whose variance is provably large, and checks the bound it claims.

use serde::Serialize;

use crate::cube::{is_odd, moments, restrict, CubeFunction};
use crate::error::{Error, Result};
use crate::family::{full_mask, Subcube};

/// Relative slack on the asserted inequalities.
const SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RichSubcube {
    pub subcube: Subcube,
    pub variance: f64,
    /// Smallest `|degree-1 coefficient|` of the restriction over its free
    /// coordinates.
    pub min_degree1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingletonCertificate {
    /// Index of the edge endpoint `z`.
    pub point: usize,
    /// 1-based coordinate flipped along the edge.
    pub coordinate: usize,
    /// `f(z) - f(z ⊕ e_i)`.
    pub drop: f64,
    /// The singleton subcube through the edge.
    pub subcube: Subcube,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrefixCertificate {
    /// `C_{i+1}`: coordinates `1..=i` free, the rest fixed to the maximizer.
    pub subcube: Subcube,
    /// 1-based coordinate `i`.
    pub coordinate: usize,
    /// Degree-1 coefficient of `f` restricted to `C_{i+1}` at `i`.
    pub coefficient: f64,
}

/// Follows the two-case induction: while some live coordinate has a small
/// conditional-mean gap at the maximizer, fix it there and recenter.
pub fn find_rich_subcube(f: &CubeFunction) -> Result<RichSubcube> {
    if f.is_zero() {
        return Err(Error::Degenerate("the zero function has no rich subcube".into()));
    }
    let big_m = f.sup_norm();
    let mean = moments(f).mean;
    if mean.abs() > 1e-12 * big_m.max(1.0) {
        return Err(Error::Unbalanced { mean });
    }
    let n = f.n();

    let mut live: Vec<usize> = (0..n).collect();
    let mut fixing = 0u32;
    let mut h = f.values().to_vec();
    'outer: while live.len() > 1 {
        let l = live.len();
        let star = argmax_abs(&h);
        let m_cur = h[star].abs();
        for i in 0..l {
            let (mu_star, mu_other) = conditional_means(&h, i, star >> i & 1);
            if (mu_star - mu_other).abs() <= m_cur / l as f64 {
                let side = star >> i & 1;
                fixing |= (side as u32) << live[i];
                h = fix_coordinate(&h, i, side)
                    .into_iter()
                    .map(|v| v - mu_star)
                    .collect();
                live.remove(i);
                continue 'outer;
            }
        }
        break;
    }

    let free = live.iter().fold(0u32, |m, &j| m | 1 << j);
    let subcube = Subcube::new(n, free, fixing)?;
    let g = restrict(f, &subcube)?;
    let variance = moments(&g).variance;
    let min_degree1 = (0..g.n())
        .map(|i| g.degree_one(i).abs())
        .fold(f64::INFINITY, f64::min);
    let nf = n as f64;
    if variance < big_m * big_m / (4.0 * nf) * (1.0 - SLACK)
        || min_degree1 < big_m / (2.0 * nf) * (1.0 - SLACK)
    {
        return Err(Error::VerificationFailed(format!(
            "rich subcube {subcube}: variance {variance:e}, min degree-1 {min_degree1:e}"
        )));
    }
    Ok(RichSubcube {
        subcube,
        variance,
        min_degree1,
    })
}

fn argmax_abs(h: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in h.iter().enumerate() {
        if v.abs() > h[best].abs() {
            best = i;
        }
    }
    best
}

/// `(E[h | bit i = side], E[h | bit i ≠ side])`.
fn conditional_means(h: &[f64], i: usize, side: usize) -> (f64, f64) {
    let (mut same, mut other) = (0.0, 0.0);
    for (x, v) in h.iter().enumerate() {
        if x >> i & 1 == side {
            same += v;
        } else {
            other += v;
        }
    }
    let half = (h.len() / 2) as f64;
    (same / half, other / half)
}

/// Restriction of a dense vector to `bit i = side`, remaining bits compacted.
fn fix_coordinate(h: &[f64], i: usize, side: usize) -> Vec<f64> {
    let low = (1usize << i) - 1;
    (0..h.len() / 2)
        .map(|y| h[(y & low) | side << i | (y & !low) << 1])
        .collect()
}

/// Shrinks a rich subcube to at most `k` free coordinates: keeps the lowest
/// `k` free coordinates `T` and fixes the rest to maximize the degree-1
/// Fourier mass on `T`.
pub fn shrink_to_k(f: &CubeFunction, rich: &RichSubcube, k: usize) -> Result<Subcube> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if rich.subcube.n() != f.n() {
        return Err(Error::InvalidSubcube("subcube dimension differs from f".into()));
    }
    let mean = moments(f).mean;
    if mean.abs() > 1e-12 * f.sup_norm().max(1.0) {
        return Err(Error::Unbalanced { mean });
    }
    let s = rich.subcube.free();
    if s.count_ones() as usize <= k {
        return Ok(rich.subcube);
    }
    let mut t = 0u32;
    for j in 0..32 {
        if t.count_ones() as usize == k {
            break;
        }
        if s >> j & 1 == 1 {
            t |= 1 << j;
        }
    }
    let rest = s & !t;
    if rest.count_ones() > 20 {
        return Err(Error::Capability {
            what: format!("{} coordinates to enumerate", rest.count_ones()),
            limit: 20,
        });
    }

    let n = f.n();
    let mut best: Option<(f64, Subcube)> = None;
    let mut x = 0u32;
    loop {
        let c = Subcube::new(n, t, rich.subcube.fixing() | x)?;
        let g = restrict(f, &c)?;
        let mass: f64 = (0..k).map(|i| g.degree_one(i).powi(2)).sum();
        if best.is_none_or(|(b, _)| mass > b) {
            best = Some((mass, c));
        }
        x = (x | !rest).wrapping_add(1) & rest;
        if x == 0 {
            break;
        }
    }
    let (_, c) = best.expect("at least one fixing");

    let big_m = f.sup_norm();
    let var = moments(&restrict(f, &c)?).variance;
    let bound = big_m * big_m * k as f64 / (4.0 * (n * n) as f64);
    if var < bound * (1.0 - SLACK) {
        return Err(Error::VerificationFailed(format!(
            "shrunk subcube {c}: variance {var:e} below {bound:e}"
        )));
    }
    Ok(c)
}

fn check_odd_nonzero(f: &CubeFunction) -> Result<()> {
    if !is_odd(f) {
        return Err(Error::NotOdd);
    }
    if f.is_zero() {
        return Err(Error::Degenerate("the zero function has no certificate".into()));
    }
    Ok(())
}

/// Walks from a maximizer `x*` to `-x*` flipping coordinates `1..=n` in
/// order and returns the edge with the largest drop.
pub fn singleton_certificate(f: &CubeFunction) -> Result<SingletonCertificate> {
    check_odd_nonzero(f)?;
    let n = f.n();
    let mut z = f.argmax();
    let big_m = f.get(z);
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        let next = z ^ 1 << i;
        let drop = f.get(z) - f.get(next);
        if best.is_none_or(|(d, _, _)| drop > d) {
            best = Some((drop, z, i));
        }
        z = next;
    }
    let (drop, point, i) = best.expect("n >= 1");
    if drop < 2.0 * big_m / n as f64 * (1.0 - SLACK) {
        return Err(Error::VerificationFailed(format!(
            "largest drop {drop:e} below 2M/n"
        )));
    }
    let bit = 1u32 << i;
    Ok(SingletonCertificate {
        point,
        coordinate: i + 1,
        drop,
        subcube: Subcube::new(n, bit, point as u32 & !bit & full_mask(n))?,
    })
}

/// Builds the chain of suffix-fixed subcubes through a maximizer and returns
/// the one whose degree-1 coefficient at the jump coordinate is at least
/// `M/n`.
pub fn prefix_certificate(f: &CubeFunction) -> Result<PrefixCertificate> {
    check_odd_nonzero(f)?;
    let n = f.n();
    let star = f.argmax() as u32;
    let big_m = f.get(star as usize);
    // C_i leaves coordinates 1..i-1 free and fixes the rest to x*.
    let free_of = |i: usize| full_mask(i - 1);
    let means: Vec<f64> = (1..=n + 1)
        .map(|i| {
            let fixed = full_mask(n) & !free_of(i);
            let (sum, count) = f
                .values()
                .iter()
                .enumerate()
                .filter(|(x, _)| *x as u32 & fixed == star & fixed)
                .fold((0.0, 0usize), |(s, c), (_, v)| (s + v, c + 1));
            sum / count as f64
        })
        .collect();
    let mut best_i = 1;
    for i in 2..=n {
        if means[i] - means[i - 1] < means[best_i] - means[best_i - 1] {
            best_i = i;
        }
    }
    let free = free_of(best_i + 1);
    let subcube = Subcube::new(n, free, star & !free & full_mask(n))?;
    let coefficient = restrict(f, &subcube)?.degree_one(best_i - 1);
    if coefficient.abs() < big_m / n as f64 * (1.0 - SLACK) {
        return Err(Error::VerificationFailed(format!(
            "prefix coefficient {coefficient:e} below M/n"
        )));
    }
    Ok(PrefixCertificate {
        subcube,
        coordinate: best_i,
        coefficient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{build_witness, WitnessKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_odd(n: usize, rng: &mut ChaCha8Rng) -> CubeFunction {
        let full = (1usize << n) - 1;
        let mut v = vec![0.0; 1 << n];
        for x in 0..1usize << (n - 1) {
            let a: f64 = rng.gen_range(-1.0..1.0);
            v[x] = a;
            v[x ^ full] = -a;
        }
        CubeFunction::new(n, v).unwrap()
    }

    #[test]
    fn base_case() {
        let f = CubeFunction::new(1, vec![3.0, -3.0]).unwrap();
        let r = find_rich_subcube(&f).unwrap();
        assert_eq!(r.subcube.free(), 1);
        assert_eq!(r.variance, 9.0);
        assert_eq!(r.min_degree1, 3.0);
    }

    #[test]
    fn parity_rich() {
        for n in 1..=8 {
            let f = CubeFunction::character(n, full_mask(n)).unwrap();
            let r = find_rich_subcube(&f).unwrap();
            assert!(r.variance >= 1.0 / (4.0 * n as f64));
        }
    }

    #[test]
    fn unbalanced_rejected() {
        let f = CubeFunction::new(1, vec![1.0, 0.0]).unwrap();
        assert!(matches!(find_rich_subcube(&f), Err(Error::Unbalanced { .. })));
        assert!(matches!(
            find_rich_subcube(&CubeFunction::zeros(2).unwrap()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn fix_coordinate_layout() {
        let h: Vec<f64> = (0..8).map(|x| x as f64).collect();
        assert_eq!(fix_coordinate(&h, 1, 1), vec![2.0, 3.0, 6.0, 7.0]);
        assert_eq!(fix_coordinate(&h, 0, 0), vec![0.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn shrink_hamming() {
        let f = build_witness(WitnessKind::Hamming, 6).unwrap();
        let rich = find_rich_subcube(&f).unwrap();
        let c = shrink_to_k(&f, &rich, 2).unwrap();
        assert!(c.dim() <= 2);
        let m = f.sup_norm();
        assert!(moments(&restrict(&f, &c).unwrap()).variance >= m * m / 72.0);
        let same = shrink_to_k(&f, &rich, rich.subcube.dim()).unwrap();
        assert_eq!(same, rich.subcube);
    }

    #[test]
    fn shrink_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let f = random_odd(8, &mut rng);
            let rich = find_rich_subcube(&f).unwrap();
            shrink_to_k(&f, &rich, 3).unwrap();
        }
    }

    #[test]
    fn singleton_edges() {
        let f = CubeFunction::new(1, vec![2.0, -2.0]).unwrap();
        let c = singleton_certificate(&f).unwrap();
        assert_eq!((c.point, c.coordinate, c.drop), (0, 1, 4.0));
        let p = CubeFunction::character(5, 31).unwrap();
        assert_eq!(singleton_certificate(&p).unwrap().drop, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..100 {
            let f = random_odd(1 + i % 10, &mut rng);
            let c = singleton_certificate(&f).unwrap();
            assert_eq!(c.drop, f.get(c.point) - f.get(c.point ^ 1 << (c.coordinate - 1)));
        }
    }

    #[test]
    fn prefix_chain() {
        let f = build_witness(WitnessKind::PrefixDecisionList, 4).unwrap();
        let c = prefix_certificate(&f).unwrap();
        assert!(c.coefficient.abs() >= 1.0);
        let p = CubeFunction::character(5, 31).unwrap();
        assert!(prefix_certificate(&p).unwrap().coefficient.abs() >= 0.2);
        assert!(matches!(
            prefix_certificate(&CubeFunction::zeros(3).unwrap()),
            Err(Error::Degenerate(_))
        ));
    }
}
