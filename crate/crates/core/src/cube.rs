//! Dense real functions on the Boolean hypercube `{-1,1}^n`.
//!
//! An input `x` is stored at the index whose bit `j` is set exactly when
//! coordinate `j+1` equals `-1`; index 0 is the all-`+1` string. Under this
//! encoding `x ⊕ y` is integer XOR, the Hamming weight `|x|` is a popcount,
//! and the character `χ_S(x)` is the parity of `popcount(S & x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Subcube;

/// Largest supported number of variables for vector-valued functions.
pub const MAX_VARS: usize = 20;

/// A real-valued function on `{-1,1}^n`, stored densely in index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCubeFunction")]
pub struct CubeFunction {
    n: usize,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawCubeFunction {
    n: usize,
    values: Vec<f64>,
}

impl TryFrom<RawCubeFunction> for CubeFunction {
    type Error = Error;

    fn try_from(raw: RawCubeFunction) -> Result<Self> {
        CubeFunction::new(raw.n, raw.values)
    }
}

impl CubeFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::InvalidFunction(format!(
                "variable count {n} outside 1..={MAX_VARS}"
            )));
        }
        if values.len() != 1 << n {
            return Err(Error::InvalidFunction(format!(
                "expected {} values for n={n}, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!(
                "value at index {i} is not finite"
            )));
        }
        Ok(Self { n, values })
    }

    /// Builds a function by evaluating `f` at every index.
    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::InvalidFunction(format!(
                "variable count {n} outside 1..={MAX_VARS}"
            )));
        }
        Self::new(n, (0..1usize << n).map(f).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_fn(n, |_| 0.0)
    }

    /// The parity character `χ_S` for the set mask `set`.
    pub fn character(n: usize, set: u32) -> Result<Self> {
        Self::from_fn(n, |x| chi(set, x))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Mask with all `n` coordinate bits set; `x ^ full_mask()` is `-x`.
    pub fn full_mask(&self) -> usize {
        (1 << self.n) - 1
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// First index attaining `max |f|`.
    pub fn argmax_abs(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if v.abs() > self.values[best].abs() {
                best = i;
            }
        }
        best
    }

    /// First index attaining `max f`.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.values.iter().map(|v| v * factor).collect())
    }

    /// The function `x ↦ f(x ⊕ y)`.
    pub fn shifted(&self, y: usize) -> Self {
        Self {
            n: self.n,
            values: (0..self.len()).map(|x| self.values[x ^ y]).collect(),
        }
    }

    /// Fourier coefficient `f̂({var+1}) = E[f(x) x_{var+1}]` for a 0-based coordinate.
    pub fn degree_one(&self, var: usize) -> f64 {
        let bit = 1usize << var;
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(x, v)| if x & bit == 0 { *v } else { -*v })
            .sum();
        sum / self.len() as f64
    }
}

/// Fourier coefficients indexed by set mask (bit `j` set ⟺ `j+1 ∈ S`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSpectrum {
    n: usize,
    coeffs: Vec<f64>,
}

impl FourierSpectrum {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        // Same shape rules as a cube function.
        let checked = CubeFunction::new(n, coeffs)?;
        Ok(Self {
            n,
            coeffs: checked.values,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, set: usize) -> f64 {
        self.coeffs[set]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Reads the coefficient vector as a function on the cube, identifying a
    /// set with its characteristic string.
    pub fn as_function(&self) -> CubeFunction {
        CubeFunction {
            n: self.n,
            values: self.coeffs.clone(),
        }
    }

    /// Reads a function's value table as a spectrum.
    pub fn from_function(f: &CubeFunction) -> Self {
        Self {
            n: f.n,
            coeffs: f.values.clone(),
        }
    }

    /// `true` iff `f̂(S) = -f̂(S̄)` for every `S`, within `tol`.
    pub fn is_complement_antisymmetric(&self, tol: f64) -> bool {
        let full = (1usize << self.n) - 1;
        self.coeffs
            .iter()
            .enumerate()
            .all(|(s, c)| (c + self.coeffs[s ^ full]).abs() <= tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub sup_norm: f64,
}

/// `χ_S(x)` under the index encoding.
#[inline]
pub fn chi(set: u32, x: usize) -> f64 {
    if (set as usize & x).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// In-place unnormalized Walsh–Hadamard transform. `data.len()` must be a power of two.
pub fn fwht(data: &mut [f64]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let a = data[i];
                let b = data[i + h];
                data[i] = a + b;
                data[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

pub fn fourier_transform(f: &CubeFunction) -> FourierSpectrum {
    let mut coeffs = f.values.clone();
    fwht(&mut coeffs);
    let scale = 1.0 / f.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    FourierSpectrum { n: f.n, coeffs }
}

pub fn inverse_transform(s: &FourierSpectrum) -> CubeFunction {
    let mut values = s.coeffs.clone();
    fwht(&mut values);
    CubeFunction { n: s.n, values }
}

/// Scatters the low bits of `idx` onto the bit positions in `positions`.
#[inline]
pub(crate) fn deposit(idx: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .filter(|(j, _)| idx >> j & 1 == 1)
        .fold(0, |acc, (_, &p)| acc | 1 << p)
}

pub(crate) fn bit_positions(mask: u32) -> Vec<usize> {
    (0..32).filter(|j| mask >> j & 1 == 1).collect()
}

/// Restriction of `f` to the subcube `c`; free coordinates are reindexed in
/// ascending original order.
pub fn restrict(f: &CubeFunction, c: &Subcube) -> Result<CubeFunction> {
    c.validate()?;
    if c.n() != f.n {
        return Err(Error::InvalidSubcube(format!(
            "subcube has n={} but function has n={}",
            c.n(),
            f.n
        )));
    }
    if c.free() == 0 {
        return Err(Error::InvalidSubcube(
            "subcube has no free coordinates".into(),
        ));
    }
    let positions = bit_positions(c.free());
    let base = c.fixing() as usize;
    let values = (0..1usize << positions.len())
        .map(|idx| f.values[base | deposit(idx, &positions)])
        .collect();
    CubeFunction::new(positions.len(), values)
}

/// Population variance of `values`, exactly zero when all entries coincide.
pub(crate) fn variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mut count = 0usize;
    let mut sum = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.clone() {
        count += 1;
        sum += v;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if count == 0 || lo == hi {
        return 0.0;
    }
    let mean = sum / count as f64;
    values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64
}

pub fn moments(f: &CubeFunction) -> Moments {
    let mean = f.values.iter().sum::<f64>() / f.len() as f64;
    Moments {
        mean,
        variance: variance(f.values.iter().copied()),
        sup_norm: f.sup_norm(),
    }
}

/// Exact oddness: `f(x) = -f(-x)` for every `x`.
pub fn is_odd(f: &CubeFunction) -> bool {
    let full = f.full_mask();
    f.values
        .iter()
        .enumerate()
        .all(|(i, &v)| v == -f.values[i ^ full])
}

/// `true` iff `f` vanishes on every even-weight input.
pub fn even_support_zero(f: &CubeFunction) -> bool {
    f.values
        .iter()
        .enumerate()
        .all(|(i, &v)| i.count_ones() % 2 == 1 || v == 0.0)
}

/// Variances of every restriction of `values` whose free set is `set`, in
/// ascending order of the fixing mask.
///
/// Returns `(fixing, variance)` pairs. Work is `O(2^n)` per call.
pub(crate) fn subcube_variances(values: &[f64], n: usize, set: u32) -> Vec<(u32, f64)> {
    let len = 1usize << n;
    let full = (len - 1) as u32;
    let fixed = full & !set;
    let m = 1usize << set.count_ones();

    let mut sum = vec![0.0; len];
    let mut lo = vec![f64::INFINITY; len];
    let mut hi = vec![f64::NEG_INFINITY; len];
    for (x, &v) in values.iter().enumerate() {
        let b = x & fixed as usize;
        sum[b] += v;
        lo[b] = lo[b].min(v);
        hi[b] = hi[b].max(v);
    }
    let mut ss = vec![0.0; len];
    for (x, &v) in values.iter().enumerate() {
        let b = x & fixed as usize;
        let d = v - sum[b] / m as f64;
        ss[b] += d * d;
    }

    let mut out = Vec::with_capacity(len / m);
    let mut b = 0u32;
    loop {
        let i = b as usize;
        let var = if lo[i] == hi[i] { 0.0 } else { ss[i] / m as f64 };
        out.push((b, var));
        b = ((b | set) + 1) & fixed;
        if b == 0 {
            break;
        }
    }
    out
}
