//! Query families `Q ⊆ 2^[n]` and the subcubes they induce.
//!
//! Sets are `u32` masks (bit `j` ⟺ coordinate `j+1`). The empty set is never
//! a member of a family.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cube::MAX_VARS;
use crate::error::{Error, Result};

/// A subcube of `{-1,1}^n`: the free set `S` plus a fixing of `S̄`
/// (bit set ⟺ that coordinate is fixed to `-1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Subcube {
    n: usize,
    free: u32,
    fixing: u32,
}

impl Subcube {
    pub fn new(n: usize, free: u32, fixing: u32) -> Result<Self> {
        let c = Self { n, free, fixing };
        c.validate()?;
        Ok(c)
    }

    /// The whole cube.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, full_mask(n), 0)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_VARS {
            return Err(Error::InvalidSubcube(format!(
                "dimension {} outside 1..={MAX_VARS}",
                self.n
            )));
        }
        let full = full_mask(self.n);
        if self.free & !full != 0 {
            return Err(Error::InvalidSubcube(format!(
                "free mask {:#b} exceeds n={}",
                self.free, self.n
            )));
        }
        if self.fixing & !(full & !self.free) != 0 {
            return Err(Error::InvalidSubcube(format!(
                "fixing {:#b} overlaps free set {:#b} or exceeds n={}",
                self.fixing, self.free, self.n
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn free(&self) -> u32 {
        self.free
    }

    pub fn fixing(&self) -> u32 {
        self.fixing
    }

    pub fn fixed(&self) -> u32 {
        full_mask(self.n) & !self.free
    }

    pub fn dim(&self) -> usize {
        self.free.count_ones() as usize
    }

    pub fn contains(&self, x: usize) -> bool {
        x as u32 & self.fixed() == self.fixing
    }

    /// 1-based free coordinates.
    pub fn free_coords(&self) -> Vec<usize> {
        mask_to_coords(self.free)
    }

    /// 1-based coordinates fixed to `-1`.
    pub fn minus_coords(&self) -> Vec<usize> {
        mask_to_coords(self.fixing)
    }
}

impl Serialize for Subcube {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Subcube", 2)?;
        st.serialize_field("free", &self.free_coords())?;
        st.serialize_field("fixing", &self.minus_coords())?;
        st.end()
    }
}

impl fmt::Display for Subcube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "free={:?} minus={:?}",
            self.free_coords(),
            self.minus_coords()
        )
    }
}

pub fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn mask_to_coords(mask: u32) -> Vec<usize> {
    (0..32).filter(|j| mask >> j & 1 == 1).map(|j| j + 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    BoundedSize(usize),
    Contiguous { wraparound: bool },
    Prefixes,
    FullSetOnly,
    Singletons,
    Custom(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryFamily {
    n: usize,
    kind: FamilyKind,
}

impl QueryFamily {
    pub fn new(n: usize, kind: FamilyKind) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::InvalidFamily(format!(
                "dimension {n} outside 1..={MAX_VARS}"
            )));
        }
        let kind = match kind {
            FamilyKind::BoundedSize(k) if k == 0 || k > n => {
                return Err(Error::InvalidFamily(format!(
                    "bounded size k={k} must satisfy 1 <= k <= n={n}"
                )))
            }
            FamilyKind::Custom(masks) => {
                let full = full_mask(n);
                if let Some(m) = masks.iter().find(|&&m| m == 0 || m & !full != 0) {
                    return Err(Error::InvalidFamily(format!(
                        "set mask {m:#b} is empty or exceeds n={n}"
                    )));
                }
                let mut masks = masks;
                masks.sort_unstable();
                masks.dedup();
                if masks.is_empty() {
                    return Err(Error::InvalidFamily("family must be nonempty".into()));
                }
                FamilyKind::Custom(masks)
            }
            other => other,
        };
        Ok(Self { n, kind })
    }

    pub fn bounded(n: usize, k: usize) -> Result<Self> {
        Self::new(n, FamilyKind::BoundedSize(k))
    }

    pub fn contiguous(n: usize, wraparound: bool) -> Result<Self> {
        Self::new(n, FamilyKind::Contiguous { wraparound })
    }

    pub fn prefixes(n: usize) -> Result<Self> {
        Self::new(n, FamilyKind::Prefixes)
    }

    pub fn full_set_only(n: usize) -> Result<Self> {
        Self::new(n, FamilyKind::FullSetOnly)
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Self::new(n, FamilyKind::Singletons)
    }

    pub fn custom(n: usize, masks: Vec<u32>) -> Result<Self> {
        Self::new(n, FamilyKind::Custom(masks))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Member sets, each once, in ascending mask order.
    pub fn enumerate_sets(&self) -> Vec<u32> {
        let n = self.n;
        let full = full_mask(n);
        let mut sets: Vec<u32> = match &self.kind {
            FamilyKind::BoundedSize(k) => (1..=full)
                .filter(|s| s.count_ones() as usize <= *k)
                .collect(),
            FamilyKind::Contiguous { wraparound } => {
                let mut out = Vec::new();
                for start in 0..n {
                    for len in 1..=n {
                        if !wraparound && start + len > n {
                            break;
                        }
                        out.push((0..len).fold(0u32, |m, j| m | 1 << ((start + j) % n)));
                    }
                }
                out
            }
            FamilyKind::Prefixes => (1..=n).map(full_mask).collect(),
            FamilyKind::FullSetOnly => vec![full],
            FamilyKind::Singletons => (0..n).map(|j| 1u32 << j).collect(),
            FamilyKind::Custom(masks) => masks.clone(),
        };
        sets.sort_unstable();
        sets.dedup();
        sets
    }

    /// Streams every subcube `(S, b)` with `S` a member and `b` a fixing of `S̄`.
    pub fn enumerate_subcubes(&self) -> SubcubeIter {
        SubcubeIter {
            n: self.n,
            sets: self.enumerate_sets(),
            set_idx: 0,
            fixing: 0,
        }
    }

    /// `Σ_{S∈Q} 2^{n-|S|}`.
    pub fn subcube_count(&self) -> u64 {
        self.enumerate_sets()
            .iter()
            .map(|s| 1u64 << (self.n - s.count_ones() as usize))
            .sum()
    }

    /// Every nonempty subset of every member is a member.
    pub fn is_downward_closed(&self) -> bool {
        let sets = self.enumerate_sets();
        let members: HashSet<u32> = sets.iter().copied().collect();
        sets.iter().all(|&s| {
            let mut sub = (s.wrapping_sub(1)) & s;
            while sub != 0 {
                if !members.contains(&sub) {
                    return false;
                }
                sub = (sub - 1) & s;
            }
            true
        })
    }

    pub fn contains_all_singletons(&self) -> bool {
        let sets: HashSet<u32> = self.enumerate_sets().into_iter().collect();
        (0..self.n).all(|j| sets.contains(&(1 << j)))
    }

    /// Parses the custom-family text format: a required `n=<int>` header,
    /// then one set per line as whitespace-separated 1-based indices.
    /// Lines starting with `#` and blank lines are ignored.
    pub fn parse_custom(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut masks = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some(dim) = n else {
                let value = line.strip_prefix("n=").ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: "expected header line `n=<int>`".into(),
                })?;
                let dim: usize = value.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid dimension `{}`", value.trim()),
                })?;
                if dim == 0 || dim > MAX_VARS {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("dimension {dim} outside 1..={MAX_VARS}"),
                    });
                }
                n = Some(dim);
                continue;
            };
            let mut mask = 0u32;
            for tok in line.split_whitespace() {
                let index: usize = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid index `{tok}`"),
                })?;
                if index == 0 || index > dim {
                    return Err(Error::OutOfRange {
                        line: line_no,
                        index,
                        n: dim,
                    });
                }
                mask |= 1 << (index - 1);
            }
            masks.push(mask);
        }
        let n = n.ok_or_else(|| Error::InvalidFamily("missing `n=<int>` header".into()))?;
        if masks.is_empty() {
            return Err(Error::InvalidFamily("family must be nonempty".into()));
        }
        Self::custom(n, masks)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_custom(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Display for QueryFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FamilyKind::BoundedSize(k) => write!(f, "bounded:{k}"),
            FamilyKind::Contiguous { wraparound: false } => write!(f, "contiguous"),
            FamilyKind::Contiguous { wraparound: true } => write!(f, "contiguous:wrap"),
            FamilyKind::Prefixes => write!(f, "prefixes"),
            FamilyKind::FullSetOnly => write!(f, "full"),
            FamilyKind::Singletons => write!(f, "singletons"),
            FamilyKind::Custom(m) => write!(f, "custom({} sets)", m.len()),
        }
    }
}

pub struct SubcubeIter {
    n: usize,
    sets: Vec<u32>,
    set_idx: usize,
    fixing: u32,
}

impl Iterator for SubcubeIter {
    type Item = Subcube;

    fn next(&mut self) -> Option<Subcube> {
        let &set = self.sets.get(self.set_idx)?;
        let fixed = full_mask(self.n) & !set;
        let item = Subcube {
            n: self.n,
            free: set,
            fixing: self.fixing,
        };
        // Next submask of the fixed coordinates in ascending order.
        self.fixing = ((self.fixing | set) + 1) & fixed;
        if self.fixing == 0 {
            self.set_idx += 1;
        }
        Some(item)
    }
}

/// Command-line family spec: `bounded:<k>`, `contiguous[:wrap]`, `prefixes`,
/// `full`, `singletons`, `custom:<path>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Bounded(usize),
    Contiguous { wraparound: bool },
    Prefixes,
    Full,
    Singletons,
    Custom(String),
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("bounded", Some(k)) => k
                .parse()
                .map(FamilySpec::Bounded)
                .map_err(|_| Error::Parameter(format!("invalid k in `{s}`"))),
            ("contiguous", None) => Ok(FamilySpec::Contiguous { wraparound: false }),
            ("contiguous", Some("wrap")) => Ok(FamilySpec::Contiguous { wraparound: true }),
            ("prefixes", None) => Ok(FamilySpec::Prefixes),
            ("full", None) => Ok(FamilySpec::Full),
            ("singletons", None) => Ok(FamilySpec::Singletons),
            ("custom", Some(path)) if !path.is_empty() => Ok(FamilySpec::Custom(path.into())),
            _ => Err(Error::Parameter(format!("unknown family spec `{s}`"))),
        }
    }
}

impl FamilySpec {
    /// Builds the family for dimension `n`. A custom file's own `n` must agree
    /// with `n` when both are given.
    pub fn build(&self, n: Option<usize>) -> Result<QueryFamily> {
        if let FamilySpec::Custom(path) = self {
            let q = QueryFamily::from_file(path)?;
            if let Some(n) = n {
                if n != q.n() {
                    return Err(Error::Parameter(format!(
                        "--n {n} disagrees with n={} in {path}",
                        q.n()
                    )));
                }
            }
            return Ok(q);
        }
        let n = n.ok_or_else(|| Error::Parameter("--n is required".into()))?;
        match self {
            FamilySpec::Bounded(k) => QueryFamily::bounded(n, *k),
            FamilySpec::Contiguous { wraparound } => QueryFamily::contiguous(n, *wraparound),
            FamilySpec::Prefixes => QueryFamily::prefixes(n),
            FamilySpec::Full => QueryFamily::full_set_only(n),
            FamilySpec::Singletons => QueryFamily::singletons(n),
            FamilySpec::Custom(_) => unreachable!(),
        }
    }
}
