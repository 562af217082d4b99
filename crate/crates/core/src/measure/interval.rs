//! Finite unions of b-adic cylinders with exact measure.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::digits::Base;
use crate::error::{precondition, resource, Result};

/// `[index / b^level, (index + 1) / b^level)`: the reals whose first `level`
/// digits spell `index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    pub level: u32,
    pub index: u64,
}

impl Cylinder {
    pub const UNIT: Cylinder = Cylinder { level: 0, index: 0 };

    /// The `digit`-th of the `b` equal parts.
    pub fn child(self, base: Base, digit: u32) -> Cylinder {
        Cylinder {
            level: self.level + 1,
            index: self.index * u64::from(base.get()) + u64::from(digit),
        }
    }

    pub fn measure(self, base: Base) -> BigRational {
        BigRational::new(1.into(), BigInt::from(base.get()).pow(self.level))
    }

    /// Whether `other` lies inside `self`.
    pub fn contains(self, base: Base, other: Cylinder) -> bool {
        other.level >= self.level
            && other.index / u64::from(base.get()).pow(other.level - self.level) == self.index
    }
}

/// A canonical finite union of cylinders: sorted, disjoint, and with every
/// run of `b` sibling cylinders merged into their parent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalSet {
    base: Base,
    cylinders: Vec<Cylinder>,
}

/// Half-open ranges of cells at a common level.
type Ranges = Vec<(u128, u128)>;

impl IntervalSet {
    pub fn empty(base: Base) -> Self {
        Self {
            base,
            cylinders: Vec::new(),
        }
    }

    pub fn unit(base: Base) -> Self {
        Self {
            base,
            cylinders: vec![Cylinder::UNIT],
        }
    }

    pub fn from_cylinder(base: Base, c: Cylinder) -> Result<Self> {
        Self::from_cylinders(base, vec![c])
    }

    /// Canonicalizes an arbitrary (possibly overlapping) list of cylinders.
    pub fn from_cylinders(base: Base, cylinders: Vec<Cylinder>) -> Result<Self> {
        let level = cylinders.iter().map(|c| c.level).max().unwrap_or(0);
        let scale = cells(base, level)?;
        let mut ranges: Ranges = Vec::with_capacity(cylinders.len());
        for c in &cylinders {
            let width = cells(base, level - c.level)?;
            if u128::from(c.index) >= cells(base, c.level)? {
                return precondition(format!(
                    "cylinder index {} out of range at level {}",
                    c.index, c.level
                ));
            }
            ranges.push((
                u128::from(c.index) * width,
                (u128::from(c.index) + 1) * width,
            ));
        }
        debug_assert!(ranges.iter().all(|r| r.1 <= scale));
        ranges.sort_unstable();
        Ok(Self::from_ranges(base, level, &coalesce(ranges)))
    }

    /// Canonical cylinders from sorted, disjoint, non-adjacent ranges.
    fn from_ranges(base: Base, level: u32, ranges: &[(u128, u128)]) -> Self {
        let b = u128::from(base.get());
        let mut out = Vec::new();
        for &(mut s, e) in ranges {
            while s < e {
                // Largest aligned block starting at s that fits in [s, e).
                let mut up = 0u32;
                let mut width = 1u128;
                while up < level && s % (width * b) == 0 && s + width * b <= e {
                    width *= b;
                    up += 1;
                }
                out.push(Cylinder {
                    level: level - up,
                    index: (s / width) as u64,
                });
                s += width;
            }
        }
        Self {
            base,
            cylinders: out,
        }
    }

    fn ranges(&self, level: u32) -> Result<Ranges> {
        let mut out: Ranges = Vec::with_capacity(self.cylinders.len());
        for c in &self.cylinders {
            let width = cells(self.base, level - c.level)?;
            let s = u128::from(c.index) * width;
            match out.last_mut() {
                Some(last) if last.1 == s => last.1 = s + width,
                _ => out.push((s, s + width)),
            }
        }
        Ok(out)
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn cylinders(&self) -> &[Cylinder] {
        &self.cylinders
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    /// Deepest cylinder level present.
    pub fn max_level(&self) -> u32 {
        self.cylinders.iter().map(|c| c.level).max().unwrap_or(0)
    }

    pub fn measure(&self) -> BigRational {
        let level = self.max_level();
        let total: u128 = self
            .ranges(level)
            .expect("levels of a valid set fit")
            .iter()
            .map(|(s, e)| e - s)
            .sum();
        BigRational::new(
            BigInt::from(total),
            BigInt::from(self.base.get()).pow(level),
        )
    }

    fn binary(
        &self,
        other: &IntervalSet,
        op: fn(&Ranges, &Ranges) -> Ranges,
    ) -> Result<IntervalSet> {
        if self.base != other.base {
            return precondition(format!("base mismatch: {} vs {}", self.base, other.base));
        }
        let level = self.max_level().max(other.max_level());
        let ranges = op(&self.ranges(level)?, &other.ranges(level)?);
        Ok(Self::from_ranges(self.base, level, &ranges))
    }

    pub fn union(&self, other: &IntervalSet) -> Result<IntervalSet> {
        self.binary(other, |a, b| {
            let mut all: Ranges = a.iter().chain(b.iter()).copied().collect();
            all.sort_unstable();
            coalesce(all)
        })
    }

    pub fn intersect(&self, other: &IntervalSet) -> Result<IntervalSet> {
        self.binary(other, |a, b| {
            let (mut i, mut j) = (0, 0);
            let mut out = Vec::new();
            while i < a.len() && j < b.len() {
                let s = a[i].0.max(b[j].0);
                let e = a[i].1.min(b[j].1);
                if s < e {
                    out.push((s, e));
                }
                if a[i].1 < b[j].1 {
                    i += 1;
                } else {
                    j += 1;
                }
            }
            out
        })
    }

    pub fn difference(&self, other: &IntervalSet) -> Result<IntervalSet> {
        self.intersect(&other.complement())
    }

    /// Complement within the unit interval.
    pub fn complement(&self) -> IntervalSet {
        let level = self.max_level();
        let top = cells(self.base, level).expect("levels of a valid set fit");
        let mut out = Vec::new();
        let mut cursor = 0u128;
        for (s, e) in self.ranges(level).expect("levels of a valid set fit") {
            if cursor < s {
                out.push((cursor, s));
            }
            cursor = e;
        }
        if cursor < top {
            out.push((cursor, top));
        }
        Self::from_ranges(self.base, level, &out)
    }

    pub fn union_all<'a>(
        base: Base,
        sets: impl IntoIterator<Item = &'a IntervalSet>,
    ) -> Result<IntervalSet> {
        let mut all = Vec::new();
        for s in sets {
            if s.base != base {
                return precondition("base mismatch in union");
            }
            all.extend_from_slice(&s.cylinders);
        }
        Self::from_cylinders(base, all)
    }

    /// Whether the point with the given digit prefix lies in the set, for a
    /// prefix at least as deep as the set.
    pub fn contains_prefix(&self, digits: &[u8]) -> bool {
        let b = u64::from(self.base.get());
        self.cylinders.iter().any(|c| {
            (c.level as usize) <= digits.len()
                && digits[..c.level as usize]
                    .iter()
                    .fold(0u64, |a, &d| a * b + u64::from(d))
                    == c.index
        })
    }
}

/// `b^level` as a cell count, failing when it leaves 126 bits.
fn cells(base: Base, level: u32) -> Result<u128> {
    match u128::from(base.get()).checked_pow(level) {
        Some(v) if v < (1u128 << 126) => Ok(v),
        _ => resource(format!(
            "cylinder level {level} in base {base} too deep for exact cells"
        )),
    }
}

/// Merges sorted ranges that overlap or touch.
fn coalesce(sorted: Ranges) -> Ranges {
    let mut out: Ranges = Vec::with_capacity(sorted.len());
    for (s, e) in sorted {
        match out.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    out
}
