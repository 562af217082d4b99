//! Integer sequences `z` driving the reductions, with decidable tails.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};

/// Value domain a sequence is read in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZDomain {
    /// Integers `>= 2`.
    Bold,
    /// Powers of two `>= 2`. The identity tail is read on exponents:
    /// `z(i) = 2^i`.
    D2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TailRule {
    Constant {
        value: u64,
    },
    /// `z(i) = i + 2` (bold), `z(i) = 2^i` (d2).
    Identity,
    /// `z(i) = slope·i + offset`.
    Affine {
        slope: u64,
        offset: u64,
    },
}

impl TailRule {
    fn value(&self, i: u64, domain: ZDomain) -> Result<u64> {
        match (*self, domain) {
            (TailRule::Constant { value }, _) => Ok(value),
            (TailRule::Identity, ZDomain::Bold) => Ok(i + 2),
            (TailRule::Identity, ZDomain::D2) => 1u64
                .checked_shl(i as u32)
                .filter(|_| i < 63)
                .ok_or_else(|| Error::ResourceCap(format!("z({i}) = 2^{i} overflows"))),
            (TailRule::Affine { slope, offset }, ZDomain::Bold) => slope
                .checked_mul(i)
                .and_then(|v| v.checked_add(offset))
                .ok_or_else(|| Error::ResourceCap(format!("z({i}) overflows"))),
            (TailRule::Affine { .. }, ZDomain::D2) => {
                precondition("affine tails do not stay in powers of two; use const or id for d2")
            }
        }
    }

    /// Whether the values along this tail tend to infinity.
    pub fn diverges(&self) -> bool {
        match *self {
            TailRule::Constant { .. } => false,
            TailRule::Identity => true,
            TailRule::Affine { slope, .. } => slope > 0,
        }
    }
}

impl fmt::Display for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailRule::Constant { value } => write!(f, "const:{value}"),
            TailRule::Identity => f.write_str("id"),
            TailRule::Affine { slope, offset } => write!(f, "affine:{slope}:{offset}"),
        }
    }
}

impl FromStr for TailRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("cannot parse tail rule {s:?}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["id"] => Ok(TailRule::Identity),
            ["const", v] => Ok(TailRule::Constant {
                value: v.parse().map_err(|_| bad())?,
            }),
            ["affine", a, c] => Ok(TailRule::Affine {
                slope: a.parse().map_err(|_| bad())?,
                offset: c.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// A sequence `z(1), z(2), …`: an explicit prefix, then separate tail rules
/// for even and odd indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZSequence {
    pub prefix: Vec<u64>,
    pub even: TailRule,
    pub odd: TailRule,
}

/// Membership of `z` in `C = {z(2n) → ∞}` and `D = {z(2n+1) → ∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZClass {
    pub in_c: bool,
    pub in_d: bool,
}

impl ZSequence {
    pub fn with_tail(prefix: Vec<u64>, tail: TailRule) -> Self {
        Self {
            prefix,
            even: tail,
            odd: tail,
        }
    }

    pub fn split(even: TailRule, odd: TailRule) -> Self {
        Self {
            prefix: Vec::new(),
            even,
            odd,
        }
    }

    pub fn constant(value: u64) -> Self {
        Self::with_tail(Vec::new(), TailRule::Constant { value })
    }

    /// `z(i)` for `i >= 1`, validated for the domain.
    pub fn value(&self, i: u64, domain: ZDomain) -> Result<u64> {
        if i == 0 {
            return precondition("z is indexed from 1");
        }
        let v = match self.prefix.get(i as usize - 1) {
            Some(&v) => v,
            None if i.is_multiple_of(2) => self.even.value(i, domain)?,
            None => self.odd.value(i, domain)?,
        };
        match domain {
            ZDomain::Bold if v < 2 => precondition(format!("z({i}) = {v}; values must be >= 2")),
            ZDomain::D2 if v < 2 || !v.is_power_of_two() => precondition(format!(
                "z({i}) = {v}; d2 values must be powers of two >= 2"
            )),
            _ => Ok(v),
        }
    }

    /// Decided from the tail rules alone; the finite prefix is irrelevant.
    pub fn classify(&self) -> ZClass {
        ZClass {
            in_c: self.even.diverges(),
            in_d: self.odd.diverges(),
        }
    }
}

impl fmt::Display for ZSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            let list: Vec<String> = self.prefix.iter().map(u64::to_string).collect();
            write!(f, "{};", list.join(","))?;
        }
        if self.even == self.odd {
            write!(f, "tail={}", self.even)
        } else {
            write!(f, "even={},odd={}", self.even, self.odd)
        }
    }
}

impl FromStr for ZSequence {
    type Err = Error;

    /// Accepts `3,4,5;tail=const:2`, `even=const:4,odd=id`, or a combination
    /// such as `3,5;even=id,odd=const:4`. Unset tails default to `id`.
    fn from_str(s: &str) -> Result<Self> {
        let mut prefix = Vec::new();
        let mut even = None;
        let mut odd = None;
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            if part.contains('=') {
                for assignment in part.split(',') {
                    let (key, rule) = assignment.split_once('=').ok_or_else(|| {
                        Error::Precondition(format!("expected key=rule in {assignment:?}"))
                    })?;
                    let rule: TailRule = rule.parse()?;
                    match key.trim() {
                        "tail" => {
                            even = Some(rule);
                            odd = Some(rule);
                        }
                        "even" => even = Some(rule),
                        "odd" => odd = Some(rule),
                        other => return precondition(format!("unknown z-spec key {other:?}")),
                    }
                }
            } else {
                for v in part.split(',') {
                    prefix.push(
                        v.trim().parse().map_err(|_| {
                            Error::Precondition(format!("cannot parse z value {v:?}"))
                        })?,
                    );
                }
            }
        }
        Ok(Self {
            prefix,
            even: even.unwrap_or(TailRule::Identity),
            odd: odd.unwrap_or(TailRule::Identity),
        })
    }
}
