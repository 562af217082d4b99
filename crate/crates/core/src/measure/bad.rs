//! The sets `Bad(λ, k, j, ε)`, `Bad_k` and `E` by exhaustive prefix
//! enumeration.
//!
//! Membership in `Bad(λ, k, j, ε)` depends only on the first
//! `L = ⌊λb^k⌋ + k` digits, so the set is a union of level-`L` cylinders. All
//! `b^L` prefixes are visited depth-first; occurrence counts and the
//! histogram of counts are updated per digit, and a running tally of the
//! `j` whose deviation exceeds `ε` makes each leaf test O(1).

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::interval::{Cylinder, IntervalSet};
use crate::config::Limits;
use crate::digits::Base;
use crate::error::{precondition, resource, Error, Result};
use crate::stats::{poisson_pmf, Convention, Lambda};
use crate::words::code_space;

/// Which `j` a bad set tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JSelect {
    One(u64),
    /// Every `j ∈ J_k = {0, …, b^k − 1}`.
    All,
}

/// `Bad(λ, k, j, ε)`; with [`JSelect::All`] the union over `J_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BadSpec {
    pub base: Base,
    pub lambda: Lambda,
    pub k: u32,
    pub j: JSelect,
    pub epsilon: Ratio<u64>,
}

impl BadSpec {
    pub fn new(base: Base, lambda: Lambda, k: u32, j: u64, epsilon: Ratio<u64>) -> Self {
        Self {
            base,
            lambda,
            k,
            j: JSelect::One(j),
            epsilon,
        }
    }

    /// Number of windows (convention A).
    pub fn windows(&self) -> Result<u64> {
        Convention::A.window_count(self.lambda, code_space(self.base, self.k)?)
    }

    /// Prefix length `⌊λb^k⌋ + k` that decides membership.
    pub fn prefix_len(&self) -> Result<u64> {
        Ok(self.windows()? + u64::from(self.k) - 1)
    }

    /// `b^L`, the number of prefixes to enumerate, if it fits in 64 bits.
    pub fn enumeration_size(&self) -> Result<Option<u64>> {
        let len = self.prefix_len()?;
        Ok(u32::try_from(len).ok().and_then(|l| self.base.pow(l)))
    }

    pub fn check_cap(&self, limits: &Limits) -> Result<()> {
        match self.enumeration_size()? {
            Some(n) if n <= limits.enumeration_cap => Ok(()),
            size => resource(format!(
                "Bad(lambda={}, k={}) needs {} prefixes (b={}, L={}), cap is {}",
                self.lambda,
                self.k,
                size.map_or_else(|| "more than 2^64".to_string(), |n| n.to_string()),
                self.base,
                self.prefix_len()?,
                limits.enumeration_cap
            )),
        }
    }
}

/// `L_k = {p/q : 1 <= q <= k, 0 < p/q < k}`, reduced and deduplicated.
pub fn lambda_set(k: u32) -> Vec<Lambda> {
    let k = u64::from(k);
    let mut set = BTreeSet::new();
    for q in 1..=k {
        for p in 1..k * q {
            set.insert(Lambda::new(p, q).expect("positive"));
        }
    }
    set.into_iter().collect()
}

pub fn bad_set(spec: &BadSpec, limits: &Limits) -> Result<IntervalSet> {
    Ok(enumerate(spec, limits, false)?.0)
}

/// Like [`bad_set`] but also returns the raw level-`L` cylinders before
/// canonicalization, for checking cylinder locality.
pub fn bad_set_with_leaves(
    spec: &BadSpec,
    limits: &Limits,
) -> Result<(IntervalSet, Vec<Cylinder>)> {
    let (set, leaves) = enumerate(spec, limits, true)?;
    Ok((set, leaves.unwrap_or_default()))
}

/// Subtree result of the enumeration.
enum Sub {
    Empty,
    Full,
    Partial(Vec<Cylinder>),
}

impl Sub {
    fn into_cylinders(self, node: Cylinder) -> Vec<Cylinder> {
        match self {
            Sub::Empty => Vec::new(),
            Sub::Full => vec![node],
            Sub::Partial(v) => v,
        }
    }
}

/// Combines the results of the `b` children of `node`.
fn combine(node: Cylinder, base: Base, children: Vec<Sub>) -> Sub {
    if children.iter().all(|c| matches!(c, Sub::Full)) {
        return Sub::Full;
    }
    if children.iter().all(|c| matches!(c, Sub::Empty)) {
        return Sub::Empty;
    }
    let mut out = Vec::new();
    for (d, c) in children.into_iter().enumerate() {
        out.extend(c.into_cylinders(node.child(base, d as u32)));
    }
    Sub::Partial(out)
}

struct Walker<'a> {
    base: Base,
    b: usize,
    k: usize,
    len: usize,
    high: u64,
    codes: Vec<u64>,
    counts: Vec<u32>,
    hist: Vec<u32>,
    /// `violates[j][n]`: whether `N_j = n` puts the prefix in the bad set.
    violates: &'a [Vec<bool>],
    tested: usize,
    violating: u32,
    leaves: Option<Vec<u64>>,
}

impl Walker<'_> {
    #[inline]
    fn flag(&self, j: usize) -> bool {
        j < self.tested && self.violates[j][self.hist[j] as usize]
    }

    #[inline]
    fn move_count(&mut self, from: usize, to: usize) {
        let (fa, ta) = (self.flag(from), self.flag(to));
        self.hist[from] -= 1;
        self.hist[to] += 1;
        let (fb, tb) = (self.flag(from), self.flag(to));
        self.violating =
            self.violating + u32::from(fb) + u32::from(tb) - u32::from(fa) - u32::from(ta);
    }

    fn push(&mut self, depth: usize, d: u8) {
        let prev = if depth == 0 { 0 } else { self.codes[depth - 1] };
        let code = (prev % self.high) * self.b as u64 + u64::from(d);
        self.codes[depth] = code;
        if depth + 1 >= self.k {
            let c = self.counts[code as usize] as usize;
            self.counts[code as usize] += 1;
            self.move_count(c, c + 1);
        }
    }

    fn pop(&mut self, depth: usize) {
        if depth + 1 >= self.k {
            let code = self.codes[depth] as usize;
            let c = self.counts[code] as usize;
            self.counts[code] -= 1;
            self.move_count(c, c - 1);
        }
    }

    /// Explores the subtree below the prefix already pushed to `depth`.
    fn walk(&mut self, depth: usize, index: u64) -> Sub {
        if depth == self.len {
            let bad = self.violating > 0;
            if bad {
                if let Some(l) = self.leaves.as_mut() {
                    l.push(index);
                }
            }
            return if bad { Sub::Full } else { Sub::Empty };
        }
        let node = Cylinder {
            level: depth as u32,
            index,
        };
        let mut children = Vec::with_capacity(self.b);
        for d in 0..self.b {
            self.push(depth, d as u8);
            children.push(self.walk(depth + 1, index * self.b as u64 + d as u64));
            self.pop(depth);
        }
        combine(node, self.base, children)
    }
}

fn enumerate(
    spec: &BadSpec,
    limits: &Limits,
    keep_leaves: bool,
) -> Result<(IntervalSet, Option<Vec<Cylinder>>)> {
    spec.check_cap(limits)?;
    if *spec.epsilon.denom() == 0 {
        return precondition("epsilon denominator is zero");
    }
    let base = spec.base;
    let space = code_space(base, spec.k)?;
    let windows = spec.windows()?;
    let len = spec.prefix_len()? as usize;
    let eps = spec.epsilon.to_f64().unwrap_or(f64::INFINITY);
    let lam = spec.lambda.to_f64();

    // Which j to test, and whether some j above the window count (where
    // Z_j = 0 for every prefix) already forces membership.
    let js: Vec<u64> = match spec.j {
        JSelect::One(j) => vec![j],
        JSelect::All => (0..space).collect(),
    };
    let over = |j: u64, n: u64| (n as f64 / space as f64 - poisson_pmf(lam, j)).abs() > eps;
    if js.iter().any(|&j| j > windows && over(j, 0)) {
        return Ok((IntervalSet::unit(base), keep_leaves.then(Vec::new)));
    }
    // Tested j are those that can be reached, indexed directly.
    let tested = (windows + 1) as usize;
    let violates: Vec<Vec<bool>> = (0..tested as u64)
        .map(|j| {
            let wanted = match spec.j {
                JSelect::One(one) => one == j,
                JSelect::All => j < space,
            };
            (0..=space.min(u64::from(u32::MAX)))
                .map(|n| wanted && over(j, n))
                .collect()
        })
        .collect();

    let b = base.get() as usize;
    let new_walker = |leaves: bool| {
        let mut hist = vec![0u32; tested + 1];
        hist[0] = space as u32;
        let mut w = Walker {
            base,
            b,
            k: spec.k as usize,
            len,
            high: space / b as u64,
            codes: vec![0; len.max(1)],
            counts: vec![0; space as usize],
            hist,
            violates: &violates,
            tested,
            violating: 0,
            leaves: leaves.then(Vec::new),
        };
        // Initial tally with all counts zero.
        w.violating = (0..tested).filter(|&j| w.flag(j)).count() as u32;
        w
    };

    // Fan out over the first `split` digits.
    let split = (0..=len)
        .take_while(|&s| b.pow(s as u32) <= 256)
        .last()
        .unwrap_or(0)
        .min(len);
    let tops: Vec<u64> = (0..(b as u64).pow(split as u32)).collect();
    let results: Vec<(u64, Sub, Option<Vec<u64>>)> = tops
        .into_par_iter()
        .map(|top| {
            let mut w = new_walker(keep_leaves);
            let mut digits = vec![0u8; split];
            let mut t = top;
            for slot in digits.iter_mut().rev() {
                *slot = (t % b as u64) as u8;
                t /= b as u64;
            }
            for (depth, &d) in digits.iter().enumerate() {
                w.push(depth, d);
            }
            let sub = w.walk(split, top);
            (top, sub, w.leaves)
        })
        .collect();

    let mut leaves = keep_leaves.then(Vec::new);
    let mut level: Vec<Sub> = Vec::with_capacity(results.len());
    for (_, sub, l) in results {
        if let (Some(all), Some(l)) = (leaves.as_mut(), l) {
            all.extend(l.into_iter().map(|index| Cylinder {
                level: len as u32,
                index,
            }));
        }
        level.push(sub);
    }
    // Fold the fanned-out level back up to the root.
    let mut depth = split;
    while depth > 0 {
        depth -= 1;
        let mut next = Vec::with_capacity(level.len() / b);
        let mut it = level.into_iter();
        let mut index = 0u64;
        loop {
            let group: Vec<Sub> = it.by_ref().take(b).collect();
            if group.is_empty() {
                break;
            }
            next.push(combine(
                Cylinder {
                    level: depth as u32,
                    index,
                },
                base,
                group,
            ));
            index += 1;
        }
        level = next;
    }
    let root = level
        .pop()
        .ok_or_else(|| Error::Internal("empty enumeration".into()))?;
    let set = IntervalSet::from_cylinders(base, root.into_cylinders(Cylinder::UNIT))?;
    Ok((set, leaves))
}

/// `Bad_k = ⋃_{j ∈ J_k} ⋃_{λ ∈ L_k} Bad(λ, k, j, 1/k)`.
pub fn bad_k(base: Base, k: u32, limits: &Limits) -> Result<IntervalSet> {
    let specs = bad_k_specs(base, k)?;
    for s in &specs {
        s.check_cap(limits)?;
    }
    let sets = specs
        .iter()
        .map(|s| bad_set(s, limits))
        .collect::<Result<Vec<_>>>()?;
    IntervalSet::union_all(base, &sets)
}

/// The constituent specs of `Bad_k`, one per `λ ∈ L_k` (each over all `j`).
pub fn bad_k_specs(base: Base, k: u32) -> Result<Vec<BadSpec>> {
    if k == 0 {
        return precondition("k must be >= 1");
    }
    Ok(lambda_set(k)
        .into_iter()
        .map(|lambda| BadSpec {
            base,
            lambda,
            k,
            j: JSelect::All,
            epsilon: Ratio::new(1, u64::from(k)),
        })
        .collect())
}

/// `(0,1) ∖ ⋃_{k ∈ range} Bad_k`.
pub fn e_set(base: Base, range: RangeInclusive<u32>, limits: &Limits) -> Result<IntervalSet> {
    for k in range.clone() {
        for s in bad_k_specs(base, k)? {
            s.check_cap(limits)?;
        }
    }
    let sets = range
        .map(|k| bad_k(base, k, limits))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalSet::union_all(base, &sets)?.complement())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundStatus {
    Holds,
    /// The bound is at least 1, so it says nothing.
    Vacuous,
    Violated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fact1Report {
    pub base: Base,
    pub k: u32,
    pub measure: BigRational,
    /// `2 b^k k^3 e^{−b^k/(2k^5)}`.
    pub bound: f64,
    pub status: BoundStatus,
}

pub fn fact1_bound(base: Base, k: u32) -> f64 {
    let bk = f64::from(base.get()).powi(k as i32);
    let kf = f64::from(k);
    2.0 * bk * kf.powi(3) * (-bk / (2.0 * kf.powi(5))).exp()
}

/// Compares the exact `μ(Bad_k)` with the closed-form bound.
pub fn check_fact1_bound(base: Base, k: u32, limits: &Limits) -> Result<Fact1Report> {
    let set = bad_k(base, k, limits)?;
    let measure = set.measure();
    let bound = fact1_bound(base, k);
    let status = if bound >= 1.0 {
        BoundStatus::Vacuous
    } else if measure.to_f64().unwrap_or(1.0) < bound {
        BoundStatus::Holds
    } else {
        BoundStatus::Violated
    };
    Ok(Fact1Report {
        base,
        k,
        measure,
        bound,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::DigitBuffer;
    use crate::stats::z_profile;

    fn lim() -> Limits {
        Limits::default()
    }

    fn b2() -> Base {
        Base::new(2).unwrap()
    }

    fn lam(p: u64, q: u64) -> Lambda {
        Lambda::new(p, q).unwrap()
    }

    /// Direct oracle: profile each prefix with the counting engine.
    fn oracle_bad(spec: &BadSpec) -> Vec<u64> {
        let len = spec.prefix_len().unwrap() as u32;
        let b = spec.base.get() as u64;
        let space = b.pow(spec.k);
        let eps = spec.epsilon.to_f64().unwrap();
        let mut out = Vec::new();
        for idx in 0..b.pow(len) {
            let mut digits = vec![0u8; len as usize];
            let mut t = idx;
            for slot in digits.iter_mut().rev() {
                *slot = (t % b) as u8;
                t /= b;
            }
            let buf = DigitBuffer::new(spec.base, digits).unwrap();
            let p = z_profile(
                &buf,
                spec.k,
                spec.lambda,
                space as usize + 1,
                Convention::A,
                &lim(),
            )
            .unwrap();
            let js: Vec<u64> = match spec.j {
                JSelect::One(j) => vec![j],
                JSelect::All => (0..space).collect(),
            };
            let bad = js
                .iter()
                .any(|&j| (p.z_f64(j as usize) - poisson_pmf(spec.lambda.to_f64(), j)).abs() > eps);
            if bad {
                out.push(idx);
            }
        }
        out
    }

    #[test]
    fn lambda_sets() {
        assert!(lambda_set(1).is_empty());
        assert_eq!(lambda_set(2), vec![lam(1, 2), lam(1, 1), lam(3, 2)]);
        assert_eq!(lambda_set(3).len(), 11);
        assert!(lambda_set(3).iter().all(|l| l.to_f64() < 3.0));
    }

    #[test]
    fn epsilon_one_is_empty() {
        let s = BadSpec::new(b2(), lam(1, 1), 1, 3, Ratio::new(1, 1));
        assert!(bad_set(&s, &lim()).unwrap().is_empty());
    }

    #[test]
    fn bad_1_is_empty() {
        assert!(bad_k(b2(), 1, &lim()).unwrap().is_empty());
    }

    #[test]
    fn matches_oracle_and_is_local() {
        for spec in [
            BadSpec::new(b2(), lam(1, 1), 2, 0, Ratio::new(1, 2)),
            BadSpec::new(b2(), lam(1, 1), 2, 1, Ratio::new(1, 4)),
            BadSpec::new(b2(), lam(3, 2), 2, 2, Ratio::new(1, 8)),
            BadSpec::new(Base::new(3).unwrap(), lam(1, 1), 1, 1, Ratio::new(1, 10)),
            BadSpec {
                base: b2(),
                lambda: lam(1, 2),
                k: 2,
                j: JSelect::All,
                epsilon: Ratio::new(1, 2),
            },
            BadSpec {
                base: b2(),
                lambda: lam(3, 2),
                k: 2,
                j: JSelect::All,
                epsilon: Ratio::new(1, 5),
            },
        ] {
            let (set, leaves) = bad_set_with_leaves(&spec, &lim()).unwrap();
            let len = spec.prefix_len().unwrap() as u32;
            let mut got: Vec<u64> = leaves.iter().map(|c| c.index).collect();
            got.sort_unstable();
            assert!(leaves.iter().all(|c| c.level == len));
            assert_eq!(got, oracle_bad(&spec), "{spec:?}");
            let rebuilt = IntervalSet::from_cylinders(spec.base, leaves).unwrap();
            assert_eq!(rebuilt, set);
            assert_eq!(
                set.measure(),
                BigRational::new(
                    got.len().into(),
                    num_bigint::BigInt::from(spec.base.get()).pow(len)
                )
            );
        }
    }

    #[test]
    fn cap_is_enforced() {
        let s = BadSpec::new(b2(), lam(3, 1), 4, 0, Ratio::new(1, 4));
        assert!(matches!(bad_set(&s, &lim()), Err(Error::ResourceCap(_))));
        assert!(matches!(bad_k(b2(), 4, &lim()), Err(Error::ResourceCap(_))));
    }

    #[test]
    fn e_set_complements() {
        let e = e_set(b2(), 2..=2, &lim()).unwrap();
        let bad = bad_k(b2(), 2, &lim()).unwrap();
        assert_eq!(
            e.measure(),
            BigRational::from_integer(1.into()) - bad.measure()
        );
        assert_eq!(
            e_set(b2(), RangeInclusive::new(3, 2), &lim()).unwrap(),
            IntervalSet::unit(b2())
        );
    }

    #[test]
    fn fact1_small_k_vacuous() {
        let r = check_fact1_bound(b2(), 2, &lim()).unwrap();
        assert_eq!(r.status, BoundStatus::Vacuous);
        assert!(r.bound >= 1.0);
    }
}
