//! Z-profiles, Poisson reference values, distances, normality and
//! discrepancy.

mod normality;
mod poisson;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::config::Limits;
use crate::digits::{Base, DigitBuffer};
use crate::error::{precondition, resource, Error, Result};
use crate::words::{self, code_space, WindowSpec};

pub use normality::{
    discrepancy, normality_deviation, DiscrepancyReport, NormalityReport, WordDeviation,
};
pub use poisson::{ln_factorial, poisson_pmf, tv_distance, tv_poisson, PoissonRef, POISSON_TAIL};

/// Default number of explicit Z buckets before the overflow bucket.
pub const DEFAULT_J_MAX: usize = 64;

/// A positive rational `p/q`, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Lambda(Ratio<u64>);

impl Lambda {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return precondition(format!("lambda must be a positive rational, got {p}/{q}"));
        }
        Ok(Self(Ratio::new(p, q)))
    }

    pub fn integer(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// `⌊λ·m⌋`, exactly.
    pub fn floor_times(&self, m: u64) -> Result<u64> {
        floor_times(self.0, m)
    }
}

pub(crate) fn floor_times(r: Ratio<u64>, m: u64) -> Result<u64> {
    let v = u128::from(*r.numer()) * u128::from(m) / u128::from(*r.denom());
    u64::try_from(v).map_err(|_| Error::ResourceCap(format!("{r}·{m} overflows 64 bits")))
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Lambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("cannot parse lambda {s:?}; expected p or p/q"));
        match s.trim().split_once('/') {
            Some((p, q)) => Lambda::new(
                p.trim().parse().map_err(|_| bad())?,
                q.trim().parse().map_err(|_| bad())?,
            ),
            None => Lambda::integer(s.trim().parse().map_err(|_| bad())?),
        }
    }
}

impl TryFrom<String> for Lambda {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Lambda> for String {
    fn from(l: Lambda) -> String {
        l.to_string()
    }
}

/// How many windows `x↾⌊λb^k⌋+k` contributes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// `⌊λb^k⌋ + 1` windows: every window of the prefix of length `⌊λb^k⌋ + k`.
    #[default]
    A,
    /// `⌊λb^k⌋` windows, the starts in `(0, λb^k]`.
    B,
}

impl Convention {
    pub fn window_count(self, lambda: Lambda, space: u64) -> Result<u64> {
        let floor = lambda.floor_times(space)?;
        Ok(match self {
            Convention::A => floor + 1,
            Convention::B => floor,
        })
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::A => "A",
            Convention::B => "B",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Convention::A),
            "B" | "b" => Ok(Convention::B),
            other => precondition(format!("unknown window convention {other:?}")),
        }
    }
}

/// `Z^λ_{j,k}` for `j = 0..=j_max` plus the mass of words seen more often.
///
/// `Z_j = counts[j] / b^k`, held exactly as integer counts over the common
/// denominator `b^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZProfile {
    pub base: Base,
    pub k: u32,
    pub lambda: Lambda,
    pub convention: Convention,
    pub window_count: u64,
    /// `b^k`.
    pub denominator: u64,
    pub counts: Vec<u64>,
    pub overflow: u64,
}

impl ZProfile {
    pub fn j_max(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn z(&self, j: usize) -> Ratio<u64> {
        Ratio::new(self.counts.get(j).copied().unwrap_or(0), self.denominator)
    }

    pub fn z_f64(&self, j: usize) -> f64 {
        self.counts.get(j).copied().unwrap_or(0) as f64 / self.denominator as f64
    }

    pub fn overflow_mass(&self) -> Ratio<u64> {
        Ratio::new(self.overflow, self.denominator)
    }

    /// Fraction of words occurring at least once, `1 − Z_0`.
    pub fn distinct_fraction(&self) -> f64 {
        1.0 - self.z_f64(0)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..=self.j_max()).map(|j| self.z_f64(j)).collect()
    }
}

pub fn z_profile(
    buf: &DigitBuffer,
    k: u32,
    lambda: Lambda,
    j_max: usize,
    convention: Convention,
    limits: &Limits,
) -> Result<ZProfile> {
    if k == 0 {
        return precondition("word length must be >= 1");
    }
    let space = code_space(buf.base(), k)?;
    let windows = convention.window_count(lambda, space)?;
    let windows =
        usize::try_from(windows).map_err(|_| Error::ResourceCap(format!("{windows} windows")))?;
    let spec = WindowSpec::new(k, 1, windows);
    if spec.reach() > buf.len() {
        return precondition(format!(
            "z-profile needs {} digits (k={k}, lambda={lambda}, convention {convention}), buffer has {}",
            spec.reach(),
            buf.len()
        ));
    }
    let table = words::count_words(buf, &spec, limits)?;
    let hist = words::histogram(&table, j_max)?;
    Ok(ZProfile {
        base: buf.base(),
        k,
        lambda,
        convention,
        window_count: windows as u64,
        denominator: space,
        counts: hist.counts,
        overflow: hist.overflow,
    })
}

/// Deviation of a profile from the Poisson reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZDeviation {
    /// `|Z_j − pmf_j|` for `j = 0..=j_max`.
    pub per_j: Vec<f64>,
    pub sup: f64,
    pub l1: f64,
}

pub fn z_deviation(profile: &ZProfile, reference: &PoissonRef) -> Result<ZDeviation> {
    if (reference.lambda - profile.lambda.to_f64()).abs() > 1e-12 * reference.lambda.max(1.0) {
        return precondition(format!(
            "reference lambda {} does not match profile lambda {}",
            reference.lambda, profile.lambda
        ));
    }
    Ok(deviation_from(&profile.values(), reference))
}

pub(crate) fn deviation_from(z: &[f64], reference: &PoissonRef) -> ZDeviation {
    let per_j: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(j, &v)| (v - reference.get(j)).abs())
        .collect();
    let sup = per_j.iter().copied().fold(0.0, f64::max);
    let l1 = per_j.iter().sum();
    ZDeviation { per_j, sup, l1 }
}

/// The `k` in `k_range` with `|Z^λ_{j,k} − e^{−λ}λ^j/j!| < ε`.
pub fn weakly_poisson_scan(
    buf: &DigitBuffer,
    lambda: Lambda,
    j: usize,
    epsilon: f64,
    k_range: RangeInclusive<u32>,
    convention: Convention,
    limits: &Limits,
) -> Result<Vec<u32>> {
    let pmf = poisson_pmf(lambda.to_f64(), j as u64);
    let mut hits = Vec::new();
    for k in k_range {
        let p = z_profile(buf, k, lambda, j, convention, limits)?;
        if (p.z_f64(j) - pmf).abs() < epsilon {
            hits.push(k);
        }
    }
    Ok(hits)
}

/// Empirical law of `M^x_k(S)(v)` for `S = (lo, hi]` and `v` uniform over
/// words of length `k`: `words_with[j]` words occur exactly `j` times among
/// the windows starting at integer positions in `(lo·b^k, hi·b^k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountDistribution {
    pub k: u32,
    pub first_position: u64,
    pub window_count: u64,
    /// `b^k`.
    pub denominator: u64,
    pub words_with: BTreeMap<u64, u64>,
}

impl CountDistribution {
    pub fn probability(&self, j: u64) -> Ratio<u64> {
        Ratio::new(
            self.words_with.get(&j).copied().unwrap_or(0),
            self.denominator,
        )
    }

    /// Probabilities for `j = 0..=max observed j`.
    pub fn probabilities(&self) -> Vec<f64> {
        let top = self.words_with.keys().next_back().copied().unwrap_or(0);
        (0..=top)
            .map(|j| self.words_with.get(&j).copied().unwrap_or(0) as f64 / self.denominator as f64)
            .collect()
    }
}

pub fn count_distribution(
    buf: &DigitBuffer,
    k: u32,
    lo: Ratio<u64>,
    hi: Ratio<u64>,
    limits: &Limits,
) -> Result<CountDistribution> {
    if k == 0 {
        return precondition("word length must be >= 1");
    }
    if *lo.denom() == 0 || *hi.denom() == 0 || lo > hi {
        return precondition(format!("need 0 <= lo <= hi, got ({lo}, {hi}]"));
    }
    let space = code_space(buf.base(), k)?;
    let start = floor_times(lo, space)?;
    let end = floor_times(hi, space)?;
    let windows = end - start;
    let mut words_with = BTreeMap::new();
    if windows == 0 {
        words_with.insert(0, space);
    } else {
        let count = usize::try_from(windows)
            .map_err(|_| Error::ResourceCap(format!("{windows} windows")))?;
        let spec = WindowSpec::new(k, start as usize + 1, count);
        if spec.reach() > buf.len() {
            return precondition(format!(
                "count distribution needs {} digits, buffer has {}",
                spec.reach(),
                buf.len()
            ));
        }
        let table = words::count_words(buf, &spec, limits)?;
        let absent = table.absent();
        if absent > 0 {
            words_with.insert(0, absent);
        }
        for (_, c) in table.nonzero() {
            *words_with.entry(c).or_insert(0) += 1;
        }
    }
    Ok(CountDistribution {
        k,
        first_position: start + 1,
        window_count: windows,
        denominator: space,
        words_with,
    })
}

/// Guards table sizes before a caller materializes a buffer.
pub fn required_length(
    base: Base,
    k: u32,
    lambda: Lambda,
    convention: Convention,
) -> Result<usize> {
    let space = code_space(base, k)?;
    let w = convention.window_count(lambda, space)?;
    let reach = w.checked_add(u64::from(k)).map(|v| v - 1);
    match reach.and_then(|r| usize::try_from(r).ok()) {
        Some(r) => Ok(r),
        None => resource(format!(
            "prefix for k={k}, lambda={lambda} does not fit in memory"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::DigitSource;
    use proptest::prelude::*;

    fn lim() -> Limits {
        Limits::default()
    }

    fn b2() -> Base {
        Base::new(2).unwrap()
    }

    fn lam(p: u64, q: u64) -> Lambda {
        Lambda::new(p, q).unwrap()
    }

    #[test]
    fn lambda_parse_and_floor() {
        let l: Lambda = "6/4".parse().unwrap();
        assert_eq!((l.numer(), l.denom()), (3, 2));
        assert_eq!(l.to_string(), "3/2");
        assert_eq!(l.floor_times(5).unwrap(), 7);
        assert!("0/3".parse::<Lambda>().is_err());
        assert!("x".parse::<Lambda>().is_err());
        assert_eq!("2".parse::<Lambda>().unwrap(), lam(2, 1));
    }

    #[test]
    fn constant_zero_profile() {
        let buf = DigitSource::constant(b2(), 0)
            .unwrap()
            .materialize(6, &lim())
            .unwrap();
        let p = z_profile(&buf, 2, lam(1, 1), 8, Convention::A, &lim()).unwrap();
        assert_eq!(p.window_count, 5);
        assert_eq!(p.z(0), Ratio::new(3, 4));
        assert_eq!(p.z(5), Ratio::new(1, 4));
        for j in [1, 2, 3, 4, 6, 7, 8] {
            assert_eq!(p.counts[j], 0);
        }
        let reference = PoissonRef::new(1.0, 8).unwrap();
        let dev = z_deviation(&p, &reference).unwrap();
        assert!(dev.sup >= 0.75 - (-1f64).exp() - 1e-12);
        assert!((dev.sup - 0.382).abs() < 1e-3);
    }

    #[test]
    fn profile_needs_enough_digits() {
        let buf = DigitSource::constant(b2(), 0)
            .unwrap()
            .materialize(5, &lim())
            .unwrap();
        assert!(z_profile(&buf, 2, lam(1, 1), 8, Convention::A, &lim()).is_err());
        assert!(z_profile(&buf, 2, lam(1, 1), 8, Convention::B, &lim()).is_ok());
    }

    #[test]
    fn de_bruijn_profile_convention_b() {
        let b3 = Base::new(3).unwrap();
        let buf = DigitSource::de_bruijn(b3, 4)
            .unwrap()
            .materialize(81 + 4, &lim())
            .unwrap();
        let p = z_profile(&buf, 4, lam(1, 1), 8, Convention::B, &lim()).unwrap();
        assert_eq!(p.z(1), Ratio::new(1, 1));
    }

    #[test]
    fn deviation_zero_against_itself() {
        let reference = PoissonRef::new(1.0, 10).unwrap();
        let dev = deviation_from(&reference.pmf, &reference);
        assert_eq!((dev.sup, dev.l1), (0.0, 0.0));
    }

    #[test]
    fn deviation_rejects_lambda_mismatch() {
        let buf = DigitSource::constant(b2(), 0)
            .unwrap()
            .materialize(6, &lim())
            .unwrap();
        let p = z_profile(&buf, 2, lam(1, 1), 8, Convention::A, &lim()).unwrap();
        assert!(z_deviation(&p, &PoissonRef::new(2.0, 8).unwrap()).is_err());
    }

    #[test]
    fn weakly_scan_bounds() {
        let buf = DigitSource::constant(b2(), 0)
            .unwrap()
            .materialize(1000, &lim())
            .unwrap();
        assert!(
            weakly_poisson_scan(&buf, lam(1, 1), 0, 0.05, 2..=8, Convention::A, &lim())
                .unwrap()
                .is_empty()
        );
        assert_eq!(
            weakly_poisson_scan(&buf, lam(1, 1), 0, 2.0, 2..=8, Convention::A, &lim()).unwrap(),
            (2..=8).collect::<Vec<_>>()
        );
    }

    #[test]
    fn weakly_scan_random() {
        let buf = DigitSource::random(b2(), 42)
            .materialize(1 << 15, &lim())
            .unwrap();
        let hits =
            weakly_poisson_scan(&buf, lam(1, 1), 0, 0.05, 8..=14, Convention::A, &lim()).unwrap();
        assert_eq!(hits, (8..=14).collect::<Vec<_>>());
    }

    #[test]
    fn empty_interval_is_point_mass() {
        let buf = DigitSource::random(b2(), 1)
            .materialize(100, &lim())
            .unwrap();
        let half = Ratio::new(1, 2);
        let d = count_distribution(&buf, 4, half, half, &lim()).unwrap();
        assert_eq!(d.probability(0), Ratio::new(1, 1));
        assert_eq!(d.window_count, 0);
    }

    #[test]
    fn random_interval_distribution_close_to_poisson() {
        let buf = DigitSource::random(b2(), 42)
            .materialize(4096 + 12, &lim())
            .unwrap();
        let d = count_distribution(&buf, 12, Ratio::new(1, 2), Ratio::new(3, 4), &lim()).unwrap();
        let po = PoissonRef::new(0.25, 40).unwrap();
        assert!(tv_distance(&d.probabilities(), &po.pmf) < 0.05);
    }

    #[test]
    fn random_profile_k16() {
        let buf = DigitSource::random(b2(), 42)
            .materialize((1 << 16) + 16, &lim())
            .unwrap();
        let p = z_profile(&buf, 16, lam(1, 1), 64, Convention::A, &lim()).unwrap();
        for j in 0..=5 {
            assert!(
                (p.z_f64(j) - poisson_pmf(1.0, j as u64)).abs() < 0.01,
                "j={j}"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn profile_normalized_and_conventions_close(
            seed in any::<u64>(), b in 2u32..=4, k in 1u32..=6, p in 1u64..=8, q in 1u64..=4,
        ) {
            let base = Base::new(b).unwrap();
            let l = lam(p, q);
            let n = required_length(base, k, l, Convention::A).unwrap();
            let buf = DigitSource::random(base, seed).materialize(n, &lim()).unwrap();
            let a = z_profile(&buf, k, l, 16, Convention::A, &lim()).unwrap();
            let bb = z_profile(&buf, k, l, 16, Convention::B, &lim()).unwrap();
            prop_assert_eq!(a.counts.iter().sum::<u64>() + a.overflow, a.denominator);
            prop_assert_eq!(bb.counts.iter().sum::<u64>() + bb.overflow, bb.denominator);
            let l1: u64 = a.counts.iter().zip(&bb.counts).map(|(x, y)| x.abs_diff(*y)).sum::<u64>()
                + a.overflow.abs_diff(bb.overflow);
            prop_assert!(l1 <= 4);

            // Z from M over (0, λ] is convention B.
            let d = count_distribution(&buf, k, Ratio::new(0, 1), l.ratio(), &lim()).unwrap();
            for j in 0..=16u64 {
                prop_assert_eq!(d.words_with.get(&j).copied().unwrap_or(0), bb.counts[j as usize]);
            }
        }
    }
}
