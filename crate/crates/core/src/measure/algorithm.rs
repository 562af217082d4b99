//! Digit selection over nested b-adic intervals: at step `n` the interval
//! `I_{n−1}` is cut into `b` equal parts and the leftmost part whose
//! intersection with `E_{n_0+1} ∩ … ∩ E_n` has measure above the threshold
//! becomes `I_n`; its index is the `n`-th digit.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::bad::{bad_k, bad_k_specs, bad_set, BadSpec};
use super::interval::{Cylinder, IntervalSet};
use crate::config::Limits;
use crate::digits::Base;
use crate::error::{precondition, resource, Error, Result};

/// One family of sets removed from the unit interval to form `E_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exclusion {
    /// `Bad_k` for every `k` in `lo..hi`.
    BadKRange { lo: u64, hi: u64 },
    /// A single `Bad(λ, k, j, ε)` with free `ε`.
    Bad { spec: BadSpec },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepSpec {
    pub exclusions: Vec<Exclusion>,
}

impl StepSpec {
    /// `E_n = (0,1) ∖ ⋃_{N_n <= k < N_{n+1}} Bad_k` with `N_n = b^{2n}`.
    pub fn standard(base: Base, n: u32) -> Self {
        let b = u64::from(base.get());
        let n_of = |m: u32| b.checked_pow(2 * m).unwrap_or(u64::MAX);
        Self {
            exclusions: vec![Exclusion::BadKRange {
                lo: n_of(n),
                hi: n_of(n + 1),
            }],
        }
    }

    pub fn bad_k(ks: impl IntoIterator<Item = u32>) -> Self {
        Self {
            exclusions: ks
                .into_iter()
                .map(|k| Exclusion::BadKRange {
                    lo: u64::from(k),
                    hi: u64::from(k) + 1,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ThresholdRule {
    /// `1/N_n = b^{−2n}`.
    Standard,
    /// `(num/den)^n`.
    Geometric { num: u64, den: u64 },
}

impl ThresholdRule {
    pub fn at(&self, base: Base, n: u32) -> BigRational {
        match *self {
            ThresholdRule::Standard => {
                BigRational::new(BigInt::one(), BigInt::from(base.get()).pow(2 * n))
            }
            ThresholdRule::Geometric { num, den } => {
                BigRational::new(BigInt::from(num).pow(n), BigInt::from(den).pow(n))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub base: Base,
    pub n0: u32,
    /// `steps[i]` defines `E_{n_0 + 1 + i}`.
    pub steps: Vec<StepSpec>,
    pub threshold: ThresholdRule,
}

impl AlgorithmConfig {
    /// The literal schedule: `N_n = b^{2n}` and threshold `1/N_n`.
    pub fn standard(base: Base, n0: u32, steps: u32) -> Self {
        Self {
            base,
            n0,
            steps: (1..=steps)
                .map(|i| StepSpec::standard(base, n0 + i))
                .collect(),
            threshold: ThresholdRule::Standard,
        }
    }

    /// Refuses configurations whose sets cannot be enumerated within the cap.
    pub fn check_feasibility(&self, limits: &Limits) -> Result<()> {
        for (i, step) in self.steps.iter().enumerate() {
            let n = self.n0 + 1 + i as u32;
            for ex in &step.exclusions {
                match ex {
                    Exclusion::BadKRange { lo, hi } => {
                        for k in *lo..*hi {
                            let k = u32::try_from(k).map_err(|_| {
                                Error::ResourceCap(format!(
                                    "step {n}: k = {k} is beyond exact enumeration"
                                ))
                            })?;
                            for spec in bad_k_specs(self.base, k)? {
                                spec.check_cap(limits)
                                    .map_err(|e| Error::ResourceCap(format!("step {n}: {e}")))?;
                            }
                        }
                    }
                    Exclusion::Bad { spec } => {
                        if spec.base != self.base {
                            return precondition(format!(
                                "step {n}: Bad set in base {}",
                                spec.base
                            ));
                        }
                        spec.check_cap(limits)?;
                    }
                }
            }
        }
        if self.n0 as usize + self.steps.len() > 40 {
            return resource("more than 40 algorithm steps");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub n: u32,
    pub chosen_digit: u32,
    pub interval: Cylinder,
    /// `μ(I_n ∩ E_{n_0+1} ∩ … ∩ E_n)`.
    pub measure: BigRational,
    pub threshold: BigRational,
    /// The same measure for each of the `b` candidate parts.
    pub candidates: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmRun {
    pub trace: Vec<TraceRecord>,
    pub digits: Vec<u8>,
}

fn step_set(base: Base, step: &StepSpec, limits: &Limits) -> Result<IntervalSet> {
    let mut parts = Vec::new();
    for ex in &step.exclusions {
        match ex {
            Exclusion::BadKRange { lo, hi } => {
                for k in *lo..*hi {
                    parts.push(bad_k(base, k as u32, limits)?);
                }
            }
            Exclusion::Bad { spec } => parts.push(bad_set(spec, limits)?),
        }
    }
    Ok(IntervalSet::union_all(base, &parts)?.complement())
}

pub fn run_algorithm(config: &AlgorithmConfig, limits: &Limits) -> Result<AlgorithmRun> {
    config.check_feasibility(limits)?;
    let base = config.base;
    let mut cache: HashMap<&StepSpec, IntervalSet> = HashMap::new();
    let mut interval = Cylinder::UNIT;
    // E_{n_0+1} ∩ … ∩ E_n restricted to I_n.
    let mut running = IntervalSet::unit(base);
    let mut trace = Vec::with_capacity(config.steps.len());
    let mut digits = Vec::with_capacity(config.steps.len());

    for (i, step) in config.steps.iter().enumerate() {
        let n = config.n0 + 1 + i as u32;
        if !cache.contains_key(step) {
            cache.insert(step, step_set(base, step, limits)?);
        }
        running = running.intersect(&cache[step])?;
        let threshold = config.threshold.at(base, n);

        let mut candidates = Vec::with_capacity(base.get() as usize);
        let mut chosen = None;
        for v in 0..base.get() {
            let part = IntervalSet::from_cylinder(base, interval.child(base, v))?;
            let m = running.intersect(&part)?.measure();
            if chosen.is_none() && m > threshold {
                chosen = Some((v, part));
            }
            candidates.push(m);
        }
        let Some((v, part)) = chosen else {
            let best = candidates.iter().max().cloned().unwrap_or_default();
            return Err(Error::NoAdmissibleDigit {
                step: n,
                best: best.to_string(),
                threshold: threshold.to_string(),
            });
        };
        interval = interval.child(base, v);
        running = running.intersect(&part)?;
        let measure = candidates[v as usize].clone();
        debug_assert_eq!(measure, running.measure());
        digits.push(v as u8);
        trace.push(TraceRecord {
            n,
            chosen_digit: v,
            interval,
            measure,
            threshold,
            candidates,
        });
    }
    Ok(AlgorithmRun { trace, digits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Lambda;
    use num_rational::Ratio;

    fn lim() -> Limits {
        Limits::default()
    }

    fn b2() -> Base {
        Base::new(2).unwrap()
    }

    #[test]
    fn empty_steps_pick_zero() {
        let cfg = AlgorithmConfig {
            base: Base::new(3).unwrap(),
            n0: 0,
            steps: vec![StepSpec::default(); 6],
            threshold: ThresholdRule::Standard,
        };
        let run = run_algorithm(&cfg, &lim()).unwrap();
        assert_eq!(run.digits, vec![0; 6]);
        assert_eq!(run.trace[5].interval, Cylinder { level: 6, index: 0 });
    }

    #[test]
    fn toy_bad_family_run() {
        let step = StepSpec {
            exclusions: (0..4)
                .map(|j| Exclusion::Bad {
                    spec: BadSpec::new(b2(), Lambda::integer(1).unwrap(), 2, j, Ratio::new(1, 2)),
                })
                .collect(),
        };
        let cfg = AlgorithmConfig {
            base: b2(),
            n0: 0,
            steps: vec![step; 8],
            threshold: ThresholdRule::Geometric { num: 1, den: 4 },
        };
        let run = run_algorithm(&cfg, &lim()).unwrap();
        assert_eq!(run.digits.len(), 8);
        let mut prev: Option<Cylinder> = None;
        for rec in &run.trace {
            assert!(rec.measure > rec.threshold);
            assert_eq!(rec.interval.level, rec.n);
            if let Some(p) = prev {
                assert!(p.contains(b2(), rec.interval));
                assert_eq!(rec.interval.index % 2, u64::from(rec.chosen_digit));
            }
            prev = Some(rec.interval);
        }
        assert_eq!(run_algorithm(&cfg, &lim()).unwrap(), run);
    }

    #[test]
    fn standard_schedule_is_infeasible() {
        let cfg = AlgorithmConfig::standard(b2(), 0, 2);
        assert!(matches!(
            cfg.check_feasibility(&lim()),
            Err(Error::ResourceCap(_))
        ));
        assert!(matches!(
            run_algorithm(&cfg, &lim()),
            Err(Error::ResourceCap(_))
        ));
    }

    #[test]
    fn no_admissible_digit_reported() {
        let cfg = AlgorithmConfig {
            base: b2(),
            n0: 0,
            steps: vec![StepSpec::default(); 2],
            threshold: ThresholdRule::Geometric { num: 1, den: 1 },
        };
        assert!(matches!(
            run_algorithm(&cfg, &lim()),
            Err(Error::NoAdmissibleDigit { step: 1, .. })
        ));
    }
}
