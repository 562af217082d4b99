//! Exponent schedules `k_0 < k_1 < …` and the block layouts they induce.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::zseq::{ZDomain, ZSequence};
use crate::config::Limits;
use crate::digits::Base;
use crate::error::{precondition, resource, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Fast-growing schedule, `k_i > 2k_{i−1}`; default rule
    /// `k_i = 2k_{i−1} + i + 2`.
    Boldfast,
    /// `k_i` is the least integer with `k_i > k_{i−1}` and `k_i > z(i)`.
    Light,
    /// Powers of two; default rule `k_i = 2k_{i−1}`.
    D2bold,
    /// `k_i` is the least power of two with `k_i > k_{i−1}` and `k_i > z(i)`.
    D2light,
}

impl Flavor {
    pub fn is_d2(self) -> bool {
        matches!(self, Flavor::D2bold | Flavor::D2light)
    }

    pub fn domain(self) -> ZDomain {
        if self.is_d2() {
            ZDomain::D2
        } else {
            ZDomain::Bold
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Boldfast => "boldfast",
            Flavor::Light => "light",
            Flavor::D2bold => "d2bold",
            Flavor::D2light => "d2light",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boldfast" => Ok(Flavor::Boldfast),
            "light" => Ok(Flavor::Light),
            "d2bold" => Ok(Flavor::D2bold),
            "d2light" => Ok(Flavor::D2light),
            other => precondition(format!("unknown schedule flavor {other:?}")),
        }
    }
}

/// How to build a schedule: `k_0`, the number of steps, and optionally the
/// exponents `k_1, …` themselves (bold flavors only).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub flavor: Flavor,
    pub k0: u32,
    pub steps: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u32>>,
}

impl ScheduleSpec {
    pub fn new(flavor: Flavor, k0: u32, steps: u32) -> Self {
        Self {
            flavor,
            k0,
            steps,
            exponents: None,
        }
    }

    pub fn explicit(flavor: Flavor, k0: u32, exponents: Vec<u32>) -> Self {
        Self {
            flavor,
            k0,
            steps: exponents.len() as u32,
            exponents: Some(exponents),
        }
    }
}

/// Sub-blocks of step `i`, as 1-based half-open position ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Blocks {
    /// `B'_i = [start, copy_end)` copies x; `[copy_end, end)` is zero.
    Bold { z: u64, copy_end: u64 },
    /// `B¹ = [start, b1_end)` copies x, `B² = [b1_end, b2_end)` is zero and
    /// `B³ = [b2_end, end)` replays x from `start`.
    D2 {
        z_even: u64,
        z_odd: u64,
        b1_end: u64,
        b2_end: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepLayout {
    pub step: u32,
    pub k: u32,
    /// `b^{k_{i−1}}`.
    pub start: u64,
    /// `b^{k_i}`.
    pub end: u64,
    pub blocks: Blocks,
}

impl StepLayout {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// `(|B'|, zeros)` or `(|B¹|, |B²|, |B³|)` flattened into a vector.
    pub fn part_lengths(&self) -> Vec<u64> {
        match self.blocks {
            Blocks::Bold { copy_end, .. } => vec![copy_end - self.start, self.end - copy_end],
            Blocks::D2 { b1_end, b2_end, .. } => {
                vec![b1_end - self.start, b2_end - b1_end, self.end - b2_end]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub flavor: Flavor,
    pub base: Base,
    /// `k_0, k_1, …, k_steps`.
    pub exponents: Vec<u32>,
    pub layout: Vec<StepLayout>,
}

impl Schedule {
    /// Last position covered by the schedule, `b^{k_last} − 1`.
    pub fn last_position(&self) -> u64 {
        self.layout.last().map(|s| s.end - 1).unwrap_or(0)
    }
}

fn least_power_of_two_above(v: u64) -> u64 {
    (v + 1).next_power_of_two()
}

fn pow(base: Base, k: u32, limits: &Limits) -> Result<u64> {
    match base.pow(k) {
        Some(v) if v <= limits.max_positions => Ok(v),
        _ => resource(format!(
            "b^k = {base}^{k} exceeds the position cap {}",
            limits.max_positions
        )),
    }
}

pub fn build_schedule(
    spec: &ScheduleSpec,
    z: &ZSequence,
    base: Base,
    limits: &Limits,
) -> Result<Schedule> {
    let flavor = spec.flavor;
    let domain = flavor.domain();
    if flavor.is_d2() && !u64::from(spec.k0).is_power_of_two() {
        return precondition(format!(
            "d2 schedules need k_0 a power of two, got {}",
            spec.k0
        ));
    }
    if spec.exponents.is_some() && matches!(flavor, Flavor::Light | Flavor::D2light) {
        return precondition("light schedules are determined by z; explicit exponents not allowed");
    }

    let mut exponents = vec![spec.k0];
    for i in 1..=spec.steps {
        let prev = *exponents.last().expect("k_0 present");
        let k = match (&spec.exponents, flavor) {
            (Some(list), _) => *list
                .get(i as usize - 1)
                .ok_or_else(|| Error::Precondition("fewer explicit exponents than steps".into()))?,
            (None, Flavor::Boldfast) => 2 * prev + i + 2,
            (None, Flavor::D2bold) => 2 * prev.max(1),
            (None, Flavor::Light) => {
                let zi = z.value(u64::from(i), domain)?;
                u32::try_from(u64::from(prev).max(zi) + 1)
                    .map_err(|_| Error::ResourceCap(format!("k_{i} overflows")))?
            }
            (None, Flavor::D2light) => {
                let zi = z.value(u64::from(i), domain)?;
                u32::try_from(least_power_of_two_above(u64::from(prev).max(zi)))
                    .map_err(|_| Error::ResourceCap(format!("k_{i} overflows")))?
            }
        };
        if k <= prev {
            return precondition(format!("schedule not increasing: k_{i} = {k} <= {prev}"));
        }
        if flavor == Flavor::Boldfast && k <= 2 * prev {
            return precondition(format!(
                "boldfast needs k_i > 2k_(i-1): k_{i} = {k}, k_{} = {prev}",
                i - 1
            ));
        }
        if flavor.is_d2() && !k.is_power_of_two() {
            return precondition(format!("d2 schedules need powers of two: k_{i} = {k}"));
        }
        exponents.push(k);
    }

    let mut layout = Vec::with_capacity(spec.steps as usize);
    for i in 1..=spec.steps {
        let k = exponents[i as usize];
        let start = pow(base, exponents[i as usize - 1], limits)?;
        let end = pow(base, k, limits)?;
        // Enough room for the first i - 1 positions of B_i to carry distinct
        // starting material; only fails for degenerate tiny schedules.
        if end - start <= u64::from(i - 1) {
            return precondition(format!("step {i}: block [{start}, {end}) too short"));
        }
        let blocks = if flavor.is_d2() {
            let z_even = z.value(2 * u64::from(i), domain)?;
            let z_odd = z.value(2 * u64::from(i) + 1, domain)?;
            // 1/z_even + 1/z_odd <= 1/2
            if 2 * (u128::from(z_even) + u128::from(z_odd)) > u128::from(z_even) * u128::from(z_odd)
            {
                return precondition(format!(
                    "step {i}: 1/z({}) + 1/z({}) = 1/{z_even} + 1/{z_odd} exceeds 1/2",
                    2 * i,
                    2 * i + 1
                ));
            }
            let b2_end = end - end / z_odd;
            let b1_end = b2_end - end / z_even;
            if b1_end <= start {
                return precondition(format!("step {i}: B1 is empty"));
            }
            Blocks::D2 {
                z_even,
                z_odd,
                b1_end,
                b2_end,
            }
        } else {
            let zi = z.value(u64::from(i), domain)?;
            // ⌈(1 − 1/z)·b^k⌉, kept inside B_i.
            let copy_end = (end - end / zi).max(start);
            Blocks::Bold { z: zi, copy_end }
        };
        layout.push(StepLayout {
            step: i,
            k,
            start,
            end,
            blocks,
        });
    }
    Ok(Schedule {
        flavor,
        base,
        exponents,
        layout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::zseq::TailRule;

    fn lim() -> Limits {
        Limits::default()
    }

    fn b2() -> Base {
        Base::new(2).unwrap()
    }

    #[test]
    fn light_rule() {
        let z: ZSequence = "3,5,4;tail=const:2".parse().unwrap();
        let s = build_schedule(&ScheduleSpec::new(Flavor::Light, 0, 3), &z, b2(), &lim()).unwrap();
        assert_eq!(s.exponents, vec![0, 4, 6, 7]);
    }

    #[test]
    fn d2light_rule() {
        let z = ZSequence::split(TailRule::Identity, TailRule::Constant { value: 4 });
        let s =
            build_schedule(&ScheduleSpec::new(Flavor::D2light, 2, 2), &z, b2(), &lim()).unwrap();
        assert_eq!(s.exponents, vec![2, 8, 16]);
        for (i, &k) in s.exponents.iter().enumerate().skip(1) {
            assert!(k.is_power_of_two());
            assert!(u64::from(k) > z.value(i as u64, ZDomain::D2).unwrap());
        }
    }

    #[test]
    fn boldfast_boundary() {
        let z = ZSequence::constant(2);
        let ok = ScheduleSpec::explicit(Flavor::Boldfast, 3, vec![7]);
        assert!(build_schedule(&ok, &z, b2(), &lim()).is_ok());
        let bad = ScheduleSpec::explicit(Flavor::Boldfast, 3, vec![6]);
        assert!(matches!(
            build_schedule(&bad, &z, b2(), &lim()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn boldfast_default_rule() {
        let s = build_schedule(
            &ScheduleSpec::new(Flavor::Boldfast, 1, 2),
            &ZSequence::constant(2),
            b2(),
            &lim(),
        )
        .unwrap();
        assert_eq!(s.exponents, vec![1, 5, 14]);
        assert_eq!(
            s.layout[1].blocks,
            Blocks::Bold {
                z: 2,
                copy_end: 1 << 13
            }
        );
    }

    #[test]
    fn position_cap() {
        let r = build_schedule(
            &ScheduleSpec::new(Flavor::Boldfast, 4, 3),
            &ZSequence::constant(2),
            b2(),
            &lim(),
        );
        assert!(matches!(r, Err(Error::ResourceCap(_))));
    }

    #[test]
    fn d2_budget_enforced() {
        let z = ZSequence::split(
            TailRule::Constant { value: 2 },
            TailRule::Constant { value: 8 },
        );
        let r = build_schedule(&ScheduleSpec::new(Flavor::D2bold, 2, 2), &z, b2(), &lim());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn d2_explicit_not_power_of_two() {
        let z = ZSequence::constant(4);
        let r = build_schedule(
            &ScheduleSpec::explicit(Flavor::D2bold, 2, vec![6]),
            &z,
            b2(),
            &lim(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn partitions_are_exact() {
        let z: ZSequence = "even=id,odd=const:4".parse().unwrap();
        let base = Base::new(3).unwrap();
        let s = build_schedule(&ScheduleSpec::new(Flavor::D2bold, 2, 2), &z, base, &lim()).unwrap();
        for step in &s.layout {
            assert_eq!(step.part_lengths().iter().sum::<u64>(), step.len());
            let parts = step.part_lengths();
            if let Blocks::D2 { z_even, z_odd, .. } = step.blocks {
                assert_eq!(parts[1], step.end / z_even);
                assert_eq!(parts[2], step.end / z_odd);
            }
        }
        let z: ZSequence = "tail=affine:3:2".parse().unwrap();
        let s = build_schedule(&ScheduleSpec::new(Flavor::Light, 1, 3), &z, base, &lim()).unwrap();
        for step in &s.layout {
            assert_eq!(step.part_lengths().iter().sum::<u64>(), step.len());
        }
    }
}
