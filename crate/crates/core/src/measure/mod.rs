//! Exact b-adic measure: interval sets, the `Bad` family, and the digit
//! selection algorithm built on them.

mod algorithm;
mod bad;
mod interval;

pub use algorithm::{
    run_algorithm, AlgorithmConfig, AlgorithmRun, Exclusion, StepSpec, ThresholdRule, TraceRecord,
};
pub use bad::{
    bad_k, bad_k_specs, bad_set, bad_set_with_leaves, check_fact1_bound, e_set, fact1_bound,
    lambda_set, BadSpec, BoundStatus, Fact1Report, JSelect,
};
pub use interval::{Cylinder, IntervalSet};
