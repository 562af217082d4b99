//! Fully resolved commands. A [`Job`] is what the manifest records, so running
//! the same job again produces the same report.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use pgen_core::constructions::{ConstructionSpec, ScheduleSpec};
use pgen_core::digits::{io as digit_io, DigitFormat};
use pgen_core::measure::{
    bad_k, bad_set, check_fact1_bound, e_set, lambda_set, run_algorithm, AlgorithmConfig, BadSpec,
    Exclusion, JSelect, StepSpec, ThresholdRule,
};
use pgen_core::stats::{
    count_distribution, discrepancy, normality_deviation, required_length, tv_distance, tv_poisson,
    weakly_poisson_scan, z_deviation, z_profile, PoissonRef,
};
use pgen_core::{Base, Convention, DigitSource, Error, Lambda, Limits, Result, SourceKind};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{Cli, Command, MeasureCommand, OutputFormat, ScheduleKind};
use crate::output::{big, big_parts, small, Output, Table};

pub const TOOL: &str = "pgen";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub format: OutputFormat,
    pub job: Job,
}

impl Manifest {
    pub fn new(job: Job, format: OutputFormat) -> Self {
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            format,
            job,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Job {
    Gen {
        source: DigitSource,
        length: Option<u64>,
        out: PathBuf,
        out_format: DigitFormat,
    },
    Zstats {
        source: DigitSource,
        k: u32,
        lambda: Lambda,
        j_max: usize,
        convention: Convention,
    },
    Scan {
        source: DigitSource,
        k_lo: u32,
        k_hi: u32,
        lambdas: Vec<Lambda>,
        js: Vec<usize>,
        convention: Convention,
    },
    Construct {
        base: Base,
        z_spec: String,
        spec: ConstructionSpec,
        length: Option<u64>,
        out: PathBuf,
        out_format: DigitFormat,
    },
    MeasureBad {
        spec: BadSpec,
    },
    MeasureBadk {
        base: Base,
        k: u32,
    },
    MeasureEset {
        base: Base,
        k_lo: u32,
        k_hi: u32,
    },
    MeasureFact1 {
        base: Base,
        k_lo: u32,
        k_hi: u32,
    },
    MeasureAlgorithm {
        config: AlgorithmConfig,
    },
    Tv {
        source: DigitSource,
        k: u32,
        lambda: Lambda,
        lambda_prime: Lambda,
    },
    Normality {
        source: DigitSource,
        n: usize,
        max_len: u32,
    },
    Discrepancy {
        source: DigitSource,
        word: String,
        n: usize,
    },
    Weakly {
        source: DigitSource,
        lambda: Lambda,
        j: usize,
        epsilon: f64,
        k_lo: u32,
        k_hi: u32,
        convention: Convention,
    },
}

fn pre(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

/// Parses the `--source` grammar.
pub fn parse_source(spec: &str, base: Base, seed: u64) -> Result<DigitSource> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a)),
        None => (spec.trim(), None),
    };
    let num = |what: &str| -> Result<u64> {
        arg.ok_or_else(|| pre(format!("{what} needs an argument, e.g. {what}:3")))?
            .trim()
            .parse()
            .map_err(|_| pre(format!("cannot parse the argument of {spec:?}")))
    };
    match kind {
        "random" => Ok(DigitSource::random(
            base,
            if arg.is_some() { num("random")? } else { seed },
        )),
        "constant" => {
            let d = u8::try_from(num("constant")?).map_err(|_| pre("digit too large"))?;
            DigitSource::constant(base, d)
        }
        "champernowne" => Ok(DigitSource::champernowne(base)),
        "debruijn" => DigitSource::de_bruijn(base, num("debruijn")? as u32),
        "xdebruijn" => DigitSource::extended_de_bruijn(base, num("xdebruijn")? as u32),
        "file" => {
            let path =
                PathBuf::from(arg.ok_or_else(|| pre("file needs a path, e.g. file:digits.txt"))?);
            let format = detect_format(&path)?;
            Ok(DigitSource::new(base, SourceKind::File { path, format }))
        }
        other => Err(pre(format!("unknown source {other:?}"))),
    }
}

fn detect_format(path: &Path) -> Result<DigitFormat> {
    let mut head = [0u8; 4];
    let mut f = File::open(path)?;
    let n = f.read(&mut head)?;
    Ok(if n == 4 && &head == digit_io::MAGIC {
        DigitFormat::Packed
    } else {
        DigitFormat::Ascii
    })
}

fn parse_word(word: &str, base: Base) -> Result<Vec<u8>> {
    word.chars()
        .map(|c| match c.to_digit(36) {
            Some(d) if d < base.get() => Ok(d as u8),
            _ => Err(pre(format!("symbol {c:?} is not a base-{base} digit"))),
        })
        .collect()
}

fn parse_exclusion(s: &str, base: Base) -> Result<Exclusion> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let bad = || {
        pre(format!(
            "cannot parse exclusion {s:?}; expected badk:K or bad:LAMBDA:K:J:EPS"
        ))
    };
    match parts.as_slice() {
        ["badk", k] => {
            let k: u64 = k.parse().map_err(|_| bad())?;
            Ok(Exclusion::BadKRange { lo: k, hi: k + 1 })
        }
        ["bad", lambda, k, j, eps] => {
            let lambda: Lambda = lambda.parse()?;
            let k: u32 = k.parse().map_err(|_| bad())?;
            let epsilon = crate::args::parse_ratio(eps).map_err(pre)?;
            let j = if *j == "all" {
                JSelect::All
            } else {
                JSelect::One(j.parse().map_err(|_| bad())?)
            };
            Ok(Exclusion::Bad {
                spec: BadSpec {
                    base,
                    lambda,
                    k,
                    j,
                    epsilon,
                },
            })
        }
        _ => Err(bad()),
    }
}

fn parse_threshold(s: &str) -> Result<ThresholdRule> {
    if s.trim() == "standard" {
        return Ok(ThresholdRule::Standard);
    }
    let r = crate::args::parse_ratio(s).map_err(pre)?;
    if *r.numer() == 0 {
        return Err(pre("threshold ratio must be positive"));
    }
    Ok(ThresholdRule::Geometric {
        num: *r.numer(),
        den: *r.denom(),
    })
}

impl Job {
    /// Resolves command-line arguments into a job. `None` for `replay`.
    pub fn from_cli(cli: &Cli) -> Result<Option<Job>> {
        let g = &cli.global;
        let base = Base::new(g.base)?;
        let src = |s: &str| parse_source(s, base, g.seed);
        let conv = g.convention;
        let job = match &cli.command {
            Command::Gen {
                source,
                length,
                out,
                out_format,
            } => Job::Gen {
                source: src(&source.source)?,
                length: *length,
                out: out.clone(),
                out_format: *out_format,
            },
            Command::Zstats {
                source,
                k,
                lambda,
                j_max,
            } => Job::Zstats {
                source: src(&source.source)?,
                k: *k,
                lambda: *lambda,
                j_max: *j_max,
                convention: conv,
            },
            Command::Scan {
                source,
                k_range,
                lambda,
                j,
            } => Job::Scan {
                source: src(&source.source)?,
                k_lo: k_range.0,
                k_hi: k_range.1,
                lambdas: lambda.clone(),
                js: j.clone(),
                convention: conv,
            },
            Command::Construct {
                flavor,
                z,
                k0,
                steps,
                exponents,
                x,
                length,
                out,
                out_format,
            } => {
                let schedule = match exponents {
                    Some(e) => ScheduleSpec::explicit(*flavor, *k0, e.clone()),
                    None => ScheduleSpec::new(*flavor, *k0, *steps),
                };
                Job::Construct {
                    base,
                    z_spec: z.to_string(),
                    spec: ConstructionSpec::new(z.clone(), schedule, src(x)?),
                    length: *length,
                    out: out.clone(),
                    out_format: *out_format,
                }
            }
            Command::Measure(m) => match m {
                MeasureCommand::Bad {
                    lambda,
                    k,
                    j,
                    epsilon,
                } => {
                    let j = if j == "all" {
                        JSelect::All
                    } else {
                        JSelect::One(
                            j.parse()
                                .map_err(|_| pre(format!("cannot parse j {j:?}")))?,
                        )
                    };
                    if *k == 0 {
                        return Err(pre("k must be >= 1"));
                    }
                    let epsilon = epsilon.unwrap_or_else(|| Ratio::new(1, u64::from(*k)));
                    Job::MeasureBad {
                        spec: BadSpec {
                            base,
                            lambda: *lambda,
                            k: *k,
                            j,
                            epsilon,
                        },
                    }
                }
                MeasureCommand::Badk { k } => Job::MeasureBadk { base, k: *k },
                MeasureCommand::Eset { k_range } => Job::MeasureEset {
                    base,
                    k_lo: k_range.0,
                    k_hi: k_range.1,
                },
                MeasureCommand::Fact1 { k_range } => Job::MeasureFact1 {
                    base,
                    k_lo: k_range.0,
                    k_hi: k_range.1,
                },
                MeasureCommand::Algorithm {
                    schedule,
                    n0,
                    steps,
                    k_ranges,
                    exclude,
                    threshold,
                } => {
                    let config = match schedule {
                        ScheduleKind::Standard => AlgorithmConfig::standard(base, *n0, *steps),
                        ScheduleKind::Toy => {
                            let every = exclude
                                .iter()
                                .map(|s| parse_exclusion(s, base))
                                .collect::<Result<Vec<_>>>()?;
                            let steps = (0..*steps as usize)
                                .map(|i| {
                                    let mut exclusions = Vec::new();
                                    if let Some(&(lo, hi)) = k_ranges.get(i) {
                                        exclusions.push(Exclusion::BadKRange {
                                            lo: u64::from(lo),
                                            hi: u64::from(hi) + 1,
                                        });
                                    }
                                    exclusions.extend(every.iter().cloned());
                                    StepSpec { exclusions }
                                })
                                .collect();
                            AlgorithmConfig {
                                base,
                                n0: *n0,
                                steps,
                                threshold: parse_threshold(threshold)?,
                            }
                        }
                    };
                    Job::MeasureAlgorithm { config }
                }
            },
            Command::Tv {
                source,
                k,
                lambda,
                lambda_prime,
            } => Job::Tv {
                source: src(&source.source)?,
                k: *k,
                lambda: *lambda,
                lambda_prime: *lambda_prime,
            },
            Command::Normality { source, n, max_len } => Job::Normality {
                source: src(&source.source)?,
                n: *n,
                max_len: *max_len,
            },
            Command::Discrepancy { source, word, n } => Job::Discrepancy {
                source: src(&source.source)?,
                word: word.clone(),
                n: *n,
            },
            Command::Weakly {
                source,
                lambda,
                j,
                epsilon,
                k_range,
            } => Job::Weakly {
                source: src(&source.source)?,
                lambda: *lambda,
                j: *j,
                epsilon: *epsilon,
                k_lo: k_range.0,
                k_hi: k_range.1,
                convention: conv,
            },
            Command::Replay { .. } => return Ok(None),
        };
        Ok(Some(job))
    }

    pub fn run(&self, limits: &Limits) -> Result<Output> {
        match self {
            Job::Gen {
                source,
                length,
                out,
                out_format,
            } => {
                let buf = match length {
                    Some(n) => source.materialize(to_usize(*n)?, limits)?,
                    None => source.materialize_all(limits)?,
                };
                digit_io::write_digit_file(out, &buf, *out_format)?;
                let mut freq = vec![0u64; buf.base().get() as usize];
                for &d in buf.digits() {
                    freq[d as usize] += 1;
                }
                let mut table = Table::new(vec!["digit", "count"]);
                for (d, c) in freq.iter().enumerate() {
                    table.push(vec![d.to_string(), c.to_string()]);
                }
                let report = json!({
                    "out": out,
                    "format": out_format,
                    "base": buf.base(),
                    "length": buf.len(),
                    "digit_counts": freq,
                });
                Ok(Output::Doc { report, table })
            }
            Job::Zstats {
                source,
                k,
                lambda,
                j_max,
                convention,
            } => {
                let len = required_length(source.base, *k, *lambda, *convention)?;
                let buf = source.materialize(len, limits)?;
                let p = z_profile(&buf, *k, *lambda, *j_max, *convention, limits)?;
                let reference = PoissonRef::new(lambda.to_f64(), *j_max)?;
                let dev = z_deviation(&p, &reference)?;
                let mut table = Table::new(vec!["j", "z_num", "z_den", "z", "pmf", "abs_dev"]);
                for j in 0..=*j_max {
                    table.push(vec![
                        j.to_string(),
                        p.counts[j].to_string(),
                        p.denominator.to_string(),
                        p.z_f64(j).to_string(),
                        reference.get(j).to_string(),
                        dev.per_j[j].to_string(),
                    ]);
                }
                let report = json!({
                    "base": p.base,
                    "k": p.k,
                    "lambda": p.lambda.to_string(),
                    "convention": p.convention,
                    "window_count": p.window_count,
                    "z": (0..=*j_max).map(|j| small(p.z(j))).collect::<Vec<_>>(),
                    "pmf": reference.pmf,
                    "abs_dev": dev.per_j,
                    "sup_dev": dev.sup,
                    "l1_dev": dev.l1,
                    "overflow": small(p.overflow_mass()),
                    "distinct_fraction": p.distinct_fraction(),
                });
                Ok(Output::Doc { report, table })
            }
            Job::Scan {
                source,
                k_lo,
                k_hi,
                lambdas,
                js,
                convention,
            } => scan(source, *k_lo, *k_hi, lambdas, js, *convention, limits),
            Job::Construct {
                base,
                z_spec,
                spec,
                length,
                out,
                out_format,
            } => {
                let schedule = spec.build_schedule(*base, limits)?;
                let n = match length {
                    Some(n) => *n,
                    None => schedule.last_position(),
                };
                let source =
                    DigitSource::new(*base, SourceKind::Construction(Box::new(spec.clone())));
                let buf = source.materialize(to_usize(n)?, limits)?;
                digit_io::write_digit_file(out, &buf, *out_format)?;
                let mut table = Table::new(vec!["step", "k", "start", "end", "parts"]);
                for s in &schedule.layout {
                    let parts: Vec<String> = s.part_lengths().iter().map(u64::to_string).collect();
                    table.push(vec![
                        s.step.to_string(),
                        s.k.to_string(),
                        s.start.to_string(),
                        s.end.to_string(),
                        parts.join(" "),
                    ]);
                }
                let class = spec.z.classify();
                let report = json!({
                    "out": out,
                    "format": out_format,
                    "length": buf.len(),
                    "z_spec": z_spec,
                    "z_class": { "in_c": class.in_c, "in_d": class.in_d },
                    "schedule": schedule,
                    "default_rule": spec.schedule.exponents.is_none(),
                });
                Ok(Output::Doc { report, table })
            }
            Job::MeasureBad { spec } => {
                let set = bad_set(spec, limits)?;
                let mut table = Table::new(vec!["level", "index"]);
                for c in set.cylinders() {
                    table.push(vec![c.level.to_string(), c.index.to_string()]);
                }
                let report = json!({
                    "spec": spec,
                    "prefix_len": spec.prefix_len()?,
                    "measure": big(&set.measure()),
                    "cylinder_count": set.cylinders().len(),
                    "cylinders": set.cylinders(),
                });
                Ok(Output::Doc { report, table })
            }
            Job::MeasureBadk { base, k } => {
                let set = bad_k(*base, *k, limits)?;
                let m = set.measure();
                let mut table = Table::new(vec!["k", "measure_num", "measure_den", "measure"]);
                let (num, den) = big_parts(&m);
                table.push(vec![
                    k.to_string(),
                    num.to_string(),
                    den.to_string(),
                    to_dec(&m),
                ]);
                let report = json!({
                    "base": base,
                    "k": k,
                    "lambdas": lambda_set(*k).iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "measure": big(&m),
                    "cylinder_count": set.cylinders().len(),
                });
                Ok(Output::Doc { report, table })
            }
            Job::MeasureEset { base, k_lo, k_hi } => {
                let set = e_set(*base, *k_lo..=*k_hi, limits)?;
                let m = set.measure();
                let mut table = Table::new(vec![
                    "k_lo",
                    "k_hi",
                    "measure_num",
                    "measure_den",
                    "measure",
                ]);
                let (num, den) = big_parts(&m);
                table.push(vec![
                    k_lo.to_string(),
                    k_hi.to_string(),
                    num.to_string(),
                    den.to_string(),
                    to_dec(&m),
                ]);
                let report = json!({
                    "base": base,
                    "k_range": [k_lo, k_hi],
                    "measure": big(&m),
                    "cylinder_count": set.cylinders().len(),
                });
                Ok(Output::Doc { report, table })
            }
            Job::MeasureFact1 { base, k_lo, k_hi } => {
                let mut table = Table::new(vec!["k", "measure", "bound", "status"]);
                let mut rows = Vec::new();
                for k in *k_lo..=*k_hi {
                    let r = check_fact1_bound(*base, k, limits)?;
                    table.push(vec![
                        k.to_string(),
                        to_dec(&r.measure),
                        r.bound.to_string(),
                        status(&r.status),
                    ]);
                    rows.push(json!({
                        "k": k,
                        "measure": big(&r.measure),
                        "bound": r.bound,
                        "status": r.status,
                    }));
                }
                Ok(Output::Doc {
                    report: json!({ "base": base, "rows": rows }),
                    table,
                })
            }
            Job::MeasureAlgorithm { config } => {
                let run = run_algorithm(config, limits)?;
                let mut table = Table::new(vec![
                    "n",
                    "chosen_digit",
                    "level",
                    "index",
                    "measure_num",
                    "measure_den",
                    "threshold_num",
                    "threshold_den",
                ]);
                let mut records = Vec::with_capacity(run.trace.len());
                for t in &run.trace {
                    let (mn, md) = big_parts(&t.measure);
                    let (tn, td) = big_parts(&t.threshold);
                    table.push(vec![
                        t.n.to_string(),
                        t.chosen_digit.to_string(),
                        t.interval.level.to_string(),
                        t.interval.index.to_string(),
                        mn.to_string(),
                        md.to_string(),
                        tn.to_string(),
                        td.to_string(),
                    ]);
                    records.push(json!({
                        "n": t.n,
                        "chosen_digit": t.chosen_digit,
                        "interval": { "level": t.interval.level, "index": t.interval.index },
                        "measure_num": mn,
                        "measure_den": md,
                        "threshold_num": tn,
                        "threshold_den": td,
                    }));
                }
                Ok(Output::Lines { records, table })
            }
            Job::Tv {
                source,
                k,
                lambda,
                lambda_prime,
            } => {
                let space = pgen_core::words::code_space(source.base, *k)?;
                let hi = lambda
                    .floor_times(space)?
                    .max(lambda_prime.floor_times(space)?);
                let buf = source.materialize(to_usize(hi + u64::from(*k) - 1)?, limits)?;
                let zero = Ratio::new(0, 1);
                let p = count_distribution(&buf, *k, zero, lambda.ratio(), limits)?;
                let q = count_distribution(&buf, *k, zero, lambda_prime.ratio(), limits)?;
                let (pp, qq) = (p.probabilities(), q.probabilities());
                let tv = tv_distance(&pp, &qq);
                let tv_po = tv_poisson(lambda.to_f64(), lambda_prime.to_f64())?;
                let mut table = Table::new(vec!["j", "p", "p_prime"]);
                for j in 0..pp.len().max(qq.len()) {
                    let at = |v: &[f64]| v.get(j).copied().unwrap_or(0.0).to_string();
                    table.push(vec![j.to_string(), at(&pp), at(&qq)]);
                }
                let report = json!({
                    "base": source.base,
                    "k": k,
                    "lambda": lambda.to_string(),
                    "lambda_prime": lambda_prime.to_string(),
                    "tv_empirical": tv,
                    "tv_poisson": tv_po,
                    "lambda_gap": (lambda.to_f64() - lambda_prime.to_f64()).abs(),
                    "p": pp,
                    "p_prime": qq,
                });
                Ok(Output::Doc { report, table })
            }
            Job::Normality { source, n, max_len } => {
                let buf = source.materialize(*n, limits)?;
                let r = normality_deviation(&buf, *n, *max_len, limits)?;
                let mut table = Table::new(vec!["len", "word", "occurrences", "deviation"]);
                let mut per_len = Vec::new();
                for d in &r.per_len {
                    let word = symbols(&d.word);
                    table.push(vec![
                        d.len.to_string(),
                        word.clone(),
                        d.occurrences.to_string(),
                        to_dec(&d.deviation),
                    ]);
                    per_len.push(json!({
                        "len": d.len,
                        "word": word,
                        "occurrences": d.occurrences,
                        "deviation": big(&d.deviation),
                    }));
                }
                let report = json!({ "base": source.base, "n": r.n, "sup": big(&r.sup), "per_len": per_len });
                Ok(Output::Doc { report, table })
            }
            Job::Discrepancy { source, word, n } => {
                let w = parse_word(word, source.base)?;
                let buf = source.materialize(*n, limits)?;
                let r = discrepancy(&buf, &w, *n)?;
                let mut table = Table::new(vec!["word", "n", "occurrences", "discrepancy"]);
                table.push(vec![
                    word.clone(),
                    n.to_string(),
                    r.occurrences.to_string(),
                    to_dec(&r.value),
                ]);
                let report = json!({
                    "base": source.base,
                    "word": word,
                    "n": r.n,
                    "occurrences": r.occurrences,
                    "discrepancy": big(&r.value),
                });
                Ok(Output::Doc { report, table })
            }
            Job::Weakly {
                source,
                lambda,
                j,
                epsilon,
                k_lo,
                k_hi,
                convention,
            } => {
                let mut len = 0;
                for k in *k_lo..=*k_hi {
                    len = len.max(required_length(source.base, k, *lambda, *convention)?);
                }
                let buf = source.materialize(len, limits)?;
                let hits = if k_lo <= k_hi {
                    weakly_poisson_scan(
                        &buf,
                        *lambda,
                        *j,
                        *epsilon,
                        *k_lo..=*k_hi,
                        *convention,
                        limits,
                    )?
                } else {
                    Vec::new()
                };
                let mut table = Table::new(vec!["k", "hit"]);
                for k in *k_lo..=*k_hi {
                    table.push(vec![k.to_string(), hits.contains(&k).to_string()]);
                }
                let report = json!({
                    "base": source.base,
                    "lambda": lambda.to_string(),
                    "j": j,
                    "epsilon": epsilon,
                    "convention": convention,
                    "k_range": [k_lo, k_hi],
                    "hits": hits,
                });
                Ok(Output::Doc { report, table })
            }
        }
    }
}

fn scan(
    source: &DigitSource,
    k_lo: u32,
    k_hi: u32,
    lambdas: &[Lambda],
    js: &[usize],
    convention: Convention,
    limits: &Limits,
) -> Result<Output> {
    let mut table = Table::new(vec!["k", "lambda", "j", "z", "pmf", "abs_dev"]);
    let mut rows = Vec::new();
    let mut trend = serde_json::Map::new();
    if k_lo <= k_hi && !lambdas.is_empty() {
        let j_max = js.iter().copied().max().unwrap_or(0);
        let mut len = 0;
        for k in k_lo..=k_hi {
            for &l in lambdas {
                len = len.max(required_length(source.base, k, l, convention)?);
            }
        }
        let buf = source.materialize(len, limits)?;
        for &lambda in lambdas {
            let reference = PoissonRef::new(lambda.to_f64(), j_max)?;
            let mut sups: Vec<f64> = Vec::new();
            for k in k_lo..=k_hi {
                let p = z_profile(&buf, k, lambda, j_max, convention, limits)?;
                let dev = z_deviation(&p, &reference)?;
                let mut z = serde_json::Map::new();
                for &j in js {
                    z.insert(j.to_string(), json!(p.z_f64(j)));
                    table.push(vec![
                        k.to_string(),
                        lambda.to_string(),
                        j.to_string(),
                        p.z_f64(j).to_string(),
                        reference.get(j).to_string(),
                        dev.per_j[j].to_string(),
                    ]);
                }
                rows.push(json!({
                    "k": k,
                    "lambda": lambda.to_string(),
                    "z": z,
                    "sup_dev": dev.sup,
                    "l1_dev": dev.l1,
                }));
                sups.push(dev.sup);
            }
            let inversions = sups.windows(2).filter(|w| w[1] > w[0]).count();
            trend.insert(lambda.to_string(), json!({ "inversions": inversions }));
        }
    }
    let report = json!({
        "base": source.base,
        "convention": convention,
        "k_range": [k_lo, k_hi],
        "rows": rows,
        "trend": trend,
    });
    Ok(Output::Doc { report, table })
}

fn to_usize(n: u64) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::ResourceCap(format!("{n} digits do not fit in memory")))
}

fn to_dec(r: &num_rational::BigRational) -> String {
    use num_traits::ToPrimitive;
    r.to_f64().map_or_else(|| "nan".into(), |v| v.to_string())
}

fn symbols(word: &[u8]) -> String {
    word.iter().map(|&d| digit_io::symbol(d)).collect()
}

fn status(s: &pgen_core::measure::BoundStatus) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

/// Reads the manifest out of a JSON report, a JSON-lines trace, or a bare
/// manifest file.
pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path)?;
    let doc: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(_) => {
            let first = text.lines().next().unwrap_or("");
            serde_json::from_str(first)
                .map_err(|_| Error::Format(format!("{} holds no JSON manifest", path.display())))?
        }
    };
    let m = doc.get("manifest").cloned().unwrap_or(doc);
    let manifest: Manifest =
        serde_json::from_value(m).map_err(|e| Error::Format(format!("bad manifest: {e}")))?;
    if manifest.tool != TOOL {
        return Err(Error::Format(format!(
            "manifest was written by {:?}",
            manifest.tool
        )));
    }
    Ok(manifest)
}
