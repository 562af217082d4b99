use num_rational::{BigRational, Ratio};
use num_traits::One;
use pgen_core::constructions::{f_d2, ConstructionSpec, Flavor, ScheduleSpec, ZSequence};
use pgen_core::digits::{read_digit_file, write_digit_file, DigitFormat};
use pgen_core::measure::{
    bad_k, bad_set_with_leaves, check_fact1_bound, e_set, BadSpec, BoundStatus, IntervalSet,
};
use pgen_core::stats::{weakly_poisson_scan, z_profile};
use pgen_core::words::{count_words, fresh_word_count};
use pgen_core::{Base, Convention, DigitSource, Lambda, Limits, SourceKind, WindowSpec};

fn lim() -> Limits {
    Limits::default()
}

fn b(v: u32) -> Base {
    Base::new(v).unwrap()
}

#[test]
fn file_source_reproduces_generator() {
    let dir = tempfile::tempdir().unwrap();
    let src = DigitSource::random(b(5), 11);
    let buf = src.materialize(4000, &lim()).unwrap();
    for format in [DigitFormat::Ascii, DigitFormat::Packed] {
        let path = dir.path().join(format!("{format:?}"));
        write_digit_file(&path, &buf, format).unwrap();
        assert_eq!(read_digit_file(&path, format, Some(b(5))).unwrap(), buf);
        let file = DigitSource::new(b(5), SourceKind::File { path, format });
        let lambda = Lambda::new(3, 2).unwrap();
        let a = z_profile(
            &file.materialize_all(&lim()).unwrap(),
            4,
            lambda,
            8,
            Convention::A,
            &lim(),
        )
        .unwrap();
        let c = z_profile(&buf, 4, lambda, 8, Convention::A, &lim()).unwrap();
        assert_eq!(a, c);
    }
}

#[test]
fn construction_descriptor_matches_direct_call() {
    let x = DigitSource::random(b(2), 3);
    let z: ZSequence = "even=id,odd=const:4".parse().unwrap();
    let spec = ConstructionSpec::new(z, ScheduleSpec::new(Flavor::D2light, 2, 2), x.clone());
    let schedule = spec.build_schedule(b(2), &lim()).unwrap();
    let n = schedule.last_position() as usize;
    let direct: Vec<u8> = f_d2(&schedule, &x, &lim()).unwrap().take(n).collect();
    let src = DigitSource::new(b(2), SourceKind::Construction(Box::new(spec)));
    let text = serde_json::to_string(&src).unwrap();
    let back: DigitSource = serde_json::from_str(&text).unwrap();
    assert_eq!(back, src);
    assert_eq!(back.materialize(n, &lim()).unwrap().digits(), &direct[..]);

    for step in &schedule.layout {
        let buf = back.materialize(n, &lim()).unwrap();
        let (a, e) = (step.start as usize, step.end as usize);
        assert_eq!(fresh_word_count(&buf, step.k, a, e - e / 4, e).unwrap(), 0);
    }
}

#[test]
fn extended_de_bruijn_prefixes_cover_every_word_once() {
    let base = b(3);
    let src = DigitSource::extended_de_bruijn(base, 4).unwrap();
    let buf = src.materialize_all(&lim()).unwrap();
    for m in 1..=4u32 {
        let len = 3usize.pow(m) + m as usize - 1;
        let t = count_words(&buf, &WindowSpec::prefix(m, len), &lim()).unwrap();
        assert!((0..t.code_space()).all(|c| t.count(c) == 1), "order {m}");
    }
}

#[test]
fn e_set_is_complement_of_bad_union() {
    let bad2 = bad_k(b(2), 2, &lim()).unwrap();
    let e = e_set(b(2), 2..=2, &lim()).unwrap();
    assert_eq!(e.measure(), BigRational::one() - bad2.measure());
    assert!(e.intersect(&bad2).unwrap().is_empty());
    assert_eq!(e.union(&bad2).unwrap(), IntervalSet::unit(b(2)));
}

#[test]
fn bad_sets_are_unions_of_level_l_cylinders() {
    let spec = BadSpec::new(b(2), Lambda::integer(1).unwrap(), 2, 0, Ratio::new(1, 4));
    let (set, leaves) = bad_set_with_leaves(&spec, &lim()).unwrap();
    let level = spec.prefix_len().unwrap() as u32;
    assert!(leaves.iter().all(|c| c.level == level));
    assert_eq!(IntervalSet::from_cylinders(b(2), leaves).unwrap(), set);
}

#[test]
fn fact1_small_k_is_reported_not_asserted() {
    let r = check_fact1_bound(b(2), 2, &lim()).unwrap();
    assert_eq!(r.status, BoundStatus::Vacuous);
    assert_eq!(r.measure, BigRational::new(1.into(), 128.into()));
}

#[test]
fn weakly_scan_separates_random_from_constant() {
    let lambda = Lambda::integer(1).unwrap();
    let need = pgen_core::stats::required_length(b(2), 14, lambda, Convention::A).unwrap();
    let random = DigitSource::random(b(2), 42)
        .materialize(need, &lim())
        .unwrap();
    let constant = DigitSource::constant(b(2), 1)
        .unwrap()
        .materialize(need, &lim())
        .unwrap();
    let hits =
        weakly_poisson_scan(&random, lambda, 1, 0.02, 10..=14, Convention::A, &lim()).unwrap();
    assert!(!hits.is_empty());
    let none =
        weakly_poisson_scan(&constant, lambda, 1, 0.02, 10..=14, Convention::A, &lim()).unwrap();
    assert!(none.is_empty());
}
