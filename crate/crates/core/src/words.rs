//! Overlapping length-k word occurrence counting.
//!
//! A word `w = w_1 … w_k` is coded as `Σ w_i b^(k-i)`. Windows are scanned
//! with the rolling recurrence `c' = (c mod b^(k-1))·b + d`, so each window
//! costs one multiply-add regardless of `k`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::config::Limits;
use crate::digits::{Base, DigitBuffer};
use crate::error::{precondition, resource, Error, Result};

/// Saturation value of dense counters; exact counts beyond it live in the
/// overflow ledger.
pub const SATURATION: u16 = u16::MAX;

/// Largest code space handled, so codes fit in 63 bits.
const MAX_CODE_SPACE: u64 = 1 << 63;

/// Windows per parallel chunk.
const CHUNK_WINDOWS: usize = 1 << 20;

/// Dense tables are only replicated per thread below this size.
const PARALLEL_DENSE_MAX: u64 = 1 << 22;

/// `b^k`, rejecting code spaces beyond 63 bits.
pub fn code_space(base: Base, k: u32) -> Result<u64> {
    match base.pow(k) {
        Some(v) if v <= MAX_CODE_SPACE => Ok(v),
        _ => resource(format!("b^k = {base}^{k} exceeds 63-bit word codes")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WordCode {
    pub k: u32,
    pub code: u64,
}

impl WordCode {
    pub fn encode(word: &[u8], base: Base) -> Result<Self> {
        let k = word.len() as u32;
        code_space(base, k)?;
        let b = u64::from(base.get());
        let mut code = 0u64;
        for &d in word {
            if u32::from(d) >= base.get() {
                return precondition(format!("digit {d} out of range for base {base}"));
            }
            code = code * b + u64::from(d);
        }
        Ok(Self { k, code })
    }

    pub fn decode(self, base: Base) -> Vec<u8> {
        let b = u64::from(base.get());
        let mut out = vec![0u8; self.k as usize];
        let mut c = self.code;
        for slot in out.iter_mut().rev() {
            *slot = (c % b) as u8;
            c /= b;
        }
        out
    }
}

/// Windows of length `k` starting at positions `first .. first + count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub k: u32,
    pub first: usize,
    pub count: usize,
}

impl WindowSpec {
    pub fn new(k: u32, first: usize, count: usize) -> Self {
        Self { k, first, count }
    }

    /// All windows of a prefix of length `n`.
    pub fn prefix(k: u32, n: usize) -> Self {
        Self {
            k,
            first: 1,
            count: (n + 1).saturating_sub(k as usize),
        }
    }

    /// Number of digits the windows reach, i.e. the minimum buffer length.
    pub fn reach(&self) -> usize {
        if self.count == 0 {
            0
        } else {
            self.first + self.count + self.k as usize - 2
        }
    }

    fn validate(&self, buf: &DigitBuffer) -> Result<()> {
        if self.k == 0 {
            return precondition("word length must be >= 1");
        }
        if self.first == 0 {
            return precondition("window positions are 1-based");
        }
        if self.reach() > buf.len() {
            return precondition(format!(
                "buffer of length {} too short for {} windows of length {} from position {}",
                buf.len(),
                self.count,
                self.k,
                self.first
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Dense,
    Sparse,
}

#[derive(Clone, Debug)]
enum Counts {
    Dense {
        counters: Vec<u16>,
        overflow: HashMap<u64, u64>,
    },
    Sparse(HashMap<u64, u64>),
}

/// Occurrence counts of every length-k word over a set of windows.
#[derive(Clone, Debug)]
pub struct OccurrenceTable {
    base: Base,
    k: u32,
    space: u64,
    windows: u64,
    counts: Counts,
}

impl OccurrenceTable {
    fn empty(base: Base, k: u32, space: u64, repr: Representation) -> Self {
        let counts = match repr {
            Representation::Dense => Counts::Dense {
                counters: vec![0; space as usize],
                overflow: HashMap::new(),
            },
            Representation::Sparse => Counts::Sparse(HashMap::new()),
        };
        Self {
            base,
            k,
            space,
            windows: 0,
            counts,
        }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `b^k`.
    pub fn code_space(&self) -> u64 {
        self.space
    }

    pub fn windows(&self) -> u64 {
        self.windows
    }

    pub fn representation(&self) -> Representation {
        match self.counts {
            Counts::Dense { .. } => Representation::Dense,
            Counts::Sparse(_) => Representation::Sparse,
        }
    }

    pub fn count(&self, code: u64) -> u64 {
        match &self.counts {
            Counts::Dense { counters, overflow } => match counters.get(code as usize) {
                Some(&SATURATION) => overflow[&code],
                Some(&c) => u64::from(c),
                None => 0,
            },
            Counts::Sparse(map) => map.get(&code).copied().unwrap_or(0),
        }
    }

    pub fn count_word(&self, word: &[u8]) -> Result<u64> {
        if word.len() != self.k as usize {
            return precondition(format!("word length {} != table k {}", word.len(), self.k));
        }
        Ok(self.count(WordCode::encode(word, self.base)?.code))
    }

    /// Number of distinct words with at least one occurrence.
    pub fn present(&self) -> u64 {
        match &self.counts {
            Counts::Dense { counters, .. } => counters.iter().filter(|&&c| c > 0).count() as u64,
            Counts::Sparse(map) => map.len() as u64,
        }
    }

    pub fn absent(&self) -> u64 {
        self.space - self.present()
    }

    /// `(code, count)` for every word with a nonzero count, in code order.
    pub fn nonzero(&self) -> Vec<(u64, u64)> {
        match &self.counts {
            Counts::Dense { counters, .. } => counters
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(code, _)| (code as u64, self.count(code as u64)))
                .collect(),
            Counts::Sparse(map) => {
                let mut v: Vec<_> = map.iter().map(|(&c, &n)| (c, n)).collect();
                v.sort_unstable();
                v
            }
        }
    }

    #[inline]
    fn add(&mut self, code: u64, by: u64) {
        match &mut self.counts {
            Counts::Dense { counters, overflow } => {
                let slot = &mut counters[code as usize];
                if *slot == SATURATION {
                    *overflow
                        .get_mut(&code)
                        .expect("ledger entry for saturated counter") += by;
                } else {
                    let total = u64::from(*slot) + by;
                    if total >= u64::from(SATURATION) {
                        *slot = SATURATION;
                        overflow.insert(code, total);
                    } else {
                        *slot = total as u16;
                    }
                }
            }
            Counts::Sparse(map) => *map.entry(code).or_insert(0) += by,
        }
    }

    fn merge(mut self, other: OccurrenceTable) -> OccurrenceTable {
        for (code, n) in other.nonzero() {
            self.add(code, n);
        }
        self.windows += other.windows;
        self
    }
}

fn scan_into(table: &mut OccurrenceTable, digits: &[u8], k: usize, count: usize) {
    if count == 0 {
        return;
    }
    let b = u64::from(table.base.get());
    let high = table.space / b; // b^(k-1)
    let mut code = digits[..k - 1]
        .iter()
        .fold(0u64, |c, &d| c * b + u64::from(d));
    for &d in &digits[k - 1..k - 1 + count] {
        code = (code % high) * b + u64::from(d);
        table.add(code, 1);
    }
    table.windows += count as u64;
}

/// Counts overlapping occurrences over the windows in `spec`, dense when
/// `b^k <= limits.dense_cap` and sparse otherwise.
pub fn count_words(
    buf: &DigitBuffer,
    spec: &WindowSpec,
    limits: &Limits,
) -> Result<OccurrenceTable> {
    let space = code_space(buf.base(), spec.k.max(1))?;
    let repr = if space <= limits.dense_cap {
        Representation::Dense
    } else {
        Representation::Sparse
    };
    count_words_as(buf, spec, repr)
}

/// [`count_words`] with a forced representation.
pub fn count_words_as(
    buf: &DigitBuffer,
    spec: &WindowSpec,
    repr: Representation,
) -> Result<OccurrenceTable> {
    spec.validate(buf)?;
    let space = code_space(buf.base(), spec.k)?;
    if repr == Representation::Dense && space > usize::MAX as u64 / 2 {
        return resource(format!("dense table of {space} entries"));
    }
    let k = spec.k as usize;
    let start = spec.first - 1;
    let digits = &buf.digits()[start..];

    let parallel = spec.count >= 2 * CHUNK_WINDOWS
        && rayon::current_num_threads() > 1
        && (repr == Representation::Sparse || space <= PARALLEL_DENSE_MAX);
    if !parallel {
        let mut table = OccurrenceTable::empty(buf.base(), spec.k, space, repr);
        scan_into(&mut table, digits, k, spec.count);
        return Ok(table);
    }

    let chunks: Vec<(usize, usize)> = (0..spec.count)
        .step_by(CHUNK_WINDOWS)
        .map(|s| (s, CHUNK_WINDOWS.min(spec.count - s)))
        .collect();
    let base = buf.base();
    let table = chunks
        .into_par_iter()
        .map(|(offset, count)| {
            let mut t = OccurrenceTable::empty(base, spec.k, space, repr);
            scan_into(&mut t, &digits[offset..], k, count);
            t
        })
        .reduce_with(OccurrenceTable::merge)
        .ok_or_else(|| Error::Internal("no chunks to merge".into()))?;
    Ok(table)
}

/// Overlapping occurrences of `word` in `x↾n`: starts `p ∈ [1, n - |w| + 1]`.
pub fn count_occurrences(buf: &DigitBuffer, word: &[u8], n: usize) -> Result<u64> {
    if n > buf.len() {
        return precondition(format!(
            "prefix length {n} exceeds buffer length {}",
            buf.len()
        ));
    }
    if word.is_empty() || word.len() > n {
        return precondition(format!("word length {} must be in 1..={n}", word.len()));
    }
    Ok(buf.digits()[..n]
        .windows(word.len())
        .filter(|w| *w == word)
        .count() as u64)
}

/// `N_j` = number of distinct words occurring exactly `j` times, for
/// `j <= j_max`, plus the count of words occurring more often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub overflow: u64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    pub fn j_max(&self) -> usize {
        self.counts.len() - 1
    }
}

pub fn histogram(table: &OccurrenceTable, j_max: usize) -> Result<Histogram> {
    if j_max >= SATURATION as usize {
        return precondition(format!("j_max must be below {SATURATION}"));
    }
    let mut counts = vec![0u64; j_max + 1];
    let mut overflow = 0u64;
    match &table.counts {
        Counts::Dense { counters, .. } => {
            for &c in counters {
                match counts.get_mut(c as usize) {
                    Some(slot) => *slot += 1,
                    None => overflow += 1,
                }
            }
        }
        Counts::Sparse(map) => {
            counts[0] = table.space - map.len() as u64;
            for &n in map.values() {
                match counts.get_mut(n as usize) {
                    Some(slot) => *slot += 1,
                    None => overflow += 1,
                }
            }
        }
    }
    Ok(Histogram { counts, overflow })
}

/// Words of length `k` with a window fully inside `[m, e)` and no window
/// fully inside `[a, m)`.
///
/// A window starting at `p` is inside `[s, t)` when `s <= p` and
/// `p + k - 1 < t`; ranges too short for a full window contribute nothing.
pub fn fresh_word_count(buf: &DigitBuffer, k: u32, a: usize, m: usize, e: usize) -> Result<u64> {
    if k == 0 {
        return precondition("word length must be >= 1");
    }
    if !(1 <= a && a < m && m < e) {
        return precondition(format!("need 1 <= a < m < e, got a={a} m={m} e={e}"));
    }
    if e - 1 > buf.len() {
        return precondition(format!("boundary e={e} beyond buffer length {}", buf.len()));
    }
    let space = code_space(buf.base(), k)?;
    let windows_in = |s: usize, t: usize| (t - s + 1).saturating_sub(k as usize);
    let late = WindowSpec::new(k, m, windows_in(m, e));
    let early = WindowSpec::new(k, a, windows_in(a, m));
    if late.count == 0 {
        return Ok(0);
    }
    let mut fresh: HashSet<u64> = codes(buf, &late, space).collect();
    for code in codes(buf, &early, space) {
        if fresh.is_empty() {
            break;
        }
        fresh.remove(&code);
    }
    Ok(fresh.len() as u64)
}

fn codes<'a>(
    buf: &'a DigitBuffer,
    spec: &WindowSpec,
    space: u64,
) -> impl Iterator<Item = u64> + 'a {
    let b = u64::from(buf.base().get());
    let high = space / b;
    let k = spec.k as usize;
    let digits: &[u8] = if spec.count == 0 {
        &[]
    } else {
        &buf.digits()[spec.first - 1..spec.first - 1 + spec.count + k - 1]
    };
    let mut code = digits
        .iter()
        .take(k.saturating_sub(1))
        .fold(0u64, |c, &d| c * b + u64::from(d));
    digits.iter().skip(k.saturating_sub(1)).map(move |&d| {
        code = (code % high) * b + u64::from(d);
        code
    })
}
