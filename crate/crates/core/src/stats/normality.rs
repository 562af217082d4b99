//! Borel normality deviation and the (w, n)-discrepancy.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::config::Limits;
use crate::digits::DigitBuffer;
use crate::error::{precondition, resource, Result};
use crate::words::{self, code_space, WindowSpec, WordCode};

/// The worst word of one length.
#[derive(Clone, Debug, PartialEq)]
pub struct WordDeviation {
    pub len: u32,
    pub word: Vec<u8>,
    pub occurrences: u64,
    /// `|W(x↾n, w)/n − b^{−ℓ}|`.
    pub deviation: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalityReport {
    pub n: u64,
    pub per_len: Vec<WordDeviation>,
    pub sup: BigRational,
}

/// `sup_{ℓ ≤ L, |w| = ℓ} |W(x↾n, w)/n − b^{−ℓ}|`, with per-length witnesses.
/// The frequency is taken over `n`, not over the `n − ℓ + 1` windows.
pub fn normality_deviation(
    buf: &DigitBuffer,
    n: usize,
    max_len: u32,
    limits: &Limits,
) -> Result<NormalityReport> {
    if n == 0 || n > buf.len() {
        return precondition(format!("prefix length {n} must be in 1..={}", buf.len()));
    }
    if max_len == 0 || max_len as usize > n {
        return precondition(format!("max word length must be in 1..={n}"));
    }
    let space = code_space(buf.base(), max_len)?;
    if space > limits.dense_cap {
        return resource(format!(
            "b^L = {space} exceeds the dense cap {}",
            limits.dense_cap
        ));
    }
    let nn = BigInt::from(n);
    let mut per_len = Vec::with_capacity(max_len as usize);
    for len in 1..=max_len {
        let table = words::count_words(buf, &WindowSpec::prefix(len, n), limits)?;
        let scale = table.code_space();
        let mut worst: Option<(u64, u64, u128)> = None;
        for code in 0..scale {
            let w = table.count(code);
            let gap = (u128::from(w) * u128::from(scale)).abs_diff(n as u128);
            if worst.is_none_or(|(_, _, g)| gap > g) {
                worst = Some((code, w, gap));
            }
        }
        let (code, occurrences, gap) = worst.expect("nonempty code space");
        per_len.push(WordDeviation {
            len,
            word: WordCode { k: len, code }.decode(buf.base()),
            occurrences,
            deviation: BigRational::new(BigInt::from(gap), &nn * BigInt::from(scale)),
        });
    }
    let sup = per_len
        .iter()
        .map(|d| d.deviation.clone())
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(NormalityReport {
        n: n as u64,
        per_len,
        sup,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport {
    pub word: Vec<u8>,
    pub n: u64,
    pub occurrences: u64,
    /// `|n/b^{|w|} − W(x↾n, w)|`.
    pub value: BigRational,
}

pub fn discrepancy(buf: &DigitBuffer, word: &[u8], n: usize) -> Result<DiscrepancyReport> {
    let occurrences = words::count_occurrences(buf, word, n)?;
    let scale = BigInt::from(buf.base().get()).pow(word.len() as u32);
    let value = (BigRational::new(BigInt::from(n), scale)
        - BigRational::from_integer(occurrences.into()))
    .abs();
    Ok(DiscrepancyReport {
        word: word.to_vec(),
        n: n as u64,
        occurrences,
        value,
    })
}
