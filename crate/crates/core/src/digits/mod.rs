//! Base-b digit streams: generators, materialized buffers and files.
//!
//! Positions are 1-based throughout: position 1 is the first digit after the
//! radix point.

mod debruijn;
pub mod io;
pub mod rng;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::config::Limits;
use crate::constructions::ConstructionSpec;
use crate::error::{precondition, resource, Error, Result};

pub use debruijn::{extended as extended_de_bruijn, fkm as de_bruijn_cycle};
pub use io::{read_digit_file, write_digit_file, DigitFormat};

/// Numeration base. Digits are stored as bytes, so `2 <= b <= 256`; the ascii
/// format further restricts to `b <= 36`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Base(u32);

impl Base {
    pub const BINARY: Base = Base(2);

    pub fn new(b: u32) -> Result<Self> {
        if (2..=256).contains(&b) {
            Ok(Self(b))
        } else {
            precondition(format!("base must be in 2..=256, got {b}"))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// `b^k`, if it fits in 64 bits.
    pub fn pow(self, k: u32) -> Option<u64> {
        u64::from(self.0).checked_pow(k)
    }
}

impl TryFrom<u32> for Base {
    type Error = Error;

    fn try_from(b: u32) -> Result<Self> {
        Base::new(b)
    }
}

impl From<Base> for u32 {
    fn from(b: Base) -> u32 {
        b.0
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A materialized prefix `x↾n` with random access by 1-based position.
#[derive(Clone, PartialEq, Eq)]
pub struct DigitBuffer {
    base: Base,
    digits: Vec<u8>,
}

impl DigitBuffer {
    pub fn new(base: Base, digits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = digits.iter().position(|&d| u32::from(d) >= base.get()) {
            return Err(Error::Format(format!(
                "digit {} at position {} out of range for base {base}",
                digits[pos],
                pos + 1
            )));
        }
        Ok(Self { base, digits })
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit at 1-based position `p`.
    pub fn get(&self, p: usize) -> Option<u8> {
        p.checked_sub(1).and_then(|i| self.digits.get(i).copied())
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// The digits at 1-based positions `start..start + len`.
    pub fn segment(&self, start: usize, len: usize) -> Option<&[u8]> {
        let from = start.checked_sub(1)?;
        self.digits.get(from..from.checked_add(len)?)
    }

    /// A new buffer holding the first `n` digits.
    pub fn prefix(&self, n: usize) -> Option<DigitBuffer> {
        self.digits.get(..n).map(|d| DigitBuffer {
            base: self.base,
            digits: d.to_vec(),
        })
    }
}

impl fmt::Debug for DigitBuffer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = self.digits.len().min(32);
        write!(f, "DigitBuffer(b={}, n={}, ", self.base, self.digits.len())?;
        for &d in &self.digits[..shown] {
            if self.base.get() <= 36 {
                write!(f, "{}", io::symbol(d))?;
            } else {
                write!(f, "{d},")?;
            }
        }
        if shown < self.digits.len() {
            write!(f, "...")?;
        }
        write!(f, ")")
    }
}

/// What produces a stream. Descriptors are plain data: opening the same
/// descriptor twice yields identical digit sequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceKind {
    /// i.i.d. uniform digits from splitmix64.
    Random {
        seed: u64,
    },
    Constant {
        digit: u8,
    },
    /// Concatenated base-b representations of 1, 2, 3, ...
    Champernowne,
    /// An FKM de Bruijn cycle of the given order, repeated.
    DeBruijn {
        order: u32,
    },
    /// Finite sequence whose prefixes are de Bruijn of every order up to
    /// `max_order`. Requires `b >= 3`.
    ExtendedDeBruijn {
        max_order: u32,
    },
    /// A digit file read in full.
    File {
        path: PathBuf,
        format: DigitFormat,
    },
    /// Output of one of the reduction constructions.
    Construction(Box<ConstructionSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitSource {
    pub base: Base,
    #[serde(flatten)]
    pub kind: SourceKind,
}

impl DigitSource {
    pub fn new(base: Base, kind: SourceKind) -> Self {
        Self { base, kind }
    }

    pub fn random(base: Base, seed: u64) -> Self {
        Self::new(base, SourceKind::Random { seed })
    }

    pub fn constant(base: Base, digit: u8) -> Result<Self> {
        if u32::from(digit) >= base.get() {
            return precondition(format!("digit {digit} out of range for base {base}"));
        }
        Ok(Self::new(base, SourceKind::Constant { digit }))
    }

    pub fn champernowne(base: Base) -> Self {
        Self::new(base, SourceKind::Champernowne)
    }

    pub fn de_bruijn(base: Base, order: u32) -> Result<Self> {
        if order == 0 {
            return precondition("de Bruijn order must be >= 1");
        }
        Ok(Self::new(base, SourceKind::DeBruijn { order }))
    }

    pub fn extended_de_bruijn(base: Base, max_order: u32) -> Result<Self> {
        if base.get() < 3 {
            return precondition("extended de Bruijn streams require base >= 3");
        }
        if max_order == 0 {
            return precondition("max_order must be >= 1");
        }
        Ok(Self::new(base, SourceKind::ExtendedDeBruijn { max_order }))
    }

    /// Opens a fresh cursor at position 1.
    pub fn open(&self, limits: &Limits) -> Result<DigitStream> {
        let base = self.base;
        let b = base.get();
        match &self.kind {
            SourceKind::Random { seed } => {
                let mut rng = rng::SplitMix64::new(*seed);
                Ok(DigitStream::unbounded(
                    base,
                    std::iter::repeat_with(move || rng.next_digit(b)),
                ))
            }
            SourceKind::Constant { digit } => {
                if u32::from(*digit) >= b {
                    return precondition(format!("digit {digit} out of range for base {base}"));
                }
                Ok(DigitStream::unbounded(base, std::iter::repeat(*digit)))
            }
            SourceKind::Champernowne => Ok(DigitStream::unbounded(base, Champernowne::new(b))),
            SourceKind::DeBruijn { order } => {
                if *order == 0 {
                    return precondition("de Bruijn order must be >= 1");
                }
                let cycle = debruijn::fkm(b, *order, limits.debruijn_cap)?;
                Ok(DigitStream::unbounded(base, cycle.into_iter().cycle()))
            }
            SourceKind::ExtendedDeBruijn { max_order } => {
                let seq = debruijn::extended(b, *max_order, limits.debruijn_cap)?;
                Ok(DigitStream::finite(base, seq))
            }
            SourceKind::File { path, format } => {
                let buf = io::read_digit_file(path, *format, Some(base))?;
                Ok(DigitStream::finite(base, buf.digits))
            }
            SourceKind::Construction(spec) => spec.open(base, limits),
        }
    }

    /// Materializes `x↾n`. Fails if the source is finite and shorter than `n`.
    pub fn materialize(&self, n: usize, limits: &Limits) -> Result<DigitBuffer> {
        if n as u64 > limits.max_positions {
            return resource(format!(
                "{n} digits requested, position cap is {}",
                limits.max_positions
            ));
        }
        let stream = self.open(limits)?;
        if let Some(len) = stream.known_len() {
            if (len as usize) < n {
                return precondition(format!("source has only {len} digits, {n} requested"));
            }
        }
        let digits: Vec<u8> = stream.take(n).collect();
        if digits.len() < n {
            return precondition(format!(
                "source ended after {} digits, {n} requested",
                digits.len()
            ));
        }
        Ok(DigitBuffer {
            base: self.base,
            digits,
        })
    }

    /// Materializes the whole source when it is finite.
    pub fn materialize_all(&self, limits: &Limits) -> Result<DigitBuffer> {
        let stream = self.open(limits)?;
        if stream.known_len().is_none() {
            return precondition("source is unbounded; give a length");
        }
        Ok(DigitBuffer {
            base: self.base,
            digits: stream.collect(),
        })
    }
}

/// A pull cursor over a source. Not shared between threads.
pub struct DigitStream {
    base: Base,
    len: Option<u64>,
    inner: Box<dyn Iterator<Item = u8> + Send>,
}

impl DigitStream {
    pub(crate) fn unbounded(base: Base, it: impl Iterator<Item = u8> + Send + 'static) -> Self {
        Self {
            base,
            len: None,
            inner: Box::new(it),
        }
    }

    pub(crate) fn finite(base: Base, digits: Vec<u8>) -> Self {
        Self {
            base,
            len: Some(digits.len() as u64),
            inner: Box::new(digits.into_iter()),
        }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    /// Total length for finite sources.
    pub fn known_len(&self) -> Option<u64> {
        self.len
    }
}

impl Iterator for DigitStream {
    type Item = u8;

    #[inline]
    fn next(&mut self) -> Option<u8> {
        self.inner.next()
    }
}

struct Champernowne {
    base: u64,
    counter: u64,
    pending: Vec<u8>,
}

impl Champernowne {
    fn new(base: u32) -> Self {
        Self {
            base: u64::from(base),
            counter: 0,
            pending: Vec::new(),
        }
    }
}

impl Iterator for Champernowne {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        if self.pending.is_empty() {
            self.counter += 1;
            let mut n = self.counter;
            // Stored least significant first so digits pop in reading order.
            while n > 0 {
                self.pending.push((n % self.base) as u8);
                n /= self.base;
            }
        }
        self.pending.pop()
    }
}
