//! Digit file formats.
//!
//! `ascii`: one symbol per digit from `0-9a-z`, newlines ignored.
//!
//! `packed`: a 16-byte header followed by the digits bit-packed most
//! significant bit first, each digit using the minimal width for the base; the
//! final byte is zero-padded.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "PGDG"
//! 4       1     version (1)
//! 5       2     base, u16 little-endian
//! 7       1     reserved (0)
//! 8       8     digit count, u64 little-endian
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Base, DigitBuffer};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PGDG";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;
const SYMBOLS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DigitFormat {
    Ascii,
    Packed,
}

impl FromStr for DigitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(Self::Ascii),
            "packed" => Ok(Self::Packed),
            other => Err(Error::Precondition(format!(
                "unknown digit format {other:?}"
            ))),
        }
    }
}

/// Bits per digit in the packed format.
pub fn digit_width(base: Base) -> u32 {
    32 - (base.get() - 1).leading_zeros()
}

pub fn symbol(d: u8) -> char {
    SYMBOLS[d as usize] as char
}

fn symbol_value(c: u8) -> Option<u8> {
    match c {
        b'0'..=b'9' => Some(c - b'0'),
        b'a'..=b'z' => Some(c - b'a' + 10),
        _ => None,
    }
}

pub fn encode_ascii(buf: &DigitBuffer) -> Result<Vec<u8>> {
    if buf.base().get() > 36 {
        return Err(Error::Precondition(format!(
            "ascii format supports bases up to 36, got {}",
            buf.base()
        )));
    }
    Ok(buf.digits().iter().map(|&d| SYMBOLS[d as usize]).collect())
}

pub fn decode_ascii(bytes: &[u8], base: Base) -> Result<DigitBuffer> {
    if base.get() > 36 {
        return Err(Error::Precondition(format!(
            "ascii format supports bases up to 36, got {base}"
        )));
    }
    let mut digits = Vec::with_capacity(bytes.len());
    for (offset, &c) in bytes.iter().enumerate() {
        if c == b'\n' || c == b'\r' {
            continue;
        }
        match symbol_value(c) {
            Some(d) if u32::from(d) < base.get() => digits.push(d),
            _ => {
                return Err(Error::Format(format!(
                    "invalid symbol {:?} for base {base} at byte {offset}",
                    c as char
                )))
            }
        }
    }
    DigitBuffer::new(base, digits)
}

pub fn encode_packed(buf: &DigitBuffer) -> Vec<u8> {
    let width = digit_width(buf.base());
    let n = buf.len() as u64;
    let payload = (n * u64::from(width)).div_ceil(8) as usize;
    let mut out = Vec::with_capacity(HEADER_LEN + payload);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(buf.base().get() as u16).to_le_bytes());
    out.push(0);
    out.extend_from_slice(&n.to_le_bytes());

    let mut acc: u32 = 0;
    let mut bits: u32 = 0;
    for &d in buf.digits() {
        acc = (acc << width) | u32::from(d);
        bits += width;
        while bits >= 8 {
            bits -= 8;
            out.push((acc >> bits) as u8);
        }
        acc &= (1 << bits) - 1;
    }
    if bits > 0 {
        out.push((acc << (8 - bits)) as u8);
    }
    out
}

pub fn decode_packed(bytes: &[u8]) -> Result<DigitBuffer> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "packed header truncated: {} of {HEADER_LEN} bytes",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format("bad magic, expected \"PGDG\"".into()));
    }
    if bytes[4] != VERSION {
        return Err(Error::Format(format!(
            "unsupported packed version {}",
            bytes[4]
        )));
    }
    let base = Base::new(u32::from(u16::from_le_bytes([bytes[5], bytes[6]])))
        .map_err(|e| Error::Format(e.to_string()))?;
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8-byte slice"));
    let width = digit_width(base);
    let payload = &bytes[HEADER_LEN..];
    let needed = n
        .checked_mul(u64::from(width))
        .map(|b| b.div_ceil(8))
        .ok_or_else(|| Error::Format("digit count overflows".into()))?;
    if (payload.len() as u64) < needed {
        return Err(Error::Format(format!(
            "packed payload truncated: {} of {needed} bytes",
            payload.len()
        )));
    }

    let mut digits = Vec::with_capacity(n as usize);
    let mask = (1u32 << width) - 1;
    let mut acc: u32 = 0;
    let mut bits: u32 = 0;
    let mut bytes_iter = payload.iter();
    for _ in 0..n {
        while bits < width {
            acc = (acc << 8) | u32::from(*bytes_iter.next().expect("length checked"));
            bits += 8;
        }
        bits -= width;
        let d = (acc >> bits) & mask;
        acc &= (1 << bits) - 1;
        if d >= base.get() {
            return Err(Error::Format(format!(
                "packed digit {d} out of range for base {base}"
            )));
        }
        digits.push(d as u8);
    }
    DigitBuffer::new(base, digits)
}

pub fn write_digit_file(path: &Path, buf: &DigitBuffer, format: DigitFormat) -> Result<()> {
    let bytes = match format {
        DigitFormat::Ascii => encode_ascii(buf)?,
        DigitFormat::Packed => encode_packed(buf),
    };
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

/// Reads a digit file. Ascii files carry no base, so `base` is required for
/// them; for packed files a given base must match the header.
pub fn read_digit_file(
    path: &Path,
    format: DigitFormat,
    base: Option<Base>,
) -> Result<DigitBuffer> {
    let bytes = fs::read(path)?;
    match format {
        DigitFormat::Ascii => {
            let base = base.ok_or_else(|| {
                Error::Precondition("ascii digit files need an explicit base".into())
            })?;
            decode_ascii(&bytes, base)
        }
        DigitFormat::Packed => {
            let buf = decode_packed(&bytes)?;
            match base {
                Some(b) if b != buf.base() => Err(Error::Precondition(format!(
                    "file is base {}, expected base {b}",
                    buf.base()
                ))),
                _ => Ok(buf),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn buf(b: u32, d: &[u8]) -> DigitBuffer {
        DigitBuffer::new(Base::new(b).unwrap(), d.to_vec()).unwrap()
    }

    #[test]
    fn ascii_reads_binary() {
        let got = decode_ascii(b"0110", Base::new(2).unwrap()).unwrap();
        assert_eq!(got.digits(), &[0, 1, 1, 0]);
    }

    #[test]
    fn ascii_rejects_out_of_base_symbol() {
        let err = decode_ascii(b"012", Base::new(2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn ascii_ignores_newlines() {
        let got = decode_ascii(b"01\n2z\r\n", Base::new(36).unwrap()).unwrap();
        assert_eq!(got.digits(), &[0, 1, 2, 35]);
    }

    #[test]
    fn packed_layout_binary() {
        let bytes = encode_packed(&buf(2, &[1, 0, 1, 1, 0, 0, 0, 0, 1]));
        assert_eq!(&bytes[..4], b"PGDG");
        assert_eq!(bytes[4], 1);
        assert_eq!(&bytes[5..7], &[2, 0]);
        assert_eq!(&bytes[8..16], &9u64.to_le_bytes());
        assert_eq!(&bytes[16..], &[0b1011_0000, 0b1000_0000]);
    }

    #[test]
    fn packed_truncated_header() {
        let err = decode_packed(b"PGDG\x01\x02").unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn packed_truncated_payload() {
        let mut bytes = encode_packed(&buf(3, &[2; 20]));
        bytes.pop();
        assert!(matches!(decode_packed(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn widths() {
        let w = |b| digit_width(Base::new(b).unwrap());
        assert_eq!(
            (w(2), w(3), w(4), w(5), w(10), w(16), w(17), w(256)),
            (1, 2, 2, 3, 4, 4, 5, 8)
        );
    }

    fn arb_buffer() -> impl Strategy<Value = DigitBuffer> {
        (2u32..=256).prop_flat_map(|b| {
            proptest::collection::vec(0..b, 0..300)
                .prop_map(move |v| buf(b, &v.into_iter().map(|d| d as u8).collect::<Vec<_>>()))
        })
    }

    proptest! {
        #[test]
        fn packed_round_trip(b in arb_buffer()) {
            prop_assert_eq!(decode_packed(&encode_packed(&b)).unwrap(), b);
        }

        #[test]
        fn ascii_round_trip(b in arb_buffer().prop_filter("ascii bases", |b| b.base().get() <= 36)) {
            let bytes = encode_ascii(&b).unwrap();
            prop_assert_eq!(decode_ascii(&bytes, b.base()).unwrap(), b);
        }
    }
}
