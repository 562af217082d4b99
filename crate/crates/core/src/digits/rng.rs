//! The seeded digit generator behind random streams.
//!
//! splitmix64 over a 64-bit state; each output is mapped to a digit by taking
//! the high word of the 128-bit product with the base. Both steps are fixed so
//! that streams are bit-identical across implementations.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Next digit in `[0, base)` by multiply-high.
    #[inline]
    pub fn next_digit(&mut self, base: u32) -> u8 {
        ((u128::from(self.next_u64()) * u128::from(base)) >> 64) as u8
    }
}
