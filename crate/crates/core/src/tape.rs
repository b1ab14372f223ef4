//! The advice tape: an oracle with full knowledge of the input writes a
//! binary string before the first request arrives; the online algorithm reads
//! bits sequentially on demand. The tape is conceptually infinite — reads past
//! the written region yield 0 — and the advice complexity of a run is the
//! number of bits *read*, not written.

use crate::{Error, Result};

/// Write-once-then-read binary advice tape.
///
/// `peak_read` tracks the highest bit position read plus one; under the
/// sequential reader it always equals `read_cursor` and is reported as the
/// per-run advice complexity.
#[derive(Debug, Clone, Default)]
pub struct AdviceTape {
    written: Vec<bool>,
    read_cursor: usize,
    peak_read: usize,
}

impl AdviceTape {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of bits the oracle has written.
    pub fn written_len(&self) -> usize {
        self.written.len()
    }

    /// Advice complexity of the run so far: the highest bit index read plus one.
    pub fn bits_read(&self) -> usize {
        self.peak_read
    }

    pub fn write_bit(&mut self, bit: bool) {
        self.written.push(bit);
    }

    /// Appends `value` in exactly `width` bits, most-significant first.
    pub fn write_uint_fixed(&mut self, value: u64, width: usize) -> Result<()> {
        if width == 0 || (width < 64 && value >> width != 0) {
            return Err(Error::Encoding(format!(
                "value {value} does not fit in {width} bits"
            )));
        }
        for i in (0..width).rev() {
            self.written.push(value >> i & 1 == 1);
        }
        Ok(())
    }

    /// Appends `value >= 1` self-delimited: with `L = bitlen(value)`, writes
    /// `L` ones, a zero, then `value` in `L` big-endian bits (`2L+1` bits
    /// total). Readable without knowing its length in advance.
    pub fn write_self_delimited(&mut self, value: u64) -> Result<()> {
        if value < 1 {
            return Err(Error::Encoding(
                "self-delimited encoding requires value >= 1".into(),
            ));
        }
        let len = 64 - value.leading_zeros() as usize;
        for _ in 0..len {
            self.written.push(true);
        }
        self.written.push(false);
        self.write_uint_fixed(value, len)
    }

    /// Reads one bit and advances the cursor. Past the written region the
    /// tape is all zeros.
    pub fn read_bit(&mut self) -> bool {
        let bit = self.written.get(self.read_cursor).copied().unwrap_or(false);
        self.read_cursor += 1;
        self.peak_read = self.peak_read.max(self.read_cursor);
        bit
    }

    /// Reads `width` bits, most-significant first.
    pub fn read_uint_fixed(&mut self, width: usize) -> u64 {
        debug_assert!(width <= 64);
        let mut v = 0u64;
        for _ in 0..width {
            v = v << 1 | self.read_bit() as u64;
        }
        v
    }

    /// Inverse of [`write_self_delimited`]. The unary length prefix is capped
    /// at 63 so a garbage tape cannot request an absurd payload width.
    ///
    /// [`write_self_delimited`]: AdviceTape::write_self_delimited
    pub fn read_self_delimited(&mut self) -> Result<u64> {
        let mut len = 0usize;
        while self.read_bit() {
            len += 1;
            if len > 63 {
                return Err(Error::Encoding("self-delimited length prefix > 63".into()));
            }
        }
        if len == 0 {
            return Err(Error::Encoding(
                "self-delimited value has empty length prefix".into(),
            ));
        }
        Ok(self.read_uint_fixed(len))
    }

    /// A fresh tape holding the same written content with an unread cursor.
    /// The original's read statistics are untouched (cursors never rewind).
    pub fn clone_written(&self) -> AdviceTape {
        AdviceTape { written: self.written.clone(), read_cursor: 0, peak_read: 0 }
    }

    /// Written bit at position `i` without moving the cursor (0 past the end).
    pub fn written_bit(&self, i: usize) -> bool {
        self.written.get(i).copied().unwrap_or(false)
    }

    /// Written content as a hex string (for report debugging), MSB-first per
    /// nibble, zero-padded to a whole nibble.
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for chunk in self.written.chunks(4) {
            let mut nibble = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    nibble |= 1 << (3 - i);
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    #[cfg(test)]
    fn written_string(&self) -> String {
        self.written
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// Zigzag map for signed values that must pass through the (positive-only)
/// self-delimiting encoder: `0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ...`.
pub fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

pub fn unzigzag(v: u64) -> i64 {
    (v >> 1) as i64 ^ -((v & 1) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_width_examples() {
        let mut t = AdviceTape::new();
        t.write_uint_fixed(5, 3).unwrap();
        assert_eq!(t.written_string(), "101");

        let mut t = AdviceTape::new();
        t.write_uint_fixed(0, 1).unwrap();
        assert_eq!(t.written_string(), "0");

        let mut t = AdviceTape::new();
        t.write_bit(true);
        t.write_uint_fixed(2, 2).unwrap();
        assert_eq!(t.written_string(), "110");

        let mut t = AdviceTape::new();
        assert!(t.write_uint_fixed(4, 2).is_err());
    }

    #[test]
    fn self_delimited_examples() {
        let mut t = AdviceTape::new();
        t.write_self_delimited(5).unwrap();
        assert_eq!(t.written_string(), "1110101");

        let mut t = AdviceTape::new();
        t.write_self_delimited(1).unwrap();
        assert_eq!(t.written_string(), "101");

        let mut t = AdviceTape::new();
        t.write_self_delimited(16).unwrap();
        assert_eq!(t.written_string(), "11111010000");

        let mut t = AdviceTape::new();
        assert!(t.write_self_delimited(0).is_err());
    }

    #[test]
    fn reads_past_end_yield_zero() {
        let mut t = AdviceTape::new();
        t.write_bit(true);
        assert!(t.read_bit());
        assert!(!t.read_bit());
        assert_eq!(t.bits_read(), 2);

        let mut t = AdviceTape::new();
        t.write_bit(true);
        t.write_bit(false);
        assert_eq!((t.read_bit(), t.read_bit(), t.read_bit()), (true, false, false));
        assert_eq!(t.bits_read(), 3);
    }

    #[test]
    fn bits_read_counts_reads_not_writes() {
        let t = AdviceTape::new();
        assert_eq!(t.bits_read(), 0);

        let mut t = AdviceTape::new();
        t.write_self_delimited(5).unwrap();
        assert_eq!(t.read_self_delimited().unwrap(), 5);
        assert_eq!(t.bits_read(), 7);

        let mut t = AdviceTape::new();
        t.write_uint_fixed(0x2ff, 10).unwrap();
        t.read_uint_fixed(4);
        assert_eq!(t.bits_read(), 4);
    }

    #[test]
    fn hex_dump() {
        let mut t = AdviceTape::new();
        t.write_uint_fixed(0b10_1101_1011, 10).unwrap();
        assert_eq!(t.to_hex(), "b6c");
    }

    #[test]
    fn zigzag_round_trip() {
        for v in [-5i64, -1, 0, 1, 2, 1000, -1000] {
            assert_eq!(unzigzag(zigzag(v)), v);
        }
        assert_eq!(zigzag(0), 0);
        assert_eq!(zigzag(-1), 1);
        assert_eq!(zigzag(1), 2);
    }

    /// Exhaustive round trip over the full range 1 ..= 2^20.
    #[test]
    fn self_delimited_round_trip_exhaustive() {
        for v in 1u64..=1 << 20 {
            let mut t = AdviceTape::new();
            t.write_self_delimited(v).unwrap();
            let bitlen = 64 - v.leading_zeros() as usize;
            assert_eq!(t.written_len(), 2 * bitlen + 1);
            assert_eq!(t.read_self_delimited().unwrap(), v);
            assert_eq!(t.bits_read(), 2 * bitlen + 1);
        }
    }

    proptest! {

        #[test]
        fn fixed_width_round_trip(w in 1usize..=16, raw in 0u64..(1 << 16)) {
            let v = raw & ((1 << w) - 1);
            let mut t = AdviceTape::new();
            t.write_uint_fixed(v, w).unwrap();
            prop_assert_eq!(t.read_uint_fixed(w), v);
        }

        #[test]
        fn bits_read_is_monotone(ops in proptest::collection::vec(0u8..4, 0..50)) {
            let mut t = AdviceTape::new();
            let mut last = 0;
            for op in ops {
                match op {
                    0 => t.write_bit(true),
                    1 => { t.write_self_delimited(3).unwrap(); }
                    2 => { t.read_bit(); }
                    _ => { t.read_uint_fixed(3); }
                }
                prop_assert!(t.bits_read() >= last);
                last = t.bits_read();
            }
        }
    }
}
