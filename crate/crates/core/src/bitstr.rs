//! Fixed-length binary strings over the small universes (`n <= 20`) that the
//! exhaustive machinery works with.
//!
//! Bit `i` (0-based) is round `i+1`'s answer. The bitwise order `x ⊑ y`
//! (every 1 of `x` is a 1 of `y`) is the domination order used by the
//! covering schemes.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const MAX_LEN: usize = 20;

/// An `n`-bit output string, `n <= 20`, packed into a `u32`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitStr {
    mask: u32,
    len: u8,
}

impl BitStr {
    pub fn new(mask: u32, len: usize) -> Self {
        assert!(len <= MAX_LEN, "bit string length {len} exceeds {MAX_LEN}");
        assert!(len == 32 || mask < (1u32 << len), "mask has bits past len");
        Self { mask, len: len as u8 }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(0, len)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        self.mask >> i & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len());
        if v {
            self.mask |= 1 << i;
        } else {
            self.mask &= !(1 << i);
        }
    }

    pub fn push(&mut self, v: bool) {
        assert!(self.len() < MAX_LEN);
        if v {
            self.mask |= 1 << self.len;
        }
        self.len += 1;
    }

    pub fn ones(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn num_zeros(&self) -> u32 {
        self.len as u32 - self.ones()
    }

    /// The domination order: `self ⊑ other` iff every 1 of `self` is a 1 of `other`.
    pub fn dominated_by(&self, other: &BitStr) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.mask & !other.mask == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// All `2^n` strings of length `n` in ascending mask order.
    pub fn all(len: usize) -> impl Iterator<Item = BitStr> {
        assert!(len <= MAX_LEN);
        (0u32..1u32 << len).map(move |mask| BitStr::new(mask, len))
    }
}

impl fmt::Display for BitStr {
    /// Renders round 1 first: `BitStr` 0b110 of length 3 prints as "011".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitStr(\"{self}\")")
    }
}

impl std::str::FromStr for BitStr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_LEN {
            return Err(format!("bit string longer than {MAX_LEN}: {s:?}"));
        }
        let mut b = BitStr::zeros(0);
        for ch in s.chars() {
            match ch {
                '0' => b.push(false),
                '1' => b.push(true),
                _ => return Err(format!("invalid bit {ch:?} in {s:?}")),
            }
        }
        Ok(b)
    }
}

impl Serialize for BitStr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitStr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_via_display() {
        for s in ["", "0", "1", "0110", "10100011"] {
            let b: BitStr = s.parse().unwrap();
            assert_eq!(b.to_string(), s);
        }
    }

    #[test]
    fn domination_order() {
        let x: BitStr = "0110".parse().unwrap();
        let y: BitStr = "0111".parse().unwrap();
        let z: BitStr = "0100".parse().unwrap();
        assert!(x.dominated_by(&y));
        assert!(!y.dominated_by(&x));
        assert!(!x.dominated_by(&z));
        assert!(z.dominated_by(&x));
    }

    #[test]
    fn counts() {
        let x: BitStr = "10110".parse().unwrap();
        assert_eq!(x.ones(), 3);
        assert_eq!(x.num_zeros(), 2);
    }
}
