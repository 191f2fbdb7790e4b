use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A finite binary string.
///
/// Ordering is length-lexicographic (shorter strings first, then
/// lexicographic), which is the order under which strings are identified
/// with natural numbers.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BinStr {
    bits: Vec<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid bit character {0:?}; expected '0' or '1'")]
pub struct ParseBinStrError(pub char);

impl BinStr {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// The `len`-bit string holding `value` in binary, most significant bit
    /// first. Bits of `value` above `len` are ignored.
    pub fn from_u64(value: u64, len: usize) -> Self {
        let bits = (0..len)
            .rev()
            .map(|i| if i >= 64 { false } else { (value >> i) & 1 == 1 })
            .collect();
        Self { bits }
    }

    pub fn repeat(bit: bool, len: usize) -> Self {
        Self {
            bits: vec![bit; len],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn concat(&self, other: &BinStr) -> BinStr {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        BinStr { bits }
    }

    pub fn prepend(&self, bit: bool) -> BinStr {
        let mut bits = Vec::with_capacity(self.len() + 1);
        bits.push(bit);
        bits.extend_from_slice(&self.bits);
        BinStr { bits }
    }

    pub fn starts_with(&self, prefix: &BinStr) -> bool {
        self.bits.starts_with(&prefix.bits)
    }

    pub fn slice(&self, start: usize, end: usize) -> BinStr {
        BinStr {
            bits: self.bits[start..end].to_vec(),
        }
    }

    /// Value of the string read as a binary number, or `None` past 64 bits.
    pub fn as_u64(&self) -> Option<u64> {
        if self.len() > 64 {
            return None;
        }
        Some(self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }
}

impl Ord for BinStr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BinStr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("ε")
        } else {
            write!(f, "\"{self}\"")
        }
    }
}

impl FromStr for BinStr {
    type Err = ParseBinStrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseBinStrError(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { bits })
    }
}

impl Serialize for BinStr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinStr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for parsing a literal in tests and examples.
///
/// Panics on characters other than `0` and `1`.
pub fn bs(s: &str) -> BinStr {
    s.parse().expect("binary literal")
}
