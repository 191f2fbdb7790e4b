//! Length-lexicographic numbering of strings and the doubled-bit
//! self-delimiting code.

use thiserror::Error;

use crate::machine::BinStr;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("malformed self-delimiting frame at bit {position}")]
    MalformedFrame { position: usize },
}

/// The `i`-th string in length-lexicographic order: 0 ↦ ε, 1 ↦ "0",
/// 2 ↦ "1", 3 ↦ "00", ...
pub fn index_to_string(i: u64) -> BinStr {
    let v = i as u128 + 1;
    let len = 127 - v.leading_zeros() as usize;
    let bits = (0..len).rev().map(|k| (v >> k) & 1 == 1).collect();
    BinStr::from_bits(bits)
}

/// Inverse of [`index_to_string`]; `None` when the index does not fit in
/// a `u64` (strings of 64 bits or more, except a few).
pub fn string_to_index(s: &BinStr) -> Option<u64> {
    if s.len() > 64 {
        return None;
    }
    let mut v: u128 = 1;
    for &b in s.bits() {
        v = (v << 1) | b as u128;
    }
    u64::try_from(v - 1).ok()
}

/// Each bit doubled, then `01`.
pub fn encode_selfdelim(p: &BinStr) -> BinStr {
    let mut bits = Vec::with_capacity(2 * p.len() + 2);
    for &b in p.bits() {
        bits.push(b);
        bits.push(b);
    }
    bits.push(false);
    bits.push(true);
    BinStr::from_bits(bits)
}

/// Split `s` into the framed payload and the remaining suffix.
pub fn decode_selfdelim(s: &BinStr) -> Result<(BinStr, BinStr), CodecError> {
    let bits = s.bits();
    let mut p = Vec::new();
    let mut i = 0;
    while i + 1 < bits.len() {
        match (bits[i], bits[i + 1]) {
            (false, false) => p.push(false),
            (true, true) => p.push(true),
            (false, true) => {
                return Ok((BinStr::from_bits(p), s.slice(i + 2, s.len())));
            }
            (true, false) => return Err(CodecError::MalformedFrame { position: i }),
        }
        i += 2;
    }
    Err(CodecError::MalformedFrame { position: i })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::bs;
    use proptest::prelude::*;

    #[test]
    fn first_indices() {
        assert_eq!(index_to_string(0), bs(""));
        assert_eq!(index_to_string(1), bs("0"));
        assert_eq!(index_to_string(2), bs("1"));
        assert_eq!(index_to_string(3), bs("00"));
    }

    #[test]
    fn round_trip_below_2_16() {
        for i in 0..(1u64 << 16) {
            let s = index_to_string(i);
            assert_eq!(s.len(), (64 - (i + 1).leading_zeros() - 1) as usize);
            assert_eq!(string_to_index(&s), Some(i));
        }
    }

    #[test]
    fn last_string_of_each_length() {
        for n in 0..20 {
            assert_eq!(index_to_string((1u64 << (n + 1)) - 2), BinStr::repeat(true, n));
        }
    }

    #[test]
    fn order_preserving() {
        for i in 0..2000u64 {
            assert!(index_to_string(i) < index_to_string(i + 1));
        }
    }

    #[test]
    fn extreme_index() {
        let s = index_to_string(u64::MAX);
        assert_eq!(s.len(), 64);
        assert_eq!(string_to_index(&s), Some(u64::MAX));
        assert_eq!(string_to_index(&BinStr::repeat(true, 64)), None);
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_selfdelim(&bs("")), bs("01"));
        assert_eq!(encode_selfdelim(&bs("1")), bs("1101"));
        assert_eq!(encode_selfdelim(&bs("10")), bs("110001"));
    }

    #[test]
    fn decode_rejects_bad_frames() {
        assert!(decode_selfdelim(&bs("11")).is_err());
        assert!(decode_selfdelim(&bs("")).is_err());
        assert!(decode_selfdelim(&bs("10")).is_err());
        assert!(decode_selfdelim(&bs("0011100")).is_err());
    }

    #[test]
    fn prefix_free_up_to_8() {
        let codes: Vec<BinStr> = (0..(1u64 << 9) - 1)
            .map(|i| encode_selfdelim(&index_to_string(i)))
            .collect();
        for (a, ca) in codes.iter().enumerate() {
            for (b, cb) in codes.iter().enumerate() {
                if a != b {
                    assert!(!cb.starts_with(ca), "{ca} prefixes {cb}");
                }
            }
        }
    }

    fn arb_bits(max: usize) -> impl Strategy<Value = BinStr> {
        proptest::collection::vec(any::<bool>(), 0..max).prop_map(BinStr::from_bits)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn decode_inverts_encode(p in arb_bits(24), x in arb_bits(40)) {
            let framed = encode_selfdelim(&p).concat(&x);
            prop_assert_eq!(framed.len(), x.len() + 2 * p.len() + 2);
            prop_assert_eq!(decode_selfdelim(&framed).unwrap(), (p, x));
        }

        #[test]
        fn frame_one_then_payload(x in arb_bits(40)) {
            let framed = bs("1101").concat(&x);
            prop_assert_eq!(decode_selfdelim(&framed).unwrap(), (bs("1"), x));
        }
    }
}
