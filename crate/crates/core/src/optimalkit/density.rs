use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::sets::StringSet;
use super::stream::{HaltEvent, Machine};
use crate::machine::BinStr;
use crate::rational::Fraction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    /// `0·dom(U)`.
    Zero,
    /// `0·dom(U)` plus every string starting with 1, valued ε.
    OneFill,
}

/// Prefix every program with 0; `OneFill` also adds all strings starting
/// with 1 (up to the new window), alternating with the shifted events.
pub fn shift_density(u: &Machine, variant: Shift) -> Machine {
    let max_len = u.max_len() + 1;
    let shifted = super::prepend_zero(u);
    match variant {
        Shift::Zero => shifted.with_name(format!("shift0({})", u.name())),
        Shift::OneFill => {
            let right = StringSet::filtered("ones", max_len, |s| s.get(0) == Some(true));
            Machine::new(format!("shift1({})", u.name()), max_len, move || {
                Box::new(alternate(shifted.events(), constant_events(right.iter())))
            })
        }
    }
}

/// Left part `0^d·dom(U)`, right part `S_right` valued ε, interleaved.
/// Every string of `S_right` must start with 1.
pub fn combine_halves(u: &Machine, d: usize, s_right: &StringSet) -> Machine {
    assert!(d >= 1, "combine_halves needs d >= 1");
    let mut left = u.clone();
    for _ in 0..d {
        left = shift_density(&left, Shift::Zero);
    }
    let max_len = left.max_len().max(s_right.max_len());
    let right = s_right.clone();
    Machine::new(format!("combine({}, {d})", u.name()), max_len, move || {
        let right = right.iter().inspect(|s| {
            assert!(s.get(0) == Some(true), "right part string {s} does not start with 1")
        });
        Box::new(alternate(left.events(), constant_events(right)))
    })
}

fn constant_events(strings: impl Iterator<Item = BinStr> + Send + 'static) -> impl Iterator<Item = HaltEvent> + Send {
    strings.map(|program| HaltEvent {
        seq: 0,
        program,
        output: BinStr::empty(),
        steps: 1,
    })
}

/// Round-robin merge, draining whichever side lasts longer; events are
/// renumbered.
fn alternate(
    a: impl Iterator<Item = HaltEvent> + Send + 'static,
    b: impl Iterator<Item = HaltEvent> + Send + 'static,
) -> impl Iterator<Item = HaltEvent> + Send {
    let mut a = a.fuse();
    let mut b = b.fuse();
    let mut from_a = true;
    let mut seq = 0u64;
    std::iter::from_fn(move || {
        let next = if from_a {
            a.next().or_else(|| b.next())
        } else {
            b.next().or_else(|| a.next())
        };
        from_a = !from_a;
        next.map(|mut e| {
            e.seq = seq;
            seq += 1;
            e
        })
    })
}

/// A new lower approximation `v_n = value` for length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DensityUpdate {
    pub n: usize,
    pub value: Fraction,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DensityError {
    #[error("density {value} at length {n} exceeds 1")]
    InvalidDensity { n: usize, value: Fraction },
    #[error("density {value} at length {n} is not a multiple of 2^-{n}")]
    NotDyadic { n: usize, value: Fraction },
    #[error("density at length {n} decreased from {previous}/2^{n} to {value}")]
    NotMonotone { n: usize, previous: u64, value: Fraction },
}

/// Strings of a set with prescribed per-length densities: after each
/// update the emitted strings of length `n` are exactly the first
/// `v_n·2^n` strings of that length in lexicographic order.
pub struct DensityStream<I> {
    updates: I,
    counts: HashMap<usize, u64>,
    pending: VecDeque<BinStr>,
    failed: bool,
}

pub fn set_with_density<I: IntoIterator<Item = DensityUpdate>>(updates: I) -> DensityStream<I::IntoIter> {
    DensityStream {
        updates: updates.into_iter(),
        counts: HashMap::new(),
        pending: VecDeque::new(),
        failed: false,
    }
}

impl<I> DensityStream<I> {
    fn apply(&mut self, u: DensityUpdate) -> Result<(), DensityError> {
        let DensityUpdate { n, value } = u;
        assert!(n < 64, "length {n} too large");
        let scaled = value.num as u128 * (1u128 << n);
        if !scaled.is_multiple_of(value.den as u128) {
            return Err(DensityError::NotDyadic { n, value });
        }
        let target = scaled / value.den as u128;
        if target > 1u128 << n {
            return Err(DensityError::InvalidDensity { n, value });
        }
        let target = target as u64;
        let current = self.counts.entry(n).or_insert(0);
        if target < *current {
            return Err(DensityError::NotMonotone {
                n,
                previous: *current,
                value,
            });
        }
        self.pending.extend((*current..target).map(|k| BinStr::from_u64(k, n)));
        *current = target;
        Ok(())
    }
}

impl<I: Iterator<Item = DensityUpdate>> Iterator for DensityStream<I> {
    type Item = Result<BinStr, DensityError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(s) = self.pending.pop_front() {
                return Some(Ok(s));
            }
            if self.failed {
                return None;
            }
            let u = self.updates.next()?;
            if let Err(e) = self.apply(u) {
                self.failed = true;
                return Some(Err(e));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::bs;

    fn upd(n: usize, num: u64, den: u64) -> DensityUpdate {
        DensityUpdate {
            n,
            value: Fraction::new(num, den),
        }
    }

    #[test]
    fn half_density_is_first_half() {
        let got: Vec<_> = set_with_density((1..=3).map(|n| upd(n, 1, 2)))
            .collect::<Result<_, _>>()
            .unwrap();
        let expect: Vec<_> = ["0", "00", "01", "000", "001", "010", "011"].iter().map(|s| bs(s)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn zero_density_is_empty() {
        assert_eq!(set_with_density((0..5).map(|n| upd(n, 0, 1))).count(), 0);
    }

    #[test]
    fn rejects_bad_updates() {
        let r: Result<Vec<_>, _> = set_with_density([upd(2, 5, 4)]).collect();
        assert!(matches!(r, Err(DensityError::InvalidDensity { n: 2, .. })));
        let r: Result<Vec<_>, _> = set_with_density([upd(2, 1, 3)]).collect();
        assert!(matches!(r, Err(DensityError::NotDyadic { .. })));
        let r: Result<Vec<_>, _> = set_with_density([upd(3, 4, 8), upd(3, 2, 8)]).collect();
        assert!(matches!(r, Err(DensityError::NotMonotone { previous: 4, .. })));
    }

    #[test]
    fn one_fill_adds_ones() {
        let u = Machine::from_pairs("u", 1, vec![(bs("1"), bs("1"))]);
        let v = shift_density(&u, Shift::OneFill);
        let progs: Vec<String> = v.events().map(|e| e.program.to_string()).collect();
        assert_eq!(progs, vec!["01", "1", "10", "11"]);
    }

    #[test]
    fn combine_d1_empty_right_matches_shift() {
        let u = Machine::from_pairs("u", 2, vec![(bs("1"), bs("1")), (bs("00"), bs(""))]);
        let a = combine_halves(&u, 1, &StringSet::empty()).materialize();
        let b = shift_density(&u, Shift::Zero).materialize();
        assert_eq!(a, b);
    }

    #[test]
    #[should_panic(expected = "does not start with 1")]
    fn combine_rejects_left_strings() {
        let u = Machine::from_pairs("u", 1, vec![]);
        combine_halves(&u, 1, &StringSet::from_vec("bad", vec![bs("01")])).materialize();
    }
}
