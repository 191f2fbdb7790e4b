use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::sets::StringSet;
use super::stream::{HaltEvent, Machine};
use super::transforms::prepend_zero;
use crate::machine::BinStr;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("every string of length {len} is occupied")]
pub struct SeatExhausted {
    pub len: usize,
}

/// Seat exchange over `0·dom(U)`. Each round advances every live `W_n`
/// (`n = 1..=k`) by one element, then passes one U-event. The first
/// element of `W_n` longer than `n` enters the domain with value ε (if it
/// is not there already) and retires `W_n`. A U-event whose seat is taken
/// moves to the least free string of the same length.
///
/// Panics with [`SeatExhausted`]'s message if a length runs out of seats,
/// which the zero prefix rules out.
pub fn seat_exchange(u: &Machine, w: &[StringSet]) -> Machine {
    let base = prepend_zero(u);
    let max_len = w.iter().map(StringSet::max_len).fold(base.max_len(), usize::max);
    let w: Vec<StringSet> = w.to_vec();
    Machine::new(format!("seats({}, k={})", u.name(), w.len()), max_len, move || {
        Box::new(SeatStream::new(base.events(), w.iter().map(StringSet::iter).collect()))
    })
}

struct SeatStream {
    u: Option<Box<dyn Iterator<Item = HaltEvent> + Send>>,
    w: Vec<Option<Box<dyn Iterator<Item = BinStr> + Send>>>,
    occupied: HashSet<BinStr>,
    least_free: HashMap<usize, u64>,
    out: std::collections::VecDeque<HaltEvent>,
    seq: u64,
}

impl SeatStream {
    fn new(u: Box<dyn Iterator<Item = HaltEvent> + Send>, w: Vec<Box<dyn Iterator<Item = BinStr> + Send>>) -> Self {
        SeatStream {
            u: Some(u),
            w: w.into_iter().map(Some).collect(),
            occupied: HashSet::new(),
            least_free: HashMap::new(),
            out: Default::default(),
            seq: 0,
        }
    }

    fn emit(&mut self, mut e: HaltEvent) {
        self.occupied.insert(e.program.clone());
        e.seq = self.seq;
        self.seq += 1;
        self.out.push_back(e);
    }

    fn free_seat(&mut self, len: usize) -> BinStr {
        let cursor = self.least_free.entry(len).or_insert(0);
        loop {
            if len < 64 && *cursor >= 1u64 << len {
                panic!("{}", SeatExhausted { len });
            }
            let s = BinStr::from_u64(*cursor, len);
            if !self.occupied.contains(&s) {
                return s;
            }
            *cursor += 1;
        }
    }

    fn round(&mut self) -> bool {
        let mut progressed = false;
        for n in 1..=self.w.len() {
            let Some(stream) = self.w[n - 1].as_mut() else { continue };
            progressed = true;
            match stream.next() {
                None => self.w[n - 1] = None,
                Some(z) if z.len() > n => {
                    self.w[n - 1] = None;
                    if !self.occupied.contains(&z) {
                        self.emit(HaltEvent {
                            seq: 0,
                            program: z,
                            output: BinStr::empty(),
                            steps: 1,
                        });
                    }
                }
                Some(_) => {}
            }
        }
        if let Some(u) = self.u.as_mut() {
            progressed = true;
            match u.next() {
                None => self.u = None,
                Some(mut e) => {
                    if self.occupied.contains(&e.program) {
                        e.program = self.free_seat(e.program.len());
                    }
                    self.emit(e);
                }
            }
        }
        progressed
    }
}

impl Iterator for SeatStream {
    type Item = HaltEvent;

    fn next(&mut self) -> Option<HaltEvent> {
        while self.out.is_empty() {
            if !self.round() {
                return None;
            }
        }
        self.out.pop_front()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::bs;

    #[test]
    fn no_streams_is_zero_shift() {
        let u = Machine::from_pairs("u", 2, vec![(bs("1"), bs("1")), (bs("01"), bs(""))]);
        assert_eq!(seat_exchange(&u, &[]).materialize(), prepend_zero(&u).materialize());
    }

    #[test]
    fn w_element_comes_first() {
        let u = Machine::from_pairs("u", 2, vec![(bs("00"), bs("1"))]);
        let w1 = StringSet::from_vec("w1", vec![bs("000")]);
        let v = seat_exchange(&u, &[w1]).materialize();
        assert_eq!((v[0].program.clone(), v[0].output.clone()), (bs("000"), bs("")));
        // U's "00" became "000", which is taken: it moves to "001".
        assert_eq!((v[1].program.clone(), v[1].output.clone()), (bs("001"), bs("1")));
    }

    #[test]
    fn short_w_elements_skipped() {
        let u = Machine::from_pairs("u", 1, vec![]);
        let w2 = StringSet::from_vec("w2", vec![bs("1"), bs("10"), bs("111"), bs("110")]);
        let v: Vec<_> = seat_exchange(&u, &[StringSet::empty(), w2]).events().map(|e| e.program).collect();
        assert_eq!(v, vec![bs("111")]);
    }
}
