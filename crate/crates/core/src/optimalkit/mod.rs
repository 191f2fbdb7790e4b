//! Machines as halt-event streams, the standard optimal machine and the
//! domain and density transforms built from enumeration processes.

mod density;
mod matching;
mod seats;
mod sets;
mod stream;
mod transforms;

use std::sync::Arc;

use crate::codec::decode_selfdelim;
use crate::dovetail::{DeskVm, Evaluator, GroundTruth, Schedule};
use crate::machine::{self, BinStr, Certificate, Certification, RunOutcome};

pub use density::{combine_halves, set_with_density, shift_density, DensityError, DensityStream, DensityUpdate, Shift};
pub use matching::{domain_from_set, least_matching_c, MatchFailure};
pub use seats::{seat_exchange, SeatExhausted};
pub use sets::{strings_from_lines, strings_to_lines, StringSet};
pub use stream::{events_from_jsonl, events_to_jsonl, EventStream, HaltEvent, Machine};
pub use transforms::{dedupe_values, left_total, prepend_zero};

/// `U(<p>x) = run(p, x)`: the self-delimited program frame comes first,
/// the rest of the string is the input.
#[derive(Clone, Copy, Debug)]
pub struct StandardOptimal {
    pub space_bound: usize,
}

impl Evaluator for StandardOptimal {
    fn eval(&self, program: &BinStr, budget: u64) -> RunOutcome {
        match decode_selfdelim(program) {
            Ok((p, x)) => machine::run(&p, &x, budget),
            Err(_) => RunOutcome::BudgetExhausted { budget },
        }
    }

    fn certify(&self, program: &BinStr, budget: u64) -> Certification {
        match decode_selfdelim(program) {
            Ok((p, x)) => machine::certify(&p, &x, budget, self.space_bound),
            Err(_) => Certification::Diverges {
                certificate: Certificate::MalformedFrame,
            },
        }
    }
}

/// The standard optimal machine over DeskVM, enumerated on strings of
/// length at most `max_len`.
pub fn standard_optimal(max_len: usize, schedule: Schedule, space_bound: usize) -> Machine {
    Machine::dovetailed("U", Arc::new(StandardOptimal { space_bound }), max_len, schedule)
}

/// Plain DeskVM on empty input, dovetailed.
pub fn desk_machine(max_len: usize, schedule: Schedule, space_bound: usize) -> Machine {
    Machine::dovetailed("desk", Arc::new(DeskVm { space_bound }), max_len, schedule)
}

/// The halting programs of a certified window, in length-lex order.
pub fn certified_window_machine(truth: &GroundTruth) -> Machine {
    Machine::from_events("window", truth.max_len(), truth.halt_events())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode_selfdelim;
    use crate::machine::{bs, echo_program};

    #[test]
    fn framing_identity() {
        let u = StandardOptimal { space_bound: 1000 };
        let prog = encode_selfdelim(&echo_program()).concat(&bs("101"));
        assert_eq!(u.eval(&prog, 1000).halted().map(|(o, _)| o.clone()), Some(bs("101")));
    }

    #[test]
    fn malformed_frame_never_halts() {
        let u = StandardOptimal { space_bound: 1000 };
        for t in [1, 10, 1000, 100_000] {
            assert_eq!(u.eval(&bs("11"), t), RunOutcome::BudgetExhausted { budget: t });
        }
        assert_eq!(
            u.certify(&bs("11"), 10),
            Certification::Diverges {
                certificate: Certificate::MalformedFrame
            }
        );
    }

    #[test]
    fn standard_machine_small_window() {
        let m = standard_optimal(6, Schedule::doubling(1 << 10), 1000);
        let progs: Vec<String> = m.events().map(|e| e.program.to_string()).collect();
        // "01" frames the empty program, which runs off the end;
        // "0001" frames "0" = HALT and may be followed by any input.
        assert!(progs.contains(&"0001".to_string()));
        assert!(progs.contains(&"000110".to_string()));
        assert!(!progs.contains(&"01".to_string()));
    }
}
