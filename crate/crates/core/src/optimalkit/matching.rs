use thiserror::Error;

use super::sets::StringSet;
use super::stream::{HaltEvent, Machine};
use crate::machine::BinStr;

/// `S` ran out while a U-event was still waiting for a short enough string.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("no string of length <= {} left in S for U-event at {witness} ({consumed} strings consumed)", .witness.len() + .c)]
pub struct MatchFailure {
    pub witness: BinStr,
    pub output: BinStr,
    pub c: usize,
    pub consumed: u64,
}

/// Build `V` with `dom(V) = S`: U-events are served one at a time, each
/// waiting for the next fresh `z ∈ S` with `|z| <= |x| + c` and setting
/// `V(z) = U(x)`. Strings of `S` that arrive too long while a U-event
/// waits, and everything left in `S` after `U` is exhausted, get value ε.
pub fn domain_from_set(u: &Machine, s: &StringSet, c: usize) -> Result<Machine, MatchFailure> {
    let mut strings = s.iter();
    let mut consumed = 0u64;
    let mut out: Vec<HaltEvent> = Vec::new();
    let filler = |program: BinStr| HaltEvent {
        seq: 0,
        program,
        output: BinStr::empty(),
        steps: 1,
    };
    for e in u.events() {
        let limit = e.program.len() + c;
        loop {
            let Some(z) = strings.next() else {
                return Err(MatchFailure {
                    witness: e.program,
                    output: e.output,
                    c,
                    consumed,
                });
            };
            consumed += 1;
            if z.len() <= limit {
                out.push(HaltEvent {
                    seq: 0,
                    program: z,
                    output: e.output.clone(),
                    steps: e.steps,
                });
                break;
            }
            out.push(filler(z));
        }
    }
    out.extend(strings.map(filler));
    let name = format!("dom({}, {}, c={c})", u.name(), s.name());
    Ok(Machine::from_events(name, s.max_len(), out))
}

/// Least `c` in `range` for which matching succeeds.
pub fn least_matching_c(u: &Machine, s: &StringSet, range: std::ops::RangeInclusive<usize>) -> Option<usize> {
    range.into_iter().find(|&c| domain_from_set(u, s, c).is_ok())
}
