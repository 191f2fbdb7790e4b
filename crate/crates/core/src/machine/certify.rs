//! Sound halting/divergence certification.
//!
//! Two kinds of non-termination proof are produced:
//!
//! * `Cycle`: the control key of some configuration repeats (running off the
//!   program end is the period-1 instance).
//! * `Drift`: at two head-position records with the same program counter and
//!   input position, the tape segment the head visited in between matches
//!   under translation, and everything beyond the head is blank. The machine
//!   then repeats the same block of work one shift further, forever.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::binstr::BinStr;
use super::vm::{self, Config, Program, StepResult};

/// How many earlier head records a new record is compared against.
const DRIFT_LOOKBACK: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// The configuration at step `first` recurs `period` steps later.
    Cycle { first: u64, period: u64 },
    /// Translated repetition: from step `first`, every `period` steps the
    /// machine is in the same state shifted `shift` cells.
    Drift { first: u64, period: u64, shift: i64 },
    /// Malformed self-delimiting frame; the framed machine never halts.
    MalformedFrame,
    /// The program lies outside the domain of a machine whose window has
    /// been fully enumerated from a certified source.
    Closure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certification {
    Halts { steps: u64, output: BinStr },
    Diverges { certificate: Certificate },
    Unknown,
}

impl Certification {
    pub fn is_unknown(&self) -> bool {
        matches!(self, Certification::Unknown)
    }
}

#[derive(Debug)]
struct Record {
    pc: usize,
    input_pos: usize,
    step: u64,
    head: i64,
    /// Extreme head position (in the mirrored frame: the minimum) between
    /// this record and the next one.
    local_min: i64,
    /// Cells read from the head backwards, `snapshot[d] = tape(head - d*dir)`.
    snapshot: Vec<bool>,
}

/// Head records in one direction. Positions are mirrored by `dir` so the
/// same logic serves rightward (`dir = 1`) and leftward (`dir = -1`) drift.
struct DriftTracker {
    dir: i64,
    best: i64,
    records: Vec<Record>,
    capacity: usize,
}

impl DriftTracker {
    fn new(dir: i64, capacity: usize) -> Self {
        DriftTracker {
            dir,
            best: 0,
            records: Vec::new(),
            capacity,
        }
    }

    /// Observe the configuration after a step; returns a certificate when a
    /// translated repetition is found.
    fn observe(&mut self, cfg: &Config) -> Option<Certificate> {
        let pos = cfg.head * self.dir;
        if let Some(last) = self.records.last_mut() {
            last.local_min = last.local_min.min(pos);
        }
        if pos <= self.best {
            return None;
        }
        self.best = pos;

        let lowest = match cfg.tape.support() {
            Some((a, b)) => {
                if self.dir > 0 {
                    a.min(cfg.head)
                } else {
                    -(b.max(cfg.head))
                }
            }
            None => pos,
        };
        let snapshot: Vec<bool> = (0..=(pos - lowest))
            .map(|d| cfg.tape.get((pos - d) * self.dir))
            .collect();

        let mut window_min = pos;
        for rec in self.records.iter().rev().take(DRIFT_LOOKBACK) {
            window_min = window_min.min(rec.local_min).min(rec.head);
            if rec.pc != cfg.pc || rec.input_pos != cfg.input_pos {
                continue;
            }
            let width = (rec.head - window_min + 1) as usize;
            let matches = (0..width).all(|d| {
                let old = rec.snapshot.get(d).copied().unwrap_or(false);
                let new = snapshot.get(d).copied().unwrap_or(false);
                old == new
            });
            if matches {
                return Some(Certificate::Drift {
                    first: rec.step,
                    period: cfg.steps - rec.step,
                    shift: (pos - rec.head) * self.dir,
                });
            }
        }

        if self.records.len() < self.capacity {
            self.records.push(Record {
                pc: cfg.pc,
                input_pos: cfg.input_pos,
                step: cfg.steps,
                head: pos,
                local_min: pos,
                snapshot,
            });
        }
        None
    }
}

/// Certify halting or divergence of `program` on `input`.
///
/// Simulates up to `budget` steps, remembering at most `space_bound`
/// configurations (and as many head records per direction). Once the store
/// is full, simulation continues and still detects halts and revisits of
/// stored configurations. `Halts` and `Diverges` are always correct.
pub fn certify(program: &BinStr, input: &BinStr, budget: u64, space_bound: usize) -> Certification {
    assert!(budget >= 1, "budget must be at least 1");
    assert!(space_bound >= 1, "space bound must be at least 1");
    certify_compiled(&Program::decode(program), input, budget, space_bound)
}

pub fn certify_compiled(
    program: &Program,
    input: &BinStr,
    budget: u64,
    space_bound: usize,
) -> Certification {
    let mut cfg = Config::default();
    let mut seen: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut right = DriftTracker::new(1, space_bound);
    let mut left = DriftTracker::new(-1, space_bound);
    seen.insert(cfg.control_key(), 0);

    while cfg.steps < budget {
        match vm::step(program, input, &mut cfg) {
            StepResult::Halted => {
                return Certification::Halts {
                    steps: cfg.steps,
                    output: cfg.output,
                }
            }
            StepResult::OffEnd => {
                return Certification::Diverges {
                    certificate: Certificate::Cycle {
                        first: cfg.steps,
                        period: 1,
                    },
                }
            }
            StepResult::Continue => {}
        }
        let key = cfg.control_key();
        if let Some(&first) = seen.get(&key) {
            return Certification::Diverges {
                certificate: Certificate::Cycle {
                    first,
                    period: cfg.steps - first,
                },
            };
        }
        if seen.len() < space_bound {
            seen.insert(key, cfg.steps);
        }
        if let Some(c) = right.observe(&cfg).or_else(|| left.observe(&cfg)) {
            return Certification::Diverges { certificate: c };
        }
    }
    Certification::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::vm::{assemble, Op};
    use crate::machine::{halt_program, loop_program, run, RunOutcome};

    fn diverges(c: &Certification) -> bool {
        matches!(c, Certification::Diverges { .. })
    }

    #[test]
    fn halt_and_loop() {
        assert_eq!(
            certify(&halt_program(), &BinStr::empty(), 10, 10),
            Certification::Halts {
                steps: 1,
                output: BinStr::empty()
            }
        );
        match certify(&loop_program(), &BinStr::empty(), 10, 10) {
            Certification::Diverges {
                certificate: Certificate::Cycle { .. },
            } => {}
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn rightward_march_is_drift() {
        // FLIP [ RIGHT FLIP ] marches right forever
        let p = assemble(&[Op::Flip, Op::Open, Op::Right, Op::Flip, Op::Close]);
        let c = certify(&p, &BinStr::empty(), 1000, 1000);
        match c {
            Certification::Diverges {
                certificate: Certificate::Drift { shift, period, .. },
            } => {
                assert!(shift > 0);
                assert!(period > 0);
            }
            other => panic!("expected drift, got {other:?}"),
        }
        assert_eq!(run(&p, &BinStr::empty(), 5000), RunOutcome::BudgetExhausted { budget: 5000 });
    }

    #[test]
    fn leftward_march_with_garbage_is_drift() {
        // FLIP [ LEFT FLIP RIGHT FLIP LEFT ]: zig-zag drifting left
        let p = assemble(&[
            Op::Flip,
            Op::Open,
            Op::Left,
            Op::Flip,
            Op::Right,
            Op::Flip,
            Op::Left,
            Op::Close,
        ]);
        let c = certify(&p, &BinStr::empty(), 10_000, 10_000);
        assert!(diverges(&c), "{c:?}");
        assert_eq!(run(&p, &BinStr::empty(), 20_000), RunOutcome::BudgetExhausted { budget: 20_000 });
    }

    #[test]
    fn small_budget_is_unknown_not_wrong() {
        let p = assemble(&[Op::Right, Op::Right, Op::Right, Op::Halt]);
        assert_eq!(certify(&p, &BinStr::empty(), 2, 10), Certification::Unknown);
        assert!(matches!(
            certify(&p, &BinStr::empty(), 4, 10),
            Certification::Halts { steps: 4, .. }
        ));
    }

    #[test]
    fn read_loop_halts_at_end_of_input() {
        let p = assemble(&[Op::Flip, Op::Open, Op::Read, Op::Flip, Op::Close]);
        // reads until input runs out; cell after READ depends on the bit
        let c = certify(&p, &bs_input("111"), 100, 100);
        assert!(matches!(c, Certification::Halts { .. }) || diverges(&c));
        let r = run(&p, &bs_input("111"), 100);
        match c {
            Certification::Halts { steps, .. } => assert_eq!(r.halted().unwrap().1, steps),
            _ => assert!(r.halted().is_none()),
        }
    }

    fn bs_input(s: &str) -> BinStr {
        s.parse().unwrap()
    }
}
