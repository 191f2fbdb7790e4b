//! Deterministic dovetailing, ground truth and the halting, busy-beaver and
//! complexity tables built on top of it.

mod tables;
mod truth;

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;

use crate::codec::index_to_string;
use crate::machine::{self, BinStr, Certification, RunOutcome};
use crate::optimalkit::HaltEvent;

pub use tables::{
    bb_from_events, bb_table, complexity_table, halting_table, sandwich_constant, survivor_stats, BBTable,
    ComplexityEntry, ComplexityTable, HaltingRow, HaltingTable, SurvivorPoint, SurvivorStats,
};
pub use truth::{ground_truth, GroundTruth, TruthCounts, TruthError};

/// Budgeted evaluation of programs without input.
pub trait Evaluator: Send + Sync {
    /// Plain budgeted run.
    fn eval(&self, program: &BinStr, budget: u64) -> RunOutcome;

    /// Sound verdict within `budget`. The default never proves divergence.
    fn certify(&self, program: &BinStr, budget: u64) -> Certification {
        match self.eval(program, budget) {
            RunOutcome::Halted { output, steps } => Certification::Halts { steps, output },
            RunOutcome::CertifiedDivergent { certificate } => Certification::Diverges { certificate },
            RunOutcome::BudgetExhausted { .. } => Certification::Unknown,
        }
    }
}

/// DeskVM programs run on empty input; divergence certified with a bounded
/// configuration store.
#[derive(Clone, Copy, Debug)]
pub struct DeskVm {
    pub space_bound: usize,
}

impl Evaluator for DeskVm {
    fn eval(&self, program: &BinStr, budget: u64) -> RunOutcome {
        machine::run(program, &BinStr::empty(), budget)
    }

    fn certify(&self, program: &BinStr, budget: u64) -> Certification {
        machine::certify(program, &BinStr::empty(), budget, self.space_bound)
    }
}

/// Doubling rounds `1, 2, 4, ...` capped by `max_budget` (which is always
/// the last round).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub max_budget: u64,
}

impl Schedule {
    pub fn doubling(max_budget: u64) -> Schedule {
        assert!(max_budget >= 1);
        Schedule { max_budget }
    }

    pub fn rounds(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut t = 1u64;
        while t < self.max_budget {
            out.push(t);
            t = t.saturating_mul(2);
        }
        out.push(self.max_budget);
        out
    }
}

const CHUNK: usize = 4096;

/// Halt events of all programs of length at most `max_len`: round by round,
/// each still-pending program (in length-lex order) is certified with the
/// round's budget. Halting programs are emitted once; certified-divergent
/// ones are dropped. Evaluation inside a chunk runs in parallel, emission
/// order is the schedule order.
pub struct Dovetail {
    evaluator: Arc<dyn Evaluator>,
    rounds: Vec<u64>,
    round: usize,
    pending: Vec<u64>,
    cursor: usize,
    survivors: Vec<u64>,
    buffer: VecDeque<HaltEvent>,
    seq: u64,
}

impl Dovetail {
    pub fn new(evaluator: Arc<dyn Evaluator>, max_len: usize, schedule: Schedule) -> Dovetail {
        assert!(max_len < 63, "window too large");
        let count = (1u64 << (max_len + 1)) - 1;
        Dovetail {
            evaluator,
            rounds: schedule.rounds(),
            round: 0,
            pending: (0..count).collect(),
            cursor: 0,
            survivors: Vec::new(),
            buffer: VecDeque::new(),
            seq: 0,
        }
    }

    /// Programs still unresolved (only meaningful once the stream is
    /// exhausted).
    pub fn unresolved(&self) -> Vec<BinStr> {
        self.pending[self.cursor..]
            .iter()
            .chain(self.survivors.iter())
            .map(|&i| index_to_string(i))
            .collect()
    }

    fn fill(&mut self) -> bool {
        loop {
            if self.round >= self.rounds.len() {
                return false;
            }
            if self.cursor >= self.pending.len() {
                self.pending = std::mem::take(&mut self.survivors);
                self.cursor = 0;
                self.round += 1;
                if self.pending.is_empty() {
                    self.round = self.rounds.len();
                }
                continue;
            }
            let budget = self.rounds[self.round];
            let end = (self.cursor + CHUNK).min(self.pending.len());
            let ev = &self.evaluator;
            let verdicts: Vec<(u64, Certification)> = self.pending[self.cursor..end]
                .par_iter()
                .map(|&i| (i, ev.certify(&index_to_string(i), budget)))
                .collect();
            self.cursor = end;
            for (i, verdict) in verdicts {
                match verdict {
                    Certification::Halts { steps, output } => {
                        self.buffer.push_back(HaltEvent {
                            seq: self.seq,
                            program: index_to_string(i),
                            output,
                            steps,
                        });
                        self.seq += 1;
                    }
                    Certification::Diverges { .. } => {}
                    Certification::Unknown => self.survivors.push(i),
                }
            }
            if !self.buffer.is_empty() {
                return true;
            }
        }
    }
}

impl Iterator for Dovetail {
    type Item = HaltEvent;

    fn next(&mut self) -> Option<HaltEvent> {
        if self.buffer.is_empty() && !self.fill() {
            return None;
        }
        self.buffer.pop_front()
    }
}

/// Dovetailed halt events for `evaluator` over the window.
pub fn dovetail_events(evaluator: Arc<dyn Evaluator>, max_len: usize, schedule: Schedule) -> Dovetail {
    Dovetail::new(evaluator, max_len, schedule)
}
