use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{DeskVm, Evaluator};
use crate::codec::{index_to_string, string_to_index};
use crate::machine::{BinStr, Certificate, Certification};
use crate::optimalkit::HaltEvent;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TruthError {
    #[error("{} program(s) left unresolved, first: {:?}", .0.len(), .0.first())]
    NonzeroUnknown(Vec<BinStr>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TruthCounts {
    pub halts: u64,
    pub diverges: u64,
    pub unknown: u64,
}

/// Certified status of every program of length at most `max_len`, indexed
/// in length-lex order.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    max_len: usize,
    statuses: Vec<Certification>,
}

impl GroundTruth {
    pub fn compute(evaluator: &dyn Evaluator, max_len: usize, budget: u64) -> GroundTruth {
        assert!(max_len < 40, "window too large for exhaustive truth");
        let count = (1u64 << (max_len + 1)) - 1;
        let statuses = (0..count)
            .into_par_iter()
            .map(|i| evaluator.certify(&index_to_string(i), budget))
            .collect();
        GroundTruth { max_len, statuses }
    }

    /// DeskVM on empty input.
    pub fn desk(max_len: usize, budget: u64, space_bound: usize) -> GroundTruth {
        GroundTruth::compute(&DeskVm { space_bound }, max_len, budget)
    }

    /// Truth for a machine whose window has been fully enumerated: listed
    /// programs halt, every other program of the window is outside the
    /// domain.
    pub fn from_events<'a>(max_len: usize, events: impl IntoIterator<Item = &'a HaltEvent>) -> GroundTruth {
        let count = (1u64 << (max_len + 1)) - 1;
        let mut statuses = vec![
            Certification::Diverges {
                certificate: Certificate::Closure
            };
            count as usize
        ];
        for e in events {
            if e.program.len() <= max_len {
                let i = string_to_index(&e.program).expect("window index") as usize;
                statuses[i] = Certification::Halts {
                    steps: e.steps,
                    output: e.output.clone(),
                };
            }
        }
        GroundTruth { max_len, statuses }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn status(&self, program: &BinStr) -> Option<&Certification> {
        if program.len() > self.max_len {
            return None;
        }
        self.statuses.get(string_to_index(program)? as usize)
    }

    pub fn halts(&self, program: &BinStr) -> bool {
        matches!(self.status(program), Some(Certification::Halts { .. }))
    }

    /// `(program, status)` in length-lex order.
    pub fn iter(&self) -> impl Iterator<Item = (BinStr, &Certification)> + '_ {
        self.statuses
            .iter()
            .enumerate()
            .map(|(i, s)| (index_to_string(i as u64), s))
    }

    pub fn counts(&self) -> TruthCounts {
        let mut c = TruthCounts::default();
        for s in &self.statuses {
            match s {
                Certification::Halts { .. } => c.halts += 1,
                Certification::Diverges { .. } => c.diverges += 1,
                Certification::Unknown => c.unknown += 1,
            }
        }
        c
    }

    pub fn unknown(&self) -> Vec<BinStr> {
        self.iter()
            .filter(|(_, s)| s.is_unknown())
            .map(|(p, _)| p)
            .collect()
    }

    pub fn require_certified(&self) -> Result<&Self, TruthError> {
        let unknown = self.unknown();
        if unknown.is_empty() {
            Ok(self)
        } else {
            Err(TruthError::NonzeroUnknown(unknown))
        }
    }

    /// `h_n`: halting programs of length exactly `n`, for `n = 0..=max_len`.
    pub fn halting_by_length(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.max_len + 1];
        for (p, s) in self.iter() {
            if matches!(s, Certification::Halts { .. }) {
                h[p.len()] += 1;
            }
        }
        h
    }

    /// `H_n`: halting programs of length at most `n`.
    pub fn cumulative_halting(&self) -> Vec<u64> {
        self.halting_by_length()
            .into_iter()
            .scan(0u64, |acc, h| {
                *acc += h;
                Some(*acc)
            })
            .collect()
    }

    /// Halting programs as events in length-lex order.
    pub fn halt_events(&self) -> Vec<HaltEvent> {
        self.iter()
            .filter_map(|(program, s)| match s {
                Certification::Halts { steps, output } => Some((program, output.clone(), *steps)),
                _ => None,
            })
            .enumerate()
            .map(|(seq, (program, output, steps))| HaltEvent {
                seq: seq as u64,
                program,
                output,
                steps,
            })
            .collect()
    }
}

/// Certified DeskVM truth; fails when any program stays unresolved.
pub fn ground_truth(max_len: usize, budget: u64, space_bound: usize) -> Result<GroundTruth, TruthError> {
    let truth = GroundTruth::desk(max_len, budget, space_bound);
    truth.require_certified()?;
    Ok(truth)
}
