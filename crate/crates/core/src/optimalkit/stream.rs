use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dovetail::{Dovetail, Evaluator, Schedule};
use crate::machine::{BinStr, RunOutcome};

/// One program entering the domain of a machine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaltEvent {
    pub seq: u64,
    pub program: BinStr,
    pub output: BinStr,
    pub steps: u64,
}

pub type EventStream = Box<dyn Iterator<Item = HaltEvent> + Send>;

type StreamSource = dyn Fn() -> EventStream + Send + Sync;

/// A machine presented as a deterministic halt-event stream, optionally
/// backed by a direct evaluator.
///
/// `max_len` is the window of the stream: every program of length at most
/// `max_len` in the machine's domain (as far as the underlying enumeration
/// resolves it) shows up in the stream.
#[derive(Clone)]
pub struct Machine {
    name: String,
    max_len: usize,
    source: Arc<StreamSource>,
    evaluator: Option<Arc<dyn Evaluator>>,
}

impl std::fmt::Debug for Machine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Machine")
            .field("name", &self.name)
            .field("max_len", &self.max_len)
            .finish()
    }
}

impl Machine {
    pub fn new<F>(name: impl Into<String>, max_len: usize, source: F) -> Machine
    where
        F: Fn() -> EventStream + Send + Sync + 'static,
    {
        Machine {
            name: name.into(),
            max_len,
            source: Arc::new(source),
            evaluator: None,
        }
    }

    /// A machine whose stream replays a fixed event list (renumbered).
    pub fn from_events(name: impl Into<String>, max_len: usize, events: Vec<HaltEvent>) -> Machine {
        let events: Arc<Vec<HaltEvent>> = Arc::new(renumber(events));
        Machine::new(name, max_len, move || {
            let events = Arc::clone(&events);
            Box::new((0..events.len()).map(move |i| events[i].clone()))
        })
    }

    /// A machine defined by `(program, output)` pairs in stream order; each
    /// event is stamped with one step.
    pub fn from_pairs(name: impl Into<String>, max_len: usize, pairs: Vec<(BinStr, BinStr)>) -> Machine {
        let events = pairs
            .into_iter()
            .map(|(program, output)| HaltEvent {
                seq: 0,
                program,
                output,
                steps: 1,
            })
            .collect();
        Machine::from_events(name, max_len, events)
    }

    /// Dovetailed enumeration of an evaluator's domain over all programs of
    /// length at most `max_len`.
    pub fn dovetailed(
        name: impl Into<String>,
        evaluator: Arc<dyn Evaluator>,
        max_len: usize,
        schedule: Schedule,
    ) -> Machine {
        let ev = Arc::clone(&evaluator);
        let mut m = Machine::new(name, max_len, move || {
            Box::new(Dovetail::new(Arc::clone(&ev), max_len, schedule.clone()))
        });
        m.evaluator = Some(evaluator);
        m
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Machine {
        self.name = name.into();
        self
    }

    /// A fresh copy of the event stream.
    pub fn events(&self) -> EventStream {
        (self.source)()
    }

    pub fn materialize(&self) -> Vec<HaltEvent> {
        self.events().collect()
    }

    /// Budgeted evaluation. With a direct evaluator this is that
    /// evaluator's run; otherwise the stream is replayed and a program not
    /// found (or found with more than `budget` steps) reports
    /// `BudgetExhausted`.
    pub fn eval(&self, program: &BinStr, budget: u64) -> RunOutcome {
        if let Some(ev) = &self.evaluator {
            return ev.eval(program, budget);
        }
        for e in self.events() {
            if &e.program == program {
                if e.steps <= budget {
                    return RunOutcome::Halted {
                        output: e.output,
                        steps: e.steps,
                    };
                }
                break;
            }
        }
        RunOutcome::BudgetExhausted { budget }
    }
}

pub(crate) fn renumber(mut events: Vec<HaltEvent>) -> Vec<HaltEvent> {
    for (i, e) in events.iter_mut().enumerate() {
        e.seq = i as u64;
    }
    events
}

/// Serialize events as JSON lines `{seq, program, output, steps}`.
pub fn events_to_jsonl<'a>(events: impl IntoIterator<Item = &'a HaltEvent>) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("event serializes"));
        out.push('\n');
    }
    out
}

pub fn events_from_jsonl(text: &str) -> Result<Vec<HaltEvent>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::bs;

    #[test]
    fn replay_eval() {
        let m = Machine::from_pairs("t", 2, vec![(bs("10"), bs("1")), (bs("01"), bs(""))]);
        assert_eq!(
            m.eval(&bs("01"), 5),
            RunOutcome::Halted {
                output: bs(""),
                steps: 1
            }
        );
        assert_eq!(m.eval(&bs("11"), 5), RunOutcome::BudgetExhausted { budget: 5 });
        let seqs: Vec<u64> = m.events().map(|e| e.seq).collect();
        assert_eq!(seqs, vec![0, 1]);
    }

    #[test]
    fn jsonl_round_trip() {
        let m = Machine::from_pairs("t", 2, vec![(bs("10"), bs("1")), (bs(""), bs("0"))]);
        let ev = m.materialize();
        let text = events_to_jsonl(&ev);
        assert!(text.starts_with(r#"{"seq":0,"program":"10","output":"1","steps":1}"#));
        assert_eq!(events_from_jsonl(&text).unwrap(), ev);
    }
}
