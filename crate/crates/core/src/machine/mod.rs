//! The base machine: budgeted and certified execution of DeskVM programs.

mod binstr;
mod certify;
pub mod vm;

use serde::{Deserialize, Serialize};

pub use binstr::{bs, BinStr, ParseBinStrError};
pub use certify::{certify, Certificate, Certification};
pub use vm::{assemble, Config, Op, Program};

use vm::StepResult;

/// Result of a budgeted run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunOutcome {
    Halted { output: BinStr, steps: u64 },
    BudgetExhausted { budget: u64 },
    CertifiedDivergent { certificate: Certificate },
}

impl RunOutcome {
    pub fn halted(&self) -> Option<(&BinStr, u64)> {
        match self {
            RunOutcome::Halted { output, steps } => Some((output, *steps)),
            _ => None,
        }
    }

    /// Flat JSON record `{status, output, steps, budget}`.
    pub fn to_record(&self) -> serde_json::Value {
        match self {
            RunOutcome::Halted { output, steps } => serde_json::json!({
                "status": "halted",
                "output": output.to_string(),
                "steps": steps,
                "budget": serde_json::Value::Null,
            }),
            RunOutcome::BudgetExhausted { budget } => serde_json::json!({
                "status": "budget_exhausted",
                "output": serde_json::Value::Null,
                "steps": budget,
                "budget": budget,
            }),
            RunOutcome::CertifiedDivergent { certificate } => serde_json::json!({
                "status": "certified_divergent",
                "output": serde_json::Value::Null,
                "steps": serde_json::Value::Null,
                "budget": serde_json::Value::Null,
                "certificate": certificate,
            }),
        }
    }
}

/// Run `program` on `input` for at most `budget` steps.
///
/// Never returns `CertifiedDivergent`; use [`certify`] for proofs of
/// non-termination.
pub fn run(program: &BinStr, input: &BinStr, budget: u64) -> RunOutcome {
    assert!(budget >= 1, "budget must be at least 1");
    run_compiled(&Program::decode(program), input, budget)
}

pub fn run_compiled(program: &Program, input: &BinStr, budget: u64) -> RunOutcome {
    let mut cfg = Config::default();
    while cfg.steps < budget {
        match vm::step(program, input, &mut cfg) {
            StepResult::Continue => {}
            StepResult::Halted => {
                return RunOutcome::Halted {
                    output: cfg.output,
                    steps: cfg.steps,
                }
            }
            StepResult::OffEnd => break,
        }
    }
    RunOutcome::BudgetExhausted { budget }
}

/// Minimal immediately-halting program (a single HALT).
pub fn halt_program() -> BinStr {
    assemble(&[Op::Halt])
}

/// Minimal self-loop: set the cell, then `[` `]` spins forever.
pub fn loop_program() -> BinStr {
    assemble(&[Op::Flip, Op::Open, Op::Close])
}

/// Program copying its input to the output: flag cell at 0, data cell at 1.
pub fn echo_program() -> BinStr {
    assemble(&[
        Op::Flip,
        Op::Open,
        Op::Right,
        Op::Read,
        Op::Out,
        Op::Left,
        Op::Close,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halt_program_halts_in_one_step() {
        assert_eq!(
            run(&halt_program(), &BinStr::empty(), 10),
            RunOutcome::Halted {
                output: BinStr::empty(),
                steps: 1
            }
        );
        // the padded single bit "0" is the same program
        assert_eq!(run(&bs("0"), &BinStr::empty(), 10).halted().unwrap().1, 1);
    }

    #[test]
    fn loop_program_exhausts_budget() {
        assert_eq!(
            run(&loop_program(), &BinStr::empty(), 100),
            RunOutcome::BudgetExhausted { budget: 100 }
        );
    }

    #[test]
    fn empty_program_never_halts() {
        assert_eq!(
            run(&BinStr::empty(), &BinStr::empty(), 5),
            RunOutcome::BudgetExhausted { budget: 5 }
        );
    }

    #[test]
    fn echo_copies_input() {
        for x in ["", "0", "1", "101", "0011010"] {
            let out = run(&echo_program(), &bs(x), 1000);
            assert_eq!(out.halted().unwrap().0, &bs(x), "input {x}");
        }
    }

    #[test]
    fn out_emits_cells() {
        let p = assemble(&[Op::Out, Op::Flip, Op::Out, Op::Halt]);
        assert_eq!(
            run(&p, &BinStr::empty(), 10),
            RunOutcome::Halted {
                output: bs("01"),
                steps: 4
            }
        );
    }

    #[test]
    fn halted_is_budget_independent() {
        let p = assemble(&[Op::Flip, Op::Right, Op::Flip, Op::Halt]);
        assert_eq!(run(&p, &BinStr::empty(), 3), RunOutcome::BudgetExhausted { budget: 3 });
        for t in 4..20 {
            assert_eq!(run(&p, &BinStr::empty(), t).halted().unwrap().1, 4);
        }
    }

    #[test]
    fn unmatched_brackets_are_noops() {
        let p = assemble(&[Op::Close, Op::Open, Op::Halt]);
        assert_eq!(run(&p, &BinStr::empty(), 10).halted().unwrap().1, 3);
    }

    #[test]
    fn record_shape() {
        let r = run(&halt_program(), &BinStr::empty(), 10).to_record();
        assert_eq!(r["status"], "halted");
        assert_eq!(r["output"], "");
        assert_eq!(r["steps"], 1);
    }
}
