//! Approximate halting deciders and exact error accounting.
//!
//! Error rates count every string of length at most `n`, so the
//! denominator is `2^(n+1) - 1`; an `Undefined` verdict is an error.

mod deciders;
mod spoiler;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dovetail::GroundTruth;
use crate::machine::BinStr;
use crate::rational::Fraction;

pub use deciders::{
    staged_grid_search, AdviceDecider, AdviceLevel, BudgetDecider, FractionDecider, FractionNotReached,
    ParameterError, Stage, StagedDecider, StagedSearchHit,
};
pub use spoiler::{random_dyadic_distribution, sparse_spoiler, Spoiler, SpoilerError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Undefined,
}

pub trait Decider: Sync {
    fn decide(&self, program: &BinStr) -> Verdict;
}

impl<F: Fn(&BinStr) -> Verdict + Sync> Decider for F {
    fn decide(&self, program: &BinStr) -> Verdict {
        self(program)
    }
}

/// Cumulative error counts over all strings of length at most `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorRow {
    pub n: usize,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub undef: u64,
    pub eps_num: u64,
    pub eps_den: u64,
}

impl ErrorRow {
    pub fn eps(&self) -> Fraction {
        Fraction::new(self.eps_num, self.eps_den)
    }

    pub fn wrong(&self) -> u64 {
        self.fp + self.fn_
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
    /// Max and min of `eps_n` over the tail half of the window; window
    /// estimates of the upper and lower limits, nothing more.
    pub window_max_tail: Fraction,
    pub window_min_tail: Fraction,
}

impl ErrorReport {
    pub fn row(&self, n: usize) -> &ErrorRow {
        &self.rows[n]
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).expect("row serializes");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows,
            "window_max_tail": self.window_max_tail,
            "window_min_tail": self.window_min_tail,
        })
    }
}

/// Exact error report of `decider` against `truth` for `n = 0..=window`.
pub fn error_report(decider: &dyn Decider, truth: &GroundTruth, window: usize) -> ErrorReport {
    assert!(window <= truth.max_len(), "window exceeds certified truth");
    assert!(truth.unknown().is_empty(), "truth has unresolved programs");
    // per exact length: (fp, fn, undef)
    let per_len = (0..=window)
        .into_par_iter()
        .map(|n| {
            let mut c = (0u64, 0u64, 0u64);
            for k in 0..(1u64 << n) {
                let p = BinStr::from_u64(k, n);
                let halts = truth.halts(&p);
                match decider.decide(&p) {
                    Verdict::Yes if !halts => c.0 += 1,
                    Verdict::No if halts => c.1 += 1,
                    Verdict::Undefined => c.2 += 1,
                    _ => {}
                }
            }
            c
        })
        .collect::<Vec<_>>();

    let mut rows = Vec::with_capacity(window + 1);
    let (mut fp, mut fn_, mut undef) = (0, 0, 0);
    for (n, (a, b, c)) in per_len.into_iter().enumerate() {
        fp += a;
        fn_ += b;
        undef += c;
        rows.push(ErrorRow {
            n,
            fp,
            fn_,
            undef,
            eps_num: fp + fn_ + undef,
            eps_den: (1u64 << (n + 1)) - 1,
        });
    }
    let tail = &rows[window / 2..];
    let by_value = |r: &&ErrorRow| r.eps().ratio();
    let window_max_tail = tail.iter().max_by_key(by_value).expect("nonempty").eps();
    let window_min_tail = tail.iter().min_by_key(by_value).expect("nonempty").eps();
    ErrorReport {
        rows,
        window_max_tail,
        window_min_tail,
    }
}

/// JSON lines `{program, verdict}`.
pub fn verdicts_to_jsonl<'a>(decider: &dyn Decider, programs: impl IntoIterator<Item = &'a BinStr>) -> String {
    let mut out = String::new();
    for p in programs {
        let line = serde_json::json!({ "program": p, "verdict": decider.decide(p) });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}
