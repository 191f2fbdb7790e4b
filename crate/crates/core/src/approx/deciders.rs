use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use super::{error_report, Decider, Verdict};
use crate::dovetail::GroundTruth;
use crate::machine::{self, BinStr};
use crate::optimalkit::Machine;
use crate::rational::{ceil_mul, Fraction, Rational};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParameterError {
    #[error("length sequence must satisfy n_(i+1) >= n_i + i; fails at position {index}")]
    LengthsTooSlow { index: usize },
    #[error("stage thresholds must satisfy n_i > n_(i-1) + i; fails at stage {index}")]
    StagesTooSlow { index: usize },
    #[error("rational {0} outside the allowed range")]
    OutOfRange(String),
    #[error("empty parameter list")]
    Empty,
}

/// Yes iff DeskVM halts on empty input within `t` steps.
#[derive(Clone, Copy, Debug)]
pub struct BudgetDecider {
    t: u64,
}

impl BudgetDecider {
    pub fn new(t: u64) -> BudgetDecider {
        assert!(t >= 1, "budget decider needs t >= 1");
        BudgetDecider { t }
    }
}

impl Decider for BudgetDecider {
    fn decide(&self, program: &BinStr) -> Verdict {
        match machine::run(program, &BinStr::empty(), self.t) {
            machine::RunOutcome::Halted { .. } => Verdict::Yes,
            _ => Verdict::No,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("fraction not reached for length {n} ({found} of {needed} halts within cap)")]
pub struct FractionNotReached {
    pub n: usize,
    pub found: u64,
    pub needed: u64,
}

/// For each length `n_i` of the sequence, the first `ceil(r·2^(n_i+1))`
/// programs of length at most `n_i` in the machine's stream (with at most
/// `cap` steps) answer Yes. An input of length `l` is judged by the block
/// of the least `n_i >= l`; a block whose quota is never met answers
/// Undefined throughout.
#[derive(Clone, Debug)]
pub struct FractionDecider {
    lengths: Vec<usize>,
    yes: Vec<HashSet<BinStr>>,
    not_reached: Vec<FractionNotReached>,
}

impl FractionDecider {
    pub fn new(u: &Machine, r: Rational, lengths: &[usize], cap: u64) -> Result<FractionDecider, ParameterError> {
        if lengths.is_empty() {
            return Err(ParameterError::Empty);
        }
        for (i, w) in lengths.windows(2).enumerate() {
            if w[1] < w[0] + i + 1 {
                return Err(ParameterError::LengthsTooSlow { index: i + 1 });
            }
        }
        if r <= Rational::from_integer(0) || r >= Rational::from_integer(1) {
            return Err(ParameterError::OutOfRange(crate::rational::format_rational(&r)));
        }
        let needed: Vec<u64> = lengths.iter().map(|&n| ceil_mul(&r, 1u64 << (n + 1))).collect();
        let mut yes: Vec<HashSet<BinStr>> = vec![HashSet::new(); lengths.len()];
        for e in u.events() {
            if e.steps > cap {
                continue;
            }
            for (i, &n) in lengths.iter().enumerate() {
                if e.program.len() <= n && (yes[i].len() as u64) < needed[i] {
                    yes[i].insert(e.program.clone());
                }
            }
            if yes.iter().zip(&needed).all(|(s, &k)| s.len() as u64 >= k) {
                break;
            }
        }
        let not_reached = lengths
            .iter()
            .zip(&yes)
            .zip(&needed)
            .filter(|((_, s), &k)| (s.len() as u64) < k)
            .map(|((&n, s), &k)| FractionNotReached {
                n,
                found: s.len() as u64,
                needed: k,
            })
            .collect();
        Ok(FractionDecider {
            lengths: lengths.to_vec(),
            yes,
            not_reached,
        })
    }

    pub fn not_reached(&self) -> &[FractionNotReached] {
        &self.not_reached
    }

    pub fn require_reached(&self) -> Result<(), FractionNotReached> {
        match self.not_reached.first() {
            Some(e) => Err(e.clone()),
            None => Ok(()),
        }
    }

    /// Size of the Yes-set of each block.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.yes.iter().map(HashSet::len).collect()
    }
}

impl Decider for FractionDecider {
    fn decide(&self, program: &BinStr) -> Verdict {
        let Some(i) = self.lengths.iter().position(|&n| n >= program.len()) else {
            return Verdict::Undefined;
        };
        if self.not_reached.iter().any(|e| e.n == self.lengths[i]) {
            Verdict::Undefined
        } else if self.yes[i].contains(program) {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

/// Advice bracket `[r, r']` for a set of exact lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdviceLevel {
    pub lengths: Vec<usize>,
    pub r: Rational,
    pub r_prime: Rational,
}

/// For a left-total machine: a string of handled length `m` with
/// lexicographic rank below `r·2^m` is Yes, rank at least `r'·2^m` is No,
/// anything between (or of unhandled length) is Undefined.
#[derive(Clone, Debug)]
pub struct AdviceDecider {
    levels: Vec<AdviceLevel>,
}

impl AdviceDecider {
    pub fn new(levels: Vec<AdviceLevel>) -> Result<AdviceDecider, ParameterError> {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        for l in &levels {
            if l.r < zero || l.r_prime > one || l.r > l.r_prime {
                return Err(ParameterError::OutOfRange(format!(
                    "[{}, {}]",
                    crate::rational::format_rational(&l.r),
                    crate::rational::format_rational(&l.r_prime)
                )));
            }
        }
        Ok(AdviceDecider { levels })
    }

    /// Level `j` handles lengths `n_i - j` for each `n_i` in `base`, with
    /// advice taken from `advice(j)`.
    pub fn shifted(
        base: &[usize],
        level_count: usize,
        advice: impl Fn(usize) -> (Rational, Rational),
    ) -> Result<AdviceDecider, ParameterError> {
        let levels = (0..level_count)
            .map(|j| {
                let (r, r_prime) = advice(j);
                AdviceLevel {
                    lengths: base.iter().filter(|&&n| n >= j).map(|&n| n - j).collect(),
                    r,
                    r_prime,
                }
            })
            .collect();
        AdviceDecider::new(levels)
    }
}

impl Decider for AdviceDecider {
    fn decide(&self, program: &BinStr) -> Verdict {
        let m = program.len();
        let Some(level) = self.levels.iter().find(|l| l.lengths.contains(&m)) else {
            return Verdict::Undefined;
        };
        let rank = Rational::from_integer(program.as_u64().expect("length below 64") as i128);
        let scale = Rational::from_integer(1i128 << m);
        if rank < level.r * scale {
            Verdict::Yes
        } else if rank >= level.r_prime * scale {
            Verdict::No
        } else {
            Verdict::Undefined
        }
    }
}

/// Lengths `[n_(i-1), n_i)` are answered Yes iff the string showed up in
/// the enumeration within `budget` steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub upto: usize,
    pub budget: u64,
}

#[derive(Clone, Debug)]
pub struct StagedDecider {
    start: usize,
    stages: Vec<Stage>,
    steps: HashMap<BinStr, u64>,
}

impl StagedDecider {
    /// `start` is `n_0`; stage `i` (1-based) covers `[n_(i-1), n_i)` and
    /// requires `n_i > n_(i-1) + i`.
    pub fn new(a: &Machine, start: usize, stages: Vec<Stage>) -> Result<StagedDecider, ParameterError> {
        if stages.is_empty() {
            return Err(ParameterError::Empty);
        }
        let mut prev = start;
        for (i, s) in stages.iter().enumerate() {
            if s.upto <= prev + i + 1 {
                return Err(ParameterError::StagesTooSlow { index: i + 1 });
            }
            prev = s.upto;
        }
        let end = prev;
        let steps = a
            .events()
            .filter(|e| e.program.len() < end)
            .map(|e| (e.program, e.steps))
            .collect();
        Ok(StagedDecider { start, stages, steps })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }
}

impl Decider for StagedDecider {
    fn decide(&self, program: &BinStr) -> Verdict {
        let len = program.len();
        if len < self.start {
            return Verdict::No;
        }
        let Some(stage) = self.stages.iter().find(|s| len < s.upto) else {
            return Verdict::No;
        };
        match self.steps.get(program) {
            Some(&s) if s <= stage.budget => Verdict::Yes,
            _ => Verdict::No,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StagedSearchHit {
    pub start: usize,
    pub stages: Vec<Stage>,
    pub n: usize,
    pub eps: Fraction,
}

/// Exhaustive search over a single-stage grid `start = 0`,
/// `upto ∈ uptos`, `budget ∈ budgets` (in that nesting order) for
/// parameters giving `eps_n <= target` at some `min_n <= n <= window`.
/// Returns the first hit.
pub fn staged_grid_search(
    a: &Machine,
    truth: &GroundTruth,
    window: usize,
    uptos: &[usize],
    budgets: &[u64],
    min_n: usize,
    target: Rational,
) -> Option<StagedSearchHit> {
    for &upto in uptos {
        for &budget in budgets {
            let stages = vec![Stage { upto, budget }];
            let Ok(d) = StagedDecider::new(a, 0, stages.clone()) else { continue };
            let report = error_report(&d, truth, window);
            let hit = report
                .rows
                .iter()
                .filter(|r| r.n >= min_n.max(1))
                .find(|r| r.eps().ratio() <= target);
            if let Some(r) = hit {
                return Some(StagedSearchHit {
                    start: 0,
                    stages,
                    n: r.n,
                    eps: r.eps(),
                });
            }
        }
    }
    None
}
