//! Length-bounded bijections from two total injections, built by the
//! alternating exchange procedure, plus window verification.

mod builder;
mod verify;

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builder::{BuildError, BuilderState, CaseLabel, Override, TranscriptEntry};
pub use verify::{
    isomorphism_from_reductions, transcript_to_jsonl, verify_window, ComponentIndex, IsoError, VerifyFailure,
    VerifyReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Side::L => 0,
            Side::R => 1,
        }
    }
}

/// A total injection `N -> N` that can also answer preimage queries.
pub trait Injection: Send + Sync {
    fn apply(&self, n: u64) -> u64;
    /// The unique `n` with `apply(n) = m`, if any.
    fn preimage(&self, m: u64) -> Option<u64>;
}

/// Injective table on `[0, W)` followed by the tail `n + shift`, with
/// `shift` larger than every table value.
#[derive(Clone, Debug)]
pub struct TableInjection {
    table: Vec<u64>,
    inverse: HashMap<u64, u64>,
    shift: u64,
}

impl TableInjection {
    /// Panics if the table repeats a value or the tail could collide with it.
    pub fn new(table: Vec<u64>, shift: u64) -> TableInjection {
        let inverse: HashMap<u64, u64> = table.iter().enumerate().map(|(i, &v)| (v, i as u64)).collect();
        assert_eq!(inverse.len(), table.len(), "table is not injective");
        assert!(table.iter().all(|&v| v < shift), "tail shift must exceed every table value");
        TableInjection { table, inverse, shift }
    }

    /// Random injective table on `[0, width)` with values below
    /// `2 * width`; the tail shift is one more than the largest value.
    pub fn random<R: Rng>(rng: &mut R, width: usize) -> TableInjection {
        let table: Vec<u64> = sample(rng, 2 * width, width).into_iter().map(|v| v as u64).collect();
        let shift = table.iter().max().map_or(0, |m| m + 1);
        TableInjection::new(table, shift)
    }

    pub fn width(&self) -> u64 {
        self.table.len() as u64
    }
}

impl Injection for TableInjection {
    fn apply(&self, n: u64) -> u64 {
        match self.table.get(n as usize) {
            Some(&v) => v,
            None => n + self.shift,
        }
    }

    fn preimage(&self, m: u64) -> Option<u64> {
        if let Some(&i) = self.inverse.get(&m) {
            return Some(i);
        }
        m.checked_sub(self.shift).filter(|&n| n >= self.width())
    }
}

type IntFn = dyn Fn(u64) -> u64 + Send + Sync;

/// An arbitrary function, trusted to be injective and to satisfy
/// `f(n) >= n - slack`, so preimages of `m` are searched in `0..=m+slack`.
/// Violations surface as [`BuildError::InjectivityViolation`] when the
/// builder queries a colliding pair.
#[derive(Clone)]
pub struct FnInjection {
    f: Arc<IntFn>,
    slack: u64,
}

impl FnInjection {
    pub fn new(f: impl Fn(u64) -> u64 + Send + Sync + 'static, slack: u64) -> FnInjection {
        FnInjection { f: Arc::new(f), slack }
    }

    pub fn identity() -> FnInjection {
        FnInjection::new(|n| n, 0)
    }
}

impl std::fmt::Debug for FnInjection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnInjection").field("slack", &self.slack).finish()
    }
}

impl Injection for FnInjection {
    fn apply(&self, n: u64) -> u64 {
        (self.f)(n)
    }

    fn preimage(&self, m: u64) -> Option<u64> {
        (0..=m.saturating_add(self.slack)).find(|&n| (self.f)(n) == m)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize)]
#[error("{map}({a}) = {map}({b}) = {value}")]
pub struct InjectivityViolation {
    pub map: char,
    pub a: u64,
    pub b: u64,
    pub value: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_preimage() {
        let t = TableInjection::new(vec![3, 0, 5], 6);
        assert_eq!(t.apply(1), 0);
        assert_eq!(t.apply(4), 10);
        assert_eq!(t.preimage(5), Some(2));
        assert_eq!(t.preimage(10), Some(4));
        assert_eq!(t.preimage(8), None); // 8 - 6 = 2 is inside the table
        assert_eq!(t.preimage(1), None);
    }

    #[test]
    fn random_tables_are_injective() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = TableInjection::random(&mut rng, 64);
        let mut seen = std::collections::HashSet::new();
        for n in 0..512 {
            let m = t.apply(n);
            assert!(seen.insert(m));
            assert_eq!(t.preimage(m), Some(n));
        }
    }

    #[test]
    #[should_panic(expected = "not injective")]
    fn duplicate_table_rejected() {
        TableInjection::new(vec![1, 1], 2);
    }
}
