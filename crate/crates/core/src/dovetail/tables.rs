use std::collections::BTreeMap;

use serde::Serialize;

use super::GroundTruth;
use crate::codec::string_to_index;
use crate::machine::BinStr;
use crate::optimalkit::HaltEvent;
use crate::rational::{pow2, Fraction};

/// One CSV row: counts at length `n` after budget `t`.
///
/// `rho = H_n / 2^(n+1)` and `tau = h_n / 2^n`, unreduced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HaltingRow {
    pub n: usize,
    pub t: u64,
    pub h_n: u64,
    #[serde(rename = "H_n")]
    pub cum_n: u64,
    pub rho_num: u64,
    pub rho_den: u64,
    pub tau_num: u64,
    pub tau_den: u64,
}

impl HaltingRow {
    pub fn rho(&self) -> Fraction {
        Fraction::new(self.rho_num, self.rho_den)
    }

    pub fn tau(&self) -> Fraction {
        Fraction::new(self.tau_num, self.tau_den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaltingTable {
    pub max_len: usize,
    pub checkpoints: Vec<u64>,
    /// `exact[ti][n]` = programs of length exactly `n` halted within
    /// `checkpoints[ti]` steps.
    exact: Vec<Vec<u64>>,
}

impl HaltingTable {
    pub fn h(&self, n: usize, checkpoint: usize) -> u64 {
        self.exact[checkpoint][n]
    }

    pub fn cumulative(&self, n: usize, checkpoint: usize) -> u64 {
        self.exact[checkpoint][..=n].iter().sum()
    }

    /// `H_n` at the last checkpoint.
    pub fn terminal_cumulative(&self, n: usize) -> u64 {
        self.cumulative(n, self.checkpoints.len() - 1)
    }

    pub fn rho(&self, n: usize, checkpoint: usize) -> Fraction {
        Fraction::new(self.cumulative(n, checkpoint), pow2(n + 1))
    }

    pub fn tau(&self, n: usize, checkpoint: usize) -> Fraction {
        Fraction::new(self.h(n, checkpoint), pow2(n))
    }

    /// Rows ordered by `n`, then `t`.
    pub fn rows(&self) -> Vec<HaltingRow> {
        let mut rows = Vec::new();
        for n in 0..=self.max_len {
            for (ti, &t) in self.checkpoints.iter().enumerate() {
                let h_n = self.h(n, ti);
                let cum_n = self.cumulative(n, ti);
                rows.push(HaltingRow {
                    n,
                    t,
                    h_n,
                    cum_n,
                    rho_num: cum_n,
                    rho_den: pow2(n + 1),
                    tau_num: h_n,
                    tau_den: pow2(n),
                });
            }
        }
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in self.rows() {
            w.serialize(row).expect("row serializes");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// Exact per-length halting counts at each checkpoint. Events with
/// programs longer than `max_len` are ignored.
pub fn halting_table<'a>(
    events: impl IntoIterator<Item = &'a HaltEvent>,
    max_len: usize,
    checkpoints: &[u64],
) -> HaltingTable {
    assert!(!checkpoints.is_empty(), "need at least one checkpoint");
    assert!(
        checkpoints.windows(2).all(|w| w[0] < w[1]),
        "checkpoints must be strictly increasing"
    );
    let mut exact = vec![vec![0u64; max_len + 1]; checkpoints.len()];
    for e in events {
        let n = e.program.len();
        if n > max_len {
            continue;
        }
        let first = checkpoints.partition_point(|&t| t < e.steps);
        for row in exact.iter_mut().skip(first) {
            row[n] += 1;
        }
    }
    HaltingTable {
        max_len,
        checkpoints: checkpoints.to_vec(),
        exact,
    }
}

/// `BB(n)`: the longest halting run among programs of length at most `n`
/// (0 when none halts).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BBTable {
    pub max_len: usize,
    pub bb: Vec<u64>,
}

pub fn bb_table(truth: &GroundTruth) -> BBTable {
    bb_from_events(truth.halt_events().iter(), truth.max_len())
}

pub fn bb_from_events<'a>(events: impl IntoIterator<Item = &'a HaltEvent>, max_len: usize) -> BBTable {
    let mut exact = vec![0u64; max_len + 1];
    for e in events {
        if e.program.len() <= max_len {
            let slot = &mut exact[e.program.len()];
            *slot = (*slot).max(e.steps);
        }
    }
    let bb = exact
        .into_iter()
        .scan(0u64, |acc, v| {
            *acc = (*acc).max(v);
            Some(*acc)
        })
        .collect();
    BBTable { max_len, bb }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityEntry {
    pub k: usize,
    /// Length-lex least shortest program.
    pub program: BinStr,
}

/// Window complexity `K(y) = min{|p| <= N : M(p) = y}` and `B(m)`, the
/// largest output (as a length-lex index) of complexity at most `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityTable {
    pub max_len: usize,
    pub entries: BTreeMap<BinStr, ComplexityEntry>,
}

impl ComplexityTable {
    /// `None` means `> N`: no program in the window produces `y`.
    pub fn k(&self, y: &BinStr) -> Option<usize> {
        self.entries.get(y).map(|e| e.k)
    }

    /// Largest output with complexity at most `m`.
    pub fn b_string(&self, m: usize) -> Option<&BinStr> {
        self.entries
            .iter()
            .filter(|(_, e)| e.k <= m)
            .map(|(y, _)| y)
            .max()
    }

    /// `B(m)` as an integer; 0 when nothing has complexity at most `m`.
    pub fn b(&self, m: usize) -> u64 {
        self.b_string(m)
            .map(|y| string_to_index(y).expect("output index fits u64"))
            .unwrap_or(0)
    }

    pub fn b_column(&self) -> Vec<u64> {
        (0..=self.max_len).map(|m| self.b(m)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let k: BTreeMap<String, usize> = self
            .entries
            .iter()
            .map(|(y, e)| (y.to_string(), e.k))
            .collect();
        serde_json::json!({
            "max_len": self.max_len,
            "K": k,
            "B": self.b_column(),
        })
    }
}

pub fn complexity_table<'a>(
    events: impl IntoIterator<Item = &'a HaltEvent>,
    max_len: usize,
) -> ComplexityTable {
    let mut entries: BTreeMap<BinStr, ComplexityEntry> = BTreeMap::new();
    for e in events {
        if e.program.len() > max_len {
            continue;
        }
        let better = match entries.get(&e.output) {
            None => true,
            Some(cur) => e.program < cur.program,
        };
        if better {
            entries.insert(
                e.output.clone(),
                ComplexityEntry {
                    k: e.program.len(),
                    program: e.program.clone(),
                },
            );
        }
    }
    ComplexityTable { max_len, entries }
}

impl ComplexityTable {
    pub fn from_truth(truth: &GroundTruth) -> ComplexityTable {
        complexity_table(truth.halt_events().iter(), truth.max_len())
    }
}

/// Least `c <= max_c` with `B(n-c) <= BB(n) <= B(n+c)` for every `n` of
/// the window where the shifted argument also lies in the window.
pub fn sandwich_constant(bb: &BBTable, k: &ComplexityTable, max_c: usize) -> Option<usize> {
    let n_max = bb.max_len.min(k.max_len);
    let b = k.b_column();
    (0..=max_c).find(|&c| {
        (0..=n_max).all(|n| {
            let lower = n < c || b[n - c] <= bb.bb[n];
            let upper = n + c > n_max || bb.bb[n] <= b[n + c];
            lower && upper
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurvivorPoint {
    pub t: u64,
    pub survivors: u64,
}

/// Terminating computations of length at most `n` still running after `t`
/// steps, and the waiting time `t*` for all but `r = H_n mod 2^(n+1-k)` of
/// them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurvivorStats {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "H_n")]
    pub total: u64,
    pub r: u64,
    pub t_star: u64,
    pub curve: Vec<SurvivorPoint>,
}

impl SurvivorStats {
    /// `2^(n+1-k)`.
    pub fn threshold(&self) -> u64 {
        pow2(self.n + 1 - self.k)
    }

    /// Every checkpoint at or past `t*` has fewer than `2^(n+1-k)`
    /// survivors.
    pub fn bound_holds(&self) -> bool {
        self.curve
            .iter()
            .filter(|p| p.t >= self.t_star)
            .all(|p| p.survivors < self.threshold())
    }
}

/// Survivor curve and `t*(n, k)`. `events` must list the halting programs
/// (any order); `truth` supplies `H_n`.
pub fn survivor_stats<'a>(
    truth: &GroundTruth,
    events: impl IntoIterator<Item = &'a HaltEvent>,
    n: usize,
    k: usize,
    checkpoints: &[u64],
) -> SurvivorStats {
    assert!(k <= n && n <= truth.max_len(), "need 0 <= k <= n <= N");
    let total = truth.cumulative_halting()[n];
    let mut steps: Vec<u64> = events
        .into_iter()
        .filter(|e| e.program.len() <= n)
        .map(|e| e.steps)
        .collect();
    assert_eq!(steps.len() as u64, total, "events disagree with truth on H_n");
    steps.sort_unstable();

    let r = total % pow2(n + 1 - k);
    let need = (total - r) as usize;
    let t_star = if need == 0 { 0 } else { steps[need - 1] };
    let curve = checkpoints
        .iter()
        .map(|&t| SurvivorPoint {
            t,
            survivors: total - steps.partition_point(|&s| s <= t) as u64,
        })
        .collect();
    let stats = SurvivorStats {
        n,
        k,
        total,
        r,
        t_star,
        curve,
    };
    assert!(stats.bound_holds(), "survivor bound violated at n={n}, k={k}");
    stats
}
