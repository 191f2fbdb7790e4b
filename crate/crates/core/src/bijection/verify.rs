use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::builder::{BuildError, BuilderState, TranscriptEntry};
use super::{Injection, Side};

/// Union-find over the vertices of both sides; left `i` is `2i`, right
/// `j` is `2j + 1`.
#[derive(Clone, Debug, Default)]
pub struct ComponentIndex {
    parent: HashMap<u64, u64>,
}

fn key(side: Side, x: u64) -> u64 {
    2 * x + side.index() as u64
}

impl ComponentIndex {
    pub fn new() -> ComponentIndex {
        ComponentIndex::default()
    }

    fn root(&mut self, k: u64) -> u64 {
        let mut r = k;
        while let Some(&p) = self.parent.get(&r) {
            if p == r {
                break;
            }
            r = p;
        }
        // path compression
        let mut c = k;
        while c != r {
            let next = self.parent.get(&c).copied().unwrap_or(c);
            self.parent.insert(c, r);
            c = next;
        }
        r
    }

    pub fn find(&mut self, side: Side, x: u64) -> u64 {
        self.root(key(side, x))
    }

    /// Merge the classes of left `l` and right `r`.
    pub fn union_edge(&mut self, l: u64, r: u64) {
        let a = self.root(key(Side::L, l));
        let b = self.root(key(Side::R, r));
        if a != b {
            self.parent.insert(a.max(b), a.min(b));
        }
    }

    pub fn same(&mut self, l: u64, r: u64) -> bool {
        self.find(Side::L, l) == self.find(Side::R, r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerifyFailure {
    Uncovered { side: Side, value: u64 },
    NotInjective { side: Side, value: u64, first: u64, second: u64 },
    BoundExceeded { side: Side, arg: u64, value: u64, bound: u64 },
    ComponentSplit { left: u64, right: u64 },
    MembershipViolated { left: u64, right: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub window: u64,
    pub pairs: usize,
    /// Largest vertex whose base edges were loaded into the component index.
    pub max_vertex: u64,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check a transcript of pairs on the window `[0, m)`: bijectivity, the
/// two prefix-max bounds and that every pair lies in one component of the
/// graph with edges `(i, f(i))` and `(g(j), j)`.
pub fn verify_window(f: &dyn Injection, g: &dyn Injection, transcript: &[TranscriptEntry], m: u64) -> VerifyReport {
    let mut failures = Vec::new();
    let mut h: HashMap<u64, u64> = HashMap::new();
    let mut h_inv: HashMap<u64, u64> = HashMap::new();
    for e in transcript {
        let (l, r) = e.pair;
        if let Some(&prev) = h.get(&l) {
            failures.push(VerifyFailure::NotInjective {
                side: Side::R,
                value: l,
                first: prev,
                second: r,
            });
        }
        if let Some(&prev) = h_inv.get(&r) {
            failures.push(VerifyFailure::NotInjective {
                side: Side::L,
                value: r,
                first: prev,
                second: l,
            });
        }
        h.insert(l, r);
        h_inv.insert(r, l);
    }
    for x in 0..m {
        if !h.contains_key(&x) {
            failures.push(VerifyFailure::Uncovered { side: Side::L, value: x });
        }
        if !h_inv.contains_key(&x) {
            failures.push(VerifyFailure::Uncovered { side: Side::R, value: x });
        }
    }

    let max_vertex = transcript
        .iter()
        .flat_map(|e| {
            let touched = e.overrides.iter().flat_map(|o| [o.arg, o.old, o.new]);
            [e.pair.0, e.pair.1].into_iter().chain(touched)
        })
        .chain(std::iter::once(m))
        .max()
        .unwrap_or(0);
    let mut prefix = [0u64; 2];
    let mut bounds: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
    for x in 0..=max_vertex {
        for (i, map) in [f, g].into_iter().enumerate() {
            let v = map.apply(x);
            prefix[i] = if x == 0 { v } else { prefix[i].max(v) };
            bounds[i].push(prefix[i]);
        }
    }
    let mut ordered: Vec<(u64, u64)> = h.iter().map(|(&l, &r)| (l, r)).collect();
    ordered.sort_unstable();
    for &(l, r) in &ordered {
        if l <= max_vertex && r > bounds[0][l as usize] {
            failures.push(VerifyFailure::BoundExceeded {
                side: Side::L,
                arg: l,
                value: r,
                bound: bounds[0][l as usize],
            });
        }
        if r <= max_vertex && l > bounds[1][r as usize] {
            failures.push(VerifyFailure::BoundExceeded {
                side: Side::R,
                arg: r,
                value: l,
                bound: bounds[1][r as usize],
            });
        }
    }

    let mut index = ComponentIndex::new();
    for x in 0..=max_vertex {
        let fx = f.apply(x);
        if fx <= max_vertex {
            index.union_edge(x, fx);
        }
        let gx = g.apply(x);
        if gx <= max_vertex {
            index.union_edge(gx, x);
        }
    }
    for &(l, r) in &ordered {
        if !index.same(l, r) {
            failures.push(VerifyFailure::ComponentSplit { left: l, right: r });
        }
    }
    VerifyReport {
        window: m,
        pairs: ordered.len(),
        max_vertex,
        failures,
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum IsoError {
    #[error("reduction invalid on {side:?} {witness}")]
    ReductionInvalid { side: Side, witness: u64 },
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Build `h` on `[0, m)` from reductions `f: S_left -> S_right` and
/// `g: S_right -> S_left` (checked on the window first), verify it and
/// check that it maps `S_left` onto `S_right` there.
pub fn isomorphism_from_reductions(
    f: Arc<dyn Injection>,
    g: Arc<dyn Injection>,
    s_left: &dyn Fn(u64) -> bool,
    s_right: &dyn Fn(u64) -> bool,
    m: u64,
) -> Result<(Vec<TranscriptEntry>, VerifyReport), IsoError> {
    for i in 0..m {
        if s_left(i) != s_right(f.apply(i)) {
            return Err(IsoError::ReductionInvalid {
                side: Side::L,
                witness: i,
            });
        }
        if s_right(i) != s_left(g.apply(i)) {
            return Err(IsoError::ReductionInvalid {
                side: Side::R,
                witness: i,
            });
        }
    }
    let mut state = BuilderState::new(Arc::clone(&f), Arc::clone(&g));
    for v in 0..m {
        state.resolve(Side::L, v)?;
        state.resolve(Side::R, v)?;
    }
    let transcript = state.into_transcript();
    let mut report = verify_window(f.as_ref(), g.as_ref(), &transcript, m);
    for e in &transcript {
        let (l, r) = e.pair;
        if s_left(l) != s_right(r) {
            report.failures.push(VerifyFailure::MembershipViolated { left: l, right: r });
        }
    }
    Ok((transcript, report))
}

/// JSON lines `{step, side, case_label, pair, overrides}`.
pub fn transcript_to_jsonl(transcript: &[TranscriptEntry]) -> String {
    let mut out = String::new();
    for e in transcript {
        out.push_str(&serde_json::to_string(e).expect("entry serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::FnInjection;
    use super::*;

    fn build(f: Arc<dyn Injection>, g: Arc<dyn Injection>, m: u64) -> Vec<TranscriptEntry> {
        let mut s = BuilderState::new(f, g);
        for v in 0..m {
            s.resolve(Side::L, v).unwrap();
            s.resolve(Side::R, v).unwrap();
        }
        s.into_transcript()
    }

    #[test]
    fn union_find_basics() {
        let mut c = ComponentIndex::new();
        assert!(!c.same(1, 1));
        c.union_edge(1, 2);
        c.union_edge(3, 2);
        assert!(c.same(3, 2) && c.same(1, 2));
        let a = c.find(Side::L, 1);
        assert_eq!(c.find(Side::L, 1), a);
        assert_eq!(c.find(Side::L, 3), a);
    }

    #[test]
    fn identity_passes_and_swap_fails() {
        let id: Arc<dyn Injection> = Arc::new(FnInjection::identity());
        let t = build(Arc::clone(&id), Arc::clone(&id), 16);
        let rep = verify_window(id.as_ref(), id.as_ref(), &t, 16);
        assert!(rep.passed(), "{:?}", rep.failures);

        let mut bad = t.clone();
        let (i, j) = (
            bad.iter().position(|e| e.pair.0 == 2).unwrap(),
            bad.iter().position(|e| e.pair.0 == 5).unwrap(),
        );
        let (a, b) = (bad[i].pair.1, bad[j].pair.1);
        bad[i].pair.1 = b;
        bad[j].pair.1 = a;
        let rep = verify_window(id.as_ref(), id.as_ref(), &bad, 16);
        assert!(rep.failures.contains(&VerifyFailure::ComponentSplit { left: 2, right: 5 }));
        assert!(rep.failures.iter().any(|f| matches!(f, VerifyFailure::BoundExceeded { arg: 2, .. })));

        let mut dup = t;
        let k = dup.iter().position(|e| e.pair.0 == 3).unwrap();
        dup[k].pair.1 = 4;
        let rep = verify_window(id.as_ref(), id.as_ref(), &dup, 16);
        assert!(rep.failures.iter().any(|f| matches!(f, VerifyFailure::NotInjective { value: 4, .. })));
    }

    #[test]
    fn even_sets_identity() {
        let id: Arc<dyn Injection> = Arc::new(FnInjection::identity());
        let even = |n: u64| n % 2 == 0;
        let (t, rep) = isomorphism_from_reductions(Arc::clone(&id), Arc::clone(&id), &even, &even, 32).unwrap();
        assert!(rep.passed());
        assert!(t.iter().all(|e| e.pair.0 == e.pair.1));
    }

    #[test]
    fn broken_reduction_witness() {
        let f: Arc<dyn Injection> = Arc::new(FnInjection::new(|n| if n == 6 { 7 } else if n == 7 { 6 } else { n }, 1));
        let id: Arc<dyn Injection> = Arc::new(FnInjection::identity());
        let even = |n: u64| n % 2 == 0;
        let err = isomorphism_from_reductions(f, id, &even, &even, 32).unwrap_err();
        assert_eq!(
            err,
            IsoError::ReductionInvalid {
                side: Side::L,
                witness: 6
            }
        );
    }
}
