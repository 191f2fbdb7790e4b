use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use super::{Injection, InjectivityViolation, Side};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("injectivity violation: {0}")]
    InjectivityViolation(InjectivityViolation),
    #[error("{side:?} {value} not covered within {steps} steps")]
    CoverageBound { side: Side, value: u64, steps: u64 },
    #[error("invariant broken after step {step}: {detail}")]
    Invariant { step: u64, detail: String },
}

impl From<InjectivityViolation> for BuildError {
    fn from(v: InjectivityViolation) -> Self {
        BuildError::InjectivityViolation(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    One,
    TwoOne,
    TwoTwoOne,
    TwoTwoTwoOne,
    TwoTwoTwoTwo,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::One => "1",
            CaseLabel::TwoOne => "2.1",
            CaseLabel::TwoTwoOne => "2.2.1",
            CaseLabel::TwoTwoTwoOne => "2.2.2.1",
            CaseLabel::TwoTwoTwoTwo => "2.2.2.2",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CaseLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// One change of `f̂` (map `'f'`) or `ĝ` (map `'g'`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Override {
    pub map: char,
    pub arg: u64,
    pub old: u64,
    pub new: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranscriptEntry {
    pub step: u64,
    pub side: Side,
    pub case_label: CaseLabel,
    /// `(left, right)`.
    pub pair: (u64, u64),
    pub overrides: Vec<Override>,
}

/// `f̂` or `ĝ`: an oracle plus finite overrides.
struct Map {
    name: char,
    oracle: Arc<dyn Injection>,
    over: HashMap<u64, u64>,
    /// value -> arg for the overrides in force
    over_inv: HashMap<u64, u64>,
    /// original value -> arg, every value ever queried
    seen: HashMap<u64, u64>,
    /// `prefix[i] = max(oracle(0..=i))`
    prefix: Vec<u64>,
}

impl Map {
    fn new(name: char, oracle: Arc<dyn Injection>) -> Map {
        Map {
            name,
            oracle,
            over: HashMap::new(),
            over_inv: HashMap::new(),
            seen: HashMap::new(),
            prefix: Vec::new(),
        }
    }

    fn original(&mut self, x: u64) -> Result<u64, InjectivityViolation> {
        let y = self.oracle.apply(x);
        match self.seen.insert(y, x) {
            Some(prev) if prev != x => Err(InjectivityViolation {
                map: self.name,
                a: prev.min(x),
                b: prev.max(x),
                value: y,
            }),
            _ => Ok(y),
        }
    }

    fn get(&mut self, x: u64) -> Result<u64, InjectivityViolation> {
        match self.over.get(&x) {
            Some(&y) => Ok(y),
            None => self.original(x),
        }
    }

    /// The current preimage of `y`.
    fn preimage(&mut self, y: u64) -> Result<Option<u64>, InjectivityViolation> {
        if let Some(&x) = self.over_inv.get(&y) {
            return Ok(Some(x));
        }
        match self.oracle.preimage(y) {
            Some(x) if !self.over.contains_key(&x) => {
                let back = self.original(x)?;
                assert_eq!(back, y, "oracle preimage inconsistent with apply");
                Ok(Some(x))
            }
            _ => Ok(None),
        }
    }

    fn set(&mut self, x: u64, y: u64) -> Result<Override, InjectivityViolation> {
        let old = self.get(x)?;
        if let Some(prev) = self.over.insert(x, y) {
            if self.over_inv.get(&prev) == Some(&x) {
                self.over_inv.remove(&prev);
            }
        }
        self.over_inv.insert(y, x);
        Ok(Override {
            map: self.name,
            arg: x,
            old,
            new: y,
        })
    }

    fn prefix_max(&mut self, i: u64) -> u64 {
        while self.prefix.len() as u64 <= i {
            let x = self.prefix.len() as u64;
            let v = self.oracle.apply(x);
            let m = self.prefix.last().map_or(v, |&p| p.max(v));
            self.prefix.push(m);
        }
        self.prefix[i as usize]
    }
}

/// Partial bijection `h` with override maps `f̂`, `ĝ` and the side to
/// serve next.
pub struct BuilderState {
    maps: [Map; 2],
    h: BTreeMap<u64, u64>,
    h_inv: BTreeMap<u64, u64>,
    cursor: [u64; 2],
    turn: Side,
    steps: u64,
    transcript: Vec<TranscriptEntry>,
}

impl BuilderState {
    pub fn new(f: Arc<dyn Injection>, g: Arc<dyn Injection>) -> BuilderState {
        BuilderState::starting(f, g, Side::L)
    }

    pub fn starting(f: Arc<dyn Injection>, g: Arc<dyn Injection>, first: Side) -> BuilderState {
        BuilderState {
            maps: [Map::new('f', f), Map::new('g', g)],
            h: BTreeMap::new(),
            h_inv: BTreeMap::new(),
            cursor: [0, 0],
            turn: first,
            steps: 0,
            transcript: Vec::new(),
        }
    }

    pub fn turn(&self) -> Side {
        self.turn
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn h(&self) -> &BTreeMap<u64, u64> {
        &self.h
    }

    pub fn h_inv(&self) -> &BTreeMap<u64, u64> {
        &self.h_inv
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn into_transcript(self) -> Vec<TranscriptEntry> {
        self.transcript
    }

    fn covered(&self, side: Side, x: u64) -> bool {
        match side {
            Side::L => self.h.contains_key(&x),
            Side::R => self.h_inv.contains_key(&x),
        }
    }

    /// Least element of `side` not covered by `h`.
    pub fn least_uncovered(&self, side: Side) -> u64 {
        let mut x = self.cursor[side.index()];
        while self.covered(side, x) {
            x += 1;
        }
        x
    }

    /// `f̂(x)` (side L) or `ĝ(x)` (side R).
    pub fn hat(&mut self, side: Side, x: u64) -> Result<u64, BuildError> {
        Ok(self.maps[side.index()].get(x)?)
    }

    /// Serve the least uncovered element of the side whose turn it is and
    /// add one pair to `h`.
    pub fn build_step(&mut self) -> Result<&TranscriptEntry, BuildError> {
        let side = self.turn;
        let (a, b) = (side.index(), side.other().index());
        let x = self.least_uncovered(side);
        self.cursor[a] = x;

        // Served from the left, A = f̂ and B = ĝ; from the right the roles
        // swap and the pair is reported reversed.
        let y = self.maps[a].get(x)?;
        let w = self.maps[b].get(y)?;
        let mut overrides = Vec::new();
        let (case, pair) = if w == x {
            (CaseLabel::One, (x, y))
        } else {
            // bounded search for t < y with B(t) = x
            let mut below = None;
            for t in 0..y {
                if self.maps[b].get(t)? == x {
                    below = Some(t);
                    break;
                }
            }
            match below {
                None => match self.maps[b].preimage(x)? {
                    None => {
                        overrides.push(self.maps[b].set(y, x)?);
                        (CaseLabel::TwoOne, (x, y))
                    }
                    Some(t) => {
                        debug_assert!(t > y);
                        overrides.push(self.maps[b].set(t, w)?);
                        overrides.push(self.maps[b].set(y, x)?);
                        (CaseLabel::TwoTwoOne, (x, y))
                    }
                },
                Some(t) => match self.maps[a].preimage(t)? {
                    None => {
                        overrides.push(self.maps[a].set(x, t)?);
                        (CaseLabel::TwoTwoTwoOne, (x, t))
                    }
                    Some(s) => {
                        overrides.push(self.maps[a].set(x, t)?);
                        overrides.push(self.maps[a].set(s, y)?);
                        (CaseLabel::TwoTwoTwoTwo, (x, t))
                    }
                },
            }
        };
        let (l, r) = match side {
            Side::L => pair,
            Side::R => (pair.1, pair.0),
        };
        debug_assert!(!self.h.contains_key(&l) && !self.h_inv.contains_key(&r));
        self.h.insert(l, r);
        self.h_inv.insert(r, l);
        self.steps += 1;
        self.turn = side.other();
        self.transcript.push(TranscriptEntry {
            step: self.steps,
            side,
            case_label: case,
            pair: (l, r),
            overrides,
        });
        Ok(self.transcript.last().expect("just pushed"))
    }

    /// `h(v)` (side L) or `h⁻¹(v)` (side R), building as far as needed.
    pub fn resolve(&mut self, side: Side, v: u64) -> Result<u64, BuildError> {
        let limit = 2 * (v + 1);
        loop {
            let found = match side {
                Side::L => self.h.get(&v),
                Side::R => self.h_inv.get(&v),
            };
            if let Some(&u) = found {
                return Ok(u);
            }
            if self.steps >= limit {
                return Err(BuildError::CoverageBound {
                    side,
                    value: v,
                    steps: self.steps,
                });
            }
            self.build_step()?;
        }
    }

    /// Check every state invariant: `h ⊆ f̂`, `h⁻¹ ⊆ ĝ`, injectivity of
    /// `h`, `f̂`, `ĝ` on their queried points, and the prefix-max bound at
    /// every overridden point.
    pub fn check_invariants(&mut self) -> Result<(), BuildError> {
        let fail = |step: u64, detail: String| BuildError::Invariant { step, detail };
        let step = self.steps;
        let pairs: Vec<(u64, u64)> = self.h.iter().map(|(&l, &r)| (l, r)).collect();
        if self.h_inv.len() != pairs.len() {
            return Err(fail(step, "h is not injective".into()));
        }
        for (l, r) in pairs {
            if self.h_inv.get(&r) != Some(&l) {
                return Err(fail(step, format!("h and its inverse disagree at ({l}, {r})")));
            }
            if self.maps[0].get(l)? != r {
                return Err(fail(step, format!("h({l}) = {r} but f̂ differs")));
            }
            if self.maps[1].get(r)? != l {
                return Err(fail(step, format!("h⁻¹({r}) = {l} but ĝ differs")));
            }
        }
        for m in self.maps.iter_mut() {
            let name = m.name;
            // Original values at queried points are distinct (`seen` would
            // have reported a collision), so only overridden values can clash.
            let mut values = HashSet::new();
            for (&x, &y) in &m.over {
                let clash = match m.seen.get(&y) {
                    Some(&x0) => x0 != x && !m.over.contains_key(&x0),
                    None => false,
                };
                if !values.insert(y) || clash {
                    return Err(fail(step, format!("{name}\u{302} not injective at value {y}")));
                }
            }
            let overridden: Vec<(u64, u64)> = m.over.iter().map(|(&x, &y)| (x, y)).collect();
            for (x, y) in overridden {
                let bound = m.prefix_max(x);
                if y > bound {
                    return Err(fail(step, format!("{name}\u{302}({x}) = {y} exceeds prefix max {bound}")));
                }
            }
        }
        Ok(())
    }
}
