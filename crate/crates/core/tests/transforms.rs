use std::collections::{BTreeMap, HashMap, HashSet};

use haltkit::dovetail::{complexity_table, halting_table, ComplexityTable, GroundTruth, Schedule};
use haltkit::optimalkit::{
    certified_window_machine, combine_halves, desk_machine, domain_from_set, seat_exchange, shift_density,
    dedupe_values, left_total, HaltEvent, Machine, Shift, StringSet,
};
use haltkit::BinStr;

const N: usize = 10;

fn truth() -> GroundTruth {
    GroundTruth::desk(N, 1 << 20, 100_000)
}

fn k_map(events: &[HaltEvent], max_len: usize) -> BTreeMap<BinStr, usize> {
    complexity_table(events.iter(), max_len)
        .entries
        .into_iter()
        .map(|(y, e)| (y, e.k))
        .collect()
}

fn exact_counts(m: &Machine) -> Vec<u64> {
    let t = halting_table(m.materialize().iter(), m.max_len(), &[u64::MAX]);
    (0..=m.max_len()).map(|n| t.h(n, 0)).collect()
}

#[test]
fn left_total_fills_initial_segments() {
    let u = desk_machine(N, Schedule::doubling(1 << 20), 100_000);
    let lt = left_total(&u).materialize();
    let mut seen: HashMap<usize, u64> = HashMap::new();
    for e in &lt {
        let next = seen.entry(e.program.len()).or_default();
        assert_eq!(e.program.as_u64(), Some(*next), "seat out of order");
        *next += 1;
    }
    assert_eq!(k_map(&lt, N), k_map(&u.materialize(), N));
}

#[test]
fn dedupe_gives_one_program_per_value_and_length() {
    let u = certified_window_machine(&truth());
    let d = dedupe_values(&u).materialize();
    let mut pairs = HashSet::new();
    for e in &d {
        assert!(pairs.insert((e.program.len(), e.output.clone())), "repeated value {}", e.output);
    }
    assert_eq!(k_map(&d, N), k_map(&u.materialize(), N));
    let lt = left_total(&u).materialize();
    let distinct: HashSet<_> = lt.iter().map(|e| (e.program.len(), e.output.clone())).collect();
    assert_eq!(distinct, pairs);
}

#[test]
fn domain_from_even_lengths_with_c_two() {
    let truth = truth();
    let u = certified_window_machine(&truth);
    let s = StringSet::filtered("even", N + 2, |z| z.len() % 2 == 0);
    // c = 1 runs short at length 10: 1365 even strings of length at most
    // 11 against H_10 = 1393
    assert!(domain_from_set(&u, &s, 1).is_err());
    let v = domain_from_set(&u, &s, 2).expect("even lengths suffice with c = 2");
    let dom: Vec<BinStr> = v.materialize().into_iter().map(|e| e.program).collect();
    assert_eq!(dom, s.to_vec());
    let ku = ComplexityTable::from_truth(&truth);
    let kv = k_map(&v.materialize(), N + 2);
    for (y, e) in &ku.entries {
        assert!(kv[y] <= e.k + 2, "K_V({y}) = {} vs K_U = {}", kv[y], e.k);
    }
}

#[test]
fn seat_exchange_keeps_the_value_multiset() {
    let u = certified_window_machine(&truth());
    let w: Vec<StringSet> = (1..=3)
        .map(|n| StringSet::filtered(format!("W{n}"), N + 1, move |z| z.get(0) == Some(true) && z.len() > n - 1))
        .collect();
    let out = seat_exchange(&u, &w).materialize();
    let dom: HashSet<&BinStr> = out.iter().map(|e| &e.program).collect();
    assert_eq!(dom.len(), out.len(), "seat assigned twice");

    // each retired W_n contributes its first element longer than n
    let mut added = 0;
    for (i, ws) in w.iter().enumerate() {
        let first = ws.iter().find(|z| z.len() > i + 1).unwrap();
        assert!(dom.contains(&first), "{first} missing");
        added += 1;
    }
    let mut before: Vec<(usize, BinStr)> = u.events().map(|e| (e.program.len() + 1, e.output)).collect();
    before.sort();
    let mut after: Vec<(usize, BinStr)> = out
        .iter()
        .filter(|e| e.program.get(0) != Some(true))
        .map(|e| (e.program.len(), e.output.clone()))
        .collect();
    after.sort();
    assert_eq!(before, after);
    assert_eq!(out.len(), before.len() + added);
}

#[test]
fn shifts_and_combination_counts() {
    let u = certified_window_machine(&truth());
    let h = exact_counts(&u);
    let zero = exact_counts(&shift_density(&u, Shift::Zero));
    let ones = exact_counts(&shift_density(&u, Shift::OneFill));
    for n in 0..=N {
        assert_eq!(zero[n + 1], h[n]);
        assert_eq!(ones[n + 1], h[n] + (1 << n));
    }
    let right = StringSet::filtered("odd ones", N + 3, |z| z.get(0) == Some(true) && z.len() % 2 == 1);
    let comb = exact_counts(&combine_halves(&u, 3, &right));
    for n in 0..=N + 3 {
        let left = if n >= 3 { h[n - 3] } else { 0 };
        let r = if n % 2 == 1 { 1u64 << (n - 1) } else { 0 };
        assert_eq!(comb[n], left + r, "n = {n}");
    }
}

#[test]
#[should_panic(expected = "does not start with 1")]
fn combine_rejects_zero_prefixed_right_part() {
    let u = certified_window_machine(&truth());
    combine_halves(&u, 1, &StringSet::from_vec("bad", vec!["01".parse().unwrap()])).materialize();
}
